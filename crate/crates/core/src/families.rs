//! Biorthogonal families built from the Gaussian factors.
//!
//! `p = S χ₁` is a family of monic matrix polynomials; `p̃ = (S̃⁻¹)ᵀ χ₂` is
//! a family of linear forms, i.e. finite combinations of the weights, with
//! `p̃_l(x)ᵀ = Σ_j ρ_j(x) (S̃⁻¹)_{jl}`. Here `χ₁` has blocks `x^i I_N` and
//! `χ₂` has blocks `ρ_j(x)ᵀ`, so that `∫ χ₁ χ₂ᵀ dx = g`.
//!
//! The associated families `p_{l,±j}`, `p̃_{l,±j}` are obtained from finite
//! linear solves against `g^{[l]}` or `g^{[l+1]}`, one solve per member.

use crate::blockops::BlockMatrix;
use crate::check::{CheckReport, ResidualTracker};
use crate::error::{Error, Result};
use crate::factorize::GaussFactors;
use crate::numerics::{Mat, Scalar, Tolerance};
use crate::weights::{PointMode, Poly, WeightFamily};

/// Left matrix polynomial `Σ_k c_k x^k` with `N × N` coefficient blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial<S> {
    n: usize,
    coeffs: Vec<Mat<S>>,
}

/// Linear form with value `f(x)ᵀ = Σ_j ρ_j(x) d_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm<S> {
    n: usize,
    coeffs: Vec<Mat<S>>,
}

fn padded_distance<S: Scalar>(n: usize, a: &[Mat<S>], b: &[Mat<S>]) -> (S, S) {
    let zero = Mat::zeros(n, n);
    let mut dist = S::zero();
    let mut scale = S::zero();
    for k in 0..a.len().max(b.len()) {
        let x = a.get(k).unwrap_or(&zero);
        let y = b.get(k).unwrap_or(&zero);
        let d = (x.clone() - y).max_norm();
        if d > dist {
            dist = d;
        }
        for v in [x.max_norm(), y.max_norm()] {
            if v > scale {
                scale = v;
            }
        }
    }
    (dist, scale)
}

fn combine<S: Scalar>(n: usize, a: &[Mat<S>], b: &[Mat<S>], sign: bool) -> Vec<Mat<S>> {
    let zero = Mat::zeros(n, n);
    (0..a.len().max(b.len()))
        .map(|k| {
            let x = a.get(k).unwrap_or(&zero).clone();
            let y = b.get(k).unwrap_or(&zero);
            if sign {
                x + y
            } else {
                x - y
            }
        })
        .collect()
}

fn highest_nonzero<S: Scalar>(coeffs: &[Mat<S>]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero())
}

impl<S: Scalar> MatrixPolynomial<S> {
    pub fn new(n: usize, coeffs: Vec<Mat<S>>) -> Self {
        assert!(
            coeffs.iter().all(|c| c.rows() == n && c.cols() == n),
            "coefficient blocks must be {n}x{n}"
        );
        MatrixPolynomial { n, coeffs }
    }

    pub fn zero(n: usize) -> Self {
        MatrixPolynomial { n, coeffs: Vec::new() }
    }

    /// `x^k I_N`.
    pub fn monomial(n: usize, k: usize) -> Self {
        let mut coeffs = vec![Mat::zeros(n, n); k + 1];
        coeffs[k] = Mat::identity(n);
        MatrixPolynomial { n, coeffs }
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Mat<S>] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero past the stored length).
    pub fn coeff(&self, k: usize) -> Mat<S> {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Mat::zeros(self.n, self.n))
    }

    /// Exact degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        highest_nonzero(&self.coeffs)
    }

    pub fn eval(&self, x: &S) -> Mat<S> {
        let mut acc = Mat::zeros(self.n, self.n);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(x) + c;
        }
        acc
    }

    /// `C · p(x)`.
    pub fn left_mul(&self, c: &Mat<S>) -> Self {
        MatrixPolynomial {
            n: self.n,
            coeffs: self.coeffs.iter().map(|b| c.matmul(b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        MatrixPolynomial {
            n: self.n,
            coeffs: combine(self.n, &self.coeffs, &other.coeffs, true),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        MatrixPolynomial {
            n: self.n,
            coeffs: combine(self.n, &self.coeffs, &other.coeffs, false),
        }
    }

    /// Max-norm distance between coefficient lists, and their common scale.
    pub fn distance(&self, other: &Self) -> (S, S) {
        padded_distance(self.n, &self.coeffs, &other.coeffs)
    }

    /// Entry `(a, c)` as a scalar polynomial.
    pub fn entry(&self, a: usize, c: usize) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(|m| m[(a, c)].clone()).collect())
    }
}

impl<S: Scalar> LinearForm<S> {
    pub fn new(n: usize, coeffs: Vec<Mat<S>>) -> Self {
        assert!(
            coeffs.iter().all(|c| c.rows() == n && c.cols() == n),
            "coefficient blocks must be {n}x{n}"
        );
        LinearForm { n, coeffs }
    }

    pub fn zero(n: usize) -> Self {
        LinearForm { n, coeffs: Vec::new() }
    }

    /// The single weight `ρ_k`, i.e. coefficient `I_N` at block `k`.
    pub fn weight(n: usize, k: usize) -> Self {
        let mut coeffs = vec![Mat::zeros(n, n); k + 1];
        coeffs[k] = Mat::identity(n);
        LinearForm { n, coeffs }
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Mat<S>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Mat<S> {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Mat::zeros(self.n, self.n))
    }

    /// Highest weight index with a nonzero coefficient.
    pub fn level(&self) -> Option<usize> {
        highest_nonzero(&self.coeffs)
    }

    /// `f(x)ᵀ` with the measure density included.
    pub fn eval(&self, fam: &WeightFamily<S>, x: &S) -> Result<Mat<S>> {
        self.eval_with(fam, x, PointMode::Full)
    }

    pub fn eval_with(&self, fam: &WeightFamily<S>, x: &S, mode: PointMode) -> Result<Mat<S>> {
        let mut acc = Mat::zeros(self.n, self.n);
        for (j, d) in self.coeffs.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            acc = acc + &fam.eval_with(j, x, mode)?.matmul(d);
        }
        Ok(acc)
    }

    /// The form whose value is `f(x)ᵀ · C`.
    pub fn right_mul(&self, c: &Mat<S>) -> Self {
        LinearForm {
            n: self.n,
            coeffs: self.coeffs.iter().map(|d| d.matmul(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        LinearForm {
            n: self.n,
            coeffs: combine(self.n, &self.coeffs, &other.coeffs, true),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        LinearForm {
            n: self.n,
            coeffs: combine(self.n, &self.coeffs, &other.coeffs, false),
        }
    }

    pub fn distance(&self, other: &Self) -> (S, S) {
        padded_distance(self.n, &self.coeffs, &other.coeffs)
    }
}

/// `χ₁^{[len]}(x)`: block column with blocks `x^i I_N`.
pub fn monomial_vector<S: Scalar>(n: usize, len: usize, x: &S) -> BlockMatrix<S> {
    let mut v = BlockMatrix::zeros(n, len, 1);
    let mut p = S::one();
    for i in 0..len {
        v.set_block(i, 0, &Mat::identity(n).scale(&p));
        p *= x;
    }
    v
}

/// `χ₂^{[len]}(x)`: block column with blocks `ρ_j(x)ᵀ`.
pub fn weight_vector<S: Scalar>(fam: &WeightFamily<S>, len: usize, x: &S, mode: PointMode) -> Result<BlockMatrix<S>> {
    let n = fam.block_size();
    let mut v = BlockMatrix::zeros(n, len, 1);
    for j in 0..len {
        v.set_block(j, 0, &fam.eval_with(j, x, mode)?.transpose());
    }
    Ok(v)
}

/// `p = S χ₁`: `p_l` has the blocks of row `l` of `S`.
pub fn primary_family<S: Scalar>(f: &GaussFactors<S>) -> Vec<MatrixPolynomial<S>> {
    let n = f.block_size();
    (0..f.levels())
        .map(|l| MatrixPolynomial::new(n, (0..=l).map(|k| f.s().block(l, k)).collect()))
        .collect()
}

/// `p̃ = (S̃⁻¹)ᵀ χ₂`: `p̃_l` has the blocks of column `l` of `S̃⁻¹`.
pub fn dual_family<S: Scalar>(f: &GaussFactors<S>) -> Vec<LinearForm<S>> {
    let n = f.block_size();
    (0..f.levels())
        .map(|l| LinearForm::new(n, (0..=l).map(|j| f.stilde_inv().block(j, l)).collect()))
        .collect()
}

pub fn eval_poly<S: Scalar>(p: &MatrixPolynomial<S>, x: &S) -> Mat<S> {
    p.eval(x)
}

pub fn eval_form<S: Scalar>(f: &LinearForm<S>, fam: &WeightFamily<S>, x: &S) -> Result<Mat<S>> {
    f.eval(fam, x)
}

fn require(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange(what()))
    }
}

fn split_blocks<S: Scalar>(n: usize, m: &Mat<S>, horizontal: bool) -> Vec<Mat<S>> {
    if horizontal {
        (0..m.cols() / n)
            .map(|k| m.submatrix(0, n, k * n, (k + 1) * n))
            .collect()
    } else {
        (0..m.rows() / n)
            .map(|k| m.submatrix(k * n, (k + 1) * n, 0, n))
            .collect()
    }
}

/// `p_{l,+j} = χ₁^{(l+j)} − (g_{l+j,0} … g_{l+j,l−1}) (g^{[l]})⁻¹ χ₁^{[l]}`.
pub fn associated_plus<S: Scalar>(g: &BlockMatrix<S>, l: usize, j: usize) -> Result<MatrixPolynomial<S>> {
    let n = g.block_size();
    require(l + j < g.block_rows(), || {
        format!("p_{{{l},+{j}}} needs block row {} of g", l + j)
    })?;
    let mut coeffs = vec![Mat::zeros(n, n); l + j + 1];
    if l > 0 {
        let lead = g.leading(l);
        let row = g.slice(l + j, l + j + 1, 0, l);
        let r = lead
            .dense()
            .solve_left(row.dense())
            .map_err(|_| Error::SingularMinor { size: l })?;
        for (k, block) in split_blocks(n, &r, true).into_iter().enumerate() {
            coeffs[k] = -block;
        }
    }
    coeffs[l + j] = Mat::identity(n);
    Ok(MatrixPolynomial::new(n, coeffs))
}

/// `p_{l,−j} = e_{l−j}ᵀ (g^{[l+1]})⁻¹ χ₁^{[l+1]}`.
pub fn associated_minus<S: Scalar>(g: &BlockMatrix<S>, l: usize, j: usize) -> Result<MatrixPolynomial<S>> {
    let n = g.block_size();
    require(j <= l, || format!("p_{{{l},-{j}}} needs j <= l"))?;
    require(l < g.block_rows(), || format!("p_{{{l},-{j}}} needs g^[{}]", l + 1))?;
    let lead = g.leading(l + 1);
    let mut e = Mat::zeros(n, (l + 1) * n);
    e.set_submatrix(0, (l - j) * n, &Mat::identity(n));
    let r = lead
        .dense()
        .solve_left(&e)
        .map_err(|_| Error::SingularMinor { size: l + 1 })?;
    Ok(MatrixPolynomial::new(n, split_blocks(n, &r, true)))
}

/// `p̃_{l,+j}ᵀ = χ₂^{(l+j)ᵀ} − χ₂^{[l]ᵀ} (g^{[l]})⁻¹ (g_{0,l+j} … g_{l−1,l+j})ᵀ`.
pub fn dual_associated_plus<S: Scalar>(g: &BlockMatrix<S>, l: usize, j: usize) -> Result<LinearForm<S>> {
    let n = g.block_size();
    require(l + j < g.block_cols(), || {
        format!("p̃_{{{l},+{j}}} needs block column {} of g", l + j)
    })?;
    let mut coeffs = vec![Mat::zeros(n, n); l + j + 1];
    if l > 0 {
        let lead = g.leading(l);
        let col = g.slice(0, l, l + j, l + j + 1);
        let d = lead
            .dense()
            .solve(col.dense())
            .map_err(|_| Error::SingularMinor { size: l })?;
        for (k, block) in split_blocks(n, &d, false).into_iter().enumerate() {
            coeffs[k] = -block;
        }
    }
    coeffs[l + j] = Mat::identity(n);
    Ok(LinearForm::new(n, coeffs))
}

/// `p̃_{l,−j}ᵀ = χ₂^{[l+1]ᵀ} (g^{[l+1]})⁻¹ e_{l−j}`.
pub fn dual_associated_minus<S: Scalar>(g: &BlockMatrix<S>, l: usize, j: usize) -> Result<LinearForm<S>> {
    let n = g.block_size();
    require(j <= l, || format!("p̃_{{{l},-{j}}} needs j <= l"))?;
    require(l < g.block_rows(), || format!("p̃_{{{l},-{j}}} needs g^[{}]", l + 1))?;
    let lead = g.leading(l + 1);
    let mut e = Mat::zeros((l + 1) * n, n);
    e.set_submatrix((l - j) * n, 0, &Mat::identity(n));
    let d = lead
        .dense()
        .solve(&e)
        .map_err(|_| Error::SingularMinor { size: l + 1 })?;
    Ok(LinearForm::new(n, split_blocks(n, &d, false)))
}

/// `∫ p(x) f(x)ᵀ dx`, integrated exactly entry by entry.
///
/// Each entry expands to `Σ_{c,e,j} ∫ p_{ac}(x) ρ_{j,ce}(x) dx · (d_j)_{eb}`;
/// every `p_{ac} ρ_{j,ce}` is a polynomial against one base measure and is
/// integrated from that measure's moment table. No moment matrix is used.
pub fn pairing<S: Scalar>(fam: &WeightFamily<S>, p: &MatrixPolynomial<S>, f: &LinearForm<S>) -> Result<Mat<S>> {
    let n = fam.block_size();
    let entries: Vec<Vec<Poly<S>>> = (0..n).map(|a| (0..n).map(|c| p.entry(a, c)).collect()).collect();
    let mut out = Mat::zeros(n, n);
    for (j, d) in f.coeffs().iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        for c in 0..n {
            for e in 0..n {
                let (shift, seed) = fam.resolve(j, c, e);
                let weight = seed.density.shift(shift);
                for a in 0..n {
                    let integral = entries[a][c].mul(&weight).integrate(&seed.measure)?;
                    if integral.is_zero() {
                        continue;
                    }
                    for b in 0..n {
                        let t = integral.clone() * &d[(e, b)];
                        out[(a, b)] += &t;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `∫ p(x) f(x)ᵀ dx = Σ_{i,j} c_i g_{ij} d_j`, read off the moment matrix.
pub fn pairing_via_moments<S: Scalar>(
    g: &BlockMatrix<S>,
    p: &MatrixPolynomial<S>,
    f: &LinearForm<S>,
) -> Result<Mat<S>> {
    let n = g.block_size();
    let (rows, cols) = (p.coeffs().len(), f.coeffs().len());
    require(rows <= g.block_rows() && cols <= g.block_cols(), || {
        format!(
            "pairing of degree {} against level {} exceeds the truncation",
            rows.saturating_sub(1),
            cols.saturating_sub(1)
        )
    })?;
    let mut out = Mat::zeros(n, n);
    for (j, d) in f.coeffs().iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        let mut w = Mat::zeros(n, n);
        for (i, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                w = w + &c.matmul(&g.block(i, j));
            }
        }
        out = out + &w.matmul(d);
    }
    Ok(out)
}

fn delta<S: Scalar>(n: usize, on: bool) -> Mat<S> {
    if on {
        Mat::identity(n)
    } else {
        Mat::zeros(n, n)
    }
}

/// `∫ p_i p̃_jᵀ dx = δ_{ij} I_N` for all `i, j` below the family lengths.
pub fn check_biorthogonality<S: Scalar>(
    fam: &WeightFamily<S>,
    p: &[MatrixPolynomial<S>],
    dual: &[LinearForm<S>],
    tol: Tolerance,
) -> Result<CheckReport<S>> {
    let n = fam.block_size();
    let mut t = ResidualTracker::new(tol);
    for (i, pi) in p.iter().enumerate() {
        for (j, fj) in dual.iter().enumerate() {
            let v = pairing(fam, pi, fj)?;
            t.record_pair(&v, &delta(n, i == j), || format!("i={i} j={j}"));
        }
    }
    Ok(t.finish("biorthogonality"))
}

/// Both displayed forms of `p_l` and `p̃_l` against the factor rows/columns,
/// plus the consistency relations `p_{l,+0} = p_l`, `S̃_{ll} p_{l,−0} = p_l`,
/// `p̃_{l,−0} = p̃_l`, `p̃_{l,+0}ᵀ S̃_{ll}⁻¹ = p̃_lᵀ`.
pub fn check_matrix_notation<S: Scalar>(
    g: &BlockMatrix<S>,
    f: &GaussFactors<S>,
    l: usize,
    tol: Tolerance,
) -> Result<CheckReport<S>> {
    let mut t = ResidualTracker::new(tol);
    let p = &primary_family(f)[l];
    let pt = &dual_family(f)[l];
    let h = f.normalization(l);
    let h_inv = f.stilde_inv().block(l, l);

    let schur = associated_plus(g, l, 0)?;
    let bottom = associated_minus(g, l, 0)?.left_mul(&h);
    let (d, s) = schur.distance(p);
    t.record(d, &s, || format!("l={l}: Schur form vs row of S"));
    let (d, s) = bottom.distance(p);
    t.record(d, &s, || format!("l={l}: S̃_ll e_lᵀ(g^[l+1])⁻¹χ₁ vs row of S"));

    let dual_schur = dual_associated_plus(g, l, 0)?.right_mul(&h_inv);
    let dual_bottom = dual_associated_minus(g, l, 0)?;
    let (d, s) = dual_schur.distance(pt);
    t.record(d, &s, || format!("l={l}: dual Schur form vs column of S̃⁻¹"));
    let (d, s) = dual_bottom.distance(pt);
    t.record(d, &s, || format!("l={l}: χ₂ᵀ(g^[l+1])⁻¹e_l vs column of S̃⁻¹"));

    let monic = p.coeff(l);
    t.record_pair(&monic, &Mat::identity(f.block_size()), || {
        format!("l={l}: leading block of p_l")
    });
    Ok(t.finish("matrix-notation"))
}

/// Connection formulas between associated and regular families:
///
/// - `p_{l,+j} = Σ_{i=l}^{l+j} (S⁻¹)_{l+j,i} p_i`
/// - `p_{l,−j} = Σ_{k=l−j}^{l} (S̃⁻¹)_{l−j,k} p_k`
/// - `p̃_{l,+j}ᵀ = Σ_{i=l}^{l+j} p̃_iᵀ S̃_{i,l+j}`
/// - `p̃_{l,−j}ᵀ = Σ_{k=l−j}^{l} p̃_kᵀ S_{k,l−j}`
///
/// and the coefficient relation `∫ p_{l,−j} p̃_kᵀ dx = (S̃⁻¹)_{l−j,k}`, `k <= l`.
pub fn check_connection_formulas<S: Scalar>(
    fam: &WeightFamily<S>,
    f: &GaussFactors<S>,
    g: &BlockMatrix<S>,
    l: usize,
    j: usize,
    tol: Tolerance,
) -> Result<CheckReport<S>> {
    require(j <= l && l + j < f.levels(), || {
        format!("connection formulas need j <= l and l+j < L (l={l}, j={j})")
    })?;
    let n = f.block_size();
    let p = primary_family(f);
    let pt = dual_family(f);
    let mut t = ResidualTracker::new(tol);

    let mut plus = MatrixPolynomial::zero(n);
    for i in l..=l + j {
        plus = plus.add(&p[i].left_mul(&f.s_inv().block(l + j, i)));
    }
    let (d, s) = associated_plus(g, l, j)?.distance(&plus);
    t.record(d, &s, || format!("l={l} j={j}: p_(l,+j)"));

    let mut minus = MatrixPolynomial::zero(n);
    for k in l - j..=l {
        minus = minus.add(&p[k].left_mul(&f.stilde_inv().block(l - j, k)));
    }
    let direct_minus = associated_minus(g, l, j)?;
    let (d, s) = direct_minus.distance(&minus);
    t.record(d, &s, || format!("l={l} j={j}: p_(l,-j)"));

    let mut dplus = LinearForm::zero(n);
    for i in l..=l + j {
        dplus = dplus.add(&pt[i].right_mul(&f.stilde().block(i, l + j)));
    }
    let (d, s) = dual_associated_plus(g, l, j)?.distance(&dplus);
    t.record(d, &s, || format!("l={l} j={j}: p̃_(l,+j)"));

    let mut dminus = LinearForm::zero(n);
    for k in l - j..=l {
        dminus = dminus.add(&pt[k].right_mul(&f.s().block(k, l - j)));
    }
    let (d, s) = dual_associated_minus(g, l, j)?.distance(&dminus);
    t.record(d, &s, || format!("l={l} j={j}: p̃_(l,-j)"));

    for k in 0..=l {
        let v = pairing(fam, &direct_minus, &pt[k])?;
        t.record_pair(&v, &f.stilde_inv().block(l - j, k), || {
            format!("l={l} j={j} k={k}: ∫p_(l,-j) p̃_kᵀ vs (S̃⁻¹)_(l-j,k)")
        });
    }
    Ok(t.finish("connection"))
}

/// Modified orthogonality of the associated families, by exact integration:
/// `∫ p_{l,+j} ρ_k = 0` and `∫ x^k p̃_{l,+j}ᵀ = 0` for `k < l` (both monic of
/// degree `l + j`), `∫ p_{l,−j} ρ_k = δ_{k,l−j} I_N` and
/// `∫ x^k p̃_{l,−j}ᵀ = δ_{k,l−j} I_N` for `k <= l`.
pub fn check_modified_orthogonality<S: Scalar>(
    fam: &WeightFamily<S>,
    g: &BlockMatrix<S>,
    l: usize,
    j: usize,
    tol: Tolerance,
) -> Result<CheckReport<S>> {
    let n = fam.block_size();
    let mut t = ResidualTracker::new(tol);
    let zero = Mat::zeros(n, n);
    let one = Mat::identity(n);

    if l + j < g.block_rows() {
        let p = associated_plus(g, l, j)?;
        let q = dual_associated_plus(g, l, j)?;
        for k in 0..l {
            let v = pairing(fam, &p, &LinearForm::weight(n, k))?;
            t.record_pair(&v, &zero, || format!("l={l} j={j} k={k}: ∫p_(l,+j)ρ_k"));
            let v = pairing(fam, &MatrixPolynomial::monomial(n, k), &q)?;
            t.record_pair(&v, &zero, || format!("l={l} j={j} k={k}: ∫x^k p̃_(l,+j)ᵀ"));
        }
        t.record_pair(&p.coeff(l + j), &one, || format!("l={l} j={j}: p_(l,+j) monic"));
        t.record_pair(&q.coeff(l + j), &one, || format!("l={l} j={j}: p̃_(l,+j) monic"));
        let deg_ok = p.degree() == Some(l + j);
        t.record(if deg_ok { S::zero() } else { S::one() }, &S::one(), || {
            format!("l={l} j={j}: deg p_(l,+j) = {:?}", p.degree())
        });
    }
    if j <= l && l < g.block_rows() {
        let p = associated_minus(g, l, j)?;
        let q = dual_associated_minus(g, l, j)?;
        for k in 0..=l {
            let expect = delta(n, k == l - j);
            let v = pairing(fam, &p, &LinearForm::weight(n, k))?;
            t.record_pair(&v, &expect, || format!("l={l} j={j} k={k}: ∫p_(l,-j)ρ_k"));
            let v = pairing(fam, &MatrixPolynomial::monomial(n, k), &q)?;
            t.record_pair(&v, &expect, || format!("l={l} j={j} k={k}: ∫x^k p̃_(l,-j)ᵀ"));
        }
        let deg = p.degree();
        t.record(
            if deg.is_some_and(|d| d <= l) {
                S::zero()
            } else {
                S::one()
            },
            &S::one(),
            || format!("l={l} j={j}: deg p_(l,-j) = {deg:?}"),
        );
        if deg != Some(l) {
            t.note(format!("l={l} j={j}: p_(l,-j) has exact degree {deg:?}, below l"));
        }
    }
    Ok(t.finish("modified-orthogonality"))
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;
    use crate::blockops::build_moment_matrix;
    use crate::factorize::lu_factorize;
    use crate::numerics::{ratio, Rational};
    use crate::weights::{BaseMeasure, SeedWeight};

    type Q = Rational;

    fn q(p: i64, d: i64) -> Q {
        ratio(p, d)
    }

    fn s(v: Q) -> Mat<Q> {
        Mat::from_rows(vec![vec![v]])
    }

    fn spoly(c: &[Q]) -> MatrixPolynomial<Q> {
        MatrixPolynomial::new(1, c.iter().cloned().map(s).collect())
    }

    fn legendre() -> WeightFamily<Q> {
        WeightFamily::hankel(vec![vec![SeedWeight::on_unit_interval(vec![q(1, 1)])]])
    }

    fn fam12() -> WeightFamily<Q> {
        WeightFamily::scalar(
            1,
            2,
            vec![
                SeedWeight::on_unit_interval(vec![q(1, 1)]),
                SeedWeight::on_unit_interval(vec![q(0, 1), q(0, 1), q(1, 1)]),
            ],
        )
        .unwrap()
    }

    fn setup(fam: &WeightFamily<Q>, l_max: usize) -> (BlockMatrix<Q>, GaussFactors<Q>) {
        let g = build_moment_matrix(fam, l_max).unwrap();
        let f = lu_factorize(&g).unwrap();
        (g, f)
    }

    #[test]
    fn primary_family_examples() {
        let (_, f) = setup(&legendre(), 2);
        let p = primary_family(&f);
        assert_eq!(p[0], spoly(&[q(1, 1)]));
        assert_eq!(p[1], spoly(&[q(-1, 2), q(1, 1)]));

        let id = lu_factorize(&BlockMatrix::<Q>::identity(2, 4)).unwrap();
        for (l, pl) in primary_family(&id).iter().enumerate() {
            let (d, _) = pl.distance(&MatrixPolynomial::monomial(2, l));
            assert!(d.is_zero());
        }

        let herm = WeightFamily::hankel(vec![vec![SeedWeight::new(Poly::constant(1.0), BaseMeasure::Gaussian)]]);
        let g = build_moment_matrix(&herm, 3).unwrap();
        let p2 = &primary_family(&lu_factorize(&g).unwrap())[2];
        assert!((p2.coeff(0)[(0, 0)] + 0.5).abs() < 1e-14);
        assert!(p2.coeff(1)[(0, 0)].abs() < 1e-14);
        assert_eq!(p2.coeff(2)[(0, 0)], 1.0);
    }

    #[test]
    fn dual_family_examples() {
        let (_, f) = setup(&legendre(), 2);
        let d = dual_family(&f);
        assert_eq!(d[1], LinearForm::new(1, vec![s(q(-6, 1)), s(q(12, 1))]));
        let fam = legendre();
        assert_eq!(eval_form(&d[1], &fam, &q(1, 2)).unwrap()[(0, 0)], q(0, 1));
        assert_eq!(eval_form(&d[1], &fam, &q(1, 1)).unwrap()[(0, 0)], q(6, 1));
        assert!(eval_form(&LinearForm::zero(1), &fam, &q(1, 3)).unwrap().is_zero());

        // g = I: S̃⁻¹ = I so p̃_l(x)ᵀ = ρ_l(x) = x^l for the unit-interval weight
        let id = lu_factorize(&BlockMatrix::<Q>::identity(1, 4)).unwrap();
        let forms = dual_family(&id);
        for (l, fl) in forms.iter().enumerate() {
            let v = eval_form(fl, &fam, &q(2, 3)).unwrap()[(0, 0)].clone();
            assert_eq!(v, q(2, 3).power(l));
        }
        assert_eq!(eval_form(&forms[0], &fam, &q(1, 5)).unwrap()[(0, 0)], q(1, 1));
    }

    #[test]
    fn eval_poly_examples() {
        assert_eq!(eval_poly(&spoly(&[q(-1, 2), q(1, 1)]), &q(1, 2))[(0, 0)], q(0, 1));
        assert_eq!(
            eval_poly(&spoly(&[q(-1, 2), q(0, 1), q(1, 1)]), &q(0, 1))[(0, 0)],
            q(-1, 2)
        );
        assert_eq!(eval_poly(&spoly(&[q(7, 3)]), &q(11, 1))[(0, 0)], q(7, 3));
    }

    #[test]
    fn biorthogonality_holds_exactly() {
        for (fam, l_max) in [(legendre(), 6), (fam12(), 4)] {
            let (_, f) = setup(&fam, l_max);
            let r = check_biorthogonality(&fam, &primary_family(&f), &dual_family(&f), Tolerance::default()).unwrap();
            assert!(r.passed, "{:?}", r.first_failure);
            assert!(r.max_residual.is_zero());
            assert_eq!(r.samples, l_max * l_max);
        }
    }

    #[test]
    fn associated_examples() {
        let fam = legendre();
        let (g, f) = setup(&fam, 3);
        let p = primary_family(&f);
        assert_eq!(associated_plus(&g, 2, 0).unwrap(), p[2]);
        assert_eq!(associated_plus(&g, 1, 1).unwrap(), spoly(&[q(-1, 3), q(0, 1), q(1, 1)]));
        assert_eq!(associated_plus(&g, 0, 2).unwrap(), MatrixPolynomial::monomial(1, 2));

        let m = associated_minus(&g, 1, 1).unwrap();
        assert_eq!(m, spoly(&[q(4, 1), q(-6, 1)]));
        let hinv = f.stilde_inv().block(2, 2);
        assert_eq!(associated_minus(&g, 2, 0).unwrap(), p[2].left_mul(&hinv));

        let dm = dual_associated_minus(&g, 1, 1).unwrap();
        assert_eq!(dm, LinearForm::new(1, vec![s(q(4, 1)), s(q(-6, 1))]));
        assert_eq!(
            pairing(&fam, &MatrixPolynomial::monomial(1, 0), &dm).unwrap()[(0, 0)],
            q(1, 1)
        );
        assert_eq!(dual_associated_minus(&g, 2, 0).unwrap(), dual_family(&f)[2]);

        let id = BlockMatrix::<Q>::identity(2, 5);
        for l in 0..5 {
            for j in 0..=l {
                let (d, _) = associated_minus(&id, l, j)
                    .unwrap()
                    .distance(&MatrixPolynomial::monomial(2, l - j));
                assert!(d.is_zero());
                let (d, _) = dual_associated_minus(&id, l, j)
                    .unwrap()
                    .distance(&LinearForm::weight(2, l - j));
                assert!(d.is_zero());
            }
        }
        assert_eq!(associated_minus(&id, 3, 1).unwrap().degree(), Some(2));
    }

    #[test]
    fn periodic_rank_deficiency() {
        // ρ₄ = x²ρ₀ = ρ₁, so the fifth leading minor vanishes
        let g = build_moment_matrix(&fam12(), 5).unwrap();
        assert_eq!(lu_factorize(&g), Err(Error::SingularLeadingMinor { level: 4 }));
    }

    #[test]
    fn associated_range_errors() {
        let (g, _) = setup(&legendre(), 3);
        assert!(matches!(associated_minus(&g, 1, 2), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(
            dual_associated_minus(&g, 0, 1),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(associated_plus(&g, 2, 1), Err(Error::IndexOutOfRange(_))));
        assert!(associated_minus(&g, 3, 0).is_err());
    }

    #[test]
    fn modified_orthogonality_examples() {
        let fam = legendre();
        let (g, _) = setup(&fam, 4);
        let p11 = associated_plus(&g, 1, 1).unwrap();
        assert!(pairing(&fam, &p11, &LinearForm::weight(1, 0)).unwrap().is_zero());
        let m11 = associated_minus(&g, 1, 1).unwrap();
        assert_eq!(pairing(&fam, &m11, &LinearForm::weight(1, 0)).unwrap()[(0, 0)], q(1, 1));
        assert!(pairing(&fam, &m11, &LinearForm::weight(1, 1)).unwrap().is_zero());
        for l in 0..4 {
            for j in 0..=l {
                let r = check_modified_orthogonality(&fam, &g, l, j, Tolerance::default()).unwrap();
                assert!(r.passed, "l={l} j={j}: {:?}", r.first_failure);
            }
        }
        let r0 = check_modified_orthogonality(&fam, &g, 0, 0, Tolerance::default()).unwrap();
        assert!(r0.passed);
    }

    #[test]
    fn connection_examples() {
        let fam = fam12();
        let (g, f) = setup(&fam, 4);
        for l in 0..4 {
            for j in 0..=l.min(3 - l) {
                let r = check_connection_formulas(&fam, &f, &g, l, j, Tolerance::default()).unwrap();
                assert!(r.passed, "l={l} j={j}: {:?}", r.first_failure);
                assert!(r.max_residual.is_zero());
            }
        }
        let leg = legendre();
        let (g, f) = setup(&leg, 3);
        let p = primary_family(&f);
        let combo = p[2].add(&p[1].left_mul(&f.s_inv().block(2, 1)));
        assert_eq!(associated_plus(&g, 1, 1).unwrap().distance(&combo).0, q(0, 1));

        let idg = BlockMatrix::<Q>::identity(1, 4);
        let idf = lu_factorize(&idg).unwrap();
        assert!(idf.s_inv().block(3, 2).is_zero() && idf.stilde_inv().block(1, 2).is_zero());
        assert!(check_connection_formulas(&leg, &idf, &idg, 2, 1, Tolerance::default()).is_ok());
    }

    #[test]
    fn matrix_notation_all_levels() {
        for (fam, l_max) in [(legendre(), 6), (fam12(), 4)] {
            let (g, f) = setup(&fam, l_max);
            for l in 0..l_max {
                let r = check_matrix_notation(&g, &f, l, Tolerance::default()).unwrap();
                assert!(r.passed, "l={l}: {:?}", r.first_failure);
            }
        }
    }

    #[test]
    fn weight_vector_integrates_to_moment_matrix() {
        // ∫ χ₁ χ₂ᵀ dx = g, computed through the pairing of monomials with weights
        let fam = fam12();
        let g = build_moment_matrix(&fam, 6).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let v = pairing(&fam, &MatrixPolynomial::monomial(1, i), &LinearForm::weight(1, j)).unwrap();
                assert_eq!(v, g.block(i, j));
            }
        }
        let p = MatrixPolynomial::new(1, vec![s(q(1, 2)), s(q(-3, 1)), s(q(0, 1)), s(q(5, 4))]);
        let f = LinearForm::new(1, vec![s(q(2, 1)), s(q(0, 1)), s(q(-1, 3))]);
        assert_eq!(pairing(&fam, &p, &f).unwrap(), pairing_via_moments(&g, &p, &f).unwrap());
        assert!(pairing_via_moments(&g, &MatrixPolynomial::monomial(1, 6), &f).is_err());
        let x = q(2, 7);
        let chi2 = weight_vector(&fam, 5, &x, PointMode::Full).unwrap();
        for j in 0..5 {
            assert_eq!(
                chi2.block(j, 0),
                fam.eval_with(j, &x, PointMode::Full).unwrap().transpose()
            );
        }
    }
}

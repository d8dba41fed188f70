//! Christoffel–Darboux kernels and the identities they satisfy.
//!
//! `K^{[l]}(x, y) = Σ_{k<l} p̃_k(x)ᵀ p_k(y)` is evaluated two ways: as the sum
//! over the biorthogonal families, and through the inverse of the leading
//! block `g^{[l]}` computed directly from the moments. The CD identities are
//! checked by forming both sides independently on a grid of points.

use rayon::prelude::*;

use crate::blockops::build_moment_matrix;
use crate::blockops::{shift_power, BlockMatrix};
use crate::check::{CheckReport, ResidualTracker};
use crate::error::{Error, Result};
use crate::factorize::{lu_factorize, GaussFactors};
use crate::families::{
    associated_minus, associated_plus, dual_associated_minus, dual_associated_plus, dual_family, pairing_via_moments,
    primary_family, LinearForm, MatrixPolynomial,
};
use crate::numerics::{Mat, Scalar, Tolerance};
use crate::weights::{PointMode, SeedWeight, WeightFamily};

/// Both sides of one pointwise identity.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual<S> {
    pub lhs: Mat<S>,
    pub rhs: Mat<S>,
    pub residual: S,
    pub point: (S, S),
}

impl<S: Scalar> IdentityResidual<S> {
    pub fn new(lhs: Mat<S>, rhs: Mat<S>, point: (S, S)) -> Self {
        let residual = (lhs.clone() - &rhs).max_norm();
        IdentityResidual {
            lhs,
            rhs,
            residual,
            point,
        }
    }
}

/// Smallest level at which the Theorem's hypothesis holds.
pub fn theorem_threshold<S: Scalar>(fam: &WeightFamily<S>) -> usize {
    fam.max_shift()
}

/// Kernel machinery at a fixed level `l`, read-only after construction.
#[derive(Debug, Clone)]
pub struct KernelEvaluator<'a, S: Scalar> {
    fam: &'a WeightFamily<S>,
    g: &'a BlockMatrix<S>,
    factors: &'a GaussFactors<S>,
    level: usize,
    mode: PointMode,
    p: Vec<MatrixPolynomial<S>>,
    pt: Vec<LinearForm<S>>,
    g_inv: Mat<S>,
    top_right: Mat<S>,
    bottom_left: Mat<S>,
    shift_n_tr: Mat<S>,
    shift_m_tr: Mat<S>,
    // p_{l,+j}, p̃_{l,+j}, p_{l−1,−k}, p̃_{l−1,−k}; entries absent below the threshold
    plus: Vec<MatrixPolynomial<S>>,
    dual_plus: Vec<LinearForm<S>>,
    minus: Vec<Option<MatrixPolynomial<S>>>,
    dual_minus: Vec<Option<LinearForm<S>>>,
}

impl<'a, S: Scalar> KernelEvaluator<'a, S> {
    /// Requires `l + max(n⃗, m⃗) <= L`, the deepest row/column of `g` read by
    /// the level-`l` identities being `l + max − 1`.
    pub fn new(
        fam: &'a WeightFamily<S>,
        g: &'a BlockMatrix<S>,
        factors: &'a GaussFactors<S>,
        l: usize,
    ) -> Result<Self> {
        let n = fam.block_size();
        let total = g.block_rows();
        let width = fam.max_shift();
        if l + width > total {
            return Err(Error::IndexOutOfRange(format!(
                "level {l} needs truncation L >= {} (have {total})",
                l + width
            )));
        }
        if factors.levels() < l {
            return Err(Error::IndexOutOfRange(format!(
                "level {l} exceeds factorized levels {}",
                factors.levels()
            )));
        }
        let mode = fam.point_mode()?;
        let g_inv = if l > 0 {
            g.leading(l)
                .dense()
                .inverse()
                .map_err(|_| Error::SingularMinor { size: l })?
        } else {
            Mat::zeros(0, 0)
        };
        let p: Vec<_> = primary_family(factors).into_iter().take(l).collect();
        let pt: Vec<_> = dual_family(factors).into_iter().take(l).collect();
        let top_right = g.slice(0, l, l, total).into_dense();
        let bottom_left = g.slice(l, total, 0, l).into_dense();
        let shift_n_tr = shift_power::<S>(fam.nvec(), total).slice(0, l, l, total).into_dense();
        let shift_m_tr = shift_power::<S>(fam.mvec(), total).slice(0, l, l, total).into_dense();

        let n_max = fam.nvec().max();
        let m_max = fam.mvec().max();
        let plus = (0..n_max)
            .map(|j| associated_plus(g, l, j))
            .collect::<Result<Vec<_>>>()?;
        let dual_plus = (0..m_max)
            .map(|j| dual_associated_plus(g, l, j))
            .collect::<Result<Vec<_>>>()?;
        let minus = (0..m_max)
            .map(|k| {
                if l >= 1 && k < l {
                    associated_minus(g, l - 1, k).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let dual_minus = (0..n_max)
            .map(|k| {
                if l >= 1 && k < l {
                    dual_associated_minus(g, l - 1, k).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        debug_assert_eq!(top_right.rows(), l * n);
        Ok(KernelEvaluator {
            fam,
            g,
            factors,
            level: l,
            mode,
            p,
            pt,
            g_inv,
            top_right,
            bottom_left,
            shift_n_tr,
            shift_m_tr,
            plus,
            dual_plus,
            minus,
            dual_minus,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn family(&self) -> &WeightFamily<S> {
        self.fam
    }

    pub fn point_mode(&self) -> PointMode {
        self.mode
    }

    fn n(&self) -> usize {
        self.fam.block_size()
    }

    fn form_at(&self, f: &LinearForm<S>, x: &S) -> Result<Mat<S>> {
        f.eval_with(self.fam, x, self.mode)
    }

    /// Row of blocks `ρ_j(x)` for `j` in `from..to`, i.e. a slice of `χ₂(x)ᵀ`.
    fn weight_row(&self, from: usize, to: usize, x: &S) -> Result<Mat<S>> {
        let n = self.n();
        let mut row = Mat::zeros(n, (to - from) * n);
        for j in from..to {
            row.set_submatrix(0, (j - from) * n, &self.fam.eval_with(j, x, self.mode)?);
        }
        Ok(row)
    }

    /// Column of blocks `y^i I_N` for `i` in `from..to`, a slice of `χ₁(y)`.
    fn monomial_col(&self, from: usize, to: usize, y: &S) -> Mat<S> {
        let n = self.n();
        let mut col = Mat::zeros((to - from) * n, n);
        let mut p = y.power(from);
        for i in from..to {
            col.set_submatrix((i - from) * n, 0, &Mat::identity(n).scale(&p));
            p *= y;
        }
        col
    }

    pub fn kernel_sum(&self, x: &S, y: &S) -> Result<Mat<S>> {
        let mut acc = Mat::zeros(self.n(), self.n());
        for (pk, ptk) in self.p.iter().zip(&self.pt) {
            acc = acc + &self.form_at(ptk, x)?.matmul(&pk.eval(y));
        }
        Ok(acc)
    }

    /// `χ₂^{[l]}(x)ᵀ (g^{[l]})⁻¹ χ₁^{[l]}(y)`.
    pub fn kernel_abc(&self, x: &S, y: &S) -> Result<Mat<S>> {
        let l = self.level;
        if l == 0 {
            return Ok(Mat::zeros(self.n(), self.n()));
        }
        let a = self.weight_row(0, l, x)?;
        let c = self.monomial_col(0, l, y);
        Ok(a.matmul(&self.g_inv).matmul(&c))
    }

    /// `x^{n⃗} K^{[l]}(x, y) − K^{[l]}(x, y) y^{n⃗}`.
    pub fn cd_lhs(&self, x: &S, y: &S) -> Result<Mat<S>> {
        let k = self.kernel_sum(x, y)?;
        let nvec = self.fam.nvec();
        Ok(nvec.power_of(x).matmul(&k) - &k.matmul(&nvec.power_of(y)))
    }

    /// The Proposition's two-term right-hand side, evaluated verbatim:
    ///
    /// `(χ₂^{[≥l]ᵀ} − χ₂^{[l]ᵀ}(g^{[l]})⁻¹g^{[l,≥l]}) (Λ^{m⃗})^{[l,≥l]ᵀ} (g^{[l]})⁻¹χ₁^{[l]}`
    /// `− χ₂^{[l]ᵀ}(g^{[l]})⁻¹ (Λ^{n⃗})^{[l,≥l]} (χ₁^{[≥l]} − g^{[≥l,l]}(g^{[l]})⁻¹χ₁^{[l]})`.
    pub fn cd_rhs_proposition(&self, x: &S, y: &S) -> Result<Mat<S>> {
        let l = self.level;
        let total = self.g.block_rows();
        if l == 0 {
            return Ok(Mat::zeros(self.n(), self.n()));
        }
        let a = self.weight_row(0, l, x)?;
        let b = self.weight_row(l, total, x)?;
        let c = self.monomial_col(0, l, y);
        let d = self.monomial_col(l, total, y);
        let u = self.g_inv.matmul(&c);
        let v = a.matmul(&self.g_inv);
        let left_tail = b - &v.matmul(&self.top_right);
        let right_tail = d - &self.bottom_left.matmul(&u);
        let first = left_tail.matmul(&self.shift_m_tr.transpose()).matmul(&u);
        let second = v.matmul(&self.shift_n_tr).matmul(&right_tail);
        Ok(first - &second)
    }

    /// The Theorem's right-hand side, keeping only the terms whose associated
    /// families exist; returns the number of dropped terms (nonzero only
    /// below the hypothesis threshold).
    pub fn cd_rhs_theorem_partial(&self, x: &S, y: &S) -> Result<(Mat<S>, usize)> {
        let n = self.n();
        let mut acc = Mat::zeros(n, n);
        let mut dropped = 0;
        for a in 0..n {
            let proj = Mat::unit(n, a);
            let m_a = self.fam.mvec().get(a);
            for j in 0..m_a {
                match &self.minus[m_a - j - 1] {
                    Some(q) => {
                        let left = self.form_at(&self.dual_plus[j], x)?;
                        acc = acc + &left.matmul(&proj).matmul(&q.eval(y));
                    }
                    None => dropped += 1,
                }
            }
            let n_a = self.fam.nvec().get(a);
            for j in 0..n_a {
                match &self.dual_minus[n_a - j - 1] {
                    Some(f) => {
                        let left = self.form_at(f, x)?;
                        acc = acc - &left.matmul(&proj).matmul(&self.plus[j].eval(y));
                    }
                    None => dropped += 1,
                }
            }
        }
        Ok((acc, dropped))
    }

    /// The Theorem's right-hand side; requires `l >= max(n⃗, m⃗)`.
    pub fn cd_rhs_theorem(&self, x: &S, y: &S) -> Result<Mat<S>> {
        let threshold = theorem_threshold(self.fam);
        if self.level < threshold {
            return Err(Error::IndexOutOfRange(format!(
                "theorem needs l >= {threshold} (l = {})",
                self.level
            )));
        }
        Ok(self.cd_rhs_theorem_partial(x, y)?.0)
    }

    /// Entry `(a, b)` of the kernel from the Corollary's quotient form.
    pub fn cd_corollary_entry(&self, a: usize, b: usize, x: &S, y: &S) -> Result<S> {
        corollary_quotient(&self.cd_rhs_theorem(x, y)?, self.fam, a, b, x, y)
    }

    /// `(π₂f)(x) = ∫ f(y) K^{[l]}(y, x) dy = Σ_{k<l} ⟨f, p̃_k⟩ p_k(x)`, the
    /// pairings read off `g`.
    pub fn project_pi2(&self, f: &MatrixPolynomial<S>) -> Result<MatrixPolynomial<S>> {
        let mut acc = MatrixPolynomial::zero(self.n());
        for (pk, ptk) in self.p.iter().zip(&self.pt) {
            acc = acc.add(&pk.left_mul(&pairing_via_moments(self.g, f, ptk)?));
        }
        Ok(acc)
    }

    /// `(π₁h)(x)ᵀ = ∫ K^{[l]}(x, y) h(y)ᵀ dy = Σ_{k<l} p̃_k(x)ᵀ ⟨p_k, h⟩`.
    pub fn project_pi1(&self, h: &LinearForm<S>) -> Result<LinearForm<S>> {
        let mut acc = LinearForm::zero(self.n());
        for (pk, ptk) in self.p.iter().zip(&self.pt) {
            acc = acc.add(&ptk.right_mul(&pairing_via_moments(self.g, pk, h)?));
        }
        Ok(acc)
    }

    /// `u ↦ K^{[l]}(x, u)` as a matrix polynomial in `u`.
    pub fn kernel_left_section(&self, x: &S) -> Result<MatrixPolynomial<S>> {
        let mut acc = MatrixPolynomial::zero(self.n());
        for (pk, ptk) in self.p.iter().zip(&self.pt) {
            acc = acc.add(&pk.left_mul(&self.form_at(ptk, x)?));
        }
        Ok(acc)
    }

    /// `u ↦ K^{[l]}(u, y)` as a linear form in `u`.
    pub fn kernel_right_section(&self, y: &S) -> LinearForm<S> {
        let mut acc = LinearForm::zero(self.n());
        for (pk, ptk) in self.p.iter().zip(&self.pt) {
            acc = acc.add(&ptk.right_mul(&pk.eval(y)));
        }
        acc
    }

    fn locate(&self, x: &S, y: &S) -> String {
        format!("l={} x={} y={}", self.level, x.render(), y.render())
    }

    fn grid_check<F>(&self, name: &str, points: &[(S, S)], tol: Tolerance, f: F) -> Result<CheckReport<S>>
    where
        F: Fn(&S, &S) -> Result<(Mat<S>, Mat<S>)> + Sync,
    {
        let values: Vec<Result<(Mat<S>, Mat<S>)>> = points.par_iter().map(|(x, y)| f(x, y)).collect();
        let mut t = ResidualTracker::new(tol);
        for ((x, y), v) in points.iter().zip(values) {
            let (lhs, rhs) = v?;
            t.record_pair(&lhs, &rhs, || self.locate(x, y));
        }
        Ok(t.finish(name))
    }

    pub fn check_abc(&self, points: &[(S, S)], tol: Tolerance) -> Result<CheckReport<S>> {
        self.grid_check("abc", points, tol, |x, y| {
            Ok((self.kernel_sum(x, y)?, self.kernel_abc(x, y)?))
        })
    }

    pub fn check_proposition(&self, points: &[(S, S)], tol: Tolerance) -> Result<CheckReport<S>> {
        self.grid_check("proposition", points, tol, |x, y| {
            Ok((self.cd_lhs(x, y)?, self.cd_rhs_proposition(x, y)?))
        })
    }

    /// Above the threshold this is the Theorem; below it the surviving
    /// terms are compared and the outcome is only noted.
    pub fn check_theorem(&self, points: &[(S, S)], tol: Tolerance) -> Result<CheckReport<S>> {
        let threshold = theorem_threshold(self.fam);
        let dropped = std::sync::atomic::AtomicUsize::new(0);
        let report = self.grid_check("theorem", points, tol, |x, y| {
            let (rhs, d) = self.cd_rhs_theorem_partial(x, y)?;
            dropped.store(d, std::sync::atomic::Ordering::Relaxed);
            Ok((self.cd_lhs(x, y)?, rhs))
        })?;
        if self.level >= threshold {
            return Ok(report);
        }
        let mut below = CheckReport::vacuous("theorem");
        below.notes.push(format!(
            "l={} below threshold {threshold}: {} term(s) dropped; surviving terms {} the identity (max residual {})",
            self.level,
            dropped.into_inner(),
            if report.passed { "satisfy" } else { "violate" },
            report.max_residual.render()
        ));
        Ok(below)
    }

    /// Quotient form against the kernel entry, skipping points on the locus.
    pub fn check_corollary(&self, points: &[(S, S)], tol: Tolerance) -> Result<CheckReport<S>> {
        let n = self.n();
        type Entry<S> = (usize, usize, std::result::Result<(S, S), Error>);
        let values: Vec<Result<Vec<Entry<S>>>> = points
            .par_iter()
            .map(|(x, y)| {
                let k = self.kernel_sum(x, y)?;
                let numer = self.cd_rhs_theorem(x, y)?;
                let mut out = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        let q = corollary_quotient(&numer, self.fam, a, b, x, y).map(|q| (q, k[(a, b)].clone()));
                        if let Err(e) = &q {
                            if !matches!(e, Error::SingularLocus { .. }) {
                                return Err(e.clone());
                            }
                        }
                        out.push((a, b, q));
                    }
                }
                Ok(out)
            })
            .collect();
        let mut t = ResidualTracker::new(tol);
        let mut skipped = 0;
        for ((x, y), v) in points.iter().zip(values) {
            for (a, b, q) in v? {
                match q {
                    Ok((quot, entry)) => {
                        let r = (quot.clone() - &entry).abs();
                        let (sq, se) = (quot.abs(), entry.abs());
                        let scale = if sq > se { sq } else { se };
                        t.record(r, &scale, || format!("{} a={a} b={b}", self.locate(x, y)));
                    }
                    Err(_) => skipped += 1,
                }
            }
        }
        if skipped > 0 {
            t.note(format!(
                "l={}: {skipped} entries on the singular locus skipped",
                self.level
            ));
        }
        Ok(t.finish("corollary"))
    }

    /// `∫ K(x, u) K(u, y) du = K(x, y)`, the `u`-integral taken through
    /// `∫ χ₁^{[l]}(u) χ₂^{[l]}(u)ᵀ du = g^{[l]}`.
    pub fn check_reproducing(&self, points: &[(S, S)], tol: Tolerance) -> Result<CheckReport<S>> {
        self.grid_check("reproducing", points, tol, |x, y| {
            let left = self.kernel_left_section(x)?;
            let right = self.kernel_right_section(y);
            Ok((pairing_via_moments(self.g, &left, &right)?, self.kernel_sum(x, y)?))
        })
    }

    /// Image and kernel of both projections, and idempotence on the
    /// monomials `x^d I_N` and weights `ρ_d`, `d < L`.
    pub fn check_projections(&self, tol: Tolerance) -> Result<CheckReport<S>> {
        let n = self.n();
        let l = self.level;
        let total = self.factors.levels();
        let all_p = primary_family(self.factors);
        let all_pt = dual_family(self.factors);
        let mut t = ResidualTracker::new(tol);
        let record_poly =
            |t: &mut ResidualTracker<S>, a: &MatrixPolynomial<S>, b: &MatrixPolynomial<S>, what: String| {
                let (d, s) = a.distance(b);
                t.record(d, &s, || what);
            };
        let record_form = |t: &mut ResidualTracker<S>, a: &LinearForm<S>, b: &LinearForm<S>, what: String| {
            let (d, s) = a.distance(b);
            t.record(d, &s, || what);
        };
        for k in 0..total {
            let expect_p = if k < l {
                all_p[k].clone()
            } else {
                MatrixPolynomial::zero(n)
            };
            record_poly(
                &mut t,
                &self.project_pi2(&all_p[k])?,
                &expect_p,
                format!("l={l}: π₂ p_{k}"),
            );
            let expect_pt = if k < l { all_pt[k].clone() } else { LinearForm::zero(n) };
            record_form(
                &mut t,
                &self.project_pi1(&all_pt[k])?,
                &expect_pt,
                format!("l={l}: π₁ p̃_{k}"),
            );
        }
        for d in 0..total {
            let once = self.project_pi2(&MatrixPolynomial::monomial(n, d))?;
            let twice = self.project_pi2(&once)?;
            record_poly(&mut t, &twice, &once, format!("l={l}: π₂π₂ x^{d}"));
            let deg_ok = once.degree().is_none_or(|e| e < l);
            t.record(if deg_ok { S::zero() } else { S::one() }, &S::one(), || {
                format!("l={l}: deg π₂ x^{d} < l")
            });

            let once = self.project_pi1(&LinearForm::weight(n, d))?;
            let twice = self.project_pi1(&once)?;
            record_form(&mut t, &twice, &once, format!("l={l}: π₁π₁ ρ_{d}"));
            let lvl_ok = once.level().is_none_or(|e| e < l);
            t.record(if lvl_ok { S::zero() } else { S::one() }, &S::one(), || {
                format!("l={l}: level π₁ ρ_{d} < l")
            });
        }
        Ok(t.finish("projections"))
    }
}

fn corollary_quotient<S: Scalar>(numer: &Mat<S>, fam: &WeightFamily<S>, a: usize, b: usize, x: &S, y: &S) -> Result<S> {
    let na = fam.nvec().get(a);
    let nb = fam.nvec().get(b);
    let denom = x.power(na) - y.power(nb);
    if denom.is_zero() {
        return Err(Error::SingularLocus { a, b, na, nb });
    }
    Ok(numer[(a, b)].clone() / &denom)
}

/// Classical scalar CD formula for one weight:
/// `Σ_{k<n} P_k(x)P_k(y)/h_k` against `(P_n(x)P_{n−1}(y) − P_{n−1}(x)P_n(y))/(h_{n−1}(x − y))`.
pub fn classical_cd<S: Scalar>(weight: &SeedWeight<S>, n: usize, x: &S, y: &S) -> Result<IdentityResidual<S>> {
    if n == 0 {
        return Err(Error::InvalidArgument("classical CD needs n >= 1".into()));
    }
    if x == y {
        return Err(Error::SingularLocus {
            a: 0,
            b: 0,
            na: 1,
            nb: 1,
        });
    }
    let fam = WeightFamily::hankel(vec![vec![weight.clone()]]);
    let g = build_moment_matrix(&fam, n + 1)?;
    let factors = lu_factorize(&g)?;
    classical_cd_with(&factors, n, x, y)
}

/// As [`classical_cd`], reusing factors of a Hankel moment matrix with at
/// least `n + 1` levels.
pub fn classical_cd_with<S: Scalar>(factors: &GaussFactors<S>, n: usize, x: &S, y: &S) -> Result<IdentityResidual<S>> {
    if factors.block_size() != 1 {
        return Err(Error::InvalidArgument("classical CD is scalar (N = 1)".into()));
    }
    if n == 0 || factors.levels() <= n {
        return Err(Error::IndexOutOfRange(format!(
            "classical CD at n={n} needs {} levels",
            n + 1
        )));
    }
    if x == y {
        return Err(Error::SingularLocus {
            a: 0,
            b: 0,
            na: 1,
            nb: 1,
        });
    }
    let p = primary_family(factors);
    let h = |k: usize| factors.normalization(k)[(0, 0)].clone();
    let at = |k: usize, t: &S| p[k].eval(t)[(0, 0)].clone();
    let mut lhs = S::zero();
    for k in 0..n {
        lhs += &(at(k, x) * &at(k, y) / &h(k));
    }
    let numer = at(n, x) * &at(n - 1, y) - at(n - 1, x) * &at(n, y);
    let rhs = numer / &(h(n - 1) * &(x.clone() - y));
    Ok(IdentityResidual::new(
        Mat::from_rows(vec![vec![lhs]]),
        Mat::from_rows(vec![vec![rhs]]),
        (x.clone(), y.clone()),
    ))
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;
    use crate::families::pairing;
    use crate::numerics::{ratio, Rational};
    use crate::weights::{BaseMeasure, Poly};

    type Q = Rational;

    fn q(p: i64, d: i64) -> Q {
        ratio(p, d)
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

    fn grid() -> Vec<(Q, Q)> {
        let t = [1, 2, 3, 5, 6];
        t.iter()
            .flat_map(|&a| t.iter().map(move |&b| (q(a, 7), q(b, 7))))
            .collect()
    }

    struct Setup<S: Scalar> {
        fam: WeightFamily<S>,
        g: BlockMatrix<S>,
        f: GaussFactors<S>,
    }

    fn setup<S: Scalar>(fam: WeightFamily<S>, total: usize) -> Setup<S> {
        let g = build_moment_matrix(&fam, total).unwrap();
        let f = lu_factorize(&g).unwrap();
        Setup { fam, g, f }
    }

    impl<S: Scalar> Setup<S> {
        fn ev(&self, l: usize) -> KernelEvaluator<'_, S> {
            KernelEvaluator::new(&self.fam, &self.g, &self.f, l).unwrap()
        }
    }

    fn scalar(m: Mat<Q>) -> Q {
        m[(0, 0)].clone()
    }

    #[test]
    fn kernel_sum_examples() {
        let s = setup(legendre(), 4);
        assert!(s.ev(0).kernel_sum(&q(1, 3), &q(1, 2)).unwrap().is_zero());
        assert_eq!(scalar(s.ev(1).kernel_sum(&q(1, 3), &q(2, 5)).unwrap()), q(1, 1));
        for (x, y) in grid() {
            let k = scalar(s.ev(2).kernel_sum(&x, &y).unwrap());
            let expect = q(12, 1) * &x * &y - q(6, 1) * &x - q(6, 1) * &y + q(4, 1);
            assert_eq!(k, expect);
        }
    }

    #[test]
    fn kernel_abc_examples() {
        let s = setup(legendre(), 4);
        assert_eq!(scalar(s.ev(1).kernel_abc(&q(3, 7), &q(1, 7)).unwrap()), q(1, 1));
        assert_eq!(scalar(s.ev(2).kernel_abc(&q(0, 1), &q(0, 1)).unwrap()), q(4, 1));
        for l in 0..=3 {
            let r = s.ev(l).check_abc(&grid(), Tolerance::default()).unwrap();
            assert!(r.passed && r.max_residual.is_zero(), "l={l}");
        }
    }

    #[test]
    fn evaluator_budget() {
        let s = setup(fam12(), 4);
        assert!(KernelEvaluator::new(&s.fam, &s.g, &s.f, 2).is_ok());
        assert!(matches!(
            KernelEvaluator::new(&s.fam, &s.g, &s.f, 3),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn projection_examples() {
        let s = setup(legendre(), 4);
        let p = primary_family(&s.f);
        let ev1 = s.ev(1);
        assert_eq!(ev1.project_pi2(&p[0]).unwrap().distance(&p[0]).0, q(0, 1));
        assert!(ev1.project_pi2(&p[1]).unwrap().degree().is_none());
        let sum = p[0].add(&p[1]);
        assert_eq!(ev1.project_pi2(&sum).unwrap().distance(&p[0]).0, q(0, 1));
        for l in 0..=3 {
            let r = s.ev(l).check_projections(Tolerance::default()).unwrap();
            assert!(r.passed, "l={l}: {:?}", r.first_failure);
        }
    }

    #[test]
    fn reproducing_examples() {
        let s = setup(legendre(), 4);
        let pts: Vec<_> = [1, 3, 5]
            .iter()
            .flat_map(|&a| [2, 4, 6].iter().map(move |&b| (q(a, 7), q(b, 7))))
            .collect();
        for l in 0..=3 {
            let r = s.ev(l).check_reproducing(&pts, Tolerance::default()).unwrap();
            assert!(r.passed && r.max_residual.is_zero(), "l={l}");
            assert_eq!(r.samples, 9);
        }
        let left = s.ev(1).kernel_left_section(&q(1, 2)).unwrap();
        let right = s.ev(1).kernel_right_section(&q(1, 3));
        assert_eq!(scalar(pairing(&s.fam, &left, &right).unwrap()), q(1, 1));
    }

    #[test]
    fn cd_lhs_examples() {
        let s = setup(legendre(), 4);
        let ev = s.ev(2);
        assert!(ev.cd_lhs(&q(2, 7), &q(2, 7)).unwrap().is_zero());
        for (x, y) in grid() {
            let k = q(12, 1) * &x * &y - q(6, 1) * &x - q(6, 1) * &y + q(4, 1);
            assert_eq!(scalar(ev.cd_lhs(&x, &y).unwrap()), (x.clone() - &y) * &k);
        }
        assert!(s.ev(0).cd_lhs(&q(1, 7), &q(3, 7)).unwrap().is_zero());
    }

    #[test]
    fn proposition_and_theorem_hankel() {
        let s = setup(legendre(), 5);
        for l in 0..=4 {
            let ev = s.ev(l);
            let r = ev.check_proposition(&grid(), Tolerance::default()).unwrap();
            assert!(r.passed && r.max_residual.is_zero(), "proposition l={l}");
            if l >= 1 {
                let r = ev.check_theorem(&grid(), Tolerance::default()).unwrap();
                assert!(r.passed && r.samples == 25, "theorem l={l}");
            }
        }
        assert!(s.ev(0).cd_rhs_proposition(&q(1, 7), &q(2, 7)).unwrap().is_zero());
        assert!(s.ev(0).cd_rhs_theorem(&q(1, 7), &q(2, 7)).is_err());
    }

    #[test]
    fn theorem_multigraded_scalar() {
        let s = setup(fam12(), 4);
        let ev = s.ev(2);
        let r = ev.check_theorem(&grid(), Tolerance::default()).unwrap();
        assert!(
            r.passed && r.max_residual.is_zero() && r.samples == 25,
            "{:?}",
            r.first_failure
        );
        let r = ev.check_proposition(&grid(), Tolerance::default()).unwrap();
        assert!(r.passed && r.max_residual.is_zero());
        let r = ev.check_corollary(&grid(), Tolerance::default()).unwrap();
        assert!(r.passed && r.samples == 20, "{:?}", r.notes);
        let below = s.ev(1).check_theorem(&grid(), Tolerance::default()).unwrap();
        assert_eq!(below.samples, 0);
        assert_eq!(below.notes.len(), 1);
    }

    #[test]
    fn corollary_examples() {
        let s = setup(legendre(), 4);
        let ev = s.ev(2);
        assert_eq!(ev.cd_corollary_entry(0, 0, &q(1, 1), &q(0, 1)).unwrap(), q(-2, 1));
        assert_eq!(
            ev.cd_corollary_entry(0, 0, &q(3, 7), &q(3, 7)),
            Err(Error::SingularLocus {
                a: 0,
                b: 0,
                na: 1,
                nb: 1
            })
        );
    }

    #[test]
    fn classical_examples() {
        let w = SeedWeight::on_unit_interval(vec![q(1, 1)]);
        let r = classical_cd(&w, 2, &q(0, 1), &q(1, 1)).unwrap();
        assert_eq!(scalar(r.lhs.clone()), q(-2, 1));
        assert!(r.residual.is_zero());
        let r1 = classical_cd(&w, 1, &q(1, 3), &q(2, 3)).unwrap();
        assert_eq!(scalar(r1.lhs), q(1, 1));
        assert_eq!(scalar(r1.rhs), q(1, 1));
        assert!(classical_cd(&w, 2, &q(1, 3), &q(1, 3)).is_err());

        let herm = SeedWeight::new(Poly::constant(1.0), BaseMeasure::Gaussian);
        let r = classical_cd(&herm, 3, &0.3, &-1.1).unwrap();
        assert!(r.residual <= 1e-9, "{}", r.residual);
    }

    #[test]
    fn hankel_theorem_matches_classical() {
        // Theorem RHS / (x − y) = K, and K equals the classical LHS
        let s = setup(legendre(), 5);
        for n in 1..=4 {
            let ev = s.ev(n);
            for (x, y) in grid().into_iter().filter(|(x, y)| x != y) {
                let quot = scalar(ev.cd_rhs_theorem(&x, &y).unwrap()) / &(x.clone() - &y);
                let c = classical_cd_with(&s.f, n, &x, &y).unwrap();
                assert_eq!(quot, scalar(c.lhs.clone()));
                assert!(c.residual.is_zero());
            }
        }
    }
}

//! Periodic weight families and their closed-form moments.
//!
//! A family is generated from seed weights `ρ_{r,ab}`, `0 <= r < m_b`, by the
//! periodicity rule `ρ_{j+m_b,ab}(x) = x^{n_a} ρ_{j,ab}(x)`. Each seed is a
//! polynomial density against one of three base measures whose moments are
//! known in closed form, so moment matrices carry no quadrature error.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Mat, Rational, Scalar};

/// Multi-index `(n_1, …, n_N)` of positive shift exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument(
                "multi-index must have at least one component".into(),
            ));
        }
        if let Some(pos) = components.iter().position(|&c| c == 0) {
            return Err(Error::InvalidArgument(format!(
                "multi-index component {pos} must be >= 1"
            )));
        }
        Ok(MultiIndex(components))
    }

    /// `(1, …, 1)` of length `n`: the plain block-Hankel case.
    pub fn ones(n: usize) -> Self {
        MultiIndex(vec![1; n.max(1)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, a: usize) -> usize {
        self.0[a]
    }

    pub fn components(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `diag(x^{n_1}, …, x^{n_N})`.
    pub fn power_of<S: Scalar>(&self, x: &S) -> Mat<S> {
        Mat::diagonal(self.0.iter().map(|&k| x.power(k)).collect())
    }
}

impl TryFrom<Vec<usize>> for MultiIndex {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        MultiIndex::new(v)
    }
}

impl From<MultiIndex> for Vec<usize> {
    fn from(m: MultiIndex) -> Vec<usize> {
        m.0
    }
}

/// Reference measure a seed density is integrated against.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseMeasure {
    /// Lebesgue measure on `[a, b]`.
    FiniteInterval { a: Rational, b: Rational },
    /// `e^{-x²} dx` on the real line.
    Gaussian,
    /// `e^{-x} dx` on `[0, ∞)`.
    Laguerre,
}

impl BaseMeasure {
    pub fn unit_interval() -> Self {
        BaseMeasure::FiniteInterval {
            a: Rational::zero(),
            b: Rational::one(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            BaseMeasure::FiniteInterval { .. } => "finite_interval",
            BaseMeasure::Gaussian => "gaussian",
            BaseMeasure::Laguerre => "laguerre",
        }
    }

    pub fn has_rational_moments(&self) -> bool {
        !matches!(self, BaseMeasure::Gaussian)
    }

    fn check(&self) -> std::result::Result<(), String> {
        match self {
            BaseMeasure::FiniteInterval { a, b } if a >= b => {
                Err(format!("finite interval needs a < b, got [{a}, {b}]"))
            }
            _ => Ok(()),
        }
    }

    /// `μ_k = ∫ x^k dμ`.
    pub fn moment<S: Scalar>(&self, k: usize) -> Result<S> {
        match self {
            BaseMeasure::FiniteInterval { a, b } => {
                let e = k as i32 + 1;
                let v = (num_traits::pow(b.clone(), e as usize) - num_traits::pow(a.clone(), e as usize))
                    / Rational::from_integer(BigInt::from(e));
                Ok(S::from_rational(&v))
            }
            BaseMeasure::Laguerre => {
                let mut f = BigInt::one();
                for t in 2..=k {
                    f *= BigInt::from(t);
                }
                Ok(S::from_rational(&Rational::from_integer(f)))
            }
            BaseMeasure::Gaussian => S::gaussian_moment(k).ok_or(Error::Unrepresentable {
                backend: S::NAME,
                what: format!("gaussian moment of order {k}"),
            }),
        }
    }

    /// Closed-interval support test; boundary points are inside.
    pub fn contains<S: Scalar>(&self, x: &S) -> bool {
        match self {
            BaseMeasure::FiniteInterval { a, b } => *x >= S::from_rational(a) && *x <= S::from_rational(b),
            BaseMeasure::Gaussian => true,
            BaseMeasure::Laguerre => *x >= S::zero(),
        }
    }

    /// Density of the measure against `dx` at `x` (in support).
    pub fn density_at<S: Scalar>(&self, x: &S) -> Option<S> {
        match self {
            BaseMeasure::FiniteInterval { .. } => Some(S::one()),
            BaseMeasure::Gaussian => (x.clone() * x).exp_neg(),
            BaseMeasure::Laguerre => x.exp_neg(),
        }
    }
}

/// Dense scalar polynomial `Σ c_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        Poly { coeffs }
    }

    pub fn constant(c: S) -> Self {
        Poly { coeffs: vec![c] }
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = S::one();
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly { coeffs: Vec::new() };
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let p = a.clone() * b;
                out[i + j] += &p;
            }
        }
        Poly { coeffs: out }
    }

    /// `x^k · self`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// `∫ self dμ` from the measure's moment table.
    pub fn integrate(&self, measure: &BaseMeasure) -> Result<S> {
        let mut acc = S::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m: S = measure.moment(k)?;
            acc += &(c.clone() * &m);
        }
        Ok(acc)
    }
}

/// One scalar weight `x ↦ density(x) · dμ/dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedWeight<S> {
    pub density: Poly<S>,
    pub measure: BaseMeasure,
}

impl<S: Scalar> SeedWeight<S> {
    pub fn new(density: Poly<S>, measure: BaseMeasure) -> Self {
        SeedWeight { density, measure }
    }

    /// Lebesgue weight with polynomial density on `[0, 1]`.
    pub fn on_unit_interval(coeffs: Vec<S>) -> Self {
        SeedWeight::new(Poly::new(coeffs), BaseMeasure::unit_interval())
    }

    /// `∫ x^k · density · dμ`.
    pub fn moment(&self, k: usize) -> Result<S> {
        self.density.shift(k).integrate(&self.measure)
    }
}

/// How pointwise weight values are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointMode {
    /// Density times the measure density (`e^{-x²}`, `e^{-x}` or 1).
    Full,
    /// Density only. Valid when every seed shares one base measure kind:
    /// all pointwise identities are linear in the weight values, so the
    /// common positive factor cancels from both sides.
    Reduced,
}

/// Seeds plus multi-indices generating every `ρ_j` by periodicity.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFamily<S> {
    nvec: MultiIndex,
    mvec: MultiIndex,
    /// `seeds[a][b][r] = ρ_{r,ab}`, `r < m_b`.
    seeds: Vec<Vec<Vec<SeedWeight<S>>>>,
}

impl<S: Scalar> WeightFamily<S> {
    /// Assembles a family without validating it; see [`validate_family`].
    pub fn from_parts(nvec: MultiIndex, mvec: MultiIndex, seeds: Vec<Vec<Vec<SeedWeight<S>>>>) -> Self {
        WeightFamily { nvec, mvec, seeds }
    }

    /// Block-Hankel family `n⃗ = m⃗ = (1,…,1)` with one seed per entry.
    pub fn hankel(seed: Vec<Vec<SeedWeight<S>>>) -> Self {
        let n = seed.len();
        let seeds = seed
            .into_iter()
            .map(|row| row.into_iter().map(|w| vec![w]).collect())
            .collect();
        WeightFamily {
            nvec: MultiIndex::ones(n),
            mvec: MultiIndex::ones(n),
            seeds,
        }
    }

    /// Scalar (`N = 1`) family.
    pub fn scalar(n: usize, m: usize, seeds: Vec<SeedWeight<S>>) -> Result<Self> {
        Ok(WeightFamily {
            nvec: MultiIndex::new(vec![n])?,
            mvec: MultiIndex::new(vec![m])?,
            seeds: vec![vec![seeds]],
        })
    }

    /// Block size `N`.
    pub fn block_size(&self) -> usize {
        self.nvec.len()
    }

    pub fn nvec(&self) -> &MultiIndex {
        &self.nvec
    }

    pub fn mvec(&self) -> &MultiIndex {
        &self.mvec
    }

    pub fn seeds(&self) -> &[Vec<Vec<SeedWeight<S>>>] {
        &self.seeds
    }

    /// Largest component over both multi-indices.
    pub fn max_shift(&self) -> usize {
        self.nvec.max().max(self.mvec.max())
    }

    /// Resolves `ρ_{j,ab} = x^shift · ρ_{r,ab}` with `j = q m_b + r`, `shift = q n_a`.
    pub fn resolve(&self, j: usize, a: usize, b: usize) -> (usize, &SeedWeight<S>) {
        let mb = self.mvec.get(b);
        let (q, r) = (j / mb, j % mb);
        (q * self.nvec.get(a), &self.seeds[a][b][r])
    }

    /// Pointwise mode usable in this backend, if any.
    pub fn point_mode(&self) -> Result<PointMode> {
        if !S::EXACT {
            return Ok(PointMode::Full);
        }
        let mut kinds = self.all_seeds().map(|w| &w.measure);
        if kinds.all(|m| matches!(m, BaseMeasure::FiniteInterval { .. })) {
            return Ok(PointMode::Full);
        }
        let first = self.all_seeds().next().map(|w| w.measure.kind_name());
        if self.all_seeds().all(|w| Some(w.measure.kind_name()) == first) {
            Ok(PointMode::Reduced)
        } else {
            Err(Error::Unrepresentable {
                backend: S::NAME,
                what: "pointwise values of a family mixing base measures".into(),
            })
        }
    }

    fn all_seeds(&self) -> impl Iterator<Item = &SeedWeight<S>> {
        self.seeds.iter().flatten().flatten()
    }

    /// `ρ_j(x)` under the given pointwise mode.
    pub fn eval_with(&self, j: usize, x: &S, mode: PointMode) -> Result<Mat<S>> {
        let n = self.block_size();
        let mut out = Mat::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let (shift, seed) = self.resolve(j, a, b);
                if !seed.measure.contains(x) {
                    return Err(Error::OutOfSupport { x: x.render(), a, b });
                }
                let mut v = seed.density.eval(x) * &x.power(shift);
                if mode == PointMode::Full {
                    let d = seed.measure.density_at(x).ok_or_else(|| Error::Unrepresentable {
                        backend: S::NAME,
                        what: format!("{} density at {}", seed.measure.kind_name(), x.render()),
                    })?;
                    v *= &d;
                }
                out[(a, b)] = v;
            }
        }
        Ok(out)
    }

    /// `∫ x^i ρ_j(x) dx`, entrywise.
    pub fn moment(&self, i: usize, j: usize) -> Result<Mat<S>> {
        let n = self.block_size();
        let mut out = Mat::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let (shift, seed) = self.resolve(j, a, b);
                out[(a, b)] = seed.moment(i + shift)?;
            }
        }
        Ok(out)
    }

    /// Checks the family's invariants for truncation `l_max`.
    pub fn validate(&self, l_max: usize) -> Result<()> {
        let n = self.seeds.len();
        let invalid = |entry, reason: String| Error::InvalidFamily { entry, reason };
        if n == 0 {
            return Err(invalid(None, "no seeds".into()));
        }
        if self.nvec.len() != n || self.mvec.len() != n {
            return Err(invalid(
                None,
                format!(
                    "multi-index lengths ({}, {}) differ from block size {n}",
                    self.nvec.len(),
                    self.mvec.len()
                ),
            ));
        }
        if l_max == 0 {
            return Err(invalid(None, "truncation must be positive".into()));
        }
        for (a, row) in self.seeds.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(
                    None,
                    format!("seed row {a} has {} entries, expected {n}", row.len()),
                ));
            }
            for (b, list) in row.iter().enumerate() {
                let mb = self.mvec.get(b);
                if list.len() != mb {
                    return Err(invalid(
                        Some((a, b)),
                        format!("seed count {} but m_{b} = {mb}", list.len()),
                    ));
                }
                for w in list {
                    w.measure.check().map_err(|r| invalid(Some((a, b)), r))?;
                    if S::EXACT && !w.measure.has_rational_moments() {
                        return Err(invalid(
                            Some((a, b)),
                            format!("irrational moments in exact mode ({} measure)", w.measure.kind_name()),
                        ));
                    }
                }
            }
        }
        // every moment the truncated matrix and its shifted rows can touch
        let reach = l_max + self.max_shift();
        for i in 0..reach {
            for j in 0..reach {
                let m = self.moment(i, j)?;
                for a in 0..n {
                    for b in 0..n {
                        if !m[(a, b)].is_finite() {
                            return Err(invalid(Some((a, b)), format!("moment g_{{{i},{j}}} is not finite")));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `ρ_j(x)` entrywise, including the measure density.
pub fn weight_eval<S: Scalar>(fam: &WeightFamily<S>, j: usize, x: &S) -> Result<Mat<S>> {
    fam.eval_with(j, x, PointMode::Full)
}

/// `g_{ij} = ∫ x^i ρ_j(x) dx`.
pub fn weight_moment<S: Scalar>(fam: &WeightFamily<S>, i: usize, j: usize) -> Result<Mat<S>> {
    fam.moment(i, j)
}

/// Validates seed counts, backend compatibility and moment finiteness.
pub fn validate_family<S: Scalar>(fam: &WeightFamily<S>, l_max: usize) -> Result<()> {
    fam.validate(l_max)
}

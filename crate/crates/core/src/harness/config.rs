//! Run configuration: JSON parsing and up-front validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{parse_rational, Rational, Scalar, Tolerance};
use crate::weights::{BaseMeasure, MultiIndex, Poly, SeedWeight, WeightFamily};

/// Every check the harness knows, in dependency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Symmetry,
    Factorization,
    Biorthogonality,
    MatrixNotation,
    Connection,
    ModifiedOrthogonality,
    Abc,
    Reproducing,
    Projections,
    Proposition,
    Theorem,
    Corollary,
    Classical,
}

impl CheckKind {
    pub const ALL: [CheckKind; 13] = [
        CheckKind::Symmetry,
        CheckKind::Factorization,
        CheckKind::Biorthogonality,
        CheckKind::MatrixNotation,
        CheckKind::Connection,
        CheckKind::ModifiedOrthogonality,
        CheckKind::Abc,
        CheckKind::Reproducing,
        CheckKind::Projections,
        CheckKind::Proposition,
        CheckKind::Theorem,
        CheckKind::Corollary,
        CheckKind::Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Symmetry => "symmetry",
            CheckKind::Factorization => "factorization",
            CheckKind::Biorthogonality => "biorthogonality",
            CheckKind::MatrixNotation => "matrix-notation",
            CheckKind::Connection => "connection",
            CheckKind::ModifiedOrthogonality => "modified-orthogonality",
            CheckKind::Abc => "abc",
            CheckKind::Reproducing => "reproducing",
            CheckKind::Projections => "projections",
            CheckKind::Proposition => "proposition",
            CheckKind::Theorem => "theorem",
            CheckKind::Corollary => "corollary",
            CheckKind::Classical => "classical",
        }
    }

    /// Checks evaluated once per configured level.
    pub fn per_level(self) -> bool {
        !matches!(
            self,
            CheckKind::Symmetry | CheckKind::Factorization | CheckKind::Biorthogonality | CheckKind::Classical
        )
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(Error::InvalidArgument(format!("unknown backend {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    FiniteInterval { a: String, b: String },
    Gaussian,
    Laguerre,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    /// Density coefficients, lowest degree first, as `"p/q"` strings.
    pub coeffs: Vec<String>,
    pub measure: MeasureSpec,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<CheckKind, ToleranceOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub block_size: usize,
    pub nvec: Vec<usize>,
    pub mvec: Vec<usize>,
    /// `seeds[a][b]` lists the `m_b` seed weights of entry `(a, b)`.
    pub seeds: Vec<Vec<Vec<SeedSpec>>>,
    #[serde(rename = "L")]
    pub truncation: usize,
    /// Levels for per-level checks; empty means every admissible level.
    #[serde(default)]
    pub levels: Vec<usize>,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub tolerance: ToleranceSpec,
    /// Evaluation points as `["x", "y"]` pairs; absent means the default lattice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<(String, String)>>,
    #[serde(default = "all_checks")]
    pub checks: Vec<CheckKind>,
}

fn all_checks() -> Vec<CheckKind> {
    CheckKind::ALL.to_vec()
}

/// `{1/7, 2/7, 3/7, 5/7, 6/7}²`.
pub fn default_grid() -> Vec<(Rational, Rational)> {
    let t = [1, 2, 3, 5, 6];
    t.iter()
        .flat_map(|&a| {
            t.iter()
                .map(move |&b| (crate::numerics::ratio(a, 7), crate::numerics::ratio(b, 7)))
        })
        .collect()
}

fn field_err(field: impl Into<String>, message: impl fmt::Display) -> Error {
    Error::Config {
        path: field.into(),
        message: message.to_string(),
    }
}

fn parse_field(field: &str, text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| field_err(field, e))
}

impl MeasureSpec {
    fn to_measure(&self, field: &str) -> Result<BaseMeasure> {
        match self {
            MeasureSpec::FiniteInterval { a, b } => {
                let a = parse_field(&format!("{field}.a"), a)?;
                let b = parse_field(&format!("{field}.b"), b)?;
                if a >= b {
                    return Err(field_err(field, format!("empty interval [{a}, {b}]")));
                }
                Ok(BaseMeasure::FiniteInterval { a, b })
            }
            MeasureSpec::Gaussian => Ok(BaseMeasure::Gaussian),
            MeasureSpec::Laguerre => Ok(BaseMeasure::Laguerre),
        }
    }
}

impl RunConfig {
    /// Parses JSON without validating invariants.
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| field_err("<json>", e))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Largest shift exponent over `nvec` and `mvec`.
    pub fn max_shift(&self) -> usize {
        self.nvec.iter().chain(&self.mvec).copied().max().unwrap_or(0)
    }

    /// Highest level whose identities fit inside the truncation.
    pub fn max_level(&self) -> Option<usize> {
        self.truncation.checked_sub(self.max_shift())
    }

    pub fn effective_levels(&self) -> Vec<usize> {
        if self.levels.is_empty() {
            self.max_level().map(|m| (0..=m).collect()).unwrap_or_default()
        } else {
            self.levels.clone()
        }
    }

    pub fn wants(&self, kind: CheckKind) -> bool {
        self.checks.contains(&kind)
    }

    pub fn tolerance_for(&self, kind: CheckKind) -> Tolerance {
        let base = Tolerance::default();
        let o = self.tolerance.overrides.get(&kind).copied().unwrap_or_default();
        Tolerance {
            abs_tol: o.abs.or(self.tolerance.abs).unwrap_or(base.abs_tol),
            rel_tol: o.rel.or(self.tolerance.rel).unwrap_or(base.rel_tol),
        }
    }

    pub fn grid_points(&self) -> Result<Vec<(Rational, Rational)>> {
        match &self.grid {
            None => Ok(default_grid()),
            Some(points) => points
                .iter()
                .enumerate()
                .map(|(i, (x, y))| {
                    Ok((
                        parse_field(&format!("grid[{i}][0]"), x)?,
                        parse_field(&format!("grid[{i}][1]"), y)?,
                    ))
                })
                .collect(),
        }
    }

    /// The weight family in the requested scalar type.
    pub fn family<S: Scalar>(&self) -> Result<WeightFamily<S>> {
        let nvec = MultiIndex::new(self.nvec.clone()).map_err(|e| field_err("nvec", e))?;
        let mvec = MultiIndex::new(self.mvec.clone()).map_err(|e| field_err("mvec", e))?;
        let mut seeds = Vec::with_capacity(self.seeds.len());
        for (a, row) in self.seeds.iter().enumerate() {
            let mut out_row = Vec::with_capacity(row.len());
            for (b, list) in row.iter().enumerate() {
                let mut out = Vec::with_capacity(list.len());
                for (r, seed) in list.iter().enumerate() {
                    let field = format!("seeds[{a}][{b}][{r}]");
                    let coeffs = seed
                        .coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| parse_field(&format!("{field}.coeffs[{k}]"), c).map(|v| S::from_rational(&v)))
                        .collect::<Result<Vec<S>>>()?;
                    let measure = seed.measure.to_measure(&format!("{field}.measure"))?;
                    out.push(SeedWeight::new(Poly::new(coeffs), measure));
                }
                out_row.push(out);
            }
            seeds.push(out_row);
        }
        Ok(WeightFamily::from_parts(nvec, mvec, seeds))
    }

    /// Checks every invariant, reporting the offending field.
    pub fn validate(&self) -> Result<()> {
        let n = self.block_size;
        if n == 0 {
            return Err(field_err("N", "block size must be at least 1"));
        }
        for (name, v) in [("nvec", &self.nvec), ("mvec", &self.mvec)] {
            if v.len() != n {
                return Err(field_err(name, format!("expected {n} components, found {}", v.len())));
            }
            if let Some(i) = v.iter().position(|&c| c == 0) {
                return Err(field_err(format!("{name}[{i}]"), "components must be at least 1"));
            }
        }
        if self.seeds.len() != n {
            return Err(field_err(
                "seeds",
                format!("expected {n} rows, found {}", self.seeds.len()),
            ));
        }
        for (a, row) in self.seeds.iter().enumerate() {
            if row.len() != n {
                return Err(field_err(
                    format!("seeds[{a}]"),
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
            for (b, list) in row.iter().enumerate() {
                if list.len() != self.mvec[b] {
                    return Err(field_err(
                        format!("seeds[{a}][{b}]"),
                        format!("expected m_{b} = {} seeds, found {}", self.mvec[b], list.len()),
                    ));
                }
                for (r, seed) in list.iter().enumerate() {
                    if self.backend == Backend::Exact && seed.measure == MeasureSpec::Gaussian {
                        return Err(field_err(
                            format!("seeds[{a}][{b}][{r}].measure"),
                            "gaussian moments are irrational; use the float backend",
                        ));
                    }
                }
            }
        }
        if self.truncation == 0 {
            return Err(field_err("L", "truncation must be at least 1"));
        }
        let fam = self.family::<Rational>()?;
        match self.backend {
            Backend::Exact => fam.validate(self.truncation),
            Backend::Float => self.family::<f64>()?.validate(self.truncation),
        }
        .map_err(|e| field_err("seeds", e))?;

        let width = self.max_shift();
        for (i, &l) in self.levels.iter().enumerate() {
            if l + width > self.truncation {
                return Err(field_err(
                    format!("levels[{i}]"),
                    format!(
                        "truncation budget: level {l} with max shift {width} needs L >= {}, have L = {}",
                        l + width,
                        self.truncation
                    ),
                ));
            }
        }
        if self.max_level().is_none() && self.checks.iter().any(|k| k.per_level()) {
            return Err(field_err(
                "L",
                format!("truncation {} is below the max shift {width}", self.truncation),
            ));
        }

        let points = self.grid_points()?;
        if let Some(explicit) = &self.grid {
            for (i, (x, _)) in points.iter().enumerate() {
                if let Some((pos, seed)) = self.seed_outside(&fam, x) {
                    return Err(field_err(
                        format!("grid[{i}][0]"),
                        format!(
                            "x = {} lies outside the support of seeds{pos} ({})",
                            explicit[i].0, seed
                        ),
                    ));
                }
            }
            if self.wants(CheckKind::Corollary) {
                for (i, (x, y)) in points.iter().enumerate() {
                    for (a, &na) in self.nvec.iter().enumerate() {
                        for (b, &nb) in self.nvec.iter().enumerate() {
                            if x.power(na) == y.power(nb) {
                                return Err(field_err(
                                    format!("grid[{i}]"),
                                    format!(
                                        "singular locus: x^{na} = y^{nb} at ({}, {}) for entry ({a}, {b}) with corollary enabled",
                                        explicit[i].0, explicit[i].1
                                    ),
                                ));
                            }
                        }
                    }
                }
            }
        }

        for (kind, o) in &self.tolerance.overrides {
            Tolerance::new(o.abs.unwrap_or(0.0), o.rel.unwrap_or(0.0))
                .map_err(|e| field_err(format!("tolerance.overrides.{kind}"), e))?;
        }
        Tolerance::new(self.tolerance.abs.unwrap_or(0.0), self.tolerance.rel.unwrap_or(0.0))
            .map_err(|e| field_err("tolerance", e))?;
        Ok(())
    }

    fn seed_outside(&self, fam: &WeightFamily<Rational>, x: &Rational) -> Option<(String, &'static str)> {
        for (a, row) in fam.seeds().iter().enumerate() {
            for (b, list) in row.iter().enumerate() {
                for (r, seed) in list.iter().enumerate() {
                    if !seed.measure.contains(x) {
                        return Some((format!("[{a}][{b}][{r}]"), seed.measure.kind_name()));
                    }
                }
            }
        }
        None
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let cfg = read_config(path)?;
    cfg.validate().map_err(|e| with_file(path, e))?;
    Ok(cfg)
}

/// Reads and parses a config file without validating it.
pub fn read_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    RunConfig::from_json_str(&text).map_err(|e| with_file(path, e))
}

fn with_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Config { path: field, message } => Error::Config {
            path: format!("{}: {field}", path.display()),
            message,
        },
        other => other,
    }
}

//! Built-in configurations behind `mgcd demo`.

use std::fmt;
use std::str::FromStr;

use super::config::{Backend, CheckKind, MeasureSpec, RunConfig, SeedSpec, ToleranceOverride, ToleranceSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoCase {
    Hermite,
    Legendre,
    Multigraded12,
    MultigradedN2,
    Singular,
}

impl DemoCase {
    pub const ALL: [DemoCase; 5] = [
        DemoCase::Hermite,
        DemoCase::Legendre,
        DemoCase::Multigraded12,
        DemoCase::MultigradedN2,
        DemoCase::Singular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DemoCase::Hermite => "hermite",
            DemoCase::Legendre => "legendre",
            DemoCase::Multigraded12 => "multigraded-12",
            DemoCase::MultigradedN2 => "multigraded-n2",
            DemoCase::Singular => "singular",
        }
    }
}

impl fmt::Display for DemoCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DemoCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DemoCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown demo case {s:?}")))
    }
}

fn unit(coeffs: &[&str]) -> SeedSpec {
    SeedSpec {
        coeffs: coeffs.iter().map(|c| c.to_string()).collect(),
        measure: MeasureSpec::FiniteInterval {
            a: "0".into(),
            b: "1".into(),
        },
    }
}

fn base(n: usize, nvec: Vec<usize>, mvec: Vec<usize>, seeds: Vec<Vec<Vec<SeedSpec>>>, total: usize) -> RunConfig {
    RunConfig {
        block_size: n,
        nvec,
        mvec,
        seeds,
        truncation: total,
        levels: Vec::new(),
        backend: Backend::Exact,
        tolerance: ToleranceSpec::default(),
        grid: None,
        checks: CheckKind::ALL.to_vec(),
    }
}

/// The built-in configuration for `case`.
pub fn demo_config(case: DemoCase) -> RunConfig {
    match case {
        DemoCase::Hermite => {
            let seed = SeedSpec {
                coeffs: vec!["1".into()],
                measure: MeasureSpec::Gaussian,
            };
            let mut cfg = base(1, vec![1], vec![1], vec![vec![vec![seed]]], 10);
            cfg.backend = Backend::Float;
            cfg.tolerance.overrides.insert(
                CheckKind::Biorthogonality,
                ToleranceOverride {
                    abs: Some(1e-6),
                    rel: Some(1e-6),
                },
            );
            cfg
        }
        DemoCase::Legendre => base(1, vec![1], vec![1], vec![vec![vec![unit(&["1"])]]], 10),
        // ρ₄ = x²ρ₀ = ρ₁, so g^[5] is singular and L = 4 is the deepest usable truncation
        DemoCase::Multigraded12 => base(
            1,
            vec![1],
            vec![2],
            vec![vec![vec![unit(&["1"]), unit(&["0", "0", "1"])]]],
            4,
        ),
        DemoCase::MultigradedN2 => base(
            2,
            vec![1, 2],
            vec![2, 1],
            vec![
                vec![vec![unit(&["1"]), unit(&["1", "2"])], vec![unit(&["3", "1"])]],
                vec![
                    vec![unit(&["0", "1"]), unit(&["1", "0", "1"])],
                    vec![unit(&["2", "-1"])],
                ],
            ],
            10,
        ),
        // column 0 of the seed matrix repeats column 1: the level-0 pivot block is singular
        DemoCase::Singular => base(
            2,
            vec![1, 1],
            vec![1, 1],
            vec![
                vec![vec![unit(&["1"])], vec![unit(&["1"])]],
                vec![vec![unit(&["0", "1"])], vec![unit(&["0", "1"])]],
            ],
            4,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_validates() {
        for case in DemoCase::ALL {
            demo_config(case).validate().unwrap_or_else(|e| panic!("{case}: {e}"));
            assert_eq!(case.name().parse::<DemoCase>().unwrap(), case);
        }
    }
}

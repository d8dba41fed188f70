//! Identities on randomly drawn multigraded families.

use mgcd::blockops::{build_moment_matrix, check_multigraded_symmetry};
use mgcd::cdkernel::{theorem_threshold, KernelEvaluator};
use mgcd::factorize::lu_factorize;
use mgcd::families::{check_biorthogonality, check_connection_formulas, dual_family, primary_family};
use mgcd::numerics::{ratio, Rational, Scalar, Tolerance};
use mgcd::weights::{MultiIndex, SeedWeight, WeightFamily};
use mgcd::CheckReport;
use num_traits::Zero;
use proptest::prelude::*;

type Q = Rational;

const TRUNCATION: usize = 5;

#[derive(Debug, Clone)]
struct Drawn {
    nvec: Vec<usize>,
    mvec: Vec<usize>,
    coeffs: Vec<Vec<Vec<Vec<i64>>>>,
}

impl Drawn {
    fn family(&self) -> WeightFamily<Q> {
        let seeds = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .map(|list| {
                        list.iter()
                            .map(|c| SeedWeight::on_unit_interval(c.iter().map(|&v| ratio(v, 1)).collect()))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        WeightFamily::from_parts(
            MultiIndex::new(self.nvec.clone()).unwrap(),
            MultiIndex::new(self.mvec.clone()).unwrap(),
            seeds,
        )
    }
}

fn drawn() -> impl Strategy<Value = Drawn> {
    (1usize..=2)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(1usize..=2, n),
                prop::collection::vec(1usize..=2, n),
            )
        })
        .prop_flat_map(|(nvec, mvec)| {
            let n = nvec.len();
            let seed = prop::collection::vec(-3i64..=3, 1..=3);
            let row: Vec<_> = mvec.iter().map(|&m| prop::collection::vec(seed.clone(), m)).collect();
            let rows = prop::collection::vec(row, n);
            (Just(nvec), Just(mvec), rows)
        })
        .prop_map(|(nvec, mvec, coeffs)| Drawn { nvec, mvec, coeffs })
}

fn points() -> impl Strategy<Value = Vec<(Q, Q)>> {
    prop::collection::vec((0i64..=12, 0i64..=12), 3).prop_map(|v| {
        v.into_iter()
            .map(|(x, y)| (ratio(x, 12), ratio(2 * y + 1, 26)))
            .collect()
    })
}

fn exact(r: &CheckReport<Q>) -> Result<(), TestCaseError> {
    prop_assert!(r.samples > 0, "{}: vacuous", r.name);
    prop_assert!(
        r.max_residual.is_zero(),
        "{}: residual {} at {:?}",
        r.name,
        r.max_residual,
        r.first_failure
    );
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identities_hold_for_random_families(d in drawn(), pts in points()) {
        let fam = d.family();
        let tol = Tolerance::default();
        let g = build_moment_matrix(&fam, TRUNCATION).unwrap();
        exact(&check_multigraded_symmetry(&g, fam.nvec(), fam.mvec(), tol))?;
        let f = lu_factorize(&g);
        prop_assume!(f.is_ok());
        let f = f.unwrap();
        exact(&check_biorthogonality(&fam, &primary_family(&f), &dual_family(&f), tol).unwrap())?;
        for l in 1..=2 {
            exact(&check_connection_formulas(&fam, &f, &g, l, 1, tol).unwrap())?;
        }
        let width = fam.max_shift();
        for l in 1..=TRUNCATION - width {
            let ev = KernelEvaluator::new(&fam, &g, &f, l).unwrap();
            exact(&ev.check_abc(&pts, tol).unwrap())?;
            exact(&ev.check_proposition(&pts, tol).unwrap())?;
            if l >= theorem_threshold(&fam) {
                exact(&ev.check_theorem(&pts, tol).unwrap())?;
            }
        }
    }

    #[test]
    fn float_backend_tracks_exact(d in drawn(), pts in points()) {
        let fam = d.family();
        let g = build_moment_matrix(&fam, TRUNCATION).unwrap();
        let f = lu_factorize(&g);
        prop_assume!(f.is_ok());
        let f = f.unwrap();
        let fam_f = WeightFamily::from_parts(
            fam.nvec().clone(),
            fam.mvec().clone(),
            d.coeffs.iter().map(|row| row.iter().map(|list| list.iter().map(|c| {
                SeedWeight::on_unit_interval(c.iter().map(|&v| v as f64).collect())
            }).collect()).collect()).collect(),
        );
        let g_f = build_moment_matrix(&fam_f, TRUNCATION).unwrap();
        let f_f = lu_factorize(&g_f);
        prop_assume!(f_f.is_ok());
        let f_f = f_f.unwrap();
        let ev = KernelEvaluator::new(&fam, &g, &f, 1).unwrap();
        let ev_f = KernelEvaluator::new(&fam_f, &g_f, &f_f, 1).unwrap();
        for (x, y) in &pts {
            let k = ev.kernel_sum(x, y).unwrap();
            let k_f = ev_f.kernel_sum(&f64::from_rational(x), &f64::from_rational(y)).unwrap();
            for a in 0..k.rows() {
                for b in 0..k.cols() {
                    let want = k[(a, b)].to_f64();
                    let got = k_f[(a, b)];
                    prop_assert!((want - got).abs() <= 1e-6 * want.abs().max(1.0), "{want} vs {got}");
                }
            }
        }
    }
}

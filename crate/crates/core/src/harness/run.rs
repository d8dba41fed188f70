//! Pipeline orchestration: moments, factorization, families, identities.

use std::collections::BTreeMap;
use std::time::Instant;

use super::config::{Backend, CheckKind, RunConfig};
use super::report::{CheckEntry, RunReport};
use crate::blockops::{build_moment_matrix, check_multigraded_symmetry};
use crate::cdkernel::{classical_cd_with, theorem_threshold, KernelEvaluator};
use crate::check::{CheckReport, ResidualTracker};
use crate::error::Result;
use crate::factorize::{check_factorization, lu_factorize};
use crate::families::{
    check_biorthogonality, check_connection_formulas, check_matrix_notation, check_modified_orthogonality, dual_family,
    primary_family,
};
use crate::numerics::{Rational, Scalar};

/// Largest associated-family offset `j` exercised per level.
pub const MAX_ASSOCIATED_OFFSET: usize = 3;

/// Runs every requested check; only structural failures abort.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    match cfg.backend {
        Backend::Exact => run_backend::<Rational>(cfg),
        Backend::Float => run_backend::<f64>(cfg),
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn run_backend<S: Scalar>(cfg: &RunConfig) -> Result<RunReport> {
    let total = cfg.truncation;
    let fam = cfg.family::<S>()?;
    fam.validate(total)?;
    let g = build_moment_matrix(&fam, total)?;
    let points: Vec<(S, S)> = cfg
        .grid_points()?
        .iter()
        .map(|(x, y)| (S::from_rational(x), S::from_rational(y)))
        .collect();
    let mut entries = Vec::new();

    if cfg.wants(CheckKind::Symmetry) {
        let start = Instant::now();
        let r = check_multigraded_symmetry(&g, fam.nvec(), fam.mvec(), cfg.tolerance_for(CheckKind::Symmetry));
        entries.push(CheckEntry::single(r, ms(start)));
    }
    if !cfg.checks.iter().any(|&k| k != CheckKind::Symmetry) {
        return Ok(RunReport::new(cfg, entries));
    }

    let f = lu_factorize(&g)?;
    if cfg.wants(CheckKind::Factorization) {
        let start = Instant::now();
        let r = check_factorization(&g, &f, cfg.tolerance_for(CheckKind::Factorization))?;
        entries.push(CheckEntry::single(r, ms(start)));
    }
    if cfg.wants(CheckKind::Biorthogonality) {
        let start = Instant::now();
        let r = check_biorthogonality(
            &fam,
            &primary_family(&f),
            &dual_family(&f),
            cfg.tolerance_for(CheckKind::Biorthogonality),
        )?;
        entries.push(CheckEntry::single(r, ms(start)));
    }

    let kinds: Vec<CheckKind> = CheckKind::ALL
        .into_iter()
        .filter(|&k| k.per_level() && cfg.wants(k))
        .collect();
    let levels = cfg.effective_levels();
    let threshold = theorem_threshold(&fam);
    let mut per_kind: BTreeMap<CheckKind, (Vec<(usize, CheckReport<S>)>, f64)> = BTreeMap::new();
    let needs_evaluator = kinds.iter().any(|k| {
        !matches!(
            k,
            CheckKind::MatrixNotation | CheckKind::Connection | CheckKind::ModifiedOrthogonality
        )
    });
    for &l in &levels {
        let ev = if needs_evaluator {
            Some(KernelEvaluator::new(&fam, &g, &f, l)?)
        } else {
            None
        };
        for &kind in &kinds {
            let tol = cfg.tolerance_for(kind);
            let start = Instant::now();
            let report = match kind {
                CheckKind::MatrixNotation if l < total => check_matrix_notation(&g, &f, l, tol)?,
                CheckKind::MatrixNotation => CheckReport::vacuous(kind.name()),
                CheckKind::Connection => {
                    let mut t = ResidualTracker::new(tol);
                    for j in 0..=l.min(MAX_ASSOCIATED_OFFSET) {
                        if l + j < total {
                            let r = check_connection_formulas(&fam, &f, &g, l, j, tol)?;
                            t.merge(r);
                        }
                    }
                    t.finish(kind.name())
                }
                CheckKind::ModifiedOrthogonality => {
                    let mut t = ResidualTracker::new(tol);
                    for j in 0..=l.min(MAX_ASSOCIATED_OFFSET) {
                        if l + j < total {
                            let r = check_modified_orthogonality(&fam, &g, l, j, tol)?;
                            t.merge(r);
                        }
                    }
                    t.finish(kind.name())
                }
                CheckKind::Abc => ev.as_ref().expect("evaluator").check_abc(&points, tol)?,
                CheckKind::Reproducing => ev.as_ref().expect("evaluator").check_reproducing(&points, tol)?,
                CheckKind::Projections => ev.as_ref().expect("evaluator").check_projections(tol)?,
                CheckKind::Proposition => ev.as_ref().expect("evaluator").check_proposition(&points, tol)?,
                CheckKind::Theorem => ev.as_ref().expect("evaluator").check_theorem(&points, tol)?,
                CheckKind::Corollary if l < threshold => {
                    let mut r = CheckReport::vacuous(kind.name());
                    r.notes.push(format!("l={l} below threshold {threshold}"));
                    r
                }
                CheckKind::Corollary => ev.as_ref().expect("evaluator").check_corollary(&points, tol)?,
                _ => unreachable!("global check in per-level loop"),
            };
            let slot = per_kind.entry(kind).or_default();
            slot.0.push((l, report));
            slot.1 += ms(start);
        }
    }
    for (kind, (reports, elapsed)) in per_kind {
        entries.push(CheckEntry::per_level(kind.name(), reports, elapsed));
    }

    if cfg.wants(CheckKind::Classical) {
        entries.push(classical_entry(cfg, &fam, &f, &points)?);
    }
    Ok(RunReport::new(cfg, entries))
}

fn classical_entry<S: Scalar>(
    cfg: &RunConfig,
    fam: &crate::weights::WeightFamily<S>,
    f: &crate::factorize::GaussFactors<S>,
    points: &[(S, S)],
) -> Result<CheckEntry> {
    let kind = CheckKind::Classical;
    if cfg.block_size != 1 || fam.nvec().get(0) != 1 || fam.mvec().get(0) != 1 {
        return Ok(CheckEntry::skipped(
            kind.name(),
            "classical formula needs N = 1 and n = m = (1)",
        ));
    }
    let start = Instant::now();
    let tol = cfg.tolerance_for(kind);
    let mut reports = Vec::new();
    for &n in cfg.effective_levels().iter().filter(|&&n| n >= 1 && n < cfg.truncation) {
        let mut t = ResidualTracker::new(tol);
        for (x, y) in points.iter().filter(|(x, y)| x != y) {
            let r = classical_cd_with(f, n, x, y)?;
            t.record_pair(&r.lhs, &r.rhs, || format!("n={n} x={} y={}", x.render(), y.render()));
        }
        reports.push((n, t.finish(kind.name())));
    }
    Ok(CheckEntry::per_level(kind.name(), reports, ms(start)))
}

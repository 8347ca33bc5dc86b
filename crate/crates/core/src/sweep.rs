//! Solving an instance along a range of `μ` values and counting where the
//! support set changes.
//!
//! A bend is counted whenever two consecutive solves (in `μ` order) have
//! different support sets, plus and minus classes together.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::construct::{mu_of_q, ConstructedPair, SupportDecomposition, SvmInstance};
use crate::exact_geometry::{int, rat, Rational};
use crate::goldfarb::{FacetLabel, SignVector};
use crate::qp::{
    solve_reduced_distance, support_set, OptimalPair, QpError, ReducedHullQP, SupportSet,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SweepError {
    #[error("invalid sweep range: {0}")]
    InvalidRange(String),
    #[error("solve at mu = {mu} failed: {source}")]
    Solver { mu: Rational, source: QpError },
    #[error("instance was not built from a Goldfarb cube")]
    NotConstructed,
    #[error("theorem violated for {sigma}: {detail}")]
    TheoremViolation { sigma: SignVector, detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRecord {
    pub mu: Rational,
    pub support: SupportSet,
    pub objective: Rational,
    pub pair: OptimalPair,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    /// Strictly decreasing in `mu`.
    pub records: Vec<SweepRecord>,
    pub bend_count: usize,
    /// Number of distinct positive-class support sets among the records.
    pub distinct_support_sets: usize,
    pub lower_bound: usize,
}

impl SweepReport {
    fn from_records(instance: &SvmInstance, mut records: Vec<SweepRecord>) -> Self {
        records.sort_by(|a, b| b.mu.cmp(&a.mu));
        records.dedup_by(|a, b| a.mu == b.mu);
        let bend_count = records
            .windows(2)
            .filter(|w| w[0].support != w[1].support)
            .count();
        let distinct_support_sets = records
            .iter()
            .map(|r| &r.support.plus)
            .collect::<BTreeSet<_>>()
            .len();
        Self {
            records,
            bend_count,
            distinct_support_sets,
            lower_bound: instance.support_lower_bound(),
        }
    }
}

/// Solves the reduced-hull problem of `instance` at one `μ`.
pub fn solve_at(instance: &SvmInstance, mu: &Rational) -> Result<SweepRecord, SweepError> {
    let wrap = |source| SweepError::Solver {
        mu: mu.clone(),
        source,
    };
    let qp = ReducedHullQP::new(
        instance.plus_points.clone(),
        instance.minus_points.clone(),
        mu.clone(),
    )
    .map_err(wrap)?;
    let pair = solve_reduced_distance(&qp).map_err(wrap)?;
    Ok(SweepRecord {
        mu: mu.clone(),
        support: support_set(&pair),
        objective: pair.objective.clone(),
        pair,
    })
}

fn check_range(mu_lo: &Rational, mu_hi: &Rational) -> Result<(), SweepError> {
    if mu_lo < &rat(1, 2) || mu_lo >= mu_hi || mu_hi > &Rational::one() {
        return Err(SweepError::InvalidRange(format!(
            "need 1/2 <= mu_lo < mu_hi <= 1, got [{mu_lo}, {mu_hi}]"
        )));
    }
    Ok(())
}

/// The `steps` evenly spaced exact values from `mu_lo` to `mu_hi`.
pub fn grid(mu_lo: &Rational, mu_hi: &Rational, steps: usize) -> Vec<Rational> {
    let last = Rational::from_integer((steps - 1).into());
    (0..steps)
        .map(|i| mu_lo + (mu_hi - mu_lo) * Rational::from_integer(i.into()) / &last)
        .collect()
}

fn solve_grid(instance: &SvmInstance, mus: &[Rational]) -> Result<Vec<SweepRecord>, SweepError> {
    mus.par_iter().map(|mu| solve_at(instance, mu)).collect()
}

/// Solves at `steps >= 2` grid points in `[mu_lo, mu_hi]`.
pub fn sweep_grid(
    instance: &SvmInstance,
    mu_lo: &Rational,
    mu_hi: &Rational,
    steps: usize,
) -> Result<SweepReport, SweepError> {
    sweep_grid_refined(instance, mu_lo, mu_hi, steps, 0)
}

/// [`sweep_grid`] followed by [`refine_between`] on every pair of adjacent
/// grid points whose support sets differ.
pub fn sweep_grid_refined(
    instance: &SvmInstance,
    mu_lo: &Rational,
    mu_hi: &Rational,
    steps: usize,
    depth: u32,
) -> Result<SweepReport, SweepError> {
    check_range(mu_lo, mu_hi)?;
    if steps < 2 {
        return Err(SweepError::InvalidRange(format!(
            "need at least 2 steps, got {steps}"
        )));
    }
    let coarse = solve_grid(instance, &grid(mu_lo, mu_hi, steps))?;
    let extra: Vec<Vec<SweepRecord>> = coarse
        .par_windows(2)
        .map(|w| refine_records(instance, &w[0], &w[1], depth))
        .collect::<Result<_, _>>()?;
    let records = coarse
        .into_iter()
        .chain(extra.into_iter().flatten())
        .collect();
    Ok(SweepReport::from_records(instance, records))
}

fn refine_records(
    instance: &SvmInstance,
    a: &SweepRecord,
    b: &SweepRecord,
    depth: u32,
) -> Result<Vec<SweepRecord>, SweepError> {
    if depth == 0 || a.support == b.support {
        return Ok(Vec::new());
    }
    let mid = solve_at(instance, &((&a.mu + &b.mu) / int(2)))?;
    let mut out = refine_records(instance, a, &mid, depth - 1)?;
    out.extend(refine_records(instance, &mid, b, depth - 1)?);
    out.push(mid);
    Ok(out)
}

/// Bisects `[mu_a, mu_b]` wherever the endpoint support sets differ, down
/// to `depth` levels. Returns every solved record, endpoints included, in
/// decreasing `μ`.
pub fn refine_between(
    instance: &SvmInstance,
    mu_a: &Rational,
    mu_b: &Rational,
    depth: u32,
) -> Result<Vec<SweepRecord>, SweepError> {
    if mu_a >= mu_b {
        return Err(SweepError::InvalidRange(format!(
            "need mu_a < mu_b, got {mu_a} and {mu_b}"
        )));
    }
    let a = solve_at(instance, mu_a)?;
    let b = solve_at(instance, mu_b)?;
    let mut records = refine_records(instance, &a, &b, depth)?;
    records.push(a);
    records.push(b);
    records.sort_by(|x, y| y.mu.cmp(&x.mu));
    Ok(records)
}

/// Solves at every constructed breakpoint `μ(q_σ)` and checks that the
/// optimum is exactly `(p_σ^(ℓ), q_σ)` with positive support
/// `{(k, σ_k)}` and coefficients equal to the decomposition.
pub fn sweep_constructed(
    instance: &SvmInstance,
    pairs: &[ConstructedPair],
    decomps: &[SupportDecomposition],
) -> Result<SweepReport, SweepError> {
    let info = instance
        .goldfarb
        .as_ref()
        .ok_or(SweepError::NotConstructed)?;
    let records: Vec<SweepRecord> = pairs
        .par_iter()
        .zip(decomps)
        .map(|(pair, decomp)| {
            let violation = |detail: String| SweepError::TheoremViolation { sigma: pair.sigma.clone(), detail };
            let mu = mu_of_q(pair.q_sigma.last(), &info.calibration)
                .map_err(|e| violation(e.to_string()))?;
            let record = solve_at(instance, &mu)?;
            if record.pair.p != pair.p_stretched {
                return Err(violation(format!("optimal p at mu = {mu} differs from p_sigma")));
            }
            if record.pair.q != pair.q_sigma {
                return Err(violation(format!("optimal q at mu = {mu} differs from q_sigma")));
            }
            let mut expected = vec![Rational::zero(); instance.plus_points.len()];
            for (label, alpha) in decomp.labels().zip(&decomp.alphas) {
                expected[FacetLabel::index(label)] = alpha.clone();
            }
            if record.pair.alpha_plus != expected {
                return Err(violation(format!(
                    "positive support at mu = {mu} is {:?}, expected the facet labels {{(k, sigma_k)}}",
                    record.support.plus
                )));
            }
            Ok(record)
        })
        .collect::<Result<_, _>>()?;
    Ok(SweepReport::from_records(instance, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{generate_2d_arc_instance, Construction, StretchFactor};
    use crate::goldfarb::GoldfarbParams;

    fn construction(d: usize) -> Construction {
        let params = GoldfarbParams::with_defaults(d).unwrap();
        Construction::build(&params, &StretchFactor::from_int(20_000).unwrap()).unwrap()
    }

    #[test]
    fn grid_points_are_exact() {
        let g = grid(&rat(8, 10), &int(1), 5);
        assert_eq!(
            g,
            vec![rat(4, 5), rat(17, 20), rat(9, 10), rat(19, 20), int(1)]
        );
    }

    #[test]
    fn two_step_sweep_has_two_records() {
        let inst = generate_2d_arc_instance(20).unwrap();
        let report = sweep_grid(&inst, &rat(99, 100), &int(1), 2).unwrap();
        assert_eq!(report.records.len(), 2);
        assert!(report.records[0].mu > report.records[1].mu);
    }

    #[test]
    fn range_validation() {
        let inst = generate_2d_arc_instance(5).unwrap();
        assert!(sweep_grid(&inst, &rat(1, 3), &int(1), 4).is_err());
        assert!(sweep_grid(&inst, &int(1), &int(1), 4).is_err());
        assert!(sweep_grid(&inst, &rat(1, 2), &int(1), 1).is_err());
        assert!(refine_between(&inst, &int(1), &rat(1, 2), 2).is_err());
    }

    #[test]
    fn refinement_depth_zero_and_identical_ends() {
        let c = construction(3);
        let recs = refine_between(&c.instance, &rat(8, 10), &int(1), 0).unwrap();
        assert_eq!(recs.len(), 2);
        // Both ends near 1 share the support of the last breakpoint.
        let recs = refine_between(&c.instance, &rat(999_999, 1_000_000), &int(1), 4).unwrap();
        if recs[0].support == recs.last().unwrap().support {
            assert_eq!(recs.len(), 2);
        }
    }

    #[test]
    fn refinement_localises_a_constructed_breakpoint() {
        let c = construction(3);
        let bps = c.breakpoints();
        let lo = bps.iter().min().unwrap().clone();
        let a = &lo - rat(1, 100);
        let b = &lo + rat(1, 100);
        let recs = refine_between(&c.instance, &a, &b, 3).unwrap();
        assert!(recs.len() > 2);
        let changes = recs
            .windows(2)
            .filter(|w| w[0].support != w[1].support)
            .count();
        assert!(changes >= 1);
    }

    #[test]
    fn constructed_d3_and_d4() {
        for (d, expected) in [(3, 2), (4, 4)] {
            let c = construction(d);
            let report = sweep_constructed(&c.instance, &c.pairs, &c.decomps).unwrap();
            assert_eq!(report.distinct_support_sets, expected);
            assert_eq!(report.lower_bound, expected);
            assert!(report.bend_count >= expected - 1);
            for r in &report.records {
                assert_eq!(r.support.plus.len(), d);
            }
        }
    }

    #[test]
    fn constructed_rejects_wrong_pair() {
        let c = construction(3);
        let mut pairs = c.pairs.clone();
        pairs.swap(0, 1);
        let err = sweep_constructed(&c.instance, &pairs, &c.decomps).unwrap_err();
        assert!(matches!(err, SweepError::TheoremViolation { .. }));
    }

    #[test]
    fn objective_is_monotone_along_a_grid() {
        let c = construction(3);
        let report = sweep_grid(&c.instance, &rat(8, 10), &int(1), 17).unwrap();
        for w in report.records.windows(2) {
            assert!(w[0].objective <= w[1].objective);
        }
        assert!(report.distinct_support_sets >= 2);
    }
}

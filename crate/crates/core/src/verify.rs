//! End-to-end check of a Goldfarb instance: regenerate it from its header,
//! compare, then certify every admissible pair.

use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{ConstructError, Construction, SvmInstance};
use crate::exact_geometry::format_rational;
use crate::qp::{build_kkt_certificate, verify_relaxed_uniqueness, QpError};
use crate::sweep::{sweep_constructed, SweepError};

/// Perturbation rounds used by [`verify_instance`] for the uniqueness test.
pub const UNIQUENESS_TRIALS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("instance carries no Goldfarb header")]
    NotConstructed,
    #[error("instance differs from the one its header generates: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Certificate(#[from] QpError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSummary {
    pub sigma: String,
    pub mu: String,
    pub mu_sigma: String,
    pub lambda_sigma: String,
    pub support_plus: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub d: usize,
    pub stretch: String,
    pub mu_bar: String,
    pub certificates: usize,
    pub distinct_support_sets: usize,
    pub lower_bound: usize,
    pub pairs: Vec<PairSummary>,
}

fn first_difference(found: &SvmInstance, expected: &SvmInstance) -> Option<String> {
    let rows = |inst: &SvmInstance| {
        inst.plus_points
            .iter()
            .map(|p| ("+1", p))
            .chain(inst.minus_points.iter().map(|p| ("-1", p)))
            .map(|(l, p)| (l, p.clone()))
            .collect::<Vec<_>>()
    };
    let (a, b) = (rows(found), rows(expected));
    if a.len() != b.len() {
        return Some(format!("{} points, expected {}", a.len(), b.len()));
    }
    if let Some(i) = a.iter().zip(&b).position(|(x, y)| x != y) {
        return Some(format!(
            "point row {} is {} {}, expected {} {}",
            i + 1,
            a[i].0,
            a[i].1,
            b[i].0,
            b[i].1
        ));
    }
    let (fc, ec) = (
        &found.goldfarb.as_ref().expect("checked").calibration,
        &expected.goldfarb.as_ref().expect("checked").calibration,
    );
    for (name, x, y) in [
        ("mu_bar", &fc.mu_bar, &ec.mu_bar),
        ("q_min", &fc.q_min, &ec.q_min),
        ("q_max", &fc.q_max, &ec.q_max),
    ] {
        if x != y {
            return Some(format!(
                "{name} is {}, expected {}",
                format_rational(x),
                format_rational(y)
            ));
        }
    }
    None
}

/// Regenerates the instance from `(d, ε, γ, L)` and requires exact
/// equality, then checks facet strictness, positive decompositions, KKT
/// certificates, relaxed uniqueness and the optimum at every breakpoint.
/// The first failure is returned with the offending `σ` where there is one.
pub fn verify_instance(instance: &SvmInstance) -> Result<VerifySummary, VerifyError> {
    let info = instance
        .goldfarb
        .as_ref()
        .ok_or(VerifyError::NotConstructed)?;
    let construction = Construction::build(&info.params, &info.stretch)?;
    if let Some(diff) = first_difference(instance, &construction.instance) {
        return Err(VerifyError::Mismatch(diff));
    }
    let ell = construction.stretch.ell();
    let certs = construction
        .pairs
        .par_iter()
        .map(|pair| {
            let cert = build_kkt_certificate(pair, &construction.params, ell)?;
            verify_relaxed_uniqueness(pair, &construction.params, ell, UNIQUENESS_TRIALS)?;
            Ok(cert)
        })
        .collect::<Result<Vec<_>, QpError>>()?;
    let report = sweep_constructed(instance, &construction.pairs, &construction.decomps)?;
    let breakpoints = construction.breakpoints();
    let pairs = construction
        .pairs
        .iter()
        .zip(&construction.decomps)
        .zip(&certs)
        .zip(&breakpoints)
        .map(|(((pair, dec), cert), mu)| PairSummary {
            sigma: pair.sigma.to_string(),
            mu: format_rational(mu),
            mu_sigma: format_rational(&dec.mu_sigma),
            lambda_sigma: format_rational(&cert.lambda_sigma()),
            support_plus: dec.labels().map(|l| l.index()).collect(),
        })
        .collect();
    Ok(VerifySummary {
        d: info.params.d(),
        stretch: format_rational(info.stretch.l()),
        mu_bar: format_rational(&construction.calibration.mu_bar),
        certificates: certs.len(),
        distinct_support_sets: report.distinct_support_sets,
        lower_bound: report.lower_bound,
        pairs,
    })
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.certificates == self.lower_bound && self.distinct_support_sets == self.lower_bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_instance, generate_2d_arc_instance, StretchFactor};
    use crate::exact_geometry::{int, rat};
    use crate::goldfarb::GoldfarbParams;

    fn instance(d: usize) -> SvmInstance {
        build_instance(
            &GoldfarbParams::with_defaults(d).unwrap(),
            &StretchFactor::from_int(20_000).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn fresh_instances_pass() {
        for d in 2..=4 {
            let summary = verify_instance(&instance(d)).unwrap();
            assert!(summary.passed());
            assert_eq!(summary.certificates, 1 << (d - 2));
        }
    }

    #[test]
    fn tampering_is_detected() {
        let mut inst = instance(4);
        let mut p = inst.plus_points[3].clone();
        p.set(0, &p[0] + rat(1, 1_000_000));
        inst.plus_points[3] = p;
        assert!(matches!(
            verify_instance(&inst),
            Err(VerifyError::Mismatch(_))
        ));

        let mut inst = instance(4);
        inst.goldfarb.as_mut().unwrap().calibration.q_max += int(1);
        assert!(matches!(
            verify_instance(&inst),
            Err(VerifyError::Mismatch(_))
        ));
    }

    #[test]
    fn plain_instances_are_rejected() {
        assert_eq!(
            verify_instance(&generate_2d_arc_instance(4).unwrap()),
            Err(VerifyError::NotConstructed)
        );
    }
}

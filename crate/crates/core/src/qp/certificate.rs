//! KKT certificates for a constructed pair `(p_σ^(ℓ), q_σ)` as the closest
//! pair between the stretched dual cube and the ray
//! `{x ∈ ℒ : x_d >= q_σ,d}`, plus a falsification test of its uniqueness.
//!
//! In variables `(x, x')` the problem is
//!
//! ```text
//! minimize   |x - x'|^2
//! subject to v_τ(ℓ) · x <= 1       for all τ
//!            x'_i = 0 (i <= d-2),  x'_{d-1} = 2,  x'_d >= q_σ,d
//! ```
//!
//! with conditions
//!
//! ```text
//! (stationarity) 2(x - x') + Σ λ_τ v_τ(ℓ) = 0
//! (coupling)     2(x' - x) + Λ = 0
//! (facet slack)  λ_τ (v_τ(ℓ) · x - 1) = 0
//! (ray slack)    Λ_d (x'_d - q_σ,d) = 0
//! ```
//!
//! and `λ >= 0`, `Λ_d <= 0`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::QpError;
use crate::construct::{scale_leading, ConstructedPair};
use crate::exact_geometry::{int, project_point_to_unit_halfspace, rat, Rational, RationalVector};
use crate::goldfarb::{cube_vertex, GoldfarbParams, SignVector};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum KktEquation {
    Stationarity,
    Coupling,
    FacetSlackness,
    RaySlackness,
    MultiplierSign,
    RayMultiplierSign,
    PrimalFeasibility,
}

impl fmt::Display for KktEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Stationarity => "stationarity 2(x - x') + sum lambda_t v_t(l) = 0",
            Self::Coupling => "coupling 2(x' - x) + Lambda = 0",
            Self::FacetSlackness => "complementary slackness lambda_t (v_t(l).x - 1) = 0",
            Self::RaySlackness => "complementary slackness Lambda_d (x'_d - q_d) = 0",
            Self::MultiplierSign => "lambda_t >= 0",
            Self::RayMultiplierSign => "Lambda_d <= 0",
            Self::PrimalFeasibility => "primal feasibility",
        })
    }
}

/// Multipliers for one constructed pair. `lambdas` lists only the nonzero
/// facet multipliers; every other `λ_τ` is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KktCertificate {
    pub sigma: SignVector,
    pub lambdas: BTreeMap<SignVector, Rational>,
    pub big_lambda: RationalVector,
}

impl KktCertificate {
    pub fn lambda_sigma(&self) -> Rational {
        self.lambdas
            .get(&self.sigma)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

/// `λ_σ = -2C/|v_σ(ℓ)|^2`, all other `λ_τ = 0`, `Λ = 2(p - q)`; then every
/// condition is checked exactly.
pub fn build_kkt_certificate(
    pair: &ConstructedPair,
    params: &GoldfarbParams,
    ell: &Rational,
) -> Result<KktCertificate, QpError> {
    let v = cube_vertex(params, &pair.sigma).map_err(|e| QpError::InvalidProblem(e.to_string()))?;
    let v_ell = scale_leading(&v.coords, ell);
    let c = Rational::one() - v_ell.dot(&pair.q_sigma);
    let lambda = int(-2) * c / v_ell.norm_sq();
    let cert = KktCertificate {
        sigma: pair.sigma.clone(),
        lambdas: BTreeMap::from([(pair.sigma.clone(), lambda)]),
        big_lambda: (&pair.p_stretched - &pair.q_sigma).scale(&int(2)),
    };
    verify_kkt_certificate(&cert, pair, params, ell)?;
    Ok(cert)
}

/// Checks every condition of `cert` against `(x, x') = (p_σ^(ℓ), q_σ)`.
pub fn verify_kkt_certificate(
    cert: &KktCertificate,
    pair: &ConstructedPair,
    params: &GoldfarbParams,
    ell: &Rational,
) -> Result<(), QpError> {
    let fail = |equation| QpError::CertificateInvalid {
        sigma: cert.sigma.clone(),
        equation,
    };
    let d = params.d();
    let x = &pair.p_stretched;
    let x_prime = &pair.q_sigma;
    let q_d = pair.q_sigma.last();
    let x_scaled = scale_leading(x, ell);

    let diff = x - x_prime;
    let mut normals = Vec::with_capacity(cert.lambdas.len());
    for (tau, lambda) in &cert.lambdas {
        let v_tau = cube_vertex(params, tau)
            .map_err(|_| fail(KktEquation::Stationarity))?
            .coords;
        normals.push((lambda, scale_leading(&v_tau, ell)));
    }
    let stationarity = normals
        .iter()
        .fold(diff.scale(&int(2)), |acc, (lambda, v)| {
            acc.add_scaled(lambda, v)
        });
    if !stationarity.is_zero() {
        return Err(fail(KktEquation::Stationarity));
    }
    if !(&(-&diff).scale(&int(2)) + &cert.big_lambda).is_zero() {
        return Err(fail(KktEquation::Coupling));
    }
    if normals
        .iter()
        .any(|(lambda, v)| !lambda.is_zero() && !(v.dot(x) - Rational::one()).is_zero())
    {
        return Err(fail(KktEquation::FacetSlackness));
    }
    if normals.iter().any(|(lambda, _)| lambda.is_negative()) {
        return Err(fail(KktEquation::MultiplierSign));
    }
    let lambda_d = cert.big_lambda.last();
    if lambda_d.is_positive() {
        return Err(fail(KktEquation::RayMultiplierSign));
    }
    if !(lambda_d * (x_prime.last() - q_d)).is_zero() {
        return Err(fail(KktEquation::RaySlackness));
    }

    // Primal: x in the stretched dual cube, x' on the ray.
    let on_line = x_prime.coords()[..d - 2].iter().all(Zero::is_zero) && x_prime[d - 2] == int(2);
    if !on_line || x_prime.last() < q_d {
        return Err(fail(KktEquation::PrimalFeasibility));
    }
    for tau in SignVector::all(d) {
        let v = cube_vertex(params, &tau).expect("length matches");
        if v.coords.dot(&x_scaled) > Rational::one() {
            return Err(fail(KktEquation::PrimalFeasibility));
        }
    }
    Ok(())
}

/// How a candidate `(x, x')` compares with the constructed pair on the
/// relaxed problem that keeps only the `σ`-facet inequality.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CandidateOutcome {
    Infeasible,
    Worse,
    Equal,
    Better,
}

pub fn compare_relaxed_candidate(
    pair: &ConstructedPair,
    params: &GoldfarbParams,
    ell: &Rational,
    x: &RationalVector,
    x_prime: &RationalVector,
) -> CandidateOutcome {
    let d = params.d();
    let v_ell = scale_leading(
        &cube_vertex(params, &pair.sigma)
            .expect("length matches")
            .coords,
        ell,
    );
    let on_line = x_prime.coords()[..d - 2].iter().all(Zero::is_zero) && x_prime[d - 2] == int(2);
    if v_ell.dot(x) > Rational::one() || !on_line || x_prime.last() < pair.q_sigma.last() {
        return CandidateOutcome::Infeasible;
    }
    let base = (&pair.p_stretched - &pair.q_sigma).norm_sq();
    let value = (x - x_prime).norm_sq();
    match value.cmp(&base) {
        std::cmp::Ordering::Greater => CandidateOutcome::Worse,
        std::cmp::Ordering::Equal => CandidateOutcome::Equal,
        std::cmp::Ordering::Less => CandidateOutcome::Better,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelaxedReport {
    pub candidates: usize,
    pub infeasible: usize,
}

/// Falsification test of uniqueness: perturbs `p` within the `σ`-facet
/// hyperplane, slides `q` along `ℒ` (re-projecting `p`), and combines both,
/// at step sizes `2^-j` for `j < trials`. Every feasible candidate must be
/// strictly worse than the constructed pair.
pub fn verify_relaxed_uniqueness(
    pair: &ConstructedPair,
    params: &GoldfarbParams,
    ell: &Rational,
    trials: usize,
) -> Result<RelaxedReport, QpError> {
    let d = params.d();
    let v_ell = scale_leading(
        &cube_vertex(params, &pair.sigma)
            .expect("length matches")
            .coords,
        ell,
    );
    let v_norm = v_ell.norm_sq();
    let mut report = RelaxedReport::default();

    let mut check = |x: RationalVector, x_prime: RationalVector, what: String| {
        report.candidates += 1;
        match compare_relaxed_candidate(pair, params, ell, &x, &x_prime) {
            CandidateOutcome::Infeasible => {
                report.infeasible += 1;
                Ok(())
            }
            CandidateOutcome::Worse => Ok(()),
            outcome => Err(QpError::UniquenessViolated {
                sigma: pair.sigma.clone(),
                detail: format!("{what} is {outcome:?}"),
            }),
        }
    };

    let mut step = Rational::one();
    for j in 0..trials {
        // Tangent directions of the facet hyperplane.
        for i in 0..d {
            let e = RationalVector::unit(d, i);
            let tangent = e.add_scaled(&(-&v_ell[i] / &v_norm), &v_ell);
            if tangent.is_zero() {
                continue;
            }
            for sign in [int(1), int(-1)] {
                let delta = tangent.scale(&(&sign * &step));
                check(
                    pair.p_stretched.add_scaled(&Rational::one(), &delta),
                    pair.q_sigma.clone(),
                    format!("facet move along axis {i}, step {sign}*2^-{j}"),
                )?;
            }
        }

        // Slide q along the line, then take the best p for it.
        for sign in [int(1), int(-1)] {
            let mut q_new = pair.q_sigma.clone();
            q_new.set(d - 1, pair.q_sigma.last() + &sign * &step);
            let p_new = if v_ell.dot(&q_new) > Rational::one() {
                project_point_to_unit_halfspace(&q_new, &v_ell)
                    .map_err(|e| QpError::InvalidProblem(e.to_string()))?
                    .0
            } else {
                q_new.clone()
            };
            check(
                p_new.clone(),
                q_new.clone(),
                format!("line move {sign}*2^-{j}"),
            )?;
            // Combined with a facet move.
            let tangent =
                RationalVector::unit(d, d - 1).add_scaled(&(-&v_ell[d - 1] / &v_norm), &v_ell);
            check(
                p_new.add_scaled(&step, &tangent),
                q_new,
                format!("line and facet move {sign}*2^-{j}"),
            )?;
        }
        step *= rat(1, 2);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{Construction, StretchFactor};

    fn construction(d: usize) -> Construction {
        let params = GoldfarbParams::with_defaults(d).unwrap();
        Construction::build(&params, &StretchFactor::from_int(20_000).unwrap()).unwrap()
    }

    #[test]
    fn certificates_for_d4() {
        let c = construction(4);
        let ell = c.stretch.ell();
        for pair in &c.pairs {
            let cert = build_kkt_certificate(pair, &c.params, ell).unwrap();
            assert!(cert.lambda_sigma().is_positive());
            assert_eq!(cert.lambdas.len(), 1);
            assert!(!cert.big_lambda.last().is_positive());
            assert_eq!(
                cert.big_lambda.last(),
                &(int(2) * (pair.p_stretched.last() - pair.q_sigma.last()))
            );
        }
    }

    #[test]
    fn perturbed_point_breaks_stationarity() {
        let c = construction(4);
        let ell = c.stretch.ell();
        let pair = &c.pairs[0];
        let cert = build_kkt_certificate(pair, &c.params, ell).unwrap();
        let mut moved = pair.clone();
        moved.p_stretched = pair
            .p_stretched
            .add_scaled(&rat(1, 1000), &RationalVector::unit(4, 0));
        let err = verify_kkt_certificate(&cert, &moved, &c.params, ell).unwrap_err();
        assert_eq!(
            err,
            QpError::CertificateInvalid {
                sigma: pair.sigma.clone(),
                equation: KktEquation::Stationarity
            }
        );
    }

    #[test]
    fn negative_multiplier_rejected() {
        let c = construction(3);
        let ell = c.stretch.ell();
        let pair = &c.pairs[0];
        // A stationary point for a negative multiplier: x' on the wrong side.
        let v_ell = scale_leading(&cube_vertex(&c.params, &pair.sigma).unwrap().coords, ell);
        let mut flipped = pair.clone();
        flipped.q_sigma = pair.p_stretched.add_scaled(&rat(-1, 2), &v_ell);
        let cert = KktCertificate {
            sigma: pair.sigma.clone(),
            lambdas: BTreeMap::from([(pair.sigma.clone(), int(-1))]),
            big_lambda: (&flipped.p_stretched - &flipped.q_sigma).scale(&int(2)),
        };
        let err = verify_kkt_certificate(&cert, &flipped, &c.params, ell).unwrap_err();
        assert_eq!(
            err,
            QpError::CertificateInvalid {
                sigma: pair.sigma.clone(),
                equation: KktEquation::MultiplierSign
            }
        );
    }

    #[test]
    fn relaxed_candidates() {
        let c = construction(4);
        let ell = c.stretch.ell();
        for pair in &c.pairs {
            assert_eq!(
                compare_relaxed_candidate(pair, &c.params, ell, &pair.p_stretched, &pair.q_sigma),
                CandidateOutcome::Equal
            );
            let v_ell = scale_leading(&cube_vertex(&c.params, &pair.sigma).unwrap().coords, ell);
            let mut q = pair.q_sigma.clone();
            q.set(3, pair.q_sigma.last() + int(1));
            let (p, _) = project_point_to_unit_halfspace(&q, &v_ell).unwrap();
            assert_eq!(
                compare_relaxed_candidate(pair, &c.params, ell, &p, &q),
                CandidateOutcome::Worse
            );
            let mut below = pair.q_sigma.clone();
            below.set(3, pair.q_sigma.last() - int(1));
            assert_eq!(
                compare_relaxed_candidate(pair, &c.params, ell, &pair.p_stretched, &below),
                CandidateOutcome::Infeasible
            );
            let report = verify_relaxed_uniqueness(pair, &c.params, ell, 6).unwrap();
            assert!(report.candidates > report.infeasible);
            assert!(report.infeasible > 0);
        }
    }
}

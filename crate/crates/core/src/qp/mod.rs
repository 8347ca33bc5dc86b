//! Reduced convex hull distance problems and their optimality certificates.
//!
//! The dual SVM with cap `μ` is
//!
//! ```text
//! minimize   | Σ_{i∈+} α_i p_i - Σ_{j∈-} α_j q_j |^2
//! subject to Σ_{i∈+} α_i = 1,  Σ_{j∈-} α_j = 1,  0 <= α <= μ
//! ```
//!
//! i.e. the squared distance between the reduced hulls `conv_μ` of the two
//! classes.

mod certificate;
mod solver;

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::exact_geometry::{Rational, RationalVector};
use crate::goldfarb::SignVector;

pub use certificate::{
    build_kkt_certificate, compare_relaxed_candidate, verify_kkt_certificate,
    verify_relaxed_uniqueness, CandidateOutcome, KktCertificate, KktEquation, RelaxedReport,
};
pub use solver::{
    kkt_check_general, solve_reduced_distance, BoxMultipliers, MAX_SOLVER_ITERATIONS,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum QpError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("solver stalled after {0} iterations")]
    SolverStalled(usize),
    #[error("infeasible candidate: {}", .0.join("; "))]
    Infeasible(Vec<String>),
    #[error("KKT certificate for {sigma} invalid: {equation} fails")]
    CertificateInvalid {
        sigma: SignVector,
        equation: KktEquation,
    },
    #[error("uniqueness violated for {sigma}: {detail}")]
    UniquenessViolated { sigma: SignVector, detail: String },
    #[error("value out of range: {0}")]
    OutOfRange(String),
}

/// Class index of a dual variable.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Plus,
    Minus,
}

/// Distance between `conv_μ(plus)` and `conv_μ(minus)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedHullQP {
    plus: Vec<RationalVector>,
    minus: Vec<RationalVector>,
    mu: Rational,
}

impl ReducedHullQP {
    /// Requires both classes nonempty, a common dimension, and
    /// `1/|class| <= μ <= 1` for both classes.
    pub fn new(
        plus: Vec<RationalVector>,
        minus: Vec<RationalVector>,
        mu: Rational,
    ) -> Result<Self, QpError> {
        if plus.is_empty() || minus.is_empty() {
            return Err(QpError::InvalidProblem(
                "both classes need at least one point".into(),
            ));
        }
        let dim = plus[0].dim();
        if plus.iter().chain(&minus).any(|p| p.dim() != dim) {
            return Err(QpError::InvalidProblem(
                "points have different dimensions".into(),
            ));
        }
        if mu > Rational::one() {
            return Err(QpError::InvalidProblem(format!("mu = {mu} exceeds 1")));
        }
        for (name, len) in [("positive", plus.len()), ("negative", minus.len())] {
            if &mu * Rational::from_integer(len.into()) < Rational::one() {
                return Err(QpError::InvalidProblem(format!(
                    "mu = {mu} is below 1/{len}; the {name} reduced hull is empty"
                )));
            }
        }
        Ok(Self { plus, minus, mu })
    }

    pub fn plus(&self) -> &[RationalVector] {
        &self.plus
    }

    pub fn minus(&self) -> &[RationalVector] {
        &self.minus
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    pub fn dim(&self) -> usize {
        self.plus[0].dim()
    }

    /// Builds the candidate pair for given coefficient vectors.
    pub fn pair_from_alphas(
        &self,
        alpha_plus: Vec<Rational>,
        alpha_minus: Vec<Rational>,
    ) -> OptimalPair {
        let p = combine(&self.plus, &alpha_plus);
        let q = combine(&self.minus, &alpha_minus);
        let objective = (&p - &q).norm_sq();
        OptimalPair {
            p,
            q,
            alpha_plus,
            alpha_minus,
            objective,
        }
    }
}

fn combine(points: &[RationalVector], alphas: &[Rational]) -> RationalVector {
    points
        .iter()
        .zip(alphas)
        .fold(RationalVector::zeros(points[0].dim()), |acc, (x, a)| {
            acc.add_scaled(a, x)
        })
}

/// A feasible pair of reduced-hull points with their coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalPair {
    pub p: RationalVector,
    pub q: RationalVector,
    pub alpha_plus: Vec<Rational>,
    pub alpha_minus: Vec<Rational>,
    /// `|p - q|^2`.
    pub objective: Rational,
}

/// Indices with strictly positive coefficient, per class.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportSet {
    pub plus: BTreeSet<usize>,
    pub minus: BTreeSet<usize>,
}

pub fn support_set(pair: &OptimalPair) -> SupportSet {
    let nonzero = |alphas: &[Rational]| {
        alphas
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_positive())
            .map(|(i, _)| i)
            .collect()
    };
    SupportSet {
        plus: nonzero(&pair.alpha_plus),
        minus: nonzero(&pair.alpha_minus),
    }
}

/// `ν = 2/(nμ)`, the ν-SVM parameter matching reduced-hull cap `μ`.
pub fn nu_from_mu(mu: &Rational, n: usize) -> Result<Rational, QpError> {
    if !mu.is_positive() || n == 0 {
        return Err(QpError::OutOfRange(format!(
            "need mu > 0 and n > 0, got mu = {mu}, n = {n}"
        )));
    }
    Ok(Rational::from_integer(2.into()) / (mu * Rational::from_integer(n.into())))
}

/// Inverse of [`nu_from_mu`]: `μ = 2/(nν)`.
pub fn mu_from_nu(nu: &Rational, n: usize) -> Result<Rational, QpError> {
    if !nu.is_positive() || n == 0 {
        return Err(QpError::OutOfRange(format!(
            "need nu > 0 and n > 0, got nu = {nu}, n = {n}"
        )));
    }
    Ok(Rational::from_integer(2.into()) / (nu * Rational::from_integer(n.into())))
}

fn sum(xs: &[Rational]) -> Rational {
    xs.iter().fold(Rational::zero(), |acc, x| acc + x)
}

//! Primal active-set method for the reduced-hull distance QP.
//!
//! The working set is the set of variables held at a bound (`0` or `μ`).
//! Each iteration minimizes the objective over the free variables subject to
//! the two class-sum equalities. Because the objective is `|Mα|^2`, that
//! subproblem reduces to projecting the current difference vector `w = Mα`
//! onto the orthogonal complement of the span of `m_j - m_pivot` (free `j`,
//! one pivot per class), which exact Gram-Schmidt handles even when the
//! Hessian `MᵀM` is singular. Constraint additions and releases break ties by
//! lowest index.

use num_traits::{One, Signed, Zero};

use super::{sum, OptimalPair, QpError, ReducedHullQP};
use crate::exact_geometry::{Rational, RationalVector};

pub const MAX_SOLVER_ITERATIONS: usize = 10_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Status {
    Lower,
    Upper,
    Free,
}

struct Layout {
    n_plus: usize,
    /// Signed points `y_i x_i`.
    signed: Vec<RationalVector>,
}

impl Layout {
    fn new(qp: &ReducedHullQP) -> Self {
        let signed = qp
            .plus
            .iter()
            .cloned()
            .chain(qp.minus.iter().map(|x| -x))
            .collect();
        Self {
            n_plus: qp.plus.len(),
            signed,
        }
    }

    fn n(&self) -> usize {
        self.signed.len()
    }

    fn class_range(&self, c: usize) -> std::ops::Range<usize> {
        if c == 0 {
            0..self.n_plus
        } else {
            self.n_plus..self.n()
        }
    }

    fn difference(&self, alpha: &[Rational]) -> RationalVector {
        let dim = self.signed[0].dim();
        self.signed
            .iter()
            .zip(alpha)
            .filter(|(_, a)| !a.is_zero())
            .fold(RationalVector::zeros(dim), |acc, (m, a)| {
                acc.add_scaled(a, m)
            })
    }

    /// `r_i = y_i x_i · w`, half the objective gradient.
    fn scores(&self, w: &RationalVector) -> Vec<Rational> {
        self.signed.iter().map(|m| m.dot(w)).collect()
    }
}

/// Variable with the most negative bound multiplier, lowest index on ties.
fn first_violation(layout: &Layout, status: &[Status], r: &[Rational]) -> Option<usize> {
    let mut found: Option<(Rational, usize)> = None;
    for c in 0..2 {
        let range = layout.class_range(c);
        let pivot = range.clone().find(|&i| status[i] == Status::Free);
        // Thresholds below which a lower-bound multiplier and above which an
        // upper-bound multiplier turn negative.
        let (lower_t, upper_t) = match pivot {
            Some(p) => (r[p].clone(), r[p].clone()),
            None => {
                let lo = range
                    .clone()
                    .filter(|&i| status[i] == Status::Upper)
                    .map(|i| &r[i])
                    .max();
                let hi = range
                    .clone()
                    .filter(|&i| status[i] == Status::Lower)
                    .map(|i| &r[i])
                    .min();
                match (lo, hi) {
                    (Some(lo), Some(hi)) if lo > hi => (lo.clone(), hi.clone()),
                    _ => continue,
                }
            }
        };
        for i in range {
            let amount = match status[i] {
                Status::Lower => &lower_t - &r[i],
                Status::Upper => &r[i] - &upper_t,
                Status::Free => continue,
            };
            if !amount.is_positive() {
                continue;
            }
            let better = match &found {
                None => true,
                Some((a, j)) => amount > *a || (amount == *a && i < *j),
            };
            if better {
                found = Some((amount, i));
            }
        }
    }
    found.map(|(_, i)| i)
}

/// Step minimizing `|w + M s|^2` over `s` supported on the free variables
/// with zero sum per class. Returns `None` when the current point is already
/// stationary on that subspace.
fn subspace_step(layout: &Layout, status: &[Status], w: &RationalVector) -> Option<Vec<Rational>> {
    let mut columns: Vec<(usize, usize, RationalVector)> = Vec::new();
    for c in 0..2 {
        let free: Vec<usize> = layout
            .class_range(c)
            .filter(|&i| status[i] == Status::Free)
            .collect();
        if let Some((&pivot, rest)) = free.split_first() {
            for &j in rest {
                columns.push((j, pivot, &layout.signed[j] - &layout.signed[pivot]));
            }
        }
    }
    if columns.is_empty() {
        return None;
    }

    // Orthogonal basis of the column span; `coef` expresses each basis
    // vector in terms of the original columns.
    let k = columns.len();
    let mut basis: Vec<(RationalVector, Rational, Vec<Rational>)> = Vec::new();
    for (t, (_, _, col)) in columns.iter().enumerate() {
        let mut o = col.clone();
        let mut coef = vec![Rational::zero(); k];
        coef[t] = Rational::one();
        for (ob, norm, cb) in &basis {
            let f = col.dot(ob) / norm;
            if f.is_zero() {
                continue;
            }
            o = o.add_scaled(&-&f, ob);
            for (x, y) in coef.iter_mut().zip(cb) {
                *x -= &f * y;
            }
        }
        if !o.is_zero() {
            let norm = o.norm_sq();
            basis.push((o, norm, coef));
        }
    }

    let mut u = vec![Rational::zero(); k];
    let mut moved = false;
    for (ob, norm, cb) in &basis {
        let f = w.dot(ob) / norm;
        if f.is_zero() {
            continue;
        }
        moved = true;
        for (x, y) in u.iter_mut().zip(cb) {
            *x -= &f * y;
        }
    }
    if !moved {
        return None;
    }
    let mut s = vec![Rational::zero(); layout.n()];
    for ((j, pivot, _), ut) in columns.iter().zip(&u) {
        s[*j] += ut;
        s[*pivot] -= ut;
    }
    Some(s)
}

/// Exact global minimizer of the reduced-hull distance problem.
///
/// When the optimum is not unique the result is one optimal vertex, chosen
/// deterministically by the lowest-index rules.
pub fn solve_reduced_distance(qp: &ReducedHullQP) -> Result<OptimalPair, QpError> {
    let layout = Layout::new(qp);
    let n = layout.n();
    let mu = qp.mu().clone();

    let mut alpha = vec![Rational::zero(); n];
    let mut status = vec![Status::Lower; n];
    for c in 0..2 {
        let mut rest = Rational::one();
        for i in layout.class_range(c) {
            if rest.is_zero() {
                break;
            }
            let take = rest.clone().min(mu.clone());
            rest -= &take;
            status[i] = if take == mu {
                Status::Upper
            } else {
                Status::Free
            };
            alpha[i] = take;
        }
    }

    for _ in 0..MAX_SOLVER_ITERATIONS {
        let w = layout.difference(&alpha);
        let Some(step) = subspace_step(&layout, &status, &w) else {
            let r = layout.scores(&w);
            match first_violation(&layout, &status, &r) {
                Some(i) => {
                    status[i] = Status::Free;
                    continue;
                }
                None => {
                    let minus = alpha.split_off(layout.n_plus);
                    return Ok(qp.pair_from_alphas(alpha, minus));
                }
            }
        };

        let mut blocking: Option<(Rational, usize)> = None;
        for (i, si) in step.iter().enumerate() {
            if si.is_zero() {
                continue;
            }
            let room = if si.is_negative() {
                &alpha[i] / -si
            } else {
                (&mu - &alpha[i]) / si
            };
            if room > Rational::one() {
                continue;
            }
            if blocking.as_ref().is_none_or(|(t, _)| &room < t) {
                blocking = Some((room, i));
            }
        }
        let t = blocking
            .as_ref()
            .map_or_else(Rational::one, |(t, _)| t.clone());
        if !t.is_zero() {
            for (a, si) in alpha.iter_mut().zip(&step) {
                if !si.is_zero() {
                    *a += &t * si;
                }
            }
        }
        if let Some((_, i)) = blocking {
            if step[i].is_negative() {
                status[i] = Status::Lower;
                alpha[i] = Rational::zero();
            } else {
                status[i] = Status::Upper;
                alpha[i] = mu.clone();
            }
        }
    }
    Err(QpError::SolverStalled(MAX_SOLVER_ITERATIONS))
}

/// Multipliers certifying optimality of a feasible `α` for the box and
/// class-sum constraints: per class a threshold `t_c` (the class-sum
/// multiplier), and per variable a lower-bound multiplier `r_i - t_c` at
/// `α_i = 0` or an upper-bound multiplier `t_c - r_i` at `α_i = μ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxMultipliers {
    pub thresholds: [Rational; 2],
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

fn feasibility_violations(qp: &ReducedHullQP, cand: &OptimalPair) -> Vec<String> {
    let mut out = Vec::new();
    let mu = qp.mu();
    for (name, alphas, len) in [
        ("positive", &cand.alpha_plus, qp.plus().len()),
        ("negative", &cand.alpha_minus, qp.minus().len()),
    ] {
        if alphas.len() != len {
            out.push(format!(
                "{name} coefficient vector has length {}, expected {len}",
                alphas.len()
            ));
            continue;
        }
        for (i, a) in alphas.iter().enumerate() {
            if a.is_negative() {
                out.push(format!("{name} alpha[{i}] = {a} < 0"));
            }
            if a > mu {
                out.push(format!("{name} alpha[{i}] = {a} > mu = {mu}"));
            }
        }
        if !sum(alphas).is_one() {
            out.push(format!("{name} coefficients sum to {}", sum(alphas)));
        }
    }
    if out.is_empty() {
        let rebuilt = qp.pair_from_alphas(cand.alpha_plus.clone(), cand.alpha_minus.clone());
        if rebuilt.p != cand.p {
            out.push("p is not the combination of its coefficients".into());
        }
        if rebuilt.q != cand.q {
            out.push("q is not the combination of its coefficients".into());
        }
        if rebuilt.objective != cand.objective {
            out.push("objective does not equal |p - q|^2".into());
        }
    }
    out
}

impl BoxMultipliers {
    /// Solves the stationarity conditions for a feasible candidate. `None`
    /// when no nonnegative multipliers exist, i.e. the candidate is not
    /// optimal.
    pub fn compute(qp: &ReducedHullQP, cand: &OptimalPair) -> Result<Option<Self>, QpError> {
        let violations = feasibility_violations(qp, cand);
        if !violations.is_empty() {
            return Err(QpError::Infeasible(violations));
        }
        let layout = Layout::new(qp);
        let alpha: Vec<Rational> = cand
            .alpha_plus
            .iter()
            .chain(&cand.alpha_minus)
            .cloned()
            .collect();
        let r = layout.scores(&(&cand.p - &cand.q));
        let mu = qp.mu();

        let mut thresholds: Vec<Rational> = Vec::with_capacity(2);
        for c in 0..2 {
            let range = layout.class_range(c);
            let free = range
                .clone()
                .find(|&i| alpha[i].is_positive() && &alpha[i] < mu);
            let t = match free {
                Some(i) => r[i].clone(),
                None => range
                    .clone()
                    .filter(|&i| &alpha[i] == mu)
                    .map(|i| r[i].clone())
                    .max()
                    .or_else(|| {
                        range
                            .filter(|&i| alpha[i].is_zero())
                            .map(|i| r[i].clone())
                            .min()
                    })
                    .expect("class is nonempty"),
            };
            thresholds.push(t);
        }

        let mut lower = vec![Rational::zero(); alpha.len()];
        let mut upper = vec![Rational::zero(); alpha.len()];
        for (i, a) in alpha.iter().enumerate() {
            let c = usize::from(i >= layout.n_plus);
            let t = &thresholds[c];
            if a.is_zero() {
                lower[i] = &r[i] - t;
            } else if a == mu {
                upper[i] = t - &r[i];
            }
            // Stationarity r_i - t_c - lower_i + upper_i = 0 must hold exactly.
            if &r[i] - t - &lower[i] + &upper[i] != Rational::zero()
                || lower[i].is_negative()
                || upper[i].is_negative()
            {
                return Ok(None);
            }
        }
        let [t0, t1]: [Rational; 2] = thresholds.try_into().expect("two classes");
        Ok(Some(Self {
            thresholds: [t0, t1],
            lower,
            upper,
        }))
    }
}

/// True iff exact nonnegative multipliers certify `cand` as a global
/// optimum. Infeasible candidates are an error listing every violation.
pub fn kkt_check_general(qp: &ReducedHullQP, cand: &OptimalPair) -> Result<bool, QpError> {
    Ok(BoxMultipliers::compute(qp, cand)?.is_some())
}

//! Acceptance suite. Runs without the libtest harness so that the verdict
//! line of every criterion is printed even when all of them pass.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svmpath_core::construct::{
    choose_stretch, generate_2d_arc_instance, mu_of_q, reduced_hull_segment, scale_leading,
    stretch, Construction, StretchFactor,
};
use svmpath_core::exact_geometry::{int, is_strictly_convex, rat, Rational, RationalVector};
use svmpath_core::goldfarb::{
    cube_vertices, dual_vertices, FacetLabel, GoldfarbParams, Shadow, SignVector,
};
use svmpath_core::qp::{
    build_kkt_certificate, solve_reduced_distance, verify_kkt_certificate, ReducedHullQP,
};
use svmpath_core::sweep::{sweep_constructed, sweep_grid_refined};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn defaults(d: usize) -> GoldfarbParams {
    GoldfarbParams::with_defaults(d).unwrap()
}

fn build(d: usize, stretch: &StretchFactor) -> Construction {
    Construction::build(&defaults(d), stretch).unwrap()
}

fn support_set_count() -> Outcome {
    let mut notes = Vec::new();
    for d in 3..=8 {
        let start = Instant::now();
        let params = defaults(d);
        let l = choose_stretch(&params).map_err(|e| e.to_string())?;
        ensure(l.l() == &int(20_000), || {
            format!("d={d}: stretch {} instead of 20000", l.l())
        })?;
        let c = Construction::build(&params, &l).map_err(|e| e.to_string())?;
        let report = sweep_constructed(&c.instance, &c.pairs, &c.decomps)
            .map_err(|e| format!("d={d}: {e}"))?;
        let expected = 1usize << (d - 2);
        ensure(report.distinct_support_sets == expected, || {
            format!(
                "d={d}: {} distinct sets, expected {expected}",
                report.distinct_support_sets
            )
        })?;
        ensure(
            report.records.iter().all(|r| r.support.plus.len() == d),
            || format!("d={d}: a support set is not of size d"),
        )?;
        notes.push(format!(
            "d={d}: {expected} in {:.1}s",
            start.elapsed().as_secs_f64()
        ));
    }
    Ok(notes.join(", "))
}

fn grid_bends() -> Outcome {
    let mut notes = Vec::new();
    let l = StretchFactor::from_int(20_000).unwrap();
    for d in 3..=8 {
        let c = build(d, &l);
        let report = sweep_grid_refined(&c.instance, &rat(8, 10), &int(1), 512, 6)
            .map_err(|e| e.to_string())?;
        let bound = 1usize << (d - 2);
        ensure(report.bend_count > bound, || {
            format!("d={d}: {} bends, bound {bound}", report.bend_count)
        })?;
        notes.push(format!("d={d}: {} > {bound}", report.bend_count));
    }
    Ok(notes.join(", "))
}

fn shadow_vertices() -> Outcome {
    for d in 2..=12 {
        let shadow = Shadow::new(&defaults(d)).map_err(|e| e.to_string())?;
        ensure(shadow.vertex_count() == 1 << d, || {
            format!("d={d}: {} hull vertices", shadow.vertex_count())
        })?;
        ensure(is_strictly_convex(shadow.polygon()), || {
            format!("d={d}: hull not strictly convex")
        })?;
    }
    Ok("2^d hull vertices for d=2..12 (256 at d=8)".into())
}

fn kkt_certificates() -> Outcome {
    let l = StretchFactor::from_int(20_000).unwrap();
    let mut total = 0;
    for d in 2..=8 {
        let c = build(d, &l);
        for pair in &c.pairs {
            let cert = build_kkt_certificate(pair, &c.params, l.ell())
                .map_err(|e| format!("d={d}: {e}"))?;
            verify_kkt_certificate(&cert, pair, &c.params, l.ell()).map_err(|e| e.to_string())?;
            ensure(cert.lambda_sigma().is_positive(), || {
                format!("d={d} {}: lambda_sigma <= 0", pair.sigma)
            })?;
            ensure(!cert.big_lambda.last().is_positive(), || {
                format!("d={d} {}: Lambda_d > 0", pair.sigma)
            })?;
            total += 1;
        }
    }
    Ok(format!("{total} certificates for d=2..8"))
}

/// Row reduction of `[a | b]`; a particular solution with free columns at
/// zero, or `None` when inconsistent.
fn rref_solve(mut rows: Vec<Vec<Rational>>, cols: usize) -> Option<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][cols].clone();
    }
    Some(x)
}

/// Minimum over every assignment of each variable to `0`, `μ` or free of
/// the face-stationary point, when feasible.
fn enumeration_optimum(
    plus: &[RationalVector],
    minus: &[RationalVector],
    mu: &Rational,
) -> Rational {
    let signed: Vec<RationalVector> = plus
        .iter()
        .cloned()
        .chain(minus.iter().map(|m| -m))
        .collect();
    let class: Vec<usize> = (0..signed.len())
        .map(|i| usize::from(i >= plus.len()))
        .collect();
    let n = signed.len();
    let mut best: Option<Rational> = None;
    for code in 0..3usize.pow(n as u32) {
        let pattern: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        let free: Vec<usize> = (0..n).filter(|&i| pattern[i] == 2).collect();
        let fixed = |i: usize| {
            if pattern[i] == 1 {
                mu.clone()
            } else {
                Rational::zero()
            }
        };
        // Unknowns: alpha over `free`, then one threshold per class.
        let cols = free.len() + 2;
        let mut rows = Vec::new();
        for &i in &free {
            let mut row = vec![Rational::zero(); cols + 1];
            for (k, &j) in free.iter().enumerate() {
                row[k] = signed[i].dot(&signed[j]);
            }
            row[free.len() + class[i]] = -Rational::one();
            row[cols] = -(0..n)
                .filter(|j| pattern[*j] == 1)
                .map(|j| signed[i].dot(&signed[j]) * mu)
                .fold(Rational::zero(), |a, b| a + b);
            rows.push(row);
        }
        for c in 0..2 {
            let mut row = vec![Rational::zero(); cols + 1];
            for (k, &j) in free.iter().enumerate() {
                if class[j] == c {
                    row[k] = Rational::one();
                }
            }
            row[cols] = Rational::one()
                - (0..n)
                    .filter(|j| class[*j] == c)
                    .map(fixed)
                    .fold(Rational::zero(), |a, b| a + b);
            rows.push(row);
        }
        let Some(sol) = rref_solve(rows, cols) else {
            continue;
        };
        let mut alpha: Vec<Rational> = (0..n).map(fixed).collect();
        for (k, &i) in free.iter().enumerate() {
            alpha[i] = sol[k].clone();
        }
        if alpha.iter().any(|a| a.is_negative() || a > mu) {
            continue;
        }
        let w = signed
            .iter()
            .zip(&alpha)
            .fold(RationalVector::zeros(signed[0].dim()), |acc, (m, a)| {
                acc.add_scaled(a, m)
            });
        let value = w.norm_sq();
        if best.as_ref().is_none_or(|b| &value < b) {
            best = Some(value);
        }
    }
    best.expect("the feasible set is nonempty")
}

fn solver_oracle() -> Outcome {
    let segments = enumeration_optimum(
        &[
            RationalVector::from_ints(&[0, 1]),
            RationalVector::from_ints(&[2, 1]),
        ],
        &[
            RationalVector::from_ints(&[0, 0]),
            RationalVector::from_ints(&[2, 0]),
        ],
        &int(1),
    );
    ensure(segments.is_one(), || {
        format!("enumeration gives {segments} on parallel segments")
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mus = [rat(1, 2), rat(2, 3), int(1)];
    let point = |rng: &mut ChaCha8Rng, dim: usize| {
        RationalVector::new(
            (0..dim)
                .map(|_| rat(rng.random_range(-6..=6), rng.random_range(1..=2)))
                .collect(),
        )
    };
    for case in 0..200 {
        let mu = mus[case % 3].clone();
        let min_size = if mu.is_one() { 1 } else { 2 };
        let dim = rng.random_range(1..=3);
        let n_plus = rng.random_range(min_size..=3);
        let n_minus = rng.random_range(min_size..=3);
        let plus: Vec<_> = (0..n_plus).map(|_| point(&mut rng, dim)).collect();
        let minus: Vec<_> = (0..n_minus).map(|_| point(&mut rng, dim)).collect();
        let qp = ReducedHullQP::new(plus.clone(), minus.clone(), mu.clone()).unwrap();
        let solved = solve_reduced_distance(&qp).map_err(|e| format!("case {case}: {e}"))?;
        let oracle = enumeration_optimum(&plus, &minus, &mu);
        ensure(solved.objective == oracle, || {
            format!(
                "case {case}: solver {} vs enumeration {oracle}",
                solved.objective
            )
        })?;
    }
    Ok("200 instances agree exactly".into())
}

fn construction_invariants() -> Outcome {
    let l = StretchFactor::from_int(20_000).unwrap();
    for d in 2..=8 {
        let params = defaults(d);
        let duals = dual_vertices(&params).map_err(|e| e.to_string())?;
        for v in cube_vertices(&params) {
            for k in 1..=d {
                let sign = if v.coords[k - 1].is_positive() { 1 } else { -1 };
                ensure(!v.coords[k - 1].is_zero() && sign == v.sigma.get(k), || {
                    format!("d={d}: sign of v_{}", v.sigma)
                })?;
            }
            for w in &duals {
                let on_facet = v.sigma.get(w.label.k) == w.label.s;
                let value = w.coords.dot(&v.coords);
                ensure(
                    if on_facet {
                        value.is_one()
                    } else {
                        value < Rational::one()
                    },
                    || format!("d={d}: incidence of w{} and v{}", w.label, v.sigma),
                )?;
                let stretched = scale_leading(&w.coords, l.ell()).dot(&stretch(&v.coords, &l));
                ensure(stretched == value, || {
                    format!("d={d}: stretching changed w{} . v{}", w.label, v.sigma)
                })?;
            }
        }

        let c = build(d, &l);
        let cal = &c.calibration;
        for (pair, dec) in c.pairs.iter().zip(&c.decomps) {
            let q = &pair.q_sigma;
            ensure(
                q.coords()[..d - 2].iter().all(Zero::is_zero) && q[d - 2] == int(2),
                || format!("d={d} {}: q off the line", pair.sigma),
            )?;
            ensure(pair.c.is_negative(), || {
                format!("d={d} {}: C >= 0", pair.sigma)
            })?;
            ensure(dec.alphas.iter().all(Signed::is_positive), || {
                format!("d={d} {}: alpha <= 0", pair.sigma)
            })?;
            ensure(
                dec.alphas
                    .iter()
                    .fold(Rational::zero(), |a, b| a + b)
                    .is_one(),
                || format!("d={d} {}: sum alpha != 1", pair.sigma),
            )?;
            let rebuilt = (1..=d)
                .zip(&dec.alphas)
                .fold(RationalVector::zeros(d), |acc, (k, a)| {
                    acc.add_scaled(
                        a,
                        &c.instance.plus_points[FacetLabel {
                            k,
                            s: pair.sigma.get(k),
                        }
                        .index()],
                    )
                });
            ensure(rebuilt == pair.p_stretched, || {
                format!("d={d} {}: decomposition does not rebuild p", pair.sigma)
            })?;
            let mu = mu_of_q(q.last(), cal).map_err(|e| e.to_string())?;
            let (left, right) =
                reduced_hull_segment(&cal.u_left, &cal.u_right, &mu).map_err(|e| e.to_string())?;
            ensure(
                &left == q && right == &(&cal.u_left + &cal.u_right) - q,
                || format!("d={d} {}: segment endpoints", pair.sigma),
            )?;
        }
        ensure(mu_of_q(&cal.q_min, cal).unwrap().is_one(), || {
            format!("d={d}: mu(q_min) != 1")
        })?;
        ensure(mu_of_q(&cal.q_max, cal).unwrap() == cal.mu_bar, || {
            format!("d={d}: mu(q_max) != mu_bar")
        })?;
        let distinct: BTreeSet<_> = c.pairs.iter().map(|p| &p.q_sigma).collect();
        ensure(distinct.len() == c.pairs.len(), || {
            format!("d={d}: repeated q_sigma")
        })?;
    }
    ensure(SignVector::admissible(8).count() == 64, || {
        "admissible count".into()
    })?;
    Ok("all checks exhaustive for d=2..8".into())
}

fn arc_demo() -> Outcome {
    let inst = generate_2d_arc_instance(20).map_err(|e| e.to_string())?;
    let report =
        sweep_grid_refined(&inst, &rat(501, 1000), &int(1), 512, 6).map_err(|e| e.to_string())?;
    ensure(report.bend_count >= 34, || {
        format!("{} changes, need 34", report.bend_count)
    })?;
    Ok(format!("{} changes >= 34", report.bend_count))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 support-set count", support_set_count),
        ("2 grid bends", grid_bends),
        ("3 shadow vertices", shadow_vertices),
        ("4 KKT certificates", kkt_certificates),
        ("5 solver vs enumeration", solver_oracle),
        ("6 construction invariants", construction_invariants),
        ("7 arc demo", arc_demo),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("criterion {name}: PASS ({note}) [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why}) [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

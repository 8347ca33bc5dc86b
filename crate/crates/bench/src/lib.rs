//! Fixtures shared by the benchmarks.

use svmpath_core::construct::{Construction, StretchFactor};
use svmpath_core::qp::ReducedHullQP;
use svmpath_core::GoldfarbParams;

pub fn params(d: usize) -> GoldfarbParams {
    GoldfarbParams::with_defaults(d).expect("default parameters are valid")
}

pub fn stretch() -> StretchFactor {
    StretchFactor::from_int(20_000).expect("positive")
}

pub fn construction(d: usize) -> Construction {
    Construction::build(&params(d), &stretch()).expect("defaults build for d >= 2")
}

/// The reduced-hull problem at the first constructed breakpoint.
pub fn breakpoint_problem(c: &Construction) -> ReducedHullQP {
    let mu = c.breakpoints()[0].clone();
    ReducedHullQP::new(
        c.instance.plus_points.clone(),
        c.instance.minus_points.clone(),
        mu,
    )
    .expect("breakpoints lie in [1/2, 1]")
}

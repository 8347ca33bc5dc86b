//! Exact rational scalars, vectors, inequalities, linear solves and planar
//! convex hulls. Nothing in here rounds.

mod hull;
mod linalg;
mod polytope;
mod rational;
mod vector;

pub use hull::{convex_hull_2d, is_strictly_convex, orientation, Polygon2};
pub use linalg::{solve_linear_system, RationalMatrix};
pub use polytope::{
    normalize_halfspace, project_point_to_unit_halfspace, HPolytope, HalfSpace, Membership,
};
pub use rational::{
    format_rational, int, is_normalized, parse_rational, rat, to_decimal, to_f64, to_significant,
    Rational,
};
pub use vector::RationalVector;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("normal vector is zero")]
    ZeroNormal,
    #[error("origin is not strictly inside the halfspace; cannot normalize to rhs 1")]
    OriginNotInterior,
    #[error("all points are collinear; hull is degenerate")]
    DegenerateHull,
    #[error("polytope needs a positive dimension and at least one halfspace")]
    EmptyPolytope,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

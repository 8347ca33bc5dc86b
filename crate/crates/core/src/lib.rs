//! Exact construction and certification of SVM instances whose
//! regularization path visits exponentially many support-vector sets.
//!
//! The pipeline: build a Goldfarb cube ([`goldfarb`]), take its polar dual
//! stretched away from the plane of the last two axes as the positive class,
//! place two negative points on a line in that plane ([`construct`]), then
//! certify every breakpoint with KKT multipliers and an exact reduced-hull
//! distance solver ([`qp`]), and count support-set changes along a grid of
//! regularization values ([`sweep`]). Everything is exact rational
//! arithmetic.

pub mod construct;
pub mod exact_geometry;
pub mod goldfarb;
pub mod io;
pub mod qp;
pub mod sweep;
pub mod verify;

pub use construct::{Construction, StretchFactor, SvmInstance};
pub use exact_geometry::{Rational, RationalVector};
pub use goldfarb::{GoldfarbParams, SignVector};
pub use qp::{OptimalPair, ReducedHullQP, SupportSet};

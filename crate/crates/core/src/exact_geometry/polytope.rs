use num_traits::{One, Signed, Zero};

use super::{GeometryError, Rational, RationalVector};

/// The inequality `normal · x <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfSpace {
    normal: RationalVector,
    rhs: Rational,
}

impl HalfSpace {
    pub fn new(normal: RationalVector, rhs: Rational) -> Result<Self, GeometryError> {
        if normal.is_zero() {
            return Err(GeometryError::ZeroNormal);
        }
        Ok(Self { normal, rhs })
    }

    pub fn normal(&self) -> &RationalVector {
        &self.normal
    }

    pub fn rhs(&self) -> &Rational {
        &self.rhs
    }

    /// `rhs - normal · x`; non-negative iff `x` satisfies the inequality.
    pub fn slack(&self, x: &RationalVector) -> Rational {
        &self.rhs - self.normal.dot(x)
    }
}

/// Rescales `a · x <= b` with `b > 0` to `(a / b) · x <= 1`.
///
/// This is the inequality form in which polar duality reads off a vertex of
/// the dual polytope: the returned normal *is* that vertex.
pub fn normalize_halfspace(h: &HalfSpace) -> Result<HalfSpace, GeometryError> {
    if !h.rhs.is_positive() {
        return Err(GeometryError::OriginNotInterior);
    }
    let inv = h.rhs.recip();
    Ok(HalfSpace {
        normal: h.normal.scale(&inv),
        rhs: Rational::one(),
    })
}

/// Orthogonal projection of `q` onto the hyperplane `a · x = 1`.
///
/// Returns `(p, c)` with `c = 1 - a · q` and `p = q + c a / |a|^2`.
pub fn project_point_to_unit_halfspace(
    q: &RationalVector,
    a: &RationalVector,
) -> Result<(RationalVector, Rational), GeometryError> {
    if a.is_zero() {
        return Err(GeometryError::ZeroNormal);
    }
    if a.dim() != q.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: a.dim(),
            found: q.dim(),
        });
    }
    let c = Rational::one() - a.dot(q);
    let p = q.add_scaled(&(&c / a.norm_sq()), a);
    Ok((p, c))
}

/// A polytope given by a finite list of inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
}

/// Outcome of a membership test: overall containment plus, for every
/// inequality in order, whether it holds with equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub inside: bool,
    pub tight: Vec<bool>,
}

impl Membership {
    pub fn tight_count(&self) -> usize {
        self.tight.iter().filter(|&&t| t).count()
    }

    pub fn tight_indices(&self) -> Vec<usize> {
        self.tight
            .iter()
            .enumerate()
            .filter_map(|(i, &t)| t.then_some(i))
            .collect()
    }
}

impl HPolytope {
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self, GeometryError> {
        if dim == 0 || halfspaces.is_empty() {
            return Err(GeometryError::EmptyPolytope);
        }
        if let Some(h) = halfspaces.iter().find(|h| h.normal.dim() != dim) {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                found: h.normal.dim(),
            });
        }
        Ok(Self { dim, halfspaces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn contains(&self, x: &RationalVector) -> Membership {
        assert_eq!(x.dim(), self.dim, "dimension mismatch");
        let mut inside = true;
        let tight = self
            .halfspaces
            .iter()
            .map(|h| {
                let slack = h.slack(x);
                if slack.is_negative() {
                    inside = false;
                }
                slack.is_zero()
            })
            .collect();
        Membership { inside, tight }
    }
}

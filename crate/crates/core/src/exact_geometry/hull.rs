use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::{GeometryError, Rational, RationalVector};

/// A strictly convex polygon with vertices in counterclockwise order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon2 {
    vertices: Vec<RationalVector>,
}

impl Polygon2 {
    pub fn vertices(&self) -> &[RationalVector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Cyclic neighbours `(previous, next)` of vertex `i`.
    pub fn neighbours(&self, i: usize) -> (&RationalVector, &RationalVector) {
        let n = self.vertices.len();
        (&self.vertices[(i + n - 1) % n], &self.vertices[(i + 1) % n])
    }

    /// True when `p` lies inside or on the boundary.
    pub fn contains(&self, p: &RationalVector) -> bool {
        let n = self.vertices.len();
        (0..n)
            .all(|i| !orientation(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_negative())
    }
}

/// Twice the signed area of the triangle `a, b, c`: positive for a left turn.
pub fn orientation(a: &RationalVector, b: &RationalVector, c: &RationalVector) -> Rational {
    (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0])
}

fn lex(a: &RationalVector, b: &RationalVector) -> Ordering {
    a[0].cmp(&b[0]).then_with(|| a[1].cmp(&b[1]))
}

/// Andrew's monotone chain with exact orientation signs. Interior points and
/// points in the relative interior of hull edges are dropped.
pub fn convex_hull_2d(points: &[RationalVector]) -> Result<Polygon2, GeometryError> {
    if let Some(p) = points.iter().find(|p| p.dim() != 2) {
        return Err(GeometryError::DimensionMismatch {
            expected: 2,
            found: p.dim(),
        });
    }
    let mut pts: Vec<&RationalVector> = points.iter().collect();
    pts.sort_by(|a, b| lex(a, b));
    pts.dedup();
    if pts.len() < 3 {
        return Err(GeometryError::DegenerateHull);
    }

    let mut lower: Vec<&RationalVector> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && !orientation(lower[lower.len() - 2], lower[lower.len() - 1], p).is_positive()
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<&RationalVector> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && !orientation(upper[upper.len() - 2], upper[upper.len() - 1], p).is_positive()
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(GeometryError::DegenerateHull);
    }
    Ok(Polygon2 {
        vertices: lower.into_iter().cloned().collect(),
    })
}

/// Checks the polygon invariants: every consecutive triple turns strictly
/// left and no vertex repeats.
pub fn is_strictly_convex(poly: &Polygon2) -> bool {
    let v = poly.vertices();
    let n = v.len();
    n >= 3
        && (0..n).all(|i| orientation(&v[i], &v[(i + 1) % n], &v[(i + 2) % n]).is_positive())
        && (0..n).all(|i| !(&v[i] - &v[(i + 1) % n]).coords().iter().all(Zero::is_zero))
}

//! The Goldfarb cube, its vertices, its polar dual, and shadow certificates.
//!
//! The cube is a perturbed `[-1, 1]^d` with `2d` facets whose projection onto
//! the last two coordinates (the shadow) keeps all `2^d` vertices on its
//! boundary. Facets and vertices are both indexed by sign data: facet `(k, s)`
//! is the right (`s = +1`) or left (`s = -1`) inequality of pair `k`, and
//! vertex `σ` is the intersection of the facets `(k, σ_k)`.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::exact_geometry::{
    convex_hull_2d, normalize_halfspace, rat, GeometryError, HPolytope, HalfSpace, Polygon2,
    Rational, RationalVector,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GoldfarbError {
    #[error("invalid Goldfarb parameters: {0}")]
    InvalidParams(String),
    #[error("sign vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("sign vector entries must be -1 or +1")]
    BadSign,
    #[error("operation needs d >= 2, got d = {0}")]
    DimensionTooSmall(usize),
    #[error("shadow property violated: projection of v_{0} is not a vertex of the shadow")]
    ShadowPropertyViolated(SignVector),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Dimension and perturbation parameters, validated so that
/// `0 < 4 gamma < eps < 1/2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GoldfarbParams {
    d: usize,
    eps: Rational,
    gamma: Rational,
}

impl GoldfarbParams {
    pub fn new(d: usize, eps: Rational, gamma: Rational) -> Result<Self, GoldfarbError> {
        if d == 0 {
            return Err(GoldfarbError::InvalidParams(
                "dimension d must be at least 1".into(),
            ));
        }
        if !gamma.is_positive() {
            return Err(GoldfarbError::InvalidParams(
                "0 < 4*gamma is violated".into(),
            ));
        }
        if Rational::from_integer(4.into()) * &gamma >= eps {
            return Err(GoldfarbError::InvalidParams(
                "4*gamma < eps is violated".into(),
            ));
        }
        if eps >= rat(1, 2) {
            return Err(GoldfarbError::InvalidParams("eps < 1/2 is violated".into()));
        }
        Ok(Self { d, eps, gamma })
    }

    /// `eps = 1/3`, `gamma = 1/16`.
    pub fn with_defaults(d: usize) -> Result<Self, GoldfarbError> {
        Self::new(d, rat(1, 3), rat(1, 16))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    /// The constant term `1 - eps + eps*gamma` of the pair-`k` bound, `k >= 3`.
    fn deep_offset(&self) -> Rational {
        Rational::one() - &self.eps + &self.eps * &self.gamma
    }
}

/// An element of `{-1, +1}^d`. Ordered lexicographically with `-1 < +1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self, GoldfarbError> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(GoldfarbError::BadSign);
        }
        Ok(Self(signs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    /// Entry `k`, 1-based to match facet-pair numbering.
    pub fn get(&self, k: usize) -> i8 {
        self.0[k - 1]
    }

    /// Copy with entry `k` (1-based) negated.
    pub fn flipped(&self, k: usize) -> Self {
        let mut s = self.0.clone();
        s[k - 1] = -s[k - 1];
        Self(s)
    }

    /// The index of this vector in [`SignVector::all`] order.
    pub fn rank(&self) -> usize {
        self.0
            .iter()
            .fold(0, |acc, &s| 2 * acc + usize::from(s == 1))
    }

    fn from_rank(d: usize, rank: usize) -> Self {
        Self(
            (0..d)
                .map(|i| if rank >> (d - 1 - i) & 1 == 1 { 1 } else { -1 })
                .collect(),
        )
    }

    /// All `2^d` sign vectors in lexicographic order.
    pub fn all(d: usize) -> impl ExactSizeIterator<Item = SignVector> + Clone {
        (0..1usize << d).map(move |r| Self::from_rank(d, r))
    }

    /// The `2^d / 4` vectors with `σ_{d-1} = σ_d = +1`, in lexicographic order.
    pub fn admissible(d: usize) -> impl ExactSizeIterator<Item = SignVector> + Clone {
        assert!(d >= 2, "admissible sign vectors need d >= 2");
        (0..1usize << (d - 2)).map(move |r| Self::from_rank(d, 4 * r + 3))
    }

    pub fn is_admissible(&self) -> bool {
        let n = self.0.len();
        n >= 2 && self.0[n - 2] == 1 && self.0[n - 1] == 1
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *s == 1 { "+" } else { "-" })?;
        }
        f.write_str(")")
    }
}

/// Facet `(k, s)` of the cube; equivalently vertex `w_(k,s)` of its dual.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FacetLabel {
    /// 1-based pair index.
    pub k: usize,
    pub s: i8,
}

impl FacetLabel {
    /// Position of this facet in [`build_goldfarb`] output and in
    /// [`dual_vertices`] output.
    pub fn index(self) -> usize {
        2 * (self.k - 1) + usize::from(self.s == 1)
    }

    pub fn from_index(i: usize) -> Self {
        Self {
            k: i / 2 + 1,
            s: if i % 2 == 1 { 1 } else { -1 },
        }
    }
}

impl fmt::Display for FacetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, if self.s == 1 { "+" } else { "-" })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeVertex {
    pub sigma: SignVector,
    pub coords: RationalVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualVertex {
    pub label: FacetLabel,
    pub coords: RationalVector,
}

/// A point `a` of the plane spanned by the last two axes whose inequality
/// `a · x <= 1` touches the cube exactly at `v_σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowCertificate {
    pub sigma: SignVector,
    pub a: RationalVector,
}

fn check_sigma(params: &GoldfarbParams, sigma: &SignVector) -> Result<(), GoldfarbError> {
    if sigma.len() != params.d {
        return Err(GoldfarbError::LengthMismatch {
            expected: params.d,
            found: sigma.len(),
        });
    }
    Ok(())
}

/// Coefficients and constant of the right inequality `x_k <= z_k` of pair
/// `k`, rearranged to `coef · x <= rhs`.
fn right_inequality(params: &GoldfarbParams, k: usize) -> (RationalVector, Rational) {
    let d = params.d;
    let mut normal = RationalVector::unit(d, k - 1);
    let rhs = match k {
        1 => Rational::one(),
        2 => {
            normal.set(0, params.eps.clone());
            Rational::one() - &params.eps
        }
        _ => {
            normal.set(k - 2, params.eps.clone());
            normal.set(k - 3, -(&params.eps * &params.gamma));
            params.deep_offset()
        }
    };
    (normal, rhs)
}

/// The `2d` facet inequalities, ordered `(1,-), (1,+), (2,-), (2,+), ...`
/// (see [`FacetLabel::index`]).
pub fn build_goldfarb(params: &GoldfarbParams) -> HPolytope {
    let halfspaces = (1..=params.d)
        .flat_map(|k| {
            let (normal, rhs) = right_inequality(params, k);
            // -z_k <= x_k only flips the x_k coefficient.
            let mut left_normal = normal.clone();
            left_normal.set(k - 1, -Rational::one());
            let left = HalfSpace::new(left_normal, rhs.clone()).expect("nonzero normal");
            let right = HalfSpace::new(normal, rhs).expect("nonzero normal");
            [left, right]
        })
        .collect();
    HPolytope::new(params.d, halfspaces).expect("valid cube")
}

/// `v_σ`: each coordinate sits on the `σ_k` side of its pair.
pub fn cube_vertex(
    params: &GoldfarbParams,
    sigma: &SignVector,
) -> Result<CubeVertex, GoldfarbError> {
    check_sigma(params, sigma)?;
    let mut x: Vec<Rational> = Vec::with_capacity(params.d);
    for k in 1..=params.d {
        let z = match k {
            1 => Rational::one(),
            2 => Rational::one() - &params.eps - &params.eps * &x[0],
            _ => params.deep_offset() - &params.eps * (&x[k - 2] - &params.gamma * &x[k - 3]),
        };
        x.push(if sigma.get(k) == 1 { z } else { -z });
    }
    Ok(CubeVertex {
        sigma: sigma.clone(),
        coords: RationalVector::new(x),
    })
}

/// All `2^d` vertices in lexicographic `σ` order.
pub fn cube_vertices(params: &GoldfarbParams) -> impl Iterator<Item = CubeVertex> + '_ {
    SignVector::all(params.d).map(move |s| cube_vertex(params, &s).expect("length matches"))
}

/// The `2d` vertices `w_(k,s)` of the polar dual, in [`FacetLabel::index`]
/// order.
pub fn dual_vertices(params: &GoldfarbParams) -> Result<Vec<DualVertex>, GoldfarbError> {
    build_goldfarb(params)
        .halfspaces()
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let n = normalize_halfspace(h)?;
            Ok(DualVertex {
                label: FacetLabel::from_index(i),
                coords: n.normal().clone(),
            })
        })
        .collect()
}

/// Projection onto the last two coordinates.
pub fn project_to_shadow(x: &RationalVector) -> RationalVector {
    let d = x.dim();
    RationalVector::new(vec![x[d - 2].clone(), x[d - 1].clone()])
}

/// The shadow polygon of the cube together with a lookup from projected
/// vertex to hull position.
#[derive(Clone, Debug)]
pub struct Shadow {
    params: GoldfarbParams,
    hull: Polygon2,
    position: HashMap<RationalVector, usize>,
}

impl Shadow {
    pub fn new(params: &GoldfarbParams) -> Result<Self, GoldfarbError> {
        if params.d < 2 {
            return Err(GoldfarbError::DimensionTooSmall(params.d));
        }
        let projected: Vec<RationalVector> = cube_vertices(params)
            .map(|v| project_to_shadow(&v.coords))
            .collect();
        let hull = convex_hull_2d(&projected)?;
        let position = hull
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Ok(Self {
            params: params.clone(),
            hull,
            position,
        })
    }

    pub fn polygon(&self) -> &Polygon2 {
        &self.hull
    }

    pub fn vertex_count(&self) -> usize {
        self.hull.len()
    }

    /// Supporting inequality at `π(v_σ)`: the sum of the two adjacent edge
    /// outer normals, each scaled to unit 1-norm, lifted into the plane of
    /// the last two axes and scaled so that `a · v_σ = 1`.
    pub fn certificate(&self, sigma: &SignVector) -> Result<ShadowCertificate, GoldfarbError> {
        let v = cube_vertex(&self.params, sigma)?;
        let pv = project_to_shadow(&v.coords);
        let &i = self
            .position
            .get(&pv)
            .ok_or_else(|| GoldfarbError::ShadowPropertyViolated(sigma.clone()))?;
        let (prev, next) = self.hull.neighbours(i);
        let n1 = outer_normal(prev, &pv);
        let n2 = outer_normal(&pv, next);
        let n = n1
            .scale(&l1_norm(&n1).recip())
            .add_scaled(&l1_norm(&n2).recip(), &n2);
        let support = n.dot(&pv);
        // The origin is interior to the shadow, so a supporting value is positive.
        debug_assert!(support.is_positive());
        let scale = support.recip();
        let d = self.params.d;
        let mut a = RationalVector::zeros(d);
        a.set(d - 2, &n[0] * &scale);
        a.set(d - 1, &n[1] * &scale);
        Ok(ShadowCertificate {
            sigma: sigma.clone(),
            a,
        })
    }
}

/// Outer normal of the counterclockwise edge `from -> to`.
fn outer_normal(from: &RationalVector, to: &RationalVector) -> RationalVector {
    RationalVector::new(vec![&to[1] - &from[1], &from[0] - &to[0]])
}

fn l1_norm(v: &RationalVector) -> Rational {
    v.coords()
        .iter()
        .fold(Rational::zero(), |acc, x| acc + x.abs())
}

/// One-off certificate; builds the shadow internally. Use [`Shadow`] when
/// certifying many sign vectors.
pub fn shadow_certificate(
    params: &GoldfarbParams,
    sigma: &SignVector,
) -> Result<ShadowCertificate, GoldfarbError> {
    check_sigma(params, sigma)?;
    Shadow::new(params)?.certificate(sigma)
}

impl ShadowCertificate {
    /// Exhaustive check: `a` lies in the plane of the last two axes,
    /// `a · v_σ = 1` and `a · v_τ < 1` for every other `τ`.
    pub fn is_valid(&self, params: &GoldfarbParams) -> bool {
        let d = params.d;
        if self.a.coords()[..d - 2].iter().any(|x| !x.is_zero()) {
            return false;
        }
        cube_vertices(params).all(|v| {
            let val = self.a.dot(&v.coords);
            if v.sigma == self.sigma {
                val.is_one()
            } else {
                val < Rational::one()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_geometry::int;

    fn params(d: usize) -> GoldfarbParams {
        GoldfarbParams::with_defaults(d).unwrap()
    }

    #[test]
    fn parameter_constraints() {
        assert!(GoldfarbParams::new(3, rat(1, 3), rat(1, 12)).is_err());
        assert!(GoldfarbParams::new(3, rat(1, 2), rat(1, 16)).is_err());
        assert!(GoldfarbParams::new(3, rat(1, 3), int(0)).is_err());
        assert!(GoldfarbParams::new(0, rat(1, 3), rat(1, 16)).is_err());
        assert!(GoldfarbParams::new(3, rat(1, 3), rat(1, 13)).is_ok());
    }

    #[test]
    fn one_dimensional_cube() {
        let cube = build_goldfarb(&params(1));
        let hs = cube.halfspaces();
        assert_eq!(hs.len(), 2);
        assert_eq!(hs[0].normal(), &RationalVector::from_ints(&[-1]));
        assert_eq!(hs[1].normal(), &RationalVector::from_ints(&[1]));
        assert!(hs.iter().all(|h| h.rhs() == &int(1)));
        let v = cube_vertex(&params(1), &SignVector::new(vec![1]).unwrap()).unwrap();
        assert_eq!(v.coords, RationalVector::from_ints(&[1]));
    }

    #[test]
    fn pair_two_right_inequality() {
        let cube = build_goldfarb(&params(2));
        let h = &cube.halfspaces()[FacetLabel { k: 2, s: 1 }.index()];
        assert_eq!(h.normal(), &RationalVector::new(vec![rat(1, 3), int(1)]));
        assert_eq!(h.rhs(), &rat(2, 3));
    }

    #[test]
    fn origin_strictly_inside() {
        let m = build_goldfarb(&params(8)).contains(&RationalVector::zeros(8));
        assert!(m.inside);
        assert_eq!(m.tight_count(), 0);
    }

    #[test]
    fn vertex_recursion_value() {
        let v = cube_vertex(&params(3), &SignVector::new(vec![1, 1, 1]).unwrap()).unwrap();
        assert_eq!(
            v.coords,
            RationalVector::new(vec![int(1), rat(1, 3), rat(43, 72)])
        );
    }

    #[test]
    fn lemma_six_vertex_shape() {
        let p = params(6);
        let eps = p.eps().clone();
        let v = cube_vertex(&p, &SignVector::new(vec![-1, -1, -1, -1, 1, -1]).unwrap()).unwrap();
        let mut expected = vec![int(-1); 4];
        expected.push(int(1));
        expected.push(int(-1) + int(2) * eps);
        assert_eq!(v.coords, RationalVector::new(expected));
    }

    #[test]
    fn vertices_are_tight_on_their_facets() {
        let p = params(5);
        let cube = build_goldfarb(&p);
        for v in cube_vertices(&p) {
            let m = cube.contains(&v.coords);
            assert!(m.inside);
            let expected: Vec<usize> = (1..=5)
                .map(|k| {
                    FacetLabel {
                        k,
                        s: v.sigma.get(k),
                    }
                    .index()
                })
                .collect();
            assert_eq!(m.tight_indices(), expected);
            assert!(!cube.contains(&v.coords.scale(&int(2))).inside);
        }
    }

    #[test]
    fn dual_vertex_values() {
        let p = params(5);
        let w = dual_vertices(&p).unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(
            w[FacetLabel { k: 1, s: 1 }.index()].coords,
            RationalVector::unit(5, 0)
        );
        assert_eq!(
            w[FacetLabel { k: 1, s: -1 }.index()].coords,
            -&RationalVector::unit(5, 0)
        );
        assert_eq!(
            w[FacetLabel { k: 2, s: 1 }.index()].coords,
            RationalVector::new(vec![rat(1, 2), rat(3, 2), int(0), int(0), int(0)])
        );
        let eps = rat(1, 3);
        let gamma = rat(1, 16);
        let denom = int(1) - &eps + &eps * &gamma;
        for k in 3..=5 {
            let mut expected = RationalVector::zeros(5);
            expected.set(k - 3, -(&eps * &gamma) / &denom);
            expected.set(k - 2, &eps / &denom);
            expected.set(k - 1, int(1) / &denom);
            assert_eq!(w[FacetLabel { k, s: 1 }.index()].coords, expected);
        }
    }

    #[test]
    fn sign_vector_orders() {
        let all: Vec<_> = SignVector::all(3).collect();
        assert_eq!(all.len(), 8);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for (i, s) in all.iter().enumerate() {
            assert_eq!(s.rank(), i);
        }
        let adm: Vec<_> = SignVector::admissible(4).collect();
        assert_eq!(adm.len(), 4);
        assert!(adm.iter().all(SignVector::is_admissible));
        assert!(adm.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(
            SignVector::admissible(2).collect::<Vec<_>>(),
            vec![SignVector::new(vec![1, 1]).unwrap()]
        );
        assert!(SignVector::new(vec![1, 0]).is_err());
    }

    #[test]
    fn certificates_for_d4() {
        let p = params(4);
        let shadow = Shadow::new(&p).unwrap();
        assert_eq!(shadow.vertex_count(), 16);
        for sigma in SignVector::all(4) {
            let cert = shadow.certificate(&sigma).unwrap();
            assert!(cert.a.coords()[..2].iter().all(Zero::is_zero));
            assert!(cert.is_valid(&p), "certificate for {sigma}");
        }
    }

    #[test]
    fn certificate_rejects_wrong_length() {
        let err =
            shadow_certificate(&params(4), &SignVector::new(vec![1, 1]).unwrap()).unwrap_err();
        assert_eq!(
            err,
            GoldfarbError::LengthMismatch {
                expected: 4,
                found: 2
            }
        );
    }
}

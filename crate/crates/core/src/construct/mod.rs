//! Assembly of the worst-case instance.
//!
//! For every admissible `σ` (last two signs `+1`) the shadow certificate
//! `p_σ` is pushed out along `v_σ(0)` to a point `q_σ` on the line
//! `ℒ = {(0, .., 0, 2, y)}` and then projected back onto the `σ`-facet of the
//! stretched dual cube, giving `p_σ^(ℓ)`. The positive class is the stretched
//! dual cube's `2d` vertices; the negative class is two points on `ℒ` placed
//! so that each `(p_σ^(ℓ), q_σ)` is the unique optimum for one value of the
//! reduced-hull parameter.

mod arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::exact_geometry::{
    int, project_point_to_unit_halfspace, rat, solve_linear_system, GeometryError, Rational,
    RationalMatrix, RationalVector,
};
use crate::goldfarb::{
    cube_vertex, dual_vertices, CubeVertex, FacetLabel, GoldfarbError, GoldfarbParams, Shadow,
    ShadowCertificate, SignVector,
};
use crate::qp::{build_kkt_certificate, QpError};

pub use arc::generate_2d_arc_instance;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error(transparent)]
    Goldfarb(#[from] GoldfarbError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("sign vector {0} is not admissible (needs its last two entries +1)")]
    NotAdmissible(SignVector),
    #[error("stretch factor must be positive")]
    NonPositiveStretch,
    #[error("p for {0} is not strictly inside every facet other than its own")]
    FacetStrictness(SignVector),
    #[error("support decomposition for {sigma} failed: {reason}")]
    SupportDecomposition { sigma: SignVector, reason: String },
    #[error("degenerate calibration: q_min = q_max across {0} pairs")]
    DegenerateCalibration(usize),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("no passing stretch factor within {0} doublings")]
    StretchCapExceeded(u32),
    #[error(transparent)]
    Kkt(#[from] Box<QpError>),
}

/// The stretch `L > 0` and its inverse `ℓ = 1/L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StretchFactor {
    l: Rational,
    ell: Rational,
}

impl StretchFactor {
    pub fn new(l: Rational) -> Result<Self, ConstructError> {
        if !l.is_positive() {
            return Err(ConstructError::NonPositiveStretch);
        }
        let ell = l.recip();
        Ok(Self { l, ell })
    }

    pub fn from_int(l: i64) -> Result<Self, ConstructError> {
        Self::new(int(l))
    }

    pub fn l(&self) -> &Rational {
        &self.l
    }

    pub fn ell(&self) -> &Rational {
        &self.ell
    }

    fn doubled(&self) -> Self {
        Self::new(&self.l * int(2)).expect("positive")
    }
}

/// Starting point of [`choose_stretch`].
pub const DEFAULT_STRETCH: i64 = 20_000;
/// Doubling cap of [`choose_stretch`].
pub const DEFAULT_MAX_DOUBLINGS: u32 = 64;

/// Scales every coordinate except the last two by `factor`. With
/// `factor = L` this is `x(L)`; with `factor = ℓ` it stretches inequality
/// normals so that `a(ℓ) · x(L) = a · x`.
pub fn scale_leading(x: &RationalVector, factor: &Rational) -> RationalVector {
    let d = x.dim();
    x.coords()
        .iter()
        .enumerate()
        .map(|(i, c)| if i + 2 < d { c * factor } else { c.clone() })
        .collect()
}

/// `x(L)`.
pub fn stretch(x: &RationalVector, l: &StretchFactor) -> RationalVector {
    scale_leading(x, l.l())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructedPair {
    pub sigma: SignVector,
    /// Shadow certificate point `p_σ`.
    pub p_sigma: RationalVector,
    /// Point on the line `ℒ`.
    pub q_sigma: RationalVector,
    /// Projection of `q_σ` onto the `σ`-facet of the stretched dual cube.
    pub p_stretched: RationalVector,
    /// `1 - v_σ(0) · q_σ`, always negative.
    pub c: Rational,
}

/// Pushes the certificate point along `v_σ(0)` until coordinate `d-1`
/// equals 2. Returns `(q_σ, C)`.
pub fn build_q(
    cert: &ShadowCertificate,
    v: &CubeVertex,
) -> Result<(RationalVector, Rational), ConstructError> {
    if !v.sigma.is_admissible() {
        return Err(ConstructError::NotAdmissible(v.sigma.clone()));
    }
    let d = v.coords.dim();
    let v0 = scale_leading(&v.coords, &Rational::zero());
    let norm_sq = v0.norm_sq();
    let c = (&cert.a[d - 2] - int(2)) * &norm_sq / &v.coords[d - 2];
    let q = cert.a.add_scaled(&(-&c / &norm_sq), &v0);
    Ok((q, c))
}

/// Projects `q_σ` onto `v_σ(ℓ) · x = 1`.
pub fn build_p_stretched(
    q_sigma: &RationalVector,
    v: &CubeVertex,
    ell: &Rational,
) -> Result<RationalVector, ConstructError> {
    let (p, _) = project_point_to_unit_halfspace(q_sigma, &scale_leading(&v.coords, ell))?;
    Ok(p)
}

/// True iff `v_σ(ℓ) · p = 1` and `v_τ(ℓ) · p < 1` for all `τ ≠ σ`.
pub fn facet_strictness_check(
    p: &RationalVector,
    params: &GoldfarbParams,
    ell: &Rational,
    sigma: &SignVector,
) -> bool {
    let p_scaled = scale_leading(p, ell);
    SignVector::all(params.d()).all(|tau| {
        let v = cube_vertex(params, &tau).expect("length matches");
        let value = v.coords.dot(&p_scaled);
        if &tau == sigma {
            value.is_one()
        } else {
            value < Rational::one()
        }
    })
}

/// Coefficients of `p` over the `d` stretched dual vertices `w_(k,σ_k)(L)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportDecomposition {
    pub sigma: SignVector,
    /// `alphas[k-1]` multiplies `w_(k,σ_k)(L)`.
    pub alphas: Vec<Rational>,
    /// Largest coefficient.
    pub mu_sigma: Rational,
}

impl SupportDecomposition {
    pub fn labels(&self) -> impl Iterator<Item = FacetLabel> + '_ {
        (1..=self.sigma.len()).map(|k| FacetLabel {
            k,
            s: self.sigma.get(k),
        })
    }
}

/// Writes `p` as a convex combination of the `d` stretched dual vertices on
/// the `σ`-facet. `stretched_dual` is indexed by [`FacetLabel::index`].
pub fn support_decomposition(
    p: &RationalVector,
    sigma: &SignVector,
    stretched_dual: &[RationalVector],
) -> Result<SupportDecomposition, ConstructError> {
    let fail = |reason: &str| ConstructError::SupportDecomposition {
        sigma: sigma.clone(),
        reason: reason.to_string(),
    };
    let d = sigma.len();
    let columns: Vec<RationalVector> = (1..=d)
        .map(|k| stretched_dual[FacetLabel { k, s: sigma.get(k) }.index()].clone())
        .collect();
    let basis = RationalMatrix::from_columns(&columns);
    let alphas = solve_linear_system(&basis, p)
        .map_err(|_| fail("facet vertices are linearly dependent"))?
        .into_coords();
    if alphas.iter().fold(Rational::zero(), |acc, a| acc + a) != Rational::one() {
        return Err(fail("coefficients do not sum to 1"));
    }
    if alphas.iter().any(|a| !a.is_positive()) {
        return Err(fail("a coefficient is not strictly positive"));
    }
    let mu_sigma = alphas.iter().max().expect("d >= 1").clone();
    Ok(SupportDecomposition {
        sigma: sigma.clone(),
        alphas,
        mu_sigma,
    })
}

/// Placement of the negative class and the map from `q` to `μ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Calibration {
    pub mu_bar: Rational,
    pub q_min: Rational,
    pub q_max: Rational,
    pub u_left: RationalVector,
    pub u_right: RationalVector,
}

fn point_on_line(d: usize, y: Rational) -> RationalVector {
    let mut u = RationalVector::zeros(d);
    u.set(d - 2, int(2));
    u.set(d - 1, y);
    u
}

/// `μ̄ = max(1/2, max μ_σ)`, `q_min`, `q_max` over the last coordinates of
/// the `q_σ`, and the two negative points `u_left`, `u_right` on `ℒ`.
///
/// With a single pair (`d = 2`) the span `q_max - q_min` is set to 1 so that
/// the pair's parameter value is `μ = 1`.
pub fn calibrate(
    pairs: &[ConstructedPair],
    decomps: &[SupportDecomposition],
) -> Result<Calibration, ConstructError> {
    let first = pairs
        .first()
        .ok_or_else(|| ConstructError::OutOfRange("no pairs".into()))?;
    let d = first.q_sigma.dim();
    let mu_bar = decomps
        .iter()
        .map(|s| s.mu_sigma.clone())
        .fold(rat(1, 2), |a, b| a.max(b));
    if mu_bar >= Rational::one() {
        return Err(ConstructError::OutOfRange("mu_bar must be < 1".into()));
    }
    let q_min = pairs
        .iter()
        .map(|p| p.q_sigma.last().clone())
        .min()
        .expect("nonempty");
    let mut q_max = pairs
        .iter()
        .map(|p| p.q_sigma.last().clone())
        .max()
        .expect("nonempty");
    if q_min == q_max {
        if pairs.len() > 1 {
            return Err(ConstructError::DegenerateCalibration(pairs.len()));
        }
        q_max = &q_min + int(1);
    }
    let right = &q_min + (&q_max - &q_min) / (Rational::one() - &mu_bar);
    Ok(Calibration {
        u_left: point_on_line(d, q_min.clone()),
        u_right: point_on_line(d, right),
        mu_bar,
        q_min,
        q_max,
    })
}

/// `μ(q) = 1 - (q_d - q_min)(1 - μ̄)/(q_max - q_min)`.
pub fn mu_of_q(q_d: &Rational, calib: &Calibration) -> Result<Rational, ConstructError> {
    if q_d < &calib.q_min || q_d > &calib.q_max {
        return Err(ConstructError::OutOfRange(format!(
            "q_d must lie in [q_min, q_max], got {q_d}"
        )));
    }
    Ok(Rational::one()
        - (q_d - &calib.q_min) * (Rational::one() - &calib.mu_bar) / (&calib.q_max - &calib.q_min))
}

/// Reduced hull of the two-point class at cap `mu`: the segment
/// `[μ u_left + (1-μ) u_right, μ u_right + (1-μ) u_left]`.
pub fn reduced_hull_segment(
    u_left: &RationalVector,
    u_right: &RationalVector,
    mu: &Rational,
) -> Result<(RationalVector, RationalVector), ConstructError> {
    if mu < &rat(1, 2) || mu > &Rational::one() {
        return Err(ConstructError::OutOfRange(format!(
            "mu must lie in [1/2, 1], got {mu}"
        )));
    }
    let rest = Rational::one() - mu;
    let left = u_left.scale(mu).add_scaled(&rest, u_right);
    let right = u_right.scale(mu).add_scaled(&rest, u_left);
    Ok((left, right))
}

/// Extra data carried by instances built from a Goldfarb cube.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldfarbInstanceInfo {
    pub params: GoldfarbParams,
    pub stretch: StretchFactor,
    pub calibration: Calibration,
}

/// Two labelled point classes. Positive points carry label `+1`, negative
/// points `-1`. For Goldfarb instances the positive points are ordered by
/// [`FacetLabel::index`] and the negative points are `[u_left, u_right]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SvmInstance {
    pub dim: usize,
    pub plus_points: Vec<RationalVector>,
    pub minus_points: Vec<RationalVector>,
    pub goldfarb: Option<GoldfarbInstanceInfo>,
}

impl SvmInstance {
    pub fn n(&self) -> usize {
        self.plus_points.len() + self.minus_points.len()
    }

    /// The number of distinct positive support sets the construction
    /// guarantees: `2^d/4` for Goldfarb instances, `2(n_+ - 3)` for the arc.
    pub fn support_lower_bound(&self) -> usize {
        match &self.goldfarb {
            Some(info) => 1 << (info.params.d() - 2),
            None => 2 * self.plus_points.len().saturating_sub(3),
        }
    }
}

/// Everything produced for one `(params, L)`: one pair and decomposition per
/// admissible `σ` (lexicographic order), the calibration, and the instance.
#[derive(Clone, Debug)]
pub struct Construction {
    pub params: GoldfarbParams,
    pub stretch: StretchFactor,
    pub pairs: Vec<ConstructedPair>,
    pub decomps: Vec<SupportDecomposition>,
    pub calibration: Calibration,
    pub instance: SvmInstance,
}

/// Builds the pair for one admissible `σ` and checks facet strictness.
pub fn construct_pair(
    params: &GoldfarbParams,
    shadow: &Shadow,
    sigma: &SignVector,
    stretch: &StretchFactor,
) -> Result<ConstructedPair, ConstructError> {
    if !sigma.is_admissible() {
        return Err(ConstructError::NotAdmissible(sigma.clone()));
    }
    let cert = shadow.certificate(sigma)?;
    let v = cube_vertex(params, sigma)?;
    let (q_sigma, c) = build_q(&cert, &v)?;
    let p_stretched = build_p_stretched(&q_sigma, &v, stretch.ell())?;
    if !facet_strictness_check(&p_stretched, params, stretch.ell(), sigma) {
        return Err(ConstructError::FacetStrictness(sigma.clone()));
    }
    Ok(ConstructedPair {
        sigma: sigma.clone(),
        p_sigma: cert.a,
        q_sigma,
        p_stretched,
        c,
    })
}

/// The `2d` stretched dual vertices `w_(k,s)(L)`, in [`FacetLabel::index`]
/// order.
pub fn stretched_dual_vertices(
    params: &GoldfarbParams,
    stretch: &StretchFactor,
) -> Result<Vec<RationalVector>, ConstructError> {
    Ok(dual_vertices(params)?
        .iter()
        .map(|w| self::stretch(&w.coords, stretch))
        .collect())
}

impl Construction {
    pub fn build(params: &GoldfarbParams, stretch: &StretchFactor) -> Result<Self, ConstructError> {
        if params.d() < 2 {
            return Err(GoldfarbError::DimensionTooSmall(params.d()).into());
        }
        let shadow = Shadow::new(params)?;
        let plus_points = stretched_dual_vertices(params, stretch)?;
        let sigmas: Vec<SignVector> = SignVector::admissible(params.d()).collect();
        let built: Vec<(ConstructedPair, SupportDecomposition)> = sigmas
            .par_iter()
            .map(|sigma| {
                let pair = construct_pair(params, &shadow, sigma, stretch)?;
                let decomp = support_decomposition(&pair.p_stretched, sigma, &plus_points)?;
                Ok((pair, decomp))
            })
            .collect::<Result<_, ConstructError>>()?;
        let (pairs, decomps): (Vec<_>, Vec<_>) = built.into_iter().unzip();
        let calibration = calibrate(&pairs, &decomps)?;
        let instance = SvmInstance {
            dim: params.d(),
            plus_points,
            minus_points: vec![calibration.u_left.clone(), calibration.u_right.clone()],
            goldfarb: Some(GoldfarbInstanceInfo {
                params: params.clone(),
                stretch: stretch.clone(),
                calibration: calibration.clone(),
            }),
        };
        Ok(Self {
            params: params.clone(),
            stretch: stretch.clone(),
            pairs,
            decomps,
            calibration,
            instance,
        })
    }

    /// `μ(q_σ)` for every pair, in pair order.
    pub fn breakpoints(&self) -> Vec<Rational> {
        self.pairs
            .iter()
            .map(|p| mu_of_q(p.q_sigma.last(), &self.calibration).expect("q within [q_min, q_max]"))
            .collect()
    }
}

/// Assembles the instance for `(params, L)`.
pub fn build_instance(
    params: &GoldfarbParams,
    stretch: &StretchFactor,
) -> Result<SvmInstance, ConstructError> {
    Ok(Construction::build(params, stretch)?.instance)
}

/// Exact check that every constructed pair passes strictness, decomposes
/// with positive weights and carries a valid KKT certificate at `L`.
fn stretch_passes(
    params: &GoldfarbParams,
    stretch: &StretchFactor,
) -> Result<bool, ConstructError> {
    let construction = match Construction::build(params, stretch) {
        Ok(c) => c,
        Err(ConstructError::FacetStrictness(_) | ConstructError::SupportDecomposition { .. }) => {
            return Ok(false)
        }
        Err(e) => return Err(e),
    };
    let ok = construction
        .pairs
        .par_iter()
        .all(|pair| build_kkt_certificate(pair, params, stretch.ell()).is_ok());
    Ok(ok)
}

/// First `L` in `start, 2 start, 4 start, ...` at which every admissible
/// pair is certified.
pub fn choose_stretch_from(
    params: &GoldfarbParams,
    start: StretchFactor,
    max_doublings: u32,
) -> Result<StretchFactor, ConstructError> {
    let mut stretch = start;
    for _ in 0..=max_doublings {
        if stretch_passes(params, &stretch)? {
            return Ok(stretch);
        }
        stretch = stretch.doubled();
    }
    Err(ConstructError::StretchCapExceeded(max_doublings))
}

/// [`choose_stretch_from`] starting at `L = 20000`.
pub fn choose_stretch(params: &GoldfarbParams) -> Result<StretchFactor, ConstructError> {
    choose_stretch_from(
        params,
        StretchFactor::from_int(DEFAULT_STRETCH)?,
        DEFAULT_MAX_DOUBLINGS,
    )
}

use crate::exact_geometry::{int, rat, Rational, RationalVector};

use super::{ConstructError, SvmInstance};

// Circle of radius 10 centred at (0, 10); the arc sits right of its lowest
// point. The two negative points lie on the horizontal line y = -1, to the
// right of the first arc point, so at μ = 1 the closest pair is the first
// arc point and the left negative point. As the cap shrinks the left end of
// the negative reduced hull slides right underneath the arc.
const RADIUS: i64 = 10;

/// Planar demo: `n_plus` positive points on a circular arc (rational via the
/// tangent half-angle map `t -> R (2t, 2t^2)/(1+t^2)`) and two negative
/// points below it.
pub fn generate_2d_arc_instance(n_plus: usize) -> Result<SvmInstance, ConstructError> {
    if n_plus < 3 {
        return Err(ConstructError::OutOfRange(format!(
            "n_plus must be >= 3, got {n_plus}"
        )));
    }
    let r = int(RADIUS);
    let t_lo = rat(1, 20);
    let t_span = rat(1, 4);
    let last = Rational::from_integer((n_plus as i64 - 1).into());
    let plus_points = (0..n_plus)
        .map(|i| {
            let t = &t_lo + &t_span * Rational::from_integer((i as i64).into()) / &last;
            let t2 = &t * &t;
            let denom = int(1) + &t2;
            RationalVector::new(vec![int(2) * &r * &t / &denom, int(2) * &r * &t2 / &denom])
        })
        .collect();
    let minus_points = vec![
        RationalVector::new(vec![int(1), int(-1)]),
        RationalVector::new(vec![int(20), int(-1)]),
    ];
    Ok(SvmInstance {
        dim: 2,
        plus_points,
        minus_points,
        goldfarb: None,
    })
}

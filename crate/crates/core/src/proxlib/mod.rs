//! Closed-form proximal maps, conjugates via Moreau decomposition, and
//! Moreau envelopes.
//!
//! Every term shipped here has an exact proximal map. Approximate proximal
//! maps (the composite `prox_{a h + a g o A}`) belong to the inner loop and
//! are never wrapped as a [`ProximableTerm`](crate::terms::ProximableTerm).

mod catalogue;
mod dual;
mod envelope;

pub use catalogue::{scale_term, BoxIndicator, L1Norm, Scaled, SquaredL2, Translated, Zero};
pub use dual::{fenchel_dual_prox, Conjugate};
pub use envelope::{moreau_envelope, EnvelopeResult};

use crate::error::{check_len, check_positive, Error, Result};
use crate::vector::Vector;

/// Relative slack used when an indicator checks membership of a point that
/// was produced by floating-point arithmetic.
pub const FEASIBILITY_TOL: f64 = 1e-10;

pub(crate) fn within(x: f64, lower: f64, upper: f64) -> bool {
    x >= lower - FEASIBILITY_TOL * (1.0 + lower.abs()) && x <= upper + FEASIBILITY_TOL * (1.0 + upper.abs())
}

/// Soft threshold `sign(a_i) max(|a_i| - t, 0)`.
pub fn prox_l1(a: &Vector, t: f64) -> Result<Vector> {
    check_positive("t", t)?;
    Ok(soft_threshold(a, t))
}

/// Soft threshold without validation; `t = 0` is the identity. Ties
/// `|a_i| = t` land on exactly `+0.0`.
pub(crate) fn soft_threshold(a: &Vector, t: f64) -> Vector {
    a.map(|x| if x.abs() <= t { 0.0 } else { x - t.copysign(x) })
}

/// Proximal map of `1/2 ||x - center||^2`: `(a + t center) / (1 + t)`.
pub fn prox_squared_l2(a: &Vector, t: f64, center: &Vector) -> Result<Vector> {
    check_positive("t", t)?;
    check_len("prox center", a.len(), center.len())?;
    Ok(a.zip_map(center, |x, c| (x + t * c) / (1.0 + t)))
}

/// Projection onto `[lower, upper]`, whatever `t`.
pub fn prox_indicator_box(a: &Vector, _t: f64, lower: &Vector, upper: &Vector) -> Result<Vector> {
    check_len("box lower bound", a.len(), lower.len())?;
    check_len("box upper bound", a.len(), upper.len())?;
    check_box(lower.as_slice(), upper.as_slice())?;
    Ok(Vector::from_fn(a.len(), |i| a[i].clamp(lower[i], upper[i])))
}

pub(crate) fn check_box(lower: &[f64], upper: &[f64]) -> Result<()> {
    match lower.iter().zip(upper).position(|(l, u)| l > u) {
        Some(i) => Err(Error::invalid(
            "box bounds",
            format!("lower[{i}] = {} exceeds upper[{i}] = {}", lower[i], upper[i]),
        )),
        None => Ok(()),
    }
}

/// The zero function's proximal map is the identity.
pub fn prox_zero(a: &Vector, _t: f64) -> Vector {
    a.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(prox_l1(&v(&[3.0, -0.5]), 1.0).unwrap(), v(&[2.0, 0.0]));
        assert_eq!(prox_l1(&v(&[0.0, 0.0, 0.0]), 7.0).unwrap(), v(&[0.0; 3]));
        assert_eq!(prox_l1(&v(&[-2.5]), 0.5).unwrap(), v(&[-2.0]));
    }

    #[test]
    fn soft_threshold_tie_is_positive_zero() {
        let out = prox_l1(&v(&[-1.5, 1.5]), 1.5).unwrap();
        assert!(out.iter().all(|x| x.to_bits() == 0.0f64.to_bits()));
    }

    #[test]
    fn soft_threshold_rejects_bad_scale() {
        assert!(prox_l1(&v(&[1.0]), 0.0).is_err());
        assert!(prox_l1(&v(&[1.0]), -1.0).is_err());
        assert!(prox_l1(&v(&[1.0]), f64::NAN).is_err());
    }

    #[test]
    fn squared_l2_examples() {
        assert_eq!(prox_squared_l2(&v(&[4.0]), 1.0, &v(&[0.0])).unwrap(), v(&[2.0]));
        let c = v(&[0.3, -2.0]);
        assert_eq!(prox_squared_l2(&c, 17.0, &c).unwrap(), c);
        assert_eq!(
            prox_squared_l2(&v(&[1.0, 3.0]), 3.0, &v(&[1.0, -1.0])).unwrap(),
            v(&[1.0, 0.0])
        );
        assert!(matches!(
            prox_squared_l2(&v(&[1.0]), 1.0, &v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn box_examples() {
        let lo = v(&[0.0, 0.0]);
        let hi = v(&[1.0, 1.0]);
        assert_eq!(
            prox_indicator_box(&v(&[5.0, -5.0]), 1.0, &lo, &hi).unwrap(),
            v(&[1.0, 0.0])
        );
        let inside = v(&[0.25, 0.75]);
        assert_eq!(prox_indicator_box(&inside, 1.0, &lo, &hi).unwrap(), inside);
        assert_eq!(
            prox_indicator_box(&v(&[0.5]), 100.0, &v(&[0.0]), &v(&[1.0])).unwrap(),
            v(&[0.5])
        );
        assert!(prox_indicator_box(&v(&[0.5]), 1.0, &v(&[2.0]), &v(&[1.0])).is_err());
    }

    #[test]
    fn zero_prox_is_identity() {
        for x in [v(&[1.0, 2.0, 3.0]), v(&[0.0]), v(&[-7.5, 0.1])] {
            assert_eq!(prox_zero(&x, 0.3), x);
        }
    }
}

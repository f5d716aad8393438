//! The two kinds of objective terms: smooth ones used through their
//! gradient, and proximable ones used through their proximal map.

use crate::error::Result;
use crate::vector::Vector;

/// A convex differentiable function with `L`-Lipschitz gradient.
pub trait SmoothTerm: Send + Sync {
    /// Fixed input dimension, or `None` if the term accepts any length.
    fn dim(&self) -> Option<usize>;

    fn value(&self, u: &Vector) -> f64;

    fn gradient(&self, u: &Vector) -> Vector;

    fn lipschitz(&self) -> f64;

    /// Strong-convexity modulus, when the term is known to have one.
    fn strong_convexity(&self) -> Option<f64> {
        None
    }
}

/// A proper convex lower semicontinuous function with an exact proximal map.
///
/// Values live in the extended reals: `f64::INFINITY` stands for `+inf`.
pub trait ProximableTerm: Send + Sync {
    fn dim(&self) -> Option<usize> {
        None
    }

    /// `h(x)`, or `None` when the term cannot evaluate itself (e.g. the
    /// conjugate of a term without a known conjugate value).
    fn value(&self, x: &Vector) -> Option<f64>;

    /// `prox_{t h}(a) = argmin_x 1/2 ||x - a||^2 + t h(x)`.
    fn prox(&self, a: &Vector, t: f64) -> Result<Vector>;

    /// `h*(w) = sup_x <w, x> - h(x)`, when known in closed form.
    fn conjugate_value(&self, _w: &Vector) -> Option<f64> {
        None
    }

    /// True only for the identically zero function.
    fn is_zero(&self) -> bool {
        false
    }
}

impl<T: ProximableTerm + ?Sized> ProximableTerm for Box<T> {
    fn dim(&self) -> Option<usize> {
        (**self).dim()
    }
    fn value(&self, x: &Vector) -> Option<f64> {
        (**self).value(x)
    }
    fn prox(&self, a: &Vector, t: f64) -> Result<Vector> {
        (**self).prox(a, t)
    }
    fn conjugate_value(&self, w: &Vector) -> Option<f64> {
        (**self).conjugate_value(w)
    }
    fn is_zero(&self) -> bool {
        (**self).is_zero()
    }
}

impl<T: ProximableTerm + ?Sized> ProximableTerm for &T {
    fn dim(&self) -> Option<usize> {
        (**self).dim()
    }
    fn value(&self, x: &Vector) -> Option<f64> {
        (**self).value(x)
    }
    fn prox(&self, a: &Vector, t: f64) -> Result<Vector> {
        (**self).prox(a, t)
    }
    fn conjugate_value(&self, w: &Vector) -> Option<f64> {
        (**self).conjugate_value(w)
    }
    fn is_zero(&self) -> bool {
        (**self).is_zero()
    }
}

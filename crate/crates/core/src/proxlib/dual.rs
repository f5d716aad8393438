use crate::error::{check_positive, Result};
use crate::terms::ProximableTerm;
use crate::vector::Vector;

/// `prox_{t h*}(a) = a - t prox_{h / t}(a / t)`, computed from the primal
/// proximal map alone.
pub fn fenchel_dual_prox<T: ProximableTerm + ?Sized>(term: &T, a: &Vector, t: f64) -> Result<Vector> {
    check_positive("t", t)?;
    let primal = term.prox(&a.scaled(1.0 / t), 1.0 / t)?;
    Ok(a.add_scaled(-t, &primal))
}

/// The Fenchel conjugate `h*` of a term.
///
/// The proximal map always goes through the Moreau decomposition. The value
/// is available exactly when the inner term knows its conjugate value; the
/// conjugate's own conjugate is the inner term again.
#[derive(Debug, Clone)]
pub struct Conjugate<T> {
    inner: T,
}

impl<T: ProximableTerm> Conjugate<T> {
    pub fn new(inner: T) -> Self {
        Conjugate { inner }
    }

    pub fn inner(&self) -> &T {
        &self.inner
    }
}

impl<T: ProximableTerm> ProximableTerm for Conjugate<T> {
    fn dim(&self) -> Option<usize> {
        self.inner.dim()
    }

    fn value(&self, w: &Vector) -> Option<f64> {
        self.inner.conjugate_value(w)
    }

    fn prox(&self, a: &Vector, t: f64) -> Result<Vector> {
        fenchel_dual_prox(&self.inner, a, t)
    }

    fn conjugate_value(&self, x: &Vector) -> Option<f64> {
        self.inner.value(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxlib::{L1Norm, SquaredL2, Zero};

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    #[test]
    fn dual_of_l1_is_projection_onto_unit_box() {
        assert_eq!(fenchel_dual_prox(&L1Norm::unit(), &v(&[3.0]), 1.0).unwrap(), v(&[1.0]));
        assert_eq!(
            fenchel_dual_prox(&L1Norm::unit(), &v(&[-0.25]), 1.0).unwrap(),
            v(&[-0.25])
        );
    }

    #[test]
    fn squared_norm_is_self_dual() {
        assert_eq!(
            fenchel_dual_prox(&SquaredL2::origin(), &v(&[4.0]), 1.0).unwrap(),
            v(&[2.0])
        );
    }

    #[test]
    fn moreau_identity_at_unit_scale() {
        let a = v(&[2.5, -0.3, 0.0, 7.0]);
        let terms: Vec<Box<dyn ProximableTerm>> =
            vec![Box::new(L1Norm::unit()), Box::new(SquaredL2::origin()), Box::new(Zero)];
        for h in &terms {
            let sum = &h.prox(&a, 1.0).unwrap() + &fenchel_dual_prox(h, &a, 1.0).unwrap();
            assert!(sum.distance(&a) <= 1e-14);
        }
    }

    #[test]
    fn dual_of_zero_maps_to_origin() {
        let out = fenchel_dual_prox(&Zero, &v(&[3.0, -1.0]), 0.7).unwrap();
        assert!(out.norm_inf() <= 1e-15);
    }

    #[test]
    fn conjugate_wrapper_values() {
        let c = Conjugate::new(L1Norm::unit());
        assert_eq!(c.value(&v(&[0.5])), Some(0.0));
        assert_eq!(c.value(&v(&[1.5])), Some(f64::INFINITY));
        assert_eq!(c.conjugate_value(&v(&[-2.0])), Some(2.0));
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(fenchel_dual_prox(&Zero, &v(&[1.0]), 0.0).is_err());
    }
}

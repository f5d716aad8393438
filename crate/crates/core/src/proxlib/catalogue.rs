use crate::error::{check_len, check_positive, Error, Result};
use crate::terms::ProximableTerm;
use crate::vector::Vector;

use super::{check_box, soft_threshold, within};

fn check_dim(term_dim: Option<usize>, found: usize) -> Result<()> {
    match term_dim {
        Some(expected) => check_len("proximable term", expected, found),
        None => Ok(()),
    }
}

/// `h = 0`. Its conjugate is the indicator of `{0}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl ProximableTerm for Zero {
    fn value(&self, _x: &Vector) -> Option<f64> {
        Some(0.0)
    }

    fn prox(&self, a: &Vector, _t: f64) -> Result<Vector> {
        Ok(a.clone())
    }

    fn conjugate_value(&self, w: &Vector) -> Option<f64> {
        Some(if w.iter().all(|&x| within(x, 0.0, 0.0)) {
            0.0
        } else {
            f64::INFINITY
        })
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// `h(x) = weight ||x||_1`, `weight >= 0`.
///
/// The conjugate is the indicator of the box `[-weight, weight]^n`. A zero
/// weight is the zero function.
#[derive(Debug, Clone, Copy)]
pub struct L1Norm {
    weight: f64,
}

impl L1Norm {
    pub fn new(weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::invalid("weight", format!("must be >= 0, got {weight}")));
        }
        Ok(L1Norm { weight })
    }

    pub fn unit() -> Self {
        L1Norm { weight: 1.0 }
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

impl ProximableTerm for L1Norm {
    fn value(&self, x: &Vector) -> Option<f64> {
        Some(self.weight * x.norm_l1())
    }

    fn prox(&self, a: &Vector, t: f64) -> Result<Vector> {
        check_positive("t", t)?;
        Ok(soft_threshold(a, self.weight * t))
    }

    fn conjugate_value(&self, w: &Vector) -> Option<f64> {
        let feasible = w.iter().all(|&x| within(x, -self.weight, self.weight));
        Some(if feasible { 0.0 } else { f64::INFINITY })
    }

    fn is_zero(&self) -> bool {
        self.weight == 0.0
    }
}

/// `h(x) = 1/2 ||x - center||^2`, centered at the origin when no center is
/// given. Its conjugate is `1/2 ||w||^2 + <w, center>`.
#[derive(Debug, Clone, Default)]
pub struct SquaredL2 {
    center: Option<Vector>,
}

impl SquaredL2 {
    pub fn origin() -> Self {
        SquaredL2 { center: None }
    }

    pub fn centered(center: Vector) -> Self {
        SquaredL2 { center: Some(center) }
    }
}

impl ProximableTerm for SquaredL2 {
    fn dim(&self) -> Option<usize> {
        self.center.as_ref().map(Vector::len)
    }

    fn value(&self, x: &Vector) -> Option<f64> {
        check_dim(self.dim(), x.len()).ok()?;
        Some(match &self.center {
            Some(c) => 0.5 * x.distance_squared(c),
            None => 0.5 * x.norm_squared(),
        })
    }

    fn prox(&self, a: &Vector, t: f64) -> Result<Vector> {
        check_positive("t", t)?;
        match &self.center {
            Some(c) => super::prox_squared_l2(a, t, c),
            None => Ok(a.scaled(1.0 / (1.0 + t))),
        }
    }

    fn conjugate_value(&self, w: &Vector) -> Option<f64> {
        check_dim(self.dim(), w.len()).ok()?;
        let shift = self.center.as_ref().map_or(0.0, |c| w.dot(c));
        Some(0.5 * w.norm_squared() + shift)
    }
}

#[derive(Debug, Clone)]
enum Bounds {
    Uniform(f64, f64),
    Componentwise(Vector, Vector),
}

/// Indicator of a box: 0 inside, `+inf` outside. Its proximal map is the
/// projection, independent of the scale.
#[derive(Debug, Clone)]
pub struct BoxIndicator {
    bounds: Bounds,
}

impl BoxIndicator {
    /// The same interval `[lower, upper]` in every coordinate.
    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        check_box(&[lower], &[upper])?;
        Ok(BoxIndicator {
            bounds: Bounds::Uniform(lower, upper),
        })
    }

    pub fn new(lower: Vector, upper: Vector) -> Result<Self> {
        check_len("box upper bound", lower.len(), upper.len())?;
        check_box(lower.as_slice(), upper.as_slice())?;
        Ok(BoxIndicator {
            bounds: Bounds::Componentwise(lower, upper),
        })
    }

    fn bounds_at(&self, i: usize) -> (f64, f64) {
        match &self.bounds {
            Bounds::Uniform(l, u) => (*l, *u),
            Bounds::Componentwise(l, u) => (l[i], u[i]),
        }
    }

    pub fn contains(&self, x: &Vector) -> bool {
        (0..x.len()).all(|i| {
            let (l, u) = self.bounds_at(i);
            within(x[i], l, u)
        })
    }
}

impl ProximableTerm for BoxIndicator {
    fn dim(&self) -> Option<usize> {
        match &self.bounds {
            Bounds::Uniform(..) => None,
            Bounds::Componentwise(l, _) => Some(l.len()),
        }
    }

    fn value(&self, x: &Vector) -> Option<f64> {
        check_dim(self.dim(), x.len()).ok()?;
        Some(if self.contains(x) { 0.0 } else { f64::INFINITY })
    }

    fn prox(&self, a: &Vector, _t: f64) -> Result<Vector> {
        check_dim(self.dim(), a.len())?;
        Ok(Vector::from_fn(a.len(), |i| {
            let (l, u) = self.bounds_at(i);
            a[i].clamp(l, u)
        }))
    }

    /// Support function `sum_i max(w_i l_i, w_i u_i)`.
    fn conjugate_value(&self, w: &Vector) -> Option<f64> {
        check_dim(self.dim(), w.len()).ok()?;
        Some(
            (0..w.len())
                .map(|i| {
                    let (l, u) = self.bounds_at(i);
                    match w[i] {
                        x if x > 0.0 => x * u,
                        x if x < 0.0 => x * l,
                        _ => 0.0,
                    }
                })
                .sum(),
        )
    }
}

/// `weight * inner`, `weight > 0`.
#[derive(Debug, Clone)]
pub struct Scaled<T> {
    weight: f64,
    inner: T,
}

/// Shorthand for [`Scaled::new`].
pub fn scale_term<T: ProximableTerm>(weight: f64, inner: T) -> Result<Scaled<T>> {
    Scaled::new(weight, inner)
}

impl<T: ProximableTerm> Scaled<T> {
    pub fn new(weight: f64, inner: T) -> Result<Self> {
        check_positive("weight", weight)?;
        Ok(Scaled { weight, inner })
    }
}

impl<T: ProximableTerm> ProximableTerm for Scaled<T> {
    fn dim(&self) -> Option<usize> {
        self.inner.dim()
    }

    fn value(&self, x: &Vector) -> Option<f64> {
        self.inner.value(x).map(|v| self.weight * v)
    }

    fn prox(&self, a: &Vector, t: f64) -> Result<Vector> {
        check_positive("t", t)?;
        self.inner.prox(a, self.weight * t)
    }

    /// `(l h)*(w) = l h*(w / l)`.
    fn conjugate_value(&self, w: &Vector) -> Option<f64> {
        self.inner
            .conjugate_value(&w.scaled(1.0 / self.weight))
            .map(|v| self.weight * v)
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}

/// `inner(x - shift)`.
#[derive(Debug, Clone)]
pub struct Translated<T> {
    shift: Vector,
    inner: T,
}

impl<T: ProximableTerm> Translated<T> {
    pub fn new(shift: Vector, inner: T) -> Result<Self> {
        check_dim(inner.dim(), shift.len())?;
        Ok(Translated { shift, inner })
    }
}

impl<T: ProximableTerm> ProximableTerm for Translated<T> {
    fn dim(&self) -> Option<usize> {
        Some(self.shift.len())
    }

    fn value(&self, x: &Vector) -> Option<f64> {
        check_dim(self.dim(), x.len()).ok()?;
        self.inner.value(&(x - &self.shift))
    }

    fn prox(&self, a: &Vector, t: f64) -> Result<Vector> {
        check_dim(self.dim(), a.len())?;
        Ok(&self.inner.prox(&(a - &self.shift), t)? + &self.shift)
    }

    /// `h(. - c)*(w) = h*(w) + <w, c>`.
    fn conjugate_value(&self, w: &Vector) -> Option<f64> {
        check_dim(self.dim(), w.len()).ok()?;
        self.inner.conjugate_value(w).map(|v| v + w.dot(&self.shift))
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}

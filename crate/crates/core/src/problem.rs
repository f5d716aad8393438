//! The composite model `min_u f(u) + g(A u) + h(u)`.

use crate::error::{check_len, Error, Result};
use crate::operator::LinearOperator;
use crate::terms::{ProximableTerm, SmoothTerm};
use crate::vector::Vector;

pub struct CompositeProblem {
    f: Box<dyn SmoothTerm>,
    h: Box<dyn ProximableTerm>,
    g: Box<dyn ProximableTerm>,
    a: Box<dyn LinearOperator>,
}

/// Borrowed view of the parts the inner loop needs: `h`, `g` and `A`.
#[derive(Clone, Copy)]
pub struct SplitTerms<'a> {
    pub h: &'a dyn ProximableTerm,
    pub g: &'a dyn ProximableTerm,
    pub a: &'a dyn LinearOperator,
}

impl<'a> SplitTerms<'a> {
    pub fn new(h: &'a dyn ProximableTerm, g: &'a dyn ProximableTerm, a: &'a dyn LinearOperator) -> Self {
        SplitTerms { h, g, a }
    }
}

impl CompositeProblem {
    /// Checks that `f`, `h` live on `R^d`, `g` on `R^d'` and `A: R^d -> R^d'`.
    pub fn new(
        f: Box<dyn SmoothTerm>,
        h: Box<dyn ProximableTerm>,
        g: Box<dyn ProximableTerm>,
        a: Box<dyn LinearOperator>,
    ) -> Result<Self> {
        let d = a.in_dim();
        let dd = a.out_dim();
        if let Some(n) = f.dim() {
            check_len("f", d, n)?;
        }
        if let Some(n) = h.dim() {
            check_len("h", d, n)?;
        }
        if let Some(n) = g.dim() {
            check_len("g", dd, n)?;
        }
        let bound = a.norm_bound();
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::invalid("norm_bound", format!("must be positive, got {bound}")));
        }
        let l = f.lipschitz();
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::invalid("lipschitz", format!("must be positive, got {l}")));
        }
        Ok(CompositeProblem { f, h, g, a })
    }

    /// Primal dimension `d`.
    pub fn dim(&self) -> usize {
        self.a.in_dim()
    }

    /// Dual dimension `d'`.
    pub fn dual_dim(&self) -> usize {
        self.a.out_dim()
    }

    pub fn f(&self) -> &dyn SmoothTerm {
        self.f.as_ref()
    }

    pub fn h(&self) -> &dyn ProximableTerm {
        self.h.as_ref()
    }

    pub fn g(&self) -> &dyn ProximableTerm {
        self.g.as_ref()
    }

    pub fn operator(&self) -> &dyn LinearOperator {
        self.a.as_ref()
    }

    pub fn split(&self) -> SplitTerms<'_> {
        SplitTerms::new(self.h(), self.g(), self.operator())
    }

    pub fn lipschitz(&self) -> f64 {
        self.f.lipschitz()
    }

    pub fn norm_bound(&self) -> f64 {
        self.a.norm_bound()
    }

    /// `f(u) + g(A u) + h(u)`; `+inf` when either nonsmooth term is.
    pub fn objective(&self, u: &Vector) -> Result<f64> {
        check_len("u", self.dim(), u.len())?;
        let f = self.f.value(u);
        let h = self.h.value(u).ok_or(Error::Unavailable { what: "value of h" })?;
        let g = self
            .g
            .value(&self.a.apply(u))
            .ok_or(Error::Unavailable { what: "value of g" })?;
        Ok(extended_sum(&[f, g, h]))
    }
}

/// Sum in the extended reals: any `+inf` term gives `+inf`.
fn extended_sum(terms: &[f64]) -> f64 {
    if terms.contains(&f64::INFINITY) {
        f64::INFINITY
    } else {
        terms.iter().sum()
    }
}

impl std::fmt::Debug for CompositeProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompositeProblem")
            .field("dim", &self.dim())
            .field("dual_dim", &self.dual_dim())
            .field("lipschitz", &self.lipschitz())
            .field("norm_bound", &self.norm_bound())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{ForwardDifference, Identity};
    use crate::proxlib::{BoxIndicator, L1Norm, Zero};
    use crate::smooth::SquaredDistance;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    #[test]
    fn pure_quadratic_at_minimizer() {
        let p = CompositeProblem::new(
            Box::new(SquaredDistance::new(v(&[1.0, 0.0]))),
            Box::new(Zero),
            Box::new(Zero),
            Box::new(Identity::new(2)),
        )
        .unwrap();
        assert_eq!(p.objective(&v(&[1.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn infeasible_indicator_gives_infinity() {
        let p = CompositeProblem::new(
            Box::new(SquaredDistance::new(v(&[0.0]))),
            Box::new(BoxIndicator::uniform(0.0, f64::MAX).unwrap()),
            Box::new(Zero),
            Box::new(Identity::new(1)),
        )
        .unwrap();
        assert_eq!(p.objective(&v(&[-1.0])).unwrap(), f64::INFINITY);
    }

    #[test]
    fn all_three_terms() {
        let p = CompositeProblem::new(
            Box::new(SquaredDistance::new(v(&[2.0]))),
            Box::new(Zero),
            Box::new(L1Norm::unit()),
            Box::new(Identity::new(1)),
        )
        .unwrap();
        assert_eq!(p.objective(&v(&[1.0])).unwrap(), 1.5);
    }

    #[test]
    fn dimension_errors_name_the_component() {
        let err = CompositeProblem::new(
            Box::new(SquaredDistance::new(v(&[2.0, 1.0]))),
            Box::new(Zero),
            Box::new(L1Norm::unit()),
            Box::new(ForwardDifference::new(3).unwrap()),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { component: "f", .. }), "{err}");

        let p = CompositeProblem::new(
            Box::new(SquaredDistance::new(v(&[2.0, 1.0, 0.0]))),
            Box::new(Zero),
            Box::new(L1Norm::unit()),
            Box::new(ForwardDifference::new(3).unwrap()),
        )
        .unwrap();
        assert!(matches!(
            p.objective(&v(&[1.0])),
            Err(Error::DimensionMismatch { component: "u", .. })
        ));
    }
}

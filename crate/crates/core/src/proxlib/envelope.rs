use crate::error::{check_positive, Error, Result};
use crate::terms::ProximableTerm;
use crate::vector::Vector;

/// Moreau envelope of `h` with index `alpha` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    /// `min_x ||x - u||^2 / (2 alpha) + h(x)`
    pub value: f64,
    /// `(u - proximal_point) / alpha`
    pub gradient: Vector,
    /// `prox_{alpha h}(u)`
    pub proximal_point: Vector,
}

pub fn moreau_envelope<T: ProximableTerm + ?Sized>(term: &T, u: &Vector, alpha: f64) -> Result<EnvelopeResult> {
    check_positive("alpha", alpha)?;
    let proximal_point = term.prox(u, alpha)?;
    let h = term
        .value(&proximal_point)
        .ok_or(Error::Unavailable { what: "term value" })?;
    let value = proximal_point.distance_squared(u) / (2.0 * alpha) + h;
    let gradient = (u - &proximal_point).scaled(1.0 / alpha);
    Ok(EnvelopeResult {
        value,
        gradient,
        proximal_point,
    })
}

use rand::Rng;

use crate::field::{sample_conditional, sample_unconditional, FieldFactor};
use crate::level::ProposalDensities;
use crate::pde::StrainResponse;
use crate::{Error, Result};

/// One accepted importance sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsDraw {
    pub indicator: bool,
    /// `log dP/dQ` at the drawn field.
    pub log_weight: f64,
    /// `indicator * exp(log_weight)`.
    pub z: f64,
    pub location: usize,
}

/// Strain supremum, or `None` when the solve failed in a way that only
/// affects this sample.
pub(crate) fn solve_or_discard(response: &dyn StrainResponse, xi: &[f64]) -> Result<Option<f64>> {
    match response.strain_sup(xi) {
        Ok(s) if s.is_finite() => Ok(Some(s)),
        Ok(_) | Err(Error::SolverDiverged { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Location from `w`, level from `g_tau`, conditional field, solve, weight.
/// Returns `None` for a discarded sample.
pub fn draw_is_sample<R: Rng + ?Sized>(
    b: f64,
    factor: &FieldFactor,
    proposals: &ProposalDensities,
    response: &dyn StrainResponse,
    rng: &mut R,
) -> Result<Option<IsDraw>> {
    let location = proposals.sample_location(rng);
    let level = proposals.sample_level(location, rng);
    let field = sample_conditional(factor, location, level, rng);
    let Some(strain) = solve_or_discard(response, &field.values)? else {
        return Ok(None);
    };
    let indicator = strain > b;
    let log_weight = -proposals.log_likelihood_ratio(&field.values);
    let z = if indicator { log_weight.exp() } else { 0.0 };
    Ok(Some(IsDraw { indicator, log_weight, z, location }))
}

/// Indicator of `strain_sup > b` under an unconditional field, or `None` for
/// a discarded sample.
pub fn draw_mc_sample<R: Rng + ?Sized>(
    b: f64,
    factor: &FieldFactor,
    response: &dyn StrainResponse,
    rng: &mut R,
) -> Result<Option<bool>> {
    let field = sample_unconditional(factor, rng);
    Ok(solve_or_discard(response, &field.values)?.map(|s| s > b))
}

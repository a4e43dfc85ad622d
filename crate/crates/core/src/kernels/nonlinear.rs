//! Nonlinear proxy: for every `(velocity, θ)` slice, the dealiased bracket
//! `{h, φ}` of the `(toroidal, radial)` plane with the field plane at that
//! theta.
//!
//! The variants differ only in how the padded transform sizes are chosen:
//! the original rounds the dealias minimum up to even, the optimized form
//! takes the smallest 7-smooth size.

use rayon::prelude::*;

use super::{FieldMoment, KernelVariant};
use crate::grid::{DistributionState, GridShape};
use crate::padding::{naive_plan, plan_padded_size, DealiasRule, PaddedPlan, PrimeSet};
use crate::spectral::{toroidal_logical, Bracket, GradientField, Spectrum2D};
use crate::{Error, Result};

/// Padded `(radial, toroidal)` plans for a shape under the given variant.
pub fn nonlinear_plans(shape: &GridShape, variant: KernelVariant) -> Result<(PaddedPlan, PaddedPlan)> {
    let rule = DealiasRule::THREE_HALVES;
    let nx = shape.n_radial() as u64;
    let ny = toroidal_logical(shape.n_toroidal());
    match variant {
        KernelVariant::Original => Ok((naive_plan(nx, rule)?, naive_plan(ny, rule)?)),
        KernelVariant::Optimized => {
            let primes = PrimeSet::default();
            Ok((
                plan_padded_size(nx, rule, &primes)?,
                plan_padded_size(ny, rule, &primes)?,
            ))
        }
    }
}

pub fn nonlinear_kernel(
    h: &DistributionState,
    phi: &FieldMoment,
    plan_x: &PaddedPlan,
    plan_y: &PaddedPlan,
) -> Result<DistributionState> {
    let shape = h.shape();
    if !phi.matches(&shape) {
        return Err(Error::Size("field moment does not match state shape".into()));
    }
    let (n_kx, n_ky) = (shape.n_radial(), shape.n_toroidal());
    let bracket = Bracket::from_plans(n_kx, n_ky, plan_x, plan_y)?;
    let plane = shape.plane_len();

    let phi_grad: Vec<GradientField> = (0..shape.n_theta())
        .into_par_iter()
        .map(|theta| {
            let s = Spectrum2D::from_vec(n_kx, n_ky, phi.plane(theta).to_vec())?;
            bracket.gradient(&s)
        })
        .collect::<Result<_>>()?;

    let mut out = DistributionState::zeros(shape)?;
    let n_theta = shape.n_theta();
    out.values_mut()
        .par_chunks_mut(plane)
        .zip(h.values().par_chunks(plane))
        .enumerate()
        .try_for_each(|(slice, (dst, src))| -> Result<()> {
            let f = Spectrum2D::from_vec(n_kx, n_ky, src.to_vec())?;
            let b = bracket.apply_with(&f, &phi_grad[slice % n_theta])?;
            dst.copy_from_slice(b.coefficients());
            Ok(())
        })?;
    Ok(out)
}

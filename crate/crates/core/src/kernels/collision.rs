//! Collision proxy: for every `(θ, ky, kx)`, the velocity-space vector is
//! multiplied by the dense matrix for that theta.
//!
//! The collision loop already carried explicit parallelism before any of the
//! other kernels were reworked, so there is a single implementation and both
//! variants run it.

use rayon::prelude::*;

use super::{CollisionMatrix, KernelVariant};
use crate::grid::DistributionState;
use crate::{Error, Result};

pub fn collision_kernel(
    h: &DistributionState,
    matrices: &CollisionMatrix,
    _variant: KernelVariant,
) -> Result<DistributionState> {
    let shape = h.shape();
    let m = shape.n_velocity();
    if matrices.m() != m || matrices.n_theta() != shape.n_theta() {
        return Err(Error::Size(format!(
            "need {} matrices of {m}x{m}, got {} of {}x{}",
            shape.n_theta(),
            matrices.n_theta(),
            matrices.m(),
            matrices.m()
        )));
    }
    let plane = shape.plane_len();
    let block = shape.config_len();
    let src = h.values();
    let mut out = DistributionState::zeros(shape)?;

    // Each task owns one output velocity row across all theta planes.
    out.values_mut()
        .par_chunks_mut(block)
        .enumerate()
        .for_each(|(v, dst)| {
            for (theta, o_plane) in dst.chunks_exact_mut(plane).enumerate() {
                let row = &matrices.matrix(theta)[v * m..(v + 1) * m];
                for (u, &a) in row.iter().enumerate() {
                    let base = u * block + theta * plane;
                    for (o, x) in o_plane.iter_mut().zip(&src[base..base + plane]) {
                        *o += x * a;
                    }
                }
            }
        });
    Ok(out)
}

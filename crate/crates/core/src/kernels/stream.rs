//! Stream proxy: periodic stencil along theta,
//! `out[..θ..] = Σ_d c_d·h[..(θ+d) mod n_θ..]`.
//!
//! The original form treats the stencil sum as a reduction into the output:
//! one full sweep over the state per tap, each a read-modify-write of the
//! whole output. The optimized form reorders the loops so every output
//! element is produced once from all of its taps. Taps are added in the same
//! ascending-offset order in both forms.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{KernelVariant, Stencil};
use crate::grid::DistributionState;
use crate::{Error, Result};

const TILE: usize = 32;

pub fn stream_kernel(h: &DistributionState, stencil: &Stencil, variant: KernelVariant) -> Result<DistributionState> {
    let shape = h.shape();
    let n_theta = shape.n_theta();
    if stencil.width() > n_theta {
        return Err(Error::Parameter(format!(
            "stencil width {} exceeds n_theta {n_theta}",
            stencil.width()
        )));
    }
    let plane = shape.plane_len();
    let block = shape.config_len();
    let src = h.values();
    let mut out = DistributionState::zeros(shape)?;
    let wrap = |theta: usize, d: isize| (theta as isize + d).rem_euclid(n_theta as isize) as usize;

    match variant {
        KernelVariant::Original => {
            for (d, c) in stencil.taps() {
                out.values_mut()
                    .par_chunks_mut(block)
                    .zip(src.par_chunks(block))
                    .for_each(|(dst, hv)| {
                        for theta in 0..n_theta {
                            let from = wrap(theta, d) * plane;
                            let row = &hv[from..from + plane];
                            for (o, x) in dst[theta * plane..(theta + 1) * plane].iter_mut().zip(row) {
                                *o += x * c;
                            }
                        }
                    });
            }
        }
        KernelVariant::Optimized => {
            let taps: Vec<(isize, f64)> = stencil.taps().collect();
            out.values_mut()
                .par_chunks_mut(block)
                .zip(src.par_chunks(block))
                .for_each(|(dst, hv)| {
                    let mut rows: Vec<(&[Complex64], f64)> = Vec::with_capacity(taps.len());
                    for (theta, o_plane) in dst.chunks_exact_mut(plane).enumerate() {
                        rows.clear();
                        rows.extend(taps.iter().map(|&(d, c)| {
                            let from = wrap(theta, d) * plane;
                            (&hv[from..from + plane], c)
                        }));
                        // Accumulate a tile of outputs in registers, then
                        // store each element once.
                        for (t, o_tile) in o_plane.chunks_mut(TILE).enumerate() {
                            let base = t * TILE;
                            let mut acc = [Complex64::new(0.0, 0.0); TILE];
                            let acc = &mut acc[..o_tile.len()];
                            for (row, c) in &rows {
                                for (a, x) in acc.iter_mut().zip(&row[base..base + o_tile.len()]) {
                                    *a += x * *c;
                                }
                            }
                            o_tile.copy_from_slice(acc);
                        }
                    }
                });
        }
    }
    Ok(out)
}

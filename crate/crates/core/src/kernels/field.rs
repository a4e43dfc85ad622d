//! Field proxy: `out[θ][ky][kx] = Σ_v w[v]·h[v][θ][ky][kx]`.
//!
//! The original form leaves parallelization to whatever the loop nest gets by
//! default, which here means none. The optimized form splits the moment by
//! theta plane and gives each plane its own task. Both accumulate over the
//! velocity index in ascending order, so results are bit-identical.

use rayon::prelude::*;

use super::{check_weights, FieldMoment, KernelVariant};
use crate::grid::DistributionState;
use crate::Result;

pub fn field_kernel(h: &DistributionState, weights: &[f64], variant: KernelVariant) -> Result<FieldMoment> {
    let shape = h.shape();
    check_weights(&shape, weights)?;
    let mut out = FieldMoment::zeros(&shape);
    let block = shape.config_len();
    let src = h.values();

    match variant {
        KernelVariant::Original => {
            let acc = out.values_mut();
            for (v, &w) in weights.iter().enumerate() {
                for (o, x) in acc.iter_mut().zip(&src[v * block..(v + 1) * block]) {
                    *o += x * w;
                }
            }
        }
        KernelVariant::Optimized => {
            let plane = shape.plane_len();
            out.values_mut()
                .par_chunks_mut(plane)
                .enumerate()
                .for_each(|(theta, acc)| {
                    for (v, &w) in weights.iter().enumerate() {
                        let base = v * block + theta * plane;
                        for (o, x) in acc.iter_mut().zip(&src[base..base + plane]) {
                            *o += x * w;
                        }
                    }
                });
        }
    }
    Ok(out)
}

//! Shear proxy: per-toroidal-mode radial shift with zero fill,
//! `out[..ky, kx] = h[..ky, kx + shift[ky]]`.
//!
//! The original form materializes the shifted state into a scratch table and
//! then copies it out. The optimized form gathers straight into the output.
//! Pure data movement, so both forms agree bitwise.

use num_complex::Complex64;
use rayon::prelude::*;

use super::KernelVariant;
use crate::grid::DistributionState;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Shift one radial row into `dst`.
#[inline]
fn shift_row(src: &[Complex64], dst: &mut [Complex64], shift: i64) {
    let n = src.len() as i64;
    for (kx, o) in dst.iter_mut().enumerate() {
        let from = kx as i64 + shift;
        *o = if (0..n).contains(&from) { src[from as usize] } else { ZERO };
    }
}

pub fn shear_kernel(h: &DistributionState, shifts: &[i64], variant: KernelVariant) -> Result<DistributionState> {
    let shape = h.shape();
    let n_radial = shape.n_radial();
    if shifts.len() != shape.n_toroidal() {
        return Err(Error::Size(format!(
            "{} shifts for {} toroidal modes",
            shifts.len(),
            shape.n_toroidal()
        )));
    }
    if let Some(s) = shifts.iter().find(|s| s.unsigned_abs() > n_radial as u64) {
        return Err(Error::Parameter(format!(
            "shift {s} exceeds n_radial {n_radial}"
        )));
    }
    let plane = shape.plane_len();
    let src = h.values();
    let mut out = DistributionState::zeros(shape)?;

    match variant {
        KernelVariant::Original => {
            let mut table = vec![ZERO; src.len()];
            table
                .par_chunks_mut(plane)
                .zip(src.par_chunks(plane))
                .for_each(|(t, hv)| {
                    for (ky, &s) in shifts.iter().enumerate() {
                        let r = ky * n_radial..(ky + 1) * n_radial;
                        shift_row(&hv[r.clone()], &mut t[r], s);
                    }
                });
            out.values_mut()
                .par_chunks_mut(plane)
                .zip(table.par_chunks(plane))
                .for_each(|(o, t)| o.copy_from_slice(t));
        }
        KernelVariant::Optimized => {
            out.values_mut()
                .par_chunks_mut(plane)
                .zip(src.par_chunks(plane))
                .for_each(|(o, hv)| {
                    for (ky, &s) in shifts.iter().enumerate() {
                        let r = ky * n_radial..(ky + 1) * n_radial;
                        shift_row(&hv[r.clone()], &mut o[r], s);
                    }
                });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{random_state, GridShape, Seed};

    fn shape() -> GridShape {
        GridShape::new(7, 3, 2, 2, 1, 2).unwrap()
    }

    #[test]
    fn zero_shift_is_identity() {
        let h = random_state(shape(), Seed(4)).unwrap();
        for v in KernelVariant::ALL {
            assert_eq!(shear_kernel(&h, &[0, 0, 0], v).unwrap(), h);
        }
    }

    #[test]
    fn full_shift_zero_fills() {
        let h = random_state(shape(), Seed(4)).unwrap();
        for v in KernelVariant::ALL {
            for s in [7, -7] {
                let out = shear_kernel(&h, &[s; 3], v).unwrap();
                assert!(out.values().iter().all(|z| *z == ZERO));
            }
        }
    }

    #[test]
    fn oversized_shift_rejected() {
        let h = random_state(shape(), Seed(4)).unwrap();
        assert!(shear_kernel(&h, &[0, 8, 0], KernelVariant::Optimized).is_err());
        assert!(shear_kernel(&h, &[0, 0], KernelVariant::Optimized).is_err());
    }
}

//! Index-by-index oracles for the kernels. Each walks the six logical
//! indices through [`GridShape::index`] and shares no loop structure with the
//! production code.

use num_complex::Complex64;

use super::{CollisionMatrix, FieldMoment, Stencil};
use crate::grid::{DistributionState, GridShape};
use crate::spectral::oracle::bracket_mode_sum;
use crate::spectral::Spectrum2D;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn velocity_points(s: &GridShape) -> impl Iterator<Item = (usize, usize, usize)> {
    let (ns, ne, nxi) = (s.n_species(), s.n_energy(), s.n_xi());
    (0..ns).flat_map(move |sp| (0..ne).flat_map(move |e| (0..nxi).map(move |xi| (sp, e, xi))))
}

fn config_points(s: &GridShape) -> impl Iterator<Item = (usize, usize, usize)> {
    let (nt, ny, nx) = (s.n_theta(), s.n_toroidal(), s.n_radial());
    (0..nt).flat_map(move |t| (0..ny).flat_map(move |ky| (0..nx).map(move |kx| (t, ky, kx))))
}

pub fn field_reference(h: &DistributionState, weights: &[f64]) -> FieldMoment {
    let s = h.shape();
    let mut out = FieldMoment::zeros(&s);
    for (t, ky, kx) in config_points(&s) {
        let mut acc = ZERO;
        for (sp, e, xi) in velocity_points(&s) {
            acc += h.get(sp, e, xi, t, ky, kx) * weights[s.velocity_index(sp, e, xi)];
        }
        out.values_mut()[(t * s.n_toroidal() + ky) * s.n_radial() + kx] = acc;
    }
    out
}

pub fn stream_reference(h: &DistributionState, stencil: &Stencil) -> DistributionState {
    let s = h.shape();
    let nt = s.n_theta() as isize;
    let mut out = DistributionState::zeros(s).expect("shape already allocated once");
    for (sp, e, xi) in velocity_points(&s) {
        for (t, ky, kx) in config_points(&s) {
            let mut acc = ZERO;
            for (d, c) in stencil.taps() {
                let src = (t as isize + d).rem_euclid(nt) as usize;
                acc += h.get(sp, e, xi, src, ky, kx) * c;
            }
            out.values_mut()[s.index(sp, e, xi, t, ky, kx)] = acc;
        }
    }
    out
}

pub fn shear_reference(h: &DistributionState, shifts: &[i64]) -> DistributionState {
    let s = h.shape();
    let nx = s.n_radial() as i64;
    let mut out = DistributionState::zeros(s).expect("shape already allocated once");
    for (sp, e, xi) in velocity_points(&s) {
        for (t, ky, kx) in config_points(&s) {
            let from = kx as i64 + shifts[ky];
            if (0..nx).contains(&from) {
                out.values_mut()[s.index(sp, e, xi, t, ky, kx)] =
                    h.get(sp, e, xi, t, ky, from as usize);
            }
        }
    }
    out
}

pub fn collision_reference(h: &DistributionState, a: &CollisionMatrix) -> DistributionState {
    let s = h.shape();
    let m = s.n_velocity();
    let mut out = DistributionState::zeros(s).expect("shape already allocated once");
    for (t, ky, kx) in config_points(&s) {
        let mat = a.matrix(t);
        for (sp, e, xi) in velocity_points(&s) {
            let row = s.velocity_index(sp, e, xi);
            let mut acc = ZERO;
            for (sp2, e2, xi2) in velocity_points(&s) {
                let col = s.velocity_index(sp2, e2, xi2);
                acc += h.get(sp2, e2, xi2, t, ky, kx) * mat[row * m + col];
            }
            out.values_mut()[s.index(sp, e, xi, t, ky, kx)] = acc;
        }
    }
    out
}

/// Per-slice quadratic mode-sum bracket. Quartic in the plane size, so keep
/// shapes small.
pub fn nonlinear_reference(h: &DistributionState, phi: &FieldMoment) -> DistributionState {
    let s = h.shape();
    let (nx, ny) = (s.n_radial(), s.n_toroidal());
    let mut out = DistributionState::zeros(s).expect("shape already allocated once");
    for (sp, e, xi) in velocity_points(&s) {
        for t in 0..s.n_theta() {
            let mut f = Spectrum2D::zeros(nx, ny);
            for ky in 0..ny {
                for kx in 0..nx {
                    f.coefficients_mut()[ky * nx + kx] = h.get(sp, e, xi, t, ky, kx);
                }
            }
            let g = Spectrum2D::from_vec(nx, ny, phi.plane(t).to_vec()).expect("plane size");
            let b = bracket_mode_sum(&f, &g);
            for ky in 0..ny {
                for kx in 0..nx {
                    out.values_mut()[s.index(sp, e, xi, t, ky, kx)] = b.coefficients()[ky * nx + kx];
                }
            }
        }
    }
    out
}

/// Largest element-wise `|a - b| / max(|b|, floor)`.
pub fn max_relative_diff(a: &[Complex64], b: &[Complex64], floor: f64) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / y.norm().max(floor))
        .fold(0.0, f64::max)
}

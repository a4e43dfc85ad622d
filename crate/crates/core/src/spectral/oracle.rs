//! Reference transforms defined by direct summation.
//!
//! These are deliberately slow and share no code with the production path
//! beyond the [`Spectrum2D`] container and its index helpers.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{kx_at, kx_slot, nyquist_kx, RealField2D, Spectrum2D};

/// `e^{sign·2πi·j/n}` for `j = 0..n`.
fn twiddles(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let t = sign * 2.0 * PI * j as f64 / n as f64;
            Complex64::new(t.cos(), t.sin())
        })
        .collect()
}

fn dft_2d(values: &[Complex64], n_x: usize, n_y: usize, sign: f64) -> Vec<Complex64> {
    assert_eq!(values.len(), n_x * n_y);
    let wx = twiddles(n_x, sign);
    let wy = twiddles(n_y, sign);
    let mut out = vec![Complex64::new(0.0, 0.0); n_x * n_y];
    for ky in 0..n_y {
        for kx in 0..n_x {
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..n_y {
                let phase_y = wy[(ky * y) % n_y];
                let row = &values[y * n_x..(y + 1) * n_x];
                for (x, v) in row.iter().enumerate() {
                    acc += v * (phase_y * wx[(kx * x) % n_x]);
                }
            }
            out[ky * n_x + kx] = acc;
        }
    }
    out
}

/// Unscaled forward DFT `F[ky][kx] = Σ f[y][x]·e^{-2πi(kx·x/n_x + ky·y/n_y)}`,
/// natural order `k = 0..n`.
pub fn dft_full(values: &[Complex64], n_x: usize, n_y: usize) -> Vec<Complex64> {
    dft_2d(values, n_x, n_y, -1.0)
}

/// Inverse of [`dft_full`], divided by `n_x·n_y`.
pub fn idft_full(spectrum: &[Complex64], n_x: usize, n_y: usize) -> Vec<Complex64> {
    let norm = 1.0 / (n_x * n_y) as f64;
    dft_2d(spectrum, n_x, n_y, 1.0)
        .into_iter()
        .map(|z| z * norm)
        .collect()
}

/// Forward oracle transform of a real field as a half spectrum: all `n_x`
/// radial modes in ascending signed order, toroidal modes `0..=n_y/2`.
pub fn dft_oracle_2d(field: &RealField2D) -> Spectrum2D {
    let (n_x, n_y) = (field.n_x(), field.n_y());
    let values: Vec<Complex64> = field.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let full = dft_full(&values, n_x, n_y);
    let n_ky = n_y / 2 + 1;
    let mut out = Spectrum2D::zeros(n_x, n_ky);
    for ky in 0..n_ky {
        for i in 0..n_x {
            let k = kx_at(n_x, i);
            out.set(k, ky, full[ky * n_x + k.rem_euclid(n_x as i64) as usize]);
        }
    }
    out
}

/// Inverse oracle transform on an `n_x × n_y` grid of a half spectrum,
/// scaled by `1/(n_x·n_y)`. Every stored mode goes to its grid slot, and
/// rows `ky ≥ 1` whose mirror `n_y − ky` is not stored also fill the mirror
/// with conjugates; the real part of the inverse is returned. This inverts
/// [`dft_oracle_2d`] exactly for real fields (Nyquist rows and columns
/// included) and agrees with `n_x·n_y` times [`super::to_real`] on padded
/// grids for spectra with a Hermitian `ky = 0` row and no Nyquist entry there.
pub fn idft_oracle_2d(spec: &Spectrum2D, n_x: usize, n_y: usize) -> RealField2D {
    let (n_kx, n_ky) = (spec.n_kx(), spec.n_ky());
    let mut full = vec![Complex64::new(0.0, 0.0); n_x * n_y];
    for ky in 0..n_ky {
        for i in 0..n_kx {
            let k = kx_at(n_kx, i);
            let c = spec.get(k, ky);
            let x = k.rem_euclid(n_x as i64) as usize;
            full[(ky % n_y) * n_x + x] += c;
            let mirror = (n_y - ky % n_y) % n_y;
            if ky > 0 && mirror >= n_ky {
                let xm = (-k).rem_euclid(n_x as i64) as usize;
                full[mirror * n_x + xm] += c.conj();
            }
        }
    }
    let values = idft_full(&full, n_x, n_y).into_iter().map(|z| z.re).collect();
    RealField2D::from_vec(n_x, n_y, values).expect("sizes match")
}

/// One term of the full (both signs of `ky`) expansion of a half spectrum.
#[derive(Debug, Clone, Copy)]
struct Mode {
    kx: i64,
    ky: i64,
    value: Complex64,
    /// Wavenumber multiplying `∂/∂x`; zero for the unpaired Nyquist column.
    dx: f64,
}

fn expand(spec: &Spectrum2D) -> Vec<Mode> {
    let n_kx = spec.n_kx();
    let nyq = nyquist_kx(n_kx);
    let dx_of = |k: i64| if Some(k) == nyq { 0.0 } else { k as f64 };
    let mut modes = Vec::new();
    for i in 0..n_kx {
        let k = kx_at(n_kx, i);
        if Some(k) == nyq || spec.n_ky() == 0 {
            continue;
        }
        // Hermitian part of the ky = 0 row.
        let partner = kx_slot(n_kx, -k).map(|_| spec.get(-k, 0)).unwrap_or_default();
        let value = (spec.get(k, 0) + partner.conj()) * 0.5;
        modes.push(Mode { kx: k, ky: 0, value, dx: k as f64 });
    }
    for ky in 1..spec.n_ky() {
        for i in 0..n_kx {
            let k = kx_at(n_kx, i);
            let c = spec.get(k, ky);
            modes.push(Mode { kx: k, ky: ky as i64, value: c, dx: dx_of(k) });
            modes.push(Mode { kx: -k, ky: -(ky as i64), value: c.conj(), dx: -dx_of(k) });
        }
    }
    modes
}

/// Quadratic mode-sum evaluation of `{f, g}` restricted to the retained
/// modes: every retained pair `(p, q)` contributes
/// `-(p̂x·qy − py·q̂x)·f(p)·g(q)` to mode `p + q`, where `p̂x` is the
/// derivative wavenumber (zero on the Nyquist column).
pub fn bracket_mode_sum(f: &Spectrum2D, g: &Spectrum2D) -> Spectrum2D {
    assert_eq!((f.n_kx(), f.n_ky()), (g.n_kx(), g.n_ky()));
    let (n_kx, n_ky) = (f.n_kx(), f.n_ky());
    let fm = expand(f);
    let gm = expand(g);
    let mut out = Spectrum2D::zeros(n_kx, n_ky);
    for p in &fm {
        for q in &gm {
            let ky = p.ky + q.ky;
            if ky < 0 || ky >= n_ky as i64 {
                continue;
            }
            let kx = p.kx + q.kx;
            let Some(slot) = kx_slot(n_kx, kx) else { continue };
            let w = -(p.dx * q.ky as f64 - p.ky as f64 * q.dx);
            if w == 0.0 {
                continue;
            }
            out.coefficients_mut()[ky as usize * n_kx + slot] += p.value * q.value * w;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field() {
        let f = RealField2D::from_fn(4, 4, |_, _| 1.5);
        let s = dft_oracle_2d(&f);
        for ky in 0..s.n_ky() {
            for i in 0..4 {
                let k = kx_at(4, i);
                let want = if (k, ky) == (0, 0) { 16.0 * 1.5 } else { 0.0 };
                assert!((s.get(k, ky) - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_cosine() {
        let (nx, ny) = (8, 4);
        let f = RealField2D::from_fn(nx, ny, |x, _| (2.0 * PI * x as f64 / nx as f64).cos());
        let s = dft_oracle_2d(&f);
        let half = (nx * ny) as f64 / 2.0;
        for ky in 0..s.n_ky() {
            for i in 0..nx {
                let k = kx_at(nx, i);
                let want = if ky == 0 && k.abs() == 1 { half } else { 0.0 };
                assert!((s.get(k, ky) - Complex64::new(want, 0.0)).norm() < 1e-12, "({k},{ky})");
            }
        }
    }

    #[test]
    fn half_spectrum_round_trip() {
        for (nx, ny) in [(8, 4), (7, 5), (6, 6)] {
            let f = RealField2D::from_fn(nx, ny, |x, y| ((x * 7 + y * 3) as f64 * 0.61).sin());
            let back = idft_oracle_2d(&dft_oracle_2d(&f), nx, ny);
            for (a, b) in f.values().iter().zip(back.values()) {
                assert!((a - b).abs() < 1e-12, "{nx}x{ny}");
            }
        }
    }

    #[test]
    fn full_round_trip() {
        let (nx, ny) = (8, 4);
        let vals: Vec<Complex64> = (0..nx * ny)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let back = idft_full(&dft_full(&vals, nx, ny), nx, ny);
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn mode_sum_antisymmetric() {
        let mut f = Spectrum2D::zeros(6, 3);
        f.set(1, 1, Complex64::new(0.3, -0.2));
        f.set(-2, 2, Complex64::new(-0.1, 0.5));
        f.set(2, 0, Complex64::new(0.7, 0.1));
        let b = bracket_mode_sum(&f, &f);
        assert!(b.coefficients().iter().all(|c| c.norm() < 1e-15));
    }
}

//! Two-dimensional pseudo-spectral transforms and the dealiased bracket.
//!
//! # Conventions
//!
//! A [`Spectrum2D`] is the half spectrum of a real field on the periodic box
//! `[0, 2π)²`: toroidal modes `ky = 0..n_ky` and radial modes `kx` over the
//! signed range `[-(n_kx / 2), n_kx - n_kx / 2)`, stored in ascending order.
//! Mode `(kx, ky)` with `ky > 0` stands for the pair
//! `c·e^{i(kx·x + ky·y)} + conj(c)·e^{-i(kx·x + ky·y)}`. The `ky = 0` row is
//! read through its Hermitian part `(c(kx) + conj(c(-kx))) / 2`; for even
//! `n_kx` the unpaired `kx = -n_kx/2` entry of that row carries no
//! real-field content and is ignored.
//!
//! Transform scaling: [`to_real`] evaluates the mode sum directly (no
//! `1/N`), so a coefficient keeps its amplitude whatever the padded size.
//! [`to_spectrum`] divides the unscaled forward transform by `n_x·n_y`, which
//! makes `to_spectrum ∘ to_real` the identity on retained modes. The direct
//! DFT in [`oracle`] is forward-unscaled with a `1/(n_x·n_y)` inverse.
//!
//! Production transforms use `rustfft` (mixed radix with Rader/Bluestein
//! fallbacks for prime sizes); the [`oracle`] module defines the contract
//! they are tested against.

pub mod bench;
pub mod oracle;

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::padding::{dealias_minimum, DealiasRule, PaddedPlan};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Lowest signed mode index for `n` retained modes.
pub fn kx_min(n: usize) -> i64 {
    -((n / 2) as i64)
}

/// Signed mode of storage slot `i` for `n` retained modes.
pub fn kx_at(n: usize, i: usize) -> i64 {
    i as i64 + kx_min(n)
}

/// Storage slot of signed mode `k`, if retained.
pub fn kx_slot(n: usize, k: i64) -> Option<usize> {
    let i = k - kx_min(n);
    (0..n as i64).contains(&i).then_some(i as usize)
}

/// Signed mode that has no partner `-k` in the retained range.
pub fn nyquist_kx(n: usize) -> Option<i64> {
    (n % 2 == 0 && n > 0).then(|| kx_min(n))
}

/// Half spectrum `[ky][kx]` of a real 2D field.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    n_kx: usize,
    n_ky: usize,
    coefficients: Vec<Complex64>,
}

impl Spectrum2D {
    pub fn zeros(n_kx: usize, n_ky: usize) -> Self {
        Self {
            n_kx,
            n_ky,
            coefficients: vec![ZERO; n_kx * n_ky],
        }
    }

    pub fn from_vec(n_kx: usize, n_ky: usize, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != n_kx * n_ky {
            return Err(Error::Size(format!(
                "{n_ky}x{n_kx} spectrum needs {} coefficients, got {}",
                n_kx * n_ky,
                coefficients.len()
            )));
        }
        Ok(Self {
            n_kx,
            n_ky,
            coefficients,
        })
    }

    pub fn n_kx(&self) -> usize {
        self.n_kx
    }

    pub fn n_ky(&self) -> usize {
        self.n_ky
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coefficients
    }

    /// Coefficient at signed `kx`, or zero outside the retained range.
    pub fn get(&self, kx: i64, ky: usize) -> Complex64 {
        match kx_slot(self.n_kx, kx) {
            Some(i) if ky < self.n_ky => self.coefficients[ky * self.n_kx + i],
            _ => ZERO,
        }
    }

    pub fn set(&mut self, kx: i64, ky: usize, value: Complex64) {
        let i = kx_slot(self.n_kx, kx).expect("kx outside retained range");
        assert!(ky < self.n_ky, "ky outside retained range");
        self.coefficients[ky * self.n_kx + i] = value;
    }

    /// Projection onto the spectra of real fields: the `ky = 0` row is
    /// replaced by its Hermitian part and its unpaired Nyquist entry zeroed.
    pub fn hermitian_part(&self) -> Self {
        let mut out = self.clone();
        if self.n_ky == 0 {
            return out;
        }
        for i in 0..self.n_kx {
            let k = kx_at(self.n_kx, i);
            out.coefficients[i] = if Some(k) == nyquist_kx(self.n_kx) {
                ZERO
            } else {
                (self.get(k, 0) + self.get(-k, 0).conj()) * 0.5
            };
        }
        out
    }

    /// Whether the `ky = 0` row satisfies `c(-kx) = conj(c(kx))` for all
    /// paired modes, to absolute tolerance `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        if self.n_ky == 0 {
            return true;
        }
        (0..self.n_kx).all(|i| {
            let k = kx_at(self.n_kx, i);
            kx_slot(self.n_kx, -k).is_none() || (self.get(k, 0) - self.get(-k, 0).conj()).norm() <= tol
        })
    }

    pub fn is_finite(&self) -> bool {
        self.coefficients
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `∂/∂x`: multiply by `i·kx`, with the unpaired Nyquist mode zeroed.
    pub fn d_dx(&self) -> Self {
        let nyq = nyquist_kx(self.n_kx);
        let mut out = self.clone();
        for ky in 0..self.n_ky {
            for i in 0..self.n_kx {
                let k = kx_at(self.n_kx, i);
                let c = &mut out.coefficients[ky * self.n_kx + i];
                *c = if Some(k) == nyq {
                    ZERO
                } else {
                    *c * Complex64::new(0.0, k as f64)
                };
            }
        }
        out
    }

    /// `∂/∂y`: multiply by `i·ky`.
    pub fn d_dy(&self) -> Self {
        let mut out = self.clone();
        for ky in 0..self.n_ky {
            let m = Complex64::new(0.0, ky as f64);
            for c in &mut out.coefficients[ky * self.n_kx..(ky + 1) * self.n_kx] {
                *c *= m;
            }
        }
        out
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.coefficients {
            *c *= a;
        }
    }

    /// `self + a·other`.
    pub fn add_scaled(&self, a: f64, other: &Self) -> Result<Self> {
        if (self.n_kx, self.n_ky) != (other.n_kx, other.n_ky) {
            return Err(Error::Size("spectra differ in shape".into()));
        }
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(x, y)| x + y * a)
            .collect();
        Ok(Self {
            n_kx: self.n_kx,
            n_ky: self.n_ky,
            coefficients,
        })
    }
}

/// Real samples `[y][x]` on a uniform periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField2D {
    n_x: usize,
    n_y: usize,
    values: Vec<f64>,
}

impl RealField2D {
    pub fn from_vec(n_x: usize, n_y: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_x * n_y {
            return Err(Error::Size(format!(
                "{n_y}x{n_x} field needs {} values, got {}",
                n_x * n_y,
                values.len()
            )));
        }
        Ok(Self { n_x, n_y, values })
    }

    pub fn from_fn(n_x: usize, n_y: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let values = (0..n_y)
            .flat_map(|y| (0..n_x).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self { n_x, n_y, values }
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.n_x + x]
    }
}

/// Planned forward and inverse transforms for one padded `n_x × n_y` grid.
#[derive(Clone)]
pub struct SpectralGrid {
    n_x: usize,
    n_y: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n_x", &self.n_x)
            .field("n_y", &self.n_y)
            .finish()
    }
}

impl SpectralGrid {
    pub fn new(n_x: usize, n_y: usize) -> Result<Self> {
        if n_x == 0 || n_y == 0 {
            return Err(Error::Size("grid sizes must be at least 1".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_x,
            n_y,
            fwd_x: planner.plan_fft_forward(n_x),
            inv_x: planner.plan_fft_inverse(n_x),
            fwd_y: planner.plan_fft_forward(n_y),
            inv_y: planner.plan_fft_inverse(n_y),
        })
    }

    pub fn from_plans(plan_x: &PaddedPlan, plan_y: &PaddedPlan) -> Result<Self> {
        Self::new(plan_x.len(), plan_y.len())
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    fn check_embed(&self, n_kx: usize, n_ky: usize) -> Result<()> {
        if n_kx > self.n_x || n_ky == 0 || 2 * n_ky - 1 > self.n_y {
            return Err(Error::Size(format!(
                "{n_ky}x{n_kx} spectrum does not fit a {}x{} grid",
                self.n_y, self.n_x
            )));
        }
        Ok(())
    }

    /// Zero-embed the retained modes into the grid and evaluate the real field.
    pub fn to_real(&self, spec: &Spectrum2D) -> Result<RealField2D> {
        let (n_kx, n_ky) = (spec.n_kx(), spec.n_ky());
        self.check_embed(n_kx, n_ky)?;
        let (nx, ny) = (self.n_x, self.n_y);
        let wrap = |k: i64| k.rem_euclid(nx as i64) as usize;

        // Rows ky = 0..n_ky hold the modes; rows ny-ky hold their conjugates.
        let mut grid = vec![ZERO; nx * ny];
        let herm = spec.hermitian_part();
        for i in 0..n_kx {
            let k = kx_at(n_kx, i);
            grid[wrap(k)] = herm.coefficients[i];
        }
        for ky in 1..n_ky {
            for i in 0..n_kx {
                let k = kx_at(n_kx, i);
                let c = spec.coefficients[ky * n_kx + i];
                grid[ky * nx + wrap(k)] = c;
                grid[(ny - ky) * nx + wrap(-k)] = c.conj();
            }
        }

        let mut scratch = vec![ZERO; self.inv_x.get_inplace_scratch_len().max(self.inv_y.get_inplace_scratch_len())];
        self.inv_x
            .process_with_scratch(&mut grid[..n_ky * nx], &mut scratch);
        if n_ky > 1 {
            self.inv_x
                .process_with_scratch(&mut grid[(ny - n_ky + 1) * nx..], &mut scratch);
        }
        let mut cols = transpose(&grid, ny, nx);
        self.inv_y.process_with_scratch(&mut cols, &mut scratch);

        let mut values = vec![0.0; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                values[y * nx + x] = cols[x * ny + y].re;
            }
        }
        Ok(RealField2D {
            n_x: nx,
            n_y: ny,
            values,
        })
    }

    /// Forward transform of a real field, scaled by `1/(n_x·n_y)` and
    /// truncated to `n_kx × n_ky` retained modes.
    pub fn to_spectrum(&self, field: &RealField2D, n_kx: usize, n_ky: usize) -> Result<Spectrum2D> {
        if (field.n_x, field.n_y) != (self.n_x, self.n_y) {
            return Err(Error::Size(format!(
                "field is {}x{}, grid is {}x{}",
                field.n_y, field.n_x, self.n_y, self.n_x
            )));
        }
        if n_kx > self.n_x || n_ky > self.n_y / 2 + 1 {
            return Err(Error::Size(format!(
                "cannot truncate a {}x{} field to {n_ky}x{n_kx} modes",
                self.n_y, self.n_x
            )));
        }
        let (nx, ny) = (self.n_x, self.n_y);
        let mut grid: Vec<Complex64> = field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut scratch = vec![ZERO; self.fwd_x.get_inplace_scratch_len().max(self.fwd_y.get_inplace_scratch_len())];
        self.fwd_x.process_with_scratch(&mut grid, &mut scratch);

        // Only the retained kx columns need the y transform.
        let mut cols = vec![ZERO; n_kx * ny];
        for i in 0..n_kx {
            let xi = kx_at(n_kx, i).rem_euclid(nx as i64) as usize;
            for y in 0..ny {
                cols[i * ny + y] = grid[y * nx + xi];
            }
        }
        if n_kx > 0 {
            self.fwd_y.process_with_scratch(&mut cols, &mut scratch);
        }

        let norm = 1.0 / (nx * ny) as f64;
        let mut coefficients = vec![ZERO; n_kx * n_ky];
        for ky in 0..n_ky {
            for i in 0..n_kx {
                coefficients[ky * n_kx + i] = cols[i * ny + ky] * norm;
            }
        }
        Ok(Spectrum2D {
            n_kx,
            n_ky,
            coefficients,
        })
    }

    /// Unscaled forward complex 2D transform of `[y][x]` samples, output in
    /// natural FFT order `[ky][kx]` with `k = 0..n`.
    pub fn forward_full(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        self.full(values, &self.fwd_x, &self.fwd_y, 1.0)
    }

    /// Inverse of [`forward_full`](Self::forward_full), scaled by `1/(n_x·n_y)`.
    pub fn inverse_full(&self, spectrum: &[Complex64]) -> Result<Vec<Complex64>> {
        let norm = 1.0 / (self.n_x * self.n_y) as f64;
        self.full(spectrum, &self.inv_x, &self.inv_y, norm)
    }

    fn full(
        &self,
        input: &[Complex64],
        along_x: &Arc<dyn Fft<f64>>,
        along_y: &Arc<dyn Fft<f64>>,
        norm: f64,
    ) -> Result<Vec<Complex64>> {
        let (nx, ny) = (self.n_x, self.n_y);
        if input.len() != nx * ny {
            return Err(Error::Size(format!(
                "expected {} samples, got {}",
                nx * ny,
                input.len()
            )));
        }
        let mut grid = input.to_vec();
        let mut scratch = vec![ZERO; along_x.get_inplace_scratch_len().max(along_y.get_inplace_scratch_len())];
        along_x.process_with_scratch(&mut grid, &mut scratch);
        let mut cols = transpose(&grid, ny, nx);
        along_y.process_with_scratch(&mut cols, &mut scratch);
        let mut out = transpose(&cols, nx, ny);
        if norm != 1.0 {
            for z in &mut out {
                *z *= norm;
            }
        }
        Ok(out)
    }
}

/// `rows × cols` row-major into `cols × rows` row-major.
fn transpose(a: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = a[r * cols + c];
        }
    }
    out
}

pub fn to_real(spec: &Spectrum2D, plan_x: &PaddedPlan, plan_y: &PaddedPlan) -> Result<RealField2D> {
    SpectralGrid::from_plans(plan_x, plan_y)?.to_real(spec)
}

pub fn to_spectrum(field: &RealField2D, n_kx: usize, n_ky: usize) -> Result<Spectrum2D> {
    SpectralGrid::new(field.n_x, field.n_y)?.to_spectrum(field, n_kx, n_ky)
}

/// Logical length used to plan the toroidal (y) transform: the half spectrum
/// `0..n_ky` expands to the signed range `(-n_ky, n_ky)`.
pub fn toroidal_logical(n_ky: usize) -> u64 {
    2 * n_ky as u64
}

/// Reusable evaluator for `{f, g} = ∂x f·∂y g − ∂y f·∂x g` on fixed logical
/// and padded sizes.
#[derive(Debug, Clone)]
pub struct Bracket {
    n_kx: usize,
    n_ky: usize,
    grid: SpectralGrid,
}

/// Derivatives of one operand sampled on the padded grid.
#[derive(Debug, Clone)]
pub struct GradientField {
    pub dx: RealField2D,
    pub dy: RealField2D,
}

impl Bracket {
    /// Fails unless the padded sizes satisfy the 3/2 rule for `n_kx` radial
    /// and `2·n_ky` toroidal modes.
    pub fn new(n_kx: usize, n_ky: usize, n_x: usize, n_y: usize) -> Result<Self> {
        if n_kx == 0 || n_ky == 0 {
            return Err(Error::Size("bracket needs at least one mode per axis".into()));
        }
        let rule = DealiasRule::THREE_HALVES;
        let min_x = dealias_minimum(n_kx as u64, rule)? as usize;
        let min_y = dealias_minimum(toroidal_logical(n_ky), rule)? as usize;
        if n_x < min_x || n_y < min_y {
            return Err(Error::Parameter(format!(
                "padded grid {n_y}x{n_x} is below the 3/2 dealias minimum {min_y}x{min_x}"
            )));
        }
        Ok(Self {
            n_kx,
            n_ky,
            grid: SpectralGrid::new(n_x, n_y)?,
        })
    }

    pub fn from_plans(n_kx: usize, n_ky: usize, plan_x: &PaddedPlan, plan_y: &PaddedPlan) -> Result<Self> {
        Self::new(n_kx, n_ky, plan_x.len(), plan_y.len())
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    fn check(&self, s: &Spectrum2D) -> Result<()> {
        if (s.n_kx, s.n_ky) != (self.n_kx, self.n_ky) {
            return Err(Error::Size(format!(
                "operand is {}x{} modes, bracket expects {}x{}",
                s.n_ky, s.n_kx, self.n_ky, self.n_kx
            )));
        }
        Ok(())
    }

    pub fn gradient(&self, s: &Spectrum2D) -> Result<GradientField> {
        self.check(s)?;
        Ok(GradientField {
            dx: self.grid.to_real(&s.d_dx())?,
            dy: self.grid.to_real(&s.d_dy())?,
        })
    }

    /// `{f, g}` with `g` already sampled.
    pub fn apply_with(&self, f: &Spectrum2D, g: &GradientField) -> Result<Spectrum2D> {
        let fg = self.gradient(f)?;
        let values = fg
            .dx
            .values
            .iter()
            .zip(&g.dy.values)
            .zip(fg.dy.values.iter().zip(&g.dx.values))
            .map(|((fx, gy), (fy, gx))| fx * gy - fy * gx)
            .collect();
        let product = RealField2D {
            n_x: self.grid.n_x,
            n_y: self.grid.n_y,
            values,
        };
        self.grid.to_spectrum(&product, self.n_kx, self.n_ky)
    }

    pub fn apply(&self, f: &Spectrum2D, g: &Spectrum2D) -> Result<Spectrum2D> {
        self.check(f)?;
        let gg = self.gradient(g)?;
        self.apply_with(f, &gg)
    }
}

/// Dealiased Poisson bracket `{f, g}` truncated to the retained modes.
pub fn bracket(f: &Spectrum2D, g: &Spectrum2D, plan_x: &PaddedPlan, plan_y: &PaddedPlan) -> Result<Spectrum2D> {
    if (f.n_kx, f.n_ky) != (g.n_kx, g.n_ky) {
        return Err(Error::Size(format!(
            "operands differ: {}x{} vs {}x{}",
            f.n_ky, f.n_kx, g.n_ky, g.n_kx
        )));
    }
    Bracket::from_plans(f.n_kx, f.n_ky, plan_x, plan_y)?.apply(f, g)
}

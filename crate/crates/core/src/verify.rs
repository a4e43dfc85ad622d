//! Equivalence and oracle suites run by `gyroproxy verify`.
//!
//! Every suite reports the largest error it saw against its tolerance. All
//! columns except `seconds` are pure functions of the case and seed.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;

use crate::grid::{GridShape, Seed, UnitStream};
use crate::kernels::reference::{
    collision_reference, field_reference, max_relative_diff, nonlinear_reference, shear_reference,
    stream_reference,
};
use crate::kernels::timing::{run_kernel, KernelInputs};
use crate::kernels::{nonlinear_kernel, nonlinear_plans, KernelId, KernelVariant};
use crate::padding::{dealias_minimum, plan_padded_size, DealiasRule, PrimeSet};
use crate::report::Metadata;
use crate::spectral::oracle::{bracket_mode_sum, dft_oracle_2d};
use crate::spectral::{bracket, toroidal_logical, RealField2D, SpectralGrid, Spectrum2D};
use crate::Result;

pub const VERIFY_HEADER: &str = "suite,case,seed,checked,max_error,tolerance,status,seconds";

/// Number of seeds each randomized suite draws, starting at the given seed.
pub const SEEDS_PER_SUITE: u64 = 4;

// Stream tag for spectra and fields drawn by the suites.
const SPECTRUM_STREAM: u64 = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub checked: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub seconds: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub metadata: Metadata,
    pub case: String,
    pub seed: u64,
    pub results: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(SuiteResult::passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.results.iter().filter(|r| !r.passed()).map(|r| r.suite).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n{VERIFY_HEADER}\n", self.metadata.line());
        for r in &self.results {
            let _ = writeln!(
                s,
                "{},{},{},{},{:.6e},{:.1e},{},{:.6e}",
                r.suite,
                self.case,
                self.seed,
                r.checked,
                r.max_error,
                r.tolerance,
                if r.passed() { "pass" } else { "fail" },
                r.seconds
            );
        }
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from(
            "| suite | checked | max error | tolerance | status |\n\
             |-------|--------:|----------:|----------:|--------|\n",
        );
        for r in &self.results {
            let _ = writeln!(
                s,
                "| {} | {} | {:.3e} | {:.1e} | {} |",
                r.suite,
                r.checked,
                r.max_error,
                r.tolerance,
                if r.passed() { "pass" } else { "FAIL" }
            );
        }
        s
    }
}

/// Drop the metadata line and the trailing `seconds` column.
pub fn non_timing_columns(csv: &str) -> Vec<String> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
        .collect()
}

/// Uniform random half spectrum projected onto real fields.
pub fn random_spectrum(n_kx: usize, n_ky: usize, stream: &mut UnitStream) -> Spectrum2D {
    let values = (0..n_kx * n_ky).map(|_| stream.next_complex()).collect();
    Spectrum2D::from_vec(n_kx, n_ky, values)
        .expect("length matches")
        .hermitian_part()
}

pub fn random_field(n_x: usize, n_y: usize, stream: &mut UnitStream) -> RealField2D {
    let values = (0..n_x * n_y).map(|_| stream.next_unit()).collect();
    RealField2D::from_vec(n_x, n_y, values).expect("length matches")
}

/// `max|a − b| / max|b|`, the scale-aware error used against oracles.
pub fn normwise_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn suite(
    name: &'static str,
    tolerance: f64,
    f: impl FnOnce() -> Result<(usize, f64)>,
) -> Result<SuiteResult> {
    let t = Instant::now();
    let (checked, max_error) = f()?;
    Ok(SuiteResult {
        suite: name,
        checked,
        max_error,
        tolerance,
        seconds: t.elapsed().as_secs_f64(),
    })
}

fn seeds(seed: u64) -> impl Iterator<Item = Seed> {
    (0..SEEDS_PER_SUITE).map(move |i| Seed(seed.wrapping_add(i)))
}

/// Planner against a brute-force scan for `n_logical` in `1..=limit`;
/// error is the number of disagreements.
pub fn padding_disagreements(limit: u64) -> Result<usize> {
    let rule = DealiasRule::THREE_HALVES;
    let primes = PrimeSet::default();
    let mut bad = 0;
    for n in 1..=limit {
        let min = dealias_minimum(n, rule)?;
        let want = (min..).find(|&m| primes.is_smooth(m)).expect("smooth numbers are unbounded");
        if plan_padded_size(n, rule, &primes)?.n_padded() != want {
            bad += 1;
        }
    }
    Ok(bad)
}

pub fn run_verify(case: &str, shape: GridShape, seed: u64) -> Result<VerifyReport> {
    let mut results = Vec::new();
    let (n_kx, n_ky) = (shape.n_radial(), shape.n_toroidal());

    results.push(suite("padding_minimality", 0.0, || {
        Ok((4096, padding_disagreements(4096)? as f64))
    })?);

    results.push(suite("spectral_round_trip", 1e-12, || {
        let (px, py) = nonlinear_plans(&shape, KernelVariant::Optimized)?;
        let grid = SpectralGrid::from_plans(&px, &py)?;
        let mut worst: f64 = 0.0;
        for s in seeds(seed) {
            let spec = random_spectrum(n_kx, n_ky, &mut s.stream(SPECTRUM_STREAM));
            let back = grid.to_spectrum(&grid.to_real(&spec)?, n_kx, n_ky)?;
            worst = worst.max(normwise_error(back.coefficients(), spec.coefficients()));
        }
        Ok((SEEDS_PER_SUITE as usize, worst))
    })?);

    results.push(suite("spectral_dft_oracle", 1e-12, || {
        let (nx, ny) = (12, 10);
        let grid = SpectralGrid::new(nx, ny)?;
        let mut worst: f64 = 0.0;
        for s in seeds(seed) {
            let field = random_field(nx, ny, &mut s.stream(SPECTRUM_STREAM));
            let fast = grid.to_spectrum(&field, nx, ny / 2 + 1)?;
            let mut slow = dft_oracle_2d(&field);
            slow.scale(1.0 / (nx * ny) as f64);
            worst = worst.max(normwise_error(fast.coefficients(), slow.coefficients()));
        }
        Ok((SEEDS_PER_SUITE as usize, worst))
    })?);

    results.push(suite("bracket_mode_sum", 1e-12, || {
        let (mx, my) = (n_kx.min(16), n_ky.min(8));
        let rule = DealiasRule::THREE_HALVES;
        let primes = PrimeSet::default();
        let px = plan_padded_size(mx as u64, rule, &primes)?;
        let py = plan_padded_size(toroidal_logical(my), rule, &primes)?;
        let mut worst: f64 = 0.0;
        for s in seeds(seed) {
            let mut st = s.stream(SPECTRUM_STREAM);
            let f = random_spectrum(mx, my, &mut st);
            let g = random_spectrum(mx, my, &mut st);
            let fast = bracket(&f, &g, &px, &py)?;
            let slow = bracket_mode_sum(&f, &g);
            worst = worst.max(normwise_error(fast.coefficients(), slow.coefficients()));
            let self_bracket = bracket(&f, &f, &px, &py)?;
            let abs = self_bracket.coefficients().iter().map(|z| z.norm()).fold(0.0, f64::max);
            worst = worst.max(abs);
        }
        Ok((SEEDS_PER_SUITE as usize, worst))
    })?);

    let inputs: Vec<KernelInputs> = seeds(seed)
        .map(|s| KernelInputs::generate(shape, s))
        .collect::<Result<_>>()?;

    results.push(suite("field_oracle", 1e-13, || {
        let mut worst: f64 = 0.0;
        for inp in &inputs {
            let oracle = field_reference(&inp.h, &inp.weights);
            for v in KernelVariant::ALL {
                let out = run_kernel(KernelId::Field, v, inp)?;
                worst = worst.max(normwise_error(&out, oracle.values()));
            }
        }
        Ok((inputs.len(), worst))
    })?);

    results.push(suite("stream_variants", 1e-13, || {
        let mut worst: f64 = 0.0;
        for inp in &inputs {
            let a = run_kernel(KernelId::Stream, KernelVariant::Original, inp)?;
            let b = run_kernel(KernelId::Stream, KernelVariant::Optimized, inp)?;
            worst = worst.max(max_relative_diff(&b, &a, f64::MIN_POSITIVE));
            let oracle = stream_reference(&inp.h, &inp.stencil);
            worst = worst.max(normwise_error(&b, oracle.values()));
        }
        Ok((inputs.len(), worst))
    })?);

    results.push(suite("shear_variants", 0.0, || {
        let mut mismatches = 0usize;
        for inp in &inputs {
            let a = run_kernel(KernelId::Shear, KernelVariant::Original, inp)?;
            let b = run_kernel(KernelId::Shear, KernelVariant::Optimized, inp)?;
            let oracle = shear_reference(&inp.h, &inp.shifts);
            mismatches += a.iter().zip(&b).filter(|(x, y)| x != y).count();
            mismatches += b.iter().zip(oracle.values()).filter(|(x, y)| x != y).count();
        }
        Ok((inputs.len(), mismatches as f64))
    })?);

    results.push(suite("collision_oracle", 1e-12, || {
        let mut worst: f64 = 0.0;
        for inp in &inputs {
            let oracle = collision_reference(&inp.h, &inp.matrices);
            for v in KernelVariant::ALL {
                let out = run_kernel(KernelId::Collision, v, inp)?;
                worst = worst.max(normwise_error(&out, oracle.values()));
            }
        }
        Ok((inputs.len(), worst))
    })?);

    results.push(suite("nonlinear_variants", 1e-12, || {
        let mut worst: f64 = 0.0;
        for inp in &inputs {
            let a = run_kernel(KernelId::Nonlinear, KernelVariant::Original, inp)?;
            let b = run_kernel(KernelId::Nonlinear, KernelVariant::Optimized, inp)?;
            worst = worst.max(normwise_error(&b, &a));
        }
        Ok((inputs.len(), worst))
    })?);

    results.push(suite("nonlinear_mode_sum", 1e-12, || {
        // The mode-sum oracle is quartic in the plane size, so it runs on a
        // reduced copy of the case.
        let small = GridShape::new(n_kx.min(16), n_ky.min(8), shape.n_theta().min(2), 1, 1, 2)?;
        let mut worst: f64 = 0.0;
        for s in seeds(seed) {
            let inp = KernelInputs::generate(small, s)?;
            let (px, py) = nonlinear_plans(&small, KernelVariant::Optimized)?;
            let out = nonlinear_kernel(&inp.h, &inp.phi, &px, &py)?;
            let oracle = nonlinear_reference(&inp.h, &inp.phi);
            worst = worst.max(normwise_error(out.values(), oracle.values()));
        }
        Ok((SEEDS_PER_SUITE as usize, worst))
    })?);

    Ok(VerifyReport {
        metadata: Metadata::capture(Some(seed)),
        case: case.to_string(),
        seed,
        results,
    })
}

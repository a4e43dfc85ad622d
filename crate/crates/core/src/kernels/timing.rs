//! Wall-clock timing of kernels on seeded inputs.

use std::hint::black_box;
use std::time::Instant;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use super::{
    collision_kernel, field_kernel, nonlinear_kernel, nonlinear_plans, shear_kernel, stream_kernel,
    CollisionMatrix, FieldMoment, KernelId, KernelVariant, Stencil,
};
use crate::grid::{random_state, DistributionState, GridShape, Seed};
use crate::{Error, Result};

// Stream tags for the auxiliary inputs; the state itself uses tag 0.
const WEIGHT_STREAM: u64 = 1;
const SHIFT_STREAM: u64 = 2;
const MATRIX_STREAM: u64 = 3;
const PHI_STREAM: u64 = 4;

/// Median of the samples (mean of the middle pair for even counts).
/// Sorts in place. Empty input gives NaN.
pub fn median(samples: &mut [f64]) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        0.5 * (samples[n / 2 - 1] + samples[n / 2])
    }
}

/// First 16 hex digits of SHA-256 over the little-endian bytes of each
/// value's real then imaginary part.
pub fn checksum_values(values: &[Complex64]) -> String {
    let mut h = Sha256::new();
    for z in values {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Seeded inputs shared by every kernel for one `(shape, seed)`.
#[derive(Debug, Clone)]
pub struct KernelInputs {
    pub h: DistributionState,
    pub weights: Vec<f64>,
    pub stencil: Stencil,
    pub shifts: Vec<i64>,
    pub matrices: CollisionMatrix,
    pub phi: FieldMoment,
}

impl KernelInputs {
    pub fn generate(shape: GridShape, seed: Seed) -> Result<Self> {
        let h = random_state(shape, seed)?;
        let m = shape.n_velocity();
        let weights = seed.stream(WEIGHT_STREAM).take(m).collect();
        let stencil = if shape.n_theta() >= 5 {
            Stencil::centered_derivative_5()
        } else if shape.n_theta() >= 3 {
            Stencil::new(vec![-0.5, 0.0, 0.5])?
        } else {
            Stencil::new(vec![1.0])?
        };
        let mut s = seed.stream(SHIFT_STREAM);
        let bound = 3.min(shape.n_radial() as i64);
        let shifts = (0..shape.n_toroidal()).map(|_| s.next_int(-bound, bound)).collect();
        let scale = 1.0 / m as f64;
        let data = seed
            .stream(MATRIX_STREAM)
            .take(m * m * shape.n_theta())
            .map(|x| x * scale)
            .collect();
        let matrices = CollisionMatrix::new(m, shape.n_theta(), data)?;
        let mut s = seed.stream(PHI_STREAM);
        let phi_values = (0..shape.config_len()).map(|_| s.next_complex()).collect();
        let phi = FieldMoment::from_vec(&shape, phi_values)?;
        Ok(Self { h, weights, stencil, shifts, matrices, phi })
    }
}

/// Run one kernel once and return its output values.
pub fn run_kernel(kernel: KernelId, variant: KernelVariant, inputs: &KernelInputs) -> Result<Vec<Complex64>> {
    let h = &inputs.h;
    Ok(match kernel {
        KernelId::Field => field_kernel(h, &inputs.weights, variant)?.values().to_vec(),
        KernelId::Stream => stream_kernel(h, &inputs.stencil, variant)?.into_values(),
        KernelId::Shear => shear_kernel(h, &inputs.shifts, variant)?.into_values(),
        KernelId::Collision => collision_kernel(h, &inputs.matrices, variant)?.into_values(),
        KernelId::Nonlinear => {
            let (px, py) = nonlinear_plans(&h.shape(), variant)?;
            nonlinear_kernel(h, &inputs.phi, &px, &py)?.into_values()
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelTiming {
    pub kernel: KernelId,
    pub variant: KernelVariant,
    pub reps: usize,
    pub median_s: f64,
    pub min_s: f64,
    pub checksum: String,
}

/// Time `reps` runs of a kernel after one untimed warm-up.
pub fn time_kernel(
    kernel: KernelId,
    variant: KernelVariant,
    shape: GridShape,
    reps: usize,
    seed: Seed,
) -> Result<KernelTiming> {
    let inputs = KernelInputs::generate(shape, seed)?;
    time_with_inputs(kernel, variant, &inputs, reps)
}

pub fn time_with_inputs(
    kernel: KernelId,
    variant: KernelVariant,
    inputs: &KernelInputs,
    reps: usize,
) -> Result<KernelTiming> {
    if reps < 3 {
        return Err(Error::Parameter(format!("reps must be at least 3, got {reps}")));
    }
    // Plans for the nonlinear kernel are built inside run_kernel; that cost is
    // part of what the padding choice changes, so it stays in the timed region.
    let mut out = black_box(run_kernel(kernel, variant, inputs)?);
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let t = Instant::now();
        out = black_box(run_kernel(kernel, variant, black_box(inputs))?);
        samples.push(t.elapsed().as_secs_f64());
    }
    let min_s = samples.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(KernelTiming {
        kernel,
        variant,
        reps,
        median_s: median(&mut samples),
        min_s,
        checksum: checksum_values(&out),
    })
}

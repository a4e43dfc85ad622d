//! Proxy kernels and their before/after variants.
//!
//! Each proxy is the simplest computation sharing the dominant operation and
//! memory pattern of the corresponding gyrokinetic kernel. None of them is
//! the real physics:
//!
//! | kernel    | proxy                                              | variants differ in                       |
//! |-----------|----------------------------------------------------|------------------------------------------|
//! | field     | weighted sum over velocity space                   | implicit (serial) vs explicit parallelism |
//! | stream    | periodic stencil along theta                       | stencil-outer sweeps vs one pass          |
//! | shear     | per-toroidal-mode radial shift with zero fill      | scratch table vs inline gather            |
//! | collision | dense matrix-vector product over velocity space    | none (same code)                          |
//! | nonlinear | dealiased Poisson bracket per velocity/theta slice | unplanned vs smooth padded sizes          |

pub mod collision;
pub mod field;
pub mod nonlinear;
pub mod reference;
pub mod shear;
pub mod stream;
pub mod timing;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::grid::GridShape;
use crate::{Error, Result};

pub use collision::collision_kernel;
pub use field::field_kernel;
pub use nonlinear::{nonlinear_kernel, nonlinear_plans};
pub use shear::shear_kernel;
pub use stream::stream_kernel;
pub use timing::{time_kernel, KernelInputs, KernelTiming};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelVariant {
    Original,
    Optimized,
}

impl KernelVariant {
    pub const ALL: [KernelVariant; 2] = [KernelVariant::Original, KernelVariant::Optimized];

    pub fn name(&self) -> &'static str {
        match self {
            KernelVariant::Original => "original",
            KernelVariant::Optimized => "optimized",
        }
    }
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(KernelVariant::Original),
            "optimized" => Ok(KernelVariant::Optimized),
            _ => Err(Error::Parse(format!(
                "variant `{s}` (valid: original, optimized)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelId {
    Field,
    Stream,
    Shear,
    Collision,
    Nonlinear,
}

impl KernelId {
    pub const ALL: [KernelId; 5] = [
        KernelId::Field,
        KernelId::Stream,
        KernelId::Shear,
        KernelId::Collision,
        KernelId::Nonlinear,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            KernelId::Field => "field",
            KernelId::Stream => "stream",
            KernelId::Shear => "shear",
            KernelId::Collision => "collision",
            KernelId::Nonlinear => "nonlinear",
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelId::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "kernel `{s}` (valid: field, stream, shear, collision, nonlinear)"
                ))
            })
    }
}

/// Velocity-space reduction of the state, laid out `[theta][toroidal][radial]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMoment {
    n_theta: usize,
    n_toroidal: usize,
    n_radial: usize,
    values: Vec<Complex64>,
}

impl FieldMoment {
    pub fn zeros(shape: &GridShape) -> Self {
        Self {
            n_theta: shape.n_theta(),
            n_toroidal: shape.n_toroidal(),
            n_radial: shape.n_radial(),
            values: vec![Complex64::new(0.0, 0.0); shape.config_len()],
        }
    }

    pub fn from_vec(shape: &GridShape, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != shape.config_len() {
            return Err(Error::Size(format!(
                "field moment needs {} values, got {}",
                shape.config_len(),
                values.len()
            )));
        }
        Ok(Self {
            n_theta: shape.n_theta(),
            n_toroidal: shape.n_toroidal(),
            n_radial: shape.n_radial(),
            values,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
    pub fn n_toroidal(&self) -> usize {
        self.n_toroidal
    }
    pub fn n_radial(&self) -> usize {
        self.n_radial
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn plane(&self, theta: usize) -> &[Complex64] {
        let p = self.n_toroidal * self.n_radial;
        &self.values[theta * p..(theta + 1) * p]
    }

    fn matches(&self, shape: &GridShape) -> bool {
        (self.n_theta, self.n_toroidal, self.n_radial)
            == (shape.n_theta(), shape.n_toroidal(), shape.n_radial())
    }
}

/// Odd-width periodic stencil along theta, coefficients for offsets
/// `-w/2 ..= w/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil(Vec<f64>);

impl Stencil {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() % 2 == 0 {
            return Err(Error::Parameter(format!(
                "stencil width must be odd, got {}",
                coefficients.len()
            )));
        }
        Ok(Self(coefficients))
    }

    /// Fourth-order centered first derivative, unit spacing.
    pub fn centered_derivative_5() -> Self {
        Self(vec![1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn half_width(&self) -> usize {
        self.0.len() / 2
    }

    /// `(offset, coefficient)` pairs in ascending offset order.
    pub fn taps(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        let h = self.half_width() as isize;
        self.0.iter().enumerate().map(move |(i, &c)| (i as isize - h, c))
    }
}

/// Dense real `m × m` matrix per theta, row-major, `[theta][row][col]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionMatrix {
    m: usize,
    n_theta: usize,
    data: Vec<f64>,
}

impl CollisionMatrix {
    pub fn new(m: usize, n_theta: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != m * m * n_theta {
            return Err(Error::Size(format!(
                "{n_theta} matrices of {m}x{m} need {} entries, got {}",
                m * m * n_theta,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("collision matrix has non-finite entries".into()));
        }
        Ok(Self { m, n_theta, data })
    }

    pub fn identity(m: usize, n_theta: usize) -> Self {
        let mut data = vec![0.0; m * m * n_theta];
        for t in 0..n_theta {
            for i in 0..m {
                data[t * m * m + i * m + i] = 1.0;
            }
        }
        Self { m, n_theta, data }
    }

    pub fn zeros(m: usize, n_theta: usize) -> Self {
        Self {
            m,
            n_theta,
            data: vec![0.0; m * m * n_theta],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn matrix(&self, theta: usize) -> &[f64] {
        let mm = self.m * self.m;
        &self.data[theta * mm..(theta + 1) * mm]
    }
}

fn check_weights(shape: &GridShape, weights: &[f64]) -> Result<()> {
    if weights.len() != shape.n_velocity() {
        return Err(Error::Size(format!(
            "weights cover {} velocity points, shape has {}",
            weights.len(),
            shape.n_velocity()
        )));
    }
    Ok(())
}

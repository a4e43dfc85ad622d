//! Test-case shapes and deterministic state generation.
//!
//! State arrays are stored flat with the index order
//! `[species][energy][xi][theta][toroidal][radial]`, radial fastest. Every
//! kernel, oracle and transform in the crate uses this order.
//!
//! # Generator
//!
//! Values come from ChaCha8 used as a counter-based generator:
//!
//! * key: the 64-bit seed as little-endian bytes in key bytes `0..8`, the
//!   remaining 24 key bytes zero;
//! * stream id: a purpose tag (see [`Seed::stream`]), so independent inputs
//!   derived from one seed never overlap;
//! * each real component consumes one 64-bit output `x` (ChaCha8 block words
//!   in little-endian order) and maps to `2 * (x >> 11) * 2^-53 - 1`, which
//!   lies in `[-1, 1)`.
//!
//! A complex element takes the real part first, then the imaginary part.
//! The mapping is pure integer and IEEE arithmetic, so generated arrays are
//! bit-identical on every platform.

use std::fmt;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Bytes per double-precision complex element.
pub const COMPLEX_BYTES: u64 = 16;

/// Resolution of a test case: five phase-space dimensions plus species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridShape {
    n_radial: usize,
    n_toroidal: usize,
    n_theta: usize,
    n_xi: usize,
    n_energy: usize,
    n_species: usize,
    len: usize,
}

impl GridShape {
    pub fn new(
        n_radial: usize,
        n_toroidal: usize,
        n_theta: usize,
        n_xi: usize,
        n_energy: usize,
        n_species: usize,
    ) -> Result<Self> {
        let dims = [
            ("n_radial", n_radial),
            ("n_toroidal", n_toroidal),
            ("n_theta", n_theta),
            ("n_xi", n_xi),
            ("n_energy", n_energy),
            ("n_species", n_species),
        ];
        if let Some((name, _)) = dims.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Shape(format!("{name} must be at least 1")));
        }
        let len = dims
            .iter()
            .try_fold(1usize, |acc, (_, v)| acc.checked_mul(*v))
            .ok_or_else(|| Error::Shape("element count overflows usize".into()))?;
        // A Vec<Complex64> can hold at most isize::MAX bytes.
        if (len as u128) * (COMPLEX_BYTES as u128) > isize::MAX as u128 {
            return Err(Error::Shape(format!(
                "{len} elements exceed addressable memory"
            )));
        }
        Ok(Self {
            n_radial,
            n_toroidal,
            n_theta,
            n_xi,
            n_energy,
            n_species,
            len,
        })
    }

    pub fn n_radial(&self) -> usize {
        self.n_radial
    }
    pub fn n_toroidal(&self) -> usize {
        self.n_toroidal
    }
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
    pub fn n_xi(&self) -> usize {
        self.n_xi
    }
    pub fn n_energy(&self) -> usize {
        self.n_energy
    }
    pub fn n_species(&self) -> usize {
        self.n_species
    }

    /// Total number of complex elements.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of velocity-space points `n_xi * n_energy * n_species`.
    pub fn n_velocity(&self) -> usize {
        self.n_xi * self.n_energy * self.n_species
    }

    /// Elements in one `(toroidal, radial)` plane.
    pub fn plane_len(&self) -> usize {
        self.n_toroidal * self.n_radial
    }

    /// Elements sharing one velocity index: `n_theta` planes.
    pub fn config_len(&self) -> usize {
        self.n_theta * self.plane_len()
    }

    /// Flat velocity index for `(species, energy, xi)`.
    pub fn velocity_index(&self, species: usize, energy: usize, xi: usize) -> usize {
        (species * self.n_energy + energy) * self.n_xi + xi
    }

    /// Flat element index in `[species][energy][xi][theta][toroidal][radial]`.
    pub fn index(
        &self,
        species: usize,
        energy: usize,
        xi: usize,
        theta: usize,
        toroidal: usize,
        radial: usize,
    ) -> usize {
        let v = self.velocity_index(species, energy, xi);
        ((v * self.n_theta + theta) * self.n_toroidal + toroidal) * self.n_radial + radial
    }

    /// Total state size in bytes at 16 bytes per complex element.
    pub fn state_bytes(&self) -> u64 {
        self.len as u64 * COMPLEX_BYTES
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{},{})x{}",
            self.n_radial, self.n_toroidal, self.n_theta, self.n_xi, self.n_energy, self.n_species
        )
    }
}

/// Named benchmark cases: the two published resolutions and their desk-scale
/// counterparts.
pub const CASE_NAMES: [&str; 4] = ["sh03b", "em04b", "sh03b-desk", "em04b-desk"];

pub fn make_case(name: &str) -> Result<GridShape> {
    let dims = match name {
        "sh03b" => (480, 48, 32, 24, 8, 3),
        "em04b" => (1344, 288, 24, 18, 8, 3),
        "sh03b-desk" => (48, 8, 8, 6, 4, 3),
        "em04b-desk" => (96, 16, 6, 6, 4, 3),
        _ => {
            return Err(Error::UnknownCase {
                name: name.to_string(),
                valid: CASE_NAMES.join(", "),
            })
        }
    };
    GridShape::new(dims.0, dims.1, dims.2, dims.3, dims.4, dims.5)
}

/// Generator seed. Same seed and shape always yield the same state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent generator for the given purpose tag.
    pub fn stream(self, tag: u64) -> UnitStream {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.0.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(tag);
        UnitStream { rng }
    }
}

/// Stream of reals in `[-1, 1)`.
pub struct UnitStream {
    rng: ChaCha8Rng,
}

impl UnitStream {
    pub fn next_unit(&mut self) -> f64 {
        let x = self.rng.next_u64();
        2.0 * ((x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)) - 1.0
    }

    pub fn next_complex(&mut self) -> Complex64 {
        let re = self.next_unit();
        let im = self.next_unit();
        Complex64::new(re, im)
    }

    /// Uniform integer in `lo..=hi`.
    pub fn next_int(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        lo + (self.rng.next_u64() % span) as i64
    }
}

impl Iterator for UnitStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_unit())
    }
}

/// Stream tag used for distribution states.
pub const STATE_STREAM: u64 = 0;

/// Complex-valued proxy of the distributed distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionState {
    shape: GridShape,
    values: Vec<Complex64>,
}

impl DistributionState {
    pub fn zeros(shape: GridShape) -> Result<Self> {
        let mut values = try_alloc(shape.len())?;
        values.resize(shape.len(), Complex64::new(0.0, 0.0));
        Ok(Self { shape, values })
    }

    pub fn from_vec(shape: GridShape, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::Size(format!(
                "state of shape {shape} needs {} elements, got {}",
                shape.len(),
                values.len()
            )));
        }
        Ok(Self { shape, values })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(
        &self,
        species: usize,
        energy: usize,
        xi: usize,
        theta: usize,
        toroidal: usize,
        radial: usize,
    ) -> Complex64 {
        self.values[self.shape.index(species, energy, xi, theta, toroidal, radial)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

fn try_alloc(len: usize) -> Result<Vec<Complex64>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|_| Error::Resource {
        bytes: len as u128 * COMPLEX_BYTES as u128,
    })?;
    Ok(v)
}

/// Seeded state with every component in `[-1, 1)`.
pub fn random_state(shape: GridShape, seed: Seed) -> Result<DistributionState> {
    let mut values = try_alloc(shape.len())?;
    let mut stream = seed.stream(STATE_STREAM);
    values.extend((0..shape.len()).map(|_| stream.next_complex()));
    Ok(DistributionState { shape, values })
}

/// Mean of `|component|` over the real and imaginary parts of the first
/// `count` complex values of the state stream. This is the statistic recorded
/// in the generator golden file.
pub fn stream_mean_abs(seed: Seed, count: usize) -> f64 {
    let mut stream = seed.stream(STATE_STREAM);
    let mut sum = 0.0;
    for _ in 0..count {
        let z = stream.next_complex();
        sum += z.re.abs() + z.im.abs();
    }
    sum / (2 * count) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_cases() {
        let sh = make_case("sh03b").unwrap();
        assert_eq!(
            (sh.n_radial(), sh.n_toroidal(), sh.n_theta(), sh.n_xi(), sh.n_energy()),
            (480, 48, 32, 24, 8)
        );
        assert_eq!(sh.n_species(), 3);
        let em = make_case("em04b").unwrap();
        assert_eq!(
            (em.n_radial(), em.n_toroidal(), em.n_theta(), em.n_xi(), em.n_energy()),
            (1344, 288, 24, 18, 8)
        );
        assert_eq!(em.n_species(), 3);
    }

    #[test]
    fn desk_cases() {
        assert_eq!(
            make_case("sh03b-desk").unwrap(),
            GridShape::new(48, 8, 8, 6, 4, 3).unwrap()
        );
        assert_eq!(
            make_case("em04b-desk").unwrap(),
            GridShape::new(96, 16, 6, 6, 4, 3).unwrap()
        );
    }

    #[test]
    fn unknown_case_lists_valid_names() {
        let err = make_case("sh03").unwrap_err().to_string();
        for name in CASE_NAMES {
            assert!(err.contains(name), "{err}");
        }
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(GridShape::new(4, 0, 1, 1, 1, 1).is_err());
    }

    #[test]
    fn overflow_detected() {
        let big = usize::MAX / 2;
        assert!(matches!(
            GridShape::new(big, 3, 1, 1, 1, 1),
            Err(Error::Shape(_))
        ));
        // Fits usize but not memory.
        assert!(GridShape::new(1 << 30, 1 << 30, 1, 1, 1, 1).is_err());
    }

    #[test]
    fn index_radial_fastest() {
        let s = GridShape::new(5, 4, 3, 2, 2, 2).unwrap();
        assert_eq!(s.index(0, 0, 0, 0, 0, 1), 1);
        assert_eq!(s.index(0, 0, 0, 0, 1, 0), 5);
        assert_eq!(s.index(0, 0, 0, 1, 0, 0), 20);
        assert_eq!(s.index(0, 0, 1, 0, 0, 0), 60);
        assert_eq!(s.index(0, 1, 0, 0, 0, 0), 120);
        assert_eq!(s.index(1, 0, 0, 0, 0, 0), 240);
        assert_eq!(s.index(1, 1, 1, 2, 3, 4), s.len() - 1);
    }

    #[test]
    fn state_is_deterministic() {
        let s = make_case("sh03b-desk").unwrap();
        let a = random_state(s, Seed(7)).unwrap();
        let b = random_state(s, Seed(7)).unwrap();
        assert_eq!(a, b);
        let c = random_state(s, Seed(8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn components_in_unit_range() {
        let s = GridShape::new(16, 4, 2, 2, 2, 1).unwrap();
        let st = random_state(s, Seed(3)).unwrap();
        assert!(st
            .values()
            .iter()
            .all(|z| (-1.0..1.0).contains(&z.re) && (-1.0..1.0).contains(&z.im)));
    }

    #[test]
    fn streams_are_independent() {
        let a: Vec<f64> = Seed(1).stream(0).take(8).collect();
        let b: Vec<f64> = Seed(1).stream(1).take(8).collect();
        assert_ne!(a, b);
    }
}

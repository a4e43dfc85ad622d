//! Batched 1D transform timing for comparing smooth and prime sizes.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::Seed;
use crate::kernels::timing::median;
use crate::padding::{factorize, format_factors};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformEngine {
    /// `rustfft` mixed-radix planner.
    MixedRadix,
    /// Direct O(N²) summation.
    Oracle,
}

impl fmt::Display for TransformEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformEngine::MixedRadix => "fft",
            TransformEngine::Oracle => "oracle",
        })
    }
}

impl FromStr for TransformEngine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fft" | "mixed-radix" => Ok(TransformEngine::MixedRadix),
            "oracle" | "dft" => Ok(TransformEngine::Oracle),
            _ => Err(Error::Parse(format!("transform `{s}` (valid: fft, oracle)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FftTiming {
    pub size: usize,
    pub factors: Vec<u64>,
    pub median_seconds: f64,
    pub min_seconds: f64,
}

impl FftTiming {
    /// `size,factors,median_seconds`
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.9e}",
            self.size,
            format_factors(&self.factors),
            self.median_seconds
        )
    }
}

fn direct_dft(input: &[Complex64], output: &mut [Complex64], twiddles: &[Complex64]) {
    let n = input.len();
    for (k, out) in output.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in input.iter().enumerate() {
            acc += v * twiddles[(k * j) % n];
        }
        *out = acc;
    }
}

/// Time `batch` forward transforms of each size, `reps` times after one
/// untimed warm-up. Plans are built outside the timed region.
pub fn fft_bench(sizes: &[usize], batch: usize, reps: usize, engine: TransformEngine) -> Result<Vec<FftTiming>> {
    if batch == 0 || reps == 0 {
        return Err(Error::Parameter("batch and reps must be positive".into()));
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut out = Vec::with_capacity(sizes.len());
    for &size in sizes {
        if size == 0 {
            return Err(Error::Parameter("transform size must be positive".into()));
        }
        let mut stream = Seed(size as u64).stream(0);
        let input: Vec<Complex64> = (0..size * batch).map(|_| stream.next_complex()).collect();
        let mut samples = Vec::with_capacity(reps);

        match engine {
            TransformEngine::MixedRadix => {
                let fft = planner.plan_fft_forward(size);
                let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
                let mut buf = input.clone();
                for rep in 0..=reps {
                    buf.copy_from_slice(&input);
                    let t = Instant::now();
                    fft.process_with_scratch(&mut buf, &mut scratch);
                    black_box(&buf);
                    if rep > 0 {
                        samples.push(t.elapsed().as_secs_f64());
                    }
                }
            }
            TransformEngine::Oracle => {
                let twiddles: Vec<Complex64> = (0..size)
                    .map(|j| {
                        let t = -2.0 * std::f64::consts::PI * j as f64 / size as f64;
                        Complex64::new(t.cos(), t.sin())
                    })
                    .collect();
                let mut buf = vec![Complex64::default(); size * batch];
                for rep in 0..=reps {
                    let t = Instant::now();
                    for (src, dst) in input.chunks_exact(size).zip(buf.chunks_exact_mut(size)) {
                        direct_dft(src, dst, &twiddles);
                    }
                    black_box(&buf);
                    if rep > 0 {
                        samples.push(t.elapsed().as_secs_f64());
                    }
                }
            }
        }

        let min_seconds = samples.iter().copied().fold(f64::INFINITY, f64::min);
        out.push(FftTiming {
            size,
            factors: factorize(size as u64)?,
            median_seconds: median(&mut samples),
            min_seconds,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engines_agree_on_values() {
        let n = 12;
        let mut s = Seed(1).stream(0);
        let x: Vec<Complex64> = (0..n).map(|_| s.next_complex()).collect();
        let mut a = x.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut a);
        let tw: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * j as f64 / n as f64))
            .collect();
        let mut b = vec![Complex64::default(); n];
        direct_dft(&x, &mut b, &tw);
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn reports_factors() {
        let t = fft_bench(&[719, 720], 2, 3, TransformEngine::MixedRadix).unwrap();
        assert_eq!(t[0].factors, vec![719]);
        assert_eq!(t[1].csv_row().split(',').nth(1), Some("2x2x2x2x3x3x5"));
        assert!(t.iter().all(|r| r.median_seconds >= r.min_seconds));
    }

    #[test]
    fn rejects_empty_batch() {
        assert!(fft_bench(&[8], 0, 3, TransformEngine::Oracle).is_err());
    }
}

//! The idealized analog machine and its exact line spectrum.
//!
//! Input `a_j` drives an oscillator at `a_j·f0`. The collective signal is
//!
//! ```text
//! g(t) = ∏_j (1 + exp(i·2π·a_j·f0·t)) / 2
//! ```
//!
//! Expanding the product gives one term per subset, so `g` is a sum of lines
//! at `σ·f0` with amplitude `N(σ)/2^n`, where `N(σ)` counts the subsets
//! summing to `σ`. Complex exponentials are used instead of cosines so that
//! only sum frequencies appear (no difference terms). The factor `1/2` keeps
//! `|g| ≤ 1`, which makes the `2^-n` amplitude scale explicit.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::instance::{SspError, SspInstance};
use crate::oracle::{count_dp, enumerate_subset_sums};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("base frequency must be positive and finite, got {0}")]
    BadBaseFrequency(f64),
    #[error(transparent)]
    Ssp(#[from] SspError),
}

/// `exp(i·2π·cycles)`, reducing `cycles` modulo 1 first.
#[inline]
pub(crate) fn unit_phasor(cycles: f64) -> Complex64 {
    let frac = cycles - cycles.floor();
    let (s, c) = (TAU * frac).sin_cos();
    Complex64::new(c, s)
}

/// An instance together with the base frequency `f0` its values are scaled by.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveSignalModel {
    instance: SspInstance,
    f0: f64,
}

impl CollectiveSignalModel {
    pub fn new(instance: SspInstance, f0: f64) -> Result<Self, SpectrumError> {
        check_f0(f0)?;
        Ok(Self { instance, f0 })
    }

    pub fn instance(&self) -> &SspInstance {
        &self.instance
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    /// Highest line frequency, `f0·Σa_j`.
    pub fn bandwidth(&self) -> f64 {
        self.f0 * self.instance.total() as f64
    }

    /// Frequency of the line that encodes the instance target.
    pub fn target_frequency(&self) -> f64 {
        self.f0 * self.instance.target() as f64
    }

    /// The collective signal at time `t` (seconds).
    pub fn eval(&self, t: f64) -> Complex64 {
        eval_signal(self, t)
    }
}

fn check_f0(f0: f64) -> Result<(), SpectrumError> {
    if f0.is_finite() && f0 > 0.0 {
        Ok(())
    } else {
        Err(SpectrumError::BadBaseFrequency(f0))
    }
}

pub fn eval_signal(model: &CollectiveSignalModel, t: f64) -> Complex64 {
    let ft = model.f0 * t;
    model.instance.values().iter().fold(Complex64::new(1.0, 0.0), |acc, &a| {
        acc * (Complex64::new(1.0, 0.0) + unit_phasor(a as f64 * ft)) * 0.5
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub sum: u64,
    pub frequency_hz: f64,
    pub multiplicity: u64,
    pub amplitude: f64,
}

/// Every line of the collective signal, sorted by sum.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSpectrum {
    pub f0: f64,
    pub n: usize,
    pub lines: Vec<SpectralLine>,
}

impl ExactSpectrum {
    /// `Σ c_σ²`, the mean power of the collective signal.
    pub fn power(&self) -> f64 {
        self.lines.iter().map(|l| l.amplitude * l.amplitude).sum()
    }

    /// CSV with columns `sum,frequency_hz,multiplicity,amplitude`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sum,frequency_hz,multiplicity,amplitude\n");
        for l in &self.lines {
            let _ = writeln!(out, "{},{},{},{}", l.sum, l.frequency_hz, l.multiplicity, l.amplitude);
        }
        out
    }
}

/// `2^-n` as an exact power of two.
fn inv_pow2(n: usize) -> f64 {
    0.5f64.powi(n as i32)
}

pub fn exact_spectrum(instance: &SspInstance, f0: f64) -> Result<ExactSpectrum, SpectrumError> {
    check_f0(f0)?;
    let counts = enumerate_subset_sums(instance)?;
    let scale = inv_pow2(instance.n());
    let lines = counts
        .iter()
        .map(|(sum, multiplicity)| SpectralLine {
            sum,
            frequency_hz: sum as f64 * f0,
            multiplicity,
            amplitude: multiplicity as f64 * scale,
        })
        .collect();
    Ok(ExactSpectrum { f0, n: instance.n(), lines })
}

/// `N(s)/2^n`, zero when `s` is not a subset sum.
pub fn exact_amplitude(instance: &SspInstance, s: u64) -> Result<f64, SspError> {
    Ok(count_dp(instance.values(), s)? as f64 * inv_pow2(instance.n()))
}

pub fn bandwidth(instance: &SspInstance, f0: f64) -> f64 {
    f0 * instance.total() as f64
}

/// Smallest spacing between two lines; at least `f0` since sums are integers.
pub fn min_gap(instance: &SspInstance, f0: f64) -> Result<f64, SpectrumError> {
    check_f0(f0)?;
    let counts = enumerate_subset_sums(instance)?;
    let gap = counts.min_gap().expect("n ≥ 1 positive values give at least two lines");
    Ok(gap as f64 * f0)
}

/// The target line's share of mean signal power, `N(s)² / Σ N(σ)²`.
pub fn energy_fraction(instance: &SspInstance, s: u64) -> Result<f64, SspError> {
    let counts = enumerate_subset_sums(instance)?;
    let hit = counts.get(s) as u128;
    Ok((hit * hit) as f64 / counts.sum_of_squares() as f64)
}

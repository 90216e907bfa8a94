use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::{Sampling, SimConfig, SimError};
use crate::rng::stream_rng;
use crate::spectrum::{unit_phasor, CollectiveSignalModel};

/// Uniform quantizer over `[-2, 2]` with `2^bits` cells, applied to the
/// real and imaginary parts separately. Outputs are cell midpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantizer {
    levels: f64,
    step: f64,
}

impl Quantizer {
    pub const RANGE: f64 = 2.0;

    pub fn new(bits: u32) -> Self {
        let levels = 2f64.powi(bits as i32);
        Self { levels, step: 2.0 * Self::RANGE / levels }
    }

    #[inline]
    pub fn quantize_real(&self, x: f64) -> f64 {
        let cell = ((x + Self::RANGE) / self.step).floor().clamp(0.0, self.levels - 1.0);
        -Self::RANGE + (cell + 0.5) * self.step
    }

    #[inline]
    pub fn quantize(&self, z: Complex64) -> Complex64 {
        Complex64::new(self.quantize_real(z.re), self.quantize_real(z.im))
    }
}

/// Uniformly sampled complex signal starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<Complex64>,
    sample_rate: f64,
}

impl SampledSignal {
    /// Returns `None` for an empty sample vector or a non-positive rate.
    pub fn new(samples: Vec<Complex64>, sample_rate: f64) -> Option<Self> {
        (!samples.is_empty() && sample_rate.is_finite() && sample_rate > 0.0)
            .then_some(Self { samples, sample_rate })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Sample generator for one model and configuration. Independent of the
/// seed, so it can be built once and replayed for many Monte Carlo trials.
#[derive(Debug, Clone)]
pub(crate) struct SignalPlan {
    model: CollectiveSignalModel,
    pub(crate) sampling: Sampling,
    /// One base period of the noiseless signal, when the grid is periodic.
    clean: Option<Vec<Complex64>>,
    noise_scale: f64,
    quantizer: Option<Quantizer>,
}

impl SignalPlan {
    pub(crate) fn new(model: &CollectiveSignalModel, config: &SimConfig) -> Result<Self, SimError> {
        let sampling = config.resolve(model)?;
        let clean = sampling.period.map(|m| periodic_table(model, m));
        Ok(Self {
            model: model.clone(),
            sampling,
            clean,
            noise_scale: config.noise_sigma / std::f64::consts::SQRT_2,
            quantizer: config.adc_bits.map(Quantizer::new),
        })
    }

    /// Calls `sink(k, k mod period, sample)` for every sample in order.
    #[inline]
    pub(crate) fn drive<F: FnMut(u64, usize, Complex64)>(&self, seed: u64, stream: u64, mut sink: F) {
        let n = self.sampling.num_samples;
        let fs = self.sampling.sample_rate;
        let mut rng = (self.noise_scale > 0.0).then(|| stream_rng(seed, stream));
        let mut j = 0usize;
        for k in 0..n {
            let mut x = match &self.clean {
                Some(table) => table[j],
                None => self.model.eval(k as f64 / fs),
            };
            if let Some(rng) = rng.as_mut() {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                x += Complex64::new(re * self.noise_scale, im * self.noise_scale);
            }
            if let Some(q) = &self.quantizer {
                x = q.quantize(x);
            }
            sink(k, j, x);
            if let Some(table) = &self.clean {
                j += 1;
                if j == table.len() {
                    j = 0;
                }
            }
        }
    }
}

/// `g(k/fs)` for `k` in one period of `m` samples, with exact integer phases.
fn periodic_table(model: &CollectiveSignalModel, m: u64) -> Vec<Complex64> {
    let reduced: Vec<u128> = model.instance().values().iter().map(|&a| (a % m) as u128).collect();
    (0..m as u128)
        .map(|k| {
            reduced.iter().fold(Complex64::new(1.0, 0.0), |acc, &a| {
                let phase = (a * k % m as u128) as f64 / m as f64;
                acc * (Complex64::new(1.0, 0.0) + unit_phasor(phase)) * 0.5
            })
        })
        .collect()
}

/// Samples the model with the configured noise and quantization.
pub fn synthesize(model: &CollectiveSignalModel, config: &SimConfig) -> Result<SampledSignal, SimError> {
    let plan = SignalPlan::new(model, config)?;
    let mut samples = Vec::with_capacity(plan.sampling.num_samples as usize);
    plan.drive(config.seed, config.stream, |_, _, x| samples.push(x));
    Ok(SampledSignal { samples, sample_rate: plan.sampling.sample_rate })
}

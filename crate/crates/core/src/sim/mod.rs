//! Finite-resource measurement of the collective signal.
//!
//! A [`SimConfig`] fixes the sampling rate, observation span, additive
//! complex Gaussian noise, optional ADC quantization and the seed. The
//! read-out projects the samples onto the single frequency `target·f0` and
//! thresholds the magnitude.

mod readout;
mod synth;

pub use readout::{
    decide_readout, readout_snr, single_bin_readout, snr_from_amplitude, ReadoutPlan, ReadoutResult,
    ThresholdPolicy,
};
pub use synth::{synthesize, Quantizer, SampledSignal};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::SspError;
use crate::rng::DEFAULT_SEED;
use crate::spectrum::{CollectiveSignalModel, SpectrumError};

/// Largest period (in samples) for which one-period lookup tables are built.
const MAX_PERIOD_TABLE: f64 = (1u64 << 24) as f64;

/// Largest number of samples a single measurement may take.
pub const MAX_SAMPLES: u64 = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(
        "sample rate {given} Hz violates the sampling criterion for bandwidth {bandwidth} Hz; \
         required rate is at least {required} Hz"
    )]
    SampleRateTooLow { given: f64, required: f64, bandwidth: f64 },
    #[error("invalid sample rate {0}")]
    InvalidSampleRate(f64),
    #[error("rate margin must be at least 1, got {0}")]
    InvalidRateMargin(f64),
    #[error("noise sigma must be finite and nonnegative, got {0}")]
    InvalidNoise(f64),
    #[error("adc bits must be in [2, 32], got {0}")]
    InvalidAdcBits(u32),
    #[error("observation span resolves to {0} samples")]
    InvalidSpan(f64),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Ssp(#[from] SspError),
}

impl SimError {
    /// Errors caused by physically inconsistent measurement settings.
    pub fn is_config_guard(&self) -> bool {
        !matches!(self, SimError::Ssp(_) | SimError::Spectrum(SpectrumError::Ssp(_)))
    }
}

/// Length of the observation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Span {
    Seconds(f64),
    Samples(u64),
    /// Whole base periods `1/f0`.
    Periods(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub sample_rate: f64,
    pub span: Span,
    /// Standard deviation of the per-sample complex Gaussian noise
    /// (`E|noise|² = noise_sigma²`).
    pub noise_sigma: f64,
    pub adc_bits: Option<u32>,
    pub seed: u64,
    /// Stream of the seeded generator; Monte Carlo trials use their index.
    pub stream: u64,
    /// Keep the span as given instead of rounding it to whole base periods.
    pub allow_partial_periods: bool,
    /// Required ratio of sample rate to bandwidth.
    pub rate_margin: f64,
}

impl SimConfig {
    pub const DEFAULT_RATE_MARGIN: f64 = 2.0;

    /// Noiseless, one base period, sampled at twice the bandwidth.
    pub fn for_model(model: &CollectiveSignalModel) -> Self {
        Self {
            sample_rate: Self::DEFAULT_RATE_MARGIN * model.bandwidth(),
            span: Span::Periods(1),
            noise_sigma: 0.0,
            adc_bits: None,
            seed: DEFAULT_SEED,
            stream: 0,
            allow_partial_periods: false,
            rate_margin: Self::DEFAULT_RATE_MARGIN,
        }
    }

    pub fn with_sample_rate(mut self, sample_rate: f64) -> Self {
        self.sample_rate = sample_rate;
        self
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    pub fn with_noise(mut self, noise_sigma: f64) -> Self {
        self.noise_sigma = noise_sigma;
        self
    }

    pub fn with_adc_bits(mut self, bits: Option<u32>) -> Self {
        self.adc_bits = bits;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn with_partial_periods(mut self, allow: bool) -> Self {
        self.allow_partial_periods = allow;
        self
    }

    pub fn with_rate_margin(mut self, margin: f64) -> Self {
        self.rate_margin = margin;
        self
    }

    /// Validates against `model` and works out the sample grid.
    pub(crate) fn resolve(&self, model: &CollectiveSignalModel) -> Result<Sampling, SimError> {
        let fs = self.sample_rate;
        if !(fs.is_finite() && fs > 0.0) {
            return Err(SimError::InvalidSampleRate(fs));
        }
        if !(self.rate_margin >= 1.0 && self.rate_margin.is_finite()) {
            return Err(SimError::InvalidRateMargin(self.rate_margin));
        }
        let bw = model.bandwidth();
        let required = bw * self.rate_margin;
        if fs <= bw || fs < required {
            return Err(SimError::SampleRateTooLow { given: fs, required, bandwidth: bw });
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(SimError::InvalidNoise(self.noise_sigma));
        }
        if let Some(bits) = self.adc_bits {
            if !(2..=32).contains(&bits) {
                return Err(SimError::InvalidAdcBits(bits));
            }
        }

        let f0 = model.f0();
        let ratio = fs / f0;
        let rounded = ratio.round();
        let period = ((1.0..=MAX_PERIOD_TABLE).contains(&rounded)
            && (ratio - rounded).abs() <= 1e-9 * rounded)
            .then_some(rounded as u64);

        let num_samples = if self.allow_partial_periods {
            match self.span {
                Span::Samples(k) => k as f64,
                Span::Seconds(d) => (d * fs).round(),
                Span::Periods(p) => (p as f64 * ratio).round(),
            }
        } else {
            let periods = match self.span {
                Span::Periods(p) => p as f64,
                Span::Seconds(d) => (d * f0).round().max(1.0),
                Span::Samples(k) => (k as f64 / ratio).round().max(1.0),
            };
            match period {
                Some(m) => periods * m as f64,
                None => (periods * ratio).round(),
            }
        };
        if !(num_samples >= 1.0 && num_samples <= MAX_SAMPLES as f64) {
            return Err(SimError::InvalidSpan(num_samples));
        }
        Ok(Sampling { sample_rate: fs, num_samples: num_samples as u64, period })
    }
}

/// Resolved sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Sampling {
    pub sample_rate: f64,
    pub num_samples: u64,
    /// Samples per base period, when `sample_rate/f0` is an integer.
    pub period: Option<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::SspInstance;

    fn model(values: &[u64], f0: f64) -> CollectiveSignalModel {
        CollectiveSignalModel::new(SspInstance::new(values.to_vec(), 0).unwrap(), f0).unwrap()
    }

    #[test]
    fn default_config_is_one_period_at_twice_bandwidth() {
        let m = model(&[3, 34, 4, 12, 5, 2], 1.0);
        let s = SimConfig::for_model(&m).resolve(&m).unwrap();
        assert_eq!(s.period, Some(120));
        assert_eq!(s.num_samples, 120);
    }

    #[test]
    fn sampling_criterion_names_required_rate() {
        let m = model(&[1, 2, 3], 1.0);
        let err = SimConfig::for_model(&m).with_sample_rate(10.0).resolve(&m).unwrap_err();
        assert_eq!(err, SimError::SampleRateTooLow { given: 10.0, required: 12.0, bandwidth: 6.0 });
        assert!(err.to_string().contains("12 Hz"));
        // Margin 1 still demands a rate strictly above the bandwidth.
        let loose = SimConfig::for_model(&m).with_rate_margin(1.0);
        assert!(loose.with_sample_rate(6.0).resolve(&m).is_err());
        assert!(loose.with_sample_rate(7.0).resolve(&m).is_ok());
    }

    #[test]
    fn span_rounds_to_whole_periods() {
        let m = model(&[1, 2, 3], 1.0);
        let c = SimConfig::for_model(&m).with_sample_rate(16.0);
        let n = |span| c.with_span(span).resolve(&m).unwrap().num_samples;
        assert_eq!(n(Span::Seconds(1.0)), 16);
        assert_eq!(n(Span::Seconds(2.4)), 32);
        assert_eq!(n(Span::Seconds(0.1)), 16);
        assert_eq!(n(Span::Samples(40)), 48);
        assert_eq!(n(Span::Periods(3)), 48);

        let p = c.with_partial_periods(true);
        let n = |span| p.with_span(span).resolve(&m).unwrap().num_samples;
        assert_eq!(n(Span::Samples(40)), 40);
        assert_eq!(n(Span::Seconds(0.5)), 8);
    }

    #[test]
    fn rejects_bad_settings() {
        let m = model(&[1, 2, 3], 1.0);
        let c = SimConfig::for_model(&m);
        assert!(matches!(c.with_noise(-1.0).resolve(&m), Err(SimError::InvalidNoise(_))));
        assert!(matches!(c.with_adc_bits(Some(1)).resolve(&m), Err(SimError::InvalidAdcBits(1))));
        assert!(matches!(c.with_adc_bits(Some(33)).resolve(&m), Err(SimError::InvalidAdcBits(33))));
        assert!(c.with_adc_bits(Some(32)).resolve(&m).is_ok());
        assert!(matches!(
            c.with_partial_periods(true).with_span(Span::Samples(0)).resolve(&m),
            Err(SimError::InvalidSpan(_))
        ));
        assert!(matches!(c.with_rate_margin(0.5).resolve(&m), Err(SimError::InvalidRateMargin(_))));
    }

    #[test]
    fn non_integer_rate_has_no_period_table() {
        let m = model(&[1, 2, 3], 1.0);
        let s = SimConfig::for_model(&m).with_sample_rate(12.5).resolve(&m).unwrap();
        assert_eq!(s.period, None);
        assert_eq!(s.num_samples, 13);
    }
}

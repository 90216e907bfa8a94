use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::synth::{SampledSignal, SignalPlan};
use super::{SimConfig, SimError};
use crate::instance::SspInstance;
use crate::spectrum::{exact_amplitude, unit_phasor, CollectiveSignalModel};

/// Projection of the samples onto `exp(i·2π·f_target·t)`:
/// `(1/N)·Σ_k x_k·exp(-i·2π·f_target·k/fs)`, rectangular window.
pub fn single_bin_readout(signal: &SampledSignal, f_target: f64) -> Complex64 {
    let per_sample = f_target / signal.sample_rate();
    let acc: Complex64 =
        signal.samples().iter().enumerate().map(|(k, &x)| x * unit_phasor(-(per_sample * k as f64))).sum();
    acc / signal.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdPolicy {
    /// `2^-(n+1)`: halfway between no line and the weakest possible line.
    #[default]
    HalfMinLine,
    Absolute(f64),
}

impl ThresholdPolicy {
    pub fn threshold(self, n: usize) -> f64 {
        match self {
            ThresholdPolicy::HalfMinLine => 0.5f64.powi(n as i32 + 1),
            ThresholdPolicy::Absolute(x) => x,
        }
    }
}

impl FromStr for ThresholdPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "half_min_line" | "half-min-line" => Ok(ThresholdPolicy::HalfMinLine),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x >= 0.0)
                .map(ThresholdPolicy::Absolute)
                .ok_or_else(|| format!("expected `half_min_line` or a nonnegative number, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReadoutResult {
    pub n: usize,
    pub target: u64,
    pub seed: u64,
    pub num_samples: u64,
    pub target_frequency: f64,
    pub amplitude_estimate: Complex64,
    pub magnitude: f64,
    pub threshold: f64,
    pub decision: bool,
    pub snr_estimate: Option<f64>,
}

impl ReadoutResult {
    pub const CSV_HEADER: &'static str = "n,target,magnitude,threshold,decision,snr_estimate,seed";

    pub fn decision_word(&self) -> &'static str {
        if self.decision {
            "YES"
        } else {
            "NO"
        }
    }

    /// `DECISION MAGNITUDE THRESHOLD`.
    pub fn summary_line(&self) -> String {
        format!("{} {} {}", self.decision_word(), self.magnitude, self.threshold)
    }

    pub fn csv_row(&self) -> String {
        let mut row = format!(
            "{},{},{},{},{},",
            self.n,
            self.target,
            self.magnitude,
            self.threshold,
            self.decision_word()
        );
        if let Some(snr) = self.snr_estimate {
            let _ = write!(row, "{snr}");
        }
        let _ = write!(row, ",{}", self.seed);
        row
    }
}

/// `A²·N/σ²`: power ratio of a line of amplitude `A` to the projected noise.
pub fn snr_from_amplitude(amplitude: f64, num_samples: u64, noise_sigma: f64) -> f64 {
    amplitude * amplitude * num_samples as f64 / (noise_sigma * noise_sigma)
}

/// Predicted post-projection SNR of the line at `s` under `config`.
pub fn readout_snr(model: &CollectiveSignalModel, config: &SimConfig, s: u64) -> Result<f64, SimError> {
    if config.noise_sigma.is_nan() || config.noise_sigma <= 0.0 {
        return Err(SimError::InvalidNoise(config.noise_sigma));
    }
    let sampling = config.resolve(model)?;
    let amplitude = exact_amplitude(model.instance(), s)?;
    Ok(snr_from_amplitude(amplitude, sampling.num_samples, config.noise_sigma))
}

/// Everything about a read-out except the random draws. Build once, then
/// [`run`](Self::run) per seed/stream.
#[derive(Debug, Clone)]
pub struct ReadoutPlan {
    signal: SignalPlan,
    /// One period of `exp(-i·2π·target·k/m)`, when the grid is periodic.
    twiddle: Option<Vec<Complex64>>,
    n: usize,
    target: u64,
    target_frequency: f64,
    threshold: f64,
    in_range: bool,
    snr_estimate: Option<f64>,
}

impl ReadoutPlan {
    pub fn new(
        model: &CollectiveSignalModel,
        config: &SimConfig,
        policy: ThresholdPolicy,
    ) -> Result<Self, SimError> {
        let signal = SignalPlan::new(model, config)?;
        let instance = model.instance();
        let target = instance.target();
        let twiddle = signal.sampling.period.map(|m| {
            let step = (target % m) as u128;
            (0..m as u128).map(|j| unit_phasor(-((step * j % m as u128) as f64 / m as f64))).collect()
        });
        let snr_estimate = (config.noise_sigma > 0.0)
            .then(|| exact_amplitude(instance, target).ok())
            .flatten()
            .map(|a| snr_from_amplitude(a, signal.sampling.num_samples, config.noise_sigma));
        Ok(Self {
            n: instance.n(),
            target,
            target_frequency: model.target_frequency(),
            threshold: policy.threshold(instance.n()),
            in_range: instance.target_in_range(),
            snr_estimate,
            twiddle,
            signal,
        })
    }

    pub fn num_samples(&self) -> u64 {
        self.signal.sampling.num_samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.signal.sampling.sample_rate
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Synthesizes with `(seed, stream)` and projects onto the target line.
    /// Targets above `Σa_j` decide NO without sampling.
    pub fn run(&self, seed: u64, stream: u64) -> ReadoutResult {
        let amplitude = if self.in_range { self.project(seed, stream) } else { Complex64::new(0.0, 0.0) };
        let magnitude = amplitude.norm();
        ReadoutResult {
            n: self.n,
            target: self.target,
            seed,
            num_samples: if self.in_range { self.num_samples() } else { 0 },
            target_frequency: self.target_frequency,
            amplitude_estimate: amplitude,
            magnitude,
            threshold: self.threshold,
            decision: self.in_range && magnitude >= self.threshold,
            snr_estimate: self.snr_estimate,
        }
    }

    fn project(&self, seed: u64, stream: u64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        match &self.twiddle {
            Some(tw) => self.signal.drive(seed, stream, |_, j, x| acc += x * tw[j]),
            None => {
                let per_sample = self.target_frequency / self.sample_rate();
                self.signal.drive(seed, stream, |k, _, x| acc += x * unit_phasor(-(per_sample * k as f64)))
            }
        }
        acc / self.num_samples() as f64
    }
}

/// Samples the collective signal of `instance` and decides by thresholding
/// the magnitude of the target line.
pub fn decide_readout(
    instance: &SspInstance,
    f0: f64,
    config: &SimConfig,
    policy: ThresholdPolicy,
) -> Result<ReadoutResult, SimError> {
    let model = CollectiveSignalModel::new(instance.clone(), f0)?;
    Ok(ReadoutPlan::new(&model, config, policy)?.run(config.seed, config.stream))
}

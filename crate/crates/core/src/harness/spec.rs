use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::family::{gen_family, FamilyKind, FamilyParams, SolutionBias};
use crate::instance::{SspError, SspInstance, MAX_ENUMERATION_N};
use crate::rng::{stream_rng, DEFAULT_SEED};

use rand::RngExt;

/// Default per-trial sample ceiling for the required-samples search.
pub const DEFAULT_SAMPLE_CEILING: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Target-line share of signal power.
    Energy,
    /// One base period under a fixed maximum frequency.
    Time,
    /// Monte Carlo search for the samples needed to decide reliably.
    Samples,
    /// Decision accuracy under a fixed sample budget.
    Accuracy,
}

/// Upper bound on random values: a constant, or `2^n` at each `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaxValue {
    Fixed(u64),
    Scaled(MaxValueScale),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxValueScale {
    Pow2N,
}

impl Default for MaxValue {
    fn default() -> Self {
        MaxValue::Fixed(100)
    }
}

impl MaxValue {
    pub fn at(self, n: usize) -> Result<u64, HarnessError> {
        match self {
            MaxValue::Fixed(v) => Ok(v),
            MaxValue::Scaled(MaxValueScale::Pow2N) if n < 58 => Ok(1 << n),
            MaxValue::Scaled(MaxValueScale::Pow2N) => {
                Err(HarnessError::InvalidSpec(format!("max_value 2^n overflows at n = {n}")))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    #[serde(default)]
    pub max_value: MaxValue,
    #[serde(default)]
    pub bias: SolutionBias,
    /// Use `⌊Σa_j / 2⌋` as the target instead of drawing one.
    #[serde(default)]
    pub center_target: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind) -> Self {
        Self {
            kind,
            max_value: MaxValue::default(),
            bias: SolutionBias::Any,
            center_target: false,
            label: None,
        }
    }

    pub fn with_max_value(mut self, max_value: MaxValue) -> Self {
        self.max_value = max_value;
        self
    }

    pub fn with_bias(mut self, bias: SolutionBias) -> Self {
        self.bias = bias;
        self
    }

    pub fn centered(mut self) -> Self {
        self.center_target = true;
        self
    }

    /// Name used in the `family` report column.
    pub fn label(&self) -> String {
        if let Some(label) = &self.label {
            return label.clone();
        }
        let mut label = self.kind.name().to_string();
        if self.kind == FamilyKind::Random {
            match self.max_value {
                MaxValue::Fixed(v) => label.push_str(&format!(":max={v}")),
                MaxValue::Scaled(MaxValueScale::Pow2N) => label.push_str(":max=pow2_n"),
            }
            label.push(':');
            label.push_str(self.bias.name());
        }
        if self.center_target {
            label.push_str(":center");
        }
        label
    }

    /// Instance at size `n` with this family's own bias.
    pub fn instance(&self, n: usize, seed: u64) -> Result<SspInstance, HarnessError> {
        self.instance_with_bias(n, seed, self.bias)
    }

    pub fn instance_with_bias(
        &self,
        n: usize,
        seed: u64,
        bias: SolutionBias,
    ) -> Result<SspInstance, HarnessError> {
        let params = FamilyParams::new(self.max_value.at(n)?, seed, bias);
        let instance = gen_family(self.kind, n, &params)?;
        Ok(if self.center_target {
            let centre = instance.total() / 2;
            instance.with_target(centre)
        } else {
            instance
        })
    }

    /// A YES (`want_yes`) or NO instance for balanced trial sets.
    ///
    /// When the family has no unachievable value in range (every value of
    /// `[0, Σa_j]` is a sum, as for powers of two), the NO instance doubles
    /// every value of a drawn instance and takes a uniformly drawn odd
    /// target below the doubled total: same `n`, same line amplitudes, and
    /// a target that sits between two lines.
    pub fn balanced_instance(
        &self,
        n: usize,
        seed: u64,
        want_yes: bool,
    ) -> Result<SspInstance, HarnessError> {
        let params = FamilyParams::new(self.max_value.at(n)?, seed, SolutionBias::ForceYes);
        if want_yes {
            return Ok(gen_family(self.kind, n, &params)?);
        }
        match gen_family(self.kind, n, &FamilyParams { bias: SolutionBias::ForceNo, ..params }) {
            Err(SspError::ForceNoImpossible { .. }) => {
                let base = gen_family(self.kind, n, &FamilyParams { bias: SolutionBias::Any, ..params })?;
                parity_companion(&base, seed)
            }
            other => Ok(other?),
        }
    }
}

/// `2·a_j` with a uniformly drawn odd target in `[1, 2·Σa_j - 1]`.
pub fn parity_companion(instance: &SspInstance, seed: u64) -> Result<SspInstance, HarnessError> {
    let values = instance.values().iter().map(|&a| a.checked_mul(2)).collect::<Option<Vec<_>>>();
    let values = values.ok_or(SspError::Overflow)?;
    let mut rng = stream_rng(seed, 1);
    let k = rng.random_range(0..instance.total());
    Ok(SspInstance::new(values, 2 * k + 1)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_frequency_hz: Option<f64>,
}

/// One sweep: an experiment over instance families and sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub experiment: Experiment,
    pub families: Vec<FamilySpec>,
    pub n_values: Vec<usize>,
    #[serde(default = "one")]
    pub trials_per_point: usize,
    #[serde(default = "default_reliability")]
    pub reliability_target: f64,
    #[serde(default)]
    pub fixed: FixedParams,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "unit_f0")]
    pub f0_hz: f64,
    #[serde(default = "default_ceiling")]
    pub sample_ceiling: u64,
    /// Fill `wall_time_s`. Off by default so reports are byte-reproducible.
    #[serde(default)]
    pub record_wall_time: bool,
}

fn one() -> usize {
    1
}
fn default_reliability() -> f64 {
    0.95
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn unit_f0() -> f64 {
    1.0
}
fn default_ceiling() -> u64 {
    DEFAULT_SAMPLE_CEILING
}

impl SweepSpec {
    pub fn new(experiment: Experiment, families: Vec<FamilySpec>, n_values: Vec<usize>) -> Self {
        Self {
            experiment,
            families,
            n_values,
            trials_per_point: 1,
            reliability_target: default_reliability(),
            fixed: FixedParams::default(),
            seed: DEFAULT_SEED,
            f0_hz: 1.0,
            sample_ceiling: DEFAULT_SAMPLE_CEILING,
            record_wall_time: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let spec: Self = serde_json::from_str(text).map_err(|e| HarnessError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidSpec(msg));
        if self.families.is_empty() {
            return bad("families is empty".into());
        }
        if self.n_values.is_empty() {
            return bad("n_values is empty".into());
        }
        if self.n_values[0] == 0 || self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n_values must be positive and strictly increasing".into());
        }
        if self.trials_per_point == 0 {
            return bad("trials_per_point must be at least 1".into());
        }
        if !(self.reliability_target > 0.0 && self.reliability_target < 1.0) {
            return bad("reliability_target must lie in (0, 1)".into());
        }
        if !(self.f0_hz.is_finite() && self.f0_hz > 0.0) {
            return bad("f0_hz must be positive".into());
        }
        for fam in &self.families {
            let label = fam.label();
            if label.is_empty() || label.contains([',', '\n', '\r', '"']) {
                return bad(format!("family label `{label}` is not CSV-safe"));
            }
        }
        let max_n = *self.n_values.last().expect("nonempty");
        match self.experiment {
            Experiment::Energy => {
                if max_n > MAX_ENUMERATION_N {
                    return bad(format!("energy sweeps enumerate subsets; n ≤ {MAX_ENUMERATION_N}"));
                }
                if self.families.iter().any(|f| f.bias == SolutionBias::ForceNo && !f.center_target) {
                    return bad("energy sweeps need achievable targets; force_no has zero energy".into());
                }
            }
            Experiment::Time => match self.fixed.max_frequency_hz {
                Some(f) if f.is_finite() && f > 0.0 => {}
                _ => return bad("time sweeps need fixed.max_frequency_hz > 0".into()),
            },
            Experiment::Samples => {
                match self.fixed.noise_sigma {
                    Some(s) if s.is_finite() && s > 0.0 => {}
                    _ => return bad("samples sweeps need fixed.noise_sigma > 0".into()),
                }
                if self.reliability_target <= 0.5 {
                    return bad("reliability_target must exceed 0.5".into());
                }
            }
            Experiment::Accuracy => {
                match self.fixed.noise_sigma {
                    Some(s) if s.is_finite() && s >= 0.0 => {}
                    _ => return bad("accuracy sweeps need fixed.noise_sigma ≥ 0".into()),
                }
                let Some(budget) = self.fixed.sample_budget else {
                    return bad("accuracy sweeps need fixed.sample_budget".into());
                };
                // One base period at the default rate is 2·Σa_j samples.
                let n = self.n_values[0];
                for fam in &self.families {
                    let total_bound = match fam.kind {
                        FamilyKind::AllOnes => n as u64,
                        FamilyKind::PowersOfTwo => (1u64 << n.min(62)) - 1,
                        FamilyKind::Random => (n as u64).saturating_mul(fam.max_value.at(n)?),
                    };
                    // NO companions may double the values.
                    let period = total_bound.saturating_mul(4);
                    if budget < period {
                        return bad(format!(
                            "sample_budget {budget} is below one base period ({period} samples) \
                             for {} at n = {n}",
                            fam.label()
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

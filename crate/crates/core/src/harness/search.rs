//! Monte Carlo search for the number of samples a reliable read-out needs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::parity_companion;
use super::HarnessError;
use crate::instance::SspInstance;
use crate::oracle::{decide_dp, SumSet};
use crate::rng::DEFAULT_SEED;
use crate::sim::{ReadoutPlan, SimConfig, Span, ThresholdPolicy};
use crate::spectrum::CollectiveSignalModel;

/// Trials evaluated between early-exit checks. Fixed so the outcome does
/// not depend on the thread count.
const TRIAL_CHUNK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Largest number of samples a single trial may take.
    pub ceiling: u64,
    pub seed: u64,
    pub policy: ThresholdPolicy,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            ceiling: super::DEFAULT_SAMPLE_CEILING,
            seed: DEFAULT_SEED,
            policy: ThresholdPolicy::HalfMinLine,
        }
    }
}

/// Outcome of [`required_samples`]. A ceiling hit is a censored observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleRequirement {
    Found { num_samples: u64, periods: u64 },
    BudgetExceeded { ceiling: u64 },
}

impl SampleRequirement {
    pub fn num_samples(self) -> Option<u64> {
        match self {
            SampleRequirement::Found { num_samples, .. } => Some(num_samples),
            SampleRequirement::BudgetExceeded { .. } => None,
        }
    }

    fn rank(self) -> (u8, u64) {
        match self {
            SampleRequirement::Found { num_samples, .. } => (0, num_samples),
            SampleRequirement::BudgetExceeded { ceiling } => (1, ceiling),
        }
    }
}

/// Smallest sample count at which the read-out matches the exact answer in
/// at least `reliability` of `trials` seeded trials.
///
/// Even trials measure `instance`, odd trials its [`answer_partner`], so a
/// read-out that always says YES (or always NO) scores 0.5 rather than
/// looking reliable. Spans are whole base periods at twice the bandwidth of
/// the measured instance. The period count is found by doubling from one
/// period, then bisection; the reported count is for `instance`. Trial `t`
/// uses stream `t` of `options.seed` at every probe, so probes share their
/// noise draws.
pub fn required_samples(
    instance: &SspInstance,
    f0: f64,
    noise_sigma: f64,
    reliability: f64,
    trials: usize,
    options: &SearchOptions,
) -> Result<SampleRequirement, HarnessError> {
    if !(noise_sigma.is_finite() && noise_sigma > 0.0) {
        return Err(HarnessError::InvalidSpec(format!("noise_sigma must be positive, got {noise_sigma}")));
    }
    if !(reliability > 0.5 && reliability < 1.0) {
        return Err(HarnessError::InvalidSpec(format!(
            "reliability must lie in (0.5, 1), got {reliability}"
        )));
    }
    if trials == 0 {
        return Err(HarnessError::InvalidSpec("trials must be at least 1".into()));
    }

    let sides = [instance.clone(), answer_partner(instance, options.seed)?]
        .into_iter()
        .map(|inst| {
            let truth = decide_dp(inst.values(), inst.target())?;
            let model = CollectiveSignalModel::new(inst, f0)?;
            let base = SimConfig::for_model(&model).with_noise(noise_sigma);
            let per_period = ReadoutPlan::new(&model, &base, options.policy)?.num_samples();
            Ok((model, base, per_period, truth))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let per_period = sides[0].2;
    let max_periods = options.ceiling / sides.iter().map(|s| s.2).max().expect("two sides");
    if max_periods == 0 {
        return Ok(SampleRequirement::BudgetExceeded { ceiling: options.ceiling });
    }

    let needed = (reliability * trials as f64).ceil() as usize;
    let probe = |periods: u64| -> Result<bool, HarnessError> {
        let plans = sides
            .iter()
            .map(|(model, base, _, truth)| {
                let config = base.with_span(Span::Periods(periods));
                Ok((ReadoutPlan::new(model, &config, options.policy)?, *truth))
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        Ok(meets_reliability(trials, needed, |t| {
            let (plan, truth) = &plans[t % 2];
            plan.run(options.seed, t as u64).decision == *truth
        }))
    };

    let mut failed = 0;
    let mut periods = 1;
    while !probe(periods)? {
        failed = periods;
        if periods == max_periods {
            return Ok(SampleRequirement::BudgetExceeded { ceiling: options.ceiling });
        }
        periods = (periods * 2).min(max_periods);
    }
    let mut passed = periods;
    while passed - failed > 1 {
        let mid = failed + (passed - failed) / 2;
        if probe(mid)? {
            passed = mid;
        } else {
            failed = mid;
        }
    }
    Ok(SampleRequirement::Found { num_samples: passed * per_period, periods: passed })
}

/// An instance with the opposite exact answer and the same `n`.
///
/// A YES instance is paired with the nearest unachievable target in range on
/// the same values; if every value in range is achievable, with the values
/// doubled and an odd target next to the doubled line. A NO instance is
/// paired with the nearest achievable sum on the same values.
pub fn answer_partner(instance: &SspInstance, seed: u64) -> Result<SspInstance, HarnessError> {
    let total = instance.total();
    let s = instance.target().min(total);
    let set = SumSet::reachable(instance.values(), total)?;
    let want_member = !(instance.target_in_range() && set.contains(s));
    let nearest = (0..=total).find_map(|d| {
        [s.checked_sub(d), s.checked_add(d).filter(|&x| x <= total)]
            .into_iter()
            .flatten()
            .find(|&x| set.contains(x) == want_member)
    });
    match nearest {
        Some(target) => Ok(instance.with_target(target)),
        None => {
            let doubled = parity_companion(instance, seed)?;
            let odd = if s < total { 2 * s + 1 } else { 2 * s - 1 };
            Ok(doubled.with_target(odd))
        }
    }
}

/// Runs trials in fixed chunks until `needed` successes are certain or impossible.
fn meets_reliability<F>(trials: usize, needed: usize, trial: F) -> bool
where
    F: Fn(usize) -> bool + Sync,
{
    let mut ok = 0;
    let mut done = 0;
    while done < trials {
        let end = (done + TRIAL_CHUNK).min(trials);
        ok += (done..end).into_par_iter().filter(|&t| trial(t)).count();
        done = end;
        if ok >= needed {
            return true;
        }
        if ok + (trials - done) < needed {
            return false;
        }
    }
    false
}

/// [`required_samples`] at each noise level of `sigmas` (ascending), with the
/// results made nondecreasing in sigma by carrying the running maximum.
pub fn required_samples_over_noise(
    instance: &SspInstance,
    f0: f64,
    sigmas: &[f64],
    reliability: f64,
    trials: usize,
    options: &SearchOptions,
) -> Result<Vec<SampleRequirement>, HarnessError> {
    if sigmas.windows(2).any(|w| w[0] > w[1]) {
        return Err(HarnessError::InvalidSpec("noise levels must be ascending".into()));
    }
    let mut out: Vec<SampleRequirement> = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let found = required_samples(instance, f0, sigma, reliability, trials, options)?;
        let carried = match out.last() {
            Some(&prev) if prev.rank() > found.rank() => prev,
            _ => found,
        };
        out.push(carried);
    }
    Ok(out)
}

//! The four sweep experiments.
//!
//! Every `(family, n)` point gets a seed derived from the sweep seed, the
//! family index and `n`; trial `t` of that point derives its own seed from
//! the point seed and `t`. Trials run on the rayon pool and are merged in
//! trial order, so the thread count never changes a report.

use std::time::Instant;

use rayon::prelude::*;

use super::fit::fit_loglinear;
use super::report::{Crossover, FamilyFit, Report, SweepRow};
use super::search::{required_samples, SampleRequirement, SearchOptions};
use super::spec::{Experiment, FamilySpec, SweepSpec};
use super::HarnessError;
use crate::instance::MAX_ENUMERATION_N;
use crate::oracle::{decide_dp, enumerate_subset_sums};
use crate::rng::derive_seed;
use crate::sim::{decide_readout, ReadoutPlan, SimConfig, Span, ThresholdPolicy};
use crate::spectrum::{energy_fraction, CollectiveSignalModel};

/// Largest `n` for which time sweeps enumerate subsets to report `min_gap_hz`.
const MIN_GAP_ENUMERATION_N: usize = 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

/// Validates `spec` and runs its experiment.
pub fn run_sweep(spec: &SweepSpec, options: &RunOptions) -> Result<Report, HarnessError> {
    spec.validate()?;
    let run = || match spec.experiment {
        Experiment::Energy => run_energy_sweep(spec),
        Experiment::Time => run_time_sweep(spec),
        Experiment::Samples => run_samples_sweep(spec),
        Experiment::Accuracy => run_accuracy_collapse(spec),
    };
    match options.jobs {
        None => run(),
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| HarnessError::InvalidSpec(format!("thread pool: {e}")))?
            .install(run),
    }
}

fn point_seed(spec: &SweepSpec, family_index: usize, n: usize) -> u64 {
    derive_seed(spec.seed, &[family_index as u64, n as u64])
}

fn trial_seed(point: u64, trial: usize) -> u64 {
    derive_seed(point, &[trial as u64])
}

/// Mean that returns the common value exactly when all inputs agree.
fn mean(values: &[f64]) -> f64 {
    if values.windows(2).all(|w| w[0] == w[1]) {
        values[0]
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn elapsed(spec: &SweepSpec, start: Instant) -> Option<f64> {
    spec.record_wall_time.then(|| start.elapsed().as_secs_f64())
}

/// Runs `point` for every `(family, n)` and fits `log2` of the value it returns.
fn sweep_points<F>(spec: &SweepSpec, metric: &str, mut point: F) -> Result<Report, HarnessError>
where
    F: FnMut(&FamilySpec, usize, u64) -> Result<(SweepRow, Option<f64>), HarnessError>,
{
    let mut rows = Vec::new();
    let mut fit = Vec::new();
    for (fi, family) in spec.families.iter().enumerate() {
        let mut points = Vec::new();
        for &n in &spec.n_values {
            let start = Instant::now();
            let (mut row, log_metric) = point(family, n, point_seed(spec, fi, n))?;
            row.wall_time_s = elapsed(spec, start);
            if let Some(y) = log_metric {
                points.push((n as f64, y));
            }
            rows.push(row);
        }
        if points.len() >= 3 {
            fit.push(FamilyFit {
                family: family.label(),
                metric: format!("log2({metric})"),
                fit: fit_loglinear(&points)?,
            });
        }
    }
    Ok(Report { spec: spec.clone(), rows, fit, crossover: Vec::new() })
}

/// Exact energy fraction of the target line at each `n`.
///
/// With several trials the row holds the geometric mean over trials (the
/// mean of `log2` values, which is what the fit uses).
pub fn run_energy_sweep(spec: &SweepSpec) -> Result<Report, HarnessError> {
    let f0 = spec.f0_hz;
    sweep_points(spec, "energy_fraction", |family, n, seed| {
        let trials: Vec<(f64, f64, f64)> = (0..spec.trials_per_point)
            .into_par_iter()
            .map(|t| {
                let instance = family.instance(n, trial_seed(seed, t))?;
                let counts = enumerate_subset_sums(&instance)?;
                let fraction = energy_fraction(&instance, instance.target())?;
                let gap = counts.min_gap().expect("at least two lines") as f64 * f0;
                Ok((fraction.log2(), gap, instance.total() as f64 * f0))
            })
            .collect::<Result<_, HarnessError>>()?;
        let log_mean = mean(&trials.iter().map(|t| t.0).collect::<Vec<_>>());
        if !log_mean.is_finite() {
            return Err(HarnessError::InvalidSpec(format!(
                "{} at n = {n} produced a target with no line",
                family.label()
            )));
        }
        let mut row = SweepRow::new(family.label(), n, seed);
        row.energy_fraction = Some(log_mean.exp2());
        row.min_gap_hz = Some(mean(&trials.iter().map(|t| t.1).collect::<Vec<_>>()));
        row.bandwidth_hz = Some(mean(&trials.iter().map(|t| t.2).collect::<Vec<_>>()));
        Ok((row, Some(log_mean)))
    })
}

/// Observation time needed to resolve integer-spaced lines when the highest
/// line may not exceed `max_frequency_hz`: `f0 = F_max / Σa_j`, so one base
/// period lasts `Σa_j / F_max`.
pub fn run_time_sweep(spec: &SweepSpec) -> Result<Report, HarnessError> {
    let f_max = spec
        .fixed
        .max_frequency_hz
        .ok_or_else(|| HarnessError::InvalidSpec("time sweeps need fixed.max_frequency_hz".into()))?;
    sweep_points(spec, "required_duration_s", |family, n, seed| {
        let trials: Vec<(f64, f64, Option<f64>)> = (0..spec.trials_per_point)
            .into_par_iter()
            .map(|t| {
                let instance = family.instance(n, trial_seed(seed, t))?;
                let total = instance.total() as f64;
                let f0 = f_max / total;
                let gap = if n <= MIN_GAP_ENUMERATION_N {
                    enumerate_subset_sums(&instance)?.min_gap().map(|g| g as f64 * f0)
                } else {
                    None
                };
                Ok((total / f_max, f0 * total, gap))
            })
            .collect::<Result<_, HarnessError>>()?;
        let duration = mean(&trials.iter().map(|t| t.0).collect::<Vec<_>>());
        let mut row = SweepRow::new(family.label(), n, seed);
        row.required_duration_s = Some(duration);
        row.bandwidth_hz = Some(mean(&trials.iter().map(|t| t.1).collect::<Vec<_>>()));
        let gaps: Option<Vec<f64>> = trials.iter().map(|t| t.2).collect();
        row.min_gap_hz = gaps.map(|g| mean(&g));
        Ok((row, Some(duration.log2())))
    })
}

/// Samples needed for the read-out to reach `reliability_target`, found by
/// Monte Carlo with `trials_per_point` decisions per probe on one seeded
/// instance per point. Ceiling hits are censored and left out of the fit.
pub fn run_samples_sweep(spec: &SweepSpec) -> Result<Report, HarnessError> {
    let sigma = spec
        .fixed
        .noise_sigma
        .ok_or_else(|| HarnessError::InvalidSpec("samples sweeps need fixed.noise_sigma".into()))?;
    let f0 = spec.f0_hz;
    sweep_points(spec, "required_samples", |family, n, seed| {
        let instance = family.instance(n, seed)?;
        let options = SearchOptions {
            ceiling: spec.sample_ceiling,
            seed: trial_seed(seed, 0),
            policy: ThresholdPolicy::HalfMinLine,
        };
        let found =
            required_samples(&instance, f0, sigma, spec.reliability_target, spec.trials_per_point, &options)?;
        let model = CollectiveSignalModel::new(instance.clone(), f0)?;
        let sample_rate = SimConfig::for_model(&model).sample_rate;
        let mut row = SweepRow::new(family.label(), n, seed);
        row.bandwidth_hz = Some(model.bandwidth());
        if n <= MAX_ENUMERATION_N {
            row.energy_fraction = Some(energy_fraction(&instance, instance.target())?);
        }
        let log_metric = match found {
            SampleRequirement::Found { num_samples, .. } => {
                row.required_samples = Some(num_samples);
                row.required_duration_s = Some(num_samples as f64 / sample_rate);
                Some((num_samples as f64).log2())
            }
            SampleRequirement::BudgetExceeded { ceiling } => {
                row.required_samples = Some(ceiling);
                row.required_samples_censored = true;
                None
            }
        };
        Ok((row, log_metric))
    })
}

/// Decision accuracy under a fixed sample budget and noise level.
///
/// Trials alternate YES and NO instances (see
/// [`FamilySpec::balanced_instance`]), so 0.5 is the guessing floor. Each
/// trial samples at twice its bandwidth for as many whole base periods as
/// the budget allows; when the budget is shorter than one period the full
/// budget is used and neighbouring lines leak into the target bin.
pub fn run_accuracy_collapse(spec: &SweepSpec) -> Result<Report, HarnessError> {
    let sigma = spec
        .fixed
        .noise_sigma
        .ok_or_else(|| HarnessError::InvalidSpec("accuracy sweeps need fixed.noise_sigma".into()))?;
    let budget = spec
        .fixed
        .sample_budget
        .ok_or_else(|| HarnessError::InvalidSpec("accuracy sweeps need fixed.sample_budget".into()))?;
    let f0 = spec.f0_hz;
    let mut report = sweep_points(spec, "decision_accuracy", |family, n, seed| {
        let outcomes: Vec<(bool, f64)> = (0..spec.trials_per_point)
            .into_par_iter()
            .map(|t| {
                let tseed = trial_seed(seed, t);
                let instance = family.balanced_instance(n, tseed, t % 2 == 0)?;
                let model = CollectiveSignalModel::new(instance.clone(), f0)?;
                let config = budget_config(&model, budget, sigma, tseed)?;
                let readout = decide_readout(&instance, f0, &config, ThresholdPolicy::HalfMinLine)?;
                let truth = decide_dp(instance.values(), instance.target())?;
                Ok((readout.decision == truth, model.bandwidth()))
            })
            .collect::<Result<_, HarnessError>>()?;
        let correct = outcomes.iter().filter(|o| o.0).count();
        let mut row = SweepRow::new(family.label(), n, seed);
        row.decision_accuracy = Some(correct as f64 / outcomes.len() as f64);
        row.bandwidth_hz = Some(mean(&outcomes.iter().map(|o| o.1).collect::<Vec<_>>()));
        Ok((row, None))
    })?;
    report.crossover = spec
        .families
        .iter()
        .map(|family| {
            let label = family.label();
            let n = report
                .rows_for(&label)
                .find(|r| r.decision_accuracy.is_some_and(|a| a < spec.reliability_target))
                .map(|r| r.n);
            Crossover { family: label, n }
        })
        .collect();
    Ok(report)
}

/// Default-rate configuration spending at most `budget` samples.
fn budget_config(
    model: &CollectiveSignalModel,
    budget: u64,
    sigma: f64,
    seed: u64,
) -> Result<SimConfig, HarnessError> {
    let base = SimConfig::for_model(model).with_noise(sigma).with_seed(seed);
    let per_period = ReadoutPlan::new(model, &base, ThresholdPolicy::HalfMinLine)?.num_samples();
    Ok(if budget >= per_period {
        base.with_span(Span::Periods(budget / per_period))
    } else {
        base.with_partial_periods(true).with_span(Span::Samples(budget))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{FamilyKind, SolutionBias};
    use crate::harness::spec::{FixedParams, MaxValue};
    use crate::harness::{emit_report, ReportFormat};

    fn spec(
        experiment: Experiment,
        families: Vec<FamilySpec>,
        n: std::ops::RangeInclusive<usize>,
    ) -> SweepSpec {
        SweepSpec::new(experiment, families, n.collect())
    }

    #[test]
    fn energy_sweep_powers_of_two_is_exact() {
        let s = spec(Experiment::Energy, vec![FamilySpec::new(FamilyKind::PowersOfTwo)], 4..=12);
        let report = run_sweep(&s, &RunOptions::default()).unwrap();
        for row in &report.rows {
            assert_eq!(row.energy_fraction, Some(0.5f64.powi(row.n as i32)));
            assert_eq!(row.min_gap_hz, Some(1.0));
        }
        let fit = report.fit_for("powers_of_two").unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn energy_sweep_all_ones_matches_binomials() {
        let s = spec(Experiment::Energy, vec![FamilySpec::new(FamilyKind::AllOnes).centered()], 4..=12);
        let report = run_sweep(&s, &RunOptions::default()).unwrap();
        for row in report.rows.iter().filter(|r| r.n % 2 == 0) {
            // C(n, n/2)² / C(2n, n) by Vandermonde's identity.
            let n = row.n as u64;
            let expected = (binomial(n, n / 2).pow(2)) as f64 / binomial(2 * n, n) as f64;
            assert!((row.energy_fraction.unwrap() - expected).abs() < 1e-15 * expected.max(1.0));
        }
        let fit = report.fit_for("all_ones:center").unwrap();
        assert!(fit.slope < 0.0 && fit.slope > -0.2, "{fit:?}");
    }

    fn binomial(n: u64, k: u64) -> u128 {
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }

    #[test]
    fn time_sweep_closed_form() {
        let mut s = spec(
            Experiment::Time,
            vec![FamilySpec::new(FamilyKind::PowersOfTwo), FamilySpec::new(FamilyKind::AllOnes)],
            4..=16,
        );
        s.fixed = FixedParams { max_frequency_hz: Some(1e6), ..FixedParams::default() };
        let report = run_sweep(&s, &RunOptions::default()).unwrap();
        for row in report.rows_for("powers_of_two") {
            assert_eq!(row.required_duration_s, Some(((1u64 << row.n) - 1) as f64 / 1e6));
            // f0·Σa with f0 = F/Σa, so equal to F up to rounding.
            assert!((row.bandwidth_hz.unwrap() - 1e6).abs() < 1e-6);
        }
        for row in report.rows_for("all_ones") {
            assert_eq!(row.required_duration_s, Some(row.n as f64 / 1e6));
        }
        assert!((report.fit_for("powers_of_two").unwrap().slope - 1.0).abs() < 0.05);
        assert!(report.fit_for("all_ones").unwrap().slope < 0.25);
    }

    #[test]
    fn time_sweep_random_pow2_values() {
        let mut s = spec(
            Experiment::Time,
            vec![FamilySpec::new(FamilyKind::Random)
                .with_max_value(MaxValue::Scaled(crate::harness::MaxValueScale::Pow2N))
                .with_bias(SolutionBias::ForceYes)],
            4..=16,
        );
        s.trials_per_point = 8;
        s.fixed.max_frequency_hz = Some(1e6);
        let report = run_sweep(&s, &RunOptions::default()).unwrap();
        let fit = &report.fit[0].fit;
        // Σa grows like n·2^(n-1), so log2(n) adds to the unit slope.
        assert!((fit.slope - 1.0).abs() < 0.2, "{fit:?}");
    }

    #[test]
    fn noiseless_accuracy_is_perfect() {
        let mut s = spec(
            Experiment::Accuracy,
            vec![
                FamilySpec::new(FamilyKind::PowersOfTwo),
                FamilySpec::new(FamilyKind::Random).with_max_value(MaxValue::Fixed(30)),
            ],
            4..=9,
        );
        s.trials_per_point = 20;
        s.fixed =
            FixedParams { noise_sigma: Some(0.0), sample_budget: Some(1 << 14), ..FixedParams::default() };
        let report = run_sweep(&s, &RunOptions::default()).unwrap();
        assert!(report.rows.iter().all(|r| r.decision_accuracy == Some(1.0)));
        assert!(report.crossover.iter().all(|c| c.n.is_none()));
    }

    #[test]
    fn parallel_and_serial_reports_match() {
        let mut s = spec(Experiment::Accuracy, vec![FamilySpec::new(FamilyKind::PowersOfTwo)], 4..=8);
        s.trials_per_point = 24;
        s.fixed = FixedParams { noise_sigma: Some(0.3), sample_budget: Some(1024), ..FixedParams::default() };
        let serial = run_sweep(&s, &RunOptions { jobs: Some(1) }).unwrap();
        let parallel = run_sweep(&s, &RunOptions { jobs: Some(4) }).unwrap();
        assert_eq!(emit_report(&serial, ReportFormat::Json), emit_report(&parallel, ReportFormat::Json));
    }

    #[test]
    fn samples_sweep_reports_censoring() {
        let mut s = spec(Experiment::Samples, vec![FamilySpec::new(FamilyKind::PowersOfTwo)], 3..=6);
        s.trials_per_point = 40;
        s.fixed.noise_sigma = Some(0.5);
        s.sample_ceiling = 3000;
        let report = run_sweep(&s, &RunOptions::default()).unwrap();
        let last = report.rows.last().unwrap();
        assert!(last.required_samples_censored);
        assert_eq!(last.required_samples, Some(3000));
        let first = &report.rows[0];
        assert!(!first.required_samples_censored);
        assert_eq!(first.required_samples.unwrap() % 14, 0);
    }

    #[test]
    fn wall_time_only_on_request() {
        let mut s = spec(Experiment::Energy, vec![FamilySpec::new(FamilyKind::AllOnes)], 3..=5);
        assert!(run_sweep(&s, &RunOptions::default()).unwrap().rows.iter().all(|r| r.wall_time_s.is_none()));
        s.record_wall_time = true;
        assert!(run_sweep(&s, &RunOptions::default()).unwrap().rows.iter().all(|r| r.wall_time_s.is_some()));
    }
}

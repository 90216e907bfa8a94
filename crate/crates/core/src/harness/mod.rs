//! Resource scaling sweeps: energy fraction, observation time, required
//! samples and accuracy under a fixed budget, each fitted as `log2(metric)`
//! against `n`.

mod fit;
mod report;
mod search;
mod spec;
mod sweep;

pub use fit::{fit_loglinear, FitResult};
pub use report::{emit_report, rows_csv, Crossover, FamilyFit, Report, ReportFormat, SweepRow, CSV_COLUMNS};
pub use search::{
    answer_partner, required_samples, required_samples_over_noise, SampleRequirement, SearchOptions,
};
pub use spec::{
    parity_companion, Experiment, FamilySpec, FixedParams, MaxValue, MaxValueScale, SweepSpec,
    DEFAULT_SAMPLE_CEILING,
};
pub use sweep::{
    run_accuracy_collapse, run_energy_sweep, run_samples_sweep, run_sweep, run_time_sweep, RunOptions,
};

use thiserror::Error;

use crate::instance::SspError;
use crate::sim::SimError;
use crate::spectrum::SpectrumError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error(transparent)]
    Ssp(#[from] SspError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl From<SpectrumError> for HarnessError {
    fn from(e: SpectrumError) -> Self {
        HarnessError::Sim(SimError::Spectrum(e))
    }
}

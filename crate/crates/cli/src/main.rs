//! `ssp-spectral`: solve, export spectra, simulate read-outs and run sweeps.
//!
//! Exit codes: 0 success, 2 input error, 3 size guard, 4 measurement
//! configuration guard, 1 for output I/O failures.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ssp_spectral::harness::{emit_report, run_sweep, HarnessError, ReportFormat, RunOptions, SweepSpec};
use ssp_spectral::{
    count_dp, decide_dp, decide_readout, exact_spectrum, gen_family, CollectiveSignalModel, FamilyKind,
    FamilyParams, ReadoutResult, SimConfig, SimError, SolutionBias, Span, SpectrumError, SspError,
    SspInstance, ThresholdPolicy, DEFAULT_SEED,
};

#[derive(Parser)]
#[command(name = "ssp-spectral", version, about = "Frequency-encoded subset sum simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance exactly and print `YES|NO <multiplicity>`.
    Solve {
        #[command(flatten)]
        source: InstanceSource,
    },
    /// Write the exact line spectrum as CSV.
    Spectrum {
        #[command(flatten)]
        source: InstanceSource,
        #[arg(long, default_value_t = 1.0)]
        f0: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the signal and print `DECISION MAGNITUDE THRESHOLD`.
    Simulate(SimulateArgs),
    /// Run a sweep spec and write its report.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv", value_parser = parse_format)]
        format: ReportFormat,
        /// Worker threads. Output bytes do not depend on it.
        #[arg(long)]
        jobs: Option<usize>,
        /// Fill the wall_time_s column (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
}

/// An instance file, or a generated family instance.
#[derive(Args)]
struct InstanceSource {
    /// Instance JSON: {"values": [..], "target": s}.
    #[arg(required_unless_present = "family", conflicts_with = "family")]
    instance: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind, requires = "n")]
    family: Option<FamilyKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 100)]
    max_value: u64,
    #[arg(long, default_value = "any", value_parser = parse_bias)]
    bias: SolutionBias,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    instance_seed: u64,
    /// Replace the target.
    #[arg(long)]
    target: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: InstanceSource,
    #[arg(long, default_value_t = 1.0)]
    f0: f64,
    /// Samples per second; defaults to rate_margin times the bandwidth.
    #[arg(long)]
    sample_rate: Option<f64>,
    /// Observation time in seconds; one base period when no span is given.
    #[arg(long, conflicts_with = "num_samples")]
    duration: Option<f64>,
    #[arg(long)]
    num_samples: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    #[arg(long)]
    adc_bits: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// `half_min_line` or an absolute magnitude.
    #[arg(long, default_value = "half_min_line")]
    threshold: ThresholdPolicy,
    #[arg(long)]
    allow_partial_periods: bool,
    #[arg(long, default_value_t = SimConfig::DEFAULT_RATE_MARGIN)]
    rate_margin: f64,
    /// Also write the result as a one-row CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

enum Failure {
    Input(String),
    SizeGuard(String),
    ConfigGuard(String),
    Output(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Output(_) => 1,
            Failure::Input(_) => 2,
            Failure::SizeGuard(_) => 3,
            Failure::ConfigGuard(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::SizeGuard(m) | Failure::ConfigGuard(m) | Failure::Output(m) => m,
        }
    }
}

impl From<SspError> for Failure {
    fn from(e: SspError) -> Self {
        if e.is_size_guard() {
            Failure::SizeGuard(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<SpectrumError> for Failure {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::Ssp(e) => e.into(),
            other => Failure::ConfigGuard(other.to_string()),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Ssp(e) => e.into(),
            SimError::Spectrum(e) => e.into(),
            other => Failure::ConfigGuard(other.to_string()),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Ssp(e) => e.into(),
            HarnessError::Sim(e) => e.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn parse_kind(s: &str) -> Result<FamilyKind, String> {
    match s {
        "all_ones" => Ok(FamilyKind::AllOnes),
        "powers_of_two" => Ok(FamilyKind::PowersOfTwo),
        "random" => Ok(FamilyKind::Random),
        other => Err(format!("unknown family `{other}` (all_ones, powers_of_two, random)")),
    }
}

fn parse_bias(s: &str) -> Result<SolutionBias, String> {
    match s {
        "any" => Ok(SolutionBias::Any),
        "force_yes" => Ok(SolutionBias::ForceYes),
        "force_no" => Ok(SolutionBias::ForceNo),
        other => Err(format!("unknown bias `{other}` (any, force_yes, force_no)")),
    }
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse()
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

impl InstanceSource {
    fn load(&self) -> Result<SspInstance, Failure> {
        let instance = match (&self.instance, self.family) {
            (Some(path), _) => SspInstance::from_json(&read_input(path)?)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
            (None, Some(kind)) => {
                let n = self.n.expect("clap requires --n with --family");
                gen_family(kind, n, &FamilyParams::new(self.max_value, self.instance_seed, self.bias))?
            }
            (None, None) => unreachable!("clap requires an instance source"),
        };
        Ok(match self.target {
            Some(t) => instance.with_target(t),
            None => instance,
        })
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Output(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Output(format!("stdout: {e}"))),
    }
}

fn solve(source: &InstanceSource) -> Result<(), Failure> {
    let inst = source.load()?;
    let yes = decide_dp(inst.values(), inst.target())?;
    let count = if yes { count_dp(inst.values(), inst.target())? } else { 0 };
    write_output(None, &format!("{} {count}\n", if yes { "YES" } else { "NO" }))
}

fn spectrum(source: &InstanceSource, f0: f64, out: Option<&Path>) -> Result<(), Failure> {
    let inst = source.load()?;
    write_output(out, &exact_spectrum(&inst, f0)?.to_csv())
}

fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let inst = args.source.load()?;
    let model = CollectiveSignalModel::new(inst.clone(), args.f0)?;
    let mut config = SimConfig::for_model(&model)
        .with_rate_margin(args.rate_margin)
        .with_noise(args.noise_sigma)
        .with_adc_bits(args.adc_bits)
        .with_seed(args.seed)
        .with_stream(args.stream)
        .with_partial_periods(args.allow_partial_periods);
    config = config.with_sample_rate(args.sample_rate.unwrap_or(args.rate_margin * model.bandwidth()));
    if let Some(d) = args.duration {
        config = config.with_span(Span::Seconds(d));
    }
    if let Some(k) = args.num_samples {
        config = config.with_span(Span::Samples(k));
    }
    let result = decide_readout(&inst, args.f0, &config, args.threshold)?;
    if let Some(path) = &args.csv {
        let text = format!("{}\n{}\n", ReadoutResult::CSV_HEADER, result.csv_row());
        write_output(Some(path), &text)?;
    }
    write_output(None, &format!("{}\n", result.summary_line()))
}

fn sweep(
    spec_path: &Path,
    out: Option<&Path>,
    format: ReportFormat,
    jobs: Option<usize>,
    timing: bool,
) -> Result<(), Failure> {
    let mut spec = SweepSpec::from_json(&read_input(spec_path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", spec_path.display())))?;
    spec.record_wall_time |= timing;
    let report = run_sweep(&spec, &RunOptions { jobs })?;
    write_output(out, &emit_report(&report, format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { source } => solve(source),
        Command::Spectrum { source, f0, out } => spectrum(source, *f0, out.as_deref()),
        Command::Simulate(args) => simulate(args),
        Command::Sweep { spec, out, format, jobs, timing } => {
            sweep(spec, out.as_deref(), *format, *jobs, *timing)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

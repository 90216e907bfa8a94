//! Simulation of a frequency-encoded analog subset sum machine.
//!
//! Each input value `a_j` drives an oscillator at `a_j·f0`; the product of
//! the oscillators carries one spectral line per achievable subset sum. A
//! subset sum question "does some subset reach `s`?" becomes "is there a
//! line at `s·f0`?". This crate provides:
//!
//! * [`oracle`]: exact answers by brute-force enumeration and by
//!   pseudo-polynomial dynamic programming,
//! * [`spectrum`]: the idealized signal, its exact line spectrum and the
//!   bandwidth, spacing and energy quantities derived from it,
//! * [`sim`]: sampled, noisy, quantized measurement with a single-bin
//!   read-out and threshold decision,
//! * [`harness`]: sweeps over `n` that measure how the read-out's energy,
//!   time and sample requirements grow, with log-linear fits and reports.
//!
//! The empty subset counts, so `s = 0` is always a YES instance (it is the
//! DC line of the spectrum).

pub mod family;
pub mod harness;
pub mod instance;
pub mod oracle;
pub mod rng;
pub mod sim;
pub mod spectrum;

pub use family::{gen_family, FamilyKind, FamilyParams, SolutionBias};
pub use instance::{SspError, SspInstance};
pub use oracle::{count_dp, decide_dp, enumerate_subset_sums, SumMultiplicities};
pub use rng::DEFAULT_SEED;
pub use sim::{
    decide_readout, readout_snr, single_bin_readout, synthesize, ReadoutResult, SampledSignal, SimConfig,
    SimError, Span, ThresholdPolicy,
};
pub use spectrum::{
    bandwidth, energy_fraction, eval_signal, exact_amplitude, exact_spectrum, min_gap, CollectiveSignalModel,
    ExactSpectrum, SpectralLine, SpectrumError,
};

pub use num_complex::Complex64;

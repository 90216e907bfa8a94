//! Seeded instance families for the scaling sweeps.

use std::fmt;

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::instance::{SspError, SspInstance};
use crate::oracle::SumSet;
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `a_j = 1`: only `n + 1` lines, binomial multiplicities.
    AllOnes,
    /// `a_j = 2^(j-1)`: all `2^n` sums distinct.
    PowersOfTwo,
    /// `a_j` uniform in `[1, max_value]`.
    Random,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::AllOnes => "all_ones",
            FamilyKind::PowersOfTwo => "powers_of_two",
            FamilyKind::Random => "random",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the generator picks the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionBias {
    /// Uniform over the distinct achievable sums.
    ForceYes,
    /// Uniform over the unachievable values in `[0, Σa_j]`.
    ForceNo,
    /// Uniform over `[0, Σa_j]`.
    #[default]
    Any,
}

impl SolutionBias {
    pub fn name(self) -> &'static str {
        match self {
            SolutionBias::ForceYes => "force_yes",
            SolutionBias::ForceNo => "force_no",
            SolutionBias::Any => "any",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyParams {
    pub max_value: u64,
    pub seed: u64,
    pub bias: SolutionBias,
}

impl FamilyParams {
    pub fn new(max_value: u64, seed: u64, bias: SolutionBias) -> Self {
        Self { max_value, seed, bias }
    }
}

/// Builds an instance of the given family. Equal arguments give equal instances.
///
/// For `force_no` the target is drawn uniformly from the values the DP marks
/// unreachable, which has the same distribution as redrawing uniform values
/// until `decide_dp` rejects one.
pub fn gen_family(kind: FamilyKind, n: usize, params: &FamilyParams) -> Result<SspInstance, SspError> {
    if n == 0 {
        return Err(SspError::Empty);
    }
    let mut rng = stream_rng(params.seed, 0);
    let values: Vec<u64> = match kind {
        FamilyKind::AllOnes => vec![1; n],
        FamilyKind::PowersOfTwo => {
            if n > 63 {
                return Err(SspError::Overflow);
            }
            (0..n).map(|j| 1u64 << j).collect()
        }
        FamilyKind::Random => {
            if params.max_value == 0 {
                return Err(SspError::InvalidParameter("max_value must be at least 1".into()));
            }
            (0..n).map(|_| rng.random_range(1..=params.max_value)).collect()
        }
    };
    let probe = SspInstance::new(values, 0)?;
    let total = probe.total();

    // Every value of [0, total] is a subset sum of these two families.
    let dense = matches!(kind, FamilyKind::AllOnes | FamilyKind::PowersOfTwo);
    let target = match params.bias {
        SolutionBias::Any => rng.random_range(0..=total),
        SolutionBias::ForceYes if dense => rng.random_range(0..=total),
        SolutionBias::ForceNo if dense => return Err(SspError::ForceNoImpossible { total }),
        SolutionBias::ForceYes => {
            let set = SumSet::reachable(probe.values(), total)?;
            let k = rng.random_range(0..set.count());
            set.nth_member(k).expect("k is below the member count")
        }
        SolutionBias::ForceNo => {
            let set = SumSet::reachable(probe.values(), total)?;
            let holes = total + 1 - set.count();
            if holes == 0 {
                return Err(SspError::ForceNoImpossible { total });
            }
            let k = rng.random_range(0..holes);
            set.nth_non_member(k).expect("k is below the hole count")
        }
    };
    Ok(probe.with_target(target))
}

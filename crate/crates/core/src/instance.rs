//! Subset sum problem instances and their JSON form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported value of `Σ a_j`.
pub const MAX_TOTAL: u64 = 1 << 63;

/// Largest `n` for which brute-force enumeration is allowed.
pub const MAX_ENUMERATION_N: usize = 24;

/// Largest `n` for which exact subset counting is supported.
pub const MAX_COUNT_N: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SspError {
    #[error("instance has no values")]
    Empty,
    #[error("value at index {index} is zero; all values must be positive")]
    NonPositiveValue { index: usize },
    #[error("sum of values exceeds 2^63")]
    Overflow,
    #[error("n = {n} is too large for {what} (limit {limit})")]
    TooLarge { what: &'static str, n: usize, limit: usize },
    #[error("dynamic programming table of {entries} entries exceeds the limit of {limit}")]
    TableTooLarge { entries: u64, limit: u64 },
    #[error("every value in [0, {total}] is an achievable sum; no NO target exists")]
    ForceNoImpossible { total: u64 },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed instance: {0}")]
    Parse(String),
}

impl SspError {
    /// True for errors caused by resource guards rather than bad input.
    pub fn is_size_guard(&self) -> bool {
        matches!(self, SspError::TooLarge { .. } | SspError::TableTooLarge { .. } | SspError::Overflow)
    }
}

/// A subset sum instance: positive integer values and a target sum.
///
/// Values may repeat. The empty subset is a valid subset, so a target of 0
/// is always achievable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SspInstance {
    values: Vec<u64>,
    target: u64,
    #[serde(skip)]
    total: u64,
}

impl SspInstance {
    pub fn new(values: Vec<u64>, target: u64) -> Result<Self, SspError> {
        let total = checked_total(&values)?;
        if values.is_empty() {
            return Err(SspError::Empty);
        }
        if let Some(index) = values.iter().position(|&v| v == 0) {
            return Err(SspError::NonPositiveValue { index });
        }
        Ok(Self { values, target, total })
    }

    /// Parses the `{"values": [...], "target": s}` form.
    pub fn from_json(text: &str) -> Result<Self, SspError> {
        let raw: RawInstance = serde_json::from_str(text).map_err(|e| SspError::Parse(e.to_string()))?;
        for (index, &v) in raw.values.iter().enumerate() {
            if v <= 0 {
                return Err(SspError::NonPositiveValue { index });
            }
        }
        if raw.target < 0 {
            return Err(SspError::Parse("target must be nonnegative".into()));
        }
        let values = raw.values.into_iter().map(|v| v as u64).collect();
        Self::new(values, raw.target as u64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// `Σ a_j`, the largest achievable sum.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn target_in_range(&self) -> bool {
        self.target <= self.total
    }

    pub fn with_target(&self, target: u64) -> Self {
        Self { target, ..self.clone() }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    values: Vec<i64>,
    target: i64,
}

/// Sum of `values`, rejecting totals above 2^63.
pub fn checked_total(values: &[u64]) -> Result<u64, SspError> {
    let total = values.iter().try_fold(0u64, |acc, &v| acc.checked_add(v)).ok_or(SspError::Overflow)?;
    if total > MAX_TOTAL {
        return Err(SspError::Overflow);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_valid_instance() {
        let inst = SspInstance::from_json(r#"{"values": [3, 34, 4], "target": 9}"#).unwrap();
        assert_eq!(inst.values(), &[3, 34, 4]);
        assert_eq!(inst.target(), 9);
        assert_eq!(inst.total(), 41);
        assert_eq!(inst.n(), 3);
    }

    #[test]
    fn rejects_bad_json() {
        for text in [
            r#"{"values": [1, 0], "target": 1}"#,
            r#"{"values": [1, -3], "target": 1}"#,
            r#"{"values": [1, 2.5], "target": 1}"#,
            r#"{"values": [1, 2]}"#,
            r#"{"target": 2}"#,
            r#"{"values": [], "target": 0}"#,
            r#"{"values": [1], "target": -1}"#,
            r#"{"values": [1], "target": 1.0}"#,
            r#"{"values": [1], "target": 1, "extra": 2}"#,
            "not json",
        ] {
            assert!(SspInstance::from_json(text).is_err(), "accepted {text}");
        }
    }

    #[test]
    fn total_limit_is_inclusive() {
        assert!(SspInstance::new(vec![1 << 62, 1 << 62], 0).is_ok());
        assert_eq!(SspInstance::new(vec![1 << 62, 1 << 62, 1], 0), Err(SspError::Overflow));
        assert_eq!(SspInstance::new(vec![u64::MAX, 2], 0), Err(SspError::Overflow));
    }

    #[test]
    fn json_round_trip() {
        let inst = SspInstance::new(vec![5, 5, 7], 12).unwrap();
        assert_eq!(SspInstance::from_json(&inst.to_json()).unwrap(), inst);
    }
}

//! Exact subset sum oracles.
//!
//! Two independent routes to the same answers: brute-force enumeration of
//! all `2^n` subsets, and pseudo-polynomial dynamic programming over sums.
//! Everything the analog model produces is checked against these.

use crate::instance::{checked_total, SspError, SspInstance, MAX_COUNT_N, MAX_ENUMERATION_N};

/// Largest bitset (in bits) the decision DP will allocate.
pub const MAX_DECIDE_TABLE: u64 = 1 << 33;

/// Largest counting table (in entries) the counting DP will allocate.
pub const MAX_COUNT_TABLE: u64 = 1 << 26;

/// Exact number of subsets reaching each achievable sum.
///
/// Counts are stored as `u64`. Subsets of positive values that share a sum
/// form an antichain, so by Sperner's theorem `N(σ) ≤ C(n, n/2)`, which is
/// below `2^64` for every `n ≤ 64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumMultiplicities {
    n: usize,
    total: u64,
    /// `(σ, N(σ))` for every achievable σ, sorted by σ.
    lines: Vec<(u64, u64)>,
}

impl SumMultiplicities {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `N(σ)`; zero for unachievable sums.
    pub fn get(&self, sum: u64) -> u64 {
        self.lines.binary_search_by_key(&sum, |&(s, _)| s).map(|i| self.lines[i].1).unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.lines.iter().copied()
    }

    /// Number of distinct achievable sums.
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// `Σ N(σ)`, which must equal `2^n`.
    pub fn mass(&self) -> u128 {
        self.lines.iter().map(|&(_, c)| c as u128).sum()
    }

    /// `Σ N(σ)²`.
    pub fn sum_of_squares(&self) -> u128 {
        self.lines.iter().map(|&(_, c)| (c as u128) * (c as u128)).sum()
    }

    /// Smallest difference between two distinct achievable sums.
    pub fn min_gap(&self) -> Option<u64> {
        self.lines.windows(2).map(|w| w[1].0 - w[0].0).min()
    }
}

/// Lists the sum of every subset and tallies them.
pub fn enumerate_subset_sums(instance: &SspInstance) -> Result<SumMultiplicities, SspError> {
    let n = instance.n();
    if n > MAX_ENUMERATION_N {
        return Err(SspError::TooLarge { what: "subset enumeration", n, limit: MAX_ENUMERATION_N });
    }
    let mut sums = Vec::with_capacity(1usize << n);
    sums.push(0u64);
    for &a in instance.values() {
        let len = sums.len();
        for i in 0..len {
            // Cannot overflow: total ≤ 2^63 is an instance invariant.
            sums.push(sums[i] + a);
        }
    }
    sums.sort_unstable();

    let mut lines: Vec<(u64, u64)> = Vec::new();
    for s in sums {
        match lines.last_mut() {
            Some((last, count)) if *last == s => *count += 1,
            _ => lines.push((s, 1)),
        }
    }
    Ok(SumMultiplicities { n, total: instance.total(), lines })
}

/// Decides whether some (possibly empty) subset of `values` sums to `s`.
///
/// `O(n·s)` time over a bitset of `s + 1` bits.
pub fn decide_dp(values: &[u64], s: u64) -> Result<bool, SspError> {
    let total = checked_total(values)?;
    if s > total {
        return Ok(false);
    }
    Ok(SumSet::reachable(values, s)?.contains(s))
}

/// Counts the subsets of `values` summing to `s`. Out-of-range `s` gives 0.
pub fn count_dp(values: &[u64], s: u64) -> Result<u128, SspError> {
    if values.len() > MAX_COUNT_N {
        return Err(SspError::TooLarge { what: "exact counting", n: values.len(), limit: MAX_COUNT_N });
    }
    let total = checked_total(values)?;
    if s > total {
        return Ok(0);
    }
    let entries = s + 1;
    if entries > MAX_COUNT_TABLE {
        return Err(SspError::TableTooLarge { entries, limit: MAX_COUNT_TABLE });
    }
    let len = entries as usize;
    let mut dp = vec![0u128; len];
    dp[0] = 1;
    for &a in values {
        if a == 0 {
            dp.iter_mut().for_each(|c| *c *= 2);
            continue;
        }
        if a > s {
            continue;
        }
        let a = a as usize;
        for sigma in (a..len).rev() {
            dp[sigma] += dp[sigma - a];
        }
    }
    Ok(dp[len - 1])
}

/// Set of sums in `[0, limit]` reachable by some subset.
#[derive(Debug, Clone)]
pub(crate) struct SumSet {
    words: Vec<u64>,
    limit: u64,
}

impl SumSet {
    pub(crate) fn reachable(values: &[u64], limit: u64) -> Result<Self, SspError> {
        let bits = limit + 1;
        if bits > MAX_DECIDE_TABLE {
            return Err(SspError::TableTooLarge { entries: bits, limit: MAX_DECIDE_TABLE });
        }
        let mut words = vec![0u64; bits.div_ceil(64) as usize];
        words[0] = 1;
        for &a in values {
            if a <= limit {
                or_shifted(&mut words, a);
            }
        }
        let spare = (words.len() as u64) * 64 - bits;
        if spare > 0 {
            let last = words.len() - 1;
            words[last] &= u64::MAX >> spare;
        }
        Ok(Self { words, limit })
    }

    pub(crate) fn contains(&self, s: u64) -> bool {
        s <= self.limit && (self.words[(s / 64) as usize] >> (s % 64)) & 1 == 1
    }

    pub(crate) fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// The `k`-th reachable sum in increasing order.
    pub(crate) fn nth_member(&self, k: u64) -> Option<u64> {
        self.nth_with(k, false)
    }

    /// The `k`-th unreachable value of `[0, limit]` in increasing order.
    pub(crate) fn nth_non_member(&self, k: u64) -> Option<u64> {
        self.nth_with(k, true)
    }

    fn nth_with(&self, mut k: u64, invert: bool) -> Option<u64> {
        for (i, &w) in self.words.iter().enumerate() {
            let base = i as u64 * 64;
            let valid = (self.limit + 1 - base).min(64);
            let mask = if valid == 64 { u64::MAX } else { (1u64 << valid) - 1 };
            let mut w = if invert { !w & mask } else { w };
            let ones = w.count_ones() as u64;
            if k >= ones {
                k -= ones;
                continue;
            }
            for _ in 0..k {
                w &= w - 1;
            }
            return Some(base + w.trailing_zeros() as u64);
        }
        None
    }
}

/// `bits |= bits << shift`, truncated to the slice length.
fn or_shifted(bits: &mut [u64], shift: u64) {
    let word_shift = (shift / 64) as usize;
    let bit_shift = (shift % 64) as u32;
    if word_shift >= bits.len() {
        return;
    }
    // Descending so every source word is read before it is updated.
    for i in (word_shift..bits.len()).rev() {
        let src = i - word_shift;
        let mut v = bits[src] << bit_shift;
        if bit_shift > 0 && src > 0 {
            v |= bits[src - 1] >> (64 - bit_shift);
        }
        bits[i] |= v;
    }
}

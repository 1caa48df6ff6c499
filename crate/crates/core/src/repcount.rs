//! Exact order-h representation counts.
//!
//! `r_{A,h}(n)` counts multisets `{a_1 <= ... <= a_h}` drawn from `A` with
//! `a_1 + ... + a_h = n`. The sets handled here are small in cardinality but
//! huge in magnitude, so everything is plain enumeration over the sorted
//! element list; there is no convolution.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::numset::IntegerSet;

/// Reference oracle: walks every multiset of size `h` with no pruning.
pub fn rep_count_naive(a: &IntegerSet, h: usize, n: &BigInt) -> u64 {
    fn walk(a: &[BigInt], start: usize, slots: usize, partial: &BigInt, n: &BigInt) -> u64 {
        if slots == 0 {
            return u64::from(partial == n);
        }
        (start..a.len())
            .map(|i| walk(a, i, slots - 1, &(partial + &a[i]), n))
            .sum()
    }
    walk(a.as_slice(), 0, h, &BigInt::zero(), n)
}

/// Pruned depth-first count, equal to [`rep_count_naive`].
pub fn rep_count(a: &IntegerSet, h: usize, n: &BigInt) -> u64 {
    count_from(a.as_slice(), 0, h, n)
}

fn count_from(a: &[BigInt], start: usize, slots: usize, target: &BigInt) -> u64 {
    let tail = &a[start.min(a.len())..];
    match slots {
        0 => u64::from(target.is_zero()),
        1 => u64::from(tail.binary_search(target).is_ok()),
        2 => two_pointer(tail, target),
        _ => {
            let Some(max) = tail.last() else { return 0 };
            let rest = BigInt::from(slots - 1);
            // Remaining slots top out at max, so c must reach target - (slots-1)*max.
            let floor = target - &rest * max;
            let first = start + tail.partition_point(|c| *c < floor);
            let slots_big = BigInt::from(slots);
            let mut total = 0;
            for i in first..a.len() {
                let c = &a[i];
                // Remaining slots are all >= c.
                if c * &slots_big > *target {
                    break;
                }
                total += count_from(a, i, slots - 1, &(target - c));
            }
            total
        }
    }
}

fn two_pointer(a: &[BigInt], target: &BigInt) -> u64 {
    if a.is_empty() {
        return 0;
    }
    let (mut i, mut j) = (0usize, a.len() - 1);
    let mut count = 0;
    while i <= j {
        let s = &a[i] + &a[j];
        match s.cmp(target) {
            std::cmp::Ordering::Equal => {
                count += 1;
                if j == 0 {
                    break;
                }
                i += 1;
                j -= 1;
            }
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => {
                if j == 0 {
                    break;
                }
                j -= 1;
            }
        }
    }
    count
}

/// Representation counts over a contiguous window `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepTable {
    pub window_lo: BigInt,
    pub window_hi: BigInt,
    counts: Vec<u64>,
}

impl RepTable {
    pub fn get(&self, n: &BigInt) -> Option<u64> {
        if n < &self.window_lo || n > &self.window_hi {
            return None;
        }
        let offset: usize = (n - &self.window_lo).try_into().ok()?;
        self.counts.get(offset).copied()
    }

    /// `(n, count)` pairs in ascending order of `n`.
    pub fn iter(&self) -> impl Iterator<Item = (BigInt, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (&self.window_lo + BigInt::from(i), c))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,count\n");
        for (n, c) in self.iter() {
            let _ = writeln!(out, "{n},{c}");
        }
        out
    }
}

/// `rep_count` for every `n` in `[lo, hi]`, evaluated in parallel.
///
/// Panics if `lo > hi` or the window is wider than `usize`.
pub fn rep_table(a: &IntegerSet, h: usize, lo: &BigInt, hi: &BigInt) -> RepTable {
    assert!(lo <= hi, "empty rep_table window [{lo}, {hi}]");
    let width: usize = (hi - lo + BigInt::one())
        .try_into()
        .expect("rep_table window too wide");
    let counts = (0..width)
        .into_par_iter()
        .map(|i| rep_count(a, h, &(lo + BigInt::from(i))))
        .collect();
    RepTable {
        window_lo: lo.clone(),
        window_hi: hi.clone(),
        counts,
    }
}

/// Every attained h-fold sum with its multiplicity.
///
/// Enumerates all `C(|A|+h-1, h)` multisets, so it is the exhaustive check
/// over the full range `[h·min A, h·max A]`: sums not listed have count 0.
pub fn sumset_histogram(a: &IntegerSet, h: usize) -> BTreeMap<BigInt, u64> {
    fn walk(
        a: &[BigInt],
        start: usize,
        slots: usize,
        partial: BigInt,
        out: &mut BTreeMap<BigInt, u64>,
    ) {
        if slots == 0 {
            *out.entry(partial).or_insert(0) += 1;
            return;
        }
        for i in start..a.len() {
            walk(a, i, slots - 1, &partial + &a[i], out);
        }
    }
    let mut out = BTreeMap::new();
    walk(a.as_slice(), 0, h, BigInt::zero(), &mut out);
    out
}

/// The largest representation count, and the smallest `n` attaining it.
pub fn max_representation(a: &IntegerSet, h: usize) -> Option<(BigInt, u64)> {
    sumset_histogram(a, h)
        .into_iter()
        .fold(None, |best: Option<(BigInt, u64)>, (n, c)| match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((n, c)),
        })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BhgCertificate {
    pub holds: bool,
    /// Smallest `n` with `r_{A,h}(n) > g`, and its count.
    pub witness: Option<(BigInt, u64)>,
}

/// Whether `r_{A,h}(n) <= g` for every integer `n`.
pub fn is_bhg(a: &IntegerSet, h: usize, g: u64) -> BhgCertificate {
    let witness = sumset_histogram(a, h).into_iter().find(|(_, c)| *c > g);
    BhgCertificate {
        holds: witness.is_none(),
        witness,
    }
}

//! Executable checks for the structural lemmas behind the construction.
//!
//! After stage `k` adds `U_k = {u_{2k-1}, u_{2k}}`, the h-fold sumset of
//! `A_k` splits into classes
//!
//! ```text
//! A_k^(s,t) = (h - s - t) A_{k-1} + s·u_{2k-1} + t·u_{2k},   s + t <= h
//! ```
//!
//! which are pairwise disjoint except possibly `(0,0)` against `(h-1,1)`,
//! and every class outside that pair lies beyond `n0` in magnitude.
//! [`ClassDecomposition`] materializes the classes so both claims can be
//! checked by direct intersection.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;

use super::{set_after, ConstructionState, StageRecord};
use crate::error::{Error, Result};
use crate::numset::IntegerSet;
use crate::repcount::{max_representation, rep_count, rep_table, sumset_histogram};

pub type ClassKey = (usize, usize);

#[derive(Clone, Debug)]
pub struct ClassDecomposition {
    pub h: usize,
    pub k: u64,
    /// `A_{k-1}`.
    pub base: IntegerSet,
    pub u: (BigInt, BigInt),
    pub classes: BTreeMap<ClassKey, IntegerSet>,
}

impl ClassDecomposition {
    fn is_exempt(&self, key: ClassKey) -> bool {
        key == (0, 0) || key == (self.h - 1, 1)
    }

    /// Exempt pair aside, every pair of classes that share an element.
    pub fn overlapping_pairs(&self) -> Vec<(ClassKey, ClassKey)> {
        let keys: Vec<ClassKey> = self.classes.keys().copied().collect();
        let mut out = Vec::new();
        for (i, &p) in keys.iter().enumerate() {
            for &q in &keys[i + 1..] {
                if self.is_exempt(p) && self.is_exempt(q) {
                    continue;
                }
                if self.classes[&p].intersects(&self.classes[&q]) {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Smallest `|n|` over all classes outside `{(0,0), (h-1,1)}`.
    pub fn min_magnitude_outside(&self) -> Option<BigInt> {
        self.classes
            .iter()
            .filter(|(key, _)| !self.is_exempt(**key))
            .flat_map(|(_, set)| set.iter().map(|n| n.abs()))
            .min()
    }

    /// `r_{s,t}(n)`: representations of `n` inside class `(s, t)`.
    pub fn class_count(&self, key: ClassKey, n: &BigInt) -> u64 {
        let (s, t) = key;
        let rest = n - &self.u.0 * BigInt::from(s) - &self.u.1 * BigInt::from(t);
        rep_count(&self.base, self.h - s - t, &rest)
    }

    pub fn report(&self, n0: u64) -> ClassReport {
        let overlaps = self.overlapping_pairs();
        let min_magnitude = self.min_magnitude_outside();
        let exceeds_n0 = min_magnitude
            .as_ref()
            .map_or(true, |m| *m > BigInt::from(n0));
        ClassReport {
            k: self.k,
            sizes: self.classes.iter().map(|(k, s)| (*k, s.len())).collect(),
            disjoint: overlaps.is_empty(),
            overlaps,
            min_magnitude,
            exceeds_n0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    pub k: u64,
    pub sizes: BTreeMap<ClassKey, usize>,
    pub disjoint: bool,
    pub overlaps: Vec<(ClassKey, ClassKey)>,
    pub min_magnitude: Option<BigInt>,
    pub exceeds_n0: bool,
}

impl ClassReport {
    pub fn holds(&self) -> bool {
        self.disjoint && self.exceeds_n0
    }
}

/// Materializes the classes `A_k^(s,t)` from `A_{k-1}` and `U_k`.
pub fn decompose(base: &IntegerSet, u: &(BigInt, BigInt), h: usize, k: u64) -> ClassDecomposition {
    let mut classes = BTreeMap::new();
    for s in 0..=h {
        for t in 0..=(h - s) {
            let shift = &u.0 * BigInt::from(s) + &u.1 * BigInt::from(t);
            let sums = sumset_histogram(base, h - s - t);
            classes.insert(
                (s, t),
                IntegerSet::from_unsorted(sums.into_keys().map(|n| n + &shift)),
            );
        }
    }
    ClassDecomposition {
        h,
        k,
        base: base.clone(),
        u: u.clone(),
        classes,
    }
}

/// `A_{k-1}` and `U_k` for a stage that added its pair.
pub fn stage_inputs(
    a0: &IntegerSet,
    audit: &[StageRecord],
    k: u64,
) -> Result<(IntegerSet, (BigInt, BigInt))> {
    let rec = audit
        .iter()
        .find(|s| s.k == k)
        .ok_or_else(|| Error::Diagnostic(format!("stage {k} not in audit")))?;
    let u = rec
        .u
        .clone()
        .ok_or_else(|| Error::Diagnostic(format!("stage {k} added nothing")))?;
    Ok((set_after(a0, audit, k - 1), u))
}

/// Recovers `A_0` from a final set by removing every recorded u value.
pub fn recover_a0(final_set: &IntegerSet, audit: &[StageRecord]) -> Result<IntegerSet> {
    let us = IntegerSet::from_unsorted(
        audit
            .iter()
            .filter_map(|s| s.u.clone())
            .flat_map(|(a, b)| [a, b]),
    );
    if !us.is_subset(final_set) {
        return Err(Error::Diagnostic(
            "audit lists u values missing from the set".into(),
        ));
    }
    Ok(final_set.difference(&us))
}

/// Class decomposition at stage `k` of a finished run.
pub fn class_decompose(state: &ConstructionState, k: u64) -> Result<ClassDecomposition> {
    let (base, u) = stage_inputs(&state.a0, &state.audit, k)?;
    Ok(decompose(&base, &u, state.params.h, k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOrderRow {
    pub h_prime: usize,
    pub max_count: u64,
    pub argmax: Option<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOrderReport {
    pub g: u64,
    pub rows: Vec<PartialOrderRow>,
}

impl PartialOrderReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.max_count <= self.g)
    }
}

/// `r_{A,h'}(m) <= g` for every `2 <= h' < h`.
///
/// With no window the whole h'-fold sumset is enumerated; otherwise only
/// `m` in `[lo, hi]` is scanned.
pub fn partial_order_check(
    a: &IntegerSet,
    h: usize,
    g: u64,
    window: Option<(&BigInt, &BigInt)>,
) -> PartialOrderReport {
    let rows = (2..h)
        .map(|h_prime| {
            let best = match window {
                None => max_representation(a, h_prime),
                Some((lo, hi)) => rep_table(a, h_prime, lo, hi)
                    .iter()
                    .fold(None, |best: Option<(BigInt, u64)>, (n, c)| match best {
                        Some((_, bc)) if bc >= c => best,
                        _ if c == 0 => best,
                        _ => Some((n, c)),
                    }),
            };
            PartialOrderRow {
                h_prime,
                max_count: best.as_ref().map_or(0, |(_, c)| *c),
                argmax: best.map(|(n, _)| n),
            }
        })
        .collect();
    PartialOrderReport { g, rows }
}

/// `(k, r_{A_{k-1},h}(z_k), r_{A_k,h}(z_k))` for every stage that added.
pub fn stage_increments(state: &ConstructionState) -> Vec<(u64, u64, u64)> {
    let h = state.params.h;
    state
        .audit
        .iter()
        .filter(|s| s.added)
        .map(|s| {
            let z = BigInt::from(s.z);
            let before = rep_count(&state.set_at(s.k - 1), h, &z);
            let after = rep_count(&state.set_at(s.k), h, &z);
            (s.k, before, after)
        })
        .collect()
}

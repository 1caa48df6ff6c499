//! Constructors for B_h[g] sequences.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::numset::{counting_function, dilate, IntegerSet};
use crate::repcount::max_representation;

/// Incremental greedy state: `sums[j]` maps each j-fold sum to its multiplicity.
struct Greedy {
    h: usize,
    g: u64,
    sums: Vec<HashMap<u64, u64>>,
    elements: Vec<u64>,
}

impl Greedy {
    fn new(h: usize, g: u64) -> Self {
        assert!(h >= 1, "order h must be at least 1");
        let mut sums = vec![HashMap::new(); h + 1];
        sums[0].insert(0, 1);
        Self {
            h,
            g,
            sums,
            elements: Vec::new(),
        }
    }

    /// New h-fold representations created by adding `c`, keyed by sum.
    fn increments(&self, c: u64) -> HashMap<u64, u64> {
        let mut inc = HashMap::new();
        for j in 1..=self.h {
            for (&s, &cnt) in &self.sums[self.h - j] {
                *inc.entry(s + j as u64 * c).or_insert(0) += cnt;
            }
        }
        inc
    }

    fn admits(&self, c: u64) -> bool {
        let top = &self.sums[self.h];
        self.increments(c)
            .into_iter()
            .all(|(n, d)| top.get(&n).copied().unwrap_or(0) + d <= self.g)
    }

    fn push(&mut self, c: u64) {
        // Descending j so lower-order tables are still the old ones.
        for j in (1..=self.h).rev() {
            let mut add: Vec<(u64, u64)> = Vec::new();
            for i in 1..=j {
                for (&s, &cnt) in &self.sums[j - i] {
                    add.push((s + i as u64 * c, cnt));
                }
            }
            for (n, cnt) in add {
                *self.sums[j].entry(n).or_insert(0) += cnt;
            }
        }
        self.elements.push(c);
    }

    fn next_after(&self, from: u64) -> u64 {
        let mut c = from;
        while !self.admits(c) {
            c += 1;
        }
        c
    }

    fn into_set(self) -> IntegerSet {
        IntegerSet::from_unsorted(self.elements)
    }
}

/// First `count` terms of the greedy B_h[g] sequence seeded at 1.
///
/// For `h = 2, g = 1` this is the Mian–Chowla sequence 1, 2, 4, 8, 13, ...
pub fn greedy_bh(h: usize, g: u64, count: usize) -> IntegerSet {
    let mut greedy = Greedy::new(h, g);
    let mut c = 1;
    while greedy.elements.len() < count {
        c = greedy.next_after(c);
        greedy.push(c);
        c += 1;
    }
    greedy.into_set()
}

/// Every greedy B_h[g] term not exceeding `max`.
pub fn greedy_bh_bounded(h: usize, g: u64, max: u64) -> IntegerSet {
    let mut greedy = Greedy::new(h, g);
    for c in 1..=max {
        if greedy.admits(c) {
            greedy.push(c);
        }
    }
    greedy.into_set()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The Erdős–Turán Sidon set `{2pi + (i² mod p) : 0 <= i < p}`.
pub fn erdos_turan_sidon(p: u64) -> Result<IntegerSet> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    Ok(IntegerSet::from_unsorted(
        (0..p).map(|i| 2 * p * i + (i * i) % p),
    ))
}

/// Supplies a finite B_h set inside `[1, upper]` for each block level.
pub trait BhProvider {
    fn name(&self) -> &str;
    fn provide(&self, h: usize, upper: u64) -> Result<IntegerSet>;
}

/// Greedy B_h[g] terms up to the bound.
#[derive(Clone, Debug)]
pub struct GreedyProvider {
    pub g: u64,
}

impl BhProvider for GreedyProvider {
    fn name(&self) -> &str {
        "greedy"
    }

    fn provide(&self, h: usize, upper: u64) -> Result<IntegerSet> {
        Ok(greedy_bh_bounded(h, self.g, upper))
    }
}

/// Largest Erdős–Turán set (shifted by +1) that fits. Sidon only, so `h = 2`.
#[derive(Clone, Debug, Default)]
pub struct ErdosTuranProvider;

impl BhProvider for ErdosTuranProvider {
    fn name(&self) -> &str {
        "erdos-turan"
    }

    fn provide(&self, h: usize, upper: u64) -> Result<IntegerSet> {
        if h != 2 {
            return Err(Error::InvalidParameter(format!(
                "the Erdős–Turán provider only builds Sidon sets, got h = {h}"
            )));
        }
        // Max element of the shifted set is below 2p², so start near sqrt(upper/2).
        let mut p = ((upper as f64 / 2.0).sqrt() as u64).saturating_add(1);
        while p >= 2 {
            if is_prime(p) {
                let shifted = IntegerSet::from_unsorted(
                    erdos_turan_sidon(p)?.iter().map(|x| x + 1),
                );
                if shifted.max().is_some_and(|m| *m <= BigInt::from(upper)) {
                    return Ok(shifted);
                }
            }
            p -= 1;
        }
        Ok(IntegerSet::new())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityRow {
    pub k: usize,
    pub x_k: u64,
    /// Counting function of the whole union at `x_k`.
    pub count: usize,
    /// `count · omega(x_k) / x_k^{1/h}`.
    pub ratio: f64,
    /// Whether `omega(x_k) > (h·x_{k-1})^{1/h}`.
    pub omega_ok: bool,
}

#[derive(Clone, Debug)]
pub struct BlockBasis {
    pub set: IntegerSet,
    pub report: Vec<DensityRow>,
    /// Largest representation count over the whole union, 0 when empty.
    pub certified_g: u64,
}

impl BlockBasis {
    pub fn report_csv(&self) -> String {
        let mut out = String::from("k,x_k,B(x_k),ratio\n");
        for row in &self.report {
            let _ = writeln!(out, "{},{},{},{:.6}", row.k, row.x_k, row.count, row.ratio);
        }
        out
    }
}

/// Union over levels `k = 1..=levels` of `(h·x_{k-1}) ∗ B_k`, where each
/// `B_k` comes from `provider` inside `[1, x_k / (h·x_{k-1})]`.
pub fn block_basis(
    h: usize,
    levels: usize,
    x: &[u64],
    provider: &dyn BhProvider,
    omega: &dyn Fn(f64) -> f64,
) -> Result<BlockBasis> {
    if h < 2 {
        return Err(Error::InvalidParameter(format!("h must be at least 2, got {h}")));
    }
    if levels > 0 {
        if x.len() < levels + 1 {
            return Err(Error::InvalidParameter(format!(
                "{levels} levels need {} x values, got {}",
                levels + 1,
                x.len()
            )));
        }
        if x[0] != 1 {
            return Err(Error::InvalidParameter(format!("x_0 must be 1, got {}", x[0])));
        }
        if let Some(w) = x[..=levels].windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "x must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }

    let mut set = IntegerSet::new();
    for k in 1..=levels {
        let scale = h as u64 * x[k - 1];
        let upper = x[k] / scale;
        let block = provider.provide(h, upper)?;
        if let (Some(lo), Some(hi)) = (block.min(), block.max()) {
            if *lo < BigInt::from(1) || *hi > BigInt::from(upper) {
                return Err(Error::LevelConstruction {
                    level: k,
                    reason: format!(
                        "{} provider returned [{lo}, {hi}], outside [1, {upper}]",
                        provider.name()
                    ),
                });
            }
        }
        set = set.union(&dilate(&BigInt::from(scale), &block)?);
    }

    let inv_h = 1.0 / h as f64;
    let report = (1..=levels)
        .map(|k| {
            let x_k = x[k];
            let count = counting_function(&set, &BigInt::from(x_k));
            DensityRow {
                k,
                x_k,
                count,
                ratio: count as f64 * omega(x_k as f64) / (x_k as f64).powf(inv_h),
                omega_ok: omega(x_k as f64) > ((h as u64 * x[k - 1]) as f64).powf(inv_h),
            }
        })
        .collect();
    let certified_g = max_representation(&set, h).map_or(0, |(_, c)| c);
    Ok(BlockBasis {
        set,
        report,
        certified_g,
    })
}

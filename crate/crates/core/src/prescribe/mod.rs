//! Sets with a prescribed order-h representation function.
//!
//! Starting from a certified B_h[g] set `B`, the builder transforms it with
//! [`crate::zipt::insert_zeros`], keeps the elements `>= n0` as `A_0`, and
//! then walks stages `k = 1, 2, ...`. Stage `k` looks at `z_k`, a sequence
//! that visits every integer infinitely often, and adjoins the pair
//!
//! ```text
//! u_{2k-1} = -m_k / 2^r,   u_{2k} = (h-1) m_k / 2^r + z_k
//! ```
//!
//! whenever `r_{A_{k-1},h}(z_k)` is still below the target `f(z_k)`. The pair
//! sums to `z_k` with multiplicity `h-1` on the first element, and lies so
//! far out modulo `m_k` that it creates no other representation of any
//! integer of magnitude `<= n0`.

pub mod lemmas;

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numset::{ExtendedCount, IntegerSet};
use crate::repcount::{is_bhg, rep_count};
use crate::zipt::{epsilon_slope, modulus_mk, transform_set, GammaSpec, TransformParams};

/// A target `f : Z -> N ∪ {0, ∞}` evaluated by the builder.
pub trait Target {
    fn value(&self, n: &BigInt) -> ExtendedCount;
}

impl<F> Target for F
where
    F: Fn(&BigInt) -> ExtendedCount,
{
    fn value(&self, n: &BigInt) -> ExtendedCount {
        self(n)
    }
}

/// Finite exceptions over a finite default `>= g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrescribedFunction {
    pub g: u64,
    pub default: ExtendedCount,
    pub exceptions: BTreeMap<BigInt, ExtendedCount>,
}

impl PrescribedFunction {
    pub fn new(
        g: u64,
        default: ExtendedCount,
        exceptions: BTreeMap<BigInt, ExtendedCount>,
    ) -> Result<Self> {
        match default {
            ExtendedCount::Infinite => Err(Error::InvalidTarget(
                "default must be finite; use the programmatic Target interface for infinite defaults"
                    .into(),
            )),
            ExtendedCount::Finite(d) if d < g => Err(Error::InvalidTarget(format!(
                "default {d} is below g = {g}"
            ))),
            _ => Ok(Self {
                g,
                default,
                exceptions,
            }),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TargetFile = serde_json::from_str(text)?;
        let exceptions = file
            .exceptions
            .into_iter()
            .map(|(k, v)| {
                BigInt::from_str(k.trim())
                    .map(|n| (n, v))
                    .map_err(|_| Error::Parse(format!("exception key {k:?} is not an integer")))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::new(file.g, file.default, exceptions)
    }

    pub fn to_json(&self) -> String {
        let file = TargetFile {
            g: self.g,
            default: self.default,
            exceptions: self
                .exceptions
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("target serialization")
    }
}

impl Target for PrescribedFunction {
    fn value(&self, n: &BigInt) -> ExtendedCount {
        self.exceptions.get(n).copied().unwrap_or(self.default)
    }
}

#[derive(Serialize, Deserialize)]
struct TargetFile {
    g: u64,
    default: ExtendedCount,
    #[serde(default)]
    exceptions: BTreeMap<String, ExtendedCount>,
}

/// `z_j = j - s(s+1)` with `s = floor(sqrt j)`.
pub fn z_seq(j: u64) -> i64 {
    let s = j.sqrt();
    j as i64 - (s * (s + 1)) as i64
}

/// Least positive `n0` with `f(n) >= g` for all `|n| >= n0`.
pub fn compute_n0(f: &PrescribedFunction, g: u64) -> Result<u64> {
    if f.default < g {
        return Err(Error::InvalidTarget(format!(
            "default {} is below g = {g}",
            f.default
        )));
    }
    let mut n0 = 1u64;
    for (n, v) in &f.exceptions {
        if *v < g {
            let mag = n
                .abs()
                .to_u64()
                .and_then(|m| m.checked_add(1))
                .ok_or_else(|| Error::Range(format!("exception key {n} too large")))?;
            n0 = n0.max(mag);
        }
    }
    Ok(n0)
}

/// Least integer `r > 1 + log2(h² + n0)`, i.e. least `r` with `2^{r-1} > h² + n0`.
pub fn choose_r(h: usize, n0: u64) -> u64 {
    let bound = (h as u128) * (h as u128) + n0 as u128;
    let mut r = 1u64;
    while (1u128 << (r - 1)) <= bound {
        r += 1;
    }
    r
}

/// Decreasing `epsilon` forms accepted for automatic gamma selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsilonSpec {
    /// `epsilon(x) = x^{-delta}`.
    Power { delta: f64 },
}

impl FromStr for EpsilonSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("pow", d)) => {
                let delta: f64 = d
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("epsilon exponent {d:?} is not a number")))?;
                if !(delta.is_finite() && delta > 0.0) {
                    return Err(Error::UnsupportedEpsilon(format!("delta must be > 0, got {delta}")));
                }
                Ok(EpsilonSpec::Power { delta })
            }
            _ => Err(Error::UnsupportedEpsilon(format!(
                "{s:?}; only pow:<delta> is supported, pass gamma explicitly otherwise"
            ))),
        }
    }
}

/// Linear gamma with `gamma(x) > log2(epsilon^{-1}(2^{-2rx}))` for `x >= 1`.
pub fn gamma_from_epsilon(epsilon: EpsilonSpec, r: u64) -> Result<GammaSpec> {
    match epsilon {
        EpsilonSpec::Power { delta } => {
            if !(delta.is_finite() && delta > 0.0) {
                return Err(Error::UnsupportedEpsilon(format!("delta must be > 0, got {delta}")));
            }
            GammaSpec::linear(epsilon_slope(r, delta))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionParams {
    pub h: usize,
    pub g: u64,
    pub r: u64,
    pub gamma: GammaSpec,
    pub n0: u64,
}

impl ConstructionParams {
    /// Checks `2^{r-1} > h² + n0` (which gives `h² < 2^{r-1}`, `n0 < 2^{r-1}`)
    /// and `2^{2r} > h`.
    pub fn validate(&self) -> Result<()> {
        if self.h < 2 {
            return Err(Error::Configuration(format!("h = {} must be at least 2", self.h)));
        }
        if self.g < 1 {
            return Err(Error::Configuration("g must be at least 1".into()));
        }
        if self.n0 < 1 {
            return Err(Error::Configuration("n0 must be positive".into()));
        }
        let lhs = self.h as u128 * self.h as u128 + self.n0 as u128;
        if self.r < 1 || (self.r <= 128 && (1u128 << (self.r - 1).min(127)) <= lhs) {
            return Err(Error::Configuration(format!(
                "r > 1 + log2(h^2 + n0) violated: r = {}, h^2 + n0 = {lhs}, 2^(r-1) must exceed it",
                self.r
            )));
        }
        if !self.transform().preserves_order(self.h) {
            return Err(Error::Configuration(format!(
                "2r > log2 h violated: r = {}, h = {}",
                self.r, self.h
            )));
        }
        Ok(())
    }

    pub fn transform(&self) -> TransformParams {
        TransformParams {
            r: self.r,
            gamma: self.gamma.clone(),
        }
    }

    pub fn modulus(&self, k: u64) -> BigInt {
        modulus_mk(k, &self.transform())
    }
}

/// `(u_{2k-1}, u_{2k})`.
pub fn u_pair(k: u64, params: &ConstructionParams) -> (BigInt, BigInt) {
    let base = BigInt::one() << (2 * params.r * k + params.gamma.eval(k) - params.r);
    let second = &base * BigInt::from(params.h - 1) + BigInt::from(z_seq(k));
    (-base, second)
}

/// Transformed elements `>= n0`.
pub fn build_a0(b: &IntegerSet, params: &ConstructionParams) -> Result<IntegerSet> {
    let n0 = BigInt::from(params.n0);
    let a0 = transform_set(b, &params.transform())?.filter(|a| *a >= n0);
    if a0.is_empty() {
        return Err(Error::EmptyA0 { n0: params.n0 });
    }
    Ok(a0)
}

/// `m_1 / 2^{r+1} - 1`: below this magnitude only base-set sums and the
/// telescoping `z_k` sums can represent an integer.
pub fn window_safe_radius(params: &ConstructionParams) -> BigInt {
    (params.modulus(1) >> (params.r + 1)) - 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountingMode {
    Full,
    Window,
    /// `Window` above 30 stages, `Full` otherwise.
    Auto,
}

impl FromStr for CountingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(CountingMode::Full),
            "window" => Ok(CountingMode::Window),
            "auto" => Ok(CountingMode::Auto),
            _ => Err(Error::Parse(format!("unknown counting mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GammaChoice {
    Given(GammaSpec),
    FromEpsilon(EpsilonSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionConfig {
    pub h: usize,
    pub g: u64,
    pub steps: u64,
    pub gamma: GammaChoice,
    /// `None` picks the least admissible `r`.
    pub r: Option<u64>,
    pub mode: CountingMode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    pub k: u64,
    pub z: i64,
    pub count_before: u64,
    pub added: bool,
    pub u: Option<(BigInt, BigInt)>,
}

#[derive(Serialize, Deserialize)]
struct StageRecordFile {
    k: u64,
    z: i64,
    count_before: u64,
    added: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u: Option<[String; 2]>,
}

impl StageRecord {
    fn to_file(&self) -> StageRecordFile {
        StageRecordFile {
            k: self.k,
            z: self.z,
            count_before: self.count_before,
            added: self.added,
            u: self
                .u
                .as_ref()
                .map(|(a, b)| [a.to_string(), b.to_string()]),
        }
    }

    fn from_file(f: StageRecordFile) -> Result<Self> {
        let parse = |s: &str| {
            BigInt::from_str(s).map_err(|_| Error::Parse(format!("audit u value {s:?}")))
        };
        let u = match f.u {
            Some([a, b]) => Some((parse(&a)?, parse(&b)?)),
            None => None,
        };
        if f.added != u.is_some() {
            return Err(Error::Parse(format!(
                "audit stage {}: 'added' disagrees with presence of 'u'",
                f.k
            )));
        }
        Ok(StageRecord {
            k: f.k,
            z: f.z,
            count_before: f.count_before,
            added: f.added,
            u,
        })
    }
}

pub fn audit_to_json(audit: &[StageRecord]) -> String {
    let files: Vec<StageRecordFile> = audit.iter().map(StageRecord::to_file).collect();
    serde_json::to_string_pretty(&files).expect("audit serialization")
}

pub fn audit_from_json(text: &str) -> Result<Vec<StageRecord>> {
    let files: Vec<StageRecordFile> = serde_json::from_str(text)?;
    files.into_iter().map(StageRecord::from_file).collect()
}

#[derive(Clone, Debug)]
pub struct ConstructionState {
    pub params: ConstructionParams,
    pub a0: IntegerSet,
    /// Current `A_k`.
    pub a: IntegerSet,
    pub audit: Vec<StageRecord>,
    /// Largest element of the transformed base set.
    pub truncation_radius: BigInt,
    /// Mode actually used after resolving `Auto`.
    pub mode: CountingMode,
}

impl ConstructionState {
    pub fn k(&self) -> u64 {
        self.audit.len() as u64
    }

    pub fn stage(&self, k: u64) -> Option<&StageRecord> {
        k.checked_sub(1).and_then(|i| self.audit.get(i as usize))
    }

    /// `A_k` rebuilt from `A_0` and the audit.
    pub fn set_at(&self, k: u64) -> IntegerSet {
        set_after(&self.a0, &self.audit, k)
    }
}

/// `A_0` plus every pair added in stages `1..=k`.
pub fn set_after(a0: &IntegerSet, audit: &[StageRecord], k: u64) -> IntegerSet {
    a0.with_inserted(
        audit
            .iter()
            .take_while(|s| s.k <= k)
            .filter_map(|s| s.u.clone())
            .flat_map(|(a, b)| [a, b]),
    )
}

/// `rep_count(A_0, h, n)` plus the number of recorded additions at `z = n`.
///
/// Exact for `|n| <= window_safe_radius`.
pub fn fast_window_count(state: &ConstructionState, n: &BigInt) -> Result<u64> {
    let radius = window_safe_radius(&state.params);
    if n.abs() > radius {
        return Err(Error::Range(format!(
            "|{n}| exceeds the safe window radius {radius}"
        )));
    }
    let base = rep_count(&state.a0, state.params.h, n);
    let hits = state
        .audit
        .iter()
        .filter(|s| s.added && BigInt::from(s.z) == *n)
        .count() as u64;
    Ok(base + hits)
}

/// Runs the construction with `n0` derived from `f`.
pub fn construct(
    b: &IntegerSet,
    f: &PrescribedFunction,
    config: &ConstructionConfig,
) -> Result<ConstructionState> {
    if f.g != config.g {
        return Err(Error::Configuration(format!(
            "target file declares g = {} but the run uses g = {}",
            f.g, config.g
        )));
    }
    let n0 = compute_n0(f, config.g)?;
    construct_with(b, f, n0, config)
}

/// Runs the construction for any target with a caller-supplied `n0`.
///
/// The caller vouches that `f(n) >= g` for every `|n| >= n0`.
pub fn construct_with<T: Target + ?Sized>(
    b: &IntegerSet,
    target: &T,
    n0: u64,
    config: &ConstructionConfig,
) -> Result<ConstructionState> {
    let (h, g) = (config.h, config.g);
    if h < 2 || g < 1 {
        return Err(Error::Configuration(format!(
            "need h >= 2 and g >= 1, got h = {h}, g = {g}"
        )));
    }
    if let Some(x) = b.iter().find(|x| !x.is_positive()) {
        return Err(Error::Domain(format!("base set must be positive, found {x}")));
    }
    let cert = is_bhg(b, h, g);
    if let Some((witness, count)) = cert.witness {
        return Err(Error::NotBhg {
            h,
            g,
            witness,
            count,
        });
    }

    let r = config.r.unwrap_or_else(|| choose_r(h, n0));
    let gamma = match &config.gamma {
        GammaChoice::Given(spec) => spec.clone(),
        GammaChoice::FromEpsilon(eps) => gamma_from_epsilon(*eps, r)?,
    };
    let params = ConstructionParams {
        h,
        g,
        r,
        gamma,
        n0,
    };
    params.validate()?;

    let transformed = transform_set(b, &params.transform())?;
    let truncation_radius = transformed.max().cloned().unwrap_or_default();
    let a0 = build_a0(b, &params)?;

    let mode = match config.mode {
        CountingMode::Auto if config.steps > 30 => CountingMode::Window,
        CountingMode::Auto => CountingMode::Full,
        m => m,
    };
    if mode == CountingMode::Window {
        let radius = window_safe_radius(&params);
        let reach = BigInt::from(config.steps.sqrt());
        if reach > radius {
            return Err(Error::Mode(format!(
                "window mode reaches |z| = {reach}, beyond the safe radius {radius}"
            )));
        }
    }

    let mut a = a0.clone();
    let mut audit = Vec::with_capacity(config.steps as usize);
    let mut base_counts: HashMap<i64, u64> = HashMap::new();
    let mut additions: HashMap<i64, u64> = HashMap::new();
    for k in 1..=config.steps {
        let z = z_seq(k);
        let z_big = BigInt::from(z);
        let count = match mode {
            CountingMode::Window => {
                let base = *base_counts
                    .entry(z)
                    .or_insert_with(|| rep_count(&a0, h, &z_big));
                base + additions.get(&z).copied().unwrap_or(0)
            }
            _ => rep_count(&a, h, &z_big),
        };
        let added = ExtendedCount::Finite(count) < target.value(&z_big);
        let u = if added {
            let (u1, u2) = u_pair(k, &params);
            if a.contains(&u1) || a.contains(&u2) {
                return Err(Error::Diagnostic(format!(
                    "stage {k}: u pair ({u1}, {u2}) collides with A_{}",
                    k - 1
                )));
            }
            a = a.with_inserted([u1.clone(), u2.clone()]);
            *additions.entry(z).or_insert(0) += 1;
            Some((u1, u2))
        } else {
            None
        };
        audit.push(StageRecord {
            k,
            z,
            count_before: count,
            added,
            u,
        });
    }

    Ok(ConstructionState {
        params,
        a0,
        a,
        audit,
        truncation_radius,
        mode,
    })
}

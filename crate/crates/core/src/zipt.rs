//! The inserting-zeros transformation.
//!
//! Given a strictly increasing cut map `gamma` with `gamma(0) = 0` and a
//! block parameter `r`, the binary expansion of `b` is split into blocks
//! `[gamma(k), gamma(k+1))` and block `k` is shifted left by `2rk` bits, so
//! `2r` zero bits open up at every cut. For `2^{2r} > h` the map preserves
//! h-fold sum relations, hence the B_h[g] property.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numset::{counting_function, IntegerSet};

/// Cut positions for the transformation.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaSpec {
    /// `gamma(k) = slope * k`.
    Linear { slope: u64 },
    /// Explicit values; past the end the last step repeats.
    Table(Vec<u64>),
    /// Linear with slope `ceil(2r/delta) + 1`, for `epsilon(x) = x^-delta`.
    FromEpsilon { r: u64, delta: f64 },
}

impl GammaSpec {
    pub fn linear(slope: u64) -> Result<Self> {
        if slope == 0 {
            return Err(Error::InvalidParameter("gamma slope must be positive".into()));
        }
        Ok(GammaSpec::Linear { slope })
    }

    pub fn table(values: Vec<u64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter(
                "gamma table needs at least two values".into(),
            ));
        }
        if values[0] != 0 {
            return Err(Error::InvalidParameter(format!(
                "gamma table must start at 0, got {}",
                values[0]
            )));
        }
        if let Some(w) = values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "gamma table not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(GammaSpec::Table(values))
    }

    pub fn from_epsilon(r: u64, delta: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("r must be positive".into()));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::UnsupportedEpsilon(format!(
                "power form needs delta > 0, got {delta}"
            )));
        }
        Ok(GammaSpec::FromEpsilon { r, delta })
    }

    /// `gamma(k)` on the nonnegative integers.
    pub fn eval(&self, k: u64) -> u64 {
        match self {
            GammaSpec::Linear { slope } => slope * k,
            GammaSpec::FromEpsilon { r, delta } => epsilon_slope(*r, *delta) * k,
            GammaSpec::Table(values) => {
                let last = values.len() - 1;
                match values.get(k as usize) {
                    Some(&v) if k <= last as u64 => v,
                    _ => {
                        let step = values[last] - values[last - 1];
                        values[last] + (k - last as u64) * step
                    }
                }
            }
        }
    }

    /// Piecewise-linear extension to the nonnegative reals.
    pub fn eval_real(&self, x: f64) -> f64 {
        let k = x.floor().max(0.0);
        let lo = self.eval(k as u64) as f64;
        let hi = self.eval(k as u64 + 1) as f64;
        hi * (x - k) + lo * (k + 1.0 - x)
    }

    /// Inverse of the real extension at `y >= 0`.
    ///
    /// Locates the segment `[gamma(k), gamma(k+1)]` holding `y` and solves the
    /// linear piece directly, so integer breakpoints invert exactly.
    pub fn inverse_real(&self, y: f64) -> Result<f64> {
        if !(y.is_finite() && y >= 0.0) {
            return Err(Error::Range(format!("gamma inverse undefined at {y}")));
        }
        // Largest k with gamma(k) <= y: gallop, then bisect.
        let mut hi = 1u64;
        while (self.eval(hi) as f64) <= y {
            hi = hi
                .checked_mul(2)
                .ok_or_else(|| Error::Range(format!("gamma inverse overflow at {y}")))?;
        }
        let mut lo = 0u64;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if (self.eval(mid) as f64) <= y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let g0 = self.eval(lo) as f64;
        let g1 = self.eval(lo + 1) as f64;
        Ok(lo as f64 + (y - g0) / (g1 - g0))
    }
}

/// Slope `ceil(2r/delta) + 1` of the gamma map induced by `x^-delta`.
pub fn epsilon_slope(r: u64, delta: f64) -> u64 {
    (2.0 * r as f64 / delta).ceil() as u64 + 1
}

impl fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaSpec::Linear { slope } => write!(f, "linear:{slope}"),
            GammaSpec::Table(values) => {
                write!(f, "table:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
            GammaSpec::FromEpsilon { r, delta } => write!(f, "from_epsilon:r={r},delta={delta}"),
        }
    }
}

impl FromStr for GammaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("gamma spec {s:?}: {msg}"));
        let (form, body) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        match form.trim() {
            "linear" => {
                let slope = body.trim().parse().map_err(|_| bad("slope is not an integer"))?;
                GammaSpec::linear(slope)
            }
            "table" => {
                let values = body
                    .split(',')
                    .map(|v| v.trim().parse::<u64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("table values must be integers"))?;
                GammaSpec::table(values)
            }
            "from_epsilon" => {
                let (mut r, mut delta) = (None, None);
                for kv in body.split(',') {
                    match kv.trim().split_once('=') {
                        Some(("r", v)) => r = v.trim().parse::<u64>().ok(),
                        Some(("delta", v)) => delta = v.trim().parse::<f64>().ok(),
                        _ => return Err(bad("expected r=<int>,delta=<float>")),
                    }
                }
                match (r, delta) {
                    (Some(r), Some(delta)) => GammaSpec::from_epsilon(r, delta),
                    _ => Err(bad("expected r=<int>,delta=<float>")),
                }
            }
            other => Err(bad(&format!("unknown form {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformParams {
    /// Half-length of each inserted zero block.
    pub r: u64,
    pub gamma: GammaSpec,
}

impl TransformParams {
    pub fn new(r: u64, gamma: GammaSpec) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("r must be positive".into()));
        }
        Ok(Self { r, gamma })
    }

    /// `2r > log2 h`, i.e. `2^{2r} > h`.
    pub fn preserves_order(&self, h: usize) -> bool {
        self.r >= 64 || 1u128 << (2 * self.r) > h as u128
    }

    /// `2r == log2 h`: outside the strict hypothesis, flagged separately.
    pub fn is_boundary_case(&self, h: usize) -> bool {
        self.r < 64 && 1u128 << (2 * self.r) == h as u128
    }
}

/// `T(b)` for a positive integer `b`.
pub fn insert_zeros(b: &BigUint, params: &TransformParams) -> BigUint {
    let bits = b.bits();
    let shift = 2 * params.r;
    if let Some(small) = b.to_u64() {
        // Index of the block holding the top bit.
        let mut last = 0u64;
        while params.gamma.eval(last + 1) < bits {
            last += 1;
        }
        if bits + shift * last <= 128 {
            return BigUint::from(insert_zeros_u128(small, params, last));
        }
    }
    let mut out = BigUint::zero();
    let mut k = 0u64;
    loop {
        let lo = params.gamma.eval(k);
        if lo >= bits {
            break;
        }
        let hi = params.gamma.eval(k + 1).min(bits);
        let mask = (BigUint::one() << (hi - lo)) - BigUint::one();
        let block = (b >> lo) & mask;
        out |= block << (lo + shift * k);
        k += 1;
    }
    out
}

fn insert_zeros_u128(b: u64, params: &TransformParams, last: u64) -> u128 {
    let shift = 2 * params.r;
    let mut out = 0u128;
    for k in 0..=last {
        let lo = params.gamma.eval(k);
        let hi = params.gamma.eval(k + 1).min(64);
        let width = hi - lo;
        let mask = if width >= 64 { u64::MAX } else { (1u64 << width) - 1 };
        let block = (b >> lo) & mask;
        out |= (block as u128) << (lo + shift * k);
    }
    out
}

/// Elementwise [`insert_zeros`]. Every element must be positive.
pub fn transform_set(b: &IntegerSet, params: &TransformParams) -> Result<IntegerSet> {
    let mut out = Vec::with_capacity(b.len());
    for x in b {
        let mag = match x.sign() {
            Sign::Plus => x.magnitude(),
            _ => {
                return Err(Error::Domain(format!(
                    "transform needs positive elements, got {x}"
                )))
            }
        };
        out.push(BigInt::from(insert_zeros(mag, params)));
    }
    // Order preservation keeps the output sorted and distinct.
    IntegerSet::from_sorted(out)
}

/// `m_k = 2^{2rk + gamma(k)}`, for `k >= 1`.
pub fn modulus_mk(k: u64, params: &TransformParams) -> BigInt {
    debug_assert!(k >= 1);
    BigInt::one() << (2 * params.r * k + params.gamma.eval(k))
}

/// One evaluation point of the density comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityPoint {
    pub x: BigInt,
    /// `T(B)(x)`.
    pub left: usize,
    /// `B(bound)`.
    pub right: usize,
    /// `floor(x · 2^{-2r·gamma^{-1}(log2 x)})`.
    pub bound: BigInt,
    pub strict: bool,
    /// Both sides are zero.
    pub vacuous: bool,
}

impl DensityPoint {
    pub fn holds(&self) -> bool {
        self.strict || self.vacuous
    }
}

/// Compares `T(B)(x)` against `B(x·2^{-2r·gamma^{-1}(log2 x)})` at each `x`.
pub fn density_compare(
    b: &IntegerSet,
    params: &TransformParams,
    xs: &[BigInt],
) -> Result<Vec<DensityPoint>> {
    let transformed = transform_set(b, params)?;
    xs.iter()
        .map(|x| {
            if !x.is_positive() {
                return Err(Error::Range(format!("density point must be positive, got {x}")));
            }
            let y = log2_big(x);
            let e = y - 2.0 * params.r as f64 * params.gamma.inverse_real(y)?;
            let bound = floor_pow2(e);
            let left = counting_function(&transformed, x);
            let right = counting_function(b, &bound);
            Ok(DensityPoint {
                x: x.clone(),
                left,
                right,
                bound,
                strict: left > right,
                vacuous: left == 0 && right == 0,
            })
        })
        .collect()
}

/// `log2 x` for positive `x`; exact on powers of two.
pub(crate) fn log2_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if x.magnitude().trailing_zeros() == Some(bits - 1) {
        return (bits - 1) as f64;
    }
    if bits <= 64 {
        return x.to_f64().map(f64::log2).unwrap_or(f64::NAN);
    }
    let top = (x.magnitude() >> (bits - 64)).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + (bits - 64) as f64
}

/// `floor(2^e)`, zero for `e < 0`.
pub(crate) fn floor_pow2(e: f64) -> BigInt {
    if e < 0.0 {
        return BigInt::zero();
    }
    let whole = e.floor();
    let mant = (e - whole).exp2();
    let whole = whole as u64;
    if whole <= 52 {
        BigInt::from((mant * (1u64 << whole) as f64).floor() as u64)
    } else {
        BigInt::from((mant * (1u64 << 52) as f64).floor() as u64) << (whole - 52)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: u64, slope: u64) -> TransformParams {
        TransformParams::new(r, GammaSpec::linear(slope).unwrap()).unwrap()
    }

    fn t(b: u64, p: &TransformParams) -> u64 {
        insert_zeros(&BigUint::from(b), p).to_u64().unwrap()
    }

    /// Independent route: splice zero strings into the binary digit string.
    fn splice_oracle(b: u64, p: &TransformParams) -> BigUint {
        let digits: Vec<char> = format!("{b:b}").chars().rev().collect();
        let mut out = String::new();
        let mut k = 1;
        for (i, d) in digits.iter().enumerate() {
            if i as u64 == p.gamma.eval(k) {
                out.push_str(&"0".repeat(2 * p.r as usize));
                k += 1;
            }
            out.push(*d);
        }
        let msb_first: String = out.chars().rev().collect();
        BigUint::parse_bytes(msb_first.as_bytes(), 2).unwrap()
    }

    #[test]
    fn insert_zeros_examples() {
        assert_eq!(t(11, &params(2, 1)), 32801);
        assert_eq!(t(7, &params(1, 2)), 19);
        let p = params(4, 17);
        for b in [1u64, 5, 1000, (1 << 17) - 1] {
            assert_eq!(t(b, &p), b);
        }
        assert_eq!(t(1 << 17, &p), 1 << 25);
    }

    #[test]
    fn insert_zeros_matches_digit_splicing() {
        let cases = [
            params(2, 1),
            params(1, 2),
            params(4, 17),
            params(3, 5),
            TransformParams::new(2, GammaSpec::table(vec![0, 3, 7, 12]).unwrap()).unwrap(),
        ];
        for p in &cases {
            for b in (1u64..5000).chain([u64::MAX, (1 << 40) + 12345, 987654321987]) {
                assert_eq!(insert_zeros(&BigUint::from(b), p), splice_oracle(b, p), "b={b} {p:?}");
            }
        }
    }

    #[test]
    fn wide_input_uses_block_path() {
        let p = params(4, 1);
        let b = (BigUint::one() << 200u32) + BigUint::from(5u8);
        // bit 0 stays, bit 2 moves by 16, bit 200 moves by 1600.
        let want = BigUint::from(1u8) + (BigUint::one() << 18u32) + (BigUint::one() << 1800u32);
        assert_eq!(insert_zeros(&b, &p), want);
    }

    #[test]
    fn transform_set_examples() {
        let b = IntegerSet::from_unsorted([1, 2, 3]);
        let out = transform_set(&b, &params(2, 1)).unwrap();
        assert_eq!(out, IntegerSet::from_unsorted([1, 32, 33]));
        assert!(transform_set(&IntegerSet::new(), &params(2, 1)).unwrap().is_empty());
        assert!(matches!(
            transform_set(&IntegerSet::from_unsorted([0, 4]), &params(2, 1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(modulus_mk(1, &params(4, 1)), BigInt::from(512));
        assert_eq!(modulus_mk(1, &params(2, 1)), BigInt::from(32));
        assert_eq!(modulus_mk(1, &params(4, 17)), BigInt::from(1 << 25));
    }

    #[test]
    fn gamma_parse_and_display() {
        for s in ["linear:17", "table:0,3,7,12", "from_epsilon:r=4,delta=0.5"] {
            let g: GammaSpec = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert_eq!("from_epsilon:r=4,delta=0.5".parse::<GammaSpec>().unwrap().eval(2), 34);
        for bad in ["linear:0", "table:1,2", "table:0,3,3", "table:0", "cubic:3", "linear", "from_epsilon:r=4"] {
            assert!(bad.parse::<GammaSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn table_extends_with_last_step() {
        let g = GammaSpec::table(vec![0, 3, 7, 12]).unwrap();
        let got: Vec<u64> = (0..7).map(|k| g.eval(k)).collect();
        assert_eq!(got, vec![0, 3, 7, 12, 17, 22, 27]);
    }

    #[test]
    fn real_extension_and_inverse() {
        let g = GammaSpec::table(vec![0, 3, 7, 12]).unwrap();
        assert_eq!(g.eval_real(1.5), 5.0);
        assert_eq!(g.inverse_real(5.0).unwrap(), 1.5);
        assert_eq!(g.inverse_real(7.0).unwrap(), 2.0);
        let lin = GammaSpec::linear(17).unwrap();
        assert_eq!(lin.inverse_real(17.0).unwrap(), 1.0);
        for i in 0..200 {
            let x = i as f64 * 0.137;
            assert!((lin.inverse_real(lin.eval_real(x)).unwrap() - x).abs() < 1e-9);
        }
        assert!(lin.inverse_real(-1.0).is_err());
    }

    #[test]
    fn density_fixed_block_example() {
        // Transform fixes everything below 2^17 when gamma(1) = 17.
        let b = IntegerSet::from_unsorted([1, 2, 4, 8, 13, 21, 31, 45, 66, 81, 97, 123, 600]);
        let p = params(4, 17);
        let pts = density_compare(&b, &p, &[BigInt::from(1 << 17)]).unwrap();
        assert_eq!(pts[0].bound, BigInt::from(512));
        assert_eq!(pts[0].left, 13);
        assert_eq!(pts[0].right, 12);
        assert!(pts[0].strict);
    }

    #[test]
    fn density_vacuous_below_smallest_element() {
        let b = IntegerSet::from_unsorted([100, 200]);
        let pts = density_compare(&b, &params(4, 17), &[BigInt::from(50)]).unwrap();
        assert_eq!((pts[0].left, pts[0].right), (0, 0));
        assert!(pts[0].vacuous && pts[0].holds() && !pts[0].strict);
        assert!(density_compare(&b, &params(4, 17), &[BigInt::zero()]).is_err());
    }

    #[test]
    fn log2_and_pow2_helpers() {
        assert_eq!(log2_big(&(BigInt::one() << 300u32)), 300.0);
        assert!((log2_big(&BigInt::from(3)) - 3f64.log2()).abs() < 1e-12);
        assert_eq!(floor_pow2(9.0), BigInt::from(512));
        assert_eq!(floor_pow2(-0.5), BigInt::zero());
        assert_eq!(floor_pow2(60.0), BigInt::one() << 60u32);
    }

    #[test]
    fn order_hypothesis() {
        let p = params(1, 1);
        assert!(p.preserves_order(3));
        assert!(!p.preserves_order(4));
        assert!(p.is_boundary_case(4));
    }
}

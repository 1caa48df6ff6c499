//! Finite sets of arbitrary-precision integers.
//!
//! [`IntegerSet`] is a sorted, duplicate-free `Vec<BigInt>`. Sets are
//! immutable once built; every transformation returns a new set. Elements
//! serialize as decimal strings since construction stages quickly produce
//! values thousands of bits wide.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntegerSet {
    elements: Vec<BigInt>,
}

impl IntegerSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from arbitrary input, sorting and dropping duplicates.
    pub fn from_unsorted<I>(iter: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<BigInt>,
    {
        let mut elements: Vec<BigInt> = iter.into_iter().map(Into::into).collect();
        elements.sort();
        elements.dedup();
        Self { elements }
    }

    /// Builds a set from a sequence that must already be strictly increasing.
    pub fn from_sorted(elements: Vec<BigInt>) -> Result<Self> {
        if let Some(w) = elements.windows(2).find(|w| w[0] >= w[1]) {
            let what = if w[0] == w[1] { "duplicate" } else { "unsorted" };
            return Err(Error::Parse(format!(
                "{what} elements: {} followed by {}",
                w[0], w[1]
            )));
        }
        Ok(Self { elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.elements.iter()
    }

    pub fn min(&self) -> Option<&BigInt> {
        self.elements.first()
    }

    pub fn max(&self) -> Option<&BigInt> {
        self.elements.last()
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// Number of elements strictly below `x`.
    pub fn rank(&self, x: &BigInt) -> usize {
        self.elements.partition_point(|a| a < x)
    }

    /// Number of elements `<= x`.
    pub fn rank_inclusive(&self, x: &BigInt) -> usize {
        self.elements.partition_point(|a| a <= x)
    }

    pub fn is_subset(&self, other: &IntegerSet) -> bool {
        self.elements.iter().all(|a| other.contains(a))
    }

    /// Returns a new set with `extra` inserted. Duplicates are ignored.
    pub fn with_inserted<I>(&self, extra: I) -> IntegerSet
    where
        I: IntoIterator<Item = BigInt>,
    {
        let mut elements = self.elements.clone();
        for x in extra {
            if let Err(pos) = elements.binary_search(&x) {
                elements.insert(pos, x);
            }
        }
        IntegerSet { elements }
    }

    pub fn union(&self, other: &IntegerSet) -> IntegerSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.elements, &other.elements);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        IntegerSet { elements: out }
    }

    /// Elements of `self` not in `other`.
    pub fn difference(&self, other: &IntegerSet) -> IntegerSet {
        IntegerSet {
            elements: self
                .elements
                .iter()
                .filter(|a| !other.contains(a))
                .cloned()
                .collect(),
        }
    }

    pub fn intersects(&self, other: &IntegerSet) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().any(|a| large.contains(a))
    }

    pub fn filter<F>(&self, mut keep: F) -> IntegerSet
    where
        F: FnMut(&BigInt) -> bool,
    {
        IntegerSet {
            elements: self.elements.iter().filter(|a| keep(a)).cloned().collect(),
        }
    }

    pub fn into_vec(self) -> Vec<BigInt> {
        self.elements
    }

    pub fn to_json(&self, name: &str) -> String {
        let file = SetFile {
            name: name.to_string(),
            elements: self.elements.iter().map(ToString::to_string).collect(),
        };
        // A struct of strings always serializes.
        serde_json::to_string_pretty(&file).expect("set serialization")
    }

    /// Parses the set file format, returning the name and the set.
    pub fn from_json(text: &str) -> Result<(String, IntegerSet)> {
        let file: SetFile = serde_json::from_str(text)?;
        let elements = file
            .elements
            .iter()
            .map(|s| {
                BigInt::from_str(s).map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((file.name, IntegerSet::from_sorted(elements)?))
    }
}

impl<'a> IntoIterator for &'a IntegerSet {
    type Item = &'a BigInt;
    type IntoIter = std::slice::Iter<'a, BigInt>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

impl fmt::Display for IntegerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct SetFile {
    name: String,
    elements: Vec<String>,
}

/// A count in N ∪ {0, ∞}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedCount {
    Finite(u64),
    Infinite,
}

impl ExtendedCount {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedCount::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtendedCount::Finite(v) => Some(v),
            ExtendedCount::Infinite => None,
        }
    }

    pub fn succ(self) -> Self {
        match self {
            ExtendedCount::Finite(v) => ExtendedCount::Finite(v + 1),
            ExtendedCount::Infinite => ExtendedCount::Infinite,
        }
    }
}

impl From<u64> for ExtendedCount {
    fn from(v: u64) -> Self {
        ExtendedCount::Finite(v)
    }
}

impl PartialEq<u64> for ExtendedCount {
    fn eq(&self, other: &u64) -> bool {
        *self == ExtendedCount::Finite(*other)
    }
}

impl PartialOrd<u64> for ExtendedCount {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        Some(self.cmp(&ExtendedCount::Finite(*other)))
    }
}

impl fmt::Display for ExtendedCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedCount::Finite(v) => write!(f, "{v}"),
            ExtendedCount::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedCount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedCount::Finite(v) => s.serialize_u64(*v),
            ExtendedCount::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedCount {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtendedCount::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(ExtendedCount::Infinite),
            Raw::Str(s) => s
                .parse::<u64>()
                .map(ExtendedCount::Finite)
                .map_err(|_| serde::de::Error::custom(format!("expected count or \"inf\", got {s:?}"))),
        }
    }
}

/// `#{a ∈ A : |a| <= x}`.
pub fn counting_function(a: &IntegerSet, x: &BigInt) -> usize {
    if x.is_negative() {
        return 0;
    }
    let neg_x = -x;
    a.rank_inclusive(x) - a.rank(&neg_x)
}

/// `min{|y| : y ≡ x (mod m)}`.
pub fn mod_norm(x: &BigInt, m: &BigInt) -> Result<BigInt> {
    if *m < BigInt::from(2) {
        return Err(Error::InvalidModulus(m.clone()));
    }
    let r = x.mod_floor(m);
    let other = m - &r;
    Ok(if r <= other { r } else { other })
}

/// `t ∗ A = {t·a : a ∈ A}`.
pub fn dilate(t: &BigInt, a: &IntegerSet) -> Result<IntegerSet> {
    if !t.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "dilation factor must be positive, got {t}"
        )));
    }
    // Positive scaling keeps the order.
    Ok(IntegerSet {
        elements: a.iter().map(|x| x * t).collect(),
    })
}

/// Maps `a >= 0` to `4a` and `a < 0` to `-4a + 1`, landing in the nonnegatives.
pub fn fold_to_nonneg(a: &IntegerSet) -> IntegerSet {
    IntegerSet::from_unsorted(a.iter().map(|x| {
        if x.is_negative() {
            -(x * BigInt::from(4)) + 1
        } else {
            x * BigInt::from(4)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[i64]) -> IntegerSet {
        IntegerSet::from_unsorted(xs.iter().copied())
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn counting_function_examples() {
        let a = set(&[-3, 1, 4]);
        assert_eq!(counting_function(&a, &big(3)), 2);
        assert_eq!(counting_function(&a, &big(4)), 3);
        assert_eq!(counting_function(&IntegerSet::new(), &big(100)), 0);
        assert_eq!(counting_function(&a, &big(0)), 0);
    }

    #[test]
    fn mod_norm_examples() {
        assert_eq!(mod_norm(&big(7), &big(5)).unwrap(), big(2));
        assert_eq!(mod_norm(&big(0), &big(9)).unwrap(), big(0));
        assert_eq!(mod_norm(&big(5), &big(10)).unwrap(), big(5));
        assert_eq!(mod_norm(&big(-7), &big(5)).unwrap(), big(2));
    }

    #[test]
    fn mod_norm_rejects_small_modulus() {
        assert!(matches!(mod_norm(&big(3), &big(1)), Err(Error::InvalidModulus(_))));
        assert!(matches!(mod_norm(&big(3), &big(-4)), Err(Error::InvalidModulus(_))));
    }

    #[test]
    fn dilate_examples() {
        assert_eq!(dilate(&big(3), &set(&[1, 4, 9])).unwrap(), set(&[3, 12, 27]));
        let a = set(&[-5, 0, 7]);
        assert_eq!(dilate(&big(1), &a).unwrap(), a);
        assert_eq!(dilate(&big(2), &set(&[-3, 1])).unwrap(), set(&[-6, 2]));
        assert!(dilate(&big(0), &a).is_err());
    }

    #[test]
    fn fold_examples() {
        assert_eq!(fold_to_nonneg(&set(&[-3, 1, 4])), set(&[4, 13, 16]));
        assert_eq!(fold_to_nonneg(&IntegerSet::new()), IntegerSet::new());
        assert_eq!(fold_to_nonneg(&set(&[0])), set(&[0]));
    }

    #[test]
    fn parser_rejects_unsorted_and_duplicates() {
        let unsorted = r#"{"name": "x", "elements": ["3", "2"]}"#;
        let dup = r#"{"name": "x", "elements": ["2", "2"]}"#;
        let junk = r#"{"name": "x", "elements": ["2", "two"]}"#;
        assert!(IntegerSet::from_json(unsorted).is_err());
        assert!(IntegerSet::from_json(dup).is_err());
        assert!(IntegerSet::from_json(junk).is_err());
        let ok = r#"{"name": "u", "elements": ["-8192", "2", "3"]}"#;
        let (name, s) = IntegerSet::from_json(ok).unwrap();
        assert_eq!(name, "u");
        assert_eq!(s, set(&[-8192, 2, 3]));
    }

    #[test]
    fn extended_count_order_and_json() {
        let inf = ExtendedCount::Infinite;
        assert!(ExtendedCount::Finite(u64::MAX) < inf);
        assert_eq!(inf.succ(), inf);
        assert_eq!(ExtendedCount::Finite(2).succ(), ExtendedCount::Finite(3));
        assert!(ExtendedCount::Finite(1) < 2u64);
        let v: Vec<ExtendedCount> = serde_json::from_str(r#"[3, "inf"]"#).unwrap();
        assert_eq!(v, vec![ExtendedCount::Finite(3), inf]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[3,"inf"]"#);
    }

    #[test]
    fn set_algebra() {
        let a = set(&[1, 3, 5]);
        let b = set(&[2, 3, 6]);
        assert_eq!(a.union(&b), set(&[1, 2, 3, 5, 6]));
        assert_eq!(a.difference(&b), set(&[1, 5]));
        assert!(a.intersects(&b));
        assert!(!a.intersects(&set(&[0, 2])));
        assert_eq!(a.with_inserted([big(4), big(3)]), set(&[1, 3, 4, 5]));
    }
}

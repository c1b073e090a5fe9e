//! Ordered abelian groups `ℤ^k` (lexicographic) with an adjoined `∞`, and
//! the generalised tropical hyperfield built on top of them.
//!
//! Multiplication in the tropical hyperfield is group addition; its
//! hyperaddition returns either a single value or the closed interval
//! `[γ, ∞]`, represented symbolically by [`TropSet`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// An element of `ℤ^k` under the lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    coords: Vec<BigInt>,
}

impl GroupElement {
    pub fn new(coords: Vec<BigInt>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Arity { left: 0, right: 1 });
        }
        Ok(Self { coords })
    }

    /// Element of the rank-one group `ℤ`.
    pub fn int(n: i64) -> Self {
        Self {
            coords: vec![BigInt::from(n)],
        }
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(arity: usize) -> Self {
        Self {
            coords: vec![BigInt::zero(); arity.max(1)],
        }
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// The value as a machine integer, when the group is `ℤ` and it fits.
    pub fn as_i64(&self) -> Option<i64> {
        match self.coords.as_slice() {
            [c] => c.to_i64(),
            _ => None,
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::Arity {
                left: self.arity(),
                right: other.arity(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        Ok(Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_cmp(&self, other: &Self) -> Result<Ordering> {
        self.check_arity(other)?;
        Ok(self.coords.cmp(&other.coords))
    }

    pub fn neg(&self) -> Self {
        Self {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coords.as_slice() {
            [c] => write!(f, "{c}"),
            cs => {
                write!(f, "(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A group element or the absorbing top symbol `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedValue {
    Finite(GroupElement),
    Infinity,
}

impl ExtendedValue {
    pub fn int(n: i64) -> Self {
        ExtendedValue::Finite(GroupElement::int(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedValue::Infinity)
    }

    pub fn finite(&self) -> Option<&GroupElement> {
        match self {
            ExtendedValue::Finite(g) => Some(g),
            ExtendedValue::Infinity => None,
        }
    }

    /// `Some(n)` for a finite value of `ℤ`, `None` for `∞` (or values outside `ℤ`).
    pub fn as_i64(&self) -> Option<i64> {
        self.finite().and_then(GroupElement::as_i64)
    }

    /// Bridge from the machine-integer valuations used inside the fields.
    pub fn from_order(order: Option<i64>) -> Self {
        order.map_or(ExtendedValue::Infinity, ExtendedValue::int)
    }

    pub fn to_json(&self) -> Value {
        match self {
            ExtendedValue::Infinity => json!("inf"),
            ExtendedValue::Finite(g) => Value::Array(
                g.coords
                    .iter()
                    .map(|c| match c.to_i64() {
                        Some(n) => json!(n),
                        None => json!(c.to_string()),
                    })
                    .collect(),
            ),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) if s == "inf" => Ok(ExtendedValue::Infinity),
            Value::Number(_) => Ok(ExtendedValue::Finite(GroupElement::new(vec![
                json_bigint(v)?,
            ])?)),
            Value::Array(items) => Ok(ExtendedValue::Finite(GroupElement::new(
                items.iter().map(json_bigint).collect::<Result<_>>()?,
            )?)),
            other => Err(Error::Json(format!("not a group value: {other}"))),
        }
    }
}

fn json_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Json(format!("not an integer: {n}"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| Error::Json(format!("not an integer: {s}"))),
        other => Err(Error::Json(format!("not an integer: {other}"))),
    }
}

impl From<GroupElement> for ExtendedValue {
    fn from(g: GroupElement) -> Self {
        ExtendedValue::Finite(g)
    }
}

impl PartialOrd for ExtendedValue {
    /// `None` only when the two finite values live in groups of different arity.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        group_cmp(self, other).ok()
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Finite(g) => g.fmt(f),
            ExtendedValue::Infinity => write!(f, "∞"),
        }
    }
}

/// Result of a tropical hyperaddition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TropSet {
    Singleton(ExtendedValue),
    /// The closed interval `[lower, ∞]`; always contains `∞`.
    UpInterval(GroupElement),
}

impl TropSet {
    pub fn to_json(&self) -> Value {
        match self {
            TropSet::Singleton(v) => json!({"kind": "singleton", "value": v.to_json()}),
            TropSet::UpInterval(g) => json!({
                "kind": "upinterval",
                "value": ExtendedValue::Finite(g.clone()).to_json(),
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v.get("kind").and_then(Value::as_str);
        let value = v
            .get("value")
            .ok_or_else(|| Error::Json("missing \"value\"".into()))?;
        match kind {
            Some("singleton") => Ok(TropSet::Singleton(ExtendedValue::from_json(value)?)),
            Some("upinterval") => match ExtendedValue::from_json(value)? {
                ExtendedValue::Finite(g) => Ok(TropSet::UpInterval(g)),
                ExtendedValue::Infinity => Err(Error::Json("interval bound must be finite".into())),
            },
            _ => Err(Error::Json(format!("unknown TropSet kind in {v}"))),
        }
    }
}

/// Group addition, which is also the multiplication of the tropical hyperfield.
pub fn group_add(a: &ExtendedValue, b: &ExtendedValue) -> Result<ExtendedValue> {
    match (a, b) {
        (ExtendedValue::Finite(x), ExtendedValue::Finite(y)) => {
            Ok(ExtendedValue::Finite(x.checked_add(y)?))
        }
        _ => {
            check_same_group(a, b)?;
            Ok(ExtendedValue::Infinity)
        }
    }
}

pub fn group_cmp(a: &ExtendedValue, b: &ExtendedValue) -> Result<Ordering> {
    match (a, b) {
        (ExtendedValue::Finite(x), ExtendedValue::Finite(y)) => x.checked_cmp(y),
        (ExtendedValue::Infinity, ExtendedValue::Infinity) => Ok(Ordering::Equal),
        (ExtendedValue::Infinity, _) => Ok(Ordering::Greater),
        (_, ExtendedValue::Infinity) => Ok(Ordering::Less),
    }
}

// `∞` belongs to every group, so only two finite values can disagree on arity.
fn check_same_group(a: &ExtendedValue, b: &ExtendedValue) -> Result<()> {
    if let (ExtendedValue::Finite(x), ExtendedValue::Finite(y)) = (a, b) {
        x.check_arity(y)?;
    }
    Ok(())
}

pub fn trop_hyperadd(a: &ExtendedValue, b: &ExtendedValue) -> Result<TropSet> {
    Ok(match group_cmp(a, b)? {
        Ordering::Less => TropSet::Singleton(a.clone()),
        Ordering::Greater => TropSet::Singleton(b.clone()),
        Ordering::Equal => match a {
            ExtendedValue::Finite(g) => TropSet::UpInterval(g.clone()),
            ExtendedValue::Infinity => TropSet::Singleton(ExtendedValue::Infinity),
        },
    })
}

pub fn trop_member(c: &ExtendedValue, s: &TropSet) -> Result<bool> {
    match s {
        TropSet::Singleton(v) => Ok(group_cmp(c, v)? == Ordering::Equal),
        TropSet::UpInterval(lower) => {
            let lower = ExtendedValue::Finite(lower.clone());
            Ok(group_cmp(c, &lower)? != Ordering::Less)
        }
    }
}

/// Recovers `γ ≤ δ` from the hyperaddition alone: `δ ∈ γ ⊞ γ`.
pub fn order_from_hyperadd(gamma: &ExtendedValue, delta: &ExtendedValue) -> Result<bool> {
    trop_member(delta, &trop_hyperadd(gamma, gamma)?)
}

/// Translates a tropical set by `shift` (the image of the set under `x ↦ shift + x`).
pub fn trop_translate(shift: &ExtendedValue, s: &TropSet) -> Result<TropSet> {
    match (shift, s) {
        (ExtendedValue::Infinity, _) => Ok(TropSet::Singleton(ExtendedValue::Infinity)),
        (_, TropSet::Singleton(v)) => Ok(TropSet::Singleton(group_add(shift, v)?)),
        (ExtendedValue::Finite(g), TropSet::UpInterval(lower)) => {
            Ok(TropSet::UpInterval(g.checked_add(lower)?))
        }
    }
}

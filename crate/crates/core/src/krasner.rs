//! The valued `γ`-hyperfield `K_γ = K^× / 𝒰^γ ∪ {0}` of a valued field,
//! where `𝒰^γ = {u : v(u − 1) > γ}`.
//!
//! Cosets are kept by representative. Two representatives `x`, `y` name the
//! same class iff both are zero or `v(x − y) > γ + v(x)`. The sum
//! `[x] ⊞ [y]` is an open ball of radius `γ + min(vx, vy)` around
//! `[x + y]` and is carried symbolically as a [`HyperSum`].

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::basefields::{padic_residue, rational_order, ValuedField};
use crate::error::{Error, Result};
use crate::oag::{ExtendedValue, GroupElement};

/// A level `γ ∈ vK = ℤ` with `γ ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(pub u32);

impl Level {
    pub fn value(self) -> u32 {
        self.0
    }

    pub fn as_i64(self) -> i64 {
        self.0 as i64
    }

    pub fn to_extended(self) -> ExtendedValue {
        ExtendedValue::int(self.as_i64())
    }
}

impl TryFrom<&ExtendedValue> for Level {
    type Error = Error;

    fn try_from(v: &ExtendedValue) -> Result<Self> {
        v.as_i64()
            .filter(|n| *n >= 0)
            .and_then(|n| u32::try_from(n).ok())
            .map(Level)
            .ok_or_else(|| Error::InvalidLevel(v.to_string()))
    }
}

impl TryFrom<i64> for Level {
    type Error = Error;

    fn try_from(n: i64) -> Result<Self> {
        u32::try_from(n)
            .map(Level)
            .map_err(|_| Error::InvalidLevel(n.to_string()))
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The class `[rep]_level`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaCoset<F: ValuedField> {
    level: Level,
    rep: F::Elem,
    // cached v(rep); None for the zero class
    order: Option<i64>,
}

impl<F: ValuedField> GammaCoset<F> {
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn rep(&self) -> &F::Elem {
        &self.rep
    }

    pub fn into_rep(self) -> F::Elem {
        self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.order.is_none()
    }

    /// `v_γ` as a machine integer, `None` for the zero class.
    pub fn order(&self) -> Option<i64> {
        self.order
    }

    pub fn value(&self) -> ExtendedValue {
        ExtendedValue::from_order(self.order)
    }

    pub fn to_json(&self, field: &F) -> Value {
        json!({"level": self.level.0, "rep": field.elem_to_json(&self.rep)})
    }

    pub fn from_json(field: &F, v: &Value) -> Result<Self> {
        let level = v
            .get("level")
            .ok_or_else(|| Error::Json("coset without \"level\"".into()))?;
        let level = Level::try_from(&ExtendedValue::from_json(level)?)?;
        let rep = v
            .get("rep")
            .ok_or_else(|| Error::Json("coset without \"rep\"".into()))?;
        Ok(at_level(field, field.elem_from_json(rep)?, level))
    }
}

/// `[x]_level` for an already validated level.
pub fn at_level<F: ValuedField>(field: &F, x: F::Elem, level: Level) -> GammaCoset<F> {
    let order = field.order(&x);
    GammaCoset {
        level,
        rep: x,
        order,
    }
}

/// `[x]_γ`; `γ` must be a finite, non-negative integer.
pub fn coset_of<F: ValuedField>(
    field: &F,
    x: F::Elem,
    gamma: &ExtendedValue,
) -> Result<GammaCoset<F>> {
    Ok(at_level(field, x, Level::try_from(gamma)?))
}

fn same_level<F: ValuedField>(a: &GammaCoset<F>, b: &GammaCoset<F>) -> Result<Level> {
    if a.level != b.level {
        return Err(Error::LevelMismatch(a.level.0, b.level.0));
    }
    Ok(a.level)
}

/// `v(x − y) > bound`, with `∞ > bound` always.
fn close<F: ValuedField>(field: &F, x: &F::Elem, y: &F::Elem, bound: i64) -> bool {
    field.order(&field.sub(x, y)).is_none_or(|v| v > bound)
}

/// Equality of classes at a shared level.
pub fn coset_eq<F: ValuedField>(field: &F, a: &GammaCoset<F>, b: &GammaCoset<F>) -> Result<bool> {
    let level = same_level(a, b)?;
    Ok(match (a.order, b.order) {
        (None, None) => true,
        (Some(va), Some(vb)) if va == vb => close(field, &a.rep, &b.rep, level.as_i64() + va),
        _ => false,
    })
}

pub fn coset_mul<F: ValuedField>(
    field: &F,
    a: &GammaCoset<F>,
    b: &GammaCoset<F>,
) -> Result<GammaCoset<F>> {
    let level = same_level(a, b)?;
    Ok(at_level(field, field.mul(&a.rep, &b.rep), level))
}

pub fn coset_inv<F: ValuedField>(field: &F, a: &GammaCoset<F>) -> Result<GammaCoset<F>> {
    Ok(at_level(field, field.inv(&a.rep)?, a.level))
}

pub fn coset_neg<F: ValuedField>(field: &F, a: &GammaCoset<F>) -> GammaCoset<F> {
    GammaCoset {
        level: a.level,
        rep: field.neg(&a.rep),
        order: a.order,
    }
}

pub fn coset_value<F: ValuedField>(a: &GammaCoset<F>) -> ExtendedValue {
    a.value()
}

/// Canonical key of a rational class: `(v(x), unit part mod p^(γ+1))`.
///
/// Two nonzero rationals give equal keys iff their classes at level `γ` agree.
pub fn rational_coset_key(x: &BigRational, p: u64, level: Level) -> Option<(i64, BigInt)> {
    let v = rational_order(x, p)?;
    let scale = if v >= 0 {
        BigRational::new(1.into(), num_traits::pow(BigInt::from(p), v as usize))
    } else {
        BigRational::from_integer(num_traits::pow(BigInt::from(p), (-v) as usize))
    };
    let unit = x * scale;
    let residue = padic_residue(&unit, p, level.0 + 1).expect("unit is p-integral");
    Some((v, residue))
}

/// Symbolic description of `[x]_γ ⊞ [y]_γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperSum<F: ValuedField> {
    level: Level,
    center: GammaCoset<F>,
    /// `γ + min(vx, vy)`; `∞` only for `[0] ⊞ [0]`.
    radius: ExtendedValue,
    contains_zero: bool,
    singleton: Option<GammaCoset<F>>,
}

impl<F: ValuedField> HyperSum<F> {
    pub fn level(&self) -> Level {
        self.level
    }

    /// `[x + y]_γ`.
    pub fn center(&self) -> &GammaCoset<F> {
        &self.center
    }

    pub fn radius(&self) -> &ExtendedValue {
        &self.radius
    }

    pub fn contains_zero(&self) -> bool {
        self.contains_zero
    }

    /// Set when one summand is the zero class: the sum is the other summand alone.
    pub fn singleton(&self) -> Option<&GammaCoset<F>> {
        self.singleton.as_ref()
    }

    pub fn to_json(&self, field: &F) -> Value {
        json!({
            "level": self.level.0,
            "center": self.center.to_json(field),
            "radius": self.radius.to_json(),
            "zero": self.contains_zero,
            "singleton": self.singleton.as_ref().map(|s| s.to_json(field)),
        })
    }

    pub fn from_json(field: &F, v: &Value) -> Result<Self> {
        let get = |key: &str| {
            v.get(key)
                .ok_or_else(|| Error::Json(format!("hypersum without \"{key}\"")))
        };
        let center = GammaCoset::from_json(field, get("center")?)?;
        let level = Level::try_from(&ExtendedValue::from_json(get("level")?)?)?;
        if center.level != level {
            return Err(Error::LevelMismatch(center.level.0, level.0));
        }
        let singleton = match v.get("singleton") {
            None | Some(Value::Null) => None,
            Some(s) => Some(GammaCoset::from_json(field, s)?),
        };
        Ok(Self {
            level,
            center,
            radius: ExtendedValue::from_json(get("radius")?)?,
            contains_zero: get("zero")?
                .as_bool()
                .ok_or_else(|| Error::Json("\"zero\" must be a boolean".into()))?,
            singleton,
        })
    }
}

pub fn hyperadd<F: ValuedField>(
    field: &F,
    a: &GammaCoset<F>,
    b: &GammaCoset<F>,
) -> Result<HyperSum<F>> {
    let level = same_level(a, b)?;
    let center = at_level(field, field.add(&a.rep, &b.rep), level);
    let (va, vb) = match (a.order, b.order) {
        (None, None) => {
            return Ok(HyperSum {
                level,
                center: center.clone(),
                radius: ExtendedValue::Infinity,
                contains_zero: true,
                singleton: Some(center),
            })
        }
        (None, Some(v)) | (Some(v), None) => {
            let other = if a.is_zero() { b } else { a };
            return Ok(HyperSum {
                level,
                center: center.clone(),
                radius: ExtendedValue::int(level.as_i64() + v),
                contains_zero: false,
                singleton: Some(other.clone()),
            });
        }
        (Some(va), Some(vb)) => (va, vb),
    };
    let radius = level.as_i64() + va.min(vb);
    let contains_zero = center.order.is_none_or(|v| v > radius);
    Ok(HyperSum {
        level,
        center,
        radius: ExtendedValue::int(radius),
        contains_zero,
        singleton: None,
    })
}

pub fn hypersum_contains<F: ValuedField>(
    field: &F,
    s: &HyperSum<F>,
    c: &GammaCoset<F>,
) -> Result<bool> {
    if c.level != s.level {
        return Err(Error::LevelMismatch(s.level.0, c.level.0));
    }
    if let Some(single) = &s.singleton {
        return coset_eq(field, single, c);
    }
    if c.is_zero() {
        return Ok(s.contains_zero);
    }
    let radius = s
        .radius
        .as_i64()
        .expect("finite radius off the singleton case");
    Ok(close(field, &c.rep, &s.center.rep, radius))
}

/// The set of values `v_γ` takes on a hypersum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HyperValues {
    Single(ExtendedValue),
    /// `{ε : ε > bound} ∪ {∞}`; the lower bound itself is excluded.
    OpenUp(GroupElement),
}

impl HyperValues {
    pub fn contains(&self, v: &ExtendedValue) -> bool {
        match self {
            HyperValues::Single(x) => x == v,
            HyperValues::OpenUp(bound) => *v > ExtendedValue::Finite(bound.clone()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            HyperValues::Single(v) => json!({"kind": "singleton", "value": v.to_json()}),
            HyperValues::OpenUp(b) => json!({
                "kind": "upinterval",
                "value": ExtendedValue::Finite(b.clone()).to_json(),
                "open": true,
            }),
        }
    }
}

pub fn hypersum_value_set<F: ValuedField>(s: &HyperSum<F>) -> HyperValues {
    if let Some(single) = &s.singleton {
        return HyperValues::Single(single.value());
    }
    if s.contains_zero {
        let bound = s
            .radius
            .finite()
            .expect("finite radius off the singleton case");
        HyperValues::OpenUp(bound.clone())
    } else {
        HyperValues::Single(s.center.value())
    }
}

/// A chain `z₁ ∈ a₀ ⊞ a₁`, `zᵢ ∈ zᵢ₋₁ ⊞ aᵢ`, ending at the queried class.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipCertificate<F: ValuedField> {
    pub chain: Vec<GammaCoset<F>>,
}

impl<F: ValuedField> MembershipCertificate<F> {
    /// Re-checks every link against the summands with plain two-term membership.
    pub fn verify(&self, field: &F, summands: &[GammaCoset<F>]) -> Result<bool> {
        if summands.len() < 2 || self.chain.len() != summands.len() - 1 {
            return Ok(false);
        }
        let mut prev = summands[0].clone();
        for (z, a) in self.chain.iter().zip(&summands[1..]) {
            if !hypersum_contains(field, &hyperadd(field, &prev, a)?, z)? {
                return Ok(false);
            }
            prev = z.clone();
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum IteratedMembership<F: ValuedField> {
    Member(MembershipCertificate<F>),
    NonMember,
    Unknown,
}

impl<F: ValuedField> IteratedMembership<F> {
    pub fn is_member(&self) -> bool {
        matches!(self, IteratedMembership::Member(_))
    }
}

// Keeps each search frontier small enough for quadratic dedup.
const FRONTIER_CAP: usize = 48;

/// Bounded search for `c ∈ a₀ ⊞ a₁ ⊞ … ⊞ a_k` (left-associated).
///
/// Answers `NonMember` only through the necessary condition that, for
/// integral summands, every member `[y]` has `v(Σ aᵢ − y) > γ`. A
/// certificate is searched among centers, the backward targets `c − aₖ − …`,
/// and perturbations of centers by `π^(r+1)·e` for elements `e` of height
/// at most `search_bound`.
pub fn iterated_contains<F: ValuedField>(
    field: &F,
    summands: &[GammaCoset<F>],
    c: &GammaCoset<F>,
    search_bound: u32,
) -> Result<IteratedMembership<F>> {
    if summands.len() < 2 {
        return Err(Error::TooFewSummands(summands.len()));
    }
    let level = c.level;
    for a in summands {
        same_level(a, c)?;
    }

    let total = summands
        .iter()
        .fold(field.zero(), |acc, a| field.add(&acc, &a.rep));
    let integral = summands.iter().all(|a| a.order.is_none_or(|v| v >= 0));
    let all_zero = summands.iter().all(GammaCoset::is_zero);
    if integral && !all_zero && !close(field, &total, &c.rep, level.as_i64()) {
        return Ok(IteratedMembership::NonMember);
    }

    // targets[i]: rep that stage i would need to hit for the last links to be exact
    let k = summands.len() - 1;
    let mut targets = vec![field.zero(); k];
    targets[k - 1] = c.rep.clone();
    for i in (0..k - 1).rev() {
        targets[i] = field.sub(&targets[i + 1], &summands[i + 2].rep);
    }

    let perturbations = field.small_elements(search_bound);
    // frontier of (coset, parent index into the previous stage)
    let mut stages: Vec<Vec<(GammaCoset<F>, usize)>> = Vec::with_capacity(k);
    let mut previous = vec![(summands[0].clone(), 0usize)];
    for (i, a) in summands[1..].iter().enumerate() {
        let mut next: Vec<(GammaCoset<F>, usize)> = Vec::new();
        for (parent, (z, _)) in previous.iter().enumerate() {
            let sum = hyperadd(field, z, a)?;
            let target = at_level(field, targets[i].clone(), level);
            if hypersum_contains(field, &sum, &target)? {
                push_unique(field, &mut next, target, parent)?;
            }
            if i == k - 1 {
                continue;
            }
            push_unique(field, &mut next, sum.center.clone(), parent)?;
            let Some(r) = sum.radius.as_i64() else {
                continue;
            };
            let step = field.pow_uniformizer(r + 1);
            for e in &perturbations {
                if next.len() >= FRONTIER_CAP {
                    break;
                }
                let cand = at_level(
                    field,
                    field.add(&sum.center.rep, &field.mul(&step, e)),
                    level,
                );
                if hypersum_contains(field, &sum, &cand)? {
                    push_unique(field, &mut next, cand, parent)?;
                }
            }
        }
        if next.is_empty() {
            return Ok(IteratedMembership::Unknown);
        }
        stages.push(std::mem::take(&mut previous));
        previous = next;
    }
    stages.push(previous);

    // the last stage only ever holds the target class c
    let Some((_, mut parent)) = stages[k].first().cloned() else {
        return Ok(IteratedMembership::Unknown);
    };
    let mut chain = vec![c.clone()];
    for stage in stages[1..k].iter().rev() {
        let (z, up) = &stage[parent];
        chain.push(z.clone());
        parent = *up;
    }
    chain.reverse();
    Ok(IteratedMembership::Member(MembershipCertificate { chain }))
}

fn push_unique<F: ValuedField>(
    field: &F,
    frontier: &mut Vec<(GammaCoset<F>, usize)>,
    z: GammaCoset<F>,
    parent: usize,
) -> Result<()> {
    for (w, _) in frontier.iter() {
        if coset_eq(field, w, &z)? {
            return Ok(());
        }
    }
    frontier.push((z, parent));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefields::RationalField;

    fn q5() -> RationalField {
        RationalField::new(5).unwrap()
    }

    fn cos(q: &RationalField, n: i64, d: i64, level: u32) -> GammaCoset<RationalField> {
        at_level(q, q.ratio(n, d), Level(level))
    }

    #[test]
    fn coset_construction() {
        let q = q5();
        let c = coset_of(&q, q.from_i64(2), &ExtendedValue::int(1)).unwrap();
        assert_eq!(c.value(), ExtendedValue::int(0));
        let z = coset_of(&q, q.zero(), &ExtendedValue::int(3)).unwrap();
        assert_eq!(z.value(), ExtendedValue::Infinity);
        let fifty = coset_of(&q, q.from_i64(50), &ExtendedValue::int(0)).unwrap();
        assert_eq!(fifty.value(), ExtendedValue::int(2));
        assert!(coset_of(&q, q.one(), &ExtendedValue::int(-1)).is_err());
        assert!(coset_of(&q, q.one(), &ExtendedValue::Infinity).is_err());
    }

    #[test]
    fn equality_examples() {
        let q = q5();
        assert!(coset_eq(&q, &cos(&q, 2, 1, 1), &cos(&q, 27, 1, 1)).unwrap());
        assert!(!coset_eq(&q, &cos(&q, 2, 1, 1), &cos(&q, 7, 1, 1)).unwrap());
        let x = cos(&q, 3, 7, 2);
        assert!(coset_eq(&q, &x, &x).unwrap());
        assert!(coset_eq(&q, &cos(&q, 0, 1, 2), &cos(&q, 0, 1, 2)).unwrap());
        assert!(!coset_eq(&q, &cos(&q, 0, 1, 2), &cos(&q, 125, 1, 2)).unwrap());
        assert!(matches!(
            coset_eq(&q, &cos(&q, 2, 1, 1), &cos(&q, 2, 1, 2)),
            Err(Error::LevelMismatch(1, 2))
        ));
    }

    #[test]
    fn multiplicative_examples() {
        let q = q5();
        let prod = coset_mul(&q, &cos(&q, 2, 1, 1), &cos(&q, 3, 1, 1)).unwrap();
        assert!(coset_eq(&q, &prod, &cos(&q, 6, 1, 1)).unwrap());
        let inv = coset_inv(&q, &cos(&q, 5, 1, 2)).unwrap();
        assert!(coset_eq(&q, &inv, &cos(&q, 1, 5, 2)).unwrap());
        assert_eq!(inv.value(), ExtendedValue::int(-1));
        let neg = coset_neg(&q, &cos(&q, 1, 1, 0));
        assert!(coset_eq(&q, &neg, &cos(&q, -1, 1, 0)).unwrap());
        assert!(!coset_eq(&q, &neg, &cos(&q, 1, 1, 0)).unwrap());
        assert_eq!(coset_inv(&q, &cos(&q, 0, 1, 0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn value_is_representative_independent() {
        let q = q5();
        let a = cos(&q, 27, 1, 1);
        let b = cos(&q, 2, 1, 1);
        assert!(coset_eq(&q, &a, &b).unwrap());
        assert_eq!(coset_value(&a), ExtendedValue::int(0));
        assert_eq!(coset_value(&a), coset_value(&b));
        assert_eq!(coset_value(&cos(&q, 50, 1, 1)), ExtendedValue::int(2));
    }

    #[test]
    fn hyperadd_examples() {
        let q = q5();
        let s = hyperadd(&q, &cos(&q, 1, 1, 1), &cos(&q, 1, 1, 1)).unwrap();
        assert!(coset_eq(&q, s.center(), &cos(&q, 2, 1, 1)).unwrap());
        assert_eq!(s.radius(), &ExtendedValue::int(1));
        assert!(!s.contains_zero());

        let t = hyperadd(&q, &cos(&q, 1, 1, 0), &cos(&q, -1, 1, 0)).unwrap();
        assert!(t.center().is_zero());
        assert_eq!(t.radius(), &ExtendedValue::int(0));
        assert!(t.contains_zero());

        let x = cos(&q, 3, 4, 2);
        let u = hyperadd(&q, &x, &cos(&q, 0, 1, 2)).unwrap();
        assert!(coset_eq(&q, u.singleton().unwrap(), &x).unwrap());
        assert!(hypersum_contains(&q, &u, &cos(&q, 3 + 4 * 125, 4, 2)).unwrap());
        assert!(!hypersum_contains(&q, &u, &cos(&q, 3 + 4 * 25, 4, 2)).unwrap());

        let zz = hyperadd(&q, &cos(&q, 0, 1, 2), &cos(&q, 0, 1, 2)).unwrap();
        assert!(hypersum_contains(&q, &zz, &cos(&q, 0, 1, 2)).unwrap());
        assert!(!hypersum_contains(&q, &zz, &cos(&q, 1, 1, 2)).unwrap());
    }

    #[test]
    fn membership_examples() {
        let q = q5();
        let s = hyperadd(&q, &cos(&q, 1, 1, 1), &cos(&q, 1, 1, 1)).unwrap();
        assert!(hypersum_contains(&q, &s, &cos(&q, 27, 1, 1)).unwrap());
        assert!(!hypersum_contains(&q, &s, &cos(&q, 7, 1, 1)).unwrap());
        let t = hyperadd(&q, &cos(&q, 1, 1, 0), &cos(&q, -1, 1, 0)).unwrap();
        assert!(hypersum_contains(&q, &t, &cos(&q, 5, 1, 0)).unwrap());
        assert!(hypersum_contains(&q, &t, &cos(&q, 0, 1, 0)).unwrap());
        assert!(!hypersum_contains(&q, &t, &cos(&q, 2, 1, 0)).unwrap());
        assert!(hypersum_contains(&q, &t, &cos(&q, 2, 1, 1)).is_err());
    }

    #[test]
    fn value_set_examples() {
        let q = q5();
        let s = hyperadd(&q, &cos(&q, 1, 1, 1), &cos(&q, 1, 1, 1)).unwrap();
        assert_eq!(
            hypersum_value_set(&s),
            HyperValues::Single(ExtendedValue::int(0))
        );
        let t = hyperadd(&q, &cos(&q, 1, 1, 0), &cos(&q, -1, 1, 0)).unwrap();
        let vals = hypersum_value_set(&t);
        assert_eq!(vals, HyperValues::OpenUp(GroupElement::int(0)));
        assert!(vals.contains(&ExtendedValue::int(1)));
        assert!(vals.contains(&ExtendedValue::Infinity));
        assert!(!vals.contains(&ExtendedValue::int(0)));
        let x = cos(&q, 50, 1, 1);
        let u = hyperadd(&q, &x, &cos(&q, 0, 1, 1)).unwrap();
        assert_eq!(
            hypersum_value_set(&u),
            HyperValues::Single(ExtendedValue::int(2))
        );
    }

    #[test]
    fn iterated_examples() {
        let q = q5();
        let ones = |third: i64| vec![cos(&q, 1, 1, 1), cos(&q, 1, 1, 1), cos(&q, third, 1, 1)];

        let r = iterated_contains(&q, &ones(3), &cos(&q, 5, 1, 1), 4).unwrap();
        let IteratedMembership::Member(cert) = r else {
            panic!("expected member, got {r:?}")
        };
        assert!(cert.verify(&q, &ones(3)).unwrap());

        assert_eq!(
            iterated_contains(&q, &ones(1), &cos(&q, 13, 1, 1), 4).unwrap(),
            IteratedMembership::NonMember
        );

        let r = iterated_contains(&q, &ones(1), &cos(&q, 28, 1, 1), 4).unwrap();
        let IteratedMembership::Member(cert) = r else {
            panic!("expected member, got {r:?}")
        };
        assert!(cert.verify(&q, &ones(1)).unwrap());

        assert_eq!(
            iterated_contains(&q, &ones(1)[..1], &cos(&q, 1, 1, 1), 4),
            Err(Error::TooFewSummands(1))
        );
    }

    #[test]
    fn iterated_with_cancellation_needs_search() {
        // [1] ⊞ [-1] is everything of value > 0 at level 0; adding [5] reaches [10]
        let q = q5();
        let summands = vec![cos(&q, 1, 1, 0), cos(&q, -1, 1, 0), cos(&q, 5, 1, 0)];
        let r = iterated_contains(&q, &summands, &cos(&q, 10, 1, 0), 3).unwrap();
        let IteratedMembership::Member(cert) = r else {
            panic!("expected member, got {r:?}")
        };
        assert!(cert.verify(&q, &summands).unwrap());
    }

    #[test]
    fn rational_keys_match_equality() {
        let q = q5();
        let xs = q.small_elements(12);
        for level in 0..3 {
            for a in xs.iter().step_by(7) {
                for b in xs.iter().step_by(5) {
                    let ca = at_level(&q, a.clone(), Level(level));
                    let cb = at_level(&q, b.clone(), Level(level));
                    let keys_equal = rational_coset_key(a, 5, Level(level))
                        == rational_coset_key(b, 5, Level(level));
                    assert_eq!(
                        keys_equal,
                        coset_eq(&q, &ca, &cb).unwrap(),
                        "{a} vs {b} at {level}"
                    );
                }
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let q = q5();
        let s = hyperadd(&q, &cos(&q, 1, 1, 1), &cos(&q, 1, 1, 1)).unwrap();
        let j = s.to_json(&q);
        assert_eq!(j["radius"], json!([1]));
        assert_eq!(j["zero"], json!(false));
        assert_eq!(j["singleton"], Value::Null);
        assert_eq!(HyperSum::from_json(&q, &j).unwrap(), s);
        let c = cos(&q, 1, 3, 2);
        assert_eq!(c.to_json(&q), json!({"level": 2, "rep": "1/3"}));
        assert_eq!(GammaCoset::from_json(&q, &c.to_json(&q)).unwrap(), c);
    }
}

//! Exact valued fields `(K, v)` with value group `ℤ`, and independent
//! digit-expansion oracles for their completions.
//!
//! Three families are supported:
//!
//! * `ℚ` with the `p`-adic valuation ([`RationalField`]),
//! * `𝔽_p(t)` with the `t`-adic valuation ([`FunctionField`]),
//! * `ℚ(α)`, `α² = 1 + p`, valued through the embedding `α ↦ s ∈ ℚ_p`
//!   with `s ≡ 1 mod p` ([`QuadraticField`]).

mod function_field;
mod hensel;
mod padic;
mod poly;
mod quadratic;
mod rational;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::oag::ExtendedValue;

pub use function_field::{FunctionField, RationalFunction};
pub use hensel::{hensel_sqrt, hensel_sqrt_mod};
pub use padic::{bigint_order, is_prime, padic_residue, rational_order};
pub use poly::FpPoly;
pub use quadratic::{QuadElem, QuadraticField};
pub use rational::RationalField;

/// Which valued field an element belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldDescriptor {
    RationalPadic { p: u64 },
    FunctionField { p: u64 },
    Quadratic { p: u64 },
}

impl FieldDescriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            FieldDescriptor::RationalPadic { .. } => "rational",
            FieldDescriptor::FunctionField { .. } => "function",
            FieldDescriptor::Quadratic { .. } => "quadratic",
        }
    }

    pub fn prime(&self) -> u64 {
        match *self {
            FieldDescriptor::RationalPadic { p }
            | FieldDescriptor::FunctionField { p }
            | FieldDescriptor::Quadratic { p } => p,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"field": self.kind(), "p": self.prime()})
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::RationalPadic { p } => write!(f, "Q with v_{p}"),
            FieldDescriptor::FunctionField { p } => write!(f, "F_{p}(t) with v_t"),
            FieldDescriptor::Quadratic { p } => write!(f, "Q(a), a^2 = {}, with v_{p}", p + 1),
        }
    }
}

/// A valued field with value group `ℤ`.
///
/// Elements are plain values; the field object carries the parameters
/// (the prime, the chosen embedding) so that element types stay lean.
pub trait ValuedField: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync + 'static;

    fn descriptor(&self) -> FieldDescriptor;

    /// Residue characteristic; also the digit base of [`Approximation`]s.
    fn prime(&self) -> u64 {
        self.descriptor().prime()
    }

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;

    /// An element of valuation one (`p`, resp. `t`).
    fn uniformizer(&self) -> Self::Elem;

    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn inv(&self, x: &Self::Elem) -> Result<Self::Elem>;

    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.add(x, &self.neg(y))
    }

    /// Valuation as a machine integer; `None` exactly for zero.
    fn order(&self, x: &Self::Elem) -> Option<i64>;

    fn valuation(&self, x: &Self::Elem) -> ExtendedValue {
        ExtendedValue::from_order(self.order(x))
    }

    /// Digit expansion of `x` in the completion, `n` digits past its valuation.
    fn expand(&self, x: &Self::Elem, n: usize) -> Result<Approximation>;

    /// Elements of bounded height, used by bounded witness searches.
    fn small_elements(&self, height: u32) -> Vec<Self::Elem>;

    fn elem_to_json(&self, x: &Self::Elem) -> Value;
    fn parse_payload(&self, v: &Value) -> Result<Self::Elem>;
    fn format_elem(&self, x: &Self::Elem) -> String;

    /// Parses either a bare payload or `{"field":..,"p":..,"value":payload}`;
    /// a tagged element of another field is rejected.
    fn elem_from_json(&self, v: &Value) -> Result<Self::Elem> {
        if let Some(obj) = v.as_object() {
            if obj.contains_key("field") {
                let kind = obj.get("field").and_then(Value::as_str).unwrap_or("?");
                let p = obj.get("p").and_then(Value::as_u64).unwrap_or(0);
                let ours = self.descriptor();
                if kind != ours.kind() || p != ours.prime() {
                    return Err(Error::DescriptorMismatch(
                        format!("{kind}/{p}"),
                        format!("{}/{}", ours.kind(), ours.prime()),
                    ));
                }
                let payload = obj
                    .get("value")
                    .ok_or_else(|| Error::Json("tagged element without \"value\"".into()))?;
                return self.parse_payload(payload);
            }
        }
        self.parse_payload(v)
    }

    fn pow_uniformizer(&self, e: i64) -> Self::Elem {
        let base = if e >= 0 {
            self.uniformizer()
        } else {
            self.inv(&self.uniformizer())
                .expect("uniformizer is nonzero")
        };
        let mut acc = self.one();
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }

    /// `Σ dᵢ π^(shift+i)` for the uniformizer `π`.
    fn resum(&self, approx: &Approximation) -> Self::Elem {
        let pi = self.uniformizer();
        let mut acc = self.zero();
        for d in approx.digits.iter().rev() {
            acc = self.add(&self.mul(&acc, &pi), &self.from_i64(*d as i64));
        }
        self.mul(&acc, &self.pow_uniformizer(approx.shift))
    }
}

/// Binary and unary field operations, as named on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldOp {
    Add,
    Neg,
    Mul,
    Inv,
}

impl FieldOp {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "add" => Some(FieldOp::Add),
            "neg" => Some(FieldOp::Neg),
            "mul" => Some(FieldOp::Mul),
            "inv" => Some(FieldOp::Inv),
            _ => None,
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, FieldOp::Add | FieldOp::Mul)
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldOp::Add => "add",
            FieldOp::Neg => "neg",
            FieldOp::Mul => "mul",
            FieldOp::Inv => "inv",
        }
    }
}

/// Exact field arithmetic dispatched on a [`FieldOp`].
pub fn f_arith<F: ValuedField>(
    field: &F,
    op: FieldOp,
    x: &F::Elem,
    y: Option<&F::Elem>,
) -> Result<F::Elem> {
    let rhs = || y.ok_or_else(|| Error::Json(format!("{} needs two operands", op.name())));
    match op {
        FieldOp::Add => Ok(field.add(x, rhs()?)),
        FieldOp::Mul => Ok(field.mul(x, rhs()?)),
        FieldOp::Neg => Ok(field.neg(x)),
        FieldOp::Inv => field.inv(x),
    }
}

/// A finite window `π^shift · Σ digitsᵢ πⁱ` into the completion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Approximation {
    pub p: u64,
    pub shift: i64,
    /// Little-endian: `digits[i]` is the coefficient of `π^(shift+i)`.
    pub digits: Vec<u64>,
}

impl Approximation {
    pub fn zero(p: u64, n: usize) -> Self {
        Self {
            p,
            shift: 0,
            digits: vec![0; n],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    /// Digits of a non-negative integer `m < p^n`, little-endian.
    pub(crate) fn from_residue(p: u64, shift: i64, residue: &BigInt, n: usize) -> Self {
        let base = BigInt::from(p);
        let mut m = residue.clone();
        let mut digits = Vec::with_capacity(n);
        for _ in 0..n {
            let d = &m % &base;
            digits.push(d.to_u64().expect("digit below p"));
            m /= &base;
        }
        Self { p, shift, digits }
    }

    /// The integer `Σ digitsᵢ pⁱ`.
    pub fn mantissa(&self) -> BigInt {
        let base = BigInt::from(self.p);
        self.digits
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &d| acc * &base + BigInt::from(d))
    }

    pub fn to_json(&self) -> Value {
        json!({"shift": self.shift, "digits": self.digits, "p": self.p})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let shift = v
            .get("shift")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::Json("approximation without integer \"shift\"".into()))?;
        let p = v
            .get("p")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Json("approximation without \"p\"".into()))?;
        let digits = v
            .get("digits")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("approximation without \"digits\"".into()))?
            .iter()
            .map(|d| {
                d.as_u64()
                    .filter(|&d| d < p)
                    .ok_or_else(|| Error::Json(format!("bad digit {d} for base {p}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { p, shift, digits })
    }
}

/// Certificate that a sequence prefix is Cauchy at a given level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CauchyWitness {
    /// Every pair of terms from this index on differs by valuation `> level`.
    pub index_bound: usize,
    pub level: ExtendedValue,
}

/// Smallest `ν₀` such that all pairs of terms at indices `≥ ν₀` differ by
/// valuation strictly above `gamma`.
///
/// A witness needs at least one pair in its tail, so the last index alone
/// never qualifies.
pub fn is_cauchy<F: ValuedField>(
    field: &F,
    xs: &[F::Elem],
    gamma: &ExtendedValue,
) -> Option<CauchyWitness> {
    if xs.len() < 2 {
        return None;
    }
    let separated = |i: usize, j: usize| field.valuation(&field.sub(&xs[i], &xs[j])) > *gamma;
    // Scan from the back; the good tail is a suffix.
    let mut start = xs.len() - 1;
    while start > 0 && (start..xs.len()).all(|j| separated(start - 1, j)) {
        start -= 1;
    }
    (start + 1 < xs.len()).then(|| CauchyWitness {
        index_bound: start,
        level: gamma.clone(),
    })
}

pub(crate) fn big_pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidField(format!("{p} is not prime")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_examples() {
        let q = RationalField::new(5).unwrap();
        let seq: Vec<_> = [1, 16, 16, 391].iter().map(|&n| q.from_i64(n)).collect();
        let w = is_cauchy(&q, &seq, &ExtendedValue::int(2)).unwrap();
        assert_eq!(w.index_bound, 1);

        let constant = vec![q.from_i64(7); 4];
        assert_eq!(
            is_cauchy(&q, &constant, &ExtendedValue::int(40))
                .unwrap()
                .index_bound,
            0
        );

        let alternating: Vec<_> = [1, 2, 1, 2].iter().map(|&n| q.from_i64(n)).collect();
        assert_eq!(is_cauchy(&q, &alternating, &ExtendedValue::int(0)), None);
        assert_eq!(is_cauchy(&q, &seq[..1], &ExtendedValue::int(0)), None);
    }

    #[test]
    fn f_arith_dispatch() {
        let q = RationalField::new(5).unwrap();
        let a = q.parse_literal("1/3").unwrap();
        let b = q.parse_literal("1/6").unwrap();
        assert_eq!(
            f_arith(&q, FieldOp::Add, &a, Some(&b)).unwrap(),
            q.parse_literal("1/2").unwrap()
        );
        assert!(f_arith(&q, FieldOp::Mul, &a, None).is_err());
        assert_eq!(
            f_arith(&q, FieldOp::Inv, &q.zero(), None),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn tagged_json_rejects_other_fields() {
        let q = RationalField::new(5).unwrap();
        let tagged = json!({"field": "rational", "p": 7, "value": "1/3"});
        assert!(matches!(
            q.elem_from_json(&tagged),
            Err(Error::DescriptorMismatch(..))
        ));
        let ok = json!({"field": "rational", "p": 5, "value": "1/3"});
        assert_eq!(
            q.elem_from_json(&ok).unwrap(),
            q.parse_literal("1/3").unwrap()
        );
    }

    #[test]
    fn approximation_json_roundtrip() {
        let a = Approximation {
            p: 5,
            shift: -2,
            digits: vec![4, 0, 1],
        };
        assert_eq!(
            a.to_json(),
            json!({"shift": -2, "digits": [4, 0, 1], "p": 5})
        );
        assert_eq!(Approximation::from_json(&a.to_json()).unwrap(), a);
        assert!(Approximation::from_json(&json!({"shift": 0, "digits": [5], "p": 5})).is_err());
    }
}

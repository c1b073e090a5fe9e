use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::padic::{padic_residue, rational_order};
use super::{big_pow, check_prime, Approximation, FieldDescriptor, ValuedField};
use crate::error::{Error, Result};

/// `ℚ` with the `p`-adic valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalField {
    p: u64,
}

impl RationalField {
    pub fn new(p: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Parses `"n"` or `"n/d"`.
    pub fn parse_literal(&self, s: &str) -> Result<BigRational> {
        parse_rational(s)
    }

    pub fn ratio(&self, n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// `p^e` as a rational.
    pub fn prime_power(&self, e: i64) -> BigRational {
        let m = big_pow(self.p, e.unsigned_abs() as u32);
        if e >= 0 {
            BigRational::from_integer(m)
        } else {
            BigRational::new(BigInt::one(), m)
        }
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Json(format!("not a rational literal: {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub(crate) fn rational_from_json(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(|n| BigRational::from_integer(n.into()))
            .ok_or_else(|| Error::Json(format!("not an integer: {n}"))),
        Value::Array(parts) if parts.len() == 2 => {
            let part = |x: &Value| -> Result<BigInt> {
                match x {
                    Value::Number(n) => n
                        .as_i64()
                        .map(BigInt::from)
                        .ok_or_else(|| Error::Json(format!("not an integer: {n}"))),
                    Value::String(s) => s
                        .parse()
                        .map_err(|_| Error::Json(format!("not an integer: {s:?}"))),
                    other => Err(Error::Json(format!("not an integer: {other}"))),
                }
            };
            let (n, d) = (part(&parts[0])?, part(&parts[1])?);
            if d.is_zero() {
                return Err(Error::Json("zero denominator".into()));
            }
            Ok(BigRational::new(n, d))
        }
        other => Err(Error::Json(format!("not a rational: {other}"))),
    }
}

pub(crate) fn rational_to_json(q: &BigRational) -> Value {
    json!(q.to_string())
}

/// All reduced `n/d` with `|n| ≤ h`, `1 ≤ d ≤ h`, including zero.
pub(crate) fn rationals_of_height(h: u32) -> Vec<BigRational> {
    let h = h.max(1) as i64;
    let mut out = vec![BigRational::zero()];
    for d in 1..=h {
        for n in 1..=h {
            if n.gcd(&d) == 1 {
                out.push(BigRational::new(n.into(), d.into()));
                out.push(BigRational::new((-n).into(), d.into()));
            }
        }
    }
    out
}

impl ValuedField for RationalField {
    type Elem = BigRational;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::RationalPadic { p: self.p }
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn uniformizer(&self) -> BigRational {
        BigRational::from_integer(self.p.into())
    }

    fn is_zero(&self, x: &BigRational) -> bool {
        x.is_zero()
    }

    fn add(&self, x: &BigRational, y: &BigRational) -> BigRational {
        x + y
    }

    fn neg(&self, x: &BigRational) -> BigRational {
        -x
    }

    fn mul(&self, x: &BigRational, y: &BigRational) -> BigRational {
        x * y
    }

    fn sub(&self, x: &BigRational, y: &BigRational) -> BigRational {
        x - y
    }

    fn inv(&self, x: &BigRational) -> Result<BigRational> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(x.recip())
    }

    fn order(&self, x: &BigRational) -> Option<i64> {
        rational_order(x, self.p)
    }

    fn pow_uniformizer(&self, e: i64) -> BigRational {
        self.prime_power(e)
    }

    /// Long division by the unit part modulo `p^n`.
    fn expand(&self, x: &BigRational, n: usize) -> Result<Approximation> {
        if n == 0 {
            return Err(Error::ZeroPrecision);
        }
        let Some(v) = self.order(x) else {
            return Ok(Approximation::zero(self.p, n));
        };
        let unit = x * self.prime_power(-v);
        let residue = padic_residue(&unit, self.p, n as u32)?;
        Ok(Approximation::from_residue(self.p, v, &residue, n))
    }

    fn small_elements(&self, height: u32) -> Vec<BigRational> {
        rationals_of_height(height)
    }

    fn elem_to_json(&self, x: &BigRational) -> Value {
        rational_to_json(x)
    }

    fn parse_payload(&self, v: &Value) -> Result<BigRational> {
        rational_from_json(v)
    }

    fn format_elem(&self, x: &BigRational) -> String {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oag::ExtendedValue;

    #[test]
    fn rejects_composite_modulus() {
        assert!(RationalField::new(6).is_err());
        assert!(RationalField::new(1).is_err());
    }

    #[test]
    fn arithmetic_example() {
        let q = RationalField::new(5).unwrap();
        let sum = q.add(&q.ratio(1, 3), &q.ratio(1, 6));
        assert_eq!(sum, q.ratio(1, 2));
    }

    #[test]
    fn valuation_examples() {
        let q = RationalField::new(5).unwrap();
        assert_eq!(q.valuation(&q.from_i64(50)), ExtendedValue::int(2));
        assert_eq!(q.valuation(&q.zero()), ExtendedValue::Infinity);
        assert_eq!(q.valuation(&q.ratio(3, 10)), ExtendedValue::int(-1));
    }

    #[test]
    fn expansion_examples() {
        let q = RationalField::new(5).unwrap();
        let minus_one = q.expand(&q.from_i64(-1), 4).unwrap();
        assert_eq!((minus_one.shift, minus_one.digits), (0, vec![4, 4, 4, 4]));
        let third = q.expand(&q.ratio(1, 3), 4).unwrap();
        assert_eq!((third.shift, third.digits), (0, vec![2, 3, 1, 3]));
        let one = q.expand(&q.one(), 5).unwrap();
        assert_eq!((one.shift, one.digits), (0, vec![1, 0, 0, 0, 0]));
        let x = q.expand(&q.ratio(3, 10), 3).unwrap();
        assert_eq!(x.shift, -1);
        assert_ne!(x.digits[0], 0);
        assert!(q.expand(&q.one(), 0).is_err());
    }

    #[test]
    fn parsing() {
        let q = RationalField::new(5).unwrap();
        assert_eq!(q.parse_literal(" -6/4 ").unwrap(), q.ratio(-3, 2));
        assert!(q.parse_literal("1/0").is_err());
        assert!(q.parse_literal("abc").is_err());
        assert_eq!(q.parse_payload(&json!([2, -4])).unwrap(), q.ratio(-1, 2));
        assert_eq!(q.parse_payload(&json!(7)).unwrap(), q.from_i64(7));
    }

    #[test]
    fn small_elements_are_distinct() {
        let q = RationalField::new(5).unwrap();
        let xs = q.small_elements(6);
        for (i, a) in xs.iter().enumerate() {
            for b in &xs[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::hensel::hensel_sqrt_mod;
use super::padic::{bigint_order, padic_residue, rational_order};
use super::rational::{rational_from_json, rational_to_json};
use super::{big_pow, check_prime, Approximation, FieldDescriptor, ValuedField};
use crate::error::{Error, Result};

/// `ℚ(α)` with `α² = 1 + p`, valued by pulling back `v_p` along `α ↦ s`,
/// where `s ∈ ℤ_p` is the square root of `1 + p` with `s ≡ 1 mod p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticField {
    p: u64,
}

/// `a + b·α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub a: BigRational,
    pub b: BigRational,
}

impl QuadElem {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        Self {
            a,
            b: BigRational::zero(),
        }
    }
}

impl QuadraticField {
    /// `p` must be an odd prime with `1 + p` not a square, which excludes `p = 3`.
    pub fn new(p: u64) -> Result<Self> {
        check_prime(p)?;
        if p == 2 {
            return Err(Error::InvalidField(
                "quadratic extension needs an odd prime".into(),
            ));
        }
        if p == 3 {
            return Err(Error::InvalidField(
                "1 + 3 = 4 is a square; Q(a) would not be a field".into(),
            ));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `α² = d`.
    pub fn radicand(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.p + 1))
    }

    pub fn alpha(&self) -> QuadElem {
        QuadElem::new(BigRational::zero(), BigRational::one())
    }

    pub fn elem(&self, a: BigRational, b: BigRational) -> QuadElem {
        QuadElem::new(a, b)
    }

    pub fn int_elem(&self, a: i64, b: i64) -> QuadElem {
        QuadElem::new(
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
        )
    }

    pub fn conj(&self, x: &QuadElem) -> QuadElem {
        QuadElem::new(x.a.clone(), -&x.b)
    }

    /// `a² − (1+p)·b²`, the product of `x` and its conjugate.
    pub fn norm(&self, x: &QuadElem) -> BigRational {
        &x.a * &x.a - self.radicand() * &x.b * &x.b
    }

    /// The embedding root `s` modulo `p^m`.
    pub fn root_mod(&self, m: u32) -> BigInt {
        hensel_sqrt_mod(&BigInt::from(self.p + 1), 1, self.p, m).expect("1 + p has a simple root")
    }

    /// `p^k·(a + b·s) mod p^prec` for `k` large enough that `p^k·a`, `p^k·b` are `p`-integral.
    fn scaled_residue(&self, x: &QuadElem, k: u32, prec: u32) -> BigInt {
        let scale = BigRational::from_integer(big_pow(self.p, k));
        let a = padic_residue(&(&x.a * &scale), self.p, prec).expect("scaled to be integral");
        let b = padic_residue(&(&x.b * &scale), self.p, prec).expect("scaled to be integral");
        (a + b * self.root_mod(prec)).mod_floor(&big_pow(self.p, prec))
    }

    fn min_part_order(&self, x: &QuadElem) -> Option<i64> {
        match (rational_order(&x.a, self.p), rational_order(&x.b, self.p)) {
            (Some(u), Some(w)) => Some(u.min(w)),
            (u, w) => u.or(w),
        }
    }
}

impl ValuedField for QuadraticField {
    type Elem = QuadElem;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Quadratic { p: self.p }
    }

    fn zero(&self) -> QuadElem {
        QuadElem::rational(BigRational::zero())
    }

    fn one(&self) -> QuadElem {
        QuadElem::rational(BigRational::one())
    }

    fn from_i64(&self, n: i64) -> QuadElem {
        QuadElem::rational(BigRational::from_integer(n.into()))
    }

    fn uniformizer(&self) -> QuadElem {
        QuadElem::rational(BigRational::from_integer(self.p.into()))
    }

    fn is_zero(&self, x: &QuadElem) -> bool {
        x.a.is_zero() && x.b.is_zero()
    }

    fn add(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        QuadElem::new(&x.a + &y.a, &x.b + &y.b)
    }

    fn neg(&self, x: &QuadElem) -> QuadElem {
        QuadElem::new(-&x.a, -&x.b)
    }

    fn sub(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        QuadElem::new(&x.a - &y.a, &x.b - &y.b)
    }

    fn mul(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        QuadElem::new(
            &x.a * &y.a + self.radicand() * &x.b * &y.b,
            &x.a * &y.b + &x.b * &y.a,
        )
    }

    fn inv(&self, x: &QuadElem) -> Result<QuadElem> {
        if self.is_zero(x) {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm(x);
        Ok(QuadElem::new(&x.a / &n, -&x.b / &n))
    }

    /// The norm bounds the answer: `v(x) + v(x̄) = v(N(x))` and both terms are
    /// at least `m = min(v(a), v(b))`, so `v(x) ≤ v(N(x)) − m` and a finite
    /// expansion of `a + b·s` to that precision exposes the first nonzero digit.
    fn order(&self, x: &QuadElem) -> Option<i64> {
        let m = self.min_part_order(x)?;
        if x.b.is_zero() || x.a.is_zero() {
            return Some(m);
        }
        let bound = rational_order(&self.norm(x), self.p).expect("nonzero norm");
        let k = (-m).max(0);
        let prec = (bound - m + k + 1) as u32;
        let residue = self.scaled_residue(x, k as u32, prec);
        let v = bigint_order(&residue, self.p).expect("norm bound guarantees a nonzero digit");
        Some(v - k)
    }

    fn expand(&self, x: &QuadElem, n: usize) -> Result<Approximation> {
        if n == 0 {
            return Err(Error::ZeroPrecision);
        }
        let Some(v) = self.order(x) else {
            return Ok(Approximation::zero(self.p, n));
        };
        let m = self.min_part_order(x).expect("nonzero");
        let k = (-m).max(0);
        let start = (v + k) as u32;
        let residue = self.scaled_residue(x, k as u32, start + n as u32);
        let window = residue / big_pow(self.p, start);
        Ok(Approximation::from_residue(self.p, v, &window, n))
    }

    /// `a + b·α` with integer `|a|, |b| ≤ min(height, 6)`.
    fn small_elements(&self, height: u32) -> Vec<QuadElem> {
        let h = height.clamp(1, 6) as i64;
        let mut out = Vec::new();
        for a in -h..=h {
            for b in -h..=h {
                out.push(self.int_elem(a, b));
            }
        }
        out
    }

    fn elem_to_json(&self, x: &QuadElem) -> Value {
        json!({"a": rational_to_json(&x.a), "b": rational_to_json(&x.b)})
    }

    /// `{"a":rat,"b":rat}` or a bare rational (an element of the base field).
    fn parse_payload(&self, v: &Value) -> Result<QuadElem> {
        match v {
            Value::Object(obj) => {
                let part = |key: &str| match obj.get(key) {
                    Some(x) => rational_from_json(x),
                    None => Ok(BigRational::zero()),
                };
                Ok(QuadElem::new(part("a")?, part("b")?))
            }
            Value::String(s) if s == "alpha" => Ok(self.alpha()),
            other => Ok(QuadElem::rational(rational_from_json(other)?)),
        }
    }

    fn format_elem(&self, x: &QuadElem) -> String {
        format!("{} + ({})a", x.a, x.b)
    }
}

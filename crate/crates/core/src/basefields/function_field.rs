use serde_json::{json, Value};

use super::poly::{inv_mod, FpPoly};
use super::{check_prime, Approximation, FieldDescriptor, ValuedField};
use crate::error::{Error, Result};

/// `𝔽_p(t)` with the `t`-adic valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionField {
    p: u64,
}

/// A reduced fraction of polynomials with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: FpPoly,
    den: FpPoly,
}

impl RationalFunction {
    pub fn num(&self) -> &FpPoly {
        &self.num
    }

    pub fn den(&self) -> &FpPoly {
        &self.den
    }
}

impl FunctionField {
    pub fn new(p: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn fraction(&self, num: FpPoly, den: FpPoly) -> Result<RationalFunction> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.reduce(num, den))
    }

    pub fn poly(&self, coeffs: &[i64]) -> RationalFunction {
        self.reduce(
            FpPoly::from_signed(coeffs, self.p),
            FpPoly::constant(1, self.p),
        )
    }

    fn reduce(&self, num: FpPoly, den: FpPoly) -> RationalFunction {
        let p = self.p;
        if num.is_zero() {
            return RationalFunction {
                num,
                den: FpPoly::constant(1, p),
            };
        }
        let g = num.gcd(&den, p);
        let (num, _) = num.div_rem(&g, p);
        let (den, _) = den.div_rem(&g, p);
        let lead = inv_mod(den.leading(), p);
        RationalFunction {
            num: num.scale(lead, p),
            den: den.scale(lead, p),
        }
    }

    fn poly_from_json(&self, v: &Value) -> Result<FpPoly> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::Json(format!("polynomial must be a coefficient array: {v}")))?;
        let coeffs = items
            .iter()
            .map(|c| {
                c.as_i64()
                    .ok_or_else(|| Error::Json(format!("coefficient is not an integer: {c}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FpPoly::from_signed(&coeffs, self.p))
    }
}

impl ValuedField for FunctionField {
    type Elem = RationalFunction;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::FunctionField { p: self.p }
    }

    fn zero(&self) -> RationalFunction {
        self.poly(&[])
    }

    fn one(&self) -> RationalFunction {
        self.poly(&[1])
    }

    fn from_i64(&self, n: i64) -> RationalFunction {
        self.poly(&[n])
    }

    fn uniformizer(&self) -> RationalFunction {
        self.poly(&[0, 1])
    }

    fn is_zero(&self, x: &RationalFunction) -> bool {
        x.num.is_zero()
    }

    fn add(&self, x: &RationalFunction, y: &RationalFunction) -> RationalFunction {
        let p = self.p;
        let num = x.num.mul(&y.den, p).add(&y.num.mul(&x.den, p), p);
        self.reduce(num, x.den.mul(&y.den, p))
    }

    fn neg(&self, x: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: x.num.neg(self.p),
            den: x.den.clone(),
        }
    }

    fn mul(&self, x: &RationalFunction, y: &RationalFunction) -> RationalFunction {
        let p = self.p;
        self.reduce(x.num.mul(&y.num, p), x.den.mul(&y.den, p))
    }

    fn inv(&self, x: &RationalFunction) -> Result<RationalFunction> {
        if x.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.reduce(x.den.clone(), x.num.clone()))
    }

    fn order(&self, x: &RationalFunction) -> Option<i64> {
        let n = x.num.trailing_zeros()? as i64;
        let d = x.den.trailing_zeros().expect("denominator is nonzero") as i64;
        Some(n - d)
    }

    /// Laurent expansion by power-series long division.
    fn expand(&self, x: &RationalFunction, n: usize) -> Result<Approximation> {
        if n == 0 {
            return Err(Error::ZeroPrecision);
        }
        let Some(v) = self.order(x) else {
            return Ok(Approximation::zero(self.p, n));
        };
        let num = x.num.shift_down(x.num.trailing_zeros().unwrap());
        let den = x.den.shift_down(x.den.trailing_zeros().unwrap());
        Ok(Approximation {
            p: self.p,
            shift: v,
            digits: num.series_div(&den, n, self.p),
        })
    }

    /// Polynomials of degree below `height` (capped at 3), and their quotients by `t`.
    fn small_elements(&self, height: u32) -> Vec<RationalFunction> {
        let p = self.p;
        let degree = height.clamp(1, 3) as usize;
        let count = (p as usize).pow(degree as u32);
        let t = self.uniformizer();
        let mut out = Vec::with_capacity(2 * count);
        for code in 0..count {
            let mut c = code;
            let coeffs: Vec<u64> = (0..degree)
                .map(|_| {
                    let d = (c % p as usize) as u64;
                    c /= p as usize;
                    d
                })
                .collect();
            let f = self.reduce(FpPoly::new(coeffs, p), FpPoly::constant(1, p));
            if !f.num.is_zero() && f.num.coeff(0) != 0 {
                out.push(self.reduce(f.num.clone(), t.num.clone()));
            }
            out.push(f);
        }
        out
    }

    fn elem_to_json(&self, x: &RationalFunction) -> Value {
        json!({"num": x.num.coeffs(), "den": x.den.coeffs()})
    }

    /// `{"num":[..],"den":[..]}` or a bare coefficient array.
    fn parse_payload(&self, v: &Value) -> Result<RationalFunction> {
        match v {
            Value::Array(_) => {
                Ok(self.reduce(self.poly_from_json(v)?, FpPoly::constant(1, self.p)))
            }
            Value::Object(obj) => {
                let num = obj
                    .get("num")
                    .ok_or_else(|| Error::Json("rational function without \"num\"".into()))?;
                let num = self.poly_from_json(num)?;
                let den = match obj.get("den") {
                    Some(d) => self.poly_from_json(d)?,
                    None => FpPoly::constant(1, self.p),
                };
                if den.is_zero() {
                    return Err(Error::Json("zero denominator".into()));
                }
                Ok(self.reduce(num, den))
            }
            Value::Number(n) => n
                .as_i64()
                .map(|n| self.from_i64(n))
                .ok_or_else(|| Error::Json(format!("not an integer: {n}"))),
            other => Err(Error::Json(format!("not a rational function: {other}"))),
        }
    }

    fn format_elem(&self, x: &RationalFunction) -> String {
        if x.den.degree() == Some(0) {
            x.num.to_string()
        } else {
            format!("({})/({})", x.num, x.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oag::ExtendedValue;

    #[test]
    fn product_example() {
        let k = FunctionField::new(5).unwrap();
        let prod = k.mul(&k.poly(&[1, 1]), &k.poly(&[-1, 1]));
        assert_eq!(prod, k.poly(&[4, 0, 1]));
        assert_eq!(k.format_elem(&prod), "t^2+4");
    }

    #[test]
    fn canonical_zero_and_reduction() {
        let k = FunctionField::new(5).unwrap();
        let a = k.poly(&[1, 1]);
        assert_eq!(k.sub(&a, &a), k.zero());
        let f = k
            .fraction(
                FpPoly::from_signed(&[2, 2], 5),
                FpPoly::from_signed(&[3, 3], 5),
            )
            .unwrap();
        assert_eq!(f, k.from_i64(4)); // 2/3 = 4 in F_5
        assert!(k.fraction(k.one().num, FpPoly::zero()).is_err());
    }

    #[test]
    fn valuation_and_expansion() {
        let k = FunctionField::new(5).unwrap();
        let x = k.mul(&k.poly(&[0, 0, 3]), &k.inv(&k.poly(&[1, -1])).unwrap());
        assert_eq!(k.valuation(&x), ExtendedValue::int(2));
        let a = k.expand(&x, 4).unwrap();
        assert_eq!((a.shift, a.digits.clone()), (2, vec![3, 3, 3, 3]));
        assert_eq!(k.valuation(&k.sub(&x, &k.resum(&a))), ExtendedValue::int(6));
        let y = k.inv(&k.poly(&[0, 2])).unwrap();
        assert_eq!(k.valuation(&y), ExtendedValue::int(-1));
        assert_eq!(k.expand(&y, 2).unwrap().digits, vec![3, 0]);
    }

    #[test]
    fn json_payloads() {
        let k = FunctionField::new(5).unwrap();
        let x = k
            .parse_payload(&json!({"num": [0, 1], "den": [1, 1]}))
            .unwrap();
        assert_eq!(k.elem_to_json(&x), json!({"num": [0, 1], "den": [1, 1]}));
        assert_eq!(
            k.parse_payload(&json!([4, 0, 1])).unwrap(),
            k.poly(&[-1, 0, 1])
        );
        assert!(k.parse_payload(&json!({"num": [1], "den": []})).is_err());
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::big_pow;
use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `v_p(n)`, or `None` for `n = 0`.
pub fn bigint_order(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let base = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&base);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

pub fn rational_order(q: &BigRational, p: u64) -> Option<i64> {
    let num = bigint_order(q.numer(), p)?;
    let den = bigint_order(q.denom(), p).expect("denominator is nonzero");
    Some(num - den)
}

/// Splits `n = p^v · u` with `p ∤ u`.
pub(crate) fn split_power(n: &BigInt, p: u64) -> (i64, BigInt) {
    let base = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    while !m.is_zero() {
        let (q, r) = m.div_rem(&base);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1;
    }
    (v, m)
}

pub(crate) fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(modulus).extended_gcd(modulus);
    if e.gcd != BigInt::from(1) {
        return None;
    }
    Some(e.x.mod_floor(modulus))
}

/// The residue of a `p`-integral rational modulo `p^prec`, in `[0, p^prec)`.
pub fn padic_residue(q: &BigRational, p: u64, prec: u32) -> Result<BigInt> {
    let modulus = big_pow(p, prec);
    if q.is_zero() || prec == 0 {
        return Ok(BigInt::zero());
    }
    let (dv, du) = split_power(q.denom(), p);
    let (nv, nu) = split_power(q.numer(), p);
    if nv < dv {
        return Err(Error::InvalidField(format!(
            "{q} is not {p}-integral (valuation {})",
            nv - dv
        )));
    }
    let shift = (nv - dv) as u32;
    if shift >= prec {
        return Ok(BigInt::zero());
    }
    let inv = mod_inverse(&du, &modulus).expect("unit part is invertible");
    let scaled = nu * big_pow(p, shift);
    Ok((scaled * inv).mod_floor(&modulus))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn orders() {
        assert_eq!(rational_order(&rat(50, 1), 5), Some(2));
        assert_eq!(rational_order(&rat(3, 10), 5), Some(-1));
        assert_eq!(rational_order(&rat(0, 1), 5), None);
        assert_eq!(bigint_order(&BigInt::from(-375), 5), Some(3));
    }

    #[test]
    fn residues() {
        // 1/3 ≡ 417 mod 625
        assert_eq!(padic_residue(&rat(1, 3), 5, 4).unwrap(), BigInt::from(417));
        assert_eq!(padic_residue(&rat(-1, 1), 5, 2).unwrap(), BigInt::from(24));
        assert_eq!(padic_residue(&rat(50, 3), 5, 2).unwrap(), BigInt::zero());
        assert!(padic_residue(&rat(1, 5), 5, 2).is_err());
    }
}

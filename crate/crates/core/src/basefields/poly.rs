//! Dense univariate polynomials over `𝔽_p`.

use std::fmt;

/// Coefficients little-endian, without trailing zeros; the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FpPoly {
    coeffs: Vec<u64>,
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a ≠ 0 mod p
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    result
}

impl FpPoly {
    pub fn new(mut coeffs: Vec<u64>, p: u64) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        let mut poly = Self { coeffs };
        poly.trim();
        poly
    }

    /// Builds from signed coefficients, reducing mod `p`.
    pub fn from_signed(coeffs: &[i64], p: u64) -> Self {
        let pi = p as i128;
        Self::new(
            coeffs
                .iter()
                .map(|&c| (c as i128).rem_euclid(pi) as u64)
                .collect(),
            p,
        )
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: u64, p: u64) -> Self {
        Self::new(vec![c], p)
    }

    pub fn monomial(c: u64, degree: usize, p: u64) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs, p)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Multiplicity of `t` as a factor.
    pub fn trailing_zeros(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn shift_down(&self, k: usize) -> Self {
        Self {
            coeffs: self.coeffs.iter().skip(k).copied().collect(),
        }
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    pub fn add(&self, other: &Self, p: u64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| (self.coeff(i) + other.coeff(i)) % p)
                .collect(),
            p,
        )
    }

    pub fn neg(&self, p: u64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| (p - c) % p).collect(), p)
    }

    pub fn sub(&self, other: &Self, p: u64) -> Self {
        self.add(&other.neg(p), p)
    }

    pub fn scale(&self, c: u64, p: u64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| mul_mod(a, c, p)).collect(), p)
    }

    pub fn mul(&self, other: &Self, p: u64) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        Self::new(out, p)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self, p: u64) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = inv_mod(divisor.leading(), p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = *rem.last().unwrap();
            let k = rem.len() - 1 - dd;
            if top != 0 {
                let f = mul_mod(top, lead_inv, p);
                quot[k] = f;
                for (j, &b) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = (rem[k + j] + p - mul_mod(f, b, p)) % p;
                }
            }
            rem.pop();
        }
        (Self::new(quot, p), Self::new(rem, p))
    }

    pub fn monic(&self, p: u64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(inv_mod(self.leading(), p), p)
    }

    pub fn gcd(&self, other: &Self, p: u64) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b, p);
            a = b;
            b = r;
        }
        a.monic(p)
    }

    /// Truncated power-series quotient `self / divisor mod t^n`; needs `divisor(0) ≠ 0`.
    pub fn series_div(&self, divisor: &Self, n: usize, p: u64) -> Vec<u64> {
        let c0_inv = inv_mod(divisor.coeff(0), p);
        let mut rem: Vec<u64> = (0..n).map(|i| self.coeff(i)).collect();
        let mut out = vec![0u64; n];
        for i in 0..n {
            let q = mul_mod(rem[i], c0_inv, p);
            out[i] = q;
            if q == 0 {
                continue;
            }
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                rem[i + j] = (rem[i + j] + p - mul_mod(q, b, p)) % p;
            }
        }
        out
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}t^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_mod_five() {
        let a = FpPoly::from_signed(&[1, 1], 5);
        let b = FpPoly::from_signed(&[-1, 1], 5);
        assert_eq!(a.mul(&b, 5), FpPoly::new(vec![4, 0, 1], 5));
        assert_eq!(a.mul(&b, 5).to_string(), "t^2+4");
    }

    #[test]
    fn division_and_gcd() {
        let p = 7;
        let a = FpPoly::from_signed(&[1, 2, 3, 4], p);
        let b = FpPoly::from_signed(&[5, 0, 1], p);
        let (q, r) = a.div_rem(&b, p);
        assert_eq!(q.mul(&b, p).add(&r, p), a);
        assert!(r.degree().unwrap_or(0) < 2);

        let common = FpPoly::from_signed(&[3, 1], p);
        let g = a.mul(&common, p).gcd(&b.mul(&common, p), p);
        assert_eq!(g, common.monic(p));
    }

    #[test]
    fn series_quotient() {
        // 1/(1 - t) = 1 + t + t^2 + ...
        let p = 5;
        let one = FpPoly::constant(1, p);
        let d = FpPoly::from_signed(&[1, -1], p);
        assert_eq!(one.series_div(&d, 4, p), vec![1, 1, 1, 1]);
    }
}

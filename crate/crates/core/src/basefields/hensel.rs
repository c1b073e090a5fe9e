use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::padic::{mod_inverse, padic_residue};
use super::{big_pow, check_prime, Approximation};
use crate::error::{Error, Result};

/// The square root of `c` modulo `p^m` congruent to `seed` mod `p`, by Newton iteration.
///
/// `c` is taken modulo `p^m`; needs `p` odd, `seed² ≡ c` and `seed ≢ 0` mod `p`.
pub fn hensel_sqrt_mod(c: &BigInt, seed: u64, p: u64, m: u32) -> Result<BigInt> {
    check_prime(p).map_err(|e| Error::Hensel(e.to_string()))?;
    if p == 2 {
        return Err(Error::Hensel("p = 2 has no simple square roots".into()));
    }
    let bp = BigInt::from(p);
    let seed = BigInt::from(seed).mod_floor(&bp);
    if seed.is_zero() {
        return Err(Error::Hensel("seed is divisible by p".into()));
    }
    if (&seed * &seed - c).mod_floor(&bp) != BigInt::zero() {
        return Err(Error::Hensel(format!(
            "seed {seed} is not a root of {c} mod {p}"
        )));
    }
    if m == 0 {
        return Ok(BigInt::zero());
    }
    let mut root = seed;
    let mut k = 1u32;
    while k < m {
        k = (2 * k).min(m);
        let modulus = big_pow(p, k);
        let f = (&root * &root - c).mod_floor(&modulus);
        let df =
            mod_inverse(&(BigInt::from(2) * &root), &modulus).expect("2·root is a unit for odd p");
        root = (&root - f * df).mod_floor(&modulus);
    }
    let modulus = big_pow(p, m);
    debug_assert!((&root * &root - c).mod_floor(&modulus).is_zero());
    Ok(root)
}

/// Digits of the square root of the `p`-adic unit `c` congruent to `seed`, to `n` digits.
pub fn hensel_sqrt(c: &BigRational, seed: u64, p: u64, n: usize) -> Result<Approximation> {
    if n == 0 {
        return Err(Error::ZeroPrecision);
    }
    let residue = padic_residue(c, p, n as u32).map_err(|e| Error::Hensel(e.to_string()))?;
    if (&residue % BigInt::from(p)).is_zero() {
        return Err(Error::Hensel(format!("{c} is not a {p}-adic unit")));
    }
    let root = hensel_sqrt_mod(&residue, seed, p, n as u32)?;
    let modulus = big_pow(p, n as u32);
    if (&root * &root - &residue).mod_floor(&modulus) != BigInt::zero() {
        return Err(Error::Hensel("lifted root fails the squaring check".into()));
    }
    Ok(Approximation::from_residue(p, 0, &root, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn sqrt_six_mod_powers_of_five() {
        let a = hensel_sqrt(&int(6), 1, 5, 3).unwrap();
        assert_eq!(a.digits, vec![1, 3, 0]);
        assert_eq!(a.mantissa(), BigInt::from(16));
        let b = hensel_sqrt(&int(6), 4, 5, 2).unwrap();
        assert_eq!(b.digits, vec![4, 1]);
        assert_eq!(b.mantissa(), BigInt::from(9));
    }

    #[test]
    fn exact_root() {
        let a = hensel_sqrt(&int(1), 1, 7, 6).unwrap();
        assert_eq!(a.digits, vec![1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(hensel_sqrt(&int(6), 2, 5, 3).is_err());
        assert!(hensel_sqrt(&int(1), 1, 2, 3).is_err());
        assert!(hensel_sqrt(&int(5), 0, 5, 3).is_err());
        assert!(hensel_sqrt(&int(6), 1, 5, 0).is_err());
    }

    #[test]
    fn rational_square() {
        // (1/3)^2 = 1/9; the root ≡ 1/3 ≡ 2 mod 5
        let a = hensel_sqrt(&BigRational::new(1.into(), 9.into()), 2, 5, 8).unwrap();
        let third = padic_residue(&BigRational::new(1.into(), 3.into()), 5, 8).unwrap();
        assert_eq!(a.mantissa(), third);
    }
}

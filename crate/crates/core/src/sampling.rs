//! Seeded random elements for the law suites.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basefields::{
    FpPoly, FunctionField, QuadElem, QuadraticField, RationalField, ValuedField,
};

/// The generator behind every seeded run; stable across platforms.
pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random elements of bounded height.
///
/// What "height" bounds depends on the field: numerator and denominator
/// for rationals, degrees for rational functions.
pub trait SampleField: ValuedField {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, height: u64) -> Self::Elem;

    fn sample_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, height: u64) -> Self::Elem {
        loop {
            let x = self.sample(rng, height);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }

    /// A nonzero element of valuation `≥ 0`.
    fn sample_integral<R: Rng + ?Sized>(&self, rng: &mut R, height: u64) -> Self::Elem {
        loop {
            let x = self.sample_nonzero(rng, height);
            if self.order(&x).is_some_and(|v| v >= 0) {
                return x;
            }
        }
    }

    /// A nonzero element with `π^shift` mixed in, to spread valuations.
    fn sample_spread<R: Rng + ?Sized>(&self, rng: &mut R, height: u64, spread: i64) -> Self::Elem {
        let x = self.sample_nonzero(rng, height);
        let e = rng.gen_range(-spread..=spread);
        self.mul(&x, &self.pow_uniformizer(e))
    }
}

fn random_rational<R: Rng + ?Sized>(rng: &mut R, height: u64) -> BigRational {
    let h = height.max(1) as i64;
    let n = rng.gen_range(-h..=h);
    let d = rng.gen_range(1..=h);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl SampleField for RationalField {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, height: u64) -> BigRational {
        random_rational(rng, height)
    }
}

impl SampleField for FunctionField {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, height: u64) -> Self::Elem {
        let p = self.p();
        let poly = |rng: &mut R| {
            let deg = rng.gen_range(0..=height as usize);
            FpPoly::new((0..=deg).map(|_| rng.gen_range(0..p)).collect(), p)
        };
        let num = poly(rng);
        let den = loop {
            let d = poly(rng);
            if !d.is_zero() {
                break d;
            }
        };
        self.fraction(num, den).expect("nonzero denominator")
    }
}

impl SampleField for QuadraticField {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, height: u64) -> QuadElem {
        QuadElem::new(random_rational(rng, height), random_rational(rng, height))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_runs_repeat() {
        let q = RationalField::new(3).unwrap();
        let mut r = rng(9);
        let a: Vec<_> = (0..5).map(|_| q.sample(&mut r, 100)).collect();
        let mut r = rng(9);
        let b: Vec<_> = (0..5).map(|_| q.sample(&mut r, 100)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn integral_samples_are_integral() {
        let k = FunctionField::new(5).unwrap();
        let mut r = rng(1);
        for _ in 0..50 {
            let x = k.sample_integral(&mut r, 4);
            assert!(k.order(&x).unwrap() >= 0);
        }
    }
}

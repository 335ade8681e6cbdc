//! Exact scalar arithmetic: arbitrary-precision rationals, real quadratic
//! extensions Q(sqrt(D)), and integer polynomials with bounded-degree
//! factorization.
//!
//! `Rational` is `num_rational::BigRational`, which keeps fractions reduced
//! with a positive denominator — exactly the invariants required here.

mod quad;
mod intpoly;

pub use quad::{quad_arith, QuadExt, QuadOp};
pub use intpoly::{factor_int_poly, integer_roots, Factorization, IntPoly};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational n/d.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer square root test: returns `Some(r)` with `r*r == n` when `n` is a
/// perfect square, `None` otherwise.
pub fn perfect_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Trial-division bound used by `squarefree_decompose` before falling back to
/// a perfect-square test on the remaining cofactor.
const TRIAL_BOUND: u64 = 1_000_000;

/// Decompose a positive integer as `n = s * f^2` with `s` squarefree.
///
/// Works by trial division up to `min(sqrt(n), 10^6)`. After all small prime
/// factors are removed, the remaining cofactor is either 1, a prime, a product
/// of two distinct primes, or a prime square — except for cofactors above
/// 10^18 which could in principle hide a square of a prime > 10^6 times
/// another prime. Those are treated as squarefree; every radicand appearing
/// in practice is far below any problematic range or is certified by the
/// perfect-square test.
pub fn squarefree_decompose(n: &BigInt) -> Result<(BigInt, BigInt)> {
    if !n.is_positive() {
        return Err(Error::domain(format!("squarefree_decompose: n = {n} must be >= 1")));
    }
    let mut m = n.clone();
    let mut s = BigInt::one();
    let mut f = BigInt::one();
    let mut p: u64 = 2;
    while p <= TRIAL_BOUND {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        if m.is_multiple_of(&pb) {
            let mut e = 0u32;
            while m.is_multiple_of(&pb) {
                m /= &pb;
                e += 1;
            }
            if e % 2 == 1 {
                s *= &pb;
            }
            f *= pb.pow(e / 2);
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    if !m.is_one() {
        if let Some(r) = perfect_sqrt(&m) {
            f *= r;
        } else {
            // Cofactor has no prime factor <= 10^6 and is not a square:
            // squarefree for every value this engine encounters.
            s *= &m;
        }
    }
    Ok((s, f))
}

/// Squarefree decomposition for radicands that must fit in a `u128`.
pub fn squarefree_u128(m: u128) -> Result<(u128, BigInt)> {
    let (s, f) = squarefree_decompose(&BigInt::from(m))?;
    let s: u128 = s
        .try_into()
        .map_err(|_| Error::domain("radicand exceeds u128 range"))?;
    Ok((s, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: plain trial division all the way up to sqrt(n).
    fn squarefree_oracle(n: u64) -> (u64, u64) {
        let mut m = n;
        let mut s = 1u64;
        let mut f = 1u64;
        let mut p = 2u64;
        while p * p <= m {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e % 2 == 1 {
                s *= p;
            }
            f *= p.pow(e / 2);
            p += 1;
        }
        (s * m, f)
    }

    #[test]
    fn squarefree_identity_case() {
        let (s, f) = squarefree_decompose(&BigInt::from(1)).unwrap();
        assert_eq!((s, f), (BigInt::one(), BigInt::one()));
    }

    #[test]
    fn squarefree_twelve() {
        let (s, f) = squarefree_decompose(&BigInt::from(12)).unwrap();
        assert_eq!((s, f), (BigInt::from(3), BigInt::from(2)));
    }

    #[test]
    fn squarefree_matches_oracle() {
        for n in [144169u64, 18209, 51349, 18295489, 2356201, 63737521, 987507049, 360, 48, 9801] {
            let (s, f) = squarefree_decompose(&BigInt::from(n)).unwrap();
            let (so, fo) = squarefree_oracle(n);
            assert_eq!(s, BigInt::from(so), "squarefree part of {n}");
            assert_eq!(f, BigInt::from(fo), "square part of {n}");
            assert_eq!(&s * &f * &f, BigInt::from(n));
        }
    }

    #[test]
    fn squarefree_rejects_nonpositive() {
        assert!(squarefree_decompose(&BigInt::from(0)).is_err());
        assert!(squarefree_decompose(&BigInt::from(-5)).is_err());
    }
}

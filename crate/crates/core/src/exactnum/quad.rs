//! Elements of real quadratic fields: a + b*sqrt(D) with a, b rational and
//! D a squarefree positive integer. D = 1 marks a pure rational.
//!
//! Radicands are canonicalized to squarefree form on construction, so field
//! equality is decidable by comparing D. Arithmetic between two elements is
//! defined when their radicands match or one of them is rational (D = 1);
//! anything else is a field mismatch.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::{squarefree_u128, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct QuadExt {
    rat: Rational,
    irr: Rational,
    d: u128,
}

/// Arithmetic operation selector for [`quad_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl QuadExt {
    /// Canonical constructor: folds a zero irrational part to radicand 1 and
    /// rejects radicands that are not positive. `d` must already be
    /// squarefree; use [`QuadExt::sqrt`] to build sqrt(m) for arbitrary m.
    pub fn new(rat: Rational, irr: Rational, d: u128) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("radicand must be positive"));
        }
        if irr.is_zero() || d == 1 {
            // sqrt(1) = 1 collapses into the rational part.
            let rat = if d == 1 && !irr.is_zero() { rat + irr } else { rat };
            return Ok(QuadExt { rat, irr: Rational::zero(), d: 1 });
        }
        Ok(QuadExt { rat, irr, d })
    }

    pub fn from_rational(r: Rational) -> Self {
        QuadExt { rat: r, irr: Rational::zero(), d: 1 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(super::rat(n))
    }

    /// sqrt(m) for a positive integer m, canonicalized: sqrt(12) = 2*sqrt(3).
    pub fn sqrt(m: u128) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("sqrt of 0 not a field generator"));
        }
        let (s, f) = squarefree_u128(m)?;
        let f = Rational::from_integer(f);
        if s == 1 {
            Ok(QuadExt { rat: f, irr: Rational::zero(), d: 1 })
        } else {
            Ok(QuadExt { rat: Rational::zero(), irr: f, d: s })
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.d == 1
    }

    pub fn rat_part(&self) -> &Rational {
        &self.rat
    }

    pub fn irr_part(&self) -> &Rational {
        &self.irr
    }

    /// The squarefree radicand; 1 for pure rationals.
    pub fn radicand(&self) -> u128 {
        self.d
    }

    /// As a rational, if the element is one.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.d == 1 { Some(self.rat.clone()) } else { None }
    }

    /// Galois conjugate a + b*sqrt(D) -> a - b*sqrt(D).
    pub fn conjugate(&self) -> Self {
        QuadExt { rat: self.rat.clone(), irr: -self.irr.clone(), d: self.d }
    }

    /// Field norm a^2 - D*b^2 (a rational number).
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat - Rational::from_integer(BigInt::from(self.d)) * &self.irr * &self.irr
    }

    /// Rational trace 2a.
    pub fn trace(&self) -> Rational {
        &self.rat + &self.rat
    }

    /// Unify radicands: equal, or one side rational. Returns the common
    /// radicand or a field mismatch error.
    fn unify(&self, rhs: &Self) -> Result<u128> {
        match (self.d, rhs.d) {
            (a, b) if a == b => Ok(a),
            (1, b) => Ok(b),
            (a, 1) => Ok(a),
            (a, b) => Err(Error::FieldMismatch(a, b)),
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        let d = self.unify(rhs)?;
        QuadExt::new(&self.rat + &rhs.rat, &self.irr + &rhs.irr, d)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        let d = self.unify(rhs)?;
        QuadExt::new(&self.rat - &rhs.rat, &self.irr - &rhs.irr, d)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let d = self.unify(rhs)?;
        let dd = Rational::from_integer(BigInt::from(d));
        let rat = &self.rat * &rhs.rat + &dd * &self.irr * &rhs.irr;
        let irr = &self.rat * &rhs.irr + &self.irr * &rhs.rat;
        QuadExt::new(rat, irr, d)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.unify(rhs)?;
        // x / y = x * conj(y) / norm(y)
        let n = rhs.norm();
        let conj = rhs.conjugate();
        let prod = self.checked_mul(&QuadExt { rat: conj.rat, irr: conj.irr, d })?;
        QuadExt::new(prod.rat / &n, prod.irr / &n, d)
    }

    pub fn checked_neg(&self) -> Self {
        QuadExt { rat: -self.rat.clone(), irr: -self.irr.clone(), d: self.d }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QuadExt { rat: &self.rat * c, irr: &self.irr * c, d: if self.irr.is_zero() { 1 } else { self.d } }
    }
}

/// The spec-level entry point: exact arithmetic with explicit error paths.
pub fn quad_arith(a: &QuadExt, b: &QuadExt, op: QuadOp) -> Result<QuadExt> {
    match op {
        QuadOp::Add => a.checked_add(b),
        QuadOp::Sub => a.checked_sub(b),
        QuadOp::Mul => a.checked_mul(b),
        QuadOp::Div => a.checked_div(b),
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr.is_zero() {
            return write!(f, "{}", self.rat);
        }
        if !self.rat.is_zero() {
            write!(f, "{}", self.rat)?;
            if self.irr.is_positive() {
                write!(f, "+")?;
            }
        }
        if self.irr.is_one() {
            write!(f, "sqrt({})", self.d)
        } else if self.irr == -Rational::one() {
            write!(f, "-sqrt({})", self.d)
        } else {
            write!(f, "{}*sqrt({})", self.irr, self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use proptest::prelude::*;

    fn q(a: i64, b: i64, d: u128) -> QuadExt {
        QuadExt::new(rat(a), rat(b), d).unwrap()
    }

    #[test]
    fn additive_identity() {
        let x = q(3, 7, 5);
        let z = QuadExt::zero();
        assert_eq!(quad_arith(&z, &x, QuadOp::Add).unwrap(), x);
    }

    #[test]
    fn norm_form_is_rational() {
        // (a + b sqrt(D)) (a - b sqrt(D)) = a^2 - D b^2
        let x = q(540, 12, 144169);
        let p = quad_arith(&x, &x.conjugate(), QuadOp::Mul).unwrap();
        assert!(p.is_rational());
        // 540^2 - 144*144169 = -20468736
        assert_eq!(p.to_rational().unwrap(), rat(291600 - 144 * 144169));
        assert_eq!(x.norm(), rat(-20468736));
    }

    #[test]
    fn sqrt_canonicalizes() {
        let s12 = QuadExt::sqrt(12).unwrap();
        assert_eq!(s12, q(0, 2, 3));
        let s144 = QuadExt::sqrt(144).unwrap();
        assert!(s144.is_rational());
        assert_eq!(s144.to_rational().unwrap(), rat(12));
    }

    #[test]
    fn mismatched_fields_rejected() {
        let a = q(1, 1, 2);
        let b = q(1, 1, 3);
        assert!(matches!(quad_arith(&a, &b, QuadOp::Add), Err(Error::FieldMismatch(2, 3))));
    }

    #[test]
    fn division_by_zero_rejected() {
        let a = q(1, 1, 2);
        assert!(matches!(quad_arith(&a, &QuadExt::zero(), QuadOp::Div), Err(Error::DivisionByZero)));
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = q(3, -2, 7);
        let b = q(-5, 4, 7);
        let p = quad_arith(&a, &b, QuadOp::Mul).unwrap();
        assert_eq!(quad_arith(&p, &b, QuadOp::Div).unwrap(), a);
    }

    #[test]
    fn conjugation_is_ring_homomorphism() {
        let a = q(2, 3, 11);
        let b = q(-1, 5, 11);
        for op in [QuadOp::Add, QuadOp::Sub, QuadOp::Mul] {
            let lhs = quad_arith(&a, &b, op).unwrap().conjugate();
            let rhs = quad_arith(&a.conjugate(), &b.conjugate(), op).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn mul_commutative_associative(
            a1 in -50i64..50, b1 in -50i64..50,
            a2 in -50i64..50, b2 in -50i64..50,
            a3 in -50i64..50, b3 in -50i64..50,
        ) {
            let d = 10u128; // squarefree
            let x = q(a1, b1, d);
            let y = q(a2, b2, d);
            let z = q(a3, b3, d);
            let xy = x.checked_mul(&y).unwrap();
            let yx = y.checked_mul(&x).unwrap();
            prop_assert_eq!(&xy, &yx);
            let xy_z = xy.checked_mul(&z).unwrap();
            let x_yz = x.checked_mul(&y.checked_mul(&z).unwrap()).unwrap();
            prop_assert_eq!(xy_z, x_yz);
        }
    }
}

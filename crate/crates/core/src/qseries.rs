//! Truncated formal power series in q over an exact scalar ring.
//!
//! A `QSeries` knows its coefficients a_0 .. a_{prec-1} and nothing beyond;
//! every operation propagates precision as the minimum of its operands and
//! never fabricates coefficients. Multiplication is the plain truncated
//! Cauchy product.

use std::fmt;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::exactnum::{QuadExt, Rational};

/// Scalar ring interface shared by `Rational` and `QuadExt` coefficients.
///
/// `QuadExt` arithmetic panics on mismatched radicands here; series built
/// through the public constructors keep a single radicand throughout, and
/// fallible scalar arithmetic lives in `exactnum::quad_arith`.
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Exact field division; Err on division by zero.
    fn div(&self, rhs: &Self) -> Result<Self>;
    fn from_i64(v: i64) -> Self;
}

impl Scalar for Rational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        if num_traits::Zero::is_zero(rhs) {
            return Err(Error::DivisionByZero);
        }
        Ok(self / rhs)
    }
    fn from_i64(v: i64) -> Self {
        crate::exactnum::rat(v)
    }
}

impl Scalar for QuadExt {
    fn zero() -> Self {
        QuadExt::zero()
    }
    fn one() -> Self {
        QuadExt::one()
    }
    fn is_zero(&self) -> bool {
        QuadExt::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self.checked_add(rhs).expect("radicand mismatch in series arithmetic")
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.checked_sub(rhs).expect("radicand mismatch in series arithmetic")
    }
    fn neg(&self) -> Self {
        self.checked_neg()
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.checked_mul(rhs).expect("radicand mismatch in series arithmetic")
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        self.checked_div(rhs)
    }
    fn from_i64(v: i64) -> Self {
        QuadExt::from_int(v)
    }
}

#[derive(Clone, PartialEq)]
pub struct QSeries<T: Scalar> {
    coeffs: Vec<T>,
}

pub type RSeries = QSeries<Rational>;
pub type XSeries = QSeries<QuadExt>;

impl<T: Scalar> QSeries<T> {
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one known coefficient");
        QSeries { coeffs }
    }

    pub fn zero(prec: usize) -> Self {
        QSeries { coeffs: vec![T::zero(); prec.max(1)] }
    }

    pub fn constant(c: T, prec: usize) -> Self {
        let mut coeffs = vec![T::zero(); prec.max(1)];
        coeffs[0] = c;
        QSeries { coeffs }
    }

    pub fn one(prec: usize) -> Self {
        Self::constant(T::one(), prec)
    }

    /// The monomial q.
    pub fn q(prec: usize) -> Self {
        assert!(prec >= 2);
        let mut coeffs = vec![T::zero(); prec];
        coeffs[1] = T::one();
        QSeries { coeffs }
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> &T {
        assert!(n < self.prec(), "coefficient {n} beyond precision {}", self.prec());
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, prec: usize) -> Self {
        assert!(prec >= 1 && prec <= self.prec());
        QSeries { coeffs: self.coeffs[..prec].to_vec() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let prec = self.prec().min(rhs.prec());
        let coeffs = (0..prec).map(|i| self.coeffs[i].add(&rhs.coeffs[i])).collect();
        QSeries { coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let prec = self.prec().min(rhs.prec());
        let coeffs = (0..prec).map(|i| self.coeffs[i].sub(&rhs.coeffs[i])).collect();
        QSeries { coeffs }
    }

    pub fn neg(&self) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect() }
    }

    /// Truncated Cauchy product; prec = min of operand precisions.
    pub fn mul(&self, rhs: &Self) -> Self {
        let prec = self.prec().min(rhs.prec());
        let mut out = vec![T::zero(); prec];
        for (i, a) in self.coeffs.iter().enumerate().take(prec) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(prec - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        QSeries { coeffs: out }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.prec());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// q -> q^h substitution: a_n of the output is a_{n/h} when h | n, else 0.
    /// Precision (number of known coefficients) is preserved.
    pub fn substitute(&self, h: usize) -> Result<Self> {
        if h == 0 {
            return Err(Error::domain("substitution exponent must be >= 1"));
        }
        if h == 1 {
            return Ok(self.clone());
        }
        let prec = self.prec();
        let mut out = vec![T::zero(); prec];
        for n in (0..prec).step_by(h) {
            out[n] = self.coeffs[n / h].clone();
        }
        Ok(QSeries { coeffs: out })
    }

    /// Exact division: the result r satisfies self = rhs * r to the available
    /// precision. The divisor may have a zero constant term as long as its
    /// valuation does not exceed the dividend's (valuation shift); any
    /// non-exact step reports the first failing coefficient index.
    pub fn div_exact(&self, rhs: &Self) -> Result<Self> {
        let Some(v) = rhs.valuation() else {
            return Err(Error::DivisionByZero);
        };
        // shift both down by the divisor's valuation
        if let Some(sv) = self.valuation() {
            if sv < v {
                return Err(Error::InexactDivision { index: sv });
            }
        }
        let prec = self.prec().min(rhs.prec());
        if prec <= v && self.is_zero() {
            return Ok(Self::zero(1));
        }
        let out_prec = prec - v;
        let lead = rhs.coeffs[v].clone();
        let mut out: Vec<T> = Vec::with_capacity(out_prec);
        for n in 0..out_prec {
            // self[n+v] = sum_{i=0..n} out[i] * rhs[n-i+v]
            let mut acc = if n + v < self.prec() { self.coeffs[n + v].clone() } else { T::zero() };
            for (i, o) in out.iter().enumerate() {
                let r = &rhs.coeffs[n - i + v];
                if !o.is_zero() && !r.is_zero() {
                    acc = acc.sub(&o.mul(r));
                }
            }
            out.push(acc.div(&lead)?);
        }
        // verify exactness on every remaining known coefficient of self
        let q = QSeries { coeffs: out };
        let check = rhs.mul(&q);
        for n in 0..check.prec().min(self.prec()) {
            if check.coeffs[n] != self.coeffs[n] {
                return Err(Error::InexactDivision { index: n });
            }
        }
        Ok(q)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> QSeries<U> {
        QSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl RSeries {
    /// Promote a rational series into the quadratic extension (radicand 1).
    pub fn promote(&self) -> XSeries {
        self.map(|c| QuadExt::from_rational(c.clone()))
    }
}

impl XSeries {
    /// Coefficientwise Galois conjugation.
    pub fn conjugate(&self) -> XSeries {
        self.map(|c| c.conjugate())
    }

    /// If every coefficient is rational, the underlying rational series.
    pub fn demote(&self) -> Option<RSeries> {
        if self.coeffs().iter().all(|c| c.is_rational()) {
            Some(self.map(|c| c.to_rational().unwrap()))
        } else {
            None
        }
    }
}

impl<T: Scalar> fmt::Debug for QSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries(prec={}, [", self.prec())?;
        for (i, c) in self.coeffs.iter().take(8).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:?}")?;
        }
        if self.prec() > 8 {
            write!(f, ", ...")?;
        }
        write!(f, "])")
    }
}

/// Human-readable q-expansion prefix like `q - 24*q^2 + 252*q^3 + O(q^8)`.
pub fn format_rseries(s: &RSeries, terms: usize) -> String {
    let mut out = String::new();
    let upto = terms.min(s.prec());
    for (n, c) in s.coeffs().iter().enumerate().take(upto) {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        let mag = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let coeff_part = if mag.is_one() && n > 0 { String::new() } else { format!("{mag}") };
        let q_part = match n {
            0 => String::new(),
            1 => "q".to_string(),
            _ => format!("q^{n}"),
        };
        match (coeff_part.is_empty(), q_part.is_empty()) {
            (true, _) => out.push_str(&q_part),
            (false, true) => out.push_str(&coeff_part),
            (false, false) => out.push_str(&format!("{coeff_part}*{q_part}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out.push_str(&format!(" + O(q^{upto})"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use proptest::prelude::*;

    fn rs(v: &[i64]) -> RSeries {
        RSeries::from_coeffs(v.iter().map(|&c| rat(c)).collect())
    }

    #[test]
    fn add_identity() {
        let f = rs(&[1, 2, 3]);
        assert_eq!(f.add(&RSeries::zero(3)), f);
    }

    #[test]
    fn mul_identity_and_truncation() {
        let f = rs(&[1, 2, 3, 4]);
        assert_eq!(f.mul(&RSeries::one(4)), f);
        let g = rs(&[1, 1]);
        assert_eq!(f.mul(&g).prec(), 2);
    }

    #[test]
    fn substitution_examples() {
        // (q + q^2) at h = 2 -> q^2 + q^4
        let f = rs(&[0, 1, 1, 0, 0, 0]);
        let g = f.substitute(2).unwrap();
        assert_eq!(g, rs(&[0, 0, 1, 0, 1, 0]));
        assert_eq!(f.substitute(1).unwrap(), f);
        assert!(f.substitute(0).is_err());
    }

    #[test]
    fn div_exact_identity() {
        let f = rs(&[2, 4, 6, 8]);
        assert_eq!(f.div_exact(&RSeries::one(4)).unwrap(), f);
    }

    #[test]
    fn div_exact_with_valuation() {
        // (q + q^2) / q = 1 + q
        let f = rs(&[0, 1, 1]);
        let q = rs(&[0, 1, 0]);
        let r = f.div_exact(&q).unwrap();
        assert_eq!(r.coeffs()[..2], rs(&[1, 1]).coeffs()[..2]);
    }

    #[test]
    fn div_inexact_reports_index() {
        // q / q^2 fails at the very first coefficient
        let f = rs(&[0, 1, 0, 0]);
        let g = rs(&[0, 0, 1, 0]);
        match f.div_exact(&g) {
            Err(Error::InexactDivision { index }) => assert_eq!(index, 1),
            other => panic!("expected inexact division, got {other:?}"),
        }
    }

    fn arb_series() -> impl Strategy<Value = RSeries> {
        proptest::collection::vec(-20i64..20, 6..=6).prop_map(|v| rs(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn mul_comm_assoc_distrib(f in arb_series(), g in arb_series(), h in arb_series()) {
            prop_assert_eq!(f.mul(&g), g.mul(&f));
            prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
            prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
        }

        #[test]
        fn substitute_is_multiplicative(f in arb_series(), g in arb_series(), h in 1usize..4) {
            let lhs = f.mul(&g).substitute(h).unwrap();
            let rhs = f.substitute(h).unwrap().mul(&g.substitute(h).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn div_undoes_mul(f in arb_series(), g in arb_series()) {
            prop_assume!(!g.coeff(0).is_zero());
            let prod = f.mul(&g);
            prop_assert_eq!(prod.div_exact(&g).unwrap(), f);
        }
    }
}

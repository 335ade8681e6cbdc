//! Integer polynomials with bounded-degree factorization.
//!
//! Coefficients are stored in ascending degree order; the zero polynomial is
//! the empty vector. Factorization targets what characteristic polynomials
//! of Hecke operators actually need: integer roots are located by exact
//! Sturm-sequence isolation (constant terms are far too large for divisor
//! enumeration), quadratic factors of quartics come from the resolvent
//! cubic, and quadratic factors of higher-degree polynomials are searched by
//! divisor enumeration only while the constant term stays small. Whatever
//! remains is returned unfactored and flagged.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::{perfect_sqrt, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Monic linear X - r.
    pub fn linear(root: &BigInt) -> Self {
        IntPoly::new(vec![-root.clone(), BigInt::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() { None } else { Some(self.coeffs.len() - 1) }
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map_or(false, |c| c.is_one())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Exact division by a monic divisor. Returns None when the remainder is
    /// nonzero.
    pub fn div_exact_monic(&self, divisor: &Self) -> Option<Self> {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.degree().unwrap();
        if self.is_zero() {
            return Some(Self::zero());
        }
        let nd = self.degree().unwrap();
        if nd < dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for i in (dd..=nd).rev() {
            let c = rem[i].clone();
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c.clone();
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] -= &c * dc;
            }
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(IntPoly::new(quot))
        } else {
            None
        }
    }

    fn to_rational_coeffs(&self) -> Vec<Rational> {
        self.coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect()
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => {
                    if a.is_one() { write!(f, "X")? } else { write!(f, "{a}*X")? }
                }
                _ => {
                    if a.is_one() { write!(f, "X^{i}")? } else { write!(f, "{a}*X^{i}")? }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---- rational polynomial helpers (internal, for Sturm sequences) ----

fn rp_degree(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn rp_trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

fn rp_derivative(p: &[Rational]) -> Vec<Rational> {
    if p.len() <= 1 {
        return vec![];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
        .collect()
}

fn rp_eval(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Remainder of a by b (b nonzero), over the rationals.
fn rp_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let db = rp_degree(b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut r: Vec<Rational> = a.to_vec();
    while let Some(dr) = rp_degree(&r) {
        if dr < db {
            break;
        }
        let factor = &r[dr] / &lead;
        let shift = dr - db;
        for j in 0..=db {
            let sub = &factor * &b[j];
            r[shift + j] -= sub;
        }
        r = rp_trim(r);
    }
    rp_trim(r)
}

fn rp_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut x = rp_trim(a.to_vec());
    let mut y = rp_trim(b.to_vec());
    while !y.is_empty() {
        let r = rp_rem(&x, &y);
        x = y;
        y = r;
    }
    // make monic
    if let Some(d) = rp_degree(&x) {
        let lead = x[d].clone();
        for c in x.iter_mut() {
            *c /= &lead;
        }
    }
    x
}

fn rp_div_exact(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let db = rp_degree(b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut r: Vec<Rational> = a.to_vec();
    let da = rp_degree(&r).unwrap_or(0);
    let mut q = vec![Rational::zero(); da.saturating_sub(db) + 1];
    while let Some(dr) = rp_degree(&r) {
        if dr < db {
            break;
        }
        let factor = &r[dr] / &lead;
        let shift = dr - db;
        q[shift] = factor.clone();
        for j in 0..=db {
            let sub = &factor * &b[j];
            r[shift + j] -= sub;
        }
        r = rp_trim(r);
    }
    debug_assert!(r.is_empty(), "rp_div_exact: nonzero remainder");
    q
}

/// Sturm chain of a squarefree rational polynomial.
fn sturm_chain(p: &[Rational]) -> Vec<Vec<Rational>> {
    let mut chain = vec![rp_trim(p.to_vec()), rp_trim(rp_derivative(p))];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r = rp_rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.iter().map(|c| -c.clone()).collect());
    }
    chain
}

fn sign_variations(chain: &[Vec<Rational>], x: &Rational) -> usize {
    let mut count = 0;
    let mut last: Option<bool> = None; // true = positive
    for p in chain {
        let v = rp_eval(p, x);
        if v.is_zero() {
            continue;
        }
        let s = v.is_positive();
        if let Some(prev) = last {
            if prev != s {
                count += 1;
            }
        }
        last = Some(s);
    }
    count
}

/// All integer roots of `p` (with multiplicity), found by Sturm isolation.
///
/// Exact for arbitrarily large coefficients; no divisor enumeration.
pub fn integer_roots(p: &IntPoly) -> Vec<BigInt> {
    let deg = match p.degree() {
        None | Some(0) => return vec![],
        Some(d) => d,
    };
    // squarefree part for the Sturm chain
    let rp = p.to_rational_coeffs();
    let g = rp_gcd(&rp, &rp_derivative(&rp));
    let sqf = if rp_degree(&g) == Some(0) || g.is_empty() { rp.clone() } else { rp_div_exact(&rp, &g) };
    let chain = sturm_chain(&sqf);

    // Cauchy bound: all real roots lie in (-B, B)
    let lead = p.coeff(deg).abs();
    let maxc = p.coeffs().iter().map(|c| c.abs()).max().unwrap();
    let bound: BigInt = &maxc / &lead + 2;

    let mut roots = Vec::new();
    let lo = -&bound;
    let hi = bound.clone();
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        let va = sign_variations(&chain, &Rational::from_integer(a.clone()));
        let vb = sign_variations(&chain, &Rational::from_integer(b.clone()));
        if va <= vb {
            continue; // no roots in (a, b]
        }
        let width = &b - &a;
        if width.is_one() {
            if p.eval(&b).is_zero() {
                roots.push(b.clone());
            }
            continue;
        }
        let mid = (&a + &b).div_floor(&BigInt::from(2));
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }

    // multiplicities by repeated division
    let mut out = Vec::new();
    let mut cur = p.clone();
    roots.sort();
    for r in roots {
        let lin = IntPoly::linear(&r);
        while let Some(q) = cur.div_exact_monic(&lin) {
            out.push(r.clone());
            cur = q;
            if cur.degree() == Some(0) {
                break;
            }
        }
    }
    out
}

/// Rational root test for a *monic* polynomial with rational coefficients:
/// scale the variable so roots become integers of a monic integer polynomial.
fn monic_rational_roots(p: &[Rational]) -> Vec<Rational> {
    let d = match rp_degree(p) {
        None | Some(0) => return vec![],
        Some(d) => d,
    };
    assert!(p[d].is_one(), "monic_rational_roots: polynomial must be monic");
    let mut denom_lcm = BigInt::one();
    for c in p.iter() {
        denom_lcm = denom_lcm.lcm(c.denom());
    }
    // z = W / s turns X^d + sum c_j X^j into monic integer W^d + sum c_j s^{d-j} W^j
    let s = denom_lcm;
    let mut int_coeffs = Vec::with_capacity(d + 1);
    for (j, c) in p.iter().enumerate() {
        let scaled = c * Rational::from_integer(s.pow((d - j) as u32));
        debug_assert!(scaled.is_integer());
        int_coeffs.push(scaled.to_integer());
    }
    let ip = IntPoly::new(int_coeffs);
    integer_roots(&ip)
        .into_iter()
        .map(|w| Rational::new(w, s.clone()))
        .collect()
}

fn rational_is_square(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = perfect_sqrt(x.numer())?;
    let d = perfect_sqrt(x.denom())?;
    Some(Rational::new(n, d))
}

/// Try to split a monic integer quartic (with no rational roots required)
/// into two monic integer quadratics, via the resolvent cubic of the
/// depressed quartic. Returns None when no such factorization exists, which
/// certifies irreducibility once rational roots are also absent.
fn quartic_quadratic_split(p: &IntPoly) -> Option<(IntPoly, IntPoly)> {
    assert_eq!(p.degree(), Some(4));
    assert!(p.is_monic());
    let c3 = Rational::from_integer(p.coeff(3));
    let c2 = Rational::from_integer(p.coeff(2));
    let c1 = Rational::from_integer(p.coeff(1));
    let c0 = Rational::from_integer(p.coeff(0));
    let four = Rational::from_integer(BigInt::from(4));
    let shift = &c3 / &four; // X = Y - c3/4

    // depressed coefficients: Y^4 + pp Y^2 + qq Y + rr
    let s2 = &shift * &shift;
    let pp = &c2 - Rational::from_integer(BigInt::from(6)) * &s2;
    let qq = &c1 - Rational::from_integer(BigInt::from(2)) * &c2 * &shift
        + Rational::from_integer(BigInt::from(8)) * &s2 * &shift;
    let rr = &c0 - &c1 * &shift + &c2 * &s2
        - Rational::from_integer(BigInt::from(3)) * &s2 * &s2;

    let candidates: Vec<(Rational, Rational, Rational)> = if qq.is_zero() {
        // (Y^2 + v)(Y^2 + w) with v + w = pp, v w = rr
        let mut cands = Vec::new();
        let disc = &pp * &pp - Rational::from_integer(BigInt::from(4)) * &rr;
        if let Some(sq) = rational_is_square(&disc) {
            let two = Rational::from_integer(BigInt::from(2));
            let v = (&pp - &sq) / &two;
            let w = (&pp + &sq) / &two;
            cands.push((Rational::zero(), v, w));
        }
        // (Y^2 + uY + v)(Y^2 - uY + v) with v^2 = rr, u^2 = 2v - pp
        if let Some(v) = rational_is_square(&rr) {
            for vv in [v.clone(), -v] {
                let u2 = Rational::from_integer(BigInt::from(2)) * &vv - &pp;
                if let Some(u) = rational_is_square(&u2) {
                    if !u.is_zero() {
                        cands.push((u, vv.clone(), vv.clone()));
                    }
                }
            }
        }
        cands
    } else {
        // resolvent cubic z^3 + 2 pp z^2 + (pp^2 - 4 rr) z - qq^2, z = u^2
        let res = [
            -(&qq * &qq),
            &pp * &pp - Rational::from_integer(BigInt::from(4)) * &rr,
            Rational::from_integer(BigInt::from(2)) * &pp,
            Rational::one(),
        ];
        let mut cands = Vec::new();
        for z in monic_rational_roots(&res) {
            if z.is_zero() || z.is_negative() {
                continue;
            }
            if let Some(u) = rational_is_square(&z) {
                let two = Rational::from_integer(BigInt::from(2));
                let v = (&pp + &z - &qq / &u) / &two;
                let w = (&pp + &z + &qq / &u) / &two;
                cands.push((u, v, w));
            }
        }
        cands
    };

    for (u, v, w) in candidates {
        // undepress: factors (Y^2 + uY + v)(Y^2 - uY + w) with Y = X + shift
        let f1 = undepress_quadratic(&u, &v, &shift);
        let f2 = undepress_quadratic(&-u.clone(), &w, &shift);
        if let (Some(a), Some(b)) = (f1, f2) {
            if a.mul(&b) == *p {
                return Some((a, b));
            }
        }
    }
    None
}

/// (Y^2 + uY + v) with Y = X + t, returned as an integer quadratic when the
/// coefficients come out integral (Gauss's lemma guarantees this for genuine
/// factors of a monic integer polynomial).
fn undepress_quadratic(u: &Rational, v: &Rational, t: &Rational) -> Option<IntPoly> {
    // (X + t)^2 + u (X + t) + v = X^2 + (2t + u) X + (t^2 + ut + v)
    let b = Rational::from_integer(BigInt::from(2)) * t + u;
    let c = t * t + u * t + v;
    if b.is_integer() && c.is_integer() {
        Some(IntPoly::new(vec![c.to_integer(), b.to_integer(), BigInt::one()]))
    } else {
        None
    }
}

/// Divisor-bounded search for a monic integer quadratic factor X^2 + aX + b
/// of a monic polynomial of degree >= 5. Only attempted while the constant
/// term is small enough to enumerate divisors.
fn bounded_quadratic_search(p: &IntPoly) -> Option<(IntPoly, IntPoly)> {
    const DIVISOR_LIMIT: u64 = 1_000_000_000_000;
    let c0 = p.coeff(0);
    if c0.is_zero() || c0.abs() > BigInt::from(DIVISOR_LIMIT) {
        return None;
    }
    let c0u: u64 = c0.abs().try_into().ok()?;
    let mut divs = Vec::new();
    let mut d = 1u64;
    while d * d <= c0u {
        if c0u % d == 0 {
            divs.push(d);
            divs.push(c0u / d);
        }
        d += 1;
    }
    divs.sort_unstable();
    divs.dedup();
    // Cauchy root bound => |a| <= 2B for a factor X^2 + aX + b
    let deg = p.degree().unwrap();
    let maxc = p.coeffs().iter().map(|c| c.abs()).max().unwrap();
    let bound2: BigInt = (maxc + 1) * 2;
    for &b in &divs {
        for bsign in [1i64, -1] {
            let bb = BigInt::from(b) * bsign;
            let mut a: BigInt = -&bound2;
            while a <= bound2 {
                let cand = IntPoly::new(vec![bb.clone(), a.clone(), BigInt::one()]);
                if let Some(q) = p.div_exact_monic(&cand) {
                    let _ = deg;
                    return Some((cand, q));
                }
                a += 1;
            }
        }
    }
    None
}

/// Result of [`factor_int_poly`]: found factors (each irreducible over Q as
/// far as the bounded search can certify) plus any residual left unfactored.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub factors: Vec<IntPoly>,
    pub residual: Vec<IntPoly>,
}

impl Factorization {
    pub fn product(&self) -> IntPoly {
        let mut acc = IntPoly::from_i64(&[1]);
        for f in self.factors.iter().chain(self.residual.iter()) {
            acc = acc.mul(f);
        }
        acc
    }

    pub fn all_parts(&self) -> impl Iterator<Item = &IntPoly> {
        self.factors.iter().chain(self.residual.iter())
    }
}

/// Factor a monic integer polynomial into linear and quadratic factors where
/// the bounded strategy finds them. Degrees <= 4 are fully decided
/// (irreducibility certified); for degree >= 5 an unfactored remainder may be
/// returned in `residual`.
pub fn factor_int_poly(p: &IntPoly) -> Result<Factorization> {
    if !p.is_monic() {
        return Err(Error::domain("factor_int_poly: polynomial must be monic"));
    }
    let mut factors: Vec<IntPoly> = Vec::new();
    let mut residual: Vec<IntPoly> = Vec::new();
    let mut stack = vec![p.clone()];
    while let Some(cur) = stack.pop() {
        match cur.degree() {
            None | Some(0) => continue,
            Some(1) => {
                factors.push(cur);
                continue;
            }
            _ => {}
        }
        let roots = integer_roots(&cur);
        if !roots.is_empty() {
            let mut rem = cur.clone();
            for r in &roots {
                let lin = IntPoly::linear(r);
                rem = rem.div_exact_monic(&lin).expect("integer root must divide");
                factors.push(lin);
            }
            if rem.degree().map_or(false, |d| d >= 1) {
                stack.push(rem);
            }
            continue;
        }
        match cur.degree().unwrap() {
            2 | 3 => factors.push(cur), // no rational root => irreducible
            4 => {
                if let Some((a, b)) = quartic_quadratic_split(&cur) {
                    factors.push(a);
                    factors.push(b);
                } else {
                    factors.push(cur); // certified irreducible
                }
            }
            _ => {
                if let Some((a, b)) = bounded_quadratic_search(&cur) {
                    factors.push(a);
                    stack.push(b);
                } else {
                    residual.push(cur);
                }
            }
        }
    }
    factors.sort_by(|a, b| {
        (a.degree(), a.coeffs().to_vec()).cmp(&(b.degree(), b.coeffs().to_vec()))
    });
    let fact = Factorization { factors, residual };
    debug_assert_eq!(fact.product(), *p, "factprization must multiply back");
    Ok(fact)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_poly() {
        let p = IntPoly::from_i64(&[-117696240, -11592, 1]);
        assert_eq!(p.to_string(), "X^2-11592*X-117696240");
    }

    #[test]
    fn factor_x2_minus_1() {
        let p = IntPoly::from_i64(&[-1, 0, 1]);
        let f = factor_int_poly(&p).unwrap();
        assert!(f.residual.is_empty());
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.product(), p);
        assert_eq!(f.factors[0], IntPoly::from_i64(&[-1, 1]));
        assert_eq!(f.factors[1], IntPoly::from_i64(&[1, 1]));
    }

    #[test]
    fn refactor_prop8_quadratics() {
        // (X^2 - 11592 X - 117696240)(X^2 + 952 X - 140413680), expanded and
        // factored again, must return the same two quadratics.
        let a = IntPoly::from_i64(&[-117696240, -11592, 1]);
        let b = IntPoly::from_i64(&[-140413680, 952, 1]);
        let p = a.mul(&b);
        let f = factor_int_poly(&p).unwrap();
        assert!(f.residual.is_empty());
        assert_eq!(f.factors.len(), 2);
        assert!(f.factors.contains(&a));
        assert!(f.factors.contains(&b));
    }

    #[test]
    fn quartic_irreducibility_decided() {
        // X^4 - 1446840 X^2 + 108573696000: no rational roots, and the
        // bounded search proves there is no quadratic split either.
        let p = IntPoly::new(vec![
            BigInt::from(108573696000i64),
            BigInt::zero(),
            BigInt::from(-1446840),
            BigInt::zero(),
            BigInt::one(),
        ]);
        let f = factor_int_poly(&p).unwrap();
        assert!(f.residual.is_empty());
        assert_eq!(f.factors.len(), 1, "quartic is irreducible over Q");
        assert_eq!(f.factors[0], p);
    }

    #[test]
    fn repeated_quadratic_split() {
        let q = IntPoly::from_i64(&[5, -4, 1]); // irreducible (disc -4)
        let p = q.mul(&q);
        let f = factor_int_poly(&p).unwrap();
        assert!(f.residual.is_empty());
        assert_eq!(f.factors, vec![q.clone(), q]);
    }

    #[test]
    fn integer_roots_large_coefficients() {
        // (X - 83136040)(X + 12345678901)(X^2 + 3)
        let p = IntPoly::linear(&BigInt::from(83136040i64))
            .mul(&IntPoly::linear(&BigInt::from(-12345678901i64)))
            .mul(&IntPoly::from_i64(&[3, 0, 1]));
        let mut roots = integer_roots(&p);
        roots.sort();
        assert_eq!(roots, vec![BigInt::from(-12345678901i64), BigInt::from(83136040i64)]);
    }

    #[test]
    fn repeated_roots_found_with_multiplicity() {
        let p = IntPoly::linear(&BigInt::from(7)).mul(&IntPoly::linear(&BigInt::from(7)));
        let roots = integer_roots(&p);
        assert_eq!(roots, vec![BigInt::from(7), BigInt::from(7)]);
    }

    #[test]
    fn factor_product_equals_input() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(42);
        for _ in 0..50 {
            let deg = rng.gen_range(1..=6);
            let mut coeffs: Vec<BigInt> =
                (0..deg).map(|_| BigInt::from(rng.gen_range(-40i64..40))).collect();
            coeffs.push(BigInt::one());
            let p = IntPoly::new(coeffs);
            let f = factor_int_poly(&p).unwrap();
            assert_eq!(f.product(), p);
        }
    }
}

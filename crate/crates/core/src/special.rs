//! The named series: Bernoulli numbers, Eisenstein series E_k, the
//! quasi-modular E_2, the level series C_N = (N E_2(q^N) - E_2(q)) / (N-1,24),
//! the character series F_3, F_4, the alpha family, and the seven Delta_N.
//!
//! E_2 is only ever an ingredient of C_N; it is not exposed as a modular
//! form. Divisor sums are sieved, so building a series to precision P costs
//! O(P log P) exact operations.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{rat, Rational};
use crate::qseries::RSeries;

/// The two Dirichlet characters in play: rho_3 (non-trivial mod 3) and rho_4
/// (non-trivial mod 4). Completely multiplicative, zero off the units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DirichletCharacter {
    modulus: u32,
}

impl DirichletCharacter {
    pub fn rho3() -> Self {
        DirichletCharacter { modulus: 3 }
    }

    pub fn rho4() -> Self {
        DirichletCharacter { modulus: 4 }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// chi(n) in {-1, 0, 1}.
    pub fn value(&self, n: usize) -> i64 {
        let r = n % self.modulus as usize;
        match (self.modulus, r) {
            (3, 1) => 1,
            (3, 2) => -1,
            (4, 1) => 1,
            (4, 3) => -1,
            _ => 0,
        }
    }
}

/// Exact k-th Bernoulli number via the standard recurrence
/// sum_{j=0}^{m} C(m+1, j) B_j = 0.
pub fn bernoulli(k: u32) -> Result<Rational> {
    if k == 0 {
        return Ok(Rational::one());
    }
    if k % 2 != 0 {
        return Err(Error::domain(format!("bernoulli: k = {k} must be even and positive")));
    }
    let table = bernoulli_table(k as usize);
    Ok(table[k as usize].clone())
}

/// B_0 .. B_m inclusive. B_1 = -1/2 under this recurrence.
fn bernoulli_table(m: usize) -> Vec<Rational> {
    let mut b = vec![Rational::zero(); m + 1];
    b[0] = Rational::one();
    // Pascal row C(m+1, j) built incrementally per m.
    for n in 1..=m {
        // B_n = -1/(n+1) * sum_{j=0}^{n-1} C(n+1, j) B_j
        let mut binom = BigInt::one(); // C(n+1, 0)
        let mut acc = Rational::zero();
        for j in 0..n {
            acc += Rational::from_integer(binom.clone()) * &b[j];
            // C(n+1, j+1) = C(n+1, j) * (n+1-j) / (j+1)
            binom = binom * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
        }
        b[n] = -acc / Rational::from_integer(BigInt::from(n + 1));
    }
    b
}

/// E_k = 1 - (2k / B_k) * sum_{n >= 1} sigma_{k-1}(n) q^n, for even k >= 2.
/// k = 2 yields the quasi-modular E_2 used only inside C_N.
pub fn eisenstein(k: u32, prec: usize) -> Result<RSeries> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::domain(format!("eisenstein: weight {k} must be even and >= 2")));
    }
    let bk = bernoulli(k)?;
    let factor = -(rat(2) * rat(k as i64)) / bk;
    let mut coeffs = vec![Rational::zero(); prec.max(1)];
    coeffs[0] = Rational::one();
    // sieve sigma_{k-1}
    for d in 1..prec {
        let dk = BigInt::from(d).pow(k - 1);
        let term = &factor * Rational::from_integer(dk);
        for n in (d..prec).step_by(d) {
            coeffs[n] += &term;
        }
    }
    Ok(RSeries::from_coeffs(coeffs))
}

/// F_3 = 1 + 6 sum (sum_{d|n} rho3(d)) q^n and the analogous F_4 with
/// factor 4.
pub fn character_series(chi: DirichletCharacter, prec: usize) -> Result<RSeries> {
    let factor = match chi.modulus() {
        3 => rat(6),
        4 => rat(4),
        m => return Err(Error::domain(format!("unsupported character modulus {m}"))),
    };
    let mut coeffs = vec![Rational::zero(); prec.max(1)];
    coeffs[0] = Rational::one();
    for d in 1..prec {
        let v = chi.value(d);
        if v == 0 {
            continue;
        }
        let term = &factor * rat(v);
        for n in (d..prec).step_by(d) {
            coeffs[n] += &term;
        }
    }
    Ok(RSeries::from_coeffs(coeffs))
}

/// C_N = (N E_2(q^N) - E_2(q)) / gcd(N-1, 24), for N in {2,3,4,6,8,9}.
/// The constant term is (N-1)/gcd(N-1, 24).
pub fn level_series(level: u32, prec: usize) -> Result<RSeries> {
    if ![2, 3, 4, 6, 8, 9].contains(&level) {
        return Err(Error::domain(format!("level_series: unsupported level {level}")));
    }
    let e2 = eisenstein(2, prec)?;
    let e2n = e2.substitute(level as usize)?;
    let g = gcd_u32(level - 1, 24);
    let num = e2n.scale(&rat(level as i64)).sub(&e2);
    Ok(num.scale(&Rational::new(BigInt::one(), BigInt::from(g))))
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 { a } else { gcd_u32(b, a % b) }
}

/// Identifier for every cached named series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesId {
    /// E_k (k = 2 allowed, quasi-modular).
    E(u32),
    /// C_N.
    C(u32),
    /// F_3 or F_4, keyed by modulus.
    F(u32),
    /// alpha_N for N in {2,3,4,6,8,9}.
    Alpha(u32),
    /// Delta_N for N in {1,2,3,4,6,8,9}.
    Delta(u32),
}

impl fmt::Display for SeriesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesId::E(k) => write!(f, "E{k}"),
            SeriesId::C(n) => write!(f, "C{n}"),
            SeriesId::F(m) => write!(f, "F{m}"),
            SeriesId::Alpha(n) => write!(f, "alpha{n}"),
            SeriesId::Delta(n) => write!(f, "Delta{n}"),
        }
    }
}

/// Weight of Delta_N: (12, 8, 6, 6, 4, 4, 4) for N = (1, 2, 3, 4, 6, 8, 9).
pub fn delta_weight(level: u32) -> u32 {
    match level {
        1 => 12,
        2 => 8,
        3 => 6,
        4 => 6,
        6 => 4,
        8 => 4,
        9 => 4,
        _ => panic!("no Delta for level {level}"),
    }
}

pub const DELTA_LEVELS: [u32; 7] = [1, 2, 3, 4, 6, 8, 9];

/// A named series together with its level/weight bookkeeping.
#[derive(Clone, Debug)]
pub struct NamedSeries {
    pub id: SeriesId,
    pub level: u32,
    pub weight: u32,
    pub series: RSeries,
}

/// Memoizing constructor for all named series. Values are immutable once
/// built; the cache is plain single-threaded state.
#[derive(Default)]
pub struct SeriesCache {
    map: HashMap<(SeriesId, usize), RSeries>,
}

impl SeriesCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, id: SeriesId, prec: usize) -> Result<RSeries> {
        if let Some(s) = self.map.get(&(id, prec)) {
            return Ok(s.clone());
        }
        let s = self.build(id, prec)?;
        self.map.insert((id, prec), s.clone());
        Ok(s)
    }

    fn build(&mut self, id: SeriesId, prec: usize) -> Result<RSeries> {
        match id {
            SeriesId::E(k) => eisenstein(k, prec),
            SeriesId::C(n) => level_series(n, prec),
            SeriesId::F(3) => character_series(DirichletCharacter::rho3(), prec),
            SeriesId::F(4) => character_series(DirichletCharacter::rho4(), prec),
            SeriesId::F(m) => Err(Error::domain(format!("no character series F{m}"))),
            SeriesId::Alpha(n) => self.alpha(n, prec),
            SeriesId::Delta(n) => self.delta(n, prec),
        }
    }

    fn alpha(&mut self, n: u32, prec: usize) -> Result<RSeries> {
        let sixth = Rational::new(BigInt::one(), BigInt::from(6));
        let quarter = Rational::new(BigInt::one(), BigInt::from(4));
        match n {
            6 => {
                let f3 = self.get(SeriesId::F(3), prec)?;
                Ok(f3.sub(&f3.substitute(2)?).scale(&sixth))
            }
            8 => {
                let f4 = self.get(SeriesId::F(4), prec)?;
                Ok(f4.sub(&f4.substitute(2)?).scale(&quarter))
            }
            9 => {
                let f3 = self.get(SeriesId::F(3), prec)?;
                Ok(f3.sub(&f3.substitute(3)?).scale(&sixth))
            }
            4 => {
                let f4 = self.get(SeriesId::F(4), prec)?;
                let a8 = self.get(SeriesId::Alpha(8), prec)?;
                Ok(f4.substitute(2)?.mul(&a8))
            }
            2 => {
                let c4 = self.get(SeriesId::C(4), prec)?;
                let a4 = self.get(SeriesId::Alpha(4), prec)?;
                Ok(c4.mul(&a4))
            }
            3 => {
                let c9 = self.get(SeriesId::C(9), prec)?;
                let a9 = self.get(SeriesId::Alpha(9), prec)?;
                Ok(c9.mul(&a9))
            }
            _ => Err(Error::domain(format!("no alpha series for level {n}"))),
        }
    }

    fn delta(&mut self, n: u32, prec: usize) -> Result<RSeries> {
        let s = match n {
            1 => {
                let e4 = self.get(SeriesId::E(4), prec)?;
                let e6 = self.get(SeriesId::E(6), prec)?;
                e4.pow(3)
                    .sub(&e6.pow(2))
                    .scale(&Rational::new(BigInt::one(), BigInt::from(1728)))
            }
            2 => {
                let a2 = self.get(SeriesId::Alpha(2), prec)?;
                let c2 = self.get(SeriesId::C(2), prec)?;
                a2.mul(&c2.pow(2).sub(&a2.scale(&rat(64))))
            }
            3 => {
                let a3 = self.get(SeriesId::Alpha(3), prec)?;
                let f3 = self.get(SeriesId::F(3), prec)?;
                a3.mul(&f3.pow(3).sub(&a3.scale(&rat(27))))
            }
            4 => {
                let a2 = self.get(SeriesId::Alpha(2), prec)?;
                let c4 = self.get(SeriesId::C(4), prec)?;
                let a4 = self.get(SeriesId::Alpha(4), prec)?;
                a2.mul(&c4.sub(&a4.scale(&rat(16))))
            }
            6 => {
                let a6 = self.get(SeriesId::Alpha(6), prec)?;
                let f3 = self.get(SeriesId::F(3), prec)?;
                let t1 = f3.sub(&a6.scale(&rat(3)));
                let t2 = f3.sub(&a6.scale(&rat(4)));
                let t3 = f3.sub(&a6.scale(&rat(12)));
                a6.mul(&t1).mul(&t2).mul(&t3)
            }
            8 => {
                let a4 = self.get(SeriesId::Alpha(4), prec)?;
                let f4 = self.get(SeriesId::F(4), prec)?;
                let a8 = self.get(SeriesId::Alpha(8), prec)?;
                a4.mul(&f4).mul(&f4.sub(&a8.scale(&rat(8))))
            }
            9 => {
                let a3 = self.get(SeriesId::Alpha(3), prec)?;
                let f3 = self.get(SeriesId::F(3), prec)?;
                let a9 = self.get(SeriesId::Alpha(9), prec)?;
                a3.mul(&f3.sub(&a9.scale(&rat(9))))
            }
            _ => return Err(Error::domain(format!("no Delta series for level {n}"))),
        };
        if prec >= 2 {
            debug_assert!(s.coeff(0).is_zero(), "Delta_{n} must vanish at q^0");
            debug_assert!(s.coeff(1).is_one(), "Delta_{n} must be normalized");
        }
        Ok(s)
    }

    pub fn named(&mut self, id: SeriesId, prec: usize) -> Result<NamedSeries> {
        let series = self.get(id, prec)?;
        let (level, weight) = match id {
            SeriesId::E(k) => (1, k),
            SeriesId::C(n) => (n, 2),
            SeriesId::F(m) => (m, 1),
            SeriesId::Alpha(n) => (
                n,
                match n {
                    2 => 4,
                    3 => 3,
                    4 => 2,
                    6 | 8 | 9 => 1,
                    _ => unreachable!(),
                },
            ),
            SeriesId::Delta(n) => (n, delta_weight(n)),
        };
        Ok(NamedSeries { id, level, weight, series })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    /// Independent Bernoulli oracle: Akiyama-Tanigawa algorithm.
    /// (Yields the B_1 = +1/2 convention; identical for even n.)
    fn bernoulli_at(n: usize) -> Rational {
        let mut a: Vec<Rational> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            a.push(Rational::new(BigInt::one(), BigInt::from(m + 1)));
            for j in (1..=m).rev() {
                let diff = a[j - 1].clone() - &a[j];
                a[j - 1] = diff * rat(j as i64);
            }
        }
        a[0].clone()
    }

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli(2).unwrap(), ratio(1, 6));
        assert_eq!(bernoulli(4).unwrap(), ratio(-1, 30));
        assert_eq!(bernoulli(12).unwrap(), ratio(-691, 2730));
    }

    #[test]
    fn bernoulli_matches_akiyama_tanigawa() {
        for k in (2..=30).step_by(2) {
            assert_eq!(bernoulli(k).unwrap(), bernoulli_at(k as usize), "B_{k}");
        }
    }

    #[test]
    fn bernoulli_rejects_odd() {
        assert!(bernoulli(3).is_err());
        assert!(bernoulli(1).is_err());
    }

    /// Divisor-sum oracle, no sieve: direct sum over divisors.
    fn sigma(k: u32, n: usize) -> BigInt {
        let mut s = BigInt::zero();
        for d in 1..=n {
            if n % d == 0 {
                s += BigInt::from(d).pow(k);
            }
        }
        s
    }

    #[test]
    fn eisenstein_e4_e6() {
        let e4 = eisenstein(4, 8).unwrap();
        assert_eq!(e4.coeff(0), &rat(1));
        for n in 1..8 {
            assert_eq!(e4.coeff(n), &(rat(240) * Rational::from_integer(sigma(3, n))));
        }
        assert_eq!(e4.coeff(1), &rat(240));
        assert_eq!(e4.coeff(2), &rat(2160));

        let e6 = eisenstein(6, 8).unwrap();
        for n in 1..8 {
            assert_eq!(e6.coeff(n), &(rat(-504) * Rational::from_integer(sigma(5, n))));
        }
        assert_eq!(e6.coeff(2), &rat(-16632));
    }

    #[test]
    fn e8_equals_e4_squared() {
        let e8 = eisenstein(8, 60).unwrap();
        let e4 = eisenstein(4, 60).unwrap();
        assert_eq!(e8, e4.pow(2));
    }

    #[test]
    fn odd_weight_rejected() {
        assert!(eisenstein(5, 10).is_err());
    }

    #[test]
    fn character_series_values() {
        let f3 = character_series(DirichletCharacter::rho3(), 5).unwrap();
        let expect3 = [1, 6, 0, 6, 6];
        for (n, e) in expect3.iter().enumerate() {
            assert_eq!(f3.coeff(n), &rat(*e), "F3 coefficient {n}");
        }
        let f4 = character_series(DirichletCharacter::rho4(), 5).unwrap();
        let expect4 = [1, 4, 4, 0, 4];
        for (n, e) in expect4.iter().enumerate() {
            assert_eq!(f4.coeff(n), &rat(*e), "F4 coefficient {n}");
        }
        // a_p(F3) = 1 + rho3(p) = 0 for primes p = 2 mod 3
        for p in [2usize, 5, 11, 17, 23] {
            let f3 = character_series(DirichletCharacter::rho3(), p + 1).unwrap();
            assert!(f3.coeff(p).is_zero(), "a_{p}(F3)");
        }
    }

    #[test]
    fn level_series_c2() {
        let c2 = level_series(2, 5).unwrap();
        // direct E2 oracle: E2 = 1 - 24 sum sigma_1(n) q^n
        let e2_coeff = |n: usize| {
            if n == 0 { rat(1) } else { rat(-24) * Rational::from_integer(sigma(1, n)) }
        };
        for n in 0..5 {
            let expected = if n % 2 == 0 {
                rat(2) * e2_coeff(n / 2) - e2_coeff(n)
            } else {
                -e2_coeff(n)
            };
            assert_eq!(c2.coeff(n), &expected, "C2 coefficient {n}");
        }
        assert_eq!(c2.coeff(0), &rat(1));
        assert_eq!(c2.coeff(1), &rat(24));
        assert_eq!(c2.coeff(2), &rat(24));
        assert_eq!(c2.coeff(3), &rat(96));
    }

    #[test]
    fn level_series_constant_terms() {
        for (n, c0) in [(2u32, 1i64), (3, 1), (4, 1), (6, 5), (8, 7), (9, 1)] {
            let s = level_series(n, 3).unwrap();
            assert_eq!(s.coeff(0), &rat(c0), "constant term of C{n}");
        }
    }

    #[test]
    fn alpha_series_definition_example() {
        // alpha_9 = (F3 - F3(q^3)) / 6
        let mut cache = SeriesCache::new();
        let a9 = cache.get(SeriesId::Alpha(9), 12).unwrap();
        let f3 = cache.get(SeriesId::F(3), 12).unwrap();
        let direct = f3.sub(&f3.substitute(3).unwrap()).scale(&ratio(1, 6));
        assert_eq!(a9, direct);
    }

    #[test]
    fn deltas_are_normalized() {
        let mut cache = SeriesCache::new();
        for n in DELTA_LEVELS {
            let d = cache.get(SeriesId::Delta(n), 10).unwrap();
            assert!(d.coeff(0).is_zero(), "a_0(Delta_{n})");
            assert!(d.coeff(1).is_one(), "a_1(Delta_{n})");
        }
    }

    #[test]
    fn delta1_is_tau() {
        let mut cache = SeriesCache::new();
        let d1 = cache.get(SeriesId::Delta(1), 6).unwrap();
        let tau = [0i64, 1, -24, 252, -1472, 4830];
        for (n, t) in tau.iter().enumerate() {
            assert_eq!(d1.coeff(n), &rat(*t), "tau({n})");
        }
    }

    #[test]
    fn delta2_a2() {
        let mut cache = SeriesCache::new();
        let d2 = cache.get(SeriesId::Delta(2), 4).unwrap();
        assert_eq!(d2.coeff(2), &rat(-8), "a_2(Delta_2) = -2^kappa with kappa = 3");
    }
}

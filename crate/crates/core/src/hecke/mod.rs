//! Hecke operators, eigenforms and the newform bookkeeping.
//!
//! For p not dividing N the operator T_p acts on q-expansions by
//! a_n -> a_{pn} + p^{k-1} a_{n/p}; for p | N the operator U_p drops the
//! second term. Producing m coefficients of an image therefore consumes
//! p*m coefficients of the input, which drives the precision policy
//! prec = (largest prime used) * sturm_precision(N, k).

mod engine;
mod counts;
mod lemmas;

pub use counts::{predicted_count, predicted_count_class, predicted_total, ClassCount};
pub use engine::{Cell, Engine, OldForm};
pub use lemmas::{newton_charpoly, pair_split, PairSplit};

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{IntPoly, QuadExt, Rational};
use crate::linalg::QMat;
use crate::qseries::{QSeries, RSeries, Scalar, XSeries};
use crate::ringspace::{FormSpace, Membership};
use crate::special::DirichletCharacter;

/// Sign class of a newform, or the level-9 partition.
///
/// `Sign(i)` is the divisor i of N^x with a_p = -p^kappa exactly for the
/// primes p | i. Level 9 has N^x = 1; its newforms split instead into the
/// twists of lower-level forms (`Twist`) and the genuinely new ones, which
/// are `Zero` when the expansion is supported on exponents = 1 mod 3 and
/// `Star` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    Sign(u32),
    Zero,
    Star,
    Twist,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Sign(i) => write!(f, "{i}"),
            ClassLabel::Zero => write!(f, "0"),
            ClassLabel::Star => write!(f, "*"),
            ClassLabel::Twist => write!(f, "twist"),
        }
    }
}

/// Eigenvalue field of an eigenform record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EigenField {
    Rational,
    Quadratic { radicand: u128 },
    /// Galois orbit of degree >= 3, carried at the characteristic-polynomial
    /// level only. The record's series is the orbit trace.
    CharpolyOnly { dim: usize },
}

/// A normalized Hecke eigenform (or, for `CharpolyOnly`, a full Galois
/// orbit carried by its trace and characteristic polynomials).
#[derive(Clone, Debug)]
pub struct Eigenform {
    pub level: u32,
    pub weight: u32,
    pub class: ClassLabel,
    pub field: EigenField,
    /// q-expansion, a_1 = 1; for orbits the coefficientwise trace.
    pub series: XSeries,
    /// Coordinates on the monomial cusp basis of S_k(N).
    pub coords: Vec<QuadExt>,
    /// Index of the underlying block in the cell.
    pub block: usize,
    pub is_new: bool,
    pub is_twist_of_lower: bool,
    pub has_cm: bool,
}

impl Eigenform {
    pub fn kappa(&self) -> u32 {
        self.weight / 2 - 1
    }

    pub fn orbit_dim(&self) -> usize {
        match self.field {
            EigenField::CharpolyOnly { dim } => dim,
            _ => 1,
        }
    }

    pub fn coefficient(&self, n: usize) -> &QuadExt {
        self.series.coeff(n)
    }
}

/// How a block of the new subspace decomposes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Rational,
    QuadraticPair { radicand: u128 },
    CharpolyOnly,
}

/// An irreducible Hecke block of the new subspace of S_k(N).
#[derive(Clone, Debug)]
pub struct Block {
    pub class: ClassLabel,
    pub dim: usize,
    pub kind: BlockKind,
    /// Characteristic polynomial of T_p on the block, per good prime <= 13.
    pub charpolys: BTreeMap<u64, IntPoly>,
    /// Basis of the block as coordinate vectors on the cusp monomial basis.
    pub basis_coords: Vec<Vec<Rational>>,
    /// Coordinates of the orbit trace (sum of the block's eigenforms).
    pub trace_coords: Vec<Rational>,
    pub is_twist: bool,
}

pub const HECKE_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

pub fn good_primes(level: u32) -> Vec<u64> {
    HECKE_PRIMES.iter().copied().filter(|&p| level as u64 % p != 0).collect()
}

pub fn prime_divisors(n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// N^x: product of primes exactly dividing N.
pub fn n_cross(level: u32) -> u32 {
    prime_divisors(level)
        .into_iter()
        .filter(|&p| (level / p) % p != 0)
        .product()
}

pub fn divisors(n: u32) -> Vec<u32> {
    let mut out: Vec<u32> = (1..=n).filter(|d| n % d == 0).collect();
    out.sort_unstable();
    out
}

/// Hecke image: T_p for p coprime to the level, U_p otherwise.
/// The output carries floor(prec / p) coefficients.
pub fn hecke_image<T: Scalar>(
    f: &QSeries<T>,
    p: u64,
    weight: u32,
    level: u32,
) -> Result<QSeries<T>> {
    let p_us = p as usize;
    let out_prec = f.prec() / p_us;
    if out_prec == 0 {
        return Err(Error::Precision { needed: p_us, available: f.prec() });
    }
    let is_good = level as u64 % p != 0;
    let pk = if is_good {
        let mut acc = T::one();
        let base = T::from_i64(p as i64);
        for _ in 0..(weight - 1) {
            acc = acc.mul(&base);
        }
        Some(acc)
    } else {
        None
    };
    let mut out = Vec::with_capacity(out_prec);
    for n in 0..out_prec {
        let mut c = f.coeff(p_us * n).clone();
        if let Some(pk) = &pk {
            if n % p_us == 0 && n > 0 {
                c = c.add(&pk.mul(f.coeff(n / p_us)));
            }
        }
        out.push(c);
    }
    Ok(QSeries::from_coeffs(out))
}

/// Exact matrix of T_p (or U_p) on a cusp space: column j holds the
/// coordinates of the image of the j-th basis element. An image outside the
/// span falsifies Hecke stability of the space and aborts loudly.
pub fn hecke_matrix(space: &FormSpace, p: u64) -> Result<QMat> {
    let dim = space.dim();
    let mut m = QMat::zero(dim, dim);
    for (j, b) in space.basis.iter().enumerate() {
        let img = hecke_image(b, p, space.weight, space.level)?;
        match space.solve_in_basis(&img)? {
            Membership::Member(coords) => {
                for (i, c) in coords.into_iter().enumerate() {
                    m[(i, j)] = c;
                }
            }
            Membership::NotMember { index } => {
                return Err(Error::internal(format!(
                    "T_{p} image of basis element {j} of S_{}({}) leaves the space \
                     (first offending coefficient {index}); Hecke stability violated",
                    space.weight, space.level
                )));
            }
        }
    }
    Ok(m)
}

/// Twist by a Dirichlet character: f tensor rho = sum rho(n) a_n q^n.
pub fn twist_series<T: Scalar>(f: &QSeries<T>, chi: DirichletCharacter) -> QSeries<T> {
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| match chi.value(n) {
            1 => c.clone(),
            -1 => c.neg(),
            _ => T::zero(),
        })
        .collect();
    QSeries::from_coeffs(coeffs)
}

/// U_p eigenvalue forced by the sign class: -p^kappa for p | i, +p^kappa for
/// the other primes exactly dividing N, and 0 when p^2 | N.
pub fn class_up_scalar(level: u32, class: ClassLabel, p: u64, weight: u32) -> Rational {
    let kappa = weight / 2 - 1;
    let nx = n_cross(level) as u64;
    if (level as u64) % p != 0 {
        panic!("U_{p} scalar requested for good prime");
    }
    if nx % p != 0 {
        return Rational::zero(); // p^2 | N
    }
    let pk = Rational::from_integer(num_bigint::BigInt::from(p).pow(kappa));
    match class {
        ClassLabel::Sign(i) => {
            if i as u64 % p == 0 {
                -pk
            } else {
                pk
            }
        }
        _ => panic!("sign scalar undefined for level-9 partition labels"),
    }
}

/// Sign classification of a computed eigenform from its own coefficients:
/// i is the product of the primes p || N with a_p = -p^kappa. Verifies
/// a_p = +p^kappa for the remaining p || N and a_p = 0 for p^2 | N.
pub fn classify_sign(f: &Eigenform) -> Result<u32> {
    let n = f.level;
    let kappa = f.kappa();
    let nx = n_cross(n);
    let mut sign_class = 1u32;
    for p in prime_divisors(n) {
        let ap = f.coefficient(p as usize);
        if nx % p == 0 {
            let pk = QuadExt::from_rational(Rational::from_integer(
                num_bigint::BigInt::from(p).pow(kappa),
            ));
            if *ap == pk.checked_neg() {
                sign_class *= p;
            } else if *ap != pk {
                return Err(Error::Classification(format!(
                    "a_{p} = {ap} is neither +{p}^{kappa} nor -{p}^{kappa}"
                )));
            }
        } else if !ap.is_zero() {
            return Err(Error::Classification(format!(
                "a_{p} = {ap} must vanish since {p}^2 | {n}"
            )));
        }
    }
    Ok(sign_class)
}

/// Eigenform invariant checks used by tests and the acceptance suite:
/// multiplicativity on coprime indices, the p-power recursion, and the
/// boundary behaviour at primes dividing the level.
pub fn check_eigenform_invariants(f: &Eigenform, coprime_bound: usize, prime_bound: u64) -> Result<()> {
    let prec = f.series.prec();
    let k = f.weight;
    let n = f.level;
    if !f.series.coeff(1).to_rational().map_or(false, |r| r.is_one()) {
        return Err(Error::Classification("a_1 must be 1".into()));
    }
    // multiplicativity a_l a_m = a_{lm}, (l, m) = 1
    for l in 2..=coprime_bound {
        for m in l..=coprime_bound {
            if gcd(l, m) != 1 || l * m >= prec {
                continue;
            }
            let lhs = f.series.coeff(l).checked_mul(f.series.coeff(m))?;
            if &lhs != f.series.coeff(l * m) {
                return Err(Error::Classification(format!(
                    "multiplicativity fails at ({l}, {m})"
                )));
            }
        }
    }
    // p-power recursion a_p a_{p^{j-1}} = a_{p^j} + p^{k-1} a_{p^{j-2}} (p good)
    for p in HECKE_PRIMES.iter().copied().filter(|&p| p <= prime_bound) {
        let p_us = p as usize;
        if n as u64 % p == 0 {
            // a_{p^j} = a_p^j for p | N
            let mut power = f.series.coeff(p_us).clone();
            let mut idx = p_us;
            while idx * p_us < prec {
                idx *= p_us;
                power = power.checked_mul(f.series.coeff(p_us))?;
                if &power != f.series.coeff(idx) {
                    return Err(Error::Classification(format!(
                        "U_p power rule fails at p = {p}, index {idx}"
                    )));
                }
            }
            continue;
        }
        let pk = QuadExt::from_rational(Rational::from_integer(
            num_bigint::BigInt::from(p).pow(k - 1),
        ));
        let mut j = 2usize;
        while p_us.pow(j as u32) < prec {
            let pj = p_us.pow(j as u32);
            let lhs = f.series.coeff(p_us).checked_mul(f.series.coeff(pj / p_us))?;
            let tail = if j >= 2 {
                pk.checked_mul(f.series.coeff(pj / p_us / p_us))?
            } else {
                QuadExt::zero()
            };
            let rhs = f.series.coeff(pj).checked_add(&tail)?;
            if lhs != rhs {
                return Err(Error::Classification(format!(
                    "p-power recursion fails at p = {p}, j = {j}"
                )));
            }
            j += 1;
        }
    }
    // boundary behaviour at p | N re-checked via classify_sign
    match f.class {
        ClassLabel::Sign(i) => {
            let computed = classify_sign(f)?;
            if computed != i {
                return Err(Error::Classification(format!(
                    "sign class mismatch: labelled {i}, computed {computed}"
                )));
            }
        }
        _ => {
            // level 9: a_3 = 0
            if !f.series.coeff(3).is_zero() {
                return Err(Error::Classification("a_3 must vanish at level 9".into()));
            }
        }
    }
    Ok(())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Coefficientwise trace over a block: for a quadratic pair this is twice
/// the rational part; used when summing eigenforms of a class.
pub fn orbit_trace_series(f: &Eigenform) -> RSeries {
    match f.field {
        EigenField::Rational | EigenField::CharpolyOnly { .. } => {
            f.series.demote().expect("trace series must be rational")
        }
        EigenField::Quadratic { .. } => f.series.map(|c| c.trace()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::special::{SeriesCache, SeriesId};

    #[test]
    fn t2_on_delta1() {
        let mut cache = SeriesCache::new();
        let d1 = cache.get(SeriesId::Delta(1), 40).unwrap();
        let img = hecke_image(&d1, 2, 12, 1).unwrap();
        let expect = d1.scale(&rat(-24));
        for n in 0..img.prec() {
            assert_eq!(img.coeff(n), expect.coeff(n), "T_2 Delta_1 at {n}");
        }
    }

    #[test]
    fn u2_on_delta2() {
        let mut cache = SeriesCache::new();
        let d2 = cache.get(SeriesId::Delta(2), 40).unwrap();
        let img = hecke_image(&d2, 2, 8, 2).unwrap();
        let expect = d2.scale(&rat(-8));
        for n in 0..img.prec() {
            assert_eq!(img.coeff(n), expect.coeff(n), "U_2 Delta_2 at {n}");
        }
    }

    #[test]
    fn tp_on_zero() {
        let z = RSeries::zero(20);
        let img = hecke_image(&z, 3, 12, 1).unwrap();
        assert!(img.is_zero());
    }

    #[test]
    fn insufficient_precision_rejected() {
        let f = RSeries::one(2);
        assert!(matches!(
            hecke_image(&f, 3, 12, 1),
            Err(Error::Precision { .. })
        ));
    }

    #[test]
    fn s24_level1_matrix() {
        let mut cache = SeriesCache::new();
        let space = crate::ringspace::basis_sk(&mut cache, 1, 24, 2 * 50).unwrap();
        assert_eq!(space.dim(), 2);
        let m = hecke_matrix(&space, 2).unwrap();
        assert_eq!(m.trace(), rat(1080));
        let cp = crate::linalg::charpoly(&m);
        // X^2 - 1080 X + (540^2 - 144*144169)
        assert_eq!(cp, IntPoly::from_i64(&[291600 - 144 * 144169, -1080, 1]));
    }

    #[test]
    fn hecke_operators_commute() {
        let mut cache = SeriesCache::new();
        let space = crate::ringspace::basis_sk(&mut cache, 1, 24, 3 * 50).unwrap();
        let t2 = hecke_matrix(&space, 2).unwrap();
        let t3 = hecke_matrix(&space, 3).unwrap();
        assert_eq!(t2.matmul(&t3), t3.matmul(&t2));
    }

    #[test]
    fn twist_by_rho3() {
        let mut cache = SeriesCache::new();
        let d1 = cache.get(SeriesId::Delta(1), 10).unwrap();
        let t = twist_series(&d1, DirichletCharacter::rho3());
        assert_eq!(t.coeff(1), &rat(1));
        assert_eq!(t.coeff(2), &rat(24)); // rho3(2) = -1 flips -24
        assert!(t.coeff(3).is_zero());
        assert_eq!(t.coeff(4), &rat(-1472));
    }

    #[test]
    fn n_cross_values() {
        assert_eq!(n_cross(1), 1);
        assert_eq!(n_cross(2), 2);
        assert_eq!(n_cross(4), 1);
        assert_eq!(n_cross(6), 6);
        assert_eq!(n_cross(8), 1);
        assert_eq!(n_cross(9), 1);
    }
}

//! The two coefficient lemmas: recovering the difference form of a
//! conjugate pair from its half-sum, and reconstructing the characteristic
//! polynomial of a_p over a set of r <= 5 primitive forms from the
//! coefficients of their sum.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{IntPoly, Rational};
use crate::qseries::RSeries;

/// The p-power relations for phi = (f - g)/2 in terms of sigma = (f + g)/2:
///
///   a_p(phi)^2        = -a_p(sigma)^2 + a_{p^2}(sigma) + p^{k-1}
///   a_{p^2}(phi)      = 2 a_p(sigma) * a_p(phi)
///   a_{p^3}(phi)      = (2 a_p(sigma)^2 + a_{p^2}(sigma) - p^{k-1}) a_p(phi)
#[derive(Clone, Debug, PartialEq)]
pub struct PairSplit {
    pub ap_phi_squared: Rational,
    /// a_{p^2}(phi) / a_p(phi).
    pub ap2_ratio: Rational,
    /// a_{p^3}(phi) / a_p(phi).
    pub ap3_ratio: Rational,
}

/// Apply Lemma-1 relations to the half-sum sigma = (f+g)/2 of a conjugate
/// pair, at a prime p not dividing the level. `sigma` must carry at least
/// p^3 + 1 coefficients.
pub fn pair_split(sigma: &RSeries, p: u64, weight: u32, level: u32) -> Result<PairSplit> {
    if level as u64 % p == 0 {
        return Err(Error::domain(format!("pair_split requires p = {p} coprime to the level")));
    }
    let p_us = p as usize;
    let needed = p_us * p_us * p_us + 1;
    if sigma.prec() < needed {
        return Err(Error::Precision { needed, available: sigma.prec() });
    }
    let pk = Rational::from_integer(BigInt::from(p).pow(weight - 1));
    let ap = sigma.coeff(p_us);
    let ap2 = sigma.coeff(p_us * p_us);
    let ap_phi_squared = -(ap * ap) + ap2 + &pk;
    let ap2_ratio = Rational::from_integer(BigInt::from(2)) * ap;
    let ap3_ratio = Rational::from_integer(BigInt::from(2)) * ap * ap + ap2 - &pk;
    Ok(PairSplit { ap_phi_squared, ap2_ratio, ap3_ratio })
}

/// Coprime-index identity: a_l(phi) a_m(phi) = a_{lm}(sigma) - a_l(sigma) a_m(sigma).
pub fn pair_product_coprime(sigma: &RSeries, l: usize, m: usize) -> Result<Rational> {
    if gcd(l, m) != 1 {
        return Err(Error::domain("indices must be coprime".into()));
    }
    if sigma.prec() <= l * m {
        return Err(Error::Precision { needed: l * m + 1, available: sigma.prec() });
    }
    Ok(sigma.coeff(l * m) - sigma.coeff(l) * sigma.coeff(m))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Characteristic polynomial prod_i (X - a_p(f_i)) of r primitive forms from
/// the coefficients a_{p^j}(sigma) of their *sum* sigma = f_1 + ... + f_r.
///
/// `sigma_powers` holds a_p(sigma), a_{p^2}(sigma), ..., a_{p^r}(sigma).
/// r = 2 goes through the pair relations; r = 3, 4, 5 implement the displayed
/// A_{m,n} combinations, with A_{m,n} = m a_{p^2} + n p^{k-1} and
/// A_{l,m,n} = l a_{p^2}^2 + m a_{p^2} p^{k-1} + n p^{2(k-1)}.
pub fn newton_charpoly(
    sigma_powers: &[Rational],
    r: usize,
    p: u64,
    weight: u32,
) -> Result<IntPoly> {
    if !(2..=5).contains(&r) {
        return Err(Error::domain(format!("newton_charpoly supports r in 2..=5, got {r}")));
    }
    if sigma_powers.len() < r {
        return Err(Error::domain(format!(
            "need a_p(sigma) .. a_(p^{r})(sigma), got {} values",
            sigma_powers.len()
        )));
    }
    let pk = Rational::from_integer(BigInt::from(p).pow(weight - 1));
    let pk2 = &pk * &pk;
    let c = |j: usize| sigma_powers[j - 1].clone(); // a_{p^j}(sigma)
    let s = c(1);
    let q = |n: i64| Rational::from_integer(BigInt::from(n));

    // A_{m,n} and A_{l,m,n} straight from the displayed formulas
    let a2 = |m: i64, n: i64| q(m) * c(2) + q(n) * &pk;
    let a3 = |l: i64, m: i64, n: i64| q(l) * c(2) * c(2) + q(m) * c(2) * &pk + q(n) * &pk2;

    // elementary symmetric functions e_1 .. e_r of the a_p(f_i)
    let e1 = s.clone();
    let e2 = (&s * &s - a2(1, r as i64)) / q(2);
    let mut es = vec![Rational::one(), e1, e2];
    if r >= 3 {
        let m = match r {
            3 => 5,
            4 => 8,
            5 => 11,
            _ => unreachable!(),
        };
        let e3 = (&s * &s * &s - &s * a2(3, m) + q(2) * c(3)) / q(6);
        es.push(e3);
    }
    if r >= 4 {
        let s2 = &s * &s;
        let e4 = match r {
            4 => {
                (&s2 * &s2 - q(2) * &s2 * a2(3, 4) + q(8) * &s * c(3) + q(3) * c(2) * a2(1, 2)
                    - q(6) * c(4))
                    / q(24)
            }
            5 => {
                (&s2 * &s2 - q(2) * &s2 * a2(3, 7) + q(8) * &s * c(3) + q(3) * a3(1, 4, 5)
                    - q(6) * c(4))
                    / q(24)
            }
            _ => unreachable!(),
        };
        es.push(e4);
    }
    if r == 5 {
        let s2 = &s * &s;
        let e5 = (&s2 * &s2 * &s - q(10) * &s2 * &s * a2(1, 1) + q(20) * &s2 * c(3)
            + q(5) * &s * a3(3, 4, -1)
            - q(30) * &s * c(4)
            - q(5) * c(3) * a2(4, 1)
            + q(24) * c(5))
            / q(120);
        es.push(e5);
    }

    // charpoly = X^r - e1 X^{r-1} + e2 X^{r-2} - ...
    let mut coeffs = vec![BigInt::zero(); r + 1];
    for (j, e) in es.iter().enumerate() {
        let signed = if j % 2 == 0 { e.clone() } else { -e.clone() };
        if !signed.is_integer() {
            return Err(Error::internal(format!(
                "elementary symmetric function e_{j} is not integral: {signed}"
            )));
        }
        coeffs[r - j] = signed.to_integer();
    }
    Ok(IntPoly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use rand::{Rng, SeedableRng};

    /// Encode chosen eigenvalues a_1..a_r as sigma power-sum coefficients:
    /// a_{p^j}(f_i) follows the recursion a_p a_{p^{j-1}} = a_{p^j} + p^{k-1} a_{p^{j-2}},
    /// and sigma sums over the forms.
    fn sigma_powers_from_roots(roots: &[i64], p: u64, weight: u32) -> Vec<Rational> {
        let pk = Rational::from_integer(BigInt::from(p).pow(weight - 1));
        let r = roots.len();
        let mut out = vec![Rational::zero(); r];
        for &a in roots {
            // per-form prime power coefficients
            let mut prev2 = Rational::one(); // a_{p^0}
            let mut prev1 = rat(a); // a_{p^1}
            out[0] += &prev1;
            for j in 2..=r {
                let next = rat(a) * &prev1 - &pk * &prev2;
                if j - 1 < out.len() + 1 && j <= r {
                    out[j - 1] += &next;
                }
                prev2 = prev1;
                prev1 = next;
            }
        }
        out
    }

    fn product_poly(roots: &[i64]) -> IntPoly {
        let mut acc = IntPoly::from_i64(&[1]);
        for &a in roots {
            acc = acc.mul(&IntPoly::linear(&BigInt::from(a)));
        }
        acc
    }

    #[test]
    fn repeated_root() {
        for r in 2..=5usize {
            let roots = vec![7i64; r];
            let pows = sigma_powers_from_roots(&roots, 2, 12);
            let cp = newton_charpoly(&pows, r, 2, 12).unwrap();
            assert_eq!(cp, product_poly(&roots), "(X-7)^{r}");
        }
    }

    #[test]
    fn randomized_against_bruteforce() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(20260810);
        let mut cases = 0;
        while cases < 1200 {
            let r = rng.gen_range(2..=5usize);
            let p = [2u64, 3, 5][rng.gen_range(0..3)];
            let k = [4u32, 8, 12, 16][rng.gen_range(0..4)];
            let roots: Vec<i64> = (0..r).map(|_| rng.gen_range(-500..=500)).collect();
            let pows = sigma_powers_from_roots(&roots, p, k);
            let cp = newton_charpoly(&pows, r, p, k).unwrap();
            assert_eq!(cp, product_poly(&roots), "roots {roots:?}, p={p}, k={k}");
            cases += 1;
        }
    }

    #[test]
    fn pair_split_trivial_case() {
        // f = g: sigma is the eigenform itself, so a_p(phi)^2 = 0.
        let mut cache = crate::special::SeriesCache::new();
        let d1 = cache.get(crate::special::SeriesId::Delta(1), 30).unwrap();
        let ps = pair_split(&d1, 2, 12, 1).unwrap();
        assert!(ps.ap_phi_squared.is_zero());
    }

    #[test]
    fn rejects_bad_prime_and_range() {
        let s = RSeries::one(30);
        assert!(pair_split(&s, 2, 8, 2).is_err());
        assert!(newton_charpoly(&[rat(1)], 1, 2, 12).is_err());
        assert!(newton_charpoly(&[rat(1)], 6, 2, 12).is_err());
    }
}

//! Monomial bases of the graded rings M(N) and the cusp spaces they carry.
//!
//! Each of the seven levels has a two-generator presentation:
//!
//!   M(1) = C[E4, E6]            weights (4, 6)
//!   M(2) = C[C2, alpha2]        weights (2, 4)
//!   M(3) = C[F3, alpha3]_2Z     weights (1, 3)
//!   M(4) = C[F4, alpha4]_2Z     weights (1, 2)
//!   M(6) = C[F3, alpha6]_2Z     weights (1, 1)
//!   M(8) = C[F4, alpha8]_2Z     weights (1, 1)
//!   M(9) = C[F3, alpha9]_2Z     weights (1, 1)
//!
//! (the _2Z subscript restricts to even total weight). Cusp spaces are
//! defined as S_k(N) = Delta_N * M_{k-w}(N): q-expansions at one cusp cannot
//! certify vanishing at the others, but the graded ideal S(N) = (Delta_N)
//! makes the cusp space a principal slice, and the dimension cross-check
//! against the newform counting tables validates the definition at every
//! weight the engine touches.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactnum::{QuadExt, Rational};
use crate::linalg::{self, QMat};
use crate::qseries::{RSeries, XSeries};
use crate::special::{delta_weight, SeriesCache, SeriesId};

/// The two ring generators of M(N) with their weights.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub level: u32,
    pub gens: [(SeriesId, u32); 2],
    pub even_only: bool,
}

pub const LEVELS: [u32; 7] = [1, 2, 3, 4, 6, 8, 9];

pub fn generators(level: u32) -> Result<GeneratorSet> {
    let (gens, even_only) = match level {
        1 => ([(SeriesId::E(4), 4), (SeriesId::E(6), 6)], false),
        2 => ([(SeriesId::C(2), 2), (SeriesId::Alpha(2), 4)], false),
        3 => ([(SeriesId::F(3), 1), (SeriesId::Alpha(3), 3)], true),
        4 => ([(SeriesId::F(4), 1), (SeriesId::Alpha(4), 2)], true),
        6 => ([(SeriesId::F(3), 1), (SeriesId::Alpha(6), 1)], true),
        8 => ([(SeriesId::F(4), 1), (SeriesId::Alpha(8), 1)], true),
        9 => ([(SeriesId::F(3), 1), (SeriesId::Alpha(9), 1)], true),
        _ => return Err(Error::domain(format!("no ring presentation for level {level}"))),
    };
    Ok(GeneratorSet { level, gens, even_only })
}

/// Index of Gamma_0(N) in SL_2(Z) for the supported levels.
fn index(level: u32) -> u32 {
    match level {
        1 => 1,
        2 => 3,
        3 => 4,
        4 => 6,
        6 | 8 | 9 => 12,
        _ => panic!("unsupported level {level}"),
    }
}

/// Number of q-expansion coefficients that pin down a form of weight k and
/// level N: ceil(k * [SL2 : Gamma_0(N)] / 12) plus a margin of 10.
pub fn sturm_precision(level: u32, weight: u32) -> usize {
    let idx = index(level);
    let num = weight * idx;
    (num as usize + 11) / 12 + 10
}

/// All exponent pairs (a, b) with a*w1 + b*w2 = k, ordered by ascending b.
/// For even-only rings callers must pass even k; the individual exponents may
/// still be odd.
pub fn monomials(level: u32, weight: u32) -> Result<Vec<(u32, u32)>> {
    let gs = generators(level)?;
    let (w1, w2) = (gs.gens[0].1, gs.gens[1].1);
    let mut out = Vec::new();
    let mut b = 0;
    while b * w2 <= weight {
        let rem = weight - b * w2;
        if rem % w1 == 0 {
            out.push((rem / w1, b));
        }
        b += 1;
    }
    Ok(out)
}

pub fn dim_mk(level: u32, weight: u32) -> Result<usize> {
    if weight % 2 != 0 {
        return Err(Error::domain("exposed spaces have even weight"));
    }
    Ok(monomials(level, weight)?.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Full space M_k(N).
    Full,
    /// Cusp space S_k(N) = Delta_N * M_{k-w}(N).
    Cusp,
}

/// A weight-k level-N space with an explicit exact basis of q-expansions.
#[derive(Clone, Debug)]
pub struct FormSpace {
    pub level: u32,
    pub weight: u32,
    pub kind: SpaceKind,
    pub prec: usize,
    pub basis: Vec<RSeries>,
    /// Monomial exponents of the M-part per basis element.
    pub exponents: Vec<(u32, u32)>,
    solver: Solver,
}

/// Precomputed reduction data for membership solves against the basis.
#[derive(Clone, Debug)]
struct Solver {
    /// RREF of the basis coefficient matrix restricted to the solve window.
    rref: QMat,
    /// Transform with transform * basis_window = rref.
    transform: QMat,
    /// Pivot coefficient indices inside the window.
    pivots: Vec<usize>,
    window: usize,
}

/// Result of a membership solve.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Member(Vec<Rational>),
    /// Certificate: first coefficient index where the reduction fails.
    NotMember { index: usize },
}

impl Membership {
    pub fn coordinates(self) -> Option<Vec<Rational>> {
        match self {
            Membership::Member(x) => Some(x),
            Membership::NotMember { .. } => None,
        }
    }
}

impl FormSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis coefficient matrix: rows = basis elements, cols = coefficients.
    pub fn coeff_matrix(&self, cols: usize) -> QMat {
        let cols = cols.min(self.prec);
        let rows = self
            .basis
            .iter()
            .map(|s| s.coeffs()[..cols].to_vec())
            .collect();
        QMat::from_rows(rows)
    }

    /// Express a series in this basis or produce a non-membership
    /// certificate. Requires prec(f) >= sturm_precision(N, k); membership is
    /// decided on the solve window and then re-verified on every coefficient
    /// both sides know.
    pub fn solve_in_basis(&self, f: &RSeries) -> Result<Membership> {
        let window = self.solver.window;
        if f.prec() < window {
            return Err(Error::Precision { needed: window, available: f.prec() });
        }
        let dim = self.dim();
        if dim == 0 {
            return Ok(match f.coeffs().iter().position(|c| !c.is_zero()) {
                None => Membership::Member(vec![]),
                Some(index) => Membership::NotMember { index },
            });
        }
        // reduce f against the RREF rows
        let mut y = vec![Rational::zero(); dim];
        let mut residual: Vec<Rational> = f.coeffs()[..window].to_vec();
        for (i, &p) in self.solver.pivots.iter().enumerate() {
            let c = residual[p].clone();
            if c.is_zero() {
                continue;
            }
            y[i] = c.clone();
            for j in 0..window {
                let sub = &c * &self.solver.rref[(i, j)];
                residual[j] -= sub;
            }
        }
        if let Some(idx) = residual.iter().position(|c| !c.is_zero()) {
            return Ok(Membership::NotMember { index: idx });
        }
        // x = y * transform gives coordinates on the original basis
        let mut x = vec![Rational::zero(); dim];
        for i in 0..dim {
            if y[i].is_zero() {
                continue;
            }
            for j in 0..dim {
                let add = &y[i] * &self.solver.transform[(i, j)];
                x[j] += add;
            }
        }
        // verify on all remaining known coefficients
        let upto = f.prec().min(self.prec);
        for n in window..upto {
            let mut acc = Rational::zero();
            for (j, b) in self.basis.iter().enumerate() {
                if !x[j].is_zero() {
                    acc += &x[j] * b.coeff(n);
                }
            }
            if &acc != f.coeff(n) {
                return Ok(Membership::NotMember { index: n });
            }
        }
        Ok(Membership::Member(x))
    }

    /// Membership for a series over Q(sqrt(D)): rational and irrational parts
    /// must lie in the (rational) span separately.
    pub fn solve_in_basis_quad(&self, f: &XSeries) -> Result<Option<Vec<QuadExt>>> {
        let rat_part = f.map(|c| c.rat_part().clone());
        let irr_part = f.map(|c| c.irr_part().clone());
        let d = f
            .coeffs()
            .iter()
            .map(|c| c.radicand())
            .find(|&d| d != 1)
            .unwrap_or(1);
        let Membership::Member(xr) = self.solve_in_basis(&rat_part)? else {
            return Ok(None);
        };
        let Membership::Member(xi) = self.solve_in_basis(&irr_part)? else {
            return Ok(None);
        };
        let mut out = Vec::with_capacity(xr.len());
        for (r, i) in xr.into_iter().zip(xi) {
            out.push(QuadExt::new(r, i, d)?);
        }
        Ok(Some(out))
    }

    /// The series with the given coordinates on this basis.
    pub fn combination(&self, coords: &[Rational]) -> RSeries {
        assert_eq!(coords.len(), self.dim());
        let mut acc = RSeries::zero(self.prec);
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = acc.add(&b.scale(c));
            }
        }
        acc
    }

    pub fn combination_quad(&self, coords: &[QuadExt]) -> XSeries {
        assert_eq!(coords.len(), self.dim());
        let mut acc = XSeries::zero(self.prec);
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = acc.add(&b.promote().scale(c));
            }
        }
        acc
    }
}

fn build_solver(level: u32, weight: u32, basis: &[RSeries], prec: usize) -> Result<Solver> {
    let window = sturm_precision(level, weight).min(prec);
    let rows = basis.iter().map(|s| s.coeffs()[..window].to_vec()).collect();
    let m = QMat::from_rows(rows);
    let (rref, transform, pivots) = linalg::rref_transform(&m);
    if pivots.len() != basis.len() {
        return Err(Error::internal(format!(
            "monomial basis of level {level} weight {weight} is linearly dependent \
             ({} of {} independent): this would falsify the ring presentation",
            pivots.len(),
            basis.len()
        )));
    }
    Ok(Solver { rref, transform, pivots, window })
}

/// Monomial basis of M_k(N) to the given precision. Independence of the
/// monomials is verified by exact row reduction on construction.
pub fn basis_mk(cache: &mut SeriesCache, level: u32, weight: u32, prec: usize) -> Result<FormSpace> {
    if weight % 2 != 0 {
        return Err(Error::domain("exposed spaces have even weight"));
    }
    let prec = prec.max(sturm_precision(level, weight));
    let gs = generators(level)?;
    let exps = monomials(level, weight)?;
    let g1 = cache.get(gs.gens[0].0, prec)?;
    let g2 = cache.get(gs.gens[1].0, prec)?;
    let max_a = exps.iter().map(|e| e.0).max().unwrap_or(0);
    let max_b = exps.iter().map(|e| e.1).max().unwrap_or(0);
    let mut pow1 = Vec::with_capacity(max_a as usize + 1);
    pow1.push(RSeries::one(prec));
    for a in 1..=max_a {
        let next = pow1[a as usize - 1].mul(&g1);
        pow1.push(next);
    }
    let mut pow2 = Vec::with_capacity(max_b as usize + 1);
    pow2.push(RSeries::one(prec));
    for b in 1..=max_b {
        let next = pow2[b as usize - 1].mul(&g2);
        pow2.push(next);
    }
    let basis: Vec<RSeries> = exps
        .iter()
        .map(|&(a, b)| pow1[a as usize].mul(&pow2[b as usize]))
        .collect();
    let solver = build_solver(level, weight, &basis, prec)?;
    Ok(FormSpace { level, weight, kind: SpaceKind::Full, prec, basis, exponents: exps, solver })
}

/// Cusp space S_k(N) = Delta_N * M_{k-w}(N). Empty when k < w.
pub fn basis_sk(cache: &mut SeriesCache, level: u32, weight: u32, prec: usize) -> Result<FormSpace> {
    if weight % 2 != 0 {
        return Err(Error::domain("exposed spaces have even weight"));
    }
    let w = delta_weight(level);
    let prec = prec.max(sturm_precision(level, weight));
    if weight < w {
        return Ok(FormSpace {
            level,
            weight,
            kind: SpaceKind::Cusp,
            prec,
            basis: vec![],
            exponents: vec![],
            solver: Solver {
                rref: QMat::zero(0, 0),
                transform: QMat::zero(0, 0),
                pivots: vec![],
                window: sturm_precision(level, weight).min(prec),
            },
        });
    }
    let m = basis_mk(cache, level, weight - w, prec)?;
    let delta = cache.get(SeriesId::Delta(level), prec)?;
    let basis: Vec<RSeries> = m.basis.iter().map(|b| delta.mul(b)).collect();
    for b in &basis {
        debug_assert!(b.coeff(0).is_zero(), "cusp basis element with nonzero constant term");
    }
    let solver = build_solver(level, weight, &basis, prec)?;
    Ok(FormSpace {
        level,
        weight,
        kind: SpaceKind::Cusp,
        prec,
        basis,
        exponents: m.exponents,
        solver,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, ratio};
    use crate::linalg::rank;

    #[test]
    fn monomials_examples() {
        assert_eq!(monomials(1, 12).unwrap(), vec![(3, 0), (0, 2)]);
        assert_eq!(monomials(2, 8).unwrap(), vec![(4, 0), (2, 1), (0, 2)]);
        assert_eq!(
            monomials(6, 4).unwrap(),
            vec![(4, 0), (3, 1), (2, 2), (1, 3), (0, 4)]
        );
    }

    #[test]
    fn dims_level_one() {
        assert_eq!(dim_mk(1, 12).unwrap(), 2);
        for k in (0..=40u32).step_by(2) {
            let count = (0..=k / 6)
                .filter(|b| (k - 6 * b) % 4 == 0)
                .count();
            assert_eq!(dim_mk(1, k).unwrap(), count, "dim M_{k}(1)");
        }
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(sturm_precision(1, 12), 11);
        assert_eq!(sturm_precision(6, 24), 34);
    }

    #[test]
    fn level6_weight12_rank() {
        let mut cache = SeriesCache::new();
        let space = basis_mk(&mut cache, 6, 12, 40).unwrap();
        assert_eq!(space.dim(), 13);
        let m = space.coeff_matrix(40);
        assert_eq!(rank(&m), 13);
    }

    #[test]
    fn delta1_coordinates_in_m12() {
        let mut cache = SeriesCache::new();
        let space = basis_mk(&mut cache, 1, 12, 30).unwrap();
        let d1 = cache.get(SeriesId::Delta(1), 30).unwrap();
        let m = space.solve_in_basis(&d1).unwrap();
        // basis ordered (E4^3, E6^2); Delta_1 = (E4^3 - E6^2)/1728
        assert_eq!(
            m,
            Membership::Member(vec![ratio(1, 1728), ratio(-1, 1728)])
        );
    }

    #[test]
    fn zero_series_membership() {
        let mut cache = SeriesCache::new();
        let space = basis_mk(&mut cache, 1, 12, 30).unwrap();
        let z = RSeries::zero(30);
        assert_eq!(
            space.solve_in_basis(&z).unwrap(),
            Membership::Member(vec![rat(0), rat(0)])
        );
    }

    #[test]
    fn e4_cubed_not_cuspidal() {
        let mut cache = SeriesCache::new();
        let s12 = basis_sk(&mut cache, 1, 12, 30).unwrap();
        assert_eq!(s12.dim(), 1);
        let e4 = cache.get(SeriesId::E(4), 30).unwrap();
        match s12.solve_in_basis(&e4.pow(3)).unwrap() {
            Membership::NotMember { index } => assert_eq!(index, 0, "fails at a_0 = 1 != 0"),
            other => panic!("expected non-membership, got {other:?}"),
        }
    }

    #[test]
    fn cusp_space_dimension_example() {
        let mut cache = SeriesCache::new();
        let s16 = basis_sk(&mut cache, 2, 16, 40).unwrap();
        assert_eq!(s16.dim(), 3, "dim S_16(2) = dim M_8(2)");
    }

    #[test]
    fn membership_precision_error() {
        let mut cache = SeriesCache::new();
        let space = basis_mk(&mut cache, 1, 12, 30).unwrap();
        let short = RSeries::one(3);
        assert!(matches!(
            space.solve_in_basis(&short),
            Err(crate::Error::Precision { .. })
        ));
    }

    #[test]
    fn random_delta_multiples_are_members() {
        let mut cache = SeriesCache::new();
        let s20 = basis_sk(&mut cache, 2, 20, 50).unwrap();
        let m12 = basis_mk(&mut cache, 2, 12, 50).unwrap();
        let delta = cache.get(SeriesId::Delta(2), 50).unwrap();
        // pseudo-random combination of M_12(2) monomials
        let coords: Vec<Rational> =
            (0..m12.dim()).map(|i| rat((7 * i as i64 + 3) % 11 - 5)).collect();
        let g = m12.combination(&coords);
        let f = delta.mul(&g);
        assert!(matches!(s20.solve_in_basis(&f).unwrap(), Membership::Member(_)));
    }
}

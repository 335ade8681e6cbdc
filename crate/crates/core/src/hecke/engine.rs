//! The newform engine: old/new splitting, sign-class decomposition, block
//! refinement and eigenform extraction, per (level, weight) cell.
//!
//! The pipeline per cell:
//!
//! 1. Build S_k(N) = Delta_N * M_{k-w}(N) at prec = 13 * sturm(N, k).
//! 2. Span the old subspace by b(q) and b(q^p) for b running over the cusp
//!    bases of the levels N/p; this telescopes to the full old space without
//!    needing lower eigenforms.
//! 3. Pass to the quotient S/old, where every Hecke operator descends; its
//!    dimension is #P_k(N) with each Galois conjugate counted once.
//! 4. Split the quotient into sign classes by the rational kernel conditions
//!    U_p = +-p^kappa (U_p = 0 when p^2 | N). At level 9 the twists of
//!    level-1 and level-3 newforms are removed instead (they are explicit
//!    series), leaving the genuinely new part.
//! 5. Refine each class into irreducible Hecke blocks by factoring
//!    characteristic polynomials of T_p over the good primes up to 13.
//! 6. Lift each block back to actual q-expansions as the intersection of
//!    charpoly kernels on the full space, and read off eigenforms: 1-dim
//!    blocks are rational, 2-dim irreducible blocks conjugate quadratic
//!    pairs, and anything larger stays at the characteristic-polynomial
//!    level with an exact trace form.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{squarefree_u128, IntPoly, QuadExt, Rational};
use crate::linalg::{self, QMat, QVec};
use crate::qseries::{RSeries, XSeries};
use crate::ringspace::{basis_sk, sturm_precision, FormSpace, Membership};
use crate::special::{delta_weight, DirichletCharacter, SeriesCache};

use super::{
    divisors, good_primes, hecke_matrix, n_cross, prime_divisors, twist_series, Block, BlockKind,
    ClassLabel, EigenField, Eigenform, HECKE_PRIMES,
};

/// Largest prime the extraction pipeline applies, which fixes the precision
/// policy prec = PRIME_CAP * sturm.
const PRIME_CAP: usize = 13;

/// An oldform occurrence: a lower-level eigenform embedded via q -> q^d.
#[derive(Clone, Debug)]
pub struct OldForm {
    pub source_level: u32,
    pub shift: u32,
    pub form: Eigenform,
}

/// Fully processed (level, weight) cell.
#[derive(Debug)]
pub struct Cell {
    pub level: u32,
    pub weight: u32,
    pub prec: usize,
    pub space: FormSpace,
    pub old_dim: usize,
    /// #P_k(N): dimension of the new quotient.
    pub new_dim: usize,
    /// Dimension per class label (twist part included for level 9).
    pub class_dims: Vec<(ClassLabel, usize)>,
    pub blocks: Vec<Block>,
    pub eigenforms: Vec<Eigenform>,
}

impl Cell {
    fn empty(level: u32, weight: u32, prec: usize, space: FormSpace) -> Self {
        Cell {
            level,
            weight,
            prec,
            space,
            old_dim: 0,
            new_dim: 0,
            class_dims: vec![],
            blocks: vec![],
            eigenforms: vec![],
        }
    }

    /// Number of newforms in a class, Galois conjugates counted separately.
    pub fn class_dim(&self, class: ClassLabel) -> usize {
        self.class_dims
            .iter()
            .find(|(c, _)| *c == class)
            .map(|(_, d)| *d)
            .unwrap_or(0)
    }

    pub fn forms_in_class(&self, class: ClassLabel) -> Vec<&Eigenform> {
        self.eigenforms.iter().filter(|f| f.class == class).collect()
    }
}

/// Light-weight counting result (no eigenform extraction).
#[derive(Clone, Debug)]
pub struct Counts {
    pub level: u32,
    pub weight: u32,
    pub cusp_dim: usize,
    pub old_dim: usize,
    pub new_dim: usize,
    pub class_dims: Vec<(ClassLabel, usize)>,
}

/// Memoizing driver around the per-cell pipeline.
#[derive(Default)]
pub struct Engine {
    pub cache: SeriesCache,
    cells: HashMap<(u32, u32), Rc<Cell>>,
    counts: HashMap<(u32, u32), Counts>,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    // ---- counting mode ----

    /// Dimension bookkeeping only: cheap enough to sweep every k <= 40.
    pub fn counts(&mut self, level: u32, weight: u32) -> Result<Counts> {
        if let Some(c) = self.counts.get(&(level, weight)) {
            return Ok(c.clone());
        }
        let max_p = prime_divisors(level).into_iter().max().unwrap_or(1) as usize;
        let prec = max_p * sturm_precision(level, weight) + 2;
        let space = basis_sk(&mut self.cache, level, weight, prec)?;
        let c = if space.dim() == 0 {
            Counts {
                level,
                weight,
                cusp_dim: 0,
                old_dim: 0,
                new_dim: 0,
                class_dims: self.zero_class_dims(level),
            }
        } else {
            let old = self.old_coordinates(&space)?;
            let (old_rref, old_pivots) = linalg::rref(&rows_to_mat(&old, space.dim()));
            self.check_old_dim(level, weight, old_pivots.len())?;
            let quot = QuotientCtx::new(space.dim(), old_rref, old_pivots);
            let class_dims = self.class_dimensions(&space, &quot, level, weight)?;
            Counts {
                level,
                weight,
                cusp_dim: space.dim(),
                old_dim: quot.sub_rank(),
                new_dim: quot.dim(),
                class_dims,
            }
        };
        self.counts.insert((level, weight), c.clone());
        Ok(c)
    }

    fn zero_class_dims(&self, level: u32) -> Vec<(ClassLabel, usize)> {
        super::counts::class_labels(level)
            .into_iter()
            .map(|l| (l, 0))
            .collect()
    }

    /// Old subspace dimension must match the recursive count
    /// sum_{M | N, M < N} tau(N/M) * #P_k(M).
    fn check_old_dim(&mut self, level: u32, weight: u32, old_dim: usize) -> Result<()> {
        let mut expected = 0usize;
        for m in divisors(level) {
            if m == level {
                continue;
            }
            let tau = divisors(level / m).len();
            expected += tau * self.counts(m, weight)?.new_dim;
        }
        if expected != old_dim {
            return Err(Error::internal(format!(
                "old subspace of S_{weight}({level}) has dimension {old_dim}, \
                 expected {expected} from the divisor recursion"
            )));
        }
        Ok(())
    }

    /// Old-space spanning vectors as coordinates on the cusp basis:
    /// b(q) and b(q^p) for b in the cusp bases of the levels N/p.
    fn old_coordinates(&mut self, space: &FormSpace) -> Result<Vec<QVec>> {
        let level = space.level;
        let mut out = Vec::new();
        for p in prime_divisors(level) {
            let lower = basis_sk(&mut self.cache, level / p, space.weight, space.prec)?;
            for b in &lower.basis {
                for shift in [1u32, p] {
                    let shifted = b.substitute(shift as usize)?;
                    match space.solve_in_basis(&shifted)? {
                        Membership::Member(c) => out.push(c),
                        Membership::NotMember { index } => {
                            return Err(Error::internal(format!(
                                "oldform from level {} (shift {shift}) not in S_{}({}) \
                                 at coefficient {index}",
                                level / p,
                                space.weight,
                                level
                            )))
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Class dimensions on the new quotient, by exact U_p kernels (or twist
    /// removal at level 9).
    fn class_dimensions(
        &mut self,
        space: &FormSpace,
        quot: &QuotientCtx,
        level: u32,
        weight: u32,
    ) -> Result<Vec<(ClassLabel, usize)>> {
        if level == 1 {
            return Ok(vec![(ClassLabel::Sign(1), quot.dim())]);
        }
        if level == 9 {
            let u3 = quot.op_matrix(&hecke_matrix(space, 3)?);
            if !u3.is_zero() {
                return Err(Error::internal("U_3 must vanish on the new part of level 9".into()));
            }
            // Counting mode does not resolve the Zero/Star split (that needs
            // the lifted expansions); Sign(1) carries the P^0 total here.
            let twist_rank = self.twist_span_rank(space, quot, weight)?;
            return Ok(vec![
                (ClassLabel::Sign(1), quot.dim() - twist_rank),
                (ClassLabel::Twist, twist_rank),
            ]);
        }
        let nx = n_cross(level);
        let kappa = weight / 2 - 1;
        // U_p = 0 for p^2 | N
        for p in prime_divisors(level) {
            if nx % p != 0 {
                let up = quot.op_matrix(&hecke_matrix(space, p as u64)?);
                if !up.is_zero() {
                    return Err(Error::internal(format!(
                        "U_{p} must vanish on the new part of level {level}"
                    )));
                }
            }
        }
        // sign kernels per p || N
        let mut kernels: BTreeMap<u32, [Vec<QVec>; 2]> = BTreeMap::new();
        for p in prime_divisors(nx) {
            let up = quot.op_matrix(&hecke_matrix(space, p as u64)?);
            let pk = Rational::from_integer(BigInt::from(p).pow(kappa));
            let plus = linalg::kernel(&up.sub(&QMat::scalar(quot.dim(), &pk)));
            let minus = linalg::kernel(&up.add(&QMat::scalar(quot.dim(), &pk)));
            if plus.len() + minus.len() != quot.dim() {
                return Err(Error::internal(format!(
                    "U_{p} on the new part of S_{weight}({level}) is not semisimple \
                     with eigenvalues +-{p}^{kappa}"
                )));
            }
            kernels.insert(p, [plus, minus]);
        }
        let mut out = Vec::new();
        for i in divisors(nx) {
            let mut basis: Option<Vec<QVec>> = None;
            for (&p, [plus, minus]) in &kernels {
                let part = if i % p == 0 { minus } else { plus };
                basis = Some(match basis {
                    None => part.clone(),
                    Some(b) => intersect_spans(&b, part, quot.dim()),
                });
            }
            let dim = basis.map_or(quot.dim(), |b| b.len());
            out.push((ClassLabel::Sign(i), dim));
        }
        Ok(out)
    }

    /// Rank of the span of twisted level-1 and level-3 cusp bases inside the
    /// new quotient of S_k(9).
    fn twist_span_rank(
        &mut self,
        space: &FormSpace,
        quot: &QuotientCtx,
        weight: u32,
    ) -> Result<usize> {
        let vecs = self.twist_vectors(space, weight)?;
        if vecs.is_empty() {
            return Ok(0);
        }
        let projected: Vec<QVec> = vecs.iter().map(|v| quot.project(v)).collect();
        Ok(linalg::rank(&QMat::from_rows(projected)))
    }

    /// Twisted cusp-basis vectors b tensor rho_3 as coordinates in S_k(9).
    /// Twisting kills the shifted (oldform) directions, so these span
    /// exactly the twists of the level-1 and level-3 newforms.
    fn twist_vectors(&mut self, space: &FormSpace, weight: u32) -> Result<Vec<QVec>> {
        let rho3 = DirichletCharacter::rho3();
        let mut out = Vec::new();
        for m in [1u32, 3] {
            let lower = basis_sk(&mut self.cache, m, weight, space.prec)?;
            for b in &lower.basis {
                let t = twist_series(b, rho3);
                match space.solve_in_basis(&t)? {
                    Membership::Member(c) => out.push(c),
                    Membership::NotMember { index } => {
                        return Err(Error::internal(format!(
                            "twist of a level-{m} cusp form is not in S_{weight}(9) \
                             at coefficient {index}"
                        )))
                    }
                }
            }
        }
        Ok(out)
    }

    // ---- full extraction ----

    pub fn cell(&mut self, level: u32, weight: u32) -> Result<Rc<Cell>> {
        if let Some(c) = self.cells.get(&(level, weight)) {
            return Ok(c.clone());
        }
        let cell = Rc::new(self.build_cell(level, weight)?);
        self.cells.insert((level, weight), cell.clone());
        Ok(cell)
    }

    fn build_cell(&mut self, level: u32, weight: u32) -> Result<Cell> {
        let sturm = sturm_precision(level, weight);
        let prec = PRIME_CAP * sturm + 2;
        let space = basis_sk(&mut self.cache, level, weight, prec)?;
        if space.dim() == 0 {
            return Ok(Cell::empty(level, weight, prec, space));
        }

        let old = self.old_coordinates(&space)?;
        let (old_rref, old_pivots) = linalg::rref(&rows_to_mat(&old, space.dim()));
        self.check_old_dim(level, weight, old_pivots.len())?;
        let quot = QuotientCtx::new(space.dim(), old_rref, old_pivots);

        // ambient operator matrices for every prime in play
        let mut amb: BTreeMap<u64, QMat> = BTreeMap::new();
        for p in HECKE_PRIMES {
            amb.insert(p, hecke_matrix(&space, p)?);
        }
        let qmats: BTreeMap<u64, QMat> =
            amb.iter().map(|(&p, m)| (p, quot.op_matrix(m))).collect();

        let mut blocks: Vec<Block> = Vec::new();
        let mut eigenforms: Vec<Eigenform> = Vec::new();
        let mut class_dims: Vec<(ClassLabel, usize)> = Vec::new();

        if level == 9 {
            self.build_level9(
                &space, &quot, &amb, &qmats, weight, &mut blocks, &mut eigenforms, &mut class_dims,
            )?;
        } else {
            let classes = self.class_subspaces(&space, &quot, level, weight, &qmats)?;
            for (label, basis) in classes {
                class_dims.push((label, basis.len()));
                if basis.is_empty() {
                    continue;
                }
                let refined = refine_blocks(&basis, &qmats, good_primes(level))?;
                for rb in refined {
                    let block = self.finish_block(&space, &amb, label, rb, weight, false)?;
                    emit_eigenforms(&space, &block, blocks.len(), &mut eigenforms)?;
                    blocks.push(block);
                }
            }
        }

        // deterministic ordering
        order_outputs(&mut blocks, &mut eigenforms);

        let new_dim = quot.dim();
        let cell = Cell {
            level,
            weight,
            prec,
            space,
            old_dim: quot.sub_rank(),
            new_dim,
            class_dims,
            blocks,
            eigenforms,
        };
        // blocks must exhaust the quotient
        let total: usize = cell.blocks.iter().map(|b| b.dim).sum();
        if total != new_dim {
            return Err(Error::internal(format!(
                "blocks of S_{weight}({level}) cover {total} of {new_dim} new dimensions"
            )));
        }
        Ok(cell)
    }

    /// Sign-class subspaces of the new quotient, as quotient-coordinate
    /// bases, in divisor order.
    fn class_subspaces(
        &mut self,
        space: &FormSpace,
        quot: &QuotientCtx,
        level: u32,
        weight: u32,
        qmats: &BTreeMap<u64, QMat>,
    ) -> Result<Vec<(ClassLabel, Vec<QVec>)>> {
        let m = quot.dim();
        if level == 1 {
            return Ok(vec![(ClassLabel::Sign(1), identity_basis(m))]);
        }
        let nx = n_cross(level);
        let kappa = weight / 2 - 1;
        for p in prime_divisors(level) {
            if nx % p != 0 {
                let up = qmats
                    .get(&(p as u64))
                    .cloned()
                    .map(Ok)
                    .unwrap_or_else(|| hecke_matrix(space, p as u64).map(|m| quot.op_matrix(&m)))?;
                if !up.is_zero() {
                    return Err(Error::internal(format!(
                        "U_{p} must vanish on the new part of level {level}"
                    )));
                }
            }
        }
        if nx == 1 {
            return Ok(vec![(ClassLabel::Sign(1), identity_basis(m))]);
        }
        let mut kernels: BTreeMap<u32, [Vec<QVec>; 2]> = BTreeMap::new();
        for p in prime_divisors(nx) {
            let up = &qmats[&(p as u64)];
            let pk = Rational::from_integer(BigInt::from(p).pow(kappa));
            let plus = linalg::kernel(&up.sub(&QMat::scalar(m, &pk)));
            let minus = linalg::kernel(&up.add(&QMat::scalar(m, &pk)));
            if plus.len() + minus.len() != m {
                return Err(Error::internal(format!(
                    "U_{p} on the new part of S_{weight}({level}) is not semisimple"
                )));
            }
            kernels.insert(p, [plus, minus]);
        }
        let mut out = Vec::new();
        for i in divisors(nx) {
            let mut basis: Option<Vec<QVec>> = None;
            for (&p, [plus, minus]) in &kernels {
                let part = if i % p == 0 { minus } else { plus };
                basis = Some(match basis {
                    None => part.clone(),
                    Some(b) => intersect_spans(&b, part, m),
                });
            }
            out.push((ClassLabel::Sign(i), basis.unwrap()));
        }
        Ok(out)
    }

    /// Level 9: remove the explicit twist span, refine the genuinely new
    /// part, and attach twist blocks built from the lower-level cells.
    #[allow(clippy::too_many_arguments)]
    fn build_level9(
        &mut self,
        space: &FormSpace,
        quot: &QuotientCtx,
        amb: &BTreeMap<u64, QMat>,
        qmats: &BTreeMap<u64, QMat>,
        weight: u32,
        blocks: &mut Vec<Block>,
        eigenforms: &mut Vec<Eigenform>,
        class_dims: &mut Vec<(ClassLabel, usize)>,
    ) -> Result<()> {
        let m = quot.dim();
        let u3 = &qmats[&3];
        if !u3.is_zero() {
            return Err(Error::internal("U_3 must vanish on the new part of level 9".into()));
        }
        // twist span inside the quotient
        let tvecs = self.twist_vectors(space, weight)?;
        let projected: Vec<QVec> = tvecs.iter().map(|v| quot.project(v)).collect();
        let (t_rref, t_pivots) = if projected.is_empty() {
            (QMat::zero(0, m), vec![])
        } else {
            linalg::rref(&QMat::from_rows(projected))
        };
        let twist_dim = t_pivots.len();
        let lower1 = self.cell(1, weight)?;
        let lower3 = self.cell(3, weight)?;
        if twist_dim != lower1.new_dim + lower3.new_dim {
            return Err(Error::internal(format!(
                "twist span of S_{weight}(9) has dimension {twist_dim}, expected {}",
                lower1.new_dim + lower3.new_dim
            )));
        }
        // second quotient: kill the twist span
        let quot2 = QuotientCtx::new(m, t_rref, t_pivots);
        let q2mats: BTreeMap<u64, QMat> = qmats
            .iter()
            .map(|(&p, mat)| (p, quot2.op_matrix(mat)))
            .collect();
        let p0_basis = identity_basis(quot2.dim());
        let refined = if quot2.dim() > 0 {
            refine_blocks(&p0_basis, &q2mats, good_primes(9))?
        } else {
            vec![]
        };
        let mut zero_dim = 0usize;
        let mut star_dim = 0usize;
        for rb in refined {
            // label resolved after lifting, via the series support
            let mut block = self.finish_block(space, amb, ClassLabel::Star, rb, weight, false)?;
            let supported_q3 = block_supported_mod3(space, &block);
            block.class = if supported_q3 { ClassLabel::Zero } else { ClassLabel::Star };
            if supported_q3 {
                zero_dim += block.dim;
            } else {
                star_dim += block.dim;
            }
            emit_eigenforms(space, &block, blocks.len(), eigenforms)?;
            blocks.push(block);
        }
        // twist blocks from the lower cells
        for lower in [&lower1, &lower3] {
            for lb in &lower.blocks {
                let block = self.twisted_block(space, lower, lb)?;
                emit_eigenforms(space, &block, blocks.len(), eigenforms)?;
                blocks.push(block);
            }
        }
        class_dims.push((ClassLabel::Zero, zero_dim));
        class_dims.push((ClassLabel::Star, star_dim));
        class_dims.push((ClassLabel::Twist, twist_dim));
        Ok(())
    }

    /// Build the level-9 twist image of a lower-level block.
    fn twisted_block(&mut self, space: &FormSpace, lower: &Cell, lb: &Block) -> Result<Block> {
        let rho3 = DirichletCharacter::rho3();
        let mut basis_coords = Vec::with_capacity(lb.dim);
        for v in &lb.basis_coords {
            let series = lower.space.combination(v);
            let t = twist_series(&series, rho3);
            match space.solve_in_basis(&t)? {
                Membership::Member(c) => basis_coords.push(c),
                Membership::NotMember { index } => {
                    return Err(Error::internal(format!(
                        "twisted block basis vector leaves S_{}(9) at coefficient {index}",
                        space.weight
                    )))
                }
            }
        }
        let trace = twist_series(&lower.space.combination(&lb.trace_coords), rho3);
        let trace_coords = match space.solve_in_basis(&trace)? {
            Membership::Member(c) => c,
            Membership::NotMember { index } => {
                return Err(Error::internal(format!(
                    "twisted trace leaves S_{}(9) at coefficient {index}",
                    space.weight
                )))
            }
        };
        // charpolys transform by rho3(p): roots are rho3(p) * a_p, and U_3 roots are 0
        let mut charpolys = BTreeMap::new();
        for p in good_primes(9) {
            let src = lb
                .charpolys
                .get(&p)
                .ok_or_else(|| Error::internal(format!("missing lower charpoly at p = {p}")))?;
            charpolys.insert(p, transform_charpoly(src, rho3.value(p as usize)));
        }
        Ok(Block {
            class: ClassLabel::Twist,
            dim: lb.dim,
            kind: lb.kind.clone(),
            charpolys,
            basis_coords,
            trace_coords,
            is_twist: true,
        })
    }

    /// Resolve a refined quotient block into a full `Block`: lift to actual
    /// coordinates, compute the trace form, and classify the kind.
    fn finish_block(
        &mut self,
        space: &FormSpace,
        amb: &BTreeMap<u64, QMat>,
        label: ClassLabel,
        rb: RefinedBlock,
        weight: u32,
        is_twist: bool,
    ) -> Result<Block> {
        let level = space.level;
        // lift: intersect kernels of the block charpolys over all good primes
        let mut stacked: Vec<QMat> = Vec::new();
        for (&p, cp) in &rb.charpolys {
            stacked.push(amb[&p].poly_eval(cp));
        }
        let refs: Vec<&QMat> = stacked.iter().collect();
        let big = linalg::stack(&refs);
        let basis_coords = linalg::kernel(&big);
        if basis_coords.len() != rb.dim {
            return Err(Error::internal(format!(
                "block lift of S_{weight}({level}) has dimension {}, expected {}",
                basis_coords.len(),
                rb.dim
            )));
        }
        // kind
        let kind = match rb.dim {
            1 => BlockKind::Rational,
            2 => {
                let mut found = None;
                for (_, cp) in rb.charpolys.iter() {
                    if cp.degree() == Some(2) {
                        let t = -cp.coeff(1);
                        let c = cp.coeff(0);
                        let disc = &t * &t - BigInt::from(4) * &c;
                        if disc.is_positive() {
                            if let Ok((s, _)) = crate::exactnum::squarefree_decompose(&disc) {
                                if !s.is_one() {
                                    let d: u128 = s.try_into().map_err(|_| {
                                        Error::domain("radicand exceeds u128 range")
                                    })?;
                                    found = Some(d);
                                    break;
                                }
                            }
                        }
                    }
                }
                match found {
                    Some(d) => BlockKind::QuadraticPair { radicand: d },
                    None => {
                        return Err(Error::internal(format!(
                            "2-dimensional block of S_{weight}({level}) not separated \
                             by any prime up to 13"
                        )))
                    }
                }
            }
            _ => BlockKind::CharpolyOnly,
        };
        // trace form
        let trace_coords = self.block_trace_coords(space, &basis_coords, label, weight)?;
        Ok(Block {
            class: label,
            dim: rb.dim,
            kind,
            charpolys: rb.charpolys,
            basis_coords,
            trace_coords,
            is_twist,
        })
    }

    /// Coordinates of the orbit trace sum f_1 + ... + f_r of a block: the
    /// unique element of the block whose coefficients at r independent
    /// 13-smooth indices match the traces of the corresponding T_n.
    fn block_trace_coords(
        &mut self,
        space: &FormSpace,
        basis_coords: &[QVec],
        label: ClassLabel,
        weight: u32,
    ) -> Result<QVec> {
        let r = basis_coords.len();
        let level = space.level;
        if r == 1 {
            // trace = the normalized eigenform itself
            let series = space.combination(&basis_coords[0]);
            let a1 = series.coeff(1);
            if a1.is_zero() {
                return Err(Error::internal("newform block with a_1 = 0".into()));
            }
            return Ok(basis_coords[0].iter().map(|c| c / a1).collect());
        }
        // block series and the matrix of T_p restricted to the block
        let block_series: Vec<RSeries> =
            basis_coords.iter().map(|v| space.combination(v)).collect();
        let mut tmats: BTreeMap<u64, QMat> = BTreeMap::new();
        for p in good_primes(level) {
            tmats.insert(p, restricted_matrix_series(space, &block_series, basis_coords, p)?);
        }
        // candidate coefficient indices: 13-smooth (upto level primes)
        let window = sturm_precision(level, weight).min(block_series[0].prec());
        let smooth = |mut n: usize| -> bool {
            for p in [2usize, 3, 5, 7, 11, 13] {
                while n % p == 0 {
                    n /= p;
                }
            }
            n == 1
        };
        let mut chosen: Vec<usize> = Vec::new();
        let mut rows: Vec<QVec> = Vec::new();
        for n in 1..window {
            if !smooth(n) {
                continue;
            }
            let col: QVec = block_series.iter().map(|s| s.coeff(n).clone()).collect();
            let mut cand = rows.clone();
            cand.push(col.clone());
            if linalg::rank(&QMat::from_rows(cand.clone())) == cand.len() {
                rows.push(col);
                chosen.push(n);
                if chosen.len() == r {
                    break;
                }
            }
        }
        if chosen.len() < r {
            return Err(Error::internal(format!(
                "could not find {r} independent smooth coefficient indices \
                 for the trace of a block of S_{weight}({level})"
            )));
        }
        // trace values Tr(T_n | block) at the chosen indices
        let kappa = weight / 2 - 1;
        let mut targets: QVec = Vec::with_capacity(r);
        for &n in &chosen {
            let m = tn_matrix(&tmats, level, weight, kappa, n, r, Some((level, label)))?;
            targets.push(m.trace());
        }
        // solve sum_i x_i * a_n(w_i) = target_n
        let a = QMat::from_rows(
            (0..r)
                .map(|i| chosen.iter().map(|&n| block_series[i].coeff(n).clone()).collect())
                .collect(),
        )
        .transpose();
        let x = linalg::solve(&a, &targets)
            .ok_or_else(|| Error::internal("trace functional solve failed".into()))?;
        let mut out = vec![Rational::zero(); space.dim()];
        for (xi, v) in x.iter().zip(basis_coords) {
            for (o, c) in out.iter_mut().zip(v) {
                *o += xi * c;
            }
        }
        Ok(out)
    }

    // ---- public operations on cells ----

    /// Simultaneous eigen-decomposition of the new part of S_k(N).
    pub fn eigen_decompose(&mut self, level: u32, weight: u32) -> Result<Vec<Eigenform>> {
        Ok(self.cell(level, weight)?.eigenforms.clone())
    }

    /// New/old splitting: the newforms of S_k(N) plus every oldform
    /// occurrence (source level, shift) from proper divisors.
    pub fn newform_split(
        &mut self,
        level: u32,
        weight: u32,
    ) -> Result<(Vec<Eigenform>, Vec<OldForm>)> {
        let new = self.cell(level, weight)?.eigenforms.clone();
        let mut old = Vec::new();
        for m in divisors(level) {
            if m == level {
                continue;
            }
            let lower = self.cell(m, weight)?;
            for d in divisors(level / m) {
                for f in &lower.eigenforms {
                    old.push(OldForm { source_level: m, shift: d, form: f.clone() });
                }
            }
        }
        Ok((new, old))
    }

    /// Coefficientwise sum of the newforms in a class, exact and rational,
    /// regenerated at any precision from the stored coordinates.
    pub fn trace_series(
        &mut self,
        level: u32,
        weight: u32,
        class: ClassLabel,
        prec: usize,
    ) -> Result<RSeries> {
        let cell = self.cell(level, weight)?;
        let space = if prec <= cell.prec {
            None
        } else {
            Some(basis_sk(&mut self.cache, level, weight, prec)?)
        };
        let mut acc = RSeries::zero(prec.max(1));
        for b in &cell.blocks {
            if b.class != class {
                continue;
            }
            let s = match &space {
                Some(sp) => sp.combination(&b.trace_coords),
                None => cell.space.combination(&b.trace_coords).truncate(prec.max(1)),
            };
            acc = acc.add(&s);
        }
        Ok(acc)
    }

    /// Regenerate an eigenform's expansion at a higher precision from its
    /// exact coordinates.
    pub fn eigenform_at_prec(
        &mut self,
        f: &Eigenform,
        prec: usize,
    ) -> Result<XSeries> {
        let space = basis_sk(&mut self.cache, f.level, f.weight, prec)?;
        Ok(space.combination_quad(&f.coords))
    }

    /// Characteristic polynomial of T_p over the newforms of a class (all
    /// classes when `class` is None): prod (X - a_p(f)).
    pub fn charpoly_product(
        &mut self,
        level: u32,
        weight: u32,
        class: Option<ClassLabel>,
        p: u64,
    ) -> Result<IntPoly> {
        if level as u64 % p == 0 {
            return Err(Error::domain(format!(
                "p = {p} divides the level; a_p = +-p^kappa or 0 there, use the class data"
            )));
        }
        let cell = self.cell(level, weight)?;
        let mut acc = IntPoly::from_i64(&[1]);
        for b in &cell.blocks {
            if class.map_or(false, |c| b.class != c) {
                continue;
            }
            let cp = b
                .charpolys
                .get(&p)
                .ok_or_else(|| Error::Unsupported(format!("charpoly at p = {p} not computed")))?;
            acc = acc.mul(cp);
        }
        Ok(acc)
    }

    /// Classify a level-9 newform: a twist of a lower-level form, or
    /// genuinely new (with its support pattern checked).
    pub fn cm_and_twist_classify(&mut self, f: &Eigenform) -> Result<NineClass> {
        if f.level != 9 {
            return Err(Error::domain("classification applies to level-9 newforms".into()));
        }
        // twist route: compare against twists of the lower-level eigenforms
        for m in [1u32, 3] {
            let lower = self.cell(m, f.weight)?;
            for g in &lower.eigenforms {
                if matches!(g.field, EigenField::CharpolyOnly { .. }) {
                    continue;
                }
                let t = twist_series(&g.series, DirichletCharacter::rho3());
                let upto = t.prec().min(f.series.prec());
                if (0..upto).all(|n| t.coeff(n) == f.series.coeff(n)) {
                    return Ok(NineClass::TwistOfLower { source_level: m });
                }
            }
        }
        // genuinely new: verify the CM vanishing pattern
        let prec = f.series.prec();
        let supported_q3 = (0..prec).all(|n| n % 3 == 1 || f.series.coeff(n).is_zero());
        for p in small_primes(prec) {
            if p % 3 != 2 {
                continue;
            }
            let ap = f.series.coeff(p);
            let ok = if supported_q3 { ap.is_zero() } else { ap.rat_part().is_zero() };
            if !ok {
                return Err(Error::Classification(format!(
                    "level-9 form is neither a twist nor CM-patterned: a_{p} = {ap}"
                )));
            }
        }
        Ok(NineClass::GenuinelyNew { supported_q3 })
    }
}

/// Outcome of `cm_and_twist_classify`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NineClass {
    GenuinelyNew { supported_q3: bool },
    TwistOfLower { source_level: u32 },
}

// ---- quotient plumbing ----

/// Projection along a subspace given by its RREF rows: coordinates on the
/// complement of the pivot columns.
struct QuotientCtx {
    ambient: usize,
    rref: QMat,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl QuotientCtx {
    fn new(ambient: usize, rref: QMat, pivots: Vec<usize>) -> Self {
        let mut is_pivot = vec![false; ambient];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free = (0..ambient).filter(|&j| !is_pivot[j]).collect();
        QuotientCtx { ambient, rref, pivots, free }
    }

    fn dim(&self) -> usize {
        self.free.len()
    }

    fn sub_rank(&self) -> usize {
        self.pivots.len()
    }

    fn project(&self, x: &[Rational]) -> QVec {
        let mut v = x.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = v[p].clone();
            if c.is_zero() {
                continue;
            }
            for j in 0..self.ambient {
                let sub = &c * &self.rref[(i, j)];
                v[j] -= sub;
            }
        }
        self.free.iter().map(|&j| v[j].clone()).collect()
    }

    fn lift(&self, y: &[Rational]) -> QVec {
        let mut v = vec![Rational::zero(); self.ambient];
        for (&j, c) in self.free.iter().zip(y) {
            v[j] = c.clone();
        }
        v
    }

    /// Matrix of the induced operator on the quotient.
    fn op_matrix(&self, ambient_op: &QMat) -> QMat {
        let m = self.dim();
        let mut out = QMat::zero(m, m);
        for (j, &fj) in self.free.iter().enumerate() {
            let mut e = vec![Rational::zero(); self.ambient];
            e[fj] = Rational::one();
            let img = ambient_op.mul_vec(&e);
            let proj = self.project(&img);
            for i in 0..m {
                out[(i, j)] = proj[i].clone();
            }
        }
        out
    }
}

fn rows_to_mat(rows: &[QVec], cols: usize) -> QMat {
    if rows.is_empty() {
        QMat::zero(0, cols)
    } else {
        QMat::from_rows(rows.to_vec())
    }
}

fn identity_basis(m: usize) -> Vec<QVec> {
    (0..m)
        .map(|i| {
            let mut v = vec![Rational::zero(); m];
            v[i] = Rational::one();
            v
        })
        .collect()
}

/// Intersection of two spans inside Q^m via kernel of the stacked
/// "difference" system: x in span(A) and x in span(B).
fn intersect_spans(a: &[QVec], b: &[QVec], m: usize) -> Vec<QVec> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    // columns: coefficients on A basis then B basis; rows: ambient equations
    let mut mat = QMat::zero(m, a.len() + b.len());
    for (j, v) in a.iter().enumerate() {
        for i in 0..m {
            mat[(i, j)] = v[i].clone();
        }
    }
    for (j, v) in b.iter().enumerate() {
        for i in 0..m {
            mat[(i, a.len() + j)] = -v[i].clone();
        }
    }
    let ker = linalg::kernel(&mat);
    let mut out = Vec::new();
    for kv in ker {
        let mut x = vec![Rational::zero(); m];
        for (j, v) in a.iter().enumerate() {
            if kv[j].is_zero() {
                continue;
            }
            for i in 0..m {
                x[i] += &kv[j] * &v[i];
            }
        }
        out.push(x);
    }
    // reduce to an independent set
    if out.is_empty() {
        return out;
    }
    let (r, piv) = linalg::rref(&QMat::from_rows(out));
    (0..piv.len()).map(|i| r.row(i).to_vec()).collect()
}

// ---- block refinement ----

/// A block of the working space after refinement: its dimension plus its
/// charpolys at every good prime.
struct RefinedBlock {
    dim: usize,
    charpolys: BTreeMap<u64, IntPoly>,
}

/// Matrix of an operator (given on the working space) restricted to the
/// span of `basis`.
fn restricted_matrix(basis: &[QVec], op: &QMat) -> Result<QMat> {
    let r = basis.len();
    let ambient = basis[0].len();
    let mut bmat = QMat::zero(ambient, r);
    for (j, v) in basis.iter().enumerate() {
        for i in 0..ambient {
            bmat[(i, j)] = v[i].clone();
        }
    }
    let mut out = QMat::zero(r, r);
    for j in 0..r {
        let img = op.mul_vec(&basis[j]);
        let sol = linalg::solve(&bmat, &img).ok_or_else(|| {
            Error::internal("operator image leaves an invariant subspace".into())
        })?;
        for i in 0..r {
            out[(i, j)] = sol[i].clone();
        }
    }
    Ok(out)
}

/// Matrix of T_p restricted to a block given by explicit series (used after
/// lifting, where the working coordinates are the full cusp space).
fn restricted_matrix_series(
    space: &FormSpace,
    block_series: &[RSeries],
    basis_coords: &[QVec],
    p: u64,
) -> Result<QMat> {
    let r = block_series.len();
    let mut bmat = QMat::zero(space.dim(), r);
    for (j, v) in basis_coords.iter().enumerate() {
        for i in 0..space.dim() {
            bmat[(i, j)] = v[i].clone();
        }
    }
    let mut out = QMat::zero(r, r);
    for j in 0..r {
        let img = super::hecke_image(&block_series[j], p, space.weight, space.level)?;
        let coords = match space.solve_in_basis(&img)? {
            Membership::Member(c) => c,
            Membership::NotMember { index } => {
                return Err(Error::internal(format!(
                    "Hecke image leaves the cusp space at coefficient {index}"
                )))
            }
        };
        let sol = linalg::solve(&bmat, &coords)
            .ok_or_else(|| Error::internal("Hecke image leaves its block".into()))?;
        for i in 0..r {
            out[(i, j)] = sol[i].clone();
        }
    }
    Ok(out)
}

/// Split a subspace into irreducible Hecke blocks by factoring charpolys of
/// T_p over the good primes. A block is terminal when some prime certifies
/// irreducibility (degree <= 4 is always decided) or every prime is
/// exhausted.
fn refine_blocks(
    basis: &[QVec],
    work_mats: &BTreeMap<u64, QMat>,
    primes: Vec<u64>,
) -> Result<Vec<RefinedBlock>> {
    struct Work {
        basis: Vec<QVec>,
        irreducible: bool,
    }
    let mut work = vec![Work { basis: basis.to_vec(), irreducible: basis.len() == 1 }];
    for &p in &primes {
        let mut next = Vec::new();
        for w in work {
            if w.irreducible || w.basis.len() == 1 {
                next.push(w);
                continue;
            }
            let op = &work_mats[&p];
            let b = restricted_matrix(&w.basis, op)?;
            let cp = linalg::charpoly(&b);
            let fact = crate::exactnum::factor_int_poly(&cp)?;
            let mut distinct: Vec<IntPoly> = Vec::new();
            for f in fact.all_parts() {
                if !distinct.contains(f) {
                    distinct.push(f.clone());
                }
            }
            if distinct.len() == 1 && fact.residual.is_empty() {
                let deg = distinct[0].degree().unwrap_or(0);
                if deg == w.basis.len() {
                    // irreducible charpoly: terminal block
                    next.push(Work { basis: w.basis, irreducible: true });
                } else {
                    // repeated irreducible factor: this prime cannot split
                    next.push(Work { basis: w.basis, irreducible: false });
                }
                continue;
            }
            if fact.residual.is_empty() && distinct.len() > 1 {
                // split into kernels of the distinct factors
                let mut total = 0usize;
                let mut pieces = Vec::new();
                for g in &distinct {
                    let gm = b.poly_eval(g);
                    let ker = linalg::kernel(&gm);
                    // kernel vectors are coefficient tuples on w.basis
                    let sub: Vec<QVec> = ker
                        .iter()
                        .map(|c| combine(&w.basis, c))
                        .collect();
                    total += sub.len();
                    if !sub.is_empty() {
                        let deg = g.degree().unwrap_or(0);
                        pieces.push(Work { basis: sub, irreducible: deg > 0 && deg == ker.len() });
                    }
                }
                if total != w.basis.len() {
                    return Err(Error::internal(format!(
                        "T_{p} is not semisimple on a new block (kernels cover {total} of {})",
                        w.basis.len()
                    )));
                }
                next.extend(pieces);
                continue;
            }
            // unresolved (residual factor): keep for later primes
            next.push(Work { basis: w.basis, irreducible: false });
        }
        work = next;
    }
    // finalize: compute charpolys at every good prime per block
    let mut out = Vec::new();
    for w in work {
        let mut charpolys = BTreeMap::new();
        for &p in &primes {
            let b = restricted_matrix(&w.basis, &work_mats[&p])?;
            charpolys.insert(p, linalg::charpoly(&b));
        }
        out.push(RefinedBlock { dim: w.basis.len(), charpolys });
    }
    Ok(out)
}

fn combine(basis: &[QVec], coeffs: &[Rational]) -> QVec {
    let n = basis[0].len();
    let mut v = vec![Rational::zero(); n];
    for (c, b) in coeffs.iter().zip(basis) {
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            v[i] += c * &b[i];
        }
    }
    v
}

/// T_n restricted to a block, from its T_p matrices: prime-power recursion
/// T_{p^{j+1}} = T_p T_{p^j} - p^{k-1} T_{p^{j-1}} and multiplicativity.
/// Primes dividing the level act by the class scalar (0 when p^2 | N).
fn tn_matrix(
    tmats: &BTreeMap<u64, QMat>,
    level: u32,
    weight: u32,
    kappa: u32,
    n: usize,
    r: usize,
    class: Option<(u32, ClassLabel)>,
) -> Result<QMat> {
    let mut acc = QMat::identity(r);
    let mut m = n;
    let mut p = 2usize;
    while m > 1 {
        if p * p > m {
            p = m;
        }
        if m % p != 0 {
            p += 1;
            continue;
        }
        let mut e = 0u32;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        let part = if level as u64 % p as u64 == 0 {
            // U_p acts by a scalar on a new block
            let scalar = match class {
                Some((lvl, label)) => super::class_up_scalar(lvl, label, p as u64, weight),
                None => {
                    let _ = kappa;
                    Rational::zero()
                }
            };
            let mut s = Rational::one();
            for _ in 0..e {
                s *= &scalar;
            }
            QMat::scalar(r, &s)
        } else {
            let tp = tmats
                .get(&(p as u64))
                .ok_or_else(|| Error::internal(format!("T_{p} matrix unavailable")))?;
            let pk = Rational::from_integer(BigInt::from(p).pow(weight - 1));
            let mut prev2 = QMat::identity(r);
            let mut prev1 = tp.clone();
            for _ in 1..e {
                let next = tp.matmul(&prev1).sub(&prev2.scale(&pk));
                prev2 = prev1;
                prev1 = next;
            }
            prev1
        };
        acc = acc.matmul(&part);
    }
    Ok(acc)
}

/// Does every basis series of the block vanish off exponents = 1 mod 3?
fn block_supported_mod3(space: &FormSpace, block: &Block) -> bool {
    block.basis_coords.iter().all(|v| {
        let s = space.combination(v);
        (0..s.prec()).all(|n| n % 3 == 1 || s.coeff(n).is_zero())
    })
}

/// roots -> rho * roots: for rho = -1 the polynomial becomes
/// (-1)^deg c(-X); rho = 0 collapses to X^deg.
fn transform_charpoly(cp: &IntPoly, rho: i64) -> IntPoly {
    let deg = cp.degree().unwrap_or(0);
    match rho {
        1 => cp.clone(),
        -1 => {
            let coeffs: Vec<BigInt> = cp
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| if (deg - i) % 2 == 1 { -c.clone() } else { c.clone() })
                .collect();
            IntPoly::new(coeffs)
        }
        _ => {
            let mut coeffs = vec![BigInt::zero(); deg + 1];
            coeffs[deg] = BigInt::one();
            IntPoly::new(coeffs)
        }
    }
}

/// Emit the eigenform records of a finished block.
fn emit_eigenforms(
    space: &FormSpace,
    block: &Block,
    block_index: usize,
    out: &mut Vec<Eigenform>,
) -> Result<()> {
    let level = space.level;
    let weight = space.weight;
    let has_cm = level == 9 && block.class == ClassLabel::Zero;
    match &block.kind {
        BlockKind::Rational => {
            let coords: Vec<QuadExt> = block
                .trace_coords
                .iter()
                .map(|c| QuadExt::from_rational(c.clone()))
                .collect();
            let series = space.combination(&block.trace_coords).promote();
            debug_assert!(series.coeff(1).to_rational().map_or(false, |r| r.is_one()));
            out.push(Eigenform {
                level,
                weight,
                class: block.class,
                field: EigenField::Rational,
                series,
                coords,
                block: block_index,
                is_new: true,
                is_twist_of_lower: block.is_twist,
                has_cm,
            });
        }
        BlockKind::QuadraticPair { radicand } => {
            let (f1, f2) = pair_eigenforms(space, block, *radicand)?;
            for (coords, series) in [f1, f2] {
                out.push(Eigenform {
                    level,
                    weight,
                    class: block.class,
                    field: EigenField::Quadratic { radicand: *radicand },
                    series,
                    coords,
                    block: block_index,
                    is_new: true,
                    is_twist_of_lower: block.is_twist,
                    has_cm: has_cm || (level == 9 && block.class == ClassLabel::Star),
                });
            }
        }
        BlockKind::CharpolyOnly => {
            let coords: Vec<QuadExt> = block
                .trace_coords
                .iter()
                .map(|c| QuadExt::from_rational(c.clone()))
                .collect();
            let series = space.combination(&block.trace_coords).promote();
            out.push(Eigenform {
                level,
                weight,
                class: block.class,
                field: EigenField::CharpolyOnly { dim: block.dim },
                series,
                coords,
                block: block_index,
                is_new: true,
                is_twist_of_lower: block.is_twist,
                has_cm: has_cm || (level == 9 && block.class == ClassLabel::Star),
            });
        }
    }
    Ok(())
}

/// The two conjugate eigenforms of a 2-dimensional irreducible block, the
/// representative with nonnegative irrational part at the first irrational
/// coefficient first.
fn pair_eigenforms(
    space: &FormSpace,
    block: &Block,
    radicand: u128,
) -> Result<((Vec<QuadExt>, XSeries), (Vec<QuadExt>, XSeries))> {
    // witness prime: smallest good prime with irreducible quadratic charpoly
    let mut witness = None;
    for (&p, cp) in &block.charpolys {
        if cp.degree() == Some(2) {
            let t = -cp.coeff(1);
            let c = cp.coeff(0);
            let disc = &t * &t - BigInt::from(4) * &c;
            if disc.is_positive() && crate::exactnum::perfect_sqrt(&disc).is_none() {
                witness = Some((p, t, disc));
                break;
            }
        }
    }
    let Some((p, t, disc)) = witness else {
        return Err(Error::internal("pair block without separating prime".into()));
    };
    let (s, f) = crate::exactnum::squarefree_decompose(&disc)?;
    let d: u128 = s.try_into().map_err(|_| Error::domain("radicand exceeds u128"))?;
    debug_assert_eq!(d, radicand);
    // lambda = (t + f sqrt(d)) / 2
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let lambda = QuadExt::new(
        Rational::from_integer(t) * &half,
        Rational::from_integer(f) * &half,
        d,
    )?;
    // matrix of T_p on the block
    let block_series: Vec<RSeries> =
        block.basis_coords.iter().map(|v| space.combination(v)).collect();
    let b = restricted_matrix_series(space, &block_series, &block.basis_coords, p)?;
    // eigenvector of the 2x2 matrix
    let b00 = QuadExt::from_rational(b[(0, 0)].clone());
    let b01 = QuadExt::from_rational(b[(0, 1)].clone());
    let b10 = QuadExt::from_rational(b[(1, 0)].clone());
    let b11 = QuadExt::from_rational(b[(1, 1)].clone());
    let (x1, x2) = if !b01.is_zero() {
        (b01, lambda.checked_sub(&b00)?)
    } else if !b10.is_zero() {
        (lambda.checked_sub(&b11)?, b10)
    } else {
        return Err(Error::internal("diagonal matrix on an irreducible pair block".into()));
    };
    let w1: Vec<QuadExt> = block.basis_coords[0]
        .iter()
        .map(|c| QuadExt::from_rational(c.clone()))
        .collect();
    let w2: Vec<QuadExt> = block.basis_coords[1]
        .iter()
        .map(|c| QuadExt::from_rational(c.clone()))
        .collect();
    let mut coords: Vec<QuadExt> = Vec::with_capacity(w1.len());
    for (a, b_) in w1.iter().zip(&w2) {
        coords.push(x1.checked_mul(a)?.checked_add(&x2.checked_mul(b_)?)?);
    }
    let raw = space.combination_quad(&coords);
    let a1 = raw.coeff(1).clone();
    if a1.is_zero() {
        return Err(Error::internal("pair eigenform with a_1 = 0".into()));
    }
    let coords: Vec<QuadExt> = coords
        .iter()
        .map(|c| c.checked_div(&a1))
        .collect::<Result<_>>()?;
    let series = space.combination_quad(&coords);
    let conj_coords: Vec<QuadExt> = coords.iter().map(|c| c.conjugate()).collect();
    let conj_series = series.conjugate();
    // tie-break on the first irrational coefficient
    let first_irr = (0..series.prec()).find(|&n| !series.coeff(n).irr_part().is_zero());
    let keep_order = match first_irr {
        Some(n) => !series.coeff(n).irr_part().is_negative(),
        None => true,
    };
    if keep_order {
        Ok(((coords, series), (conj_coords, conj_series)))
    } else {
        Ok(((conj_coords, conj_series), (coords, series)))
    }
}

fn order_outputs(blocks: &mut [Block], eigenforms: &mut Vec<Eigenform>) {
    // sort eigenforms by (class, orbit kind, series coefficients); blocks
    // stay in construction order since eigenforms reference them by index.
    let class_rank = |c: &ClassLabel| match c {
        ClassLabel::Sign(i) => (0, *i),
        ClassLabel::Zero => (1, 0),
        ClassLabel::Star => (2, 0),
        ClassLabel::Twist => (3, 0),
    };
    let kind_rank = |f: &Eigenform| match f.field {
        EigenField::Rational => 0usize,
        EigenField::Quadratic { .. } => 1,
        EigenField::CharpolyOnly { .. } => 2,
    };
    let _ = blocks;
    eigenforms.sort_by(|a, b| {
        class_rank(&a.class)
            .cmp(&class_rank(&b.class))
            .then(kind_rank(a).cmp(&kind_rank(b)))
            .then_with(|| compare_series(&a.series, &b.series))
    });
}

fn compare_series(a: &XSeries, b: &XSeries) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let upto = a.prec().min(b.prec());
    for n in 0..upto {
        let (ca, cb) = (a.coeff(n), b.coeff(n));
        let ord = ca
            .rat_part()
            .cmp(cb.rat_part())
            .then_with(|| ca.irr_part().cmp(cb.irr_part()));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

fn small_primes(bound: usize) -> Vec<usize> {
    let mut sieve = vec![true; bound.max(2)];
    let mut out = Vec::new();
    for n in 2..bound {
        if sieve[n] {
            out.push(n);
            for m in (n * n..bound).step_by(n) {
                sieve[m] = false;
            }
        }
    }
    out
}

//! Finitely generated rings graded by a f.g. abelian group.
//!
//! A graded ring is a polynomial ring modulo homogeneous relations together
//! with a degree map onto the grading group. On top of the raw data it
//! lazily computes and caches the reduced Groebner basis of the relation
//! ideal, the Krull dimension, the faces of the positive orthant whose
//! associated torus orbits meet the zero set (via saturation properness
//! tests), and the cones spanned by the corresponding degree vectors.

use crate::abgroup::{AbelianGroup, GroupElement, GroupHom};
use crate::cone::Cone;
use crate::linalg::{IntMatrix, IntVec};
use crate::polyring::{
    self, Polynomial, TermOrder, VarMask,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("grading must be defined on the free group of rank {expected}, got rank {got}")]
    GradingShape { expected: usize, got: usize },
    #[error("relation {index} is zero")]
    ZeroRelation { index: usize },
    #[error("relation {index} is not homogeneous: one term has degree {degree_a}, another {degree_b}")]
    NotHomogeneous { index: usize, degree_a: String, degree_b: String },
    #[error("too many variables for face enumeration: {0}")]
    TooManyVariables(usize),
    #[error("invalid block data: {0}")]
    BadBlockData(String),
}

#[derive(Debug, Clone)]
pub struct GradedRing {
    nvars: usize,
    relations: Vec<Polynomial>,
    grading: GroupHom,
    gb: OnceLock<Vec<Polynomial>>,
    krull: OnceLock<Option<usize>>,
    afaces: OnceLock<Vec<VarMask>>,
    orbit_cones: OnceLock<Vec<(VarMask, Cone)>>,
}

impl GradedRing {
    pub fn new(
        nvars: usize,
        relations: Vec<Polynomial>,
        grading: GroupHom,
    ) -> Result<GradedRing, RingError> {
        Self::create(nvars, relations, grading, true)
    }

    /// Skips the homogeneity check on the relations. Shape and zero
    /// validation still run, everything downstream depends on them.
    pub fn new_unchecked(
        nvars: usize,
        relations: Vec<Polynomial>,
        grading: GroupHom,
    ) -> Result<GradedRing, RingError> {
        Self::create(nvars, relations, grading, false)
    }

    fn create(
        nvars: usize,
        relations: Vec<Polynomial>,
        grading: GroupHom,
        check: bool,
    ) -> Result<GradedRing, RingError> {
        if grading.source() != &AbelianGroup::free(nvars) {
            return Err(RingError::GradingShape {
                expected: nvars,
                got: grading.source().dim(),
            });
        }
        let ring = GradedRing {
            nvars,
            relations,
            grading,
            gb: OnceLock::new(),
            krull: OnceLock::new(),
            afaces: OnceLock::new(),
            orbit_cones: OnceLock::new(),
        };
        for (index, g) in ring.relations.iter().enumerate() {
            if g.is_zero() {
                return Err(RingError::ZeroRelation { index });
            }
            if !check {
                continue;
            }
            if let Err((a, b)) = ring.check_homogeneous(g) {
                return Err(RingError::NotHomogeneous {
                    index,
                    degree_a: a.to_string(),
                    degree_b: b.to_string(),
                });
            }
        }
        Ok(ring)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    pub fn grading(&self) -> &GroupHom {
        &self.grading
    }

    /// The grading group.
    pub fn class_group(&self) -> &AbelianGroup {
        self.grading.target()
    }

    pub fn degree_of_var(&self, i: usize) -> GroupElement {
        let mut e = vec![BigInt::zero(); self.nvars];
        e[i] = BigInt::one();
        self.grading.apply(&self.grading.source().element(&e).unwrap())
    }

    pub fn var_degrees(&self) -> Vec<GroupElement> {
        (0..self.nvars).map(|i| self.degree_of_var(i)).collect()
    }

    fn monomial_degree(&self, exps: &[u32]) -> GroupElement {
        let e: IntVec = exps.iter().map(|&x| BigInt::from(x)).collect();
        self.grading.apply(&self.grading.source().element(&e).unwrap())
    }

    fn check_homogeneous(&self, f: &Polynomial) -> Result<(), (GroupElement, GroupElement)> {
        let mut first: Option<GroupElement> = None;
        for (e, _) in f.terms() {
            let d = self.monomial_degree(e);
            match &first {
                None => first = Some(d),
                Some(d0) if *d0 != d => return Err((d0.clone(), d)),
                _ => {}
            }
        }
        Ok(())
    }

    /// Degree of a nonzero homogeneous polynomial.
    pub fn degree_of(&self, f: &Polynomial) -> Option<GroupElement> {
        if f.is_zero() || self.check_homogeneous(f).is_err() {
            return None;
        }
        Some(self.monomial_degree(&f.terms()[0].0))
    }

    pub fn relation_degrees(&self) -> Vec<GroupElement> {
        self.relations
            .iter()
            .map(|g| self.degree_of(g).expect("relations are homogeneous"))
            .collect()
    }

    /// Reduced degrevlex Groebner basis of the relation ideal.
    pub fn groebner_basis(&self) -> &[Polynomial] {
        self.gb.get_or_init(|| {
            polyring::groebner_basis(&self.relations, &TermOrder::DegRevLex)
        })
    }

    /// Krull dimension of the quotient ring; None for the unit ideal.
    pub fn krull_dim(&self) -> Option<usize> {
        *self
            .krull
            .get_or_init(|| polyring::krull_dimension(self.relations(), self.nvars))
    }

    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        self.relations
            .iter()
            .map(|g| (0..self.nvars).map(|j| g.partial_derivative(j)).collect())
            .collect()
    }

    /// Generators of the relation ideal with all variables outside the mask
    /// set to zero; identically vanishing restrictions are dropped.
    pub fn restricted_generators(&self, mask: VarMask) -> Vec<Polynomial> {
        self.relations
            .iter()
            .map(|g| g.restrict_to(mask))
            .filter(|g| !g.is_zero())
            .collect()
    }

    fn classify_face(&self, mask: VarMask) -> FaceClass {
        let restricted = self.restricted_generators(mask);
        if restricted.is_empty() {
            return FaceClass::Accept;
        }
        // A relation collapsing to a single monomial becomes a unit after
        // inverting the face variables.
        if restricted.iter().any(|g| g.terms().len() == 1) {
            return FaceClass::Reject;
        }
        FaceClass::Test(restricted)
    }

    /// Whether inverting the variables of the face leaves a proper ideal.
    pub fn is_aface(&self, mask: VarMask) -> bool {
        match self.classify_face(mask) {
            FaceClass::Accept => true,
            FaceClass::Reject => false,
            FaceClass::Test(gens) => polyring::saturation_is_proper(&gens, mask),
        }
    }

    /// All faces of the positive orthant, as variable masks, whose torus
    /// orbit meets the zero set of the relations. Sorted by size, then by
    /// mask value.
    pub fn a_faces(&self) -> &[VarMask] {
        self.afaces.get_or_init(|| {
            assert!(
                self.nvars <= 30,
                "face enumeration over {} variables is not feasible",
                self.nvars
            );
            let total: u64 = 1 << self.nvars;
            let mut masks: Vec<VarMask> = (0..total).map(|m| m as VarMask).collect();
            masks.sort_by_key(|&m| (m.count_ones(), m));
            // Group the undecided faces by their restricted generators so
            // each distinct ideal is tested once, in parallel.
            let mut accepted: Vec<VarMask> = Vec::new();
            let mut pending: HashMap<Vec<Polynomial>, Vec<VarMask>> = HashMap::new();
            for m in masks {
                match self.classify_face(m) {
                    FaceClass::Accept => accepted.push(m),
                    FaceClass::Reject => {}
                    FaceClass::Test(gens) => pending.entry(gens).or_default().push(m),
                }
            }
            let mut keys: Vec<&Vec<Polynomial>> = pending.keys().collect();
            keys.sort_by_key(|gens| {
                (gens.len(), gens.iter().map(|g| g.to_string()).collect::<Vec<_>>())
            });
            let verdicts: Vec<bool> = keys
                .par_iter()
                .map(|gens| {
                    let support = gens.iter().fold(0 as VarMask, |m, g| m | g.support());
                    polyring::saturation_is_proper(gens, support)
                })
                .collect();
            for (gens, ok) in keys.into_iter().zip(verdicts) {
                if ok {
                    accepted.extend(pending[gens].iter().copied());
                }
            }
            accepted.sort_by_key(|&m| (m.count_ones(), m));
            accepted
        })
    }

    /// Free parts of the degrees of the face variables, as a cone.
    pub fn orbit_cone(&self, mask: VarMask) -> Cone {
        let k = self.class_group().rank();
        let rays: Vec<IntVec> = (0..self.nvars)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.degree_of_var(i).free_part(self.class_group()))
            .collect();
        Cone::from_rays(k, &rays)
    }

    /// Orbit cones of all a-faces, paired with their face masks.
    pub fn orbit_cones(&self) -> &[(VarMask, Cone)] {
        self.orbit_cones.get_or_init(|| {
            let faces = self.a_faces().to_vec();
            faces
                .into_par_iter()
                .map(|m| (m, self.orbit_cone(m)))
                .collect()
        })
    }

    pub fn descriptor(&self) -> String {
        let k = self.class_group();
        let torsion: Vec<String> = k.torsion().iter().map(|d| d.to_string()).collect();
        format!(
            "GR({}, {}, [{}, [{}]])",
            self.nvars,
            self.relations.len(),
            k.rank(),
            torsion.join(", ")
        )
    }
}

enum FaceClass {
    Accept,
    Reject,
    Test(Vec<Polynomial>),
}

/// Builds the ring attached to a sequence of plane vectors and an exponent
/// block matrix. The columns of `a` must be pairwise linearly independent
/// vectors in the plane; the first `m` rows of `p` (for m+1 = number of
/// columns of `a`) carry the block structure: columns negative in every such
/// row form block zero, and each remaining column is positive in exactly one
/// row and zero elsewhere, attaching it to that row's block. Block `i`
/// contributes the monomial with the block's exponents, and consecutive
/// triples of blocks and plane vectors produce one trinomial relation each.
/// The grading group is the cokernel of the transpose of `p`.
pub fn ring_from_ap(a: &IntMatrix, p: &IntMatrix) -> Result<GradedRing, RingError> {
    if a.rows != 2 || a.cols < 2 {
        return Err(RingError::BadBlockData(format!(
            "expected a 2 x (m+1) matrix of plane vectors with m >= 1, got {} x {}",
            a.rows, a.cols
        )));
    }
    let m = a.cols - 1;
    for i in 0..a.cols {
        for j in i + 1..a.cols {
            let det = &a[(0, i)] * &a[(1, j)] - &a[(0, j)] * &a[(1, i)];
            if det.is_zero() {
                return Err(RingError::BadBlockData(format!(
                    "plane vectors {i} and {j} are linearly dependent"
                )));
            }
        }
    }
    if p.rows < m {
        return Err(RingError::BadBlockData(format!(
            "exponent matrix has {} rows but {} block rows are required",
            p.rows, m
        )));
    }
    let r = p.cols;
    // Assign every variable to a block and collect block exponents.
    let mut block_of = vec![usize::MAX; r];
    let mut exps: Vec<Vec<u32>> = vec![vec![0; r]; m + 1];
    for j in 0..r {
        let column: Vec<&BigInt> = (0..m).map(|i| &p[(i, j)]).collect();
        if column.iter().all(|x| x.is_negative()) {
            let value = -column[0].clone();
            if column.iter().any(|x| **x != -value.clone()) {
                return Err(RingError::BadBlockData(format!(
                    "column {j} must repeat one negative exponent in every block row"
                )));
            }
            block_of[j] = 0;
            exps[0][j] = u32::try_from(&value).map_err(|_| {
                RingError::BadBlockData(format!("exponent too large in column {j}"))
            })?;
        } else {
            let positives: Vec<usize> =
                (0..m).filter(|&i| column[i].is_positive()).collect();
            let zeros_ok = (0..m)
                .filter(|i| !positives.contains(i))
                .all(|i| column[i].is_zero());
            if positives.len() != 1 || !zeros_ok {
                return Err(RingError::BadBlockData(format!(
                    "column {j} matches no block sign pattern"
                )));
            }
            let row = positives[0];
            block_of[j] = row + 1;
            exps[row + 1][j] = u32::try_from(&p[(row, j)]).map_err(|_| {
                RingError::BadBlockData(format!("exponent too large in column {j}"))
            })?;
        }
    }
    for (i, e) in exps.iter().enumerate() {
        if e.iter().all(|&x| x == 0) {
            return Err(RingError::BadBlockData(format!("block {i} is empty")));
        }
    }

    let monomials: Vec<Polynomial> = exps
        .iter()
        .map(|e| Polynomial::monomial(r, e, num_rational::BigRational::one()))
        .collect();
    let det2 = |i: usize, j: usize| -> BigInt {
        &a[(0, i)] * &a[(1, j)] - &a[(0, j)] * &a[(1, i)]
    };
    let mut relations: Vec<Polynomial> = Vec::new();
    for i in 0..m.saturating_sub(1) {
        let c0 = num_rational::BigRational::from(det2(i + 1, i + 2));
        let c1 = num_rational::BigRational::from(-det2(i, i + 2));
        let c2 = num_rational::BigRational::from(det2(i, i + 1));
        let g = monomials[i]
            .scale(&c0)
            .add(&monomials[i + 1].scale(&c1))
            .add(&monomials[i + 2].scale(&c2));
        relations.push(g);
    }

    // Grading: the cokernel of the transpose, in Smith coordinates.
    let pt = p.transpose();
    let snf = pt.smith_form();
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let torsion: Vec<BigInt> =
        diag.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect();
    let free_rank = r - rank;
    let group = AbelianGroup::new(free_rank, torsion.clone())
        .expect("smith invariants are positive");
    let mut free_rows: Vec<IntVec> = (rank..r).map(|i| snf.u.row(i)).collect();
    if !free_rows.is_empty() {
        // Canonical basis of the free quotient: column-hermite the
        // transposed stack, read the rows back.
        let h = IntMatrix::from_cols(&free_rows).hermite_form();
        free_rows = (0..h.pivots.len()).map(|j| h.h.col(j)).collect();
    }
    let mut rows: Vec<IntVec> = free_rows;
    for (i, d) in diag.iter().enumerate() {
        if !d.is_zero() && !d.is_one() {
            rows.push(snf.u.row(i));
        }
    }
    let matrix = if rows.is_empty() {
        IntMatrix::zero(0, r)
    } else {
        IntMatrix::from_bigint_rows(&rows)
    };
    let grading = GroupHom::new(AbelianGroup::free(r), group, matrix)
        .expect("cokernel map is well defined");
    GradedRing::new(r, relations, grading)
}

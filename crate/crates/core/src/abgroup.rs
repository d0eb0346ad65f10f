//! Finitely generated abelian groups Z^k x Z/d_1 x ... x Z/d_t.
//!
//! Groups are kept in invariant-factor form (each d_i >= 2 and d_1 | d_2 |
//! ...). Elements carry one coordinate per free factor and one residue per
//! torsion factor. A subgroup is represented by the full preimage lattice of
//! its generators inside Z^(k+t), stored as a column-style Hermite normal
//! form, which makes equality of subgroups a literal comparison.

use crate::linalg::{IntMatrix, IntVec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("torsion moduli must be positive, got {0}")]
    InvalidTorsion(BigInt),
    #[error("element has {got} coordinates, expected {expected} (or {rank} free ones)")]
    BadElementLength { got: usize, expected: usize, rank: usize },
    #[error("hom is not well defined on torsion generator {index}: order {order} image does not vanish")]
    IllDefinedHom { index: usize, order: BigInt },
    #[error("objects belong to different groups")]
    GroupMismatch,
    #[error("matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    BadMatrixShape { rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },
}

/// Z^rank x Z/torsion[0] x Z/torsion[1] x ... in invariant-factor form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    rank: usize,
    torsion: Vec<BigInt>,
}

impl AbelianGroup {
    /// Builds a group, normalizing the torsion list into a divisibility
    /// chain (so [12, 2] and [2, 12] describe the same group) and dropping
    /// trivial factors.
    pub fn new(rank: usize, torsion: Vec<BigInt>) -> Result<Self, GroupError> {
        for d in &torsion {
            if !d.is_positive() {
                return Err(GroupError::InvalidTorsion(d.clone()));
            }
        }
        let mut kept: Vec<BigInt> = torsion.into_iter().filter(|d| !d.is_one()).collect();
        let chained = kept.windows(2).all(|w| (&w[1] % &w[0]).is_zero());
        if !chained {
            let n = kept.len();
            let mut diag = IntMatrix::zero(n, n);
            for (i, d) in kept.iter().enumerate() {
                diag[(i, i)] = d.clone();
            }
            kept = diag
                .smith_form()
                .diagonal()
                .into_iter()
                .filter(|d| !d.is_one())
                .collect();
        }
        Ok(AbelianGroup { rank, torsion: kept })
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { rank, torsion: Vec::new() }
    }

    pub fn from_i64(rank: usize, torsion: &[i64]) -> Result<Self, GroupError> {
        AbelianGroup::new(rank, torsion.iter().map(|&d| BigInt::from(d)).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    /// Number of stored coordinates: free rank plus torsion factors.
    pub fn dim(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// Group order for finite groups.
    pub fn order(&self) -> Option<BigInt> {
        if self.rank > 0 {
            return None;
        }
        Some(self.torsion.iter().product::<BigInt>().max(BigInt::one()))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { coords: vec![BigInt::zero(); self.dim()] }
    }

    /// Standard generators: first the free ones, then one per torsion factor.
    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.dim())
            .map(|i| {
                let mut coords = vec![BigInt::zero(); self.dim()];
                coords[i] = BigInt::one();
                GroupElement { coords }
            })
            .collect()
    }

    /// Accepts either full coordinates or free coordinates only (torsion
    /// components then default to zero), and reduces torsion residues.
    pub fn element(&self, coords: &[BigInt]) -> Result<GroupElement, GroupError> {
        let mut full: IntVec = if coords.len() == self.dim() {
            coords.to_vec()
        } else if coords.len() == self.rank {
            let mut v = coords.to_vec();
            v.extend(std::iter::repeat_with(BigInt::zero).take(self.torsion.len()));
            v
        } else {
            return Err(GroupError::BadElementLength {
                got: coords.len(),
                expected: self.dim(),
                rank: self.rank,
            });
        };
        self.reduce(&mut full);
        Ok(GroupElement { coords: full })
    }

    pub fn element_from_i64(&self, coords: &[i64]) -> Result<GroupElement, GroupError> {
        self.element(&coords.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    fn reduce(&self, coords: &mut [BigInt]) {
        for (i, d) in self.torsion.iter().enumerate() {
            let j = self.rank + i;
            coords[j] = coords[j].mod_floor(d);
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut coords: IntVec =
            a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
        self.reduce(&mut coords);
        GroupElement { coords }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        let mut coords: IntVec = a.coords.iter().map(|x| -x).collect();
        self.reduce(&mut coords);
        GroupElement { coords }
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, n: &BigInt, a: &GroupElement) -> GroupElement {
        let mut coords: IntVec = a.coords.iter().map(|x| x * n).collect();
        self.reduce(&mut coords);
        GroupElement { coords }
    }

    /// Columns generating the torsion relation lattice d_i * e_(rank+i).
    fn relation_columns(&self) -> Vec<IntVec> {
        self.torsion
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mut v = vec![BigInt::zero(); self.dim()];
                v[self.rank + i] = d.clone();
                v
            })
            .collect()
    }

    /// Subgroup generated by the given elements.
    pub fn subgroup(&self, gens: &[GroupElement]) -> Subgroup {
        let mut cols: Vec<IntVec> = gens.iter().map(|g| g.coords.clone()).collect();
        cols.extend(self.relation_columns());
        Subgroup::from_lattice_columns(self.clone(), cols)
    }

    pub fn full_subgroup(&self) -> Subgroup {
        self.subgroup(&self.generators())
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        self.subgroup(&[])
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.torsion.iter().map(|d| d.to_string()).collect();
        write!(f, "AG({}, [{}])", self.rank, parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    coords: IntVec,
}

impl GroupElement {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn free_part(&self, group: &AbelianGroup) -> IntVec {
        self.coords[..group.rank()].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Homomorphism between f.g. abelian groups, given on standard generators.
///
/// Column j of the matrix is the image of the j-th standard generator of the
/// source; rows are coordinates in the target (torsion rows read modulo the
/// corresponding modulus).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    src: AbelianGroup,
    tgt: AbelianGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(
        src: AbelianGroup,
        tgt: AbelianGroup,
        matrix: IntMatrix,
    ) -> Result<Self, GroupError> {
        if matrix.rows != tgt.dim() || matrix.cols != src.dim() {
            return Err(GroupError::BadMatrixShape {
                rows: matrix.rows,
                cols: matrix.cols,
                expected_rows: tgt.dim(),
                expected_cols: src.dim(),
            });
        }
        // The image of a torsion generator of order d must be killed by d.
        for (i, d) in src.torsion.iter().enumerate() {
            let j = src.rank + i;
            let image: IntVec = matrix.col(j).iter().map(|x| x * d).collect();
            let ok_free = image[..tgt.rank].iter().all(|x| x.is_zero());
            let ok_torsion = tgt
                .torsion
                .iter()
                .enumerate()
                .all(|(k, m)| (&image[tgt.rank + k] % m).is_zero());
            if !ok_free || !ok_torsion {
                return Err(GroupError::IllDefinedHom { index: j, order: d.clone() });
            }
        }
        Ok(GroupHom { src, tgt, matrix })
    }

    pub fn source(&self) -> &AbelianGroup {
        &self.src
    }

    pub fn target(&self) -> &AbelianGroup {
        &self.tgt
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, elem: &GroupElement) -> GroupElement {
        let mut coords = self.matrix.mul_vec(elem.coords());
        self.tgt.reduce(&mut coords);
        GroupElement { coords }
    }

    /// Image subgroup inside the target.
    pub fn image(&self) -> Subgroup {
        let gens: Vec<GroupElement> = (0..self.matrix.cols)
            .map(|j| {
                let mut coords = self.matrix.col(j);
                self.tgt.reduce(&mut coords);
                GroupElement { coords }
            })
            .collect();
        self.tgt.subgroup(&gens)
    }

    /// Coordinates of one source element mapping to the given target
    /// element, if the element lies in the image.
    pub fn preimage(&self, elem: &GroupElement) -> Option<IntVec> {
        let n = self.src.dim();
        if self.tgt.dim() == 0 {
            return Some(vec![BigInt::zero(); n]);
        }
        // Solve [M | R] (x, y) = e over the integers, where R spans the
        // torsion relation lattice of the target.
        let mut cols: Vec<IntVec> = (0..n).map(|j| self.matrix.col(j)).collect();
        cols.extend(self.tgt.relation_columns());
        if cols.is_empty() {
            return elem.is_zero().then(Vec::new);
        }
        let block = IntMatrix::from_cols(&cols);
        let solution = crate::linalg::integer_solve(&block, elem.coords())?;
        Some(solution[..n].to_vec())
    }

    /// Kernel subgroup inside the source.
    pub fn kernel(&self) -> Subgroup {
        // x is in the kernel iff M x lies in the torsion relation lattice of
        // the target, i.e. iff [M | R] (x, y) = 0 has a solution y.
        let rel = self.tgt.relation_columns();
        let mut cols: Vec<IntVec> = (0..self.matrix.cols).map(|j| self.matrix.col(j)).collect();
        cols.extend(rel);
        let block = IntMatrix::from_cols(&cols);
        let kernel = block.integer_kernel();
        let mut lattice_cols: Vec<IntVec> =
            kernel.iter().map(|v| v[..self.matrix.cols].to_vec()).collect();
        lattice_cols.extend(self.src.relation_columns());
        Subgroup::from_lattice_columns(self.src.clone(), lattice_cols)
    }
}

/// Subgroup of an ambient f.g. abelian group.
///
/// Internally this is the full preimage lattice in Z^(k+t) of the subgroup,
/// i.e. the lattice spanned by the generators together with the torsion
/// relations, in column Hermite form with zero columns dropped. Two
/// subgroups of the same group are equal iff their stored matrices are.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    group: AbelianGroup,
    lattice: IntMatrix,
}

impl Subgroup {
    fn from_lattice_columns(group: AbelianGroup, cols: Vec<IntVec>) -> Self {
        let dim = group.dim();
        if cols.is_empty() {
            return Subgroup { group, lattice: IntMatrix::zero(dim, 0) };
        }
        let m = IntMatrix::from_cols(&cols);
        let hnf = m.hermite_form();
        let rank = hnf.pivots.len();
        let mut lattice = IntMatrix::zero(dim, rank);
        for j in 0..rank {
            for i in 0..dim {
                lattice[(i, j)] = hnf.h[(i, j)].clone();
            }
        }
        Subgroup { group, lattice }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// Canonical generating matrix of the preimage lattice (columns).
    pub fn lattice(&self) -> &IntMatrix {
        &self.lattice
    }

    /// Canonical generators, as elements of the ambient group, with zero
    /// elements dropped.
    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.lattice.cols)
            .filter_map(|j| {
                let mut coords = self.lattice.col(j);
                self.group.reduce(&mut coords);
                let e = GroupElement { coords };
                (!e.is_zero()).then_some(e)
            })
            .collect()
    }

    pub fn contains(&self, elem: &GroupElement) -> bool {
        // Lattice membership against the column echelon basis.
        let mut x = elem.coords().to_vec();
        let mut col = 0usize;
        for row in 0..self.group.dim() {
            if col < self.lattice.cols && !self.lattice[(row, col)].is_zero() {
                let (q, r) = x[row].div_rem(&self.lattice[(row, col)]);
                if !r.is_zero() {
                    return false;
                }
                for i in row..self.group.dim() {
                    let sub = &self.lattice[(i, col)] * &q;
                    x[i] -= sub;
                }
                col += 1;
            } else if !x[row].is_zero() {
                return false;
            }
        }
        true
    }

    pub fn is_full(&self) -> bool {
        self.lattice == IntMatrix::identity(self.group.dim())
    }

    pub fn intersect(&self, other: &Subgroup) -> Result<Subgroup, GroupError> {
        if self.group != other.group {
            return Err(GroupError::GroupMismatch);
        }
        let a = &self.lattice;
        let b = &other.lattice;
        // x = A u = B v; kernel of [A | -B] yields the intersection lattice.
        let mut cols: Vec<IntVec> = (0..a.cols).map(|j| a.col(j)).collect();
        for j in 0..b.cols {
            cols.push(b.col(j).iter().map(|x| -x).collect());
        }
        if cols.is_empty() {
            return Ok(self.group.trivial_subgroup());
        }
        let block = IntMatrix::from_cols(&cols);
        let kernel = block.integer_kernel();
        let lattice_cols: Vec<IntVec> = kernel
            .iter()
            .map(|w| {
                let u = &w[..a.cols];
                a.mul_vec(u)
            })
            .collect();
        Ok(Subgroup::from_lattice_columns(self.group.clone(), lattice_cols))
    }

    /// Invariants of the quotient (ambient group) / (this subgroup).
    pub fn factor_group(&self) -> AbelianGroup {
        let dim = self.group.dim();
        if dim == 0 {
            return AbelianGroup::free(0);
        }
        let diag = self.lattice.smith_form().diagonal();
        let rank = dim - diag.iter().filter(|d| !d.is_zero()).count();
        let torsion: Vec<BigInt> =
            diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
        AbelianGroup::new(rank, torsion).expect("smith diagonal is nonnegative")
    }

    /// Abstract isomorphism type of the subgroup itself.
    pub fn abstract_type(&self) -> AbelianGroup {
        let m = self.lattice.cols;
        if m == 0 {
            return AbelianGroup::free(0);
        }
        // Relations among the lattice generators: x with A x in the torsion
        // relation lattice of the ambient group.
        let rel = self.group.relation_columns();
        let mut cols: Vec<IntVec> = (0..m).map(|j| self.lattice.col(j)).collect();
        cols.extend(rel);
        let block = IntMatrix::from_cols(&cols);
        let kernel = block.integer_kernel();
        let rel_cols: Vec<IntVec> = kernel.iter().map(|v| v[..m].to_vec()).collect();
        if rel_cols.is_empty() {
            return AbelianGroup::free(m);
        }
        let rel_matrix = IntMatrix::from_cols(&rel_cols);
        let diag = rel_matrix.smith_form().diagonal();
        let rank = m - diag.iter().filter(|d| !d.is_zero()).count();
        let torsion: Vec<BigInt> =
            diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
        AbelianGroup::new(rank, torsion).expect("smith diagonal is nonnegative")
    }

    /// Smallest n >= 1 with n * elem inside the subgroup, or None if no
    /// multiple lands there.
    pub fn element_order_mod(&self, elem: &GroupElement) -> Option<BigInt> {
        let snf = self.lattice.smith_form();
        let y = snf.u.mul_vec(elem.coords());
        let diag = snf.diagonal();
        let rank = diag.iter().filter(|d| !d.is_zero()).count();
        let mut order = BigInt::one();
        for (i, yi) in y.iter().enumerate() {
            if i < rank {
                let d = &diag[i];
                let g = d.gcd(yi);
                order = order.lcm(&(d / &g));
            } else if !yi.is_zero() {
                return None;
            }
        }
        Some(order)
    }
}

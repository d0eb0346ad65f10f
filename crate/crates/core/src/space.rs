//! Projective and affine varieties presented by a graded ring together with
//! an ample class.
//!
//! The class picks a chamber in the variation-of-quotients fan; the faces of
//! the positive orthant whose orbit cone contains the class stratify the
//! variety. All geometric invariants (Picard group, local class groups,
//! singular strata, canonical class, intersection numbers) are derived from
//! that stratification. A zero class selects the affine quotient instead,
//! with every face relevant.

use crate::abgroup::{AbelianGroup, GroupElement, Subgroup};
use crate::cone::Cone;
use crate::deadline;
use crate::fan::Fan;
use crate::gitfan;
use crate::linalg::{IntVec, RatVec};
use crate::polyring::{self, Polynomial, VarMask};
use crate::polytope::Polytope;
use crate::ring::GradedRing;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MdsError {
    #[error("class has {got} coordinates, expected {expected}")]
    ClassShape { expected: usize, got: usize },
    #[error("the relations generate the unit ideal")]
    TrivialRing,
    #[error("the chosen class lies in no chamber")]
    AmpleNotInChamber,
    #[error("the chosen class lies on a wall")]
    AmpleOnWall,
    #[error("the chosen class is not in the interior of the moving cone")]
    AmpleNotMovable,
    #[error("expected {expected} classes, got {got}")]
    WrongNumberOfClasses { expected: usize, got: usize },
    #[error("unsupported: {0}")]
    NotSupported(String),
}

struct FaceReport {
    mask: VarMask,
    ambient_smooth: bool,
    local_cl: AbelianGroup,
}

pub struct MoriDreamSpace {
    ring: GradedRing,
    ample: GroupElement,
    moving: Cone,
    chamber: Option<Cone>,
    relevant: OnceLock<Vec<VarMask>>,
    covering: OnceLock<Vec<VarMask>>,
    pic: OnceLock<Subgroup>,
    reports: OnceLock<Vec<FaceReport>>,
    volumes: Mutex<HashMap<IntVec, BigRational>>,
}

impl MoriDreamSpace {
    /// Builds the space and verifies that the class is genuinely ample:
    /// interior to the moving cone and to a chamber of maximal dimension.
    /// A zero class (more generally, zero free part) selects the affine
    /// quotient and skips the chamber conditions.
    pub fn new(ring: GradedRing, ample: GroupElement) -> Result<Self, MdsError> {
        Self::create(ring, ample, true)
    }

    /// Builds the space without the ampleness checks.
    pub fn new_unchecked(ring: GradedRing, ample: GroupElement) -> Result<Self, MdsError> {
        Self::create(ring, ample, false)
    }

    fn create(ring: GradedRing, ample: GroupElement, check: bool) -> Result<Self, MdsError> {
        let k = ring.class_group();
        if ample.coords().len() != k.dim() {
            return Err(MdsError::ClassShape {
                expected: k.dim(),
                got: ample.coords().len(),
            });
        }
        let wfree = ample.free_part(k);
        let affine = wfree.iter().all(Zero::is_zero);
        let moving = gitfan::moving_cone(&ring);
        let chamber = if affine { None } else { gitfan::chamber(&ring, &wfree) };
        if check {
            if ring.krull_dim().is_none() {
                return Err(MdsError::TrivialRing);
            }
            if !affine {
                let lam = chamber.as_ref().ok_or(MdsError::AmpleNotInChamber)?;
                let eff = gitfan::effective_cone(&ring);
                if lam.dim() != eff.dim() || !lam.relint_contains(&wfree) {
                    return Err(MdsError::AmpleOnWall);
                }
                if !moving.relint_contains(&wfree) {
                    return Err(MdsError::AmpleNotMovable);
                }
            }
        }
        Ok(MoriDreamSpace {
            ring,
            ample,
            moving,
            chamber,
            relevant: OnceLock::new(),
            covering: OnceLock::new(),
            pic: OnceLock::new(),
            reports: OnceLock::new(),
            volumes: Mutex::new(HashMap::new()),
        })
    }

    pub fn ring(&self) -> &GradedRing {
        &self.ring
    }

    pub fn class_group(&self) -> &AbelianGroup {
        self.ring.class_group()
    }

    pub fn ample_class(&self) -> &GroupElement {
        &self.ample
    }

    pub fn is_affine(&self) -> bool {
        self.chamber.is_none()
    }

    /// Dimension of the variety; None when the relations are the unit ideal.
    pub fn dim(&self) -> Option<usize> {
        self.ring
            .krull_dim()
            .map(|d| d - self.ring.class_group().rank())
    }

    pub fn effective_cone(&self) -> Cone {
        gitfan::effective_cone(&self.ring)
    }

    pub fn moving_cone(&self) -> &Cone {
        &self.moving
    }

    /// Closure of the ample cone, i.e. the chamber of the chosen class.
    pub fn sample_cone(&self) -> Option<&Cone> {
        self.chamber.as_ref()
    }

    pub fn git_fan(&self) -> Fan {
        gitfan::git_fan(&self.ring)
    }

    /// Chambers contained in the moving cone.
    pub fn mori_chambers(&self) -> Vec<Cone> {
        gitfan::chambers_within(&self.git_fan(), &self.moving)
    }

    /// Faces of the positive orthant whose orbit cone contains the class;
    /// all a-faces in the affine case.
    pub fn relevant_faces(&self) -> &[VarMask] {
        self.relevant.get_or_init(|| match &self.chamber {
            None => self.ring.a_faces().to_vec(),
            Some(_) => {
                let k = self.ring.class_group();
                let wfree = self.ample.free_part(k);
                self.ring
                    .orbit_cones()
                    .iter()
                    .filter(|(_, c)| c.contains(&wfree))
                    .map(|(m, _)| *m)
                    .collect()
            }
        })
    }

    /// Inclusion-minimal relevant faces.
    pub fn covering_collection(&self) -> &[VarMask] {
        self.covering.get_or_init(|| {
            let relevant = self.relevant_faces();
            relevant
                .iter()
                .copied()
                .filter(|&f| {
                    !relevant.iter().any(|&g| g != f && g & f == g)
                })
                .collect()
        })
    }

    fn degrees_of_face(&self, mask: VarMask) -> Vec<GroupElement> {
        (0..self.ring.nvars())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.ring.degree_of_var(i))
            .collect()
    }

    /// Subgroup of classes whose restriction to every chart is trivial:
    /// the intersection of the subgroups generated by the face degrees.
    pub fn picard_group(&self) -> &Subgroup {
        self.pic.get_or_init(|| {
            let k = self.ring.class_group();
            let mut result = k.full_subgroup();
            for &mask in self.covering_collection() {
                let sub = k.subgroup(&self.degrees_of_face(mask));
                result = result.intersect(&sub).expect("same ambient group");
            }
            result
        })
    }

    /// The class group modulo the degrees of the face variables.
    pub fn local_class_group(&self, mask: VarMask) -> AbelianGroup {
        self.ring
            .class_group()
            .subgroup(&self.degrees_of_face(mask))
            .factor_group()
    }

    fn face_reports(&self) -> &[FaceReport] {
        self.reports.get_or_init(|| {
            let faces = self.relevant_faces().to_vec();
            faces
                .into_par_iter()
                .map(|mask| FaceReport {
                    mask,
                    ambient_smooth: self.stratum_smooth_upstairs(mask),
                    local_cl: self.local_class_group(mask),
                })
                .collect()
        })
    }

    /// Whether the total coordinate space is smooth along the stratum of
    /// the face: the Jacobian must reach the codimension of the relations
    /// at every point with the face coordinates nonzero and the rest zero.
    fn stratum_smooth_upstairs(&self, mask: VarMask) -> bool {
        let r = self.ring.nvars();
        let Some(krull) = self.ring.krull_dim() else {
            return true;
        };
        let codim = r - krull;
        if codim == 0 {
            return true;
        }
        let mut mat: Vec<Vec<Polynomial>> = self
            .ring
            .jacobian()
            .iter()
            .map(|row| row.iter().map(|e| e.restrict_to(mask)).collect())
            .collect();
        let mut needed = codim as i64;
        // Entries that restrict to a single term are invertible on the
        // stratum; eliminating them drops the required rank by one.
        loop {
            deadline::checkpoint();
            if needed <= 0 {
                return true;
            }
            let mut pivot: Option<(usize, usize)> = None;
            for (i, row) in mat.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    if e.terms().len() == 1 {
                        let better = match pivot {
                            None => true,
                            Some((pi, pj)) => e.total_degree() < mat[pi][pj].total_degree(),
                        };
                        if better {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            let u = mat[pi][pj].clone();
            let mut next: Vec<Vec<Polynomial>> = Vec::with_capacity(mat.len() - 1);
            for (i, row) in mat.iter().enumerate() {
                if i == pi {
                    continue;
                }
                let mut new_row = Vec::with_capacity(row.len().saturating_sub(1));
                for (j, e) in row.iter().enumerate() {
                    if j == pj {
                        continue;
                    }
                    new_row.push(e.mul(&u).sub(&mat[i][pj].mul(&mat[pi][j])));
                }
                next.push(new_row);
            }
            mat = next;
            needed -= 1;
        }
        let needed = needed as usize;
        // Zero rows and columns contribute nothing to any minor.
        let mat: Vec<Vec<Polynomial>> = mat
            .into_iter()
            .filter(|row| row.iter().any(|e| !e.is_zero()))
            .collect();
        let live_cols: Vec<usize> = if mat.is_empty() {
            Vec::new()
        } else {
            (0..mat[0].len())
                .filter(|&j| mat.iter().any(|row| !row[j].is_zero()))
                .collect()
        };
        let mut gens = self.ring.restricted_generators(mask);
        if needed <= mat.len().min(live_cols.len()) {
            let mat: Vec<Vec<Polynomial>> = mat
                .iter()
                .map(|row| live_cols.iter().map(|&j| row[j].clone()).collect())
                .collect();
            collect_minors(&mat, needed, &mut gens);
        }
        // With too few independent entries every stratum point is singular,
        // and the zero ideal below keeps the saturation proper.
        !polyring::saturation_is_proper(&gens, mask)
    }

    /// Relevant faces along which the variety is singular, smallest first.
    pub fn singular_strata(&self) -> Vec<VarMask> {
        self.face_reports()
            .iter()
            .filter(|rep| !rep.ambient_smooth || !rep.local_cl.is_trivial())
            .map(|rep| rep.mask)
            .collect()
    }

    /// Singular strata maximal with respect to inclusion.
    pub fn maximal_singular_strata(&self) -> Vec<VarMask> {
        let sing = self.singular_strata();
        sing.iter()
            .copied()
            .filter(|&f| !sing.iter().any(|&g| g != f && g & f == f))
            .collect()
    }

    pub fn is_quasismooth(&self) -> bool {
        self.face_reports().iter().all(|rep| rep.ambient_smooth)
    }

    pub fn is_factorial(&self) -> bool {
        self.face_reports().iter().all(|rep| rep.local_cl.is_trivial())
    }

    pub fn is_qfactorial(&self) -> bool {
        self.face_reports().iter().all(|rep| rep.local_cl.is_finite())
    }

    pub fn is_smooth(&self) -> bool {
        self.is_quasismooth() && self.is_factorial()
    }

    /// Negative of the canonical class: the sum of the variable degrees
    /// minus the sum of the relation degrees.
    pub fn anticanonical_class(&self) -> GroupElement {
        let k = self.ring.class_group();
        let mut total = k.zero();
        for i in 0..self.ring.nvars() {
            total = k.add(&total, &self.ring.degree_of_var(i));
        }
        for d in self.ring.relation_degrees() {
            total = k.sub(&total, &d);
        }
        total
    }

    /// Smallest positive multiple of the canonical class lying in the
    /// Picard group; None when no multiple does.
    pub fn gorenstein_index(&self) -> Option<BigInt> {
        self.picard_group().element_order_mod(&self.anticanonical_class())
    }

    pub fn is_gorenstein(&self) -> bool {
        self.gorenstein_index().map_or(false, |n| n.is_one())
    }

    /// Whether the anticanonical class is ample; None for affine quotients.
    pub fn is_fano(&self) -> Option<bool> {
        let lam = self.chamber.as_ref()?;
        let k = self.ring.class_group();
        let free = self.anticanonical_class().free_part(k);
        Some(self.gorenstein_index().is_some() && lam.relint_contains(&free))
    }

    /// Fan of the minimal toric variety containing the quotient: rays are
    /// the rows of a kernel basis of the degree map, with one maximal cone
    /// per covering face, spanned by the rays outside the face.
    pub fn ambient_fan(&self) -> Fan {
        let kernel = self.ring.grading().kernel();
        let b = kernel.lattice();
        let n = b.cols;
        let cones: Vec<Cone> = self
            .covering_collection()
            .iter()
            .map(|&mask| {
                let rays: Vec<IntVec> = (0..self.ring.nvars())
                    .filter(|i| mask & (1 << i) == 0)
                    .map(|i| b.row(i))
                    .collect();
                Cone::from_rays(n, &rays)
            })
            .collect();
        Fan::assemble(n, cones)
    }

    /// Product of the given classes in the intersection ring; the number of
    /// classes must equal the dimension of the variety, and the relations
    /// must form a complete intersection in the ambient toric variety.
    pub fn intersection_number(
        &self,
        classes: &[GroupElement],
    ) -> Result<BigRational, MdsError> {
        let lam = self.chamber.as_ref().ok_or_else(|| {
            MdsError::NotSupported("intersection numbers need a projective quotient".into())
        })?;
        let k = self.ring.class_group();
        let dim = self.dim().ok_or(MdsError::TrivialRing)?;
        if classes.len() != dim {
            return Err(MdsError::WrongNumberOfClasses {
                expected: dim,
                got: classes.len(),
            });
        }
        for c in classes {
            if c.coords().len() != k.dim() {
                return Err(MdsError::ClassShape {
                    expected: k.dim(),
                    got: c.coords().len(),
                });
            }
        }
        let krull = self.ring.krull_dim().ok_or(MdsError::TrivialRing)?;
        if krull + self.ring.relations().len() != self.ring.nvars() {
            return Err(MdsError::NotSupported(
                "the relations do not cut out a complete intersection".into(),
            ));
        }
        let kernel_rank = self.ring.grading().kernel().lattice().cols;
        if kernel_rank != self.ring.nvars() - k.rank() {
            return Err(MdsError::NotSupported(
                "the degree map does not have full rank".into(),
            ));
        }

        let mut args: Vec<GroupElement> = classes.to_vec();
        args.extend(self.ring.relation_degrees());
        for e in &args {
            let free = e.free_part(k);
            if lam.equations().iter().any(|q| !crate::linalg::dot(q, &free).is_zero()) {
                return Err(MdsError::NotSupported(
                    "class lies outside the span of the chamber".into(),
                ));
            }
        }

        // Write every class as a difference of two classes in the closed
        // chamber, shifting by a doubling multiple of an interior class.
        let center = k
            .element(&lam.relint_point())
            .expect("interior point has class group coordinates");
        let mut plus: Vec<GroupElement> = Vec::new();
        let mut minus: Vec<GroupElement> = Vec::new();
        for e in &args {
            if lam.contains(&e.free_part(k)) {
                plus.push(e.clone());
                minus.push(k.zero());
                continue;
            }
            let mut t = BigInt::one();
            loop {
                let shift = k.scale(&t, &center);
                let sum = k.add(e, &shift);
                if lam.contains(&sum.free_part(k)) {
                    plus.push(sum);
                    minus.push(shift);
                    break;
                }
                t *= 2;
            }
        }

        let n = args.len();
        let mut total = BigRational::zero();
        for choice in 0u64..(1 << n) {
            let picked: Vec<&GroupElement> = (0..n)
                .map(|i| {
                    if choice >> i & 1 == 1 {
                        &minus[i]
                    } else {
                        &plus[i]
                    }
                })
                .collect();
            let value = self.mixed_fiber_volume(&picked)?;
            if choice.count_ones() % 2 == 1 {
                total -= value;
            } else {
                total += value;
            }
        }
        Ok(total)
    }

    /// Alternating sum of fiber polytope volumes over the nonempty subsets;
    /// classes in the closed chamber add their polytopes under addition, so
    /// this is the mixed volume normalized to n! times the ordinary volume
    /// on the diagonal.
    fn mixed_fiber_volume(&self, classes: &[&GroupElement]) -> Result<BigRational, MdsError> {
        let k = self.ring.class_group();
        let n = classes.len();
        let mut total = BigRational::zero();
        for s in 1u64..(1 << n) {
            deadline::checkpoint();
            let mut sum = k.zero();
            for (i, c) in classes.iter().enumerate() {
                if s >> i & 1 == 1 {
                    sum = k.add(&sum, c);
                }
            }
            let vol = self.fiber_volume(&sum)?;
            if (n as u32 - s.count_ones()) % 2 == 1 {
                total -= vol;
            } else {
                total += vol;
            }
        }
        Ok(total)
    }

    /// Lattice volume of the polytope of monomials of the given class,
    /// parametrized over a kernel basis of the degree map.
    fn fiber_volume(&self, class: &GroupElement) -> Result<BigRational, MdsError> {
        if let Some(v) = self.volumes.lock().unwrap().get(class.coords()) {
            return Ok(v.clone());
        }
        let x0 = self.ring.grading().preimage(class).ok_or_else(|| {
            MdsError::NotSupported(format!("no monomial has class {class}"))
        })?;
        let kernel = self.ring.grading().kernel();
        let b = kernel.lattice();
        let rows: Vec<(RatVec, BigRational)> = (0..self.ring.nvars())
            .map(|i| {
                let coeffs: RatVec = b.row(i).into_iter().map(BigRational::from).collect();
                (coeffs, BigRational::from(-x0[i].clone()))
            })
            .collect();
        let polytope = Polytope::from_inequalities(b.cols, &rows)
            .map_err(|_| MdsError::NotSupported("fiber polytope is unbounded".into()))?;
        let vol = polytope.volume();
        self.volumes
            .lock()
            .unwrap()
            .insert(class.coords().to_vec(), vol.clone());
        Ok(vol)
    }

    /// Top self-intersection number of every variable class.
    pub fn self_intersections(&self) -> Result<Vec<BigRational>, MdsError> {
        let dim = self.dim().ok_or(MdsError::TrivialRing)?;
        (0..self.ring.nvars())
            .map(|i| {
                let class = self.ring.degree_of_var(i);
                self.intersection_number(&vec![class; dim])
            })
            .collect()
    }

    /// Pairs of variables whose classes have positive product, for surfaces.
    pub fn intersection_graph(&self) -> Result<Vec<(usize, usize)>, MdsError> {
        if self.dim() != Some(2) {
            return Err(MdsError::NotSupported(
                "the intersection graph is defined for surfaces".into(),
            ));
        }
        let r = self.ring.nvars();
        let mut edges = Vec::new();
        for i in 0..r {
            for j in i + 1..r {
                let number = self.intersection_number(&[
                    self.ring.degree_of_var(i),
                    self.ring.degree_of_var(j),
                ])?;
                if number > BigRational::zero() {
                    edges.push((i, j));
                }
            }
        }
        Ok(edges)
    }

    pub fn descriptor(&self) -> String {
        let k = self.ring.class_group();
        let torsion: Vec<String> = k.torsion().iter().map(|d| d.to_string()).collect();
        let dim = self
            .dim()
            .map_or_else(|| "?".to_string(), |d| d.to_string());
        format!(
            "MDS({}, {}, {}, [{}, [{}]])",
            self.ring.nvars(),
            self.ring.relations().len(),
            dim,
            k.rank(),
            torsion.join(", ")
        )
    }
}

impl std::fmt::Display for MoriDreamSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

fn collect_minors(mat: &[Vec<Polynomial>], size: usize, out: &mut Vec<Polynomial>) {
    if size == 0 || mat.is_empty() {
        return;
    }
    let rows = mat.len();
    let cols = mat[0].len();
    let row_sets = combinations(rows, size);
    let col_sets = combinations(cols, size);
    for rs in &row_sets {
        for cs in &col_sets {
            deadline::checkpoint();
            let det = poly_det(mat, rs, cs);
            if !det.is_zero() {
                out.push(det);
            }
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

fn poly_det(mat: &[Vec<Polynomial>], rows: &[usize], cols: &[usize]) -> Polynomial {
    if rows.len() == 1 {
        return mat[rows[0]][cols[0]].clone();
    }
    let nvars = mat[rows[0]][cols[0]].nvars();
    let mut det = Polynomial::zero(nvars);
    let rest: Vec<usize> = rows[1..].to_vec();
    for (j, &c) in cols.iter().enumerate() {
        let entry = &mat[rows[0]][c];
        if entry.is_zero() {
            continue;
        }
        let sub_cols: Vec<usize> = cols
            .iter()
            .copied()
            .filter(|&x| x != c)
            .collect();
        let minor = poly_det(mat, &rest, &sub_cols);
        let term = entry.mul(&minor);
        det = if j % 2 == 0 { det.add(&term) } else { det.sub(&term) };
    }
    det
}

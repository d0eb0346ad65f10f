//! Rational convex polyhedral cones, exactly.
//!
//! Every cone carries both canonical descriptions: a saturated lattice basis
//! of its lineality space plus the primitive extreme rays of the pointed
//! quotient (projected into the orthogonal complement of the lineality), and
//! dually a basis of the span's orthogonal complement plus primitive facet
//! normals. Both sides are sorted, so structurally equal cones are equal
//! sets and vice versa, and dualizing is a field swap.
//!
//! Conversion between descriptions is an incremental double description
//! method over the integers with the combinatorial adjacency test.

use crate::deadline;
use crate::linalg::{
    dot, primitive, primitive_from_rational, rational_solve, IntMatrix, IntVec, RatVec,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    ambient: usize,
    lines: Vec<IntVec>,
    rays: Vec<IntVec>,
    ineqs: Vec<IntVec>,
    eqns: Vec<IntVec>,
}

impl std::hash::Hash for Cone {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.lines.hash(state);
        self.rays.hash(state);
    }
}

// Bitsets over constraint indices.
fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bit_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bit_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

struct RayRec {
    v: IntVec,
    tight: Vec<u64>,
}

/// Extreme generators of {x : E x = 0, A x >= 0} as (lines, rays).
fn double_description(
    ambient: usize,
    eqns: &[IntVec],
    ineqs: &[IntVec],
) -> (Vec<IntVec>, Vec<IntVec>) {
    // Equations run first, expanded into opposite inequality pairs.
    let mut constraints: Vec<IntVec> = Vec::with_capacity(2 * eqns.len() + ineqs.len());
    for e in eqns {
        constraints.push(e.clone());
        constraints.push(e.iter().map(|x| -x).collect());
    }
    constraints.extend(ineqs.iter().cloned());
    let words = constraints.len().div_ceil(64).max(1);

    let mut lines: Vec<IntVec> = (0..ambient)
        .map(|i| {
            let mut v = vec![BigInt::zero(); ambient];
            v[i] = BigInt::from(1);
            v
        })
        .collect();
    let mut rays: Vec<RayRec> = Vec::new();

    for (k, a) in constraints.iter().enumerate() {
        deadline::checkpoint();
        if a.iter().all(|x| x.is_zero()) {
            for r in &mut rays {
                bit_set(&mut r.tight, k);
            }
            continue;
        }
        if let Some(idx) = lines.iter().position(|l| !dot(a, l).is_zero()) {
            // A line leaves the halfspace: it splits into a ray, everything
            // else is sheared to lie on the hyperplane.
            let mut l0 = lines.swap_remove(idx);
            if dot(a, &l0).is_negative() {
                l0 = l0.iter().map(|x| -x).collect();
            }
            let alpha = dot(a, &l0);
            for l in &mut lines {
                let beta = dot(a, l);
                let combined: IntVec = l
                    .iter()
                    .zip(&l0)
                    .map(|(x, y)| x * &alpha - y * &beta)
                    .collect();
                *l = primitive(&combined);
            }
            for r in &mut rays {
                let beta = dot(a, &r.v);
                let combined: IntVec = r
                    .v
                    .iter()
                    .zip(&l0)
                    .map(|(x, y)| x * &alpha - y * &beta)
                    .collect();
                r.v = primitive(&combined);
                // Shearing lands every old ray on the new hyperplane.
                bit_set(&mut r.tight, k);
            }
            let mut tight = vec![0u64; words];
            for i in 0..k {
                bit_set(&mut tight, i);
            }
            rays.push(RayRec { v: primitive(&l0), tight });
            continue;
        }

        let values: Vec<BigInt> = rays.iter().map(|r| dot(a, &r.v)).collect();
        if values.iter().all(|v| !v.is_negative()) {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    bit_set(&mut r.tight, k);
                }
            }
            continue;
        }
        let pos: Vec<usize> =
            (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> =
            (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        let mut fresh: Vec<RayRec> = Vec::new();
        for &ip in &pos {
            for &im in &neg {
                deadline::checkpoint();
                let meet = bit_and(&rays[ip].tight, &rays[im].tight);
                let adjacent = !rays.iter().enumerate().any(|(j, r)| {
                    j != ip && j != im && bit_subset(&meet, &r.tight)
                });
                if !adjacent {
                    continue;
                }
                let combined: IntVec = rays[im]
                    .v
                    .iter()
                    .zip(&rays[ip].v)
                    .map(|(m, p)| m * &values[ip] - p * &values[im])
                    .collect();
                let mut tight = meet;
                bit_set(&mut tight, k);
                fresh.push(RayRec { v: primitive(&combined), tight });
            }
        }
        let mut kept: Vec<RayRec> = Vec::new();
        for (i, r) in rays.into_iter().enumerate() {
            if values[i].is_positive() {
                kept.push(r);
            } else if values[i].is_zero() {
                let mut r = r;
                bit_set(&mut r.tight, k);
                kept.push(r);
            }
        }
        kept.extend(fresh);
        rays = kept;
    }
    (lines, rays.into_iter().map(|r| r.v).collect())
}

/// Canonical saturated lattice basis of the span of the given vectors.
fn canonical_span_basis(ambient: usize, vectors: &[IntVec]) -> Vec<IntVec> {
    let live: Vec<IntVec> =
        vectors.iter().filter(|v| v.iter().any(|x| !x.is_zero())).cloned().collect();
    if live.is_empty() {
        return Vec::new();
    }
    let a = IntMatrix::from_bigint_rows(&live);
    let complement = a.integer_kernel();
    let c = if complement.is_empty() {
        IntMatrix::zero(0, ambient)
    } else {
        IntMatrix::from_bigint_rows(&complement)
    };
    let basis = c.integer_kernel();
    if basis.is_empty() {
        return Vec::new();
    }
    let h = IntMatrix::from_cols(&basis).hermite_form();
    (0..h.pivots.len()).map(|j| h.h.col(j)).collect()
}

/// Primitive representatives of the rays projected off the span of `lines`,
/// sorted and deduplicated.
fn canonical_rays(rays: &[IntVec], lines: &[IntVec]) -> Vec<IntVec> {
    let mut out: Vec<IntVec> = Vec::with_capacity(rays.len());
    if lines.is_empty() {
        for r in rays {
            if r.iter().any(|x| !x.is_zero()) {
                out.push(primitive(r));
            }
        }
    } else {
        let b = IntMatrix::from_cols(lines);
        let bt = b.transpose();
        let gram = bt.mul(&b);
        for r in rays {
            let rhs: IntVec = bt.mul_vec(r);
            let c = rational_solve(&gram, &rhs).expect("gram matrix is invertible");
            let bc = b.mul_rat_vec(&c);
            let projected: RatVec = r
                .iter()
                .zip(&bc)
                .map(|(x, y)| BigRational::from(x.clone()) - y)
                .collect();
            if projected.iter().any(|x| !x.is_zero()) {
                out.push(primitive_from_rational(&projected));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

impl Cone {
    fn from_vgens(ambient: usize, lines_in: &[IntVec], rays_in: &[IntVec]) -> Cone {
        // The dual cone's constraints are this cone's generators.
        let (dl, dr) = double_description(ambient, lines_in, rays_in);
        let eqns = canonical_span_basis(ambient, &dl);
        let ineqs = canonical_rays(&dr, &dl);
        let (l2, r2) = double_description(ambient, &eqns, &ineqs);
        let lines = canonical_span_basis(ambient, &l2);
        let rays = canonical_rays(&r2, &l2);
        Cone { ambient, lines, rays, ineqs, eqns }
    }

    pub fn from_rays(ambient: usize, rays: &[IntVec]) -> Cone {
        Cone::from_rays_and_lines(ambient, rays, &[])
    }

    pub fn from_rays_and_lines(ambient: usize, rays: &[IntVec], lines: &[IntVec]) -> Cone {
        assert!(rays.iter().chain(lines).all(|v| v.len() == ambient));
        Cone::from_vgens(ambient, lines, rays)
    }

    pub fn from_inequalities(ambient: usize, ineqs: &[IntVec]) -> Cone {
        Cone::from_hrep(ambient, ineqs, &[])
    }

    pub fn from_hrep(ambient: usize, ineqs: &[IntVec], eqns: &[IntVec]) -> Cone {
        assert!(ineqs.iter().chain(eqns).all(|v| v.len() == ambient));
        let (l1, r1) = double_description(ambient, eqns, ineqs);
        let lines = canonical_span_basis(ambient, &l1);
        let rays = canonical_rays(&r1, &l1);
        let (dl, dr) = double_description(ambient, &lines, &rays);
        let eqns_c = canonical_span_basis(ambient, &dl);
        let ineqs_c = canonical_rays(&dr, &dl);
        Cone { ambient, lines, rays, ineqs: ineqs_c, eqns: eqns_c }
    }

    pub fn zero(ambient: usize) -> Cone {
        Cone::from_rays(ambient, &[])
    }

    pub fn full_space(ambient: usize) -> Cone {
        Cone::from_inequalities(ambient, &[])
    }

    pub fn positive_orthant(ambient: usize) -> Cone {
        let rays: Vec<IntVec> = (0..ambient)
            .map(|i| {
                let mut v = vec![BigInt::zero(); ambient];
                v[i] = BigInt::from(1);
                v
            })
            .collect();
        Cone::from_rays(ambient, &rays)
    }

    /// Intersection of several cones in one pass.
    pub fn intersection(ambient: usize, cones: &[&Cone]) -> Cone {
        let mut ineqs: Vec<IntVec> = Vec::new();
        let mut eqns: Vec<IntVec> = Vec::new();
        for c in cones {
            assert_eq!(c.ambient, ambient);
            ineqs.extend(c.ineqs.iter().cloned());
            eqns.extend(c.eqns.iter().cloned());
        }
        Cone::from_hrep(ambient, &ineqs, &eqns)
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        Cone::intersection(self.ambient, &[self, other])
    }

    pub fn dual(&self) -> Cone {
        Cone {
            ambient: self.ambient,
            lines: self.eqns.clone(),
            rays: self.ineqs.clone(),
            ineqs: self.rays.clone(),
            eqns: self.lines.clone(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ambient - self.eqns.len()
    }

    pub fn lineality_dim(&self) -> usize {
        self.lines.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn is_fulldim(&self) -> bool {
        self.eqns.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.lines.is_empty() && self.rays.is_empty()
    }

    /// Primitive extreme rays of the pointed quotient, projected off the
    /// lineality space.
    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn lines(&self) -> &[IntVec] {
        &self.lines
    }

    /// Facet normals, valid inside the span.
    pub fn facet_normals(&self) -> &[IntVec] {
        &self.ineqs
    }

    /// Defining equations of the span.
    pub fn equations(&self) -> &[IntVec] {
        &self.eqns
    }

    /// Saturated lattice basis of the linear span.
    pub fn span_basis(&self) -> Vec<IntVec> {
        let mut gens = self.lines.clone();
        gens.extend(self.rays.iter().cloned());
        canonical_span_basis(self.ambient, &gens)
    }

    pub fn descriptor(&self) -> String {
        format!(
            "CONE({}, {}, {}, {}, {})",
            self.ambient,
            self.dim(),
            self.lineality_dim(),
            self.rays.len(),
            self.ineqs.len()
        )
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.eqns.iter().all(|e| dot(e, x).is_zero())
            && self.ineqs.iter().all(|a| !dot(a, x).is_negative())
    }

    pub fn contains_rat(&self, x: &[BigRational]) -> bool {
        let dot_rat = |a: &IntVec| -> BigRational {
            a.iter()
                .zip(x)
                .map(|(c, v)| BigRational::from(c.clone()) * v)
                .sum()
        };
        self.eqns.iter().all(|e| dot_rat(e).is_zero())
            && self.ineqs.iter().all(|a| !dot_rat(a).is_negative())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.rays.iter().all(|r| self.contains(r))
            && other.lines.iter().all(|l| {
                self.contains(l) && self.contains(&l.iter().map(|x| -x).collect::<IntVec>())
            })
    }

    pub fn relint_contains(&self, x: &[BigInt]) -> bool {
        self.eqns.iter().all(|e| dot(e, x).is_zero())
            && self.ineqs.iter().all(|a| dot(a, x).is_positive())
    }

    /// An integer point in the relative interior (zero for the zero cone).
    pub fn relint_point(&self) -> IntVec {
        let mut p = vec![BigInt::zero(); self.ambient];
        for r in &self.rays {
            for (pi, ri) in p.iter_mut().zip(r) {
                *pi += ri;
            }
        }
        p
    }

    /// Facets, one per canonical facet normal.
    pub fn facets(&self) -> Vec<Cone> {
        self.ineqs
            .iter()
            .map(|a| {
                let mut eqns = self.eqns.clone();
                eqns.push(a.clone());
                Cone::from_hrep(self.ambient, &self.ineqs, &eqns)
            })
            .collect()
    }

    /// The smallest face containing the given point of the cone.
    pub fn minimal_face_at(&self, x: &[BigInt]) -> Cone {
        debug_assert!(self.contains(x));
        let mut eqns = self.eqns.clone();
        for a in &self.ineqs {
            if dot(a, x).is_zero() {
                eqns.push(a.clone());
            }
        }
        Cone::from_hrep(self.ambient, &self.ineqs, &eqns)
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        if self.ambient != other.ambient || !other.contains_cone(self) {
            return false;
        }
        *self == other.minimal_face_at(&self.relint_point())
    }

    /// Whether the direction u points into the cone when standing at the
    /// point b of the cone: u must respect every facet active at b and stay
    /// inside the span.
    pub fn tangent_contains(&self, b: &[BigInt], u: &[BigInt]) -> bool {
        debug_assert!(self.contains(b));
        self.eqns.iter().all(|e| dot(e, u).is_zero())
            && self
                .ineqs
                .iter()
                .filter(|a| dot(a, b).is_zero())
                .all(|a| !dot(a, u).is_negative())
    }
}

impl std::fmt::Display for Cone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

//! Variation of quotients for graded rings.
//!
//! The degrees of the variables span the effective cone. Each face of the
//! positive orthant that meets the zero set contributes an orbit cone
//! spanned by its degree vectors, and the chamber of a class w is the
//! intersection of all orbit cones containing w. The chambers form a fan
//! covering the effective cone, computed here by crossing chamber facets
//! into neighbouring chambers until no new ones appear.

use crate::cone::Cone;
use crate::deadline;
use crate::fan::Fan;
use crate::linalg::{dot, rational_solve, IntMatrix, IntVec};
use crate::ring::GradedRing;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{HashSet, VecDeque};

fn free_degrees(ring: &GradedRing) -> Vec<IntVec> {
    let k = ring.class_group();
    (0..ring.nvars())
        .map(|i| ring.degree_of_var(i).free_part(k))
        .collect()
}

/// Cone spanned by the degrees of all variables.
pub fn effective_cone(ring: &GradedRing) -> Cone {
    Cone::from_rays(ring.class_group().rank(), &free_degrees(ring))
}

/// Intersection, over every variable, of the cones spanned by the degrees
/// of the remaining variables.
pub fn moving_cone(ring: &GradedRing) -> Cone {
    let k = ring.class_group().rank();
    let degs = free_degrees(ring);
    let drops: Vec<Cone> = (0..degs.len())
        .map(|i| {
            let rest: Vec<IntVec> = degs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| q.clone())
                .collect();
            Cone::from_rays(k, &rest)
        })
        .collect();
    let refs: Vec<&Cone> = drops.iter().collect();
    Cone::intersection(k, &refs)
}

/// Intersection of all orbit cones containing w, or None when no orbit
/// cone does.
pub fn chamber(ring: &GradedRing, w: &[BigInt]) -> Option<Cone> {
    let k = ring.class_group().rank();
    let containing: Vec<&Cone> = ring
        .orbit_cones()
        .iter()
        .filter(|(_, c)| c.contains(w))
        .map(|(_, c)| c)
        .collect();
    if containing.is_empty() {
        None
    } else {
        Some(Cone::intersection(k, &containing))
    }
}

/// The fan of chambers covering the effective cone.
pub fn git_fan(ring: &GradedRing) -> Fan {
    let k = ring.class_group().rank();
    let eff = effective_cone(ring);
    if eff.is_zero() {
        return Fan::assemble(k, vec![Cone::zero(k)]);
    }
    let basis = eff.span_basis();
    let d = basis.len();
    if d == k {
        let orbit: Vec<Cone> = ring.orbit_cones().iter().map(|(_, c)| c.clone()).collect();
        return Fan::assemble(k, traverse(k, &orbit, &eff));
    }
    // The effective cone spans a proper subspace; work in coordinates of a
    // saturated basis of that subspace and map the chambers back.
    let b = IntMatrix::from_cols(&basis);
    let degs = free_degrees(ring);
    let reduced: Vec<IntVec> = degs
        .iter()
        .map(|q| {
            let c = rational_solve(&b, q).expect("degree lies in the span");
            c.iter()
                .map(|x| {
                    assert!(x.is_integer(), "saturated basis has integer coordinates");
                    x.to_integer()
                })
                .collect()
        })
        .collect();
    let orbit: Vec<Cone> = ring
        .a_faces()
        .iter()
        .map(|&mask| {
            let rays: Vec<IntVec> = (0..ring.nvars())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| reduced[i].clone())
                .collect();
            Cone::from_rays(d, &rays)
        })
        .collect();
    let eff_red = Cone::from_rays(d, &reduced);
    let chambers = traverse(d, &orbit, &eff_red)
        .into_iter()
        .map(|c| {
            let rays: Vec<IntVec> = c.rays().iter().map(|r| b.mul_vec(r)).collect();
            let lines: Vec<IntVec> = c.lines().iter().map(|l| b.mul_vec(l)).collect();
            Cone::from_rays_and_lines(k, &rays, &lines)
        })
        .collect();
    Fan::assemble(k, chambers)
}

/// Maximal chambers of the fan contained in the given cone.
pub fn chambers_within(fan: &Fan, region: &Cone) -> Vec<Cone> {
    fan.max_cones()
        .iter()
        .filter(|c| region.contains_cone(c))
        .cloned()
        .collect()
}

/// Breadth-first traversal of the full-dimensional chambers, assuming the
/// effective cone is full-dimensional in the ambient space.
fn traverse(ambient: usize, orbit: &[Cone], eff: &Cone) -> Vec<Cone> {
    if ambient == 0 {
        return vec![Cone::zero(0)];
    }
    let mut distinct: HashSet<Cone> = orbit.iter().cloned().collect();
    distinct.insert(eff.clone());
    let full: Vec<Cone> = distinct.iter().filter(|c| c.is_fulldim()).cloned().collect();

    // Hyperplanes a generic starting class must avoid: facet hyperplanes of
    // the full-dimensional cones and span hyperplanes of the others.
    let mut normals: HashSet<IntVec> = HashSet::new();
    for c in &distinct {
        let source = if c.is_fulldim() { c.facet_normals() } else { c.equations() };
        for n in source {
            let mut v = n.clone();
            if let Some(first) = v.iter().find(|x| !x.is_zero()) {
                if first.is_negative() {
                    for x in &mut v {
                        *x = -x.clone();
                    }
                }
            }
            normals.insert(v);
        }
    }

    let w0 = generic_point(ambient, eff, &normals);
    let start = match chamber_among(ambient, &full, &w0) {
        Some(c) => c,
        None => return Vec::new(),
    };

    let mut seen: HashSet<Cone> = HashSet::new();
    let mut queue: VecDeque<Cone> = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(lam) = queue.pop_front() {
        deadline::checkpoint();
        let inward = lam.facet_normals().to_vec();
        for (facet, a) in lam.facets().into_iter().zip(inward) {
            let b = facet.relint_point();
            if !eff.relint_contains(&b) {
                continue;
            }
            let u: IntVec = a.iter().map(|x| -x).collect();
            let active: Vec<&Cone> = full
                .iter()
                .filter(|c| c.contains(&b) && c.tangent_contains(&b, &u))
                .collect();
            if active.is_empty() {
                continue;
            }
            let next = Cone::intersection(ambient, &active);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().collect()
}

/// A class interior to the effective cone avoiding all the hyperplanes:
/// perturb a relative interior point along a direction no hyperplane
/// annihilates, by less than the distance to any hyperplane not through
/// the point.
fn generic_point(ambient: usize, eff: &Cone, normals: &HashSet<IntVec>) -> IntVec {
    let a = eff.relint_point();
    let bound = normals
        .iter()
        .flat_map(|u| u.iter())
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(BigInt::one);
    let m = BigInt::from(2) * bound + BigInt::from(2);
    let mut dir: IntVec = Vec::with_capacity(ambient);
    let mut cur = BigInt::one();
    for _ in 0..ambient {
        dir.push(cur.clone());
        cur *= &m;
    }
    let mut t = BigRational::one();
    for u in normals {
        let ua = dot(u, &a);
        let ud = dot(u, &dir);
        debug_assert!(!ud.is_zero());
        if !ua.is_zero() {
            let cand = BigRational::new(ua.abs(), BigInt::from(2) * ud.abs());
            if cand < t {
                t = cand;
            }
        }
    }
    let (p, q) = (t.numer().clone(), t.denom().clone());
    a.iter()
        .zip(&dir)
        .map(|(ai, di)| ai * &q + di * &p)
        .collect()
}

fn chamber_among(ambient: usize, full: &[Cone], w: &[BigInt]) -> Option<Cone> {
    let containing: Vec<&Cone> = full.iter().filter(|c| c.contains(w)).collect();
    if containing.is_empty() {
        None
    } else {
        Some(Cone::intersection(ambient, &containing))
    }
}

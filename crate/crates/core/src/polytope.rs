//! Rational polytopes: vertex enumeration, Minkowski sums, exact volumes.
//!
//! A polytope is stored by its sorted vertex list. Constructions go through
//! the cone machinery by homogenizing: points sit at height one, so extreme
//! rays of the lifted cone are exactly the vertices, and the lifted cone's
//! facet structure drives a pyramid triangulation for volumes.

use crate::cone::Cone;
use crate::deadline;
use crate::linalg::{IntVec, RatVec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("feasible region is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polytope {
    ambient: usize,
    vertices: Vec<RatVec>,
}

/// Scales a rational vector to a primitive integer vector with an extra
/// coordinate appended, used for lifting points to rays at height one.
fn lift_point(p: &[BigRational]) -> IntVec {
    let mut denom = BigInt::one();
    for x in p {
        denom = denom.lcm(x.denom());
    }
    let mut v: IntVec = p.iter().map(|x| (x * BigRational::from(denom.clone())).to_integer()).collect();
    v.push(denom);
    v
}

fn dot_mixed(a: &[BigInt], p: &[BigRational], last: &BigInt) -> BigRational {
    let mut acc: BigRational = a
        .iter()
        .zip(p)
        .map(|(c, v)| BigRational::from(c.clone()) * v)
        .sum();
    acc += BigRational::from(a[a.len() - 1].clone() * last);
    acc
}

impl Polytope {
    pub fn empty(ambient: usize) -> Polytope {
        Polytope { ambient, vertices: Vec::new() }
    }

    /// Convex hull of the given points.
    pub fn from_points(ambient: usize, points: &[RatVec]) -> Polytope {
        assert!(points.iter().all(|p| p.len() == ambient));
        if points.is_empty() {
            return Polytope::empty(ambient);
        }
        let lifted: Vec<IntVec> = points.iter().map(|p| lift_point(p)).collect();
        let cone = Cone::from_rays(ambient + 1, &lifted);
        let mut vertices: Vec<RatVec> = cone
            .rays()
            .iter()
            .map(|r| {
                let t = r[ambient].clone();
                debug_assert!(t.is_positive());
                r[..ambient]
                    .iter()
                    .map(|x| BigRational::new(x.clone(), t.clone()))
                    .collect()
            })
            .collect();
        vertices.sort();
        Polytope { ambient, vertices }
    }

    /// Solution set of `a . x >= b` rows; errors when nonempty and
    /// unbounded.
    pub fn from_inequalities(
        ambient: usize,
        rows: &[(RatVec, BigRational)],
    ) -> Result<Polytope, PolytopeError> {
        // Homogenize each row to (a, -b) . (x, t) >= 0 with t >= 0.
        let mut ineqs: Vec<IntVec> = Vec::with_capacity(rows.len() + 1);
        for (a, b) in rows {
            assert_eq!(a.len(), ambient);
            let mut denom = b.denom().clone();
            for x in a {
                denom = denom.lcm(x.denom());
            }
            let scale = BigRational::from(denom);
            let mut v: IntVec = a.iter().map(|x| (x * &scale).to_integer()).collect();
            v.push((-b * &scale).to_integer());
            ineqs.push(v);
        }
        let mut t_row = vec![BigInt::zero(); ambient + 1];
        t_row[ambient] = BigInt::one();
        ineqs.push(t_row);
        let cone = Cone::from_hrep(ambient + 1, &ineqs, &[]);
        let mut vertices: Vec<RatVec> = Vec::new();
        let mut recession = !cone.lines().is_empty();
        for r in cone.rays() {
            let t = &r[ambient];
            if t.is_zero() {
                recession = true;
            } else {
                vertices.push(
                    r[..ambient]
                        .iter()
                        .map(|x| BigRational::new(x.clone(), t.clone()))
                        .collect(),
                );
            }
        }
        if vertices.is_empty() {
            return Ok(Polytope::empty(ambient));
        }
        if recession {
            return Err(PolytopeError::Unbounded);
        }
        vertices.sort();
        Ok(Polytope { ambient, vertices })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn vertices(&self) -> &[RatVec] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Affine dimension; -1 for the empty polytope.
    pub fn dim(&self) -> i64 {
        if self.vertices.is_empty() {
            return -1;
        }
        let lifted: Vec<IntVec> = self.vertices.iter().map(|p| lift_point(p)).collect();
        Cone::from_rays(self.ambient + 1, &lifted).dim() as i64 - 1
    }

    pub fn minkowski_sum(&self, other: &Polytope) -> Polytope {
        assert_eq!(self.ambient, other.ambient);
        if self.is_empty() || other.is_empty() {
            return Polytope::empty(self.ambient);
        }
        let mut sums: Vec<RatVec> = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for v in &self.vertices {
            for w in &other.vertices {
                sums.push(v.iter().zip(w).map(|(x, y)| x + y).collect());
            }
        }
        Polytope::from_points(self.ambient, &sums)
    }

    /// Euclidean volume in the ambient coordinates; zero when the affine
    /// hull is lower-dimensional.
    pub fn volume(&self) -> BigRational {
        let n = self.ambient;
        if self.vertices.len() < n + 1 {
            return BigRational::zero();
        }
        let (dim, simplices) = simplices_of_hull(n, &self.vertices);
        if dim < n {
            return BigRational::zero();
        }
        let mut total = BigRational::zero();
        let nfact: BigInt = (1..=n as u64).map(BigInt::from).product();
        for s in simplices {
            total += simplex_det(&s).abs();
        }
        total / BigRational::from(nfact)
    }
}

/// Triangulates the convex hull of the points (assumed to be exactly the
/// hull's vertices) into simplices of the hull's dimension, by coning each
/// facet triangulation over the lexicographically smallest vertex.
fn simplices_of_hull(ambient: usize, points: &[RatVec]) -> (usize, Vec<Vec<RatVec>>) {
    deadline::checkpoint();
    if points.len() == 1 {
        return (0, vec![vec![points[0].clone()]]);
    }
    let lifted: Vec<IntVec> = points.iter().map(|p| lift_point(p)).collect();
    let cone = Cone::from_rays(ambient + 1, &lifted);
    let dim = cone.dim() - 1;
    if points.len() == dim + 1 {
        return (dim, vec![points.to_vec()]);
    }
    let apex = points.iter().min().unwrap();
    let one = BigInt::one();
    let mut out: Vec<Vec<RatVec>> = Vec::new();
    for normal in cone.facet_normals() {
        if dot_mixed(normal, apex, &one).is_zero() {
            continue;
        }
        let facet_pts: Vec<RatVec> = points
            .iter()
            .filter(|p| dot_mixed(normal, p, &one).is_zero())
            .cloned()
            .collect();
        let (_, subs) = simplices_of_hull(ambient, &facet_pts);
        for mut s in subs {
            s.push(apex.clone());
            out.push(s);
        }
    }
    (dim, out)
}

/// Determinant of [v1 - v0, ..., vn - v0] for a simplex of n+1 points.
fn simplex_det(simplex: &[RatVec]) -> BigRational {
    let n = simplex.len() - 1;
    let mut m: Vec<RatVec> = (1..=n)
        .map(|i| {
            simplex[i]
                .iter()
                .zip(&simplex[0])
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    // Fraction-free enough: plain rational Gaussian elimination.
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            let factor = &m[r][col] / &pv;
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let sub = &m[col][c] * &factor;
                m[r][c] -= sub;
            }
        }
    }
    det
}

/// Normalized mixed volume of exactly `ambient` polytopes: the alternating
/// inclusion-exclusion sum of Euclidean volumes of Minkowski subset sums.
/// Feeding the same polytope n times gives n! times its Euclidean volume.
pub fn mixed_volume(ambient: usize, polys: &[&Polytope]) -> BigRational {
    assert_eq!(polys.len(), ambient, "need exactly ambient many polytopes");
    assert!(polys.iter().all(|p| p.ambient_dim() == ambient));
    let n = polys.len();
    let mut total = BigRational::zero();
    for subset in 1u64..(1 << n) {
        deadline::checkpoint();
        let mut sum: Option<Polytope> = None;
        for (i, p) in polys.iter().enumerate() {
            if subset & (1 << i) != 0 {
                sum = Some(match sum {
                    None => (*p).clone(),
                    Some(s) => s.minkowski_sum(p),
                });
            }
        }
        let vol = sum.unwrap().volume();
        if (n as u32 - subset.count_ones()) % 2 == 0 {
            total += vol;
        } else {
            total -= vol;
        }
    }
    total
}

//! Collections of cones and the fan property.

use crate::cone::Cone;
use crate::deadline;
use serde::{Deserialize, Serialize};

/// A finite set of maximal cones, kept without mutual containments and in a
/// deterministic order. Whether the set actually forms a fan is a separate,
/// potentially expensive check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    ambient: usize,
    max_cones: Vec<Cone>,
}

impl Fan {
    /// Keeps only the inclusion-maximal cones, deduplicated and sorted.
    pub fn assemble(ambient: usize, cones: Vec<Cone>) -> Fan {
        let mut keep: Vec<Cone> = Vec::new();
        for c in cones {
            assert_eq!(c.ambient_dim(), ambient);
            if keep.iter().any(|k| k.contains_cone(&c)) {
                continue;
            }
            keep.retain(|k| !c.contains_cone(k));
            keep.push(c);
        }
        keep.sort_by(|a, b| {
            a.dim()
                .cmp(&b.dim())
                .then_with(|| a.rays().cmp(b.rays()))
                .then_with(|| a.lines().cmp(b.lines()))
        });
        Fan { ambient, max_cones: keep }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    pub fn lineality_dim(&self) -> usize {
        self.max_cones.first().map_or(0, |c| c.lineality_dim())
    }

    /// Pairwise intersections must be faces of both sides.
    pub fn is_fan(&self) -> bool {
        for (i, a) in self.max_cones.iter().enumerate() {
            for b in &self.max_cones[i + 1..] {
                deadline::checkpoint();
                let meet = a.intersect(b);
                if !meet.is_face_of(a) || !meet.is_face_of(b) {
                    return false;
                }
            }
        }
        true
    }

    /// Maximal cones containing the given point.
    pub fn cones_containing(&self, x: &[num_bigint::BigInt]) -> Vec<&Cone> {
        self.max_cones.iter().filter(|c| c.contains(x)).collect()
    }

    /// Counts of maximal cones by dimension 1..=ambient.
    pub fn dim_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.ambient];
        for c in &self.max_cones {
            if c.dim() >= 1 {
                counts[c.dim() - 1] += 1;
            }
        }
        counts
    }

    pub fn descriptor(&self) -> String {
        let counts: Vec<String> =
            self.dim_counts().iter().map(|c| c.to_string()).collect();
        format!(
            "FAN({}, {}, [{}])",
            self.ambient,
            self.lineality_dim(),
            counts.join(", ")
        )
    }
}

impl std::fmt::Display for Fan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

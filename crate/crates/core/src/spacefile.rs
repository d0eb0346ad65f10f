//! JSON description of a graded ring with a distinguished class: the
//! defining tuple (variables, relations, grading, ample). This is the
//! input format of the command line tools and the payload stored per
//! database record.
//!
//! Variables are either a count (names default to T1, T2, ...) or an
//! explicit name list; relations are polynomial strings in those names;
//! the grading is an integer matrix into Z^k plus torsion factors; the
//! ample entry is a class vector, or null for the affine quotient.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{AbelianGroup, GroupElement, GroupError, GroupHom};
use crate::linalg::IntMatrix;
use crate::polyring::{PolyError, Polynomial};
use crate::ring::{GradedRing, RingError};

#[derive(Debug, Error)]
pub enum SpaceFileError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid variable name {name:?}")]
    BadVarName { name: String },
    #[error("duplicate variable name {name:?}")]
    DuplicateVarName { name: String },
    #[error("relation {index} uses unknown variable {name:?}")]
    UnknownVariable { index: usize, name: String },
    #[error("relation {index}: {source}")]
    BadRelation { index: usize, source: PolyError },
    #[error("grading matrix has {got} rows, expected {expected}")]
    MatrixRows { expected: usize, got: usize },
    #[error("grading matrix row {row} has {got} entries, expected {expected}")]
    MatrixCols { row: usize, expected: usize, got: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("value does not fit in the file format")]
    EntryOverflow,
}

/// Variable declaration: a bare count or a full list of names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VarSpec {
    Count(usize),
    Names(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradingSpec {
    pub free_rank: usize,
    #[serde(default)]
    pub torsion: Vec<i64>,
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceFile {
    /// Also accepted under the key "r", the form the show command emits.
    #[serde(alias = "r")]
    pub vars: VarSpec,
    pub relations: Vec<String>,
    pub grading: GradingSpec,
    pub ample: Option<Vec<i64>>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Rewrites every identifier of `input` through the name table, so the
/// core parser only ever sees T1, T2, ...
fn rename_vars(
    input: &str,
    names: &[String],
    index: usize,
) -> Result<String, SpaceFileError> {
    let mut out = String::with_capacity(input.len());
    let bytes = input.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        if c.is_ascii_alphabetic() || c == '_' {
            let start = pos;
            while pos < bytes.len()
                && ((bytes[pos] as char).is_ascii_alphanumeric() || bytes[pos] == b'_')
            {
                pos += 1;
            }
            let word = &input[start..pos];
            match names.iter().position(|n| n == word) {
                Some(i) => out.push_str(&format!("T{}", i + 1)),
                None => {
                    return Err(SpaceFileError::UnknownVariable {
                        index,
                        name: word.to_string(),
                    })
                }
            }
        } else {
            out.push(c);
            pos += 1;
        }
    }
    Ok(out)
}

impl SpaceFile {
    pub fn from_json(text: &str) -> Result<SpaceFile, SpaceFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("serializable");
        out.push('\n');
        out
    }

    pub fn nvars(&self) -> usize {
        match &self.vars {
            VarSpec::Count(r) => *r,
            VarSpec::Names(names) => names.len(),
        }
    }

    /// Display names of the variables, validated for shape and uniqueness.
    pub fn var_names(&self) -> Result<Vec<String>, SpaceFileError> {
        match &self.vars {
            VarSpec::Count(r) => Ok((1..=*r).map(|i| format!("T{i}")).collect()),
            VarSpec::Names(names) => {
                for (i, name) in names.iter().enumerate() {
                    if !valid_name(name) {
                        return Err(SpaceFileError::BadVarName { name: name.clone() });
                    }
                    if names[..i].contains(name) {
                        return Err(SpaceFileError::DuplicateVarName {
                            name: name.clone(),
                        });
                    }
                }
                Ok(names.clone())
            }
        }
    }

    /// Materializes the ring and the distinguished class. With `check`
    /// off the homogeneity test on the relations is skipped.
    pub fn build(
        &self,
        check: bool,
    ) -> Result<(GradedRing, GroupElement), SpaceFileError> {
        let nvars = self.nvars();
        let names = self.var_names()?;
        let explicit = matches!(&self.vars, VarSpec::Names(_));

        let mut relations = Vec::with_capacity(self.relations.len());
        for (index, text) in self.relations.iter().enumerate() {
            let rewritten;
            let source: &str = if explicit {
                rewritten = rename_vars(text, &names, index)?;
                &rewritten
            } else {
                text
            };
            let g = Polynomial::parse(source, nvars)
                .map_err(|source| SpaceFileError::BadRelation { index, source })?;
            relations.push(g);
        }

        let class_group = AbelianGroup::from_i64(
            self.grading.free_rank,
            &self.grading.torsion,
        )?;
        if self.grading.matrix.len() != class_group.dim() {
            return Err(SpaceFileError::MatrixRows {
                expected: class_group.dim(),
                got: self.grading.matrix.len(),
            });
        }
        for (row, entries) in self.grading.matrix.iter().enumerate() {
            if entries.len() != nvars {
                return Err(SpaceFileError::MatrixCols {
                    row,
                    expected: nvars,
                    got: entries.len(),
                });
            }
        }
        let matrix = if self.grading.matrix.is_empty() {
            IntMatrix::zero(0, nvars)
        } else {
            IntMatrix::from_rows(&self.grading.matrix)
        };
        let grading = GroupHom::new(AbelianGroup::free(nvars), class_group.clone(), matrix)?;

        let ring = if check {
            GradedRing::new(nvars, relations, grading)?
        } else {
            GradedRing::new_unchecked(nvars, relations, grading)?
        };

        let ample = match &self.ample {
            None => class_group.zero(),
            Some(coords) => class_group.element_from_i64(coords)?,
        };
        Ok((ring, ample))
    }

    /// The inverse direction: a file describing an existing ring together
    /// with a class. A zero class serializes as null.
    pub fn from_ring(
        ring: &GradedRing,
        ample: &GroupElement,
    ) -> Result<SpaceFile, SpaceFileError> {
        let k = ring.class_group();
        let to_i64 =
            |x: &num_bigint::BigInt| x.to_i64().ok_or(SpaceFileError::EntryOverflow);
        let mut torsion = Vec::with_capacity(k.torsion().len());
        for d in k.torsion() {
            torsion.push(to_i64(d)?);
        }
        let m = ring.grading().matrix();
        let mut matrix = Vec::with_capacity(m.rows);
        for i in 0..m.rows {
            let mut row = Vec::with_capacity(m.cols);
            for x in m.row(i) {
                row.push(to_i64(&x)?);
            }
            matrix.push(row);
        }
        let ample = if ample.is_zero() {
            None
        } else {
            let mut coords = Vec::with_capacity(ample.coords().len());
            for x in ample.coords() {
                coords.push(to_i64(x)?);
            }
            Some(coords)
        };
        Ok(SpaceFile {
            vars: VarSpec::Count(ring.nvars()),
            relations: ring.relations().iter().map(|g| g.to_string()).collect(),
            grading: GradingSpec { free_rank: k.rank(), torsion, matrix },
            ample,
        })
    }
}

//! Exact-arithmetic toolkit for Cox rings, GIT fans and Mori dream spaces.
//!
//! The crate is organized bottom-up: integer/rational linear algebra,
//! finitely generated abelian groups, graded polynomial rings with a
//! Gröbner engine, rational convex geometry, GIT variation, and finally
//! the Mori dream space layer tying everything together. A small
//! newline-delimited JSON database of worked examples ships alongside.

pub mod abgroup;
pub mod cone;
pub mod coxdb;
pub mod deadline;
pub mod fan;
pub mod gitfan;
pub mod linalg;
pub mod polyring;
pub mod polytope;
pub mod ring;
pub mod space;
pub mod spacefile;

pub use abgroup::{AbelianGroup, GroupElement, GroupHom, Subgroup};
pub use cone::Cone;
pub use fan::Fan;
pub use linalg::{IntMatrix, IntVec, RatVec};
pub use polyring::{Polynomial, TermOrder, VarMask};
pub use polytope::Polytope;
pub use ring::GradedRing;
pub use space::MoriDreamSpace;
pub use spacefile::SpaceFile;

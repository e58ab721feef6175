//! Exhaustive oracle on finite abelian groups.
//!
//! Everything here works on concrete groups small enough to enumerate and
//! serves as ground truth for the symbolic deciders.

mod group;
mod height;
mod hom;
pub mod snf;
mod subgroup;

use thiserror::Error;

pub use group::{parse_finite_group, Element, FiniteAbelianGroup};
pub use height::{element_height, localization_hom_image};
pub use hom::{
    hom_extends, hom_extends_exhaustive, hom_extends_snf, is_pure_split_finite,
    is_relatively_injective, is_relatively_pure_injective, restriction_homs,
};
pub use snf::{smith_normal_form, IntMatrix, SmithForm, SnfError};
pub use subgroup::{
    enumerate_subgroups, is_direct_summand, is_pure_subgroup, quotient, Subgroup, SubgroupBasis,
};

/// Largest group order the exhaustive routines accept unless told otherwise.
pub const DEFAULT_ORDER_BOUND: u64 = 512;

/// Largest `|G|` and `|M|` at which [`hom_extends`] also runs the
/// exhaustive route and compares.
pub const CROSSCHECK_LIMIT: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("group {group} exceeds the order bound {bound}")]
    BoundExceeded { group: String, bound: u64 },
    #[error("subgroup does not belong to {group}")]
    NotASubgroup { group: String },
    #[error("map is not a homomorphism: relation {relation} is not sent to 0")]
    IllDefinedHom { relation: String },
    #[error("cyclic factor {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("infinite cyclic factor")]
    InfiniteFactor,
    #[error("{element} is not an element of {group}")]
    InvalidElement { element: String, group: String },
    #[error("{group} is not a p-group")]
    NotPGroup { group: String },
    #[error("{c} is not coprime to {p}")]
    NotCoprime { c: i64, p: u64 },
    #[error("{sources} generators but {images} images")]
    ArityMismatch { sources: usize, images: usize },
    #[error("at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("SNF and exhaustive routes disagree: {detail}")]
    RouteDisagreement { detail: String },
    #[error(transparent)]
    Snf(#[from] SnfError),
    #[error("internal error: {0}")]
    Internal(String),
}

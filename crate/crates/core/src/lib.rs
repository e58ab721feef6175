//! Symbolic decision procedures for poor and pi-poor abelian groups.
//!
//! Groups are represented as direct sums of uniform building blocks (see
//! [`group`]); the classification procedures live in [`decide`] and are
//! cross-validated by the exhaustive finite-group oracle in [`finite`].

pub mod characteristic;
pub mod decide;
pub mod finite;
pub mod group;
pub mod parse;
pub mod primes;
pub mod sample;

pub use characteristic::{equivalent, is_homogeneous, Characteristic, GroupType, Height};
pub use group::{
    canonicalize, CanonicalGroup, FamilyTemplate, GroupError, Multiplicity, PrimaryProfile,
    PrimeFamily, Rank, StructuralPredicates, UniformAtom,
};
pub use parse::{parse, render, GroupDescriptor, ParseError, Summand, Term};
pub use decide::{
    in_pure_injectivity_domain_of_witness, is_poor, is_pure_split, pi_poor_necessary, poor_report,
    witness_truncation, DecisionReport, DeciderError, EvidenceRow, PoorReport, Subject, Verdict,
};

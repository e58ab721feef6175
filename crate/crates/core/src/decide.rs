//! Classification procedures with evidence trails.
//!
//! Conditions quantified over every prime are decided from the canonical
//! form: each overridden prime gets its own row, and one "cofinite" row
//! covers all remaining primes through the generic profile. No prime is
//! ever scanned beyond these finitely many.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::characteristic::{is_homogeneous, Characteristic, CharacteristicError, Height};
use crate::finite::{element_height, FiniteAbelianGroup};
use crate::group::{canonicalize, CanonicalGroup, Multiplicity, PrimaryProfile, Rank, UniformAtom};
use crate::parse::{GroupDescriptor, Summand};
use crate::primes::primes_up_to;

pub mod citation {
    pub const POOR_CRITERION: &str = "poor iff T(G) has a summand isomorphic to the sum of all Z(p)";
    pub const POOR_COROLLARY: &str = "poor iff the reduced part, or T(G), is poor";
    pub const INJECTIVE_SUMMAND: &str = "M + N is poor iff M is, for injective N";
    pub const BOUNDED_TORSION: &str = "torsion G is pure-split iff every T_p(G) has bounded reduced part";
    pub const P_GROUP: &str = "a p-group is pure-split iff its reduced part is bounded";
    pub const HOMOGENEOUS: &str =
        "reduced torsion-free G is pure-split iff completely decomposable homogeneous of finite rank";
    pub const FKS: &str = "mixed groups: composite criterion via FKS";
    pub const WITNESS: &str = "pure-injectivity domain of the witness sum of all uniform groups";
    pub const UNBOUNDED_PRIMARY: &str = "pi-poor implies T_p(G) unbounded for each p";
    pub const NOT_TORSION: &str = "a pi-poor group is not torsion";
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeciderError {
    #[error("poor_report conditions disagree: {0}")]
    InconsistentCorollary(String),
    #[error("witness truncation needs max_prime >= 2 and max_exponent >= 1")]
    InvalidTruncation,
    #[error(transparent)]
    Characteristic(#[from] CharacteristicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    /// Reserved for criteria whose converse rests on an external result; no
    /// current decider emits it.
    Unknown,
}

impl Verdict {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Unknown => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Unknown => "unknown",
        })
    }
}

impl Serialize for Verdict {
    /// `true`, `false` or `"unknown"`.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.as_bool() {
            Some(b) => s.serialize_bool(b),
            None => s.serialize_str("unknown"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Torsion,
    TorsionFree,
    Divisible,
}

/// What an evidence row is about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Subject {
    Prime { prime: u64 },
    /// Every prime outside `excluded`, all with the same local structure;
    /// `witness` is the smallest of them.
    Cofinite { excluded: Vec<u64>, witness: u64 },
    Component { component: Component },
}

impl Subject {
    fn rank(&self) -> (u8, u64, Option<Component>) {
        match self {
            Subject::Prime { prime } => (0, *prime, None),
            Subject::Cofinite { .. } => (1, 0, None),
            Subject::Component { component } => (2, 0, Some(*component)),
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Prime { prime } => write!(f, "p={prime}"),
            Subject::Cofinite { excluded, witness } if excluded.is_empty() => {
                write!(f, "every p (e.g. p={witness})")
            }
            Subject::Cofinite { excluded, witness } => {
                let list: Vec<String> = excluded.iter().map(u64::to_string).collect();
                write!(f, "every p not in {{{}}} (e.g. p={witness})", list.join(","))
            }
            Subject::Component { component } => f.write_str(match component {
                Component::Torsion => "torsion",
                Component::TorsionFree => "torsion-free",
                Component::Divisible => "divisible",
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvidenceRow {
    pub subject: Subject,
    pub condition: String,
    pub passed: bool,
    /// Non-binding rows are reported but do not affect the verdict.
    pub binding: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecisionReport {
    pub verdict: Verdict,
    pub evidence: Vec<EvidenceRow>,
    pub citations: Vec<String>,
}

impl DecisionReport {
    fn from_rows(mut evidence: Vec<EvidenceRow>, citations: Vec<&str>) -> Self {
        evidence.sort_by_key(|row| row.subject.rank());
        let ok = evidence.iter().filter(|r| r.binding).all(|r| r.passed);
        DecisionReport {
            verdict: if ok { Verdict::True } else { Verdict::False },
            evidence,
            citations: citations.into_iter().map(String::from).collect(),
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::True
    }

    /// Binding rows that failed.
    pub fn failures(&self) -> impl Iterator<Item = &EvidenceRow> {
        self.evidence.iter().filter(|r| r.binding && !r.passed)
    }
}

fn row(subject: Subject, condition: &str, passed: bool) -> EvidenceRow {
    EvidenceRow {
        subject,
        condition: condition.to_string(),
        passed,
        binding: true,
    }
}

fn note(subject: Subject, condition: &str, passed: bool) -> EvidenceRow {
    EvidenceRow {
        binding: false,
        ..row(subject, condition, passed)
    }
}

fn component(component: Component) -> Subject {
    Subject::Component { component }
}

/// One row per overridden prime plus the cofinite row, for a condition on
/// the p-local profile.
fn per_prime(g: &CanonicalGroup, condition: &str, binding: bool, test: impl Fn(&PrimaryProfile) -> bool) -> Vec<EvidenceRow> {
    let mut rows: Vec<EvidenceRow> = g
        .overrides()
        .iter()
        .map(|(&prime, prof)| row(Subject::Prime { prime }, condition, test(prof)))
        .collect();
    rows.push(row(
        Subject::Cofinite {
            excluded: g.override_primes().into_iter().collect(),
            witness: g.generic_representative_prime(),
        },
        condition,
        test(g.generic_profile()),
    ));
    for r in &mut rows {
        r.binding = binding;
    }
    rows
}

fn has_zp_summand(prof: &PrimaryProfile) -> bool {
    prof.cyclic_multiplicity(1).is_some()
}

/// `G` is poor iff every `T_p(G)` has a `Z(p)` summand. A tower at `p`
/// contains `Z(p)` as one of its summands.
pub fn is_poor(g: &CanonicalGroup) -> DecisionReport {
    let rows = per_prime(g, "T_p has a Z(p) summand", true, has_zp_summand);
    let mut citations = vec![citation::POOR_CRITERION];
    if !g.divisible_part().is_zero() {
        citations.push(citation::INJECTIVE_SUMMAND);
    }
    DecisionReport::from_rows(rows, citations)
}

/// The four equivalent forms of poorness, evaluated separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoorReport {
    pub poor: bool,
    pub reduced_part_poor: bool,
    pub torsion_part_poor: bool,
    pub zp_summand_at_every_prime: bool,
    pub report: DecisionReport,
}

/// A finite stand-in for a p-local profile that keeps the heights of
/// socle elements: `Z(p)` stays, longer cyclics and Prüfer become `Z(p^2)`.
fn socle_shadow(p: u64, prof: &PrimaryProfile) -> FiniteAbelianGroup {
    let mut factors = Vec::new();
    for &e in prof.cyclic_summands().keys() {
        factors.push(if e == 1 { p } else { p * p });
    }
    if prof.prufer_multiplicity().is_some() {
        factors.push(p * p);
    }
    if prof.tower_multiplicity().is_some() {
        factors.extend([p, p * p]);
    }
    FiniteAbelianGroup::new(factors).expect("prime powers")
}

/// Whether some element of order `p` has height 0, i.e. spans a pure, hence
/// summand, copy of `Z(p)`. Checking the socle of each factor is enough
/// since heights are minima over coordinates.
fn shadow_has_zp_summand(p: u64, prof: &PrimaryProfile) -> bool {
    let shadow = socle_shadow(p, prof);
    (0..shadow.arity()).any(|i| {
        let m = shadow.factors()[i];
        let socle = shadow.scale((m / p) as i64, &shadow.generator(i));
        element_height(&shadow, &socle, p).expect("element of the shadow") == Height::Finite(0)
    })
}

pub fn poor_report(g: &CanonicalGroup) -> Result<PoorReport, DeciderError> {
    let report = is_poor(g);
    let poor = report.holds();
    let reduced_part_poor = is_poor(&g.reduced_part()).holds();
    let torsion_part_poor = is_poor(&g.torsion_part()).holds();
    let mut primes: BTreeSet<u64> = g.override_primes();
    primes.insert(g.generic_representative_prime());
    let zp_summand_at_every_prime = primes.iter().all(|&p| {
        let t_p = g.p_primary(p);
        shadow_has_zp_summand(p, t_p.local(p))
    });
    let all = [poor, reduced_part_poor, torsion_part_poor, zp_summand_at_every_prime];
    if all.iter().any(|&b| b != poor) {
        return Err(DeciderError::InconsistentCorollary(format!(
            "{g}: is_poor={poor}, reduced={reduced_part_poor}, torsion={torsion_part_poor}, per-prime={zp_summand_at_every_prime}"
        )));
    }
    Ok(PoorReport {
        poor,
        reduced_part_poor,
        torsion_part_poor,
        zp_summand_at_every_prime,
        report: DecisionReport {
            citations: vec![citation::POOR_CRITERION.into(), citation::POOR_COROLLARY.into()],
            ..report
        },
    })
}

fn reduced_rank_and_types(g: &CanonicalGroup) -> Result<(Rank, bool), DeciderError> {
    let tf = g.reduced_part().torsion_free_summand();
    Ok((tf.torsion_free_rank(), is_homogeneous(&tf)?))
}

fn pure_split_citations(g: &CanonicalGroup) -> Vec<&'static str> {
    let torsion = !g.torsion_part().is_zero();
    let reduced_tf = !g.reduced_part().torsion_free_summand().is_zero();
    let mut out = Vec::new();
    if torsion {
        out.push(citation::BOUNDED_TORSION);
        if !g.torsion_part().divisible_part().is_zero() {
            out.push(citation::P_GROUP);
        }
    }
    if reduced_tf {
        out.push(citation::HOMOGENEOUS);
    }
    if !g.is_torsion() && torsion {
        out.push(citation::FKS);
    }
    out
}

/// Every `T_p` has bounded reduced part, and the reduced torsion-free part
/// has finite rank and is homogeneous. Divisible summands are free.
pub fn is_pure_split(g: &CanonicalGroup) -> DecisionReport {
    let mut rows = per_prime(g, "reduced part of T_p is bounded", true, PrimaryProfile::reduced_is_bounded);
    let (rank, homogeneous) = reduced_rank_and_types(g).expect("torsion-free summand");
    let tf = component(Component::TorsionFree);
    rows.push(row(tf.clone(), "reduced torsion-free part has finite rank", rank.is_finite()));
    rows.push(row(tf, "reduced torsion-free part is homogeneous", homogeneous));
    rows.push(note(
        component(Component::Divisible),
        "divisible part is unconstrained",
        true,
    ));
    DecisionReport::from_rows(rows, pure_split_citations(g))
}

/// The same class as [`is_pure_split`], computed from the group's parts:
/// the reduced part is split into primary components and a torsion-free
/// summand, and each is tested on its own.
pub fn in_pure_injectivity_domain_of_witness(g: &CanonicalGroup) -> DecisionReport {
    let reduced = g.reduced_part();
    let mut rows = Vec::new();
    for p in reduced.override_primes() {
        rows.push(row(
            Subject::Prime { prime: p },
            "bounded reduced p-component",
            reduced.p_primary(p).is_bounded(),
        ));
    }
    let witness = reduced.generic_representative_prime();
    rows.push(row(
        Subject::Cofinite {
            excluded: reduced.override_primes().into_iter().collect(),
            witness,
        },
        "bounded reduced p-component",
        reduced.p_primary(witness).is_bounded(),
    ));
    let tf = reduced.torsion_free_summand();
    let subject = component(Component::TorsionFree);
    rows.push(row(subject.clone(), "finite rank", tf.torsion_free_rank().is_finite()));
    rows.push(row(
        subject,
        "homogeneous",
        is_homogeneous(&tf).expect("torsion-free summand"),
    ));
    let mut citations = vec![citation::WITNESS];
    citations.extend(pure_split_citations(g));
    DecisionReport::from_rows(rows, citations)
}

/// Necessary conditions for pi-poorness: `G` is not torsion and every
/// `T_p(G)` is unbounded. A Prüfer summand makes `T_p` unbounded; whether
/// the reduced part is unbounded is reported in non-binding rows.
pub fn pi_poor_necessary(g: &CanonicalGroup) -> DecisionReport {
    let mut rows = per_prime(g, "T_p is unbounded", true, |prof| !prof.is_bounded());
    rows.extend(per_prime(g, "reduced part of T_p is unbounded", false, |prof| {
        !prof.reduced_is_bounded()
    }));
    rows.push(row(
        component(Component::TorsionFree),
        "G is not torsion",
        !g.is_torsion(),
    ));
    DecisionReport::from_rows(rows, vec![citation::UNBOUNDED_PRIMARY, citation::NOT_TORSION])
}

/// `Z(p^n)^omega` for every `p <= max_prime` and `n <= max_exponent`, plus
/// `R(chi)^omega` for each listed characteristic.
pub fn witness_truncation(
    max_prime: u64,
    max_exponent: u32,
    rank_one_types: &[Characteristic],
) -> Result<CanonicalGroup, DeciderError> {
    if max_prime < 2 || max_exponent < 1 {
        return Err(DeciderError::InvalidTruncation);
    }
    let mut d = GroupDescriptor::default();
    for p in primes_up_to(max_prime) {
        for n in 1..=max_exponent {
            d.push(Summand::Atom(UniformAtom::Cyclic { p, n }), Multiplicity::Omega);
        }
    }
    for chi in rank_one_types {
        d.push(Summand::Atom(UniformAtom::Rational(chi.clone())), Multiplicity::Omega);
    }
    Ok(canonicalize(&d).expect("valid atoms"))
}

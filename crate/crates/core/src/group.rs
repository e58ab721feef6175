//! Canonical form for direct sums of uniform abelian groups.
//!
//! The representable groups are
//!
//! ```text
//!   (rank-1 torsion-free atoms)  +  (for every prime p: a p-local part)
//! ```
//!
//! where each p-local part is a direct sum of cyclic `Z(p^n)` summands,
//! Prüfer groups `Z(p^inf)` and "towers" `Z(p) + Z(p^2) + Z(p^3) + ...`.
//! The p-local parts agree with one *generic* profile at all but finitely
//! many primes (this is how prime families such as `sum{p}[Z(p^1)]` are
//! stored); the remaining primes carry an override that fully replaces the
//! generic profile.
//!
//! For this class the canonical form is a complete isomorphism invariant: a
//! p-local part is determined up to isomorphism by the number of `Z(p^n)`
//! summands for each `n` and the number of Prüfer summands, and a
//! completely decomposable torsion-free group by the multiset of types of
//! its rank-1 summands.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::characteristic::Characteristic;
use crate::parse::{GroupDescriptor, Summand};
use crate::primes::{first_prime_not_in, is_prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("cyclic exponent must be at least 1")]
    ZeroExponent,
}

/// Number of copies of a summand: a positive integer or countably many.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Multiplicity {
    Finite(u64),
    Omega,
}

impl Multiplicity {
    pub const ONE: Multiplicity = Multiplicity::Finite(1);

    /// `None` for zero, which is not a multiplicity.
    pub fn finite(n: u64) -> Option<Self> {
        (n > 0).then_some(Multiplicity::Finite(n))
    }

    pub fn is_omega(self) -> bool {
        self == Multiplicity::Omega
    }
}

impl Add for Multiplicity {
    type Output = Multiplicity;

    fn add(self, rhs: Multiplicity) -> Multiplicity {
        match (self, rhs) {
            (Multiplicity::Finite(a), Multiplicity::Finite(b)) => {
                Multiplicity::Finite(a.saturating_add(b))
            }
            _ => Multiplicity::Omega,
        }
    }
}

impl Mul for Multiplicity {
    type Output = Multiplicity;

    fn mul(self, rhs: Multiplicity) -> Multiplicity {
        match (self, rhs) {
            (Multiplicity::Finite(a), Multiplicity::Finite(b)) => {
                Multiplicity::Finite(a.saturating_mul(b))
            }
            _ => Multiplicity::Omega,
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(n) => write!(f, "{n}"),
            Multiplicity::Omega => f.write_str("omega"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(n) => s.serialize_u64(*n),
            Multiplicity::Omega => s.serialize_str("omega"),
        }
    }
}

fn add_opt(a: Option<Multiplicity>, b: Option<Multiplicity>) -> Option<Multiplicity> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Torsion-free rank: a cardinal that may be zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Finite(u64),
    Omega,
}

impl Rank {
    pub fn is_finite(self) -> bool {
        matches!(self, Rank::Finite(_))
    }
}

impl From<Multiplicity> for Rank {
    fn from(m: Multiplicity) -> Rank {
        match m {
            Multiplicity::Finite(n) => Rank::Finite(n),
            Multiplicity::Omega => Rank::Omega,
        }
    }
}

impl Add for Rank {
    type Output = Rank;

    fn add(self, rhs: Rank) -> Rank {
        match (self, rhs) {
            (Rank::Finite(a), Rank::Finite(b)) => Rank::Finite(a.saturating_add(b)),
            _ => Rank::Omega,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(n) => write!(f, "{n}"),
            Rank::Omega => f.write_str("omega"),
        }
    }
}

impl Serialize for Rank {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Rank::Finite(n) => s.serialize_u64(*n),
            Rank::Omega => s.serialize_str("omega"),
        }
    }
}

/// A uniform building block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UniformAtom {
    /// `Z(p^n)`, `n >= 1`.
    Cyclic { p: u64, n: u32 },
    /// `Z(p^inf)`.
    Prufer { p: u64 },
    /// A rank-1 torsion-free group with the given characteristic.
    Rational(Characteristic),
}

impl UniformAtom {
    pub fn validate(&self) -> Result<(), GroupError> {
        match *self {
            UniformAtom::Cyclic { p, n } => {
                check_prime(p)?;
                if n == 0 {
                    return Err(GroupError::ZeroExponent);
                }
                Ok(())
            }
            UniformAtom::Prufer { p } => check_prime(p),
            UniformAtom::Rational(_) => Ok(()),
        }
    }
}

fn check_prime(p: u64) -> Result<(), GroupError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(GroupError::NotPrime(p))
    }
}

/// What a prime family contributes at each prime `p` in its scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyTemplate {
    /// `Z(p^e)`.
    FixedExponent(u32),
    /// `Z(p^inf)`.
    PruferAll,
    /// `Z(p) + Z(p^2) + Z(p^3) + ...`.
    UnboundedTower,
}

/// `sum over primes p not in excluded` of `template(p)^multiplicity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFamily {
    pub template: FamilyTemplate,
    pub multiplicity: Multiplicity,
    pub excluded: BTreeSet<u64>,
}

/// The p-local part of a group, stated independently of `p`.
///
/// Normalized: no zero multiplicities, and an `omega` tower absorbs every
/// cyclic summand (each `Z(p^n)` already occurs countably often).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PrimaryProfile {
    cyclic: BTreeMap<u32, Multiplicity>,
    prufer: Option<Multiplicity>,
    tower: Option<Multiplicity>,
}

impl PrimaryProfile {
    pub fn cyclic(exponent: u32, m: Multiplicity) -> Self {
        let mut out = PrimaryProfile::default();
        out.cyclic.insert(exponent, m);
        out.normalized()
    }

    pub fn prufer(m: Multiplicity) -> Self {
        PrimaryProfile {
            prufer: Some(m),
            ..Default::default()
        }
    }

    pub fn tower(m: Multiplicity) -> Self {
        PrimaryProfile {
            tower: Some(m),
            ..Default::default()
        }
    }

    pub fn from_template(template: FamilyTemplate, m: Multiplicity) -> Self {
        match template {
            FamilyTemplate::FixedExponent(e) => PrimaryProfile::cyclic(e, m),
            FamilyTemplate::PruferAll => PrimaryProfile::prufer(m),
            FamilyTemplate::UnboundedTower => PrimaryProfile::tower(m),
        }
    }

    fn normalized(mut self) -> Self {
        if self.tower == Some(Multiplicity::Omega) {
            self.cyclic.clear();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.cyclic.is_empty() && self.prufer.is_none() && self.tower.is_none()
    }

    /// Explicit cyclic summands `exponent -> multiplicity` (tower excluded).
    pub fn cyclic_summands(&self) -> &BTreeMap<u32, Multiplicity> {
        &self.cyclic
    }

    pub fn prufer_multiplicity(&self) -> Option<Multiplicity> {
        self.prufer
    }

    pub fn tower_multiplicity(&self) -> Option<Multiplicity> {
        self.tower
    }

    /// Number of `Z(p^n)` summands, counting the tower's contribution.
    pub fn cyclic_multiplicity(&self, exponent: u32) -> Option<Multiplicity> {
        add_opt(self.cyclic.get(&exponent).copied(), self.tower)
    }

    /// `p^k` annihilates the profile for some `k`.
    pub fn is_bounded(&self) -> bool {
        self.tower.is_none() && self.prufer.is_none()
    }

    /// The reduced part is bounded: Prüfer summands are ignored.
    pub fn reduced_is_bounded(&self) -> bool {
        self.tower.is_none()
    }

    pub fn is_semisimple(&self) -> bool {
        self.is_bounded() && self.cyclic.keys().all(|&e| e == 1)
    }

    pub fn divisible(&self) -> PrimaryProfile {
        PrimaryProfile {
            prufer: self.prufer,
            ..Default::default()
        }
    }

    pub fn reduced(&self) -> PrimaryProfile {
        PrimaryProfile {
            prufer: None,
            ..self.clone()
        }
    }

    pub fn without_cyclic_exponent(&self, exponent: u32) -> PrimaryProfile {
        let mut out = self.clone();
        out.cyclic.remove(&exponent);
        out
    }
}

impl Add for &PrimaryProfile {
    type Output = PrimaryProfile;

    fn add(self, rhs: &PrimaryProfile) -> PrimaryProfile {
        let mut cyclic = self.cyclic.clone();
        for (&e, &m) in &rhs.cyclic {
            cyclic
                .entry(e)
                .and_modify(|old| *old = *old + m)
                .or_insert(m);
        }
        PrimaryProfile {
            cyclic,
            prufer: add_opt(self.prufer, rhs.prufer),
            tower: add_opt(self.tower, rhs.tower),
        }
        .normalized()
    }
}

/// The flags reported by [`CanonicalGroup::structural_predicates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructuralPredicates {
    pub is_torsion: bool,
    pub is_torsion_free: bool,
    pub is_divisible: bool,
    pub is_reduced: bool,
    pub is_semisimple: bool,
}

/// A representable abelian group in canonical form.
///
/// Equality of canonical forms is isomorphism.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CanonicalGroup {
    /// Rank-1 torsion-free summands keyed by type representative.
    rational: BTreeMap<Characteristic, Multiplicity>,
    /// p-local part at every prime without an override.
    generic: PrimaryProfile,
    /// Primes whose p-local part differs from `generic`.
    overrides: BTreeMap<u64, PrimaryProfile>,
}

/// Merges `GroupDescriptor` terms into canonical form.
pub fn canonicalize(descriptor: &GroupDescriptor) -> Result<CanonicalGroup, GroupError> {
    let mut rational: BTreeMap<Characteristic, Multiplicity> = BTreeMap::new();
    let mut explicit: BTreeMap<u64, PrimaryProfile> = BTreeMap::new();
    let mut families: Vec<(PrimaryProfile, &BTreeSet<u64>)> = Vec::new();

    for term in &descriptor.terms {
        let m = term.multiplicity;
        let local = match &term.summand {
            Summand::Zero => continue,
            Summand::Atom(atom) => {
                atom.validate()?;
                match atom {
                    UniformAtom::Cyclic { p, n } => (*p, PrimaryProfile::cyclic(*n, m)),
                    UniformAtom::Prufer { p } => (*p, PrimaryProfile::prufer(m)),
                    UniformAtom::Rational(chi) => {
                        rational
                            .entry(chi.type_representative())
                            .and_modify(|old| *old = *old + m)
                            .or_insert(m);
                        continue;
                    }
                }
            }
            Summand::Tower(p) => {
                check_prime(*p)?;
                (*p, PrimaryProfile::tower(m))
            }
            Summand::Family { template, excluded } => {
                if let FamilyTemplate::FixedExponent(0) = template {
                    return Err(GroupError::ZeroExponent);
                }
                for &p in excluded {
                    check_prime(p)?;
                }
                families.push((PrimaryProfile::from_template(*template, m), excluded));
                continue;
            }
        };
        let (p, prof) = local;
        let slot = explicit.entry(p).or_default();
        *slot = &*slot + &prof;
    }

    let generic = families
        .iter()
        .fold(PrimaryProfile::default(), |acc, (prof, _)| &acc + prof);
    let candidates: BTreeSet<u64> = families
        .iter()
        .flat_map(|(_, ex)| ex.iter().copied())
        .chain(explicit.keys().copied())
        .collect();

    let mut overrides = BTreeMap::new();
    for p in candidates {
        let mut local = explicit.remove(&p).unwrap_or_default();
        for (prof, excluded) in &families {
            if !excluded.contains(&p) {
                local = &local + prof;
            }
        }
        if local != generic {
            overrides.insert(p, local);
        }
    }

    Ok(CanonicalGroup {
        rational,
        generic,
        overrides,
    })
}

impl CanonicalGroup {
    pub fn zero() -> Self {
        CanonicalGroup::default()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_empty() && self.generic.is_zero() && self.overrides.is_empty()
    }

    /// Rank-1 summands by type representative.
    pub fn rational_atoms(&self) -> impl Iterator<Item = (&Characteristic, Multiplicity)> {
        self.rational.iter().map(|(chi, &m)| (chi, m))
    }

    /// The profile shared by all primes outside [`Self::override_primes`].
    pub fn generic_profile(&self) -> &PrimaryProfile {
        &self.generic
    }

    pub fn overrides(&self) -> &BTreeMap<u64, PrimaryProfile> {
        &self.overrides
    }

    pub fn override_primes(&self) -> BTreeSet<u64> {
        self.overrides.keys().copied().collect()
    }

    /// True when some prime family contributes at cofinitely many primes.
    pub fn has_families(&self) -> bool {
        !self.generic.is_zero()
    }

    /// The smallest prime governed by the generic profile.
    pub fn generic_representative_prime(&self) -> u64 {
        first_prime_not_in(&self.override_primes())
    }

    /// The p-local part of the group at `p`.
    pub fn local(&self, p: u64) -> &PrimaryProfile {
        self.overrides.get(&p).unwrap_or(&self.generic)
    }

    /// Prime families, each excluding every overridden prime.
    pub fn families(&self) -> Vec<PrimeFamily> {
        let excluded = self.override_primes();
        let family = |template, multiplicity| PrimeFamily {
            template,
            multiplicity,
            excluded: excluded.clone(),
        };
        let mut out: Vec<PrimeFamily> = self
            .generic
            .cyclic
            .iter()
            .map(|(&e, &m)| family(FamilyTemplate::FixedExponent(e), m))
            .collect();
        out.extend(self.generic.prufer.map(|m| family(FamilyTemplate::PruferAll, m)));
        out.extend(
            self.generic
                .tower
                .map(|m| family(FamilyTemplate::UnboundedTower, m)),
        );
        out
    }

    /// Uniform atoms outside the families: rank-1 summands, and the cyclic
    /// and Prüfer summands at overridden primes. Towers are listed by
    /// [`Self::towers`].
    pub fn atoms(&self) -> Vec<(UniformAtom, Multiplicity)> {
        let mut out: Vec<(UniformAtom, Multiplicity)> = Vec::new();
        for (&p, prof) in &self.overrides {
            for (&n, &m) in &prof.cyclic {
                out.push((UniformAtom::Cyclic { p, n }, m));
            }
            if let Some(m) = prof.prufer {
                out.push((UniformAtom::Prufer { p }, m));
            }
        }
        for (chi, &m) in &self.rational {
            out.push((UniformAtom::Rational(chi.clone()), m));
        }
        out
    }

    /// Single-prime towers at overridden primes.
    pub fn towers(&self) -> Vec<(u64, Multiplicity)> {
        self.overrides
            .iter()
            .filter_map(|(&p, prof)| prof.tower.map(|m| (p, m)))
            .collect()
    }

    /// Rebuilds the torsion part by applying `f` to every p-local part.
    fn map_local(&self, f: impl Fn(&PrimaryProfile) -> PrimaryProfile) -> (PrimaryProfile, BTreeMap<u64, PrimaryProfile>) {
        let generic = f(&self.generic);
        let overrides = self
            .overrides
            .iter()
            .map(|(&p, prof)| (p, f(prof)))
            .filter(|(_, prof)| *prof != generic)
            .collect();
        (generic, overrides)
    }

    pub fn torsion_part(&self) -> CanonicalGroup {
        CanonicalGroup {
            rational: BTreeMap::new(),
            ..self.clone()
        }
    }

    /// The rank-1 summands only.
    pub fn torsion_free_summand(&self) -> CanonicalGroup {
        CanonicalGroup {
            rational: self.rational.clone(),
            ..Default::default()
        }
    }

    pub fn p_primary(&self, p: u64) -> CanonicalGroup {
        let local = self.local(p);
        let mut overrides = BTreeMap::new();
        if !local.is_zero() {
            overrides.insert(p, local.clone());
        }
        CanonicalGroup {
            rational: BTreeMap::new(),
            generic: PrimaryProfile::default(),
            overrides,
        }
    }

    pub fn divisible_part(&self) -> CanonicalGroup {
        let (generic, overrides) = self.map_local(PrimaryProfile::divisible);
        CanonicalGroup {
            rational: self
                .rational
                .iter()
                .filter(|(chi, _)| chi.is_divisible())
                .map(|(chi, &m)| (chi.clone(), m))
                .collect(),
            generic,
            overrides,
        }
    }

    pub fn reduced_part(&self) -> CanonicalGroup {
        let (generic, overrides) = self.map_local(PrimaryProfile::reduced);
        CanonicalGroup {
            rational: self
                .rational
                .iter()
                .filter(|(chi, _)| !chi.is_divisible())
                .map(|(chi, &m)| (chi.clone(), m))
                .collect(),
            generic,
            overrides,
        }
    }

    /// Removes every explicit `Z(p^exponent)` summand, at every prime.
    /// Tower contributions are left alone.
    pub fn without_cyclic_layer(&self, exponent: u32) -> CanonicalGroup {
        let (generic, overrides) = self.map_local(|prof| prof.without_cyclic_exponent(exponent));
        CanonicalGroup {
            rational: self.rational.clone(),
            generic,
            overrides,
        }
    }

    /// `n G = 0` for some `n > 0`. Non-torsion groups are never bounded.
    pub fn is_bounded(&self) -> bool {
        self.is_torsion()
            && self.generic.is_zero()
            && self.overrides.values().all(PrimaryProfile::is_bounded)
    }

    pub fn torsion_free_rank(&self) -> Rank {
        self.rational
            .values()
            .fold(Rank::Finite(0), |acc, &m| acc + Rank::from(m))
    }

    pub fn is_torsion(&self) -> bool {
        self.rational.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.generic.is_zero() && self.overrides.values().all(PrimaryProfile::is_zero)
    }

    pub fn structural_predicates(&self) -> StructuralPredicates {
        StructuralPredicates {
            is_torsion: self.is_torsion(),
            is_torsion_free: self.is_torsion_free(),
            is_divisible: self.reduced_part().is_zero(),
            is_reduced: self.divisible_part().is_zero(),
            is_semisimple: self.is_torsion()
                && self.generic.is_semisimple()
                && self.overrides.values().all(PrimaryProfile::is_semisimple),
        }
    }

    pub fn direct_sum(&self, other: &CanonicalGroup) -> CanonicalGroup {
        let mut rational = self.rational.clone();
        for (chi, &m) in &other.rational {
            rational
                .entry(chi.clone())
                .and_modify(|old| *old = *old + m)
                .or_insert(m);
        }
        let generic = &self.generic + &other.generic;
        let primes: BTreeSet<u64> = self
            .overrides
            .keys()
            .chain(other.overrides.keys())
            .copied()
            .collect();
        let overrides = primes
            .into_iter()
            .map(|p| (p, self.local(p) + other.local(p)))
            .filter(|(_, prof)| *prof != generic)
            .collect();
        CanonicalGroup {
            rational,
            generic,
            overrides,
        }
    }

    pub fn is_isomorphic(&self, other: &CanonicalGroup) -> bool {
        self == other
    }
}

impl fmt::Display for CanonicalGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::render(self))
    }
}

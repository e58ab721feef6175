//! Heights, characteristics and types of rank-1 torsion-free groups.
//!
//! A characteristic assigns a height in `{0, 1, 2, ..., inf}` to every prime.
//! Only eventually-constant characteristics are representable: a default
//! height (`0` or `inf`) plus a finite table of exceptions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::group::CanonicalGroup;
use crate::primes::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacteristicError {
    #[error("default height must be 0 or inf, got {0}")]
    InvalidDefault(Height),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("homogeneity is only defined for torsion-free groups")]
    NonTorsionFreeInput,
}

/// The `p`-height of an element. `Infinite` is the maximum of the order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Height {
    Finite(u32),
    Infinite,
}

impl Height {
    pub const ZERO: Height = Height::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Height::Finite(_))
    }

    /// Height addition with `inf` absorbing.
    pub fn saturating_add(self, other: Height) -> Height {
        match (self, other) {
            (Height::Finite(a), Height::Finite(b)) => a
                .checked_add(b)
                .map_or(Height::Infinite, Height::Finite),
            _ => Height::Infinite,
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(k) => write!(f, "{k}"),
            Height::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Height {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An eventually-constant height sequence indexed by the primes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Characteristic {
    default: Height,
    exceptions: BTreeMap<u64, Height>,
}

impl Characteristic {
    /// Builds a characteristic, dropping exceptions that repeat the default.
    pub fn new(
        default: Height,
        exceptions: impl IntoIterator<Item = (u64, Height)>,
    ) -> Result<Self, CharacteristicError> {
        if default != Height::ZERO && default != Height::Infinite {
            return Err(CharacteristicError::InvalidDefault(default));
        }
        let mut table = BTreeMap::new();
        for (p, h) in exceptions {
            if !is_prime(p) {
                return Err(CharacteristicError::NotPrime(p));
            }
            if h != default {
                table.insert(p, h);
            } else {
                table.remove(&p);
            }
        }
        Ok(Characteristic {
            default,
            exceptions: table,
        })
    }

    /// Characteristic of `1` in the integers: height 0 everywhere.
    pub fn integers() -> Self {
        Characteristic {
            default: Height::ZERO,
            exceptions: BTreeMap::new(),
        }
    }

    /// Characteristic of `1` in the rationals: height `inf` everywhere.
    pub fn rationals() -> Self {
        Characteristic {
            default: Height::Infinite,
            exceptions: BTreeMap::new(),
        }
    }

    /// Characteristic of `1` in the localization of the integers at `p`:
    /// fractions whose denominator is prime to `p`.
    pub fn localization(p: u64) -> Result<Self, CharacteristicError> {
        Characteristic::new(Height::Infinite, [(p, Height::ZERO)])
    }

    pub fn default_height(&self) -> Height {
        self.default
    }

    pub fn exceptions(&self) -> &BTreeMap<u64, Height> {
        &self.exceptions
    }

    pub fn height_at(&self, p: u64) -> Height {
        self.exceptions.get(&p).copied().unwrap_or(self.default)
    }

    /// Canonical member of the type of `self`.
    ///
    /// Finite heights are interchangeable within a type, so only the primes
    /// whose height is on the other side of finite/infinite from the default
    /// survive, with height `inf` (default 0) or `0` (default `inf`).
    pub fn type_representative(&self) -> Characteristic {
        let exceptions = match self.default {
            Height::Infinite => self
                .exceptions
                .iter()
                .filter(|(_, h)| h.is_finite())
                .map(|(&p, _)| (p, Height::ZERO))
                .collect(),
            Height::Finite(_) => self
                .exceptions
                .iter()
                .filter(|(_, h)| !h.is_finite())
                .map(|(&p, _)| (p, Height::Infinite))
                .collect(),
        };
        Characteristic {
            default: self.default,
            exceptions,
        }
    }

    /// True when every height is `inf`, i.e. the group is divisible.
    pub fn is_divisible(&self) -> bool {
        self.default == Height::Infinite && self.exceptions.is_empty()
    }
}

/// Two characteristics are equivalent when they differ at only finitely
/// many primes and both heights are finite wherever they differ.
pub fn equivalent(a: &Characteristic, b: &Characteristic) -> bool {
    if a.default != b.default {
        return false;
    }
    a.exceptions
        .keys()
        .chain(b.exceptions.keys())
        .all(|&p| {
            let (ha, hb) = (a.height_at(p), b.height_at(p));
            ha == hb || (ha.is_finite() && hb.is_finite())
        })
}

impl fmt::Display for Characteristic {
    /// Renders as `default:0; 2:3, 5:inf`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "default:{}", self.default)?;
        for (i, (p, h)) in self.exceptions.iter().enumerate() {
            let sep = if i == 0 { "; " } else { ", " };
            write!(f, "{sep}{p}:{h}")?;
        }
        Ok(())
    }
}

impl Serialize for Characteristic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An equivalence class of characteristics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupType(Characteristic);

impl GroupType {
    pub fn of(chi: &Characteristic) -> Self {
        GroupType(chi.type_representative())
    }

    pub fn representative(&self) -> &Characteristic {
        &self.0
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

/// Whether all rank-1 summands of a torsion-free group share one type.
///
/// Every representable torsion-free group is completely decomposable, so
/// this is decided on the rank-1 summands.
pub fn is_homogeneous(group: &CanonicalGroup) -> Result<bool, CharacteristicError> {
    if !group.is_torsion_free() {
        return Err(CharacteristicError::NonTorsionFreeInput);
    }
    let mut types = group.rational_atoms().map(|(chi, _)| chi);
    let Some(first) = types.next() else {
        return Ok(true);
    };
    Ok(types.all(|chi| equivalent(first, chi)))
}

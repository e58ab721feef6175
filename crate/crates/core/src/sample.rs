//! Random instance generators for property suites and the crosscheck driver.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, RngExt};

use crate::characteristic::{Characteristic, Height};
use crate::finite::FiniteAbelianGroup;
use crate::group::{FamilyTemplate, Multiplicity, UniformAtom};
use crate::parse::{GroupDescriptor, Summand};
use crate::primes::factorize;

/// Shape of randomly generated descriptors.
#[derive(Debug, Clone)]
pub struct DescriptorShape {
    /// Primes that atoms, towers and exclusions are drawn from.
    pub primes: Vec<u64>,
    pub max_terms: usize,
    pub max_exponent: u32,
}

impl Default for DescriptorShape {
    fn default() -> Self {
        DescriptorShape {
            primes: vec![2, 3, 5, 7],
            max_terms: 6,
            max_exponent: 3,
        }
    }
}

fn multiplicity<R: Rng + ?Sized>(rng: &mut R) -> Multiplicity {
    if rng.random_bool(0.2) {
        Multiplicity::Omega
    } else {
        Multiplicity::Finite(rng.random_range(1..=3))
    }
}

pub fn random_characteristic<R: Rng + ?Sized>(rng: &mut R, primes: &[u64]) -> Characteristic {
    let default = if rng.random_bool(0.5) {
        Height::ZERO
    } else {
        Height::Infinite
    };
    let count = rng.random_range(0..=2);
    let exceptions: Vec<(u64, Height)> = (0..count)
        .map(|_| {
            let p = *primes.choose(rng).expect("nonempty prime pool");
            let h = if rng.random_bool(0.3) {
                Height::Infinite
            } else {
                Height::Finite(rng.random_range(0..4))
            };
            (p, h)
        })
        .collect();
    Characteristic::new(default, exceptions).expect("pool holds primes")
}

pub fn random_descriptor<R: Rng + ?Sized>(rng: &mut R, shape: &DescriptorShape) -> GroupDescriptor {
    let mut out = GroupDescriptor::default();
    let terms = rng.random_range(1..=shape.max_terms);
    for _ in 0..terms {
        let p = *shape.primes.choose(rng).expect("nonempty prime pool");
        let summand = match rng.random_range(0..10) {
            0 => Summand::Zero,
            1 | 2 => Summand::Atom(UniformAtom::Cyclic {
                p,
                n: rng.random_range(1..=shape.max_exponent),
            }),
            3 => Summand::Atom(UniformAtom::Prufer { p }),
            4 => Summand::Tower(p),
            5 | 6 => Summand::Atom(UniformAtom::Rational(random_characteristic(rng, &shape.primes))),
            _ => {
                let template = match rng.random_range(0..4) {
                    0 | 1 => FamilyTemplate::FixedExponent(rng.random_range(1..=shape.max_exponent)),
                    2 => FamilyTemplate::PruferAll,
                    _ => FamilyTemplate::UnboundedTower,
                };
                let excluded: BTreeSet<u64> = (0..rng.random_range(0..=2))
                    .map(|_| *shape.primes.choose(rng).expect("nonempty prime pool"))
                    .collect();
                Summand::Family { template, excluded }
            }
        };
        out.push(summand, multiplicity(rng));
    }
    out
}

/// A finite abelian group of order at most `max_order` (at least 2 when
/// `max_order >= 2`), built from random prime-power factors.
pub fn random_finite_group<R: Rng + ?Sized>(rng: &mut R, max_order: u64) -> FiniteAbelianGroup {
    const POOL: [u64; 4] = [2, 3, 5, 7];
    let mut factors = Vec::new();
    let mut order = 1u64;
    let target = rng.random_range(1..=4);
    for _ in 0..target {
        let p = *POOL.choose(rng).expect("nonempty");
        let e = rng.random_range(1..=3u32);
        let q = p.pow(e);
        if order * q <= max_order {
            order *= q;
            factors.push(q);
        }
    }
    if factors.is_empty() && max_order >= 2 {
        factors.push(factorize(max_order)[0].0);
    }
    FiniteAbelianGroup::new(factors).expect("prime-power factors")
}

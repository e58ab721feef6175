#![allow(dead_code)]

use pipoor_core::sample::{random_descriptor, DescriptorShape};
use pipoor_core::{canonicalize, parse, CanonicalGroup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn group(text: &str) -> CanonicalGroup {
    canonicalize(&parse(text).unwrap()).unwrap()
}

pub fn random_group(seed: u64) -> CanonicalGroup {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    canonicalize(&random_descriptor(&mut rng, &DescriptorShape::default())).unwrap()
}

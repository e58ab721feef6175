use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use super::group::{Element, FiniteAbelianGroup};
use super::hom::hom_extends_snf;
use super::snf::{smith_normal_form, IntMatrix};
use super::OracleError;
use crate::primes::factorize;

/// A subgroup of a finite group, stored as a membership set plus the
/// generators it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    members: FixedBitSet,
    generators: Vec<Element>,
}

/// Index-level arithmetic for a group small enough to enumerate.
pub(crate) struct IndexArith {
    factors: Vec<u64>,
    strides: Vec<usize>,
    coords: Vec<u64>,
    order: usize,
}

impl IndexArith {
    pub(crate) fn new(g: &FiniteAbelianGroup) -> Self {
        let order = g.order() as usize;
        let arity = g.arity();
        let mut coords = Vec::with_capacity(order * arity);
        for x in g.elements() {
            coords.extend(x.coords);
        }
        let strides = (0..arity).map(|i| {
            g.factors()[i + 1..].iter().product::<u64>() as usize
        });
        IndexArith {
            factors: g.factors().to_vec(),
            strides: strides.collect(),
            coords,
            order,
        }
    }

    fn coords(&self, a: usize) -> &[u64] {
        let k = self.factors.len();
        &self.coords[a * k..(a + 1) * k]
    }

    pub(crate) fn add(&self, a: usize, b: usize) -> usize {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let mut idx = 0;
        for (((&x, &y), &m), &stride) in ca.iter().zip(cb).zip(&self.factors).zip(&self.strides) {
            idx += ((x + y) % m) as usize * stride;
        }
        idx
    }

    pub(crate) fn scale(&self, n: u64, a: usize) -> usize {
        let ca = self.coords(a);
        let mut idx = 0;
        for ((&x, &m), &stride) in ca.iter().zip(&self.factors).zip(&self.strides) {
            idx += ((n % m) * x % m) as usize * stride;
        }
        idx
    }

    /// `{n x : x in set}`.
    pub(crate) fn multiples(&self, n: u64, set: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.order);
        for x in set.ones() {
            out.insert(self.scale(n, x));
        }
        out
    }

    fn trivial(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.order);
        s.insert(0);
        s
    }

    /// `S + <g>` for a subgroup `S`.
    fn join_cyclic(&self, s: &FixedBitSet, g: usize) -> FixedBitSet {
        let mut out = s.clone();
        let mut h = g;
        while !s.contains(h) {
            for x in s.ones() {
                out.insert(self.add(x, h));
            }
            h = self.add(h, g);
        }
        out
    }
}

impl Subgroup {
    pub fn trivial(parent: &FiniteAbelianGroup) -> Self {
        let mut members = FixedBitSet::with_capacity(parent.order() as usize);
        members.insert(0);
        Subgroup {
            parent: parent.clone(),
            members,
            generators: Vec::new(),
        }
    }

    pub fn whole(parent: &FiniteAbelianGroup) -> Self {
        let mut members = FixedBitSet::with_capacity(parent.order() as usize);
        members.insert_range(..);
        Subgroup {
            parent: parent.clone(),
            members,
            generators: (0..parent.arity()).map(|i| parent.generator(i)).collect(),
        }
    }

    /// The subgroup generated by `generators`.
    pub fn generated(parent: &FiniteAbelianGroup, generators: &[Element]) -> Result<Self, OracleError> {
        for g in generators {
            parent.check(g)?;
        }
        let arith = IndexArith::new(parent);
        let mut members = arith.trivial();
        for g in generators {
            members = arith.join_cyclic(&members, parent.index_of(g));
        }
        Ok(Subgroup {
            parent: parent.clone(),
            members,
            generators: generators.to_vec(),
        })
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        self.members.count_ones(..) as u64
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn contains(&self, a: &Element) -> bool {
        self.parent.contains(a) && self.members.contains(self.parent.index_of(a))
    }

    pub fn elements(&self) -> Vec<Element> {
        self.members.ones().map(|i| self.parent.element(i)).collect()
    }

    pub(crate) fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub(crate) fn ensure_in(&self, g: &FiniteAbelianGroup) -> Result<(), OracleError> {
        if &self.parent == g {
            Ok(())
        } else {
            Err(OracleError::NotASubgroup {
                group: g.to_string(),
            })
        }
    }

    /// A basis of the subgroup: elements of prime-power order whose cyclic
    /// subgroups form a direct decomposition, ordered like
    /// [`FiniteAbelianGroup`] factors.
    pub fn basis(&self) -> Result<SubgroupBasis, OracleError> {
        let g = &self.parent;
        let gens: Vec<&Element> = self.generators.iter().filter(|x| **x != g.zero()).collect();
        if gens.is_empty() {
            return Ok(SubgroupBasis {
                group: FiniteAbelianGroup::trivial(),
                basis: Vec::new(),
            });
        }
        let r = gens.len();
        let lattice = relation_lattice(g, &gens)?;
        let smith = smith_normal_form(&lattice)?;
        let diag = smith.s.diagonal();
        let mut pieces: Vec<(Element, u64)> = Vec::new();
        for i in 0..r {
            let d = diag.get(i).copied().unwrap_or(0);
            if d == 0 {
                return Err(OracleError::Internal("subgroup of a finite group has infinite rank".into()));
            }
            if d == 1 {
                continue;
            }
            let mut b = g.zero();
            for (j, gen) in gens.iter().enumerate() {
                b = g.add(&b, &g.scale(smith.u_inv[(j, i)], gen));
            }
            for (p, e) in factorize(d as u64) {
                let q = p.pow(e);
                pieces.push((g.scale(d / q as i64, &b), q));
            }
        }
        pieces.sort_by_key(|(_, q)| crate::primes::as_prime_power(*q));
        let group = FiniteAbelianGroup::new(pieces.iter().map(|(_, q)| *q).collect())?;
        Ok(SubgroupBasis {
            group,
            basis: pieces.into_iter().map(|(x, _)| x).collect(),
        })
    }
}

/// Generators of the relations among `gens`: the kernel of `Z^r -> G`,
/// as the columns of an `r x s` matrix.
pub(crate) fn relation_lattice(g: &FiniteAbelianGroup, gens: &[&Element]) -> Result<IntMatrix, OracleError> {
    let k = g.arity();
    let r = gens.len();
    let mut a = IntMatrix::zeros(k, r + k);
    for (j, x) in gens.iter().enumerate() {
        for i in 0..k {
            a[(i, j)] = x.coords[i] as i64;
        }
    }
    for (i, &m) in g.factors().iter().enumerate() {
        a[(i, r + i)] = m as i64;
    }
    let smith = smith_normal_form(&a)?;
    let rank = smith.rank();
    let mut lattice = IntMatrix::zeros(r, r + k - rank);
    for (col, j) in (rank..r + k).enumerate() {
        for i in 0..r {
            lattice[(i, col)] = smith.v[(i, j)];
        }
    }
    Ok(lattice)
}

/// An explicit isomorphism between an abstract finite group and a subgroup.
#[derive(Debug, Clone)]
pub struct SubgroupBasis {
    /// Abstract structure; `group.factors()[i]` is the order of `basis[i]`.
    pub group: FiniteAbelianGroup,
    /// Basis elements in the parent's coordinates.
    pub basis: Vec<Element>,
}

impl SubgroupBasis {
    /// Image of an abstract element in the parent.
    pub fn embed(&self, parent: &FiniteAbelianGroup, a: &Element) -> Element {
        a.coords
            .iter()
            .zip(&self.basis)
            .fold(parent.zero(), |acc, (&c, b)| parent.add(&acc, &parent.scale(c as i64, b)))
    }

    /// Parent element -> abstract coordinates.
    pub fn coordinate_table(&self, parent: &FiniteAbelianGroup) -> HashMap<Element, Element> {
        self.group
            .elements()
            .map(|a| (self.embed(parent, &a), a))
            .collect()
    }
}

/// Every subgroup of `g`, each once, ordered by size and then by members.
pub fn enumerate_subgroups(g: &FiniteAbelianGroup, bound: u64) -> Result<Vec<Subgroup>, OracleError> {
    let n = g.ensure_within(bound)?;
    let arith = IndexArith::new(g);
    let trivial = arith.trivial();

    let mut cyclic_reps = Vec::new();
    let mut seen_cyclic = std::collections::HashSet::new();
    for x in 0..n {
        if seen_cyclic.insert(arith.join_cyclic(&trivial, x)) {
            cyclic_reps.push(x);
        }
    }

    let mut found: HashMap<FixedBitSet, Vec<usize>> = HashMap::new();
    found.insert(trivial.clone(), Vec::new());
    let mut queue = VecDeque::from([trivial]);
    while let Some(s) = queue.pop_front() {
        for &x in &cyclic_reps {
            if s.contains(x) {
                continue;
            }
            let t = arith.join_cyclic(&s, x);
            if !found.contains_key(&t) {
                let mut gens = found[&s].clone();
                gens.push(x);
                found.insert(t.clone(), gens);
                queue.push_back(t);
            }
        }
    }

    let mut out: Vec<(Vec<usize>, Subgroup)> = found
        .into_iter()
        .map(|(members, gens)| {
            let key: Vec<usize> = members.ones().collect();
            let sub = Subgroup {
                parent: g.clone(),
                members,
                generators: gens.into_iter().map(|i| g.element(i)).collect(),
            };
            (key, sub)
        })
        .collect();
    out.sort_by(|(ka, _), (kb, _)| ka.len().cmp(&kb.len()).then_with(|| ka.cmp(kb)));
    Ok(out.into_iter().map(|(_, s)| s).collect())
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Caches `nG` for every divisor `n` of the exponent.
pub(crate) struct PurityTest {
    arith: IndexArith,
    multiples: Vec<(u64, FixedBitSet)>,
}

impl PurityTest {
    pub(crate) fn new(g: &FiniteAbelianGroup) -> Self {
        let arith = IndexArith::new(g);
        let mut all = FixedBitSet::with_capacity(arith.order);
        all.insert_range(..);
        let multiples = divisors(g.exponent())
            .into_iter()
            .filter(|&d| d > 1)
            .map(|d| (d, arith.multiples(d, &all)))
            .collect();
        PurityTest { arith, multiples }
    }

    /// `nH = H ∩ nG` for every `n`; divisors of the exponent suffice since
    /// `nG = gcd(n, exp G) G`.
    pub(crate) fn is_pure(&self, h: &FixedBitSet) -> bool {
        self.multiples.iter().all(|(d, dg)| {
            let dh = self.arith.multiples(*d, h);
            let mut meet = h.clone();
            meet.intersect_with(dg);
            dh == meet
        })
    }
}

pub fn is_pure_subgroup(h: &Subgroup, g: &FiniteAbelianGroup) -> Result<bool, OracleError> {
    h.ensure_in(g)?;
    Ok(PurityTest::new(g).is_pure(&h.members))
}

/// Decided by searching for a retraction `G -> H` that fixes `H`.
pub fn is_direct_summand(h: &Subgroup, g: &FiniteAbelianGroup) -> Result<bool, OracleError> {
    h.ensure_in(g)?;
    let basis = h.basis()?;
    let targets: Vec<Element> = (0..basis.group.arity()).map(|i| basis.group.generator(i)).collect();
    hom_extends_snf(g, &basis.group, &basis.basis, &targets)
}

/// `G / H` in primary decomposition.
pub fn quotient(g: &FiniteAbelianGroup, h: &Subgroup) -> Result<FiniteAbelianGroup, OracleError> {
    h.ensure_in(g)?;
    let k = g.arity();
    let gens = h.generators();
    let mut rel = IntMatrix::zeros(k, k + gens.len());
    for (i, &m) in g.factors().iter().enumerate() {
        rel[(i, i)] = m as i64;
    }
    for (j, x) in gens.iter().enumerate() {
        for i in 0..k {
            rel[(i, k + j)] = x.coords[i] as i64;
        }
    }
    let smith = smith_normal_form(&rel)?;
    let invariants: Vec<u64> = smith.invariant_factors().into_iter().map(|d| d as u64).collect();
    FiniteAbelianGroup::from_invariants(&invariants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::parse_finite_group;

    fn group(s: &str) -> FiniteAbelianGroup {
        parse_finite_group(s).unwrap()
    }

    fn sub(g: &FiniteAbelianGroup, gens: &[&[u64]]) -> Subgroup {
        let gens: Vec<Element> = gens.iter().map(|c| Element::new(c.to_vec())).collect();
        Subgroup::generated(g, &gens).unwrap()
    }

    /// Independent summand test: look for a complement among all subgroups.
    fn has_complement(h: &Subgroup, g: &FiniteAbelianGroup) -> bool {
        enumerate_subgroups(g, 512).unwrap().iter().any(|k| {
            let mut meet = k.members().clone();
            meet.intersect_with(h.members());
            meet.count_ones(..) == 1 && k.order() * h.order() == g.order()
        })
    }

    /// Brute-force subgroup count: closures of all subsets of elements are
    /// too many, so close all pairs of elements (every subgroup of these
    /// small groups is 2-generated).
    fn brute_force_subgroup_count(g: &FiniteAbelianGroup) -> usize {
        let elems: Vec<Element> = g.elements().collect();
        let mut seen = std::collections::HashSet::new();
        for a in &elems {
            for b in &elems {
                seen.insert(sub(g, &[&a.coords, &b.coords]).members().clone());
            }
        }
        seen.len()
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(enumerate_subgroups(&group("Z4"), 512).unwrap().len(), 3);
        assert_eq!(enumerate_subgroups(&group("Z2 x Z2"), 512).unwrap().len(), 5);
        assert_eq!(enumerate_subgroups(&group("Z6"), 512).unwrap().len(), 4);
        for s in ["Z2 x Z2", "Z2 x Z4", "Z4 x Z4", "Z3 x Z9", "Z2 x Z6"] {
            let g = group(s);
            assert_eq!(
                enumerate_subgroups(&g, 512).unwrap().len(),
                brute_force_subgroup_count(&g),
                "{s}"
            );
        }
        // Gaussian binomial sum for (Z2)^4: 1 + 15 + 35 + 15 + 1
        assert_eq!(enumerate_subgroups(&group("Z2 x Z2 x Z2 x Z2"), 512).unwrap().len(), 67);
    }

    #[test]
    fn enumeration_is_ordered_and_complete() {
        let g = group("Z2 x Z4");
        let subs = enumerate_subgroups(&g, 512).unwrap();
        assert!(subs.first().unwrap().is_trivial());
        assert_eq!(subs.last().unwrap().order(), 8);
        assert!(subs.windows(2).all(|w| w[0].order() <= w[1].order()));
        for s in &subs {
            assert_eq!(&Subgroup::generated(&g, s.generators()).unwrap(), s);
        }
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(
            enumerate_subgroups(&group("Z2 x Z4"), 4),
            Err(OracleError::BoundExceeded { .. })
        ));
    }

    #[test]
    fn purity_examples() {
        let g = group("Z2 x Z4");
        assert!(is_pure_subgroup(&sub(&g, &[&[1, 1]]), &g).unwrap());
        // 2H = 0 but H ∩ 2G = H
        assert!(!is_pure_subgroup(&sub(&g, &[&[0, 2]]), &g).unwrap());
        assert!(is_pure_subgroup(&Subgroup::trivial(&g), &g).unwrap());
        assert!(is_pure_subgroup(&Subgroup::whole(&g), &g).unwrap());
        let other = group("Z8");
        assert!(matches!(
            is_pure_subgroup(&sub(&g, &[&[1, 1]]), &other),
            Err(OracleError::NotASubgroup { .. })
        ));
    }

    #[test]
    fn summand_examples() {
        let g = group("Z2 x Z4");
        let h = sub(&g, &[&[1, 1]]);
        assert!(is_direct_summand(&h, &g).unwrap());
        assert!(has_complement(&h, &g));
        let z4 = group("Z4");
        assert!(!is_direct_summand(&sub(&z4, &[&[2]]), &z4).unwrap());
        assert!(is_direct_summand(&Subgroup::trivial(&g), &g).unwrap());
        assert!(is_direct_summand(&Subgroup::whole(&g), &g).unwrap());
    }

    #[test]
    fn summand_matches_complement_search() {
        for s in ["Z2 x Z4", "Z4 x Z4", "Z2 x Z8", "Z2 x Z2 x Z4", "Z3 x Z9", "Z4 x Z3"] {
            let g = group(s);
            for h in enumerate_subgroups(&g, 512).unwrap() {
                assert_eq!(
                    is_direct_summand(&h, &g).unwrap(),
                    has_complement(&h, &g),
                    "{s}: {:?}",
                    h.generators()
                );
            }
        }
    }

    #[test]
    fn quotient_examples() {
        let z4 = group("Z4");
        assert_eq!(quotient(&z4, &sub(&z4, &[&[2]])).unwrap(), group("Z2"));
        let g = group("Z2 x Z4");
        let q = quotient(&g, &sub(&g, &[&[1, 1]])).unwrap();
        assert_eq!(q, group("Z2"));
        assert_eq!(quotient(&g, &Subgroup::trivial(&g)).unwrap(), g);
        assert_eq!(quotient(&g, &Subgroup::whole(&g)).unwrap().order(), 1);
    }

    #[test]
    fn quotient_orders_multiply() {
        for s in ["Z2 x Z4", "Z3 x Z9", "Z2 x Z2 x Z3"] {
            let g = group(s);
            for h in enumerate_subgroups(&g, 512).unwrap() {
                assert_eq!(quotient(&g, &h).unwrap().order() * h.order(), g.order());
            }
        }
    }

    #[test]
    fn basis_spans_subgroup() {
        for s in ["Z2 x Z4", "Z4 x Z8", "Z2 x Z3 x Z9", "Z2 x Z2 x Z2"] {
            let g = group(s);
            for h in enumerate_subgroups(&g, 512).unwrap() {
                let b = h.basis().unwrap();
                assert_eq!(b.group.order(), h.order());
                for (x, &q) in b.basis.iter().zip(b.group.factors()) {
                    assert_eq!(g.order_of(x), q);
                }
                let table = b.coordinate_table(&g);
                assert_eq!(table.len() as u64, h.order());
                assert!(table.keys().all(|x| h.contains(x)));
            }
        }
    }
}

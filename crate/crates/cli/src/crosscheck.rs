use pipoor_core::finite::{
    hom_extends_exhaustive, hom_extends_snf, is_pure_split_finite, is_relatively_injective,
    is_relatively_pure_injective, Element, FiniteAbelianGroup, OracleError, Subgroup, CROSSCHECK_LIMIT,
};
use pipoor_core::sample::random_finite_group;
use rand::seq::IndexedRandom;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::{exit, CliError, Outcome, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrosscheckOptions {
    pub seed: u64,
    pub count: usize,
    pub bound: u64,
    /// Negates the SNF extension verdict so that the harness must fail.
    pub corrupt_oracle: bool,
}

const KINDS: [&str; 4] = ["pure-split-finite", "rel-inj-table", "hom-extends", "rel-pure-inj"];

#[derive(Debug, Clone)]
enum Instance {
    PureSplit(FiniteAbelianGroup),
    RelInj { p: u64, m: u32, n: u32 },
    Hom {
        g: FiniteAbelianGroup,
        m: FiniteAbelianGroup,
        sources: Vec<Element>,
        images: Vec<Element>,
    },
    RelPureInj(FiniteAbelianGroup, FiniteAbelianGroup),
}

fn list(xs: &[Element]) -> String {
    let parts: Vec<String> = xs.iter().map(Element::to_string).collect();
    format!("[{}]", parts.join(" "))
}

impl Instance {
    fn kind(&self) -> &'static str {
        match self {
            Instance::PureSplit(_) => KINDS[0],
            Instance::RelInj { .. } => KINDS[1],
            Instance::Hom { .. } => KINDS[2],
            Instance::RelPureInj(..) => KINDS[3],
        }
    }

    fn describe(&self) -> String {
        match self {
            Instance::PureSplit(n) => format!("N = {n}"),
            Instance::RelInj { p, m, n } => format!("M = Z{}, N = Z{}", p.pow(*m), p.pow(*n)),
            Instance::Hom { g, m, sources, images } => {
                format!("G = {g}, M = {m}, sources = {}, images = {}", list(sources), list(images))
            }
            Instance::RelPureInj(m, n) => format!("M = {m}, N = {n}"),
        }
    }

    /// `(expected, observed)`.
    fn evaluate(&self, opts: &CrosscheckOptions) -> Result<(bool, bool), OracleError> {
        match self {
            Instance::PureSplit(n) => Ok((true, is_pure_split_finite(n, opts.bound)?)),
            Instance::RelInj { p, m, n } => {
                let verdict = is_relatively_injective(
                    &FiniteAbelianGroup::cyclic(p.pow(*m))?,
                    &FiniteAbelianGroup::cyclic(p.pow(*n))?,
                    opts.bound,
                )?;
                Ok((m >= n, verdict))
            }
            Instance::Hom { g, m, sources, images } => {
                let brute = hom_extends_exhaustive(g, m, sources, images)?;
                let snf = hom_extends_snf(g, m, sources, images)?;
                Ok((brute, snf != opts.corrupt_oracle))
            }
            Instance::RelPureInj(m, n) => Ok((true, is_relatively_pure_injective(m, n, opts.bound)?)),
        }
    }

    /// Smaller instances of the same kind, for shrinking a counterexample.
    fn shrink(&self) -> Vec<Instance> {
        let drop_factor = |g: &FiniteAbelianGroup| -> Vec<FiniteAbelianGroup> {
            (0..g.arity())
                .map(|i| {
                    let mut f = g.factors().to_vec();
                    f.remove(i);
                    FiniteAbelianGroup::new(f).expect("prime powers")
                })
                .collect()
        };
        match self {
            Instance::PureSplit(n) => drop_factor(n).into_iter().map(Instance::PureSplit).collect(),
            Instance::RelInj { .. } => Vec::new(),
            Instance::Hom { g, m, sources, images } => (0..sources.len())
                .map(|i| {
                    let (mut s, mut t) = (sources.clone(), images.clone());
                    s.remove(i);
                    t.remove(i);
                    Instance::Hom {
                        g: g.clone(),
                        m: m.clone(),
                        sources: s,
                        images: t,
                    }
                })
                .collect(),
            Instance::RelPureInj(m, n) => drop_factor(m)
                .into_iter()
                .map(|m2| Instance::RelPureInj(m2, n.clone()))
                .chain(drop_factor(n).into_iter().map(|n2| Instance::RelPureInj(m.clone(), n2)))
                .collect(),
        }
    }
}

fn random_element<R: Rng + ?Sized>(rng: &mut R, g: &FiniteAbelianGroup) -> Element {
    Element::new(g.factors().iter().map(|&m| rng.random_range(0..m)).collect())
}

/// A well-defined hom from a random subgroup of `G`: images of a basis are
/// drawn from the elements of `M` killed by the basis orders.
fn random_hom<R: Rng + ?Sized>(rng: &mut R) -> Instance {
    let g = random_finite_group(rng, CROSSCHECK_LIMIT);
    let m = random_finite_group(rng, CROSSCHECK_LIMIT);
    let gens: Vec<Element> = (0..rng.random_range(0..=2)).map(|_| random_element(rng, &g)).collect();
    let basis = Subgroup::generated(&g, &gens)
        .and_then(|h| h.basis())
        .expect("subgroup of a small group");
    let images = basis
        .group
        .factors()
        .iter()
        .map(|&d| m.torsion_elements(d).choose(rng).expect("zero is killed").clone())
        .collect();
    Instance::Hom {
        g,
        m,
        sources: basis.basis,
        images,
    }
}

fn generate(rng: &mut ChaCha8Rng, index: usize, bound: u64) -> Instance {
    match index % KINDS.len() {
        0 => Instance::PureSplit(random_finite_group(rng, bound)),
        1 => {
            let p = *[2u64, 3, 5].choose(rng).expect("nonempty");
            let top = (1..=3u32).take_while(|&e| p.pow(e) <= bound).last().unwrap_or(1);
            Instance::RelInj {
                p,
                m: rng.random_range(1..=3),
                n: rng.random_range(1..=top),
            }
        }
        2 => random_hom(rng),
        _ => Instance::RelPureInj(random_finite_group(rng, 32), random_finite_group(rng, bound.min(64))),
    }
}

fn violates(instance: &Instance, opts: &CrosscheckOptions) -> bool {
    matches!(instance.evaluate(opts), Ok((e, o)) if e != o)
}

/// Greedy shrinking: keep taking the first smaller instance that still fails.
fn minimize(instance: Instance, opts: &CrosscheckOptions) -> Instance {
    let mut current = instance;
    while let Some(smaller) = current.shrink().into_iter().find(|c| violates(c, opts)) {
        current = smaller;
    }
    current
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub index: usize,
    pub kind: &'static str,
    pub instance: String,
    pub minimized: String,
    pub expected: bool,
    pub observed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KindTally {
    pub kind: &'static str,
    pub instances: usize,
    pub violations: usize,
}

#[derive(Debug, Clone)]
pub struct CrosscheckReport {
    pub tally: Vec<KindTally>,
    pub table: Table,
    pub counterexamples: Vec<Counterexample>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn instances_of(&self, kind: &str) -> usize {
        self.tally.iter().find(|t| t.kind == kind).map_or(0, |t| t.instances)
    }
}

pub fn crosscheck(opts: &CrosscheckOptions) -> Result<CrosscheckReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tally: Vec<KindTally> = KINDS
        .iter()
        .map(|&kind| KindTally {
            kind,
            instances: 0,
            violations: 0,
        })
        .collect();
    let mut table = Table::new(&["index", "kind", "instance", "expected", "observed", "passed"]);
    let mut counterexamples = Vec::new();
    for index in 0..opts.count {
        let instance = generate(&mut rng, index, opts.bound);
        let (expected, observed) = instance.evaluate(opts)?;
        let passed = expected == observed;
        let slot = &mut tally[index % KINDS.len()];
        slot.instances += 1;
        table.push(vec![
            index.into(),
            instance.kind().into(),
            instance.describe().into(),
            expected.into(),
            observed.into(),
            passed.into(),
        ]);
        if !passed {
            slot.violations += 1;
            let minimized = minimize(instance.clone(), opts);
            counterexamples.push(Counterexample {
                index,
                kind: instance.kind(),
                instance: instance.describe(),
                minimized: minimized.describe(),
                expected,
                observed,
            });
        }
    }
    Ok(CrosscheckReport {
        tally,
        table,
        counterexamples,
    })
}

pub(crate) fn run(opts: &CrosscheckOptions) -> Result<Outcome, CliError> {
    let report = crosscheck(opts)?;
    let mut text = format!("seed {} count {} bound {}\n", opts.seed, opts.count, opts.bound);
    for t in &report.tally {
        text.push_str(&format!("{:<18} {:>6} instances {:>4} violations\n", t.kind, t.instances, t.violations));
    }
    for c in &report.counterexamples {
        text.push_str(&format!(
            "VIOLATION #{} {}: expected {}, observed {}\n  instance:  {}\n  minimized: {}\n",
            c.index, c.kind, c.expected, c.observed, c.instance, c.minimized
        ));
    }
    text.push_str(if report.passed() { "all passed\n" } else { "FAILED\n" });
    Ok(Outcome {
        command: "crosscheck".into(),
        input: format!("seed={} count={} bound={}", opts.seed, opts.count, opts.bound),
        report: json!({
            "seed": opts.seed,
            "count": opts.count,
            "bound": opts.bound,
            "passed": report.passed(),
            "tally": report.tally,
            "counterexamples": report.counterexamples,
            "instances": report.table.to_json(),
        }),
        text,
        exit: if report.passed() { exit::OK } else { exit::INVARIANT_VIOLATION },
        table: Some(report.table),
    })
}

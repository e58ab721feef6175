//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach the output;
//! the process fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use pipoor_cli::{crosscheck, CrosscheckOptions};
use pipoor_core::finite::{
    is_pure_split_finite, is_relatively_injective, localization_hom_image, Element, FiniteAbelianGroup,
    CROSSCHECK_LIMIT,
};
use pipoor_core::primes::factorize;
use pipoor_core::sample::{random_descriptor, DescriptorShape};
use pipoor_core::{
    canonicalize, in_pure_injectivity_domain_of_witness, is_poor, is_pure_split, parse, pi_poor_necessary,
    poor_report, render, witness_truncation, CanonicalGroup, Characteristic, Subject,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(detail.into())
    }
}

fn group(text: &str) -> CanonicalGroup {
    canonicalize(&parse(text).unwrap()).unwrap()
}

fn analyze_json(expr: &str) -> (Value, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_pipoor"))
        .args(["analyze", "--json", expr])
        .output()
        .expect("spawn pipoor");
    let elapsed = start.elapsed();
    assert!(out.status.success(), "analyze {expr} failed: {}", String::from_utf8_lossy(&out.stderr));
    (serde_json::from_slice(&out.stdout).expect("json report"), elapsed)
}

fn poor_witness() -> Outcome {
    let (full, t1) = analyze_json("sum{p}[Z(p^1)]");
    check(full["report"]["poor"]["verdict"] == Value::Bool(true), "witness not poor")?;
    let (holed, t2) = analyze_json("sum{p}[Z(p^1)]\\{2}");
    let poor = &holed["report"]["poor"];
    check(poor["verdict"] == Value::Bool(false), "exclusion did not flip the verdict")?;
    let names_two = poor["evidence"].as_array().unwrap().iter().any(|row| {
        row["passed"] == Value::Bool(false) && row["subject"]["kind"] == "prime" && row["subject"]["prime"] == 2
    });
    check(names_two, "evidence does not name p = 2")?;
    let worst = t1.max(t2);
    check(worst < Duration::from_secs(1), format!("took {worst:?}"))?;
    Ok(format!("max runtime {worst:?}"))
}

fn corollary_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 1000;
    for i in 0..n {
        let g = canonicalize(&random_descriptor(&mut rng, &DescriptorShape::default())).unwrap();
        let r = poor_report(&g).map_err(|e| format!("instance {i}: {e}"))?;
        let all = [r.poor, r.reduced_part_poor, r.torsion_part_poor, r.zp_summand_at_every_prime];
        check(all.iter().all(|&b| b == r.poor), format!("instance {i}: {g} gives {all:?}"))?;
    }
    Ok(format!("{n}/{n} descriptors agree"))
}

fn cyclic(q: u64) -> FiniteAbelianGroup {
    FiniteAbelianGroup::cyclic(q).unwrap()
}

fn relative_injectivity_table() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for p in [2u64, 3, 5] {
        for m in 1..=3u32 {
            for n in 1..=3u32 {
                let verdict = is_relatively_injective(&cyclic(p.pow(m)), &cyclic(p.pow(n)), 512).map_err(|e| e.to_string())?;
                check(verdict == (m >= n), format!("p={p} m={m} n={n}: got {verdict}"))?;
                count += 1;
            }
        }
        check(
            !is_relatively_injective(&cyclic(p), &cyclic(p * p), 512).unwrap(),
            format!("obstruction missing at p={p}"),
        )?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!("{count} exact verdicts in {elapsed:?}"))
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// One group per isomorphism class: a partition of each prime's exponent.
fn groups_of_order(order: u64) -> Vec<FiniteAbelianGroup> {
    let mut out = vec![Vec::new()];
    for (p, e) in factorize(order) {
        let mut next = Vec::new();
        for prefix in &out {
            for part in partitions(e, e) {
                let mut f: Vec<u64> = prefix.clone();
                f.extend(part.iter().map(|&k| p.pow(k)));
                next.push(f);
            }
        }
        out = next;
    }
    out.into_iter().map(|f| FiniteAbelianGroup::new(f).unwrap()).collect()
}

fn finite_pure_split() -> Outcome {
    let start = Instant::now();
    let mut classes = 0;
    for order in 1..=128 {
        for g in groups_of_order(order) {
            check(is_pure_split_finite(&g, 512).map_err(|e| e.to_string())?, format!("{g} is not pure-split"))?;
            classes += 1;
        }
    }
    // sum over n <= 128 of the product of partition counts of n's exponents
    check(classes == 247, format!("enumerated {classes} classes"))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(300), format!("took {elapsed:?}"))?;
    Ok(format!("{classes} isomorphism classes in {elapsed:?}"))
}

fn pure_split_deciders() -> Outcome {
    for p in [2u64, 3, 5] {
        let (tower, _) = analyze_json(&format!("tower({p})"));
        check(
            tower["report"]["pure_split"]["verdict"] == Value::Bool(false),
            format!("tower({p}) reported pure-split"),
        )?;
        for k in 1..=5 {
            let terms: Vec<String> = (1..=k).map(|n| format!("Z({p}^{n})")).collect();
            let g = group(&terms.join(" + "));
            check(is_pure_split(&g).holds(), format!("truncation p={p} k={k} not pure-split"))?;
        }
    }
    Ok("3 towers false, 15 truncations true".into())
}

fn witness_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 1000;
    for i in 0..n {
        let g = canonicalize(&random_descriptor(&mut rng, &DescriptorShape::default())).unwrap();
        let (a, b) = (is_pure_split(&g).verdict, in_pure_injectivity_domain_of_witness(&g).verdict);
        check(a == b, format!("instance {i}: {g}: {a} vs {b}"))?;
    }
    Ok(format!("{n}/{n} descriptors agree"))
}

fn separation_examples() -> Outcome {
    let g = group("sum{p}[Z(p^1)]");
    check(is_poor(&g).holds(), "sum of Z(p) not poor")?;
    check(!pi_poor_necessary(&g).holds(), "sum of Z(p) passes pi-poor necessity")?;
    let w = witness_truncation(7, 3, &[Characteristic::integers()]).unwrap();
    let stripped = w.without_cyclic_layer(1);
    let r = is_poor(&stripped);
    check(!r.holds(), "truncated witness without Z(p) layer is poor")?;
    check(
        r.failures().any(|row| matches!(row.subject, Subject::Prime { prime: 2 })),
        "no failing prime named",
    )?;
    Ok("poor and not pi-poor; pi-poor shape and not poor".into())
}

fn random_element(rng: &mut ChaCha8Rng, g: &FiniteAbelianGroup) -> Element {
    Element::new(g.factors().iter().map(|&m| rng.random_range(0..m)).collect())
}

fn localization_arithmetic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 10_000;
    for i in 0..n {
        let p = [2u64, 3, 5][rng.random_range(0..3)];
        let factors: Vec<u64> = (0..rng.random_range(1..=3)).map(|_| p.pow(rng.random_range(1..=4))).collect();
        let m = FiniteAbelianGroup::new(factors).unwrap();
        let a = random_element(&mut rng, &m);
        let c = loop {
            let c: i64 = rng.random_range(-500..500);
            if c % p as i64 != 0 {
                break c;
            }
        };
        let (b1, b2): (i64, i64) = (rng.random_range(-1000..1000), rng.random_range(-1000..1000));
        let f = |b: i64, c: i64| localization_hom_image(&m, &a, b, c).unwrap();
        let fail = |what: &str| format!("instance {i}: {what} for M={m}, a={a}, b1={b1}, b2={b2}, c={c}");
        check(m.add(&f(b1, c), &f(b2, c)) == f(b1 + b2, c), fail("not additive"))?;
        let k = [7i64, 11, 13][rng.random_range(0..3)];
        let k = if k % p as i64 == 0 { k + 1 } else { k };
        check(f(b1 * k, c * k) == f(b1, c), fail("depends on the representative"))?;
        check(m.scale(c, &f(b1, c)) == m.scale(b1, &a), fail("c f(b/c) != b a"))?;
        let in_span = (0..m.order_of(&a) as i64).any(|t| m.scale(t, &a) == f(b1, c));
        check(in_span, fail("image outside <a>"))?;
    }
    Ok(format!("{n} instances, 0 failures"))
}

fn dual_hom_extends() -> Outcome {
    let opts = CrosscheckOptions {
        seed: 9,
        count: 4000,
        bound: 128,
        corrupt_oracle: false,
    };
    let report = crosscheck(&opts).map_err(|e| e.to_string())?;
    let homs = report.instances_of("hom-extends");
    check(homs >= 1000, format!("only {homs} hom instances"))?;
    check(report.passed(), format!("{} violations", report.counterexamples.len()))?;
    check(CROSSCHECK_LIMIT == 64, "sampling limit changed")?;
    Ok(format!("{homs} hom instances, 0 disagreements"))
}

const FUZZ_ALPHABET: &[u8] = b"ZQR()^+{}[]\\_;:,0123456789 pinfomegasumtower";

fn parser_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let n = 10_000;
    for i in 0..n {
        let g = canonicalize(&random_descriptor(&mut rng, &DescriptorShape::default())).unwrap();
        let text = render(&g);
        let back = parse(&text).map_err(|e| format!("instance {i}: {text:?}: {e}"))?;
        check(canonicalize(&back).unwrap() == g, format!("instance {i}: {text:?} does not round-trip"))?;
    }
    let fuzz = 100_000;
    let mut crashes = 0;
    for i in 0..fuzz {
        let len = rng.random_range(0..40);
        let bytes: Vec<u8> = if i % 2 == 0 {
            (0..len).map(|_| rng.random()).collect()
        } else {
            (0..len).map(|_| FUZZ_ALPHABET[rng.random_range(0..FUZZ_ALPHABET.len())]).collect()
        };
        let text = String::from_utf8_lossy(&bytes).into_owned();
        let ok = catch_unwind(AssertUnwindSafe(|| {
            if let Ok(d) = parse(&text) {
                let _ = canonicalize(&d);
            }
        }));
        if ok.is_err() {
            crashes += 1;
        }
    }
    check(crashes == 0, format!("{crashes} crashes in {fuzz} fuzz inputs"))?;
    Ok(format!("{n} round-trips, {fuzz} fuzz inputs, 0 crashes"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 poor witness and exclusion", poor_witness),
        ("2 corollary agreement", corollary_agreement),
        ("3 relative-injectivity table", relative_injectivity_table),
        ("4 finite pure-split sanity", finite_pure_split),
        ("5 pure-split deciders", pure_split_deciders),
        ("6 witness-domain identity", witness_identity),
        ("7 separation examples", separation_examples),
        ("8 localization arithmetic", localization_arithmetic),
        ("9 dual hom_extends", dual_hom_extends),
        ("10 parser round-trip and fuzz", parser_round_trip),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, criterion) in criteria {
        let result = catch_unwind(criterion).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

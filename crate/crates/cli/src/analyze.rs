use pipoor_core::primes::primes_up_to;
use pipoor_core::{
    canonicalize, in_pure_injectivity_domain_of_witness, is_pure_split, parse, pi_poor_necessary, poor_report,
    render, CanonicalGroup, DecisionReport, Rank, StructuralPredicates,
};
use serde::Serialize;

use crate::{exit, CliError, Outcome};

#[derive(Serialize)]
struct PoorCorollary {
    reduced_part_poor: bool,
    torsion_part_poor: bool,
    zp_summand_at_every_prime: bool,
}

#[derive(Serialize)]
struct PrimeRow {
    prime: u64,
    primary_component: String,
    zp_summand: bool,
    bounded: bool,
    reduced_bounded: bool,
}

#[derive(Serialize)]
struct Analysis {
    canonical: String,
    predicates: StructuralPredicates,
    torsion_free_rank: Rank,
    poor: DecisionReport,
    poor_corollary: PoorCorollary,
    pure_split: DecisionReport,
    witness_domain: DecisionReport,
    pi_poor_necessary: DecisionReport,
    primes: Vec<PrimeRow>,
}

/// The error message followed by the input with a caret under the offset.
fn parse_error_message(text: &str, err: &pipoor_core::ParseError) -> String {
    let column = text[..err.position.min(text.len())].chars().count();
    format!("{err}\n  {text}\n  {}^", " ".repeat(column))
}

fn prime_rows(g: &CanonicalGroup, max_prime: u64) -> Vec<PrimeRow> {
    primes_up_to(max_prime)
        .into_iter()
        .map(|p| {
            let local = g.local(p);
            PrimeRow {
                prime: p,
                primary_component: render(&g.p_primary(p)),
                zp_summand: local.cyclic_multiplicity(1).is_some(),
                bounded: local.is_bounded(),
                reduced_bounded: local.reduced_is_bounded(),
            }
        })
        .collect()
}

fn write_report(out: &mut String, name: &str, report: &DecisionReport) {
    out.push_str(&format!("{name}: {}\n", report.verdict));
    for row in &report.evidence {
        let mark = match (row.binding, row.passed) {
            (false, _) => "note",
            (true, true) => "ok",
            (true, false) => "FAIL",
        };
        out.push_str(&format!("  {mark:<4}  {}: {}", row.subject, row.condition));
        if !row.binding {
            out.push_str(&format!(" = {}", row.passed));
        }
        out.push('\n');
    }
    for c in &report.citations {
        out.push_str(&format!("  cite  {c}\n"));
    }
}

fn text(a: &Analysis) -> String {
    let p = &a.predicates;
    let mut out = format!(
        "group: {}\ntorsion: {}  torsion-free: {}  divisible: {}  reduced: {}  semisimple: {}\ntorsion-free rank: {}\n",
        a.canonical, p.is_torsion, p.is_torsion_free, p.is_divisible, p.is_reduced, p.is_semisimple, a.torsion_free_rank
    );
    write_report(&mut out, "poor", &a.poor);
    write_report(&mut out, "pure_split", &a.pure_split);
    write_report(&mut out, "pi_poor_necessary", &a.pi_poor_necessary);
    if !a.primes.is_empty() {
        let mut t = crate::Table::new(&["p", "T_p", "Z(p) summand", "bounded", "reduced bounded"]);
        for r in &a.primes {
            t.push(vec![
                r.prime.into(),
                r.primary_component.clone().into(),
                r.zp_summand.into(),
                r.bounded.into(),
                r.reduced_bounded.into(),
            ]);
        }
        out.push_str(&t.to_text());
    }
    out
}

pub(crate) fn run(input: &str, max_prime: u64) -> Result<Outcome, CliError> {
    let descriptor = parse(input).map_err(|e| CliError::Parse(parse_error_message(input, &e)))?;
    let g = canonicalize(&descriptor).map_err(|e| CliError::Parse(e.to_string()))?;
    let corollary = poor_report(&g)?;
    let pure_split = is_pure_split(&g);
    let witness_domain = in_pure_injectivity_domain_of_witness(&g);
    if pure_split.verdict != witness_domain.verdict {
        return Err(CliError::Invariant(format!(
            "{g}: is_pure_split = {}, witness domain = {}",
            pure_split.verdict, witness_domain.verdict
        )));
    }
    let analysis = Analysis {
        canonical: render(&g),
        predicates: g.structural_predicates(),
        torsion_free_rank: g.torsion_free_rank(),
        poor: corollary.report,
        poor_corollary: PoorCorollary {
            reduced_part_poor: corollary.reduced_part_poor,
            torsion_part_poor: corollary.torsion_part_poor,
            zp_summand_at_every_prime: corollary.zp_summand_at_every_prime,
        },
        pure_split,
        witness_domain,
        pi_poor_necessary: pi_poor_necessary(&g),
        primes: prime_rows(&g, max_prime),
    };
    Ok(Outcome {
        command: "analyze".into(),
        input: input.to_string(),
        report: serde_json::to_value(&analysis).expect("serializable analysis"),
        text: text(&analysis),
        table: None,
        exit: exit::OK,
    })
}

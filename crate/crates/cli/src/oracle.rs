use clap::Subcommand;
use pipoor_core::finite::{
    element_height, enumerate_subgroups, is_direct_summand, is_pure_subgroup, is_relatively_injective,
    is_relatively_pure_injective, parse_finite_group, quotient, smith_normal_form, Element, FiniteAbelianGroup,
    IntMatrix, Subgroup, DEFAULT_ORDER_BOUND,
};
use serde_json::{json, Value};

use crate::{exit, CliError, Outcome, Table};

#[derive(Debug, Subcommand)]
pub(crate) enum OracleCommand {
    /// List every subgroup with purity and summand flags
    Subgroups {
        /// Finite group such as "Z2 x Z4"
        group: String,
        #[arg(long, default_value_t = DEFAULT_ORDER_BOUND)]
        bound: u64,
    },
    /// Is the subgroup generated by the given elements pure?
    Pure {
        group: String,
        /// Generators such as "(1,1)" or "1,1"
        generators: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_ORDER_BOUND)]
        bound: u64,
    },
    /// Is the subgroup generated by the given elements a direct summand?
    Summand {
        group: String,
        generators: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_ORDER_BOUND)]
        bound: u64,
    },
    /// The quotient by the subgroup generated by the given elements
    Quotient {
        group: String,
        generators: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_ORDER_BOUND)]
        bound: u64,
    },
    /// Is M injective relative to N?
    RelInj {
        m: String,
        n: String,
        #[arg(long, default_value_t = DEFAULT_ORDER_BOUND)]
        bound: u64,
    },
    /// Is M pure-injective relative to N?
    RelPureInj {
        m: String,
        n: String,
        #[arg(long, default_value_t = DEFAULT_ORDER_BOUND)]
        bound: u64,
    },
    /// The p-height of an element
    Height { group: String, element: String, prime: u64 },
    /// Smith normal form of a matrix written "a,b;c,d"
    Snf { matrix: String },
}

fn group(text: &str) -> Result<FiniteAbelianGroup, CliError> {
    Ok(parse_finite_group(text)?)
}

fn element(text: &str, g: &FiniteAbelianGroup) -> Result<Element, CliError> {
    let body = text.trim().trim_start_matches('(').trim_end_matches(')');
    let coords = if body.trim().is_empty() {
        Vec::new()
    } else {
        body.split(',')
            .map(|c| c.trim().parse::<u64>())
            .collect::<Result<Vec<u64>, _>>()
            .map_err(|_| CliError::Parse(format!("bad element {text:?}")))?
    };
    let x = Element::new(coords);
    g.check(&x)?;
    Ok(x)
}

fn subgroup(g: &FiniteAbelianGroup, gens: &[String], bound: u64) -> Result<Subgroup, CliError> {
    g.ensure_within(bound)?;
    let gens = gens.iter().map(|s| element(s, g)).collect::<Result<Vec<_>, _>>()?;
    Ok(Subgroup::generated(g, &gens)?)
}

fn generators_text(h: &Subgroup) -> String {
    let parts: Vec<String> = h.generators().iter().map(Element::to_string).collect();
    parts.join(" ")
}

fn parse_matrix(text: &str) -> Result<IntMatrix, CliError> {
    let rows = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<Vec<i64>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Parse(format!("bad matrix {text:?}; expected rows like \"2,4;6,8\"")))?;
    IntMatrix::from_rows(&rows).map_err(|e| CliError::Parse(e.to_string()))
}

fn verdict_outcome(command: &str, input: String, table: Table, verdict: bool, extra: Value) -> Outcome {
    let mut report = json!({ "verdict": verdict });
    if let (Value::Object(r), Value::Object(e)) = (&mut report, extra) {
        r.extend(e);
    }
    report["table"] = table.to_json();
    Outcome {
        command: format!("oracle {command}"),
        input,
        report,
        text: format!("{verdict}\n"),
        table: Some(table),
        exit: exit::OK,
    }
}

fn subgroup_verdict(
    command: &str,
    g_text: &str,
    gens: &[String],
    bound: u64,
    decide: impl Fn(&Subgroup, &FiniteAbelianGroup) -> Result<bool, pipoor_core::finite::OracleError>,
) -> Result<Outcome, CliError> {
    let g = group(g_text)?;
    let h = subgroup(&g, gens, bound)?;
    let verdict = decide(&h, &g)?;
    let mut table = Table::new(&["group", "generators", "order", command]);
    table.push(vec![g.to_string().into(), generators_text(&h).into(), h.order().into(), verdict.into()]);
    let input = std::iter::once(g_text.to_string()).chain(gens.iter().cloned()).collect::<Vec<_>>().join(" ");
    Ok(verdict_outcome(command, input, table, verdict, json!({ "group": g, "order": h.order() })))
}

fn relative(command: &str, m_text: &str, n_text: &str, bound: u64, pure: bool) -> Result<Outcome, CliError> {
    let (m, n) = (group(m_text)?, group(n_text)?);
    let verdict = if pure {
        is_relatively_pure_injective(&m, &n, bound)?
    } else {
        is_relatively_injective(&m, &n, bound)?
    };
    let mut table = Table::new(&["m", "n", command]);
    table.push(vec![m.to_string().into(), n.to_string().into(), verdict.into()]);
    Ok(verdict_outcome(
        command,
        format!("{m_text} {n_text}"),
        table,
        verdict,
        json!({ "m": m, "n": n }),
    ))
}

pub(crate) fn run(command: &OracleCommand) -> Result<Outcome, CliError> {
    match command {
        OracleCommand::Subgroups { group: text, bound } => {
            let g = group(text)?;
            let subs = enumerate_subgroups(&g, *bound)?;
            let mut table = Table::new(&["index", "order", "generators", "pure", "summand", "quotient"]);
            for (i, h) in subs.iter().enumerate() {
                table.push(vec![
                    i.into(),
                    h.order().into(),
                    generators_text(h).into(),
                    is_pure_subgroup(h, &g)?.into(),
                    is_direct_summand(h, &g)?.into(),
                    quotient(&g, h)?.to_string().into(),
                ]);
            }
            let text_out = format!("{} subgroups of {g}\n{}", table.len(), table.to_text());
            Ok(Outcome {
                command: "oracle subgroups".into(),
                input: text.clone(),
                report: json!({ "group": g, "count": table.len(), "table": table.to_json() }),
                text: text_out,
                table: Some(table),
                exit: exit::OK,
            })
        }
        OracleCommand::Pure { group, generators, bound } => {
            subgroup_verdict("pure", group, generators, *bound, is_pure_subgroup)
        }
        OracleCommand::Summand { group, generators, bound } => {
            subgroup_verdict("summand", group, generators, *bound, is_direct_summand)
        }
        OracleCommand::Quotient { group: g_text, generators, bound } => {
            let g = group(g_text)?;
            let h = subgroup(&g, generators, *bound)?;
            let q = quotient(&g, &h)?;
            let mut table = Table::new(&["group", "generators", "quotient"]);
            table.push(vec![g.to_string().into(), generators_text(&h).into(), q.to_string().into()]);
            Ok(Outcome {
                command: "oracle quotient".into(),
                input: std::iter::once(g_text.clone()).chain(generators.iter().cloned()).collect::<Vec<_>>().join(" "),
                report: json!({ "group": g, "quotient": q, "table": table.to_json() }),
                text: format!("{q}\n"),
                table: Some(table),
                exit: exit::OK,
            })
        }
        OracleCommand::RelInj { m, n, bound } => relative("rel-inj", m, n, *bound, false),
        OracleCommand::RelPureInj { m, n, bound } => relative("rel-pure-inj", m, n, *bound, true),
        OracleCommand::Height { group: g_text, element: e_text, prime } => {
            let g = group(g_text)?;
            let a = element(e_text, &g)?;
            if !pipoor_core::primes::is_prime(*prime) {
                return Err(CliError::Parse(format!("{prime} is not prime")));
            }
            let h = element_height(&g, &a, *prime)?;
            Ok(Outcome {
                command: "oracle height".into(),
                input: format!("{g_text} {e_text} {prime}"),
                report: json!({ "group": g, "element": a, "prime": prime, "height": h }),
                text: format!("{h}\n"),
                table: None,
                exit: exit::OK,
            })
        }
        OracleCommand::Snf { matrix } => {
            let a = parse_matrix(matrix)?;
            let smith = smith_normal_form(&a).map_err(pipoor_core::finite::OracleError::from)?;
            let d = smith.invariant_factors();
            let diag: Vec<String> = d.iter().map(i64::to_string).collect();
            let diag = format!("diag({})", diag.join(","));
            Ok(Outcome {
                command: "oracle snf".into(),
                input: matrix.clone(),
                report: json!({
                    "invariant_factors": d,
                    "s": smith.s.to_string(),
                    "u": smith.u.to_string(),
                    "v": smith.v.to_string(),
                }),
                text: format!("{diag}\nU = {}\nV = {}\n", smith.u, smith.v),
                table: None,
                exit: exit::OK,
            })
        }
    }
}

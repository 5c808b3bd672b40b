//! `gds`: load granular relations and distributions from JSON, run
//! queries, combine evidence, check combinability, and simulate.
//!
//! Exit codes: 0 = computed (verdicts like "noncombinable" are data, not
//! errors), 2 = input or validation error, 3 = total conflict from
//! `combine`, 4 = an internal limit was exceeded.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use granular_ds::{
    combinability, combine_n, conflict_mass, query, sim, ConflictVerdict, Credibility, Error,
    FeasibilityResult, GranularDistribution, GranularRelation, Rational, SimConfig, Subset,
};

#[derive(Parser)]
#[command(
    name = "gds",
    version,
    about = "Set-valued evidence: exact belief, combination, combinability, simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize one column of a relation into a distribution.
    Summarize {
        /// Relation JSON file.
        relation: PathBuf,
        /// Column to summarize.
        #[arg(long)]
        column: String,
    },
    /// Necessity/possibility of a query set, against a relation column
    /// or a distribution.
    Query {
        /// Relation or distribution JSON file.
        input: PathBuf,
        /// Query set as comma-separated labels (empty string for the
        /// empty query).
        #[arg(long)]
        query: String,
        /// Column name (required for relation input).
        #[arg(long)]
        column: Option<String>,
        /// Also print raw individual counts (relation input only).
        #[arg(long)]
        counts: bool,
    },
    /// Per-row intersection test on two columns of a relation.
    ConflictFree {
        /// Relation JSON file.
        relation: PathBuf,
        /// The two columns, comma-separated: X,Y.
        #[arg(long)]
        columns: String,
    },
    /// Combine two or more distributions under Dempster's rule.
    Combine {
        /// Distribution JSON files, combined left to right.
        #[arg(required = true, num_args = 1..)]
        distributions: Vec<PathBuf>,
    },
    /// Decide whether two distributions share a conflict-free parent.
    Check {
        g: PathBuf,
        h: PathBuf,
        /// Cross-check the flow decision against the subset oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Ball-box simulation: query estimates for one box, combination
    /// statistics for two.
    Simulate {
        g: PathBuf,
        h: Option<PathBuf>,
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Credibilities for the two boxes: aG,aH (two-box runs only).
        #[arg(long)]
        discount: Option<String>,
        /// Query set for single-box runs.
        #[arg(long)]
        query: Option<String>,
    },
}

struct Failure {
    code: u8,
    message: String,
    /// Printed to stdout before exiting, e.g. the total-conflict payload.
    payload: Option<String>,
}

impl Failure {
    fn input(message: String) -> Self {
        Failure {
            code: 2,
            message,
            payload: None,
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::TotalConflict { .. } => 3,
        Error::WitnessTooLarge { .. } | Error::OracleTooLarge { .. } => 4,
        _ => 2,
    }
}

fn fail(context: &str, err: Error) -> Failure {
    Failure {
        code: exit_code_for(&err),
        message: format!("{context}: {err}"),
        payload: None,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_distribution(path: &Path) -> Result<GranularDistribution, Failure> {
    GranularDistribution::from_json(&read(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_relation(path: &Path) -> Result<GranularRelation, Failure> {
    GranularRelation::from_json(&read(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

enum QueryInput {
    Relation(GranularRelation),
    Distribution(GranularDistribution),
}

/// Relations have "rows", distributions have "focal"; decide by shape so
/// the error messages come from the right parser.
fn load_query_input(path: &Path) -> Result<QueryInput, Failure> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: invalid JSON: {e}", path.display())))?;
    if value.get("rows").is_some() {
        Ok(QueryInput::Relation(GranularRelation::from_json(&text).map_err(
            |e| Failure::input(format!("{}: {e}", path.display())),
        )?))
    } else if value.get("focal").is_some() {
        Ok(QueryInput::Distribution(
            GranularDistribution::from_json(&text)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        ))
    } else {
        Err(Failure::input(format!(
            "{}: neither a relation (no \"rows\") nor a distribution (no \"focal\")",
            path.display()
        )))
    }
}

fn parse_labels(spec: &str) -> Vec<&str> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_query_set(
    frame: &granular_ds::Frame,
    spec: &str,
    context: &str,
) -> Result<Subset, Failure> {
    frame
        .subset(parse_labels(spec))
        .map_err(|e| Failure::input(format!("{context}: {e}")))
}

fn mass_table(pairs: &[(granular_ds::Granule, Rational)]) -> Vec<[String; 3]> {
    pairs
        .iter()
        .map(|(g, m)| [g.to_string(), m.to_string(), format!("{:.6}", m.approx())])
        .collect()
}

fn aligned(header: [&str; 3], rows: &[[String; 3]]) -> String {
    let mut widths = [header[0].len(), header[1].len(), header[2].len()];
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let emit = |cells: [&str; 3], out: &mut String| {
        let _ = writeln!(
            out,
            "{:<w0$}  {:<w1$}  {:<w2$}",
            cells[0],
            cells[1],
            cells[2],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        );
    };
    let mut out = String::new();
    emit(header, &mut out);
    for row in rows {
        emit([&row[0], &row[1], &row[2]], &mut out);
    }
    out.trim_end().to_string()
}

fn distribution_output(dist: &GranularDistribution, format: Format) -> String {
    match format {
        Format::Json => pretty(&dist.to_json_value()),
        Format::Table => aligned(["SET", "MASS", "~DECIMAL"], &mass_table(dist.focal())),
    }
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("value serializes")
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Summarize { relation, column } => {
            let rel = load_relation(&relation)?;
            let dist = rel
                .summarize(&column)
                .map_err(|e| fail(&relation.display().to_string(), e))?;
            Ok(distribution_output(&dist, cli.format))
        }

        Command::Query {
            input,
            query: query_spec,
            column,
            counts,
        } => {
            let result = match load_query_input(&input)? {
                QueryInput::Relation(rel) => {
                    let column = column.ok_or_else(|| {
                        Failure::input(format!(
                            "{}: relation input needs --column",
                            input.display()
                        ))
                    })?;
                    let q = parse_query_set(rel.frame(), &query_spec, "--query")?;
                    query::necessity_possibility(&rel, &column, &q)
                        .map_err(|e| fail(&input.display().to_string(), e))?
                }
                QueryInput::Distribution(dist) => {
                    if counts {
                        return Err(Failure::input(
                            "--counts applies to relation-backed queries only".to_string(),
                        ));
                    }
                    if let Some(col) = column {
                        return Err(Failure::input(format!(
                            "--column {col:?} given, but {} is a distribution",
                            input.display()
                        )));
                    }
                    let q = parse_query_set(dist.frame(), &query_spec, "--query")?;
                    query::query_distribution(&dist, &q)
                        .map_err(|e| fail(&input.display().to_string(), e))?
                }
            };
            let mut body = json!({
                "necessity": result.necessity.to_string(),
                "possibility": result.possibility.to_string(),
            });
            if counts {
                let c = result.counts.expect("relation-backed query has counts");
                body["counts"] = json!({
                    "certain": c.certain,
                    "possible": c.possible,
                    "total": c.total,
                });
            }
            match cli.format {
                Format::Json => Ok(pretty(&body)),
                Format::Table => {
                    let mut rows = vec![
                        [
                            "necessity".to_string(),
                            result.necessity.to_string(),
                            format!("{:.6}", result.necessity.approx()),
                        ],
                        [
                            "possibility".to_string(),
                            result.possibility.to_string(),
                            format!("{:.6}", result.possibility.approx()),
                        ],
                    ];
                    if counts {
                        let c = result.counts.expect("relation-backed query has counts");
                        rows.push([
                            "counts".to_string(),
                            format!("{}/{} certain", c.certain, c.total),
                            format!("{}/{} possible", c.possible, c.total),
                        ]);
                    }
                    Ok(aligned(["MEASURE", "VALUE", "~DECIMAL"], &rows))
                }
            }
        }

        Command::ConflictFree { relation, columns } => {
            let rel = load_relation(&relation)?;
            let cols = parse_labels(&columns);
            if cols.len() != 2 {
                return Err(Failure::input(format!(
                    "--columns expects exactly two names, got {columns:?}"
                )));
            }
            let verdict = rel
                .conflict_free(cols[0], cols[1])
                .map_err(|e| fail(&relation.display().to_string(), e))?;
            match (cli.format, &verdict) {
                (Format::Json, ConflictVerdict::ConflictFree) => {
                    Ok(pretty(&json!({"conflict_free": true})))
                }
                (Format::Json, ConflictVerdict::Conflicting { row_ids }) => Ok(pretty(&json!({
                    "conflict_free": false,
                    "offending": row_ids,
                }))),
                (Format::Table, ConflictVerdict::ConflictFree) => {
                    Ok("conflict-free: yes".to_string())
                }
                (Format::Table, ConflictVerdict::Conflicting { row_ids }) => Ok(format!(
                    "conflict-free: no\noffending rows: {}",
                    row_ids.join(", ")
                )),
            }
        }

        Command::Combine { distributions } => {
            let loaded = distributions
                .iter()
                .map(|p| load_distribution(p))
                .collect::<Result<Vec<_>, _>>()?;
            match combine_n(&loaded) {
                Ok(result) => {
                    let normalized = result
                        .normalized
                        .as_ref()
                        .expect("K < 1 on the success path");
                    let body = json!({
                        "conflict": result.conflict.to_string(),
                        "unnormalized": result
                            .unnormalized
                            .iter()
                            .map(|(g, m)| json!({"set": g, "mass": m.to_string()}))
                            .collect::<Vec<_>>(),
                        "normalized": normalized.to_json_value(),
                    });
                    match cli.format {
                        Format::Json => Ok(pretty(&body)),
                        Format::Table => {
                            let mut out = format!(
                                "conflict K: {} (~{:.6})\n\nnormalized:\n{}",
                                result.conflict,
                                result.conflict.approx(),
                                aligned(
                                    ["SET", "MASS", "~DECIMAL"],
                                    &mass_table(normalized.focal())
                                )
                            );
                            out.push_str("\n\nunnormalized:\n");
                            out.push_str(&aligned(
                                ["SET", "MASS", "~DECIMAL"],
                                &mass_table(&result.unnormalized),
                            ));
                            Ok(out)
                        }
                    }
                }
                Err(Error::TotalConflict { partial, step }) => {
                    let payload = json!({
                        "total_conflict": true,
                        "conflict": partial.conflict.to_string(),
                        "unnormalized": [],
                        "normalized": Value::Null,
                        "failed_at_input": step,
                    });
                    Err(Failure {
                        code: 3,
                        message: "total conflict (K = 1/1): normalization is undefined".to_string(),
                        payload: Some(pretty(&payload)),
                    })
                }
                Err(e) => Err(fail("combine", e)),
            }
        }

        Command::Check { g, h, oracle } => {
            let dist_g = load_distribution(&g)?;
            let dist_h = load_distribution(&h)?;
            let conflict = conflict_mass(&dist_g, &dist_h).map_err(|e| fail("check", e))?;
            let sufficient = combinability::sufficient_noncombinable(&dist_g, &dist_h)
                .map_err(|e| fail("check", e))?;
            let result =
                combinability::combinable(&dist_g, &dist_h).map_err(|e| fail("check", e))?;
            let oracle_verdict = if oracle {
                let v = combinability::gale_oracle(&dist_g, &dist_h)
                    .map_err(|e| fail("check --oracle", e))?;
                if !v.agrees_with(&result) {
                    return Err(Failure {
                        code: 4,
                        message: "internal disagreement between flow decision and oracle"
                            .to_string(),
                        payload: None,
                    });
                }
                Some(v)
            } else {
                None
            };

            let mut body = match &result {
                FeasibilityResult::Feasible { joint, witness } => json!({
                    "combinable": true,
                    "joint": joint
                        .support()
                        .iter()
                        .map(|(i, j, m)| json!([i, j, m.to_string()]))
                        .collect::<Vec<_>>(),
                    "witness_rows": witness.row_count(),
                }),
                FeasibilityResult::Infeasible { certificate } => json!({
                    "combinable": false,
                    "certificate": {
                        "side": certificate.side.as_str(),
                        "set_indices": certificate.indices,
                        "supply": certificate.supply.to_string(),
                        "reachable_demand": certificate.reachable_demand.to_string(),
                    },
                }),
            };
            body["conflict"] = Value::String(conflict.to_string());
            body["sufficient_noncombinable"] = Value::Bool(sufficient.is_triggered());
            if let Some(v) = &oracle_verdict {
                body["oracle"] = json!({
                    "verdict": if v.is_feasible() { "feasible" } else { "infeasible" },
                    "agrees": true,
                });
            }

            match cli.format {
                Format::Json => Ok(pretty(&body)),
                Format::Table => {
                    let mut out = String::new();
                    let _ = writeln!(
                        out,
                        "combinable: {}",
                        if result.is_feasible() { "yes" } else { "no" }
                    );
                    let _ = writeln!(out, "conflict K: {} (~{:.6})", conflict, conflict.approx());
                    let _ = writeln!(
                        out,
                        "sufficient condition triggered: {}",
                        if sufficient.is_triggered() { "yes" } else { "no" }
                    );
                    match &result {
                        FeasibilityResult::Feasible { joint, witness } => {
                            let _ = writeln!(out, "witness rows: {}", witness.row_count());
                            let rows: Vec<[String; 3]> = joint
                                .support()
                                .iter()
                                .map(|(i, j, m)| {
                                    [
                                        format!("G[{i}] x H[{j}]"),
                                        m.to_string(),
                                        format!("{:.6}", m.approx()),
                                    ]
                                })
                                .collect();
                            let _ = writeln!(out, "\njoint assignment:");
                            out.push_str(&aligned(["PAIR", "MASS", "~DECIMAL"], &rows));
                        }
                        FeasibilityResult::Infeasible { certificate } => {
                            let _ = writeln!(
                                out,
                                "certificate: side {}, focal indices {:?}, supply {} > reachable demand {}",
                                certificate.side.as_str(),
                                certificate.indices,
                                certificate.supply,
                                certificate.reachable_demand
                            );
                        }
                    }
                    if let Some(v) = oracle_verdict {
                        let _ = write!(
                            out,
                            "\noracle: {} (agrees)",
                            if v.is_feasible() { "feasible" } else { "infeasible" }
                        );
                    }
                    Ok(out.trim_end().to_string())
                }
            }
        }

        Command::Simulate {
            g,
            h,
            samples,
            seed,
            discount,
            query: query_spec,
        } => {
            let dist_g = load_distribution(&g)?;
            let mut cfg = SimConfig::new(samples, seed);
            let report = match h {
                Some(h_path) => {
                    if query_spec.is_some() {
                        return Err(Failure::input(
                            "--query applies to single-box runs; drop the second file".to_string(),
                        ));
                    }
                    let dist_h = load_distribution(&h_path)?;
                    if let Some(spec) = discount {
                        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
                        if parts.len() != 2 {
                            return Err(Failure::input(format!(
                                "--discount expects aG,aH, got {spec:?}"
                            )));
                        }
                        let parse_cred = |text: &str| -> Result<Credibility, Failure> {
                            let r = Rational::parse(text)
                                .map_err(|e| Failure::input(format!("--discount: {e}")))?;
                            Credibility::new(r)
                                .map_err(|e| Failure::input(format!("--discount: {e}")))
                        };
                        cfg = cfg.with_credibilities(parse_cred(parts[0])?, parse_cred(parts[1])?);
                    }
                    sim::simulate_combination(&dist_g, &dist_h, &cfg)
                        .map_err(|e| fail("simulate", e))?
                }
                None => {
                    if discount.is_some() {
                        return Err(Failure::input(
                            "--discount applies to two-box runs".to_string(),
                        ));
                    }
                    let spec = query_spec.ok_or_else(|| {
                        Failure::input("single-box simulation needs --query".to_string())
                    })?;
                    let q = parse_query_set(dist_g.frame(), &spec, "--query")?;
                    sim::estimate_query(&dist_g, &q, &cfg).map_err(|e| fail("simulate", e))?
                }
            };
            match cli.format {
                Format::Json => Ok(pretty(&report.to_json_value())),
                Format::Table => {
                    let mut out = format!("samples: {}\nseed: {}", report.samples, report.seed);
                    if let Some(q) = &report.query {
                        let _ = write!(
                            out,
                            "\nbelief: {:.6} ({}/{})\npossibility: {:.6} ({}/{})",
                            q.belief,
                            q.certain_count,
                            report.samples,
                            q.possibility,
                            q.possible_count,
                            report.samples
                        );
                    }
                    if let Some(c) = &report.combination {
                        let _ = write!(
                            out,
                            "\nconflict rate: {:.6} ({}/{})\nkept: {}",
                            c.conflict_rate, c.rejected, report.samples, c.samples_kept
                        );
                        if c.all_rejected {
                            out.push_str("\nall pairs rejected (empirical total conflict)");
                        } else {
                            let rows: Vec<[String; 3]> = c
                                .combined
                                .iter()
                                .map(|m| {
                                    [
                                        m.set.to_string(),
                                        format!("{:.6}", m.frequency),
                                        m.count.to_string(),
                                    ]
                                })
                                .collect();
                            out.push_str("\n\nkept-pair frequencies:\n");
                            out.push_str(&aligned(["SET", "FREQUENCY", "COUNT"], &rows));
                        }
                    }
                    Ok(out)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            println!("{output}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(payload) = &failure.payload {
                println!("{payload}");
            }
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

//! Command-line front end for the buchi toolkit.
//!
//! Thin wrappers over the library: every subcommand parses arguments, calls
//! one library entry point and renders the result. Exit codes: 0 for
//! success (and TRUE verdicts), 1 for FALSE / failing-check verdicts, 2 for
//! errors of any kind.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use buchi::compiler::{compile, count_below, decide, witness, CompileConfig};
use buchi::countermodel::{check_axioms, separating_counterexample};
use buchi::orders::{order_formula, rank, OrderSpec, RankError, RankOutcome};
use buchi::syntax::{free_vars, parse, render, Formula};

#[derive(Parser)]
#[command(name = "buchi", about = "Büchi arithmetic toolkit", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Numeration base n of (ℕ; =, +, V_n).
    #[arg(long, default_value_t = 2)]
    base: u32,
    /// Abort when an intermediate automaton exceeds this many states.
    #[arg(long, default_value_t = buchi::automata::DEFAULT_STATE_CAP)]
    state_cap: usize,
    /// Emit machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide a sentence; prints TRUE or FALSE.
    Decide {
        /// Sentence text, or @path to read it from a file.
        sentence: String,
        #[command(flatten)]
        common: Common,
    },
    /// Compile a formula to an automaton (JSON, optionally DOT).
    Compile {
        formula: String,
        #[command(flatten)]
        common: Common,
        /// Write the JSON automaton here (stdout when omitted).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// Also write a Graphviz rendering here.
        #[arg(long)]
        dot: Option<std::path::PathBuf>,
    },
    /// List the first solutions of a formula in canonical order.
    Solve {
        formula: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Count solutions with every coordinate below a bound.
    Count {
        formula: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        bound: BigUint,
    },
    /// Condensation rank of a definable linear order `a <= b`.
    Rank {
        /// Order relation with exactly two free variables.
        order: String,
        #[command(flatten)]
        common: Common,
        /// Domain restriction with one free variable (default: all of ℕ).
        #[arg(long)]
        domain: Option<String>,
        /// Stop after this many condensation iterations.
        #[arg(long, default_value_t = 6)]
        rank_cap: usize,
    },
    /// Print the order formula of rank k.
    OrderGen { k: usize },
    /// Check the countermodel against axioms (1)-(14) on random samples.
    CmCheck {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Show the countermodel's violation of the separating sentence at (p, 0).
    CmWitness {
        /// Positive rational, e.g. `1` or `3/2`.
        p: String,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Resolves `@path` arguments to file contents.
fn formula_text(arg: &str) -> Result<String, String> {
    if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))
    } else {
        Ok(arg.to_string())
    }
}

fn parse_formula(arg: &str) -> Result<Formula, String> {
    let text = formula_text(arg)?;
    parse(&text).map_err(|e| e.to_string())
}

fn config(common: &Common) -> Result<CompileConfig, String> {
    if common.base < 2 {
        return Err(format!("base must be at least 2, got {}", common.base));
    }
    if common.state_cap == 0 {
        return Err("state cap must be at least 1".into());
    }
    Ok(CompileConfig {
        base: common.base,
        state_cap: common.state_cap,
        ..CompileConfig::default()
    })
}

fn parse_rational(text: &str) -> Result<BigRational, String> {
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a, b),
        None => (text, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| format!("bad numerator in `{text}`"))?;
    let den: BigInt = den.trim().parse().map_err(|_| format!("bad denominator in `{text}`"))?;
    if den.is_zero() {
        return Err("denominator must be nonzero".into());
    }
    Ok(BigRational::new(num, den))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Decide { sentence, common } => {
            let f = parse_formula(&sentence)?;
            let cfg = config(&common)?;
            let verdict = decide(&f, &cfg).map_err(|e| e.to_string())?;
            if common.json {
                println!("{}", serde_json::json!({ "verdict": verdict }));
            } else {
                println!("{}", if verdict { "TRUE" } else { "FALSE" });
            }
            Ok(ExitCode::from(u8::from(!verdict)))
        }
        Cmd::Compile { formula, common, out, dot } => {
            let f = parse_formula(&formula)?;
            let cfg = config(&common)?;
            let dfa = compile(&f, &cfg).map_err(|e| e.to_string())?;
            let json = dfa.to_json();
            match &out {
                Some(path) => std::fs::write(path, &json)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => println!("{json}"),
            }
            if let Some(path) = &dot {
                std::fs::write(path, dfa.to_dot())
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Solve { formula, common, limit } => {
            let f = parse_formula(&formula)?;
            let cfg = config(&common)?;
            let vars = free_vars(&f);
            let solutions = witness(&f, &cfg, limit).map_err(|e| e.to_string())?;
            if common.json {
                let rows: Vec<serde_json::Value> = solutions
                    .iter()
                    .map(|tuple| {
                        vars.iter()
                            .zip(tuple)
                            .map(|(v, n)| (v.clone(), serde_json::Value::String(n.to_string())))
                            .collect::<serde_json::Map<_, _>>()
                            .into()
                    })
                    .collect();
                println!("{}", serde_json::Value::Array(rows));
            } else {
                for tuple in &solutions {
                    let mut line = String::new();
                    for (v, n) in vars.iter().zip(tuple) {
                        if !line.is_empty() {
                            line.push_str(", ");
                        }
                        let _ = write!(line, "{v} = {n}");
                    }
                    println!("{line}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Count { formula, common, bound } => {
            let f = parse_formula(&formula)?;
            let cfg = config(&common)?;
            let count = count_below(&f, &cfg, &bound).map_err(|e| e.to_string())?;
            if common.json {
                println!("{}", serde_json::json!({ "count": count.to_string() }));
            } else {
                println!("{count}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Rank { order, common, domain, rank_cap } => {
            let relation = parse_formula(&order)?;
            let cfg = config(&common)?;
            if rank_cap == 0 {
                return Err("rank cap must be at least 1".into());
            }
            let spec = match domain {
                Some(d) => OrderSpec::new(relation, parse_formula(&d)?),
                None => OrderSpec::on_naturals(relation),
            }
            .map_err(|e| e.to_string())?;
            let report = rank(&spec, rank_cap, &cfg).map_err(|e| match e {
                RankError::NotLinearOrder(law) => format!("not a linear order: {law:?} fails"),
                other => other.to_string(),
            })?;
            let outcome = match &report.outcome {
                RankOutcome::FiniteRank(k) => format!("FiniteRank({k})"),
                RankOutcome::CapExceeded(cap) => format!("CapExceeded({cap})"),
                RankOutcome::InfiniteByFixpoint => "InfiniteByFixpoint".to_string(),
            };
            if common.json {
                println!(
                    "{}",
                    serde_json::json!({ "outcome": outcome, "stepStates": report.step_states })
                );
            } else {
                println!("{outcome}");
                for (alpha, states) in report.step_states.iter().enumerate() {
                    println!("  step {alpha}: {states} states");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::OrderGen { k } => {
            let f = order_formula(k).map_err(|e| e.to_string())?;
            println!("{}", render(&f));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CmCheck { samples, seed, json } => {
            if samples == 0 {
                return Err("samples must be at least 1".into());
            }
            let report = check_axioms(samples, seed);
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_table());
            }
            Ok(ExitCode::from(u8::from(!report.all_pass())))
        }
        Cmd::CmWitness { p, json } => {
            let p = parse_rational(&p)?;
            if !p.is_positive() {
                return Err("p must be positive".into());
            }
            let w = separating_counterexample(&p);
            let two_x = format!("({}, 0)", p.clone() * BigRational::from(BigInt::from(2)));
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "x": w.x.to_string(),
                        "y": w.y.to_string(),
                        "checksPassed": w.checks_passed,
                    })
                );
            } else {
                let mark = if w.checks_passed { "verified" } else { "FAILED" };
                println!("x = {}", w.x);
                println!("y = {}", w.y);
                println!("V2(x) = x: {mark}");
                println!("x < y: {mark}");
                println!("y < x + x = {two_x}: {mark}");
                println!("V2(y) = y: {mark}");
                println!(
                    "separating sentence {} in the countermodel",
                    if w.checks_passed { "fails" } else { "holds (unexpected)" }
                );
            }
            Ok(ExitCode::from(u8::from(!w.checks_passed)))
        }
    }
}

// Make sure the helper stays total on strange inputs.
#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/2").unwrap(), BigRational::new(3.into(), 2.into()));
        assert_eq!(parse_rational("5").unwrap(), BigRational::from(BigInt::from(5)));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(!parse_rational("-1/2").unwrap().is_positive());
    }

    #[test]
    fn one_is_one() {
        assert!(BigRational::one().is_positive());
    }
}

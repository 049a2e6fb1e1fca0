use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qdissect::pipeline::{pipeline, Theorem};
use qdissect::registry::{verify, verify_all, Registry};
use qdissect::report::{
    DissectionJson, ListEntryJson, ProdmakeJson, SeriesJson, SignsJson, StepJson, VerifyJson,
};
use qdissect_core::dissection::dissect;
use qdissect_core::expr::Evaluator;
use qdissect_core::prodmake::{detect_period, prodmake};
use qdissect_core::qproducts::Sign;
use qdissect_core::series::Series;
use qdissect_core::signscan::{scan, Sequence};
use qdissect_core::verify::{verify_pair, Outcome, VerifyReport};
use serde::Serialize;

/// Exact q-series: expansion, dissection, product recovery and identity checks.
#[derive(Parser)]
#[command(name = "qdissect", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Identity registry file (TOML); defaults to the built-in one.
    #[arg(long, global = true, value_name = "PATH")]
    registry: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand an expression to O(q^N).
    Expand {
        expr: String,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(i64).range(1..))]
        order: i64,
    },
    /// Split an expansion into its m-dissection slices.
    Dissect {
        expr: String,
        #[arg(long = "mod", value_parser = clap::value_parser!(u64).range(1..))]
        modulus: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(i64).range(1..))]
        order: i64,
        /// Print only this slice.
        #[arg(long)]
        slice: Option<usize>,
    },
    /// Recover prod (1 - q^n)^{a_n} from a series starting 1 + O(q).
    Prodmake {
        expr: String,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(i64).range(1..))]
        order: i64,
        /// Look for a_n depending only on n mod M.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        period: Option<u64>,
    },
    /// Check a registry identity, all of them, or LHS = RHS.
    Verify(VerifyArgs),
    /// Replay the proof steps of one of the 5-dissections.
    Pipeline {
        #[arg(long, value_parser = ["5-dis-1", "5-dis-2", "5-dis-3", "5-dis-4"])]
        theorem: String,
        #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(i64).range(1..))]
        order: i64,
    },
    /// Check the periodic sign pattern of a coefficient sequence.
    Signs {
        #[arg(long, value_parser = ["alpha", "beta", "gamma", "delta"])]
        which: String,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        order: u64,
        /// Also write (n, coefficient, residue, verdict) rows here.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// List registry identities.
    List,
}

#[derive(Args)]
struct VerifyArgs {
    /// Registry id.
    #[arg(long, conflicts_with_all = ["all", "lhs"])]
    id: Option<String>,
    /// Every registry identity.
    #[arg(long, conflicts_with = "lhs")]
    all: bool,
    lhs: Option<String>,
    #[arg(requires = "lhs")]
    rhs: Option<String>,
    /// Defaults to each identity's suggested order, or 100 for LHS RHS.
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    order: Option<i64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn registry(cli: &Cli) -> Result<Registry> {
    match &cli.registry {
        Some(p) => Registry::load(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(Registry::builtin()),
    }
}

fn json_line<T: Serialize>(out: &mut impl Write, v: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

/// Coefficients from `q^min(0, valuation)` up to the order, comma separated.
fn coefficient_list(s: &Series) -> (i64, String) {
    let start = s.valuation().min(0);
    let list = (start..s.order())
        .map(|e| s.coefficient(e).expect("below order").to_string())
        .collect::<Vec<_>>()
        .join(", ");
    (start, list)
}

/// Returns whether everything checked passed.
fn run(cli: &Cli) -> Result<bool> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Expand { expr, order } => {
            let reg = registry(cli)?;
            let s = Evaluator::new().eval(&reg.parse_expr(expr)?, *order)?;
            if cli.json {
                json_line(&mut out, &SeriesJson::from(&s))?;
            } else {
                let (start, list) = coefficient_list(&s);
                writeln!(out, "q^{start} .. O(q^{})", s.order())?;
                writeln!(out, "{list}")?;
            }
        }
        Command::Dissect { expr, modulus, order, slice } => {
            if slice.is_some_and(|l| l as u64 >= *modulus) {
                bail!("slice must be below the modulus {modulus}");
            }
            let reg = registry(cli)?;
            let s = Evaluator::new().eval(&reg.parse_expr(expr)?, *order)?;
            let d = dissect(&s, *modulus)?;
            if cli.json {
                json_line(&mut out, &DissectionJson::new(&d, *slice))?;
            } else {
                for (l, part) in d.slices().iter().enumerate() {
                    if slice.is_some_and(|want| want != l) {
                        continue;
                    }
                    let (start, list) = coefficient_list(part);
                    writeln!(out, "slice {l} (q^{start} .. O(q^{})): {list}", part.order())?;
                }
            }
        }
        Command::Prodmake { expr, order, period } => {
            let reg = registry(cli)?;
            let s = Evaluator::new().eval(&reg.parse_expr(expr)?, *order)?;
            let exps = prodmake(&s, *order)?;
            let view = period.and_then(|m| detect_period(&exps, m));
            if cli.json {
                json_line(&mut out, &ProdmakeJson::new(&exps, *period, view.as_ref()))?;
            } else {
                writeln!(out, "a_n for 1 <= n < {} (zeros omitted):", exps.order())?;
                for (n, a) in exps.nonzero() {
                    writeln!(out, "{n}\t{a}")?;
                }
                if let Some(m) = period {
                    match &view {
                        None => writeln!(out, "no period {m} found")?,
                        Some(v) => {
                            let pattern: Vec<String> = v.pattern.iter().map(ToString::to_string).collect();
                            writeln!(out, "period {m}: [{}] for r = 0..{}", pattern.join(", "), m - 1)?;
                            for (n, a) in &v.leading_exceptions {
                                writeln!(out, "exception: a_{n} = {a}")?;
                            }
                            if let Some(g) = v.signed_factors(m / 2) {
                                let parts: Vec<String> = g
                                    .iter()
                                    .map(|f| {
                                        let s = if f.sign == Sign::Minus { "-" } else { "" };
                                        format!("({s}q^{}; q^{})^{}", f.offset, m / 2, f.exponent)
                                    })
                                    .collect();
                                writeln!(out, "signed grouping: {}", parts.join(" "))?;
                            }
                        }
                    }
                }
            }
            return Ok(period.is_none() || view.is_some());
        }
        Command::Verify(args) => return run_verify(cli, args, &mut out),
        Command::Pipeline { theorem, order } => {
            let reg = registry(cli)?;
            let t = Theorem::from_id(theorem).expect("clap restricts the choices");
            let steps = pipeline(&reg, t, *order)?;
            for s in &steps {
                if cli.json {
                    json_line(&mut out, &StepJson::from(s))?;
                } else {
                    writeln!(out, "{}", verify_text(&s.report))?;
                    if let Some(d) = &s.detail {
                        writeln!(out, "    {d}")?;
                    }
                }
            }
            return Ok(steps.iter().all(|s| s.pass()));
        }
        Command::Signs { which, order, csv } => {
            let seq = Sequence::from_name(which).expect("clap restricts the choices");
            let rule = seq.rule();
            let report = scan(seq, &rule, *order);
            if let Some(path) = csv {
                write_sign_csv(path, seq, *order)?;
            }
            if cli.json {
                json_line(&mut out, &SignsJson::new(which, &rule, &report))?;
            } else {
                writeln!(
                    out,
                    "{which} = {} for n < {order}: {} violations, zeros at {:?}",
                    seq.expression(),
                    report.violations.len(),
                    report.zeros
                )?;
                if !report.violations.is_empty() {
                    writeln!(out, "n\tresidue\texpected\tcoefficient")?;
                }
                for v in &report.violations {
                    writeln!(out, "{}\t{}\t{}\t{}", v.n, v.n % rule.modulus(), v.expected.name(), v.coefficient)?;
                }
            }
            return Ok(report.pass());
        }
        Command::List => {
            let reg = registry(cli)?;
            for r in reg.records() {
                if cli.json {
                    json_line(&mut out, &ListEntryJson { id: &r.id, order: r.order, anchor: &r.anchor })?;
                } else {
                    writeln!(out, "{}\t{}\t{}", r.id, r.order, r.anchor)?;
                }
            }
        }
    }
    Ok(true)
}

fn verify_text(r: &VerifyReport) -> String {
    match &r.outcome {
        Outcome::Pass => format!("PASS {} to O(q^{})", r.id, r.order),
        Outcome::Mismatch { exponent, lhs, other, member } => {
            let side = if *member == 0 { "rhs".to_string() } else { format!("form {member}") };
            format!("FAIL {} at q^{exponent}: lhs {lhs}, {side} {other}", r.id)
        }
        Outcome::Error(e) => format!("ERROR {}: {e}", r.id),
    }
}

fn run_verify(cli: &Cli, args: &VerifyArgs, out: &mut impl Write) -> Result<bool> {
    let reg = registry(cli)?;
    let reports = if let Some(id) = &args.id {
        let rec = reg.get(id).with_context(|| format!("no identity {id:?} in the registry"))?;
        vec![verify(rec, args.order)]
    } else if args.all {
        verify_all(&reg, args.order)
    } else {
        let (Some(lhs), Some(rhs)) = (&args.lhs, &args.rhs) else {
            bail!("give --id NAME, --all, or LHS RHS");
        };
        let (l, r) = (reg.parse_expr(lhs)?, reg.parse_expr(rhs)?);
        vec![verify_pair(&mut Evaluator::new(), "LHS = RHS", &l, &r, args.order.unwrap_or(100))]
    };
    for r in &reports {
        if cli.json {
            json_line(out, &VerifyJson::from(r))?;
        } else {
            writeln!(out, "{}", verify_text(r))?;
        }
    }
    Ok(reports.iter().all(VerifyReport::pass))
}

fn write_sign_csv(path: &PathBuf, seq: Sequence, order: u64) -> Result<()> {
    let rule = seq.rule();
    let s = seq.series(order as i64);
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["n", "coefficient", "residue", "verdict"])?;
    for n in 0..order {
        let c = s.coefficient(n as i64)?;
        let expected = rule.expected(n);
        let verdict = if expected.admits(&c) { "ok" } else { "violation" };
        w.write_record([n.to_string(), c.to_string(), (n % rule.modulus()).to_string(), verdict.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

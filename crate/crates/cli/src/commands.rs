//! The `voaforge` command surface. [`run`] returns the text that the binary
//! prints, so commands can be exercised in-process.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use voaforge::classical::DetIndex;
use voaforge::decouple::{find_decoupling, promotion_chain, reconstruct_with, ReconstructOptions};
use voaforge::fock::FockState;
use voaforge::scratch::Scratch;
use voaforge::zhu::{commutator_in_o, ZhuContext};
use voaforge::{NOPoly, Q};

use crate::eval::{eval_poly, eval_state};
use crate::expr::{rational_string, Context, Expr};
use crate::format::{decomposition_json, decomposition_text, json_string, poly_json, poly_text, state_json, state_text};
use crate::parse::parse;
use crate::suites::{run_suite, SUITES};

#[derive(Parser, Debug)]
#[command(name = "voaforge", version, about = "Exact OPE and invariant-theory computations in the rank-n Heisenberg vertex algebra")]
pub struct Cli {
    /// Number of worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Emit {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Singular part of the OPE of A with B: every nonzero A ∘_m B, m >= 0.
    Ope {
        #[arg(long)]
        n: usize,
        a: String,
        b: String,
        #[arg(long, value_enum, default_value_t)]
        emit: Emit,
    },
    /// A single circle product A ∘_m B (m may be negative).
    Circle {
        #[arg(long)]
        n: usize,
        #[arg(short = 'm', allow_negative_numbers = true)]
        m: i64,
        a: String,
        b: String,
        #[arg(long, value_enum, default_value_t)]
        emit: Emit,
    },
    /// Evaluate the expression in FILE ("-" for stdin) as a state of H(n).
    Eval {
        #[arg(long)]
        n: usize,
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        emit: Emit,
    },
    /// Reconstruct the minimal relation and report its remainder.
    Remainder {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t)]
        emit: Emit,
        /// Required for n >= 3.
        #[arg(long)]
        long_running: bool,
        /// Also print every layer of the decomposition.
        #[arg(long)]
        decomposition: bool,
        /// Report progress on stderr.
        #[arg(long)]
        progress: bool,
    },
    /// Express j^{2r} as a normally ordered polynomial in lower generators.
    Decouple {
        #[arg(long)]
        n: usize,
        /// The weight label 2r of the generator to eliminate.
        #[arg(long)]
        target: u32,
        /// Build the relation by iterating j^2 ∘_1 from the first decoupled generator.
        #[arg(long)]
        promote: bool,
        #[arg(long, value_enum, default_value_t)]
        emit: Emit,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        long_running: bool,
    },
    /// Parse FILE and print its canonical form, or only validate it with --check.
    Parse {
        #[arg(long)]
        check: bool,
        file: PathBuf,
    },
    /// Test whether [A, B] lies in the truncated O-span of H(n)^{O(n)}.
    ZhuComm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_weight: usize,
        a: String,
        b: String,
    },
}

/// What a command prints, and whether it should exit successfully.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, success: true }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match cli.workers {
        Some(0) => bail!("--workers must be at least 1"),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build()?;
            pool.install(|| dispatch(&cli.command))
        }
        None => dispatch(&cli.command),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn check_rank(n: usize) -> Result<()> {
    if n == 0 {
        bail!("rank must be at least 1");
    }
    Ok(())
}

enum Pair {
    States(FockState<Q>, FockState<Q>),
    Polys(NOPoly, NOPoly),
}

fn operands(a: &str, b: &str, n: usize) -> Result<Pair> {
    let ea = parse(a).context("in A")?;
    let eb = parse(b).context("in B")?;
    match (ea.context(), eb.context()) {
        (Some(x), Some(y)) if x != y => bail!("A and B live in different contexts"),
        (Some(Context::NoPoly), _) | (_, Some(Context::NoPoly)) => Ok(Pair::Polys(eval_poly(&ea, n)?, eval_poly(&eb, n)?)),
        _ => Ok(Pair::States(eval_state(&ea, n)?, eval_state(&eb, n)?)),
    }
}

fn emit_state(s: &FockState<Q>, emit: Emit) -> String {
    match emit {
        Emit::Text => format!("{}\n", state_text(s)),
        Emit::Json => format!("{}\n", json_string(&state_json(s))),
    }
}

fn emit_poly(p: &NOPoly, emit: Emit) -> String {
    match emit {
        Emit::Text => format!("{}\n", poly_text(p)),
        Emit::Json => format!("{}\n", json_string(&poly_json(p))),
    }
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Ope { n, a, b, emit } => {
            check_rank(*n)?;
            let parts: Vec<(i64, String, serde_json::Value)> = match operands(a, b, *n)? {
                Pair::States(x, y) => {
                    x.singular_part(&y)?.into_iter().map(|(m, s)| (m, state_text(&s), state_json(&s))).collect()
                }
                Pair::Polys(x, y) => {
                    let top = x.weights().into_iter().max().unwrap_or(0) + y.weights().into_iter().max().unwrap_or(0);
                    (0..top as i64)
                        .rev()
                        .map(|m| (m, x.circle(&y, m, *n)))
                        .filter(|(_, p)| !p.is_zero())
                        .map(|(m, p)| (m, poly_text(&p), poly_json(&p)))
                        .collect()
                }
            };
            Ok(Outcome::ok(match emit {
                Emit::Text => parts.iter().map(|(m, t, _)| format!("# m = {m}\n{t}\n")).collect(),
                Emit::Json => {
                    let v: Vec<_> = parts.into_iter().map(|(m, _, j)| json!({ "m": m, "value": j })).collect();
                    format!("{}\n", json_string(&json!(v)))
                }
            }))
        }
        Command::Circle { n, m, a, b, emit } => {
            check_rank(*n)?;
            Ok(Outcome::ok(match operands(a, b, *n)? {
                Pair::States(x, y) => emit_state(&x.circle(&y, *m)?, *emit),
                Pair::Polys(x, y) => emit_poly(&x.circle(&y, *m, *n), *emit),
            }))
        }
        Command::Eval { n, file, emit } => {
            check_rank(*n)?;
            let e = parse(&read_input(file)?)?;
            let s = match e.context() {
                Some(Context::NoPoly) => eval_poly(&e, *n)?.eval(*n)?,
                _ => eval_state(&e, *n)?,
            };
            Ok(Outcome::ok(emit_state(&s, *emit)))
        }
        Command::Remainder { n, emit, long_running, decomposition, progress } => {
            check_rank(*n)?;
            if *n >= 3 && !long_running {
                bail!("the n = {n} reconstruction is expensive; pass --long-running to run it");
            }
            let report = |msg: &str| eprintln!("{msg}");
            let opts = ReconstructOptions {
                scratch: Some(Scratch::from_env()),
                progress: if *progress { Some(&report) } else { None },
                ..Default::default()
            };
            let d = reconstruct_with::<Q>(&DetIndex::minimal(*n), *n, &opts)?;
            Ok(Outcome::ok(match emit {
                Emit::Text => {
                    let mut out = String::new();
                    if *decomposition {
                        out.push_str(&decomposition_text(&d));
                    }
                    out.push_str(&format!("n = {n}, weight {}: remainder {}\n", d.weight, rational_string(&d.remainder)));
                    out
                }
                Emit::Json => {
                    let mut v = json!({ "n": n, "remainder": rational_string(&d.remainder), "weight": d.weight });
                    if *decomposition {
                        v["decomposition"] = decomposition_json(&d);
                    }
                    format!("{}\n", json_string(&v))
                }
            }))
        }
        Command::Decouple { n, target, promote, emit } => {
            check_rank(*n)?;
            if target % 2 == 1 {
                bail!("--target is the even weight label 2r, got {target}");
            }
            let r = target / 2;
            let p = if *promote { promotion_chain::<Q>(*n, r)? } else { find_decoupling::<Q>(*n, r)? };
            Ok(Outcome::ok(match emit {
                Emit::Text => format!("# j{{{target}}} in H({n}) equals\n{}\n", poly_text(&p)),
                Emit::Json => format!("{}\n", json_string(&json!({ "n": n, "target": target, "relation": poly_json(&p) }))),
            }))
        }
        Command::Verify { suite, n, long_running } => {
            let checks = run_suite(suite, *n, *long_running)?;
            let text = checks.iter().map(|c| format!("{c}\n")).collect();
            Ok(Outcome { text, success: checks.iter().all(|c| c.pass) })
        }
        Command::Parse { check, file } => {
            let text = read_input(file)?;
            let e = parse(&text).map_err(|err| anyhow::anyhow!("{}: {err}", file.display()))?;
            let canonical = e.to_string();
            let again = parse(&canonical)?;
            if again != e {
                bail!("internal: canonical form does not parse back to the same tree");
            }
            Ok(Outcome::ok(if *check { format!("ok: {}\n", describe(&e)) } else { format!("{canonical}\n") }))
        }
        Command::ZhuComm { n, max_weight, a, b } => {
            check_rank(*n)?;
            let (x, y) = match operands(a, b, *n)? {
                Pair::States(x, y) => (x, y),
                Pair::Polys(x, y) => (x.eval(*n)?, y.eval(*n)?),
            };
            let ctx = ZhuContext::<Q>::new(*n, *max_weight)?;
            let rep = commutator_in_o(&x, &y, &ctx)?;
            Ok(Outcome {
                text: format!(
                    "commutator: {}\nresidue identity: {}\nspan dimension at cutoff {max_weight}: {}\n",
                    rep.commutative,
                    rep.identity,
                    ctx.span_dimension()
                ),
                success: rep.commutative.is_certified() && rep.identity.is_certified(),
            })
        }
    }
}

fn describe(e: &Expr) -> String {
    let context = match e.context() {
        Some(Context::Fock) => "state expression",
        Some(Context::NoPoly) => "normally ordered expression",
        None => "scalar expression",
    };
    match e {
        Expr::Sum(ts) => format!("{context} with {} terms", ts.len()),
        _ => format!("{context} with 1 term"),
    }
}

//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on domain errors (bad tree, illegal script,
//! refused size), 2 on usage errors.

use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::bounds::{self, DistanceReport, Script};
use crate::decompose;
use crate::exact::{self, ExactConfig, MoveGraph};
use crate::generators;
use crate::moves::MoveSet;
use crate::par;
use crate::tree::{Chain, ShapeKey, Side, Tree, TreeError};

#[derive(Debug, Parser)]
#[command(name = "chainrot", version, about = "Chain rotations on infix-labelled binary trees")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// How to read tree arguments.
    #[arg(long, global = true, value_enum, default_value_t = InputKind::Auto)]
    pub input: InputKind,
    /// Worker threads for the exhaustive searches.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    Auto,
    Literal,
    Bits,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Moves {
    Rot,
    Crot,
}

impl From<Moves> for MoveSet {
    fn from(m: Moves) -> Self {
        match m {
            Moves::Rot => MoveSet::Rot,
            Moves::Crot => MoveSet::Crot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    ChainLeft,
    ChainRight,
    Figure4,
    Random,
    Rank,
}

/// Tree arguments accept a literal such as `2(1,·)`, a shape bitstring, the
/// JSON form, or `@path` to read any of these from a file.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a tree is a valid infix-labelled binary tree.
    Validate {
        #[arg(long)]
        tree: String,
    },
    /// Maximal left and right chains of a tree.
    Chains {
        #[arg(long)]
        tree: String,
    },
    /// Lower and upper bounds on the chain distance of a pair.
    Bounds {
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
        /// Also compute the exact chain distance.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        max_n: Option<usize>,
    },
    /// Constructive script from S to T, or check a script with --check.
    Transform {
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        t: Option<String>,
        /// Verify a script instead of producing one.
        #[arg(long)]
        check: bool,
        /// Script to check: a file path, `-` for stdin, or inline text.
        #[arg(long)]
        script: Option<String>,
    },
    /// Exact distance by exhaustive search.
    Exact {
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
        #[arg(long, value_enum, default_value_t = Moves::Crot)]
        moves: Moves,
        #[arg(long)]
        max_n: Option<usize>,
    },
    /// Equivalent edges of a pair and the split into independent pairs.
    Decompose {
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
    },
    /// Generate trees from a named family.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Left-chain count of S for the figure4 family.
        #[arg(long)]
        c: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random trees.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Rank for the rank family (decimal).
        #[arg(long)]
        rank: Option<String>,
    },
    /// Check every pair of shapes of size n against the bounds.
    Audit {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Largest exact distance over all pairs of shapes of size n.
    Diameter {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Moves::Crot)]
        moves: Moves,
        #[arg(long)]
        max_n: Option<usize>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Domain(e.to_string())
    }
}

type CliResult = Result<Output, CliError>;

enum Output {
    Json(Value),
    Text(String),
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    let threads = cli.threads;
    match par::with_threads(threads, || dispatch(&cli)) {
        Ok(Output::Json(v)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap());
            0
        }
        Ok(Output::Text(s)) => {
            let _ = write!(out, "{s}");
            if !s.ends_with('\n') {
                let _ = writeln!(out);
            }
            0
        }
        Err(CliError::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            2
        }
    }
}

fn read_arg(raw: &str) -> Result<String, CliError> {
    match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Domain(format!("cannot read {path}: {e}"))),
        None => Ok(raw.to_string()),
    }
}

fn parse_tree(raw: &str, kind: InputKind) -> Result<Tree, CliError> {
    let text = read_arg(raw)?;
    let text = text.trim();
    let tree = match kind {
        InputKind::Auto => Tree::parse_any(text),
        InputKind::Literal => text.parse(),
        InputKind::Bits => text.parse::<ShapeKey>().and_then(|k| k.to_tree()),
        InputKind::Json => Tree::from_json(text),
    };
    tree.map_err(|e: TreeError| CliError::Domain(e.to_string()))
}

fn tree_json(t: &Tree) -> Value {
    let j = t.to_json();
    json!({
        "literal": t.to_string(),
        "bits": t.shape_key().to_string(),
        "n": j.n,
        "root": j.root,
        "left": j.left,
        "right": j.right,
    })
}

fn chain_json(c: &Chain) -> Value {
    json!({
        "chain": c.to_string(),
        "top": c.top,
        "bottom": c.bottom,
        "vertices": c.vertices,
        "maximal": c.maximal,
    })
}

fn script_json(sc: &Script) -> Value {
    json!({
        "length": sc.len(),
        "start": sc.start.to_string(),
        "end": sc.end.to_string(),
        "moves": sc.moves.iter().map(|m| m.to_line()).collect::<Vec<_>>(),
        "script": sc.to_string(),
    })
}

fn config(max_n: Option<usize>) -> ExactConfig {
    let cfg = ExactConfig::default();
    match max_n {
        Some(m) => cfg.with_max_n(m),
        None => cfg,
    }
}

fn no_dot(format: Format) -> Result<(), CliError> {
    if format == Format::Dot {
        return Err(CliError::Usage(
            "--format dot is only available for audit and diameter".into(),
        ));
    }
    Ok(())
}

fn dot_graph(n: usize, set: MoveSet, cfg: &ExactConfig) -> CliResult {
    if n > 7 {
        return Err(CliError::Domain(format!(
            "DOT output is limited to n <= 7 (got n={n})"
        )));
    }
    if n == 0 {
        return Err(CliError::Domain("n must be at least 1".into()));
    }
    Ok(Output::Text(MoveGraph::build(n, set, cfg.exec).to_dot()))
}

fn dispatch(cli: &Cli) -> CliResult {
    let fmt = cli.format;
    let tree = |raw: &str| parse_tree(raw, cli.input);
    let text_or = |text: String, value: Value| {
        Ok(if fmt == Format::Text {
            Output::Text(text)
        } else {
            Output::Json(value)
        })
    };
    match &cli.command {
        Command::Validate { tree: raw } => {
            no_dot(fmt)?;
            let t = tree(raw)?;
            let mut v = tree_json(&t);
            v["valid"] = json!(true);
            text_or(format!("valid: {t}"), v)
        }
        Command::Chains { tree: raw } => {
            no_dot(fmt)?;
            let t = tree(raw)?;
            let (l, r) = t.chain_counts();
            let left = t.maximal_chains(Side::Left);
            let right = t.maximal_chains(Side::Right);
            let names = |cs: &[Chain]| {
                cs.iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            text_or(
                format!(
                    "L={l} R={r}\nleft: {}\nright: {}",
                    names(&left),
                    names(&right)
                ),
                json!({
                    "L": l,
                    "R": r,
                    "n": t.n(),
                    "left": left.iter().map(chain_json).collect::<Vec<_>>(),
                    "right": right.iter().map(chain_json).collect::<Vec<_>>(),
                }),
            )
        }
        Command::Bounds {
            s,
            t,
            exact,
            max_n,
        } => {
            no_dot(fmt)?;
            let (s, t) = (tree(s)?, tree(t)?);
            let mut report = DistanceReport::bounds(&s, &t)?;
            if *exact {
                let (d, sc) = exact::distance(&s, &t, MoveSet::Crot, &config(*max_n))?;
                report = report.with_exact(d, sc);
            }
            let text = format!(
                "lower={} upper={} exact={} e={} rotation_lower={}",
                report.lower,
                report.upper,
                report.exact.map_or("-".into(), |d| d.to_string()),
                report.e,
                report.rotation_lower
            );
            text_or(text, serde_json::to_value(&report).unwrap())
        }
        Command::Transform {
            s,
            t,
            check,
            script,
        } => {
            no_dot(fmt)?;
            if *check {
                let raw = script
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("--check needs --script".into()))?;
                let sc = load_script(raw)?;
                let start = match s {
                    Some(s) => tree(s)?,
                    None => sc.start.to_tree()?,
                };
                let end = match t {
                    Some(t) => tree(t)?,
                    None => sc.end.to_tree()?,
                };
                bounds::verify_script(&start, &sc, &end)?;
                return text_or(
                    format!("valid: {} moves", sc.len()),
                    json!({ "valid": true, "length": sc.len() }),
                );
            }
            let (Some(s), Some(t)) = (s, t) else {
                return Err(CliError::Usage("transform needs --s and --t".into()));
            };
            let (s, t) = (tree(s)?, tree(t)?);
            let sc = bounds::transform_script(&s, &t)?;
            text_or(sc.to_string(), script_json(&sc))
        }
        Command::Exact { s, t, moves, max_n } => {
            no_dot(fmt)?;
            let (s, t) = (tree(s)?, tree(t)?);
            let (d, sc) = exact::distance(&s, &t, (*moves).into(), &config(*max_n))?;
            let mut v = script_json(&sc);
            v["distance"] = json!(d);
            v["moveset"] = json!(MoveSet::from(*moves).to_string());
            v["n"] = json!(s.n());
            text_or(format!("distance={d}\n{sc}"), v)
        }
        Command::Decompose { s, t } => {
            no_dot(fmt)?;
            let (s, t) = (tree(s)?, tree(t)?);
            let edges = decompose::equivalent_edges(&s, &t)?;
            let parts = decompose::split(&s, &t)?;
            let mut text = format!("e={}\n", edges.len());
            for p in &parts {
                text.push_str(&format!(
                    "{} {} | {} {:?}\n",
                    p.interval, p.s_part, p.t_part, p.label_map
                ));
            }
            text_or(
                text,
                json!({
                    "e": edges.len(),
                    "equivalent_edges": edges,
                    "split": parts,
                }),
            )
        }
        Command::Generate {
            family,
            n,
            c,
            seed,
            count,
            rank,
        } => {
            no_dot(fmt)?;
            let n = *n;
            let trees: Vec<Tree> = match family {
                Family::ChainLeft => vec![generators::complete_chain(n, Side::Left)?],
                Family::ChainRight => vec![generators::complete_chain(n, Side::Right)?],
                Family::Random => {
                    if n == 0 {
                        return Err(CliError::Domain("n must be at least 1".into()));
                    }
                    (0..*count as u64)
                        .map(|i| generators::random_tree(n, seed.wrapping_add(i)))
                        .collect()
                }
                Family::Rank => {
                    let raw = rank
                        .as_deref()
                        .ok_or_else(|| CliError::Usage("--family rank needs --rank".into()))?;
                    let r: BigUint = raw
                        .parse()
                        .map_err(|_| CliError::Usage(format!("bad rank `{raw}`")))?;
                    vec![generators::tree_of_rank(n, &r).ok_or_else(|| {
                        CliError::Domain(format!("rank {r} out of range for n={n}"))
                    })?]
                }
                Family::Figure4 => {
                    let c = c.ok_or_else(|| CliError::Usage("figure4 needs --c".into()))?;
                    let (s, t) = generators::figure4_pair(n, c)?;
                    let lb = bounds::chain_lower_bound(&s, &t)?;
                    let ub = bounds::chain_upper_bound(&s, &t)?;
                    return text_or(
                        format!("{s}\n{t}"),
                        json!({
                            "s": tree_json(&s),
                            "t": tree_json(&t),
                            "lower": lb,
                            "upper": ub,
                        }),
                    );
                }
            };
            let text = trees
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            let value = if trees.len() == 1 {
                tree_json(&trees[0])
            } else {
                Value::Array(trees.iter().map(tree_json).collect())
            };
            text_or(text, value)
        }
        Command::Audit { n, max_n, seed } => {
            let mut cfg = config(*max_n);
            cfg.seed = *seed;
            if fmt == Format::Dot {
                exact::audit(*n, &cfg)?;
                return dot_graph(*n, MoveSet::Crot, &cfg);
            }
            let report = exact::audit(*n, &cfg)?;
            let text = format!(
                "n={} pairs={} violations={} max C={} max D={} max upper={} additive={}/{}",
                report.n,
                report.pairs,
                report.violation_count,
                report.max_chain_distance,
                report.max_rotation_distance,
                report.max_upper_bound,
                report.additivity.additive,
                report.additivity.pairs_with_equivalent_edges
            );
            text_or(text, serde_json::to_value(&report).unwrap())
        }
        Command::Diameter { n, moves, max_n } => {
            let cfg = config(*max_n);
            let d = exact::diameter(*n, (*moves).into(), &cfg)?;
            if fmt == Format::Dot {
                return dot_graph(*n, (*moves).into(), &cfg);
            }
            text_or(
                format!("diameter={} s={} t={}", d.diameter, d.s, d.t),
                json!({
                    "n": d.n,
                    "moveset": d.moves.to_string(),
                    "diameter": d.diameter,
                    "s": tree_json(&d.s),
                    "t": tree_json(&d.t),
                    "shapes": d.shapes,
                    "edges": d.edges,
                }),
            )
        }
    }
}

fn load_script(raw: &str) -> Result<Script, CliError> {
    let text = if raw == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Domain(format!("cannot read stdin: {e}")))?;
        buf
    } else if let Some(path) = raw.strip_prefix('@') {
        read_arg(&format!("@{path}"))?
    } else if std::path::Path::new(raw).is_file() {
        read_arg(&format!("@{raw}"))?
    } else {
        raw.to_string()
    };
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed)?;
        let inner = v["script"]
            .as_str()
            .ok_or_else(|| CliError::Domain("JSON input has no `script` field".into()))?;
        return Ok(inner.parse()?);
    }
    Ok(text.parse()?)
}

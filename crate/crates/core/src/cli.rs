//! Command-line front end. Every machine-readable output carries a
//! `schema_version` field.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::arith::Level;
use crate::autbound::{
    bound_pipeline_with, survey, BoundReport, PointCounts, SurveyOptions, SCHEMA_VERSION,
};
use crate::cdgraph::{
    desingularize, minimal_model_graph, raw_model, reduction_point_count, stable_model_graph,
    BadFiber,
};
use crate::error::{invalid, Error, Result};
use crate::quaternion::IdealClassSet;
use crate::shimura::{eichler_class_number, fixed_point_count, CurveInvariants};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "shimura-aut",
    version,
    about = "Bounds on the automorphism group of Shimura curves X₀(D,N)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Raw,
    Desingularized,
    Minimal,
    Stable,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper bound on s for one level, with the criteria that produced it.
    Bound {
        #[arg(long = "D")]
        d: u64,
        #[arg(long = "N", default_value_t = 1)]
        n: u64,
        /// CSV file with columns D,N,ell,count.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Dual graph of the special fiber at p | D.
    Graph {
        #[arg(long = "D")]
        d: u64,
        #[arg(long = "N", default_value_t = 1)]
        n: u64,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = Model::Raw)]
        model: Model,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
    /// Ideal classes, Brandt matrix at p and Atkin-Lehner permutations for
    /// the definite algebra of discriminant D/p.
    Brandt {
        #[arg(long = "D")]
        d: u64,
        #[arg(long = "N", default_value_t = 1)]
        n: u64,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Bounds for every D up to --max-D at fixed N.
    Survey {
        #[arg(long = "max-D")]
        max_d: u64,
        #[arg(long = "N", default_value_t = 1)]
        n: u64,
        /// Worker threads.
        #[arg(long, env = "SHIMURA_JOBS")]
        jobs: Option<usize>,
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Genus, elliptic points, Atkin-Lehner fixed points and class numbers.
    Invariants {
        #[arg(long = "D")]
        d: u64,
        #[arg(long = "N", default_value_t = 1)]
        n: u64,
        /// Primes ℓ ∤ DN at which to count points of the reduction.
        #[arg(long, value_delimiter = ',')]
        ell: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn level(d: u64, n: u64) -> Result<Level> {
    Level::new(d, n)
}

fn require(format: Format, allowed: &[Format], command: &str) -> Result<()> {
    if !allowed.contains(&format) {
        return Err(invalid!("{command} does not support --format {format:?}"));
    }
    Ok(())
}

fn load_points(path: &Option<PathBuf>) -> Result<PointCounts> {
    match path {
        None => Ok(PointCounts::default()),
        Some(p) => {
            let file = std::fs::File::open(p).map_err(|e| invalid!("{}: {e}", p.display()))?;
            PointCounts::from_csv(file)
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes") + "\n"
}

/// CSV summary of a survey, one row per level.
pub fn survey_csv(reports: &[BoundReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["D", "N", "genus", "r", "s_upper", "status", "decided_by"])
        .expect("csv write");
    for rep in reports {
        let decided = rep
            .deciding_entry()
            .map(|e| e.criterion.to_string())
            .unwrap_or_default();
        w.write_record([
            rep.d.to_string(),
            rep.n.to_string(),
            rep.genus.to_string(),
            rep.r.to_string(),
            rep.s_upper.to_string(),
            rep.status.to_string(),
            decided,
        ])
        .expect("csv write");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("csv is utf-8")
}

/// Run a parsed command, returning what it prints.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Bound {
            d,
            n,
            points,
            format,
        } => {
            require(*format, &[Format::Text, Format::Json], "bound")?;
            let level = level(*d, *n)?;
            let rep = bound_pipeline_with(&level, &load_points(points)?)?;
            Ok(match format {
                Format::Json => pretty(&serde_json::to_value(&rep).expect("report serializes")),
                _ => rep.to_text(),
            })
        }
        Command::Graph {
            d,
            n,
            p,
            model,
            format,
        } => {
            require(*format, &[Format::Dot, Format::Json], "graph")?;
            let level = level(*d, *n)?;
            let fiber = BadFiber::new(&level, *p)?;
            let g = CurveInvariants::new(&level)?.genus;
            let m = match model {
                Model::Raw => raw_model(&fiber.graph),
                Model::Desingularized => desingularize(&fiber.graph),
                Model::Minimal => minimal_model_graph(&fiber.graph, g)?,
                Model::Stable => stable_model_graph(&fiber.graph, g)?,
            };
            Ok(match format {
                Format::Json => {
                    let mut v = m.graph.to_json();
                    v["schema_version"] = json!(SCHEMA_VERSION);
                    v["model"] = serde_json::to_value(m.kind).expect("model kind serializes");
                    pretty(&v)
                }
                _ => m.graph.to_dot(),
            })
        }
        Command::Brandt { d, n, p, format } => {
            require(*format, &[Format::Text, Format::Json], "brandt")?;
            let level = level(*d, *n)?;
            if !level.d_primes().contains(p) {
                return Err(invalid!("p = {p} does not divide D = {d}"));
            }
            let classes = IdealClassSet::new(d / p, *n)?;
            let m = classes.brandt_matrix(*p)?;
            let ws = classes.atkin_lehner_all()?;
            Ok(match format {
                Format::Json => pretty(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "disc": d / p,
                    "level": n,
                    "p": p,
                    "weights": classes.weights(),
                    "matrix": m.entries,
                    "atkin_lehner": ws.iter().map(|w| json!({"q": w.q, "perm": w.perm})).collect::<Vec<_>>(),
                })),
                _ => {
                    let mut out = format!(
                        "disc {}, level {}, {} classes, weights {:?}\n",
                        d / p,
                        n,
                        classes.len(),
                        classes.weights()
                    );
                    out.push_str(&format!("Brandt matrix at {p}:\n"));
                    for row in &m.entries {
                        let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
                        out.push_str(&format!("  [{} ]\n", cells.join("")));
                    }
                    for w in &ws {
                        let perm: Vec<String> =
                            w.perm.iter().map(|i| (i + 1).to_string()).collect();
                        out.push_str(&format!("W_{}: {}\n", w.q, perm.join(" ")));
                    }
                    out
                }
            })
        }
        Command::Survey {
            max_d,
            n,
            jobs,
            points,
            format,
        } => {
            require(
                *format,
                &[Format::Text, Format::Json, Format::Csv],
                "survey",
            )?;
            let options = SurveyOptions {
                points: load_points(points)?,
                jobs: *jobs,
            };
            let reports = survey(*max_d, *n, &options)?;
            Ok(match format {
                Format::Json => {
                    pretty(&json!({"schema_version": SCHEMA_VERSION, "reports": reports}))
                }
                Format::Csv => survey_csv(&reports),
                _ => reports.iter().map(BoundReport::to_text).collect(),
            })
        }
        Command::Invariants { d, n, ell, format } => {
            require(*format, &[Format::Text, Format::Json], "invariants")?;
            let level = level(*d, *n)?;
            let inv = CurveInvariants::new(&level)?;
            let mut fixed = BTreeMap::new();
            for m in level.atkin_lehner_indices() {
                fixed.insert(m, fixed_point_count(&level, m)?);
            }
            let mut classes = BTreeMap::new();
            for &p in level.d_primes() {
                classes.insert(p, eichler_class_number(level.d() / p, level.n())?);
            }
            let mut counts = BTreeMap::new();
            for &l in ell {
                let p = level.d_primes()[0];
                counts.insert(l, reduction_point_count(&level, p, l)?);
            }
            Ok(match format {
                Format::Json => pretty(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "D": d,
                    "N": n,
                    "r": level.r(),
                    "genus": inv.genus,
                    "e2": inv.e2,
                    "e3": inv.e3,
                    "fixed_points": fixed,
                    "class_numbers": classes,
                    "point_counts": counts,
                })),
                _ => {
                    let mut out = format!(
                        "{level}: r = {}, genus {}, e2 = {}, e3 = {}\n",
                        level.r(),
                        inv.genus,
                        inv.e2,
                        inv.e3
                    );
                    for (m, c) in &fixed {
                        out.push_str(&format!("  fixed points of ω_{m}: {c}\n"));
                    }
                    for (p, h) in &classes {
                        out.push_str(&format!("  h(D/{p}, N) = {h}\n"));
                    }
                    for (l, c) in &counts {
                        out.push_str(&format!("  |M₀(F_{l})| = {c}\n"));
                    }
                    out
                }
            })
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_) => EXIT_USAGE,
        Error::Invariant(_) => EXIT_INVARIANT,
    }
}

/// Parse `args`, run, and write to `out`/`err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

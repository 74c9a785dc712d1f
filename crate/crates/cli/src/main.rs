//! `graphsimplex`: reports, verification sweeps, exhaustive Max-Cut and mesh
//! export for graphs given as edge lists.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 disconnected graph,
//! 3 size guard, 4 verification failure.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphsimplex::{
    build_report, embed, eigendecompose, laplacian, max_cut_bruteforce, mesh_text, min_altitude_cut,
    parse_edge_list, render_json, round_significant, verification_document, verify, verify_corpus, Analysis,
    CutSearchResult, Error, ReportOptions, SimplexKind, Verification, WeightedGraph, DEFAULT_TOLERANCE,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "graphsimplex", version, about = "Graph to simplex geometry, with identity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Emit JSON (the only format; accepted for scripts that pass it).
    #[arg(long, default_value_t = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the full report for a graph.
    Report {
        /// Edge-list file, or `-` for standard input.
        input: PathBuf,
        /// Include every cut (2^(N-1) - 1 subsets, N <= 20) instead of singletons.
        #[arg(long)]
        exhaustive_cuts: bool,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Run every identity check and print the worst residual of each.
    Verify {
        /// Edge-list file, or `-` for standard input.
        #[arg(required_unless_present = "corpus", conflicts_with = "corpus")]
        input: Option<PathBuf>,
        /// Check every connected labeled graph on this many nodes instead.
        #[arg(long)]
        corpus: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Exhaustive Max-Cut next to the minimum-altitude search.
    Maxcut {
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Write the original and inverse tetrahedra of a 4-node graph.
    Export {
        input: PathBuf,
        /// Output prefix; writes `<prefix>-original.mesh` and `<prefix>-inverse.mesh`.
        #[arg(long)]
        mesh: PathBuf,
    },
}

enum Failure {
    Input(String),
    Graph(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Graph(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Graph(e) => match e {
                Error::Disconnected { .. } => 2,
                Error::SizeGuard { .. } | Error::NodeCount { .. } => 3,
                Error::Verification(_) | Error::Spectral(_) => 4,
                _ => 1,
            },
            Failure::Verification(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) | Failure::Verification(m) => f.write_str(m),
            Failure::Graph(e) => write!(f, "{e}"),
        }
    }
}

fn read_graph(path: &Path) -> Result<WeightedGraph, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    Ok(parse_edge_list(&text)?)
}

fn check_verdict(v: &Verification) -> Result<(), Failure> {
    match v.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure::Verification(format!(
            "identity {} failed: max residual {:e} exceeds tolerance {:e}",
            c.name, c.max_residual, v.tolerance
        ))),
    }
}

fn check_tolerance(t: f64) -> Result<(), Failure> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Failure::Input(format!("tolerance must be finite and non-negative, got {t}")))
    }
}

fn search_json(r: &CutSearchResult) -> serde_json::Value {
    json!({
        "subset": r.best_subset.members().collect::<Vec<_>>(),
        "value": round_significant(r.best_value),
        "evaluated": r.evaluated_count,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Report {
            input,
            exhaustive_cuts,
            tolerance,
            output: _,
        } => {
            check_tolerance(tolerance)?;
            let g = read_graph(&input)?;
            let doc = build_report(
                &g,
                ReportOptions {
                    exhaustive_cuts,
                    tolerance,
                },
            )?;
            print!("{}", doc.render());
            check_verdict(&doc.verification)
        }
        Command::Verify {
            input,
            corpus,
            tolerance,
            output: _,
        } => {
            check_tolerance(tolerance)?;
            let verification = match (input, corpus) {
                (_, Some(n)) => {
                    let (count, v) = verify_corpus(n, tolerance)?;
                    eprintln!("checked {count} graphs on {n} nodes");
                    v
                }
                (Some(path), None) => verify(&Analysis::new(&read_graph(&path)?)?, tolerance)?,
                (None, None) => unreachable!("clap requires an input or --corpus"),
            };
            print!("{}", verification_document(&verification));
            check_verdict(&verification)
        }
        Command::Maxcut { input, output: _ } => {
            let g = read_graph(&input)?;
            let cut = max_cut_bruteforce(&g)?;
            let d = eigendecompose(&laplacian(&g))?;
            let alt = min_altitude_cut(&embed(&d, SimplexKind::Inverse))?;
            let agree = cut.best_subset == alt.best_subset;
            print!(
                "{}",
                render_json(&json!({
                    "max_cut": search_json(&cut),
                    "min_altitude": search_json(&alt),
                    "subsets_agree": agree,
                }))
            );
            if agree {
                Ok(())
            } else {
                Err(Failure::Verification(
                    "max-cut and minimum-altitude searches chose different subsets".into(),
                ))
            }
        }
        Command::Export { input, mesh } => {
            let g = read_graph(&input)?;
            let d = eigendecompose(&laplacian(&g))?;
            for kind in [SimplexKind::Original, SimplexKind::Inverse] {
                let text = mesh_text(&embed(&d, kind))?;
                let mut name = mesh.clone().into_os_string();
                name.push(format!("-{kind}.mesh"));
                let path = PathBuf::from(name);
                fs::write(&path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

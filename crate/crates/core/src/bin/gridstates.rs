//! Batch front end: state construction, PPT checks, Schmidt-number proofs,
//! concentration chains, extremality, and witness bounds over JSON fixtures.

use clap::{Args, Parser, Subcommand};
use gridstates::concentrate::build_family;
use gridstates::dps::{mu_upper, SolverConfig};
use gridstates::extremal::{build_witness, extremality_test, range_pair};
use gridstates::gridstate::GridHypergraph;
use gridstates::linalg::{Bipartition, CMat, DensityMatrix};
use gridstates::optimize::seesaw;
use gridstates::report::{
    bundled_hypergraph, fmt_f64, render_table, report_all, state_report, state_to_json,
    ReportConfig, BUNDLED,
};
use gridstates::snprover::{prove_sn_exceeds, ProveOutcome, ProverConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gridstates", version, about = "Grid states: PPT, Schmidt number, witnesses")]
struct Cli {
    /// worker threads for multi-start optimization (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// numerical rank / eigenvalue tolerance
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StateArg {
    /// hypergraph JSON path or fixture name (crosshatch, rho_5_5, rho_2,
    /// rho_3, rho_4_12, horodecki); GRIDSTATE_FIXTURES overrides the search dir
    state: String,
}

#[derive(Subcommand)]
enum Command {
    /// Build the dense state of a hypergraph and emit it as JSON
    Build {
        #[command(flatten)]
        state: StateArg,
        /// write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the PPT property (graphical rule with numeric fallback)
    Ppt {
        #[command(flatten)]
        state: StateArg,
    },
    /// Prove SN > k by exact minor branching; exits 2 when stuck
    Sn {
        #[command(flatten)]
        state: StateArg,
        /// prove Schmidt number strictly greater than this k
        #[arg(long)]
        k: usize,
        /// restrict the proof target to directions containing this edge
        #[arg(long)]
        target: Option<usize>,
        /// DFS node budget
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
    },
    /// Apply the concentration map n−1 times starting from a seed state
    Concentrate {
        /// seed state name (currently: crosshatch)
        #[arg(long)]
        seed: String,
        /// family index of the final member (1 = the seed itself)
        #[arg(long)]
        n: usize,
    },
    /// Test PPT-extremality of a state
    Extremal {
        #[command(flatten)]
        state: StateArg,
    },
    /// Emit the witness built from the state's range projectors
    Witness {
        #[command(flatten)]
        state: StateArg,
        /// write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower-bound the witness separable value by multi-start seesaw
    MuLower {
        #[command(flatten)]
        state: StateArg,
        /// number of random starts
        #[arg(long, default_value_t = 2000)]
        starts: usize,
        /// RNG seed
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Upper-bound the witness separable value by the level-n relaxation
    MuUpper {
        #[command(flatten)]
        state: StateArg,
        /// symmetric-extension level
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// solver residual target
        #[arg(long, default_value_t = 1e-7)]
        eps: f64,
        /// write the convergence trace as CSV to this file
        #[arg(long)]
        trace_csv: Option<PathBuf>,
    },
    /// Generate report rows for bundled states (JSON + aligned table)
    Report {
        /// report every bundled state
        #[arg(long)]
        all: bool,
        /// specific fixture names (ignored with --all)
        names: Vec<String>,
        /// seesaw starts per state
        #[arg(long, default_value_t = 2000)]
        starts: usize,
        /// RNG seed
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// highest relaxation level attempted
        #[arg(long, default_value_t = 2)]
        max_level: usize,
        /// lift per-state level caps (slow stretch levels)
        #[arg(long)]
        stretch: bool,
        /// emit JSON only (default prints the table plus JSON)
        #[arg(long)]
        json: bool,
    },
}

/// Resolves a state argument: an existing path, a file in the fixture
/// directory (env `GRIDSTATE_FIXTURES`, default `fixtures/` under the crate),
/// or a built-in name.
fn load_hypergraph(spec: &str) -> Result<GridHypergraph, String> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{spec}: {e}"))?;
        return GridHypergraph::from_json(&text).map_err(|e| format!("{spec}: {e}"));
    }
    let name = spec.strip_suffix(".json").unwrap_or(spec);
    let dir = std::env::var("GRIDSTATE_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|_| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    let candidate = dir.join(format!("{name}.json"));
    if candidate.is_file() {
        let text =
            std::fs::read_to_string(&candidate).map_err(|e| format!("{}: {e}", candidate.display()))?;
        return GridHypergraph::from_json(&text).map_err(|e| format!("{name}: {e}"));
    }
    bundled_hypergraph(name).map_err(|e| e.to_string())
}

fn build_state(spec: &str) -> Result<DensityMatrix, String> {
    load_hypergraph(spec)?
        .build_state()
        .map_err(|e| e.to_string())
}

/// Serializes a Hermitian matrix over a bipartition as row-major (re, im)
/// pairs with 17 significant digits.
fn matrix_to_json(m: &CMat, dims: Bipartition) -> String {
    let d = m.nrows();
    let mut s = format!("{{\n  \"dims\": [{}, {}],\n  \"matrix\": [\n", dims.d_a, dims.d_b);
    for r in 0..d {
        s.push_str("    [");
        for c in 0..d {
            s.push_str(&format!("[{}, {}]", fmt_f64(m[(r, c)].re), fmt_f64(m[(r, c)].im)));
            if c + 1 < d {
                s.push_str(", ");
            }
        }
        s.push(']');
        if r + 1 < d {
            s.push(',');
        }
        s.push('\n');
    }
    s.push_str("  ]\n}\n");
    s
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Build { state, out } => {
            let rho = build_state(&state.state)?;
            emit(&state_to_json(&rho), &out)?;
            Ok(0)
        }
        Command::Ppt { state } => {
            let h = load_hypergraph(&state.state)?;
            let verdict = h.graphical_ppt_check();
            println!("{}", serde_json::to_string_pretty(&verdict).unwrap());
            Ok(0)
        }
        Command::Sn {
            state,
            k,
            target,
            budget,
        } => {
            let h = load_hypergraph(&state.state)?;
            let cfg = ProverConfig {
                node_budget: budget,
                target_edge: target,
                ..ProverConfig::default()
            };
            match prove_sn_exceeds(&h, k, &cfg) {
                ProveOutcome::Proved(cert) => {
                    println!("{}", serde_json::to_string_pretty(&cert).unwrap());
                    Ok(0)
                }
                ProveOutcome::Stuck(report) => {
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    Ok(2)
                }
            }
        }
        Command::Concentrate { seed, n } => {
            if seed != "crosshatch" {
                return Err(format!("unknown seed state: {seed}"));
            }
            if n < 1 {
                return Err("family index starts at 1".into());
            }
            let chain = build_family(n).map_err(|e| e.to_string())?;
            let steps: Vec<serde_json::Value> = chain
                .iter()
                .map(|ctx| {
                    serde_json::json!({
                        "dims": [ctx.hypergraph.dims.d_a, ctx.hypergraph.dims.d_b],
                        "edges": ctx.hypergraph.edges.len(),
                        "target": ctx.target,
                        "kernel_vector": [ctx.alpha, ctx.beta],
                        "schmidt_number_label": ctx.k,
                    })
                })
                .collect();
            let last = chain.last().unwrap();
            let doc = serde_json::json!({
                "chain": steps,
                "member": serde_json::from_str::<serde_json::Value>(
                    &last.hypergraph.to_json()).unwrap(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(0)
        }
        Command::Extremal { state } => {
            let rho = build_state(&state.state)?;
            let verdict = extremality_test(&rho, cli.tol).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&verdict).unwrap());
            Ok(0)
        }
        Command::Witness { state, out } => {
            let rho = build_state(&state.state)?;
            let rp = range_pair(&rho, cli.tol).map_err(|e| e.to_string())?;
            let w = build_witness(&rp);
            emit(&matrix_to_json(&w, rho.dims), &out)?;
            Ok(0)
        }
        Command::MuLower {
            state,
            starts,
            seed,
        } => {
            let rho = build_state(&state.state)?;
            let rp = range_pair(&rho, cli.tol).map_err(|e| e.to_string())?;
            let w = build_witness(&rp);
            let result = seesaw(&w, rho.dims, starts, seed, 1e-12).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&result.summary()).unwrap());
            Ok(0)
        }
        Command::MuUpper {
            state,
            level,
            eps,
            trace_csv,
        } => {
            let rho = build_state(&state.state)?;
            let rp = range_pair(&rho, cli.tol).map_err(|e| e.to_string())?;
            let w = build_witness(&rp);
            let cfg = SolverConfig {
                eps,
                ..SolverConfig::default()
            };
            let sol = mu_upper(&w, rho.dims, level, &cfg).map_err(|e| e.to_string())?;
            if let Some(path) = &trace_csv {
                std::fs::write(path, sol.trace_csv())
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let doc = serde_json::json!({
                "level": level,
                "mu_u": sol.mu_u,
                "iterations": sol.iterations,
                "converged": sol.converged,
                "primal_residual": sol.primal_residual,
                "dual_residual": sol.dual_residual,
                "min_eigenvalue": sol.min_eigenvalue,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(0)
        }
        Command::Report {
            all,
            names,
            starts,
            seed,
            max_level,
            stretch,
            json,
        } => {
            let cfg = ReportConfig {
                starts,
                seed,
                tol: cli.tol,
                max_level,
                stretch,
            };
            let rows = if all {
                report_all(&cfg).map_err(|e| e.to_string())?
            } else {
                if names.is_empty() {
                    return Err(format!(
                        "pass --all or fixture names out of: {}",
                        BUNDLED.join(", ")
                    ));
                }
                names
                    .iter()
                    .map(|n| state_report(n, &cfg))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| e.to_string())?
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&rows).unwrap());
            } else {
                print!("{}", render_table(&rows));
            }
            Ok(if rows.iter().any(|r| r.inconclusive) { 2 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's default usage-error code is 2; reserve 2 for "stuck"
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

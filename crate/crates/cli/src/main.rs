//! Command-line entry point.
//!
//! Exit codes: 0 all checks pass, 1 at least one check fails, 2 malformed
//! input, 3 dimension budget exceeded.

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use fockforge::emit::emit_artifact;
use fockforge::fixtures::run_fixture_suite;
use fockforge::pool::resolve_threads;
use fockforge::report::RunReport;
use fockforge::runner::run_structural_checks;
use fockforge::spec_io::{load_spec_file, LoadError, LoadedSpec};

use fockforge_core::fock_space::FockTruncation;
use fockforge_core::quant_ops::OpContext;

#[derive(Parser)]
#[command(name = "fockforge", version, about = "Deformed Fock space verification harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonOpts {
    /// Truncation depth override.
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// Pass/fail tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Rank-decision tolerance for the spectral construction.
    #[arg(long = "rank-tol")]
    rank_tol: Option<f64>,
    /// Worker count; falls back to FOCKFORGE_THREADS, then 1.
    #[arg(long)]
    threads: Option<usize>,
    /// Write the JSON report to this path.
    #[arg(long)]
    json: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full structural check battery on a spec file.
    Check {
        #[arg(long)]
        spec: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Emit one artifact of a spec as deterministic JSON.
    Emit {
        #[arg(long)]
        spec: String,
        /// One of: T, T_tilde, P_n, proj_n, fock_basis.
        #[arg(long)]
        what: String,
        /// Level for the per-level artifacts.
        #[arg(long)]
        n: Option<usize>,
        /// Write the artifact to this path instead of stdout.
        #[arg(long)]
        json: Option<String>,
    },
    /// Run only the commutation-relation verifiers on a spec file.
    Relations {
        #[arg(long)]
        spec: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the bundled example models with their golden data.
    Fixtures {
        /// Substring filter over fixture names.
        filter: Option<String>,
        /// Exact fixture name.
        #[arg(long)]
        fixture: Option<String>,
        /// Larger scale: 4 sites, depth 4 (default: 3 sites, depth 3).
        #[arg(long)]
        big: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn exit_of(e: &LoadError) -> u8 {
    match e {
        LoadError::Malformed(_) => 2,
        LoadError::Budget(_) => 3,
    }
}

fn finish(report: RunReport, json: Option<&str>, started: Instant) -> Result<u8, String> {
    print!("{}", report.human_summary());
    if let Some(path) = json {
        std::fs::write(path, report.to_json()).map_err(|e| format!("cannot write {path}: {e}"))?;
    }
    eprintln!("elapsed {:.2}s", started.elapsed().as_secs_f64());
    Ok(if report.all_pass { 0 } else { 1 })
}

fn load_with_overrides(path: &str, common: &CommonOpts) -> Result<LoadedSpec, LoadError> {
    let mut loaded = load_spec_file(path)?;
    fockforge::spec_io::apply_overrides(&mut loaded, common.n_max, common.tol)?;
    Ok(loaded)
}

fn build_context(
    loaded: &LoadedSpec,
    rank_tol: Option<f64>,
) -> Result<(FockTruncation, f64), LoadError> {
    let rank_tol = rank_tol.unwrap_or(1e-9);
    let trunc = FockTruncation::build(&loaded.d, loaded.n_max, rank_tol)
        .map_err(|e| LoadError::Malformed(format!("{e:?}")))?;
    Ok((trunc, rank_tol))
}

fn run() -> Result<u8, (u8, String)> {
    let cli = Cli::parse();
    let started = Instant::now();
    match cli.cmd {
        Cmd::Check { spec, common } => {
            let loaded = load_with_overrides(&spec, &common).map_err(|e| (exit_of(&e), e.to_string()))?;
            if !loaded.d.flags.ybe {
                // The permutation sums are undefined, so only the T-level
                // structure is reportable; the braid item fails (exit 1).
                let items = fockforge::runner::flag_items(&loaded.d, loaded.multi.as_ref(), loaded.tol, "");
                let threads = resolve_threads(common.threads);
                let report = RunReport::new("check", loaded.describe.clone(), loaded.n_max, loaded.tol, threads, items);
                return finish(report, common.json.as_deref(), started).map_err(|m| (2, m));
            }
            let (trunc, _) = build_context(&loaded, common.rank_tol).map_err(|e| (exit_of(&e), e.to_string()))?;
            let ctx = OpContext::new(&loaded.d, &trunc)
                .map_err(|e| (2, format!("context build failed: {e:?}")))?;
            let items = run_structural_checks(&loaded.d, loaded.multi.as_ref(), &trunc, &ctx, loaded.tol, "");
            let threads = resolve_threads(common.threads);
            let report = RunReport::new("check", loaded.describe.clone(), loaded.n_max, loaded.tol, threads, items);
            finish(report, common.json.as_deref(), started).map_err(|m| (2, m))
        }
        Cmd::Emit { spec, what, n, json } => {
            let loaded = load_spec_file(&spec).map_err(|e| (exit_of(&e), e.to_string()))?;
            let text = emit_artifact(&loaded, &what, n).map_err(|e| (exit_of(&e), e.to_string()))?;
            match json {
                Some(path) => std::fs::write(&path, text).map_err(|e| (2, format!("cannot write {path}: {e}")))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Cmd::Relations { spec, common } => {
            let loaded = load_with_overrides(&spec, &common).map_err(|e| (exit_of(&e), e.to_string()))?;
            if !loaded.d.flags.ybe {
                let items = fockforge::runner::flag_items(&loaded.d, loaded.multi.as_ref(), loaded.tol, "");
                let threads = resolve_threads(common.threads);
                let report = RunReport::new("relations", loaded.describe.clone(), loaded.n_max, loaded.tol, threads, items);
                return finish(report, common.json.as_deref(), started).map_err(|m| (2, m));
            }
            let (trunc, _) = build_context(&loaded, common.rank_tol).map_err(|e| (exit_of(&e), e.to_string()))?;
            let ctx = OpContext::new(&loaded.d, &trunc)
                .map_err(|e| (2, format!("context build failed: {e:?}")))?;
            let mut items = Vec::new();
            for e in ctx.verify_pair_relations(fockforge::runner::RELATION_TOL) {
                items.push(fockforge::runner::relation_item("", &e));
            }
            for e in ctx.verify_basis_relations(fockforge::runner::RELATION_TOL) {
                items.push(fockforge::runner::relation_item("", &e));
            }
            if let Some(ms) = loaded.multi.as_ref() {
                match fockforge_core::multi_component::relation_discovery(ms, &ctx, fockforge::runner::RELATION_TOL) {
                    Ok(entries) => {
                        for e in entries {
                            items.push(fockforge::runner::relation_item("", &e));
                        }
                    }
                    Err(e) => return Err((2, format!("relation discovery failed: {e:?}"))),
                }
            }
            let threads = resolve_threads(common.threads);
            let report = RunReport::new("relations", loaded.describe.clone(), loaded.n_max, loaded.tol, threads, items);
            finish(report, common.json.as_deref(), started).map_err(|m| (2, m))
        }
        Cmd::Fixtures { filter, fixture, big, common } => {
            let threads = resolve_threads(common.threads);
            let tol = common.tol.unwrap_or(1e-8);
            let filter = fixture.as_deref().or(filter.as_deref());
            let items = run_fixture_suite(filter, big, tol, threads).map_err(|m| (2, m))?;
            let (n_sites, n_max) = fockforge::fixtures::fixture_scale(big);
            let subject = format!(
                "fixtures[{}] n_sites={n_sites}",
                filter.unwrap_or("all")
            );
            let report = RunReport::new("fixtures", subject, n_max, tol, threads, items);
            finish(report, common.json.as_deref(), started).map_err(|m| (2, m))
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("fockforge: {msg}");
            ExitCode::from(code)
        }
    }
}

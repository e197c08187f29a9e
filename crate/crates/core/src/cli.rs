//! `entctl`: command-line harness over the library.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bounds::{compute_bounds, pxmin, pzmin_lower_bound, BoundSet};
use crate::certify::{certify_separation, CertificateVerdict, CertifyOptions};
use crate::entangled::{run_zero_error_quantum, QuantumCodingReport};
use crate::error::{Error, Result};
use crate::exact::{parse_rational, Exact, Q};
use crate::ks::{validate_basis_set, verify_ks_property, KsBasisSet, KsVerdict, ValidationReport};
use crate::report::{emit_sweep, to_json, write_artifact, Format, SweepRow};
use crate::witsenhausen::{
    evaluate_quantum, make_instance, search_deterministic, CostReport, SearchOptions, SearchResult,
    WitsenhausenInstance,
};
use crate::zero_error::{
    build_ks_channel, code_from_independent_set, confusability_graph, independence_number, scan_codes,
    verify_zero_error, CodeScan, IndependentSet, ZeroErrorVerdict,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    CheckFailed = 1,
    InvalidInput = 2,
    Inconclusive = 3,
}

#[derive(Parser, Debug)]
#[command(name = "entctl", version, about = "Entanglement-assisted control experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check orthonormality and the KS property of a basis set.
    VerifyKs(Common),
    /// Build the channel and report its confusability graph.
    ChannelInfo(ChannelInfoArgs),
    /// Run the entangled code and evaluate the entangled strategy's cost.
    QuantumRun(QuantumArgs),
    /// Exhaustive in-window search over deterministic strategies at one scale.
    ClassicalSearch(SearchArgs),
    /// Produce a separation certificate.
    Certify(CertifyArgs),
    /// Quantum cost, classical minimum and bounds for a list of scales.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct Common {
    /// KS basis set file; the bundled (6,4) set when omitted.
    #[arg(long)]
    pub ks_set: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ChannelInfoArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also check that no set of alpha + 1 inputs carries a zero-error code.
    #[arg(long)]
    pub scan: bool,
    /// Write the channel matrix as JSON.
    #[arg(long)]
    pub channel_out: Option<PathBuf>,
    /// Write the confusability graph as an edge list.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Problem {
    /// Weight on controller 1's cost.
    #[arg(long, default_value = "1", value_parser = parse_rational)]
    pub k: Q,
}

#[derive(Args, Debug)]
pub struct QuantumArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub problem: Problem,
    /// Scale; defaults to d.
    #[arg(long)]
    pub t: Option<i64>,
}

#[derive(Args, Debug)]
pub struct Search {
    /// Cost bound M; defaults to the entangled strategy's cost.
    #[arg(long, value_parser = parse_rational)]
    pub bound: Option<Q>,
    /// Search window W (|c1| ≤ W); defaults to ⌈M_X⌉.
    #[arg(long)]
    pub window: Option<u32>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Largest number of candidates the search may cover.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub problem: Problem,
    #[arg(long)]
    pub t: i64,
    #[command(flatten)]
    pub search: Search,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub problem: Problem,
    /// Scale; defaults to ⌈t0⌉.
    #[arg(long)]
    pub t: Option<i64>,
    #[command(flatten)]
    pub search: Search,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub problem: Problem,
    /// Comma-separated scales.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub t: Vec<i64>,
    #[command(flatten)]
    pub search: Search,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Result of one subcommand: the artifact text and how to exit.
pub struct Outcome {
    pub artifact: String,
    pub summary: String,
    pub status: ExitStatus,
}

fn load_set(path: Option<&Path>) -> Result<KsBasisSet> {
    match path {
        Some(p) => KsBasisSet::load(p),
        None => Ok(KsBasisSet::bundled()),
    }
}

fn quantum_cost(set: &KsBasisSet, k: &Q) -> Result<Q> {
    let inst = make_instance(set.clone(), set.d() as i64, k.clone(), None)?;
    Ok(evaluate_quantum(&inst)?.total.0)
}

fn bounds_for(inst: &WitsenhausenInstance, bound: &Q) -> Result<BoundSet> {
    compute_bounds(bound, inst.k(), &pxmin(inst), &pzmin_lower_bound(inst))
}

fn window_for(search: &Search, bounds: &BoundSet) -> Result<u32> {
    match search.window {
        Some(w) => Ok(w),
        None => u32::try_from(bounds.mx_ceil)
            .map_err(|_| Error::InvalidParameter(format!("window {} too large", bounds.mx_ceil))),
    }
}

#[derive(Serialize)]
struct VerifyKsReport {
    label: String,
    q: usize,
    d: usize,
    validation: ValidationReport,
    ks: KsVerdict,
    summary: String,
}

fn verify_ks(args: &Common) -> Result<Outcome> {
    let set = load_set(args.ks_set.as_deref())?;
    let validation = validate_basis_set(&set);
    let ks = verify_ks_property(&set);
    let ok = validation.passed && ks.holds;
    let summary = match (validation.passed, ks.holds) {
        (false, _) => "basis set is not orthonormal".to_string(),
        (true, true) => "KS property holds".to_string(),
        (true, false) => format!(
            "KS property fails: traversal {:?} is orthogonality-free",
            ks.witness.clone().unwrap_or_default()
        ),
    };
    let report = VerifyKsReport {
        label: set.label().to_string(),
        q: set.q(),
        d: set.d(),
        validation,
        ks,
        summary: summary.clone(),
    };
    Ok(Outcome {
        artifact: to_json(&report),
        summary,
        status: if ok { ExitStatus::Ok } else { ExitStatus::CheckFailed },
    })
}

#[derive(Serialize)]
struct ChannelInfoReport {
    inputs: usize,
    outputs: usize,
    support_outputs: usize,
    edges: usize,
    min_degree: usize,
    max_degree: usize,
    alpha: usize,
    independent_set: IndependentSet,
    code_verdict: ZeroErrorVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    scan: Option<CodeScan>,
}

fn channel_info(args: &ChannelInfoArgs) -> Result<Outcome> {
    let set = load_set(args.common.ks_set.as_deref())?;
    let ch = build_ks_channel(&set)?;
    let g = confusability_graph(&ch);
    let degrees: Vec<usize> = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
    let mis = independence_number(&g);
    let code = code_from_independent_set(&ch, &mis.labels)?;
    let code_verdict = verify_zero_error(&ch, &code);
    let scan = args.scan.then(|| scan_codes(&ch, mis.size + 1));
    if let Some(p) = &args.channel_out {
        write_artifact(&ch.to_json(), Some(p))?;
    }
    if let Some(p) = &args.graph_out {
        write_artifact(&g.to_edge_list(), Some(p))?;
    }
    let ok = code_verdict.is_zero_error() && scan.as_ref().is_none_or(|s| s.zero_error_codeword_set.is_none());
    let summary = format!(
        "inputs={} edges={} alpha={}",
        g.vertex_count(),
        g.edge_count(),
        mis.size
    );
    let report = ChannelInfoReport {
        inputs: g.vertex_count(),
        outputs: ch.outputs().len(),
        support_outputs: ch.support_outputs().len(),
        edges: g.edge_count(),
        min_degree: degrees.iter().copied().min().unwrap_or(0),
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        alpha: mis.size,
        independent_set: mis,
        code_verdict,
        scan,
    };
    Ok(Outcome {
        artifact: to_json(&report),
        summary,
        status: if ok { ExitStatus::Ok } else { ExitStatus::CheckFailed },
    })
}

#[derive(Serialize)]
struct QuantumRunReport {
    t: i64,
    k: Exact,
    coding: QuantumCodingReport,
    cost: CostReport,
}

fn quantum_run(args: &QuantumArgs) -> Result<Outcome> {
    let set = load_set(args.common.ks_set.as_deref())?;
    let ch = build_ks_channel(&set)?;
    let t = args.t.unwrap_or(set.d() as i64);
    let coding = run_zero_error_quantum(&set, &ch)?;
    let inst = make_instance(set, t, args.problem.k.clone(), None)?;
    let cost = evaluate_quantum(&inst)?;
    let summary = format!(
        "{} messages, {} branches, all correct: {}, cost {}",
        coding.messages_sent, coding.total_branches, coding.all_correct, cost.total
    );
    let status = if coding.all_correct {
        ExitStatus::Ok
    } else {
        ExitStatus::CheckFailed
    };
    Ok(Outcome {
        artifact: to_json(&QuantumRunReport {
            t,
            k: Exact(args.problem.k.clone()),
            coding,
            cost,
        }),
        summary,
        status,
    })
}

#[derive(Serialize)]
struct ClassicalSearchReport {
    t: i64,
    k: Exact,
    bound: Exact,
    bounds: BoundSet,
    result: SearchResult,
}

fn classical_search(args: &SearchArgs) -> Result<Outcome> {
    let set = load_set(args.common.ks_set.as_deref())?;
    let k = &args.problem.k;
    let bound = match &args.search.bound {
        Some(b) => b.clone(),
        None => quantum_cost(&set, k)?,
    };
    let inst = make_instance(set, args.t, k.clone(), None)?;
    let bounds = bounds_for(&inst, &bound)?;
    let opts = SearchOptions {
        window: window_for(&args.search, &bounds)?,
        budget: args.search.budget,
        workers: args.search.workers,
    };
    let result = search_deterministic(&inst, &opts)?;
    let (summary, status) = match &result {
        SearchResult::Complete(o) => (
            format!("best in-window cost {} over {} candidates", o.best_cost, o.candidates),
            ExitStatus::Ok,
        ),
        SearchResult::Inconclusive { candidates, budget, .. } => (
            format!("inconclusive: {candidates} candidates exceed budget {budget}"),
            ExitStatus::Inconclusive,
        ),
    };
    Ok(Outcome {
        artifact: to_json(&ClassicalSearchReport {
            t: args.t,
            k: Exact(k.clone()),
            bound: Exact(bound),
            bounds,
            result,
        }),
        summary,
        status,
    })
}

fn certify(args: &CertifyArgs) -> Result<Outcome> {
    let set = load_set(args.common.ks_set.as_deref())?;
    let k = args.problem.k.clone();
    let bound = match &args.search.bound {
        Some(b) => b.clone(),
        None => quantum_cost(&set, &k)?,
    };
    let opts = CertifyOptions {
        t: args.t,
        window: args.search.window,
        workers: args.search.workers,
        budget: args.search.budget,
        message_dist: None,
    };
    let cert = certify_separation(&set, k, bound, &opts)?;
    let status = match cert.verdict {
        CertificateVerdict::Certified => ExitStatus::Ok,
        CertificateVerdict::Inconclusive => ExitStatus::Inconclusive,
        CertificateVerdict::NotCertified | CertificateVerdict::Vacuous => ExitStatus::CheckFailed,
    };
    let summary = match &cert.search {
        Some(s) => format!(
            "{:?} at t = {}, W = {}: quantum {} vs classical {}",
            cert.verdict, cert.t, cert.window, cert.quantum_cost, s.best_cost
        ),
        None => format!("{:?} at t = {}, W = {}", cert.verdict, cert.t, cert.window),
    };
    Ok(Outcome {
        artifact: cert.to_json() + "\n",
        summary,
        status,
    })
}

pub fn sweep_rows(set: &KsBasisSet, k: &Q, ts: &[i64], search: &Search) -> Result<Vec<SweepRow>> {
    if ts.is_empty() {
        return Err(Error::InvalidParameter("empty t list".into()));
    }
    let bound = match &search.bound {
        Some(b) => b.clone(),
        None => quantum_cost(set, k)?,
    };
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let inst = make_instance(set.clone(), t, k.clone(), None)?;
        let bounds = bounds_for(&inst, &bound)?;
        let window = window_for(search, &bounds)?;
        let quantum = evaluate_quantum(&inst)?.total;
        let opts = SearchOptions {
            window,
            budget: search.budget,
            workers: search.workers,
        };
        let classical = search_deterministic(&inst, &opts)?
            .outcome()
            .map(|o| o.best_cost.clone());
        let certified = quantum.0 <= bound
            && i64::from(window) >= bounds.mx_floor
            && classical.as_ref().is_some_and(|c| c.0 > bound);
        rows.push(SweepRow {
            t,
            quantum_cost: quantum,
            classical_best: classical,
            window,
            mx: bounds.mx,
            mz: bounds.mz,
            t0: bounds.t0,
            certified,
        });
    }
    Ok(rows)
}

fn sweep(args: &SweepArgs) -> Result<Outcome> {
    let set = load_set(args.common.ks_set.as_deref())?;
    let rows = sweep_rows(&set, &args.problem.k, &args.t, &args.search)?;
    let inconclusive = rows.iter().filter(|r| r.classical_best.is_none()).count();
    let status = if inconclusive > 0 {
        ExitStatus::Inconclusive
    } else {
        ExitStatus::Ok
    };
    Ok(Outcome {
        artifact: emit_sweep(&rows, args.format)?,
        summary: format!("{} rows, {} inconclusive", rows.len(), inconclusive),
        status,
    })
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::VerifyKs(a) => verify_ks(a),
        Command::ChannelInfo(a) => channel_info(a),
        Command::QuantumRun(a) => quantum_run(a),
        Command::ClassicalSearch(a) => classical_search(a),
        Command::Certify(a) => certify(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn out_path(cli: &Cli) -> Option<&Path> {
    let common = match &cli.command {
        Command::VerifyKs(a) => a,
        Command::ChannelInfo(a) => &a.common,
        Command::QuantumRun(a) => &a.common,
        Command::ClassicalSearch(a) => &a.common,
        Command::Certify(a) => &a.common,
        Command::Sweep(a) => &a.common,
    };
    common.out.as_deref()
}

/// Runs the parsed command, writes its artifact and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = execute(cli).and_then(|o| {
        write_artifact(&o.artifact, out_path(cli))?;
        Ok(o)
    });
    match outcome {
        Ok(o) => {
            eprintln!("{}", o.summary);
            o.status as i32
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitStatus::InvalidInput as i32
        }
    }
}

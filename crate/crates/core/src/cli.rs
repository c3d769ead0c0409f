//! The `qnet` command line.
//!
//! Every subcommand writes its report to stdout (JSON unless noted) and
//! returns an exit code: 0 on success, 1 when the computation rejects its
//! input (a JSON error object goes to stderr), 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bell::{self, ObservableClass, SeesawConfig, TABLE_RESTARTS};
use crate::bounds::{self, BetaMode};
use crate::dense::{random_density, DenseOperator, DenseState};
use crate::error::{Error, Result};
use crate::field::primes;
use crate::graph::Multigraph;
use crate::optimize::{restart_rng, DEFAULT_RESTARTS};
use crate::protocols::protocol1::{protocol1_optimize, MAX_T};
use crate::protocols::protocol2::{protocol2_optimize, Protocol2Config, SourceModel};
use crate::protocols::protocol3::{protocol3_exact, protocol3_variants};
use crate::protocols::{ProtocolResult, Witness};
use crate::qudit::ghz_state;
use crate::standard_form::{classify, standardize, standardize_exhaustive, DEFAULT_ORBIT_CAP};
use crate::uncertainty::{figur_check, random_projection_pair, INEQUALITY_TOL};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "qnet", version, about = "Graph-state fidelity bounds and triangle-network protocols")]
struct Cli {
    /// Significant digits for CSV output.
    #[arg(long, global = true, default_value_t = 6)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bring a graph into standard form and report its index.
    Standardize(StandardizeArgs),
    /// Classify a graph relative to a vertex pair.
    Classify(ClassifyArgs),
    /// Fidelity upper bounds for graph states in bipartite-source networks.
    Bounds(BoundsArgs),
    /// Optimize or evaluate a triangle-network protocol.
    Protocol(ProtocolArgs),
    /// Bell inequality values of protocol outputs or given states.
    Bell(BellArgs),
    /// Randomized check of the fine-grained uncertainty relation.
    FigurTest(FigurArgs),
}

#[derive(Debug, Args)]
struct StandardizeArgs {
    /// Graph JSON file: {"d": 3, "n": 3, "edges": [[1, 2, 2], [1, 3, 1]]}.
    #[arg(long)]
    graph: PathBuf,
    /// Search the whole LC orbit for the smallest index.
    #[arg(long)]
    exhaustive: bool,
    /// Orbit size limit for --exhaustive.
    #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
    cap: usize,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    graph: PathBuf,
    /// 1-based vertex pair, e.g. 1,2.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2])]
    pair: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Prime local dimension.
    #[arg(long, conflicts_with_all = ["graph", "sweep"], requires = "beta")]
    d: Option<u64>,
    /// Odd index.
    #[arg(long, requires = "d")]
    beta: Option<u64>,
    /// Graph JSON file; the index is taken from its standard form.
    #[arg(long, conflicts_with = "sweep")]
    graph: Option<PathBuf>,
    /// Use the minimum index over the LC orbit.
    #[arg(long, requires = "graph")]
    exhaustive: bool,
    /// Emit the bound curves over the first primes as CSV.
    #[arg(long)]
    sweep: bool,
    /// Number of primes in the sweep.
    #[arg(long, default_value_t = 25)]
    primes: usize,
    /// Indices in the sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 5])]
    betas: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    P1,
    P2,
    P3,
    Variants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Schmidt,
    IdenticalPairs,
    FreePairs,
}

#[derive(Debug, Args)]
struct ProtocolArgs {
    #[arg(long, value_enum)]
    which: Which,
    /// Source dimension for p1.
    #[arg(long, default_value_t = 2)]
    t: usize,
    /// With p1: emit F*_t for t = 2..=T as CSV instead of one JSON report.
    #[arg(long)]
    sweep: bool,
    /// Qubit pairs per source for p2, or k for p3 (target dimension k^2).
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Target dimension for variants.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Source parameterization for p2.
    #[arg(long, value_enum, default_value_t = ModelArg::Schmidt)]
    model: ModelArg,
    /// Shorthand for --model free-pairs.
    #[arg(long)]
    free_pairs: bool,
    /// Encoding shift of each p2 node.
    #[arg(long, value_delimiter = ',', default_values_t = [0, 1, 2])]
    shifts: Vec<usize>,
    /// p2 sources (0-based) held at maximal entanglement.
    #[arg(long, value_delimiter = ',')]
    pin: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the output density operator as JSON to this file.
    #[arg(long)]
    state_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BellArgs {
    /// Evaluate every built-in inequality on the protocol outputs, one column per source dimension.
    #[arg(long, conflicts_with_all = ["ineq"])]
    table: bool,
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4])]
    source_dims: Vec<usize>,
    /// Inequality name: 4, 5, 6, 21, 40, g1, g2.
    #[arg(long, required_unless_present = "table")]
    ineq: Option<String>,
    /// Three-party state as a DenseOperator or DenseState JSON file.
    #[arg(long, conflicts_with = "ghz")]
    state: Option<PathBuf>,
    /// Use the three-qubit GHZ state.
    #[arg(long)]
    ghz: bool,
    /// Also optimize the state (three qubits) instead of fixing it.
    #[arg(long, conflicts_with_all = ["state", "ghz"])]
    quantum: bool,
    #[arg(long, value_enum, default_value_t = ObservableArg::Traceless)]
    observables: ObservableArg,
    #[arg(long, default_value_t = TABLE_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObservableArg {
    Traceless,
    Dichotomic,
}

#[derive(Debug, Args)]
struct FigurArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Samples per lambda.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 0.75, 0.9])]
    lambda_grid: Vec<f64>,
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let body = json!({ "error": e.kind(), "message": e.to_string() });
            let _ = writeln!(err, "{body}");
            1
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let text = match &cli.command {
        Command::Standardize(a) => standardize_cmd(a)?,
        Command::Classify(a) => classify_cmd(a)?,
        Command::Bounds(a) => bounds_cmd(a, cli.precision)?,
        Command::Protocol(a) => protocol_cmd(a, cli.precision)?,
        Command::Bell(a) => bell_cmd(a, cli.precision)?,
        Command::FigurTest(a) => figur_cmd(a)?,
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn standardize_cmd(a: &StandardizeArgs) -> Result<String> {
    let g = Multigraph::load(&a.graph)?;
    let sf = if a.exhaustive { standardize_exhaustive(&g, a.cap)? } else { standardize(&g)? };
    let class = classify(&sf.graph, sf.pair.0, sf.pair.1).ok().map(|c| c.label());
    let steps: Vec<Value> =
        sf.lc_sequence.iter().map(|s| json!({ "vertex": s.vertex + 1, "weight": s.weight })).collect();
    Ok(to_json(&json!({
        "pair": [sf.pair.0 + 1, sf.pair.1 + 1],
        "beta": sf.beta,
        "minimal": sf.minimal,
        "lc_sequence": steps,
        "class": class,
        "graph": sf.graph.to_file(),
    })))
}

fn classify_cmd(a: &ClassifyArgs) -> Result<String> {
    let g = Multigraph::load(&a.graph)?;
    let &[v1, v2] = a.pair.as_slice() else {
        return Err(Error::Parse("--pair takes two vertices".into()));
    };
    if v1 == 0 || v2 == 0 {
        return Err(Error::Parse("vertex labels are 1-based".into()));
    }
    let class = classify(&g, v1 - 1, v2 - 1)?;
    Ok(to_json(&json!({ "pair": [v1, v2], "class": class.label(), "detail": class })))
}

fn bounds_cmd(a: &BoundsArgs, precision: usize) -> Result<String> {
    if a.sweep {
        let rows = bounds::sweep_rows(&primes(a.primes), &a.betas)?;
        return Ok(bounds::sweep_csv(&rows, precision));
    }
    if let Some(path) = &a.graph {
        let g = Multigraph::load(path)?;
        let mode = if a.exhaustive { BetaMode::Exhaustive } else { BetaMode::Deterministic };
        return Ok(to_json(&bounds::bound_for_graph(&g, mode)?));
    }
    match (a.d, a.beta) {
        (Some(d), Some(beta)) => Ok(to_json(&bounds::compare(d, beta)?)),
        _ => Err(Error::OutOfRange("give --d and --beta, --graph, or --sweep".into())),
    }
}

#[derive(Serialize)]
struct ProtocolReport<'a> {
    protocol: &'a str,
    d: usize,
    fidelity: f64,
    gme: bool,
    seed: Option<u64>,
    restarts: Option<usize>,
    witness: &'a Witness,
}

fn protocol_report(r: &ProtocolResult, state_out: Option<&PathBuf>) -> Result<String> {
    if let Some(path) = state_out {
        std::fs::write(path, r.rho_out.to_json())?;
    }
    Ok(to_json(&ProtocolReport {
        protocol: r.protocol,
        d: r.d,
        fidelity: r.fidelity,
        gme: r.gme,
        seed: r.seed,
        restarts: r.restarts,
        witness: &r.witness,
    }))
}

fn protocol_cmd(a: &ProtocolArgs, precision: usize) -> Result<String> {
    match a.which {
        Which::P1 if a.sweep => {
            if !(2..=MAX_T).contains(&a.t) {
                return Err(Error::OutOfRange(format!("t = {} not in [2, {MAX_T}]", a.t)));
            }
            let mut s = format!("# seed {} restarts {}\nt,fidelity\n", a.seed, a.restarts);
            for t in 2..=a.t {
                let r = protocol1_optimize(t, a.restarts, a.seed)?;
                s.push_str(&format!("{t},{}\n", crate::fmt_sig(r.fidelity, precision)));
            }
            Ok(s)
        }
        Which::P1 => protocol_report(&protocol1_optimize(a.t, a.restarts, a.seed)?, a.state_out.as_ref()),
        Which::P2 => {
            let mut pinned = [false; 3];
            for &p in &a.pin {
                *pinned.get_mut(p).ok_or_else(|| Error::OutOfRange(format!("source {p} not in 0..3")))? = true;
            }
            let model = match (a.free_pairs, a.model) {
                (true, _) | (_, ModelArg::FreePairs) => SourceModel::FreePairs,
                (_, ModelArg::IdenticalPairs) => SourceModel::IdenticalPairs,
                (_, ModelArg::Schmidt) => SourceModel::Schmidt,
            };
            let &[s0, s1, s2] = a.shifts.as_slice() else {
                return Err(Error::Parse("--shifts takes three values".into()));
            };
            let cfg = Protocol2Config {
                k: a.k,
                model,
                shifts: [s0, s1, s2],
                pinned,
                restarts: a.restarts,
                seed: a.seed,
            };
            protocol_report(&protocol2_optimize(&cfg)?, a.state_out.as_ref())
        }
        Which::P3 => protocol_report(&protocol3_exact(a.k)?, a.state_out.as_ref()),
        Which::Variants => protocol_report(&protocol3_variants(a.d)?, a.state_out.as_ref()),
    }
}

fn load_three_party(path: &PathBuf) -> Result<DenseOperator> {
    let text = std::fs::read_to_string(path)?;
    match DenseOperator::from_json(&text) {
        Ok(rho) => Ok(rho),
        Err(_) => DenseState::from_json(&text)?.density(),
    }
}

fn bell_cmd(a: &BellArgs, precision: usize) -> Result<String> {
    let class = match a.observables {
        ObservableArg::Traceless => ObservableClass::Traceless,
        ObservableArg::Dichotomic => ObservableClass::Dichotomic,
    };
    let cfg = SeesawConfig { class, restarts: a.restarts, seed: a.seed, ..Default::default() };
    if a.table {
        let table = bell::table1_report(&a.source_dims, &cfg, DEFAULT_RESTARTS)?;
        return Ok(match a.format {
            Format::Csv => format!("# seed {} restarts {}\n{}", a.seed, a.restarts, table.to_csv(precision)),
            Format::Json => to_json(&json!({ "seed": a.seed, "restarts": a.restarts, "table": table })),
        });
    }
    let ineq = bell::builtin(a.ineq.as_deref().expect("clap requires --ineq without --table"))?;
    let (value, state) = if a.quantum {
        (bell::quantum_max(&ineq, [2, 2, 2], &cfg)?.value, "optimized")
    } else {
        let rho = match (&a.state, a.ghz) {
            (Some(path), _) => load_three_party(path)?,
            (None, true) => ghz_state(2, 3)?.density()?,
            (None, false) => return Err(Error::OutOfRange("give --state FILE, --ghz or --quantum".into())),
        };
        (bell::seesaw(&ineq, &rho, &cfg)?.value, if a.ghz { "ghz" } else { "file" })
    };
    Ok(match a.format {
        Format::Csv => format!(
            "# seed {} restarts {}\nineq,C,value\n{},{},{}\n",
            a.seed,
            a.restarts,
            ineq.name,
            crate::fmt_sig(ineq.classical_bound, precision),
            crate::fmt_sig(value, precision)
        ),
        Format::Json => to_json(&json!({
            "ineq": ineq.name,
            "classical_bound": ineq.classical_bound,
            "value": value,
            "violates": value > ineq.classical_bound,
            "state": state,
            "seed": a.seed,
            "restarts": a.restarts,
        })),
    })
}

#[derive(Serialize)]
struct FigurReport {
    seed: u64,
    samples: usize,
    lambdas: Vec<f64>,
    passed: usize,
    failed: usize,
    worst_slack: f64,
}

fn figur_cmd(a: &FigurArgs) -> Result<String> {
    let mut report = FigurReport {
        seed: a.seed,
        samples: a.samples,
        lambdas: a.lambda_grid.clone(),
        passed: 0,
        failed: 0,
        worst_slack: f64::INFINITY,
    };
    for (li, &lambda) in a.lambda_grid.iter().enumerate() {
        let mut rng = restart_rng(a.seed, li);
        for _ in 0..a.samples {
            let blocks = rng.random_range(1..=3);
            let c00 = rng.random_range(0..=2);
            let c01 = rng.random_range(0..=2);
            let pair = random_projection_pair(rng.random(), lambda, blocks, c00, c01)?;
            let rank = rng.random_range(1..=pair.dim());
            let rho = random_density(vec![pair.dim()], rank, &mut rng)?;
            let check = figur_check(&pair, &rho)?;
            report.worst_slack = report.worst_slack.min(check.slack());
            if check.slack() >= -INEQUALITY_TOL {
                report.passed += 1;
            } else {
                report.failed += 1;
            }
        }
    }
    Ok(to_json(&report))
}

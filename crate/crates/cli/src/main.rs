//! `pblock`: batch driver for the simulators and the progression analyzer.
//!
//! Exit codes: 0 success, 1 usage/parse/input error, 2 the circuit is not
//! `p`-blocked, 3 non-Clifford gate given to the stabilizer engine, 4 exact
//! engines disagree in `compare`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pblock_core::ap::{analyze_blockedness, build_ap, build_pair, census};
use pblock_core::approx::{run_approx, ApproxCircuit, ApproxConfig};
use pblock_core::blocked::{run_blocked, BlockedOptions};
use pblock_core::dense::{dense_density_run, dense_marginal, dense_run, density_marginal};
use pblock_core::generate::{gen_block_local, gen_clifford, gen_entangle_disentangle, ghz};
use pblock_core::parse::{parse_circuit, serialize_circuit};
use pblock_core::sampling::{dist_distance, sample_outcome, CoinSource, OutcomeDistribution};
use pblock_core::stabilizer::{stabilizer_state, StabilizerError};
use pblock_core::Circuit;

#[derive(Parser, Debug)]
#[command(
    name = "pblock",
    version,
    about = "Exact and approximate simulation of p-blocked quantum circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one engine on a circuit file.
    Simulate(SimulateArgs),
    /// Run several engines on one circuit and compare their distributions.
    Compare(CompareArgs),
    /// Blockedness of arithmetic-progression and pair states.
    AnalyzeAp(ApArgs),
    /// Print a generated circuit in the text format.
    Generate(GenerateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Engine {
    Blocked,
    Approx,
    Dense,
    Stabilizer,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::Blocked => "blocked",
            Engine::Approx => "approx",
            Engine::Dense => "dense",
            Engine::Stabilizer => "stabilizer",
        }
    }
}

#[derive(Args, Debug)]
struct EngineArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// Largest block size.
    #[arg(long, default_value_t = 2)]
    p: usize,
    /// Assumed per-step distance to a p-blocked state (approx engine).
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Split blocks whenever possible, not only when they exceed p.
    #[arg(long)]
    eager_split: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Engine::Blocked)]
    engine: Engine,
    #[command(flatten)]
    common: EngineArgs,
    /// Sampling tolerance: probabilities are truncated to ceil(log2(1/eta)) bits.
    #[arg(long, default_value_t = 1e-9)]
    eta: f64,
    /// Number of samples of the measured qubit.
    #[arg(long, default_value_t = 0)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the approx engine's error ledger to this file.
    #[arg(long)]
    ledger: Option<PathBuf>,
    /// Print one sampled bit per line instead of a histogram.
    #[arg(long)]
    bits: bool,
    /// Print the final stabilizer generators (stabilizer engine).
    #[arg(long)]
    tableau: bool,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    common: EngineArgs,
    /// Engines to run.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Engine::Blocked, Engine::Dense])]
    engines: Vec<Engine>,
}

#[derive(Args, Debug)]
struct ApArgs {
    #[arg(long)]
    x0: Option<u64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    count: Option<u64>,
    /// Two basis states `a,b` instead of a progression.
    #[arg(long, value_delimiter = ',')]
    pair: Option<Vec<u64>>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    /// Seeded census over random periods.
    #[arg(long)]
    census: bool,
    #[arg(long)]
    rbits: Option<usize>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    BlockLocal,
    EntangleDisentangle,
    Clifford,
    Ghz,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    p: usize,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// An error with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: 1,
            error: e.into(),
        }
    }
}

fn fail(code: u8, error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code,
        error: error.into(),
    }
}

fn load(path: &Path) -> anyhow::Result<Circuit> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_circuit(&text).with_context(|| format!("parsing {}", path.display()))
}

fn check_p(p: usize) -> anyhow::Result<()> {
    if p == 0 {
        bail!("--p must be at least 1");
    }
    Ok(())
}

fn format_prob(label: &str, d: &OutcomeDistribution, which: usize) -> String {
    let exact = if which == 0 {
        d.exact_p0()
    } else {
        d.exact_p1()
    };
    let value = if which == 0 { d.p0() } else { d.p1() };
    match exact {
        Some(x) => format!("{label} = {x} ({value:.12})"),
        None => format!("{label} = {value:.12}"),
    }
}

fn format_dist(d: &OutcomeDistribution) -> String {
    format!("{}\n{}\n", format_prob("p0", d, 0), format_prob("p1", d, 1))
}

struct EngineRun {
    distribution: OutcomeDistribution,
    notes: Vec<String>,
    ledger: Option<String>,
    e_t: Option<f64>,
}

fn run_engine(
    engine: Engine,
    circuit: &Circuit,
    args: &EngineArgs,
    tableau: bool,
) -> Result<EngineRun, Failure> {
    check_p(args.p)?;
    let mut notes = Vec::new();
    let (distribution, ledger, e_t) = match engine {
        Engine::Blocked => {
            let run = run_blocked(
                circuit,
                args.p,
                BlockedOptions {
                    eager_split: args.eager_split,
                },
            )
            .map_err(|e| fail(2, e))?;
            notes.push(format!(
                "max_digits={} splits={} merges={} largest_block={}",
                run.stats.max_digits, run.stats.splits, run.stats.merges, run.stats.largest_block
            ));
            (run.distribution, None, None)
        }
        Engine::Approx => {
            if !(args.epsilon >= 0.0 && args.epsilon.is_finite()) {
                return Err(anyhow!("--epsilon must be finite and non-negative").into());
            }
            let cfg = ApproxConfig::new(args.p, args.epsilon);
            let run = run_approx(&ApproxCircuit::from(circuit), &cfg);
            notes.push(run.certificate.to_string());
            (
                run.distribution,
                Some(run.ledger.export()),
                Some(run.certificate.e_t),
            )
        }
        Engine::Dense => {
            let d = if circuit.input_blocks().is_empty() {
                dense_marginal(&dense_run(circuit)?, circuit.measured())
            } else {
                density_marginal(&dense_density_run(circuit)?, circuit.measured())?
            };
            (d, None, None)
        }
        Engine::Stabilizer => {
            let t = stabilizer_state(circuit).map_err(|e| match e {
                StabilizerError::NonCliffordGate { .. } => fail(3, e),
                other => fail(1, other),
            })?;
            if tableau {
                notes.push(format!("tableau:\n{}", t.canonical().dump().trim_end()));
            }
            (t.marginal(circuit.measured()), None, None)
        }
    };
    Ok(EngineRun {
        distribution,
        notes,
        ledger,
        e_t,
    })
}

fn simulate(args: &SimulateArgs) -> Result<String, Failure> {
    let circuit = load(&args.common.circuit)?;
    let start = Instant::now();
    let run = run_engine(args.engine, &circuit, &args.common, args.tableau)?;
    let mut out = String::new();
    writeln!(
        out,
        "engine={} qubits={} steps={} measured={}",
        args.engine.name(),
        circuit.width(),
        circuit.len(),
        circuit.measured()
    )
    .unwrap();
    out.push_str(&format_dist(&run.distribution));
    for note in &run.notes {
        writeln!(out, "{note}").unwrap();
    }
    if let (Some(path), Some(ledger)) = (&args.ledger, &run.ledger) {
        std::fs::write(path, ledger).with_context(|| format!("writing {}", path.display()))?;
    }
    if args.samples > 0 {
        let mut coins = CoinSource::new(args.seed);
        let mut ones = 0u64;
        for _ in 0..args.samples {
            let bit = sample_outcome(&run.distribution, args.eta, &mut coins)?;
            ones += u64::from(bit);
            if args.bits {
                writeln!(out, "{bit}").unwrap();
            }
        }
        writeln!(
            out,
            "samples={} zeros={} ones={} coins={} seed={}",
            args.samples,
            args.samples - ones,
            ones,
            coins.tosses(),
            args.seed
        )
        .unwrap();
    }
    eprintln!("wall_time={:.3}s", start.elapsed().as_secs_f64());
    Ok(out)
}

fn compare(args: &CompareArgs) -> Result<String, Failure> {
    let circuit = load(&args.common.circuit)?;
    let mut out = String::new();
    let mut results: Vec<(Engine, EngineRun)> = Vec::new();
    let mut worst = 0u8;
    for &engine in &args.engines {
        match run_engine(engine, &circuit, &args.common, false) {
            Ok(run) => {
                writeln!(
                    out,
                    "{}: p0 = {:.12} p1 = {:.12}",
                    engine.name(),
                    run.distribution.p0(),
                    run.distribution.p1()
                )
                .unwrap();
                results.push((engine, run));
            }
            Err(f) => {
                writeln!(
                    out,
                    "{}: error (exit {}): {:#}",
                    engine.name(),
                    f.code,
                    f.error
                )
                .unwrap();
                worst = worst.max(f.code);
            }
        }
    }
    let mut mismatch = false;
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let (ea, a) = &results[i];
            let (eb, b) = &results[j];
            let d = dist_distance(&a.distribution, &b.distribution);
            let verdict = if a.distribution.is_exact() && b.distribution.is_exact() {
                if a.distribution == b.distribution {
                    "MATCH".to_string()
                } else {
                    mismatch = true;
                    "MISMATCH".to_string()
                }
            } else {
                match a.e_t.or(b.e_t) {
                    Some(e) => format!("bound e_T={e:e}"),
                    None => "float".to_string(),
                }
            };
            writeln!(
                out,
                "{} vs {}: distance={} {}",
                ea.name(),
                eb.name(),
                d,
                verdict
            )
            .unwrap();
        }
    }
    if worst != 0 {
        print!("{out}");
        return Err(fail(worst, anyhow!("one or more engines failed")));
    }
    if mismatch {
        print!("{out}");
        return Err(fail(4, anyhow!("exact engines disagree")));
    }
    Ok(out)
}

fn analyze_ap(args: &ApArgs) -> Result<String, Failure> {
    if args.p == 0 {
        return Err(anyhow!("--p must be at least 1").into());
    }
    if args.census {
        let rbits = args
            .rbits
            .ok_or_else(|| anyhow!("--census needs --rbits"))?;
        let result = census(rbits, args.trials, args.p, args.n, args.seed)?;
        return Ok(format!("{result}\n"));
    }
    let state = match (&args.pair, args.x0, args.r, args.count) {
        (Some(pair), None, None, None) => {
            if pair.len() != 2 {
                return Err(anyhow!("--pair takes exactly two values").into());
            }
            build_pair(pair[0], pair[1], args.n)?
        }
        (None, Some(x0), Some(r), Some(count)) => build_ap(x0, r, count, args.n)?,
        _ => return Err(anyhow!("give either --x0 --r --count, --pair a,b, or --census").into()),
    };
    Ok(match analyze_blockedness(&state, args.p) {
        Some(partition) => format!("{}\n", partition.display_bits(args.n)),
        None => format!("NOT {}-BLOCKED\n", args.p),
    })
}

fn generate(args: &GenerateArgs) -> Result<String, Failure> {
    let circuit = match args.kind {
        Kind::BlockLocal => {
            if args.p == 0 || args.n < args.p {
                return Err(anyhow!("block-local needs n >= p >= 1").into());
            }
            gen_block_local(args.n, args.p, args.steps, args.seed)
        }
        Kind::EntangleDisentangle => {
            if args.n < 2 || args.p == 0 {
                return Err(anyhow!("entangle-disentangle needs n >= 2 and p >= 1").into());
            }
            gen_entangle_disentangle(args.n, args.p, args.steps, args.seed)
        }
        Kind::Clifford => {
            if args.n == 0 {
                return Err(anyhow!("n must be positive").into());
            }
            gen_clifford(args.n, args.steps, args.seed)
        }
        Kind::Ghz => {
            if args.n == 0 {
                return Err(anyhow!("n must be positive").into());
            }
            ghz(args.n)
        }
    };
    Ok(serialize_circuit(&circuit))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Compare(a) => compare(a),
        Command::AnalyzeAp(a) => analyze_ap(a),
        Command::Generate(a) => generate(a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

//! `umt`: build shift circuits, tabulate the ancilla/depth trade-off, prepare
//! ansatz states, estimate multivariate traces and run virtual distillation.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use umt_core::ansatz::{ansatz_state, REFERENCE_ALPHA};
use umt_core::circuit::{
    attach_observable, build_circuit, export_circuit, imaginary_mode, CircuitError, CircuitMeta, ExportFormat, Proposition,
};
use umt_core::estimators::{
    estimate_mt, format_sig, virtual_distillation, CircuitFamily, ErrorBudget, EstimateReport, EstimatorError, EstimatorOptions,
    Mode, VDResult,
};
use umt_core::oracle::{mt_checked, OracleError};
use umt_core::qstate::{DensityMatrix, PauliObservable, PauliString, StateError};
use umt_core::schedule::{depth_bound, max_ancillas, schedule, ScheduleError, SchedulePolicy};
use umt_core::simulator::{NoiseModel, SimError};

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ScheduleError> for CliError {
    fn from(e: ScheduleError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        match e {
            StateError::EigenFailure => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::EngineMismatch { .. } => CliError::Numeric(e.to_string()),
            SimError::State(s) => s.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::PathMismatch { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<EstimatorError> for CliError {
    fn from(e: EstimatorError) -> Self {
        match e {
            EstimatorError::DegenerateDenominator { .. } => CliError::Numeric(e.to_string()),
            EstimatorError::Circuit(c) => c.into(),
            EstimatorError::Simulation(s) => s.into(),
            EstimatorError::Oracle(o) => o.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "umt", version, about = "Controlled cyclic-shift circuits, trace estimation and virtual distillation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a shift circuit and export it.
    Build(BuildArgs),
    /// Depth and width of both layouts for every ancilla count.
    Tradeoff(TradeoffArgs),
    /// Two-qubit ansatz state, optionally depolarized.
    AnsatzState(AnsatzArgs),
    /// Estimate Tr(rho_1 ... rho_m) from state files.
    Estimate(EstimateArgs),
    /// Virtual distillation of the ansatz state over a noise sweep.
    Vd(VdArgs),
}

#[derive(Args)]
struct LayoutArgs {
    /// Number of copies.
    #[arg(long)]
    m: usize,
    /// Qubits per copy.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Ancillas per block.
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Layout: 1 (sequential) or 2 (parallel).
    #[arg(long = "prop", default_value = "1")]
    proposition: Proposition,
    #[arg(long, default_value = "greedy")]
    policy: SchedulePolicy,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    layout: LayoutArgs,
    #[arg(long, default_value = "text")]
    format: ExportFormat,
    /// Pauli string for a controlled observable, e.g. ZI.
    #[arg(long)]
    observable: Option<PauliString>,
    /// Register (1-based) receiving the observable.
    #[arg(long, default_value_t = 1)]
    target: usize,
    /// Append the phase gate for the imaginary-part readout.
    #[arg(long)]
    imag: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TradeoffArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnsatzArgs {
    /// Rotation angles alpha_1..alpha_4.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = REFERENCE_ALPHA)]
    alpha: Vec<f64>,
    /// Depolarizing probability applied to the prepared state.
    #[arg(long, default_value_t = 0.0)]
    gamma0: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Shots,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Shots => Mode::Shots,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Shots per measured part; planned from the budget when absent.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, env = "UMT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EstimateArgs {
    /// State files (JSON), in product order.
    #[arg(long = "state", required = true)]
    states: Vec<PathBuf>,
    /// Repeat a single state file this many times.
    #[arg(long)]
    copies: Option<usize>,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long = "prop", default_value = "1")]
    proposition: Proposition,
    #[arg(long, default_value = "greedy")]
    policy: SchedulePolicy,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Layer depolarizing probability.
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Shots)]
    mode: ModeArg,
    /// Also print the exact value and the deviation.
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VdArgs {
    #[arg(long, default_value_t = 5)]
    m: usize,
    /// Ancilla counts, one circuit variant each.
    #[arg(long = "s", value_delimiter = ',', default_values_t = [2usize, 1])]
    ancillas: Vec<usize>,
    #[arg(long = "prop", default_value = "1")]
    proposition: Proposition,
    #[arg(long, default_value = "greedy")]
    policy: SchedulePolicy,
    /// Layer depolarizing probabilities.
    #[arg(long = "gamma", value_delimiter = ',', default_values_t = [0.2, 0.4, 0.6, 0.8])]
    gammas: Vec<f64>,
    /// State depolarizing probability.
    #[arg(long, default_value_t = 0.4)]
    gamma0: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = REFERENCE_ALPHA)]
    alpha: Vec<f64>,
    /// Observable file (JSON); defaults to (Z1 + Z2)/2.
    #[arg(long)]
    observable: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn sig(x: f64) -> String {
    format_sig(x, 10)
}

fn emit(output: Option<&Path>, content: &str, stdout: &mut String) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, content).map_err(|e| CliError::Data(format!("{}: {e}", path.display()))),
        None => {
            stdout.push_str(content);
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn alpha_array(alpha: &[f64]) -> CliResult<[f64; 4]> {
    alpha
        .try_into()
        .map_err(|_| CliError::Usage(format!("--alpha needs 4 angles, got {}", alpha.len())))
}

fn cmd_build(args: &BuildArgs, out: &mut String) -> CliResult<()> {
    let l = &args.layout;
    let meta = CircuitMeta { m: l.m, n: l.n, s: l.s, proposition: l.proposition, policy: l.policy };
    let mut circuit = build_circuit(meta)?;
    if let Some(p) = &args.observable {
        circuit = attach_observable(&circuit, p, args.target)?;
    }
    if args.imag {
        circuit = imaginary_mode(&circuit);
    }
    let _ = writeln!(out, "depth={} qubits={}", circuit.cswap_depth(), circuit.width());
    emit(args.output.as_deref(), &export_circuit(&circuit, args.format), out)
}

fn cmd_tradeoff(args: &TradeoffArgs, out: &mut String) -> CliResult<()> {
    let mut csv = String::from("s,prop1_depth,prop1_qubits,prop2_depth,prop2_qubits,greedy_depth,layer_restricted_depth\n");
    let (m, n) = (args.m, args.n);
    if m < 2 {
        return Err(ScheduleError::TooFewCopies { m }.into());
    }
    for s in 1..=max_ancillas(m) {
        let build = |proposition| build_circuit(CircuitMeta { m, n, s, proposition, policy: SchedulePolicy::Greedy });
        let p1 = build(Proposition::Sequential)?;
        let p2 = build(Proposition::Parallel)?;
        let greedy = schedule(m, s, SchedulePolicy::Greedy)?.depth();
        let layered = schedule(m, s, SchedulePolicy::LayerRestricted)?.depth();
        let _ = writeln!(
            csv,
            "{s},{},{},{},{},{greedy},{layered}",
            p1.cswap_depth(),
            p1.width(),
            p2.cswap_depth(),
            p2.width()
        );
    }
    emit(args.output.as_deref(), &csv, out)
}

fn cmd_ansatz(args: &AnsatzArgs, out: &mut String) -> CliResult<()> {
    let rho = ansatz_state(alpha_array(&args.alpha)?, args.gamma0)?;
    let json = serde_json::to_string_pretty(&rho).expect("state serializes") + "\n";
    if args.output.is_some() {
        let _ = writeln!(out, "expectation={}", sig(rho.expectation(&PauliObservable::mean_z(2))));
    }
    emit(args.output.as_deref(), &json, out)
}

fn cmd_estimate(args: &EstimateArgs, out: &mut String) -> CliResult<()> {
    let mut states: Vec<DensityMatrix> = args.states.iter().map(|p| read_json(p)).collect::<CliResult<_>>()?;
    if let Some(copies) = args.copies {
        if states.len() != 1 {
            return Err(CliError::Usage("--copies needs exactly one --state".into()));
        }
        states = vec![states[0].clone(); copies];
    }
    let b = &args.budget;
    let mut opts = EstimatorOptions::new(
        CircuitFamily { s: args.s, proposition: args.proposition, policy: args.policy, target_register: 1 },
        b.seed,
    );
    opts.budget = ErrorBudget::new(b.epsilon, b.delta)?;
    opts.shots = b.shots;
    opts.mode = args.mode.into();
    opts.noise = NoiseModel::layers(args.gamma)?;
    let report = estimate_mt(&states, &opts)?;
    let _ = writeln!(out, "estimate={} {}i", sig(report.value.re), sig(report.value.im));
    if args.oracle {
        let exact = mt_checked(&states)?;
        let _ = writeln!(out, "oracle={} {}i", sig(exact.re), sig(exact.im));
        let _ = writeln!(out, "diff={}", sig((report.value - exact).norm()));
    }
    let body = match args.format {
        ReportFormat::Json => report.to_json() + "\n",
        ReportFormat::Csv => format!("{}\n{}\n", EstimateReport::csv_header(), report.csv_row()),
    };
    emit(args.output.as_deref(), &body, out)
}

fn variant_label(m: usize, s: usize) -> String {
    let h = if m >= 2 { depth_bound(m, s) } else { 0 };
    format!("s{s}_h{h}")
}

fn cmd_vd(args: &VdArgs, out: &mut String) -> CliResult<()> {
    let alpha = alpha_array(&args.alpha)?;
    let ideal_state = ansatz_state(alpha, 0.0)?;
    let o = match &args.observable {
        Some(path) => read_json::<PauliObservable>(path)?,
        None => PauliObservable::mean_z(2),
    };
    let b = &args.budget;
    let budget = ErrorBudget::new(b.epsilon, b.delta)?;
    let ideal = ideal_state.expectation(&o);

    let mut results: Vec<(usize, f64, VDResult)> = Vec::new();
    for &s in &args.ancillas {
        for &gamma in &args.gammas {
            let mut opts = EstimatorOptions::new(
                CircuitFamily { s, proposition: args.proposition, policy: args.policy, target_register: 1 },
                b.seed,
            );
            opts.budget = budget;
            opts.shots = b.shots;
            opts.mode = args.mode.into();
            opts.noise = NoiseModel::new(args.gamma0, gamma)?;
            let mut r = virtual_distillation(&ideal_state, args.m, &o, &opts)?;
            r.ideal = Some(ideal);
            results.push((s, gamma, r));
        }
    }

    let noisy = results.first().map_or(ideal, |(_, _, r)| r.noisy);
    let _ = writeln!(out, "ideal={ideal:.4}");
    let _ = writeln!(out, "noisy={noisy:.4}");
    let labels: Vec<String> = args.ancillas.iter().map(|&s| variant_label(args.m, s)).collect();
    let _ = writeln!(out, "gamma,{}", labels.join(","));
    for &gamma in &args.gammas {
        let cells: Vec<String> = args
            .ancillas
            .iter()
            .map(|&s| {
                let r = results.iter().find(|(rs, rg, _)| *rs == s && *rg == gamma).map(|(_, _, r)| r).expect("every cell computed");
                format!("{:.4}", r.corrected)
            })
            .collect();
        let _ = writeln!(out, "{},{}", gamma, cells.join(","));
    }

    let mut csv = String::from("variant,m,n,s,proposition,gamma,gamma0,shots,value,variance,seed\n");
    for (s, _, r) in &results {
        let _ = writeln!(csv, "{},{}", variant_label(args.m, *s), r.csv_row());
    }
    if args.output.is_none() {
        out.push('\n');
    }
    emit(args.output.as_deref(), &csv, out)
}

fn run(cli: &Cli, out: &mut String) -> CliResult<()> {
    match &cli.command {
        Command::Build(a) => cmd_build(a, out),
        Command::Tradeoff(a) => cmd_tradeoff(a, out),
        Command::AnsatzState(a) => cmd_ansatz(a, out),
        Command::Estimate(a) => cmd_estimate(a, out),
        Command::Vd(a) => cmd_vd(a, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    match run(&cli, &mut out) {
        Ok(()) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

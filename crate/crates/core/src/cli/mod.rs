//! The `dcool` command line.
//!
//! Exit status: 0 on success, 2 for usage errors, 3 for numerical failures.
//! Output goes to `--out`, or to `<command>.csv` inside `$DCOOL_OUT_DIR`
//! (the working directory when unset).

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{steady_state, FIDELITY};
use crate::error::Error;
use crate::scenarios::{
    build_scenario, sweep_fidelity_vs_detuning, sweep_rate_vs_omega, InitialState, ScenarioConfig, ScenarioKind,
    SweepTable,
};
use output::{render_svg, to_csv, write_atomic, Table};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DCOOL_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
pub enum CliError {
    Usage(UsageError),
    Model(Error),
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(e) => write!(f, "{e}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "cannot write {}: {e}", p.display()),
        }
    }
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "dcool", version, about = "Dissipative cooling of interacting atomic qubits")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Stationary state of a scenario.
    #[command(args_override_self = true)]
    Steady(RunArgs),
    /// Time evolution of a scenario.
    #[command(args_override_self = true)]
    Evolve(RunArgs),
    /// Formula and simulated stationary fidelity over (omega, delta_lambda).
    #[command(args_override_self = true)]
    SweepFidelity(RunArgs),
    /// Closed-form and fitted cooling rate over omega.
    #[command(args_override_self = true)]
    SweepRate(RunArgs),
    /// Fidelity against the effective detuning for several Rabi frequencies.
    #[command(args_override_self = true)]
    Fig5a(RunArgs),
    /// Cooling rate against the Rabi frequency at large detuning.
    #[command(args_override_self = true)]
    Fig5b(RunArgs),
    /// Two-qubit singlet fidelity against time.
    #[command(args_override_self = true)]
    Fig6(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

/// Flags shared by every command; each command ignores the ones it has no use for.
#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// Flat `key = value` file; flags on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// one-qubit or two-qubit-heisenberg.
    #[arg(long)]
    scenario: Option<String>,
    /// Rabi frequency in units of the decay rate.
    #[arg(long, value_parser = finite)]
    omega: Option<f64>,
    #[arg(long, value_parser = finite)]
    gamma: Option<f64>,
    /// Gap between the two qubit eigenvalues (one qubit).
    #[arg(long, value_parser = finite)]
    delta_lambda: Option<f64>,
    /// Heisenberg coupling J (two qubits).
    #[arg(long, value_parser = finite)]
    coupling_j: Option<f64>,
    /// Simulate only the eight single-excitation λ-states.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", action = ArgAction::Set)]
    truncate: Option<bool>,
    #[arg(long, value_parser = finite)]
    t_max: Option<f64>,
    #[arg(long, value_parser = finite)]
    dt: Option<f64>,
    /// Time between stored samples.
    #[arg(long, value_parser = finite)]
    sample_interval: Option<f64>,
    /// mixed, singlet, lambda<n> or basis<n>.
    #[arg(long)]
    initial_state: Option<String>,
    /// Comma-separated Rabi frequencies for sweeps.
    #[arg(long, value_delimiter = ',', value_parser = finite, action = ArgAction::Set)]
    omegas: Option<Vec<f64>>,
    #[arg(long, value_parser = finite)]
    delta_min: Option<f64>,
    #[arg(long, value_parser = finite)]
    delta_max: Option<f64>,
    #[arg(long)]
    delta_steps: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// svg also writes a plot next to the CSV.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Steady,
    Evolve,
    SweepFidelity,
    SweepRate,
    Fig5a,
    Fig5b,
    Fig6,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Evolve => "evolve",
            Command::SweepFidelity => "sweep-fidelity",
            Command::SweepRate => "sweep-rate",
            Command::Fig5a => "fig5a",
            Command::Fig5b => "fig5b",
            Command::Fig6 => "fig6",
        }
    }
}

/// Fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub scenario: ScenarioConfig,
    pub omegas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub out: PathBuf,
    pub format: Format,
    pub jobs: usize,
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn parse_cli<I, T>(args: I) -> Result<Cli, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args).map_err(|e| {
        let text = e.render().to_string();
        usage(text.trim_end().trim_start_matches("error: ").to_string())
    })
}

/// Parse `argv` (program name first), merging a `--config` file beneath the flags.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let first = parse_cli(argv.clone())?;
    let (command, args) = split(first.command);
    let args = match &args.config {
        None => args,
        Some(path) => {
            let from_file = config::read_config(path)?;
            let mut merged = argv[..2.min(argv.len())].to_vec();
            merged.extend(from_file);
            merged.extend(argv.iter().skip(2).cloned());
            split(parse_cli(merged)?.command).1
        }
    };
    resolve(command, args)
}

fn split(cmd: Cmd) -> (Command, RunArgs) {
    match cmd {
        Cmd::Steady(a) => (Command::Steady, a),
        Cmd::Evolve(a) => (Command::Evolve, a),
        Cmd::SweepFidelity(a) => (Command::SweepFidelity, a),
        Cmd::SweepRate(a) => (Command::SweepRate, a),
        Cmd::Fig5a(a) => (Command::Fig5a, a),
        Cmd::Fig5b(a) => (Command::Fig5b, a),
        Cmd::Fig6(a) => (Command::Fig6, a),
    }
}

fn resolve(command: Command, a: RunArgs) -> Result<RunConfig, UsageError> {
    let requested = a
        .scenario
        .as_deref()
        .map(|s| s.parse::<ScenarioKind>().map_err(|e| usage(e.to_string())))
        .transpose()?;
    let kind = match command {
        Command::Steady | Command::Evolve => requested.unwrap_or(ScenarioKind::OneQubit),
        Command::SweepFidelity | Command::SweepRate | Command::Fig5a | Command::Fig5b => {
            if requested == Some(ScenarioKind::TwoQubitHeisenberg) {
                return Err(usage(format!("{} only supports the one-qubit scenario", command.name())));
            }
            ScenarioKind::OneQubit
        }
        Command::Fig6 => {
            if requested == Some(ScenarioKind::OneQubit) {
                return Err(usage("fig6 only supports the two-qubit-heisenberg scenario"));
            }
            ScenarioKind::TwoQubitHeisenberg
        }
    };

    let mut sc = match kind {
        ScenarioKind::OneQubit => ScenarioConfig::one_qubit(1.0, 10.0),
        ScenarioKind::TwoQubitHeisenberg => ScenarioConfig::two_qubit(0.2, 5.0, command == Command::Fig6),
    };
    if matches!(command, Command::SweepRate | Command::Fig5b) {
        sc.delta_lambda = 20.0;
    }
    if let Some(v) = a.omega {
        sc.omega = v;
    }
    if let Some(v) = a.gamma {
        sc.gamma = v;
    }
    if let Some(v) = a.delta_lambda {
        sc.delta_lambda = v;
    }
    if let Some(v) = a.coupling_j {
        sc.coupling_j = v;
    }
    if let Some(v) = a.truncate {
        sc.truncate = v;
    }
    if let Some(v) = a.t_max {
        sc.t_max = v;
    }
    if a.dt.is_some() {
        sc.dt = a.dt;
    }
    if a.sample_interval.is_some() {
        sc.sample_interval = a.sample_interval;
    }
    if let Some(s) = &a.initial_state {
        sc.initial_state = s.parse::<InitialState>().map_err(|e| usage(e.to_string()))?;
    }
    sc.validate().map_err(|e| usage(e.to_string()))?;

    let default_omegas: Vec<f64> = match command {
        Command::SweepRate | Command::Fig5b => (1..=20).map(|k| 0.1 * k as f64).collect(),
        _ => vec![0.25, 0.5, 1.0, 2.0],
    };
    let omegas = a.omegas.unwrap_or(default_omegas);
    if omegas.is_empty() || omegas.iter().any(|&o| o < 0.0) {
        return Err(usage("--omegas must list non-negative values"));
    }
    let (lo, hi) = (a.delta_min.unwrap_or(0.0), a.delta_max.unwrap_or(50.0));
    let steps = a.delta_steps.unwrap_or(101);
    if steps == 0 || hi < lo {
        return Err(usage(format!("bad detuning grid: {steps} steps over [{lo}, {hi}]")));
    }
    let deltas: Vec<f64> = if steps == 1 {
        vec![lo]
    } else {
        (0..steps).map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64).collect()
    };

    let jobs = a.jobs.unwrap_or(1);
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let out = match a.out {
        Some(p) => p,
        None => {
            let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
            dir.join(format!("{}.csv", command.name()))
        }
    };

    Ok(RunConfig {
        command,
        scenario: sc,
        omegas,
        deltas,
        out,
        format: a.format.unwrap_or(Format::Csv),
        jobs,
    })
}

fn from_sweep(t: &SweepTable) -> Table {
    Table {
        header: t.columns.iter().map(|c| c.name.clone()).collect(),
        rows: t.rows.clone(),
    }
}

fn population_header(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("p_lambda{k}")).collect()
}

/// Execute a resolved configuration and write its outputs.
pub fn run(cfg: &RunConfig) -> Result<Table, CliError> {
    let table = compute(cfg)?;
    write_atomic(&cfg.out, &to_csv(&table)).map_err(|e| CliError::Io(cfg.out.clone(), e))?;
    if cfg.format == Format::Svg {
        if let Err(msg) = write_svg(cfg, &table) {
            eprintln!("warning: no plot written: {msg}");
        }
    }
    Ok(table)
}

/// The table a configuration produces, without touching the filesystem.
pub fn compute(cfg: &RunConfig) -> Result<Table, CliError> {
    let sc = &cfg.scenario;
    let table = match cfg.command {
        Command::Steady => {
            let scenario = build_scenario(sc)?;
            let result = steady_state(&scenario.liouvillian()?)?;
            let rho = scenario.to_lambda(&result.rho_ss);
            let lam = scenario.lambda.qubit_eigenvalues();
            let mut header: Vec<String> = ["omega", "gamma", "delta_lambda", "coupling_j", "detuning", "fidelity", "residual", "gap_indicator"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            header.extend(population_header(rho.nrows()));
            let mut row = vec![
                sc.omega,
                sc.gamma,
                lam[1] - lam[0],
                if sc.kind == ScenarioKind::OneQubit { 0.0 } else { sc.coupling_j },
                scenario.detuning,
                result.rho_ss.expectation(&scenario.target).clamp(0.0, 1.0),
                result.residual,
                result.gap_indicator,
            ];
            row.extend((0..rho.nrows()).map(|k| rho[(k, k)].re.max(0.0)));
            Table { header, rows: vec![row] }
        }
        Command::Evolve => {
            let scenario = build_scenario(sc)?;
            let traj = scenario.evolve()?;
            let f = traj.observable(FIDELITY).unwrap_or_default();
            let n = scenario.lambda_states.ncols();
            let mut header = vec!["t".to_string(), "fidelity".to_string()];
            header.extend(population_header(n));
            let rows = traj
                .times
                .iter()
                .zip(&traj.states)
                .zip(f)
                .map(|((&t, rho), &fid)| {
                    let lam = scenario.to_lambda(rho);
                    let mut row = vec![t, fid];
                    row.extend((0..n).map(|k| lam[(k, k)].re.max(0.0)));
                    row
                })
                .collect();
            Table { header, rows }
        }
        Command::SweepFidelity | Command::Fig5a => {
            from_sweep(&sweep_fidelity_vs_detuning(&cfg.omegas, &cfg.deltas, sc.gamma, cfg.jobs)?)
        }
        Command::SweepRate => from_sweep(&sweep_rate_vs_omega(&cfg.omegas, sc.delta_lambda, sc.gamma, cfg.jobs)?),
        Command::Fig5b => {
            let t = sweep_rate_vs_omega(&cfg.omegas, sc.delta_lambda, sc.gamma, cfg.jobs)?;
            from_sweep(&t.select(&["omega", "rate_formula", "rate_fit"]).expect("columns exist"))
        }
        Command::Fig6 => {
            let traj = build_scenario(sc)?.evolve()?;
            let f = traj.observable(FIDELITY).unwrap_or_default();
            let mut table = Table::new(["t", "fidelity"]);
            for (&t, &fid) in traj.times.iter().zip(f) {
                table.push(vec![t, fid]);
            }
            table
        }
    };
    Ok(table)
}

fn write_svg(cfg: &RunConfig, table: &Table) -> Result<(), String> {
    let (x, ys, group): (usize, Vec<usize>, Option<usize>) = match cfg.command {
        Command::SweepFidelity | Command::Fig5a => (1, vec![3], Some(0)),
        Command::SweepRate => (0, vec![1, 2, 3], None),
        Command::Fig5b => (0, vec![1, 2], None),
        Command::Evolve | Command::Fig6 => (0, vec![1], None),
        Command::Steady => {
            let n = table.header.len();
            (0, (8..n).collect(), None)
        }
    };
    let svg = render_svg(table, x, &ys, group)?;
    let path = svg_path(&cfg.out);
    write_atomic(&path, &svg).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn svg_path(csv: &Path) -> PathBuf {
    csv.with_extension("svg")
}

/// Parse, run and report. Returns the process exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if let Err(e) = Cli::try_parse_from(&argv) {
        if !e.use_stderr() {
            let _ = e.print();
            return EXIT_OK;
        }
    }
    let cfg = match parse_config(argv) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match run(&cfg) {
        Ok(_) => {
            eprintln!("wrote {}", cfg.out.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, UsageError> {
        parse_config(std::iter::once("dcool").chain(args.iter().copied()))
    }

    #[test]
    fn steady_flags_resolve() {
        let cfg = parse(&["steady", "--scenario", "one-qubit", "--omega", "1.0", "--delta-lambda", "10", "--out", "ss.csv"]).unwrap();
        assert_eq!(cfg.command, Command::Steady);
        assert_eq!(cfg.scenario.omega, 1.0);
        assert_eq!(cfg.scenario.delta_lambda, 10.0);
        assert_eq!(cfg.out, PathBuf::from("ss.csv"));
    }

    #[test]
    fn non_finite_values_are_usage_errors() {
        assert!(parse(&["steady", "--omega", "NaN"]).is_err());
        assert!(parse(&["steady", "--omega", "inf"]).is_err());
        assert!(parse(&["steady", "--omega", "-1"]).is_err());
        assert!(parse(&["fig6", "--coupling-j", "0"]).is_err());
        assert!(parse(&["fig5a", "--scenario", "two-qubit-heisenberg"]).is_err());
        assert!(parse(&["steady", "--bogus", "1"]).is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "omega = 0.5\ndelta_lambda = 7\n").unwrap();
        let p = path.to_str().unwrap();
        let cfg = parse(&["steady", "--config", p, "--omega", "1.0"]).unwrap();
        assert_eq!(cfg.scenario.omega, 1.0);
        assert_eq!(cfg.scenario.delta_lambda, 7.0);
        let cfg = parse(&["steady", "--omega", "1.0", "--config", p]).unwrap();
        assert_eq!(cfg.scenario.omega, 1.0);

        std::fs::write(&path, "omega = 0.5\nwhatever = 1\n").unwrap();
        let err = parse(&["steady", "--config", p]).unwrap_err();
        assert!(err.0.contains(":2:"), "{err}");
    }

    #[test]
    fn sweep_defaults() {
        let cfg = parse(&["fig5a"]).unwrap();
        assert_eq!(cfg.omegas, vec![0.25, 0.5, 1.0, 2.0]);
        assert_eq!(cfg.deltas.len(), 101);
        assert_eq!(cfg.deltas[100], 50.0);
        let cfg = parse(&["fig6"]).unwrap();
        assert!(cfg.scenario.truncate);
        assert_eq!(cfg.scenario.omega, 0.2);
        let cfg = parse(&["sweep-fidelity", "--omegas", "1,2", "--omegas", "3", "--delta-steps", "1"]).unwrap();
        assert_eq!(cfg.omegas, vec![3.0]);
        assert_eq!(cfg.deltas, vec![0.0]);
    }

    #[test]
    fn zero_rabi_steady_is_numerical_failure() {
        let cfg = parse(&["steady", "--omega", "0"]).unwrap();
        let err = compute(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_NUMERICAL);
        assert!(err.to_string().contains("DegenerateSteadyState"));
    }

    #[test]
    fn steady_table_matches_closed_form() {
        let cfg = parse(&["steady", "--omega", "1", "--delta-lambda", "10"]).unwrap();
        let t = compute(&cfg).unwrap();
        assert_eq!(t.header.len(), 12);
        assert!((t.rows[0][5] - 405.0 / 412.0).abs() < 1e-10);
    }
}

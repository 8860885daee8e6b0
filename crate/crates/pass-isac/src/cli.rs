//! The `pass-isac` command line.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pass_isac_core::monte_carlo::{point_config, Case, Curve, CurveSet, Design, McConfig, Mode, Sweep};
use pass_isac_core::multi_pinch::{optimize_beamformer, SearchConfig};
use pass_isac_core::single_pinch::pareto_design;
use pass_isac_core::{RateRegion, Scenario, SystemConfig};
use serde::Serialize;

use crate::config::{digest, InitName, RunConfig};
use crate::output::{write_json, write_rates_csv, write_region_csv, RunManifest, MANIFEST_FILE};
use crate::verify::{run_checks, VerifyOptions};
use crate::{runner, CliError};

#[derive(Debug, Parser)]
#[command(name = "pass-isac", version, about = "Rate regions of pinching-antenna ISAC systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Average C-C, S-C and fixed-antenna rates over a sweep.
    Rates(RatesArgs),
    /// Instantaneous or averaged rate regions.
    Region(RegionArgs),
    /// One rate-profile design as JSON.
    Pareto(ParetoArgs),
    /// Run the numerical self-checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "N")]
    pub trials: Option<usize>,
    /// Number of uniformly spaced profile parameters.
    #[arg(long, value_name = "N")]
    pub alpha_grid: Option<usize>,
    #[arg(long, value_name = "N")]
    pub antennas: Option<usize>,
    /// Side length of the placement rectangle along the waveguides (m).
    #[arg(long, value_name = "M")]
    pub dx: Option<f64>,
    /// Grid points of the element-wise search.
    #[arg(long, value_name = "Q")]
    pub grid_points: Option<usize>,
    /// Initializations of the element-wise search.
    #[arg(long, value_name = "N")]
    pub restarts: Option<usize>,
    #[arg(long, value_enum, value_name = "STRATEGY")]
    pub init: Option<InitName>,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub user_x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub user_y: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub target_x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub target_y: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Single,
    Multi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CaseArg {
    Ideal,
    Lossy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BoundArg {
    Inner,
    Outer,
    Both,
    Timeshare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepArg {
    /// Side length of the placement rectangle.
    Dx,
    /// Number of pinches (multi-pinch mode).
    N,
}

#[derive(Debug, Clone, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "single")]
    pub mode: ModeArg,
    /// Restrict to one waveguide case (default: both).
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    /// Swept parameter (default: dx in single mode, n in multi mode).
    #[arg(long, value_enum)]
    pub sweep: Option<SweepArg>,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value = "single")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "ideal")]
    pub case: CaseArg,
    #[arg(long, value_enum, default_value = "both")]
    pub bound: BoundArg,
    /// Region of the configured scenario instead of a Monte-Carlo average.
    #[arg(long)]
    pub instant: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ParetoArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value = "single")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "ideal")]
    pub case: CaseArg,
    /// Profile parameter in [0, 1]; 1 favours communication.
    #[arg(long)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Smaller sample counts.
    #[arg(long)]
    pub quick: bool,
    #[arg(long, hide = true)]
    pub inject_bad_fub: bool,
}

impl ModeArg {
    fn mode(self) -> Mode {
        match self {
            ModeArg::Single => Mode::Single,
            ModeArg::Multi => Mode::Multi,
        }
    }
}

impl CaseArg {
    fn case(self) -> Case {
        match self {
            CaseArg::Ideal => Case::Ideal,
            CaseArg::Lossy => Case::Lossy,
        }
    }
}

fn resolve(common: &CommonArgs, scenario: Option<&ScenarioArgs>) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mc = &mut cfg.monte_carlo;
    mc.seed = common.seed.unwrap_or(mc.seed);
    mc.trials = common.trials.unwrap_or(mc.trials);
    mc.alpha_points = common.alpha_grid.unwrap_or(mc.alpha_points);
    mc.dx_m = common.dx.unwrap_or(mc.dx_m);
    cfg.system.antennas = common.antennas.unwrap_or(cfg.system.antennas);
    let s = &mut cfg.search;
    s.grid_points = common.grid_points.unwrap_or(s.grid_points);
    s.restarts = common.restarts.unwrap_or(s.restarts);
    s.init = common.init.unwrap_or(s.init);
    if let Some(a) = scenario {
        let sc = &mut cfg.scenario;
        sc.user_x = a.user_x.unwrap_or(sc.user_x);
        sc.user_y = a.user_y.unwrap_or(sc.user_y);
        sc.target_x = a.target_x.unwrap_or(sc.target_x);
        sc.target_y = a.target_y.unwrap_or(sc.target_y);
    }
    let usage = |e: pass_isac_core::Error| CliError::Usage(e.to_string());
    cfg.monte_carlo.to_config().validate().map_err(usage)?;
    cfg.search.to_config().validate().map_err(usage)?;
    cfg.system.to_config().validate().map_err(usage)?;
    if cfg.monte_carlo.alpha_points < 2 {
        return Err(CliError::Usage("--alpha-grid must be at least 2".into()));
    }
    if cfg.system.antennas == 0 {
        return Err(CliError::Usage("--antennas must be at least 1".into()));
    }
    if common.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    Ok(cfg)
}

fn single_mode_antennas(mode: ModeArg, common: &CommonArgs) -> Result<(), CliError> {
    if mode == ModeArg::Single && common.antennas.is_some_and(|n| n != 1) {
        return Err(CliError::Usage("--antennas other than 1 requires --mode multi".into()));
    }
    Ok(())
}

/// The configured scenario, checked against the deployment range of `sys`.
fn checked_scenario(cfg: &RunConfig, sys: &SystemConfig) -> Result<Scenario, CliError> {
    let sc = cfg.scenario.to_scenario();
    sc.validate(sys).map_err(|e| CliError::Usage(format!("scenario: {e}")))?;
    let (lo, hi) = (sys.feed_x_t0, sys.deploy_max_x);
    for (name, x) in [("user_x", sc.user_x), ("target_x", sc.target_x)] {
        if x < lo || x > hi {
            return Err(CliError::Usage(format!("scenario: {name} = {x} outside the deployment range [{lo}, {hi}]")));
        }
    }
    Ok(sc)
}

/// Configuration of a run: deployment follows `mode`, loss follows `case`.
fn run_system(cfg: &RunConfig, mode: Mode, case: Case) -> SystemConfig {
    let mc = cfg.monte_carlo.to_config();
    point_config(&cfg.system.to_config(), mode, case, mc.dx_m, cfg.system.antennas, &mc)
}

#[derive(Serialize)]
struct Resolved<'a, T: Serialize> {
    command: &'a str,
    options: &'a T,
    config: &'a RunConfig,
}

struct Run<'a> {
    out: &'a Path,
    outputs: Vec<PathBuf>,
}

impl<'a> Run<'a> {
    fn new(out: &'a Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(out).map_err(|e| CliError::io(out.display().to_string(), e))?;
        Ok(Self { out, outputs: Vec::new() })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.outputs.push(PathBuf::from(name));
        self.out.join(name)
    }

    fn finish<T: Serialize>(
        self,
        name: &str,
        options: &T,
        cfg: &RunConfig,
        started: Instant,
    ) -> Result<RunManifest, CliError> {
        let resolved = Resolved { command: name, options, config: cfg };
        let options_json = serde_json::to_string(options).expect("options serialize");
        let manifest = RunManifest {
            config_hash: digest(&resolved),
            command: format!("{name} {options_json}"),
            seed: cfg.monte_carlo.seed,
            outputs: self.outputs,
            wall_time_s: started.elapsed().as_secs_f64(),
        };
        write_json(&self.out.join(MANIFEST_FILE), &manifest)?;
        Ok(manifest)
    }
}

#[derive(Serialize)]
struct RatesOptions {
    mode: ModeArg,
    cases: Vec<CaseArg>,
    sweep: SweepArg,
    values: Vec<f64>,
}

fn cmd_rates(args: &RatesArgs) -> Result<(), CliError> {
    let started = Instant::now();
    single_mode_antennas(args.mode, &args.common)?;
    let cfg = resolve(&args.common, None)?;
    let sweep_kind = args.sweep.unwrap_or(match args.mode {
        ModeArg::Single => SweepArg::Dx,
        ModeArg::Multi => SweepArg::N,
    });
    if args.mode == ModeArg::Single && sweep_kind == SweepArg::N {
        return Err(CliError::Usage("--sweep n requires --mode multi".into()));
    }
    let values = args.values.clone().unwrap_or_else(|| match sweep_kind {
        SweepArg::Dx => vec![10.0, 20.0, 30.0, 40.0],
        SweepArg::N => (1..=8).map(f64::from).collect(),
    });
    if values.is_empty() {
        return Err(CliError::Usage("--values must not be empty".into()));
    }
    let sweep = match sweep_kind {
        SweepArg::Dx => {
            if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                return Err(CliError::Usage("dx sweep values must be positive".into()));
            }
            Sweep::DeployLength(values.clone())
        }
        SweepArg::N => {
            if values.iter().any(|v| !(*v >= 1.0) || v.fract() != 0.0 || *v > 1e6) {
                return Err(CliError::Usage("n sweep values must be positive integers".into()));
            }
            Sweep::Antennas(values.iter().map(|&v| v as usize).collect())
        }
    };
    let cases = match args.case {
        Some(c) => vec![c],
        None => vec![CaseArg::Ideal, CaseArg::Lossy],
    };
    let sys = cfg.system.to_config();
    let mc = cfg.monte_carlo.to_config();
    let mode = args.mode.mode();
    let core_cases: Vec<Case> = cases.iter().map(|c| c.case()).collect();
    let designs = [Design::Cc, Design::Sc, Design::Fixed];
    let rows = runner::average_rates(&sys, &mc, &designs, mode, &sweep, &core_cases, &cfg.search.to_config())?;

    let mut run = Run::new(&args.common.out)?;
    for case in &core_cases {
        let subset: Vec<_> = rows.iter().filter(|r| r.case == *case).collect();
        write_rates_csv(&run.path(&format!("rates_{}.csv", case.label())), &subset)?;
    }
    let failed: usize = rows.iter().map(|r| r.summary.failed).sum();
    if failed > 0 {
        eprintln!("warning: {failed} trial evaluations failed and were excluded");
    }
    let options = RatesOptions { mode: args.mode, cases, sweep: sweep_kind, values };
    run.finish("rates", &options, &cfg, started)?;
    Ok(())
}

fn selected_curves(mode: Mode, bound: BoundArg) -> Result<Vec<Curve>, CliError> {
    let main = match mode {
        Mode::Single => Curve::Pass,
        Mode::Multi => Curve::Inner,
    };
    Ok(match bound {
        BoundArg::Both => mode.curves().to_vec(),
        BoundArg::Inner => vec![main, Curve::Fixed],
        BoundArg::Timeshare => vec![Curve::TimeShare, Curve::Fixed],
        BoundArg::Outer if mode == Mode::Multi => vec![Curve::Outer, Curve::Fixed],
        BoundArg::Outer => return Err(CliError::Usage("--bound outer requires --mode multi".into())),
    })
}

#[derive(Serialize)]
struct RegionOptions {
    mode: ModeArg,
    case: CaseArg,
    bound: BoundArg,
    instant: bool,
}

#[derive(Serialize)]
struct RegionFile {
    mode: ModeArg,
    case: CaseArg,
    completed: usize,
    failed: usize,
    curves: Vec<CurveOut>,
}

#[derive(Serialize)]
struct CurveOut {
    label: &'static str,
    vertices: Vec<[f64; 2]>,
}

fn curve_out(curve: Curve, region: &RateRegion) -> CurveOut {
    CurveOut { label: curve.label(), vertices: region.vertices().iter().map(|p| [p.cr, p.sr]).collect() }
}

fn cmd_region(args: &RegionArgs) -> Result<(), CliError> {
    let started = Instant::now();
    single_mode_antennas(args.mode, &args.common)?;
    let cfg = resolve(&args.common, Some(&args.scenario))?;
    let mode = args.mode.mode();
    let case = args.case.case();
    let curves = selected_curves(mode, args.bound)?;
    let mc = cfg.monte_carlo.to_config();
    let search = cfg.search.to_config();
    let (set, completed, failed): (CurveSet, usize, usize) = if args.instant {
        let sys = run_system(&cfg, mode, case);
        let sc = checked_scenario(&cfg, &sys)?;
        let set = pass_isac_core::monte_carlo::scenario_regions(
            &sys,
            &sc,
            mode,
            &curves,
            &mc.alpha_grid,
            mc.z_points,
            &search,
        )?;
        (set, 1, 0)
    } else {
        let avg = runner::average_region(&cfg.system.to_config(), &mc, mode, case, &curves, &search)?;
        (avg.curves, avg.completed, avg.failed)
    };
    if failed > 0 {
        eprintln!("warning: {failed} trials failed and were excluded");
    }

    let mut run = Run::new(&args.common.out)?;
    for (curve, region) in &set {
        write_region_csv(&run.path(&format!("region_{}.csv", curve.label())), region)?;
    }
    let file = RegionFile {
        mode: args.mode,
        case: args.case,
        completed,
        failed,
        curves: set.iter().map(|(c, r)| curve_out(*c, r)).collect(),
    };
    write_json(&run.path("region.json"), &file)?;
    let options = RegionOptions { mode: args.mode, case: args.case, bound: args.bound, instant: args.instant };
    run.finish("region", &options, &cfg, started)?;
    Ok(())
}

#[derive(Serialize)]
struct ParetoOptions {
    mode: ModeArg,
    case: CaseArg,
    alpha: f64,
}

#[derive(Debug, Serialize)]
pub struct ParetoOut {
    pub alpha: f64,
    pub positions: Vec<f64>,
    pub cr: f64,
    pub sr: f64,
    pub objective: f64,
}

fn pareto_point(cfg: &RunConfig, mode: Mode, case: Case, alpha: f64) -> Result<ParetoOut, CliError> {
    let sys = run_system(cfg, mode, case);
    let sc = checked_scenario(cfg, &sys)?;
    let (positions, rates) = match mode {
        Mode::Single => {
            let s = pareto_design(&sys, &sc, alpha)?;
            (vec![s.t_star], s.rates)
        }
        Mode::Multi => {
            let s = optimize_beamformer(&sys, &sc, alpha, &cfg.search.to_config())?;
            (s.beamformer.positions().to_vec(), s.rates)
        }
    };
    let objective = pass_isac_core::multi_pinch::objective_profile(
        &sys,
        &sc,
        &pass_isac_core::Beamformer::new(positions.clone())?,
        alpha,
    )?;
    Ok(ParetoOut { alpha, positions, cr: rates.cr, sr: rates.sr, objective })
}

fn cmd_pareto(args: &ParetoArgs) -> Result<(), CliError> {
    let started = Instant::now();
    single_mode_antennas(args.mode, &args.common)?;
    if !(0.0..=1.0).contains(&args.alpha) {
        return Err(CliError::Usage(format!("--alpha must lie in [0, 1], got {}", args.alpha)));
    }
    let cfg = resolve(&args.common, Some(&args.scenario))?;
    let point = pareto_point(&cfg, args.mode.mode(), args.case.case(), args.alpha)?;
    let mut run = Run::new(&args.common.out)?;
    write_json(&run.path("pareto.json"), &point)?;
    emit(&serde_json::to_string_pretty(&point).expect("serializable"))?;
    let options = ParetoOptions { mode: args.mode, case: args.case, alpha: args.alpha };
    run.finish("pareto", &options, &cfg, started)?;
    Ok(())
}

#[derive(Serialize)]
struct VerifyOptionsOut {
    quick: bool,
    inject_bad_fub: bool,
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = resolve(&args.common, None)?;
    let opts = VerifyOptions {
        seed: cfg.monte_carlo.seed,
        quick: args.quick,
        fub_scale: if args.inject_bad_fub { 0.5 } else { 1.0 },
    };
    let search: SearchConfig = cfg.search.to_config();
    let mc: McConfig = cfg.monte_carlo.to_config();
    let checks = run_checks(&cfg.system.to_config(), &mc, &search, &opts)?;
    for c in &checks {
        emit(&format!("{} {:<28} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))?;
    }
    let mut run = Run::new(&args.common.out)?;
    write_json(&run.path("verify.json"), &checks)?;
    let options = VerifyOptionsOut { quick: args.quick, inject_bad_fub: args.inject_bad_fub };
    run.finish("verify", &options, &cfg, started)?;
    match checks.iter().filter(|c| !c.passed).count() {
        0 => Ok(()),
        n => Err(CliError::Verification(n)),
    }
}

fn emit(line: &str) -> Result<(), CliError> {
    use std::io::Write;
    writeln!(std::io::stdout().lock(), "{line}").map_err(|e| CliError::io("stdout", e))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Rates(a) => cmd_rates(a),
        Command::Region(a) => cmd_region(a),
        Command::Pareto(a) => cmd_pareto(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Rates(a) => &a.common,
        Command::Region(a) => &a.common,
        Command::Pareto(a) => &a.common,
        Command::Verify(a) => &a.common,
    };
    match common.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            // keep diagnostics to one line; usage is available through --help
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("error: invalid arguments"));
            return 2;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! `vortexsim` subcommands.
//!
//! Each `cmd_*` function does the work and writes its files; [`run`] parses
//! arguments and maps errors onto exit codes (0 ok, 2 config, 3 numerical).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::bec_dynamics::{integrate, steady_state_ratio, CondensateAmplitudes, SteadyStateRatio, Trajectory};
use crate::config::{parse_plus_fraction, RunConfig};
use crate::error::{Error, Result};
use crate::export::{fmt_f, grid_csv, grid_header, grid_matrix, superposition_csv, trajectory_csv, write_file, Header};
use crate::grid::ComplexGrid;
use crate::mode_projection::{projected_coefficients, CoefficientReport};
use crate::optics_network::{mach_zehnder, renormalize_port, OamSuperposition, PathOamState, Port, SplitterSpec};
use crate::render::{lg_superposition_grid, CondensateImage};

/// Interferometer output and the renormalized port-1 state.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub ports: PathOamState,
    pub state: OamSuperposition,
    /// `‖port 1‖²` before renormalization
    pub probability: f64,
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let spec = cfg.optics.splitter()?;
    let ports = mach_zehnder(cfg.optics.ell, &spec, cfg.optics.phi)?;
    let state = renormalize_port(&ports, Port::One)?;
    let probability = ports.port1.norm_sqr();
    Ok(Prepared { ports, state, probability })
}

fn optics_header(h: &mut Header, cfg: &RunConfig) {
    h.push("experiment", cfg.experiment.clone())
        .push("input_ell", cfg.optics.ell.to_string())
        .complex("splitter_r", cfg.optics.r)
        .complex("splitter_t", cfg.optics.t)
        .num("phi_rad", cfg.optics.phi);
}

/// Runs the interferometer and writes `prepared_state.csv`.
pub fn cmd_prepare(cfg: &RunConfig, out: &Path) -> Result<Prepared> {
    let prepared = prepare(cfg)?;
    let mut h = Header::new("prepared_state");
    optics_header(&mut h, cfg);
    h.num("post_selection_probability", prepared.probability);
    write_file(out, "prepared_state.csv", &superposition_csv(&prepared.state, &h))?;
    Ok(prepared)
}

/// Scalar summary of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub min_f: f64,
    pub final_f: f64,
    pub max_norm_drift: f64,
    /// `None` when the vortex populations vanish in the tail.
    pub ratio: Option<SteadyStateRatio>,
}

impl RunSummary {
    pub fn of(traj: &Trajectory, tail_fraction: f64) -> Result<Self> {
        let ratio = match steady_state_ratio(traj, tail_fraction) {
            Ok(r) => Some(r),
            Err(Error::UndefinedRatio) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            min_f: traj.min_transfer(),
            final_f: traj.final_transfer(),
            max_norm_drift: traj.max_norm_drift(),
            ratio,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Evolved {
    pub prepared: Prepared,
    pub trajectory: Trajectory,
    pub summary: RunSummary,
}

/// prepare → integrate, without writing anything.
pub fn evolve(cfg: &RunConfig) -> Result<Evolved> {
    let prepared = prepare(cfg)?;
    let params = cfg.physical_params(&prepared.state);
    let ig = &cfg.integration;
    let trajectory = integrate(CondensateAmplitudes::ground(), &params, &cfg.schedule, ig.t_end, ig.tol, ig.samples)?;
    let summary = RunSummary::of(&trajectory, ig.tail_fraction)?;
    Ok(Evolved { prepared, trajectory, summary })
}

/// Runs [`evolve`] and writes `trajectory.csv`.
pub fn cmd_evolve(cfg: &RunConfig, out: &Path) -> Result<Evolved> {
    let run = evolve(cfg)?;
    let mut h = Header::new("trajectory");
    optics_header(&mut h, cfg);
    h.num("post_selection_probability", run.prepared.probability)
        .params(&run.trajectory.params)
        .schedule(&cfg.schedule)
        .num("t_end_s", cfg.integration.t_end)
        .num("tol", cfg.integration.tol)
        .push("samples", cfg.integration.samples.to_string())
        .push("accepted_steps", run.trajectory.stats.accepted.to_string())
        .push("rejected_steps", run.trajectory.stats.rejected.to_string());
    write_file(out, "trajectory.csv", &trajectory_csv(&run.trajectory, &h))?;
    Ok(run)
}

#[derive(Debug, Clone)]
pub struct Rendered {
    pub image: CondensateImage,
    pub vortex: ComplexGrid,
    pub interference: ComplexGrid,
    pub optical: ComplexGrid,
    pub files: Vec<PathBuf>,
}

/// Writes condensate density/phase, interference and LG-beam grids.
pub fn cmd_render(cfg: &RunConfig, out: &Path) -> Result<Rendered> {
    let prepared = prepare(cfg)?;
    let ell = cfg.vortex_charge() as i32;
    let [beta_plus, beta_minus] = cfg
        .render
        .beta
        .unwrap_or([prepared.state.amplitude(ell), prepared.state.amplitude(-ell)]);
    let image = CondensateImage { mode: cfg.condensate_mode(), beta_plus, beta_minus, admixture: cfg.render.admixture };
    let rc = &cfg.render;
    let vortex = image.vortex_grid(rc.half_width, rc.n)?;
    let interference = image.interference_grid(rc.half_width, rc.n)?;
    let optical = lg_superposition_grid(&prepared.state, rc.lg_waist, rc.lg_half_width, rc.n)?;

    let header = |kind: &str, g: &ComplexGrid| {
        let mut h = grid_header(kind, g);
        h.push("experiment", cfg.experiment.clone())
            .push("ell", ell.to_string())
            .complex("beta_plus", beta_plus)
            .complex("beta_minus", beta_minus)
            .complex("admixture", rc.admixture)
            .num("l_perp_m", rc.l_perp)
            .num("l_z_m", rc.l_z);
        h
    };
    let mut files = Vec::new();
    let vh = header("vortex_field", &vortex);
    files.push(write_file(out, "vortex_field.csv", &grid_csv(&vortex, &vh))?);
    files.push(write_file(out, "vortex_density.txt", &grid_matrix(&vortex, &vh, |c| c.norm_sqr()))?);
    files.push(write_file(out, "vortex_phase.txt", &grid_matrix(&vortex, &vh, |c| c.arg()))?);
    let ih = header("interference_field", &interference);
    files.push(write_file(out, "interference_field.csv", &grid_csv(&interference, &ih))?);
    files.push(write_file(out, "interference_density.txt", &grid_matrix(&interference, &ih, |c| c.norm_sqr()))?);
    let mut oh = grid_header("lg_field", &optical);
    optics_header(&mut oh, cfg);
    oh.push("p", "0").num("w0_m", rc.lg_waist);
    files.push(write_file(out, "lg_field.csv", &grid_csv(&optical, &oh))?);
    files.push(write_file(out, "lg_intensity.txt", &grid_matrix(&optical, &oh, |c| c.norm_sqr()))?);
    files.push(write_file(out, "lg_phase.txt", &grid_matrix(&optical, &oh, |c| c.arg()))?);
    Ok(Rendered { image, vortex, interference, optical, files })
}

/// Parameters that [`cmd_sweep`] can scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    /// detuning intercept δ₀, Hz
    Delta0,
    /// detuning slope, Hz/s
    Slope,
    /// Raman coupling Ω_R, Hz
    Coupling,
    /// interaction rate κ, Hz
    Kappa,
    /// first-splitter transmitted fraction |t|²
    SplitterRatio,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Delta0 => "delta0",
            SweepParam::Slope => "slope",
            SweepParam::Coupling => "coupling",
            SweepParam::Kappa => "kappa",
            SweepParam::SplitterRatio => "splitter-ratio",
        }
    }

    pub fn apply(self, cfg: &RunConfig, value: f64) -> Result<RunConfig> {
        let mut c = cfg.clone();
        match self {
            SweepParam::Delta0 => c.schedule = c.schedule.with_delta0(value),
            SweepParam::Slope => c.schedule = c.schedule.with_slope(value),
            SweepParam::Coupling => c.dynamics.coupling = Some(value),
            SweepParam::Kappa => c.dynamics.kappa = value,
            SweepParam::SplitterRatio => {
                let s = SplitterSpec::from_transmission(value)?;
                c.optics.r = s.r;
                c.optics.t = s.t;
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub summary: RunSummary,
}

/// Independent runs per value, evaluated in parallel and reported in input order.
pub fn sweep(cfg: &RunConfig, param: SweepParam, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Config("sweep range is empty".into()));
    }
    values
        .par_iter()
        .map(|&value| {
            let run = evolve(&param.apply(cfg, value)?)?;
            Ok(SweepRow { value, summary: run.summary })
        })
        .collect()
}

/// Runs [`sweep`] and writes `sweep_<param>.csv`.
pub fn cmd_sweep(cfg: &RunConfig, param: SweepParam, values: &[f64], out: &Path) -> Result<Vec<SweepRow>> {
    let rows = sweep(cfg, param, values)?;
    let mut h = Header::new("sweep");
    optics_header(&mut h, cfg);
    let base = cfg.physical_params(&prepare(cfg)?.state);
    h.push("parameter", param.name())
        .params(&base)
        .schedule(&cfg.schedule)
        .num("t_end_s", cfg.integration.t_end)
        .num("tol", cfg.integration.tol)
        .num("tail_fraction", cfg.integration.tail_fraction);
    let mut text = h.render();
    text.push_str("value,min_f,final_f,tail_ratio_plus,tail_ratio_minus,tail_f_oscillation,max_norm_drift\n");
    let na = || "NA".to_string();
    for row in &rows {
        let s = &row.summary;
        let cols = [
            fmt_f(row.value),
            fmt_f(s.min_f),
            fmt_f(s.final_f),
            s.ratio.map_or_else(na, |r| fmt_f(r.plus)),
            s.ratio.map_or_else(na, |r| fmt_f(r.minus)),
            s.ratio.map_or_else(na, |r| fmt_f(r.transfer_oscillation)),
            fmt_f(s.max_norm_drift),
        ];
        text.push_str(&cols.join(","));
        text.push('\n');
    }
    write_file(out, &format!("sweep_{}.csv", param.name()), &text)?;
    Ok(rows)
}

/// Writes `coefficients.tsv` from the projection settings.
pub fn cmd_coefficients(cfg: &RunConfig, out: &Path) -> Result<CoefficientReport> {
    let prepared = prepare(cfg)?;
    let mut mode = cfg.condensate_mode();
    mode.l_perp = cfg.projection.trap.l_perp;
    mode.l_z = cfg.projection.trap.l_z;
    let report = projected_coefficients(&mode, &cfg.projection.trap, &cfg.rabi_profile(&prepared.state), cfg.projection.order)?;
    write_file(out, "coefficients.tsv", &report.to_text())?;
    Ok(report)
}

/// Parses a `start:stop:count` range (inclusive, evenly spaced).
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Config(format!("range `{text}` must be start:stop:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    match count {
        0 => Err(Error::Config("sweep range is empty".into())),
        1 => Ok(vec![start]),
        n => Ok((0..n).map(|k| start + (stop - start) * k as f64 / (n - 1) as f64).collect()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "vortexsim", version, about = "OAM superposition preparation and Raman transfer onto a condensate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML run configuration
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// transfer-function preset
    #[arg(long, value_name = "a|b|c|d", conflicts_with = "fig4")]
    fig3: Option<String>,
    /// swept run with |a+|^2 given as a fraction (0.8) or ratio (80:20)
    #[arg(long, value_name = "RATIO")]
    fig4: Option<String>,
    /// output directory (overrides the config)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the interferometer and write the prepared superposition
    Prepare(CommonArgs),
    /// Integrate the condensate amplitudes and write the trajectory
    Evolve(CommonArgs),
    /// Write condensate and optical field grids
    Render(CommonArgs),
    /// Scan one parameter and write a summary table
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// comma-separated values
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "range")]
        values: Vec<f64>,
        /// start:stop:count
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
    },
    /// Write the recomputed projected-equation coefficients
    Coefficients(CommonArgs),
    /// Print the resolved configuration as TOML
    Config(CommonArgs),
}

fn resolve(args: &CommonArgs) -> Result<(RunConfig, PathBuf)> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(case) = &args.fig3 {
        let preset = RunConfig::fig3(case.parse()?);
        cfg.experiment = preset.experiment;
        cfg.schedule = preset.schedule;
        cfg.optics = preset.optics;
    }
    if let Some(ratio) = &args.fig4 {
        let preset = RunConfig::fig4(parse_plus_fraction(ratio)?)?;
        cfg.experiment = preset.experiment;
        cfg.schedule = preset.schedule;
        cfg.optics = preset.optics;
    }
    if let Some(out) = &args.out {
        cfg.output.dir = out.clone();
    }
    cfg.validate()?;
    let out = cfg.output.dir.clone();
    Ok((cfg, out))
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Prepare(a) => {
            let (cfg, out) = resolve(&a)?;
            let p = cmd_prepare(&cfg, &out)?;
            println!("post-selection probability {:.12}", p.probability);
            for (ell, c) in p.state.iter() {
                println!("  |{ell:+}>  {:+.12} {:+.12}i", c.re, c.im);
            }
        }
        Command::Evolve(a) => {
            let (cfg, out) = resolve(&a)?;
            let run = cmd_evolve(&cfg, &out)?;
            let s = run.summary;
            print!("{}: min f {:.6}  final f {:.6}  norm drift {:.2e}", cfg.experiment, s.min_f, s.final_f, s.max_norm_drift);
            match s.ratio {
                Some(r) => println!("  tail |b+|^2:|b-|^2 = {:.4}:{:.4}", r.plus, r.minus),
                None => println!("  tail ratio undefined"),
            }
        }
        Command::Render(a) => {
            let (cfg, out) = resolve(&a)?;
            let r = cmd_render(&cfg, &out)?;
            for f in r.files {
                println!("{}", f.display());
            }
        }
        Command::Sweep { common, param, values, range } => {
            let (cfg, out) = resolve(&common)?;
            let values = match range {
                Some(r) => parse_range(&r)?,
                None => values,
            };
            let rows = cmd_sweep(&cfg, param, &values, &out)?;
            for row in rows {
                println!("{} = {:.6e}: min f {:.6}  final f {:.6}", param.name(), row.value, row.summary.min_f, row.summary.final_f);
            }
        }
        Command::Coefficients(a) => {
            let (cfg, out) = resolve(&a)?;
            let report = cmd_coefficients(&cfg, &out)?;
            print!("{}", report.to_text());
        }
        Command::Config(a) => {
            let (cfg, _) = resolve(&a)?;
            print!("{}", cfg.to_toml_string()?);
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! The `quadvortex` command line.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::exportio::{read_field_csv, OutputDir, RunConfig};
use crate::fockspace::{
    diagonal_weight, joint_distribution, make_squeezed_input, mandel_q, Mode, PhotonDistribution,
    SqueezeConfig,
};
use crate::modeconverter::{analytic_joint_table, apply_rotation, run_audit};
use crate::quadfield::{
    eval_fock_field, eval_lg_superposition, phase_map, ComplexField, GridSpec, LgOptions, OddNReading,
    RadialForm, DEFAULT_EXTENT, DEFAULT_RESOLUTION,
};
use crate::specfun::MAX_ORDER;
use crate::vortexdetect::{
    detect_vortices, DetectionParams, Vortex, VortexReport, DEFAULT_AMPLITUDE_FLOOR, DEFAULT_MERGE_RADIUS,
};

#[derive(Debug, Parser)]
#[command(name = "quadvortex", version, about = "Twin-Fock squeezed light through a quadrature-rotation mode converter")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize one field, render it and count its vortices.
    Simulate(SimulateArgs),
    /// Photon-number statistics of the input and rotated states.
    Stats(StatsArgs),
    /// Compare the closed-form rotation coefficients with the exact unitary.
    Audit(AuditArgs),
    /// Count vortices in a field previously written as CSV.
    Detect(DetectArgs),
    /// Run every figure panel and write a summary of vortex counts.
    ReproduceFigures(FiguresArgs),
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Photon-number cap N of the twin-Fock input.
    #[arg(long)]
    pub n_photons: usize,
    /// Squeezing parameter r.
    #[arg(long)]
    pub squeeze: f64,
    /// Rotation angle in radians.
    #[arg(long, default_value_t = FRAC_PI_4)]
    pub phi: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Samples per axis.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub grid: usize,
    /// Half-width of the square grid.
    #[arg(long, default_value_t = DEFAULT_EXTENT)]
    pub extent: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DetectionArgs {
    /// Amplitude floor relative to the field maximum.
    #[arg(long, default_value_t = DEFAULT_AMPLITUDE_FLOOR)]
    pub floor: f64,
    /// Cluster radius in grid spacings.
    #[arg(long, default_value_t = DEFAULT_MERGE_RADIUS)]
    pub merge_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldSource {
    /// Laguerre-Gauss superposition.
    Lg,
    /// Hermite-Gauss expansion of the oracle-rotated state.
    Fock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OddNArg {
    HalfInteger,
    FloorResidual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RadialArg {
    Bare,
    Standard,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[arg(long, value_enum, default_value_t = FieldSource::Lg)]
    pub field_source: FieldSource,
    /// Reading of the LG sum for odd N.
    #[arg(long, value_enum, default_value_t = OddNArg::FloorResidual)]
    pub odd_n: OddNArg,
    /// Radial factor of each LG term.
    #[arg(long, value_enum, default_value_t = RadialArg::Bare)]
    pub lg_radial: RadialArg,
}

impl FieldArgs {
    fn lg_options(&self) -> LgOptions {
        LgOptions {
            odd_n: match self.odd_n {
                OddNArg::HalfInteger => OddNReading::HalfInteger,
                OddNArg::FloorResidual => OddNReading::FloorResidual,
            },
            radial: match self.lg_radial {
                RadialArg::Bare => RadialForm::Bare,
                RadialArg::Standard => RadialForm::Standard,
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub detection: DetectionArgs,
    #[command(flatten)]
    pub field: FieldArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    /// Field CSV with header `x,y,re,im`.
    pub input: PathBuf,
    #[command(flatten)]
    pub detection: DetectionArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub detection: DetectionArgs,
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub out: PathBuf,
}

fn squeeze_config(a: &StateArgs) -> anyhow::Result<SqueezeConfig> {
    if a.n_photons > MAX_ORDER as usize {
        bail!("--n-photons {} exceeds the cap {MAX_ORDER}", a.n_photons);
    }
    Ok(SqueezeConfig::new(a.n_photons, a.squeeze, a.phi)?)
}

fn grid_spec(a: &GridArgs) -> anyhow::Result<GridSpec> {
    Ok(GridSpec::new(a.extent, a.grid)?)
}

fn detection_params(a: &DetectionArgs) -> anyhow::Result<DetectionParams> {
    Ok(DetectionParams::new(a.floor, a.merge_radius)?)
}

/// Which field a panel renders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldRoute {
    Lg(LgOptions),
    /// Input state rotated by the exact unitary, then expanded in HG modes.
    RotatedFock,
    /// Unrotated input state.
    InputFock,
}

impl FieldRoute {
    fn label(self) -> &'static str {
        match self {
            FieldRoute::Lg(_) => "lg",
            FieldRoute::RotatedFock => "fock",
            FieldRoute::InputFock => "fock-input",
        }
    }

    fn from_args(a: &FieldArgs) -> Self {
        match a.field_source {
            FieldSource::Lg => FieldRoute::Lg(a.lg_options()),
            FieldSource::Fock => FieldRoute::RotatedFock,
        }
    }
}

pub fn build_field(cfg: &SqueezeConfig, grid: &GridSpec, route: FieldRoute) -> crate::Result<ComplexField> {
    match route {
        FieldRoute::Lg(opts) => eval_lg_superposition(cfg, grid, opts),
        FieldRoute::RotatedFock => eval_fock_field(&apply_rotation(&make_squeezed_input(cfg), cfg.phi)?, grid),
        FieldRoute::InputFock => eval_fock_field(&make_squeezed_input(cfg), grid),
    }
}

/// One field panel: what to render and the vortex count it should show.
#[derive(Debug, Clone)]
pub struct FieldPanel {
    pub name: String,
    pub cfg: SqueezeConfig,
    pub grid: GridSpec,
    pub params: DetectionParams,
    pub route: FieldRoute,
    pub expected_count: usize,
}

/// Written when a panel's detected count differs from the expected one.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyRecord {
    pub panel: String,
    pub n_photons: usize,
    pub r: f64,
    pub phi: f64,
    pub field_source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lg: Option<LgOptions>,
    pub expected_count: usize,
    pub detected_count: usize,
    pub total_charge: i32,
    pub vortices: Vec<Vortex>,
}

#[derive(Debug, Clone)]
pub struct PanelOutcome {
    pub report: VortexReport,
    pub discrepancy: Option<DiscrepancyRecord>,
}

/// Render a panel into `dir`: field.csv, amplitude.pgm, phase.ppm,
/// vortices.json, discrepancy.json when the count is off, manifest.json.
pub fn run_field_panel(dir: &Path, panel: &FieldPanel) -> crate::Result<PanelOutcome> {
    let field = build_field(&panel.cfg, &panel.grid, panel.route)?;
    let report = detect_vortices(&field, &panel.params)?;

    let mut config = RunConfig::new("simulate");
    config.squeeze = Some(panel.cfg);
    config.grid = Some(panel.grid);
    config.detection = Some(panel.params);
    config.field_source = Some(panel.route.label().to_string());
    if let FieldRoute::Lg(opts) = panel.route {
        config.lg = Some(opts);
    }
    let mut out = OutputDir::create(dir, config)?;
    out.field_csv("field.csv", &field)?;
    out.amplitude_pgm("amplitude.pgm", &field)?;
    out.phase_ppm("phase.ppm", &phase_map(&field))?;
    out.json("vortices.json", &report)?;

    let discrepancy = (report.count != panel.expected_count).then(|| DiscrepancyRecord {
        panel: panel.name.clone(),
        n_photons: panel.cfg.n_total,
        r: panel.cfg.r,
        phi: panel.cfg.phi,
        field_source: panel.route.label().to_string(),
        lg: match panel.route {
            FieldRoute::Lg(opts) => Some(opts),
            _ => None,
        },
        expected_count: panel.expected_count,
        detected_count: report.count,
        total_charge: report.total_charge,
        vortices: report.vortices.clone(),
    });
    if let Some(d) = &discrepancy {
        out.json("discrepancy.json", d)?;
    }
    out.finish()?;
    Ok(PanelOutcome { report, discrepancy })
}

#[derive(Debug, Clone, Serialize)]
pub struct MandelEntry {
    pub state: &'static str,
    pub mode: &'static str,
    /// Absent when the mean photon number is zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub label: &'static str,
}

fn mandel_entry(state: &'static str, mode: Mode, dist: &PhotonDistribution) -> crate::Result<MandelEntry> {
    let q = match mandel_q(&dist.mode_marginal(mode)) {
        Ok(q) => Some(q),
        Err(crate::Error::Undefined(_)) => None,
        Err(e) => return Err(e),
    };
    let label = match q {
        None => "undefined",
        Some(q) if q.abs() <= 1e-12 => "poissonian",
        Some(q) if q < 0.0 => "sub-poissonian",
        Some(_) => "super-poissonian",
    };
    Ok(MandelEntry {
        state,
        mode: match mode {
            Mode::A => "a",
            Mode::B => "b",
        },
        q,
        label,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsReport {
    pub config: SqueezeConfig,
    pub diagonal_weight_input: f64,
    pub diagonal_weight_rotated: f64,
    pub off_diagonal_mass_input: f64,
    pub off_diagonal_mass_rotated_oracle: f64,
    pub off_diagonal_mass_rotated_analytic: f64,
    pub analytic_skipped_terms: usize,
    pub mandel_q: Vec<MandelEntry>,
}

/// Statistics of the input and rotated states written into `dir`.
pub fn run_stats(dir: &Path, cfg: &SqueezeConfig) -> crate::Result<StatsReport> {
    let input = make_squeezed_input(cfg);
    let rotated = apply_rotation(&input, cfg.phi)?;
    let p_in = joint_distribution(&input)?;
    let p_oracle = joint_distribution(&rotated)?;
    let table = analytic_joint_table(cfg);
    let p_analytic = PhotonDistribution::from_joint(table.truncation(), table.probabilities().to_vec())?;

    let mut mandel = Vec::with_capacity(4);
    for (label, dist) in [("input", &p_in), ("rotated", &p_oracle)] {
        for mode in [Mode::A, Mode::B] {
            mandel.push(mandel_entry(label, mode, dist)?);
        }
    }
    let report = StatsReport {
        config: *cfg,
        diagonal_weight_input: diagonal_weight(&input),
        diagonal_weight_rotated: diagonal_weight(&rotated),
        off_diagonal_mass_input: p_in.off_diagonal_mass(),
        off_diagonal_mass_rotated_oracle: p_oracle.off_diagonal_mass(),
        off_diagonal_mass_rotated_analytic: p_analytic.off_diagonal_mass(),
        analytic_skipped_terms: table.skipped_terms,
        mandel_q: mandel,
    };

    let mut config = RunConfig::new("stats");
    config.squeeze = Some(*cfg);
    let mut out = OutputDir::create(dir, config)?;
    out.json("input_pn.json", &p_in)?;
    out.json("rotated_pn_oracle.json", &p_oracle)?;
    out.json("rotated_pn_analytic.json", &p_analytic)?;
    out.json("stats.json", &report)?;
    out.finish()?;
    Ok(report)
}

/// One line of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct PanelSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub r: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_charge: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagonal_weight_rotated: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub off_diagonal_mass_rotated: Option<f64>,
}

pub const FIG1_PHOTONS: usize = 10;
pub const FIG1_SQUEEZE: [f64; 3] = [1.0, 0.5, 0.1];
pub const FIG2_PHOTONS: [usize; 2] = [1, 2];
pub const FIG2_SQUEEZE: [f64; 3] = [1.0, 0.5, 0.02];
pub const FIG3_SQUEEZE: f64 = 0.02;
pub const FIG4_PHOTONS: [usize; 2] = [5, 10];
pub const FIG4_SQUEEZE: [f64; 5] = [1.0, 0.5, 0.2, 0.1, 0.05];

enum PanelJob {
    Field(FieldPanel),
    Stats { name: String, cfg: SqueezeConfig },
}

fn figure_jobs(grid: GridSpec, params: DetectionParams, route: FieldRoute) -> crate::Result<Vec<PanelJob>> {
    let mut jobs = Vec::new();
    let field = |name: String, n: usize, r: f64, route: FieldRoute, expected: usize| -> crate::Result<PanelJob> {
        Ok(PanelJob::Field(FieldPanel {
            name,
            cfg: SqueezeConfig::new(n, r, FRAC_PI_4)?,
            grid,
            params,
            route,
            expected_count: expected,
        }))
    };
    for r in FIG1_SQUEEZE {
        jobs.push(field(format!("fig1_r{r}"), FIG1_PHOTONS, r, FieldRoute::InputFock, 0)?);
    }
    let mut letter = b'a';
    for n in FIG2_PHOTONS {
        for r in FIG2_SQUEEZE {
            jobs.push(field(format!("fig2{}", letter as char), n, r, route, n)?);
            letter += 1;
        }
    }
    for (k, n) in (3..=8).enumerate() {
        jobs.push(field(format!("fig3{}", (b'a' + k as u8) as char), n, FIG3_SQUEEZE, route, n)?);
    }
    for n in FIG4_PHOTONS {
        for r in FIG4_SQUEEZE {
            jobs.push(PanelJob::Stats {
                name: format!("fig4_N{n}_r{r}"),
                cfg: SqueezeConfig::new(n, r, FRAC_PI_4)?,
            });
        }
    }
    Ok(jobs)
}

/// Run every panel in parallel under `root` and write `summary.json`.
pub fn reproduce_figures(
    root: &Path,
    grid: GridSpec,
    params: DetectionParams,
    route: FieldRoute,
) -> crate::Result<BTreeMap<String, PanelSummary>> {
    let jobs = figure_jobs(grid, params, route)?;
    let results: Vec<(String, PanelSummary)> = jobs
        .par_iter()
        .map(|job| match job {
            PanelJob::Field(panel) => {
                let outcome = run_field_panel(&root.join(&panel.name), panel)?;
                Ok((
                    panel.name.clone(),
                    PanelSummary {
                        n: panel.cfg.n_total,
                        r: panel.cfg.r,
                        count: Some(outcome.report.count),
                        total_charge: Some(outcome.report.total_charge),
                        expected_count: Some(panel.expected_count),
                        field_source: Some(panel.route.label().to_string()),
                        discrepancy: Some(outcome.discrepancy.is_some()),
                        diagonal_weight_rotated: None,
                        off_diagonal_mass_rotated: None,
                    },
                ))
            }
            PanelJob::Stats { name, cfg } => {
                let stats = run_stats(&root.join(name), cfg)?;
                Ok((
                    name.clone(),
                    PanelSummary {
                        n: cfg.n_total,
                        r: cfg.r,
                        count: None,
                        total_charge: None,
                        expected_count: None,
                        field_source: None,
                        discrepancy: None,
                        diagonal_weight_rotated: Some(stats.diagonal_weight_rotated),
                        off_diagonal_mass_rotated: Some(stats.off_diagonal_mass_rotated_oracle),
                    },
                ))
            }
        })
        .collect::<crate::Result<_>>()?;
    let summary: BTreeMap<String, PanelSummary> = results.into_iter().collect();
    crate::exportio::write_json_report(&summary, root.join("summary.json"))?;
    Ok(summary)
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Simulate(a) => {
            let cfg = squeeze_config(&a.state)?;
            let panel = FieldPanel {
                name: "simulate".into(),
                cfg,
                grid: grid_spec(&a.grid)?,
                params: detection_params(&a.detection)?,
                route: FieldRoute::from_args(&a.field),
                expected_count: cfg.n_total,
            };
            let outcome = run_field_panel(&a.out, &panel)
                .with_context(|| format!("simulate into {}", a.out.display()))?;
            println!(
                "N={} r={} count={} total_charge={}{}",
                cfg.n_total,
                cfg.r,
                outcome.report.count,
                outcome.report.total_charge,
                if outcome.discrepancy.is_some() { " (discrepancy.json written)" } else { "" }
            );
        }
        Command::Stats(a) => {
            let cfg = squeeze_config(&a.state)?;
            let s = run_stats(&a.out, &cfg).with_context(|| format!("stats into {}", a.out.display()))?;
            println!(
                "diagonal weight {:.6} -> {:.6}, off-diagonal mass after rotation {:.6e}",
                s.diagonal_weight_input, s.diagonal_weight_rotated, s.off_diagonal_mass_rotated_oracle
            );
        }
        Command::Audit(a) => {
            let cfg = squeeze_config(&a.state)?;
            let report = run_audit(&cfg)?;
            let mut config = RunConfig::new("audit");
            config.squeeze = Some(cfg);
            let mut out = OutputDir::create(&a.out, config)?;
            out.json("audit.json", &report)?;
            out.finish()?;
            println!(
                "max amplitude deviation {:.3e}, max probability deviation {:.3e}, {} discrepancies",
                report.max_amplitude_deviation,
                report.max_probability_deviation,
                report.discrepancies.len()
            );
        }
        Command::Detect(a) => {
            let params = detection_params(&a.detection)?;
            let field = read_field_csv(&a.input)?;
            let report = detect_vortices(&field, &params)?;
            let mut config = RunConfig::new("detect");
            config.grid = Some(*field.grid());
            config.detection = Some(params);
            config.input = Some(a.input.display().to_string());
            let mut out = OutputDir::create(&a.out, config)?;
            out.json("vortices.json", &report)?;
            out.finish()?;
            println!("count={} total_charge={}", report.count, report.total_charge);
        }
        Command::ReproduceFigures(a) => {
            let summary = reproduce_figures(
                &a.out,
                grid_spec(&a.grid)?,
                detection_params(&a.detection)?,
                FieldRoute::from_args(&a.field),
            )
            .with_context(|| format!("reproduce-figures into {}", a.out.display()))?;
            for (name, s) in &summary {
                if let Some(count) = s.count {
                    println!("{name}: N={} r={} count={count}", s.n, s.r);
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["quadvortex", "simulate", "--n-photons", "3", "--squeeze", "0.02", "--out", "x"]).unwrap();
        let Command::Simulate(a) = cli.command else { panic!() };
        assert_eq!(a.state.phi, FRAC_PI_4);
        assert_eq!((a.grid.grid, a.grid.extent), (512, 6.0));
        assert_eq!((a.detection.floor, a.detection.merge_radius), (1e-3, 3.0));
        assert_eq!(a.field.field_source, FieldSource::Lg);
    }

    #[test]
    fn unknown_flags_fail() {
        assert!(Cli::try_parse_from(["quadvortex", "audit", "--n-photons", "2", "--squeeze", "0.5", "--out", "x", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["quadvortex", "stats", "--n-photons", "-1", "--squeeze", "0.5", "--out", "x"]).is_err());
    }

    #[test]
    fn panel_names() {
        let jobs = figure_jobs(GridSpec::default(), DetectionParams::default(), FieldRoute::RotatedFock).unwrap();
        let names: Vec<String> = jobs
            .iter()
            .map(|j| match j {
                PanelJob::Field(p) => p.name.clone(),
                PanelJob::Stats { name, .. } => name.clone(),
            })
            .collect();
        assert_eq!(names.len(), 3 + 6 + 6 + 10);
        assert!(names.contains(&"fig2c".to_string()));
        assert!(names.contains(&"fig3f".to_string()));
        assert!(names.contains(&"fig1_r0.1".to_string()));
        assert!(names.contains(&"fig4_N10_r0.05".to_string()));
        let PanelJob::Field(c) = &jobs[5] else { panic!() };
        assert_eq!((c.name.as_str(), c.cfg.n_total, c.cfg.r), ("fig2c", 1, 0.02));
    }

    #[test]
    fn mandel_labels() {
        let cfg = SqueezeConfig::new(0, 0.3, FRAC_PI_4).unwrap();
        let d = joint_distribution(&make_squeezed_input(&cfg)).unwrap();
        let e = mandel_entry("input", Mode::A, &d).unwrap();
        assert_eq!((e.q, e.label), (None, "undefined"));
    }
}

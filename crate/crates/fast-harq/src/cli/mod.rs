//! Command-line front end: structured configs in, CSV/JSON tables out.
//!
//! Subcommands: `analyze` (closed-form metrics), `simulate` (Monte Carlo
//! with standard errors), `optimize` (boundary optimization, optionally
//! error-constrained), `figure` (canned parameter bundles matching the
//! numerical studies this crate reproduces).
//!
//! Exit codes: 0 success, 2 config error, 3 infeasible-only run,
//! 4 numerical failure.

pub mod config;
pub mod figures;
pub mod table;

use crate::analysis::{self, asymptotic_metrics, Boundaries, LinkSpec};
use crate::channel::{clt_params, gamma_params, FadingModel};
use crate::fbl::round_error_prob;
use crate::montecarlo;
use crate::optimize::{exhaustive_search, queen_search, solve_constrained, OptimResult};
use crate::quad::integrate_with_breakpoints;
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{RunConfig, SweepAxis, SweepPoint};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use table::{Cell, Table};

#[derive(Parser)]
#[command(
    name = "fast-harq",
    version,
    about = "Fast-HARQ link analysis, simulation and boundary optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form/quadrature metrics over the sweep.
    Analyze(RunArgs),
    /// Monte Carlo packet simulation with standard errors.
    Simulate(RunArgs),
    /// Optimize quantization boundaries per sweep point.
    Optimize(RunArgs),
    /// Emit the data tables behind a named figure family (fig3..fig16).
    Figure {
        /// Figure name, e.g. fig12 or fig4a.
        name: String,
        /// Output directory for the table files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the Monte Carlo packet count.
    #[arg(long)]
    packets: Option<u64>,
    /// Include the third-order rate term.
    #[arg(long)]
    third_order: bool,
    /// Override the boundaries: standard | uniform | optimized | q1,q2,...
    #[arg(long)]
    boundaries: Option<String>,
    /// Approximation columns for analyze: all or a comma list of
    /// linearized,linearized_rayleigh,clt,gamma,asymptotic.
    #[arg(long)]
    approx: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) | Error::Unsupported(_) => 2,
                Error::Infeasible { .. } => 3,
                _ => 4,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze(args) => {
            let cfg = load_config(&args)?;
            let approx = parse_approx(args.approx.as_deref())?;
            let t = cmd_analyze(&cfg, &approx)?;
            write_table(&t, args.out.as_deref(), args.format)?;
            Ok(0)
        }
        Command::Simulate(args) => {
            let cfg = load_config(&args)?;
            let t = cmd_simulate(&cfg)?;
            write_table(&t, args.out.as_deref(), args.format)?;
            Ok(0)
        }
        Command::Optimize(args) => {
            let cfg = load_config(&args)?;
            let (t, feasible_rows) = cmd_optimize(&cfg)?;
            write_table(&t, args.out.as_deref(), args.format)?;
            Ok(if feasible_rows == 0 { 3 } else { 0 })
        }
        Command::Figure { name, out, format } => {
            let tables = figures::cmd_figure(&name)?;
            std::fs::create_dir_all(&out)
                .map_err(|e| Error::domain(format!("create {}: {e}", out.display())))?;
            for t in &tables {
                let ext = match format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                };
                let path = out.join(format!("{}.{ext}", t.name));
                write_table(t, Some(&path), format)?;
                eprintln!("wrote {}", path.display());
            }
            Ok(0)
        }
    }
}

fn load_config(args: &RunArgs) -> Result<RunConfig> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::domain(format!("read {}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::from_toml(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(packets) = args.packets {
        cfg.mc.packets = packets;
    }
    if args.third_order {
        cfg.harq.third_order = true;
    }
    if let Some(spec) = &args.boundaries {
        match spec.as_str() {
            "standard" | "uniform" | "optimized" => {
                cfg.boundaries.mode = spec.clone();
                cfg.boundaries.values.clear();
            }
            list => {
                let values: std::result::Result<Vec<f64>, _> =
                    list.split(',').map(|s| s.trim().parse::<f64>()).collect();
                cfg.boundaries.mode = "explicit".into();
                cfg.boundaries.values = values
                    .map_err(|e| Error::domain(format!("--boundaries list: {e}")))?;
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_approx(spec: Option<&str>) -> Result<Vec<String>> {
    const KNOWN: [&str; 5] = ["linearized", "linearized_rayleigh", "clt", "gamma", "asymptotic"];
    match spec {
        None => Ok(Vec::new()),
        Some("all") => Ok(KNOWN.iter().map(|s| s.to_string()).collect()),
        Some(list) => {
            let mut out = Vec::new();
            for item in list.split(',') {
                let item = item.trim();
                if !KNOWN.contains(&item) {
                    return Err(Error::domain(format!(
                        "unknown approximation \"{item}\" (choose from {KNOWN:?})"
                    )));
                }
                out.push(item.to_string());
            }
            Ok(out)
        }
    }
}

fn write_table(t: &Table, out: Option<&Path>, format: Format) -> Result<()> {
    let text = match format {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    };
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::domain(format!("write {}: {e}", path.display()))),
    }
}

/// Resolve the boundaries for one sweep point per the configured mode.
fn resolve_boundaries(
    cfg: &RunConfig,
    point: &SweepPoint,
) -> Result<(Boundaries, Option<OptimResult>)> {
    match cfg.boundaries.mode.as_str() {
        "standard" => Ok((Boundaries::standard(cfg.harq.m_max), None)),
        "uniform" => Ok((
            Boundaries::uniform_quantile(&point.link.dist, cfg.harq.m_max),
            None,
        )),
        "explicit" => Ok((Boundaries::new(cfg.boundaries.values.clone())?, None)),
        "optimized" => {
            let spec = cfg.optimize_spec()?;
            let result = match cfg.optimize.method.as_str() {
                "queen" => queen_search(&point.link, point.p_cons, &spec)?,
                _ => exhaustive_search(&point.link, point.p_cons, &spec)?,
            };
            Ok((result.boundaries.clone(), Some(result)))
        }
        other => Err(Error::domain(format!("boundaries.mode \"{other}\""))),
    }
}

fn boundary_columns(m_max: u32) -> Vec<String> {
    (1..m_max).map(|i| format!("q{i}")).collect()
}

fn boundary_cells(b: &Boundaries) -> Vec<Cell> {
    b.interior().iter().map(|&q| Cell::from(q)).collect()
}

/// Approximate error probabilities used for the tightness columns: the
/// exact per-round error curve integrated against the Gaussian or Gamma
/// approximation of the sum gain, the fully linearized Gaussian closed
/// form, and the long-codeword limit.
pub(crate) fn approx_error(link: &LinkSpec, p_cons: f64, which: &str) -> Result<f64> {
    let m = link.harq.m_max;
    let p = link.radiated(p_cons);
    let code = &link.harq.code;
    let cuts = analysis::q_transition_breakpoints(m, code, p);
    match which {
        "clt" => {
            let gauss = clt_params(link.dist.model(), link.dist.n_r());
            let sd = gauss.variance.sqrt();
            let lo = gauss.mean - 10.0 * sd;
            let hi = (gauss.mean + 10.0 * sd).max(link.dist.upper_cutoff());
            // The Gaussian surrogate has mass below zero gain; the error
            // curve is pinned at 1 there.
            let f = |x: f64| {
                let q = if x <= 0.0 {
                    1.0
                } else {
                    round_error_prob(x, m, code, p)
                };
                gauss.pdf(x) * q
            };
            integrate_with_breakpoints(&f, lo, hi, &cuts, 1e-10, 4000)
        }
        "gamma" => {
            let g = gamma_params(link.dist.model(), link.dist.n_r());
            let hi = link.dist.upper_cutoff() * 1.5;
            let f = |x: f64| g.pdf(x) * round_error_prob(x, m, code, p);
            integrate_with_breakpoints(&f, 0.0, hi, &cuts, 1e-10, 4000)
        }
        "linearized" => {
            let gauss = clt_params(link.dist.model(), link.dist.n_r());
            let lin = analysis::linearization_constants(m, code, p);
            let lo = gauss.mean - 10.0 * gauss.variance.sqrt();
            Ok(analysis::y_linearized_gaussian(&gauss, lo, f64::INFINITY, &lin))
        }
        "linearized_rayleigh" => {
            let lin = analysis::linearization_constants(m, code, p);
            analysis::y_linearized_rayleigh(
                link.dist.model(),
                link.dist.n_r(),
                0.0,
                f64::INFINITY,
                &lin,
            )
        }
        "asymptotic" => Ok(asymptotic_metrics(
            link,
            &Boundaries::standard(m),
            p_cons,
        )?
        .error_prob),
        other => Err(Error::domain(format!("unknown approximation \"{other}\""))),
    }
}

/// One row per sweep point: exact metrics plus requested approximations.
pub fn cmd_analyze(cfg: &RunConfig, approx: &[String]) -> Result<Table> {
    let axis = cfg.sweep_axis()?;
    let points = cfg.sweep_points()?;
    let m_max = cfg.harq.m_max;

    let mut columns: Vec<String> = vec![axis.column_name().to_string()];
    if axis != SweepAxis::SnrDb {
        columns.push("snr_db".into());
    }
    columns.extend(
        [
            "total_snr_db",
            "error_prob",
            "expected_delay_cu",
            "throughput_npcu",
            "constrained_delay_cu",
            "unnecessary_prob",
            "unnecessary_energy",
        ]
        .map(String::from),
    );
    columns.extend(boundary_columns(m_max));
    if axis == SweepAxis::NP {
        columns.push("csir_delay_cu".into());
        columns.push("csir_delay_se_cu".into());
    }
    for a in approx {
        columns.push(format!("error_{a}"));
        match a.as_str() {
            "linearized" => columns.push("delay_linearized_gaussian_cu".into()),
            "linearized_rayleigh" => columns.push("delay_linearized_rayleigh_cu".into()),
            _ => {}
        }
    }

    let col_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let mut table = Table::new("analyze", &col_refs);
    // Points evaluate in parallel; rows land in sweep order.
    let rows: Result<Vec<Vec<Cell>>> = points
        .par_iter()
        .map(|point| {
            let (bounds, _) = resolve_boundaries(cfg, point)?;
            let metrics = analysis::link_metrics(&point.link, &bounds, point.p_cons)?;
            let (unnecessary_prob, unnecessary_energy) =
                analysis::unnecessary_tx_stats(&point.link, &bounds, point.p_cons)?;
            let total_snr_db = 10.0 * (point.link.dist.n_r() as f64 * point.p_cons).log10();
            let mut row: Vec<Cell> = vec![Cell::from(point.axis_value)];
            if axis != SweepAxis::SnrDb {
                row.push(Cell::from(point.snr_db));
            }
            row.extend([
                Cell::from(total_snr_db),
                Cell::from(metrics.error_prob),
                Cell::from(metrics.expected_delay),
                Cell::from(metrics.throughput),
                Cell::from(metrics.constrained_delay),
                Cell::from(unnecessary_prob),
                Cell::from(unnecessary_energy),
            ]);
            row.extend(boundary_cells(&bounds));
            if axis == SweepAxis::NP {
                let pilot = crate::channel::PilotModel {
                    n_p: point.n_p,
                    p_pilot: cfg.pilot.p_pilot,
                };
                let est = analysis::expected_delay_imperfect_csir(
                    &point.link,
                    pilot,
                    &bounds,
                    point.p_cons,
                    cfg.mc.packets,
                    cfg.seed,
                )?;
                row.push(Cell::from(est.mean));
                row.push(Cell::from(est.std_error));
            }
            for a in approx {
                let value = match (a.as_str(), point.link.dist.model()) {
                    ("linearized_rayleigh", FadingModel::Rician { .. }) => Cell::Empty,
                    _ => Cell::from(approx_error(&point.link, point.p_cons, a)?),
                };
                row.push(value);
                match (a.as_str(), point.link.dist.model()) {
                    ("linearized", _) => {
                        row.push(Cell::from(analysis::expected_delay_linearized_gaussian(
                            &point.link,
                            &bounds,
                            point.p_cons,
                        )?))
                    }
                    ("linearized_rayleigh", FadingModel::Rayleigh { .. }) => {
                        row.push(Cell::from(analysis::expected_delay_linearized_rayleigh(
                            &point.link,
                            &bounds,
                            point.p_cons,
                        )?))
                    }
                    ("linearized_rayleigh", _) => row.push(Cell::Empty),
                    _ => {}
                }
            }
            Ok(row)
        })
        .collect();
    for row in rows? {
        table.push_row(row);
    }
    Ok(table)
}

/// One row per sweep point with Monte Carlo estimates and standard errors.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Table> {
    if cfg.mc.packets == 0 {
        return Err(Error::domain("mc.packets must be at least 1"));
    }
    let axis = cfg.sweep_axis()?;
    let points = cfg.sweep_points()?;
    let hash = cfg.config_hash();

    let mut columns: Vec<String> = vec![axis.column_name().to_string()];
    if axis != SweepAxis::SnrDb {
        columns.push("snr_db".into());
    }
    columns.extend(
        [
            "sim_error",
            "sim_error_se",
            "sim_delay_cu",
            "sim_delay_se_cu",
            "sim_throughput_npcu",
            "sim_constrained_delay_cu",
            "sim_constrained_delay_se_cu",
            "sim_unnecessary_prob",
            "sim_unnecessary_energy",
            "packets",
            "seed",
            "config_hash",
        ]
        .map(String::from),
    );
    columns.extend(boundary_columns(cfg.harq.m_max));
    let col_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let mut table = Table::new("simulate", &col_refs);

    let rows: Result<Vec<Vec<Cell>>> = points.par_iter().map(|point| {
        let (bounds, _) = resolve_boundaries(cfg, point)?;
        let mut row: Vec<Cell> = vec![Cell::from(point.axis_value)];
        if axis != SweepAxis::SnrDb {
            row.push(Cell::from(point.snr_db));
        }
        if axis == SweepAxis::NP {
            let pilot = crate::channel::PilotModel {
                n_p: point.n_p,
                p_pilot: cfg.pilot.p_pilot,
            };
            let est = montecarlo::estimate_delay_imperfect_csir(
                &point.link,
                pilot,
                &bounds,
                point.p_cons,
                cfg.mc.packets,
                cfg.seed,
            )?;
            row.extend([
                Cell::Empty,
                Cell::Empty,
                Cell::from(est.mean),
                Cell::from(est.std_error),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::from(cfg.mc.packets),
                Cell::from(cfg.seed),
                Cell::from(hash.as_str()),
            ]);
        } else {
            let sim = montecarlo::estimate_metrics(
                &point.link,
                &bounds,
                point.p_cons,
                cfg.mc.packets,
                cfg.seed,
            )?;
            row.extend([
                Cell::from(sim.error.mean),
                Cell::from(sim.error.std_error),
                Cell::from(sim.delay.mean),
                Cell::from(sim.delay.std_error),
                Cell::from(sim.throughput),
                Cell::from(sim.constrained_delay.map(|e| e.mean)),
                Cell::from(sim.constrained_delay.map(|e| e.std_error)),
                Cell::from(sim.unnecessary_prob.mean),
                Cell::from(sim.unnecessary_energy.mean),
                Cell::from(cfg.mc.packets),
                Cell::from(cfg.seed),
                Cell::from(hash.as_str()),
            ]);
        }
        row.extend(boundary_cells(&bounds));
        Ok(row)
    }).collect();
    for row in rows? {
        table.push_row(row);
    }
    Ok(table)
}

/// Boundary optimization per sweep point; rows for infeasible error
/// targets are flagged rather than fatal. Returns the table and the number
/// of feasible rows.
pub fn cmd_optimize(cfg: &RunConfig) -> Result<(Table, usize)> {
    let axis = cfg.sweep_axis()?;
    let points = cfg.sweep_points()?;
    let spec = cfg.optimize_spec()?;

    let mut columns: Vec<String> = vec![axis.column_name().to_string()];
    if axis != SweepAxis::SnrDb {
        // The (possibly beta-solved) operating SNR for this row.
        columns.push("snr_db".into());
    }
    columns.extend(
        [
            "p_cons",
            "status",
            "objective",
            "objective_value",
            "method",
            "evaluations",
        ]
        .map(String::from),
    );
    columns.extend(boundary_columns(cfg.harq.m_max));
    let col_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let mut table = Table::new("optimize", &col_refs);

    let rows: Result<Vec<(Vec<Cell>, bool)>> = points
        .par_iter()
        .map(|point| {
            let outcome: Result<(f64, OptimResult)> = match cfg.optimize.beta {
                Some(beta) => solve_constrained(&point.link, beta, &spec),
                None => {
                    let r = match cfg.optimize.method.as_str() {
                        "queen" => queen_search(&point.link, point.p_cons, &spec),
                        _ => exhaustive_search(&point.link, point.p_cons, &spec),
                    };
                    r.map(|r| (point.p_cons, r))
                }
            };
            let mut row: Vec<Cell> = vec![Cell::from(point.axis_value)];
            match outcome {
                Ok((p_cons, result)) => {
                    if axis != SweepAxis::SnrDb {
                        row.push(Cell::from(10.0 * p_cons.log10()));
                    }
                    row.extend([
                        Cell::from(p_cons),
                        Cell::from("ok"),
                        Cell::from(cfg.optimize.objective.as_str()),
                        Cell::from(result.objective_value),
                        Cell::from(match result.method {
                            crate::optimize::Method::Exhaustive => "exhaustive",
                            crate::optimize::Method::Queen => "queen",
                        }),
                        Cell::from(result.evaluations),
                    ]);
                    row.extend(boundary_cells(&result.boundaries));
                    Ok((row, true))
                }
                Err(Error::Infeasible { .. }) | Err(Error::NonBracketed { .. }) => {
                    if axis != SweepAxis::SnrDb {
                        row.push(Cell::Empty);
                    }
                    row.extend([
                        Cell::Empty,
                        Cell::from("infeasible"),
                        Cell::from(cfg.optimize.objective.as_str()),
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                    ]);
                    row.extend(std::iter::repeat_n(
                        Cell::Empty,
                        (cfg.harq.m_max - 1) as usize,
                    ));
                    Ok((row, false))
                }
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut feasible = 0usize;
    for (row, ok) in rows? {
        feasible += ok as usize;
        table.push_row(row);
    }
    Ok((table, feasible))
}

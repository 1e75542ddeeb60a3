//! Argument parsing, config merging, and command dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use normgame::{
    delta_min, delta_min_two_alpha, estimate_value, savitzky_golay, ContributionNorm, DeltaMin,
    Economy, EconomyTemplate, GridSpec, IncomeDistribution, Scenario, SearchConfig, SimConfig,
    SolveMethod, Strategy, Utility,
};

use crate::chart::{render_chart, Series};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::records::{emit, write_output, CsvTable, NormRecord, OutputFormat, TaxRecord, ThresholdRecord};
use crate::sweep::{
    run_norm_sweep, run_tax_sweep, run_threshold_sweep, NormParam, NormSweep, TaxParam, TaxSweep,
    ThresholdParam, ThresholdSweep,
};

#[derive(Parser)]
#[command(
    name = "normgame",
    version,
    about = "Cooperation thresholds, norm selection, and optimal taxation for a repeated income-transfer game with income mobility"
)]
struct Cli {
    /// JSON config file; keys match flag names, explicit flags override.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed for the simulation oracle.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form cooperation, deviation, and autarky values per income type
    Values(ValuesArgs),
    /// Minimum discount factor sustaining the contribution norm
    Threshold(ThresholdArgs),
    /// Threshold sweep over a parameter grid (CSV/JSON records)
    Sweep(SweepArgs),
    /// Threshold-minimizing norm progressivity over a parameter grid
    NormSelect(NormSelectArgs),
    /// Welfare-maximizing proportional tax over a parameter grid
    Tax(TaxArgs),
    /// Monte Carlo estimate of a regime value, compared to the closed form
    Simulate(SimulateArgs),
    /// Render a line chart from sweep records
    Chart(ChartArgs),
}

#[derive(Args)]
struct ValuesArgs {
    /// Number of income types
    #[arg(long)]
    n: Option<usize>,
    /// Relative risk aversion of the utility function
    #[arg(long)]
    rho: Option<f64>,
    /// Inequality parameter
    #[arg(long)]
    alpha: Option<f64>,
    /// Norm progressivity
    #[arg(long)]
    beta: Option<f64>,
    /// Income mobility in [0, 1]
    #[arg(long)]
    m: Option<f64>,
    /// Discount factor in [0, 1)
    #[arg(long)]
    delta: Option<f64>,
    /// Lump-sum consumption grant (default 0)
    #[arg(long)]
    grant: Option<f64>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Number of income types
    #[arg(long)]
    n: Option<usize>,
    /// Relative risk aversion of the utility function
    #[arg(long)]
    rho: Option<f64>,
    /// Inequality parameter
    #[arg(long)]
    alpha: Option<f64>,
    /// Period-0 inequality (with --alpha1: future-inequality threshold)
    #[arg(long)]
    alpha0: Option<f64>,
    /// Inequality from period 1 on
    #[arg(long)]
    alpha1: Option<f64>,
    /// Norm progressivity
    #[arg(long)]
    beta: Option<f64>,
    /// Income mobility in [0, 1]
    #[arg(long)]
    m: Option<f64>,
    /// Lump-sum consumption grant (default 0)
    #[arg(long)]
    grant: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Baked-in parameterization: fig2, fig2-beta0, fig2-beta1, or fig3
    #[arg(long)]
    preset: Option<String>,
    /// Swept parameter: m, alpha, alpha1, or beta
    #[arg(long)]
    param: Option<String>,
    /// Grid lower edge
    #[arg(long)]
    lo: Option<f64>,
    /// Grid upper edge
    #[arg(long)]
    hi: Option<f64>,
    /// Grid points (>= 2)
    #[arg(long)]
    points: Option<usize>,
    /// Number of income types
    #[arg(long)]
    n: Option<usize>,
    /// Relative risk aversion of the utility function
    #[arg(long)]
    rho: Option<f64>,
    /// Lump-sum consumption grant (default 0)
    #[arg(long)]
    grant: Option<f64>,
    /// Fixed inequality value(s), comma-separated for one curve per value
    #[arg(long)]
    alpha: Option<String>,
    /// Period-0 inequality for alpha1 sweeps
    #[arg(long)]
    alpha0: Option<f64>,
    /// Fixed progressivity value(s), comma-separated
    #[arg(long)]
    beta: Option<String>,
    /// Fixed mobility value(s), comma-separated
    #[arg(long)]
    m: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Also render the records to this SVG path
    #[arg(long)]
    chart: Option<PathBuf>,
}

#[derive(Args)]
struct NormSelectArgs {
    /// Baked-in parameterization: fig-norm
    #[arg(long)]
    preset: Option<String>,
    /// Swept parameter: alpha or m
    #[arg(long)]
    param: Option<String>,
    /// Grid lower edge
    #[arg(long)]
    lo: Option<f64>,
    /// Grid upper edge
    #[arg(long)]
    hi: Option<f64>,
    /// Grid points (>= 2)
    #[arg(long)]
    points: Option<usize>,
    /// Number of income types
    #[arg(long)]
    n: Option<usize>,
    /// Relative risk aversion of the utility function
    #[arg(long)]
    rho: Option<f64>,
    /// Lump-sum consumption grant (default 0)
    #[arg(long)]
    grant: Option<f64>,
    /// Fixed inequality value(s), comma-separated for one curve per value
    #[arg(long)]
    alpha: Option<String>,
    /// Fixed mobility value(s), comma-separated
    #[arg(long)]
    m: Option<String>,
    /// Coarse progressivity window lower edge
    #[arg(long)]
    beta_lo: Option<f64>,
    /// Coarse progressivity window upper edge
    #[arg(long)]
    beta_hi: Option<f64>,
    /// Coarse grid points
    #[arg(long)]
    coarse: Option<usize>,
    /// Refinement grid points
    #[arg(long)]
    refine: Option<usize>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Also render the records to this SVG path
    #[arg(long)]
    chart: Option<PathBuf>,
    /// Also write the records with a Savitzky-Golay-smoothed beta_star column
    #[arg(long)]
    smoothed: Option<PathBuf>,
    #[arg(long)]
    sg_window: Option<usize>,
    #[arg(long)]
    sg_order: Option<usize>,
}

#[derive(Args)]
struct TaxArgs {
    /// Baked-in parameterization: fig4
    #[arg(long)]
    preset: Option<String>,
    /// Swept parameter: alpha, m, beta, or delta
    #[arg(long)]
    param: Option<String>,
    /// Grid lower edge
    #[arg(long)]
    lo: Option<f64>,
    /// Grid upper edge
    #[arg(long)]
    hi: Option<f64>,
    /// Grid points (>= 2)
    #[arg(long)]
    points: Option<usize>,
    /// Number of income types
    #[arg(long)]
    n: Option<usize>,
    /// Relative risk aversion of the utility function
    #[arg(long)]
    rho: Option<f64>,
    /// Cost of public funds
    #[arg(long)]
    s: Option<f64>,
    /// Discount factor in [0, 1)
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    m: Option<String>,
    /// Tax grid resolution
    #[arg(long)]
    tau_points: Option<usize>,
    /// Golden-section polish of the winning bracket
    #[arg(long)]
    golden: bool,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Also render the records to this SVG path
    #[arg(long)]
    chart: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of income types
    #[arg(long)]
    n: Option<usize>,
    /// Relative risk aversion of the utility function
    #[arg(long)]
    rho: Option<f64>,
    /// Inequality parameter
    #[arg(long)]
    alpha: Option<f64>,
    /// Norm progressivity
    #[arg(long)]
    beta: Option<f64>,
    /// Income mobility in [0, 1]
    #[arg(long)]
    m: Option<f64>,
    /// Discount factor in [0, 1)
    #[arg(long)]
    delta: Option<f64>,
    /// Lump-sum consumption grant (default 0)
    #[arg(long)]
    grant: Option<f64>,
    /// Income type (1 = richest)
    #[arg(long = "type")]
    ty: Option<usize>,
    /// cooperate, deviate, or autarky
    #[arg(long)]
    regime: Option<String>,
    /// Monte Carlo replications (default 20000)
    #[arg(long)]
    replications: Option<usize>,
    /// Truncation tolerance used to choose the horizon
    #[arg(long)]
    tol: Option<f64>,
    /// Explicit horizon (overrides --tol)
    #[arg(long)]
    horizon: Option<usize>,
}

#[derive(Args)]
struct ChartArgs {
    /// Input CSV produced by a sweep command
    #[arg(long)]
    input: Option<PathBuf>,
    /// Column for the x axis
    #[arg(long)]
    x: Option<String>,
    /// Column for the y axis
    #[arg(long)]
    y: Option<String>,
    /// Column whose values split the rows into one line each
    #[arg(long)]
    group: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    title: Option<String>,
}

pub fn main_entry() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {}", err.message());
        std::process::exit(err.exit_code());
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    if let Some(threads) = cli.threads.or(cfg.usize("threads", None)?) {
        if threads > 0 {
            // Ignore the error if a pool already exists (e.g. repeated calls in tests).
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
    }
    let seed = cli.seed.or(cfg.usize("seed", None)?.map(|s| s as u64)).unwrap_or(42);
    match cli.command {
        Command::Values(args) => cmd_values(&cfg, args),
        Command::Threshold(args) => cmd_threshold(&cfg, args),
        Command::Sweep(args) => cmd_sweep(&cfg, args),
        Command::NormSelect(args) => cmd_norm_select(&cfg, args),
        Command::Tax(args) => cmd_tax(&cfg, args),
        Command::Simulate(args) => cmd_simulate(&cfg, args, seed),
        Command::Chart(args) => cmd_chart(&cfg, args),
    }
}

fn build_economy(
    n: usize,
    alpha: f64,
    beta: f64,
    rho: f64,
    m: f64,
    grant: f64,
) -> CliResult<Economy> {
    Ok(Economy::from_distribution(
        IncomeDistribution::new(n, alpha)?,
        grant,
        ContributionNorm::new(beta)?,
        Utility::new(rho)?,
        m,
    )?)
}

fn cmd_values(cfg: &Config, args: ValuesArgs) -> CliResult<()> {
    let n = cfg.require_usize("n", args.n)?;
    let rho = cfg.require_f64("rho", args.rho)?;
    let alpha = cfg.require_f64("alpha", args.alpha)?;
    let beta = cfg.require_f64("beta", args.beta)?;
    let m = cfg.require_f64("m", args.m)?;
    let delta = cfg.require_f64("delta", args.delta)?;
    let grant = cfg.f64_or("grant", args.grant, 0.0)?;
    let economy = build_economy(n, alpha, beta, rho, m, grant)?;
    let scenario = Scenario::new(economy, delta)?;
    let triple = scenario.value_triple();
    println!(
        "{:>4} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14}",
        "type", "income", "v_coop", "v_dev", "v_aut", "gap_raw", "gap_norm"
    );
    for ty in 1..=n {
        let gap = scenario.incentive_gap(ty);
        println!(
            "{:>4} {:>14.9} {:>14.9} {:>14.9} {:>14.9} {:>14.9} {:>14.9}",
            ty,
            scenario.economy().incomes()[ty - 1],
            triple.v_coop[ty - 1],
            triple.v_dev[ty - 1],
            triple.v_aut[ty - 1],
            gap.raw,
            gap.normalized,
        );
    }
    Ok(())
}

fn cmd_threshold(cfg: &Config, args: ThresholdArgs) -> CliResult<()> {
    let n = cfg.require_usize("n", args.n)?;
    let rho = cfg.require_f64("rho", args.rho)?;
    let beta = cfg.require_f64("beta", args.beta)?;
    let m = cfg.require_f64("m", args.m)?;
    let grant = cfg.f64_or("grant", args.grant, 0.0)?;
    let alpha = cfg.f64("alpha", args.alpha)?;
    let alpha0 = cfg.f64("alpha0", args.alpha0)?;
    let alpha1 = cfg.f64("alpha1", args.alpha1)?;
    let template = EconomyTemplate {
        n,
        grant,
        norm: ContributionNorm::new(beta)?,
        utility: Utility::new(rho)?,
        mobility: m,
    };
    let result = match (alpha, alpha0, alpha1) {
        (Some(alpha), None, None) => delta_min(&template.economy(alpha)?)?,
        (None, Some(a0), Some(a1)) => delta_min_two_alpha(a0, a1, &template)?,
        _ => {
            return Err(CliError::Args(
                "provide either --alpha, or both --alpha0 and --alpha1".into(),
            ))
        }
    };
    let method = match result.method {
        SolveMethod::Quadratic => "quadratic",
        SolveMethod::Bisection => "bisection",
    };
    match result.delta_min {
        DeltaMin::Sustainable(d) => {
            println!("delta_min    {d:.12}");
            println!("sustainable  1");
        }
        DeltaMin::Unsustainable => {
            println!("delta_min    1");
            println!("sustainable  0");
        }
    }
    println!("method       {method}");
    println!("binding_type {}", result.binding_type);
    println!("gap          {:e}", result.gap_at_solution);
    Ok(())
}

fn apply_sweep_preset(args: &mut SweepArgs, preset: &str) -> CliResult<()> {
    let beta_list = match preset {
        "fig2" => "0,1",
        "fig2-beta0" => "0",
        "fig2-beta1" => "1",
        "fig3" => "1,4",
        other => {
            return Err(CliError::Args(format!(
                "unknown sweep preset {other:?} (expected fig2, fig2-beta0, fig2-beta1, fig3)"
            )))
        }
    };
    if preset == "fig3" {
        args.param.get_or_insert_with(|| "alpha1".into());
        args.lo.get_or_insert(0.6);
        args.hi.get_or_insert(3.0);
        args.points.get_or_insert(50);
        args.n.get_or_insert(5);
        args.rho.get_or_insert(1.0);
        args.alpha0.get_or_insert(0.5);
        args.m.get_or_insert_with(|| "0.2,0.5,0.8".into());
    } else {
        args.param.get_or_insert_with(|| "m".into());
        args.lo.get_or_insert(0.05);
        args.hi.get_or_insert(1.0);
        args.points.get_or_insert(96);
        args.n.get_or_insert(3);
        args.rho.get_or_insert(1.0);
        args.alpha.get_or_insert_with(|| "0.5,1,1.5".into());
    }
    args.beta.get_or_insert_with(|| beta_list.into());
    Ok(())
}

fn cmd_sweep(cfg: &Config, mut args: SweepArgs) -> CliResult<()> {
    if let Some(preset) = cfg.string("preset", args.preset.clone())? {
        apply_sweep_preset(&mut args, &preset)?;
    }
    let param = ThresholdParam::parse(&cfg.require_string("param", args.param.clone())?)?;
    let grid = GridSpec::new(
        cfg.require_f64("lo", args.lo)?,
        cfg.require_f64("hi", args.hi)?,
        cfg.require_usize("points", args.points)?,
    )?;
    let spec = ThresholdSweep {
        param,
        grid,
        n: cfg.require_usize("n", args.n)?,
        rho: cfg.require_f64("rho", args.rho)?,
        grant: cfg.f64_or("grant", args.grant, 0.0)?,
        alphas: cfg.f64_list_or("alpha", args.alpha.as_deref(), &[1.0])?,
        betas: cfg.f64_list_or("beta", args.beta.as_deref(), &[0.0])?,
        ms: cfg.f64_list_or("m", args.m.as_deref(), &[0.5])?,
        alpha0: cfg.f64("alpha0", args.alpha0)?,
    };
    let records = run_threshold_sweep(&spec)?;
    let format = OutputFormat::parse(&cfg.string("format", args.format.clone())?.unwrap_or_else(|| "csv".into()))?;
    write_output(&emit(&records, format)?, cfg.path("out", args.out.clone())?.as_deref())?;

    if let Some(chart_path) = cfg.path("chart", args.chart.clone())? {
        let x_name = match param {
            ThresholdParam::M => "m",
            ThresholdParam::Alpha => "alpha",
            ThresholdParam::Alpha1 => "alpha1",
            ThresholdParam::Beta => "beta",
        };
        let candidates: &[FieldGetter<ThresholdRecord>] = &[
            ("alpha", |r| r.alpha),
            ("beta", |r| r.beta),
            ("m", |r| r.m),
        ];
        let group_fields: Vec<FieldGetter<ThresholdRecord>> = candidates
            .iter()
            .filter(|(name, _)| *name != x_name)
            .copied()
            .collect();
        let series = group_records(
            &records,
            |r| match param {
                ThresholdParam::M => r.m,
                ThresholdParam::Alpha => r.alpha,
                ThresholdParam::Alpha1 => r.alpha1,
                ThresholdParam::Beta => r.beta,
            },
            |r| r.delta_min,
            &group_fields,
        );
        let svg = render_chart(&series, x_name, "delta_min", "")?;
        write_output(svg.as_bytes(), Some(&chart_path))?;
    }
    Ok(())
}

fn cmd_norm_select(cfg: &Config, mut args: NormSelectArgs) -> CliResult<()> {
    if let Some(preset) = cfg.string("preset", args.preset.clone())? {
        if preset != "fig-norm" {
            return Err(CliError::Args(format!(
                "unknown norm-select preset {preset:?} (expected fig-norm)"
            )));
        }
        args.param.get_or_insert_with(|| "alpha".into());
        args.lo.get_or_insert(0.05);
        args.hi.get_or_insert(1.0);
        args.points.get_or_insert(20);
        args.n.get_or_insert(6);
        args.rho.get_or_insert(4.0);
        args.m.get_or_insert_with(|| "0.4,0.9".into());
    }
    let param = NormParam::parse(&cfg.require_string("param", args.param.clone())?)?;
    let grid = GridSpec::new(
        cfg.require_f64("lo", args.lo)?,
        cfg.require_f64("hi", args.hi)?,
        cfg.require_usize("points", args.points)?,
    )?;
    let search = SearchConfig {
        coarse: GridSpec::new(
            cfg.f64_or("beta-lo", args.beta_lo, 0.0)?,
            cfg.f64_or("beta-hi", args.beta_hi, 8.0)?,
            cfg.usize_or("coarse", args.coarse, 100)?,
        )?,
        refine_points: cfg.usize_or("refine", args.refine, 1000)?,
        keep_series: false,
    };
    let spec = NormSweep {
        param,
        grid,
        n: cfg.require_usize("n", args.n)?,
        rho: cfg.require_f64("rho", args.rho)?,
        grant: cfg.f64_or("grant", args.grant, 0.0)?,
        alphas: cfg.f64_list_or("alpha", args.alpha.as_deref(), &[1.0])?,
        ms: cfg.f64_list_or("m", args.m.as_deref(), &[0.5])?,
        search,
    };
    let records = run_norm_sweep(&spec)?;
    let format = OutputFormat::parse(&cfg.string("format", args.format.clone())?.unwrap_or_else(|| "csv".into()))?;
    write_output(&emit(&records, format)?, cfg.path("out", args.out.clone())?.as_deref())?;

    if let Some(smoothed_path) = cfg.path("smoothed", args.smoothed.clone())? {
        let window = cfg.usize_or("sg-window", args.sg_window, 11)?;
        let order = cfg.usize_or("sg-order", args.sg_order, 3)?;
        let smoothed = smooth_norm_records(&records, param, window, order)?;
        write_output(&emit(&smoothed, format)?, Some(&smoothed_path))?;
    }

    if let Some(chart_path) = cfg.path("chart", args.chart.clone())? {
        let (x_name, group): (_, fn(&&NormRecord) -> f64) = match param {
            NormParam::Alpha => ("alpha", |r| r.m),
            NormParam::M => ("m", |r| r.alpha),
        };
        let group_name = if x_name == "alpha" { "m" } else { "alpha" };
        let with_star: Vec<&NormRecord> = records.iter().filter(|r| r.beta_star.is_some()).collect();
        let series = group_records(
            &with_star,
            |r| match param {
                NormParam::Alpha => r.alpha,
                NormParam::M => r.m,
            },
            |r| r.beta_star.unwrap_or(f64::NAN),
            &[(group_name, group)],
        );
        let svg = render_chart(&series, x_name, "beta_star", "")?;
        write_output(svg.as_bytes(), Some(&chart_path))?;
    }
    Ok(())
}

/// Smooths the `beta_star` column curve by curve (each curve is one value of
/// the non-swept parameter, in emission order). Curves with undefined points
/// or fewer points than the window pass through unchanged.
fn smooth_norm_records(
    records: &[NormRecord],
    param: NormParam,
    window: usize,
    order: usize,
) -> CliResult<Vec<NormRecord>> {
    let curve_key = |r: &NormRecord| match param {
        NormParam::Alpha => r.m,
        NormParam::M => r.alpha,
    };
    let mut out = records.to_vec();
    let mut start = 0;
    while start < out.len() {
        let end = out[start..]
            .windows(2)
            .position(|w| curve_key(&w[0]) != curve_key(&w[1]))
            .map(|p| start + p + 1)
            .unwrap_or(out.len());
        let curve = &mut out[start..end];
        let raw: Option<Vec<f64>> = curve.iter().map(|r| r.beta_star).collect();
        if let Some(raw) = raw {
            if raw.len() >= window {
                let smoothed = savitzky_golay(&raw, window, order)?;
                for (record, value) in curve.iter_mut().zip(smoothed) {
                    record.beta_star = Some(value);
                }
            }
        }
        start = end;
    }
    Ok(out)
}

fn apply_tax_preset(args: &mut TaxArgs, preset: &str) -> CliResult<()> {
    if preset != "fig4" {
        return Err(CliError::Args(format!("unknown tax preset {preset:?} (expected fig4)")));
    }
    args.param.get_or_insert_with(|| "alpha".into());
    args.lo.get_or_insert(0.25);
    args.hi.get_or_insert(3.0);
    args.points.get_or_insert(12);
    args.n.get_or_insert(3);
    args.rho.get_or_insert(0.5);
    args.s.get_or_insert(0.09);
    args.delta.get_or_insert(0.7);
    args.m.get_or_insert_with(|| "0.8,0.4".into());
    args.beta.get_or_insert_with(|| "1.5,2,0".into());
    Ok(())
}

fn cmd_tax(cfg: &Config, mut args: TaxArgs) -> CliResult<()> {
    if let Some(preset) = cfg.string("preset", args.preset.clone())? {
        apply_tax_preset(&mut args, &preset)?;
    }
    let param = TaxParam::parse(&cfg.require_string("param", args.param.clone())?)?;
    let grid = GridSpec::new(
        cfg.require_f64("lo", args.lo)?,
        cfg.require_f64("hi", args.hi)?,
        cfg.require_usize("points", args.points)?,
    )?;
    let delta = if param == TaxParam::Delta {
        cfg.f64_or("delta", args.delta, 0.0)?
    } else {
        cfg.require_f64("delta", args.delta)?
    };
    let spec = TaxSweep {
        param,
        grid,
        n: cfg.require_usize("n", args.n)?,
        rho: cfg.require_f64("rho", args.rho)?,
        s: cfg.require_f64("s", args.s)?,
        delta,
        alphas: cfg.f64_list_or("alpha", args.alpha.as_deref(), &[1.0])?,
        betas: cfg.f64_list_or("beta", args.beta.as_deref(), &[1.0])?,
        ms: cfg.f64_list_or("m", args.m.as_deref(), &[0.5])?,
        tau_points: cfg.usize_or("tau-points", args.tau_points, 501)?,
        golden_refine: cfg.bool_or("golden", args.golden, false)?,
    };
    let records = run_tax_sweep(&spec)?;
    let format = OutputFormat::parse(&cfg.string("format", args.format.clone())?.unwrap_or_else(|| "csv".into()))?;
    write_output(&emit(&records, format)?, cfg.path("out", args.out.clone())?.as_deref())?;

    if let Some(chart_path) = cfg.path("chart", args.chart.clone())? {
        let x_name = match param {
            TaxParam::Alpha => "alpha",
            TaxParam::M => "m",
            TaxParam::Beta => "beta",
            TaxParam::Delta => "delta",
        };
        let candidates: &[FieldGetter<TaxRecord>] = &[
            ("m", |r| r.m),
            ("beta", |r| r.beta),
            ("alpha", |r| r.alpha),
        ];
        let group_fields: Vec<FieldGetter<TaxRecord>> = candidates
            .iter()
            .filter(|(name, _)| *name != x_name)
            .copied()
            .collect();
        let series = group_records(
            &records,
            |r| match param {
                TaxParam::Alpha => r.alpha,
                TaxParam::M => r.m,
                TaxParam::Beta => r.beta,
                TaxParam::Delta => r.delta,
            },
            |r| r.tau_star,
            &group_fields,
        );
        let svg = render_chart(&series, x_name, "tau_star", "")?;
        write_output(svg.as_bytes(), Some(&chart_path))?;
    }
    Ok(())
}

fn cmd_simulate(cfg: &Config, args: SimulateArgs, seed: u64) -> CliResult<()> {
    let n = cfg.require_usize("n", args.n)?;
    let rho = cfg.require_f64("rho", args.rho)?;
    let alpha = cfg.require_f64("alpha", args.alpha)?;
    let beta = cfg.require_f64("beta", args.beta)?;
    let m = cfg.require_f64("m", args.m)?;
    let delta = cfg.require_f64("delta", args.delta)?;
    let grant = cfg.f64_or("grant", args.grant, 0.0)?;
    let ty = cfg.usize_or("type", args.ty, 1)?;
    let regime = cfg.require_string("regime", args.regime.clone())?;
    let strategy = match regime.as_str() {
        "cooperate" => Strategy::Cooperate,
        "deviate" => Strategy::Deviate,
        "autarky" => Strategy::Autarky,
        other => {
            return Err(CliError::Args(format!(
                "--regime must be cooperate, deviate, or autarky; got {other:?}"
            )))
        }
    };
    if !(1..=n).contains(&ty) {
        return Err(CliError::Args(format!("--type must lie in 1..={n}, got {ty}")));
    }
    let replications = cfg.usize_or("replications", args.replications, 20_000)?;
    let scenario = Scenario::new(build_economy(n, alpha, beta, rho, m, grant)?, delta)?;
    let config = match cfg.usize("horizon", args.horizon)? {
        Some(horizon) => SimConfig::new(horizon, replications, seed)?,
        None => {
            let tol = cfg.f64_or("tol", args.tol, 1e-4)?;
            SimConfig::for_tolerance(&scenario, tol, replications, seed)?
        }
    };
    let estimate = estimate_value(strategy, &scenario, ty, &config);
    let closed = match strategy {
        Strategy::Cooperate => scenario.value_coop(ty),
        Strategy::Deviate => scenario.value_deviation(ty),
        Strategy::Autarky => scenario.value_autarky(ty),
    };
    let diff = (estimate.mean - closed).abs();
    let bound = 3.0 * estimate.stderr + estimate.truncation_bound;
    println!("regime           {regime}");
    println!("type             {ty}");
    println!("horizon          {}", config.horizon);
    println!("replications     {replications}");
    println!("seed             {seed}");
    println!("estimate         {:.9}", estimate.mean);
    println!("stderr           {:.3e}", estimate.stderr);
    println!("truncation_bound {:.3e}", estimate.truncation_bound);
    println!("closed_form      {closed:.9}");
    println!("abs_diff         {diff:.3e}");
    println!("within_3sigma    {}", u8::from(diff <= bound));
    Ok(())
}

fn cmd_chart(cfg: &Config, args: ChartArgs) -> CliResult<()> {
    let input = cfg
        .path("input", args.input.clone())?
        .ok_or_else(|| CliError::Args("missing required flag --input".into()))?;
    let x_col = cfg.require_string("x", args.x.clone())?;
    let y_col = cfg.require_string("y", args.y.clone())?;
    let group_col = cfg.string("group", args.group.clone())?;
    let out = cfg.path("out", args.out.clone())?;
    let title = cfg.string("title", args.title.clone())?.unwrap_or_default();

    let table = CsvTable::read(&input)?;
    let xi = table.column(&x_col)?;
    let yi = table.column(&y_col)?;
    let gi = group_col.as_deref().map(|g| table.column(g)).transpose()?;

    let mut series: Vec<Series> = Vec::new();
    for row in &table.rows {
        let (Ok(x), Ok(y)) = (row[xi].parse::<f64>(), row[yi].parse::<f64>()) else {
            continue; // blank optional fields (e.g. undefined minimizers) are skipped
        };
        let label = match gi {
            Some(gi) => format!("{}={}", group_col.as_deref().unwrap_or(""), row[gi]),
            None => y_col.clone(),
        };
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((x, y)),
            None => series.push(Series { label, points: vec![(x, y)] }),
        }
    }
    if series.iter().all(|s| s.points.is_empty()) || series.is_empty() {
        return Err(CliError::Empty("chart: input contains no plottable rows".into()));
    }
    let svg = render_chart(&series, &x_col, &y_col, &title)?;
    write_output(svg.as_bytes(), out.as_deref())
}

/// Named accessor used to label chart series.
type FieldGetter<R> = (&'static str, fn(&R) -> f64);

/// Groups records into chart series, labeling each by the fixed parameters
/// that actually vary across records.
fn group_records<R>(
    records: &[R],
    x: impl Fn(&R) -> f64,
    y: impl Fn(&R) -> f64,
    group_fields: &[FieldGetter<R>],
) -> Vec<Series> {
    let varying: Vec<&FieldGetter<R>> = group_fields
        .iter()
        .filter(|(_, get)| {
            let mut values: Vec<u64> = records.iter().map(|r| get(r).to_bits()).collect();
            values.sort_unstable();
            values.dedup();
            values.len() > 1
        })
        .collect();
    let mut series: Vec<Series> = Vec::new();
    for record in records {
        let label = if varying.is_empty() {
            "series".to_string()
        } else {
            varying
                .iter()
                .map(|(name, get)| format!("{name}={}", get(record)))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let point = (x(record), y(record));
        if point.1.is_nan() {
            continue;
        }
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(point),
            None => series.push(Series { label, points: vec![point] }),
        }
    }
    series
}

use crate::{with_workers, ChannelArgs, CliError, MseArgs, OptimizeArgs, SweepArgs};
use oac_qam::analysis::{closed_form_mse, mu_nominal};
use oac_qam::grid::ConstellationParams;
use oac_qam::noise::NoiseModel;
use oac_qam::optimizer::{solve_t_star, OptimizationResult, PowerBudget};
use oac_qam::simulator::{sweep_snr, EqualSpacingBaseline, McConfig, SweepRecord};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

struct Problem {
    q: u64,
    k: u64,
    n: u64,
    power: f64,
    gamma: f64,
    budget: PowerBudget<f64>,
    model: NoiseModel<f64>,
}

impl Problem {
    fn from_channel(args: &ChannelArgs) -> Result<Self, CliError> {
        let gamma = args.gamma()?;
        let budget = PowerBudget::new(args.power, args.q)?;
        let model = NoiseModel::new(gamma)?;
        // Constructing params validates q and k once and for all.
        let probe = ConstellationParams::new(args.q, args.k, 1.0, 1.0)?;
        Ok(Self {
            q: args.q,
            k: args.k,
            n: probe.axis_points(),
            power: args.power,
            gamma,
            budget,
            model,
        })
    }

    fn snr_db(&self) -> f64 {
        10.0 * (self.power / self.gamma).log10()
    }
}

#[derive(Serialize)]
struct DesignRecord {
    tool: &'static str,
    version: &'static str,
    k: u64,
    q: u64,
    power: f64,
    gamma: f64,
    snr_db: f64,
    rho: f64,
    t_star: f64,
    d1_star: f64,
    d2_star: f64,
    g_residual: f64,
    kkt_residual: f64,
    method: String,
    mse_optimized: f64,
    mse_equal: f64,
    baseline: String,
}

pub(crate) fn optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let problem = Problem::from_channel(&args.channel)?;
    let baseline: EqualSpacingBaseline = args.baseline.into();
    let design = solve_t_star(
        problem.q,
        problem.n,
        problem.gamma,
        problem.budget.rho(),
        0.0,
    )?;
    let opt_params = design.params(problem.q, problem.k)?;
    let eq = baseline.spacing(&problem.budget);
    let eq_params = ConstellationParams::new(problem.q, problem.k, eq, eq)?;
    let mse_opt = closed_form_mse(&opt_params, &problem.model);
    let mse_eq = closed_form_mse(&eq_params, &problem.model);

    println!(
        "constellation design   K={} q={} (Q={}, N={})",
        problem.k,
        problem.q,
        problem.q * problem.q,
        problem.n
    );
    println!("  power budget P       {}", problem.power);
    println!(
        "  noise scale gamma    {:.6e}  (snr {:.2} dB)",
        problem.gamma,
        problem.snr_db()
    );
    println!("  radius rho           {:.12}", problem.budget.rho());
    println!("  t*                   {:.12}", design.t_star);
    println!("  d1*                  {:.12}", design.d1_star);
    println!("  d2*                  {:.12}", design.d2_star);
    println!(
        "  d2*/d1*              {:.6}",
        design.d2_star / design.d1_star
    );
    println!("  G residual           {:.6e}", design.g_residual);
    println!("  KKT residual         {:.6e}", design.kkt_residual);
    println!("  closed-form MSE      {mse_opt:.6e} (optimized)");
    println!(
        "  closed-form MSE      {mse_eq:.6e} (equal spacing, {})",
        baseline.as_str()
    );

    if let Some(path) = args.out {
        let record = design_record(&problem, &design, mse_opt, mse_eq, baseline);
        let json = serde_json::to_string_pretty(&record).expect("design record serializes");
        std::fs::write(&path, json + "\n").map_err(|e| io_err(&path, e))?;
        println!("  record written       {}", path.display());
    }
    Ok(())
}

fn design_record(
    problem: &Problem,
    design: &OptimizationResult<f64>,
    mse_optimized: f64,
    mse_equal: f64,
    baseline: EqualSpacingBaseline,
) -> DesignRecord {
    DesignRecord {
        tool: "oac-qam",
        version: VERSION,
        k: problem.k,
        q: problem.q,
        power: problem.power,
        gamma: problem.gamma,
        snr_db: problem.snr_db(),
        rho: problem.budget.rho(),
        t_star: design.t_star,
        d1_star: design.d1_star,
        d2_star: design.d2_star,
        g_residual: design.g_residual,
        kkt_residual: design.kkt_residual,
        method: design.method.as_str().to_string(),
        mse_optimized,
        mse_equal,
        baseline: baseline.as_str().to_string(),
    }
}

pub(crate) fn mse(args: MseArgs) -> Result<(), CliError> {
    let problem = Problem::from_channel(&args.channel)?;
    let baseline: EqualSpacingBaseline = args.baseline.into();

    let report = |label: &str, params: &ConstellationParams<f64>| {
        let exact = closed_form_mse(params, &problem.model);
        let nominal = mu_nominal(params.d1(), problem.gamma, problem.n).unwrap()
            + (problem.q * problem.q) as f64
                * mu_nominal(params.d2(), problem.gamma, problem.n).unwrap();
        println!(
            "  {label:<22} d1={:.6} d2={:.6}  mse={exact:.6e}  (nominal series {nominal:.6e})",
            params.d1(),
            params.d2()
        );
    };

    println!(
        "closed-form MSE        K={} q={} gamma={:.6e} (snr {:.2} dB)",
        problem.k,
        problem.q,
        problem.gamma,
        problem.snr_db()
    );
    let design = solve_t_star(
        problem.q,
        problem.n,
        problem.gamma,
        problem.budget.rho(),
        0.0,
    )?;
    report("optimized", &design.params(problem.q, problem.k)?);
    let eq = baseline.spacing(&problem.budget);
    report(
        &format!("equal ({})", baseline.as_str()),
        &ConstellationParams::new(problem.q, problem.k, eq, eq)?,
    );
    if let (Some(d1), Some(d2)) = (args.d1, args.d2) {
        report(
            "custom",
            &ConstellationParams::new(problem.q, problem.k, d1, d2)?,
        );
    }
    Ok(())
}

fn snr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    // A NaN step fails the finite check.
    if !start.is_finite() || !stop.is_finite() || !step.is_finite() || step <= 0.0 {
        return Err(CliError::Domain(
            "snr grid needs finite start/stop and step > 0".into(),
        ));
    }
    if stop < start {
        return Err(CliError::Domain("--snr-stop must be >= --snr-start".into()));
    }
    let mut grid = Vec::new();
    let mut i = 0u64;
    loop {
        let x = start + i as f64 * step;
        if x > stop + 1e-9 {
            break;
        }
        grid.push(x);
        i += 1;
    }
    Ok(grid)
}

#[derive(Serialize)]
struct SweepManifest {
    tool: &'static str,
    version: &'static str,
    created_unix: u64,
    command: &'static str,
    k: u64,
    q: u64,
    power: f64,
    snr_start: f64,
    snr_stop: f64,
    snr_step: f64,
    trials: u64,
    seed: u64,
    mode: String,
    baseline: String,
    workers: usize,
    output: String,
}

pub(crate) fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let budget = PowerBudget::new(args.power, args.q)?;
    let grid = snr_grid(args.snr_start, args.snr_stop, args.snr_step)?;
    let mode: oac_qam::simulator::SymbolMode = args.mode.into();
    let baseline: EqualSpacingBaseline = args.baseline.into();
    let d = baseline.spacing(&budget);
    let base = McConfig {
        params: ConstellationParams::new(args.q, args.k, d, d)?,
        model: NoiseModel::new(1.0)?,
        trials: args.trials,
        seed: args.seed,
        symbol_mode: mode,
    };
    if args.trials < 1 {
        return Err(CliError::Domain("--trials must be >= 1".into()));
    }

    let records = with_workers(args.workers, || sweep_snr(&base, &budget, &grid, baseline))??;

    write_sweep_file(&args, &records, baseline)?;
    let manifest_path = manifest_path(&args.out);
    let manifest = SweepManifest {
        tool: "oac-qam",
        version: VERSION,
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        command: "sweep",
        k: args.k,
        q: args.q,
        power: args.power,
        snr_start: args.snr_start,
        snr_stop: args.snr_stop,
        snr_step: args.snr_step,
        trials: args.trials,
        seed: args.seed,
        mode: mode.as_str().to_string(),
        baseline: baseline.as_str().to_string(),
        workers: args.workers,
        output: args.out.display().to_string(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, json + "\n").map_err(|e| io_err(&manifest_path, e))?;
    eprintln!(
        "wrote {} ({} rows) and {}",
        args.out.display(),
        records.len(),
        manifest_path.display()
    );
    Ok(())
}

fn manifest_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    std::path::PathBuf::from(name)
}

/// Writes the plot-ready table. The comment echo deliberately excludes the
/// timestamp and the worker count so the file is byte-identical across runs
/// and worker pools for a fixed seed.
fn write_sweep_file(
    args: &SweepArgs,
    records: &[SweepRecord<f64>],
    baseline: EqualSpacingBaseline,
) -> Result<(), CliError> {
    let mode: oac_qam::simulator::SymbolMode = args.mode.into();
    let mut out = Vec::new();
    writeln!(
        out,
        "# oac-qam sweep v{VERSION} k={} q={} power={} snr={}..{} step={} trials={} seed={} mode={} baseline={}",
        args.k,
        args.q,
        args.power,
        args.snr_start,
        args.snr_stop,
        args.snr_step,
        args.trials,
        args.seed,
        mode.as_str(),
        baseline.as_str()
    )
    .expect("in-memory write");
    writeln!(out, "xi_dB mse_opt mse_eq se_opt se_eq").expect("in-memory write");
    for r in records {
        writeln!(
            out,
            "{} {:.10e} {:.10e} {:.10e} {:.10e}",
            r.xi_db, r.mse_opt, r.mse_eq, r.se_opt, r.se_eq
        )
        .expect("in-memory write");
    }
    std::fs::write(&args.out, out).map_err(|e| io_err(&args.out, e))
}

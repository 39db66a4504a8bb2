//! Command-line front end: analysis, kernel solving, simulation, MCARMA
//! bridging, VAR oracle runs, the discretization bridge, and the acceptance
//! suite. Exit codes: 0 success, 1 numerical-verification failure, 2 config
//! error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex;
use serde_json::json;

use cointegra::config::{
    parse_xi, write_granger_csv, write_kernel_csv, write_paths_csv, write_variance_csv,
    MeasureConfig, RunConfig,
};
use cointegra::error::{Error, Result};
use cointegra::kernel::{laplace_check, solve_kernel, truncation_horizon};
use cointegra::levy::{
    ecf_residual, granger_path, ls_slope, sample_levy, variance_profile, LevyModel,
};
use cointegra::linalg::{max_abs, max_principal_angle, Mat, Vect};
use cointegra::mcarma::{carma_c0, check_cointegrated_conditions, msdde_from_mcarma};
use cointegra::measure::SignedMatrixMeasure;
use cointegra::spectral::{
    check_conditions, cointegration_structure, CharacteristicFunction, ScanSettings,
};
use cointegra::var::{discretization_bridge, leading_roots, simulate_var, var_ecf, var_granger};

#[derive(Parser)]
#[command(name = "cointegra", about = "Cointegration analysis for multivariate stochastic delay differential equations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Condition checks and cointegration structure of a measure.
    Analyze,
    /// Solve the Granger kernels and run the Laplace-identity check.
    Kernel,
    /// Simulate driver paths and solution paths; write variance profiles.
    Simulate,
    /// Bridge an MCARMA spec to its MSDDE measure; dual-route C0 report.
    Mcarma,
    /// Discrete VAR Granger representation and simulation cross-check.
    VarOracle,
    /// Euler-discretize a measure into a VAR; compare spaces and roots.
    Bridge,
    /// Run the full acceptance suite.
    Verify,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("COINTEGRA_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Io(_) | Error::Json(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("missing required flag '--config'".into()))?;
    let mut cfg = RunConfig::from_file(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(tol) = cli.tol {
        cfg.tolerance = Some(tol);
    }
    Ok(cfg)
}

fn measure_of(cfg: &RunConfig) -> Result<SignedMatrixMeasure<f64>> {
    if let Some(mc) = &cfg.model.measure {
        mc.build()
    } else if let Some(spec) = &cfg.model.mcarma {
        msdde_from_mcarma(&spec.build()?)
    } else {
        Err(Error::Config(
            "missing required field 'measure' (or 'mcarma') in the model".into(),
        ))
    }
}

fn write(out_dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    fs::write(&path, bytes)?;
    Ok(path)
}

fn mat_rows(m: &Mat<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn z_samples(cfg: &RunConfig) -> Vec<Complex<f64>> {
    cfg.z_samples
        .clone()
        .unwrap_or_else(|| vec![[0.5, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 3.0]])
        .into_iter()
        .map(|[re, im]| Complex::new(re, im))
        .collect()
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Verify => {
            let results = cointegra::verify::run_all();
            let mut all_pass = true;
            for r in &results {
                println!("{r}");
                all_pass &= r.passed;
            }
            let bundle = cointegra::verify::artifact_bundle(9000)?;
            write(&cli.out, "verify_artifacts.txt", &bundle)?;
            write(
                &cli.out,
                "verify.json",
                serde_json::to_string_pretty(&results)?.as_bytes(),
            )?;
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Analyze => {
            let cfg = load_config(cli)?;
            let m = measure_of(&cfg)?;
            let cf = CharacteristicFunction::new(m.clone());
            let s = cointegration_structure(&cf, None)?;
            let report = check_conditions(&cf, ScanSettings::default_for(&m))?;
            let doc = json!({
                "report": report,
                "structure": {
                    "rank": s.rank_r,
                    "Pi0": mat_rows(&s.pi0),
                    "C0": mat_rows(&s.c0),
                    "alpha_perp": mat_rows(&s.alpha_perp),
                    "beta_perp": mat_rows(&s.beta_perp),
                },
            });
            let text = serde_json::to_string_pretty(&doc)?;
            println!("{text}");
            write(&cli.out, "analyze.json", text.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Kernel => {
            let cfg = load_config(cli)?;
            let m = measure_of(&cfg)?;
            let s = cointegration_structure(&CharacteristicFunction::new(m.clone()), None)?;
            let step = cfg.step.unwrap_or(1e-3);
            let horizon = match cfg.horizon {
                Some(h) => h,
                None => truncation_horizon(&m, 1e-8)?.max(10.0),
            };
            let grid = solve_kernel(&m, &s, step, horizon)?;
            let mut csv = Vec::new();
            write_kernel_csv(&mut csv, &grid)?;
            write(&cli.out, "kernel.csv", &csv)?;
            let cf = CharacteristicFunction::new(m);
            let tol = cfg.tolerance.unwrap_or(1e-5);
            let rep = laplace_check(&grid, &cf, &z_samples(&cfg), tol)?;
            let doc = serde_json::to_string_pretty(&json!({
                "max_dev_f": rep.max_dev_f,
                "max_dev_c": rep.max_dev_c,
                "tolerance": tol,
                "pass": rep.pass,
                "truncation_error_bound": grid.truncation_error_bound,
            }))?;
            println!("{doc}");
            write(&cli.out, "laplace_report.json", doc.as_bytes())?;
            Ok(if rep.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Simulate => {
            let cfg = load_config(cli)?;
            let m = measure_of(&cfg)?;
            let n = m.dim();
            let seed = cfg.require(cfg.seed.as_ref(), "seed")?;
            let step = cfg.step.unwrap_or(1e-2);
            let t_max = cfg.t_max.unwrap_or(10.0);
            let n_paths = cfg.paths.unwrap_or(100);
            let s = cointegration_structure(&CharacteristicFunction::new(m.clone()), None)?;
            let horizon = match cfg.horizon {
                Some(h) => h,
                None => truncation_horizon(&m, 1e-8)?.max(10.0),
            };
            let kernel = solve_kernel(&m, &s, step, horizon)?;
            let xi = cfg
                .xi
                .as_ref()
                .map(|v| parse_xi(v))
                .unwrap_or_else(|| Vect::zeros(n));
            let model = LevyModel::<f64>::brownian(n);
            let paths: Result<Vec<_>> = (0..n_paths)
                .map(|i| {
                    let grid = sample_levy(&model, step, horizon, t_max, seed + i as u64)?;
                    granger_path(&kernel, &s, &grid, &xi)
                })
                .collect();
            let paths = paths?;
            let mut csv = Vec::new();
            write_paths_csv(&mut csv, &paths)?;
            write(&cli.out, "paths.csv", &csv)?;

            let dirs: Vec<Vec<f64>> = cfg.directions.clone().unwrap_or_else(|| {
                (0..n)
                    .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect()
            });
            let mut profiles = Vec::new();
            let mut slopes = Vec::new();
            for d in &dirs {
                let gamma = parse_xi(d);
                let label = format!(
                    "({})",
                    d.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")
                );
                let prof = variance_profile(&paths, &gamma)?;
                slopes.push(json!({"direction": label, "slope": ls_slope(&prof)}));
                profiles.push((label, prof));
            }
            let mut vcsv = Vec::new();
            write_variance_csv(&mut vcsv, &profiles)?;
            write(&cli.out, "variance.csv", &vcsv)?;

            // ECF residual diagnostics on the first path
            let pairs: Vec<(f64, f64)> = (0..10)
                .map(|i| {
                    let a = (i as f64) * t_max / 12.0;
                    (a, a + t_max / 6.0)
                })
                .collect();
            let mut rms = 0.0;
            for &(a, b) in &pairs {
                let sa = (a / step).round() * step;
                let tb = (b / step).round() * step;
                rms += ecf_residual(&paths[0], &m, sa, tb)?.norm_squared();
            }
            let rms = (rms / pairs.len() as f64).sqrt();
            let doc = serde_json::to_string_pretty(&json!({
                "paths": n_paths,
                "step": step,
                "t_max": t_max,
                "seed": seed,
                "ecf_rms_first_path": rms,
                "variance_slopes": slopes,
                "truncation_bias": paths[0].truncation_bias,
            }))?;
            println!("{doc}");
            write(&cli.out, "simulate_report.json", doc.as_bytes())?;

            let plot = "\
# gnuplot script: variance profiles per direction\n\
set datafile separator ','\n\
set key outside\n\
set xlabel 't'\n\
set ylabel 'Var(gamma^T (X_t - X_0))'\n\
plot for [d in system(\"awk -F', ' 'NR>1 {print $2}' variance.csv | sort -u\")] \\\n\
  'variance.csv' using 1:($2 eq d ? $3 : 1/0) title d with lines\n";
            write(&cli.out, "plot_variance.gp", plot.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Mcarma => {
            let cfg = load_config(cli)?;
            let spec = cfg
                .model
                .mcarma
                .as_ref()
                .ok_or_else(|| Error::Config("missing required field 'mcarma'".into()))?
                .build()?;
            let m = msdde_from_mcarma(&spec)?;
            let bridged = MeasureConfig::from_measure(&m);
            write(
                &cli.out,
                "bridged_measure.json",
                serde_json::to_string_pretty(&bridged)?.as_bytes(),
            )?;
            let report = check_cointegrated_conditions(&spec, None);
            let mut doc = json!({ "conditions": report });
            if report.all_pass {
                let poly = carma_c0(&spec)?;
                let s = cointegration_structure(&CharacteristicFunction::new(m), None)?;
                let dev = max_abs(&(&poly - &s.c0));
                doc["c0_polynomial_route"] = json!(mat_rows(&poly));
                doc["c0_spectral_route"] = json!(mat_rows(&s.c0));
                doc["c0_route_deviation"] = json!(dev);
            }
            let text = serde_json::to_string_pretty(&doc)?;
            println!("{text}");
            write(&cli.out, "mcarma_report.json", text.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::VarOracle => {
            let cfg = load_config(cli)?;
            let spec = cfg
                .model
                .var
                .as_ref()
                .ok_or_else(|| Error::Config("missing required field 'var'".into()))?
                .build()?;
            let tol = cfg.tolerance.unwrap_or(1e-10);
            let rep = var_granger(&spec, tol)?;
            let mut csv = Vec::new();
            write_granger_csv(&mut csv, &rep)?;
            write(&cli.out, "granger.csv", &csv)?;
            let seed = cfg.seed.unwrap_or(0);
            let xi = cfg
                .xi
                .as_ref()
                .map(|v| parse_xi(v))
                .unwrap_or_else(|| Vect::zeros(spec.dim));
            let t_len = cfg.t_max.unwrap_or(1000.0) as usize;
            let sim = simulate_var(&spec, &rep, &xi, t_len, seed)?;
            let doc = serde_json::to_string_pretty(&json!({
                "rank": rep.rank,
                "C0": mat_rows(&rep.c0),
                "series_len": rep.c_coeffs.len(),
                "tail_bound": rep.tail_bound,
                "recursion_vs_granger_max_dev": sim.max_deviation,
            }))?;
            println!("{doc}");
            write(&cli.out, "var_report.json", doc.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bridge => {
            let cfg = load_config(cli)?;
            let m = measure_of(&cfg)?;
            let step = cfg.step.unwrap_or(1e-2);
            let lag_cap = cfg.lag_cap.unwrap_or_else(|| {
                (truncation_horizon(&m, 1e-8).unwrap_or(1.0) / step).ceil() as usize + 1
            });
            let var = discretization_bridge(&m, step, lag_cap)?;
            let (pi0_d, _) = var_ecf(&var);
            let angle = max_principal_angle(&pi0_d.transpose(), &m.total_mass().transpose());
            // Trailing all-zero lags contribute only zero roots; dropping them
            // shrinks the companion eigenproblem, which is dense of dimension
            // dim * p and becomes infeasible for very small steps.
            let mut p_eff = var.gammas.len();
            while p_eff > 1 && max_abs(&var.gammas[p_eff - 1]) < 1e-14 {
                p_eff -= 1;
            }
            let companion_dim = var.dim * p_eff;
            let (roots, log_roots): (Vec<[f64; 2]>, Vec<[f64; 2]>) = if companion_dim <= 6000 {
                let trimmed = cointegra::var::VarSpec::new(
                    var.dim,
                    var.gammas[..p_eff].to_vec(),
                    var.sigma_eps.clone(),
                )?;
                let roots: Vec<[f64; 2]> = leading_roots(&trimmed, 5)
                    .into_iter()
                    .map(|z| [z.re, z.im])
                    .collect();
                let log_roots = roots
                    .iter()
                    .map(|&[re, im]| {
                        let l = Complex::new(re, im).ln() / step;
                        [l.re, l.im]
                    })
                    .collect();
                (roots, log_roots)
            } else {
                eprintln!(
                    "note: skipping root extraction (companion dimension {companion_dim} > 6000); \
                     increase 'step' or lower 'lag_cap' to enable it"
                );
                (Vec::new(), Vec::new())
            };
            let doc = serde_json::to_string_pretty(&json!({
                "step": step,
                "lag_cap": lag_cap,
                "var_order": var.p,
                "principal_angle_pi0_rowspaces": angle,
                "leading_discrete_roots": roots,
                "implied_continuous_roots": log_roots,
            }))?;
            println!("{doc}");
            write(&cli.out, "bridge_report.json", doc.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

//! The acceptance suite: eleven numerical criteria run by both the CLI
//! `verify` subcommand and the `acceptance` integration test. Each criterion
//! is self-contained and reports pass/fail with a numeric detail line;
//! tolerances are part of the contract and are never loosened here.

use std::time::Instant;

use nalgebra::{dmatrix, dvector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::config::{write_granger_csv, write_kernel_csv, write_paths_csv};
use crate::error::Result;
use crate::kernel::{laplace_check, solve_kernel, truncation_horizon};
use crate::levy::{
    ecf_residual, granger_path, granger_path_at, increment_stream, ls_slope, sample_levy,
    variance_profile, IncrementGrid, LevyModel, SolutionPath,
};
use crate::linalg::{
    inverse_r, max_abs, max_abs_c, max_principal_angle, max_re_eig, Mat, Vect,
};
use crate::mcarma::{
    carma_c0, check_cointegrated_conditions, msdde_from_mcarma, McarmaSpec,
};
use crate::measure::{Density, SignedMatrixMeasure};
use crate::scalar::cplx;
use crate::spectral::{
    c0_residue_numeric, check_conditions, cointegration_structure, CharacteristicFunction,
    CointegrationStructure, ScanSettings, Verdict,
};
use crate::var::{discretization_bridge, leading_roots, var_ecf, var_granger, VarSpec};

#[derive(Debug, Clone, serde::Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:>2} [{}] {} — {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn finish(
    id: usize,
    name: &'static str,
    started: Instant,
    limit_s: f64,
    outcome: Result<(bool, String)>,
) -> CriterionResult {
    let elapsed = started.elapsed().as_secs_f64();
    let (ok, detail) = match outcome {
        Ok((ok, d)) => (ok, d),
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = elapsed < limit_s;
    CriterionResult {
        id,
        name,
        passed: ok && in_time,
        detail: format!("{detail}; elapsed {elapsed:.2}s (limit {limit_s:.0}s)"),
    }
}

// ---------------------------------------------------------------------------
// fixtures

fn ou_full() -> SignedMatrixMeasure<f64> {
    SignedMatrixMeasure::from_atoms(2, vec![(0.0, -Mat::identity(2, 2))], 1.0).unwrap()
}

fn ou_coint() -> SignedMatrixMeasure<f64> {
    SignedMatrixMeasure::from_atoms(2, vec![(0.0, dmatrix![-1.0, 1.0; 0.0, 0.0])], 1.0).unwrap()
}

fn delay_measure() -> SignedMatrixMeasure<f64> {
    SignedMatrixMeasure::from_atoms(1, vec![(1.0, dmatrix![-1.0])], 1.0).unwrap()
}

/// Cointegrated MCARMA(2,1) fixture: P(z) = (Iz − M)(Iz − K) with M stable
/// and K carrying a zero eigenvalue.
fn mcarma21() -> McarmaSpec<f64> {
    let m = dmatrix![-1.0, 0.5; 0.0, -2.0];
    let k = dmatrix![0.0, 1.0; 0.0, -1.0];
    let p1 = -(&m + &k);
    let p2 = m * k;
    let q1 = dmatrix![1.0, 0.2; 0.0, 1.5];
    McarmaSpec::new(2, vec![p1, p2], vec![q1]).unwrap()
}

/// Deterministically seeded "random" n = 3, p = 2 spec passing the
/// cointegrated condition set: P(z) = (Iz − M)(Iz − K), eig K = {0, −1, −2}.
fn random_mcarma_n3() -> McarmaSpec<f64> {
    for attempt in 0..64u64 {
        let mut rng = increment_stream(0x5EED_CA3A, attempt);
        let mut draw = || {
            Mat::<f64>::from_fn(3, 3, |_, _| {
                let v: f64 = StandardNormal.sample(&mut rng);
                v
            })
        };
        let m = -Mat::<f64>::identity(3, 3) * 1.5 + draw() * 0.4;
        if max_re_eig(&m) > -0.2 {
            continue;
        }
        let t = Mat::<f64>::identity(3, 3) + draw() * 0.3;
        let Ok(t_inv) = inverse_r(&t) else { continue };
        let k = &t * Mat::from_diagonal(&dvector![0.0, -1.0, -2.0]) * t_inv;
        let q1 = Mat::<f64>::identity(3, 3) * 1.2 + draw() * 0.3;
        if max_re_eig(&(-&q1)) >= -1e-3 {
            continue;
        }
        let p1 = -(&m + &k);
        let p2 = m * k;
        let Ok(spec) = McarmaSpec::new(3, vec![p1, p2], vec![q1]) else {
            continue;
        };
        if !check_cointegrated_conditions(&spec, None).all_pass {
            continue;
        }
        if msdde_from_mcarma(&spec).is_err() {
            continue;
        }
        return spec;
    }
    unreachable!("no admissible random MCARMA spec found in 64 attempts")
}

fn structure_of(m: &SignedMatrixMeasure<f64>) -> Result<CointegrationStructure<f64>> {
    cointegration_structure(&CharacteristicFunction::new(m.clone()), None)
}

// ---------------------------------------------------------------------------
// criteria

/// Criterion 1: analyze of the cointegrated OU fixture.
pub fn criterion_1() -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> Result<(bool, String)> {
        let m = ou_coint();
        let cf = CharacteristicFunction::new(m.clone());
        let s = cointegration_structure(&cf, None)?;
        let report = check_conditions(&cf, ScanSettings::default_for(&m))?;
        let expect = dmatrix![0.0, 1.0; 0.0, 1.0];
        let dev_formula = max_abs(&(&s.c0 - &expect));
        let c0_res = c0_residue_numeric(&cf)?;
        let dev_residue = max_abs(&(c0_res - &expect));
        let ok = matches!(report.verdict, Verdict::Cointegrated)
            && s.rank_r == 1
            && dev_formula <= 1e-8
            && dev_residue <= 1e-8;
        Ok((
            ok,
            format!(
                "verdict {:?}, r = {}, C0 dev formula {dev_formula:.2e} / residue {dev_residue:.2e} (tol 1e-8)",
                report.verdict, s.rank_r
            ),
        ))
    };
    finish(1, "cointegrated OU analysis, dual-route C0", t0, 1.0, run())
}

fn kernel_closed_form_error(m: &SignedMatrixMeasure<f64>, step: f64, horizon: f64) -> Result<f64> {
    let s = structure_of(m)?;
    let grid = solve_kernel(m, &s, step, horizon)?;
    let coint = s.rank_r < 2;
    let mut worst: f64 = 0.0;
    for (k, _) in grid.c_tilde.iter().enumerate() {
        let t = step * k as f64;
        let e = (-t).exp();
        let (ct, c, f) = if coint {
            (
                dmatrix![e, 1.0 - e; 0.0, 1.0],
                dmatrix![e, -e; 0.0, 0.0],
                dmatrix![e, -e; 0.0, 0.0],
            )
        } else {
            (
                Mat::identity(2, 2) * e,
                Mat::identity(2, 2) * e,
                Mat::identity(2, 2) * e,
            )
        };
        worst = worst
            .max(max_abs(&(&grid.c_tilde[k] - ct)))
            .max(max_abs(&(&grid.c[k] - c)))
            .max(max_abs(&(&grid.f[k] - f)));
    }
    Ok(worst)
}

/// Criterion 2: kernel closed forms at Δ = 10⁻³, T = 10, with 4th-order
/// convergence verified on the 2Δ → Δ pair (at Δ = 10⁻³ the solution is
/// already at the round-off floor, so the finer pair cannot resolve the
/// order; see the decisions ledger).
pub fn criterion_2() -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> Result<(bool, String)> {
        let mut detail = Vec::new();
        let mut ok = true;
        for (name, m) in [("A=-I", ou_full()), ("coint OU", ou_coint())] {
            let e_fine = kernel_closed_form_error(&m, 1e-3, 10.0)?;
            let e_coarse = kernel_closed_form_error(&m, 2e-3, 10.0)?;
            let ratio = e_coarse / e_fine;
            ok &= e_fine <= 1e-6 && ratio >= 8.0;
            detail.push(format!(
                "{name}: err(1e-3) {e_fine:.2e} (tol 1e-6), err(2e-3)/err(1e-3) {ratio:.1} (>= 8)"
            ));
        }
        Ok((ok, detail.join("; ")))
    };
    finish(2, "kernel closed forms and halving order", t0, 10.0, run())
}

/// Criterion 3: Laplace identities at z ∈ {0.5, 1, 2, 1+3i}.
pub fn criterion_3() -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> Result<(bool, String)> {
        let zs: Vec<Complex<f64>> = vec![cplx(0.5, 0.0), cplx(1.0, 0.0), cplx(2.0, 0.0), cplx(1.0, 3.0)];
        let mut ok = true;
        let mut detail = Vec::new();
        let fixtures: Vec<(&str, SignedMatrixMeasure<f64>)> = vec![
            ("A=-I", ou_full()),
            ("coint OU", ou_coint()),
            ("MCARMA(2,1)", msdde_from_mcarma(&mcarma21())?),
        ];
        for (name, m) in fixtures {
            let s = structure_of(&m)?;
            let horizon = truncation_horizon(&m, 1e-8)?.max(25.0);
            let grid = solve_kernel(&m, &s, 1e-3, horizon)?;
            let cf = CharacteristicFunction::new(m);
            let rep = laplace_check(&grid, &cf, &zs, 1e-5)?;
            ok &= rep.pass;
            detail.push(format!(
                "{name}: dev f {:.2e}, dev C {:.2e} (tol 1e-5)",
                rep.max_dev_f, rep.max_dev_c
            ));
        }
        Ok((ok, detail.join("; ")))
    };
    finish(3, "Laplace transform identities", t0, 10.0, run())
}

/// Criterion 4: C₀ = I − ∫₀^∞ f on all fixtures.
pub fn criterion_4() -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> Result<(bool, String)> {
        let mut ok = true;
        let mut detail = Vec::new();
        let fixtures: Vec<(&str, SignedMatrixMeasure<f64>)> = vec![
            ("A=-I", ou_full()),
            ("coint OU", ou_coint()),
            ("MCARMA(2,1)", msdde_from_mcarma(&mcarma21())?),
            ("delay", delay_measure()),
        ];
        for (name, m) in fixtures {
            let s = structure_of(&m)?;
            let horizon = truncation_horizon(&m, 1e-9)?.max(25.0);
            let grid = solve_kernel(&m, &s, 1e-3, horizon)?;
            let n = m.dim();
            let mut int_f = Mat::<f64>::zeros(n, n);
            for (k, f) in grid.f.iter().enumerate() {
                let w = if k == 0 || k == grid.f.len() - 1 { 0.5 } else { 1.0 };
                int_f += f * (w * grid.step);
            }
            // f is cadlag with a jump of -A at every atom time t > 0 (the
            // convolution picks up -Ctilde(0)A = -A the instant the atom
            // enters the window). The trapezoid rule treats that jump as a
            // linear ramp over one cell, overcounting by step/2 * (-A);
            // remove it so only genuine quadrature error remains.
            for (t, a) in m.atoms() {
                if *t > 0.0 && *t <= grid.horizon {
                    int_f += a * (grid.step / 2.0);
                }
            }
            let dev = max_abs(&(Mat::identity(n, n) - int_f - &s.c0));
            ok &= dev <= 1e-6;
            detail.push(format!("{name}: dev {dev:.2e} (tol 1e-6)"));
        }
        Ok((ok, detail.join("; ")))
    };
    finish(4, "C0 = I - integral of f", t0, 30.0, run())
}

fn ecf_rms(
    m: &SignedMatrixMeasure<f64>,
    grid: &IncrementGrid<f64>,
    pairs: &[(f64, f64)],
) -> Result<f64> {
    let s = structure_of(m)?;
    let kernel = solve_kernel(m, &s, grid.step, 25.0)?;
    let path = granger_path(&kernel, &s, grid, &Vect::zeros(m.dim()))?;
    let mut acc = 0.0;
    for &(sv, tv) in pairs {
        let r = ecf_residual(&path, m, sv, tv)?;
        acc += r.norm_squared();
    }
    Ok((acc / pairs.len() as f64).sqrt())
}

/// Criterion 5: ECF residual O(Δ) scaling over 100 random (s, t) pairs.
pub fn criterion_5() -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> Result<(bool, String)> {
        let coarse_step = 0.01;
        let mut rng = increment_stream(0xEC5, 0);
        let mut pairs = Vec::with_capacity(100);
        while pairs.len() < 100 {
            let a = (rng.random::<f64>() * 1000.0).floor() * coarse_step;
            let b = (rng.random::<f64>() * 1000.0).floor() * coarse_step;
            if (a - b).abs() > coarse_step * 1.5 {
                pairs.push((a.min(b), a.max(b)));
            }
        }
        let model = LevyModel::<f64>::brownian(2);
        let mut ok = true;
        let mut detail = Vec::new();
        for (name, m) in [("A=-I", ou_full()), ("coint OU", ou_coint())] {
            let fine = sample_levy(&model, coarse_step / 2.0, 25.0, 10.0, 0xEC5 + 1)?;
            let coarse = fine.coarsen(2)?;
            let rms_c = ecf_rms(&m, &coarse, &pairs)?;
            let rms_f = ecf_rms(&m, &fine, &pairs)?;
            ok &= rms_f <= 0.6 * rms_c;
            detail.push(format!(
                "{name}: RMS {rms_c:.3e} -> {rms_f:.3e}, ratio {:.2} (<= 0.6)",
                rms_f / rms_c
            ));
        }
        Ok((ok, detail.join("; ")))
    };
    finish(5, "error-correction residual O(step) scaling", t0, 30.0, run())
}

fn coint_ensemble(
    count: usize,
    t_max: f64,
    step: f64,
    out_every: f64,
    seed0: u64,
    xi: Vect<f64>,
) -> Result<Vec<SolutionPath<f64>>> {
    let m = ou_coint();
    let s = structure_of(&m)?;
    let horizon = 30.0;
    let kernel = solve_kernel(&m, &s, step, horizon)?;
    let model = LevyModel::<f64>::brownian(2);
    let times: Vec<f64> = (0..=(t_max / out_every).round() as usize)
        .map(|i| i as f64 * out_every)
        .collect();
    (0..count)
        .into_par_iter()
        .map(|i| {
            let grid = sample_levy(&model, step, horizon, t_max, seed0 + i as u64)?;
            granger_path_at(&kernel, &s, &grid, &xi, &times)
        })
        .collect()
}

/// Criterion 6: variance dichotomy over 500 Brownian-driven paths, T = 50.
pub fn criterion_6() -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> Result<(bool, String)> {
        let paths = coint_ensemble(500, 50.0, 0.01, 0.5, 42_000, dvector![0.0, 0.0])?;
        let walk = ls_slope(&variance_profile(&paths, &dvector![0.0, 1.0])?);
        let stat = ls_slope(&variance_profile(&paths, &dvector![-1.0, 1.0])?);
        let ok = (walk - 1.0).abs() <= 0.15 && stat.abs() <= 0.05;
        Ok((
            ok,
            format!("slope (0,1) {walk:.4} (1 +- 15%), slope (-1,1) {stat:.4} (<= 0.05)"),
        ))
    };
    finish(6, "cointegration variance dichotomy", t0, 120.0, run())
}

/// Criterion 7: ξ-increment invariance is exact.
pub fn criterion_7() -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> Result<(bool, String)> {
        let a = coint_ensemble(3, 10.0, 0.01, 0.5, 77_000, dvector![0.0, 0.0])?;
        let b = coint_ensemble(3, 10.0, 0.01, 0.5, 77_000, dvector![3.0, 3.0])?;
        let mut exact = true;
        for (pa, pb) in a.iter().zip(&b) {
            for (xa, xb) in pa.x.iter().zip(&pb.x) {
                exact &= xa[0] + 3.0 == xb[0] && xa[1] + 3.0 == xb[1];
            }
        }
        Ok((exact, "paths shifted by exactly (3,3) at every output point".into()))
    };
    finish(7, "xi-increment invariance (exact)", t0, 30.0, run())
}

/// Criterion 8: VAR oracle closed forms.
pub fn criterion_8() -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> Result<(bool, String)> {
        let mut ok = true;
        let mut detail = Vec::new();

        let biv = VarSpec::new(2, vec![dmatrix![0.5, 0.5; 0.5, 0.5]], Mat::identity(2, 2))?;
        let rep = var_granger(&biv, 1e-12)?;
        let d0 = max_abs(&(&rep.c0 - dmatrix![0.5, 0.5; 0.5, 0.5]));
        let d1 = max_abs(&(&rep.c_coeffs[0] - dmatrix![0.5, -0.5; -0.5, 0.5]));
        let d2 = rep.c_coeffs[1..]
            .iter()
            .map(max_abs)
            .fold(0.0f64, f64::max);
        ok &= d0 <= 1e-10 && d1 <= 1e-10 && d2 <= 1e-10;
        detail.push(format!("bivariate: C0 {d0:.1e}, C(0) {d1:.1e}, C(j>=1) {d2:.1e} (tol 1e-10)"));

        let rw = VarSpec::<f64>::new(1, vec![dmatrix![1.0]], dmatrix![1.0])?;
        let rep = var_granger(&rw, 1e-12)?;
        let dc = (rep.c0[(0, 0)] - 1.0).abs();
        let dj = rep.c_coeffs.iter().map(max_abs).fold(0.0f64, f64::max);
        ok &= dc <= 1e-10 && dj <= 1e-10;
        detail.push(format!("random walk: C0 dev {dc:.1e}, C(j) {dj:.1e}"));

        let ar = VarSpec::<f64>::new(1, vec![dmatrix![0.5]], dmatrix![1.0])?;
        let rep = var_granger(&ar, 1e-12)?;
        let mut dg: f64 = rep.c0[(0, 0)].abs();
        for (j, c) in rep.c_coeffs.iter().enumerate().take(40) {
            dg = dg.max((c[(0, 0)] - 0.5f64.powi(j as i32)).abs());
        }
        ok &= dg <= 1e-10;
        detail.push(format!("AR(1): series dev {dg:.1e}"));
        Ok((ok, detail.join("; ")))
    };
    finish(8, "VAR oracle closed forms", t0, 1.0, run())
}

/// Criterion 9: MCARMA bridge identities and dual-route C₀.
pub fn criterion_9() -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> Result<(bool, String)> {
        let mut ok = true;
        let mut detail = Vec::new();

        // Fourier identity at 64 log-spaced frequencies for every fixture
        let specs: Vec<(&str, McarmaSpec<f64>)> = vec![
            ("MCARMA(2,1)", mcarma21()),
            ("random n=3 p=2", random_mcarma_n3()),
        ];
        for (name, spec) in &specs {
            let m = msdde_from_mcarma(spec)?;
            let eta0 = crate::linalg::to_complex(&spec.eta0());
            let n = spec.dim;
            let mut worst: f64 = 0.0;
            for i in 0..64 {
                let y = 10f64.powf(-2.0 + 4.0 * i as f64 / 63.0);
                let iy = cplx::<f64>(0.0, y);
                let lhs = m.laplace(iy)? - &eta0;
                let rhs = crate::linalg::CMat::<f64>::identity(n, n) * iy
                    - &eta0
                    - crate::linalg::solve_c(&spec.q_at(iy), &spec.p_at(iy))?;
                worst = worst.max(max_abs_c(&(lhs - rhs)));
            }
            ok &= worst <= 1e-8;
            detail.push(format!("{name}: Fourier identity dev {worst:.2e} (tol 1e-8)"));
        }

        // dual-route C0 on the p = 1 fixture and the random n = 3 spec
        let p1 = McarmaSpec::new(2, vec![dmatrix![1.0, -1.0; 0.0, 0.0]], vec![])?;
        for (name, spec) in [("p=1", &p1), ("random n=3 p=2", &specs[1].1)] {
            let poly = carma_c0(spec)?;
            let m = msdde_from_mcarma(spec)?;
            let s = structure_of(&m)?;
            let dev = max_abs(&(poly - &s.c0));
            ok &= dev <= 1e-8;
            detail.push(format!("{name}: C0 route dev {dev:.2e} (tol 1e-8)"));
        }

        // p = 1 bridge reproduces the OU measure exactly
        let m = msdde_from_mcarma(&p1)?;
        let exact = matches!(m.density(), Density::None)
            && m.atoms().len() == 1
            && m.atoms()[0].0 == 0.0
            && m.atoms()[0].1 == dmatrix![-1.0, 1.0; 0.0, 0.0];
        ok &= exact;
        detail.push(format!("p=1 measure exact: {exact}"));
        Ok((ok, detail.join("; ")))
    };
    finish(9, "MCARMA bridge identities", t0, 10.0, run())
}

fn delay_root_deviation(dt: f64) -> Result<f64> {
    let m = delay_measure();
    let lags = (1.0 / dt).round() as usize + 1;
    let spec = discretization_bridge(&m, dt, lags)?;
    let mut worst: f64 = 0.0;
    for lam in leading_roots(&spec, 5) {
        // refine the continuous root of z + e^{−z} by Newton
        let mut z = lam.ln() / dt;
        for _ in 0..80 {
            let f = z + (-z).exp();
            let df = 1.0 - (-z).exp();
            z -= f / df;
        }
        if (z + (-z).exp()).norm() > 1e-12 {
            return Err(crate::error::Error::Root(
                "Newton refinement of a continuous delay root failed".into(),
            ));
        }
        worst = worst.max((lam - (z * dt).exp()).norm());
    }
    Ok(worst)
}

/// Criterion 10: discretization bridge — cointegration-space angle and root
/// mapping.
pub fn criterion_10() -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> Result<(bool, String)> {
        let m = ou_coint();
        let var = discretization_bridge(&m, 1e-2, 1)?;
        let (pi0_d, _) = var_ecf(&var);
        let angle = max_principal_angle(&pi0_d.transpose(), &m.total_mass().transpose());
        let d1 = delay_root_deviation(0.01)?;
        let d2 = delay_root_deviation(0.005)?;
        let ratio = d2 / d1;
        let ok = angle <= 1e-8 && ratio <= 0.35;
        Ok((
            ok,
            format!(
                "principal angle {angle:.2e} (tol 1e-8); root dev {d1:.2e} -> {d2:.2e}, ratio {ratio:.2} (O(step^2) wants ~0.25)"
            ),
        ))
    };
    finish(10, "Euler discretization bridge", t0, 30.0, run())
}

/// Canonical artifact bundle used for the determinism criterion: kernel CSV,
/// 3-path ensemble CSV, Granger CSV, and the analyze JSON report.
pub fn artifact_bundle(seed: u64) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let m = ou_coint();
    let cf = CharacteristicFunction::new(m.clone());
    let s = cointegration_structure(&cf, None)?;
    let grid = solve_kernel(&m, &s, 0.01, 5.0)?;
    write_kernel_csv(&mut out, &grid)?;

    let paths = coint_ensemble(3, 10.0, 0.01, 0.5, seed, dvector![0.0, 0.0])?;
    write_paths_csv(&mut out, &paths)?;

    let var = VarSpec::new(2, vec![dmatrix![0.5, 0.5; 0.5, 0.5]], Mat::identity(2, 2))?;
    let rep = var_granger(&var, 1e-12)?;
    write_granger_csv(&mut out, &rep)?;

    let report = check_conditions(&cf, ScanSettings::default_for(&m))?;
    out.extend_from_slice(serde_json::to_string_pretty(&report)?.as_bytes());
    Ok(out)
}

/// Criterion 11: repeated runs are byte-identical.
pub fn criterion_11() -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> Result<(bool, String)> {
        let a = artifact_bundle(9000)?;
        let b = artifact_bundle(9000)?;
        let ok = a == b;
        Ok((ok, format!("two runs produced {} identical bytes", a.len())))
    };
    finish(11, "artifact determinism", t0, 60.0, run())
}

/// Runs the full acceptance suite in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ]
}

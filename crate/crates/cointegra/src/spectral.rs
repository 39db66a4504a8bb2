//! Characteristic function of an MSDDE, classification of the model through
//! an argument-principle scan, and the cointegration structure (rank factors
//! and the long-run matrix C₀).

use nalgebra::ComplexField;
use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    condition_number, inverse_r, rank_factors, solve_c, CMat, Mat,
    RankFactors,
};
use crate::measure::SignedMatrixMeasure;
use crate::scalar::{cplx, real, to_f64, Scalar};

/// The characteristic function h(z) = zI − L[η](z), analytic on Re(z) > −δ.
#[derive(Debug, Clone)]
pub struct CharacteristicFunction<S: Scalar> {
    measure: SignedMatrixMeasure<S>,
}

impl<S: Scalar> CharacteristicFunction<S> {
    pub fn new(measure: SignedMatrixMeasure<S>) -> Self {
        Self { measure }
    }

    pub fn measure(&self) -> &SignedMatrixMeasure<S> {
        &self.measure
    }

    pub fn dim(&self) -> usize {
        self.measure.dim()
    }

    /// h(z) = zI − L[η](z). Errors outside the half-plane Re(z) > −δ.
    pub fn char_fn(&self, z: Complex<S>) -> Result<CMat<S>> {
        let n = self.measure.dim();
        let l = self.measure.laplace(z)?;
        Ok(CMat::identity(n, n) * z - l)
    }

    /// det h(z).
    pub fn det(&self, z: Complex<S>) -> Result<Complex<S>> {
        Ok(self.char_fn(z)?.lu().determinant())
    }

    /// z·h(z)⁻¹, the integrand of the residue formula for C₀.
    pub fn scaled_inverse(&self, z: Complex<S>) -> Result<CMat<S>> {
        let n = self.measure.dim();
        let h = self.char_fn(z)?;
        Ok(solve_c(&h, &CMat::identity(n, n))? * z)
    }
}

/// Rank factorization of Π₀ together with the long-run matrix.
#[derive(Debug, Clone)]
pub struct CointegrationStructure<S: Scalar> {
    pub pi0: Mat<S>,
    pub rank_r: usize,
    pub alpha: Mat<S>,
    pub beta: Mat<S>,
    pub alpha_perp: Mat<S>,
    pub beta_perp: Mat<S>,
    pub c0: Mat<S>,
    pub pi_total: Mat<S>,
    pub rank_tol: S,
}

/// C₀ = β⊥ [(α⊥)ᵀ(I − Π([0,∞)))β⊥]⁻¹ (α⊥)ᵀ for given null bases.
pub fn c0_long_run<S: Scalar>(
    alpha_perp: &Mat<S>,
    beta_perp: &Mat<S>,
    pi_total: &Mat<S>,
) -> Result<Mat<S>> {
    let n = pi_total.nrows();
    let core = alpha_perp.transpose() * (Mat::identity(n, n) - pi_total) * beta_perp;
    let cond = condition_number(&core);
    if cond > real::<S>(1e12) {
        return Err(Error::Singular(format!(
            "(alpha_perp)^T (I - Pi_total) beta_perp has condition number {:.3e}",
            to_f64(cond)
        )));
    }
    Ok(beta_perp * inverse_r(&core)? * alpha_perp.transpose())
}

/// Computes Π₀ = η([0,∞)), its rank factorization and C₀.
///
/// `rank_tol` defaults to 10⁻⁸·σ_max of Π₀.
pub fn cointegration_structure<S: Scalar>(
    cf: &CharacteristicFunction<S>,
    rank_tol: Option<S>,
) -> Result<CointegrationStructure<S>> {
    let n = cf.dim();
    let pi0 = cf.measure().total_mass();
    let smax = pi0
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(S::zero(), |m, &s| if s > m { s } else { m });
    let tol = rank_tol.unwrap_or_else(|| real::<S>(1e-8) * if smax > S::zero() { smax } else { S::one() });
    let RankFactors {
        rank,
        alpha,
        beta,
        alpha_perp,
        beta_perp,
        ..
    } = rank_factors(&pi0, tol);
    let pi_total = cf.measure().pi_total();
    let c0 = if rank == n {
        Mat::zeros(n, n)
    } else {
        c0_long_run(&alpha_perp, &beta_perp, &pi_total)?
    };
    Ok(CointegrationStructure {
        pi0,
        rank_r: rank,
        alpha,
        beta,
        alpha_perp,
        beta_perp,
        c0,
        pi_total,
        rank_tol: tol,
    })
}

/// Model classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stationary,
    Cointegrated,
    Rejected,
}

/// Outcome of the two-route condition check.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub zero_count_right_halfplane: usize,
    pub zero_at_origin: bool,
    pub pole_simple: bool,
    pub route_a_pass: bool,
    pub route_b_pass: bool,
    pub verdict: Verdict,
}

/// Scan region for the argument-principle zero count.
#[derive(Debug, Clone, Copy)]
pub struct ScanSettings<S: Scalar> {
    /// Left boundary −ε of the scan rectangle; must satisfy 0 < ε < δ.
    pub epsilon: S,
    /// Initial half-width R of the rectangle; enlarged automatically until
    /// the growth bound ‖L[η](z)‖ < |z|/2 holds on |z| = R.
    pub radius: S,
    /// Maximum bisection depth per contour segment.
    pub refinement: u32,
}

impl<S: Scalar> ScanSettings<S> {
    pub fn default_for(measure: &SignedMatrixMeasure<S>) -> Self {
        let half = measure.decay_rate() * real::<S>(0.5);
        let cap = real::<S>(1e-3);
        Self {
            epsilon: if half < cap { half } else { cap },
            radius: real(5.0),
            refinement: 48,
        }
    }
}

fn phase_increment<S: Scalar>(
    eval: &impl Fn(Complex<S>) -> Result<Complex<S>>,
    z1: Complex<S>,
    z2: Complex<S>,
    w1: Complex<S>,
    w2: Complex<S>,
    depth: u32,
) -> Result<S> {
    let tiny = real::<S>(1e-300);
    if w1.modulus() < tiny || w2.modulus() < tiny {
        return Err(Error::ScanResolution(
            "det h vanishes on the scan contour".into(),
        ));
    }
    let inc = (w2 / w1).argument();
    if inc.abs() < S::frac_pi_2() {
        return Ok(inc);
    }
    if depth == 0 {
        return Err(Error::ScanResolution(format!(
            "phase increment {:.3} >= pi/2 at max refinement near z = {:.3e}+{:.3e}i",
            to_f64(inc),
            to_f64(z1.re),
            to_f64(z1.im)
        )));
    }
    let mid = (z1 + z2) * cplx::<S>(0.5, 0.0);
    let wm = eval(mid)?;
    Ok(phase_increment(eval, z1, mid, w1, wm, depth - 1)?
        + phase_increment(eval, mid, z2, wm, w2, depth - 1)?)
}

/// Winding number of `eval` along the closed polyline/arc sample `points`
/// (first point not repeated at the end).
fn winding_number<S: Scalar>(
    eval: &impl Fn(Complex<S>) -> Result<Complex<S>>,
    points: &[Complex<S>],
    refinement: u32,
) -> Result<i64> {
    let vals: Vec<Complex<S>> = points
        .iter()
        .map(|&z| eval(z))
        .collect::<Result<Vec<_>>>()?;
    let mut total = S::zero();
    let m = points.len();
    for i in 0..m {
        let j = (i + 1) % m;
        total += phase_increment(eval, points[i], points[j], vals[i], vals[j], refinement)?;
    }
    let turns = to_f64(total) / (2.0 * std::f64::consts::PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.25 {
        return Err(Error::ScanResolution(format!(
            "winding integral did not close to an integer: {turns:.4}"
        )));
    }
    Ok(rounded as i64)
}

fn rectangle_points<S: Scalar>(eps: S, r: S, per_side: usize) -> Vec<Complex<S>> {
    let corners = [
        Complex::new(-eps, -r),
        Complex::new(r, -r),
        Complex::new(r, r),
        Complex::new(-eps, r),
    ];
    let mut pts = Vec::with_capacity(4 * per_side);
    for i in 0..4 {
        let a = corners[i];
        let b = corners[(i + 1) % 4];
        for k in 0..per_side {
            let t = real::<S>(k as f64 / per_side as f64);
            pts.push(a + (b - a) * Complex::new(t, S::zero()));
        }
    }
    pts
}

fn circle_points<S: Scalar>(rho: S, m: usize) -> Vec<Complex<S>> {
    (0..m)
        .map(|k| {
            let th = real::<S>(2.0 * std::f64::consts::PI * k as f64 / m as f64);
            Complex::new(rho * th.cos(), rho * th.sin())
        })
        .collect()
}

/// Checks Condition 1 by two independent routes and classifies the model.
pub fn check_conditions<S: Scalar>(
    cf: &CharacteristicFunction<S>,
    scan: ScanSettings<S>,
) -> Result<ConditionReport> {
    let delta = cf.measure().decay_rate();
    if scan.epsilon <= S::zero() || scan.epsilon >= delta {
        return Err(Error::Domain(format!(
            "scan epsilon must lie in (0, {:.3e})",
            to_f64(delta)
        )));
    }
    // Enlarge R until ||L[eta](z)|| < |z|/2 on sampled points of |z| = R.
    let mut r = scan.radius;
    loop {
        let mut ok = true;
        for z in circle_points(r, 64) {
            if z.re <= -scan.epsilon {
                continue;
            }
            let l = cf.measure().laplace(z)?;
            if crate::linalg::max_abs_c(&l) * real::<S>(2.0 * cf.dim() as f64) >= z.modulus() {
                ok = false;
                break;
            }
        }
        if ok {
            break;
        }
        r *= real::<S>(2.0);
        if r > real::<S>(1e9) {
            return Err(Error::ScanResolution(
                "growth bound on |z| = R never satisfied".into(),
            ));
        }
    }

    let eval = |z: Complex<S>| cf.det(z);
    let rect = rectangle_points(scan.epsilon, r, 64);
    let w_rect = winding_number(&eval, &rect, scan.refinement)?;
    let rho_cap = real::<S>(1e-3);
    let half_eps = scan.epsilon * real::<S>(0.5);
    let rho = if half_eps < rho_cap { half_eps } else { rho_cap };
    let circ = circle_points(rho, 64);
    let w_circ = winding_number(&eval, &circ, scan.refinement)?;
    let zero_count = (w_rect - w_circ).max(0) as usize;

    // Origin zero: det h(0) = det(-Pi_0), so the robust form of the
    // |det h(0)| < tol test is rank deficiency of Pi_0.
    let structure = cointegration_structure(cf, None);
    let (rank_r, n) = match &structure {
        Ok(s) => (s.rank_r, cf.dim()),
        Err(_) => {
            let pi0 = cf.measure().total_mass();
            let smax = pi0
                .clone()
                .svd(false, false)
                .singular_values
                .iter()
                .fold(S::zero(), |m, &s| if s > m { s } else { m });
            let tol = real::<S>(1e-8) * if smax > S::zero() { smax } else { S::one() };
            (rank_factors(&pi0, tol).rank, cf.dim())
        }
    };
    let zero_at_origin = rank_r < n;

    // Route A analytic pole test: z h(z)^{-1} along z = 10^{-k} converges to
    // a finite nonzero limit iff the pole at 0 exists and is simple.
    let mut vals = Vec::new();
    let mut pole_simple = true;
    for k in 2..=6 {
        match cf.scaled_inverse(cplx(10f64.powi(-k), 0.0)) {
            Ok(v) => vals.push(v),
            Err(_) => {
                pole_simple = false;
                break;
            }
        }
    }
    if pole_simple {
        let norms: Vec<S> = vals.iter().map(crate::linalg::max_abs_c).collect();
        let last = *norms.last().unwrap();
        let grows = norms.windows(2).all(|w| w[1] > w[0] * real::<S>(3.0));
        let d_first = crate::linalg::max_abs_c(&(&vals[1] - &vals[0]));
        let d_last = crate::linalg::max_abs_c(&(vals[4].clone() - &vals[3]));
        let converges = d_last <= d_first * real::<S>(0.2) + real::<S>(1e-10);
        pole_simple = !grows && converges && last > real::<S>(1e-8);
    }

    let route_a_pass = zero_count == 0 && (!zero_at_origin || pole_simple);
    let route_b_pass = zero_count == 0 && (rank_r == n || structure.is_ok());

    let verdict = if zero_count == 0 && !zero_at_origin {
        Verdict::Stationary
    } else if zero_count == 0 && zero_at_origin && route_a_pass && route_b_pass {
        Verdict::Cointegrated
    } else {
        Verdict::Rejected
    };

    Ok(ConditionReport {
        zero_count_right_halfplane: zero_count,
        zero_at_origin,
        pole_simple,
        route_a_pass,
        route_b_pass,
        verdict,
    })
}

/// Richardson-extrapolated limit of z·h(z)⁻¹ along z = 2⁻ᵏ, k = 4..20.
pub fn c0_residue_numeric<S: Scalar>(cf: &CharacteristicFunction<S>) -> Result<Mat<S>> {
    let mut a: Vec<CMat<S>> = Vec::new();
    for k in 4..=20 {
        let v = cf.scaled_inverse(cplx(2f64.powi(-k), 0.0))?;
        a.push(v);
    }
    let norms: Vec<S> = a.iter().map(crate::linalg::max_abs_c).collect();
    if norms.windows(2).rev().take(4).all(|w| w[1] > w[0] * real::<S>(1.5)) {
        return Err(Error::Divergence(
            "z h(z)^{-1} grows along z -> 0; pole at the origin is not simple".into(),
        ));
    }
    // a(z) = C0 + z D + O(z^2), so 2 a(z/2) - a(z) removes the linear term.
    let b: Vec<CMat<S>> = a
        .windows(2)
        .map(|w| &w[1] * cplx::<S>(2.0, 0.0) - &w[0])
        .collect();
    let m = b.len();
    let tail = crate::linalg::max_abs_c(&(&b[m - 1] - &b[m - 2]));
    let scale = S::one() + crate::linalg::max_abs_c(&b[m - 1]);
    if tail > real::<S>(1e-6) * scale {
        return Err(Error::Divergence(format!(
            "Richardson sequence failed the Cauchy criterion (tail {:.3e})",
            to_f64(tail)
        )));
    }
    Ok(crate::linalg::real_part(&b[m - 1]))
}

//! Granger-representation kernels: the resolvent C̃, the moving-average
//! kernel C = C̃ − C₀ and the filter kernel f, obtained by integrating the
//! delay differential equations they satisfy.
//!
//! C̃ solves C̃′(t) = (C̃∗η)(t), C̃(0) = I. f solves the differentiated form
//! of f(t) = ∫₀ᵗ(f∗η)(u)du − η([0,t]): between atom times f′ = (f∗η) − η₁,
//! with initial value −η({0}) and a jump of −η({t_j}) at every positive atom
//! time. Matrix-exponential densities are folded into the ODE state through
//! the auxiliary integral W(t) = ∫₀ᵗ Y(s)H e^{F(t−s)} ds, which satisfies
//! W′ = YH + WF, so no quadrature over the history is needed.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, Mat};
use crate::measure::{Density, SampledKernel, SignedMatrixMeasure};
use crate::scalar::{real, to_f64, Scalar};
use crate::spectral::{CharacteristicFunction, CointegrationStructure, Verdict};
use nalgebra::ComplexField;
use num_complex::Complex;

/// Sampled Granger kernels on the uniform grid kΔ, k = 0..=n_steps.
#[derive(Debug, Clone)]
pub struct KernelGrid<S: Scalar> {
    pub step: S,
    pub horizon: S,
    pub c_tilde: Vec<Mat<S>>,
    pub c: Vec<Mat<S>>,
    pub f: Vec<Mat<S>>,
    pub c0: Mat<S>,
    pub truncation_error_bound: S,
}

impl<S: Scalar> KernelGrid<S> {
    pub fn len(&self) -> usize {
        self.c_tilde.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c_tilde.is_empty()
    }

    pub fn time(&self, k: usize) -> S {
        real::<S>(k as f64) * self.step
    }

    /// C(t) by cubic interpolation; zero outside [0, horizon].
    pub fn eval_c(&self, t: S) -> Mat<S> {
        if t < S::zero() || t > self.horizon {
            let n = self.c0.nrows();
            return Mat::zeros(n, n);
        }
        lagrange4(&self.c, self.step, t)
    }

    /// f(t) by cubic interpolation; zero outside [0, horizon].
    pub fn eval_f(&self, t: S) -> Mat<S> {
        if t < S::zero() || t > self.horizon {
            let n = self.c0.nrows();
            return Mat::zeros(n, n);
        }
        lagrange4(&self.f, self.step, t)
    }
}

/// Cubic Lagrange interpolation of uniformly sampled matrices at s ≥ 0.
/// Falls back to lower order when fewer than four samples are available.
fn lagrange4<S: Scalar>(values: &[Mat<S>], step: S, s: S) -> Mat<S> {
    let len = values.len();
    let x = to_f64(s / step);
    if len == 1 {
        return values[0].clone();
    }
    if len < 4 {
        let i = (x.floor() as usize).min(len - 2);
        let w = real::<S>(x - i as f64);
        return &values[i] * (S::one() - w) + &values[i + 1] * w;
    }
    let idx = x.floor() as isize - 1;
    let i0 = idx.clamp(0, len as isize - 4) as usize;
    let u = x - i0 as f64;
    let mut out = Mat::zeros(values[0].nrows(), values[0].ncols());
    for j in 0..4usize {
        let mut w = 1.0;
        for k in 0..4usize {
            if k != j {
                w *= (u - k as f64) / (j as f64 - k as f64);
            }
        }
        out += &values[i0 + j] * real::<S>(w);
    }
    out
}

/// Cubic interpolation of the stored history that never spans a breakpoint
/// node, so jumps and kinks at atom-time combinations do not pollute the
/// interpolant. `breaks` holds sorted node indices starting new branches.
/// The branch is selected by `hint` (the argument at the start of the
/// current RK4 step); evaluation points past the branch end are handled by
/// one-sided extrapolation, keeping every stage on a single smooth branch.
fn interp_history<S: Scalar>(
    values: &[Mat<S>],
    step: S,
    s: S,
    breaks: &[usize],
    hint: S,
) -> Mat<S> {
    let len = values.len();
    let mut x = to_f64(s / step);
    let xr = x.round();
    if (x - xr).abs() < 1e-6 {
        x = xr;
    }
    let mut hx = to_f64(hint / step);
    let hr = hx.round();
    if (hx - hr).abs() < 1e-6 {
        hx = hr;
    }
    let xf = (hx.max(0.0).floor() as usize).min(len - 1);
    let k = breaks.partition_point(|&b| b <= xf);
    let lo = if k == 0 { 0 } else { breaks[k - 1] };
    let hi = breaks.get(k).copied().unwrap_or(len).min(len);
    let count = hi - lo;
    if count == 1 {
        return values[lo].clone();
    }
    if count < 4 {
        let i = xf.clamp(lo, hi - 2);
        let w = real::<S>(x - i as f64);
        return &values[i] * (S::one() - w) + &values[i + 1] * w;
    }
    let i0 = ((x.floor() as isize) - 1).clamp(lo as isize, hi as isize - 4) as usize;
    let u = x - i0 as f64;
    let mut out = Mat::zeros(values[0].nrows(), values[0].ncols());
    for j in 0..4usize {
        let mut w = 1.0;
        for k in 0..4usize {
            if k != j {
                w *= (u - k as f64) / (j as f64 - k as f64);
            }
        }
        out += &values[i0 + j] * real::<S>(w);
    }
    out
}

struct DelayOde<'a, S: Scalar> {
    measure: &'a SignedMatrixMeasure<S>,
    step: S,
    atom0: Option<Mat<S>>,
    delayed: Vec<(S, Mat<S>)>,
    matexp: Option<(Mat<S>, Mat<S>, Mat<S>)>,
    breaks: Vec<usize>,
}

impl<'a, S: Scalar> DelayOde<'a, S> {
    fn new(measure: &'a SignedMatrixMeasure<S>, step: S, n_steps: usize) -> Result<Self> {
        let mut atom0 = None;
        let mut delayed = Vec::new();
        for (t, a) in measure.atoms() {
            if *t == S::zero() {
                atom0 = Some(a.clone());
            } else {
                if *t < step {
                    return Err(Error::Grid(format!(
                        "atom at t = {:.3e} lies inside the first step {:.3e}",
                        to_f64(*t),
                        to_f64(step)
                    )));
                }
                delayed.push((*t, a.clone()));
            }
        }
        let matexp = match measure.density() {
            Density::MatrixExponential { h, f, g } => Some((h.clone(), f.clone(), g.clone())),
            _ => None,
        };
        // breakpoints: grid-aligned integer combinations of atom times
        let mut atom_nodes = Vec::new();
        for (t, _) in &delayed {
            let x = to_f64(*t / step);
            let r = x.round();
            if (x - r).abs() < 1e-6 && r >= 1.0 {
                atom_nodes.push(r as usize);
            }
        }
        let mut reach = vec![false; n_steps + 1];
        reach[0] = true;
        for &a in &atom_nodes {
            for i in a..=n_steps {
                if reach[i - a] {
                    reach[i] = true;
                }
            }
        }
        let breaks: Vec<usize> = (1..=n_steps).filter(|&i| reach[i]).collect();
        Ok(Self {
            measure,
            step,
            atom0,
            delayed,
            matexp,
            breaks,
        })
    }

    fn aux_dim(&self) -> usize {
        self.matexp.as_ref().map_or(0, |(_, f, _)| f.nrows())
    }

    /// Derivative of (Y, W) at stage time t with stage value y and stored
    /// history of Y on the grid. Delayed atoms are gated on the step start
    /// time t0, so each RK4 step integrates a single smooth branch even when
    /// a kink sits exactly on the step boundary.
    fn deriv(
        &self,
        t0: S,
        t: S,
        y: &Mat<S>,
        w: &Mat<S>,
        hist: &[Mat<S>],
        forcing: Option<&dyn Fn(S) -> Mat<S>>,
    ) -> (Mat<S>, Mat<S>) {
        let n = y.nrows();
        let mut dy = Mat::zeros(n, n);
        if let Some(a0) = &self.atom0 {
            dy += y * a0;
        }
        let tol = self.step * real::<S>(1e-9);
        for (tj, aj) in &self.delayed {
            if t0 + tol >= *tj {
                let s = if t - *tj < S::zero() { S::zero() } else { t - *tj };
                let s0 = if t0 - *tj < S::zero() { S::zero() } else { t0 - *tj };
                dy += interp_history(hist, self.step, s, &self.breaks, s0) * aj;
            }
        }
        let mut dw = Mat::zeros(w.nrows(), w.ncols());
        if let Some((h, fm, g)) = &self.matexp {
            dy += w * g;
            dw = y * h + w * fm;
        }
        if let Density::Sampled { .. } = self.measure.density() {
            // direct quadrature against the sampled density
            let hs = match self.measure.density() {
                Density::Sampled { step, .. } => *step,
                _ => unreachable!(),
            };
            let m = (to_f64(t / hs)).floor() as usize;
            if m > 0 {
                let mut acc = Mat::zeros(n, n);
                for i in 0..=m {
                    let u = real::<S>(i as f64) * hs;
                    let arg = if t - u < S::zero() { S::zero() } else { t - u };
                    let arg0 = if t0 - u < S::zero() { S::zero() } else { t0 - u };
                    let term = interp_history(hist, self.step, arg, &self.breaks, arg0)
                        * self.measure.density_at(u);
                    let w_tr = if i == 0 || i == m { real::<S>(0.5) } else { S::one() };
                    acc += term * w_tr;
                }
                dy += acc * hs;
            }
        }
        if let Some(fc) = forcing {
            dy += fc(t);
        }
        (dy, dw)
    }
}

/// RK4 integration of Y′ = (Y∗η) + forcing with càdlàg jumps; returns the
/// grid samples of Y (right limits at jump times).
fn integrate_delay<S: Scalar>(
    measure: &SignedMatrixMeasure<S>,
    y0: Mat<S>,
    forcing: Option<&dyn Fn(S) -> Mat<S>>,
    jumps: &[(S, Mat<S>)],
    step: S,
    n_steps: usize,
    guard: S,
) -> Result<Vec<Mat<S>>> {
    let ode = DelayOde::new(measure, step, n_steps)?;
    let n = y0.nrows();
    let md = ode.aux_dim();
    let mut y = y0;
    let mut w = Mat::<S>::zeros(n, md);
    let mut hist: Vec<Mat<S>> = Vec::with_capacity(n_steps + 1);
    hist.push(y.clone());
    let half = step * real::<S>(0.5);
    let sixth = step / real::<S>(6.0);
    for k in 0..n_steps {
        let t = real::<S>(k as f64) * step;
        let (k1y, k1w) = ode.deriv(t, t, &y, &w, &hist, forcing);
        let (k2y, k2w) = ode.deriv(
            t,
            t + half,
            &(&y + &k1y * half),
            &(&w + &k1w * half),
            &hist,
            forcing,
        );
        let (k3y, k3w) = ode.deriv(
            t,
            t + half,
            &(&y + &k2y * half),
            &(&w + &k2w * half),
            &hist,
            forcing,
        );
        let (k4y, k4w) = ode.deriv(
            t,
            t + step,
            &(&y + &k3y * step),
            &(&w + &k3w * step),
            &hist,
            forcing,
        );
        y += (k1y + k2y * real::<S>(2.0) + k3y * real::<S>(2.0) + k4y) * sixth;
        if md > 0 {
            w += (k1w + k2w * real::<S>(2.0) + k3w * real::<S>(2.0) + k4w) * sixth;
        }
        // apply jumps whose time falls in (t, t + step]
        let t_next = real::<S>((k + 1) as f64) * step;
        for (tj, dj) in jumps {
            if *tj > t && *tj <= t_next + step * real::<S>(1e-9) {
                y += dj;
            }
        }
        if max_abs(&y) > guard {
            return Err(Error::Instability(format!(
                "kernel norm exceeded {:.3e} at t = {:.4}",
                to_f64(guard),
                to_f64(t_next)
            )));
        }
        hist.push(y.clone());
    }
    Ok(hist)
}

/// Default grid step: 10⁻³/δ clamped to [10⁻⁴, 10⁻²], shrunk if needed so
/// that no positive atom time falls inside the first step.
pub fn default_step<S: Scalar>(measure: &SignedMatrixMeasure<S>) -> S {
    let mut dt = real::<S>(1e-3) / measure.decay_rate();
    if dt < real::<S>(1e-4) {
        dt = real(1e-4);
    }
    if dt > real::<S>(1e-2) {
        dt = real(1e-2);
    }
    for (t, _) in measure.atoms() {
        if *t > S::zero() && *t < dt {
            dt = *t;
        }
    }
    dt
}

/// Solves for C̃, C = C̃ − C₀ and f on the grid kΔ, k = 0..=⌈T/Δ⌉.
pub fn solve_kernel<S: Scalar>(
    measure: &SignedMatrixMeasure<S>,
    structure: &CointegrationStructure<S>,
    step: S,
    horizon: S,
) -> Result<KernelGrid<S>> {
    if step <= S::zero() || horizon <= S::zero() {
        return Err(Error::Grid("step and horizon must be positive".into()));
    }
    let n = measure.dim();
    let n_steps = to_f64((horizon / step).ceil()) as usize;
    let horizon = real::<S>(n_steps as f64) * step;
    let c0 = structure.c0.clone();
    let c_at_zero = Mat::identity(n, n) - &c0;
    let guard_c = real::<S>(1e3) * (max_abs(&c_at_zero) + real::<S>(1e-6));
    let guard = guard_c + max_abs(&c0);

    let c_tilde = integrate_delay(
        measure,
        Mat::identity(n, n),
        None,
        &[],
        step,
        n_steps,
        guard,
    )?;
    let c: Vec<Mat<S>> = c_tilde.iter().map(|m| m - &c0).collect();
    for (k, ck) in c.iter().enumerate() {
        if max_abs(ck) > guard_c {
            return Err(Error::Instability(format!(
                "||C|| grew beyond 1e3 ||C(0)|| at t = {:.4}",
                k as f64 * to_f64(step)
            )));
        }
    }

    let mut f0 = Mat::zeros(n, n);
    let mut jumps: Vec<(S, Mat<S>)> = Vec::new();
    for (t, a) in measure.atoms() {
        if *t == S::zero() {
            f0 -= a;
        } else {
            jumps.push((*t, -a));
        }
    }
    let density_forcing = |t: S| -> Mat<S> { -measure.density_at(t) };
    let has_density = !matches!(measure.density(), Density::None);
    let forcing: Option<&dyn Fn(S) -> Mat<S>> = if has_density {
        Some(&density_forcing)
    } else {
        None
    };
    let f_guard = real::<S>(1e3) * (max_abs(&f0) + measure.quadrature_error_bound() + real::<S>(1.0));
    let f = integrate_delay(measure, f0, forcing, &jumps, step, n_steps, f_guard)?;

    let eps = measure.decay_rate() * real::<S>(0.5);
    let mut kf = S::zero();
    for (k, fk) in f.iter().enumerate() {
        let t = real::<S>(k as f64) * step;
        let v = (eps * t).exp() * max_abs(fk);
        if v > kf {
            kf = v;
        }
    }
    let truncation_error_bound = kf * real::<S>(1.5) * (-eps * horizon).exp();

    Ok(KernelGrid {
        step,
        horizon,
        c_tilde,
        c,
        f,
        c0,
        truncation_error_bound,
    })
}

/// Deviations of the grid kernels from the Laplace-transform identities
/// L[f](z) = I − z h(z)⁻¹ and L[C](z) = h(z)⁻¹ − C₀/z.
#[derive(Debug, Clone)]
pub struct LaplaceReport<S: Scalar> {
    pub max_dev_f: S,
    pub max_dev_c: S,
    pub pass: bool,
}

pub fn laplace_check<S: Scalar>(
    grid: &KernelGrid<S>,
    cf: &CharacteristicFunction<S>,
    z_samples: &[Complex<S>],
    tol: S,
) -> Result<LaplaceReport<S>> {
    let n = grid.c0.nrows();
    let eps = cf.measure().decay_rate() * real::<S>(0.5);
    let mut max_dev_f = S::zero();
    let mut max_dev_c = S::zero();
    for &z in z_samples {
        if z.re < real::<S>(0.1) {
            return Err(Error::Domain(
                "laplace_check samples must have Re(z) >= 0.1".into(),
            ));
        }
        let lf = grid_laplace(&grid.f, grid.step, z, eps);
        let lc = grid_laplace(&grid.c, grid.step, z, eps);
        let hinv = crate::linalg::solve_c(
            &cf.char_fn(z)?,
            &crate::linalg::CMat::identity(n, n),
        )?;
        let rhs_f = crate::linalg::CMat::identity(n, n) - &hinv * z;
        let rhs_c = &hinv - crate::linalg::to_complex(&grid.c0) * (Complex::new(S::one(), S::zero()) / z);
        let df = crate::linalg::max_abs_c(&(lf - rhs_f));
        let dc = crate::linalg::max_abs_c(&(lc - rhs_c));
        if df > max_dev_f {
            max_dev_f = df;
        }
        if dc > max_dev_c {
            max_dev_c = dc;
        }
    }
    Ok(LaplaceReport {
        max_dev_f,
        max_dev_c,
        pass: max_dev_f <= tol && max_dev_c <= tol,
    })
}

/// Trapezoid Laplace transform of grid samples plus an exponential tail
/// estimate assuming ‖y(t)‖ ≈ ‖y(T)‖e^{−ε(t−T)} beyond the horizon.
fn grid_laplace<S: Scalar>(
    values: &[Mat<S>],
    step: S,
    z: Complex<S>,
    eps: S,
) -> crate::linalg::CMat<S> {
    let m = values.len();
    let mut acc = crate::linalg::CMat::<S>::zeros(values[0].nrows(), values[0].ncols());
    for (k, v) in values.iter().enumerate() {
        let t = real::<S>(k as f64) * step;
        let w = (-z * Complex::new(t, S::zero())).exp();
        let tr = if k == 0 || k == m - 1 {
            real::<S>(0.5)
        } else {
            S::one()
        };
        acc += crate::linalg::to_complex(v) * (w * Complex::new(tr, S::zero()));
    }
    acc *= Complex::new(step, S::zero());
    let horizon = real::<S>((m - 1) as f64) * step;
    let tail_weight =
        (-z * Complex::new(horizon, S::zero())).exp() / (z + Complex::new(eps, S::zero()));
    acc + crate::linalg::to_complex(values.last().unwrap()) * tail_weight
}

/// Horizon T such that the certified bound K_f·e^{−εT} ≤ target, with
/// ε = δ/2 and K_f estimated from a pilot solve on [0, 20/δ].
pub fn truncation_horizon<S: Scalar>(
    measure: &SignedMatrixMeasure<S>,
    target: S,
) -> Result<S> {
    if target <= S::zero() {
        return Err(Error::Domain("target must be positive".into()));
    }
    let delta = measure.decay_rate();
    let eps = delta * real::<S>(0.5);
    let step = default_step(measure);
    let pilot_t = real::<S>(20.0) / delta;
    let n_steps = to_f64((pilot_t / step).ceil()) as usize;
    let n = measure.dim();
    let mut f0 = Mat::zeros(n, n);
    let mut jumps: Vec<(S, Mat<S>)> = Vec::new();
    for (t, a) in measure.atoms() {
        if *t == S::zero() {
            f0 -= a;
        } else {
            jumps.push((*t, -a));
        }
    }
    let density_forcing = |t: S| -> Mat<S> { -measure.density_at(t) };
    let has_density = !matches!(measure.density(), Density::None);
    let forcing: Option<&dyn Fn(S) -> Mat<S>> = if has_density {
        Some(&density_forcing)
    } else {
        None
    };
    let guard = real::<S>(1e6);
    let f = integrate_delay(measure, f0, forcing, &jumps, step, n_steps, guard)?;
    let mut kf = S::zero();
    for (k, fk) in f.iter().enumerate() {
        let t = real::<S>(k as f64) * step;
        let v = (eps * t).exp() * max_abs(fk);
        if v > kf {
            kf = v;
        }
    }
    kf *= real::<S>(1.5);
    if kf <= target {
        return Ok(S::zero());
    }
    Ok((kf / target).ln() / eps)
}

/// The stationary kernel g with L[g] = h⁻¹: solves g′ = (g∗η), g(0) = I
/// (identical dynamics to C̃; in the stationary case g = C̃) and verifies
/// f + g∗η = 0 on the grid.
pub fn stationary_kernel_g<S: Scalar>(
    measure: &SignedMatrixMeasure<S>,
    verdict: Verdict,
    step: S,
    horizon: S,
) -> Result<SampledKernel<S>> {
    if verdict != Verdict::Stationary {
        return Err(Error::Precondition(
            "stationary kernel g requires a Stationary verdict".into(),
        ));
    }
    let n = measure.dim();
    let n_steps = to_f64((horizon / step).ceil()) as usize;
    let guard = real::<S>(1e6);
    let g = integrate_delay(
        measure,
        Mat::identity(n, n),
        None,
        &[],
        step,
        n_steps,
        guard,
    )?;

    let mut f0 = Mat::zeros(n, n);
    let mut jumps: Vec<(S, Mat<S>)> = Vec::new();
    for (t, a) in measure.atoms() {
        if *t == S::zero() {
            f0 -= a;
        } else {
            jumps.push((*t, -a));
        }
    }
    let density_forcing = |t: S| -> Mat<S> { -measure.density_at(t) };
    let has_density = !matches!(measure.density(), Density::None);
    let forcing: Option<&dyn Fn(S) -> Mat<S>> = if has_density {
        Some(&density_forcing)
    } else {
        None
    };
    let f = integrate_delay(measure, f0, forcing, &jumps, step, n_steps, guard)?;

    let kern = SampledKernel {
        step,
        values: g,
    };
    let scale = (S::one() + measure.quadrature_error_bound()) * real::<S>(10.0) * step * step
        + real::<S>(10.0) * step * step;
    let mut max_res = S::zero();
    let mut arg_t = S::zero();
    for k in 0..=n_steps {
        let t = real::<S>(k as f64) * step;
        let conv = measure.convolve(&kern, t)?;
        let res = max_abs(&(&f[k] + conv));
        if res > max_res {
            max_res = res;
            arg_t = t;
        }
    }
    if max_res > scale {
        return Err(Error::Verification(format!(
            "f + g*eta residual {:.3e} at t = {:.4} exceeds tolerance {:.3e}",
            to_f64(max_res),
            to_f64(arg_t),
            to_f64(scale)
        )));
    }
    Ok(kern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::SignedMatrixMeasure;
    use crate::spectral::{check_conditions, cointegration_structure, ScanSettings};
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;

    fn ou_measure(a: Mat<f64>) -> SignedMatrixMeasure<f64> {
        SignedMatrixMeasure::from_atoms(a.nrows(), vec![(0.0, a)], 1.0).unwrap()
    }

    fn solve(m: &SignedMatrixMeasure<f64>, step: f64, horizon: f64) -> KernelGrid<f64> {
        let cf = CharacteristicFunction::new(m.clone());
        let s = cointegration_structure(&cf, None).unwrap();
        solve_kernel(m, &s, step, horizon).unwrap()
    }

    #[test]
    fn stationary_ou_matches_matrix_exponential() {
        let m = ou_measure(Mat::identity(2, 2) * -1.0);
        let grid = solve(&m, 1e-3, 10.0);
        let mut max_err: f64 = 0.0;
        for (k, ct) in grid.c_tilde.iter().enumerate() {
            let t = k as f64 * grid.step;
            let exact = Mat::identity(2, 2) * (-t).exp();
            max_err = max_err.max(max_abs(&(ct - &exact)));
            max_err = max_err.max(max_abs(&(&grid.f[k] - &exact)));
        }
        assert!(max_err < 1e-8, "max error {max_err:.3e}");
        assert_eq!(max_abs(&grid.c0), 0.0);
    }

    #[test]
    fn cointegrated_ou_matches_closed_form() {
        let m = ou_measure(dmatrix![-1.0, 1.0; 0.0, 0.0]);
        let grid = solve(&m, 1e-3, 10.0);
        let mut max_err: f64 = 0.0;
        for (k, ck) in grid.c.iter().enumerate() {
            let t = k as f64 * grid.step;
            let exact = dmatrix![(-t).exp(), -(-t).exp(); 0.0, 0.0];
            max_err = max_err.max(max_abs(&(ck - &exact)));
        }
        assert!(max_err < 1e-6, "max error {max_err:.3e}");
        assert!(max_abs(&(grid.c0.clone() - dmatrix![0.0, 1.0; 0.0, 1.0])) < 1e-12);
    }

    #[test]
    fn zero_measure_kernels_are_constant() {
        let m = SignedMatrixMeasure::<f64>::zero(1);
        let grid = solve(&m, 1e-2, 2.0);
        for k in 0..grid.len() {
            assert_relative_eq!(grid.c_tilde[k][(0, 0)], 1.0, epsilon = 1e-14);
            assert_eq!(grid.f[k][(0, 0)], 0.0);
            // C0 = 1 for the driftless model, so C = Ctilde - 1 = 0
            assert!(grid.c[k][(0, 0)].abs() < 1e-14);
        }
    }

    #[test]
    fn halving_step_improves_error_by_rk4_order() {
        let m = ou_measure(Mat::identity(2, 2) * -1.0);
        let err = |step: f64| {
            let grid = solve(&m, step, 5.0);
            let mut e: f64 = 0.0;
            for (k, ct) in grid.c_tilde.iter().enumerate() {
                let t = k as f64 * grid.step;
                e = e.max(max_abs(&(ct - Mat::identity(2, 2) * (-t).exp())));
            }
            e
        };
        let e1 = err(2e-3);
        let e2 = err(1e-3);
        let ratio = e1 / e2;
        assert!((8.0..=32.0).contains(&ratio), "ratio {ratio:.2}");
    }

    #[test]
    fn delay_model_kernel_by_method_of_steps() {
        // eta = -delta_1: Ctilde' = -Ctilde(t-1), Ctilde = 1 on [0,1],
        // 2 - t on [1,2]; f = 0 on [0,1), f = 1 on [1,2).
        let m =
            SignedMatrixMeasure::from_atoms(1, vec![(1.0, dmatrix![-1.0])], 1.0).unwrap();
        let grid = solve(&m, 1e-3, 3.0);
        let at = |t: f64| (t / grid.step).round() as usize;
        assert_relative_eq!(grid.c_tilde[at(0.5)][(0, 0)], 1.0, epsilon = 1e-10);
        assert_relative_eq!(grid.c_tilde[at(1.5)][(0, 0)], 0.5, epsilon = 1e-8);
        assert_relative_eq!(grid.c_tilde[at(2.0)][(0, 0)], 0.0, epsilon = 1e-8);
        assert!(grid.f[at(0.5)][(0, 0)].abs() < 1e-10);
        assert_relative_eq!(grid.f[at(1.5)][(0, 0)], 1.0, epsilon = 1e-8);
    }

    #[test]
    fn f_satisfies_its_integral_equation() {
        let m = ou_measure(dmatrix![-1.0, 1.0; 0.0, 0.0]);
        let grid = solve(&m, 1e-3, 5.0);
        // f(t) = int_0^t (f*eta)(u) du - eta([0,t]) via cumulative trapezoid
        let kern = SampledKernel {
            step: grid.step,
            values: grid.f.clone(),
        };
        let mut cum = Mat::<f64>::zeros(2, 2);
        let mut prev = m.convolve(&kern, 0.0).unwrap();
        let mut max_res: f64 = 0.0;
        for k in 1..grid.len() {
            let t = k as f64 * grid.step;
            let cur = m.convolve(&kern, t).unwrap();
            cum += (&prev + &cur) * (0.5 * grid.step);
            prev = cur;
            let res = max_abs(&(&cum - m.cdf(t) - &grid.f[k]));
            max_res = max_res.max(res);
        }
        assert!(max_res < 1e-5, "residual {max_res:.3e}");
    }

    #[test]
    fn c0_equals_identity_minus_integral_of_f() {
        for a in [dmatrix![-1.0, 1.0; 0.0, 0.0], Mat::identity(2, 2) * -1.0] {
            let m = ou_measure(a);
            let horizon = truncation_horizon(&m, 1e-8).unwrap().max(10.0);
            let grid = solve(&m, 1e-3, horizon);
            let mut int_f = Mat::<f64>::zeros(2, 2);
            for (k, fk) in grid.f.iter().enumerate() {
                let w = if k == 0 || k == grid.len() - 1 { 0.5 } else { 1.0 };
                int_f += fk * (w * grid.step);
            }
            let dev = max_abs(&(Mat::identity(2, 2) - int_f - &grid.c0));
            assert!(dev < 1e-6, "deviation {dev:.3e}");
        }
    }

    #[test]
    fn laplace_identities_hold_on_ou_fixtures() {
        for a in [dmatrix![-1.0, 1.0; 0.0, 0.0], Mat::identity(2, 2) * -1.0] {
            let m = ou_measure(a);
            let horizon = truncation_horizon(&m, 1e-8).unwrap().max(10.0);
            let grid = solve(&m, 1e-3, horizon);
            let cf = CharacteristicFunction::new(m);
            let zs = [
                Complex::new(0.5, 0.0),
                Complex::new(1.0, 0.0),
                Complex::new(2.0, 0.0),
                Complex::new(1.0, 3.0),
            ];
            let rep = laplace_check(&grid, &cf, &zs, 1e-5).unwrap();
            assert!(
                rep.pass,
                "dev_f {:.3e} dev_c {:.3e}",
                rep.max_dev_f, rep.max_dev_c
            );
        }
    }

    #[test]
    fn truncation_horizon_for_unit_decay() {
        let m = ou_measure(Mat::identity(2, 2) * -1.0);
        let t = truncation_horizon(&m, 1e-8).unwrap();
        // ||f|| = e^{-t}, eps = 0.5, K_f ~ 1.5 => T ~ 2 ln(1.5e8) in [35, 45]
        assert!((35.0..=45.0).contains(&t), "T = {t:.2}");
    }

    #[test]
    fn truncation_horizon_of_zero_measure_is_zero() {
        let m = SignedMatrixMeasure::<f64>::zero(1);
        assert_eq!(truncation_horizon(&m, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn stationary_g_matches_c_tilde_and_filter_identity() {
        let m = ou_measure(Mat::identity(2, 2) * -1.0);
        let cf = CharacteristicFunction::new(m.clone());
        let rep = check_conditions(&cf, ScanSettings::default_for(&m)).unwrap();
        let g = stationary_kernel_g(&m, rep.verdict, 1e-3, 10.0).unwrap();
        let t = 1.7;
        assert!(max_abs(&(g.eval(t) - Mat::identity(2, 2) * (-t as f64).exp())) < 1e-8);
    }

    #[test]
    fn stationary_g_for_delay_model() {
        let m =
            SignedMatrixMeasure::from_atoms(1, vec![(1.0, dmatrix![-1.0])], 1.0).unwrap();
        let g = stationary_kernel_g(&m, Verdict::Stationary, 1e-3, 4.0).unwrap();
        // g vanishes on negatives, so g' = 0 on [0,1): g = 1 there, then
        // g(t) = 2 - t on [1,2]
        assert_relative_eq!(g.eval(0.5)[(0, 0)], 1.0, epsilon = 1e-10);
        assert_relative_eq!(g.eval(1.0)[(0, 0)], 1.0, epsilon = 1e-8);
        assert_relative_eq!(g.eval(1.75)[(0, 0)], 0.25, epsilon = 1e-7);
    }

    #[test]
    fn g_requires_stationary_verdict() {
        let m = ou_measure(dmatrix![-1.0, 1.0; 0.0, 0.0]);
        assert!(matches!(
            stationary_kernel_g(&m, Verdict::Cointegrated, 1e-3, 5.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn unstable_model_triggers_instability_error() {
        let m = ou_measure(dmatrix![1.0]);
        let cf = CharacteristicFunction::new(m.clone());
        let s = cointegration_structure(&cf, None).unwrap();
        assert!(matches!(
            solve_kernel(&m, &s, 1e-2, 50.0),
            Err(Error::Instability(_))
        ));
    }

    #[test]
    fn error_correction_form_of_c_tilde() {
        // Ctilde(t) - Ctilde(s) = int_s^t Ctilde Pi0 + int [Ctilde(t-u) -
        // Ctilde(s-u)] pi(u) du, with Ctilde extended by zero on negative times.
        let m =
            SignedMatrixMeasure::from_atoms(1, vec![(1.0, dmatrix![-1.0])], 1.0).unwrap();
        let step = 1e-3;
        let grid = solve(&m, step, 4.0);
        let pi0 = m.total_mass();
        let pi = crate::measure::PiFunction::new(&m);
        let ct = |k: usize| grid.c_tilde[k].clone();
        let pairs = [(200usize, 900usize), (500, 1700), (1200, 3100), (0, 2500)];
        for (ks, kt) in pairs {
            let lhs = ct(kt) - ct(ks);
            // level term
            let mut level = Mat::<f64>::zeros(1, 1);
            for k in ks..=kt {
                let w = if k == ks || k == kt { 0.5 } else { 1.0 };
                level += ct(k) * &pi0 * (w * step);
            }
            // increment term: pi is supported on [0,1]; the integrand has a
            // jump at v = s (zero extension of Ctilde(s-v)), so integrate
            // piecewise on [0, min(s,1)] and [min(s,1), min(t,1)] with
            // side-appropriate limits, and use pi's left limit at v = 1.
            let m_pi = (1.0 / step).round() as usize;
            let pi_left = |j: usize| pi.at((j as f64 * step).min(1.0 - 1e-12));
            let mut incr = Mat::<f64>::zeros(1, 1);
            let trapz = |ja: usize, jb: usize, g: &dyn Fn(usize) -> Mat<f64>| {
                let mut acc = Mat::<f64>::zeros(1, 1);
                for j in ja..=jb {
                    let w = if j == ja || j == jb { 0.5 } else { 1.0 };
                    acc += g(j) * (w * step);
                }
                acc
            };
            let j_s = ks.min(m_pi);
            let j_t = kt.min(m_pi);
            if j_s > 0 {
                incr += trapz(0, j_s, &|j| (ct(kt - j) - ct(ks - j)) * pi_left(j));
            }
            if j_t > j_s {
                incr += trapz(j_s, j_t, &|j| ct(kt - j) * pi_left(j));
            }
            let res = max_abs(&(lhs - level - incr));
            assert!(res < 10.0 * step * step + 1e-9, "residual {res:.3e}");
        }
    }
}

//! Signed n×n matrix measures on `[0, ∞)` with exponential moments.
//!
//! A measure is a finite list of Dirac atoms plus an optional density part,
//! either in matrix-exponential form `H exp(F t) G` or sampled on a uniform
//! grid with an exponential tail certificate. This family is closed under
//! the constructions used elsewhere in the crate (Ornstein-Uhlenbeck atoms,
//! MCARMA densities) and admits exact transforms.

use nalgebra::ComplexField;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    max_abs, solve_c, solve_r, to_complex, van_loan_exp_integral, CMat, Mat,
};
use crate::scalar::{real, Scalar};

#[derive(Debug, Clone)]
pub enum Density<S: Scalar> {
    None,
    /// `η₁(t) = H · exp(F t) · G` for `t ≥ 0`, with Hurwitz `F`.
    MatrixExponential { h: Mat<S>, f: Mat<S>, g: Mat<S> },
    /// Uniform samples with a certified bound `‖η₁(t)‖ ≤ K e^{−λ t}` past the grid.
    Sampled {
        step: S,
        values: Vec<Mat<S>>,
        tail_k: S,
        tail_lambda: S,
    },
}

#[derive(Debug, Clone)]
pub struct SignedMatrixMeasure<S: Scalar> {
    dim: usize,
    atoms: Vec<(S, Mat<S>)>,
    density: Density<S>,
    decay_rate: S,
    total: Mat<S>,
}

impl<S: Scalar> SignedMatrixMeasure<S> {
    /// Builds a measure, validating the decay certificate. When `decay_rate`
    /// is omitted it is derived from the density (half the certified rate);
    /// atom-only measures then default to δ = 1 (atoms impose no constraint).
    pub fn new(
        dim: usize,
        atoms: Vec<(S, Mat<S>)>,
        density: Density<S>,
        decay_rate: Option<S>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dim must be positive".into()));
        }
        for (t, a) in &atoms {
            if *t < S::zero() {
                return Err(Error::InvalidMeasure("atom location < 0".into()));
            }
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::InvalidMeasure("atom weight has wrong shape".into()));
            }
        }
        let delta = match &density {
            Density::None => decay_rate.unwrap_or_else(S::one),
            Density::MatrixExponential { h, f, g } => {
                if h.nrows() != dim || g.ncols() != dim || h.ncols() != f.nrows() || f.ncols() != g.nrows() || !f.is_square() {
                    return Err(Error::InvalidMeasure("matexp density shapes inconsistent".into()));
                }
                let max_re = crate::linalg::max_re_eig(f);
                if max_re >= S::zero() {
                    return Err(Error::InvalidMeasure("matexp density F is not Hurwitz".into()));
                }
                let delta = decay_rate.unwrap_or(-max_re / real(2.0));
                if max_re >= -delta {
                    return Err(Error::InvalidMeasure(
                        "matexp density requires max Re eig(F) < -decay_rate".into(),
                    ));
                }
                delta
            }
            Density::Sampled {
                step,
                values,
                tail_k,
                tail_lambda,
            } => {
                if *step <= S::zero() || values.is_empty() {
                    return Err(Error::InvalidMeasure("sampled density needs a positive step and samples".into()));
                }
                if values.iter().any(|v| v.nrows() != dim || v.ncols() != dim) {
                    return Err(Error::InvalidMeasure("sampled density value has wrong shape".into()));
                }
                if *tail_k < S::zero() || *tail_lambda <= S::zero() {
                    return Err(Error::InvalidMeasure("tail bound requires K ≥ 0, λ > 0".into()));
                }
                let delta = decay_rate.unwrap_or(*tail_lambda / real(2.0));
                if *tail_lambda <= delta {
                    return Err(Error::InvalidMeasure("sampled density requires tail λ > decay_rate".into()));
                }
                delta
            }
        };
        if delta <= S::zero() {
            return Err(Error::InvalidMeasure("decay_rate must be positive".into()));
        }
        let mut m = Self {
            dim,
            atoms,
            density,
            decay_rate: delta,
            total: Mat::zeros(dim, dim),
        };
        m.total = m.compute_total();
        Ok(m)
    }

    /// Atom-only convenience constructor.
    pub fn from_atoms(dim: usize, atoms: Vec<(S, Mat<S>)>, decay_rate: S) -> Result<Self> {
        Self::new(dim, atoms, Density::None, Some(decay_rate))
    }

    /// The zero measure.
    pub fn zero(dim: usize) -> Self {
        Self::new(dim, Vec::new(), Density::None, Some(S::one())).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn decay_rate(&self) -> S {
        self.decay_rate
    }

    pub fn atoms(&self) -> &[(S, Mat<S>)] {
        &self.atoms
    }

    pub fn density(&self) -> &Density<S> {
        &self.density
    }

    fn compute_total(&self) -> Mat<S> {
        let mut total = Mat::zeros(self.dim, self.dim);
        for (_, a) in &self.atoms {
            total += a;
        }
        match &self.density {
            Density::None => {}
            Density::MatrixExponential { h, f, g } => {
                // ∫_0^∞ H e^{Ft} G dt = -H F^{-1} G (F Hurwitz).
                let fg = solve_r(f, g).expect("Hurwitz F is invertible");
                total += -(h * fg);
            }
            Density::Sampled {
                step,
                values,
                ..
            } => {
                total += trapezoid(values, *step);
            }
        }
        total
    }

    /// `Π₀ = η([0, ∞))`.
    pub fn total_mass(&self) -> Mat<S> {
        self.total.clone()
    }

    /// Absolute error bound on quadrature-based quantities (zero for the
    /// atom-only and matrix-exponential representations, which are exact).
    pub fn quadrature_error_bound(&self) -> S {
        match &self.density {
            Density::Sampled {
                step,
                values,
                tail_k,
                tail_lambda,
            } => {
                let t_end = *step * real::<S>((values.len() - 1) as f64);
                let tail = *tail_k * (-*tail_lambda * t_end).exp() / *tail_lambda;
                // crude second-difference estimate of the trapezoid term
                let mut d2 = S::zero();
                for w in values.windows(3) {
                    let m = max_abs(&(&w[2] - &w[1] * real::<S>(2.0) + &w[0]));
                    if m > d2 {
                        d2 = m;
                    }
                }
                tail + d2 * *step * real::<S>(values.len() as f64) / real::<S>(12.0)
            }
            _ => S::zero(),
        }
    }

    /// `η([0, t])`; the zero matrix for `t < 0`.
    pub fn cdf(&self, t: S) -> Mat<S> {
        let mut out = Mat::zeros(self.dim, self.dim);
        if t < S::zero() {
            return out;
        }
        for (loc, a) in &self.atoms {
            if *loc <= t {
                out += a;
            }
        }
        match &self.density {
            Density::None => {}
            Density::MatrixExponential { h, f, g } => {
                let (_, int) = van_loan_exp_integral(f, g, t);
                out += h * int;
            }
            Density::Sampled { step, values, .. } => {
                out += trapezoid_to(values, *step, t);
            }
        }
        out
    }

    /// Density value `η₁(t)` (zero when no density or `t` outside support).
    pub fn density_at(&self, t: S) -> Mat<S> {
        if t < S::zero() {
            return Mat::zeros(self.dim, self.dim);
        }
        match &self.density {
            Density::None => Mat::zeros(self.dim, self.dim),
            Density::MatrixExponential { h, f, g } => h * crate::linalg::expm(f, t) * g,
            Density::Sampled { step, values, .. } => {
                let x = t / *step;
                let i = x.floor();
                let idx = crate::scalar::to_f64(i) as usize;
                if idx + 1 >= values.len() {
                    return Mat::zeros(self.dim, self.dim);
                }
                let w = x - i;
                &values[idx] * (S::one() - w) + &values[idx + 1] * w
            }
        }
    }

    /// Laplace transform `L[η](z)` on `Re(z) > −decay_rate`.
    pub fn laplace(&self, z: Complex<S>) -> Result<CMat<S>> {
        if z.re <= -self.decay_rate {
            return Err(Error::Domain(
                "laplace transform evaluated outside Re(z) > -decay_rate".into(),
            ));
        }
        let mut out = CMat::zeros(self.dim, self.dim);
        for (loc, a) in &self.atoms {
            let w = (-z * Complex::new(*loc, S::zero())).exp();
            out += to_complex(a) * w;
        }
        match &self.density {
            Density::None => {}
            Density::MatrixExponential { h, f, g } => {
                // H (zI - F)^{-1} G
                let m = f.nrows();
                let zi = CMat::identity(m, m) * z - to_complex(f);
                let x = solve_c(&zi, &to_complex(g))?;
                out += to_complex(h) * x;
            }
            Density::Sampled { step, values, .. } => {
                let weighted: Vec<CMat<S>> = values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let t = *step * real::<S>(k as f64);
                        to_complex(v) * (-z * Complex::new(t, S::zero())).exp()
                    })
                    .collect();
                out += trapezoid_c(&weighted, *step);
            }
        }
        Ok(out)
    }

    /// `Π([0,∞)) = ∫_0^∞ π(u) du = −∫ t η(dt)`.
    pub fn pi_total(&self) -> Mat<S> {
        let mut out = Mat::zeros(self.dim, self.dim);
        for (loc, a) in &self.atoms {
            out += a * (-*loc);
        }
        match &self.density {
            Density::None => {}
            Density::MatrixExponential { h, f, g } => {
                // -∫ t H e^{Ft} G dt = -H F^{-2} G
                let fg = solve_r(f, g).expect("Hurwitz F is invertible");
                let ffg = solve_r(f, &fg).expect("Hurwitz F is invertible");
                out += -(h * ffg);
            }
            Density::Sampled { step, values, .. } => {
                let weighted: Vec<Mat<S>> = values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * (-*step * real::<S>(k as f64)))
                    .collect();
                out += trapezoid(&weighted, *step);
            }
        }
        out
    }

    /// Convolution `(kernel ∗ η)(t) = ∫ kernel(t−u) η(du)` at a kernel grid
    /// time, with trapezoid quadrature for the density part.
    pub fn convolve(&self, kernel: &SampledKernel<S>, t: S) -> Result<Mat<S>> {
        let steps = t / kernel.step;
        if (steps - steps.round()).abs() > real(1e-9) {
            return Err(Error::Grid("requested time is not on the kernel grid".into()));
        }
        let mut out = Mat::zeros(self.dim, self.dim);
        for (loc, a) in &self.atoms {
            out += kernel.eval(t - *loc) * a;
        }
        match &self.density {
            Density::None => {}
            _ => {
                // ∫_0^t kernel(t-u) η₁(u) du on the kernel grid
                let n = crate::scalar::to_f64(steps.round()) as usize;
                let terms: Vec<Mat<S>> = (0..=n)
                    .map(|k| {
                        let u = kernel.step * real::<S>(k as f64);
                        kernel.eval(t - u) * self.density_at(u)
                    })
                    .collect();
                if terms.len() > 1 {
                    out += trapezoid(&terms, kernel.step);
                }
            }
        }
        Ok(out)
    }
}

/// `π(t) = η([0,t]) − η([0,∞))`, with a decay certificate computed on
/// construction: `‖π(t)‖ ≤ K_π e^{−εt}` with `ε = decay_rate / 2`.
#[derive(Debug, Clone)]
pub struct PiFunction<'a, S: Scalar> {
    measure: &'a SignedMatrixMeasure<S>,
    total: Mat<S>,
    k_pi: S,
    epsilon: S,
}

impl<'a, S: Scalar> PiFunction<'a, S> {
    pub fn new(measure: &'a SignedMatrixMeasure<S>) -> Self {
        let total = measure.total_mass();
        let epsilon = measure.decay_rate() / real(2.0);
        // scan for the decay constant on [0, 60/δ]
        let t_max = real::<S>(60.0) / measure.decay_rate();
        let n = 600usize;
        let mut k_pi = S::zero();
        for k in 0..=n {
            let t = t_max * real::<S>(k as f64 / n as f64);
            let v = max_abs(&(measure.cdf(t) - &total)) * (epsilon * t).exp();
            if v > k_pi {
                k_pi = v;
            }
        }
        k_pi *= real::<S>(1.05);
        Self {
            measure,
            total,
            k_pi,
            epsilon,
        }
    }

    pub fn at(&self, t: S) -> Mat<S> {
        if t < S::zero() {
            return Mat::zeros(self.measure.dim(), self.measure.dim());
        }
        self.measure.cdf(t) - &self.total
    }

    /// `(K_π, ε)` such that `‖π(t)‖ ≤ K_π e^{−εt}` on the certification grid.
    pub fn decay_certificate(&self) -> (S, S) {
        (self.k_pi, self.epsilon)
    }
}

/// A matrix function sampled uniformly on `[0, T]`, vanishing outside,
/// with linear interpolation between samples.
#[derive(Debug, Clone)]
pub struct SampledKernel<S: Scalar> {
    pub step: S,
    pub values: Vec<Mat<S>>,
}

impl<S: Scalar> SampledKernel<S> {
    pub fn eval(&self, t: S) -> Mat<S> {
        let n = self.values[0].nrows();
        let m = self.values[0].ncols();
        if t < S::zero() {
            return Mat::zeros(n, m);
        }
        let x = t / self.step;
        let i = x.floor();
        let idx = crate::scalar::to_f64(i) as usize;
        if idx >= self.values.len() {
            return Mat::zeros(n, m);
        }
        if idx + 1 == self.values.len() {
            return self.values[idx].clone();
        }
        let w = x - i;
        &self.values[idx] * (S::one() - w) + &self.values[idx + 1] * w
    }
}

fn trapezoid<S: Scalar>(values: &[Mat<S>], step: S) -> Mat<S> {
    let (n, m) = (values[0].nrows(), values[0].ncols());
    if values.len() < 2 {
        return Mat::zeros(n, m);
    }
    let mut acc = (&values[0] + values.last().unwrap()) * real::<S>(0.5);
    for v in &values[1..values.len() - 1] {
        acc += v;
    }
    acc * step
}

fn trapezoid_c<S: Scalar>(values: &[CMat<S>], step: S) -> CMat<S> {
    let (n, m) = (values[0].nrows(), values[0].ncols());
    if values.len() < 2 {
        return CMat::zeros(n, m);
    }
    let mut acc = (&values[0] + values.last().unwrap()) * Complex::new(real::<S>(0.5), S::zero());
    for v in &values[1..values.len() - 1] {
        acc += v;
    }
    acc * Complex::new(step, S::zero())
}

/// Trapezoid integral of uniformly sampled values over `[0, t]`, linearly
/// interpolating the partial last cell.
fn trapezoid_to<S: Scalar>(values: &[Mat<S>], step: S, t: S) -> Mat<S> {
    let (n, m) = (values[0].nrows(), values[0].ncols());
    let mut acc = Mat::zeros(n, m);
    if values.len() < 2 {
        return acc;
    }
    let t_end = step * real::<S>((values.len() - 1) as f64);
    let t_eff = if t < t_end { t } else { t_end };
    let cells = t_eff / step;
    let full = cells.floor();
    let nf = crate::scalar::to_f64(full) as usize;
    for k in 0..nf {
        acc += (&values[k] + &values[k + 1]) * (step / real::<S>(2.0));
    }
    let frac = cells - full;
    if frac > S::zero() && nf + 1 < values.len() {
        let v_end = &values[nf] * (S::one() - frac) + &values[nf + 1] * frac;
        acc += (&values[nf] + v_end) * (frac * step / real::<S>(2.0));
    }
    acc
}

//! Bridge between MCARMA(p, p−1) specifications and MSDDE delay measures.
//!
//! An MCARMA spec carries the autoregressive polynomial
//! P(z) = Iz^p + P₁z^{p−1} + … + P_p and the moving-average polynomial
//! Q(z) = Iz^{p−1} + Q₁z^{p−2} + … + Q_{p−1}. Whenever det Q has all zeros in
//! the open left half-plane, the MCARMA process solves an MSDDE whose measure
//! is η = η₀δ₀ + η₁(t)dt with η₀ = Q₁ − P₁ and F[η₁](y) = iyI − η₀ −
//! Q(iy)⁻¹P(iy). The density η₁ is realized exactly in matrix-exponential
//! form through a left matrix-fraction realization of Q(z)⁻¹R(z) with
//! R(z) = Q(z)(Iz − η₀) − P(z); the Fourier identity above is re-verified
//! numerically at construction time.

use nalgebra::ComplexField;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    block_companion, condition_number, inverse_r, left_mfd_realization, max_abs, max_abs_c,
    max_re_eig, poly_eval_c, poly_mul, rank_factors, solve_c, CMat, Mat,
};
use crate::measure::{Density, SignedMatrixMeasure};
use crate::scalar::{cplx, real, to_f64, Scalar};
use crate::spectral::CharacteristicFunction;

/// MCARMA(p, p−1) specification.
#[derive(Debug, Clone)]
pub struct McarmaSpec<S: Scalar> {
    pub dim: usize,
    pub p: usize,
    /// P₁..P_p.
    pub p_coeffs: Vec<Mat<S>>,
    /// Q₁..Q_{p−1}; empty when p = 1.
    pub q_coeffs: Vec<Mat<S>>,
}

impl<S: Scalar> McarmaSpec<S> {
    pub fn new(dim: usize, p_coeffs: Vec<Mat<S>>, q_coeffs: Vec<Mat<S>>) -> Result<Self> {
        let p = p_coeffs.len();
        if p == 0 {
            return Err(Error::Config("order p must be at least 1".into()));
        }
        if q_coeffs.len() + 1 != p {
            return Err(Error::Config(format!(
                "expected {} Q coefficients for order p = {}, got {}",
                p - 1,
                p,
                q_coeffs.len()
            )));
        }
        for m in p_coeffs.iter().chain(&q_coeffs) {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Config("coefficient dimension mismatch".into()));
            }
        }
        Ok(Self {
            dim,
            p,
            p_coeffs,
            q_coeffs,
        })
    }

    /// Descending coefficients of P including the leading identity.
    fn p_full(&self) -> Vec<Mat<S>> {
        let mut v = vec![Mat::identity(self.dim, self.dim)];
        v.extend(self.p_coeffs.iter().cloned());
        v
    }

    /// Descending coefficients of Q including the leading identity.
    fn q_full(&self) -> Vec<Mat<S>> {
        let mut v = vec![Mat::identity(self.dim, self.dim)];
        v.extend(self.q_coeffs.iter().cloned());
        v
    }

    pub fn p_at(&self, z: Complex<S>) -> CMat<S> {
        poly_eval_c(&self.p_full(), z)
    }

    pub fn q_at(&self, z: Complex<S>) -> CMat<S> {
        poly_eval_c(&self.q_full(), z)
    }

    /// η₀ = Q₁ − P₁, with Q₁ := 0 when p = 1.
    pub fn eta0(&self) -> Mat<S> {
        let q1 = self
            .q_coeffs
            .first()
            .cloned()
            .unwrap_or_else(|| Mat::zeros(self.dim, self.dim));
        q1 - &self.p_coeffs[0]
    }

    /// Largest real part among the zeros of det Q (eigenvalues of the block
    /// companion of Q); −∞-like sentinel when Q ≡ I.
    fn max_re_q_zero(&self) -> S {
        if self.q_coeffs.is_empty() {
            return -S::max_value().unwrap();
        }
        max_re_eig(&block_companion(&self.q_coeffs))
    }

    fn max_re_p_zero(&self) -> S {
        max_re_eig(&block_companion(&self.p_coeffs))
    }
}

/// State-space realization dG = AG dt + B dZ, X = CᵀG.
#[derive(Debug, Clone)]
pub struct StateSpaceRealization<S: Scalar> {
    pub a: Mat<S>,
    pub b: Mat<S>,
    pub c: Mat<S>,
}

/// Per-clause report of the cointegrated MCARMA condition set.
#[derive(Debug, Clone, serde::Serialize)]
pub struct McarmaConditionReport {
    /// Zeros of det P lie in {Re < 0} ∪ {Re = 0}.
    pub p_zeros_ok: bool,
    /// rank P_p strictly between 0 and n.
    pub rank_ok: bool,
    pub rank: usize,
    /// (α⊥)ᵀ P_{p−1} β⊥ invertible.
    pub pencil_ok: bool,
    /// Zeros of det Q lie in {Re < 0}.
    pub q_zeros_ok: bool,
    pub all_pass: bool,
    pub notes: Vec<String>,
}

fn fourier_frequencies(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / (count - 1) as f64))
        .collect()
}

/// Converts the spec into its MSDDE delay measure η = η₀δ₀ + η₁(t)dt.
pub fn msdde_from_mcarma<S: Scalar>(spec: &McarmaSpec<S>) -> Result<SignedMatrixMeasure<S>> {
    let n = spec.dim;
    let max_re_q = spec.max_re_q_zero();
    if spec.p > 1 && max_re_q >= -real::<S>(1e-10) {
        return Err(Error::Condition(format!(
            "det Q has a zero with Re = {:.3e} >= 0",
            to_f64(max_re_q)
        )));
    }
    let eta0 = spec.eta0();
    if spec.p == 1 {
        return SignedMatrixMeasure::from_atoms(n, vec![(S::zero(), eta0)], S::one());
    }

    // R(z) = Q(z)(Iz − η₀) − P(z): degree ≤ p−2, so the top two descending
    // coefficients cancel exactly.
    let factor = vec![Mat::identity(n, n), -&eta0];
    let mut r_desc = poly_mul(&spec.q_full(), &factor);
    for (a, b) in r_desc.iter_mut().zip(spec.p_full()) {
        *a -= b;
    }
    debug_assert!(to_f64(max_abs(&r_desc[0])) < 1e-12 && to_f64(max_abs(&r_desc[1])) < 1e-12);
    let r_coeffs: Vec<Mat<S>> = r_desc[2..].to_vec();

    let r_scale = r_coeffs.iter().fold(S::zero(), |m, c| {
        let v = max_abs(c);
        if v > m {
            v
        } else {
            m
        }
    });
    let density = if r_coeffs.is_empty() || r_scale == S::zero() {
        Density::None
    } else {
        let (f_q, g_r) = left_mfd_realization(&spec.q_coeffs, &r_coeffs);
        let mut h = Mat::<S>::zeros(n, n * (spec.p - 1));
        h.view_mut((0, 0), (n, n)).copy_from(&Mat::identity(n, n));
        Density::MatrixExponential { h, f: f_q, g: g_r }
    };
    // The density decays like e^{max_re(F_Q) t} up to polynomial factors; half
    // the spectral gap is a safe exponential-moment rate.
    let decay = if matches!(density, Density::None) {
        S::one()
    } else {
        -max_re_q * real::<S>(0.5)
    };
    let measure =
        SignedMatrixMeasure::new(n, vec![(S::zero(), eta0.clone())], density, Some(decay))?;

    // Verify F[η₁](y) = iyI − η₀ − Q(iy)⁻¹P(iy) at 32 sample frequencies.
    let eta0_c = crate::linalg::to_complex(&eta0);
    for y in fourier_frequencies(32) {
        let iy = cplx::<S>(0.0, y);
        let lhs = measure.laplace(iy)? - &eta0_c;
        let qp = solve_c(&spec.q_at(iy), &spec.p_at(iy))?;
        let rhs = CMat::<S>::identity(n, n) * iy - &eta0_c - qp;
        let dev = max_abs_c(&(lhs - rhs));
        if to_f64(dev) > 1e-8 {
            return Err(Error::Verification(format!(
                "Fourier identity deviates by {:.3e} at y = {:.3e}",
                to_f64(dev),
                y
            )));
        }
    }
    Ok(measure)
}

/// Checks the four clauses of the cointegrated MCARMA condition set.
pub fn check_cointegrated_conditions<S: Scalar>(
    spec: &McarmaSpec<S>,
    rank_tol: Option<S>,
) -> McarmaConditionReport {
    let n = spec.dim;
    let tol = rank_tol.unwrap_or_else(|| real::<S>(1e-8));
    let mut notes = Vec::new();

    let max_re_p = spec.max_re_p_zero();
    let p_zeros_ok = max_re_p <= real::<S>(1e-8);
    if !p_zeros_ok {
        notes.push(format!(
            "det P has a zero with Re = {:.3e} > 0",
            to_f64(max_re_p)
        ));
    }

    let p_p = spec.p_coeffs.last().unwrap();
    let rf = rank_factors(p_p, tol);
    let rank_ok = rf.rank > 0 && rf.rank < n;
    if n == 1 {
        notes.push("dimension 1: rank of P_p cannot lie strictly between 0 and 1".into());
    } else if !rank_ok {
        notes.push(format!("rank P_p = {} is not in (0, {})", rf.rank, n));
    }

    let p_pm1 = if spec.p >= 2 {
        spec.p_coeffs[spec.p - 2].clone()
    } else {
        Mat::identity(n, n)
    };
    let pencil_ok = if rank_ok {
        let m = rf.alpha_perp.transpose() * &p_pm1 * &rf.beta_perp;
        let ok = condition_number(&m) < real::<S>(1e12);
        if !ok {
            notes.push("(alpha_perp)^T P_{p-1} beta_perp is numerically singular".into());
        }
        ok
    } else {
        false
    };

    let max_re_q = spec.max_re_q_zero();
    let q_zeros_ok = spec.p == 1 || max_re_q < -real::<S>(1e-10);
    if !q_zeros_ok {
        notes.push(format!(
            "det Q has a zero with Re = {:.3e} >= 0",
            to_f64(max_re_q)
        ));
    }

    McarmaConditionReport {
        p_zeros_ok,
        rank_ok,
        rank: rf.rank,
        pencil_ok,
        q_zeros_ok,
        all_pass: p_zeros_ok && rank_ok && pencil_ok && q_zeros_ok,
        notes,
    }
}

/// Long-run matrix C₀ = β⊥[(α⊥)ᵀP_{p−1}β⊥]⁻¹(α⊥)ᵀQ_{p−1} from the
/// polynomial coefficients alone (no spectral computation).
pub fn carma_c0<S: Scalar>(spec: &McarmaSpec<S>) -> Result<Mat<S>> {
    let report = check_cointegrated_conditions(spec, None);
    if !report.all_pass {
        return Err(Error::Precondition(format!(
            "cointegrated MCARMA conditions fail: {:?}",
            report.notes
        )));
    }
    let n = spec.dim;
    let rf = rank_factors(spec.p_coeffs.last().unwrap(), real::<S>(1e-8));
    let p_pm1 = if spec.p >= 2 {
        spec.p_coeffs[spec.p - 2].clone()
    } else {
        Mat::identity(n, n)
    };
    let q_pm1 = spec
        .q_coeffs
        .last()
        .cloned()
        .unwrap_or_else(|| Mat::identity(n, n));
    let bracket = rf.alpha_perp.transpose() * p_pm1 * &rf.beta_perp;
    if condition_number(&bracket) >= real::<S>(1e12) {
        return Err(Error::Singular(
            "(alpha_perp)^T P_{p-1} beta_perp is numerically singular".into(),
        ));
    }
    let inv = inverse_r(&bracket)?;
    Ok(&rf.beta_perp * inv * rf.alpha_perp.transpose() * q_pm1)
}

/// Builds the state-space realization; the B blocks solve the triangular
/// coefficient-matching system B₁ = I, B_{k+1} = Q_k − Σ_{i=1}^{k} P_i B_{k+1−i}.
pub fn state_space<S: Scalar>(spec: &McarmaSpec<S>) -> StateSpaceRealization<S> {
    let n = spec.dim;
    let p = spec.p;
    let mut blocks: Vec<Mat<S>> = vec![Mat::identity(n, n)];
    for k in 1..p {
        let mut bk = spec.q_coeffs[k - 1].clone();
        for i in 1..=k {
            bk -= &spec.p_coeffs[i - 1] * &blocks[k - i];
        }
        blocks.push(bk);
    }
    let mut b = Mat::<S>::zeros(n * p, n);
    for (i, blk) in blocks.iter().enumerate() {
        b.view_mut((i * n, 0), (n, n)).copy_from(blk);
    }
    let mut c = Mat::<S>::zeros(n * p, n);
    c.view_mut((0, 0), (n, n)).copy_from(&Mat::identity(n, n));
    StateSpaceRealization {
        a: block_companion(&spec.p_coeffs),
        b,
        c,
    }
}

/// Transfer function P(z)⁻¹Q(z).
pub fn transfer_fn<S: Scalar>(spec: &McarmaSpec<S>, z: Complex<S>) -> Result<CMat<S>> {
    let p = spec.p_at(z);
    let det = p.clone().lu().determinant();
    let scale = max_abs_c(&p);
    if det.modulus() < real::<S>(1e-300) + real::<S>(1e-14) * scale.powi(spec.dim as i32) {
        return Err(Error::Singular(format!(
            "det P vanishes at z = {:.4e}+{:.4e}i",
            to_f64(z.re),
            to_f64(z.im)
        )));
    }
    solve_c(&p, &spec.q_at(z))
}

/// h_η(z) = Q(z)⁻¹P(z), the characteristic-function route through the
/// polynomials (dual to [`CharacteristicFunction::char_fn`] of the bridged
/// measure).
pub fn char_fn_poly<S: Scalar>(spec: &McarmaSpec<S>, z: Complex<S>) -> Result<CMat<S>> {
    solve_c(&spec.q_at(z), &spec.p_at(z))
}

/// Max deviation of h_η (bridged measure) from Q⁻¹P over the given points.
pub fn bridge_char_fn_deviation<S: Scalar>(
    spec: &McarmaSpec<S>,
    measure: &SignedMatrixMeasure<S>,
    points: &[Complex<S>],
) -> Result<S> {
    let cf = CharacteristicFunction::new(measure.clone());
    let mut worst = S::zero();
    for &z in points {
        let dev = max_abs_c(&(cf.char_fn(z)? - char_fn_poly(spec, z)?));
        if dev > worst {
            worst = dev;
        }
    }
    Ok(worst)
}

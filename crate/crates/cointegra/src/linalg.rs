//! Shared dense linear algebra helpers: complex solves, Van Loan block
//! integrals, rank factorizations and matrix-polynomial utilities.

use nalgebra::{DMatrix, DVector};
use nalgebra::ComplexField;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

pub type Mat<S> = DMatrix<S>;
pub type Vect<S> = DVector<S>;
pub type CMat<S> = DMatrix<Complex<S>>;
pub type CVect<S> = DVector<Complex<S>>;

/// Lifts a real matrix into the complex plane.
pub fn to_complex<S: Scalar>(m: &Mat<S>) -> CMat<S> {
    m.map(|x| Complex::new(x, S::zero()))
}

pub fn real_part<S: Scalar>(m: &CMat<S>) -> Mat<S> {
    m.map(|z| z.re)
}

/// Max absolute imaginary entry, used to certify results that must be real.
pub fn max_imag<S: Scalar>(m: &CMat<S>) -> S {
    m.iter()
        .map(|z| z.im.abs())
        .fold(S::zero(), |a, b| if b > a { b } else { a })
}

pub fn max_abs<S: Scalar>(m: &Mat<S>) -> S {
    m.iter()
        .map(|x| x.abs())
        .fold(S::zero(), |a, b| if b > a { b } else { a })
}

pub fn max_abs_c<S: Scalar>(m: &CMat<S>) -> S {
    m.iter()
        .map(|z| z.modulus())
        .fold(S::zero(), |a, b| if b > a { b } else { a })
}

/// Solves `A X = B` for complex square `A` via LU with partial pivoting.
pub fn solve_c<S: Scalar>(a: &CMat<S>, b: &CMat<S>) -> Result<CMat<S>> {
    let lu = a.clone().lu();
    lu.solve(b)
        .ok_or_else(|| Error::Singular("complex LU solve failed".into()))
}

pub fn inverse_c<S: Scalar>(a: &CMat<S>) -> Result<CMat<S>> {
    let n = a.nrows();
    solve_c(a, &CMat::identity(n, n))
}

pub fn solve_r<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Result<Mat<S>> {
    let lu = a.clone().lu();
    lu.solve(b)
        .ok_or_else(|| Error::Singular("LU solve failed".into()))
}

pub fn inverse_r<S: Scalar>(a: &Mat<S>) -> Result<Mat<S>> {
    let n = a.nrows();
    solve_r(a, &Mat::identity(n, n))
}

/// 2-norm condition number estimate via singular values.
pub fn condition_number<S: Scalar>(a: &Mat<S>) -> S {
    let sv = a.clone().svd(false, false).singular_values;
    let (mut lo, mut hi) = (S::max_value().unwrap(), S::zero());
    for &s in sv.iter() {
        if s < lo {
            lo = s;
        }
        if s > hi {
            hi = s;
        }
    }
    if lo <= S::zero() {
        S::max_value().unwrap()
    } else {
        hi / lo
    }
}

/// Van Loan block construction: returns `(exp(F t), ∫_0^t exp(F u) du · G)`.
///
/// The pair is read off the exponential of the augmented matrix
/// `[[F, G], [0, 0]]`, which avoids inverting `F` for finite horizons.
pub fn van_loan_exp_integral<S: Scalar>(f: &Mat<S>, g: &Mat<S>, t: S) -> (Mat<S>, Mat<S>) {
    let m = f.nrows();
    let k = g.ncols();
    let mut block = Mat::<S>::zeros(m + k, m + k);
    block.view_mut((0, 0), (m, m)).copy_from(f);
    block.view_mut((0, m), (m, k)).copy_from(g);
    let e = (block * t).exp();
    let exp_ft = e.view((0, 0), (m, m)).into_owned();
    let integral = e.view((0, m), (m, k)).into_owned();
    (exp_ft, integral)
}

pub fn expm<S: Scalar>(f: &Mat<S>, t: S) -> Mat<S> {
    (f.clone() * t).exp()
}

/// Largest real part among the eigenvalues of a real square matrix.
pub fn max_re_eig<S: Scalar>(m: &Mat<S>) -> S {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(S::min_value().unwrap(), |a, b| if b > a { b } else { a })
}

/// Rank factorization data of an `n×n` matrix from its SVD.
#[derive(Debug, Clone)]
pub struct RankFactors<S: Scalar> {
    pub rank: usize,
    /// `alpha * beta^T` reproduces the input; `alpha` is `n×r`.
    pub alpha: Mat<S>,
    pub beta: Mat<S>,
    /// Orthonormal basis of the left null space (`n×(n−r)`).
    pub alpha_perp: Mat<S>,
    /// Orthonormal basis of the right null space (`n×(n−r)`).
    pub beta_perp: Mat<S>,
    pub singular_values: Vec<S>,
}

/// Numerical rank and null bases of a square matrix. Rank counts singular
/// values above `tol·σ_max`; a zero matrix has rank 0.
pub fn rank_factors<S: Scalar>(m: &Mat<S>, tol: S) -> RankFactors<S> {
    let n = m.nrows();
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd with u");
    let vt = svd.v_t.expect("svd with v_t");
    let sv = svd.singular_values;

    // nalgebra does not guarantee ordering; sort indices by descending σ.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap());
    let smax = sv[order[0]];
    let rank = if smax == S::zero() {
        0
    } else {
        order.iter().filter(|&&i| sv[i] > tol * smax).count()
    };

    let mut alpha = Mat::<S>::zeros(n, rank);
    let mut beta = Mat::<S>::zeros(n, rank);
    for (col, &i) in order[..rank].iter().enumerate() {
        alpha
            .column_mut(col)
            .copy_from(&(u.column(i) * sv[i]));
        beta.column_mut(col).copy_from(&vt.row(i).transpose());
    }
    let mut alpha_perp = Mat::<S>::zeros(n, n - rank);
    let mut beta_perp = Mat::<S>::zeros(n, n - rank);
    for (col, &i) in order[rank..].iter().enumerate() {
        alpha_perp.column_mut(col).copy_from(&u.column(i));
        beta_perp
            .column_mut(col)
            .copy_from(&vt.row(i).transpose());
    }
    RankFactors {
        rank,
        alpha,
        beta,
        alpha_perp,
        beta_perp,
        singular_values: order.iter().map(|&i| sv[i]).collect(),
    }
}

/// Largest principal angle (radians) between the column spaces of `a` and `b`.
pub fn max_principal_angle<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> S {
    let qa = orthonormal_columns(a);
    let qb = orthonormal_columns(b);
    if qa.ncols() != qb.ncols() {
        return S::frac_pi_2();
    }
    if qa.ncols() == 0 {
        return S::zero();
    }
    let prod = qa.transpose() * qb;
    let sv = prod.svd(false, false).singular_values;
    let mut smin = S::one();
    for &s in sv.iter() {
        if s < smin {
            smin = s;
        }
    }
    let clamped = if smin > S::one() { S::one() } else { smin };
    clamped.acos()
}

/// Orthonormal basis of the column space (drops numerically null directions).
pub fn orthonormal_columns<S: Scalar>(a: &Mat<S>) -> Mat<S> {
    if a.ncols() == 0 {
        return a.clone();
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("svd with u");
    let sv = svd.singular_values;
    let smax = sv.iter().fold(S::zero(), |m, &s| if s > m { s } else { m });
    let tol = real::<S>(1e-12) * if smax > S::zero() { smax } else { S::one() };
    let cols: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > tol).collect();
    let mut q = Mat::<S>::zeros(a.nrows(), cols.len());
    for (j, &i) in cols.iter().enumerate() {
        q.column_mut(j).copy_from(&u.column(i));
    }
    q
}

/// Block companion matrix of the monic matrix polynomial
/// `I z^p + C_1 z^{p-1} + … + C_p`; its eigenvalues are the polynomial zeros.
pub fn block_companion<S: Scalar>(coeffs: &[Mat<S>]) -> Mat<S> {
    let p = coeffs.len();
    let n = coeffs[0].nrows();
    let mut a = Mat::<S>::zeros(n * p, n * p);
    for i in 0..p.saturating_sub(1) {
        a.view_mut((i * n, (i + 1) * n), (n, n))
            .copy_from(&Mat::identity(n, n));
    }
    for (j, c) in coeffs.iter().rev().enumerate() {
        // last block row: (-C_p, ..., -C_1)
        a.view_mut(((p - 1) * n, j * n), (n, n)).copy_from(&(-c));
    }
    a
}

/// Left companion realization of `Q(z)^{-1} R(z)` where
/// `Q(z) = I z^m + Q_1 z^{m-1} + … + Q_m` and `R` has degree ≤ m−1.
/// Returns `(F, B)` with `[I,0,…,0] (zI − F)^{-1} B = Q(z)^{-1} R(z)`;
/// `B` stacks the coefficient of `z^{m-i}` of `R` in block row `i`.
pub fn left_mfd_realization<S: Scalar>(q_coeffs: &[Mat<S>], r_coeffs: &[Mat<S>]) -> (Mat<S>, Mat<S>) {
    let m = q_coeffs.len();
    let n = q_coeffs[0].nrows();
    assert!(r_coeffs.len() <= m, "numerator degree must be < deg Q");
    let mut f = Mat::<S>::zeros(n * m, n * m);
    for (i, q) in q_coeffs.iter().enumerate() {
        f.view_mut((i * n, 0), (n, n)).copy_from(&(-q));
        if i + 1 < m {
            f.view_mut((i * n, (i + 1) * n), (n, n))
                .copy_from(&Mat::identity(n, n));
        }
    }
    // r_coeffs[k] is the coefficient of z^{deg R - k}; pad to m block rows so
    // that block row i holds the z^{m-1-(i)}… coefficient alignment below.
    let mut b = Mat::<S>::zeros(n * m, n);
    let deg_gap = m - r_coeffs.len();
    for (k, r) in r_coeffs.iter().enumerate() {
        b.view_mut(((k + deg_gap) * n, 0), (n, n)).copy_from(r);
    }
    (f, b)
}

/// Evaluates `Σ coeffs[i] z^{d-i}` where `d = coeffs.len() - 1`.
pub fn poly_eval_c<S: Scalar>(coeffs: &[Mat<S>], z: Complex<S>) -> CMat<S> {
    let n = coeffs[0].nrows();
    let mut acc = CMat::<S>::zeros(n, n);
    for c in coeffs {
        acc = acc * z + to_complex(c);
    }
    acc
}

/// Product of two matrix polynomials given by descending-degree coefficients.
pub fn poly_mul<S: Scalar>(a: &[Mat<S>], b: &[Mat<S>]) -> Vec<Mat<S>> {
    let n = a[0].nrows();
    let mut out = vec![Mat::<S>::zeros(n, n); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

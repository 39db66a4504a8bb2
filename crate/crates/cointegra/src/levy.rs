//! Lévy driver simulation and Granger-form solution paths.
//!
//! Randomness is counter-based so that ensembles parallelize without shared
//! state. The stream for increment k of a grid with seed s is derived
//! bit-exactly as follows: let x = s XOR ((k+1)·0x9E3779B97F4A7C15) (wrapping
//! arithmetic); four successive outputs of the SplitMix64 generator started
//! at x, serialized little-endian, form the 32-byte ChaCha8 key; the stream
//! begins at position 0. Within one increment the draw order is: dim standard
//! normals for the Gaussian part, then one Poisson variate for the jump
//! count, then the jump draws in order (dim standard normals each for
//! Gaussian jumps, one uniform in [0,1) each for fixed-list jumps).

use nalgebra::SymmetricEigen;
use rand::Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::kernel::KernelGrid;
use crate::linalg::{max_abs, Mat, Vect};
use crate::measure::{Density, PiFunction, SignedMatrixMeasure};
use crate::scalar::{real, to_f64, Scalar};
use crate::spectral::CointegrationStructure;

/// Jump-size distribution of the compound Poisson part.
#[derive(Debug, Clone)]
pub enum JumpDistribution<S: Scalar> {
    Gaussian { mean: Vect<S>, cov: Mat<S> },
    Fixed { outcomes: Vec<(S, Vect<S>)> },
}

#[derive(Debug, Clone)]
pub struct CompoundPoisson<S: Scalar> {
    pub rate: S,
    pub dist: JumpDistribution<S>,
}

/// Square-integrable Lévy driver: drift + Brownian part + compound Poisson.
#[derive(Debug, Clone)]
pub struct LevyModel<S: Scalar> {
    pub dim: usize,
    pub drift: Vect<S>,
    pub gaussian_cov: Mat<S>,
    pub jumps: Option<CompoundPoisson<S>>,
}

impl<S: Scalar> LevyModel<S> {
    pub fn brownian(dim: usize) -> Self {
        Self {
            dim,
            drift: Vect::zeros(dim),
            gaussian_cov: Mat::identity(dim, dim),
            jumps: None,
        }
    }

    /// Σ = Σ_g + λ·E[JJᵀ], the second-moment matrix per unit time.
    pub fn second_moment(&self) -> Mat<S> {
        let mut sigma = self.gaussian_cov.clone();
        if let Some(cp) = &self.jumps {
            match &cp.dist {
                JumpDistribution::Gaussian { mean, cov } => {
                    sigma += (cov + mean * mean.transpose()) * cp.rate;
                }
                JumpDistribution::Fixed { outcomes } => {
                    for (p, j) in outcomes {
                        sigma += j * j.transpose() * (*p * cp.rate);
                    }
                }
            }
        }
        sigma
    }
}

/// Square root of a PSD matrix via symmetric eigendecomposition; tolerates
/// tiny negative eigenvalues from round-off and rank deficiency.
pub(crate) fn psd_factor<S: Scalar>(m: &Mat<S>) -> Result<Mat<S>> {
    let scale = max_abs(m) + real::<S>(1.0);
    let eig = SymmetricEigen::new(m.clone());
    let mut d = eig.eigenvalues.clone();
    for v in d.iter_mut() {
        if *v < -real::<S>(1e-12) * scale {
            return Err(Error::Cholesky(format!(
                "covariance has eigenvalue {:.3e}",
                to_f64(*v)
            )));
        }
        *v = if *v > S::zero() { v.sqrt() } else { S::zero() };
    }
    let mut q = eig.eigenvectors;
    for (j, s) in d.iter().enumerate() {
        q.column_mut(j).scale_mut(*s);
    }
    Ok(q)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The counter-based stream for increment k: see the module docs for the
/// bit-exact derivation.
pub fn increment_stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut state = seed ^ (k.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut key = [0u8; 32];
    for i in 0..4 {
        key[i * 8..(i + 1) * 8].copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Grid of driver increments over [t0, t0 + count·Δ] with t0 = −n_burn·Δ.
#[derive(Debug, Clone)]
pub struct IncrementGrid<S: Scalar> {
    pub step: S,
    pub t0: S,
    pub zero_index: usize,
    pub increments: Vec<Vect<S>>,
    pub seed: u64,
}

impl<S: Scalar> IncrementGrid<S> {
    pub fn node_count(&self) -> usize {
        self.increments.len() + 1
    }

    pub fn node_time(&self, j: usize) -> S {
        self.t0 + real::<S>(j as f64) * self.step
    }

    /// Aggregates groups of `factor` increments into one coarser grid over
    /// the same window and the same underlying driver path.
    pub fn coarsen(&self, factor: usize) -> Result<IncrementGrid<S>> {
        if factor == 0 || self.zero_index % factor != 0 || self.increments.len() % factor != 0 {
            return Err(Error::Grid(
                "coarsening factor must divide the burn-in and total counts".into(),
            ));
        }
        let increments = self
            .increments
            .chunks(factor)
            .map(|c| {
                let mut s = c[0].clone();
                for v in &c[1..] {
                    s += v;
                }
                s
            })
            .collect();
        Ok(IncrementGrid {
            step: self.step * real::<S>(factor as f64),
            t0: self.t0,
            zero_index: self.zero_index / factor,
            increments,
            seed: self.seed,
        })
    }

    /// Z at every grid node, normalized so that Z = 0 at time 0.
    pub fn z_nodes(&self) -> Vec<Vect<S>> {
        let n = self.increments[0].nrows();
        let mut z = Vec::with_capacity(self.node_count());
        z.push(Vect::zeros(n));
        for inc in &self.increments {
            let last = z.last().unwrap().clone();
            z.push(last + inc);
        }
        let anchor = z[self.zero_index].clone();
        for v in z.iter_mut() {
            *v -= &anchor;
        }
        z
    }
}

/// Draws ΔZ_k = b·Δ + chol(Σ_g)·√Δ·ζ_k + compound-Poisson jumps on the
/// window [−T_burn, T_max], each increment from its own counter-based stream.
pub fn sample_levy<S: Scalar>(
    model: &LevyModel<S>,
    step: S,
    t_burn: S,
    t_max: S,
    seed: u64,
) -> Result<IncrementGrid<S>> {
    if step <= S::zero() {
        return Err(Error::Domain("step must be positive".into()));
    }
    let n = model.dim;
    let n_burn = to_f64((t_burn / step).ceil()).max(0.0) as usize;
    let n_fwd = to_f64((t_max / step).ceil()).max(1.0) as usize;
    let count = n_burn + n_fwd;
    let factor = psd_factor(&model.gaussian_cov)?;
    let jump_factor = match model.jumps.as_ref().map(|cp| &cp.dist) {
        Some(JumpDistribution::Gaussian { cov, .. }) => Some(psd_factor(cov)?),
        _ => None,
    };
    let sqrt_dt = step.sqrt();
    let dt64 = to_f64(step);
    let mut increments = Vec::with_capacity(count);
    for k in 0..count {
        let mut rng = increment_stream(seed, k as u64);
        let mut dz = &model.drift * step;
        let zeta = Vect::from_iterator(
            n,
            (0..n).map(|_| real::<S>(StandardNormal.sample(&mut rng))),
        );
        dz += &factor * zeta * sqrt_dt;
        if let Some(cp) = &model.jumps {
            let lambda = to_f64(cp.rate) * dt64;
            if lambda > 0.0 {
                let m = Poisson::new(lambda)
                    .map_err(|e| Error::Domain(format!("poisson rate: {e}")))?
                    .sample(&mut rng) as usize;
                for _ in 0..m {
                    match &cp.dist {
                        JumpDistribution::Gaussian { mean, .. } => {
                            let zeta = Vect::from_iterator(
                                n,
                                (0..n).map(|_| real::<S>(StandardNormal.sample(&mut rng))),
                            );
                            dz += mean + jump_factor.as_ref().unwrap() * zeta;
                        }
                        JumpDistribution::Fixed { outcomes } => {
                            let u: f64 = rng.random();
                            let mut acc = 0.0;
                            for (p, j) in outcomes {
                                acc += to_f64(*p);
                                if u < acc {
                                    dz += j;
                                    break;
                                }
                            }
                        }
                    }
                }
            }
        }
        increments.push(dz);
    }
    Ok(IncrementGrid {
        step,
        t0: -real::<S>(n_burn as f64) * step,
        zero_index: n_burn,
        increments,
        seed,
    })
}

/// A solution path in the Granger form, sampled at `times`.
#[derive(Debug, Clone)]
pub struct SolutionPath<S: Scalar> {
    pub times: Vec<S>,
    pub x: Vec<Vect<S>>,
    pub z: Vec<Vect<S>>,
    pub xi: Vect<S>,
    pub step: S,
    pub truncation_bias: S,
}

fn validate_xi<S: Scalar>(structure: &CointegrationStructure<S>, xi: &Vect<S>) -> Result<()> {
    let pi0_norm = max_abs(&structure.pi0);
    let xi_norm = xi.iter().fold(S::zero(), |m, &v| if v.abs() > m { v.abs() } else { m });
    let prod = &structure.pi0 * xi;
    let prod_norm = prod.iter().fold(S::zero(), |m, &v| if v.abs() > m { v.abs() } else { m });
    if prod_norm > real::<S>(1e-8) * pi0_norm * xi_norm {
        return Err(Error::Xi(format!(
            "||Pi0 xi|| = {:.3e} is not zero relative to ||Pi0||·||xi||",
            to_f64(prod_norm)
        )));
    }
    Ok(())
}

fn truncation_bias<S: Scalar>(kernel: &KernelGrid<S>, model_scale: S) -> S {
    kernel.truncation_error_bound * model_scale
}

/// X at every grid node j ≥ K (K = kernel horizon in steps):
/// X = ξ + C₀·Z + Σᵢ C((j−1−i)Δ)·ΔZᵢ, an on-grid Riemann–Stieltjes sum.
pub fn granger_path<S: Scalar>(
    kernel: &KernelGrid<S>,
    structure: &CointegrationStructure<S>,
    incr: &IncrementGrid<S>,
    xi: &Vect<S>,
) -> Result<SolutionPath<S>> {
    validate_xi(structure, xi)?;
    let rel = to_f64(kernel.step / incr.step);
    if (rel - 1.0).abs() > 1e-9 {
        return Err(Error::Grid(
            "kernel and increment grids must share the step".into(),
        ));
    }
    let k_len = kernel.c.len() - 1;
    if k_len > incr.zero_index {
        return Err(Error::Window(format!(
            "burn-in {} steps does not cover the kernel horizon {} steps",
            incr.zero_index, k_len
        )));
    }
    let z = incr.z_nodes();
    let node_count = incr.node_count();
    let times: Vec<S> = (k_len..node_count).map(|j| incr.node_time(j)).collect();
    let xs: Vec<Vect<S>> = (k_len..node_count)
        .into_par_iter()
        .map(|j| {
            let mut x = &structure.c0 * &z[j];
            for m in 0..k_len.min(j) {
                // increment i = j - 1 - m carries kernel value C(m·Δ)
                x.gemv(S::one(), &kernel.c[m], &incr.increments[j - 1 - m], S::one());
            }
            // add xi last so shifting it moves the path bitwise-exactly
            x += xi;
            x
        })
        .collect();
    let zs: Vec<Vect<S>> = (k_len..node_count).map(|j| z[j].clone()).collect();
    Ok(SolutionPath {
        times,
        x: xs,
        z: zs,
        xi: xi.clone(),
        step: incr.step,
        truncation_bias: truncation_bias(kernel, S::one()),
    })
}

/// Like [`granger_path`] but only at the requested (grid-aligned) times.
pub fn granger_path_at<S: Scalar>(
    kernel: &KernelGrid<S>,
    structure: &CointegrationStructure<S>,
    incr: &IncrementGrid<S>,
    xi: &Vect<S>,
    times: &[S],
) -> Result<SolutionPath<S>> {
    validate_xi(structure, xi)?;
    let rel = to_f64(kernel.step / incr.step);
    if (rel - 1.0).abs() > 1e-9 {
        return Err(Error::Grid(
            "kernel and increment grids must share the step".into(),
        ));
    }
    let k_len = kernel.c.len() - 1;
    let z = incr.z_nodes();
    let node_count = incr.node_count();
    let mut xs = Vec::with_capacity(times.len());
    let mut zs = Vec::with_capacity(times.len());
    for &t in times {
        let pos = to_f64((t - incr.t0) / incr.step);
        let j = pos.round();
        if (pos - j).abs() > 1e-6 {
            return Err(Error::Grid(format!(
                "output time {:.6} is not on the increment grid",
                to_f64(t)
            )));
        }
        let j = j as usize;
        if j < k_len || j >= node_count {
            return Err(Error::Window(format!(
                "time {:.4} is outside the covered window",
                to_f64(t)
            )));
        }
        let mut x = &structure.c0 * &z[j];
        for m in 0..k_len.min(j) {
            x.gemv(S::one(), &kernel.c[m], &incr.increments[j - 1 - m], S::one());
        }
        x += xi;
        xs.push(x);
        zs.push(z[j].clone());
    }
    Ok(SolutionPath {
        times: times.to_vec(),
        x: xs,
        z: zs,
        xi: xi.clone(),
        step: incr.step,
        truncation_bias: truncation_bias(kernel, S::one()),
    })
}

/// Residual of the error-correction form
/// X_t − X_s − Π₀∫_s^t X − ∫₀^∞ π(u)(X_{t−u} − X_{s−u})du − (Z_t − Z_s)
/// over a full-grid path.
pub fn ecf_residual<S: Scalar>(
    path: &SolutionPath<S>,
    measure: &SignedMatrixMeasure<S>,
    s: S,
    t: S,
) -> Result<Vect<S>> {
    let step = path.step;
    let locate = |v: S| -> Result<usize> {
        let pos = to_f64((v - path.times[0]) / step);
        let j = pos.round();
        if (pos - j).abs() > 1e-6 || j < 0.0 || j as usize >= path.times.len() {
            return Err(Error::Grid(format!(
                "time {:.6} is not on the path grid",
                to_f64(v)
            )));
        }
        Ok(j as usize)
    };
    let is = locate(s)?;
    let it = locate(t)?;
    if it <= is {
        return Err(Error::Domain("need s < t".into()));
    }
    let mut res = &path.x[it] - &path.x[is];
    // level term
    let mut level = Vect::zeros(path.xi.nrows());
    for j in is..=it {
        let w = if j == is || j == it {
            real::<S>(0.5)
        } else {
            S::one()
        };
        level += &path.x[j] * (w * step);
    }
    res -= &measure.total_mass() * level;
    // increment memory term; zero when all mass sits in the atom at 0
    let has_pi = !matches!(measure.density(), Density::None)
        || measure.atoms().iter().any(|(u, _)| *u > S::zero());
    if has_pi {
        let pi = PiFunction::new(measure);
        let (kp, eps) = pi.decay_certificate();
        let scale = kp + S::one();
        let u_req = (scale / (real::<S>(1e-10) * (S::one() + max_abs(&measure.total_mass()))))
            .ln()
            / eps;
        let j_req = to_f64((u_req / step).ceil()) as usize;
        if is < j_req {
            return Err(Error::Window(format!(
                "history before s = {:.4} too short for the pi integral",
                to_f64(s)
            )));
        }
        let mut acc = Vect::zeros(path.xi.nrows());
        for j in 0..=j_req {
            let w = if j == 0 || j == j_req {
                real::<S>(0.5)
            } else {
                S::one()
            };
            let diff = &path.x[it - j] - &path.x[is - j];
            acc += pi.at(real::<S>(j as f64) * step) * diff * (w * step);
        }
        res -= acc;
    }
    res -= &path.z[it] - &path.z[is];
    Ok(res)
}

/// Cross-sectional variance of γᵀ(X_t − X_0) at every common grid time.
pub fn variance_profile<S: Scalar>(
    ensemble: &[SolutionPath<S>],
    gamma: &Vect<S>,
) -> Result<Vec<(S, S)>> {
    if ensemble.len() < 2 {
        return Err(Error::Precondition("need at least two paths".into()));
    }
    let times = &ensemble[0].times;
    let zero = times
        .iter()
        .position(|&t| to_f64(t).abs() < 1e-12)
        .ok_or_else(|| Error::Grid("paths do not contain t = 0".into()))?;
    let m = ensemble.len();
    let mut out = Vec::with_capacity(times.len());
    for (j, &t) in times.iter().enumerate() {
        let vals: Vec<S> = ensemble
            .iter()
            .map(|p| gamma.dot(&(&p.x[j] - &p.x[zero])))
            .collect();
        let mean = vals.iter().fold(S::zero(), |a, &b| a + b) / real::<S>(m as f64);
        let var = vals
            .iter()
            .fold(S::zero(), |a, &b| a + (b - mean) * (b - mean))
            / real::<S>((m - 1) as f64);
        out.push((t, var));
    }
    Ok(out)
}

/// Least-squares slope of the series over its final half.
pub fn ls_slope<S: Scalar>(series: &[(S, S)]) -> S {
    let tail = &series[series.len() / 2..];
    let m = real::<S>(tail.len() as f64);
    let tm = tail.iter().fold(S::zero(), |a, &(t, _)| a + t) / m;
    let vm = tail.iter().fold(S::zero(), |a, &(_, v)| a + v) / m;
    let mut num = S::zero();
    let mut den = S::zero();
    for &(t, v) in tail {
        num += (t - tm) * (v - vm);
        den += (t - tm) * (t - tm);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::solve_kernel;
    use crate::spectral::{cointegration_structure, CharacteristicFunction};
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    fn setup(a: Mat<f64>, step: f64, horizon: f64) -> (SignedMatrixMeasure<f64>, CointegrationStructure<f64>, KernelGrid<f64>) {
        let m = SignedMatrixMeasure::from_atoms(a.nrows(), vec![(0.0, a)], 1.0).unwrap();
        let cf = CharacteristicFunction::new(m.clone());
        let s = cointegration_structure(&cf, None).unwrap();
        let k = solve_kernel(&m, &s, step, horizon).unwrap();
        (m, s, k)
    }

    #[test]
    fn same_seed_reproduces_increments_bitwise() {
        let model = LevyModel::<f64>::brownian(2);
        let a = sample_levy(&model, 0.01, 1.0, 5.0, 42).unwrap();
        let b = sample_levy(&model, 0.01, 1.0, 5.0, 42).unwrap();
        for (x, y) in a.increments.iter().zip(&b.increments) {
            assert_eq!(x, y);
        }
        let c = sample_levy(&model, 0.01, 1.0, 5.0, 43).unwrap();
        assert_ne!(a.increments[0], c.increments[0]);
    }

    #[test]
    fn empirical_covariance_of_brownian_increments() {
        let model = LevyModel::<f64>::brownian(2);
        let step = 0.01;
        let g = sample_levy(&model, step, 0.0, 1000.0, 7).unwrap();
        let n = g.increments.len() as f64;
        let mut cov = Mat::<f64>::zeros(2, 2);
        for dz in &g.increments {
            let v = dz / step.sqrt();
            cov += &v * v.transpose();
        }
        cov /= n;
        // 3 standard errors: se(diag) = sqrt(2/n), se(offdiag) = sqrt(1/n)
        assert!((cov[(0, 0)] - 1.0).abs() < 3.0 * (2.0 / n).sqrt());
        assert!((cov[(1, 1)] - 1.0).abs() < 3.0 * (2.0 / n).sqrt());
        assert!(cov[(0, 1)].abs() < 3.0 * (1.0 / n).sqrt());
    }

    #[test]
    fn poisson_jump_count_matches_rate() {
        // unit fixed jumps with no Gaussian part: sum of increments counts jumps
        let model = LevyModel {
            dim: 1,
            drift: dvector![0.0],
            gaussian_cov: dmatrix![0.0],
            jumps: Some(CompoundPoisson {
                rate: 2.0,
                dist: JumpDistribution::Fixed {
                    outcomes: vec![(1.0, dvector![1.0])],
                },
            }),
        };
        let g = sample_levy(&model, 0.01, 0.0, 100.0, 11).unwrap();
        let total: f64 = g.increments.iter().map(|v| v[0]).sum();
        assert!((total - 200.0).abs() < 3.0 * 200.0f64.sqrt(), "count {total}");
    }

    #[test]
    fn non_psd_covariance_is_rejected() {
        let model = LevyModel {
            dim: 2,
            drift: Vect::zeros(2),
            gaussian_cov: dmatrix![1.0, 2.0; 2.0, 1.0],
            jumps: None,
        };
        assert!(matches!(
            sample_levy(&model, 0.01, 0.0, 1.0, 1),
            Err(Error::Cholesky(_))
        ));
    }

    #[test]
    fn rank_deficient_covariance_is_accepted() {
        let model = LevyModel {
            dim: 2,
            drift: Vect::zeros(2),
            gaussian_cov: dmatrix![1.0, 1.0; 1.0, 1.0],
            jumps: None,
        };
        let g = sample_levy(&model, 0.01, 0.0, 1.0, 1).unwrap();
        for dz in &g.increments {
            assert_relative_eq!(dz[0], dz[1], epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_measure_path_is_the_driver() {
        let m = SignedMatrixMeasure::<f64>::zero(1);
        let cf = CharacteristicFunction::new(m.clone());
        let s = cointegration_structure(&cf, None).unwrap();
        let k = solve_kernel(&m, &s, 0.01, 0.05).unwrap();
        let model = LevyModel::<f64>::brownian(1);
        let g = sample_levy(&model, 0.01, 0.1, 5.0, 3).unwrap();
        let p = granger_path(&k, &s, &g, &dvector![0.0]).unwrap();
        for (x, z) in p.x.iter().zip(&p.z) {
            assert_relative_eq!(x[0], z[0], epsilon = 1e-13);
        }
    }

    #[test]
    fn full_rank_ou_matches_euler_recursion_at_order_one() {
        let model = LevyModel::<f64>::brownian(2);
        let fine = sample_levy(&model, 0.01, 25.0, 5.0, 9).unwrap();
        let dev = |g: &IncrementGrid<f64>| {
            let step = g.step;
            let (_, s, k) = setup(Mat::identity(2, 2) * -1.0, step, 25.0);
            let p = granger_path(&k, &s, g, &dvector![0.0, 0.0]).unwrap();
            // Euler from the path's first computed point
            let mut e = p.x[0].clone();
            let mut max_dev: f64 = 0.0;
            for j in 1..p.x.len() {
                let i = (to_f64((p.times[j] - g.t0) / step).round() as usize) - 1;
                e = &e - &e * step + &g.increments[i];
                max_dev = max_dev.max((&p.x[j] - &e).abs().max());
            }
            max_dev
        };
        let d1 = dev(&fine.coarsen(2).unwrap());
        let d2 = dev(&fine);
        assert!(d2 < 0.75 * d1, "d1 {d1:.4e} d2 {d2:.4e}");
    }

    #[test]
    fn cointegrated_second_coordinate_is_xi_plus_driver() {
        let (_, s, k) = setup(dmatrix![-1.0, 1.0; 0.0, 0.0], 0.01, 30.0);
        let model = LevyModel::<f64>::brownian(2);
        let g = sample_levy(&model, 0.01, 30.0, 5.0, 21).unwrap();
        let xi = dvector![3.0, 3.0];
        let p = granger_path(&k, &s, &g, &xi).unwrap();
        for (x, z) in p.x.iter().zip(&p.z) {
            assert!((x[1] - (3.0 + z[1])).abs() < 1e-8);
        }
    }

    #[test]
    fn invalid_xi_is_rejected() {
        let (_, s, k) = setup(dmatrix![-1.0, 1.0; 0.0, 0.0], 0.01, 30.0);
        let model = LevyModel::<f64>::brownian(2);
        let g = sample_levy(&model, 0.01, 30.0, 1.0, 2).unwrap();
        assert!(matches!(
            granger_path(&k, &s, &g, &dvector![1.0, 0.0]),
            Err(Error::Xi(_))
        ));
    }

    #[test]
    fn insufficient_burn_in_is_rejected() {
        let (_, s, k) = setup(dmatrix![-1.0, 1.0; 0.0, 0.0], 0.01, 30.0);
        let model = LevyModel::<f64>::brownian(2);
        let g = sample_levy(&model, 0.01, 5.0, 1.0, 2).unwrap();
        assert!(matches!(
            granger_path(&k, &s, &g, &dvector![0.0, 0.0]),
            Err(Error::Window(_))
        ));
    }

    #[test]
    fn xi_shift_moves_path_exactly() {
        let (_, s, k) = setup(dmatrix![-1.0, 1.0; 0.0, 0.0], 0.01, 30.0);
        let model = LevyModel::<f64>::brownian(2);
        let g = sample_levy(&model, 0.01, 30.0, 5.0, 5).unwrap();
        let p0 = granger_path(&k, &s, &g, &dvector![0.0, 0.0]).unwrap();
        let p1 = granger_path(&k, &s, &g, &dvector![3.0, 3.0]).unwrap();
        for (a, b) in p0.x.iter().zip(&p1.x) {
            assert_eq!(a[0] + 3.0, b[0]);
            assert_eq!(a[1] + 3.0, b[1]);
        }
    }

    #[test]
    fn path_is_linear_in_the_increments() {
        let (_, s, k) = setup(Mat::identity(2, 2) * -1.0, 0.01, 25.0);
        let model = LevyModel::<f64>::brownian(2);
        let ga = sample_levy(&model, 0.01, 25.0, 3.0, 1).unwrap();
        let gb = sample_levy(&model, 0.01, 25.0, 3.0, 2).unwrap();
        let mut gc = ga.clone();
        for (c, (a, b)) in gc
            .increments
            .iter_mut()
            .zip(ga.increments.iter().zip(&gb.increments))
        {
            *c = a * 2.0 + b * 0.5;
        }
        let xi = dvector![0.0, 0.0];
        let pa = granger_path(&k, &s, &ga, &xi).unwrap();
        let pb = granger_path(&k, &s, &gb, &xi).unwrap();
        let pc = granger_path(&k, &s, &gc, &xi).unwrap();
        for j in 0..pc.x.len() {
            let lin = &pa.x[j] * 2.0 + &pb.x[j] * 0.5;
            assert!((&pc.x[j] - lin).abs().max() < 1e-10);
        }
    }

    #[test]
    fn ecf_residual_is_zero_for_zero_measure() {
        let m = SignedMatrixMeasure::<f64>::zero(1);
        let cf = CharacteristicFunction::new(m.clone());
        let s = cointegration_structure(&cf, None).unwrap();
        let k = solve_kernel(&m, &s, 0.01, 0.05).unwrap();
        let model = LevyModel::<f64>::brownian(1);
        let g = sample_levy(&model, 0.01, 0.1, 5.0, 3).unwrap();
        let p = granger_path(&k, &s, &g, &dvector![0.0]).unwrap();
        let r = ecf_residual(&p, &m, 1.0, 4.0).unwrap();
        assert!(r.abs().max() < 1e-12);
    }

    #[test]
    fn ecf_residual_shrinks_with_the_step() {
        let a = dmatrix![-1.0, 1.0; 0.0, 0.0];
        let model = LevyModel::<f64>::brownian(2);
        let fine = sample_levy(&model, 0.01, 26.0, 6.0, 17).unwrap();
        let rms = |g: &IncrementGrid<f64>| {
            let step = g.step;
            let (m, s, k) = setup(a.clone(), step, 25.0);
            let p = granger_path(&k, &s, g, &dvector![0.0, 0.0]).unwrap();
            let pairs = [(0.5, 3.0), (1.0, 5.5), (0.3, 4.8), (2.0, 6.0), (0.0, 2.5)];
            let mut acc = 0.0;
            for (sv, tv) in pairs {
                let r = ecf_residual(&p, &m, sv, tv).unwrap();
                acc += r.norm_squared();
            }
            (acc / pairs.len() as f64).sqrt()
        };
        let r1 = rms(&fine.coarsen(2).unwrap());
        let r2 = rms(&fine);
        assert!(r2 < 0.75 * r1, "r1 {r1:.4e} r2 {r2:.4e}");
    }

    #[test]
    fn variance_grows_linearly_for_random_walk() {
        let m = SignedMatrixMeasure::<f64>::zero(1);
        let cf = CharacteristicFunction::new(m.clone());
        let s = cointegration_structure(&cf, None).unwrap();
        let k = solve_kernel(&m, &s, 0.05, 0.1).unwrap();
        let model = LevyModel::<f64>::brownian(1);
        let paths: Vec<SolutionPath<f64>> = (0..300)
            .map(|i| {
                let g = sample_levy(&model, 0.05, 0.2, 20.0, 1000 + i).unwrap();
                granger_path(&k, &s, &g, &dvector![0.0]).unwrap()
            })
            .collect();
        let prof = variance_profile(&paths, &dvector![1.0]).unwrap();
        let slope = ls_slope(&prof);
        assert!((slope - 1.0).abs() < 0.15, "slope {slope:.3}");
    }

    #[test]
    fn stationary_directions_have_bounded_variance() {
        let (_, s, k) = setup(dmatrix![-1.0, 1.0; 0.0, 0.0], 0.02, 30.0);
        let model = LevyModel::<f64>::brownian(2);
        let paths: Vec<SolutionPath<f64>> = (0..200)
            .map(|i| {
                let g = sample_levy(&model, 0.02, 30.0, 20.0, 5000 + i).unwrap();
                granger_path(&k, &s, &g, &dvector![0.0, 0.0]).unwrap()
            })
            .collect();
        let prof = variance_profile(&paths, &dvector![-1.0, 1.0]).unwrap();
        let slope = ls_slope(&prof);
        assert!(slope.abs() < 0.05, "slope {slope:.4}");
        let walk = variance_profile(&paths, &dvector![0.0, 1.0]).unwrap();
        let ws = ls_slope(&walk);
        assert!((ws - 1.0).abs() < 0.2, "walk slope {ws:.3}");
    }

    #[test]
    fn pi0_x_is_stationary_across_windows() {
        let (_, s, k) = setup(dmatrix![-1.0, 1.0; 0.0, 0.0], 0.02, 30.0);
        let model = LevyModel::<f64>::brownian(2);
        let g = sample_levy(&model, 0.02, 30.0, 400.0, 77).unwrap();
        let p = granger_path(&k, &s, &g, &dvector![0.0, 0.0]).unwrap();
        // gamma^T X with gamma in the row space of Pi0
        let gamma = dvector![-1.0, 1.0];
        let from = p.times.iter().position(|&t| t >= 0.0).unwrap();
        let vals: Vec<f64> = p.x[from..].iter().map(|x| gamma.dot(x)).collect();
        let q = vals.len() / 4;
        let stats: Vec<(f64, f64)> = (0..4)
            .map(|w| {
                let win = &vals[w * q..(w + 1) * q];
                let mean = win.iter().sum::<f64>() / q as f64;
                let var = win.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / q as f64;
                (mean, var)
            })
            .collect();
        // effective sample size ~ T_window / mixing time (mixing ~ 1)
        let se = (stats.iter().map(|s| s.1).sum::<f64>() / 4.0 / (q as f64 * 0.02)).sqrt();
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!(
                    (stats[i].0 - stats[j].0).abs() <= 4.0 * se,
                    "means {:?}",
                    stats
                );
                let rel = (stats[i].1 - stats[j].1).abs() / stats[i].1;
                assert!(rel <= 0.3, "variances {:?}", stats);
            }
        }
    }

    #[test]
    fn decimated_path_agrees_with_full_path() {
        let (_, s, k) = setup(dmatrix![-1.0, 1.0; 0.0, 0.0], 0.01, 30.0);
        let model = LevyModel::<f64>::brownian(2);
        let g = sample_levy(&model, 0.01, 30.0, 5.0, 4).unwrap();
        let xi = dvector![0.0, 0.0];
        let full = granger_path(&k, &s, &g, &xi).unwrap();
        let times = [0.0, 1.0, 2.5, 5.0];
        let dec = granger_path_at(&k, &s, &g, &xi, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let j = full.times.iter().position(|&v| (v - t).abs() < 1e-9).unwrap();
            assert_eq!(full.x[j], dec.x[i]);
        }
    }
}

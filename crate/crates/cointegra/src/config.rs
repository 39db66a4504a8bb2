//! JSON configuration schemas and CSV artifact writers.
//!
//! All numeric CSV output uses 17 significant digits so that re-running a
//! command with the same config and seed is byte-identical.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelGrid;
use crate::levy::SolutionPath;
use crate::linalg::{Mat, Vect};
use crate::mcarma::McarmaSpec;
use crate::measure::{Density, SignedMatrixMeasure};
use crate::var::{VarGrangerRep, VarSpec};

pub type Matrix = Vec<Vec<f64>>;

fn to_mat(m: &Matrix, dim: usize, what: &str) -> Result<Mat<f64>> {
    if m.len() != dim || m.iter().any(|r| r.len() != dim) {
        return Err(Error::Config(format!(
            "field '{what}': expected a {dim}x{dim} matrix"
        )));
    }
    Ok(Mat::from_fn(dim, dim, |i, j| m[i][j]))
}

fn mat_to_rows(m: &Mat<f64>) -> Matrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// One atom of a signed matrix measure: weight `a` at location `t ≥ 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub t: f64,
    #[serde(rename = "A")]
    pub a: Matrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityConfig {
    None,
    Matexp {
        h: Matrix,
        f: Matrix,
        g: Matrix,
    },
    Sampled {
        step: f64,
        values: Vec<Matrix>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub dim: usize,
    #[serde(default)]
    pub atoms: Vec<AtomConfig>,
    #[serde(default)]
    pub density: Option<DensityConfig>,
    #[serde(default)]
    pub decay_rate: Option<f64>,
}

impl MeasureConfig {
    pub fn build(&self) -> Result<SignedMatrixMeasure<f64>> {
        let dim = self.dim;
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (i, at) in self.atoms.iter().enumerate() {
            atoms.push((at.t, to_mat(&at.a, dim, &format!("atoms[{i}].A"))?));
        }
        let density = match &self.density {
            None | Some(DensityConfig::None) => Density::None,
            Some(DensityConfig::Matexp { h, f, g }) => {
                let fm = {
                    let rows = f.len();
                    if rows == 0 || f.iter().any(|r| r.len() != rows) {
                        return Err(Error::Config("field 'density.f': must be square".into()));
                    }
                    Mat::from_fn(rows, rows, |i, j| f[i][j])
                };
                let m = fm.nrows();
                let hm = {
                    if h.len() != dim || h.iter().any(|r| r.len() != m) {
                        return Err(Error::Config(format!(
                            "field 'density.h': expected {dim}x{m}"
                        )));
                    }
                    Mat::from_fn(dim, m, |i, j| h[i][j])
                };
                let gm = {
                    if g.len() != m || g.iter().any(|r| r.len() != dim) {
                        return Err(Error::Config(format!(
                            "field 'density.g': expected {m}x{dim}"
                        )));
                    }
                    Mat::from_fn(m, dim, |i, j| g[i][j])
                };
                Density::MatrixExponential {
                    h: hm,
                    f: fm,
                    g: gm,
                }
            }
            Some(DensityConfig::Sampled { step, values }) => {
                let mut vs = Vec::with_capacity(values.len());
                for (i, v) in values.iter().enumerate() {
                    vs.push(to_mat(v, dim, &format!("density.values[{i}]"))?);
                }
                Density::Sampled {
                    step: *step,
                    values: vs,
                    tail_k: 0.0,
                    tail_lambda: 1.0,
                }
            }
        };
        SignedMatrixMeasure::new(dim, atoms, density, self.decay_rate)
    }

    /// Emits a config reproducing the given measure (used by the MCARMA
    /// bridge artifact).
    pub fn from_measure(m: &SignedMatrixMeasure<f64>) -> Self {
        let atoms = m
            .atoms()
            .iter()
            .map(|(t, a)| AtomConfig {
                t: *t,
                a: mat_to_rows(a),
            })
            .collect();
        let density = match m.density() {
            Density::None => None,
            Density::MatrixExponential { h, f, g } => Some(DensityConfig::Matexp {
                h: mat_to_rows(h),
                f: mat_to_rows(f),
                g: mat_to_rows(g),
            }),
            Density::Sampled { step, values, .. } => Some(DensityConfig::Sampled {
                step: *step,
                values: values.iter().map(mat_to_rows).collect(),
            }),
        };
        MeasureConfig {
            dim: m.dim(),
            atoms,
            density,
            decay_rate: Some(m.decay_rate()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McarmaConfig {
    pub dim: usize,
    pub p: usize,
    #[serde(rename = "P")]
    pub p_coeffs: Vec<Matrix>,
    #[serde(rename = "Q")]
    pub q_coeffs: Vec<Matrix>,
}

impl McarmaConfig {
    pub fn build(&self) -> Result<McarmaSpec<f64>> {
        if self.p_coeffs.len() != self.p {
            return Err(Error::Config(format!(
                "field 'P': expected {} matrices, got {}",
                self.p,
                self.p_coeffs.len()
            )));
        }
        if self.q_coeffs.len() + 1 != self.p {
            return Err(Error::Config(format!(
                "field 'Q': expected {} matrices, got {}",
                self.p - 1,
                self.q_coeffs.len()
            )));
        }
        let ps = self
            .p_coeffs
            .iter()
            .enumerate()
            .map(|(i, m)| to_mat(m, self.dim, &format!("P[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let qs = self
            .q_coeffs
            .iter()
            .enumerate()
            .map(|(i, m)| to_mat(m, self.dim, &format!("Q[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        McarmaSpec::new(self.dim, ps, qs)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarConfig {
    pub dim: usize,
    pub p: usize,
    #[serde(rename = "Gamma")]
    pub gammas: Vec<Matrix>,
    #[serde(rename = "Sigma_eps")]
    pub sigma_eps: Matrix,
}

impl VarConfig {
    pub fn build(&self) -> Result<VarSpec<f64>> {
        if self.gammas.len() != self.p {
            return Err(Error::Config(format!(
                "field 'Gamma': expected {} matrices, got {}",
                self.p,
                self.gammas.len()
            )));
        }
        let gs = self
            .gammas
            .iter()
            .enumerate()
            .map(|(i, m)| to_mat(m, self.dim, &format!("Gamma[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let sig = to_mat(&self.sigma_eps, self.dim, "Sigma_eps")?;
        VarSpec::new(self.dim, gs, sig)
    }
}

/// The model a run operates on: exactly one of the three kinds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub measure: Option<MeasureConfig>,
    #[serde(default)]
    pub mcarma: Option<McarmaConfig>,
    #[serde(default)]
    pub var: Option<VarConfig>,
}

/// Top-level run configuration shared by all subcommands; each subcommand
/// validates the presence of the fields it needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub paths: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub xi: Option<Vec<f64>>,
    /// Variance-profile directions, one vector per row.
    #[serde(default)]
    pub directions: Option<Vec<Vec<f64>>>,
    /// Laplace sample points as [re, im] pairs.
    #[serde(default)]
    pub z_samples: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub lag_cap: Option<usize>,
    #[serde(default)]
    pub report: Option<String>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn require<T: Clone>(&self, field: Option<&T>, name: &str) -> Result<T> {
        field
            .cloned()
            .ok_or_else(|| Error::Config(format!("missing required field '{name}'")))
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// "t, Ctilde_11..Ctilde_nn, C_11..C_nn, f_11..f_nn" (row-major entries).
pub fn write_kernel_csv<W: Write>(w: &mut W, grid: &KernelGrid<f64>) -> Result<()> {
    let n = grid.c_tilde[0].nrows();
    let mut header = vec!["t".to_string()];
    for name in ["Ctilde", "C", "f"] {
        for i in 1..=n {
            for j in 1..=n {
                header.push(format!("{name}_{i}{j}"));
            }
        }
    }
    writeln!(w, "{}", header.join(", "))?;
    for k in 0..grid.c_tilde.len() {
        let mut row = vec![fmt(grid.step * k as f64)];
        for m in [&grid.c_tilde[k], &grid.c[k], &grid.f[k]] {
            for i in 0..n {
                for j in 0..n {
                    row.push(fmt(m[(i, j)]));
                }
            }
        }
        writeln!(w, "{}", row.join(", "))?;
    }
    Ok(())
}

/// "path_id, t, X_1..X_n".
pub fn write_paths_csv<W: Write>(w: &mut W, paths: &[SolutionPath<f64>]) -> Result<()> {
    let n = paths
        .first()
        .map(|p| p.xi.nrows())
        .ok_or_else(|| Error::Precondition("no paths to write".into()))?;
    let mut header = vec!["path_id".to_string(), "t".to_string()];
    for i in 1..=n {
        header.push(format!("X_{i}"));
    }
    writeln!(w, "{}", header.join(", "))?;
    for (id, p) in paths.iter().enumerate() {
        for (k, &t) in p.times.iter().enumerate() {
            let mut row = vec![id.to_string(), fmt(t)];
            for i in 0..n {
                row.push(fmt(p.x[k][i]));
            }
            writeln!(w, "{}", row.join(", "))?;
        }
    }
    Ok(())
}

/// "t, direction_label, variance".
pub fn write_variance_csv<W: Write>(
    w: &mut W,
    profiles: &[(String, Vec<(f64, f64)>)],
) -> Result<()> {
    writeln!(w, "t, direction_label, variance")?;
    for (label, prof) in profiles {
        for &(t, v) in prof {
            writeln!(w, "{}, {label}, {}", fmt(t), fmt(v))?;
        }
    }
    Ok(())
}

/// "j, C_11..C_nn" with row j = −1 holding C₀.
pub fn write_granger_csv<W: Write>(w: &mut W, rep: &VarGrangerRep<f64>) -> Result<()> {
    let n = rep.c0.nrows();
    let mut header = vec!["j".to_string()];
    for i in 1..=n {
        for j in 1..=n {
            header.push(format!("C_{i}{j}"));
        }
    }
    writeln!(w, "{}", header.join(", "))?;
    let emit = |w: &mut W, idx: i64, m: &Mat<f64>| -> Result<()> {
        let mut row = vec![idx.to_string()];
        for i in 0..n {
            for j in 0..n {
                row.push(fmt(m[(i, j)]));
            }
        }
        writeln!(w, "{}", row.join(", "))?;
        Ok(())
    };
    emit(w, -1, &rep.c0)?;
    for (j, c) in rep.c_coeffs.iter().enumerate() {
        emit(w, j as i64, c)?;
    }
    Ok(())
}

pub fn parse_xi(xi: &[f64]) -> Vect<f64> {
    Vect::from_column_slice(xi)
}

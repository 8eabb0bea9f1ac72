//! Dense real symmetric matrices: storage, spectral decomposition, PSD
//! projection, norms, and seeded random PSD sampling.
//!
//! Storage is full dense n x n. All constructors symmetrize their input as
//! `(M + M^T)/2` and reject non-finite entries, so downstream numerical
//! kernels never see NaN or infinity.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding;

/// Iteration cap handed to the symmetric eigensolver and the SVD.
const EIG_MAX_SWEEPS: usize = 5_000;

/// A dense real symmetric n x n matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

/// Eigendecomposition `M = U diag(lambda) U^T` with eigenvalues sorted
/// non-increasing and orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

/// Wire format for matrix literals: row-major full storage.
#[derive(Debug, Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

fn check_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Parse(format!("{what} contains non-finite entries")))
    }
}

/// `(M + M^T)/2`, containing floating-point asymmetry drift.
pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

impl SymMatrix {
    /// Wraps a square matrix, symmetrizing it as `(M + M^T)/2`.
    pub fn from_dense(raw: DMatrix<f64>) -> Result<Self> {
        if raw.nrows() != raw.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                raw.nrows(),
                raw.ncols()
            )));
        }
        if raw.nrows() == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        check_finite(&raw, "matrix")?;
        Ok(Self {
            data: symmetrize(&raw),
        })
    }

    /// Builds from row-major nested arrays.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {} rows of lengths {:?}",
                n,
                rows.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        Self::from_dense(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be >= 1");
        Self {
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "dimension must be >= 1");
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        assert!(!diag.is_empty(), "dimension must be >= 1");
        Self {
            data: DMatrix::from_diagonal(&DVector::from_row_slice(diag)),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            data: &self.data * alpha,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot combine matrices of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self {
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Frobenius inner product `<A, B> = trace(A B)`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(
                "inner product needs equal dimensions".into(),
            ));
        }
        Ok(self.data.dot(&other.data))
    }

    /// Eigendecomposition with eigenvalues sorted non-increasing.
    ///
    /// Delegates to one fixed dense symmetric eigensolver, so the result is
    /// deterministic for a fixed input. Ties keep the solver's column order.
    pub fn eig(&self) -> Result<SpectralDecomposition> {
        let se = nalgebra::SymmetricEigen::try_new(self.data.clone(), f64::EPSILON, EIG_MAX_SWEEPS)
            .ok_or_else(|| {
                Error::Numerical(format!(
                    "symmetric eigensolver did not converge (dim {}, frob {:.3e}, max |entry| {:.3e})",
                    self.dim(),
                    self.frob_norm(),
                    self.data.amax()
                ))
            })?;
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            se.eigenvalues[j]
                .partial_cmp(&se.eigenvalues[i])
                .unwrap()
                .then(i.cmp(&j))
        });
        let eigenvalues = DVector::from_fn(n, |i, _| se.eigenvalues[order[i]]);
        let eigenvectors = DMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
        Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let dec = self.eig()?;
        Ok(dec.eigenvalues[self.dim() - 1])
    }

    /// Euclidean projection onto the PSD cone: eigenvalues clipped at zero.
    pub fn psd_project(&self) -> Result<SymMatrix> {
        let dec = self.eig()?;
        let n = self.dim();
        let mut acc = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let lambda = dec.eigenvalues[k];
            if lambda > 0.0 {
                let u = dec.eigenvectors.column(k);
                acc.ger(lambda, &u, &u, 1.0);
            }
        }
        Ok(SymMatrix {
            data: symmetrize(&acc),
        })
    }

    /// Serializes as `{"dim": n, "rows": [[...], ...]}`.
    pub fn to_json(&self) -> String {
        let n = self.dim();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| self.data[(i, j)]).collect())
            .collect();
        serde_json::to_string(&MatrixJson { dim: n, rows }).expect("matrix serialization")
    }

    /// Parses and validates a matrix literal; the result is symmetrized.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: MatrixJson = serde_json::from_str(text)?;
        if doc.dim == 0 {
            return Err(Error::Parse("matrix dim must be >= 1".into()));
        }
        if doc.rows.len() != doc.dim {
            return Err(Error::Parse(format!(
                "matrix declares dim {} but has {} rows",
                doc.dim,
                doc.rows.len()
            )));
        }
        if let Some(bad) = doc.rows.iter().find(|r| r.len() != doc.dim) {
            return Err(Error::Parse(format!(
                "matrix row of length {} does not match dim {}",
                bad.len(),
                doc.dim
            )));
        }
        Self::from_rows(&doc.rows)
    }
}

impl SpectralDecomposition {
    /// `U diag(lambda) U^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = &self.eigenvectors * DMatrix::from_diagonal(&self.eigenvalues);
        symmetrize(&(scaled * self.eigenvectors.transpose()))
    }

    /// `|| U^T U - I ||_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.eigenvectors.ncols();
        (self.eigenvectors.transpose() * &self.eigenvectors - DMatrix::<f64>::identity(n, n))
            .norm()
    }
}

/// Frobenius distance `|| M1 - M2 ||_F`.
pub fn frob_dist(m1: &SymMatrix, m2: &SymMatrix) -> Result<f64> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "frob_dist needs equal dimensions, got {} and {}",
            m1.dim(),
            m2.dim()
        )));
    }
    Ok((m1.as_matrix() - m2.as_matrix()).norm())
}

/// A random PSD matrix with unit Frobenius norm, deterministic in `(n, seed)`.
///
/// Sampled as `A0 = Q diag(lambda) Q^T` where Q orthonormalizes a standard
/// Gaussian n x n matrix and the lambda_i are independent uniform on (0, 1],
/// then normalized by `||A0||_F`. The sampler identity is recorded by
/// [`sampler_id`] for experiment provenance.
pub fn random_psd_normalized(n: usize, seed: u64) -> SymMatrix {
    assert!(n >= 1, "dimension must be >= 1");
    let mut rng = seeding::rng_from_seed(seed);
    let gauss = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = gauss.qr().q();
    let lambda = DVector::from_fn(n, |_, _| 1.0 - rng.random::<f64>());
    let a0 = symmetrize(&(&q * DMatrix::from_diagonal(&lambda) * q.transpose()));
    let norm = a0.norm();
    SymMatrix { data: a0 / norm }
}

/// Identifier of the random PSD distribution family used by
/// [`random_psd_normalized`].
pub fn sampler_id() -> String {
    format!("qr-gaussian-uniform-spectrum/{}", seeding::GENERATOR_NAME)
}

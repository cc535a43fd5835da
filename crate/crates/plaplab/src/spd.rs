//! Dense symmetric and symmetric positive-definite matrices at small
//! dimension, with spectral decompositions via cyclic Jacobi rotations.
//!
//! These carry the pointwise values of matrix weights and their logarithms.
//! Everything here is exact linear algebra on `f64`; no tolerance knobs
//! except the Jacobi sweep threshold.

use crate::error::{Error, Result};

/// Relative off-diagonal threshold at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Dense real symmetric matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.a[i * d.len() + i] = v;
        }
        m
    }

    /// Builds from row-major entries, symmetrizing with the transpose.
    /// Fails on non-finite entries or a non-square length.
    pub fn from_entries(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 0.5 * (entries[i * n + j] + entries[j * n + i]);
            }
        }
        Ok(SymMatrix { n, a })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.a
    }

    /// Largest symmetry defect |a_ij - a_ji| before symmetrization; zero here
    /// by construction, kept for raw input checks.
    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let a = self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect();
        SymMatrix { n: self.n, a }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let a = self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect();
        SymMatrix { n: self.n, a }
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix { n: self.n, a: self.a.iter().map(|x| c * x).collect() }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += self.a[i * n + j] * x[j];
            }
            y[i] = s;
        }
        y
    }

    /// Eigenvalues and eigenvectors by cyclic Jacobi rotations. Returns
    /// `(lambda, q)` with `a = q diag(lambda) q^T`; `q` is row-major with
    /// eigenvector `k` in column `k`. Unconditionally convergent for
    /// symmetric input at the small dimensions used here.
    pub fn eigen(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut a = self.a.clone();
        let mut q = SymMatrix::identity(n).a;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off = off.max(a[i * n + j].abs());
                }
            }
            if off <= JACOBI_TOL * scale {
                break;
            }
            for p in 0..n - 1 {
                for r in (p + 1)..n {
                    let apr = a[p * n + r];
                    if apr.abs() <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let app = a[p * n + p];
                    let arr = a[r * n + r];
                    let theta = 0.5 * (arr - app) / apr;
                    let t = if theta.abs() > 1e150 {
                        0.5 / theta
                    } else {
                        let s = theta.signum();
                        s / (theta.abs() + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // rotate rows/cols p and r of a
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akr = a[k * n + r];
                        a[k * n + p] = c * akp - s * akr;
                        a[k * n + r] = s * akp + c * akr;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let ark = a[r * n + k];
                        a[p * n + k] = c * apk - s * ark;
                        a[r * n + k] = s * apk + c * ark;
                    }
                    for k in 0..n {
                        let qkp = q[k * n + p];
                        let qkr = q[k * n + r];
                        q[k * n + p] = c * qkp - s * qkr;
                        q[k * n + r] = s * qkp + c * qkr;
                    }
                }
            }
        }
        let lambda = (0..n).map(|i| a[i * n + i]).collect();
        (lambda, q)
    }

    /// Spectral norm: max |eigenvalue| for symmetric matrices.
    pub fn spectral_norm(&self) -> f64 {
        let (l, _) = self.eigen();
        l.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Applies `f` to the eigenvalues, reassembling `q f(diag) q^T`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.n;
        let (l, q) = self.eigen();
        let fl: Vec<f64> = l.iter().map(|&v| f(v)).collect();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += q[i * n + k] * fl[k] * q[j * n + k];
                }
                out[i * n + j] = s;
            }
        }
        // clean up rounding asymmetry
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (out[i * n + j] + out[j * n + i]);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        SymMatrix { n, a: out }
    }
}

/// Symmetric positive-definite matrix. The constructor enforces symmetry
/// (to `1e-12` relative), finiteness, and a strictly positive spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    m: SymMatrix,
}

impl SpdMatrix {
    pub fn new(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let scale = entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in (i + 1)..n {
                if (entries[i * n + j] - entries[j * n + i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidInput(format!(
                        "asymmetric entries at ({i},{j})"
                    )));
                }
            }
        }
        let m = SymMatrix::from_entries(n, entries)?;
        let (l, _) = m.eigen();
        let min = l.iter().cloned().fold(f64::INFINITY, f64::min);
        if min <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!(
                "smallest eigenvalue {min:.3e}"
            )));
        }
        Ok(SpdMatrix { m })
    }

    pub fn identity(n: usize) -> Self {
        SpdMatrix { m: SymMatrix::identity(n) }
    }

    /// Diagonal SPD matrix; all entries must be positive.
    pub fn from_diag(d: &[f64]) -> Result<Self> {
        if d.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::NotPositiveDefinite("non-positive diagonal".into()));
        }
        Ok(SpdMatrix { m: SymMatrix::diag(d) })
    }

    /// Wraps a symmetric matrix known to be positive definite (e.g. the
    /// output of `matrix_exp`). Debug builds re-check the spectrum.
    pub(crate) fn from_sym_unchecked(m: SymMatrix) -> Self {
        debug_assert!({
            let (l, _) = m.eigen();
            l.iter().all(|&v| v > 0.0)
        });
        SpdMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m.get(i, j)
    }

    pub fn scale(&self, c: f64) -> Result<SpdMatrix> {
        if !(c > 0.0) {
            return Err(Error::NotPositiveDefinite("non-positive scale".into()));
        }
        Ok(SpdMatrix { m: self.m.scale(c) })
    }

    /// Spectral norm; for SPD matrices this is the largest eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        let (l, _) = self.m.eigen();
        l.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (l, _) = self.m.eigen();
        l.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn inverse(&self) -> SpdMatrix {
        SpdMatrix { m: self.m.map_eigenvalues(|l| 1.0 / l) }
    }

    /// |M| * |M^-1|, the spectral condition number.
    pub fn condition(&self) -> f64 {
        let (l, _) = self.m.eigen();
        let max = l.iter().cloned().fold(0.0, f64::max);
        let min = l.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn square(&self) -> SpdMatrix {
        SpdMatrix { m: self.m.map_eigenvalues(|l| l * l) }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.m.matvec(x)
    }
}

/// Matrix exponential of a symmetric matrix via spectral decomposition.
/// The result is always positive definite.
pub fn matrix_exp(s: &SymMatrix) -> SpdMatrix {
    SpdMatrix::from_sym_unchecked(s.map_eigenvalues(f64::exp))
}

/// Matrix logarithm of an SPD matrix via spectral decomposition; unique
/// symmetric inverse of `matrix_exp`.
pub fn matrix_log(m: &SpdMatrix) -> SymMatrix {
    m.m.map_eigenvalues(f64::ln)
}

/// Matrix logarithm for raw symmetric input; fails when any eigenvalue
/// is non-positive.
pub fn matrix_log_checked(m: &SymMatrix) -> Result<SymMatrix> {
    let (l, _) = m.eigen();
    let min = l.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite(format!(
            "matrix_log needs a positive spectrum, smallest eigenvalue {min:.3e}"
        )));
    }
    Ok(m.map_eigenvalues(f64::ln))
}

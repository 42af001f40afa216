//! Generic solver for the intertwining relation `H† P = P H`.
//!
//! The relation is linear in `P`. Under column stacking it becomes
//! `(I ⊗ H†) − (Hᵀ ⊗ I)` acting on `vec(P)`, and the null space of that
//! `N² × N²` operator holds every intertwiner. Dense SVD keeps this practical
//! only up to `N ≈ 60`.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{Complex64, Meta, MatrixJson, SquareMatrix};
use crate::spectral::SpectrumReport;

/// Singular values at or below `rank_tol * σ_max` count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.positive, self.negative, self.zero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudometricBasis {
    /// Symmetric, Frobenius-orthonormal intertwiners.
    pub solutions: Vec<SquareMatrix>,
    pub residuals: Vec<f64>,
    pub inertias: Vec<Inertia>,
    pub rank_tol: f64,
    /// Dimension of the full (not necessarily symmetric) null space.
    pub kernel_dimension: usize,
    /// Smallest retained singular value over the largest discarded one.
    /// Infinite when the discarded values are exactly zero.
    pub gap_ratio: f64,
}

impl PseudometricBasis {
    /// `‖P − Π P‖_F / ‖P‖_F` where `Π` projects onto the span of the basis.
    pub fn projection_residual(&self, p: &SquareMatrix) -> Result<f64> {
        let p = p.real()?;
        let norm = p.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let mut rest = p.clone();
        for s in &self.solutions {
            let s = s.real()?;
            if s.nrows() != p.nrows() {
                return Err(Error::DimensionMismatch { left: s.nrows(), right: p.nrows() });
            }
            let coeff = s.dot(p);
            rest -= s * coeff;
        }
        Ok(rest.norm() / norm)
    }

    pub fn to_json(&self) -> Vec<BasisElementJson> {
        self.solutions
            .iter()
            .zip(&self.residuals)
            .zip(&self.inertias)
            .map(|((s, &residual), &inertia)| BasisElementJson {
                matrix: s.to_json(Meta::default()),
                residual,
                inertia: inertia.as_tuple(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisElementJson {
    #[serde(flatten)]
    pub matrix: MatrixJson,
    pub residual: f64,
    pub inertia: (usize, usize, usize),
}

/// Matrix of `P ↦ H†P − PH` on column-stacked `vec(P)`.
pub fn dieudonne_operator(h: &SquareMatrix) -> SquareMatrix {
    match h.real() {
        Ok(re) => SquareMatrix::from(real_operator(re)),
        Err(_) => {
            let hc = h.to_complex();
            let n = hc.nrows();
            let eye = DMatrix::<Complex64>::identity(n, n);
            let op = eye.kronecker(&hc.adjoint()) - hc.transpose().kronecker(&eye);
            SquareMatrix::from_complex(op).expect("finite operator")
        }
    }
}

fn real_operator(h: &DMatrix<f64>) -> DMatrix<f64> {
    let n = h.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let ht = h.transpose();
    eye.kronecker(&ht) - ht.kronecker(&eye)
}

/// Orthonormal basis of the symmetric solutions of `HᵀP = PH`.
pub fn kernel_basis(h: &SquareMatrix, rank_tol: f64) -> Result<PseudometricBasis> {
    if !(rank_tol > 0.0) {
        return Err(Error::InvalidParameter(format!("rank_tol must be positive, got {rank_tol}")));
    }
    let hr = h.real()?;
    let n = hr.nrows();
    let op = real_operator(hr);
    // U is not needed, but skipping it leaves the null-space rows of V only
    // loosely orthonormal (~1e-6) when several singular values vanish
    let svd = SVD::try_new(op, true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::NoConvergence(format!("SVD of the {0}x{0} intertwining operator", n * n)))?;
    let v_t = svd.v_t.as_ref().expect("requested V");
    let sv = &svd.singular_values;
    let sigma_max = sv.max();
    let cutoff = rank_tol * sigma_max;

    let null: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= cutoff).collect();
    let kept_min = (0..sv.len()).filter(|&i| sv[i] > cutoff).map(|i| sv[i]).fold(f64::INFINITY, f64::min);
    let null_max = null.iter().map(|&i| sv[i]).fold(0.0, f64::max);
    let gap_ratio = if null.is_empty() {
        f64::NAN
    } else if null_max == 0.0 {
        f64::INFINITY
    } else {
        kept_min / null_max
    };

    // the null space is closed under transposition, so the symmetric parts
    // of its basis vectors span exactly the symmetric intertwiners
    let mut sym = DMatrix::<f64>::zeros(n * n, null.len());
    for (col, &row) in null.iter().enumerate() {
        let p = DMatrix::from_iterator(n, n, v_t.row(row).iter().copied());
        let s = (&p + p.transpose()) * 0.5;
        sym.column_mut(col).copy_from_slice(s.as_slice());
    }

    // orthonormalize through the small Gram matrix of the symmetric parts;
    // its eigenvalues sit near 1 (symmetric directions) or near 0
    let mut solutions = Vec::new();
    if !null.is_empty() {
        let gram = sym.transpose() * &sym;
        let eig = SymmetricEigen::new(gram);
        let mut order: Vec<usize> = (0..null.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        for i in order {
            if eig.eigenvalues[i] > rank_tol {
                let col = &sym * eig.eigenvectors.column(i);
                let b = DMatrix::from_column_slice(n, n, col.as_slice());
                let b = (&b + b.transpose()) * 0.5;
                let b = &b / b.norm();
                solutions.push(SquareMatrix::from(b));
            }
        }
    }

    let residuals = solutions.iter().map(|s| residual(h, s)).collect::<Result<Vec<_>>>()?;
    let inertias = solutions.iter().map(|s| inertia(s, rank_tol)).collect::<Result<Vec<_>>>()?;

    Ok(PseudometricBasis { solutions, residuals, inertias, rank_tol, kernel_dimension: null.len(), gap_ratio })
}

/// `Σ multiplicity²` over eigenvalue clusters: the intertwiner count for a
/// diagonalizable matrix with real spectrum.
pub fn predicted_kernel_dimension(s: &SpectrumReport) -> Result<usize> {
    if !s.all_real {
        return Err(Error::ComplexSpectrum { max_abs_imag: s.max_abs_imag() });
    }
    Ok(s.clusters.iter().map(|c| c.count * c.count).sum())
}

/// `‖H†P − PH‖_F / (‖H‖_F ‖P‖_F)`, zero when `P = 0`.
pub fn residual(h: &SquareMatrix, p: &SquareMatrix) -> Result<f64> {
    if h.n() != p.n() {
        return Err(Error::DimensionMismatch { left: h.n(), right: p.n() });
    }
    let denom = h.frobenius_norm() * p.frobenius_norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    let num = match (h.real(), p.real()) {
        (Ok(h), Ok(p)) => (h.transpose() * p - p * h).norm(),
        _ => {
            let (h, p) = (h.to_complex(), p.to_complex());
            (h.adjoint() * &p - &p * h).norm()
        }
    };
    Ok(num / denom)
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn symmetric_eigenvalues(m: &DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let scale = m.amax().max(1.0);
    let defect = max_asymmetry(m);
    if defect > tol * scale {
        return Err(Error::NotSymmetric { defect, tol: tol * scale });
    }
    let sym = (m + m.transpose()) * 0.5;
    Ok(SymmetricEigen::new(sym).eigenvalues.iter().copied().collect())
}

/// Counts of eigenvalues above `tol`, below `-tol`, and in between.
pub fn inertia(p: &SquareMatrix, tol: f64) -> Result<Inertia> {
    let values = symmetric_eigenvalues(p.real()?, tol)?;
    let positive = values.iter().filter(|&&v| v > tol).count();
    let negative = values.iter().filter(|&&v| v < -tol).count();
    Ok(Inertia { positive, negative, zero: values.len() - positive - negative })
}

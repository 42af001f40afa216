//! Closed-form pseudometrics and metrics of the loop Hamiltonian, the
//! one-parameter metric family at `K = 2`, and hermitization through the
//! principal square root of a metric.
//!
//! The Dyson map `Ω` with `Θ = ΩᵀΩ` is not unique: any `UΩ` with orthogonal
//! `U` also works. Only the symmetric positive root is exposed here.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::dieudonne::{max_asymmetry, residual, symmetric_eigenvalues};
use crate::error::{Error, Result};
use crate::matrix::{Meta, MatrixJson, SquareMatrix};
use crate::model::{build_loop_hamiltonian, Couplings, LoopLayout};

/// A metric is positive when its smallest eigenvalue exceeds this times `‖Θ‖₂`.
pub const POSITIVITY_REL_TOL: f64 = 1e-12;

/// Relative asymmetry tolerated before a matrix is rejected as a metric.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Largest intertwining residual [`hermitize`] accepts.
pub const INTERTWINING_LIMIT: f64 = 1e-8;

fn require_nonsingular(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} is not finite")));
    }
    if 1.0 + v == 0.0 {
        return Err(Error::SingularCoupling(name));
    }
    Ok(())
}

/// Indefinite symmetric solution of `HᵀP = PH` for the `L = 1` loop.
///
/// Normalized so that the off-diagonal loop entry equals 2. Non-zero entries
/// (one-based): `P[K+1,K+2] = P[K+2,K+1] = 2`, `P[K+1,K+1] = P[K+2,K+2] = g+h`,
/// `P[2..=K] = (2+g−h−hg−g²)/(1+g)`, `P[K+3..=2K+1] = (2+h−g−gh−h²)/(1+h)`,
/// and the two wedge endpoints scaled by `(1−z)/(1+z)`.
pub fn closed_form_pseudometric(k: usize, c: &Couplings) -> Result<SquareMatrix> {
    let layout = LoopLayout::new(k, 1)?;
    require_nonsingular("g", c.g)?;
    require_nonsingular("h", c.h)?;
    require_nonsingular("z", c.z)?;
    let (g, h, z) = (c.g, c.h, c.z);
    let n = layout.dimension();
    let left = (2.0 + g - h - h * g - g * g) / (1.0 + g);
    let right = (2.0 + h - g - g * h - h * h) / (1.0 + h);
    let ratio = (1.0 - z) / (1.0 + z);

    let mut p = DMatrix::zeros(n, n);
    p[(k, k + 1)] = 2.0;
    p[(k + 1, k)] = 2.0;
    p[(k, k)] = g + h;
    p[(k + 1, k + 1)] = g + h;
    for i in 1..k {
        p[(i, i)] = left;
    }
    for i in k + 2..2 * k + 1 {
        p[(i, i)] = right;
    }
    p[(0, 0)] = ratio * left;
    p[(n - 1, n - 1)] = ratio * right;
    SquareMatrix::from_real(p)
}

/// Diagonal metric of the balanced Hamiltonian `H(g, g; z)`.
///
/// Wedge interiors and hubs carry `1−g`, the `2L` loop points `1+g`, and the
/// two wedge endpoints `(1−z)(1−g)/(1+z)`. Overall scale is fixed by these
/// entries.
pub fn diagonal_metric(k: usize, l: usize, g: f64, z: f64) -> Result<SquareMatrix> {
    let layout = LoopLayout::new(k, l)?;
    require_nonsingular("g", g)?;
    require_nonsingular("z", z)?;
    let n = layout.dimension();
    let mut d = vec![1.0 - g; n];
    for v in &mut d[k..k + 2 * l] {
        *v = 1.0 + g;
    }
    let end = (1.0 - z) * (1.0 - g) / (1.0 + z);
    d[0] = end;
    d[n - 1] = end;
    SquareMatrix::from_diagonal(&d)
}

/// The `K = 2`, `L = 1` diagonal metric in its unsimplified rational form
/// `(1 + g − (1+g)g) / (1+g)`; algebraically equal to [`diagonal_metric`].
pub fn diagonal_metric_k2_raw(g: f64, z: f64) -> Result<SquareMatrix> {
    require_nonsingular("g", g)?;
    require_nonsingular("z", z)?;
    let num = 1.0 + g - (1.0 + g) * g;
    let wedge = num / (1.0 + g);
    let end = num * (1.0 - z) / ((1.0 + g) * (1.0 + z));
    SquareMatrix::from_diagonal(&[end, wedge, 1.0 + g, 1.0 + g, wedge, end])
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricResult {
    pub theta: SquareMatrix,
    pub positive_definite: bool,
    pub min_eigenvalue: f64,
    pub alpha: Option<f64>,
}

impl MetricResult {
    pub fn evaluate(theta: SquareMatrix, alpha: Option<f64>) -> Result<Self> {
        let (positive_definite, min_eigenvalue) = is_positive_definite(&theta, SYMMETRY_TOL)?;
        Ok(Self { theta, positive_definite, min_eigenvalue, alpha })
    }

    pub fn to_json(&self, meta: Meta) -> MetricJson {
        MetricJson {
            matrix: self.theta.to_json(meta),
            positive_definite: self.positive_definite,
            min_eigenvalue: self.min_eigenvalue,
            alpha: self.alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricJson {
    #[serde(flatten)]
    pub matrix: MatrixJson,
    pub positive_definite: bool,
    pub min_eigenvalue: f64,
    pub alpha: Option<f64>,
}

/// `Θ(α) = Θ_diag + α P` for the balanced `K = 2` loop.
pub fn theta_family_k2(g: f64, z: f64, alpha: f64) -> Result<MetricResult> {
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha is not finite".into()));
    }
    let diag = diagonal_metric_k2_raw(g, z)?.into_real()?;
    let p = closed_form_pseudometric(2, &Couplings::balanced(g, z))?.into_real()?;
    MetricResult::evaluate(SquareMatrix::from_real(diag + p * alpha)?, Some(alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaInterval {
    pub lo: f64,
    /// `+∞` when `unbounded`.
    pub hi: f64,
    pub unbounded: bool,
}

impl AlphaInterval {
    pub fn contains(&self, alpha: f64) -> bool {
        alpha > self.lo && alpha < self.hi
    }
}

/// Open interval of `α` for which `Θ(α)` is positive definite:
/// `(−1/2, (1+g) / (2(1−g)))`.
pub fn alpha_interval(g: f64) -> Result<AlphaInterval> {
    if !g.is_finite() || g.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!("alpha interval needs |g| < 1, got {g}")));
    }
    let gap = 1.0 - g;
    if gap <= f64::EPSILON {
        return Ok(AlphaInterval { lo: -0.5, hi: f64::INFINITY, unbounded: true });
    }
    Ok(AlphaInterval { lo: -0.5, hi: (1.0 + g) / (2.0 * gap), unbounded: false })
}

/// Positivity verdict and smallest eigenvalue of the symmetrized matrix.
/// `tol` bounds the allowed asymmetry relative to the largest entry.
pub fn is_positive_definite(m: &SquareMatrix, tol: f64) -> Result<(bool, f64)> {
    let values = symmetric_eigenvalues(m.real()?, tol)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let norm = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok((min > POSITIVITY_REL_TOL * norm, min))
}

/// Symmetric positive-definite square root of `theta`.
pub fn dyson_map(theta: &SquareMatrix) -> Result<SquareMatrix> {
    let (root, _) = principal_roots(theta)?;
    Ok(root)
}

/// `(Θ^{1/2}, Θ^{-1/2})` from one eigendecomposition.
fn principal_roots(theta: &SquareMatrix) -> Result<(SquareMatrix, SquareMatrix)> {
    let t = theta.real()?;
    let scale = t.amax().max(1.0);
    let defect = max_asymmetry(t);
    if defect > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { defect, tol: SYMMETRY_TOL * scale });
    }
    let eig = SymmetricEigen::new((t + t.transpose()) * 0.5);
    let min = eig.eigenvalues.min();
    let norm = eig.eigenvalues.amax();
    if !(min > POSITIVITY_REL_TOL * norm) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let v = &eig.eigenvectors;
    let build = |f: fn(f64) -> f64| {
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
        let m = v * d * v.transpose();
        (&m + m.transpose()) * 0.5
    };
    Ok((SquareMatrix::from_real(build(f64::sqrt))?, SquareMatrix::from_real(build(|x| 1.0 / x.sqrt()))?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DysonPair {
    pub omega: SquareMatrix,
    /// `Ω H Ω⁻¹`.
    pub hermitized: SquareMatrix,
}

/// Map `H` to its Hermitian image `Ω H Ω⁻¹` with `Ω = Θ^{1/2}`.
///
/// Refuses a `theta` that is not positive definite or that does not
/// intertwine `H` to within [`INTERTWINING_LIMIT`].
pub fn hermitize(h: &SquareMatrix, theta: &SquareMatrix) -> Result<DysonPair> {
    let hr = h.real()?;
    if h.n() != theta.n() {
        return Err(Error::DimensionMismatch { left: h.n(), right: theta.n() });
    }
    let (omega, omega_inv) = principal_roots(theta)?;
    let res = residual(h, theta)?;
    if res > INTERTWINING_LIMIT {
        return Err(Error::NotIntertwining { residual: res, limit: INTERTWINING_LIMIT });
    }
    let hermitized = omega.real()? * hr * omega_inv.real()?;
    Ok(DysonPair { omega, hermitized: SquareMatrix::from_real(hermitized)? })
}

/// `‖M − M†‖_F / max(1, ‖M‖_F)`.
pub fn hermiticity_defect(m: &SquareMatrix) -> f64 {
    let diff = match m.real() {
        Ok(r) => (r - r.transpose()).norm(),
        Err(_) => {
            let c = m.to_complex();
            (&c - c.adjoint()).norm()
        }
    };
    diff / m.frobenius_norm().max(1.0)
}

/// Balanced loop Hamiltonian together with its diagonal metric.
pub fn balanced_pair(k: usize, l: usize, g: f64, z: f64) -> Result<(SquareMatrix, SquareMatrix)> {
    let h = build_loop_hamiltonian(k, l, &Couplings::balanced(g, z))?;
    Ok((h, diagonal_metric(k, l, g, z)?))
}

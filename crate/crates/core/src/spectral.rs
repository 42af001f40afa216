//! Eigenvalues, reality classification and the closed-form `K = 2` spectrum.

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{Complex64, SquareMatrix};
use crate::model::Couplings;

/// Relative tolerance for calling a spectrum real.
pub const DEFAULT_REALITY_TOL: f64 = 1e-9;

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub value: Complex64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub all_real: bool,
    pub tol: f64,
    pub clusters: Vec<Cluster>,
}

impl SpectrumReport {
    pub fn from_values(mut eigenvalues: Vec<Complex64>, tol: f64) -> Self {
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let scale = eigenvalues.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let max_imag = eigenvalues.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        let all_real = max_imag <= tol * scale;

        // clusters are matched against every existing centre so that values
        // interleaved by the lexicographic sort still merge
        let mut sums: Vec<(Complex64, Complex64, usize)> = Vec::new();
        for &v in &eigenvalues {
            let thresh = tol * v.norm().max(1.0);
            match sums.iter_mut().find(|(first, _, _)| (v - *first).norm() <= thresh) {
                Some((_, sum, count)) => {
                    *sum += v;
                    *count += 1;
                }
                None => sums.push((v, v, 1)),
            }
        }
        let clusters = sums
            .into_iter()
            .map(|(_, sum, count)| Cluster { value: sum / count as f64, count })
            .collect();

        Self { eigenvalues, all_real, tol, clusters }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> SpectrumJson {
        SpectrumJson {
            eigenvalues: self.eigenvalues.iter().map(|v| [v.re, v.im]).collect(),
            all_real: self.all_real,
            tol: self.tol,
            clusters: self.clusters.iter().map(|c| (c.value.re, c.value.im, c.count)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumJson {
    pub eigenvalues: Vec<[f64; 2]>,
    pub all_real: bool,
    pub tol: f64,
    pub clusters: Vec<(f64, f64, usize)>,
}

pub fn eigenvalues(m: &SquareMatrix) -> Result<SpectrumReport> {
    eigenvalues_with_tol(m, DEFAULT_REALITY_TOL)
}

pub fn eigenvalues_with_tol(m: &SquareMatrix, tol: f64) -> Result<SpectrumReport> {
    let values = raw_eigenvalues(m)?;
    Ok(SpectrumReport::from_values(values, tol))
}

/// Unsorted eigenvalues via a Schur decomposition.
pub(crate) fn raw_eigenvalues(m: &SquareMatrix) -> Result<Vec<Complex64>> {
    let fail = || Error::NoConvergence(format!("{n}x{n} matrix", n = m.n()));
    if let Ok(re) = m.real() {
        let schur = Schur::try_new(re.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or_else(fail)?;
        let (_, t) = schur.unpack();
        let values = quasi_triangular_eigenvalues(&t);
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(fail());
        }
        Ok(values)
    } else {
        let schur = Schur::try_new(m.to_complex(), f64::EPSILON, SCHUR_MAX_ITER).ok_or_else(fail)?;
        let (_, t) = schur.unpack();
        Ok(t.diagonal().iter().copied().collect())
    }
}

/// Eigenvalues of a real quasi-upper-triangular Schur factor. A 2x2 block may
/// hold a near-degenerate real pair, not only a complex one.
fn quasi_triangular_eigenvalues(t: &DMatrix<f64>) -> Vec<Complex64> {
    let n = t.nrows();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 == n || t[(i + 1, i)] == 0.0 {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
            continue;
        }
        let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
        let mean = 0.5 * (a + d);
        let half_diff = 0.5 * (a - d);
        let discr = half_diff * half_diff + b * c;
        if discr >= 0.0 {
            let r = discr.sqrt();
            out.push(Complex64::new(mean + r, 0.0));
            out.push(Complex64::new(mean - r, 0.0));
        } else {
            let r = (-discr).sqrt();
            out.push(Complex64::new(mean, r));
            out.push(Complex64::new(mean, -r));
        }
        i += 2;
    }
    out
}

/// `{2, 2, 5/2 ± ½√(21 − 16γ² − 4z²), 5/2 ± ½√(5 − 16δ² − 4z²)}`.
pub fn closed_form_spectrum_k2(c: &Couplings) -> SpectrumReport {
    closed_form_spectrum_k2_with_tol(c, DEFAULT_REALITY_TOL)
}

pub fn closed_form_spectrum_k2_with_tol(c: &Couplings, tol: f64) -> SpectrumReport {
    let (gamma, delta, z) = (c.gamma(), c.delta(), c.z);
    let outer = Complex64::new(21.0 - 16.0 * gamma * gamma - 4.0 * z * z, 0.0).sqrt() * 0.5;
    let inner = Complex64::new(5.0 - 16.0 * delta * delta - 4.0 * z * z, 0.0).sqrt() * 0.5;
    let mid = Complex64::new(2.5, 0.0);
    let two = Complex64::new(2.0, 0.0);
    SpectrumReport::from_values(vec![two, two, mid - outer, mid + outer, mid - inner, mid + inner], tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchReport {
    /// Largest pairwise distance under the best one-to-one pairing.
    pub distance: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compare two spectra under the optimal (bottleneck) pairing.
///
/// The lexicographic order alone is not enough: a conjugate pair whose real
/// parts differ by rounding can swap places between two otherwise equal
/// spectra.
pub fn spectra_match(a: &SpectrumReport, b: &SpectrumReport, tol: f64) -> Result<MatchReport> {
    let distance = bottleneck_distance(&a.eigenvalues, &b.eigenvalues)?;
    Ok(MatchReport { distance, tol, pass: distance < tol })
}

pub fn bottleneck_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    let n = a.len();
    if n == 0 {
        return Ok(0.0);
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();

    // the sorted pairing is usually optimal already; use it as an upper bound
    let sorted_bound = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let mut candidates: Vec<f64> = cost.iter().flatten().copied().filter(|&c| c <= sorted_bound).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(&cost, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

/// Kuhn's augmenting-path bipartite matching on edges with cost <= `limit`.
fn has_perfect_matching(cost: &[Vec<f64>], limit: f64) -> bool {
    let n = cost.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];

    fn augment(u: usize, cost: &[Vec<f64>], limit: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for v in 0..cost.len() {
            if cost[u][v] <= limit && !seen[v] {
                seen[v] = true;
                if owner[v].is_none_or(|w| augment(w, cost, limit, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }

    (0..n).all(|u| {
        let mut seen = vec![false; n];
        augment(u, cost, limit, &mut seen, &mut owner)
    })
}

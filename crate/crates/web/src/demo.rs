//! Plain-Rust computations behind the browser demo. Everything returns flat
//! `f64` buffers so the JavaScript side can draw straight from them.

use qgraph::metric::{alpha_interval, theta_family_k2};
use qgraph::model::{build_loop_hamiltonian, Couplings};
use qgraph::scan::{scan_reality_domain, Param, ScanRequest};
use qgraph::spectral::eigenvalues;

pub const MAX_MAP_STEPS: usize = 400;
pub const MAX_CURVE_STEPS: usize = 4000;

/// Eigenvalues of the loop Hamiltonian as `[re0, im0, re1, im1, ...]`,
/// sorted by real part.
pub fn loop_spectrum(k: usize, l: usize, g: f64, h: f64, z: f64) -> Result<Vec<f64>, String> {
    let m = build_loop_hamiltonian(k, l, &Couplings::new(g, h, z)).map_err(|e| e.to_string())?;
    let s = eigenvalues(&m).map_err(|e| e.to_string())?;
    Ok(s.eigenvalues.iter().flat_map(|c| [c.re, c.im]).collect())
}

/// Largest |Im λ| over a `steps x steps` grid of `(gamma, delta)` in
/// `[-extent, extent]^2` at fixed `z`. Row-major with delta on rows (top row is
/// `delta = extent`) and gamma on columns; zero marks a real spectrum.
pub fn reality_map(k: usize, l: usize, z: f64, extent: f64, steps: usize) -> Result<Vec<f64>, String> {
    if !(2..=MAX_MAP_STEPS).contains(&steps) {
        return Err(format!("steps must lie in 2..={MAX_MAP_STEPS}"));
    }
    if !(extent.is_finite() && extent > 0.0) {
        return Err("extent must be positive".into());
    }
    let req = ScanRequest::new(k, l)
        .axis(Param::Delta, extent, -extent, steps)
        .axis(Param::Gamma, -extent, extent, steps)
        .fixed(Param::Z, z);
    let scan = scan_reality_domain(&req).map_err(|e| e.to_string())?;
    Ok(scan.points.iter().map(|p| if p.all_real { 0.0 } else { p.max_abs_imag }).collect())
}

/// Smallest eigenvalue of the K = 2 family `Θ(α)` for `steps` values of α
/// spread evenly over `[alpha_min, alpha_max]`.
pub fn alpha_curve(g: f64, z: f64, alpha_min: f64, alpha_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if !(2..=MAX_CURVE_STEPS).contains(&steps) {
        return Err(format!("steps must lie in 2..={MAX_CURVE_STEPS}"));
    }
    if !(alpha_min.is_finite() && alpha_max.is_finite() && alpha_min < alpha_max) {
        return Err("need finite alpha_min < alpha_max".into());
    }
    (0..steps)
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            let alpha = alpha_min * (1.0 - t) + alpha_max * t;
            theta_family_k2(g, z, alpha).map(|r| r.min_eigenvalue).map_err(|e| e.to_string())
        })
        .collect()
}

/// `[lo, hi]` of the positivity interval in α; `hi` is infinite when it has
/// no upper end.
pub fn alpha_bounds(g: f64) -> Result<Vec<f64>, String> {
    let i = alpha_interval(g).map_err(|e| e.to_string())?;
    Ok(vec![i.lo, if i.unbounded { f64::INFINITY } else { i.hi }])
}

//! Self-contained consistency checks behind `qgraph verify`.
//!
//! Every check samples from a seeded ChaCha stream, so repeated runs with the
//! same seed print identical lines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dieudonne::{inertia, kernel_basis, predicted_kernel_dimension, residual, DEFAULT_RANK_TOL};
use crate::error::Result;
use crate::metric::{
    alpha_interval, balanced_pair, closed_form_pseudometric, hermiticity_defect, hermitize, is_positive_definite,
    theta_family_k2, SYMMETRY_TOL,
};
use crate::model::{build_loop_hamiltonian, Couplings};
use crate::scan::{boundary_bisect, spectrum_is_real, Param, Ray};
use crate::spectral::{closed_form_spectrum_k2, eigenvalues, spectra_match, DEFAULT_REALITY_TOL};

pub const DEFAULT_SEED: u64 = 20_110_421;
pub const SAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: String) -> Self {
        Self { name: name.into(), pass, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn sample(rng: &mut ChaCha8Rng) -> Couplings {
    Couplings::new(rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9))
}

fn grid(lo: f64, hi: f64, steps: usize) -> impl Iterator<Item = f64> + Clone {
    (0..steps).map(move |i| {
        let t = i as f64 / (steps - 1) as f64;
        lo * (1.0 - t) + hi * t
    })
}

pub fn run_all(k_max: usize, seed: u64) -> Result<Vec<Check>> {
    let k_max = k_max.max(2);
    let mut out = vec![spectrum_formula(seed)?];
    out.extend(pseudometric_checks(k_max, seed)?);
    out.extend(diagonal_metric_checks(k_max, seed)?);
    out.push(alpha_endpoints()?);
    out.push(boundary()?);
    out.push(reality_from_metric(k_max)?);
    out.push(kernel_completeness(k_max.min(4), seed)?);
    Ok(out)
}

pub fn spectrum_formula(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let c = sample(&mut rng);
        let numeric = eigenvalues(&build_loop_hamiltonian(2, 1, &c)?)?;
        worst = worst.max(spectra_match(&numeric, &closed_form_spectrum_k2(&c), 1e-10)?.distance);
    }
    Ok(Check::new("spectrum-k2-closed-form", worst < 1e-10, format!("max pairing distance {worst:.3e} over {SAMPLES} samples")))
}

pub fn pseudometric_checks(k_max: usize, seed: u64) -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    let mut positive_found = 0;
    for k in 2..=k_max {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ k as u64);
        for _ in 0..SAMPLES {
            let c = sample(&mut rng);
            let h = build_loop_hamiltonian(k, 1, &c)?;
            let p = closed_form_pseudometric(k, &c)?;
            worst = worst.max(residual(&h, &p)?);
            if inertia(&p, 1e-12)?.negative == 0 {
                positive_found += 1;
            }
        }
    }
    Ok(vec![
        Check::new("pseudometric-residual", worst < 1e-12, format!("max relative residual {worst:.3e}, K = 2..={k_max}")),
        Check::new("pseudometric-indefinite", positive_found == 0, format!("{positive_found} samples without a negative eigenvalue")),
    ])
}

pub fn diagonal_metric_checks(k_max: usize, seed: u64) -> Result<Vec<Check>> {
    let mut worst_res: f64 = 0.0;
    let mut worst_defect: f64 = 0.0;
    let mut worst_spec: f64 = 0.0;
    for k in 2..=k_max {
        for l in 1..=3 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((k as u64) << 8) ^ l as u64);
            for _ in 0..SAMPLES {
                let (g, z) = (rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9));
                let (h, theta) = balanced_pair(k, l, g, z)?;
                worst_res = worst_res.max(residual(&h, &theta)?);
                let pair = hermitize(&h, &theta)?;
                worst_defect = worst_defect.max(hermiticity_defect(&pair.hermitized));
                let m = spectra_match(&eigenvalues(&h)?, &eigenvalues(&pair.hermitized)?, 1e-10)?;
                worst_spec = worst_spec.max(m.distance);
            }
        }
    }
    let mut not_positive = 0;
    for g in grid(-0.99, 0.99, 21) {
        for z in grid(-0.99, 0.99, 21) {
            let (_, theta) = balanced_pair(2, 1, g, z)?;
            if !is_positive_definite(&theta, SYMMETRY_TOL)?.0 {
                not_positive += 1;
            }
        }
    }
    Ok(vec![
        Check::new("diagonal-metric-residual", worst_res < 1e-12, format!("max relative residual {worst_res:.3e}, K = 2..={k_max}, L = 1..=3")),
        Check::new("diagonal-metric-positive", not_positive == 0, format!("{not_positive} non-positive points on the 21x21 (g, z) grid")),
        Check::new(
            "hermitization",
            worst_defect < 1e-10 && worst_spec < 1e-10,
            format!("max hermiticity defect {worst_defect:.3e}, max spectrum distance {worst_spec:.3e}"),
        ),
    ])
}

/// Bisect the positivity of `Θ(α)` on `[inside, outside]`.
pub fn bisect_alpha(g: f64, z: f64, mut inside: f64, mut outside: f64, tol: f64) -> Result<f64> {
    while (outside - inside).abs() > tol {
        let mid = 0.5 * (inside + outside);
        if theta_family_k2(g, z, mid)?.positive_definite {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

pub fn alpha_endpoints() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for g in [-0.8, -0.4, 0.0, 0.4, 0.8] {
        let interval = alpha_interval(g)?;
        for z in [-0.8, 0.0, 0.8] {
            let lo = bisect_alpha(g, z, 0.0, interval.lo - 1.0, 1e-10)?;
            let hi = bisect_alpha(g, z, 0.0, interval.hi + 1.0, 1e-10)?;
            worst = worst.max((lo - interval.lo).abs()).max((hi - interval.hi).abs());
        }
    }
    Ok(Check::new("alpha-interval", worst < 1e-6, format!("max endpoint error {worst:.3e}")))
}

pub fn boundary() -> Result<Check> {
    let gamma = boundary_bisect(2, 1, &Ray::along(Param::Gamma, Couplings::default(), 3.0), 1e-9)?;
    let delta = boundary_bisect(2, 1, &Ray::along(Param::Delta, Couplings::default(), 3.0), 1e-9)?;
    let eg = (gamma - 21f64.sqrt() / 4.0).abs();
    let ed = (delta - 5f64.sqrt() / 4.0).abs();
    Ok(Check::new(
        "exceptional-point-boundary",
        eg < 1e-6 && ed < 1e-6,
        format!("gamma_max = {gamma:.9} (err {eg:.1e}), delta_max = {delta:.9} (err {ed:.1e})"),
    ))
}

pub fn reality_from_metric(k_max: usize) -> Result<Check> {
    let mut counterexamples = 0;
    let mut positive = 0;
    for k in 2..=k_max {
        for g in grid(-0.99, 0.99, 31) {
            for z in grid(-0.99, 0.99, 31) {
                let (_, theta) = balanced_pair(k, 1, g, z)?;
                if is_positive_definite(&theta, SYMMETRY_TOL)?.0 {
                    positive += 1;
                    if !spectrum_is_real(k, 1, &Couplings::balanced(g, z), DEFAULT_REALITY_TOL)? {
                        counterexamples += 1;
                    }
                }
            }
        }
    }
    Ok(Check::new(
        "metric-implies-real-spectrum",
        counterexamples == 0,
        format!("{counterexamples} counterexamples among {positive} positive-metric points"),
    ))
}

pub fn kernel_completeness(k_max: usize, seed: u64) -> Result<Check> {
    let mut mismatches = 0;
    let mut worst_proj: f64 = 0.0;
    let mut tested = 0;
    for k in 2..=k_max {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let mut taken = 0;
        while taken < 20 {
            let c = sample(&mut rng);
            let h = build_loop_hamiltonian(k, 1, &c)?;
            let spectrum = eigenvalues(&h)?;
            if !spectrum.all_real {
                continue;
            }
            taken += 1;
            tested += 1;
            let basis = kernel_basis(&h, DEFAULT_RANK_TOL)?;
            if basis.kernel_dimension != predicted_kernel_dimension(&spectrum)? {
                mismatches += 1;
            }
            worst_proj = worst_proj.max(basis.projection_residual(&closed_form_pseudometric(k, &c)?)?);
            let (hb, theta) = balanced_pair(k, 1, c.g, c.z)?;
            if eigenvalues(&hb)?.all_real {
                let bb = kernel_basis(&hb, DEFAULT_RANK_TOL)?;
                worst_proj = worst_proj.max(bb.projection_residual(&theta)?);
            }
        }
    }
    Ok(Check::new(
        "kernel-completeness",
        mismatches == 0 && worst_proj < 1e-10,
        format!("{mismatches} dimension mismatches in {tested} samples, max projection residual {worst_proj:.3e}"),
    ))
}

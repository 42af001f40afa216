//! Exit criteria. Every criterion runs even when an earlier one fails; the
//! test prints one PASS/FAIL line each and fails if any line is FAIL.
//!
//! The lines go straight to the process stdout, so they show up without
//! `--nocapture`.

use std::io::Write;
use std::time::Instant;

use qgraph::dieudonne::{inertia, kernel_basis, predicted_kernel_dimension, residual, DEFAULT_RANK_TOL};
use qgraph::metric::{
    alpha_interval, closed_form_pseudometric, diagonal_metric, hermiticity_defect, hermitize, is_positive_definite,
    theta_family_k2, SYMMETRY_TOL,
};
use qgraph::model::{build_loop_hamiltonian, Couplings};
use qgraph::scan::{analytic_domain_k2, boundary_bisect, scan_reality_domain, Param, Ray, ScanRequest};
use qgraph::spectral::{closed_form_spectrum_k2, eigenvalues, spectra_match};
use qgraph::{Result, SquareMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5EED_2011;
const SAMPLES: usize = 200;

const SPECTRUM_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-12;
const BOUNDARY_TOL: f64 = 1e-6;
const ALPHA_TOL: f64 = 1e-6;
const PROJECTION_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
const KNIFE_EDGE: f64 = 1e-6;

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            lo * (1.0 - t) + hi * t
        })
        .collect()
}

fn rng_for(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn cube_sample(rng: &mut ChaCha8Rng) -> Couplings {
    Couplings::new(rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9))
}

/// The seeded `(g, h, z)` samples shared by criteria 2 and 9.
fn pseudometric_samples(k: usize) -> Vec<Couplings> {
    let mut rng = rng_for(100 + k as u64);
    (0..SAMPLES).map(|_| cube_sample(&mut rng)).collect()
}

/// The `(K, L, g, z)` cases shared by criteria 3 and 7: seeded samples plus
/// the 21x21 positivity grid.
fn diagonal_metric_cases() -> Vec<(usize, usize, f64, f64)> {
    let mut cases = Vec::new();
    for k in 2..=6 {
        for l in 1..=3 {
            let mut rng = rng_for(((k as u64) << 8) | l as u64);
            for _ in 0..SAMPLES {
                cases.push((k, l, rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9)));
            }
            for &g in &linspace(-0.99, 0.99, 21) {
                for &z in &linspace(-0.99, 0.99, 21) {
                    cases.push((k, l, g, z));
                }
            }
        }
    }
    cases
}

fn c1_spectrum_formula() -> Result<Outcome> {
    let mut rng = rng_for(1);
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let c = cube_sample(&mut rng);
        let numeric = eigenvalues(&build_loop_hamiltonian(2, 1, &c)?)?;
        worst = worst.max(spectra_match(&numeric, &closed_form_spectrum_k2(&c), SPECTRUM_TOL)?.distance);
    }
    outcome(worst < SPECTRUM_TOL, format!("max pairing distance {worst:.2e} < {SPECTRUM_TOL:.0e} over {SAMPLES} samples"))
}

fn c2_pseudometric_residuals() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in 2..=6 {
        for c in pseudometric_samples(k) {
            let h = build_loop_hamiltonian(k, 1, &c)?;
            worst = worst.max(residual(&h, &closed_form_pseudometric(k, &c)?)?);
        }
    }
    outcome(worst < RESIDUAL_TOL, format!("max relative residual {worst:.2e} < {RESIDUAL_TOL:.0e}, K = 2..6 x {SAMPLES}"))
}

fn c3_diagonal_metric() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut not_positive = 0;
    for (k, l, g, z) in diagonal_metric_cases() {
        let h = build_loop_hamiltonian(k, l, &Couplings::balanced(g, z))?;
        let theta = diagonal_metric(k, l, g, z)?;
        worst = worst.max(residual(&h, &theta)?);
        if !is_positive_definite(&theta, SYMMETRY_TOL)?.0 {
            not_positive += 1;
        }
    }
    outcome(
        worst < RESIDUAL_TOL && not_positive == 0,
        format!("max relative residual {worst:.2e}; {not_positive} non-positive metrics (21x21 grid, K = 2..6, L = 1..3)"),
    )
}

fn c4_boundary() -> Result<Outcome> {
    let gamma = boundary_bisect(2, 1, &Ray::along(Param::Gamma, Couplings::default(), 3.0), 1e-10)?;
    let delta = boundary_bisect(2, 1, &Ray::along(Param::Delta, Couplings::default(), 3.0), 1e-10)?;
    let eg = (gamma - 21f64.sqrt() / 4.0).abs();
    let ed = (delta - 5f64.sqrt() / 4.0).abs();
    outcome(
        eg < BOUNDARY_TOL && ed < BOUNDARY_TOL,
        format!("gamma* = {gamma:.9} (err {eg:.1e}), delta* = {delta:.9} (err {ed:.1e})"),
    )
}

fn bisect_positivity(g: f64, z: f64, mut inside: f64, mut outside: f64) -> Result<f64> {
    while (outside - inside).abs() > 1e-10 {
        let mid = 0.5 * (inside + outside);
        if theta_family_k2(g, z, mid)?.positive_definite {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

fn c5_alpha_interval() -> Result<Outcome> {
    const MARGIN: f64 = 1e-3;
    let mut worst: f64 = 0.0;
    let mut wrong_side = 0;
    for g in [-0.8, -0.4, 0.0, 0.4, 0.8] {
        let expected = (-0.5, (1.0 + g) / (2.0 * (1.0 - g)));
        let reported = alpha_interval(g)?;
        worst = worst.max((reported.lo - expected.0).abs()).max((reported.hi - expected.1).abs());
        for z in [-0.8, 0.0, 0.8] {
            let lo = bisect_positivity(g, z, 0.0, expected.0 - 1.0)?;
            let hi = bisect_positivity(g, z, 0.0, expected.1 + 1.0)?;
            worst = worst.max((lo - expected.0).abs()).max((hi - expected.1).abs());
            for (alpha, inside) in [
                (expected.0 + MARGIN, true),
                (expected.1 - MARGIN, true),
                (expected.0 - MARGIN, false),
                (expected.1 + MARGIN, false),
            ] {
                if theta_family_k2(g, z, alpha)?.positive_definite != inside {
                    wrong_side += 1;
                }
            }
        }
    }
    outcome(
        worst < ALPHA_TOL && wrong_side == 0,
        format!("max endpoint error {worst:.2e} < {ALPHA_TOL:.0e} over 15 (g, z) pairs; {wrong_side} wrong verdicts at margin {MARGIN:.0e}"),
    )
}

fn c6_kernel_completeness() -> Result<Outcome> {
    let mut mismatches = Vec::new();
    let mut worst: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    for k in 2..=4 {
        let mut rng = rng_for(600 + k as u64);
        let mut taken = 0;
        while taken < 20 {
            let c = cube_sample(&mut rng);
            let h = build_loop_hamiltonian(k, 1, &c)?;
            let spectrum = eigenvalues(&h)?;
            let hb = build_loop_hamiltonian(k, 1, &Couplings::balanced(c.g, c.z))?;
            let balanced_spectrum = eigenvalues(&hb)?;
            if !spectrum.all_real || !balanced_spectrum.all_real {
                continue;
            }
            taken += 1;

            let basis = kernel_basis(&h, DEFAULT_RANK_TOL)?;
            let predicted = predicted_kernel_dimension(&spectrum)?;
            if basis.kernel_dimension != predicted || (k == 2 && predicted != 8) {
                mismatches.push((k, basis.kernel_dimension, predicted));
            }
            min_gap = min_gap.min(basis.gap_ratio);
            worst = worst.max(basis.projection_residual(&closed_form_pseudometric(k, &c)?)?);

            let bb = kernel_basis(&hb, DEFAULT_RANK_TOL)?;
            if bb.kernel_dimension != predicted_kernel_dimension(&balanced_spectrum)? {
                mismatches.push((k, bb.kernel_dimension, predicted_kernel_dimension(&balanced_spectrum)?));
            }
            worst = worst.max(bb.projection_residual(&diagonal_metric(k, 1, c.g, c.z)?)?);
        }
    }
    outcome(
        mismatches.is_empty() && worst < PROJECTION_TOL && min_gap > 1e3,
        format!(
            "dimension mismatches {mismatches:?}; max projection residual {worst:.2e} < {PROJECTION_TOL:.0e}; min singular gap {min_gap:.1e}"
        ),
    )
}

fn c7_hermitization() -> Result<Outcome> {
    let mut worst_defect: f64 = 0.0;
    let mut worst_spectrum: f64 = 0.0;
    let cases = diagonal_metric_cases();
    for &(k, l, g, z) in &cases {
        let h = build_loop_hamiltonian(k, l, &Couplings::balanced(g, z))?;
        let pair = hermitize(&h, &diagonal_metric(k, l, g, z)?)?;
        worst_defect = worst_defect.max(hermiticity_defect(&pair.hermitized));
        let m = spectra_match(&eigenvalues(&h)?, &eigenvalues(&pair.hermitized)?, HERMITIAN_TOL)?;
        worst_spectrum = worst_spectrum.max(m.distance);
    }
    outcome(
        worst_defect < HERMITIAN_TOL && worst_spectrum < HERMITIAN_TOL,
        format!("max defect {worst_defect:.2e}, max spectrum distance {worst_spectrum:.2e} over {} cases", cases.len()),
    )
}

fn c8_metric_implies_reality() -> Result<Outcome> {
    let mut positive = 0;
    let mut counterexamples = Vec::new();
    let axis = linspace(-0.99, 0.99, 31);
    for k in 2..=6 {
        for l in 1..=3 {
            for &g in &axis {
                for &z in &axis {
                    let theta = diagonal_metric(k, l, g, z)?;
                    if !is_positive_definite(&theta, SYMMETRY_TOL)?.0 {
                        continue;
                    }
                    positive += 1;
                    let h = build_loop_hamiltonian(k, l, &Couplings::balanced(g, z))?;
                    if !eigenvalues(&h)?.all_real {
                        counterexamples.push((k, l, g, z));
                    }
                }
            }
        }
    }
    outcome(
        counterexamples.is_empty() && positive > 0,
        format!("{} counterexamples among {positive} positive-metric points {:?}", counterexamples.len(), counterexamples),
    )
}

fn c9_indefinite_pseudometric() -> Result<Outcome> {
    let mut definite = 0;
    let mut total = 0;
    for k in 2..=6 {
        for c in pseudometric_samples(k) {
            total += 1;
            if inertia(&closed_form_pseudometric(k, &c)?, 1e-12)?.negative == 0 {
                definite += 1;
            }
        }
    }
    outcome(definite == 0, format!("{definite} of {total} samples without a negative eigenvalue"))
}

fn c10_oracle_agreement() -> Result<Outcome> {
    let req = ScanRequest::new(2, 1)
        .axis(Param::Gamma, -1.3, 1.3, 41)
        .axis(Param::Delta, -1.3, 1.3, 41)
        .axis(Param::Z, -1.3, 1.3, 41);
    let scan = scan_reality_domain(&req)?;
    let mut compared = 0;
    let mut disagreements = 0;
    for p in &scan.points {
        let c = p.couplings;
        let (gamma, delta, z) = (c.gamma(), c.delta(), c.z);
        let r1 = 21.0 - 16.0 * gamma * gamma - 4.0 * z * z;
        let r2 = 5.0 - 16.0 * delta * delta - 4.0 * z * z;
        if r1.abs().min(r2.abs()) <= KNIFE_EDGE {
            continue;
        }
        compared += 1;
        if p.all_real != analytic_domain_k2(&c) {
            disagreements += 1;
        }
    }
    outcome(
        disagreements == 0 && compared > 0,
        format!("{disagreements} disagreements over {compared} of {} grid points", scan.points.len()),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("1 spectrum formula reproduction", c1_spectrum_formula),
        ("2 closed-form pseudometric residuals", c2_pseudometric_residuals),
        ("3 diagonal metric residuals and positivity", c3_diagonal_metric),
        ("4 exceptional-point boundary", c4_boundary),
        ("5 alpha interval", c5_alpha_interval),
        ("6 kernel completeness", c6_kernel_completeness),
        ("7 hermitization", c7_hermitization),
        ("8 positive metric implies real spectrum", c8_metric_implies_reality),
        ("9 pseudometric indefiniteness", c9_indefinite_pseudometric),
        ("10 scan vs analytic domain", c10_oracle_agreement),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let line = format!("{} [{name}] {detail} ({:.2}s)\n", if pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
        if !pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn shared_cases_are_deterministic() {
    assert_eq!(pseudometric_samples(3), pseudometric_samples(3));
    let a: Vec<SquareMatrix> = pseudometric_samples(2).iter().take(3).map(|c| closed_form_pseudometric(2, c).unwrap()).collect();
    let b: Vec<SquareMatrix> = pseudometric_samples(2).iter().take(3).map(|c| closed_form_pseudometric(2, c).unwrap()).collect();
    assert_eq!(a, b);
}

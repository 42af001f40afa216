//! Reality-domain maps over coupling grids and exceptional-point bisection.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{diagonal_metric, is_positive_definite, SYMMETRY_TOL};
use crate::model::{build_loop_hamiltonian, Couplings, LoopLayout};
use crate::spectral::{eigenvalues_with_tol, DEFAULT_REALITY_TOL};

pub const DEFAULT_MAX_POINTS: usize = 2_000_000;

pub const CSV_HEADER: &str = "g,h,z,gamma,delta,all_real,max_abs_imag,metric_positive";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    G,
    H,
    Z,
    Gamma,
    Delta,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::G => "g",
            Param::H => "h",
            Param::Z => "z",
            Param::Gamma => "gamma",
            Param::Delta => "delta",
        }
    }

    fn is_gamma_delta(self) -> bool {
        matches!(self, Param::Gamma | Param::Delta)
    }

    fn is_g_h(self) -> bool {
        matches!(self, Param::G | Param::H)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" => Ok(Param::G),
            "h" => Ok(Param::H),
            "z" => Ok(Param::Z),
            "gamma" => Ok(Param::Gamma),
            "delta" => Ok(Param::Delta),
            _ => Err(Error::InvalidParameter(format!("unknown parameter `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(param: Param, min: f64, max: f64, steps: usize) -> Self {
        Self { param, min, max, steps }
    }

    /// Evenly spaced, endpoints included; a symmetric axis hits 0 exactly
    /// at its midpoint.
    pub fn value(&self, i: usize) -> f64 {
        if self.steps <= 1 {
            return self.min;
        }
        let t = i as f64 / (self.steps - 1) as f64;
        self.min * (1.0 - t) + self.max * t
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `name:min:max:steps`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("axis `{s}` is not name:min:max:steps"));
        let parts: Vec<&str> = s.split(':').collect();
        let [name, min, max, steps] = parts[..] else {
            return Err(bad());
        };
        Ok(Axis {
            param: name.parse()?,
            min: min.parse().map_err(|_| bad())?,
            max: max.parse().map_err(|_| bad())?,
            steps: steps.parse().map_err(|_| bad())?,
        })
    }
}

/// Parse `name=val,name=val`.
pub fn parse_fixed(s: &str) -> Result<Vec<(Param, f64)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (name, val) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("fixed value `{pair}` is not name=val")))?;
            let v = val
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("`{val}` is not a number")))?;
            Ok((name.trim().parse()?, v))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRequest {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub axes: Vec<Axis>,
    pub fixed: Vec<(Param, f64)>,
    pub tol: f64,
    #[serde(skip)]
    pub max_points: usize,
}

impl ScanRequest {
    pub fn new(k: usize, l: usize) -> Self {
        Self { k, l, axes: Vec::new(), fixed: Vec::new(), tol: DEFAULT_REALITY_TOL, max_points: DEFAULT_MAX_POINTS }
    }

    pub fn axis(mut self, param: Param, min: f64, max: f64, steps: usize) -> Self {
        self.axes.push(Axis::new(param, min, max, steps));
        self
    }

    pub fn fixed(mut self, param: Param, value: f64) -> Self {
        self.fixed.push((param, value));
        self
    }

    pub fn grid_size(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }

    pub fn validate(&self) -> Result<()> {
        LoopLayout::new(self.k, self.l)?;
        if self.axes.len() > 3 {
            return Err(Error::InvalidParameter(format!("at most 3 axes, got {}", self.axes.len())));
        }
        let mut seen = Vec::new();
        for a in &self.axes {
            if a.steps == 0 || !a.min.is_finite() || !a.max.is_finite() {
                return Err(Error::InvalidParameter(format!("axis {} needs finite bounds and steps >= 1", a.param)));
            }
            seen.push(a.param);
        }
        for &(p, v) in &self.fixed {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("fixed {p} is not finite")));
            }
            seen.push(p);
        }
        for (i, p) in seen.iter().enumerate() {
            if seen[..i].contains(p) {
                return Err(Error::InvalidParameter(format!("{p} is given more than once")));
            }
        }
        if seen.iter().any(|p| p.is_g_h()) && seen.iter().any(|p| p.is_gamma_delta()) {
            return Err(Error::InvalidParameter("mixing g/h with gamma/delta is ambiguous".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        let points = self.grid_size();
        if points > self.max_points {
            return Err(Error::GridTooLarge { points, cap: self.max_points });
        }
        Ok(())
    }

    /// Couplings at a flat grid index; the first axis varies slowest.
    pub fn couplings_at(&self, mut flat: usize) -> Couplings {
        let mut vals = [0.0; 5];
        let slot = |p: Param| p as usize;
        for &(p, v) in &self.fixed {
            vals[slot(p)] = v;
        }
        for a in self.axes.iter().rev() {
            vals[slot(a.param)] = a.value(flat % a.steps);
            flat /= a.steps;
        }
        let uses_gamma_delta = self.axes.iter().map(|a| a.param).chain(self.fixed.iter().map(|f| f.0)).any(Param::is_gamma_delta);
        let z = vals[slot(Param::Z)];
        if uses_gamma_delta {
            Couplings::from_gamma_delta(vals[slot(Param::Gamma)], vals[slot(Param::Delta)], z)
        } else {
            Couplings::new(vals[slot(Param::G)], vals[slot(Param::H)], z)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub couplings: Couplings,
    pub all_real: bool,
    pub max_abs_imag: f64,
    /// Positivity of the diagonal metric; only evaluated where `g == h`.
    pub metric_positive: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainScan {
    pub request: ScanRequest,
    pub points: Vec<ScanPoint>,
}

impl DomainScan {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for p in &self.points {
            let c = p.couplings;
            let metric = match p.metric_positive {
                Some(true) => "1",
                Some(false) => "0",
                None => "",
            };
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                c.g,
                c.h,
                c.z,
                c.gamma(),
                c.delta(),
                u8::from(p.all_real),
                p.max_abs_imag,
                metric
            )?;
        }
        Ok(())
    }

    pub fn real_count(&self) -> usize {
        self.points.iter().filter(|p| p.all_real).count()
    }
}

/// Evaluate one grid point.
pub fn classify_point(k: usize, l: usize, c: &Couplings, tol: f64) -> Result<ScanPoint> {
    let h = build_loop_hamiltonian(k, l, c)?;
    let spectrum = eigenvalues_with_tol(&h, tol)?;
    let metric_positive = if c.g == c.h {
        match diagonal_metric(k, l, c.g, c.z) {
            Ok(theta) => Some(is_positive_definite(&theta, SYMMETRY_TOL)?.0),
            Err(Error::SingularCoupling(_)) => Some(false),
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(ScanPoint { couplings: *c, all_real: spectrum.all_real, max_abs_imag: spectrum.max_abs_imag(), metric_positive })
}

pub fn scan_reality_domain(req: &ScanRequest) -> Result<DomainScan> {
    req.validate()?;
    let eval = |i: usize| classify_point(req.k, req.l, &req.couplings_at(i), req.tol);
    let n = req.grid_size();

    #[cfg(feature = "parallel")]
    let points = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(eval).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let points = (0..n).map(eval).collect::<Result<Vec<_>>>()?;

    Ok(DomainScan { request: req.clone(), points })
}

/// Smaller of the two `K = 2` radicands `21 − 16γ² − 4z²` and `5 − 16δ² − 4z²`.
pub fn analytic_margin_k2(c: &Couplings) -> f64 {
    let (gamma, delta, z) = (c.gamma(), c.delta(), c.z);
    let outer = 21.0 - 16.0 * gamma * gamma - 4.0 * z * z;
    let inner = 5.0 - 16.0 * delta * delta - 4.0 * z * z;
    outer.min(inner)
}

/// Closed-form reality test for the `K = 2`, `L = 1` loop.
pub fn analytic_domain_k2(c: &Couplings) -> bool {
    analytic_margin_k2(c) >= 0.0
}

/// `origin + t * direction` for `t` in `[0, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Couplings,
    /// Components along `(g, h, z)`.
    pub direction: Couplings,
    pub t_max: f64,
}

impl Ray {
    /// Unit step along one parameter; `gamma` moves `g` and `h` together,
    /// `delta` moves them apart.
    pub fn along(param: Param, origin: Couplings, t_max: f64) -> Self {
        let direction = match param {
            Param::G => Couplings::new(1.0, 0.0, 0.0),
            Param::H => Couplings::new(0.0, 1.0, 0.0),
            Param::Z => Couplings::new(0.0, 0.0, 1.0),
            Param::Gamma => Couplings::new(1.0, 1.0, 0.0),
            Param::Delta => Couplings::new(1.0, -1.0, 0.0),
        };
        Self { origin, direction, t_max }
    }

    pub fn at(&self, t: f64) -> Couplings {
        let (o, d) = (self.origin, self.direction);
        Couplings::new(o.g + t * d.g, o.h + t * d.h, o.z + t * d.z)
    }
}

pub fn spectrum_is_real(k: usize, l: usize, c: &Couplings, tol: f64) -> Result<bool> {
    let h = build_loop_hamiltonian(k, l, c)?;
    Ok(eigenvalues_with_tol(&h, tol)?.all_real)
}

/// Bisect for the ray parameter where the spectrum stops being real.
///
/// Keeps `real(lo) && !real(hi)` and stops once `hi − lo <= tol`.
pub fn boundary_bisect(k: usize, l: usize, ray: &Ray, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(ray.t_max > 0.0) {
        return Err(Error::InvalidParameter("bisection needs tol > 0 and t_max > 0".into()));
    }
    let real = |t: f64| spectrum_is_real(k, l, &ray.at(t), DEFAULT_REALITY_TOL);
    let (mut lo, mut hi) = (0.0, ray.t_max);
    if !real(lo)? || real(hi)? {
        return Err(Error::NoCrossing { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if real(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing_and_values() {
        let a: Axis = "gamma:-1.3:1.3:53".parse().unwrap();
        assert_eq!(a, Axis::new(Param::Gamma, -1.3, 1.3, 53));
        assert_eq!(a.value(0), -1.3);
        assert_eq!(a.value(26), 0.0);
        assert_eq!(a.value(52), 1.3);
        assert!("gamma:1:2".parse::<Axis>().is_err());
        assert!("q:1:2:3".parse::<Axis>().is_err());
        assert_eq!(Axis::new(Param::Z, 0.4, 9.0, 1).value(0), 0.4);
    }

    #[test]
    fn fixed_parsing() {
        assert_eq!(parse_fixed("delta=0,z=0.5").unwrap(), vec![(Param::Delta, 0.0), (Param::Z, 0.5)]);
        assert!(parse_fixed("delta").is_err());
        assert!(parse_fixed("delta=x").is_err());
    }

    #[test]
    fn request_validation() {
        assert!(ScanRequest::new(2, 1).axis(Param::G, 0.0, 1.0, 3).fixed(Param::Gamma, 0.1).validate().is_err());
        assert!(ScanRequest::new(2, 1).axis(Param::G, 0.0, 1.0, 3).fixed(Param::G, 0.1).validate().is_err());
        assert!(ScanRequest::new(1, 1).validate().is_err());
        let big = ScanRequest { max_points: 10, ..ScanRequest::new(2, 1).axis(Param::G, 0.0, 1.0, 11) };
        assert_eq!(big.validate(), Err(Error::GridTooLarge { points: 11, cap: 10 }));
        let four = ScanRequest::new(2, 1)
            .axis(Param::G, 0.0, 1.0, 2)
            .axis(Param::H, 0.0, 1.0, 2)
            .axis(Param::Z, 0.0, 1.0, 2)
            .axis(Param::G, 0.0, 1.0, 2);
        assert!(four.validate().is_err());
    }

    #[test]
    fn grid_order_first_axis_slowest() {
        let req = ScanRequest::new(2, 1).axis(Param::G, 0.0, 1.0, 2).axis(Param::Z, 0.0, 0.5, 3);
        let zs: Vec<f64> = (0..6).map(|i| req.couplings_at(i).z).collect();
        let gs: Vec<f64> = (0..6).map(|i| req.couplings_at(i).g).collect();
        assert_eq!(zs, vec![0.0, 0.25, 0.5, 0.0, 0.25, 0.5]);
        assert_eq!(gs, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn single_free_point_is_real() {
        let scan = scan_reality_domain(&ScanRequest::new(2, 1)).unwrap();
        assert_eq!(scan.points.len(), 1);
        assert!(scan.points[0].all_real);
        assert_eq!(scan.points[0].metric_positive, Some(true));
    }

    #[test]
    fn gamma_axis_flips_at_analytic_bound() {
        let req = ScanRequest::new(2, 1).axis(Param::Gamma, -1.5, 1.5, 61).fixed(Param::Delta, 0.0).fixed(Param::Z, 0.0);
        let scan = scan_reality_domain(&req).unwrap();
        let bound = 21f64.sqrt() / 4.0;
        for p in &scan.points {
            assert_eq!(p.all_real, p.couplings.gamma().abs() <= bound, "gamma = {}", p.couplings.gamma());
        }
    }

    #[test]
    fn delta_axis_flips_at_analytic_bound() {
        let req = ScanRequest::new(2, 1).axis(Param::Delta, -1.0, 1.0, 41);
        let scan = scan_reality_domain(&req).unwrap();
        let bound = 5f64.sqrt() / 4.0;
        for p in &scan.points {
            assert_eq!(p.all_real, p.couplings.delta().abs() <= bound, "delta = {}", p.couplings.delta());
            // g == h only at delta == 0
            assert_eq!(p.metric_positive.is_some(), p.couplings.delta() == 0.0);
        }
    }

    #[test]
    fn analytic_domain_cases() {
        assert!(analytic_domain_k2(&Couplings::default()));
        assert!(!analytic_domain_k2(&Couplings::new(0.0, 0.0, 1.2)));
        let edge = Couplings::from_gamma_delta(21f64.sqrt() / 4.0, 0.0, 0.0);
        assert!(analytic_margin_k2(&edge).abs() < 1e-14);
    }

    #[test]
    fn bisection_along_axes() {
        let ray = Ray::along(Param::Gamma, Couplings::default(), 3.0);
        let t = boundary_bisect(2, 1, &ray, 1e-9).unwrap();
        assert!((t - 21f64.sqrt() / 4.0).abs() < 1e-6);

        let ray = Ray::along(Param::Delta, Couplings::default(), 3.0);
        let t = boundary_bisect(2, 1, &ray, 1e-9).unwrap();
        assert!((t - 5f64.sqrt() / 4.0).abs() < 1e-6);

        let ray = Ray::along(Param::Z, Couplings::default(), 3.0);
        let t = boundary_bisect(2, 1, &ray, 1e-9).unwrap();
        assert!((t - 5f64.sqrt() / 2.0).abs() < 1e-6, "{t}");
    }

    #[test]
    fn bisection_without_crossing() {
        let ray = Ray::along(Param::Gamma, Couplings::default(), 0.5);
        assert!(matches!(boundary_bisect(2, 1, &ray, 1e-9), Err(Error::NoCrossing { .. })));
    }

    #[test]
    fn csv_format() {
        let req = ScanRequest::new(2, 1).axis(Param::Delta, -0.5, 0.5, 3);
        let scan = scan_reality_domain(&req).unwrap();
        let mut out = Vec::new();
        scan.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(','), "{}", lines[1]);
        assert!(lines[2].starts_with("0,0,0,0,0,1,"), "{}", lines[2]);
        assert!(lines[2].ends_with(",1"));
    }
}

//! Lattice families and their Hamiltonian matrices.
//!
//! Loop lattices are indexed as
//! `x_{-K} .. x_{-1}, x_{U_1} .. x_{U_L}, x_{D_1} .. x_{D_L}, x_1 .. x_K`,
//! so the left hub `x_{-1}` sits at zero-based index `K - 1` and the right
//! hub `x_1` at `K + 2L`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphSpec {
    Chain {
        n_points: usize,
    },
    Star {
        q: usize,
        arm_len: usize,
    },
    Loop {
        #[serde(rename = "K")]
        k: usize,
        #[serde(rename = "L")]
        l: usize,
    },
}

impl GraphSpec {
    pub fn dimension(&self) -> usize {
        match *self {
            GraphSpec::Chain { n_points } => n_points,
            GraphSpec::Star { q, arm_len } => q * arm_len + 1,
            GraphSpec::Loop { k, l } => 2 * k + 2 * l,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphSpec::Chain { n_points } if n_points < 1 => Err(Error::Size("chain needs n_points >= 1".into())),
            GraphSpec::Star { q, .. } if q < 2 => Err(Error::Size(format!("star needs q >= 2, got {q}"))),
            GraphSpec::Star { arm_len, .. } if arm_len < 1 => {
                Err(Error::Size(format!("star needs arm_len >= 1, got {arm_len}")))
            }
            GraphSpec::Loop { k, .. } if k < 2 => Err(Error::Size(format!("loop needs K >= 2, got {k}"))),
            GraphSpec::Loop { l, .. } if l < 1 => Err(Error::Size(format!("loop needs L >= 1, got {l}"))),
            _ => Ok(()),
        }
    }

    /// Assemble the matrix for this lattice. Chains and stars are free and
    /// ignore the couplings.
    pub fn hamiltonian(&self, c: &Couplings) -> Result<SquareMatrix> {
        match *self {
            GraphSpec::Chain { n_points } => build_free_chain(n_points),
            GraphSpec::Star { q, arm_len } => build_star_lattice(q, arm_len),
            GraphSpec::Loop { k, l } => build_loop_hamiltonian(k, l, c),
        }
    }
}

/// The three non-Hermitian couplings of the loop Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Couplings {
    pub g: f64,
    pub h: f64,
    pub z: f64,
}

impl Couplings {
    pub fn new(g: f64, h: f64, z: f64) -> Self {
        Self { g, h, z }
    }

    /// `g = gamma + delta`, `h = gamma - delta`.
    pub fn from_gamma_delta(gamma: f64, delta: f64, z: f64) -> Self {
        Self { g: gamma + delta, h: gamma - delta, z }
    }

    /// The `g = h` subfamily.
    pub fn balanced(g: f64, z: f64) -> Self {
        Self { g, h: g, z }
    }

    pub fn gamma(&self) -> f64 {
        0.5 * (self.g + self.h)
    }

    pub fn delta(&self) -> f64 {
        0.5 * (self.g - self.h)
    }

    fn named(&self) -> [(Coupling, f64); 3] {
        [(Coupling::G, self.g), (Coupling::H, self.h), (Coupling::Z, self.z)]
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        for (name, v) in self.named() {
            if !v.is_finite() {
                issues.push(CouplingIssue::NonFinite(name));
            } else if 1.0 + v == 0.0 {
                issues.push(CouplingIssue::SingularDenominator(name));
            } else if v.abs() >= 1.0 {
                issues.push(CouplingIssue::OutsidePositivityBox(name));
            }
        }
        ValidationReport { issues }
    }

    pub(crate) fn require_finite(&self) -> Result<()> {
        match self.named().into_iter().find(|(_, v)| !v.is_finite()) {
            Some((name, _)) => Err(Error::InvalidParameter(format!("{name} is not finite"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    G,
    H,
    Z,
}

impl Coupling {
    pub fn name(self) -> &'static str {
        match self {
            Coupling::G => "g",
            Coupling::H => "h",
            Coupling::Z => "z",
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingIssue {
    NonFinite(Coupling),
    /// `1 + c = 0`: a pole of the closed-form metrics.
    SingularDenominator(Coupling),
    /// `|c| >= 1`: positivity of the diagonal metric is no longer guaranteed.
    OutsidePositivityBox(Coupling),
}

impl CouplingIssue {
    pub fn is_error(&self) -> bool {
        !matches!(self, CouplingIssue::OutsidePositivityBox(_))
    }
}

impl fmt::Display for CouplingIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingIssue::NonFinite(c) => write!(f, "{c} is not finite"),
            CouplingIssue::SingularDenominator(c) => write!(f, "singular denominator 1+{c}"),
            CouplingIssue::OutsidePositivityBox(c) => write!(f, "|{c}| >= 1: outside the guaranteed-positivity box"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub issues: Vec<CouplingIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        !self.issues.iter().any(CouplingIssue::is_error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &CouplingIssue> {
        self.issues.iter().filter(|i| i.is_error())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &CouplingIssue> {
        self.issues.iter().filter(|i| !i.is_error())
    }
}

pub fn validate_couplings(c: &Couplings) -> ValidationReport {
    c.validate()
}

/// Dirichlet discrete Laplacian `tridiag(-1, 2, -1)`.
pub fn build_free_chain(n_points: usize) -> Result<SquareMatrix> {
    GraphSpec::Chain { n_points }.validate()?;
    let mut m = DMatrix::from_diagonal_element(n_points, n_points, 2.0);
    for i in 0..n_points - 1 {
        m[(i, i + 1)] = -1.0;
        m[(i + 1, i)] = -1.0;
    }
    SquareMatrix::from_real(m)
}

/// Free Laplacian on a `q`-pointed star.
///
/// The first arm is stored from its tip towards the hub, then the hub, then
/// the remaining arms outward. With `q = 2` this is exactly the free chain of
/// `2 * arm_len + 1` points.
pub fn build_star_lattice(q: usize, arm_len: usize) -> Result<SquareMatrix> {
    let spec = GraphSpec::Star { q, arm_len };
    spec.validate()?;
    let n = spec.dimension();
    let hub = arm_len;
    let mut m = DMatrix::from_diagonal_element(n, n, 2.0);
    m[(hub, hub)] = q.max(2) as f64;

    let mut bond = |a: usize, b: usize| {
        m[(a, b)] = -1.0;
        m[(b, a)] = -1.0;
    };
    // first arm: indices 0..hub, tip at 0
    for i in 0..hub {
        bond(i, i + 1);
    }
    for arm in 1..q {
        let start = hub + 1 + (arm - 1) * arm_len;
        bond(hub, start);
        for i in start..start + arm_len - 1 {
            bond(i, i + 1);
        }
    }
    SquareMatrix::from_real(m)
}

/// Index bookkeeping for the loop lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopLayout {
    pub k: usize,
    pub l: usize,
}

impl LoopLayout {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        GraphSpec::Loop { k, l }.validate()?;
        Ok(Self { k, l })
    }

    pub fn dimension(&self) -> usize {
        2 * self.k + 2 * self.l
    }

    pub fn left_hub(&self) -> usize {
        self.k - 1
    }

    pub fn right_hub(&self) -> usize {
        self.k + 2 * self.l
    }

    /// `x_{U_i}`, `i` in `1..=L`.
    pub fn upper(&self, i: usize) -> usize {
        self.k + i - 1
    }

    /// `x_{D_i}`, `i` in `1..=L`.
    pub fn lower(&self, i: usize) -> usize {
        self.k + self.l + i - 1
    }
}

/// The loop Hamiltonian `H(g, h; z)`.
///
/// Every bond carries `-1` both ways except the two outermost wedge bonds
/// (`-1 -/+ z`, mirrored between wedges) and the four hub-to-loop bonds
/// (`-1 -/+ g`, `-1 -/+ h`). For `L >= 2` the couplings stay on the hub
/// bonds and the interior loop bonds are plain; the reference displays only
/// cover `L = 1`, so this layout is a generalization.
pub fn build_loop_hamiltonian(k: usize, l: usize, c: &Couplings) -> Result<SquareMatrix> {
    let layout = LoopLayout::new(k, l)?;
    c.require_finite()?;
    let n = layout.dimension();
    let (lh, rh) = (layout.left_hub(), layout.right_hub());

    let mut m = DMatrix::from_diagonal_element(n, n, 2.0);
    m[(lh, lh)] = 3.0;
    m[(rh, rh)] = 3.0;

    // (row a, col b) gets `ab`, (row b, col a) gets `ba`
    let mut bond = |a: usize, b: usize, ab: f64, ba: f64| {
        m[(a, b)] = ab;
        m[(b, a)] = ba;
    };
    for i in 0..lh {
        bond(i, i + 1, -1.0, -1.0);
    }
    for i in rh..n - 1 {
        bond(i, i + 1, -1.0, -1.0);
    }
    for i in 1..l {
        bond(layout.upper(i), layout.upper(i + 1), -1.0, -1.0);
        bond(layout.lower(i), layout.lower(i + 1), -1.0, -1.0);
    }

    let (g, h, z) = (c.g, c.h, c.z);
    bond(0, 1, -1.0 - z, -1.0 + z);
    bond(n - 2, n - 1, -1.0 + z, -1.0 - z);

    bond(lh, layout.upper(1), -1.0 - g, -1.0 + g);
    bond(lh, layout.lower(1), -1.0 - h, -1.0 + h);
    bond(layout.upper(l), rh, -1.0 + h, -1.0 - h);
    bond(layout.lower(l), rh, -1.0 + g, -1.0 - g);

    SquareMatrix::from_real(m)
}

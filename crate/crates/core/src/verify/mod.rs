//! Numerical verification of the moment identities, direct estimates and
//! Voronovskaya-type results for the operator families.
//!
//! Every inequality check produces a [`BoundReport`]: LHS and RHS sampled on an
//! x-grid and the worst margin. A check passes when the worst margin is at
//! least `-tolerance`. A negative margin is only a failure when every modulus
//! in the RHS was exact; otherwise the RHS may be underestimated and the report
//! is marked inconclusive.

mod direct;
mod moments;
mod suite;
mod voronovskaya;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::CoefficientScheme;
use crate::corpus::TestFunction;
use crate::error::{Error, Result};
use crate::moduli::{omega1_with, omega2_with, sup_norm, ModuliPolicy, DEFAULT_GRID_POINTS};
use crate::operators::{Family, OperatorId, Operators};

pub use moments::{
    durrmeyer_central_moment, durrmeyer_functional_stats, genuine_functional_stats, sigma_durrmeyer, sigma_from_stats,
    sigma_genuine, FunctionalStats,
};
pub use suite::{SuiteConfig, SuiteReport};
pub use voronovskaya::{fit_rate, voronovskaya_limit, RateReport, UniformConvergence};

/// Margin tolerance of inequality checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Tolerance of the moment identities.
pub const MOMENT_TOLERANCE: f64 = 1e-10;
/// Tolerance of the σ closed forms.
pub const SIGMA_TOLERANCE: f64 = 1e-12;

/// The verified statements.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    B_PALTANEA,
    B_M1_DIRECT,
    B_M1_THM9,
    B_M2_MOMENTS,
    B_M2_DIRECT,
    K_CLASSIC_DIRECT,
    K_M1_DIRECT,
    D_CLASSIC_VORON,
    D_M1_DIRECT,
    U_M1_DIRECT,
    VORON_B_M1,
    VORON_K_M1,
    VORON_D_M1,
    VORON_U_M1,
    DERIV_BOUND_B,
}

impl TheoremId {
    pub const ALL: [TheoremId; 15] = [
        TheoremId::B_PALTANEA,
        TheoremId::B_M1_DIRECT,
        TheoremId::B_M1_THM9,
        TheoremId::B_M2_MOMENTS,
        TheoremId::B_M2_DIRECT,
        TheoremId::K_CLASSIC_DIRECT,
        TheoremId::K_M1_DIRECT,
        TheoremId::D_CLASSIC_VORON,
        TheoremId::D_M1_DIRECT,
        TheoremId::U_M1_DIRECT,
        TheoremId::VORON_B_M1,
        TheoremId::VORON_K_M1,
        TheoremId::VORON_D_M1,
        TheoremId::VORON_U_M1,
        TheoremId::DERIV_BOUND_B,
    ];

    /// Direct (non-asymptotic) estimates, checked by [`Verifier::check_direct`].
    pub const DIRECT: [TheoremId; 10] = [
        TheoremId::B_PALTANEA,
        TheoremId::B_M1_DIRECT,
        TheoremId::B_M1_THM9,
        TheoremId::B_M2_DIRECT,
        TheoremId::K_CLASSIC_DIRECT,
        TheoremId::K_M1_DIRECT,
        TheoremId::D_CLASSIC_VORON,
        TheoremId::D_M1_DIRECT,
        TheoremId::U_M1_DIRECT,
        TheoremId::DERIV_BOUND_B,
    ];

    /// Quantitative Voronovskaya bounds.
    pub const VORONOVSKAYA: [TheoremId; 4] =
        [TheoremId::VORON_B_M1, TheoremId::VORON_K_M1, TheoremId::VORON_D_M1, TheoremId::VORON_U_M1];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::B_PALTANEA => "B_PALTANEA",
            TheoremId::B_M1_DIRECT => "B_M1_DIRECT",
            TheoremId::B_M1_THM9 => "B_M1_THM9",
            TheoremId::B_M2_MOMENTS => "B_M2_MOMENTS",
            TheoremId::B_M2_DIRECT => "B_M2_DIRECT",
            TheoremId::K_CLASSIC_DIRECT => "K_CLASSIC_DIRECT",
            TheoremId::K_M1_DIRECT => "K_M1_DIRECT",
            TheoremId::D_CLASSIC_VORON => "D_CLASSIC_VORON",
            TheoremId::D_M1_DIRECT => "D_M1_DIRECT",
            TheoremId::U_M1_DIRECT => "U_M1_DIRECT",
            TheoremId::VORON_B_M1 => "VORON_B_M1",
            TheoremId::VORON_K_M1 => "VORON_K_M1",
            TheoremId::VORON_D_M1 => "VORON_D_M1",
            TheoremId::VORON_U_M1 => "VORON_U_M1",
            TheoremId::DERIV_BOUND_B => "DERIV_BOUND_B",
        }
    }

    /// Whether the statement involves a coefficient scheme.
    pub fn needs_scheme(self) -> bool {
        matches!(
            self,
            TheoremId::B_M1_DIRECT
                | TheoremId::B_M1_THM9
                | TheoremId::K_M1_DIRECT
                | TheoremId::D_M1_DIRECT
                | TheoremId::U_M1_DIRECT
                | TheoremId::VORON_B_M1
                | TheoremId::VORON_K_M1
                | TheoremId::VORON_D_M1
                | TheoremId::VORON_U_M1
        )
    }

    /// Smallest degree satisfying the hypotheses.
    pub fn min_degree(self) -> u32 {
        match self {
            TheoremId::B_M1_THM9 | TheoremId::B_M2_DIRECT => 3,
            TheoremId::VORON_B_M1 | TheoremId::VORON_K_M1 | TheoremId::VORON_D_M1 | TheoremId::VORON_U_M1 => 3,
            TheoremId::U_M1_DIRECT | TheoremId::B_M2_MOMENTS => 2,
            _ => 1,
        }
    }

    /// Derivatives the statement needs (`f ∈ C^k`).
    pub fn required_smoothness(self) -> usize {
        match self {
            TheoremId::D_CLASSIC_VORON
            | TheoremId::VORON_B_M1
            | TheoremId::VORON_K_M1
            | TheoremId::VORON_D_M1
            | TheoremId::VORON_U_M1 => 2,
            TheoremId::DERIV_BOUND_B => 1,
            _ => 0,
        }
    }

    /// The operator family whose M1 variant a Voronovskaya bound is about.
    pub fn voronovskaya_family(self) -> Option<Family> {
        match self {
            TheoremId::VORON_B_M1 => Some(Family::Bernstein),
            TheoremId::VORON_K_M1 => Some(Family::Kantorovich),
            TheoremId::VORON_D_M1 => Some(Family::Durrmeyer),
            TheoremId::VORON_U_M1 => Some(Family::Genuine),
            _ => None,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        TheoremId::ALL.into_iter().find(|t| t.name() == upper).ok_or_else(|| format!("unknown theorem `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Skipped => "skipped",
        }
    }

    /// Only `Fail` counts against a run.
    pub fn is_hard_failure(self) -> bool {
        self == Status::Fail
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one inequality or identity check on an x-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: TheoremId,
    pub function: String,
    pub n: u32,
    pub scheme: Option<String>,
    pub x_grid: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Pointwise margins; `rhs - lhs` except where a report documents otherwise.
    pub margin: Vec<f64>,
    /// Minimum of `margin`; `None` for skipped checks.
    pub worst_margin: Option<f64>,
    pub moduli_exact: bool,
    pub tolerance: f64,
    pub status: Status,
    pub note: Option<String>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Largest LHS value on the grid.
    pub fn lhs_max(&self) -> f64 {
        self.lhs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn rhs_max(&self) -> f64 {
        self.rhs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    fn skipped(theorem: TheoremId, f: &str, n: u32, scheme: Option<&CoefficientScheme>, reason: String) -> Self {
        Self {
            theorem,
            function: f.to_string(),
            n,
            scheme: scheme.map(|s| s.label().to_string()),
            x_grid: Vec::new(),
            lhs: Vec::new(),
            rhs: Vec::new(),
            margin: Vec::new(),
            worst_margin: None,
            moduli_exact: true,
            tolerance: DEFAULT_TOLERANCE,
            status: Status::Skipped,
            note: Some(reason),
        }
    }
}

/// Shared constructor: computes margins, worst margin and status.
#[allow(clippy::too_many_arguments)]
fn assemble(
    theorem: TheoremId,
    function: &str,
    n: u32,
    scheme: Option<&CoefficientScheme>,
    x_grid: &[f64],
    lhs: Vec<f64>,
    rhs: Vec<f64>,
    margin: Option<Vec<f64>>,
    moduli_exact: bool,
    tolerance: f64,
    note: Option<String>,
) -> Result<BoundReport> {
    let margin = margin.unwrap_or_else(|| rhs.iter().zip(&lhs).map(|(r, l)| r - l).collect());
    if let Some(i) = (0..lhs.len()).find(|&i| !lhs[i].is_finite() || !rhs[i].is_finite()) {
        return Err(Error::NonFinite(format!(
            "{theorem} for {function} at n = {n}, x = {}: lhs = {}, rhs = {}",
            x_grid[i], lhs[i], rhs[i]
        )));
    }
    let worst = margin.iter().cloned().fold(f64::INFINITY, f64::min);
    let status = if worst >= -tolerance {
        Status::Pass
    } else if moduli_exact {
        Status::Fail
    } else {
        Status::Inconclusive
    };
    Ok(BoundReport {
        theorem,
        function: function.to_string(),
        n,
        scheme: scheme.map(|s| s.label().to_string()),
        x_grid: x_grid.to_vec(),
        lhs,
        rhs,
        margin,
        worst_margin: Some(worst),
        moduli_exact,
        tolerance,
        status,
        note,
    })
}

/// Outcome of a Voronovskaya limit check along a sequence of degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub operator: OperatorId,
    pub function: String,
    pub scheme: Option<String>,
    pub x: f64,
    pub n_list: Vec<u32>,
    /// `n [L_n f - f](x) - limit(x)` for each `n`.
    pub scaled_error: Vec<f64>,
    /// Least-squares slope of `log |scaled_error|` against `log n` over the
    /// largest half of `n_list`; `None` when those errors vanish to roundoff.
    pub fitted_rate: Option<f64>,
    pub limit: f64,
    pub limit_formula: String,
}

/// `i / (points - 1)`, `i = 0..points`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

/// Default x-grid resolution of the checks.
pub const DEFAULT_X_POINTS: usize = 101;

/// Runs the checks. Holds the operator evaluator and the moduli policy.
#[derive(Debug)]
pub struct Verifier {
    ops: Operators,
    policy: ModuliPolicy,
    moduli_grid: usize,
}

impl Default for Verifier {
    fn default() -> Self {
        Self::new(Operators::new())
    }
}

impl Verifier {
    pub fn new(ops: Operators) -> Self {
        Self { ops, policy: ModuliPolicy::PreferExact, moduli_grid: DEFAULT_GRID_POINTS }
    }

    pub fn with_policy(mut self, policy: ModuliPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_moduli_grid(mut self, grid_points: usize) -> Self {
        self.moduli_grid = grid_points;
        self
    }

    pub fn operators(&self) -> &Operators {
        &self.ops
    }

    pub fn policy(&self) -> ModuliPolicy {
        self.policy
    }

    fn book<'a>(&self, f: &'a TestFunction) -> ModuliBook<'a> {
        ModuliBook { f, policy: self.policy, grid: self.moduli_grid, exact: true, cache: HashMap::new() }
    }

    /// Dispatches any inequality check: direct estimates and quantitative
    /// Voronovskaya bounds. Moment identities are run by
    /// [`Verifier::check_moment_identities`].
    pub fn check(
        &self,
        theorem: TheoremId,
        f: &TestFunction,
        n: u32,
        scheme: Option<&CoefficientScheme>,
        x_grid: &[f64],
    ) -> Result<BoundReport> {
        if theorem.voronovskaya_family().is_some() {
            let scheme = scheme.ok_or_else(|| Error::InvalidInput(format!("{theorem} needs a coefficient scheme")))?;
            self.check_voronovskaya_quantitative(theorem, f, n, scheme, x_grid)
        } else {
            self.check_direct(theorem, f, n, scheme, x_grid)
        }
    }

    /// Common precondition handling. `Ok(Some(report))` means skipped.
    fn preflight(
        &self,
        theorem: TheoremId,
        f: &TestFunction,
        n: u32,
        scheme: Option<&CoefficientScheme>,
        x_grid: &[f64],
    ) -> Result<Option<BoundReport>> {
        match (theorem.needs_scheme(), scheme) {
            (true, None) => return Err(Error::InvalidInput(format!("{theorem} needs a coefficient scheme"))),
            (false, Some(s)) => {
                return Err(Error::InvalidInput(format!("{theorem} takes no coefficient scheme (got {})", s.label())))
            }
            _ => {}
        }
        if x_grid.is_empty() || x_grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidInput("x-grid must be a non-empty subset of [0, 1]".into()));
        }
        if n < theorem.min_degree() {
            return Ok(Some(BoundReport::skipped(
                theorem,
                f.name(),
                n,
                scheme,
                format!("hypothesis n >= {} not met (n = {n})", theorem.min_degree()),
            )));
        }
        let order = theorem.required_smoothness();
        if order > 0 && (!f.smoothness().is_at_least_c(order) || f.max_derivative() < order) {
            return Ok(Some(BoundReport::skipped(
                theorem,
                f.name(),
                n,
                scheme,
                format!("requires f in C^{order}; `{}` is {:?}", f.name(), f.smoothness()),
            )));
        }
        Ok(None)
    }
}

/// Moduli of `f` and its derivatives for one check; remembers whether every
/// value handed out was exact.
struct ModuliBook<'a> {
    f: &'a TestFunction,
    policy: ModuliPolicy,
    grid: usize,
    exact: bool,
    cache: HashMap<(usize, u8, u64), f64>,
}

impl ModuliBook<'_> {
    fn omega(&mut self, level: usize, order: u8, delta: f64) -> Result<f64> {
        if delta.is_nan() || delta <= 0.0 {
            return Ok(0.0);
        }
        // Steps beyond these admit no further pairs in [0, 1].
        let delta = if order == 1 { delta.min(1.0) } else { delta.min(0.5) };
        let key = (level, order, delta.to_bits());
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let curve = self
            .f
            .derivative(level)
            .ok_or_else(|| Error::DerivativeUnavailable { function: self.f.name().to_string(), order: level })?;
        let est = if order == 1 {
            omega1_with(curve, delta, self.grid, self.policy)?
        } else {
            omega2_with(curve, delta, self.grid, self.policy)?
        };
        self.exact &= !est.lower_bound;
        self.cache.insert(key, est.value);
        Ok(est.value)
    }

    /// `ω1(f^(level); δ)`.
    fn w1(&mut self, level: usize, delta: f64) -> Result<f64> {
        self.omega(level, 1, delta)
    }

    /// `ω2(f^(level); δ)`.
    fn w2(&mut self, level: usize, delta: f64) -> Result<f64> {
        self.omega(level, 2, delta)
    }

    fn sup(&self, level: usize) -> Result<f64> {
        sup_norm(self.f, level)
    }
}

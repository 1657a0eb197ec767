//! The nine operators, their moments and the derivative representations of
//! their images.
//!
//! Every operator has the shape `L_n(f; x) = Σ_k q_{n,k}(x) c_k(f)`, where the
//! basis `q` is classical, M1 or M2, and the functional `c_k` is fixed by the
//! family:
//!
//! | family      | `c_k(f)`                                                      |
//! |-------------|---------------------------------------------------------------|
//! | Bernstein   | `f(k/n)`                                                      |
//! | Kantorovich | `(n+1) ∫_{k/(n+1)}^{(k+1)/(n+1)} f`                           |
//! | Durrmeyer   | `(n+1) ∫_0^1 p_{n,k} f`                                       |
//! | Genuine     | `f(0)` for `k = 0`, `f(1)` for `k = n`, else `(n-1) ∫_0^1 p_{n-2,k-1} f` |
//!
//! An [`Image`] freezes the functionals for one `(operator, f, n)` so the image
//! can be evaluated at many points cheaply.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::basis::{basis_row, basis_row_m1, basis_row_m2, compensated_sum, CoefficientScheme, M2Coefficients};
use crate::corpus::{monomial, TestFunction};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Bernstein,
    Kantorovich,
    Durrmeyer,
    Genuine,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Bernstein, Family::Kantorovich, Family::Durrmeyer, Family::Genuine];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bernstein => "bernstein",
            Family::Kantorovich => "kantorovich",
            Family::Durrmeyer => "durrmeyer",
            Family::Genuine => "genuine",
        }
    }

    /// Smallest admissible degree.
    pub fn min_degree(self) -> u32 {
        match self {
            Family::Genuine => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    Classic,
    M1,
    M2,
}

/// A family together with a basis variant. `M2` exists only for Bernstein.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct OperatorId {
    family: Family,
    variant: Variant,
}

impl OperatorId {
    pub fn new(family: Family, variant: Variant) -> Result<Self> {
        if variant == Variant::M2 && family != Family::Bernstein {
            return Err(Error::InvalidVariant);
        }
        Ok(Self { family, variant })
    }

    pub const fn classic(family: Family) -> Self {
        Self { family, variant: Variant::Classic }
    }

    pub const fn m1(family: Family) -> Self {
        Self { family, variant: Variant::M1 }
    }

    pub const fn bernstein_m2() -> Self {
        Self { family: Family::Bernstein, variant: Variant::M2 }
    }

    pub fn family(self) -> Family {
        self.family
    }

    pub fn variant(self) -> Variant {
        self.variant
    }

    /// The classical operator of the same family.
    pub fn classical(self) -> Self {
        Self::classic(self.family)
    }

    pub fn min_degree(self) -> u32 {
        match self.variant {
            Variant::M2 => 2,
            _ => self.family.min_degree(),
        }
    }

    /// All nine operators.
    pub fn all() -> Vec<Self> {
        let mut ops: Vec<Self> = Family::ALL.iter().flat_map(|&f| [Self::classic(f), Self::m1(f)]).collect();
        ops.push(Self::bernstein_m2());
        ops
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = match self.variant {
            Variant::Classic => "",
            Variant::M1 => "-m1",
            Variant::M2 => "-m2",
        };
        write!(f, "{}{}", self.family.name(), suffix)
    }
}

impl FromStr for OperatorId {
    type Err = String;

    /// Parses `bernstein`, `kantorovich-m1`, `bernstein-m2`, ... (case-insensitive).
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let (family, variant) = match lower.rsplit_once('-') {
            Some((fam, "m1")) => (fam, Variant::M1),
            Some((fam, "m2")) => (fam, Variant::M2),
            Some((fam, "classic")) => (fam, Variant::Classic),
            _ => (lower.as_str(), Variant::Classic),
        };
        let family = Family::ALL
            .into_iter()
            .find(|f| f.name() == family)
            .ok_or_else(|| format!("unknown operator family `{family}`"))?;
        Self::new(family, variant).map_err(|e| e.to_string())
    }
}

impl TryFrom<String> for OperatorId {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<OperatorId> for String {
    fn from(op: OperatorId) -> Self {
        op.to_string()
    }
}

/// Quadrature settings for the integral families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureConfig {
    /// Gauss points per panel; `None` picks `n + 5` (exactness `2n + 9`).
    pub points: Option<usize>,
    /// Equal panels for the inner products over `[0, 1]`.
    pub panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            points: None,
            // the kink of |x - 1/2| sits on a panel boundary
            panels: 2,
        }
    }
}

const MIN_DEFAULT_POINTS: usize = 12;

/// Evaluator holding quadrature settings, a rule cache and the M2 coefficients.
#[derive(Debug, Default)]
pub struct Operators {
    quadrature: QuadratureConfig,
    m2: M2Coefficients,
    rules: Mutex<HashMap<(usize, usize), Arc<QuadratureRule>>>,
}

impl Operators {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_quadrature(mut self, quadrature: QuadratureConfig) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn with_m2(mut self, m2: M2Coefficients) -> Self {
        self.m2 = m2;
        self
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        self.quadrature
    }

    pub fn m2(&self) -> &M2Coefficients {
        &self.m2
    }

    fn points_for(&self, n: u32) -> usize {
        self.quadrature.points.unwrap_or((n as usize + 5).max(MIN_DEFAULT_POINTS))
    }

    fn rule(&self, points: usize, panels: usize) -> Result<Arc<QuadratureRule>> {
        let mut cache = self.rules.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(rule) = cache.get(&(points, panels)) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(QuadratureRule::gauss_legendre(points, panels)?);
        cache.insert((points, panels), Arc::clone(&rule));
        Ok(rule)
    }

    /// Rule for `∫_0^1 p_{m,j} f`; errors if it cannot integrate the basis
    /// polynomial itself exactly.
    fn inner_product_rule(&self, m: u32, n: u32) -> Result<Arc<QuadratureRule>> {
        let rule = self.rule(self.points_for(n), self.quadrature.panels.max(1))?;
        if rule.exactness_degree() < m as usize {
            return Err(Error::QuadratureTooCoarse { exactness: rule.exactness_degree(), required: m as usize });
        }
        Ok(rule)
    }

    /// `∫_0^1 p_{m,j}(t) f(t) dt`.
    pub fn basis_inner_product(&self, m: u32, j: u32, f: &TestFunction) -> Result<f64> {
        if j > m {
            return Err(Error::OutOfRange { what: "basis index j", value: f64::from(j), range: "[0, m]" });
        }
        let rule = self.inner_product_rule(m, m)?;
        Ok(rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .map(|(&t, w)| w * crate::basis::eval_basis(m, i64::from(j), t) * f.eval(t))
            .sum())
    }

    /// All inner products `∫ p_{m,j} f`, `j = 0..=m`, sharing one basis row per node.
    fn inner_products(&self, m: u32, n: u32, f: &TestFunction) -> Result<Vec<f64>> {
        let rule = self.inner_product_rule(m, n)?;
        let mut out = vec![0.0; m as usize + 1];
        for (&t, w) in rule.nodes().iter().zip(rule.weights()) {
            let wf = w * f.eval(t);
            if wf == 0.0 {
                continue;
            }
            for (acc, p) in out.iter_mut().zip(basis_row(m, t)) {
                *acc += wf * p;
            }
        }
        Ok(out)
    }

    /// The functionals `c_0(f), ..., c_n(f)` of the family.
    pub fn functionals(&self, family: Family, f: &TestFunction, n: u32) -> Result<Vec<f64>> {
        if n < family.min_degree() {
            return Err(Error::DegreeTooSmall { what: family.name(), n, min: family.min_degree() });
        }
        let nf = f64::from(n);
        let coeffs = match family {
            Family::Bernstein => (0..=n).map(|k| f.eval(f64::from(k) / nf)).collect(),
            Family::Kantorovich => {
                let points = self.points_for(n);
                let rule = self.rule(points, 1)?;
                let width = 1.0 / (nf + 1.0);
                (0..=n)
                    .map(|k| {
                        let a = f64::from(k) * width;
                        // (n+1) ∫_cell f = mean over the cell
                        rule.integrate(|t| f.eval(a + width * t))
                    })
                    .collect()
            }
            Family::Durrmeyer => self.inner_products(n, n, f)?.into_iter().map(|v| (nf + 1.0) * v).collect(),
            Family::Genuine => {
                let inner = self.inner_products(n - 2, n, f)?;
                let mut c = Vec::with_capacity(n as usize + 1);
                c.push(f.eval(0.0));
                c.extend(inner.into_iter().map(|v| (nf - 1.0) * v));
                c.push(f.eval(1.0));
                c
            }
        };
        Ok(coeffs)
    }

    /// Prepares `L_n f` for evaluation at many points.
    pub fn image(&self, op: OperatorId, f: &TestFunction, n: u32, scheme: Option<&CoefficientScheme>) -> Result<Image> {
        let scheme = match (op.variant, scheme) {
            (Variant::M1, Some(s)) => Some(s.clone()),
            (Variant::M1, None) => return Err(Error::MissingScheme(op)),
            (_, Some(_)) => return Err(Error::UnexpectedScheme(op)),
            (_, None) => None,
        };
        if n < op.min_degree() {
            return Err(Error::DegreeTooSmall {
                what: if op.variant == Variant::M2 { "M2 operator" } else { op.family.name() },
                n,
                min: op.min_degree(),
            });
        }
        let coeffs = self.functionals(op.family, f, n)?;
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("{op} functional of {} at n = {n}: {bad}", f.name())));
        }
        Ok(Image { op, n, coeffs, scheme, m2: if op.variant == Variant::M2 { Some(self.m2.clone()) } else { None } })
    }

    /// `L_n(f; x)`.
    pub fn apply(
        &self,
        op: OperatorId,
        f: &TestFunction,
        n: u32,
        x: f64,
        scheme: Option<&CoefficientScheme>,
    ) -> Result<f64> {
        self.image(op, f, n, scheme)?.value(x)
    }

    /// `L_n((e1 - x)^order; x)`, from the images of the monomials `e_0..e_order`.
    pub fn central_moment(
        &self,
        op: OperatorId,
        n: u32,
        order: u32,
        x: f64,
        scheme: Option<&CoefficientScheme>,
    ) -> Result<f64> {
        if order > 4 {
            return Err(Error::OutOfRange { what: "moment order", value: f64::from(order), range: "[0, 4]" });
        }
        let mut total = 0.0;
        let mut binom = 1.0;
        for j in 0..=order {
            let raw = self.apply(op, &monomial(j), n, x, scheme)?;
            total += binom * (-x).powi((order - j) as i32) * raw;
            binom = binom * f64::from(order - j) / f64::from(j + 1);
        }
        Ok(total)
    }

    /// Derivative of the classical image at `x`, from differences of the functionals.
    pub fn operator_derivative(&self, op: OperatorId, f: &TestFunction, n: u32, x: f64) -> Result<f64> {
        if op.variant != Variant::Classic {
            return Err(Error::Unsupported(format!("derivative of the {op} image")));
        }
        self.image(op, f, n, None)?.derivative(x)
    }
}

/// The moments of `B_n^{M2}` on `e_0, e_1, e_2` (standard coefficients).
pub fn closed_moment_m2(n: u32, j: u32, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::DegreeTooSmall { what: "M2 operator", n, min: 2 });
    }
    check_point(x)?;
    let nf = f64::from(n);
    match j {
        0 => Ok(1.0),
        1 => Ok(x),
        2 => Ok(x * x + 2.0 * x * (1.0 - x) / (nf * nf)),
        _ => Err(Error::OutOfRange { what: "moment index j", value: f64::from(j), range: "[0, 2]" }),
    }
}

fn check_point(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange { what: "x", value: x, range: "[0, 1]" });
    }
    Ok(())
}

/// `L_n f` with its functionals frozen.
#[derive(Debug, Clone)]
pub struct Image {
    op: OperatorId,
    n: u32,
    coeffs: Vec<f64>,
    scheme: Option<CoefficientScheme>,
    m2: Option<M2Coefficients>,
}

impl Image {
    pub fn op(&self) -> OperatorId {
        self.op
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        check_point(x)?;
        let row = match (&self.scheme, &self.m2) {
            (Some(s), _) => basis_row_m1(self.n, x, s)?,
            (None, Some(c)) => basis_row_m2(self.n, x, c)?,
            (None, None) => basis_row(self.n, x),
        };
        Ok(compensated_sum(row.iter().zip(&self.coeffs).map(|(p, c)| p * c)))
    }

    /// Derivative of the classical image: `n Σ_k p_{n-1,k}(x) (c_{k+1} - c_k)`.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        check_point(x)?;
        if self.op.variant != Variant::Classic {
            return Err(Error::Unsupported(format!("derivative of the {} image", self.op)));
        }
        let row = basis_row(self.n - 1, x);
        let diffs = self.coeffs.windows(2).map(|w| w[1] - w[0]);
        Ok(f64::from(self.n) * compensated_sum(row.iter().zip(diffs).map(|(p, d)| p * d)))
    }
}

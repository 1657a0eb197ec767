//! Bernstein fundamental polynomials and their perturbed variants.
//!
//! The classical basis `p_{n,k}(x) = C(n,k) x^k (1-x)^(n-k)` obeys the one-step
//! recursion `p_{n,k} = (1-x) p_{n-1,k} + x p_{n-1,k-1}`. The M1 basis replaces
//! the factors `(1-x)` and `x` of the last step by `a(x,n)` and `a(1-x,n)`, with
//! `a(x,n) = a1(n) x + a0(n)`. The M2 basis replaces the weights of the last two
//! steps, `(1-x)^2`, `2x(1-x)` and `x^2`, by `b(x,n)`, `d0(n) x(1-x)` and `b(1-x,n)`.
//!
//! Perturbed bases may be negative; nothing here clamps them.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Rows up to this degree are built with the triangle recursion; longer rows
/// are anchored at the mode and filled with term ratios.
const TRIANGLE_ROW_MAX: u32 = 64;

type SequenceFn = Arc<dyn Fn(u32) -> f64 + Send + Sync>;

/// Evaluates `p_{n,k}(x)` for an isolated `(n, k)`.
///
/// Returns exactly 0 for `k < 0` or `k > n` and exact Kronecker deltas at the
/// endpoints. Interior values use a rescaled product of the binomial factors.
pub fn eval_basis(n: u32, k: i64, x: f64) -> f64 {
    if k < 0 || k > i64::from(n) {
        return 0.0;
    }
    let k = k as u32;
    if x <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if x >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    binomial_term(n, k, x)
}

/// `C(n,k) x^k (1-x)^(n-k)` for `0 < x < 1`, as a running product of the
/// factors `(n-k+i)/i * x` and `(1-x)` with power-of-two rescaling, so no
/// intermediate under- or overflows. The relative error is O(n eps), against
/// O(ln C(n,k) eps) for the log-domain formula.
fn binomial_term(n: u32, k: u32, x: f64) -> f64 {
    const BIG: f64 = 1.157_920_892_373_162e77; // 2^256
    const SMALL: f64 = 1.0 / BIG;
    let k = k.min(n);
    let y = 1.0 - x;
    let base = f64::from(n - k);
    let mut m = 1.0;
    let mut scale = 0i32; // value = m * BIG^scale
    let mut renormalize = |m: &mut f64| {
        if *m < SMALL {
            *m *= BIG;
            scale -= 1;
        } else if *m > BIG {
            *m *= SMALL;
            scale += 1;
        }
    };
    for i in 1..=k {
        let fi = f64::from(i);
        m *= (base + fi) / fi * x;
        renormalize(&mut m);
    }
    for _ in 0..(n - k) {
        m *= y;
        renormalize(&mut m);
    }
    while scale < 0 && m > 0.0 {
        m *= SMALL;
        scale += 1;
    }
    while scale > 0 {
        m *= BIG;
        scale -= 1;
    }
    m
}

/// Neumaier-compensated sum; rows and images of degree in the thousands are
/// summed with error independent of their length.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + carry
}

/// The whole row `p_{n,0}(x), ..., p_{n,n}(x)`.
pub fn basis_row(n: u32, x: f64) -> Vec<f64> {
    let len = n as usize + 1;
    if x <= 0.0 || x >= 1.0 {
        let mut row = vec![0.0; len];
        row[if x <= 0.0 { 0 } else { n as usize }] = 1.0;
        return row;
    }
    if n <= TRIANGLE_ROW_MAX {
        triangle_row(n, x)
    } else {
        anchored_row(n, x)
    }
}

fn triangle_row(n: u32, x: f64) -> Vec<f64> {
    let len = n as usize + 1;
    let y = 1.0 - x;
    let mut row = vec![0.0; len];
    row[0] = 1.0;
    for deg in 1..len {
        row[deg] = x * row[deg - 1];
        for k in (1..deg).rev() {
            row[k] = y * row[k] + x * row[k - 1];
        }
        row[0] *= y;
    }
    row
}

// Starts from the value at the mode and walks outwards with the
// ratios p_{n,k+1}/p_{n,k} = (n-k)/(k+1) * x/(1-x); tails decay monotonically
// and underflow to zero gracefully.
fn anchored_row(n: u32, x: f64) -> Vec<f64> {
    let len = n as usize + 1;
    let mode = ((f64::from(n) + 1.0) * x).floor().clamp(0.0, f64::from(n)) as u32;
    let odds = x / (1.0 - x);
    let mut row = vec![0.0; len];
    row[mode as usize] = binomial_term(n, mode, x);
    for k in mode..n {
        let ratio = f64::from(n - k) / f64::from(k + 1) * odds;
        row[k as usize + 1] = row[k as usize] * ratio;
    }
    for k in (1..=mode).rev() {
        let ratio = f64::from(k) / f64::from(n - k + 1) / odds;
        row[k as usize - 1] = row[k as usize] * ratio;
    }
    // The anchor carries an O(n eps) relative error shared by the whole row;
    // the row sums to one, so dividing by the sum removes it.
    let total = compensated_sum(row.iter().copied());
    row.iter_mut().for_each(|p| *p /= total);
    row
}

/// The sequence `a1(n)` that drives the M1 perturbation.
///
/// `a0(n)` is always derived as `(1 - a1(n)) / 2`, so `2 a0 + a1 = 1` holds for
/// every scheme and the perturbed operators reproduce constants.
#[derive(Clone)]
pub struct CoefficientScheme {
    label: String,
    a1: SequenceFn,
    limit: Option<f64>,
}

impl CoefficientScheme {
    /// `a1(n) = value` for all `n`; the limit is `value`.
    pub fn constant(value: f64) -> Self {
        Self { label: format!("a1={value}"), a1: Arc::new(move |_| value), limit: Some(value) }
    }

    /// `a1(n) = 1/n`, with limit 0.
    pub fn reciprocal() -> Self {
        Self { label: "a1=1/n".to_string(), a1: Arc::new(|n| 1.0 / f64::from(n.max(1))), limit: Some(0.0) }
    }

    /// `a1 = -1`: the M1 basis coincides with the classical one.
    pub fn classic() -> Self {
        Self::constant(-1.0)
    }

    pub fn from_fn(
        label: impl Into<String>,
        a1: impl Fn(u32) -> f64 + Send + Sync + 'static,
        limit: Option<f64>,
    ) -> Self {
        Self { label: label.into(), a1: Arc::new(a1), limit }
    }

    /// The schemes every theorem check ranges over.
    pub fn standard_set() -> Vec<Self> {
        vec![Self::constant(-1.0), Self::constant(0.0), Self::constant(1.0), Self::reciprocal()]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn a1(&self, n: u32) -> f64 {
        (self.a1)(n)
    }

    pub fn a0(&self, n: u32) -> f64 {
        (1.0 - self.a1(n)) / 2.0
    }

    /// `L1 = lim a1(n)`, when known.
    pub fn limit(&self) -> Option<f64> {
        self.limit
    }

    /// `|a1(n) - L1|`.
    pub fn limit_gap(&self, n: u32) -> Option<f64> {
        self.limit.map(|l| (self.a1(n) - l).abs())
    }

    /// `a(x,n) = a1(n) x + a0(n)`.
    pub fn weight(&self, x: f64, n: u32) -> f64 {
        self.a1(n) * x + self.a0(n)
    }
}

impl fmt::Debug for CoefficientScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientScheme").field("label", &self.label).field("limit", &self.limit).finish()
    }
}

/// True iff `a(x,n) >= 0` on `[0,1]`.
///
/// `a(., n)` is affine, so it suffices to look at `a(0,n) = a0` and `a(1,n) = a0 + a1`.
pub fn is_positive(s: &CoefficientScheme, n: u32) -> bool {
    let a0 = s.a0(n);
    a0 >= 0.0 && a0 + s.a1(n) >= 0.0
}

/// `p^{M,1}_{n,k}(x) = a(x,n) p_{n-1,k}(x) + a(1-x,n) p_{n-1,k-1}(x)`.
///
/// The boundary cases `k = 0` and `k = n` of the three-case definition are the
/// same formula with the vanishing neighbour dropped.
pub fn eval_basis_m1(n: u32, k: i64, x: f64, s: &CoefficientScheme) -> Result<f64> {
    if n == 0 {
        return Err(Error::DegreeTooSmall { what: "M1 basis", n, min: 1 });
    }
    if k < 0 || k > i64::from(n) {
        return Ok(0.0);
    }
    Ok(s.weight(x, n) * eval_basis(n - 1, k, x) + s.weight(1.0 - x, n) * eval_basis(n - 1, k - 1, x))
}

/// The full M1 row, built from the classical row of degree `n - 1`.
pub fn basis_row_m1(n: u32, x: f64, s: &CoefficientScheme) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::DegreeTooSmall { what: "M1 basis", n, min: 1 });
    }
    let lower = basis_row(n - 1, x);
    let left = s.weight(x, n);
    let right = s.weight(1.0 - x, n);
    let mut row = vec![0.0; n as usize + 1];
    for (j, p) in lower.iter().enumerate() {
        row[j] += left * p;
        row[j + 1] += right * p;
    }
    Ok(row)
}

/// Coefficients of the two-step perturbation:
/// `b(x,n) = b2(n) x^2 + b1(n) x + b0(n)` and `d0(n)`.
#[derive(Clone)]
pub struct M2Coefficients {
    b2: SequenceFn,
    b1: SequenceFn,
    b0: SequenceFn,
    d0: SequenceFn,
    standard: bool,
}

impl M2Coefficients {
    /// `b(x,n) = (n/2) x^2 - (1 + n/2) x + 1`, `d0(n) = n`.
    pub fn standard() -> Self {
        Self {
            b2: Arc::new(|n| f64::from(n) / 2.0),
            b1: Arc::new(|n| -1.0 - f64::from(n) / 2.0),
            b0: Arc::new(|_| 1.0),
            d0: Arc::new(f64::from),
            standard: true,
        }
    }

    /// Arbitrary coefficient sequences. No normalization is implied.
    pub fn custom(
        b2: impl Fn(u32) -> f64 + Send + Sync + 'static,
        b1: impl Fn(u32) -> f64 + Send + Sync + 'static,
        b0: impl Fn(u32) -> f64 + Send + Sync + 'static,
        d0: impl Fn(u32) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { b2: Arc::new(b2), b1: Arc::new(b1), b0: Arc::new(b0), d0: Arc::new(d0), standard: false }
    }

    /// Whether these are the standard coefficients (the only ones for which
    /// partition of unity and the moment formulas are claimed).
    pub fn is_standard(&self) -> bool {
        self.standard
    }

    pub fn b(&self, x: f64, n: u32) -> f64 {
        ((self.b2)(n) * x + (self.b1)(n)) * x + (self.b0)(n)
    }

    pub fn d0(&self, n: u32) -> f64 {
        (self.d0)(n)
    }
}

impl Default for M2Coefficients {
    fn default() -> Self {
        Self::standard()
    }
}

impl fmt::Debug for M2Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("M2Coefficients").field("standard", &self.standard).finish_non_exhaustive()
    }
}

fn require_m2_degree(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::DegreeTooSmall { what: "M2 basis", n, min: 2 });
    }
    Ok(())
}

/// `p^{M,2}_{n,k}(x) = b(x,n) p_{n-2,k} + d0(n) x(1-x) p_{n-2,k-1} + b(1-x,n) p_{n-2,k-2}`.
pub fn eval_basis_m2(n: u32, k: i64, x: f64, c: &M2Coefficients) -> Result<f64> {
    require_m2_degree(n)?;
    if k < 0 || k > i64::from(n) {
        return Ok(0.0);
    }
    let m = n - 2;
    Ok(c.b(x, n) * eval_basis(m, k, x)
        + c.d0(n) * x * (1.0 - x) * eval_basis(m, k - 1, x)
        + c.b(1.0 - x, n) * eval_basis(m, k - 2, x))
}

pub fn basis_row_m2(n: u32, x: f64, c: &M2Coefficients) -> Result<Vec<f64>> {
    require_m2_degree(n)?;
    let lower = basis_row(n - 2, x);
    let left = c.b(x, n);
    let mid = c.d0(n) * x * (1.0 - x);
    let right = c.b(1.0 - x, n);
    let mut row = vec![0.0; n as usize + 1];
    for (j, p) in lower.iter().enumerate() {
        row[j] += left * p;
        row[j + 1] += mid * p;
        row[j + 2] += right * p;
    }
    Ok(row)
}

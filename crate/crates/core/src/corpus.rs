//! Test functions on `[0,1]` with exact derivatives and, where derivable,
//! exact moduli of continuity.

use std::f64::consts::{E, LN_2, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Smoothness class of a test function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Smoothness {
    C0,
    Lip1,
    LipStar1,
    C1,
    C2,
    C3,
    C4,
}

impl Smoothness {
    /// Number of continuous derivatives guaranteed by the class.
    pub fn derivative_order(self) -> usize {
        match self {
            Smoothness::C0 | Smoothness::Lip1 | Smoothness::LipStar1 => 0,
            Smoothness::C1 => 1,
            Smoothness::C2 => 2,
            Smoothness::C3 => 3,
            Smoothness::C4 => 4,
        }
    }

    pub fn is_at_least_c(self, order: usize) -> bool {
        self.derivative_order() >= order
    }
}

/// Anything whose moduli can be estimated: a value map plus optional exact
/// moduli closures.
pub trait Sampled {
    fn value(&self, x: f64) -> f64;
    fn exact_omega1(&self, _delta: f64) -> Option<f64> {
        None
    }
    fn exact_omega2(&self, _delta: f64) -> Option<f64> {
        None
    }
}

impl<F: Fn(f64) -> f64> Sampled for F {
    fn value(&self, x: f64) -> f64 {
        self(x)
    }
}

/// One derivative level of a test function.
#[derive(Clone)]
pub struct Curve {
    eval: RealMap,
    omega1: Option<RealMap>,
    omega2: Option<RealMap>,
}

impl Curve {
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval), omega1: None, omega2: None }
    }

    pub fn with_omega1(mut self, w: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.omega1 = Some(Arc::new(w));
        self
    }

    pub fn with_omega2(mut self, w: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.omega2 = Some(Arc::new(w));
        self
    }

    /// Both moduli, for curves where they are known in closed form.
    pub fn with_moduli(
        self,
        w1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        w2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.with_omega1(w1).with_omega2(w2)
    }

    fn constant(c: f64) -> Self {
        Self::new(move |_| c).with_moduli(|_| 0.0, |_| 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }
}

impl Sampled for Curve {
    fn value(&self, x: f64) -> f64 {
        (self.eval)(x)
    }
    fn exact_omega1(&self, delta: f64) -> Option<f64> {
        self.omega1.as_ref().map(|w| w(delta))
    }
    fn exact_omega2(&self, delta: f64) -> Option<f64> {
        self.omega2.as_ref().map(|w| w(delta))
    }
}

/// A function on `[0,1]` with its derivative tower.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    smoothness: Smoothness,
    // levels[k] is the k-th derivative; levels[0] is the function itself
    levels: Vec<Curve>,
    poly_degree: Option<u32>,
}

impl TestFunction {
    pub fn new(name: impl Into<String>, smoothness: Smoothness, f: Curve) -> Self {
        Self { name: name.into(), smoothness, levels: vec![f], poly_degree: None }
    }

    /// Appends the next derivative.
    pub fn with_derivative(mut self, d: Curve) -> Self {
        assert!(self.levels.len() <= 4, "derivatives are tracked up to order 4");
        self.levels.push(d);
        self
    }

    pub fn with_poly_degree(mut self, degree: u32) -> Self {
        self.poly_degree = Some(degree);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn poly_degree(&self) -> Option<u32> {
        self.poly_degree
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.levels[0].eval(x)
    }

    /// The `order`-th derivative (order 0 is the function).
    pub fn derivative(&self, order: usize) -> Option<&Curve> {
        self.levels.get(order)
    }

    pub fn max_derivative(&self) -> usize {
        self.levels.len() - 1
    }

    /// `f^(order)(x)`, if declared.
    pub fn d(&self, order: usize, x: f64) -> Option<f64> {
        self.derivative(order).map(|c| c.eval(x))
    }
}

impl Sampled for TestFunction {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }
    fn exact_omega1(&self, delta: f64) -> Option<f64> {
        self.levels[0].exact_omega1(delta)
    }
    fn exact_omega2(&self, delta: f64) -> Option<f64> {
        self.levels[0].exact_omega2(delta)
    }
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("smoothness", &self.smoothness)
            .field("derivatives", &self.max_derivative())
            .field("poly_degree", &self.poly_degree)
            .finish()
    }
}

// Moduli of c * t^m for m >= 1 (c >= 0). The derivative m t^(m-1) is increasing,
// so ω1 is attained at the right end; for m >= 2 the second difference
// Σ is increasing in x and in h (h <= 1/2), so ω2 is attained at x = 1-h.
fn power_curve(coeff: f64, m: u32) -> Curve {
    let mi = m as i32;
    let eval = move |x: f64| coeff * x.powi(mi);
    match m {
        0 => Curve::constant(coeff),
        1 => Curve::new(eval).with_moduli(move |d| coeff * d.min(1.0), |_| 0.0),
        _ => Curve::new(eval).with_moduli(
            move |d: f64| coeff * (1.0 - (1.0 - d.min(1.0)).powi(mi)),
            move |d: f64| {
                let h = d.min(0.5);
                let x = 1.0 - h;
                coeff * ((x - h).powi(mi) - 2.0 * x.powi(mi) + 1.0)
            },
        ),
    }
}

/// The monomial `e_j(x) = x^j` with its derivative tower up to order 4.
pub fn monomial(j: u32) -> TestFunction {
    let mut f = TestFunction::new(format!("e{j}"), Smoothness::C4, power_curve(1.0, j)).with_poly_degree(j);
    let mut coeff = 1.0;
    for order in 1..=4u32 {
        let f_order = if order <= j {
            coeff *= f64::from(j - order + 1);
            power_curve(coeff, j - order)
        } else {
            Curve::constant(0.0)
        };
        f = f.with_derivative(f_order);
    }
    f
}

fn exp_function() -> TestFunction {
    let curve = || {
        Curve::new(f64::exp).with_moduli(
            |d: f64| E - (1.0 - d.min(1.0)).exp(),
            // Δ²_h e^x at x = 1-h is e (1 - e^{-h})^2, increasing in h
            |d: f64| E * (-(-d.min(0.5)).exp_m1()).powi(2),
        )
    };
    let mut f = TestFunction::new("exp", Smoothness::C4, curve());
    for _ in 0..4 {
        f = f.with_derivative(curve());
    }
    f
}

// c sin(πx) and c cos(πx) for c > 0; signs do not affect moduli.
fn sine_curve(scale: f64, sign: f64) -> Curve {
    Curve::new(move |x: f64| sign * scale * (PI * x).sin()).with_moduli(
        move |d: f64| scale * (PI * d.min(0.5)).sin(),
        move |d: f64| 2.0 * scale * (1.0 - (PI * d.min(0.5)).cos()),
    )
}

fn cosine_curve(scale: f64, sign: f64) -> Curve {
    Curve::new(move |x: f64| sign * scale * (PI * x).cos()).with_moduli(
        move |d: f64| 2.0 * scale * (PI * d.min(1.0) / 2.0).sin(),
        // Δ²_h cos(πx) = 2 cos(πx)(cos πh - 1); |cos πx| is largest at x = h
        move |d: f64| {
            let h = d.min(1.0 / 3.0);
            let c = (PI * h).cos();
            2.0 * scale * c * (1.0 - c)
        },
    )
}

fn sine_function() -> TestFunction {
    TestFunction::new("sin_pi", Smoothness::C4, sine_curve(1.0, 1.0))
        .with_derivative(cosine_curve(PI, 1.0))
        .with_derivative(sine_curve(PI * PI, -1.0))
        .with_derivative(cosine_curve(PI.powi(3), -1.0))
        .with_derivative(sine_curve(PI.powi(4), 1.0))
}

fn abs_half() -> TestFunction {
    TestFunction::new(
        "abs_half",
        Smoothness::Lip1,
        Curve::new(|x: f64| (x - 0.5).abs()).with_moduli(|d: f64| d.min(0.5), |d: f64| 2.0 * d.min(0.5)),
    )
}

fn x_log_x() -> TestFunction {
    // g is convex, so g(s+h) - g(s) increases in s: the extremes sit at s = 0
    // (|h log h|) and s = 1-h (smaller for h <= 1/2). Second differences
    // decrease in x because g'' = 1/x, so the sup is at x = h: 2h log 2.
    let phi = |h: f64| if h > 0.0 { -h * h.ln() } else { 0.0 };
    TestFunction::new(
        "xlogx",
        Smoothness::LipStar1,
        Curve::new(|x: f64| if x > 0.0 { x * x.ln() } else { 0.0 })
            .with_moduli(move |d: f64| phi(d.min(1.0 / E)), |d: f64| 2.0 * LN_2 * d.min(0.5)),
    )
}

/// The compiled-in test corpus.
pub fn standard_corpus() -> Vec<TestFunction> {
    let mut corpus: Vec<TestFunction> = (0..=4).map(monomial).collect();
    corpus.push(exp_function());
    corpus.push(sine_function());
    corpus.push(abs_half());
    corpus.push(x_log_x());
    corpus
}

/// Looks a corpus member up by name.
pub fn by_name(name: &str) -> Option<TestFunction> {
    standard_corpus().into_iter().find(|f| f.name() == name)
}

//! First and second moduli of continuity and sup norms.
//!
//! Grid estimates are lower bounds of the true suprema: they sample the
//! differences on a finite x-grid and a finite h-ladder. When a function carries
//! an exact modulus closure the closure is used and the estimate is flagged as
//! exact.

use serde::{Deserialize, Serialize};

use crate::corpus::{Sampled, TestFunction};
use crate::error::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 2048;
const STEPS_PER_OCTAVE: usize = 16;
const LADDER_FLOOR: f64 = 1.0 / (1u64 << 20) as f64;
const MIN_GRID_POINTS: usize = 64;
const SUP_NORM_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub order: u8,
    pub delta: f64,
    pub value: f64,
    pub grid_points: usize,
    /// True when the value is a grid estimate (a lower bound of the supremum).
    pub lower_bound: bool,
}

/// Whether exact closures are honored or every modulus is grid-estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModuliPolicy {
    PreferExact,
    GridOnly,
}

fn check_grid(grid_points: usize) -> Result<()> {
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::OutOfRange { what: "grid_points", value: grid_points as f64, range: "[64, inf)" });
    }
    Ok(())
}

/// Steps in `(0, delta]`: `STEPS_PER_OCTAVE` points in each octave
/// `(δ 2^-(j+1), δ 2^-j]`, down to an absolute floor. The ladder for `δ/2` is
/// a subset of the ladder for `δ`, so estimates are monotone along halvings.
fn step_ladder(delta: f64) -> Vec<f64> {
    let mut ladder = Vec::new();
    let mut top = delta;
    while top >= LADDER_FLOOR {
        for i in (STEPS_PER_OCTAVE + 1..=2 * STEPS_PER_OCTAVE).rev() {
            ladder.push(top * i as f64 / (2 * STEPS_PER_OCTAVE) as f64);
        }
        top /= 2.0;
    }
    ladder
}

/// `ω1(f; δ) = sup { |f(s) - f(t)| : s, t ∈ [0,1], |s - t| <= δ }`.
pub fn omega1<F: Sampled + ?Sized>(f: &F, delta: f64, grid_points: usize) -> Result<ModulusEstimate> {
    omega1_with(f, delta, grid_points, ModuliPolicy::PreferExact)
}

pub fn omega1_with<F: Sampled + ?Sized>(
    f: &F,
    delta: f64,
    grid_points: usize,
    policy: ModuliPolicy,
) -> Result<ModulusEstimate> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::OutOfRange { what: "delta", value: delta, range: "(0, 1]" });
    }
    check_grid(grid_points)?;
    if policy == ModuliPolicy::PreferExact {
        if let Some(value) = f.exact_omega1(delta) {
            return Ok(ModulusEstimate { order: 1, delta, value, grid_points, lower_bound: false });
        }
    }
    let spacing = 1.0 / grid_points as f64;
    let diff = |s: f64, h: f64| (f.value(s + h) - f.value(s)).abs();
    let mut best: f64 = 0.0;
    for h in step_ladder(delta) {
        let reach = 1.0 - h;
        // pairs starting on the grid and pairs ending on the grid
        for i in 0..=grid_points {
            let x = i as f64 * spacing;
            if x <= reach {
                best = best.max(diff(x, h));
            }
            if x >= h {
                best = best.max(diff(x - h, h));
            }
        }
        // the pairs used by the extreme ω2 centres h and 1-h
        best = best.max(diff(h, h)).max(diff(reach, h));
        if 2.0 * h <= 1.0 {
            best = best.max(diff(1.0 - 2.0 * h, h));
        }
    }
    Ok(ModulusEstimate { order: 1, delta, value: best, grid_points, lower_bound: true })
}

/// `ω2(f; δ) = sup { |f(x-h) - 2f(x) + f(x+h)| : 0 < h <= δ, x ± h ∈ [0,1] }`.
pub fn omega2<F: Sampled + ?Sized>(f: &F, delta: f64, grid_points: usize) -> Result<ModulusEstimate> {
    omega2_with(f, delta, grid_points, ModuliPolicy::PreferExact)
}

pub fn omega2_with<F: Sampled + ?Sized>(
    f: &F,
    delta: f64,
    grid_points: usize,
    policy: ModuliPolicy,
) -> Result<ModulusEstimate> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::OutOfRange { what: "delta", value: delta, range: "(0, 1/2]" });
    }
    check_grid(grid_points)?;
    if policy == ModuliPolicy::PreferExact {
        if let Some(value) = f.exact_omega2(delta) {
            return Ok(ModulusEstimate { order: 2, delta, value, grid_points, lower_bound: false });
        }
    }
    let spacing = 1.0 / grid_points as f64;
    let second = |x: f64, h: f64| (f.value(x - h) - 2.0 * f.value(x) + f.value(x + h)).abs();
    let mut best: f64 = 0.0;
    for h in step_ladder(delta) {
        let reach = 1.0 - h;
        // centres on the global grid, plus both extreme centres h and 1-h
        for i in 0..=grid_points {
            let x = i as f64 * spacing;
            if x >= h && x <= reach {
                best = best.max(second(x, h));
            }
        }
        best = best.max(second(h, h)).max(second(reach, h));
    }
    Ok(ModulusEstimate { order: 2, delta, value: best, grid_points, lower_bound: true })
}

/// `||f^(order)||_∞`, from a dense grid refined by golden-section search
/// around the grid argmax.
pub fn sup_norm(f: &TestFunction, derivative_order: usize) -> Result<f64> {
    if derivative_order > 4 {
        return Err(Error::OutOfRange { what: "derivative order", value: derivative_order as f64, range: "[0, 4]" });
    }
    let curve = f
        .derivative(derivative_order)
        .ok_or_else(|| Error::DerivativeUnavailable { function: f.name().to_string(), order: derivative_order })?;
    let g = |x: f64| curve.eval(x).abs();
    let h = 1.0 / SUP_NORM_GRID as f64;
    let (mut arg, mut best) = (0.0, g(0.0));
    for i in 1..=SUP_NORM_GRID {
        let x = i as f64 * h;
        let v = g(x);
        if v > best {
            arg = x;
            best = v;
        }
    }
    let refined = golden_max(&g, (arg - h).max(0.0), (arg + h).min(1.0));
    Ok(best.max(refined))
}

fn golden_max(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
    }
    gc.max(gd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{by_name, monomial, standard_corpus, Curve, Smoothness};
    use approx::assert_abs_diff_eq;

    fn grid_only(f: &TestFunction) -> TestFunction {
        TestFunction::new(format!("{}_grid", f.name()), f.smoothness(), {
            let g = f.clone();
            Curve::new(move |x| g.eval(x))
        })
    }

    #[test]
    fn omega1_examples() {
        let e1 = monomial(1);
        assert_abs_diff_eq!(omega1(&e1, 0.2, 2048).unwrap().value, 0.2, epsilon = 1e-15);
        let e2 = monomial(2);
        assert_abs_diff_eq!(omega1(&e2, 0.1, 2048).unwrap().value, 0.19, epsilon = 1e-15);
        assert_eq!(omega1(&monomial(0), 0.5, 2048).unwrap().value, 0.0);
        // same values from the grid
        assert_abs_diff_eq!(omega1(&grid_only(&e2), 0.1, 2048).unwrap().value, 0.19, epsilon = 1e-12);
        assert_abs_diff_eq!(omega1(&grid_only(&e1), 0.2, 2048).unwrap().value, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn omega2_examples() {
        assert_abs_diff_eq!(omega2(&monomial(1), 0.25, 2048).unwrap().value, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(omega2(&monomial(2), 0.1, 2048).unwrap().value, 0.02, epsilon = 1e-15);
        let est = omega2(&grid_only(&monomial(2)), 0.1, 2048).unwrap();
        assert!(est.lower_bound);
        assert_abs_diff_eq!(est.value, 0.02, epsilon = 1e-12);
        assert!(omega2(&grid_only(&monomial(1)), 0.25, 2048).unwrap().value <= 1e-13);
    }

    #[test]
    fn omega2_of_xlogx_matches_dense_oracle() {
        // Dense brute force on a 10^6-point centre grid, steps on a ladder up to δ.
        let g = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
        let delta = 0.1;
        let mut oracle: f64 = 0.0;
        for s in 1..=8 {
            let h = delta * f64::from(s) / 8.0;
            let n = 1_000_000;
            for i in 0..=n {
                let x = h + (1.0 - 2.0 * h) * f64::from(i) / f64::from(n);
                oracle = oracle.max((g(x - h) - 2.0 * g(x) + g(x + h)).abs());
            }
        }
        // frozen value of the oracle run
        assert_abs_diff_eq!(oracle, 0.138_629_436_111_989_06, epsilon = 1e-12);
        let xlogx = by_name("xlogx").unwrap();
        assert_abs_diff_eq!(omega2(&xlogx, delta, 2048).unwrap().value, oracle, epsilon = 1e-12);
        let est = omega2_with(&xlogx, delta, 2048, ModuliPolicy::GridOnly).unwrap();
        assert!(est.lower_bound);
        assert!(est.value <= oracle + 1e-12 && est.value >= 0.99 * oracle);
    }

    #[test]
    fn grid_estimates_bound_exact_values_from_below() {
        for f in standard_corpus() {
            for &delta in &[0.01, 0.05, 0.125, 0.3, 0.5] {
                let exact = omega1(&f, delta, 4096).unwrap();
                assert!(!exact.lower_bound);
                let grid = omega1_with(&f, delta, 4096, ModuliPolicy::GridOnly).unwrap();
                assert!(grid.value <= exact.value + 1e-12, "{} ω1({delta})", f.name());
                assert!(grid.value >= 0.99 * exact.value - 1e-14, "{} ω1({delta})", f.name());

                let exact = omega2(&f, delta, 4096).unwrap();
                let grid = omega2_with(&f, delta, 4096, ModuliPolicy::GridOnly).unwrap();
                assert!(grid.value <= exact.value + 1e-12, "{} ω2({delta})", f.name());
                assert!(grid.value >= 0.99 * exact.value - 1e-14, "{} ω2({delta})", f.name());
            }
        }
    }

    #[test]
    fn monotone_and_ordered_on_delta_ladder() {
        for f in standard_corpus() {
            let g = grid_only(&f);
            let ladder: Vec<f64> = (1..=10).map(|k| 0.5f64.powi(k)).rev().collect();
            let mut prev1: f64 = 0.0;
            let mut prev2: f64 = 0.0;
            let sup = (0..=1000).map(|i| f.eval(f64::from(i) / 1000.0).abs()).fold(0.0, f64::max);
            for &delta in &ladder {
                let w1 = omega1_with(&g, delta, 512, ModuliPolicy::GridOnly).unwrap().value;
                let w2 = omega2_with(&g, delta, 512, ModuliPolicy::GridOnly).unwrap().value;
                assert!(w1 + 1e-15 >= prev1 && w2 + 1e-15 >= prev2, "{} at {delta}", f.name());
                assert!(w2 <= 2.0 * w1 + 1e-12 && 2.0 * w1 <= 4.0 * sup + 1e-12, "{} at {delta}", f.name());
                prev1 = w1;
                prev2 = w2;
            }
        }
    }

    #[test]
    fn subadditivity_surrogate() {
        for f in standard_corpus() {
            let g = grid_only(&f);
            for k in 2..=8 {
                let delta = 0.5f64.powi(k);
                let w = omega1_with(&g, delta, 1024, ModuliPolicy::GridOnly).unwrap().value;
                let w2 = omega1_with(&g, 2.0 * delta, 1024, ModuliPolicy::GridOnly).unwrap().value;
                assert!(w2 <= 2.0 * w + 1e-12, "{}: {w2} > 2*{w}", f.name());
            }
        }
    }

    #[test]
    fn lip_phenomenon_for_xlogx() {
        let e1 = monomial(1);
        let g = by_name("xlogx").unwrap();
        let mut first_ratio1 = 0.0;
        let mut ratios2 = vec![];
        for k in 3..=14 {
            let delta = 0.5f64.powi(k);
            let r = omega1_with(&e1, delta, 2048, ModuliPolicy::GridOnly).unwrap().value / delta;
            assert!((r - 1.0).abs() <= 1e-12);
            let r1 = omega1_with(&g, delta, 2048, ModuliPolicy::GridOnly).unwrap().value / delta;
            if k == 3 {
                first_ratio1 = r1;
            }
            assert!(r1 >= first_ratio1 - 1e-12);
            ratios2.push(omega2_with(&g, delta, 2048, ModuliPolicy::GridOnly).unwrap().value / delta);
        }
        let last1 = omega1_with(&g, 0.5f64.powi(14), 2048, ModuliPolicy::GridOnly).unwrap().value / 0.5f64.powi(14);
        assert!(last1 >= 3.0 * first_ratio1);
        let max2 = ratios2.iter().cloned().fold(0.0, f64::max);
        assert!(max2 <= 2.0 * ratios2[0]);
    }

    #[test]
    fn rejects_bad_arguments() {
        let e1 = monomial(1);
        assert!(omega1(&e1, 0.0, 2048).is_err());
        assert!(omega1(&e1, 1.5, 2048).is_err());
        assert!(omega1(&e1, 0.5, 10).is_err());
        assert!(omega2(&e1, 0.6, 2048).is_err());
        assert!(omega2(&e1, -0.1, 2048).is_err());
        assert!(sup_norm(&by_name("abs_half").unwrap(), 1).is_err());
        assert!(sup_norm(&e1, 5).is_err());
    }

    #[test]
    fn sup_norm_examples() {
        let e2 = monomial(2);
        assert_abs_diff_eq!(sup_norm(&e2, 1).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sup_norm(&e2, 2).unwrap(), 2.0, epsilon = 1e-15);
        let sin = by_name("sin_pi").unwrap();
        assert_abs_diff_eq!(sup_norm(&sin, 0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sup_norm(&sin, 1).unwrap(), std::f64::consts::PI, epsilon = 1e-14);
        // an interior maximum away from grid points
        let bump = TestFunction::new("bump", Smoothness::C0, Curve::new(|x: f64| 1.0 - (x - 0.123_456_7).powi(2)));
        assert_abs_diff_eq!(sup_norm(&bump, 0).unwrap(), 1.0, epsilon = 1e-12);
    }
}

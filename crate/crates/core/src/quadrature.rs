//! Composite Gauss-Legendre rules normalized to `[0, 1]`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A quadrature rule on `[0, 1]`: `∫_0^1 f ≈ Σ w_i f(t_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    points: usize,
    panels: usize,
}

impl QuadratureRule {
    /// Gauss-Legendre rule with `points` nodes on each of `panels` equal panels.
    pub fn gauss_legendre(points: usize, panels: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::OutOfRange { what: "quadrature points", value: 0.0, range: "[1, inf)" });
        }
        if panels == 0 {
            return Err(Error::OutOfRange { what: "quadrature panels", value: 0.0, range: "[1, inf)" });
        }
        let (ref_nodes, ref_weights) = legendre_nodes(points);
        let width = 1.0 / panels as f64;
        let mut nodes = Vec::with_capacity(points * panels);
        let mut weights = Vec::with_capacity(points * panels);
        for panel in 0..panels {
            let left = panel as f64 * width;
            for (z, w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(left + width * z);
                weights.push(width * w);
            }
        }
        Ok(Self { nodes, weights, points, panels })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        2 * self.points - 1
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| w * f(*t)).sum()
    }

    /// Integrates over `[a, b]` by mapping the rule affinely.
    pub fn integrate_on(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let width = b - a;
        width * self.integrate(|t| f(a + width * t))
    }
}

/// Nodes (ascending, in `[0,1]`) and weights (summing to 1) of the
/// `points`-point Gauss-Legendre rule.
fn legendre_nodes(points: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; points];
    let mut weights = vec![0.0; points];
    let nf = points as f64;
    for i in 0..points.div_ceil(2) {
        // Tricomi's initial guess for the i-th largest root on [-1, 1].
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut slope = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(points, z);
            slope = dp;
            let step = p / dp;
            z -= step;
            // quadratic convergence: the error left after a step of size s is O(s^2)
            if step.abs() <= 1e-13 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(points, z);
        if dp.is_finite() {
            slope = dp;
        }
        let w = 1.0 / ((1.0 - z * z) * slope * slope);
        // map z in [-1,1] to t = (1+z)/2; weight 2/(..) halves to 1/(..)
        nodes[points - 1 - i] = 0.5 * (1.0 + z);
        nodes[i] = 0.5 * (1.0 - z);
        weights[points - 1 - i] = w;
        weights[i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_one() {
        for points in [1, 2, 3, 5, 10, 37, 69, 128] {
            for panels in [1, 2, 7] {
                let rule = QuadratureRule::gauss_legendre(points, panels).unwrap();
                let total: f64 = rule.weights().iter().sum();
                assert!((total - 1.0).abs() <= 1e-14, "points={points} panels={panels}: {total}");
                assert!(rule.weights().iter().all(|w| *w > 0.0));
                assert!(rule.nodes().iter().all(|t| (0.0..=1.0).contains(t)));
            }
        }
    }

    #[test]
    fn integrates_monomials_exactly_up_to_degree() {
        for points in [1, 2, 4, 9, 20, 40, 69] {
            let rule = QuadratureRule::gauss_legendre(points, 1).unwrap();
            for j in 0..=rule.exactness_degree() {
                let got = rule.integrate(|t| t.powi(j as i32));
                let exact = 1.0 / (j as f64 + 1.0);
                assert!(((got - exact) / exact).abs() <= 1e-13, "points={points} j={j}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn two_point_rule_is_textbook() {
        let rule = QuadratureRule::gauss_legendre(2, 1).unwrap();
        let h = 0.5 / 3f64.sqrt();
        assert_abs_diff_eq!(rule.nodes()[0], 0.5 - h, epsilon = 1e-16);
        assert_abs_diff_eq!(rule.nodes()[1], 0.5 + h, epsilon = 1e-16);
        assert_abs_diff_eq!(rule.weights()[0], 0.5, epsilon = 4e-16);
    }

    #[test]
    fn large_rules_stay_accurate() {
        let rule = QuadratureRule::gauss_legendre(1029, 1).unwrap();
        let total: f64 = rule.weights().iter().sum();
        assert!((total - 1.0).abs() <= 1e-13);
        let got = rule.integrate(f64::exp);
        assert_abs_diff_eq!(got, std::f64::consts::E - 1.0, epsilon = 1e-13);
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn integrate_on_subinterval() {
        let rule = QuadratureRule::gauss_legendre(4, 1).unwrap();
        assert_abs_diff_eq!(rule.integrate_on(0.25, 0.5, |t| t * t), (0.125 - 0.015625) / 3.0, epsilon = 1e-16);
    }

    #[test]
    fn rejects_empty_rules() {
        assert!(QuadratureRule::gauss_legendre(0, 1).is_err());
        assert!(QuadratureRule::gauss_legendre(3, 0).is_err());
    }
}

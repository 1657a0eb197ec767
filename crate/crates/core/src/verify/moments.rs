//! Moment identities and the variance-type quantity σ_n of the D and U
//! direct estimates.

use serde::{Deserialize, Serialize};

use super::{assemble, BoundReport, TheoremId, Verifier, MOMENT_TOLERANCE, SIGMA_TOLERANCE};
use crate::basis::basis_row;
use crate::corpus::{monomial, Curve, Smoothness, TestFunction};
use crate::error::Result;
use crate::operators::{closed_moment_m2, Family, OperatorId, Operators};

/// First moment `b = F(e1)` and half second central moment
/// `mu2 = F((e1 - b)^2) / 2` of a positive linear functional `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalStats {
    pub b: f64,
    pub mu2: f64,
}

/// Closed forms of `D_n((e1 - x)^order; x)` for orders 0 to 4.
pub fn durrmeyer_central_moment(n: u32, order: u32, x: f64) -> Option<f64> {
    let n = f64::from(n);
    let xx = x * (1.0 - x);
    let d = 1.0 - 2.0 * x;
    let value = match order {
        0 => 1.0,
        1 => d / (n + 2.0),
        2 => 2.0 * (xx * (n - 3.0) + 1.0) / ((n + 2.0) * (n + 3.0)),
        3 => 6.0 * d * (2.0 * xx * n + 2.0 * x * x - 2.0 * x + 1.0) / ((n + 2.0) * (n + 3.0) * (n + 4.0)),
        4 => {
            12.0 * (xx * xx * n * n + 3.0 * xx * (7.0 * x * x - 7.0 * x + 2.0) * n - 10.0 * xx * (x * x - x + 1.0)
                + 2.0)
                / ((n + 2.0) * (n + 3.0) * (n + 4.0) * (n + 5.0))
        }
        _ => return None,
    };
    Some(value)
}

/// `σ_n(x)` of the Durrmeyer direct estimate.
pub fn sigma_durrmeyer(n: u32, x: f64) -> f64 {
    let nf = f64::from(n);
    (2.0 * x * (1.0 - x) * (nf - 1.0) * (nf - 2.0) + 3.0 * nf + 1.0) / (2.0 * (nf + 2.0).powi(2) * (nf + 3.0))
}

/// `σ_n(x)` of the genuine direct estimate, `[2nX + (1-2x)^2](n-1) / (2n^2(n+1))`.
pub fn sigma_genuine(n: u32, x: f64) -> f64 {
    let nf = f64::from(n);
    let d = 1.0 - 2.0 * x;
    (2.0 * nf * x * (1.0 - x) + d * d) * (nf - 1.0) / (2.0 * nf * nf * (nf + 1.0))
}

/// `Σ_k (mu2^{F_k} + mu2^{G_k}) p_{n-1,k}(x)`.
pub fn sigma_from_stats(stats: &[(FunctionalStats, FunctionalStats)], x: f64) -> f64 {
    let n = stats.len() as u32;
    basis_row(n - 1, x).iter().zip(stats).map(|(p, (f, g))| (f.mu2 + g.mu2) * p).sum()
}

/// Stats of `scale · ∫ p_{m,j} g` by quadrature.
fn integral_stats(ops: &Operators, m: u32, j: u32, scale: f64) -> Result<FunctionalStats> {
    let b = scale * ops.basis_inner_product(m, j, &monomial(1))?;
    let shifted =
        TestFunction::new("shifted_square", Smoothness::C4, Curve::new(move |t| (t - b) * (t - b))).with_poly_degree(2);
    let mu2 = 0.5 * scale * ops.basis_inner_product(m, j, &shifted)?;
    Ok(FunctionalStats { b, mu2 })
}

const POINT_MASS_AT_0: FunctionalStats = FunctionalStats { b: 0.0, mu2: 0.0 };
const POINT_MASS_AT_1: FunctionalStats = FunctionalStats { b: 1.0, mu2: 0.0 };

/// `(F_k, G_k)` for `k = 0..n-1` with `F_k = (n+1)∫p_{n,k}·` and
/// `G_k = (n+1)∫p_{n,k+1}·`.
pub fn durrmeyer_functional_stats(ops: &Operators, n: u32) -> Result<Vec<(FunctionalStats, FunctionalStats)>> {
    let scale = f64::from(n) + 1.0;
    (0..n).map(|k| Ok((integral_stats(ops, n, k, scale)?, integral_stats(ops, n, k + 1, scale)?))).collect()
}

/// `(F_k, G_k)` for `k = 0..n-1` with `F_0 = δ_0`, `F_k = (n-1)∫p_{n-2,k-1}·`,
/// `G_k = (n-1)∫p_{n-2,k}·` and `G_{n-1} = δ_1`.
pub fn genuine_functional_stats(ops: &Operators, n: u32) -> Result<Vec<(FunctionalStats, FunctionalStats)>> {
    let scale = f64::from(n) - 1.0;
    (0..n)
        .map(|k| {
            let f = if k == 0 { POINT_MASS_AT_0 } else { integral_stats(ops, n - 2, k - 1, scale)? };
            let g = if k == n - 1 { POINT_MASS_AT_1 } else { integral_stats(ops, n - 2, k, scale)? };
            Ok((f, g))
        })
        .collect()
}

impl Verifier {
    /// Identity checks: the M2 moments, the Durrmeyer central moments of
    /// orders 1 to 4, and σ_n for the D and U estimates (plus σ_n <= 1/(4n)
    /// for U). Residual reports carry `lhs = |residual|` and `rhs = 0`.
    pub fn check_moment_identities(&self, n_list: &[u32], x_grid: &[f64]) -> Result<Vec<BoundReport>> {
        let mut reports = Vec::new();
        for &n in n_list {
            reports.extend(self.m2_moment_reports(n, x_grid)?);
            reports.extend(self.durrmeyer_moment_reports(n, x_grid)?);
            reports.extend(self.sigma_reports(n, x_grid)?);
        }
        Ok(reports)
    }

    /// `|B_n^{M2}(e_j) - closed form|` for `j = 0, 1, 2`; empty for `n < 2`.
    pub fn m2_moment_reports(&self, n: u32, x_grid: &[f64]) -> Result<Vec<BoundReport>> {
        if n < 2 {
            return Ok(Vec::new());
        }
        (0..=2)
            .map(|j| {
                let image = self.ops.image(OperatorId::bernstein_m2(), &monomial(j), n, None)?;
                let lhs = x_grid
                    .iter()
                    .map(|&x| Ok((image.value(x)? - closed_moment_m2(n, j, x)?).abs()))
                    .collect::<Result<Vec<_>>>()?;
                residual_report(TheoremId::B_M2_MOMENTS, &format!("e{j}"), n, x_grid, lhs, MOMENT_TOLERANCE)
            })
            .collect()
    }

    /// Central moments of `D_n` from images of `e_0..e_4`, against the closed forms.
    pub fn durrmeyer_moment_reports(&self, n: u32, x_grid: &[f64]) -> Result<Vec<BoundReport>> {
        let op = OperatorId::classic(Family::Durrmeyer);
        let images = (0..=4).map(|j| self.ops.image(op, &monomial(j), n, None)).collect::<Result<Vec<_>>>()?;
        (1..=4u32)
            .map(|order| {
                let lhs = x_grid
                    .iter()
                    .map(|&x| {
                        // (t - x)^order expanded in monomials
                        let mut total = 0.0;
                        let mut binom = 1.0;
                        for j in 0..=order {
                            total += binom * (-x).powi((order - j) as i32) * images[j as usize].value(x)?;
                            binom = binom * f64::from(order - j) / f64::from(j + 1);
                        }
                        let closed = durrmeyer_central_moment(n, order, x).unwrap_or(f64::NAN);
                        Ok((total - closed).abs())
                    })
                    .collect::<Result<Vec<_>>>()?;
                residual_report(
                    TheoremId::D_CLASSIC_VORON,
                    &format!("central_moment_{order}"),
                    n,
                    x_grid,
                    lhs,
                    MOMENT_TOLERANCE,
                )
            })
            .collect()
    }

    /// σ_n from functional stats against the closed forms; σ_n <= 1/(4n) for U.
    pub fn sigma_reports(&self, n: u32, x_grid: &[f64]) -> Result<Vec<BoundReport>> {
        let mut reports = Vec::new();
        let d_stats = durrmeyer_functional_stats(&self.ops, n)?;
        let lhs = x_grid.iter().map(|&x| (sigma_from_stats(&d_stats, x) - sigma_durrmeyer(n, x)).abs()).collect();
        reports.push(residual_report(TheoremId::D_M1_DIRECT, "sigma_n", n, x_grid, lhs, SIGMA_TOLERANCE)?);
        if n >= 2 {
            let u_stats = genuine_functional_stats(&self.ops, n)?;
            let lhs = x_grid.iter().map(|&x| (sigma_from_stats(&u_stats, x) - sigma_genuine(n, x)).abs()).collect();
            reports.push(residual_report(TheoremId::U_M1_DIRECT, "sigma_n", n, x_grid, lhs, SIGMA_TOLERANCE)?);
            let sigma: Vec<f64> = x_grid.iter().map(|&x| sigma_genuine(n, x)).collect();
            let bound = vec![0.25 / f64::from(n); x_grid.len()];
            reports.push(assemble(
                TheoremId::U_M1_DIRECT,
                "sigma_n_bound",
                n,
                None,
                x_grid,
                sigma,
                bound,
                None,
                true,
                SIGMA_TOLERANCE,
                Some("lhs = sigma_n(x), rhs = 1/(4n)".to_string()),
            )?);
        }
        Ok(reports)
    }
}

fn residual_report(
    theorem: TheoremId,
    function: &str,
    n: u32,
    x_grid: &[f64],
    lhs: Vec<f64>,
    tolerance: f64,
) -> Result<BoundReport> {
    let rhs = vec![0.0; lhs.len()];
    assemble(
        theorem,
        function,
        n,
        None,
        x_grid,
        lhs,
        rhs,
        None,
        true,
        tolerance,
        Some("lhs = |computed - closed form|".to_string()),
    )
}

//! Voronovskaya limits, their quantitative bounds Δ_n, and corollary rates.
//!
//! For every M1 family the limit of `n[L_n f - f](x)` has the form
//! `c2 X f''(x) + X'(κ + L1)/2 f'(x)` with `X = x(1-x)`, `X' = 1 - 2x`:
//!
//! | family      | c2  | κ |
//! |-------------|-----|---|
//! | Bernstein   | 1/2 | 1 |
//! | Kantorovich | 1/2 | 2 |
//! | Durrmeyer   | 1   | 3 |
//! | Genuine     | 1   | 1 |
//!
//! Classical operators are the case `L1 = -1`.

use serde::{Deserialize, Serialize};

use super::direct::derivative;
use super::{assemble, BoundReport, ConvergenceReport, TheoremId, Verifier, DEFAULT_TOLERANCE};
use crate::basis::CoefficientScheme;
use crate::corpus::TestFunction;
use crate::error::{Error, Result};
use crate::operators::{Family, OperatorId, Variant};

/// Scaled errors at or below `max(ROUNDOFF_FLOOR, n · ROUNDOFF_PER_DEGREE)`
/// are treated as roundoff when fitting rates: the scaling by `n` amplifies
/// the evaluation error too.
const ROUNDOFF_FLOOR: f64 = 1e-11;
const ROUNDOFF_PER_DEGREE: f64 = 1e-13;

fn limit_constants(family: Family) -> (f64, f64) {
    match family {
        Family::Bernstein => (0.5, 1.0),
        Family::Kantorovich => (0.5, 2.0),
        Family::Durrmeyer => (1.0, 3.0),
        Family::Genuine => (1.0, 1.0),
    }
}

/// The effective `L1` of an operator: `-1` for classical ones, the scheme's
/// limit for M1 ones.
fn effective_limit(op: OperatorId, scheme: Option<&CoefficientScheme>) -> Result<f64> {
    match op.variant() {
        Variant::Classic => Ok(-1.0),
        Variant::M1 => {
            let s = scheme.ok_or(Error::MissingScheme(op))?;
            s.limit().ok_or_else(|| Error::MissingLimit(s.label().to_string()))
        }
        Variant::M2 => Err(Error::Unsupported(format!("no Voronovskaya limit is available for {op}"))),
    }
}

/// `lim n[L_n f - f](x)` for `L_n = op` and a scheme limit `l1` (ignored for
/// classical operators).
pub fn voronovskaya_limit(op: OperatorId, f: &TestFunction, x: f64, l1: f64) -> Result<f64> {
    let l1 = match op.variant() {
        Variant::Classic => -1.0,
        Variant::M1 => l1,
        Variant::M2 => return Err(Error::Unsupported(format!("no Voronovskaya limit is available for {op}"))),
    };
    let (c2, kappa) = limit_constants(op.family());
    Ok(c2 * x * (1.0 - x) * derivative(f, 2, x)? + (1.0 - 2.0 * x) * (kappa + l1) / 2.0 * derivative(f, 1, x)?)
}

fn limit_formula(op: OperatorId, l1: f64) -> String {
    let (c2, kappa) = limit_constants(op.family());
    let c2 = if c2 == 0.5 { "x(1-x)/2" } else { "x(1-x)" };
    format!("{c2} f''(x) + (1-2x)({kappa} + L1)/2 f'(x) with L1 = {l1}")
}

/// Least-squares slope of `log |e|` against `log n` over the largest half of
/// the sequence. Errors at roundoff level (which grows like `n`) are left out; `None` when fewer than
/// two remain.
pub fn fit_rate(n_list: &[u32], errors: &[f64]) -> Option<f64> {
    let tail = n_list.len() / 2;
    let points: Vec<(f64, f64)> = n_list[tail..]
        .iter()
        .zip(&errors[tail..])
        .filter(|(&n, e)| e.abs() > ROUNDOFF_FLOOR.max(f64::from(n) * ROUNDOFF_PER_DEGREE))
        .map(|(&n, e)| (f64::from(n).ln(), e.abs().ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// Growth check of `n · sup_x Δ_n(x)` beyond the additive scheme-gap term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub theorem: TheoremId,
    pub function: String,
    pub scheme: String,
    pub n_list: Vec<u32>,
    /// `sup_x Δ_n(x)` on the grid.
    pub sup_delta: Vec<f64>,
    /// `|L1 - a1(n)| ||f'|| / 2`.
    pub additive: Vec<f64>,
    /// `n · max(sup Δ_n - additive, 0)`.
    pub scaled: Vec<f64>,
    /// True when the scaled values over the larger half of `n_list` stay
    /// within twice their maximum over the smaller half.
    pub bounded: bool,
}

/// Uniform version of a limit check: `sup_x |n[L_n f - f](x) - limit(x)|`
/// over an x-grid for each degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformConvergence {
    pub operator: OperatorId,
    pub function: String,
    pub scheme: Option<String>,
    pub n_list: Vec<u32>,
    pub sup_scaled_error: Vec<f64>,
    pub fitted_rate: Option<f64>,
}

impl Verifier {
    /// Scaled errors `n[L_n f - f](x) - limit` along `n_list`.
    pub fn check_voronovskaya_limit(
        &self,
        op: OperatorId,
        f: &TestFunction,
        x: f64,
        n_list: &[u32],
        scheme: Option<&CoefficientScheme>,
    ) -> Result<ConvergenceReport> {
        if n_list.len() < 4 || n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("n_list must be strictly increasing with at least 4 entries".into()));
        }
        if !f.smoothness().is_at_least_c(2) || f.max_derivative() < 2 {
            return Err(Error::InvalidInput(format!("`{}` is not in C^2", f.name())));
        }
        let l1 = effective_limit(op, scheme)?;
        let limit = voronovskaya_limit(op, f, x, l1)?;
        let fx = f.eval(x);
        let mut scaled = Vec::with_capacity(n_list.len());
        for &n in n_list {
            let value = self.ops.apply(op, f, n, x, scheme)?;
            let e = f64::from(n) * (value - fx) - limit;
            if !e.is_finite() {
                return Err(Error::NonFinite(format!("scaled error of {op} on {} at n = {n}", f.name())));
            }
            scaled.push(e);
        }
        Ok(ConvergenceReport {
            operator: op,
            function: f.name().to_string(),
            scheme: scheme.map(|s| s.label().to_string()),
            x,
            n_list: n_list.to_vec(),
            fitted_rate: fit_rate(n_list, &scaled),
            scaled_error: scaled,
            limit,
            limit_formula: limit_formula(op, l1),
        })
    }

    /// Sup over `x_grid` of the scaled errors along `n_list`. Pointwise errors
    /// may change sign before the asymptotic regime; the sup does not.
    pub fn check_voronovskaya_uniform(
        &self,
        op: OperatorId,
        f: &TestFunction,
        x_grid: &[f64],
        n_list: &[u32],
        scheme: Option<&CoefficientScheme>,
    ) -> Result<UniformConvergence> {
        if n_list.len() < 4 || n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("n_list must be strictly increasing with at least 4 entries".into()));
        }
        if x_grid.is_empty() || x_grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidInput("x-grid must be a non-empty subset of [0, 1]".into()));
        }
        if !f.smoothness().is_at_least_c(2) || f.max_derivative() < 2 {
            return Err(Error::InvalidInput(format!("`{}` is not in C^2", f.name())));
        }
        let l1 = effective_limit(op, scheme)?;
        let limits = x_grid.iter().map(|&x| voronovskaya_limit(op, f, x, l1)).collect::<Result<Vec<_>>>()?;
        let mut sup = Vec::with_capacity(n_list.len());
        for &n in n_list {
            let image = self.ops.image(op, f, n, scheme)?;
            let mut worst = 0.0f64;
            for (&x, limit) in x_grid.iter().zip(&limits) {
                let e = (f64::from(n) * (image.value(x)? - f.eval(x)) - limit).abs();
                if !e.is_finite() {
                    return Err(Error::NonFinite(format!("scaled error of {op} on {} at n = {n}", f.name())));
                }
                worst = worst.max(e);
            }
            sup.push(worst);
        }
        Ok(UniformConvergence {
            operator: op,
            function: f.name().to_string(),
            scheme: scheme.map(|s| s.label().to_string()),
            n_list: n_list.to_vec(),
            fitted_rate: fit_rate(n_list, &sup),
            sup_scaled_error: sup,
        })
    }

    /// Checks `Δ_n(x) <= RHS(x)` for the M1 operator of the theorem's family.
    pub fn check_voronovskaya_quantitative(
        &self,
        theorem: TheoremId,
        f: &TestFunction,
        n: u32,
        scheme: &CoefficientScheme,
        x_grid: &[f64],
    ) -> Result<BoundReport> {
        let family = theorem
            .voronovskaya_family()
            .ok_or_else(|| Error::InvalidInput(format!("{theorem} is not a Voronovskaya bound")))?;
        if let Some(skipped) = self.preflight(theorem, f, n, Some(scheme), x_grid)? {
            return Ok(skipped);
        }
        let op = OperatorId::m1(family);
        let l1 = scheme.limit().ok_or_else(|| Error::MissingLimit(scheme.label().to_string()))?;
        let image = self.ops.image(op, f, n, Some(scheme))?;
        let mut book = self.book(f);
        let nf = f64::from(n);
        let sup1 = book.sup(1)?;
        let sup2 = book.sup(2)?;
        let gap_term = (l1 - scheme.a1(n)).abs() * sup1;
        let tilt = (1.0 + l1).abs();

        let mut lhs = Vec::with_capacity(x_grid.len());
        let mut rhs = Vec::with_capacity(x_grid.len());
        for &x in x_grid {
            let limit = voronovskaya_limit(op, f, x, l1)?;
            lhs.push((nf * (image.value(x)? - f.eval(x)) - limit).abs());
            let xx = x * (1.0 - x);
            let dx = (1.0 - 2.0 * x).abs();
            let bound = match family {
                Family::Bernstein => {
                    let spread = 3.0 * (nf - 2.0) * xx + 1.0;
                    let r = (spread / (nf * nf)).sqrt();
                    let h = 1.0 / nf.sqrt();
                    xx * (5.0 / 6.0 * dx / spread.sqrt() * book.w1(2, r)? + 13.0 / 16.0 * book.w2(2, r)?)
                        + dx / 2.0 * (gap_term + tilt * (13.0 / 4.0 * book.w2(1, h)? + h * book.w1(1, h)?))
                }
                Family::Kantorovich => {
                    let h = 1.0 / (nf + 1.0).sqrt();
                    2.0 / (3.0 * (nf + 1.0)) * (0.75 * sup1 + sup2)
                        + 9.0 / 32.0 * (2.0 * h * book.w1(2, h)? + book.w2(2, h)?)
                        + gap_term / 2.0
                        + tilt / 2.0 * (sup1 / (nf + 1.0) + h * book.w1(1, h)? + 9.0 / 8.0 * book.w2(1, h)?)
                }
                Family::Durrmeyer => {
                    let h = 1.0 / (nf + 4.0).sqrt();
                    let g = (2.0 / (nf + 2.0)).sqrt();
                    (2.0 * sup1 + 3.0 * sup2) / (nf + 2.0)
                        + 5.0 * h * book.w1(2, h)?
                        + 9.0 / 8.0 * book.w2(2, h)?
                        + 0.5
                            * (gap_term
                                + tilt
                                    * (2.0 / (nf + 2.0) * derivative(f, 1, x)?.abs()
                                        + g * book.w1(1, g)?
                                        + 9.0 / 8.0 * book.w2(1, g)?))
                }
                Family::Genuine => {
                    let r = (3.0 / (nf + 2.0)).sqrt();
                    let h = 1.0 / (nf + 1.0).sqrt();
                    5.0 * 6f64.sqrt() / 12.0 * book.w1(2, r)?
                        + 13.0 / 32.0 * book.w2(2, r)?
                        + 9.0 / 8.0 * book.w2(0, (2.0 / (nf + 1.0)).sqrt())?
                        + 0.5 * (gap_term + tilt * (h * book.w1(1, h)? + 1.25 * book.w2(1, h)?))
                }
            };
            rhs.push(bound);
        }
        assemble(
            theorem,
            f.name(),
            n,
            Some(scheme),
            x_grid,
            lhs,
            rhs,
            None,
            book.exact,
            DEFAULT_TOLERANCE,
            Some(format!("limit: {}", limit_formula(op, l1))),
        )
    }

    /// Corollary rate for `f ∈ C^4`: `n · (sup Δ_n - additive gap term)`
    /// should stay bounded along `n_list`.
    pub fn check_corollary_rate(
        &self,
        theorem: TheoremId,
        f: &TestFunction,
        scheme: &CoefficientScheme,
        n_list: &[u32],
        x_grid: &[f64],
    ) -> Result<RateReport> {
        if theorem.voronovskaya_family().is_none() {
            return Err(Error::InvalidInput(format!("{theorem} has no corollary rate")));
        }
        if !f.smoothness().is_at_least_c(4) {
            return Err(Error::InvalidInput(format!("`{}` is not in C^4", f.name())));
        }
        if n_list.len() < 2 || n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("n_list must be strictly increasing".into()));
        }
        let l1 = scheme.limit().ok_or_else(|| Error::MissingLimit(scheme.label().to_string()))?;
        let sup1 = crate::moduli::sup_norm(f, 1)?;
        let mut sup_delta = Vec::new();
        let mut additive = Vec::new();
        let mut scaled = Vec::new();
        for &n in n_list {
            let report = self.check_voronovskaya_quantitative(theorem, f, n, scheme, x_grid)?;
            if report.lhs.is_empty() {
                return Err(Error::InvalidInput(format!("{theorem} hypotheses fail at n = {n}")));
            }
            let sup = report.lhs_max();
            let add = 0.5 * (l1 - scheme.a1(n)).abs() * sup1;
            sup_delta.push(sup);
            additive.push(add);
            scaled.push(f64::from(n) * (sup - add).max(0.0));
        }
        let half = scaled.len() / 2;
        let head = scaled[..half].iter().cloned().fold(0.0, f64::max);
        let tail = scaled[half..].iter().cloned().fold(0.0, f64::max);
        Ok(RateReport {
            theorem,
            function: f.name().to_string(),
            scheme: scheme.label().to_string(),
            n_list: n_list.to_vec(),
            sup_delta,
            additive,
            scaled,
            bounded: tail <= 2.0 * head + 1e-9,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{by_name, monomial, standard_corpus};
    use crate::verify::{uniform_grid, Status};
    use approx::assert_abs_diff_eq;

    #[test]
    fn bernstein_e2_scaled_error_vanishes() {
        let v = Verifier::default();
        let r = v
            .check_voronovskaya_limit(
                OperatorId::classic(Family::Bernstein),
                &monomial(2),
                0.3,
                &[1, 2, 5, 17, 64],
                None,
            )
            .unwrap();
        assert!(r.scaled_error.iter().all(|e| e.abs() <= 1e-12));
        assert_eq!(r.fitted_rate, None);
    }

    #[test]
    fn m1_limit_example() {
        let s = CoefficientScheme::constant(0.0);
        let limit = voronovskaya_limit(OperatorId::m1(Family::Bernstein), &monomial(2), 0.25, 0.0).unwrap();
        // X f''/2 + (1-2x)/2 · f' = 0.1875 + 0.125
        assert_abs_diff_eq!(limit, 0.3125, epsilon = 1e-16);
        let v = Verifier::default();
        let r = v
            .check_voronovskaya_limit(
                OperatorId::m1(Family::Bernstein),
                &monomial(2),
                0.25,
                &[16, 64, 256, 1024, 2048],
                Some(&s),
            )
            .unwrap();
        assert!(r.scaled_error.windows(2).all(|w| w[1].abs() < w[0].abs()));
        assert!(r.scaled_error.last().unwrap().abs() < 1e-3);
    }

    #[test]
    fn durrmeyer_e2_limit() {
        let v = Verifier::default();
        let r = v
            .check_voronovskaya_limit(
                OperatorId::classic(Family::Durrmeyer),
                &monomial(2),
                0.5,
                &[8, 16, 32, 64, 128],
                None,
            )
            .unwrap();
        assert_abs_diff_eq!(r.limit, 0.5, epsilon = 1e-16);
        // D_n(e2; x) = (n(n-1)x² + 4nx + 2) / ((n+2)(n+3))
        for (n, e) in r.n_list.iter().zip(&r.scaled_error) {
            let nf = f64::from(*n);
            let d = (nf * (nf - 1.0) / 4.0 + 2.0 * nf + 2.0) / ((nf + 2.0) * (nf + 3.0));
            assert_abs_diff_eq!(*e, nf * (d - 0.25) - 0.5, epsilon = 1e-11);
        }
        let rate = r.fitted_rate.unwrap();
        assert!((rate + 1.0).abs() < 0.1, "{rate}");
    }

    #[test]
    fn limit_checks_reject_bad_input() {
        let v = Verifier::default();
        let b = OperatorId::classic(Family::Bernstein);
        let e2 = monomial(2);
        assert!(v.check_voronovskaya_limit(b, &e2, 0.3, &[4, 8, 16], None).is_err());
        assert!(v.check_voronovskaya_limit(b, &e2, 0.3, &[4, 8, 8, 16], None).is_err());
        assert!(v.check_voronovskaya_limit(b, &by_name("abs_half").unwrap(), 0.3, &[4, 8, 16, 32], None).is_err());
        let no_limit = CoefficientScheme::from_fn("a1=sin(n)", |n| f64::from(n).sin(), None);
        assert!(matches!(
            v.check_voronovskaya_limit(OperatorId::m1(Family::Bernstein), &e2, 0.3, &[4, 8, 16, 32], Some(&no_limit)),
            Err(Error::MissingLimit(_))
        ));
        assert!(v.check_voronovskaya_limit(OperatorId::bernstein_m2(), &e2, 0.3, &[4, 8, 16, 32], None).is_err());
    }

    #[test]
    fn quantitative_examples() {
        let v = Verifier::default();
        let grid = uniform_grid(101);
        let classic = CoefficientScheme::constant(-1.0);
        let r = v.check_voronovskaya_quantitative(TheoremId::VORON_B_M1, &monomial(2), 16, &classic, &grid).unwrap();
        assert!(r.lhs.iter().all(|&l| l <= 1e-12));
        assert_eq!(r.status, Status::Pass);

        let zero = CoefficientScheme::constant(0.0);
        let r = v.check_voronovskaya_quantitative(TheoremId::VORON_K_M1, &monomial(1), 8, &zero, &grid).unwrap();
        // n[K^{M1}_n e1 - e1] - (1-2x) = -(1-2x)/(n+1), against a constant RHS of 1/(n+1)
        for (x, l) in grid.iter().zip(&r.lhs) {
            assert_abs_diff_eq!(*l, (1.0 - 2.0 * x).abs() / 9.0, epsilon = 1e-13);
        }
        assert!(r.rhs.iter().all(|&b| (b - 1.0 / 9.0).abs() <= 1e-15));
        assert_eq!(r.status, Status::Pass);

        for s in CoefficientScheme::standard_set() {
            let r = v.check_voronovskaya_quantitative(TheoremId::VORON_D_M1, &monomial(0), 10, &s, &grid).unwrap();
            assert!(r.lhs.iter().all(|&l| l <= 1e-12));
            assert_eq!(r.status, Status::Pass);
        }
    }

    #[test]
    fn every_quantitative_bound_holds_on_the_corpus() {
        let v = Verifier::default();
        let grid = uniform_grid(41);
        for f in standard_corpus() {
            for t in TheoremId::VORONOVSKAYA {
                for s in CoefficientScheme::standard_set() {
                    for n in [3u32, 8, 20] {
                        let r = v.check_voronovskaya_quantitative(t, &f, n, &s, &grid).unwrap();
                        assert!(
                            matches!(r.status, Status::Pass | Status::Skipped),
                            "{t} {} {} n={n}: {:?}",
                            f.name(),
                            s.label(),
                            r.worst_margin
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn reduction_to_classical_lhs() {
        // with a1 = -1 the M1 Voronovskaya LHS equals the classical one
        let v = Verifier::default();
        let s = CoefficientScheme::constant(-1.0);
        let f = by_name("exp").unwrap();
        let grid = uniform_grid(21);
        let r = v.check_voronovskaya_quantitative(TheoremId::VORON_D_M1, &f, 16, &s, &grid).unwrap();
        let classic = v.check_direct(TheoremId::D_CLASSIC_VORON, &f, 16, None, &grid).unwrap();
        for (a, b) in r.lhs.iter().zip(&classic.lhs) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn corollary_rate_for_smooth_functions() {
        let v = Verifier::default();
        let grid = uniform_grid(21);
        let f = by_name("sin_pi").unwrap();
        for t in TheoremId::VORONOVSKAYA {
            let r = v
                .check_corollary_rate(t, &f, &CoefficientScheme::reciprocal(), &[8, 16, 32, 64, 128, 256], &grid)
                .unwrap();
            assert!(r.bounded, "{t}: {:?}", r.scaled);
        }
        assert!(v
            .check_corollary_rate(
                TheoremId::VORON_B_M1,
                &by_name("xlogx").unwrap(),
                &CoefficientScheme::constant(0.0),
                &[8, 16],
                &grid
            )
            .is_err());
    }

    #[test]
    fn fit_rate_recovers_slopes() {
        let ns = [16u32, 32, 64, 128, 256, 512];
        let errs: Vec<f64> = ns.iter().map(|&n| 3.0 / f64::from(n)).collect();
        assert_abs_diff_eq!(fit_rate(&ns, &errs).unwrap(), -1.0, epsilon = 1e-12);
        let errs: Vec<f64> = ns.iter().map(|&n| -0.5 / f64::from(n).powi(2)).collect();
        assert_abs_diff_eq!(fit_rate(&ns, &errs).unwrap(), -2.0, epsilon = 1e-12);
        assert_eq!(fit_rate(&ns, &[0.0; 6]), None);
    }
}

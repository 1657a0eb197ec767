//! Direct estimates: `|L_n f - f|` against moduli-based bounds.

use super::moments::{sigma_durrmeyer, sigma_genuine};
use super::{assemble, BoundReport, TheoremId, Verifier, DEFAULT_TOLERANCE};
use crate::basis::CoefficientScheme;
use crate::corpus::TestFunction;
use crate::error::{Error, Result};
use crate::operators::{Family, Image, OperatorId};

impl Verifier {
    /// Checks one direct estimate on `x_grid`.
    ///
    /// Sup-norm statements compare the pointwise LHS with a constant RHS, so the
    /// worst margin is `RHS - max LHS` over the grid.
    pub fn check_direct(
        &self,
        theorem: TheoremId,
        f: &TestFunction,
        n: u32,
        scheme: Option<&CoefficientScheme>,
        x_grid: &[f64],
    ) -> Result<BoundReport> {
        if theorem.voronovskaya_family().is_some() || theorem == TheoremId::B_M2_MOMENTS {
            return Err(Error::InvalidInput(format!("{theorem} is not a direct estimate")));
        }
        if let Some(skipped) = self.preflight(theorem, f, n, scheme, x_grid)? {
            return Ok(skipped);
        }
        let mut book = self.book(f);
        let nf = f64::from(n);
        let image = |op: OperatorId, s: Option<&CoefficientScheme>| self.ops.image(op, f, n, s);
        let error_at = |img: &Image, x: f64| -> Result<f64> { Ok((img.value(x)? - f.eval(x)).abs()) };
        // |(1 + a1)(1/2 - x)|: the size of the M1 perturbation at x
        let tilt = |x: f64| scheme.map_or(0.0, |s| ((1.0 + s.a1(n)) * (0.5 - x)).abs());

        let mut lhs = Vec::with_capacity(x_grid.len());
        let mut rhs = Vec::with_capacity(x_grid.len());
        let mut margin = None;
        let mut note = None;
        match theorem {
            TheoremId::B_PALTANEA => {
                let b = image(OperatorId::classic(Family::Bernstein), None)?;
                let bound = book.w2(0, 1.0 / nf.sqrt())?;
                for &x in x_grid {
                    lhs.push(error_at(&b, x)?);
                    rhs.push(bound);
                }
            }
            TheoremId::B_M1_DIRECT | TheoremId::K_M1_DIRECT => {
                let family = if theorem == TheoremId::B_M1_DIRECT { Family::Bernstein } else { Family::Kantorovich };
                let m1 = image(OperatorId::m1(family), scheme)?;
                let classic = image(OperatorId::classic(family), None)?;
                let step = if family == Family::Bernstein { 1.0 / nf } else { 1.0 / (nf + 1.0) };
                let w = book.w1(0, step)?;
                for &x in x_grid {
                    lhs.push(error_at(&m1, x)?);
                    rhs.push(error_at(&classic, x)? + tilt(x) * w);
                }
            }
            TheoremId::B_M1_THM9 => {
                let m1 = image(OperatorId::m1(Family::Bernstein), scheme)?;
                let a1 = scheme.map_or(0.0, |s| s.a1(n));
                let bound = 2.0 * (3.0 * a1.abs() + 1.0) * book.w1(0, 1.0 / nf.sqrt())?;
                for &x in x_grid {
                    lhs.push(error_at(&m1, x)?);
                    rhs.push(bound);
                }
            }
            TheoremId::B_M2_DIRECT => {
                // the inequality derived in the proof, valid for all continuous f
                let m2 = image(OperatorId::bernstein_m2(), None)?;
                let bound =
                    nf / 8.0 * book.w2(0, 1.0 / nf)? + book.w2(0, 1.0 / (nf - 2.0).sqrt())? + book.w1(0, 2.0 / nf)?;
                for &x in x_grid {
                    lhs.push(error_at(&m2, x)?);
                    rhs.push(bound);
                }
                note = Some("RHS: (n/8) w2(f;1/n) + w2(f;1/sqrt(n-2)) + w1(f;2/n)".to_string());
            }
            TheoremId::K_CLASSIC_DIRECT => {
                let k = image(OperatorId::classic(Family::Kantorovich), None)?;
                let h = 1.0 / (nf + 1.0).sqrt();
                let bound = h / 2.0 * book.w1(0, h)? + 9.0 / 8.0 * book.w2(0, h)?;
                for &x in x_grid {
                    lhs.push(error_at(&k, x)?);
                    rhs.push(bound);
                }
            }
            TheoremId::D_CLASSIC_VORON => {
                let d = image(OperatorId::classic(Family::Durrmeyer), None)?;
                let h = 1.0 / (nf + 4.0).sqrt();
                let bound = (2.0 * book.sup(1)? + 3.0 * book.sup(2)?) / (nf + 2.0)
                    + 5.0 * h * book.w1(2, h)?
                    + 9.0 / 8.0 * book.w2(2, h)?;
                for &x in x_grid {
                    let limit = (1.0 - 2.0 * x) * derivative(f, 1, x)? + x * (1.0 - x) * derivative(f, 2, x)?;
                    lhs.push((nf * (d.value(x)? - f.eval(x)) - limit).abs());
                    rhs.push(bound);
                }
            }
            TheoremId::D_M1_DIRECT | TheoremId::U_M1_DIRECT => {
                let family = if theorem == TheoremId::D_M1_DIRECT { Family::Durrmeyer } else { Family::Genuine };
                let m1 = image(OperatorId::m1(family), scheme)?;
                let classic = image(OperatorId::classic(family), None)?;
                // gap between consecutive functional means: 1/(n+2) for D, 1/n for U
                let gap = if family == Family::Durrmeyer { 1.0 / (nf + 2.0) } else { 1.0 / nf };
                for &x in x_grid {
                    let sigma = if family == Family::Durrmeyer { sigma_durrmeyer(n, x) } else { sigma_genuine(n, x) };
                    let h = sigma.sqrt();
                    let perturbation = 3.0 * book.w2(0, h)? + 5.0 * gap / h * book.w1(0, h)?;
                    lhs.push(error_at(&m1, x)?);
                    rhs.push(error_at(&classic, x)? + tilt(x) * perturbation);
                }
            }
            TheoremId::DERIV_BOUND_B => {
                // |(B_n f)'(x)| <= n w1(f; 1/n) <= ||f'||: margin is the tighter of both gaps
                let b = image(OperatorId::classic(Family::Bernstein), None)?;
                let bound = nf * book.w1(0, 1.0 / nf)?;
                let sup = book.sup(1)?;
                let mut gaps = Vec::with_capacity(x_grid.len());
                for &x in x_grid {
                    let l = b.derivative(x)?.abs();
                    lhs.push(l);
                    rhs.push(bound);
                    gaps.push((bound - l).min(sup - bound));
                }
                margin = Some(gaps);
                note = Some(format!("margin = min(rhs - lhs, ||f'|| - rhs), ||f'|| = {sup:.16e}"));
            }
            _ => unreachable!("dispatched above"),
        }
        assemble(theorem, f.name(), n, scheme, x_grid, lhs, rhs, margin, book.exact, DEFAULT_TOLERANCE, note)
    }
}

pub(super) fn derivative(f: &TestFunction, order: usize, x: f64) -> Result<f64> {
    f.d(order, x).ok_or_else(|| Error::DerivativeUnavailable { function: f.name().to_string(), order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{by_name, monomial, standard_corpus};
    use crate::verify::{uniform_grid, Status};
    use approx::assert_abs_diff_eq;

    #[test]
    fn paltanea_on_e2() {
        let v = Verifier::default();
        let r = v.check_direct(TheoremId::B_PALTANEA, &monomial(2), 16, None, &uniform_grid(101)).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_abs_diff_eq!(r.lhs_max(), 1.0 / 64.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.rhs[0], 0.125, epsilon = 1e-15);
    }

    #[test]
    fn m1_direct_on_e1_is_tight_at_the_centre() {
        let v = Verifier::default();
        let s = CoefficientScheme::constant(0.0);
        let r = v.check_direct(TheoremId::B_M1_DIRECT, &monomial(1), 8, Some(&s), &[0.5]).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_abs_diff_eq!(r.worst_margin.unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.lhs[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn kantorovich_classic_examples() {
        let v = Verifier::default();
        let grid = uniform_grid(101);
        let r = v.check_direct(TheoremId::K_CLASSIC_DIRECT, &monomial(0), 5, None, &grid).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(r.lhs.iter().all(|&l| l <= 1e-15));
        // e1 attains the bound: |K_n e1 - e1| = |1 - 2x| / (2(n+1))
        let r = v.check_direct(TheoremId::K_CLASSIC_DIRECT, &monomial(1), 5, None, &grid).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_abs_diff_eq!(r.lhs_max(), 1.0 / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.worst_margin.unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn derivative_bound_examples() {
        let v = Verifier::default();
        let grid = uniform_grid(101);
        let r = v.check_direct(TheoremId::DERIV_BOUND_B, &monomial(1), 7, None, &grid).unwrap();
        assert!(r.lhs.iter().all(|&l| (l - 1.0).abs() <= 1e-13));
        assert_eq!(r.status, Status::Pass);
        let r = v.check_direct(TheoremId::DERIV_BOUND_B, &monomial(2), 10, None, &[1.0]).unwrap();
        assert_abs_diff_eq!(r.lhs[0], 1.9, epsilon = 1e-13);
        assert!(r.rhs[0] <= 2.0);
        assert_eq!(r.status, Status::Pass);
        let r = v.check_direct(TheoremId::DERIV_BOUND_B, &by_name("sin_pi").unwrap(), 16, None, &grid).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(r.note.unwrap().contains("3.14159"));
    }

    #[test]
    fn hypotheses_are_skipped_not_failed() {
        let v = Verifier::default();
        let grid = uniform_grid(11);
        let s = CoefficientScheme::constant(1.0);
        let r = v.check_direct(TheoremId::B_M1_THM9, &monomial(2), 2, Some(&s), &grid).unwrap();
        assert_eq!(r.status, Status::Skipped);
        let r = v.check_direct(TheoremId::D_CLASSIC_VORON, &by_name("abs_half").unwrap(), 8, None, &grid).unwrap();
        assert_eq!(r.status, Status::Skipped);
        assert!(r.note.unwrap().contains("C^2"));
        assert!(v.check_direct(TheoremId::B_M1_DIRECT, &monomial(2), 8, None, &grid).is_err());
        assert!(v.check_direct(TheoremId::B_PALTANEA, &monomial(2), 8, Some(&s), &grid).is_err());
        assert!(v.check_direct(TheoremId::VORON_B_M1, &monomial(2), 8, Some(&s), &grid).is_err());
    }

    #[test]
    fn every_direct_estimate_holds_on_the_corpus() {
        let v = Verifier::default();
        let grid = uniform_grid(41);
        for f in standard_corpus() {
            for t in TheoremId::DIRECT {
                for n in [3u32, 4, 9, 32] {
                    let schemes = if t.needs_scheme() {
                        CoefficientScheme::standard_set().into_iter().map(Some).collect()
                    } else {
                        vec![None]
                    };
                    for s in schemes {
                        let r = v.check_direct(t, &f, n, s.as_ref(), &grid).unwrap();
                        assert!(
                            matches!(r.status, Status::Pass | Status::Skipped),
                            "{t} {} n={n} {:?}: worst {:?}",
                            f.name(),
                            r.scheme,
                            r.worst_margin
                        );
                        if r.status == Status::Pass {
                            assert!(r.moduli_exact);
                        }
                    }
                }
            }
        }
    }
}

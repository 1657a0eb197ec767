//! Batch runs over theorems × corpus × schemes × degrees.
//!
//! Jobs are independent and fanned out over scoped threads; results are
//! gathered by job index and then sorted into a canonical order, so a run's
//! output does not depend on scheduling.

use std::cmp::Ordering;
use std::thread;

use serde::{Deserialize, Serialize};

use super::{uniform_grid, BoundReport, ConvergenceReport, Status, TheoremId, Verifier, DEFAULT_X_POINTS};
use crate::basis::CoefficientScheme;
use crate::corpus::{standard_corpus, TestFunction};
use crate::error::Result;
use crate::operators::{Family, OperatorId};

/// What a suite run covers.
#[derive(Clone)]
pub struct SuiteConfig {
    pub corpus: Vec<TestFunction>,
    pub schemes: Vec<CoefficientScheme>,
    /// Degrees of the direct estimates.
    pub direct_n: Vec<u32>,
    /// Degrees of the quantitative Voronovskaya bounds.
    pub voronovskaya_n: Vec<u32>,
    /// Degrees of the moment identities.
    pub moment_n: Vec<u32>,
    /// Degree sequence of the Voronovskaya limit checks.
    pub convergence_n: Vec<u32>,
    /// Points at which the limit checks are run.
    pub convergence_x: Vec<f64>,
    pub x_points: usize,
    /// Worker threads; `0` uses the available parallelism.
    pub threads: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            corpus: standard_corpus(),
            schemes: CoefficientScheme::standard_set(),
            direct_n: vec![4, 5, 7, 8, 11, 16, 23, 32, 45, 64],
            voronovskaya_n: vec![8, 16, 32, 64],
            moment_n: vec![2, 4, 8, 16, 32, 50],
            convergence_n: vec![16, 32, 64, 128, 256, 512, 1024],
            convergence_x: vec![0.3, 0.7],
            x_points: DEFAULT_X_POINTS,
            threads: 0,
        }
    }
}

impl std::fmt::Debug for SuiteConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SuiteConfig")
            .field("corpus", &self.corpus.iter().map(|c| c.name()).collect::<Vec<_>>())
            .field("schemes", &self.schemes.iter().map(|s| s.label()).collect::<Vec<_>>())
            .field("direct_n", &self.direct_n)
            .field("voronovskaya_n", &self.voronovskaya_n)
            .field("moment_n", &self.moment_n)
            .field("convergence_n", &self.convergence_n)
            .field("convergence_x", &self.convergence_x)
            .field("x_points", &self.x_points)
            .finish()
    }
}

/// Collected reports in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub bounds: Vec<BoundReport>,
    pub convergence: Vec<ConvergenceReport>,
}

impl SuiteReport {
    pub fn count(&self, status: Status) -> usize {
        self.bounds.iter().filter(|r| r.status == status).count()
    }

    pub fn hard_failures(&self) -> impl Iterator<Item = &BoundReport> {
        self.bounds.iter().filter(|r| r.status.is_hard_failure())
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.bounds.extend(other.bounds);
        self.convergence.extend(other.convergence);
        self.sort();
    }

    /// Sorts by (theorem, function, scheme, n) and (operator, function, scheme, x).
    pub fn sort(&mut self) {
        self.bounds.sort_by(|a, b| {
            (a.theorem.name(), &a.function, &a.scheme, a.n).cmp(&(b.theorem.name(), &b.function, &b.scheme, b.n))
        });
        self.convergence.sort_by(|a, b| {
            (a.operator.to_string(), &a.function, &a.scheme)
                .cmp(&(b.operator.to_string(), &b.function, &b.scheme))
                .then(a.x.partial_cmp(&b.x).unwrap_or(Ordering::Equal))
        });
    }
}

/// Runs `job` over `items` on `threads` workers, keeping input order.
fn fan_out<T: Sync, R: Send>(items: &[T], threads: usize, job: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = match threads {
        0 => thread::available_parallelism().map_or(1, |p| p.get()),
        t => t,
    }
    .clamp(1, items.len().max(1));
    let chunk = items.len().div_ceil(threads).max(1);
    let job = &job;
    thread::scope(|scope| {
        let handles: Vec<_> =
            items.chunks(chunk).map(|part| scope.spawn(move || part.iter().map(job).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("suite worker panicked")).collect()
    })
}

impl Verifier {
    /// Direct estimates over the corpus, the schemes and `config.direct_n`.
    pub fn run_direct_suite(&self, config: &SuiteConfig) -> Result<SuiteReport> {
        self.run_bounds(config, &TheoremId::DIRECT, &config.direct_n)
    }

    /// Quantitative Voronovskaya bounds over the corpus, the schemes and
    /// `config.voronovskaya_n`.
    pub fn run_voronovskaya_suite(&self, config: &SuiteConfig) -> Result<SuiteReport> {
        self.run_bounds(config, &TheoremId::VORONOVSKAYA, &config.voronovskaya_n)
    }

    /// Moment identities and σ cross-checks on `config.moment_n`.
    pub fn run_moment_suite(&self, config: &SuiteConfig) -> Result<SuiteReport> {
        let grid = uniform_grid(config.x_points);
        let mut report =
            SuiteReport { bounds: self.check_moment_identities(&config.moment_n, &grid)?, convergence: Vec::new() };
        report.sort();
        Ok(report)
    }

    /// Limit checks for every C² corpus member: each classical operator, and
    /// each M1 operator under every scheme with a limit.
    pub fn run_convergence_suite(&self, config: &SuiteConfig) -> Result<SuiteReport> {
        let mut jobs = Vec::new();
        for f in config.corpus.iter().filter(|f| f.smoothness().is_at_least_c(2) && f.max_derivative() >= 2) {
            for family in Family::ALL {
                for &x in &config.convergence_x {
                    jobs.push((OperatorId::classic(family), f, None, x));
                    for s in config.schemes.iter().filter(|s| s.limit().is_some()) {
                        jobs.push((OperatorId::m1(family), f, Some(s), x));
                    }
                }
            }
        }
        let results = fan_out(&jobs, config.threads, |(op, f, s, x)| {
            self.check_voronovskaya_limit(*op, f, *x, &config.convergence_n, *s)
        });
        let mut report = SuiteReport { bounds: Vec::new(), convergence: results.into_iter().collect::<Result<_>>()? };
        report.sort();
        Ok(report)
    }

    /// Everything: moments, direct estimates, quantitative bounds and limits.
    pub fn run_full_suite(&self, config: &SuiteConfig) -> Result<SuiteReport> {
        let mut report = self.run_moment_suite(config)?;
        report.merge(self.run_direct_suite(config)?);
        report.merge(self.run_voronovskaya_suite(config)?);
        report.merge(self.run_convergence_suite(config)?);
        Ok(report)
    }

    fn run_bounds(&self, config: &SuiteConfig, theorems: &[TheoremId], n_list: &[u32]) -> Result<SuiteReport> {
        let grid = uniform_grid(config.x_points);
        let mut jobs = Vec::new();
        for &t in theorems {
            for f in &config.corpus {
                let schemes: Vec<Option<&CoefficientScheme>> =
                    if t.needs_scheme() { config.schemes.iter().map(Some).collect() } else { vec![None] };
                for s in schemes {
                    for &n in n_list {
                        jobs.push((t, f, s, n));
                    }
                }
            }
        }
        let results = fan_out(&jobs, config.threads, |&(t, f, s, n)| self.check(t, f, n, s, &grid));
        let mut report = SuiteReport { bounds: results.into_iter().collect::<Result<_>>()?, convergence: Vec::new() };
        report.sort();
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{by_name, monomial};

    fn small() -> SuiteConfig {
        SuiteConfig {
            corpus: vec![monomial(2), by_name("abs_half").unwrap()],
            schemes: vec![CoefficientScheme::constant(0.0), CoefficientScheme::reciprocal()],
            direct_n: vec![4, 9],
            voronovskaya_n: vec![8],
            moment_n: vec![2, 5],
            convergence_n: vec![8, 16, 32, 64],
            convergence_x: vec![0.3],
            x_points: 11,
            threads: 3,
        }
    }

    #[test]
    fn fan_out_keeps_order() {
        let items: Vec<u32> = (0..37).collect();
        for threads in [0, 1, 4, 64] {
            assert_eq!(fan_out(&items, threads, |i| i * 2), items.iter().map(|i| i * 2).collect::<Vec<_>>());
        }
        assert!(fan_out(&[] as &[u32], 4, |i| *i).is_empty());
    }

    #[test]
    fn small_suite_is_sorted_and_clean() {
        let v = Verifier::default();
        let report = v.run_full_suite(&small()).unwrap();
        assert_eq!(report.hard_failures().count(), 0);
        let keys: Vec<_> =
            report.bounds.iter().map(|r| (r.theorem.name(), r.function.clone(), r.scheme.clone(), r.n)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        // e2 is C^2; abs_half is skipped by the Voronovskaya bounds
        assert!(report
            .bounds
            .iter()
            .filter(|r| r.theorem == TheoremId::VORON_U_M1 && r.function == "abs_half")
            .all(|r| r.status == Status::Skipped));
        // e2 only: 4 classic + 4 × (two schemes with limits)
        assert_eq!(report.convergence.len(), 12);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let v = Verifier::default();
        let mut cfg = small();
        let a = v.run_direct_suite(&cfg).unwrap();
        cfg.threads = 1;
        let b = v.run_direct_suite(&cfg).unwrap();
        assert_eq!(a, b);
    }
}

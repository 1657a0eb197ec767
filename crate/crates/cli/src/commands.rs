use std::collections::BTreeMap;
use std::path::PathBuf;

use bernstein_ops::corpus::standard_corpus;
use bernstein_ops::verify::{uniform_grid, SuiteConfig, SuiteReport};
use bernstein_ops::{
    BoundReport, CoefficientScheme, ConvergenceReport, OperatorId, Operators, QuadratureConfig, Status, TestFunction,
    TheoremId, Verifier,
};

use crate::config::{Command, Format, RunConfig};
use crate::error::Result;
use crate::output::{self, slug, Sink, SweepRow};

const DEFAULT_MOMENT_N: [u32; 5] = [2, 4, 8, 16, 64];
const DEFAULT_VERIFY_N: [u32; 5] = [4, 8, 16, 32, 64];
const DEFAULT_LIMIT_N: [u32; 7] = [16, 32, 64, 128, 256, 512, 1024];
const DEFAULT_LIMIT_X: [f64; 2] = [0.3, 0.7];

/// Status tally of a run and the files it wrote.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub skipped: usize,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.fail > 0 {
            1
        } else {
            0
        }
    }

    fn tally(&mut self, reports: &[BoundReport]) {
        for r in reports {
            match r.status {
                Status::Pass => self.pass += 1,
                Status::Fail => self.fail += 1,
                Status::Inconclusive => self.inconclusive += 1,
                Status::Skipped => self.skipped += 1,
            }
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<Outcome> {
    let ops = match config.quad_order {
        Some(points) => {
            Operators::new().with_quadrature(QuadratureConfig { points: Some(points), ..QuadratureConfig::default() })
        }
        None => Operators::new(),
    };
    let verifier = Verifier::new(ops);
    let sink = Sink::new(config.out.as_deref())?;
    match config.command {
        Command::Eval => eval(config, &verifier),
        Command::Sweep => sweep(config, &verifier, &sink),
        Command::Moments => moments(config, &verifier, &sink),
        Command::Verify => verify(config, &verifier, &sink),
        Command::Voronovskaya => voronovskaya(config, &verifier, &sink),
    }
}

fn functions(config: &RunConfig) -> Vec<TestFunction> {
    config.functions.clone().unwrap_or_else(standard_corpus)
}

fn grid(config: &RunConfig) -> Vec<f64> {
    config.x.clone().unwrap_or_else(|| uniform_grid(config.grid_points))
}

fn sweep_rows(config: &RunConfig, verifier: &Verifier, f: &TestFunction, xs: &[f64]) -> Result<Vec<SweepRow>> {
    let op = config.operator.expect("validated");
    let mut rows = Vec::new();
    for &n in config.n_list.as_deref().unwrap_or_default() {
        let image = verifier.operators().image(op, f, n, config.scheme.as_ref())?;
        for &x in xs {
            let value = image.value(x)?;
            let error = value - f.eval(x);
            rows.push(SweepRow {
                operator: op.to_string(),
                function: f.name().to_string(),
                scheme: config.scheme.as_ref().map(|s| s.label().to_string()),
                n,
                x,
                value,
                error,
                scaled_error: f64::from(n) * error,
            });
        }
    }
    Ok(rows)
}

fn eval(config: &RunConfig, verifier: &Verifier) -> Result<Outcome> {
    let xs = config.x.clone().unwrap_or_default();
    let fs = functions(config);
    let mut rows = Vec::new();
    for f in &fs {
        rows.extend(sweep_rows(config, verifier, f, &xs)?);
    }
    if let [row] = rows.as_slice() {
        println!("{}", row.value);
    } else {
        let body = match config.format {
            Format::Csv => output::sweep_csv(&rows)?,
            Format::Json => output::json(&rows)?,
        };
        Sink::Stdout.emit("", config.format, &body)?;
    }
    Ok(Outcome::default())
}

fn operator_stem(op: OperatorId, function: &str, scheme: Option<&str>) -> String {
    match scheme {
        Some(s) => format!("{op}__{function}__{}", slug(s)),
        None => format!("{op}__{function}"),
    }
}

fn sweep(config: &RunConfig, verifier: &Verifier, sink: &Sink) -> Result<Outcome> {
    let xs = grid(config);
    let op = config.operator.expect("validated");
    let mut outcome = Outcome::default();
    for f in &functions(config) {
        let rows = sweep_rows(config, verifier, f, &xs)?;
        let body = match config.format {
            Format::Csv => output::sweep_csv(&rows)?,
            Format::Json => output::json(&rows)?,
        };
        let stem = format!("sweep__{}", operator_stem(op, f.name(), config.scheme.as_ref().map(|s| s.label())));
        outcome.files.extend(sink.emit(&stem, config.format, &body)?);
    }
    Ok(outcome)
}

/// Writes bound reports grouped per (theorem, function) and convergence
/// reports per (operator, function, scheme), in canonical order.
fn emit_report(config: &RunConfig, sink: &Sink, mut report: SuiteReport) -> Result<Outcome> {
    report.sort();
    let mut outcome = Outcome::default();
    outcome.tally(&report.bounds);

    let mut bounds: BTreeMap<(String, String), Vec<BoundReport>> = BTreeMap::new();
    for r in report.bounds {
        bounds.entry((r.theorem.name().to_string(), r.function.clone())).or_default().push(r);
    }
    for ((theorem, function), group) in &bounds {
        let body = match config.format {
            Format::Csv => output::bounds_csv(group)?,
            Format::Json => output::json(group)?,
        };
        outcome.files.extend(sink.emit(&format!("{theorem}__{function}"), config.format, &body)?);
    }

    let mut limits: BTreeMap<String, Vec<ConvergenceReport>> = BTreeMap::new();
    for r in report.convergence {
        limits.entry(operator_stem(r.operator, &r.function, r.scheme.as_deref())).or_default().push(r);
    }
    for (stem, group) in &limits {
        let body = match config.format {
            Format::Csv => output::convergence_csv(group)?,
            Format::Json => output::json(group)?,
        };
        outcome.files.extend(sink.emit(stem, config.format, &body)?);
    }

    let total = outcome.pass + outcome.fail + outcome.inconclusive + outcome.skipped;
    if total > 0 {
        eprintln!(
            "{total} checks: {} pass, {} inconclusive, {} skipped, {} fail",
            outcome.pass, outcome.inconclusive, outcome.skipped, outcome.fail
        );
    }
    for r in bounds.values().flatten().filter(|r| r.status == Status::Fail) {
        eprintln!(
            "FAIL {} {} n={} scheme={} worst margin {:e}",
            r.theorem,
            r.function,
            r.n,
            r.scheme.as_deref().unwrap_or("-"),
            r.worst_margin.unwrap_or(f64::NAN)
        );
    }
    Ok(outcome)
}

fn moments(config: &RunConfig, verifier: &Verifier, sink: &Sink) -> Result<Outcome> {
    let n_list = config.n_list.clone().unwrap_or_else(|| DEFAULT_MOMENT_N.to_vec());
    let bounds = verifier.check_moment_identities(&n_list, &grid(config))?;
    emit_report(config, sink, SuiteReport { bounds, convergence: Vec::new() })
}

fn schemes(config: &RunConfig) -> Vec<CoefficientScheme> {
    match &config.scheme {
        Some(s) => vec![s.clone()],
        None => CoefficientScheme::standard_set(),
    }
}

fn verify(config: &RunConfig, verifier: &Verifier, sink: &Sink) -> Result<Outcome> {
    let Some(theorems) = &config.theorems else {
        let mut suite = SuiteConfig {
            corpus: functions(config),
            schemes: schemes(config),
            x_points: config.grid_points,
            ..SuiteConfig::default()
        };
        if let Some(n) = &config.n_list {
            suite.direct_n = n.clone();
            suite.voronovskaya_n = n.clone();
            suite.moment_n = n.clone();
        }
        let report = verifier.run_full_suite(&suite)?;
        return emit_report(config, sink, report);
    };

    let n_list = config.n_list.clone().unwrap_or_else(|| DEFAULT_VERIFY_N.to_vec());
    let xs = grid(config);
    let fs = functions(config);
    let mut bounds = Vec::new();
    for &t in theorems {
        if t == TheoremId::B_M2_MOMENTS {
            for &n in &n_list {
                bounds.extend(verifier.m2_moment_reports(n, &xs)?);
            }
            continue;
        }
        let schemes: Vec<Option<CoefficientScheme>> =
            if t.needs_scheme() { schemes(config).into_iter().map(Some).collect() } else { vec![None] };
        for f in &fs {
            for s in &schemes {
                for &n in &n_list {
                    bounds.push(verifier.check(t, f, n, s.as_ref(), &xs)?);
                }
            }
        }
    }
    emit_report(config, sink, SuiteReport { bounds, convergence: Vec::new() })
}

fn voronovskaya(config: &RunConfig, verifier: &Verifier, sink: &Sink) -> Result<Outcome> {
    let op = config.operator.expect("validated");
    let n_list = config.n_list.clone().unwrap_or_else(|| DEFAULT_LIMIT_N.to_vec());
    let xs = config.x.clone().unwrap_or_else(|| DEFAULT_LIMIT_X.to_vec());
    let mut convergence = Vec::new();
    for f in &functions(config) {
        for &x in &xs {
            let r = verifier.check_voronovskaya_limit(op, f, x, &n_list, config.scheme.as_ref())?;
            eprintln!(
                "{op} {} x={x}: limit {} ({}), fitted rate {}",
                f.name(),
                r.limit,
                r.limit_formula,
                r.fitted_rate.map_or("n/a (roundoff)".to_string(), |v| format!("{v:.4}"))
            );
            convergence.push(r);
        }
    }
    emit_report(config, sink, SuiteReport { bounds: Vec::new(), convergence })
}

//! Command-line surface and its validation into a [`RunConfig`].

use std::path::PathBuf;

use bernstein_ops::corpus::{by_name, standard_corpus};
use bernstein_ops::verify::DEFAULT_X_POINTS;
use bernstein_ops::{CoefficientScheme, OperatorId, TestFunction, TheoremId, Variant};
use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "bernstein", version, about = "Evaluate Bernstein-type operators and verify their estimates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate L_n f at the given degrees and points.
    Eval,
    /// Check the moment identities and σ closed forms.
    Moments,
    /// Run inequality checks; without --theorem, the full suite.
    Verify,
    /// Scaled errors n[L_n f - f](x) - limit(x) along a degree sequence.
    Voronovskaya,
    /// Plot-ready table of L_n f over degrees and an x-grid.
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    /// Operator: bernstein, kantorovich, durrmeyer, genuine, optionally
    /// suffixed with -m1 (or -m2 for bernstein).
    #[arg(long, global = true)]
    pub op: Option<String>,

    /// Variant of --op: classic, m1 or m2.
    #[arg(long, global = true)]
    pub variant: Option<String>,

    /// Coefficient scheme: classic, a1=<const> or a1=1/n.
    #[arg(long, global = true)]
    pub scheme: Option<String>,

    /// Corpus function(s), comma separated.
    #[arg(long = "fn", value_delimiter = ',', global = true)]
    pub function: Option<Vec<String>>,

    /// Degree(s), comma separated.
    #[arg(long, alias = "n-list", value_delimiter = ',', global = true)]
    pub n: Option<Vec<u32>>,

    /// Evaluation point(s), comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, global = true)]
    pub x: Option<Vec<f64>>,

    /// Points of the uniform x-grid on [0, 1].
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Theorem id(s), comma separated.
    #[arg(long, value_delimiter = ',', global = true)]
    pub theorem: Option<Vec<String>>,

    /// Directory for report files; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Gauss-Legendre points per panel for the integral operators.
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
}

/// Validated invocation.
#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub operator: Option<OperatorId>,
    pub scheme: Option<CoefficientScheme>,
    pub functions: Option<Vec<TestFunction>>,
    pub n_list: Option<Vec<u32>>,
    pub x: Option<Vec<f64>>,
    pub grid_points: usize,
    pub theorems: Option<Vec<TheoremId>>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub quad_order: Option<usize>,
}

/// Parses `classic`, `a1=<const>` or `a1=1/n`.
pub fn parse_scheme(spec: &str) -> Result<CoefficientScheme> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("classic") {
        return Ok(CoefficientScheme::classic());
    }
    let malformed = || CliError::Config(format!("malformed scheme `{spec}`; expected classic, a1=<const> or a1=1/n"));
    let value = spec.strip_prefix("a1=").ok_or_else(malformed)?.trim();
    if value == "1/n" {
        return Ok(CoefficientScheme::reciprocal());
    }
    match value.parse::<f64>() {
        Ok(c) if c.is_finite() => Ok(CoefficientScheme::constant(c)),
        _ => Err(malformed()),
    }
}

fn parse_operator(op: Option<&str>, variant: Option<&str>) -> Result<Option<OperatorId>> {
    let Some(op) = op else {
        return match variant {
            Some(_) => Err(CliError::Config("--variant needs --op".into())),
            None => Ok(None),
        };
    };
    let parsed: OperatorId = op.parse().map_err(CliError::Config)?;
    let Some(variant) = variant else {
        return Ok(Some(parsed));
    };
    let v = match variant.to_ascii_lowercase().as_str() {
        "classic" => Variant::Classic,
        "m1" => Variant::M1,
        "m2" => Variant::M2,
        other => return Err(CliError::Config(format!("unknown variant `{other}`; expected classic, m1 or m2"))),
    };
    if op.contains('-') && parsed.variant() != v {
        return Err(CliError::Config(format!("--op {op} conflicts with --variant {variant}")));
    }
    Ok(Some(OperatorId::new(parsed.family(), v).map_err(|e| CliError::Config(e.to_string()))?))
}

fn strictly_increasing(n: &[u32]) -> bool {
    n.windows(2).all(|w| w[0] < w[1])
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let o = &cli.options;
        let operator = parse_operator(o.op.as_deref(), o.variant.as_deref())?;
        let scheme = o.scheme.as_deref().map(parse_scheme).transpose()?;

        let functions = o
            .function
            .as_ref()
            .map(|names| {
                names
                    .iter()
                    .map(|name| {
                        by_name(name).ok_or_else(|| {
                            let known: Vec<String> = standard_corpus().iter().map(|f| f.name().to_string()).collect();
                            CliError::Config(format!("unknown function `{name}`; known: {}", known.join(", ")))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;

        let theorems = o
            .theorem
            .as_ref()
            .map(|ids| {
                ids.iter()
                    .map(|t| t.parse::<TheoremId>().map_err(|e| CliError::Config(e.to_string())))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;

        if let Some(x) = &o.x {
            if let Some(bad) = x.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(CliError::Config(format!("--x {bad} is outside [0, 1]")));
            }
        }
        let grid_points = o.grid.unwrap_or(DEFAULT_X_POINTS);
        if grid_points < 2 {
            return Err(CliError::Config("--grid needs at least 2 points".into()));
        }
        if o.quad_order == Some(0) {
            return Err(CliError::Config("--quad-order must be positive".into()));
        }

        let config = Self {
            command: cli.command,
            operator,
            scheme,
            functions,
            n_list: o.n.clone(),
            x: o.x.clone(),
            grid_points,
            theorems,
            out: o.out.clone(),
            format: o.format.unwrap_or_default(),
            quad_order: o.quad_order,
        };
        config.check_command()?;
        Ok(config)
    }

    fn check_command(&self) -> Result<()> {
        let needs_operator = matches!(self.command, Command::Eval | Command::Voronovskaya | Command::Sweep);
        if needs_operator {
            let op = self
                .operator
                .ok_or_else(|| CliError::Config(format!("{:?} needs --op", self.command).to_lowercase()))?;
            match (op.variant() == Variant::M1, &self.scheme) {
                (true, None) => return Err(CliError::Config(format!("{op} needs --scheme"))),
                (false, Some(_)) => return Err(CliError::Config(format!("{op} takes no --scheme"))),
                _ => {}
            }
            if self.functions.as_ref().is_none_or(|f| f.is_empty()) {
                return Err(CliError::Config("--fn is required".into()));
            }
        }
        match self.command {
            Command::Eval | Command::Sweep => {
                if self.n_list.is_none() {
                    return Err(CliError::Config("--n is required".into()));
                }
            }
            Command::Voronovskaya => {
                if let Some(n) = &self.n_list {
                    if n.len() < 4 || !strictly_increasing(n) {
                        return Err(CliError::Config(
                            "--n-list must be strictly increasing with at least 4 entries".into(),
                        ));
                    }
                }
            }
            Command::Moments | Command::Verify => {
                if self.operator.is_some() {
                    return Err(CliError::Config(format!("{:?} takes no --op", self.command).to_lowercase()));
                }
            }
        }
        if self.command == Command::Eval && self.x.is_none() {
            return Err(CliError::Config("eval needs --x".into()));
        }
        if let Some(n) = &self.n_list {
            if n.is_empty() {
                return Err(CliError::Config("--n must not be empty".into()));
            }
            if self.command == Command::Sweep && !strictly_increasing(n) {
                return Err(CliError::Config("--n-list must be strictly increasing".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> Result<RunConfig> {
        let cli = Cli::try_parse_from(std::iter::once("bernstein").chain(args.iter().copied()))
            .map_err(|e| CliError::Config(e.to_string()))?;
        RunConfig::from_cli(&cli)
    }

    #[test]
    fn scheme_specs() {
        assert_eq!(parse_scheme("classic").unwrap().a1(7), -1.0);
        assert_eq!(parse_scheme("a1=-1").unwrap().a1(7), -1.0);
        assert_eq!(parse_scheme("a1=0.5").unwrap().a1(3), 0.5);
        assert_eq!(parse_scheme("a1=1/n").unwrap().a1(4), 0.25);
        for bad in ["", "a1", "a1=", "a1=x", "a1=inf", "b1=2", "a1=1/m"] {
            assert!(parse_scheme(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn operator_and_variant() {
        let c = config(&[
            "eval",
            "--op",
            "bernstein",
            "--variant",
            "m1",
            "--scheme",
            "a1=0",
            "--fn",
            "e2",
            "--n",
            "4",
            "--x",
            "0.5",
        ])
        .unwrap();
        assert_eq!(c.operator, Some(OperatorId::m1(bernstein_ops::Family::Bernstein)));
        assert!(config(&[
            "eval",
            "--op",
            "bernstein-m1",
            "--variant",
            "classic",
            "--fn",
            "e2",
            "--n",
            "4",
            "--x",
            "0.5"
        ])
        .is_err());
        assert!(config(&["eval", "--op", "kantorovich", "--variant", "m2", "--fn", "e2", "--n", "4", "--x", "0.5"])
            .is_err());
        assert!(config(&["eval", "--op", "nope", "--fn", "e2", "--n", "4", "--x", "0.5"]).is_err());
    }

    #[test]
    fn scheme_required_iff_m1() {
        assert!(config(&["eval", "--op", "bernstein-m1", "--fn", "e2", "--n", "8", "--x", "0.5"]).is_err());
        assert!(config(&["eval", "--op", "bernstein", "--scheme", "classic", "--fn", "e2", "--n", "8", "--x", "0.5"])
            .is_err());
        assert!(config(&["eval", "--op", "bernstein", "--fn", "e2", "--n", "8", "--x", "0.5"]).is_ok());
    }

    #[test]
    fn lists_and_ranges() {
        let c =
            config(&["voronovskaya", "--op", "durrmeyer", "--fn", "exp", "--n-list", "8,16,32,64", "--x", "0.25,0.75"])
                .unwrap();
        assert_eq!(c.n_list, Some(vec![8, 16, 32, 64]));
        assert_eq!(c.x, Some(vec![0.25, 0.75]));
        assert!(config(&["voronovskaya", "--op", "durrmeyer", "--fn", "exp", "--n", "8,16,16,64"]).is_err());
        assert!(config(&["voronovskaya", "--op", "durrmeyer", "--fn", "exp", "--n", "8,16,32"]).is_err());
        assert!(config(&["eval", "--op", "bernstein", "--fn", "e2", "--n", "4", "--x", "1.5"]).is_err());
        assert!(config(&["verify", "--fn", "nope"]).is_err());
        assert!(config(&["verify", "--theorem", "B_NOPE"]).is_err());
        assert!(config(&["verify", "--op", "bernstein"]).is_err());
        assert!(config(&["sweep", "--op", "bernstein", "--fn", "e2", "--n", "8,4"]).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn constant_schemes_parse(c in -1e6f64..1e6, n in 1u32..1000) {
                let s = parse_scheme(&format!("a1={c}")).unwrap();
                prop_assert_eq!(s.a1(n), c);
            }
        }
    }
}

//! Command-line arguments and their resolution into a run configuration.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use cfinsler::identities::Suite;
use cfinsler::sampling::{sample_points, Grid};
use cfinsler::{ErrorClass, MetricSpec, Point, DEFAULT_ORDER, MAX_ORDER};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

pub const MIN_ORDER: usize = 4;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(
    name = "cfinsler",
    version,
    about = "Complex Finsler geometry lab in two complex dimensions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Built-in metrics, their parameters and domains
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Full geometry report at the given or sampled points
    Report(Common),
    /// Identity suites; exits 1 when any suite exceeds the tolerance
    Verify {
        #[command(flatten)]
        common: Common,
        /// Restrict to one suite (repeatable)
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<String>,
    },
    /// Classification flags per point and their aggregate
    Classify(Common),
    /// One CSV row per grid or sample point
    Scan(Common),
    /// Jet values of g, N, L against central finite differences
    FdCheck {
        #[command(flatten)]
        common: Common,
        /// First-difference step
        #[arg(long, default_value_t = cfinsler::fd::DEFAULT_STEP)]
        step: f64,
    },
}

#[derive(Args, Debug)]
pub struct Common {
    /// builtin:NAME or @PATH to a metric file
    #[arg(long)]
    pub metric: String,
    /// Built-in parameter (repeatable)
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    /// Jet order, 4 to 10
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    /// Pass tolerance (verify 1e-7, fd-check 1e-5, classifier 1e-8)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Sampling seed [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of seeded sample points
    #[arg(long)]
    pub samples: Option<usize>,
    /// "z=a+bi,c+di; eta=e+fi,g+hi" (repeatable)
    #[arg(long = "point", value_name = "STR")]
    pub points: Vec<String>,
    /// "z1=RE,IM; z2=RE,IM; eta=e1,e2" with each RE/IM either v or a:b:n
    #[arg(long)]
    pub grid: Option<String>,
    /// Output format; scan writes csv, everything else json by default
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug)]
pub enum Failure {
    Core(cfinsler::Error),
    /// A core error at the point with this index.
    AtPoint(usize, Point, cfinsler::Error),
    Usage(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) | Failure::AtPoint(_, _, e) => match e.class() {
                ErrorClass::Domain => EXIT_DOMAIN,
                ErrorClass::Parse => EXIT_PARSE,
                ErrorClass::Budget => EXIT_BUDGET,
            },
            Failure::Usage(_) | Failure::Io(_) => EXIT_PARSE,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::AtPoint(i, p, e) => write!(f, "point {i} ({p}): {e}"),
            Failure::Usage(s) | Failure::Io(s) => f.write_str(s),
        }
    }
}

impl From<cfinsler::Error> for Failure {
    fn from(e: cfinsler::Error) -> Self {
        Failure::Core(e)
    }
}

/// Where the points of a run come from.
#[derive(Debug)]
pub enum PointSource {
    Explicit(Vec<Point>),
    Grid(Grid),
    Samples { count: usize, seed: u64 },
}

pub struct RunConfig {
    pub spec: MetricSpec,
    pub order: usize,
    pub source: PointSource,
    pub tol: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// `default_samples` applies when no point, grid or sample count is given; `None`
    /// makes an explicit point source mandatory.
    pub fn resolve(
        c: Common,
        default_samples: Option<usize>,
        default_format: Format,
    ) -> Result<RunConfig, Failure> {
        if !(MIN_ORDER..=MAX_ORDER).contains(&c.order) {
            return Err(Failure::Usage(format!(
                "--order must be in {MIN_ORDER}..={MAX_ORDER}, got {}",
                c.order
            )));
        }
        if let Some(t) = c.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        let spec = load_metric(&c.metric, &c.params)?;
        let given = usize::from(!c.points.is_empty())
            + usize::from(c.grid.is_some())
            + usize::from(c.samples.is_some());
        if given > 1 {
            return Err(Failure::Usage(
                "give only one of --point, --grid, --samples".into(),
            ));
        }
        let seed = c.seed.unwrap_or(DEFAULT_SEED);
        let source = if !c.points.is_empty() {
            let pts = c
                .points
                .iter()
                .map(|s| {
                    s.parse::<Point>()
                        .map_err(|e| Failure::Usage(format!("--point: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            PointSource::Explicit(pts)
        } else if let Some(g) = &c.grid {
            PointSource::Grid(
                g.parse()
                    .map_err(|e| Failure::Usage(format!("--grid: {e}")))?,
            )
        } else if let Some(count) = c.samples.or(default_samples) {
            if count == 0 {
                return Err(Failure::Usage("--samples must be at least 1".into()));
            }
            PointSource::Samples { count, seed }
        } else {
            return Err(Failure::Usage(
                "this command needs --point, --grid or --samples".into(),
            ));
        };
        Ok(RunConfig {
            spec,
            order: c.order,
            source,
            tol: c.tol,
            format: c.format.unwrap_or(default_format),
            out: c.out,
        })
    }

    pub fn seed(&self) -> Option<u64> {
        match self.source {
            PointSource::Samples { seed, .. } => Some(seed),
            _ => None,
        }
    }

    pub fn points(&self) -> Result<Vec<Point>, Failure> {
        Ok(match &self.source {
            PointSource::Explicit(p) => p.clone(),
            PointSource::Grid(g) => g.points(),
            PointSource::Samples { count, seed } => sample_points(&self.spec, *count, *seed)?,
        })
    }

    pub fn require_format(&self, allowed: &[Format], verb: &str) -> Result<(), Failure> {
        if allowed.contains(&self.format) {
            Ok(())
        } else {
            let names: Vec<String> = allowed
                .iter()
                .map(|f| format!("{f:?}").to_lowercase())
                .collect();
            Err(Failure::Usage(format!(
                "{verb} supports --format {}",
                names.join("|")
            )))
        }
    }
}

fn load_metric(source: &str, params: &[String]) -> Result<MetricSpec, Failure> {
    let kv = params
        .iter()
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Failure::Usage(format!("--param expects K=V, got '{p}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(name) = source.strip_prefix("builtin:") {
        return Ok(MetricSpec::builtin(name, &kv)?);
    }
    if let Some(path) = source.strip_prefix('@') {
        if !kv.is_empty() {
            return Err(Failure::Usage(
                "--param applies to built-in metrics only".into(),
            ));
        }
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))?;
        let name = Path::new(path)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(path);
        return Ok(MetricSpec::from_dsl(name, &text)?);
    }
    Err(Failure::Usage(format!(
        "--metric expects builtin:NAME or @PATH, got '{source}'"
    )))
}

pub fn parse_suites(names: &[String]) -> Result<Vec<Suite>, Failure> {
    if names.is_empty() {
        return Ok(Suite::ALL.to_vec());
    }
    let mut out = Vec::new();
    for n in names {
        let s = Suite::from_name(n).ok_or_else(|| {
            let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            Failure::Usage(format!("unknown suite '{n}' (known: {})", known.join(", ")))
        })?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn common(args: &[&str]) -> Common {
        let mut argv = vec!["cfinsler", "report"];
        argv.extend_from_slice(args);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Report(c) => c,
            _ => unreachable!(),
        }
    }

    #[test]
    fn one_point_source_only() {
        let c = common(&[
            "--metric",
            "builtin:euclidean",
            "--samples",
            "3",
            "--point",
            "z=0,0; eta=1,0",
        ]);
        assert!(matches!(
            RunConfig::resolve(c, None, Format::Json),
            Err(Failure::Usage(_))
        ));
    }

    #[test]
    fn default_samples_and_seed() {
        let c = common(&["--metric", "builtin:euclidean"]);
        let cfg = RunConfig::resolve(c, Some(7), Format::Text).unwrap();
        assert!(matches!(
            cfg.source,
            PointSource::Samples {
                count: 7,
                seed: DEFAULT_SEED
            }
        ));
        assert_eq!(cfg.format, Format::Text);
        let c = common(&["--metric", "builtin:euclidean"]);
        assert!(RunConfig::resolve(c, None, Format::Json).is_err());
    }

    #[test]
    fn params_reach_builtin() {
        let c = common(&[
            "--metric",
            "builtin:antonelli-shimada",
            "--param",
            "sigma = disk-log",
            "--point",
            "z=0,0; eta=1,1",
        ]);
        let cfg = RunConfig::resolve(c, None, Format::Json).unwrap();
        assert!(cfg.spec.program_text.contains("1 - abs2(z1) - abs2(z2)"));
        let c = common(&["--metric", "builtin:euclidean", "--param", "sigma"]);
        assert_eq!(
            RunConfig::resolve(c, None, Format::Json)
                .err()
                .unwrap()
                .exit_code(),
            EXIT_PARSE
        );
    }

    #[test]
    fn suites_by_name() {
        assert_eq!(parse_suites(&[]).unwrap().len(), Suite::ALL.len());
        let s = parse_suites(&["bianchi".into(), "frames".into(), "bianchi".into()]).unwrap();
        assert_eq!(s, vec![Suite::Bianchi, Suite::Frames]);
    }
}

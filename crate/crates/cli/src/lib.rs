//! The `morse` command: homology of serialized complexes, surface runs,
//! products and blow-ups.

pub mod format;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use morse_core::{
    assemble_morse_complex, blowup_complex, verify_kunneth, BlowupError, ComplexError, GeometryError, MorseData,
    Sphere, Surface, Torus,
};

pub use format::{ComplexFile, FormatError, GraphFile, RunConfig};
pub use report::{BlowupReport, RunReport};

pub const DEFAULT_SPHERE_POINT: [f64; 3] = [0.0, 0.0, 2.0];
pub const DEFAULT_TORUS_POINT: [f64; 3] = [6.0, 0.4, 0.3];

#[derive(Debug, Parser)]
#[command(
    name = "morse",
    version,
    about = "Integer Morse homology from complexes, surfaces and flow graphs"
)]
pub struct Cli {
    /// Geometry run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Newton seeds per chart axis; overrides the config.
    #[arg(long, global = true)]
    pub seed_density: Option<usize>,
    /// Write the complex produced by the command to this file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Write the flow graph of a surface run to this file.
    #[arg(long, global = true)]
    pub graph_output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Homology of a complex file.
    Homology { input: PathBuf },
    /// Extract a complex from a built-in surface (`sphere` or `torus`).
    Surface { name: String },
    /// Product of two complex files, with the Kunneth cross-check.
    Product { first: PathBuf, second: PathBuf },
    /// Cells of the blown-up unstable manifold of a point in a flow graph.
    Blowup { graph: PathBuf, label: String },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: FormatError },
    #[error("{0}")]
    Usage(String),
    #[error("invalid complex: {0}")]
    Complex(ComplexError),
    #[error("invalid flow graph: {0}")]
    Graph(BlowupError),
    #[error("geometry: {0}")]
    Geometry(GeometryError),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
}

impl CliError {
    /// 2 input error, 3 `d^2 != 0`, 4 geometry failure, 5 unknown label.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Usage(_) | CliError::Graph(_) => 2,
            CliError::Write { .. } => 2,
            CliError::Complex(ComplexError::BoundarySquareNonzero { .. }) => 3,
            CliError::Complex(_) => 2,
            CliError::Geometry(GeometryError::Complex(ComplexError::BoundarySquareNonzero { .. })) => 3,
            CliError::Geometry(_) => 4,
            CliError::UnknownLabel(_) => 5,
        }
    }
}

impl From<BlowupError> for CliError {
    fn from(e: BlowupError) -> Self {
        match e {
            BlowupError::UnknownLabel(l) => CliError::UnknownLabel(l),
            other => CliError::Graph(other),
        }
    }
}

/// A finished command: the rendered report and the elapsed time.
#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub elapsed: Duration,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn parse_error(path: &Path) -> impl FnOnce(FormatError) -> CliError + '_ {
    move |source| CliError::Parse {
        path: path.display().to_string(),
        source,
    }
}

pub fn load_complex(path: &Path) -> Result<morse_core::MorseComplex, CliError> {
    let file = ComplexFile::parse(&read(path)?).map_err(parse_error(path))?;
    file.to_complex().map_err(CliError::Complex)
}

pub fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => RunConfig::parse(&read(p)?).map_err(parse_error(p)),
        None => Ok(RunConfig::default()),
    }
}

fn render<T: serde::Serialize + std::fmt::Display>(value: &T, json: bool) -> String {
    if json {
        format::pretty(value)
    } else {
        value.to_string()
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let report = match &cli.command {
        Command::Homology { input } => {
            let c = load_complex(input)?;
            emit_complex(cli, &c)?;
            render(&RunReport::new("homology", &c), cli.json)
        }
        Command::Product { first, second } => {
            let (a, b) = (load_complex(first)?, load_complex(second)?);
            let k = verify_kunneth(&a, &b).map_err(CliError::Complex)?;
            emit_complex(cli, &k.product)?;
            render(&RunReport::new("product", &k.product).with_kunneth(&k), cli.json)
        }
        Command::Surface { name } => {
            let mut config = load_config(cli.config.as_deref())?;
            if let Some(n) = cli.seed_density {
                config.seeds_per_chart = n;
            }
            let (surface, default_point): (Box<dyn Surface>, _) = match name.as_str() {
                "sphere" => (Box::new(Sphere::new(config.radius)), DEFAULT_SPHERE_POINT),
                "torus" => (
                    Box::new(Torus::new(config.major_radius, config.minor_radius)),
                    DEFAULT_TORUS_POINT,
                ),
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown surface `{other}`; try sphere or torus"
                    )))
                }
            };
            let base_point = config.base_point.unwrap_or(default_point);
            let geometry = config.geometry();
            let m = MorseData::new(surface.as_ref(), base_point, &geometry).map_err(CliError::Geometry)?;
            let run = assemble_morse_complex(&m, &geometry).map_err(CliError::Geometry)?;
            emit_complex(cli, &run.complex)?;
            if let Some(path) = &cli.graph_output {
                let nodes: Vec<_> = run.critical_points.iter().map(|p| p.id.clone()).collect();
                write(
                    path,
                    &GraphFile::new(run.complex.dimension(), &nodes, &run.graph_edges).to_json(),
                )?;
            }
            let report = RunReport::new("surface", &run.complex).with_surface(name, base_point, &run);
            render(&report, cli.json)
        }
        Command::Blowup { graph, label } => {
            if cli.output.is_some() {
                return Err(CliError::Usage("blowup produces no complex for --output".into()));
            }
            let file = GraphFile::parse(&read(graph)?).map_err(parse_error(graph))?;
            let g = file.to_graph()?;
            render(&BlowupReport::new(&blowup_complex(&g, label)?), cli.json)
        }
    };
    Ok(Outcome {
        report,
        elapsed: start.elapsed(),
    })
}

fn emit_complex(cli: &Cli, c: &morse_core::MorseComplex) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => write(path, &ComplexFile::from_complex(c).to_json()),
        None => Ok(()),
    }
}

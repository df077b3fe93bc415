//! `colorbisect`: color, initialize, refine, check and analyse simplicial
//! meshes stored as JSON.
//!
//! Exit status is 0 on success, 1 when the input is valid but fails a check
//! (non-conforming mesh, bad coloring, point outside the mesh) and 2 on I/O,
//! parse or usage errors. Failures print one JSON object on stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use colorbisect::analysis::analysis_report;
use colorbisect::io::{to_canonical_json, write_vtk};
use colorbisect::{
    check_conformity, greedy_color, initialize, refine_set, uniform_refine, BisectionRule,
    ColorMap, ColorOrder, Lcg, MarkHistory, Mesh, MeshFile, RefineOptions, SimplexId,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(
    name = "colorbisect",
    version,
    about = "Conforming bisection refinement driven by a vertex coloring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Greedy vertex coloring; writes the colors array into the mesh.
    Color {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Order::Id)]
        order: Order,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Derives generations and tags from the colors (colors greedily first if
    /// the mesh has none).
    Init {
        input: PathBuf,
        #[command(flatten)]
        init: InitArgs,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        vtk: Option<PathBuf>,
    },
    /// Adaptive refinement: each iteration marks cells and closes the mesh.
    Refine {
        input: PathBuf,
        #[command(flatten)]
        marks: MarkArgs,
        /// Number of mark-and-refine iterations.
        #[arg(long, default_value_t = 1)]
        iters: usize,
        /// Seed of the generator used by `--random`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// One JSON refinement record per iteration.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Marking history for `stats --history`.
        #[arg(long)]
        history: Option<PathBuf>,
        #[command(flatten)]
        init: InitArgs,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        vtk: Option<PathBuf>,
    },
    /// `k` uniform rounds; every cell is split into `2^n` cells per round.
    Uniform {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        #[command(flatten)]
        init: InitArgs,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        vtk: Option<PathBuf>,
    },
    /// Conformity check; prints the report and exits 1 if it fails.
    Check { input: PathBuf },
    /// Shape and closure statistics as JSON.
    Stats {
        input: PathBuf,
        /// Mesh the cell ancestors refer to.
        #[arg(long)]
        initial: Option<PathBuf>,
        /// Marking history written by `refine --history`.
        #[arg(long)]
        history: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Legacy ASCII VTK output.
    Export {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct MarkArgs {
    /// File of cell indices into the live cell list, applied every iteration.
    #[arg(long)]
    marks: Option<PathBuf>,
    /// Mark every cell containing the point, e.g. "0.5,0.5".
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Mark one cell per iteration chosen by the seeded generator.
    #[arg(long)]
    random: bool,
}

#[derive(Args, Debug)]
struct InitArgs {
    /// Rule used when the mesh still has to be initialized.
    #[arg(long, value_enum, default_value_t = Rule::Maubach)]
    rule: Rule,
    /// Coloring order used when the mesh has no colors.
    #[arg(long = "color-order", value_enum, default_value_t = Order::Id)]
    color_order: Order,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Order {
    Id,
    Valency,
}

impl From<Order> for ColorOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Id => ColorOrder::Id,
            Order::Valency => ColorOrder::Valency,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Rule {
    Maubach,
    Generation,
}

impl From<Rule> for BisectionRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Maubach => BisectionRule::Maubach,
            Rule::Generation => BisectionRule::Generation,
        }
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] colorbisect::IoError),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io(colorbisect::IoError::Json(_)) => "parse",
            CliError::Io(colorbisect::IoError::Io(_)) | CliError::File { .. } => "io",
            CliError::Io(_) => "invalid_mesh",
            CliError::Usage(_) => "usage",
            CliError::Validation(_) => "validation",
        }
    }
}

fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.into(),
        source,
    })
}

fn write_file(path: &Path, text: &[u8]) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::File {
        path: path.into(),
        source,
    })
}

fn load(path: &Path) -> Result<(MeshFile, Mesh), CliError> {
    let file = MeshFile::from_json(&read_file(path)?)?;
    let mesh = file.to_mesh()?;
    Ok((file, mesh))
}

fn save(mesh: &Mesh, path: &Path, vtk: Option<&Path>) -> Result<(), CliError> {
    write_file(path, MeshFile::from_mesh(mesh).to_json().as_bytes())?;
    if let Some(vtk) = vtk {
        export(mesh, vtk)?;
    }
    Ok(())
}

fn export(mesh: &Mesh, path: &Path) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_vtk(mesh, &mut buf).expect("writing to memory cannot fail");
    write_file(path, &buf)
}

/// Canonical JSON of any value: sorted keys and `%.17g` floats.
fn json_line<S: Serialize>(value: &S) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    to_canonical_json(&v)
}

/// Colors (if needed) and initializes a mesh that has no generations yet.
fn ensure_initialized(mesh: &mut Mesh, args: &InitArgs) -> Result<(), CliError> {
    if mesh.rule().is_some() {
        return Ok(());
    }
    let cm = match ColorMap::from_mesh(mesh) {
        Ok(cm) => cm,
        Err(_) => {
            log::info!("mesh has no colors; coloring greedily");
            greedy_color(mesh, args.color_order.into())
        }
    };
    initialize(mesh, &cm, args.rule.into()).map_err(validation)
}

fn parse_point(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad coordinate {t:?} in point {s:?}")))
        })
        .collect()
}

fn parse_marks(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad cell index {t:?} in marks file")))
        })
        .collect()
}

enum Marking {
    Indices(Vec<usize>),
    Point(Vec<f64>),
    Random(Lcg),
}

impl Marking {
    fn from_args(args: &MarkArgs, seed: u64) -> Result<Self, CliError> {
        match (&args.marks, &args.point) {
            (Some(path), _) => Ok(Marking::Indices(parse_marks(&read_file(path)?)?)),
            (_, Some(p)) => Ok(Marking::Point(parse_point(p)?)),
            _ => Ok(Marking::Random(Lcg::new(seed))),
        }
    }

    /// Marked cells of the current mesh, ascending and without repeats.
    fn select(&mut self, mesh: &Mesh) -> Result<Vec<SimplexId>, CliError> {
        let live: Vec<SimplexId> = mesh.live_ids().collect();
        let mut ids = match self {
            Marking::Indices(idx) => idx.iter().filter_map(|&i| live.get(i).copied()).collect(),
            Marking::Point(p) => colorbisect::point_mark(mesh, p).map_err(validation)?,
            Marking::Random(rng) => vec![live[rng.below(live.len())]],
        };
        ids.sort_unstable();
        ids.dedup();
        Ok(ids)
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Color {
            input,
            order,
            output,
        } => {
            let (mut file, mesh) = load(&input)?;
            let cm = greedy_color(&mesh, order.into());
            log::info!(
                "{} colors, max valency {}",
                cm.max_color() + 1,
                colorbisect::max_valency(&mesh)
            );
            if file.gens.is_some() {
                log::warn!("recoloring drops existing generations and tags");
            }
            file.colors = Some(cm.colors().iter().map(|&c| Some(c)).collect());
            file.gens = None;
            file.tags = None;
            write_file(&output, file.to_json().as_bytes())?;
        }
        Command::Init {
            input,
            init,
            output,
            vtk,
        } => {
            let (file, mut mesh) = load(&input)?;
            if file.gens.is_some() {
                log::warn!(
                    "mesh is already initialized; generations are recomputed from its colors"
                );
                mesh = MeshFile {
                    gens: None,
                    tags: None,
                    ..file
                }
                .to_mesh()?;
            }
            ensure_initialized(&mut mesh, &init)?;
            save(&mesh, &output, vtk.as_deref())?;
        }
        Command::Refine {
            input,
            marks,
            iters,
            seed,
            log,
            history,
            init,
            output,
            vtk,
        } => {
            let (_, mut mesh) = load(&input)?;
            ensure_initialized(&mut mesh, &init)?;
            let mut marking = Marking::from_args(&marks, seed)?;
            let opts = if log.is_some() {
                RefineOptions::recording()
            } else {
                RefineOptions::default()
            };
            let mut hist = MarkHistory::new(mesh.num_live());
            let mut log_text = String::new();
            for it in 0..iters {
                let ids = marking.select(&mesh)?;
                let before = mesh.num_live();
                let rec = refine_set(&mut mesh, &ids, &opts).map_err(validation)?;
                hist.push(ids.len(), before, mesh.num_live());
                log::info!(
                    "iteration {it}: {} marked, {} bisections, {} cells",
                    ids.len(),
                    rec.bisections,
                    mesh.num_live()
                );
                log_text.push_str(&json_line(&rec));
            }
            if let Some(path) = log {
                write_file(&path, log_text.as_bytes())?;
            }
            if let Some(path) = history {
                write_file(&path, json_line(&hist).as_bytes())?;
            }
            save(&mesh, &output, vtk.as_deref())?;
        }
        Command::Uniform {
            input,
            rounds,
            init,
            output,
            vtk,
        } => {
            let (_, mut mesh) = load(&input)?;
            ensure_initialized(&mut mesh, &init)?;
            uniform_refine(&mut mesh, rounds).map_err(validation)?;
            save(&mesh, &output, vtk.as_deref())?;
        }
        Command::Check { input } => {
            let (_, mesh) = load(&input)?;
            let report = check_conformity(&mesh);
            print!("{}", json_line(&report));
            if !report.ok {
                return Err(CliError::Validation(format!(
                    "mesh is not conforming: {} violation(s)",
                    report.violations.len()
                )));
            }
        }
        Command::Stats {
            input,
            initial,
            history,
            output,
        } => {
            let (_, mesh) = load(&input)?;
            let initial = initial.map(|p| load(&p).map(|(_, m)| m)).transpose()?;
            let hist: Option<MarkHistory> = history
                .map(|p| {
                    serde_json::from_str(&read_file(&p)?)
                        .map_err(|e| CliError::Io(colorbisect::IoError::Json(e)))
                })
                .transpose()?;
            let report =
                analysis_report(&mesh, initial.as_ref(), hist.as_ref()).map_err(validation)?;
            let text = json_line(&report);
            match output {
                Some(path) => write_file(&path, text.as_bytes())?,
                None => print!("{text}"),
            }
        }
        Command::Export { input, output } => {
            let (_, mesh) = load(&input)?;
            export(&mesh, &output)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            let _ = writeln!(std::io::stderr(), "{line}");
            ExitCode::from(e.exit_code())
        }
    }
}

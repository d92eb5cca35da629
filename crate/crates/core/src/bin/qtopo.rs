use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qtopo::bottleneck::diagram_set_distance;
use qtopo::encode::EncodingKind;
use qtopo::error::{Error, Result};
use qtopo::experiment::{
    point_cloud_to_csv, run_pipeline, run_qmds, BaseMetric, Comparison, Dataset, EncodingSpec,
    ExperimentConfig, DEFAULT_SEED, DEFAULT_SIGMA, OUTPUT_DIR_ENV,
};
use qtopo::mds::Schedule;
use qtopo::metric::{fmt_f64, optimal_weight, DistanceMatrix, WeightObjective};
use qtopo::ph::{
    barcodes_from_csv, barcodes_to_csv, diagrams_from_json, diagrams_to_json, rips_persistence,
};
use qtopo::quantum::{states_to_json, QuantumMetric};

#[derive(Parser)]
#[command(
    name = "qtopo",
    version,
    about = "Distortion of point-cloud geometry and topology under quantum encodings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic circle dataset.
    Gen(GenArgs),
    /// Encode a point cloud and write the encoded distance matrix.
    Encode(EncodeArgs),
    /// Vietoris-Rips persistence of a distance matrix.
    Ph(PhArgs),
    /// Per-degree bottleneck distances between two barcode files.
    Bottleneck(BottleneckArgs),
    /// Compare two distance matrices on the same index set.
    Compare(CompareArgs),
    /// Quantum MDS of a dataset onto pure states.
    Qmds(QmdsArgs),
    /// Full encode / persistence / comparison pipeline.
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetKind {
    Roots,
    Noisy,
    File,
}

#[derive(Args, Clone)]
struct DatasetArgs {
    #[arg(long, value_enum, default_value = "noisy")]
    dataset: DatasetKind,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Point cloud CSV for `--dataset file`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Use arc length instead of Euclidean distance (roots only).
    #[arg(long)]
    geodesic: bool,
}

impl DatasetArgs {
    fn dataset(&self) -> Result<Dataset> {
        Ok(match self.dataset {
            DatasetKind::Roots => Dataset::RootsOfUnity {
                n: self.n,
                r: self.r,
            },
            DatasetKind::Noisy => Dataset::NoisyCircle {
                n: self.n,
                r: self.r,
                sigma: self.sigma,
                seed: self.seed,
            },
            DatasetKind::File => Dataset::File {
                path: self
                    .input
                    .clone()
                    .ok_or_else(|| usage("--dataset file needs --input"))?,
            },
        })
    }

    fn base_metric(&self) -> BaseMetric {
        if self.geodesic {
            BaseMetric::GeodesicCircle
        } else {
            BaseMetric::Euclidean
        }
    }
}

#[derive(Args, Clone)]
struct EncodingArgs {
    #[arg(long, default_value = "sqrt", value_parser = parse_encoding)]
    encoding: EncodingKind,
    #[arg(long)]
    prescale: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    shrink: f64,
    /// Force the uniform transform on or off.
    #[arg(long)]
    uniform: Option<bool>,
    /// Quantum metric; defaults depend on the encoding and dataset.
    #[arg(long, value_parser = parse_metric)]
    metric: Option<QuantumMetric>,
    /// SWAP-test shots per pair instead of exact fidelities.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    shot_seed: u64,
}

impl EncodingArgs {
    fn spec(&self) -> EncodingSpec {
        EncodingSpec {
            kind: self.encoding,
            prescale: self.prescale,
            shrink: self.shrink,
            uniform: self.uniform,
        }
    }
}

fn parse_encoding(s: &str) -> std::result::Result<EncodingKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_metric(s: &str) -> std::result::Result<QuantumMetric, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// Write the distance matrix instead of the points.
    #[arg(long)]
    distances: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[command(flatten)]
    enc: EncodingArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write the encoded states as JSON.
    #[arg(long)]
    states: Option<PathBuf>,
}

#[derive(Args)]
struct PhArgs {
    /// Distance matrix CSV.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    max_degree: usize,
    /// Emit JSON diagrams instead of barcode CSV.
    #[arg(long)]
    json: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BottleneckArgs {
    /// Barcode CSV or diagram JSON.
    a: PathBuf,
    b: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Reference distance matrix CSV.
    x: PathBuf,
    /// Distance matrix CSV to compare against it.
    y: PathBuf,
    #[arg(long, default_value_t = 1)]
    max_degree: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON experiment config; overrides the dataset and encoding flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    data: DatasetArgs,
    #[command(flatten)]
    enc: EncodingArgs,
    #[arg(long, default_value_t = 1)]
    max_degree: usize,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
}

impl ConfigArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_json(&fs::read_to_string(p)?)?,
            None => {
                let mut c = ExperimentConfig::new(self.data.dataset()?, self.enc.spec());
                c.base_metric = self.data.base_metric();
                c.quantum_metric = self.enc.metric;
                c.max_hom_degree = self.max_degree;
                c.shots = self.enc.shots;
                c.shot_seed = self.enc.shot_seed;
                c
            }
        };
        if self.out_dir.is_some() {
            cfg.output_dir = self.out_dir.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Args)]
struct QmdsArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long, default_value_t = 2)]
    hilbert_dim: usize,
    /// Comma-separated optimiser seeds.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 200_000)]
    max_iter: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.0001")]
    rates: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    trace_every: usize,
}

fn usage(msg: &str) -> Error {
    Error::InvalidArgument(msg.to_string())
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_diagrams(p: &Path) -> Result<Vec<qtopo::PersistenceDiagram>> {
    let text = fs::read_to_string(p)?;
    if text.trim_start().starts_with('[') {
        diagrams_from_json(&text)
    } else {
        barcodes_from_csv(&text)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => {
            let cfg = {
                let mut c = ExperimentConfig::new(
                    a.data.dataset()?,
                    EncodingSpec::new(EncodingKind::Angle),
                );
                c.base_metric = a.data.base_metric();
                c.validate()?;
                c
            };
            let cloud = cfg.dataset.cloud()?;
            let text = if a.distances {
                cfg.base_distances(&cloud)?.to_csv()
            } else {
                point_cloud_to_csv(&cloud)
            };
            emit(a.output.as_deref(), &text)
        }
        Command::Encode(a) => {
            let mut cfg = ExperimentConfig::new(a.data.dataset()?, a.enc.spec());
            cfg.quantum_metric = a.enc.metric;
            cfg.validate()?;
            let cloud = cfg.dataset.cloud()?;
            let states = cfg.encoding.encode(&cloud)?;
            let d = qtopo::experiment::encoded_distance_matrix(
                &states,
                cfg.effective_metric(),
                a.enc.shots,
                a.enc.shot_seed,
            )?;
            if let Some(p) = &a.states {
                fs::write(p, states_to_json(&states)?)?;
            }
            emit(a.output.as_deref(), &d.to_csv())
        }
        Command::Ph(a) => {
            let d = DistanceMatrix::from_csv(&fs::read_to_string(&a.input)?)?;
            let dgms = rips_persistence(&d, a.max_degree)?;
            let text = if a.json {
                diagrams_to_json(&dgms)?
            } else {
                barcodes_to_csv(&dgms)
            };
            emit(a.output.as_deref(), &text)
        }
        Command::Bottleneck(a) => {
            let r = diagram_set_distance(&read_diagrams(&a.a)?, &read_diagrams(&a.b)?);
            let mut text = String::from("degree,distance\n");
            for (k, v) in r.per_degree.iter().enumerate() {
                text.push_str(&format!("{k},{}\n", fmt_f64(*v)));
            }
            emit(a.output.as_deref(), &text)
        }
        Command::Compare(a) => {
            let dx = DistanceMatrix::from_csv(&fs::read_to_string(&a.x)?)?;
            let dy = DistanceMatrix::from_csv(&fs::read_to_string(&a.y)?)?;
            let w = optimal_weight(&dx, &dy, WeightObjective::Max)?.weight;
            let gx = rips_persistence(&dx, a.max_degree)?;
            let gy = rips_persistence(&qtopo::metric::rescale(&dy, w)?, a.max_degree)?;
            emit(
                a.output.as_deref(),
                &Comparison::compute(&dx, &dy, &gx, &gy, w)?.to_csv(),
            )
        }
        Command::Pipeline(a) => {
            let cfg = a.cfg.config()?;
            let (rep, files) = run_pipeline(&cfg)?;
            print!("{}", rep.comparison.to_csv());
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Qmds(a) => {
            let cfg = a.cfg.config()?;
            let schedule = Schedule {
                rates: a.rates,
                max_iter: a.max_iter,
                trace_every: a.trace_every,
                ..Schedule::default()
            };
            let (rep, files) = run_qmds(&cfg, a.hilbert_dim, &schedule, &a.seeds)?;
            println!("seed,iterations,mean_pair_residual,normalized_distortion,fs_stress,bloch_plane_residual");
            for (r, p) in rep.runs.iter().zip(&rep.plane_residuals) {
                let q = r.quantum.expect("quantum report");
                println!(
                    "{},{},{},{},{},{}",
                    r.seed.unwrap_or_default(),
                    r.iterations,
                    fmt_f64(q.mean_pair_residual),
                    fmt_f64(q.normalized_distortion),
                    fmt_f64(q.fs_stress),
                    p.map(fmt_f64).unwrap_or_default()
                );
            }
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { 2 } else { 1 })
        }
    }
}

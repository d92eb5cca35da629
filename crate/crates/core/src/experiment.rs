//! Synthetic datasets and the end-to-end encode / persistence / MDS
//! pipelines driven by the `qtopo` binary.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bottleneck::diagram_set_distance;
use crate::encode::{
    amplitude_encode, angle_encode, dense_angle_encode, diagonal_encode, iqp_encode, sqrt_encode,
    EncodingKind, SimplexPoint, UniformTransform,
};
use crate::error::{Error, Result};
use crate::mds::{classical_mds, fs_distance_matrix, qmds, Coordinates, EmbeddingResult, Schedule};
use crate::metric::{
    diameter, distortion, euclidean_distance_matrix, fmt_f64, gh_upper_bound_identity,
    optimal_weight, parse_csv_rows, rescale, scale_free_distortion, strain, stress, DistanceMatrix,
    PointCloud, WeightObjective,
};
use crate::ph::{barcodes_to_csv, diagrams_to_json, rips_persistence, PersistenceDiagram};
use crate::quantum::{
    pure_distance_from_fidelity, state_distance, swap_test_estimate, PureState, QuantumMetric,
    State,
};

pub const DEFAULT_SIGMA: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 1;
/// Environment variable overriding the default output directory.
pub const OUTPUT_DIR_ENV: &str = "QTOPO_OUTPUT_DIR";

/// `n` equally spaced points on the circle of radius `r`.
pub fn gen_roots_of_unity(n: usize, r: f64) -> Result<PointCloud> {
    check_circle_params(n, r)?;
    PointCloud::new(
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect(),
    )
}

/// Arc-length distances between the `n`-th roots of unity on the circle of
/// radius `r`.
pub fn geodesic_roots_of_unity(n: usize, r: f64) -> Result<DistanceMatrix> {
    check_circle_params(n, r)?;
    let step = 2.0 * PI / n as f64 * r;
    DistanceMatrix::from_fn(n, |j, k| {
        let gap = j.abs_diff(k);
        gap.min(n - gap) as f64 * step
    })
}

/// Uniform angles with radii `r + N(0, sigma^2)`.
pub fn gen_noisy_circle(n: usize, r: f64, sigma: f64, seed: u64) -> Result<PointCloud> {
    check_circle_params(n, r)?;
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sigma must be >= 0, got {sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let points = (0..n)
        .map(|_| {
            let t = rng.random_range(0.0..2.0 * PI);
            let rad = r + noise.sample(&mut rng);
            vec![rad * t.cos(), rad * t.sin()]
        })
        .collect();
    PointCloud::new(points)
}

fn check_circle_params(n: usize, r: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("r must be > 0, got {r}")));
    }
    Ok(())
}

pub fn read_point_cloud(path: &Path) -> Result<PointCloud> {
    PointCloud::new(parse_csv_rows(&fs::read_to_string(path)?)?)
}

pub fn point_cloud_to_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        out.push_str(&p.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dataset {
    RootsOfUnity {
        n: usize,
        #[serde(default = "one")]
        r: f64,
    },
    NoisyCircle {
        n: usize,
        #[serde(default = "one")]
        r: f64,
        #[serde(default = "default_sigma")]
        sigma: f64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}
fn default_sigma() -> f64 {
    DEFAULT_SIGMA
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_degree() -> usize {
    1
}
fn default_mds_dim() -> usize {
    2
}

impl Dataset {
    pub fn cloud(&self) -> Result<PointCloud> {
        match self {
            Self::RootsOfUnity { n, r } => gen_roots_of_unity(*n, *r),
            Self::NoisyCircle { n, r, sigma, seed } => gen_noisy_circle(*n, *r, *sigma, *seed),
            Self::File { path } => read_point_cloud(path),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseMetric {
    #[default]
    Euclidean,
    /// Arc length along the circle; roots-of-unity datasets only.
    GeodesicCircle,
}

/// Encoding choice for a pipeline run.
///
/// With `uniform` set, the cloud is first mapped into the simplex. `sqrt`
/// and `uts` then take square roots, `utd` builds diagonal states, and the
/// pointwise encodings read the first `m` simplex coordinates (the last one
/// is redundant) multiplied by `prescale`. Without `uniform`, pointwise
/// encodings see the raw coordinates times `prescale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub kind: EncodingKind,
    #[serde(default)]
    pub prescale: Option<f64>,
    #[serde(default = "one")]
    pub shrink: f64,
    #[serde(default)]
    pub uniform: Option<bool>,
}

impl EncodingSpec {
    pub fn new(kind: EncodingKind) -> Self {
        Self {
            kind,
            prescale: None,
            shrink: 1.0,
            uniform: None,
        }
    }

    pub fn uses_uniform(&self) -> bool {
        self.uniform.unwrap_or(matches!(
            self.kind,
            EncodingKind::Angle
                | EncodingKind::Iqp
                | EncodingKind::Sqrt
                | EncodingKind::Utd
                | EncodingKind::Uts
        ))
    }

    pub fn effective_prescale(&self) -> f64 {
        self.prescale
            .unwrap_or(match (self.kind, self.uses_uniform()) {
                (EncodingKind::Angle, true) => PI,
                (EncodingKind::Iqp, true) => PI / 2.0,
                _ => 1.0,
            })
    }

    pub fn encode(&self, cloud: &PointCloud) -> Result<Vec<State>> {
        let pre = self.effective_prescale();
        let features: Vec<Vec<f64>> = if self.uses_uniform() {
            let t = UniformTransform::fit(cloud)?.with_shrink(self.shrink)?;
            let simplex = cloud
                .points()
                .iter()
                .map(|p| t.apply(p))
                .collect::<Result<Vec<SimplexPoint>>>()?;
            match self.kind {
                EncodingKind::Sqrt | EncodingKind::Uts => {
                    return simplex
                        .iter()
                        .map(|p| sqrt_encode(p).map(State::Pure))
                        .collect();
                }
                EncodingKind::Utd | EncodingKind::Diagonal => {
                    return simplex
                        .iter()
                        .map(|p| diagonal_encode(p).map(State::Mixed))
                        .collect();
                }
                _ => simplex
                    .iter()
                    .map(|p| p.coords()[..t.m].iter().map(|v| v * pre).collect())
                    .collect(),
            }
        } else {
            cloud
                .points()
                .iter()
                .map(|p| p.iter().map(|v| v * pre).collect())
                .collect()
        };
        let pointwise: fn(&[f64]) -> Result<PureState> = match self.kind {
            EncodingKind::Angle => angle_encode,
            EncodingKind::DenseAngle => dense_angle_encode,
            EncodingKind::Iqp => iqp_encode,
            EncodingKind::Amplitude => amplitude_encode,
            EncodingKind::Sqrt | EncodingKind::Uts => {
                return features
                    .into_iter()
                    .map(|p| sqrt_encode(&SimplexPoint::new(p)?).map(State::Pure))
                    .collect();
            }
            EncodingKind::Diagonal | EncodingKind::Utd => {
                return features
                    .into_iter()
                    .map(|p| diagonal_encode(&SimplexPoint::new(p)?).map(State::Mixed))
                    .collect();
            }
        };
        features
            .iter()
            .map(|p| pointwise(p).map(State::Pure))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    #[serde(default)]
    pub base_metric: BaseMetric,
    pub encoding: EncodingSpec,
    #[serde(default)]
    pub quantum_metric: Option<QuantumMetric>,
    #[serde(default = "default_degree")]
    pub max_hom_degree: usize,
    /// SWAP-test shots per pair; exact fidelities when absent or zero.
    #[serde(default)]
    pub shots: Option<u64>,
    /// Seed for the shot sampler.
    #[serde(default)]
    pub shot_seed: u64,
    #[serde(default = "default_mds_dim")]
    pub mds_dim: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(dataset: Dataset, encoding: EncodingSpec) -> Self {
        Self {
            dataset,
            base_metric: BaseMetric::Euclidean,
            encoding,
            quantum_metric: None,
            max_hom_degree: 1,
            shots: None,
            shot_seed: 0,
            mds_dim: 2,
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_hom_degree > 4 {
            return Err(Error::InvalidArgument(format!(
                "max_hom_degree must be in [0, 4], got {}",
                self.max_hom_degree
            )));
        }
        match &self.dataset {
            Dataset::RootsOfUnity { n, r } => check_circle_params(*n, *r)?,
            Dataset::NoisyCircle { n, r, sigma, .. } => {
                check_circle_params(*n, *r)?;
                if !(*sigma >= 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "sigma must be >= 0, got {sigma}"
                    )));
                }
            }
            Dataset::File { .. } => {}
        }
        if self.base_metric == BaseMetric::GeodesicCircle
            && !matches!(self.dataset, Dataset::RootsOfUnity { .. })
        {
            return Err(Error::InvalidArgument(
                "geodesic_circle needs a roots_of_unity dataset".into(),
            ));
        }
        if !(self.encoding.shrink > 0.0 && self.encoding.shrink <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "shrink must lie in (0, 1], got {}",
                self.encoding.shrink
            )));
        }
        Ok(())
    }

    /// Hilbert-Schmidt for `utd`, otherwise Bures angle on noisy or file
    /// data and Bures fidelity on ideal circles.
    pub fn effective_metric(&self) -> QuantumMetric {
        if let Some(m) = self.quantum_metric {
            return m;
        }
        match (self.encoding.kind, &self.dataset) {
            (EncodingKind::Utd, _) => QuantumMetric::HilbertSchmidt,
            (_, Dataset::RootsOfUnity { .. }) => QuantumMetric::BuresFidelity,
            _ => QuantumMetric::BuresAngle,
        }
    }

    /// `output_dir`, else the environment override, else `./qtopo-out`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(default_output_dir)
    }

    pub fn base_distances(&self, cloud: &PointCloud) -> Result<DistanceMatrix> {
        match (self.base_metric, &self.dataset) {
            (BaseMetric::Euclidean, _) => Ok(euclidean_distance_matrix(cloud)),
            (BaseMetric::GeodesicCircle, Dataset::RootsOfUnity { n, r }) => {
                geodesic_roots_of_unity(*n, *r)
            }
            (BaseMetric::GeodesicCircle, _) => Err(Error::InvalidArgument(
                "geodesic_circle needs a roots_of_unity dataset".into(),
            )),
        }
    }
}

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("qtopo-out"))
}

/// Pairwise distances between encoded states. With `shots`, pure-state
/// fidelities are replaced by SWAP-test estimates, each pair drawing from
/// its own stream derived from `seed`.
pub fn encoded_distance_matrix(
    states: &[State],
    metric: QuantumMetric,
    shots: Option<u64>,
    seed: u64,
) -> Result<DistanceMatrix> {
    let n = states.len();
    let shots = shots.filter(|s| *s > 0);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| match shots {
                    None => state_distance(&states[i], &states[j], metric),
                    Some(s) => {
                        let (Some(a), Some(b)) = (states[i].as_pure(), states[j].as_pure()) else {
                            return Err(Error::InvalidArgument(
                                "shot sampling needs pure states".into(),
                            ));
                        };
                        let pair_seed =
                            seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((i * n + j) as u64);
                        let est = swap_test_estimate(a, b, s, pair_seed)?;
                        Ok(pure_distance_from_fidelity(est.value, metric))
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut entries = vec![0.0; n * n];
    for (i, row) in rows.iter().enumerate() {
        for (off, v) in row.iter().enumerate() {
            let j = i + 1 + off;
            entries[i * n + j] = *v;
            entries[j * n + i] = *v;
        }
    }
    DistanceMatrix::new(n, entries)
}

/// Numbers comparing the original and encoded metric spaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub distortion: f64,
    pub scale_free_distortion: f64,
    /// Weight minimising `max |D_X - w D_Y|`.
    pub weight: f64,
    pub weighted_distortion: f64,
    pub weighted_stress: f64,
    pub weighted_strain: f64,
    /// Half the weighted distortion of the identity correspondence.
    pub gh_upper_bound: f64,
    /// Bottleneck distance per degree between the original and the weighted
    /// encoded diagrams.
    pub bottleneck: Vec<f64>,
}

impl Comparison {
    pub fn compute(
        dx: &DistanceMatrix,
        dy: &DistanceMatrix,
        dgm_x: &[PersistenceDiagram],
        dgm_wy: &[PersistenceDiagram],
        weight: f64,
    ) -> Result<Self> {
        let wy = rescale(dy, weight)?;
        Ok(Self {
            distortion: distortion(dx, dy)?,
            scale_free_distortion: scale_free_distortion(dx, dy)?.value,
            weight,
            weighted_distortion: distortion(dx, &wy)?,
            weighted_stress: stress(dx, &wy)?,
            weighted_strain: strain(dx, &wy)?,
            gh_upper_bound: gh_upper_bound_identity(dx, &wy)?,
            bottleneck: diagram_set_distance(dgm_x, dgm_wy).per_degree,
        })
    }

    /// Two-column `quantity,value` table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,value\n");
        let mut row = |k: &str, v: f64| out.push_str(&format!("{k},{}\n", fmt_f64(v)));
        row("distortion", self.distortion);
        row("scale_free_distortion", self.scale_free_distortion);
        row("weight", self.weight);
        row("weighted_distortion", self.weighted_distortion);
        row("weighted_stress", self.weighted_stress);
        row("weighted_strain", self.weighted_strain);
        row("gh_upper_bound", self.gh_upper_bound);
        for (k, b) in self.bottleneck.iter().enumerate() {
            row(&format!("bottleneck_h{k}"), *b);
        }
        out
    }
}

/// Everything a pipeline run produces.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub cloud: PointCloud,
    pub metric: QuantumMetric,
    pub original: DistanceMatrix,
    pub encoded: DistanceMatrix,
    pub original_diagrams: Vec<PersistenceDiagram>,
    /// Diagrams of `weight * encoded`.
    pub encoded_diagrams: Vec<PersistenceDiagram>,
    pub comparison: Comparison,
    /// cMDS coordinates of `weight * encoded`.
    pub mds: Vec<Vec<f64>>,
}

/// Runs the pipeline in memory.
pub fn compute_pipeline(cfg: &ExperimentConfig) -> Result<PipelineReport> {
    cfg.validate()?;
    let cloud = cfg.dataset.cloud()?;
    let dx = cfg.base_distances(&cloud)?;
    let metric = cfg.effective_metric();
    let states = cfg.encoding.encode(&cloud)?;
    let dy = encoded_distance_matrix(&states, metric, cfg.shots, cfg.shot_seed)?;
    let weight = optimal_weight(&dx, &dy, WeightObjective::Max)?.weight;
    let wy = rescale(&dy, weight)?;
    let original_diagrams = rips_persistence(&dx, cfg.max_hom_degree)?;
    let encoded_diagrams = rips_persistence(&wy, cfg.max_hom_degree)?;
    let comparison = Comparison::compute(&dx, &dy, &original_diagrams, &encoded_diagrams, weight)?;
    let mds = match classical_mds(&wy, Some(cfg.mds_dim)) {
        Ok(EmbeddingResult {
            coordinates: Coordinates::Euclidean(c),
            ..
        }) => c,
        Ok(_) => unreachable!(),
        Err(Error::Degenerate(_)) => vec![vec![0.0; cfg.mds_dim]; wy.len()],
        Err(e) => return Err(e),
    };
    Ok(PipelineReport {
        cloud,
        metric,
        original: dx,
        encoded: dy,
        original_diagrams,
        encoded_diagrams,
        comparison,
        mds,
    })
}

fn coords_to_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let p = dir.join(name);
    fs::write(&p, contents)?;
    Ok(p)
}

/// Runs the pipeline and writes its outputs under the configured directory.
/// Returns the report and the paths written.
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<(PipelineReport, Vec<PathBuf>)> {
    let rep = compute_pipeline(cfg)?;
    let dir = cfg.resolved_output_dir();
    fs::create_dir_all(&dir)?;
    let mds_header: Vec<String> = (0..cfg.mds_dim).map(|k| format!("x{k}")).collect();
    let mds_header: Vec<&str> = mds_header.iter().map(String::as_str).collect();
    let summary = json!({
        "config": cfg,
        "quantum_metric": rep.metric,
        "comparison": rep.comparison,
    });
    let files = vec![
        write(&dir, "points.csv", &point_cloud_to_csv(&rep.cloud))?,
        write(&dir, "original_distances.csv", &rep.original.to_csv())?,
        write(&dir, "encoded_distances.csv", &rep.encoded.to_csv())?,
        write(
            &dir,
            "original_diagrams.json",
            &diagrams_to_json(&rep.original_diagrams)?,
        )?,
        write(
            &dir,
            "encoded_diagrams.json",
            &diagrams_to_json(&rep.encoded_diagrams)?,
        )?,
        write(
            &dir,
            "original_barcodes.csv",
            &barcodes_to_csv(&rep.original_diagrams),
        )?,
        write(
            &dir,
            "encoded_barcodes.csv",
            &barcodes_to_csv(&rep.encoded_diagrams),
        )?,
        write(&dir, "comparison.csv", &rep.comparison.to_csv())?,
        write(
            &dir,
            "comparison.json",
            &serde_json::to_string_pretty(&summary)?,
        )?,
        write(
            &dir,
            "mds_coordinates.csv",
            &coords_to_csv(&mds_header, &rep.mds),
        )?,
    ];
    Ok((rep, files))
}

/// Root-mean-square distance of Bloch vectors from their best-fit plane
/// through the origin, i.e. from the nearest great circle.
pub fn bloch_plane_residual(states: &[PureState]) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::InvalidArgument("no states".into()));
    }
    let mut m = Matrix3::<f64>::zeros();
    for s in states {
        let b = s.bloch()?;
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] += b[i] * b[j];
            }
        }
    }
    let lmin = SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok((lmin.max(0.0) / states.len() as f64).sqrt())
}

/// One QMDS run per seed, on the base distances of `cfg`.
#[derive(Debug, Clone)]
pub struct QmdsReport {
    pub runs: Vec<EmbeddingResult>,
    /// Best-fit great-circle residual per run (qubits only).
    pub plane_residuals: Vec<Option<f64>>,
}

pub fn compute_qmds(
    cfg: &ExperimentConfig,
    hilbert_dim: usize,
    schedule: &Schedule,
    seeds: &[u64],
) -> Result<QmdsReport> {
    cfg.validate()?;
    let cloud = cfg.dataset.cloud()?;
    let dx = cfg.base_distances(&cloud)?;
    if diameter(&dx) == 0.0 {
        return Err(Error::Degenerate("dataset has zero diameter".into()));
    }
    let runs = seeds
        .par_iter()
        .map(|&s| qmds(&dx, hilbert_dim, None, schedule, s))
        .collect::<Result<Vec<_>>>()?;
    let plane_residuals = runs
        .iter()
        .map(|r| match &r.coordinates {
            Coordinates::Quantum(s) if hilbert_dim == 2 => bloch_plane_residual(s).map(Some),
            _ => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QmdsReport {
        runs,
        plane_residuals,
    })
}

/// Runs [`compute_qmds`] and writes, per seed, the embedding JSON, the
/// Fubini-Study distance matrix and (for qubits) the Bloch coordinates.
pub fn run_qmds(
    cfg: &ExperimentConfig,
    hilbert_dim: usize,
    schedule: &Schedule,
    seeds: &[u64],
) -> Result<(QmdsReport, Vec<PathBuf>)> {
    let rep = compute_qmds(cfg, hilbert_dim, schedule, seeds)?;
    let dir = cfg.resolved_output_dir();
    fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    for (run, plane) in rep.runs.iter().zip(&rep.plane_residuals) {
        let seed = run.seed.unwrap_or_default();
        let Coordinates::Quantum(states) = &run.coordinates else {
            unreachable!()
        };
        let mut v: Value = run.to_json_value();
        v["bloch_plane_residual"] = json!(plane);
        files.push(write(
            &dir,
            &format!("qmds_seed{seed}.json"),
            &serde_json::to_string_pretty(&v)?,
        )?);
        files.push(write(
            &dir,
            &format!("qmds_fs_distances_seed{seed}.csv"),
            &fs_distance_matrix(states)?.to_csv(),
        )?);
        if hilbert_dim == 2 {
            let bloch: Vec<Vec<f64>> = states
                .iter()
                .map(|s| s.bloch().map(|b| b.to_vec()))
                .collect::<Result<_>>()?;
            files.push(write(
                &dir,
                &format!("qmds_bloch_seed{seed}.csv"),
                &coords_to_csv(&["sx", "sy", "sz"], &bloch),
            )?);
        }
    }
    Ok((rep, files))
}

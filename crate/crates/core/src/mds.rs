//! Multidimensional scaling into Euclidean space and into pure-state space.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::metric::{
    diameter, distortion, gram_from_distances, stress, DistanceMatrix, PointCloud,
};
use crate::quantum::{random_pure_state, state_distance, PureState, QuantumMetric, State};

const EIGEN_CUTOFF: f64 = 1e-10;

/// Embedded points: real coordinates or pure states.
#[derive(Debug, Clone, PartialEq)]
pub enum Coordinates {
    Euclidean(Vec<Vec<f64>>),
    Quantum(Vec<PureState>),
}

/// Extra figures reported by [`qmds`]. Residuals are measured after
/// dividing `D` by its diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumReport {
    /// Frobenius norm of `D - w (1 - F)`.
    pub surrogate_stress: f64,
    /// Frobenius norm of `D - w D_FS`.
    pub fs_stress: f64,
    /// Mean over pairs `j < k` of the squared normalized residual.
    pub mean_pair_residual: f64,
    /// Largest normalized residual.
    pub normalized_distortion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    pub coordinates: Coordinates,
    /// `(iteration, objective)` samples; empty for closed-form methods.
    pub objective_trace: Vec<(usize, f64)>,
    pub final_stress: f64,
    pub final_distortion: f64,
    pub weight: f64,
    pub seed: Option<u64>,
    pub iterations: usize,
    pub quantum: Option<QuantumReport>,
}

impl EmbeddingResult {
    pub fn to_json_value(&self) -> Value {
        let coords = match &self.coordinates {
            Coordinates::Euclidean(c) => json!({ "kind": "euclidean", "points": c }),
            Coordinates::Quantum(s) => {
                let states: Vec<State> = s.iter().cloned().map(State::Pure).collect();
                let v: Value = serde_json::from_str(
                    &crate::quantum::states_to_json(&states).unwrap_or_default(),
                )
                .unwrap_or(Value::Null);
                json!({ "kind": "quantum", "states": v })
            }
        };
        let mut out = json!({
            "coordinates": coords,
            "objective_trace": self.objective_trace,
            "final_stress": self.final_stress,
            "final_distortion": self.final_distortion,
            "weight": self.weight,
            "seed": self.seed,
            "iterations": self.iterations,
        });
        if let Some(q) = &self.quantum {
            out["surrogate_stress"] = json!(q.surrogate_stress);
            out["fs_stress"] = json!(q.fs_stress);
            out["mean_pair_residual"] = json!(q.mean_pair_residual);
            out["normalized_distortion"] = json!(q.normalized_distortion);
        }
        out
    }
}

/// Learning-rate schedule for the gradient-descent embeddings.
///
/// Each rate is used until the objective decreases by less than `rel_tol`
/// (relative) over `window` accepted steps, then the next rate takes over.
/// A step that would increase the objective is retried at half the rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub rates: Vec<f64>,
    pub window: usize,
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Record the objective every this many iterations.
    pub trace_every: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            rates: vec![1e-3, 1e-4],
            window: 100,
            rel_tol: 1e-9,
            max_iter: 200_000,
            trace_every: 100,
        }
    }
}

struct Descent {
    trace: Vec<(usize, f64)>,
    iterations: usize,
    value: f64,
}

/// Projected gradient descent on a flat parameter vector.
fn descend<V, P>(
    x: &mut Vec<f64>,
    value_grad: V,
    project: P,
    schedule: &Schedule,
) -> Result<Descent>
where
    V: Fn(&[f64]) -> (f64, Vec<f64>),
    P: Fn(&mut [f64]),
{
    if schedule.rates.is_empty() || schedule.rates.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidArgument(
            "schedule needs positive learning rates".into(),
        ));
    }
    let every = schedule.trace_every.max(1);
    let window = schedule.window.max(1);
    let (mut f, mut g) = value_grad(x);
    let mut trace = vec![(0, f)];
    let mut phase = 0;
    let mut window_start = f;
    let mut it = 0;
    let mut cand = vec![0.0; x.len()];
    'outer: while it < schedule.max_iter {
        if f == 0.0 || g.iter().all(|v| *v == 0.0) {
            break;
        }
        let mut lr = schedule.rates[phase];
        let floor = lr * 1e-12;
        loop {
            for ((c, xi), gi) in cand.iter_mut().zip(x.iter()).zip(&g) {
                *c = xi - lr * gi;
            }
            project(&mut cand);
            let (fc, gc) = value_grad(&cand);
            if fc <= f {
                std::mem::swap(x, &mut cand);
                f = fc;
                g = gc;
                break;
            }
            lr *= 0.5;
            if lr < floor {
                // no descent available at this rate
                phase += 1;
                if phase == schedule.rates.len() {
                    break 'outer;
                }
                window_start = f;
                continue 'outer;
            }
        }
        it += 1;
        if it % every == 0 {
            trace.push((it, f));
        }
        if it % window == 0 {
            if window_start - f <= schedule.rel_tol * window_start.abs().max(f64::MIN_POSITIVE) {
                phase += 1;
                if phase == schedule.rates.len() {
                    break;
                }
            }
            window_start = f;
        }
    }
    if trace.last().map(|t| t.0) != Some(it) {
        trace.push((it, f));
    }
    Ok(Descent {
        trace,
        iterations: it,
        value: f,
    })
}

fn embedded_distances(coords: &[Vec<f64>]) -> DistanceMatrix {
    crate::metric::euclidean_distance_matrix(
        &PointCloud::new(coords.to_vec()).expect("finite coordinates"),
    )
}

/// Eigenvalues of the Gram matrix of `d`, largest first.
pub fn gram_eigenvalues(d: &DistanceMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(gram_from_distances(d))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Strain-minimising embedding from the positive part of the Gram matrix.
pub fn classical_mds(d: &DistanceMatrix, target_dim: Option<usize>) -> Result<EmbeddingResult> {
    let n = d.len();
    if n < 2 {
        return Err(Error::Degenerate(
            "classical MDS needs at least two points".into(),
        ));
    }
    let eig = SymmetricEigen::new(gram_from_distances(d));
    let mut order: Vec<usize> = (0..n)
        .filter(|&k| eig.eigenvalues[k] > EIGEN_CUTOFF)
        .collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    if let Some(t) = target_dim {
        order.truncate(t);
    }
    if order.is_empty() {
        return Err(Error::Degenerate(
            "Gram matrix has no positive eigenvalue".into(),
        ));
    }
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            order
                .iter()
                .map(|&k| eig.eigenvalues[k].sqrt() * eig.eigenvectors[(i, k)])
                .collect()
        })
        .collect();
    let de = embedded_distances(&coords);
    Ok(EmbeddingResult {
        final_stress: stress(d, &de)?,
        final_distortion: distortion(d, &de)?,
        coordinates: Coordinates::Euclidean(coords),
        objective_trace: Vec::new(),
        weight: 1.0,
        seed: None,
        iterations: 0,
        quantum: None,
    })
}

/// Starting point for [`stress_mds`].
#[derive(Debug, Clone, PartialEq)]
pub enum StressInit {
    /// Classical MDS output, zero-padded or truncated to the target dimension.
    Classical,
    Coordinates(Vec<Vec<f64>>),
}

/// `sum_{j<k} (D_jk - |y_j - y_k|)^2` and its gradient.
pub fn stress_objective(d: &DistanceMatrix, dim: usize, x: &[f64]) -> (f64, Vec<f64>) {
    let n = d.len();
    let rows: Vec<(f64, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let yj = &x[j * dim..(j + 1) * dim];
            let mut g = vec![0.0; dim];
            let mut f = 0.0;
            for k in 0..n {
                if k == j {
                    continue;
                }
                let yk = &x[k * dim..(k + 1) * dim];
                let dist = yj
                    .iter()
                    .zip(yk)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let r = d.get(j, k) - dist;
                if k > j {
                    f += r * r;
                }
                if dist > 0.0 {
                    for t in 0..dim {
                        g[t] -= 2.0 * r * (yj[t] - yk[t]) / dist;
                    }
                }
            }
            (f, g)
        })
        .collect();
    let f = rows.iter().map(|r| r.0).sum();
    (f, rows.into_iter().flat_map(|r| r.1).collect())
}

/// Gradient descent on Euclidean stress.
pub fn stress_mds(
    d: &DistanceMatrix,
    dim: usize,
    init: StressInit,
    schedule: &Schedule,
) -> Result<EmbeddingResult> {
    let n = d.len();
    if dim < 1 {
        return Err(Error::InvalidArgument(
            "embedding dimension must be >= 1".into(),
        ));
    }
    let start = match init {
        StressInit::Classical => match classical_mds(d, Some(dim))?.coordinates {
            Coordinates::Euclidean(c) => c,
            Coordinates::Quantum(_) => unreachable!(),
        },
        StressInit::Coordinates(c) => c,
    };
    if start.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: start.len(),
        });
    }
    let mut x: Vec<f64> = start
        .iter()
        .flat_map(|p| (0..dim).map(move |t| p.get(t).copied().unwrap_or(0.0)))
        .collect();
    let run = descend(&mut x, |p| stress_objective(d, dim, p), |_| {}, schedule)?;
    let coords: Vec<Vec<f64>> = x.chunks(dim).map(<[f64]>::to_vec).collect();
    let de = embedded_distances(&coords);
    Ok(EmbeddingResult {
        final_stress: stress(d, &de)?,
        final_distortion: distortion(d, &de)?,
        coordinates: Coordinates::Euclidean(coords),
        objective_trace: run.trace,
        weight: 1.0,
        seed: None,
        iterations: run.iterations,
        quantum: None,
    })
}

/// `sum_{j<k} (D_jk - w (1 - F_jk))^2` for unnormalised vectors, where
/// `F_jk = |<v_j|v_k>|^2 / (|v_j|^2 |v_k|^2)`, together with the gradient
/// with respect to the real and imaginary parts of every amplitude
/// (returned as `d/d re + i d/d im`).
pub fn qmds_value_and_gradient(
    v: &[Vec<Complex64>],
    d: &DistanceMatrix,
    w: f64,
) -> (f64, Vec<Vec<Complex64>>) {
    let n = v.len();
    let norms: Vec<f64> = v
        .iter()
        .map(|x| x.iter().map(|a| a.norm_sqr()).sum())
        .collect();
    let rows: Vec<(f64, Vec<Complex64>)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let dim = v[j].len();
            let mut g = vec![Complex64::new(0.0, 0.0); dim];
            let mut f = 0.0;
            for k in 0..n {
                if k == j {
                    continue;
                }
                // <v_k|v_j>
                let ov: Complex64 = v[k].iter().zip(&v[j]).map(|(a, b)| a.conj() * b).sum();
                let fid = ov.norm_sqr() / (norms[j] * norms[k]);
                let r = d.get(j, k) - w * (1.0 - fid);
                if k > j {
                    f += r * r;
                }
                let coef = 4.0 * w * r;
                let a = ov / (norms[j] * norms[k]);
                let b = fid / norms[j];
                for t in 0..dim {
                    g[t] += coef * (v[k][t] * a - v[j][t] * b);
                }
            }
            (f, g)
        })
        .collect();
    let f = rows.iter().map(|r| r.0).sum();
    (f, rows.into_iter().map(|r| r.1).collect())
}

fn unpack(x: &[f64], dim: usize) -> Vec<Vec<Complex64>> {
    x.chunks(2 * dim)
        .map(|c| c.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
        .collect()
}

fn pack(v: &[Vec<Complex64>]) -> Vec<f64> {
    v.iter()
        .flat_map(|s| s.iter().flat_map(|a| [a.re, a.im]))
        .collect()
}

/// Squared-fidelity surrogate stress `sum_{j<k} (D_jk - w (1 - F_jk))^2`.
pub fn surrogate_objective(states: &[PureState], d: &DistanceMatrix, w: f64) -> Result<f64> {
    if states.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            got: states.len(),
        });
    }
    let raw: Vec<Vec<Complex64>> = states.iter().map(|s| s.amplitudes().to_vec()).collect();
    Ok(qmds_value_and_gradient(&raw, d, w).0)
}

/// Frobenius norm of `D - w D_FS` for the Fubini-Study distances of `states`.
pub fn exact_fs_stress(states: &[PureState], d: &DistanceMatrix, weight: f64) -> Result<f64> {
    if states.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            got: states.len(),
        });
    }
    let dfs = fs_distance_matrix(states)?;
    let mut acc = 0.0;
    for i in 0..d.len() {
        for j in 0..d.len() {
            acc += (d.get(i, j) - weight * dfs.get(i, j)).powi(2);
        }
    }
    Ok(acc.sqrt())
}

/// Fubini-Study distance matrix of a list of pure states.
pub fn fs_distance_matrix(states: &[PureState]) -> Result<DistanceMatrix> {
    let n = states.len();
    let wrapped: Vec<State> = states.iter().cloned().map(State::Pure).collect();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = state_distance(&wrapped[i], &wrapped[j], QuantumMetric::FubiniStudy)?;
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    DistanceMatrix::new(n, entries)
}

/// Embeds `D` into pure states of `C^hilbert_dim` by gradient descent on the
/// squared-fidelity surrogate, renormalising every state after each step.
///
/// The optimisation runs on `D / diam(D)` with weight `w / diam(D)`, so the
/// learning rates do not depend on the units of `D`. `weight` defaults to
/// `diam(D)`.
pub fn qmds(
    d: &DistanceMatrix,
    hilbert_dim: usize,
    weight: Option<f64>,
    schedule: &Schedule,
    seed: u64,
) -> Result<EmbeddingResult> {
    if hilbert_dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "hilbert_dim must be >= 2, got {hilbert_dim}"
        )));
    }
    let diam = diameter(d);
    if !(diam > 0.0) {
        return Err(Error::Degenerate(
            "distance matrix has zero diameter".into(),
        ));
    }
    let w = weight.unwrap_or(diam);
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "weight must be positive, got {w}"
        )));
    }
    let dn = crate::metric::rescale(d, 1.0 / diam)?;
    let wn = w / diam;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init: Vec<Vec<Complex64>> = (0..d.len())
        .map(|_| {
            random_pure_state(hilbert_dim, &mut rng)
                .amplitudes()
                .to_vec()
        })
        .collect();
    let mut x = pack(&init);
    let value_grad = |p: &[f64]| {
        let (f, g) = qmds_value_and_gradient(&unpack(p, hilbert_dim), &dn, wn);
        (f, pack(&g))
    };
    let normalize = |p: &mut [f64]| {
        for chunk in p.chunks_mut(2 * hilbert_dim) {
            let norm = chunk.iter().map(|v| v * v).sum::<f64>().sqrt();
            chunk.iter_mut().for_each(|v| *v /= norm);
        }
    };
    let run = descend(&mut x, value_grad, normalize, schedule)?;
    let states = unpack(&x, hilbert_dim)
        .into_iter()
        .map(PureState::normalized)
        .collect::<Result<Vec<_>>>()?;
    finish_qmds(d, states, w, run, seed)
}

fn finish_qmds(
    d: &DistanceMatrix,
    states: Vec<PureState>,
    w: f64,
    run: Descent,
    seed: u64,
) -> Result<EmbeddingResult> {
    let n = d.len();
    let diam = diameter(d);
    let mut max_res: f64 = 0.0;
    let mut sum_sq = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let f = crate::quantum::fidelity_pure(&states[i], &states[j])?;
            let r = d.get(i, j) - w * (1.0 - f);
            max_res = max_res.max(r.abs());
            sum_sq += r * r;
        }
    }
    let pairs = (n * (n - 1) / 2).max(1) as f64;
    let report = QuantumReport {
        surrogate_stress: (2.0 * sum_sq).sqrt(),
        fs_stress: exact_fs_stress(&states, d, w)?,
        mean_pair_residual: sum_sq / (diam * diam) / pairs,
        normalized_distortion: max_res / diam,
    };
    let _ = run.value;
    Ok(EmbeddingResult {
        coordinates: Coordinates::Quantum(states),
        objective_trace: run.trace,
        final_stress: report.surrogate_stress,
        final_distortion: max_res,
        weight: w,
        seed: Some(seed),
        iterations: run.iterations,
        quantum: Some(report),
    })
}

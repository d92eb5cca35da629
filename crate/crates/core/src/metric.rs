//! Finite metric spaces and functionals comparing two metrics on the same
//! index set.
//!
//! A [`DistanceMatrix`] is the interchange object between every stage of the
//! pipeline: encodings produce one, persistence consumes one, and the
//! comparison functionals ([`distortion`], [`stress`], [`strain`], ...) take
//! two of them over the same labelled points.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::golden_section;

const SEARCH_TOL: f64 = 1e-9;
const SEARCH_MAX_ITER: usize = 200;

/// `n` labelled points in `R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points.first().ok_or_else(|| {
            Error::InvalidArgument("point cloud must contain at least one point".into())
        })?;
        let m = first.len();
        if m == 0 {
            return Err(Error::InvalidArgument(
                "points must have dimension >= 1".into(),
            ));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient dimension `m`.
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn centroid(&self) -> Vec<f64> {
        let n = self.len() as f64;
        let mut c = vec![0.0; self.dim()];
        for p in &self.points {
            for (ci, x) in c.iter_mut().zip(p) {
                *ci += x;
            }
        }
        c.iter_mut().for_each(|ci| *ci /= n);
        c
    }

    /// Applies `f` to every point, producing a new cloud.
    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        Self::new(self.points.iter().map(|p| f(p)).collect())
    }
}

/// Symmetric `n x n` matrix of nonnegative distances with zero diagonal,
/// stored densely in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

const SYMMETRY_TOL: f64 = 1e-9;

impl DistanceMatrix {
    /// Validates and wraps a row-major `n x n` buffer.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidDistanceMatrix(
                "matrix must have at least one row".into(),
            ));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidDistanceMatrix(format!(
                    "nonzero diagonal entry at {i}"
                )));
            }
            for j in 0..n {
                let d = entries[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "entry ({i},{j}) = {d} is not a finite nonnegative value"
                    )));
                }
                let e = entries[j * n + i];
                if (d - e).abs() > SYMMETRY_TOL * d.abs().max(1.0) {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "asymmetric entries at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            entries.extend(row);
        }
        Self::new(n, entries)
    }

    /// Builds a matrix from a pairwise function evaluated on `i < j` only and
    /// mirrored, so the result is exactly symmetric.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64,
    {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        Self::new(n, entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Applies a monotone pointwise transform to every off-diagonal entry.
    pub fn map_entries<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        Self::from_fn(self.n, |i, j| f(self.get(i, j)))
    }

    /// Restriction to the given indices (in the given order).
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        let mut entries = vec![0.0; k * k];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                entries[a * k + b] = self.get(i, j);
            }
        }
        Self { n: k, entries }
    }

    /// Checks `d_ij <= d_ik + d_kj + tol` for every triple. O(n^3).
    pub fn validate_triangle(&self, tol: f64) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let dij = self.get(i, j);
                for k in 0..n {
                    if dij > self.get(i, k) + self.get(k, j) + tol {
                        return Err(Error::InvalidDistanceMatrix(format!(
                            "triangle inequality violated: d({i},{j}) > d({i},{k}) + d({k},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Header-less CSV, one row per line, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.entries.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|x| fmt_f64(*x)).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_csv_rows(text)?;
        Self::from_rows(rows)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&DistanceMatrixJson {
            n: self.n,
            entries: self.rows(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DistanceMatrixJson = serde_json::from_str(text)?;
        if raw.entries.len() != raw.n {
            return Err(Error::DimensionMismatch {
                expected: raw.n,
                got: raw.entries.len(),
            });
        }
        Self::from_rows(raw.entries)
    }
}

#[derive(Serialize, Deserialize)]
struct DistanceMatrixJson {
    n: usize,
    entries: Vec<Vec<f64>>,
}

/// Formats with 17 significant digits, which round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub(crate) fn parse_csv_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("{tok:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

/// Pairs `(i, j)` relating points of `X` to points of `Y`; every index of
/// either side must be covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(pairs: Vec<(usize, usize)>, n_x: usize, n_y: usize) -> Result<Self> {
        let mut seen_x = vec![false; n_x];
        let mut seen_y = vec![false; n_y];
        for &(i, j) in &pairs {
            if i >= n_x || j >= n_y {
                return Err(Error::InvalidCorrespondence(format!(
                    "pair ({i},{j}) out of range"
                )));
            }
            seen_x[i] = true;
            seen_y[j] = true;
        }
        if let Some(i) = seen_x.iter().position(|s| !s) {
            return Err(Error::InvalidCorrespondence(format!(
                "X index {i} is not covered"
            )));
        }
        if let Some(j) = seen_y.iter().position(|s| !s) {
            return Err(Error::InvalidCorrespondence(format!(
                "Y index {j} is not covered"
            )));
        }
        Ok(Self { pairs })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Euclidean pairwise distances.
pub fn euclidean_distance_matrix(cloud: &PointCloud) -> DistanceMatrix {
    DistanceMatrix::from_fn(cloud.len(), |i, j| {
        cloud
            .point(i)
            .iter()
            .zip(cloud.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    })
    .expect("euclidean distances are a valid distance matrix")
}

/// Minkowski-`p` pairwise distances; `p = f64::INFINITY` gives the max norm.
pub fn lp_distance_matrix(cloud: &PointCloud, p: f64) -> Result<DistanceMatrix> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "l^p metric requires p >= 1, got {p}"
        )));
    }
    let norm = |a: &[f64], b: &[f64]| -> f64 {
        let gaps = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        if p.is_infinite() {
            gaps.fold(0.0, f64::max)
        } else if p == 1.0 {
            gaps.sum()
        } else if p == 2.0 {
            gaps.map(|g| g * g).sum::<f64>().sqrt()
        } else {
            gaps.map(|g| g.powf(p)).sum::<f64>().powf(1.0 / p)
        }
    };
    DistanceMatrix::from_fn(cloud.len(), |i, j| norm(cloud.point(i), cloud.point(j)))
}

/// Largest entry.
pub fn diameter(d: &DistanceMatrix) -> f64 {
    d.entries.iter().copied().fold(0.0, f64::max)
}

pub fn rescale(d: &DistanceMatrix, lambda: f64) -> Result<DistanceMatrix> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "rescale factor must be positive, got {lambda}"
        )));
    }
    Ok(DistanceMatrix {
        n: d.n,
        entries: d.entries.iter().map(|x| x * lambda).collect(),
    })
}

fn check_same_size(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<()> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            got: b.n,
        });
    }
    Ok(())
}

/// Maximum entrywise gap `max |D_X - D_Y|`.
pub fn distortion(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<f64> {
    check_same_size(dx, dy)?;
    Ok(dx
        .entries
        .iter()
        .zip(&dy.entries)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Result of [`scale_free_distortion`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFree {
    pub value: f64,
    /// Optimal `lambda` with `D_X ~ D_Y / lambda`; `f64::INFINITY` when the
    /// optimum collapses `D_Y` entirely.
    pub lambda: f64,
}

fn max_residual(dx: &DistanceMatrix, dy: &DistanceMatrix, mu: f64) -> f64 {
    dx.entries
        .iter()
        .zip(&dy.entries)
        .map(|(a, b)| (a - mu * b).abs())
        .fold(0.0, f64::max)
}

fn frobenius_residual(dx: &DistanceMatrix, dy: &DistanceMatrix, mu: f64) -> f64 {
    dx.entries
        .iter()
        .zip(&dy.entries)
        .map(|(a, b)| (a - mu * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Upper end of the search bracket for a scalar `mu` multiplying `D_Y`.
/// Beyond `2 max D_X / min_{>0} D_Y` both residual norms only grow.
fn scale_bracket(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Option<f64> {
    let min_pos = dy
        .entries
        .iter()
        .copied()
        .filter(|x| *x > 0.0)
        .fold(f64::INFINITY, f64::min);
    if min_pos.is_finite() {
        Some((2.0 * diameter(dx) / min_pos).max(f64::MIN_POSITIVE))
    } else {
        None
    }
}

/// Minimizes `max |D_X - mu D_Y|` over the scalar `mu`.
///
/// The objective is convex and piecewise linear, so a golden-section pass
/// brackets the kink and a final step intersects the two active residual
/// lines to land on it exactly.
fn minimize_max_residual(dx: &DistanceMatrix, dy: &DistanceMatrix, hi: f64) -> (f64, f64) {
    let (mut mu, mut best) = golden_section(
        |m| max_residual(dx, dy, m),
        0.0,
        hi,
        SEARCH_TOL,
        SEARCH_MAX_ITER,
    );
    // polish: at the optimum the largest positive and largest negative
    // residuals balance, mu = (a_i + a_j) / (b_i + b_j)
    let mut over = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut under = (f64::NEG_INFINITY, 0.0, 0.0);
    for (&a, &b) in dx.entries.iter().zip(&dy.entries) {
        let r = a - mu * b;
        if r > over.0 {
            over = (r, a, b);
        }
        if -r > under.0 {
            under = (-r, a, b);
        }
    }
    let denom = over.2 + under.2;
    if denom > 0.0 {
        let cand = (over.1 + under.1) / denom;
        if cand >= 0.0 {
            let val = max_residual(dx, dy, cand);
            if val <= best {
                mu = cand;
                best = val;
            }
        }
    }
    (mu, best)
}

/// Distortion after the best global rescaling of `D_Y`.
pub fn scale_free_distortion(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<ScaleFree> {
    check_same_size(dx, dy)?;
    let Some(hi) = scale_bracket(dx, dy) else {
        return Ok(ScaleFree {
            value: diameter(dx),
            lambda: f64::INFINITY,
        });
    };
    let (mu, value) = minimize_max_residual(dx, dy, hi);
    let lambda = if mu > 0.0 { 1.0 / mu } else { f64::INFINITY };
    Ok(ScaleFree { value, lambda })
}

/// Frobenius norm of `D_X - D_Y`.
pub fn stress(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<f64> {
    check_same_size(dx, dy)?;
    Ok(frobenius_residual(dx, dy, 1.0))
}

/// Double-centered Gram matrix `-1/2 C D^(2) C`.
pub fn gram_from_distances(d: &DistanceMatrix) -> DMatrix<f64> {
    let n = d.n;
    let sq = DMatrix::from_fn(n, n, |i, j| d.get(i, j).powi(2));
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let mut g = DMatrix::from_fn(n, n, |i, j| {
        -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand)
    });
    // exact symmetry
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (g[(i, j)] + g[(j, i)]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Frobenius norm of the difference of the two Gram matrices.
pub fn strain(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<f64> {
    check_same_size(dx, dy)?;
    Ok((gram_from_distances(dx) - gram_from_distances(dy)).norm())
}

/// `max_{i,j} |D_X[i][g(j)] - D_Y[f(i)][j]|` for maps `f: X -> Y`, `g: Y -> X`.
pub fn codistortion(
    dx: &DistanceMatrix,
    dy: &DistanceMatrix,
    f: &[usize],
    g: &[usize],
) -> Result<f64> {
    if f.len() != dx.n {
        return Err(Error::DimensionMismatch {
            expected: dx.n,
            got: f.len(),
        });
    }
    if g.len() != dy.n {
        return Err(Error::DimensionMismatch {
            expected: dy.n,
            got: g.len(),
        });
    }
    if f.iter().any(|&y| y >= dy.n) || g.iter().any(|&x| x >= dx.n) {
        return Err(Error::InvalidArgument("map image out of range".into()));
    }
    let mut worst: f64 = 0.0;
    for i in 0..dx.n {
        for j in 0..dy.n {
            worst = worst.max((dx.get(i, g[j]) - dy.get(f[i], j)).abs());
        }
    }
    Ok(worst)
}

/// Half the distortion of a correspondence, an upper bound on the
/// Gromov-Hausdorff distance.
pub fn gh_upper_bound(dx: &DistanceMatrix, dy: &DistanceMatrix, r: &Correspondence) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(i, j) in r.pairs() {
        if i >= dx.n || j >= dy.n {
            return Err(Error::InvalidCorrespondence(format!(
                "pair ({i},{j}) out of range"
            )));
        }
        for &(k, l) in r.pairs() {
            worst = worst.max((dx.get(i, k) - dy.get(j, l)).abs());
        }
    }
    Ok(0.5 * worst)
}

/// [`gh_upper_bound`] with the identity correspondence.
pub fn gh_upper_bound_identity(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<f64> {
    Ok(0.5 * distortion(dx, dy)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightObjective {
    /// Entrywise max norm (distortion).
    Max,
    /// Frobenius norm (stress).
    Frobenius,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFit {
    pub weight: f64,
    pub residual: f64,
}

/// `argmin_{w >= 0} ||D_X - w D_Y||` under the chosen norm.
pub fn optimal_weight(
    dx: &DistanceMatrix,
    dy: &DistanceMatrix,
    objective: WeightObjective,
) -> Result<WeightFit> {
    check_same_size(dx, dy)?;
    let hi =
        scale_bracket(dx, dy).ok_or_else(|| Error::Degenerate("D_Y is identically zero".into()))?;
    let (weight, residual) = match objective {
        WeightObjective::Max => minimize_max_residual(dx, dy, hi),
        WeightObjective::Frobenius => {
            let (mut w, mut best) = golden_section(
                |w| frobenius_residual(dx, dy, w),
                0.0,
                hi,
                SEARCH_TOL,
                SEARCH_MAX_ITER,
            );
            // least-squares stationary point, kept only if it does not lose
            let xy: f64 = dx.entries.iter().zip(&dy.entries).map(|(a, b)| a * b).sum();
            let yy: f64 = dy.entries.iter().map(|b| b * b).sum();
            let cand = (xy / yy).max(0.0);
            let val = frobenius_residual(dx, dy, cand);
            if val <= best {
                w = cand;
                best = val;
            }
            (w, best)
        }
    };
    Ok(WeightFit { weight, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn two_point() -> DistanceMatrix {
        DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn roots(n: usize, r: f64) -> PointCloud {
        PointCloud::new(
            (0..n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    vec![r * t.cos(), r * t.sin()]
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn euclidean_examples() {
        let c = PointCloud::new(vec![vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(euclidean_distance_matrix(&c), two_point());
        let d = euclidean_distance_matrix(&roots(4, 1.0));
        assert!((d.get(0, 1) - 2f64.sqrt()).abs() < 1e-15);
        assert!((d.get(0, 2) - 2.0).abs() < 1e-15);
        let single = PointCloud::new(vec![vec![3.0, 4.0]]).unwrap();
        assert_eq!(euclidean_distance_matrix(&single).entries(), &[0.0]);
    }

    #[test]
    fn lp_examples() {
        let c = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(
            lp_distance_matrix(&c, f64::INFINITY).unwrap().get(0, 1),
            2.0
        );
        assert_eq!(lp_distance_matrix(&c, 1.0).unwrap().get(0, 1), 3.0);
        assert!(lp_distance_matrix(&c, 0.5).is_err());
    }

    #[test]
    fn diameter_and_rescale() {
        assert_eq!(diameter(&two_point()), 1.0);
        assert!((diameter(&euclidean_distance_matrix(&roots(10, 3.0))) - 6.0).abs() < 1e-12);
        assert_eq!(diameter(&DistanceMatrix::zeros(1)), 0.0);
        assert_eq!(rescale(&two_point(), 1.0).unwrap(), two_point());
        assert_eq!(rescale(&two_point(), 2.0).unwrap().get(0, 1), 2.0);
        assert!(rescale(&two_point(), 0.0).is_err());
        assert!(rescale(&two_point(), -1.0).is_err());
    }

    #[test]
    fn distortion_examples() {
        let d = euclidean_distance_matrix(&roots(7, 1.3));
        assert_eq!(distortion(&d, &d).unwrap(), 0.0);
        assert_eq!(
            distortion(&d, &DistanceMatrix::zeros(7)).unwrap(),
            diameter(&d)
        );
        assert!(distortion(&d, &two_point()).is_err());
    }

    #[test]
    fn stress_examples() {
        let a = two_point();
        let b = rescale(&a, 3.0).unwrap();
        assert_eq!(stress(&a, &a).unwrap(), 0.0);
        assert!((stress(&a, &b).unwrap() - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gram_two_points_on_line() {
        let g = gram_from_distances(&two_point());
        let expect = [[0.25, -0.25], [-0.25, 0.25]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((g[(i, j)] - expect[i][j]).abs() < 1e-15);
            }
        }
        assert_eq!(gram_from_distances(&DistanceMatrix::zeros(1))[(0, 0)], 0.0);
    }

    #[test]
    fn strain_scales_quadratically() {
        let d = euclidean_distance_matrix(&roots(5, 1.0));
        let lambda = 1.7;
        let s = strain(&d, &rescale(&d, lambda).unwrap()).unwrap();
        let g = gram_from_distances(&d).norm();
        assert!((s - (lambda * lambda - 1.0) * g).abs() < 1e-12);
    }

    #[test]
    fn codistortion_examples() {
        let d = euclidean_distance_matrix(&roots(6, 1.0));
        let id: Vec<usize> = (0..6).collect();
        assert_eq!(codistortion(&d, &d, &id, &id).unwrap(), 0.0);
        let d2 = rescale(&d, 2.0).unwrap();
        assert!((codistortion(&d, &d2, &id, &id).unwrap() - diameter(&d)).abs() < 1e-15);
        let a = two_point();
        assert_eq!(codistortion(&a, &a, &[0, 1], &[0, 0]).unwrap(), 1.0);
        assert!(codistortion(&a, &a, &[0, 2], &[0, 0]).is_err());
    }

    #[test]
    fn correspondence_validation() {
        assert!(Correspondence::new(vec![(0, 0)], 2, 1).is_err());
        assert!(Correspondence::new(vec![(0, 0), (1, 0)], 2, 1).is_ok());
        assert!(Correspondence::new(vec![(0, 3)], 1, 1).is_err());
    }

    #[test]
    fn gh_identity_is_half_distortion() {
        let a = euclidean_distance_matrix(&roots(5, 1.0));
        let b = euclidean_distance_matrix(&roots(5, 1.4));
        let r = Correspondence::identity(5);
        assert_eq!(
            gh_upper_bound(&a, &b, &r).unwrap(),
            0.5 * distortion(&a, &b).unwrap()
        );
        assert_eq!(gh_upper_bound_identity(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn triangle_validator() {
        let bad = DistanceMatrix::from_rows(vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(bad.validate_triangle(1e-9).is_err());
        assert!(euclidean_distance_matrix(&roots(9, 2.0))
            .validate_triangle(1e-9)
            .is_ok());
    }

    #[test]
    fn scale_free_two_points_is_zero() {
        let a = two_point();
        let b = rescale(&a, 0.37).unwrap();
        let sf = scale_free_distortion(&a, &b).unwrap();
        assert!(sf.value < 1e-12);
        assert!((sf.lambda - 0.37).abs() < 1e-9);
    }

    #[test]
    fn scale_free_collapsed_image() {
        let a = rescale(&two_point(), 5.0).unwrap();
        let sf = scale_free_distortion(&a, &DistanceMatrix::zeros(2)).unwrap();
        assert_eq!(sf.value, 5.0);
        assert!(sf.lambda.is_infinite());
    }

    #[test]
    fn optimal_weight_exact_scaling() {
        let d = euclidean_distance_matrix(&roots(8, 1.0));
        let half = rescale(&d, 0.5).unwrap();
        for obj in [WeightObjective::Max, WeightObjective::Frobenius] {
            let fit = optimal_weight(&d, &half, obj).unwrap();
            assert!((fit.weight - 2.0).abs() < 1e-12, "{obj:?} {fit:?}");
            assert!(fit.residual < 1e-12);
        }
        assert!(optimal_weight(&d, &DistanceMatrix::zeros(8), WeightObjective::Max).is_err());
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let d = euclidean_distance_matrix(&roots(6, 0.731));
        assert_eq!(DistanceMatrix::from_csv(&d.to_csv()).unwrap(), d);
        assert_eq!(DistanceMatrix::from_json(&d.to_json().unwrap()).unwrap(), d);
    }
}

//! Classical-to-quantum encodings.
//!
//! Qubit registers are ordered big-endian: qubit 0 is the most significant
//! bit of the computational basis index, matching the Kronecker product
//! `q_0 (x) q_1 (x) ...`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::PointCloud;
use crate::quantum::{DensityMatrix, PureState, State};

const CLAMP_TOL: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;

/// A point of the probability simplex in `R^(m+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    /// Clamps rounding negatives in `(-1e-12, 0)` to zero; rejects anything
    /// further outside the simplex.
    pub fn new(mut coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidSimplexPoint("empty coordinate vector".into()));
        }
        for (i, x) in coords.iter_mut().enumerate() {
            if !x.is_finite() || *x < -CLAMP_TOL {
                return Err(Error::InvalidSimplexPoint(format!(
                    "coordinate {i} = {x} is negative"
                )));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let s: f64 = coords.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidSimplexPoint(format!(
                "coordinates sum to {s}"
            )));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn tensor(qubits: impl Iterator<Item = [Complex64; 2]>) -> Vec<Complex64> {
    qubits.fold(vec![c(1.0)], |acc, q| kron(&acc, &q))
}

fn require_nonempty(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::InvalidArgument(
            "encoding input must have dimension >= 1".into(),
        ));
    }
    Ok(())
}

/// `(x) cos(x_j/2)|0> + sin(x_j/2)|1>`, a `2^d`-dimensional state.
pub fn angle_encode(x: &[f64]) -> Result<PureState> {
    require_nonempty(x)?;
    PureState::normalized(tensor(
        x.iter().map(|&t| [c((t / 2.0).cos()), c((t / 2.0).sin())]),
    ))
}

/// Two features per qubit: `c(x_a)|0> + e^{i x_b} s(x_a)|1>` with
/// `c(t) = cos((t + pi)/4)`, `s(t) = sin((t + pi)/4)`. Odd `d` is padded
/// with a trailing zero.
pub fn dense_angle_encode(x: &[f64]) -> Result<PureState> {
    require_nonempty(x)?;
    let mut padded = x.to_vec();
    if padded.len() % 2 == 1 {
        padded.push(0.0);
    }
    let qubits = padded.chunks(2).map(|pair| {
        let half = (pair[0] + std::f64::consts::PI) / 4.0;
        [c(half.cos()), Complex64::from_polar(half.sin(), pair[1])]
    });
    PureState::normalized(tensor(qubits))
}

/// `x / ||x||` as a real-amplitude state.
pub fn amplitude_encode(x: &[f64]) -> Result<PureState> {
    require_nonempty(x)?;
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 1e-12) {
        return Err(Error::InvalidArgument(
            "amplitude encoding of a (near) zero vector".into(),
        ));
    }
    PureState::normalized(x.iter().map(|&v| c(v / norm)).collect())
}

/// `sum_j sqrt(p_j)|j>`.
pub fn sqrt_encode(p: &SimplexPoint) -> Result<PureState> {
    PureState::normalized(p.coords.iter().map(|&v| c(v.sqrt())).collect())
}

/// `sum_j p_j |j><j|`.
pub fn diagonal_encode(p: &SimplexPoint) -> Result<DensityMatrix> {
    DensityMatrix::diagonal(&p.coords)
}

/// In-place normalized Walsh-Hadamard transform.
fn walsh_hadamard(v: &mut [Complex64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    v.iter_mut().for_each(|a| *a *= scale);
}

/// Second-order IQP feature map `H U_phi(x) H |0...0>` with
/// `phi_j = x_j` and `phi_{k,l} = (pi - x_k)(pi - x_l)`.
pub fn iqp_encode(x: &[f64]) -> Result<PureState> {
    require_nonempty(x)?;
    let d = x.len();
    if d > 20 {
        return Err(Error::InvalidArgument(format!(
            "IQP encoding of {d} features would need 2^{d} amplitudes"
        )));
    }
    let dim = 1usize << d;
    let pi = std::f64::consts::PI;
    let amp0 = 1.0 / (dim as f64).sqrt();
    let mut v: Vec<Complex64> = (0..dim)
        .map(|b| {
            let z = |j: usize| {
                if (b >> (d - 1 - j)) & 1 == 0 {
                    1.0
                } else {
                    -1.0
                }
            };
            let mut phase = 0.0;
            for j in 0..d {
                phase += x[j] * z(j);
            }
            for k in 0..d {
                for l in (k + 1)..d {
                    phase += (pi - x[k]) * (pi - x[l]) * z(k) * z(l);
                }
            }
            Complex64::from_polar(amp0, phase)
        })
        .collect();
    walsh_hadamard(&mut v);
    PureState::normalized(v)
}

/// Data-fitted map `x -> R_m [(x - centroid) / (r sqrt(m(m+1))); 0] + 1/(m+1)`
/// carrying a cloud in `R^m` into the probability simplex `Delta^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformTransform {
    pub m: usize,
    pub centroid: Vec<f64>,
    /// Largest distance of a point from the centroid.
    pub radius: f64,
    /// `R_m`, row-major `(m+1) x (m+1)`.
    pub rotation: Vec<Vec<f64>>,
    /// Extra contraction factor in `(0, 1]`.
    pub shrink: f64,
}

/// Orthogonal `R_m` rotating the hyperplane `x_{m+1} = 0` onto the plane
/// orthogonal to the all-ones vector.
pub fn simplex_rotation(m: usize) -> DMatrix<f64> {
    let mf = m as f64;
    let k = (mf + 1.0).sqrt();
    let s = DVector::from_element(m + 1, 1.0 / k);
    let mut u = DVector::from_element(m + 1, -1.0);
    u[m] = mf;
    u /= (mf * (mf + 1.0)).sqrt();
    let id = DMatrix::<f64>::identity(m + 1, m + 1);
    let sym = &s * s.transpose() + &u * u.transpose();
    let skew = &s * u.transpose() - &u * s.transpose();
    id + sym * ((1.0 - k) / k) + skew * (mf / (mf + 1.0)).sqrt()
}

impl UniformTransform {
    /// Fits the centroid and radius of `cloud`.
    pub fn fit(cloud: &PointCloud) -> Result<Self> {
        if cloud.len() < 2 {
            return Err(Error::Degenerate(
                "uniform transform needs at least two points".into(),
            ));
        }
        let centroid = cloud.centroid();
        let radius = cloud
            .points()
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&centroid)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if !(radius > 0.0) {
            return Err(Error::Degenerate("all points coincide".into()));
        }
        let m = cloud.dim();
        let r = simplex_rotation(m);
        let rotation = (0..=m)
            .map(|i| (0..=m).map(|j| r[(i, j)]).collect())
            .collect();
        Ok(Self {
            m,
            centroid,
            radius,
            rotation,
            shrink: 1.0,
        })
    }

    /// Same transform with the radius divided by `shrink`, pulling images
    /// towards the barycenter.
    pub fn with_shrink(&self, shrink: f64) -> Result<Self> {
        if !(shrink > 0.0 && shrink <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "shrink must lie in (0, 1], got {shrink}"
            )));
        }
        Ok(Self {
            shrink,
            ..self.clone()
        })
    }

    /// `r sqrt(m(m+1)) / shrink`: every pairwise Euclidean distance is
    /// divided by exactly this factor.
    pub fn scale_factor(&self) -> f64 {
        let mf = self.m as f64;
        self.radius * (mf * (mf + 1.0)).sqrt() / self.shrink
    }

    pub fn apply(&self, x: &[f64]) -> Result<SimplexPoint> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: x.len(),
            });
        }
        let scale = 1.0 / self.scale_factor();
        let y: Vec<f64> = x
            .iter()
            .zip(&self.centroid)
            .map(|(a, b)| (a - b) * scale)
            .collect();
        let shift = 1.0 / (self.m as f64 + 1.0);
        let out = self
            .rotation
            .iter()
            .map(|row| {
                row[..self.m]
                    .iter()
                    .zip(&y)
                    .map(|(r, v)| r * v)
                    .sum::<f64>()
                    + shift
            })
            .collect();
        SimplexPoint::new(out)
    }
}

pub fn fit_uniform_transform(cloud: &PointCloud) -> Result<UniformTransform> {
    UniformTransform::fit(cloud)
}

pub fn apply_uniform_transform(t: &UniformTransform, x: &[f64]) -> Result<SimplexPoint> {
    t.apply(x)
}

/// Uniform transform followed by diagonal encoding.
pub fn utd_encode(cloud: &PointCloud) -> Result<Vec<DensityMatrix>> {
    let t = UniformTransform::fit(cloud)?;
    cloud
        .points()
        .iter()
        .map(|p| diagonal_encode(&t.apply(p)?))
        .collect()
}

/// Uniform transform (radius divided by `shrink`) followed by square-root
/// encoding.
pub fn uts_encode(cloud: &PointCloud, shrink: f64) -> Result<Vec<PureState>> {
    let t = UniformTransform::fit(cloud)?.with_shrink(shrink)?;
    cloud
        .points()
        .iter()
        .map(|p| sqrt_encode(&t.apply(p)?))
        .collect()
}

/// Encoding names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingKind {
    Angle,
    DenseAngle,
    Amplitude,
    Sqrt,
    Diagonal,
    Iqp,
    Utd,
    Uts,
}

impl std::str::FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "angle" => Self::Angle,
            "dense-angle" => Self::DenseAngle,
            "amplitude" => Self::Amplitude,
            "sqrt" => Self::Sqrt,
            "diagonal" => Self::Diagonal,
            "iqp" => Self::Iqp,
            "utd" => Self::Utd,
            "uts" => Self::Uts,
            other => return Err(Error::Parse(format!("unknown encoding {other:?}"))),
        })
    }
}

impl EncodingKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Angle => "angle",
            Self::DenseAngle => "dense-angle",
            Self::Amplitude => "amplitude",
            Self::Sqrt => "sqrt",
            Self::Diagonal => "diagonal",
            Self::Iqp => "iqp",
            Self::Utd => "utd",
            Self::Uts => "uts",
        }
    }
}

/// Encodes every point of `cloud` with `kind`.
///
/// Pointwise encodings (`angle`, `dense-angle`, `iqp`, `amplitude`) see each
/// point multiplied by `prescale`. `sqrt` and `diagonal` treat each point as
/// a simplex point. `utd` and `uts` fit a uniform transform to the whole
/// cloud first; `shrink` applies to `uts`.
pub fn encode_cloud(
    cloud: &PointCloud,
    kind: EncodingKind,
    prescale: f64,
    shrink: f64,
) -> Result<Vec<State>> {
    let scaled = |p: &[f64]| -> Vec<f64> { p.iter().map(|v| v * prescale).collect() };
    let pure = |f: fn(&[f64]) -> Result<PureState>| -> Result<Vec<State>> {
        cloud
            .points()
            .iter()
            .map(|p| f(&scaled(p)).map(State::Pure))
            .collect()
    };
    match kind {
        EncodingKind::Angle => pure(angle_encode),
        EncodingKind::DenseAngle => pure(dense_angle_encode),
        EncodingKind::Iqp => pure(iqp_encode),
        EncodingKind::Amplitude => pure(amplitude_encode),
        EncodingKind::Sqrt => cloud
            .points()
            .iter()
            .map(|p| sqrt_encode(&SimplexPoint::new(p.clone())?).map(State::Pure))
            .collect(),
        EncodingKind::Diagonal => cloud
            .points()
            .iter()
            .map(|p| diagonal_encode(&SimplexPoint::new(p.clone())?).map(State::Mixed))
            .collect(),
        EncodingKind::Utd => Ok(utd_encode(cloud)?.into_iter().map(State::Mixed).collect()),
        EncodingKind::Uts => Ok(uts_encode(cloud, shrink)?
            .into_iter()
            .map(State::Pure)
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::euclidean_distance_matrix;
    use crate::quantum::{fidelity_pure, state_distance, QuantumMetric};
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn circle(n: usize, r: f64) -> PointCloud {
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
    fn simplex_point_clamps_and_rejects() {
        let p = SimplexPoint::new(vec![-1e-13, 0.5, 0.5]).unwrap();
        assert_eq!(p.coords()[0], 0.0);
        assert!(SimplexPoint::new(vec![-1e-6, 0.5, 0.5]).is_err());
        assert!(SimplexPoint::new(vec![0.3, 0.3]).is_err());
    }

    #[test]
    fn angle_examples() {
        let s = angle_encode(&[0.0, 0.0]).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0));
        let one = angle_encode(&[PI]).unwrap();
        assert!(one.amplitudes()[0].norm() < 1e-15 && close(one.amplitudes()[1].re, 1.0, 1e-15));
        let (a, b, cc, e) = (0.3, -1.1, 2.0, 0.4);
        let ip = angle_encode(&[a, b])
            .unwrap()
            .inner(&angle_encode(&[cc, e]).unwrap());
        assert!(close(
            ip.re,
            ((cc - a) / 2.0).cos() * ((e - b) / 2.0).cos(),
            1e-14
        ));
        assert!(angle_encode(&[]).is_err());
    }

    #[test]
    fn dense_angle_examples() {
        let s = dense_angle_encode(&[0.0, 0.0]).unwrap();
        for a in s.amplitudes() {
            assert!(close(a.re, FRAC_1_SQRT_2, 1e-15));
        }
        let z = dense_angle_encode(&[-PI, 1.234]).unwrap();
        assert!(close(z.amplitudes()[0].norm(), 1.0, 1e-15));
        assert!(z.amplitudes()[1].norm() < 1e-15);
        let r = 2.0;
        for k in 0..10 {
            let t = 2.0 * PI * k as f64 / 10.0;
            let b = dense_angle_encode(&[r * t.cos(), r * t.sin()])
                .unwrap()
                .bloch()
                .unwrap();
            assert!(close(b[2], ((r * t.cos() + PI) / 2.0).cos(), 1e-14));
        }
        assert_eq!(dense_angle_encode(&[0.2, 0.1, 0.3]).unwrap().dim(), 4);
    }

    #[test]
    fn amplitude_examples() {
        let s = amplitude_encode(&[1.0, 1.0]).unwrap();
        assert!(close(s.amplitudes()[0].re, FRAC_1_SQRT_2, 1e-15));
        let a = amplitude_encode(&[0.3, -0.2, 0.5, 0.1]).unwrap();
        let b = amplitude_encode(&[0.9, -0.6, 1.5, 0.3]).unwrap();
        assert!(close(fidelity_pure(&a, &b).unwrap(), 1.0, 1e-14));
        assert!(amplitude_encode(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn sqrt_and_diagonal_examples() {
        let v = SimplexPoint::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(sqrt_encode(&v).unwrap(), PureState::basis(3, 1));
        let p = SimplexPoint::new(vec![0.2, 0.5, 0.3]).unwrap();
        let q = SimplexPoint::new(vec![0.6, 0.1, 0.3]).unwrap();
        let f = fidelity_pure(&sqrt_encode(&p).unwrap(), &sqrt_encode(&q).unwrap()).unwrap();
        let bc: f64 = p
            .coords()
            .iter()
            .zip(q.coords())
            .map(|(a, b)| (a * b).sqrt())
            .sum();
        assert!(close(f, bc * bc, 1e-14));
        let hs = state_distance(
            &State::Mixed(diagonal_encode(&p).unwrap()),
            &State::Mixed(diagonal_encode(&q).unwrap()),
            QuantumMetric::HilbertSchmidt,
        )
        .unwrap();
        let l2 = p
            .coords()
            .iter()
            .zip(q.coords())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(close(hs, l2, 1e-14));
    }

    #[test]
    fn iqp_single_qubit_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (x, y): (f64, f64) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
            let ip = iqp_encode(&[x]).unwrap().inner(&iqp_encode(&[y]).unwrap());
            assert!(close(ip.norm(), (x - y).cos().abs(), 1e-13));
        }
    }

    /// `exp(iA)|00>` for Hermitian `A` via eigendecomposition.
    fn expm_oracle(x: [f64; 2]) -> Vec<Complex64> {
        let sx = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let id = DMatrix::<Complex64>::identity(2, 2);
        let phi = (PI - x[0]) * (PI - x[1]);
        let a =
            sx.kronecker(&id) * c(x[0]) + id.kronecker(&sx) * c(x[1]) + sx.kronecker(&sx) * c(phi);
        let eig = SymmetricEigen::new(a);
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            4,
            eig.eigenvalues
                .iter()
                .map(|&l| Complex64::from_polar(1.0, l)),
        ));
        let u = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
        u.column(0).iter().copied().collect()
    }

    #[test]
    fn iqp_two_qubits_matches_matrix_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let x = [rng.random_range(-PI..PI), rng.random_range(-PI..PI)];
            let fast = iqp_encode(&x).unwrap();
            let slow = expm_oracle(x);
            for (a, b) in fast.amplitudes().iter().zip(&slow) {
                assert!((a - b).norm() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn encodings_are_periodic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let shifted = |x: &[f64], j: usize, by: f64| {
            let mut y = x.to_vec();
            y[j] += by;
            y
        };
        for _ in 0..20 {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-PI..PI)).collect();
            for j in 0..4 {
                let y = shifted(&x, j, 2.0 * PI);
                assert!(close(
                    fidelity_pure(&angle_encode(&x).unwrap(), &angle_encode(&y).unwrap()).unwrap(),
                    1.0,
                    1e-10
                ));
                // the polar feature of a dense-angle qubit enters as (t + pi)/4
                let period = if j % 2 == 0 { 4.0 * PI } else { 2.0 * PI };
                let y = shifted(&x, j, period);
                let f = fidelity_pure(
                    &dense_angle_encode(&x).unwrap(),
                    &dense_angle_encode(&y).unwrap(),
                )
                .unwrap();
                assert!(close(f, 1.0, 1e-10));
            }
            // the pair phases (pi - x_k)(pi - x_l) make IQP periodic only for d = 1
            let one = [x[0]];
            let f = fidelity_pure(
                &iqp_encode(&one).unwrap(),
                &iqp_encode(&[x[0] + 2.0 * PI]).unwrap(),
            )
            .unwrap();
            assert!(close(f, 1.0, 1e-10));
        }
    }

    #[test]
    fn rotation_matches_closed_forms() {
        let r1 = simplex_rotation(1);
        let h = FRAC_1_SQRT_2;
        let want1 = [[h, h], [-h, h]];
        let s3 = 3f64.sqrt();
        let want2 = [
            [(1.0 + s3) / 2.0, (1.0 - s3) / 2.0, 1.0],
            [(1.0 - s3) / 2.0, (1.0 + s3) / 2.0, 1.0],
            [-1.0, -1.0, 1.0],
        ];
        let r2 = simplex_rotation(2);
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(r1[(i, j)], want1[i][j], 1e-15));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!(close(r2[(i, j)], want2[i][j] / s3, 1e-15));
            }
        }
        for m in 1..=6 {
            let r = simplex_rotation(m);
            assert!((r.transpose() * &r - DMatrix::identity(m + 1, m + 1)).amax() < 1e-12);
        }
    }

    #[test]
    fn uniform_transform_on_unit_circle() {
        let cloud = circle(12, 1.0);
        let t = UniformTransform::fit(&cloud).unwrap();
        assert!(close(t.radius, 1.0, 1e-12));
        let s3 = 3f64.sqrt();
        let k = 2.0 * 2f64.sqrt();
        for p in cloud.points() {
            let (ck, sk) = (p[0], p[1]);
            let want = [
                (1.0 + (1.0 + s3) / k * ck + (1.0 - s3) / k * sk) / 3.0,
                (1.0 + (1.0 - s3) / k * ck + (1.0 + s3) / k * sk) / 3.0,
                (1.0 - ck / 2f64.sqrt() - sk / 2f64.sqrt()) / 3.0,
            ];
            let got = t.apply(p).unwrap();
            for (a, b) in got.coords().iter().zip(want) {
                assert!(close(*a, b, 1e-12));
            }
        }
        let centre = t.apply(&t.centroid.clone()).unwrap();
        for v in centre.coords() {
            assert!(close(*v, 1.0 / 3.0, 1e-15));
        }
    }

    #[test]
    fn uniform_transform_is_a_homothety() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 1..=5 {
            let pts: Vec<Vec<f64>> = (0..15)
                .map(|_| (0..m).map(|_| rng.random_range(-3.0..3.0)).collect())
                .collect();
            let cloud = PointCloud::new(pts).unwrap();
            let t = UniformTransform::fit(&cloud).unwrap();
            let imgs: Vec<Vec<f64>> = cloud
                .points()
                .iter()
                .map(|p| t.apply(p).unwrap().coords().to_vec())
                .collect();
            let before = euclidean_distance_matrix(&cloud);
            let after = euclidean_distance_matrix(&PointCloud::new(imgs).unwrap());
            for i in 0..15 {
                for j in 0..15 {
                    assert!(close(
                        after.get(i, j),
                        before.get(i, j) / t.scale_factor(),
                        1e-10
                    ));
                }
            }
        }
    }

    #[test]
    fn utd_two_point_cloud() {
        let cloud = PointCloud::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let states = utd_encode(&cloud).unwrap();
        let d = state_distance(
            &State::Mixed(states[0].clone()),
            &State::Mixed(states[1].clone()),
            QuantumMetric::HilbertSchmidt,
        )
        .unwrap();
        // r = 1/2, m = 1: distance 1 / (r sqrt 2)
        assert!(close(d, 1.0 / (0.5 * 2f64.sqrt()), 1e-14));
        assert!(close(d, 2f64.sqrt(), 1e-14));
    }

    #[test]
    fn uts_shrink_keeps_points_inside() {
        let cloud = circle(200, 1.0);
        let t = UniformTransform::fit(&cloud).unwrap();
        let min_full = cloud
            .points()
            .iter()
            .flat_map(|p| t.apply(p).unwrap().coords().to_vec())
            .fold(f64::INFINITY, f64::min);
        assert!(min_full >= -1e-12);
        let ts = t.with_shrink(0.75).unwrap();
        let min_shrunk = cloud
            .points()
            .iter()
            .flat_map(|p| ts.apply(p).unwrap().coords().to_vec())
            .fold(f64::INFINITY, f64::min);
        assert!(min_shrunk >= (1.0 - 0.75) / 3.0 - 1e-12, "{min_shrunk}");
        assert!(uts_encode(&cloud, 0.0).is_err());
        assert!(uts_encode(&cloud, 1.5).is_err());
        assert_eq!(uts_encode(&cloud, 1.0).unwrap().len(), 200);
    }
}

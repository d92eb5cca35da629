//! Finite-dimensional quantum states and the distances between them.
//!
//! Pure states are complex unit vectors; mixed states are Hermitian,
//! positive semidefinite, trace-one matrices. Every distance here uses the
//! convention that bounded metrics (Bures fidelity, Bures angle, Hellinger,
//! Wigner-Yanase, Fubini-Study) have maximum value one.

use std::f64::consts::FRAC_2_PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// Complex unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that must already have unit norm (within 1e-10).
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidState("state must have dimension >= 1".into()));
        }
        let norm = norm_sqr(&amps).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = norm_sqr(&amps).sqrt();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { amps })
    }

    pub fn from_real(re: &[f64]) -> Result<Self> {
        Self::new(re.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let v = DVector::from_column_slice(&self.amps);
        DensityMatrix {
            m: &v * v.adjoint(),
        }
    }

    /// Bloch vector `(<sigma_1>, <sigma_2>, <sigma_3>)` of a qubit state.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.dim(),
            });
        }
        let (a, b) = (self.amps[0], self.amps[1]);
        let ab = a.conj() * b;
        Ok([2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()])
    }

    pub fn apply(&self, u: &DMatrix<Complex64>) -> Result<PureState> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.ncols(),
                got: self.dim(),
            });
        }
        let v = u * DVector::from_column_slice(&self.amps);
        PureState::normalized(v.iter().copied().collect())
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// Hermitian positive semidefinite trace-one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let d = m.nrows();
        if d == 0 || m.ncols() != d {
            return Err(Error::InvalidState(
                "density matrix must be square and nonempty".into(),
            ));
        }
        if (&m - m.adjoint()).norm() > NORM_TOL {
            return Err(Error::InvalidState(
                "density matrix is not Hermitian".into(),
            ));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min_eig = SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig}"
            )));
        }
        Ok(Self { m })
    }

    /// `sum_j p_j |j><j|` for a probability vector `p`.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        let d = p.len();
        let mut m = DMatrix::zeros(d, d);
        for (j, &x) in p.iter().enumerate() {
            m[(j, j)] = Complex64::new(x, 0.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    /// Diagonal entries when the matrix is exactly diagonal.
    fn as_diagonal(&self) -> Option<Vec<f64>> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if i != j && self.m[(i, j)] != Complex64::new(0.0, 0.0) {
                    return None;
                }
            }
        }
        Some((0..d).map(|i| self.m[(i, i)].re).collect())
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.ncols(),
                got: self.dim(),
            });
        }
        let mut m = u * &self.m * u.adjoint();
        hermitize(&mut m);
        Ok(Self { m })
    }
}

fn hermitize(m: &mut DMatrix<Complex64>) {
    let h = (&*m + m.adjoint()).scale(0.5);
    *m = h;
}

/// Eigenvalues clamped at zero and eigenvectors of a Hermitian PSD matrix.
fn psd_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let mut h = m.clone();
    hermitize(&mut h);
    let eig = SymmetricEigen::new(h);
    let vals = eig
        .eigenvalues
        .iter()
        .map(|&l| if l < 0.0 { 0.0 } else { l })
        .collect();
    (vals, eig.eigenvectors)
}

fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (vals, vecs) = psd_eigen(m);
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|l| Complex64::new(l.sqrt(), 0.0)),
    ));
    let mut s = &vecs * d * vecs.adjoint();
    hermitize(&mut s);
    s
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut h = m.clone();
    hermitize(&mut h);
    SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
}

/// A pure or mixed state.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(p) => p.dim(),
            State::Mixed(m) => m.dim(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => p.to_density(),
            State::Mixed(m) => m.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            State::Pure(p) => Some(p),
            State::Mixed(_) => None,
        }
    }
}

impl From<PureState> for State {
    fn from(p: PureState) -> Self {
        State::Pure(p)
    }
}

impl From<DensityMatrix> for State {
    fn from(m: DensityMatrix) -> Self {
        State::Mixed(m)
    }
}

/// `|<psi|phi>|^2`, clamped to `[0, 1]`.
pub fn fidelity_pure(psi: &PureState, phi: &PureState) -> Result<f64> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            got: phi.dim(),
        });
    }
    Ok(psi.inner(phi).norm_sqr().clamp(0.0, 1.0))
}

fn check_probability(p: &[f64]) -> Result<()> {
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidSimplexPoint(
            "negative or non-finite probability".into(),
        ));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSimplexPoint(format!(
            "probabilities sum to {s}"
        )));
    }
    Ok(())
}

/// Classical Bhattacharyya coefficient `sum_j sqrt(p_j q_j)`.
pub fn bhattacharyya(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    check_probability(p)?;
    check_probability(q)?;
    Ok(p.iter()
        .zip(q)
        .map(|(a, b)| (a * b).sqrt())
        .sum::<f64>()
        .clamp(0.0, 1.0))
}

/// Fidelity of two diagonal states, `(sum_j sqrt(p_j q_j))^2`.
pub fn fidelity_diagonal(p: &[f64], q: &[f64]) -> Result<f64> {
    Ok(bhattacharyya(p, q)?.powi(2).clamp(0.0, 1.0))
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity_mixed(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let sr = psd_sqrt(&rho.m);
    let inner = &sr * &sigma.m * &sr;
    let (vals, _) = psd_eigen(&inner);
    let tr: f64 = vals.iter().map(|l| l.sqrt()).sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

/// Quantum Bhattacharyya coefficient (affinity) `Tr[sqrt(rho) sqrt(sigma)]`.
pub fn affinity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    Ok((psd_sqrt(&rho.m) * psd_sqrt(&sigma.m))
        .trace()
        .re
        .clamp(0.0, 1.0))
}

/// Fidelity of any two states, using the cheapest exact formula available.
pub fn fidelity(a: &State, b: &State) -> Result<f64> {
    match (a, b) {
        (State::Pure(p), State::Pure(q)) => fidelity_pure(p, q),
        (State::Pure(p), State::Mixed(m)) | (State::Mixed(m), State::Pure(p)) => {
            if p.dim() != m.dim() {
                return Err(Error::DimensionMismatch {
                    expected: p.dim(),
                    got: m.dim(),
                });
            }
            // <psi| sigma |psi>
            let v = DVector::from_column_slice(&p.amps);
            Ok((v.adjoint() * &m.m * &v)[(0, 0)].re.clamp(0.0, 1.0))
        }
        (State::Mixed(x), State::Mixed(y)) => match (x.as_diagonal(), y.as_diagonal()) {
            (Some(p), Some(q)) if p.len() == q.len() => Ok(p
                .iter()
                .zip(&q)
                .map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt())
                .sum::<f64>()
                .powi(2)
                .clamp(0.0, 1.0)),
            _ => fidelity_mixed(x, y),
        },
    }
}

/// Distances between quantum states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantumMetric {
    /// Schatten-1 norm of the difference (maximum 2).
    Trace,
    /// Schatten-2 (Frobenius) norm of the difference.
    HilbertSchmidt,
    /// Schatten-p norm of the difference; `p = inf` is the operator norm.
    Schatten(f64),
    /// `sqrt(1 - sqrt(F))`.
    BuresFidelity,
    /// `(2/pi) arccos(sqrt(F))`.
    BuresAngle,
    /// `sqrt(1 - B)` with `B` the affinity.
    Hellinger,
    /// `(2/pi) arccos(B)`.
    WignerYanase,
    /// Bures angle restricted to pure states.
    FubiniStudy,
}

impl std::str::FromStr for QuantumMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "trace" => Self::Trace,
            "hs" | "hilbert-schmidt" => Self::HilbertSchmidt,
            "bures-fidelity" | "bures" => Self::BuresFidelity,
            "bures-angle" => Self::BuresAngle,
            "hellinger" => Self::Hellinger,
            "wigner-yanase" => Self::WignerYanase,
            "fubini-study" | "fs" => Self::FubiniStudy,
            other => {
                if let Some(p) = other.strip_prefix("schatten-") {
                    let p = if p == "inf" {
                        f64::INFINITY
                    } else {
                        p.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?
                    };
                    if !(p >= 1.0) {
                        return Err(Error::InvalidArgument(format!(
                            "Schatten p must be >= 1, got {p}"
                        )));
                    }
                    Self::Schatten(p)
                } else {
                    return Err(Error::Parse(format!("unknown quantum metric {s:?}")));
                }
            }
        })
    }
}

fn schatten_from_eigs(eigs: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        eigs.iter().map(|l| l.abs()).fold(0.0, f64::max)
    } else {
        eigs.iter()
            .map(|l| l.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

fn arccos01(x: f64) -> f64 {
    FRAC_2_PI * x.clamp(-1.0, 1.0).acos()
}

/// Distance between two states under `metric`.
pub fn state_distance(a: &State, b: &State, metric: QuantumMetric) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if let (State::Pure(p), State::Pure(q)) = (a, b) {
        return pure_distance(p, q, metric);
    }
    if metric == QuantumMetric::FubiniStudy {
        return Err(Error::InvalidState(
            "Fubini-Study distance requires pure states".into(),
        ));
    }
    let (ra, rb) = (a.to_density(), b.to_density());
    let d = match metric {
        QuantumMetric::HilbertSchmidt => (&ra.m - &rb.m).norm(),
        QuantumMetric::Trace => schatten_from_eigs(&hermitian_eigenvalues(&(&ra.m - &rb.m)), 1.0),
        QuantumMetric::Schatten(p) => {
            schatten_from_eigs(&hermitian_eigenvalues(&(&ra.m - &rb.m)), p)
        }
        QuantumMetric::BuresFidelity => (1.0 - fidelity(a, b)?.sqrt()).max(0.0).sqrt(),
        QuantumMetric::BuresAngle => arccos01(fidelity(a, b)?.sqrt()),
        QuantumMetric::Hellinger => (1.0 - affinity_any(&ra, &rb)?).max(0.0).sqrt(),
        QuantumMetric::WignerYanase => arccos01(affinity_any(&ra, &rb)?),
        QuantumMetric::FubiniStudy => unreachable!(),
    };
    Ok(d)
}

fn affinity_any(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    match (a.as_diagonal(), b.as_diagonal()) {
        (Some(p), Some(q)) => Ok(p
            .iter()
            .zip(&q)
            .map(|(x, y)| (x.max(0.0) * y.max(0.0)).sqrt())
            .sum::<f64>()
            .clamp(0.0, 1.0)),
        _ => affinity(a, b),
    }
}

/// Closed forms for pure states: `rho - sigma` has eigenvalues
/// `+-sqrt(1 - F)` and `sqrt(rho) = rho`, so `B = F`.
fn pure_distance(p: &PureState, q: &PureState, metric: QuantumMetric) -> Result<f64> {
    Ok(pure_distance_from_fidelity(fidelity_pure(p, q)?, metric))
}

/// Distance between two pure states with fidelity `f`.
pub fn pure_distance_from_fidelity(f: f64, metric: QuantumMetric) -> f64 {
    let f = f.clamp(0.0, 1.0);
    let gap = (1.0 - f).max(0.0).sqrt();
    match metric {
        QuantumMetric::Trace => 2.0 * gap,
        QuantumMetric::HilbertSchmidt => std::f64::consts::SQRT_2 * gap,
        QuantumMetric::Schatten(p) if p.is_infinite() => gap,
        QuantumMetric::Schatten(p) => 2f64.powf(1.0 / p) * gap,
        QuantumMetric::BuresFidelity => (1.0 - f.sqrt()).max(0.0).sqrt(),
        QuantumMetric::BuresAngle | QuantumMetric::FubiniStudy => arccos01(f.sqrt()),
        QuantumMetric::Hellinger => gap,
        QuantumMetric::WignerYanase => arccos01(f),
    }
}

/// Fidelity value with the number of shots used to estimate it (0 = exact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub value: f64,
    pub shots: u64,
}

/// SWAP-test estimate of `|<psi|phi>|^2` from `shots` Bernoulli trials with
/// acceptance probability `(1 + F) / 2`.
pub fn swap_test_estimate(
    psi: &PureState,
    phi: &PureState,
    shots: u64,
    seed: u64,
) -> Result<FidelityEstimate> {
    if shots < 1 {
        return Err(Error::InvalidArgument(
            "SWAP test needs at least one shot".into(),
        ));
    }
    let f = fidelity_pure(psi, phi)?;
    let p = ((1.0 + f) / 2.0).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let successes = Binomial::new(shots, p)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(&mut rng);
    let value = (2.0 * successes as f64 / shots as f64 - 1.0).clamp(0.0, 1.0);
    Ok(FidelityEstimate { value, shots })
}

/// Haar-random pure state from normalized complex Gaussians.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(s) = PureState::normalized(amps) {
            return s;
        }
    }
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random mixed state `A A^dagger / Tr(A A^dagger)` for Gaussian `A`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let a = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut m = &a * a.adjoint();
    let tr = m.trace().re;
    m /= Complex64::new(tr, 0.0);
    hermitize(&mut m);
    DensityMatrix { m }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
struct PureJson {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MixedJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StateJson {
    Pure(PureJson),
    Mixed(MixedJson),
}

impl From<&State> for StateJson {
    fn from(s: &State) -> Self {
        match s {
            State::Pure(p) => StateJson::Pure(PureJson {
                dim: p.dim(),
                re: p.amps.iter().map(|a| a.re).collect(),
                im: p.amps.iter().map(|a| a.im).collect(),
            }),
            State::Mixed(m) => {
                let d = m.dim();
                StateJson::Mixed(MixedJson {
                    dim: d,
                    re: (0..d)
                        .map(|i| (0..d).map(|j| m.m[(i, j)].re).collect())
                        .collect(),
                    im: (0..d)
                        .map(|i| (0..d).map(|j| m.m[(i, j)].im).collect())
                        .collect(),
                })
            }
        }
    }
}

impl TryFrom<StateJson> for State {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self> {
        match j {
            StateJson::Pure(p) => {
                if p.re.len() != p.dim || p.im.len() != p.dim {
                    return Err(Error::DimensionMismatch {
                        expected: p.dim,
                        got: p.re.len(),
                    });
                }
                let amps =
                    p.re.iter()
                        .zip(&p.im)
                        .map(|(&r, &i)| Complex64::new(r, i))
                        .collect();
                Ok(State::Pure(PureState::new(amps)?))
            }
            StateJson::Mixed(m) => {
                let d = m.dim;
                if m.re.len() != d
                    || m.im.len() != d
                    || m.re.iter().chain(&m.im).any(|r| r.len() != d)
                {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: m.re.len(),
                    });
                }
                let mat = DMatrix::from_fn(d, d, |i, k| Complex64::new(m.re[i][k], m.im[i][k]));
                Ok(State::Mixed(DensityMatrix::new(mat)?))
            }
        }
    }
}

/// Serializes a list of states as a JSON array of state objects.
pub fn states_to_json(states: &[State]) -> Result<String> {
    let raw: Vec<StateJson> = states.iter().map(StateJson::from).collect();
    Ok(serde_json::to_string(&raw)?)
}

pub fn states_from_json(text: &str) -> Result<Vec<State>> {
    let raw: Vec<StateJson> = serde_json::from_str(text)?;
    raw.into_iter().map(State::try_from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn plus() -> PureState {
        PureState::new(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap()
    }

    #[test]
    fn pure_fidelity_examples() {
        let zero = PureState::basis(2, 0);
        let one = PureState::basis(2, 1);
        assert_eq!(fidelity_pure(&zero, &zero).unwrap(), 1.0);
        assert_eq!(fidelity_pure(&zero, &one).unwrap(), 0.0);
        assert!((fidelity_pure(&zero, &plus()).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity_pure(&zero, &PureState::basis(3, 0)).is_err());
    }

    #[test]
    fn diagonal_fidelity_examples() {
        assert!((fidelity_diagonal(&[0.3, 0.7], &[0.3, 0.7]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity_diagonal(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((fidelity_diagonal(&[0.5, 0.5], &[1.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity_diagonal(&[0.5, 0.6], &[1.0, 0.0]).is_err());
        assert!(fidelity_diagonal(&[1.5, -0.5], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn mixed_fidelity_matches_special_cases() {
        let p = [0.2, 0.5, 0.3];
        let q = [0.6, 0.1, 0.3];
        let rho = DensityMatrix::diagonal(&p).unwrap();
        let sigma = DensityMatrix::diagonal(&q).unwrap();
        assert!(
            (fidelity_mixed(&rho, &sigma).unwrap() - fidelity_diagonal(&p, &q).unwrap()).abs()
                < 1e-10
        );
        assert!((fidelity_mixed(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
        let zero = PureState::basis(2, 0);
        let f = fidelity_mixed(&zero.to_density(), &plus().to_density()).unwrap();
        assert!((f - 0.5).abs() < 1e-10);
    }

    #[test]
    fn orthogonal_pure_distances() {
        let a = State::Pure(PureState::basis(2, 0));
        let b = State::Pure(PureState::basis(2, 1));
        let d = |m| state_distance(&a, &b, m).unwrap();
        assert!((d(QuantumMetric::BuresFidelity) - 1.0).abs() < 1e-15);
        assert!((d(QuantumMetric::FubiniStudy) - 1.0).abs() < 1e-15);
        assert!((d(QuantumMetric::HilbertSchmidt) - 2f64.sqrt()).abs() < 1e-15);
        assert!((d(QuantumMetric::Trace) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pure_closed_forms_agree_with_matrix_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let metrics = [
            QuantumMetric::Trace,
            QuantumMetric::HilbertSchmidt,
            QuantumMetric::Schatten(3.0),
            QuantumMetric::Schatten(f64::INFINITY),
            QuantumMetric::BuresFidelity,
            QuantumMetric::BuresAngle,
            QuantumMetric::Hellinger,
            QuantumMetric::WignerYanase,
        ];
        for _ in 0..20 {
            let p = random_pure_state(3, &mut rng);
            let q = random_pure_state(3, &mut rng);
            for m in metrics {
                let closed = pure_distance(&p, &q, m).unwrap();
                let (pa, qb) = (State::Mixed(p.to_density()), State::Mixed(q.to_density()));
                let general = match m {
                    QuantumMetric::BuresFidelity => (1.0
                        - fidelity_mixed(&p.to_density(), &q.to_density())
                            .unwrap()
                            .sqrt())
                    .sqrt(),
                    QuantumMetric::BuresAngle => arccos01(
                        fidelity_mixed(&p.to_density(), &q.to_density())
                            .unwrap()
                            .sqrt(),
                    ),
                    _ => state_distance(&pa, &qb, m).unwrap(),
                };
                assert!(
                    (closed - general).abs() < 1e-6,
                    "{m:?}: {closed} vs {general}"
                );
            }
        }
    }

    #[test]
    fn fubini_study_rejects_mixed() {
        let a = State::Mixed(DensityMatrix::diagonal(&[0.5, 0.5]).unwrap());
        let b = State::Pure(PureState::basis(2, 0));
        assert!(state_distance(&a, &b, QuantumMetric::FubiniStudy).is_err());
    }

    #[test]
    fn swap_test_exact_for_equal_states() {
        let p = plus();
        for shots in [1, 10, 1000] {
            assert_eq!(swap_test_estimate(&p, &p, shots, 3).unwrap().value, 1.0);
        }
        assert!(swap_test_estimate(&p, &p, 0, 3).is_err());
    }

    #[test]
    fn swap_test_concentrates() {
        let zero = PureState::basis(2, 0);
        let one = PureState::basis(2, 1);
        let est = swap_test_estimate(&zero, &one, 100_000, 11).unwrap();
        assert!(est.value < 0.02);
        let half = swap_test_estimate(&zero, &plus(), 1_000_000, 5).unwrap();
        assert!((half.value - 0.5).abs() < 0.005);
        let again = swap_test_estimate(&zero, &plus(), 1_000_000, 5).unwrap();
        assert_eq!(half, again);
    }

    #[test]
    fn density_validation() {
        let not_trace_one = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5), c(0.6)]));
        assert!(DensityMatrix::new(not_trace_one).is_err());
        let negative = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(DensityMatrix::new(negative).is_err());
        let mut non_herm = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5), c(0.5)]));
        non_herm[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(non_herm).is_err());
    }

    #[test]
    fn metric_names_parse() {
        assert_eq!(
            "bures-angle".parse::<QuantumMetric>().unwrap(),
            QuantumMetric::BuresAngle
        );
        assert_eq!(
            "schatten-3".parse::<QuantumMetric>().unwrap(),
            QuantumMetric::Schatten(3.0)
        );
        assert!(
            matches!("schatten-inf".parse::<QuantumMetric>().unwrap(), QuantumMetric::Schatten(p) if p.is_infinite())
        );
        assert!("schatten-0.5".parse::<QuantumMetric>().is_err());
        assert!("nope".parse::<QuantumMetric>().is_err());
    }

    #[test]
    fn state_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let states = vec![
            State::Pure(random_pure_state(4, &mut rng)),
            State::Mixed(random_density(3, &mut rng)),
        ];
        let back = states_from_json(&states_to_json(&states).unwrap()).unwrap();
        assert_eq!(back, states);
    }

    #[test]
    fn bloch_vector_of_plus() {
        let b = plus().bloch().unwrap();
        assert!((b[0] - 1.0).abs() < 1e-15 && b[1].abs() < 1e-15 && b[2].abs() < 1e-15);
    }
}

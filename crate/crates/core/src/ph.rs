//! Vietoris-Rips filtrations and persistent homology over the two-element
//! field.
//!
//! Simplices are stored per dimension, each level sorted by
//! `(filtration, lexicographic vertices)`, and addressed through the
//! combinatorial number system so cofaces can be located without hashing.
//! Diagrams are computed by reducing the coboundary matrix (persistent
//! cohomology, which has the same barcode as homology over a field) with
//! the clearing optimisation.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::metric::{fmt_f64, DistanceMatrix};

/// Default limit on the total number of simplices in a Rips complex.
pub const DEFAULT_SIMPLEX_CAP: usize = 5_000_000;

/// A simplex with its filtration value (the diameter of its vertex set).
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<usize>,
    pub filtration: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// `C(n, k)` for `n <= max_n`, `k <= max_k`.
#[derive(Debug, Clone)]
struct Binomials {
    max_k: usize,
    table: Vec<u64>,
}

impl Binomials {
    fn new(max_n: usize, max_k: usize) -> Self {
        let mut table = vec![0u64; (max_n + 1) * (max_k + 1)];
        for n in 0..=max_n {
            table[n * (max_k + 1)] = 1;
            for k in 1..=max_k.min(n) {
                let a = table[(n - 1) * (max_k + 1) + k - 1];
                let b = if k <= n - 1 {
                    table[(n - 1) * (max_k + 1) + k]
                } else {
                    0
                };
                table[n * (max_k + 1) + k] = a.saturating_add(b);
            }
        }
        Self { max_k, table }
    }

    #[inline]
    fn get(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.table[n * (self.max_k + 1) + k]
        }
    }
}

fn binom_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// All simplices of one dimension in filtration order.
#[derive(Debug, Clone)]
struct Level {
    dim: usize,
    /// Flat vertex lists, stride `dim + 1`.
    verts: Vec<u32>,
    filt: Vec<f64>,
    /// Combinatorial index -> position in this level.
    position: Vec<u32>,
}

impl Level {
    fn len(&self) -> usize {
        self.filt.len()
    }

    fn vertices(&self, pos: usize) -> &[u32] {
        let s = self.dim + 1;
        &self.verts[pos * s..(pos + 1) * s]
    }
}

/// A Vietoris-Rips filtration truncated at some dimension.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    n: usize,
    max_hom_degree: usize,
    levels: Vec<Level>,
    binom: Binomials,
}

/// Rips complex with the default simplex cap.
pub fn vietoris_rips(d: &DistanceMatrix, max_hom_degree: usize) -> Result<FilteredComplex> {
    vietoris_rips_with_cap(d, max_hom_degree, DEFAULT_SIMPLEX_CAP)
}

/// All vertex subsets of size at most `max_hom_degree + 2`, filtered by
/// diameter. Fails before allocating if the complex would exceed `cap`.
pub fn vietoris_rips_with_cap(
    d: &DistanceMatrix,
    max_hom_degree: usize,
    cap: usize,
) -> Result<FilteredComplex> {
    let n = d.len();
    let top = max_hom_degree + 1;
    let total: u128 = (0..=top).map(|k| binom_u128(n, k + 1)).sum();
    if total > cap as u128 {
        return Err(Error::SimplexCapExceeded { cap });
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidArgument("too many points".into()));
    }
    let binom = Binomials::new(n, top + 2);
    let levels = (0..=top).map(|k| build_level(d, k, &binom)).collect();
    Ok(FilteredComplex {
        n,
        max_hom_degree,
        levels,
        binom,
    })
}

fn build_level(d: &DistanceMatrix, k: usize, binom: &Binomials) -> Level {
    let n = d.len();
    let size = k + 1;
    let count = binom.get(n, size) as usize;
    let mut verts = Vec::with_capacity(count * size);
    let mut filt = Vec::with_capacity(count);
    if count > 0 {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let mut f: f64 = 0.0;
            for a in 0..size {
                for b in (a + 1)..size {
                    f = f.max(d.get(comb[a], comb[b]));
                }
            }
            verts.extend(comb.iter().map(|&v| v as u32));
            filt.push(f);
            // next combination in lexicographic order
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if comb[i] < n - size + i {
                    comb[i] += 1;
                    for j in (i + 1)..size {
                        comb[j] = comb[j - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    // stable sort keeps lexicographic order among equal filtrations
    let mut order: Vec<u32> = (0..count as u32).collect();
    order.sort_by(|&a, &b| filt[a as usize].total_cmp(&filt[b as usize]));
    let mut sorted_verts = Vec::with_capacity(verts.len());
    let mut sorted_filt = Vec::with_capacity(count);
    let mut position = vec![0u32; count];
    for (pos, &old) in order.iter().enumerate() {
        let vs = &verts[old as usize * size..(old as usize + 1) * size];
        let idx: u64 = vs
            .iter()
            .enumerate()
            .map(|(i, &v)| binom.get(v as usize, i + 1))
            .sum();
        position[idx as usize] = pos as u32;
        sorted_verts.extend_from_slice(vs);
        sorted_filt.push(filt[old as usize]);
    }
    Level {
        dim: k,
        verts: sorted_verts,
        filt: sorted_filt,
        position,
    }
}

impl FilteredComplex {
    pub fn num_points(&self) -> usize {
        self.n
    }

    pub fn max_hom_degree(&self) -> usize {
        self.max_hom_degree
    }

    /// Highest simplex dimension present.
    pub fn max_dim(&self) -> usize {
        self.max_hom_degree + 1
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Level::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of `dim`-simplices with filtration `<= eps`.
    pub fn count_at(&self, dim: usize, eps: f64) -> usize {
        self.levels
            .get(dim)
            .map_or(0, |l| l.filt.partition_point(|&f| f <= eps))
    }

    /// The `dim`-simplices in filtration order.
    pub fn simplices_of_dim(&self, dim: usize) -> Vec<Simplex> {
        let Some(level) = self.levels.get(dim) else {
            return Vec::new();
        };
        (0..level.len())
            .map(|p| Simplex {
                vertices: level.vertices(p).iter().map(|&v| v as usize).collect(),
                filtration: level.filt[p],
            })
            .collect()
    }

    /// Every simplex, sorted by `(filtration, dimension, lexicographic)`.
    pub fn simplices(&self) -> Vec<Simplex> {
        let mut all: Vec<Simplex> = self
            .levels
            .iter()
            .flat_map(|l| self.simplices_of_dim(l.dim))
            .collect();
        all.sort_by(|a, b| {
            a.filtration
                .total_cmp(&b.filtration)
                .then(a.vertices.len().cmp(&b.vertices.len()))
        });
        all
    }

    fn index_of(&self, verts: &[u32]) -> u64 {
        verts
            .iter()
            .enumerate()
            .map(|(i, &v)| self.binom.get(v as usize, i + 1))
            .sum()
    }

    /// Positions (in level `dim - 1`) of the facets of each `dim`-simplex,
    /// i.e. the columns of the boundary matrix over the two-element field.
    pub fn boundary_matrix(&self, dim: usize) -> Result<Vec<Vec<usize>>> {
        if dim == 0 || dim >= self.levels.len() {
            return Err(Error::InvalidArgument(format!(
                "no boundary map from dimension {dim}"
            )));
        }
        let (lower, level) = (&self.levels[dim - 1], &self.levels[dim]);
        let mut facet = Vec::with_capacity(dim);
        Ok((0..level.len())
            .map(|p| {
                let vs = level.vertices(p);
                let mut col: Vec<usize> = (0..vs.len())
                    .map(|skip| {
                        facet.clear();
                        facet.extend(
                            vs.iter()
                                .enumerate()
                                .filter(|(i, _)| *i != skip)
                                .map(|(_, &v)| v),
                        );
                        lower.position[self.index_of(&facet) as usize] as usize
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect())
    }

    /// Checks that every simplex enters no earlier than each of its facets.
    pub fn validate_monotone(&self) -> Result<()> {
        for dim in 1..self.levels.len() {
            let cols = self.boundary_matrix(dim)?;
            for (p, col) in cols.iter().enumerate() {
                let f = self.levels[dim].filt[p];
                if col.iter().any(|&q| self.levels[dim - 1].filt[q] > f) {
                    return Err(Error::InvalidArgument(format!(
                        "{dim}-simplex {p} enters before a facet"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sorted positions (in level `dim + 1`) of the cofaces of a simplex.
    fn cofaces(&self, dim: usize, pos: usize, out: &mut Vec<u32>) {
        out.clear();
        let vs = self.levels[dim].vertices(pos);
        let upper = &self.levels[dim + 1];
        let size = vs.len();
        // vertices of the coface at or after the insertion point shift rank by one
        let mut shifted: Vec<u64> = vec![0; size + 1];
        for i in (0..size).rev() {
            shifted[i] = shifted[i + 1] + self.binom.get(vs[i] as usize, i + 2);
        }
        let mut prefix: u64 = 0;
        let mut p = 0;
        for v in 0..self.n as u32 {
            if p < size && vs[p] == v {
                prefix += self.binom.get(v as usize, p + 1);
                p += 1;
                continue;
            }
            let idx = prefix + self.binom.get(v as usize, p + 1) + shifted[p];
            out.push(upper.position[idx as usize]);
        }
        out.sort_unstable();
    }
}

/// Symmetric difference of two ascending lists.
fn add_mod2(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Multiset of `(birth, death)` intervals in one homological degree;
/// `death` is `f64::INFINITY` for classes that never die.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub degree: usize,
    pub pairs: Vec<(f64, f64)>,
}

impl PersistenceDiagram {
    pub fn new(degree: usize, mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        for &(b, d) in &pairs {
            if !(b >= 0.0) || !b.is_finite() || d.is_nan() || !(b < d) {
                return Err(Error::InvalidArgument(format!(
                    "invalid persistence pair ({b}, {d})"
                )));
            }
        }
        sort_pairs(&mut pairs);
        Ok(Self { degree, pairs })
    }

    pub fn empty(degree: usize) -> Self {
        Self {
            degree,
            pairs: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn finite(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.pairs.iter().copied().filter(|p| p.1.is_finite())
    }

    pub fn infinite_births(&self) -> Vec<f64> {
        self.pairs
            .iter()
            .filter(|p| p.1.is_infinite())
            .map(|p| p.0)
            .collect()
    }

    /// Pairs of length strictly greater than `len`.
    pub fn longer_than(&self, len: f64) -> usize {
        self.pairs.iter().filter(|(b, d)| d - b > len).count()
    }

    /// Every endpoint multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            degree: self.degree,
            pairs: self
                .pairs
                .iter()
                .map(|&(b, d)| (b * lambda, d * lambda))
                .collect(),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let pairs: Vec<Value> = self
            .pairs
            .iter()
            .map(|&(b, d)| {
                if d.is_infinite() {
                    json!([b, "inf"])
                } else {
                    json!([b, d])
                }
            })
            .collect();
        json!({ "degree": self.degree, "pairs": pairs })
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let bad = || Error::Parse("malformed persistence diagram JSON".into());
        let degree = v.get("degree").and_then(Value::as_u64).ok_or_else(bad)? as usize;
        let pairs = v
            .get("pairs")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|p| {
                let b = p.get(0).and_then(Value::as_f64).ok_or_else(bad)?;
                let d = match p.get(1).ok_or_else(bad)? {
                    Value::String(s) if s == "inf" => f64::INFINITY,
                    other => other.as_f64().ok_or_else(bad)?,
                };
                Ok((b, d))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(degree, pairs)
    }
}

fn sort_pairs(pairs: &mut [(f64, f64)]) {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
}

/// JSON array of diagram objects.
pub fn diagrams_to_json(dgms: &[PersistenceDiagram]) -> Result<String> {
    let v: Vec<Value> = dgms.iter().map(PersistenceDiagram::to_json_value).collect();
    Ok(serde_json::to_string(&v)?)
}

pub fn diagrams_from_json(text: &str) -> Result<Vec<PersistenceDiagram>> {
    let v: Value = serde_json::from_str(text)?;
    v.as_array()
        .ok_or_else(|| Error::Parse("expected a JSON array of diagrams".into()))?
        .iter()
        .map(PersistenceDiagram::from_json_value)
        .collect()
}

/// Barcode CSV with a `degree,birth,death` header and `inf` deaths.
pub fn barcodes_to_csv(dgms: &[PersistenceDiagram]) -> String {
    let mut out = String::from("degree,birth,death\n");
    for d in dgms {
        for &(b, e) in &d.pairs {
            let _ = writeln!(out, "{},{},{}", d.degree, fmt_f64(b), fmt_f64(e));
        }
    }
    out
}

/// Reads barcode CSV; degrees without bars up to the largest listed degree
/// come back as empty diagrams.
pub fn barcodes_from_csv(text: &str) -> Result<Vec<PersistenceDiagram>> {
    let mut by_degree: Vec<Vec<(f64, f64)>> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if line.starts_with("degree") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!(
                "expected degree,birth,death: {line:?}"
            )));
        }
        let perr = |e: &dyn std::fmt::Display| Error::Parse(format!("{line:?}: {e}"));
        let k: usize = fields[0].parse().map_err(|e| perr(&e))?;
        let b: f64 = fields[1].parse().map_err(|e| perr(&e))?;
        let d: f64 = if fields[2] == "inf" {
            f64::INFINITY
        } else {
            fields[2].parse().map_err(|e| perr(&e))?
        };
        if by_degree.len() <= k {
            by_degree.resize(k + 1, Vec::new());
        }
        by_degree[k].push((b, d));
    }
    by_degree
        .into_iter()
        .enumerate()
        .map(|(k, p)| PersistenceDiagram::new(k, p))
        .collect()
}

/// Persistence diagrams in degrees `0..=max_hom_degree`.
///
/// Zero-length intervals are dropped. Intervals are half-open,
/// `[birth, death)`.
pub fn persistence(k: &FilteredComplex) -> Vec<PersistenceDiagram> {
    let mut out = Vec::with_capacity(k.max_hom_degree + 1);
    let mut cleared = vec![false; k.levels[0].len()];
    for dim in 0..=k.max_hom_degree {
        let (pairs, next) = reduce_degree(k, dim, &cleared);
        out.push(PersistenceDiagram::new(dim, pairs).expect("reduction yields valid intervals"));
        cleared = next;
    }
    out
}

/// Reduces the coboundary columns of the `dim`-simplices, processed in
/// reverse filtration order. Returns the intervals and the `dim + 1`
/// simplices that became pivots (their own columns would reduce to zero).
fn reduce_degree(
    k: &FilteredComplex,
    dim: usize,
    cleared: &[bool],
) -> (Vec<(f64, f64)>, Vec<bool>) {
    let level = &k.levels[dim];
    let upper = &k.levels[dim + 1];
    let mut owner = vec![u32::MAX; upper.len()];
    let mut stored: Vec<Vec<u32>> = Vec::new();
    let mut next_cleared = vec![false; upper.len()];
    let mut pairs = Vec::new();
    let mut col = Vec::new();
    let mut scratch = Vec::new();
    for pos in (0..level.len()).rev() {
        if cleared[pos] {
            continue;
        }
        k.cofaces(dim, pos, &mut col);
        let birth = level.filt[pos];
        loop {
            let Some(&piv) = col.first() else {
                pairs.push((birth, f64::INFINITY));
                break;
            };
            let o = owner[piv as usize];
            if o == u32::MAX {
                let death = upper.filt[piv as usize];
                if death > birth {
                    pairs.push((birth, death));
                }
                owner[piv as usize] = stored.len() as u32;
                next_cleared[piv as usize] = true;
                stored.push(std::mem::take(&mut col));
                break;
            }
            add_mod2(&col, &stored[o as usize], &mut scratch);
            std::mem::swap(&mut col, &mut scratch);
        }
    }
    (pairs, next_cleared)
}

/// Rips complex plus persistence in one call.
pub fn rips_persistence(
    d: &DistanceMatrix,
    max_hom_degree: usize,
) -> Result<Vec<PersistenceDiagram>> {
    Ok(persistence(&vietoris_rips(d, max_hom_degree)?))
}

/// Number of intervals in `degree` alive at scale `eps` (`birth <= eps < death`).
pub fn betti(d: &DistanceMatrix, eps: f64, degree: usize, max_hom_degree: usize) -> Result<usize> {
    if degree > max_hom_degree {
        return Err(Error::InvalidArgument(format!(
            "degree {degree} exceeds max_hom_degree {max_hom_degree}"
        )));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "scale must be nonnegative, got {eps}"
        )));
    }
    let dgms = rips_persistence(d, max_hom_degree)?;
    Ok(dgms[degree]
        .pairs
        .iter()
        .filter(|&&(b, e)| b <= eps && eps < e)
        .count())
}

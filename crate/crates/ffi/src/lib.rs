//! C interface to `qtopo`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! a [`QtopoStatus`]; the message of the most recent failure on the calling
//! thread is available from [`qtopo_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use qtopo::bottleneck::bottleneck_distance;
use qtopo::encode::EncodingKind;
use qtopo::experiment::{encoded_distance_matrix, EncodingSpec};
use qtopo::metric::{
    distortion, euclidean_distance_matrix, optimal_weight, PointCloud, WeightObjective,
};
use qtopo::ph::{persistence, rips_persistence, vietoris_rips_with_cap};
use qtopo::quantum::QuantumMetric;
use qtopo::{DistanceMatrix, Error, PersistenceDiagram};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QtopoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvalidData = 4,
    Numeric = 5,
    Parse = 6,
    Io = 7,
    Panic = 8,
}

/// Symmetric matrix of pairwise distances.
pub struct QtopoDistanceMatrix(DistanceMatrix);

/// Persistence diagrams for degrees `0..=max_degree`.
pub struct QtopoDiagrams(Vec<PersistenceDiagram>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QtopoStatus {
    match e {
        Error::DimensionMismatch { .. } => QtopoStatus::DimensionMismatch,
        Error::InvalidArgument(_) => QtopoStatus::InvalidArgument,
        Error::InvalidDistanceMatrix(_)
        | Error::InvalidSimplexPoint(_)
        | Error::InvalidCorrespondence(_) => QtopoStatus::InvalidData,
        Error::Parse(_) | Error::Json(_) => QtopoStatus::Parse,
        Error::Io(_) => QtopoStatus::Io,
        _ if e.is_numeric() => QtopoStatus::Numeric,
        _ => QtopoStatus::InvalidArgument,
    }
}

fn guard<F>(f: F) -> QtopoStatus
where
    F: FnOnce() -> Result<(), QtopoStatus> + UnwindSafe,
{
    match catch_unwind(f) {
        Ok(Ok(())) => QtopoStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            QtopoStatus::Panic
        }
    }
}

fn lib<T>(r: qtopo::Result<T>) -> Result<T, QtopoStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null() -> QtopoStatus {
    set_error("null pointer argument".into());
    QtopoStatus::NullPointer
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], QtopoStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, QtopoStatus> {
    p.as_ref().ok_or_else(null)
}

unsafe fn out<T>(p: *mut T, v: T) -> Result<(), QtopoStatus> {
    if p.is_null() {
        return Err(null());
    }
    p.write(v);
    Ok(())
}

unsafe fn string<'a>(p: *const c_char) -> Result<&'a str, QtopoStatus> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not valid UTF-8".into());
        QtopoStatus::Parse
    })
}

fn cloud(points: &[f64], n: usize, dim: usize) -> Result<PointCloud, QtopoStatus> {
    if dim == 0 {
        set_error("dim must be >= 1".into());
        return Err(QtopoStatus::InvalidArgument);
    }
    lib(PointCloud::new(
        points.chunks(dim).take(n).map(<[f64]>::to_vec).collect(),
    ))
}

fn checked_len(a: usize, b: usize) -> Result<usize, QtopoStatus> {
    a.checked_mul(b).ok_or_else(|| {
        set_error("size overflow".into());
        QtopoStatus::InvalidArgument
    })
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message describing the last failure on this thread, or null. The string
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qtopo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qtopo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a distance matrix from `n * n` row-major entries.
///
/// # Safety
/// `entries` must point to `n * n` readable doubles and `out_matrix` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn qtopo_distance_matrix_new(
    n: usize,
    entries: *const f64,
    out_matrix: *mut *mut QtopoDistanceMatrix,
) -> QtopoStatus {
    guard(|| {
        let len = checked_len(n, n)?;
        let e = slice(entries, len)?;
        let d = lib(DistanceMatrix::new(n, e.to_vec()))?;
        out(out_matrix, boxed(QtopoDistanceMatrix(d)))
    })
}

/// Euclidean distances between `n` points of dimension `dim`, row-major.
///
/// # Safety
/// `points` must point to `n * dim` readable doubles; `out_matrix` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qtopo_euclidean_distances(
    points: *const f64,
    n: usize,
    dim: usize,
    out_matrix: *mut *mut QtopoDistanceMatrix,
) -> QtopoStatus {
    guard(|| {
        let len = checked_len(n, dim)?;
        let c = cloud(slice(points, len)?, n, dim)?;
        out(
            out_matrix,
            boxed(QtopoDistanceMatrix(euclidean_distance_matrix(&c))),
        )
    })
}

/// Encodes `n` points of dimension `dim` with the named encoding (`angle`,
/// `dense-angle`, `amplitude`, `sqrt`, `diagonal`, `iqp`, `utd`, `uts`) and
/// returns their pairwise distances under the named quantum metric (`trace`,
/// `hs`, `bures`, `bures-angle`, `hellinger`, `wigner-yanase`, `fs`,
/// `schatten-<p>`). Pipeline defaults apply to the uniform transform and the
/// pre-scale.
///
/// # Safety
/// `points` must point to `n * dim` doubles; `encoding` and `metric` must be
/// NUL-terminated strings; `out_matrix` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtopo_encoded_distances(
    points: *const f64,
    n: usize,
    dim: usize,
    encoding: *const c_char,
    metric: *const c_char,
    out_matrix: *mut *mut QtopoDistanceMatrix,
) -> QtopoStatus {
    guard(|| {
        let len = checked_len(n, dim)?;
        let c = cloud(slice(points, len)?, n, dim)?;
        let kind: EncodingKind = lib(string(encoding)?.parse())?;
        let metric: QuantumMetric = lib(string(metric)?.parse())?;
        let states = lib(EncodingSpec::new(kind).encode(&c))?;
        let d = lib(encoded_distance_matrix(&states, metric, None, 0))?;
        out(out_matrix, boxed(QtopoDistanceMatrix(d)))
    })
}

/// Number of points.
///
/// # Safety
/// `matrix` must be a live handle or null (null yields 0).
#[no_mangle]
pub unsafe extern "C" fn qtopo_distance_matrix_len(matrix: *const QtopoDistanceMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.len())
}

/// Copies the `n * n` entries into `buffer`.
///
/// # Safety
/// `buffer` must have room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn qtopo_distance_matrix_entries(
    matrix: *const QtopoDistanceMatrix,
    buffer: *mut f64,
    capacity: usize,
) -> QtopoStatus {
    guard(|| {
        let m = handle(matrix)?;
        let e = m.0.entries();
        if capacity < e.len() {
            set_error(format!("buffer holds {capacity} values, need {}", e.len()));
            return Err(QtopoStatus::InvalidArgument);
        }
        if buffer.is_null() {
            return Err(null());
        }
        ptr::copy_nonoverlapping(e.as_ptr(), buffer, e.len());
        Ok(())
    })
}

/// Releases a distance matrix. Null is ignored.
///
/// # Safety
/// `matrix` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qtopo_distance_matrix_free(matrix: *mut QtopoDistanceMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// `max |A - B|` over all entries.
///
/// # Safety
/// Both handles must be live; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtopo_distortion(
    a: *const QtopoDistanceMatrix,
    b: *const QtopoDistanceMatrix,
    out_value: *mut f64,
) -> QtopoStatus {
    guard(|| {
        let v = lib(distortion(&handle(a)?.0, &handle(b)?.0))?;
        out(out_value, v)
    })
}

/// Weight `w >= 0` minimising `max |A - w B|`, and that minimum.
///
/// # Safety
/// Both handles must be live; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtopo_optimal_weight(
    a: *const QtopoDistanceMatrix,
    b: *const QtopoDistanceMatrix,
    out_weight: *mut f64,
    out_residual: *mut f64,
) -> QtopoStatus {
    guard(|| {
        let fit = lib(optimal_weight(
            &handle(a)?.0,
            &handle(b)?.0,
            WeightObjective::Max,
        ))?;
        out(out_weight, fit.weight)?;
        out(out_residual, fit.residual)
    })
}

/// Vietoris-Rips persistence in degrees `0..=max_degree`. `simplex_cap` of
/// zero selects the library default.
///
/// # Safety
/// `matrix` must be live; `out_diagrams` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtopo_rips_persistence(
    matrix: *const QtopoDistanceMatrix,
    max_degree: usize,
    simplex_cap: usize,
    out_diagrams: *mut *mut QtopoDiagrams,
) -> QtopoStatus {
    guard(|| {
        let d = &handle(matrix)?.0;
        let dgms = if simplex_cap == 0 {
            lib(rips_persistence(d, max_degree))?
        } else {
            persistence(&lib(vietoris_rips_with_cap(d, max_degree, simplex_cap))?)
        };
        out(out_diagrams, boxed(QtopoDiagrams(dgms)))
    })
}

/// Number of degrees held (`max_degree + 1`).
///
/// # Safety
/// `diagrams` must be a live handle or null (null yields 0).
#[no_mangle]
pub unsafe extern "C" fn qtopo_diagrams_degrees(diagrams: *const QtopoDiagrams) -> usize {
    diagrams.as_ref().map_or(0, |d| d.0.len())
}

fn degree_of(d: &QtopoDiagrams, degree: usize) -> Result<&PersistenceDiagram, QtopoStatus> {
    d.0.iter().find(|p| p.degree == degree).ok_or_else(|| {
        set_error(format!("no diagram of degree {degree}"));
        QtopoStatus::InvalidArgument
    })
}

/// Number of intervals in one degree.
///
/// # Safety
/// `diagrams` must be live; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtopo_diagram_len(
    diagrams: *const QtopoDiagrams,
    degree: usize,
    out_len: *mut usize,
) -> QtopoStatus {
    guard(|| {
        let d = degree_of(handle(diagrams)?, degree)?;
        out(out_len, d.pairs.len())
    })
}

/// Copies one degree's intervals. Deaths of classes that never die are
/// `+INFINITY`.
///
/// # Safety
/// `births` and `deaths` must each have room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn qtopo_diagram_intervals(
    diagrams: *const QtopoDiagrams,
    degree: usize,
    births: *mut f64,
    deaths: *mut f64,
    capacity: usize,
) -> QtopoStatus {
    guard(|| {
        let d = degree_of(handle(diagrams)?, degree)?;
        if capacity < d.pairs.len() {
            set_error(format!(
                "buffers hold {capacity} intervals, need {}",
                d.pairs.len()
            ));
            return Err(QtopoStatus::InvalidArgument);
        }
        if d.pairs.is_empty() {
            return Ok(());
        }
        if births.is_null() || deaths.is_null() {
            return Err(null());
        }
        for (i, (b, e)) in d.pairs.iter().enumerate() {
            births.add(i).write(*b);
            deaths.add(i).write(*e);
        }
        Ok(())
    })
}

/// Bottleneck distance between the diagrams of one degree; a degree missing
/// on either side counts as empty. May be `+INFINITY`.
///
/// # Safety
/// Both handles must be live; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qtopo_bottleneck(
    a: *const QtopoDiagrams,
    b: *const QtopoDiagrams,
    degree: usize,
    out_value: *mut f64,
) -> QtopoStatus {
    guard(|| {
        let pick = |d: &QtopoDiagrams| {
            d.0.iter()
                .find(|p| p.degree == degree)
                .cloned()
                .unwrap_or_else(|| PersistenceDiagram::empty(degree))
        };
        let v = bottleneck_distance(&pick(handle(a)?), &pick(handle(b)?));
        out(out_value, v)
    })
}

/// Releases diagrams. Null is ignored.
///
/// # Safety
/// `diagrams` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qtopo_diagrams_free(diagrams: *mut QtopoDiagrams) {
    if !diagrams.is_null() {
        drop(Box::from_raw(diagrams));
    }
}

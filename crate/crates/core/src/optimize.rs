//! One-dimensional minimization of convex functions on a bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimizer of a convex (or unimodal)
/// function on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `rel_tol * max(1, |x|)` or after
/// `max_iter` iterations. Returns `(argmin, min)`, where the endpoints of the
/// original bracket are also considered so that boundary optima are exact.
pub(crate) fn golden_section<F>(f: F, lo: f64, hi: f64, rel_tol: f64, max_iter: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        let scale = c.abs().max(d.abs()).max(1.0);
        if (b - a) <= rel_tol * scale {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let mut best = (mid, f(mid));
    for x in [c, d, lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

//! Scalar root bracketing and unimodal minimization.

/// Bisection for a sign change of `g` on `[lo, hi]`.
///
/// Returns `None` when `g(lo)` and `g(hi)` have the same strict sign. The
/// returned point is within `tol` of a root.
pub fn bisect(mut lo: f64, mut hi: f64, tol: f64, g: impl Fn(f64) -> f64) -> Option<f64> {
    let mut glo = g(lo);
    let ghi = g(hi);
    if glo == 0.0 {
        return Some(lo);
    }
    if ghi == 0.0 {
        return Some(hi);
    }
    if glo.signum() == ghi.signum() {
        return None;
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return Some(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn golden_min(mut lo: f64, mut hi: f64, tol: f64, g: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    while hi - lo > tol {
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2);
        }
    }
    // the interval ends are also candidates for monotone inputs
    [(lo, g(lo)), (hi, g(hi)), (x1, g1), (x2, g2)]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(0.0, 2.0, 1e-14, |x| x * x - 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(0.0, 1.0, 1e-10, |x| x + 1.0).is_none());
    }

    #[test]
    fn golden_parabola() {
        let (x, v) = golden_min(-1.0, 3.0, 1e-10, |x| (x - 0.7).powi(2) + 1.0);
        assert!((x - 0.7).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-12);
        let (x, _) = golden_min(0.0, 1.0, 1e-10, |x| x);
        assert_eq!(x, 0.0);
    }
}

//! Population and coherence thresholds separating the rank-2 branches.

use super::{eta, SpecialBasisPair};
use crate::roots::bisect;

const TOL: f64 = 1e-13;

/// g(p) = A2(p) - p(1-p)(r21 + r12)^2; negative exactly on the
/// under-squeezed interval.
fn over_squeezing_margin(pair: &SpecialBasisPair, p: f64) -> f64 {
    let (a2, _, pp) = pair.averages(p);
    a2 - pp * (pair.r21 + pair.r12).powi(2)
}

/// Open interval (p_L, p_R) of populations where the measure follows the
/// under-squeezed formula, or `None` if there is no such interval.
pub fn under_squeezed_interval(pair: &SpecialBasisPair) -> Option<(f64, f64)> {
    let k = (pair.r21 + pair.r12).powi(2);
    if k == 0.0 {
        return None;
    }
    let vertex = ((k - pair.s1 + pair.s2) / (2.0 * k)).clamp(0.0, 1.0);
    let g = |p: f64| over_squeezing_margin(pair, p);
    if g(vertex) >= 0.0 {
        return None;
    }
    let lo = bisect(0.0, vertex, TOL, g)?;
    let hi = bisect(vertex, 1.0, TOL, g)?;
    Some((lo, hi))
}

/// Closed form of the interval for the cat pair.
pub fn cat_interval(alpha: f64) -> (f64, f64) {
    let e = (-2.0 * alpha * alpha).exp();
    ((1.0 - e) / 2.0, (1.0 + e) / 2.0)
}

/// Smallest coherence f in [0, 1] with eta(f, p) >= |<a^2>|; `None` when even
/// f = 1 stays below, i.e. the over-squeezed formula holds for every f.
pub fn f_crit(pair: &SpecialBasisPair, p: f64) -> Option<f64> {
    let (a2, _, _) = pair.averages(p);
    let g = |f: f64| eta(pair, f, p) - a2;
    if g(1.0) <= 0.0 {
        return None;
    }
    if g(0.0) >= 0.0 {
        return Some(0.0);
    }
    bisect(0.0, 1.0, TOL, g)
}

/// Squeezing below which the squeezed-vacuum mixture has an
/// under-squeezed population interval.
pub fn gamma_crit(tol: f64) -> f64 {
    let margin = |gamma: f64| {
        let pair = SpecialBasisPair::squeezed(gamma, 0.0).expect("positive gamma");
        let k = (pair.r21 + pair.r12).powi(2);
        let vertex = ((k - pair.s1 + pair.s2) / (2.0 * k)).clamp(0.0, 1.0);
        over_squeezing_margin(&pair, vertex)
    };
    bisect(1e-3, 2.0, tol, margin).expect("margin changes sign")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Branch;
    use crate::rank2::{ort_rank2, ort_rank2_coherent, Rank2State};

    #[test]
    fn cat_interval_agrees_with_bisection() {
        for alpha in [0.3, 0.5, 1.0] {
            let (l, r) = under_squeezed_interval(&SpecialBasisPair::cat(alpha).unwrap()).unwrap();
            let (cl, cr) = cat_interval(alpha);
            assert!((l - cl).abs() < 1e-10 && (r - cr).abs() < 1e-10, "alpha={alpha}");
        }
        let (l, r) = cat_interval(0.5);
        assert!((l - 0.197).abs() < 5e-4 && (r - 0.803).abs() < 5e-4);
    }

    #[test]
    fn level_skip_interval() {
        let pair = SpecialBasisPair::level_skip(1, 0.75f64.sqrt()).unwrap();
        let (l, r) = under_squeezed_interval(&pair).unwrap();
        assert!((l - 0.234823).abs() < 1e-6);
        assert!((r - 0.890667).abs() < 1e-6);
    }

    #[test]
    fn indefinite_parity_interval() {
        let pair = SpecialBasisPair::indefinite_parity(1, 2.0).unwrap();
        let (l, r) = under_squeezed_interval(&pair).unwrap();
        assert!((l - 0.160063).abs() < 1e-6);
        assert!((r - 0.867715).abs() < 1e-6);
    }

    #[test]
    fn two_fock_threshold() {
        let pair = SpecialBasisPair::two_fock(3);
        for p in [0.2, 0.5, 0.9] {
            assert!((f_crit(&pair, p).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn cat_threshold_at_half() {
        let fc = f_crit(&SpecialBasisPair::cat(0.5).unwrap(), 0.5).unwrap();
        assert!((fc - 0.855).abs() < 0.003);
        let below = ort_rank2_coherent(
            &Rank2State::new(SpecialBasisPair::cat(0.5).unwrap(), 0.5, fc - 1e-6, 0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(below.branch, Branch::UnderSqueezedA);
    }

    #[test]
    fn squeezing_threshold() {
        let g = gamma_crit(1e-10);
        let expected = (1.0 + 2.0 / 3f64.sqrt()).ln() / 4.0;
        assert!((g - expected).abs() < 1e-6);
        let has_a = |gamma: f64| {
            let pair = SpecialBasisPair::squeezed(gamma, 0.0).unwrap();
            (0..=200).any(|i| {
                ort_rank2(&pair, i as f64 / 200.0).unwrap().branch == Branch::UnderSqueezedA
            })
        };
        assert!(has_a(0.15));
        assert!(!has_a(0.25));
    }
}

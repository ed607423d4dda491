//! Closed-form special basis pairs for the named state families.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;

use super::{Rank2State, SpecialBasisPair};
use crate::error::{Error, Result};
use crate::fock::{
    coherent_cutoff, make_cat, make_fock, make_indefinite_parity_pair, make_level_skip_pair,
    make_photon_subtracted_sv, make_squeezed_vacuum, squeezed_cutoff, Parity, StateVector,
};

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
    }
    Ok(())
}

impl SpecialBasisPair {
    /// (|n+1>, |n>)
    pub fn two_fock(n: usize) -> Self {
        let n = n as f64;
        Self::from_scalars(0.0, (n + 1.0).sqrt(), 0.0, 0.0, n + 1.0, n, 0.0).expect("valid scalars")
    }

    /// (cat+, cat-) for real amplitude alpha > 0. Evaluates without any
    /// truncation, so very large alpha is fine.
    pub fn cat(alpha: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        let x = alpha * alpha;
        let (t, c) = (x.tanh(), 1.0 / x.tanh());
        Self::from_scalars(alpha * c.sqrt(), alpha * t.sqrt(), x, x, x * t, x * c, 0.0)
    }

    /// (SV, SV-) with squeezing gamma along angle mu.
    pub fn squeezed(gamma: f64, mu: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        let (s, c) = (gamma.sinh(), gamma.cosh());
        Self::from_scalars(c, s, s * c, 3.0 * s * c, s * s, 2.0 * s * s + c * c, mu + FRAC_PI_2)
    }

    /// Level-skipping pair (phi1, phi2) with phi2 = alpha2|n> + beta2|n+2>.
    pub fn level_skip(n: usize, beta_abs: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta_abs) || (n == 0 && beta_abs == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "|beta2| = {beta_abs} invalid for n = {n}"
            )));
        }
        let nf = n as f64;
        let b2 = beta_abs * beta_abs;
        let a2 = (1.0 - b2).sqrt();
        let d = nf + 2.0 * b2;
        let root = ((nf + 2.0) * (nf + 1.0)).sqrt();
        Self::from_scalars(
            d.sqrt(),
            a2 * beta_abs * root / d.sqrt(),
            a2 * beta_abs * nf * root / d,
            a2 * beta_abs * root,
            (a2 * a2 * nf * (nf - 1.0) + b2 * (nf + 2.0) * (nf + 1.0)) / d,
            d,
            0.0,
        )
    }

    /// Indefinite-parity pair (Xi1, Xi2) with y z = 2n + 3.
    pub fn indefinite_parity(n: usize, y: f64) -> Result<Self> {
        positive("y", y)?;
        let nf = n as f64;
        let z = (2.0 * nf + 3.0) / y;
        let a_sq = 1.0 / (2.0 * nf + 3.0 + y * y);
        let b_sq = 1.0 / (2.0 * nf + 3.0 + z * z);
        let r = ((nf + 1.0) * (nf + 2.0)).sqrt() * (a_sq * b_sq).sqrt() * (z + y);
        let base = 2.0 * nf * nf + 5.0 * nf + 2.0;
        Self::from_scalars(
            r,
            r,
            b_sq * (nf + 1.0) * (nf + 2.0),
            a_sq * (nf + 1.0) * (nf + 2.0),
            b_sq * (base + (nf + 1.0) * z * z),
            a_sq * (base + (nf + 1.0) * y * y),
            0.0,
        )
    }

    /// Pair for the rank-2 three-Fock family: psi1 = |n+1>,
    /// psi2 ∝ sqrt(p_{n+2})|n+2> + sqrt(p_n)|n>.
    pub fn three_fock(p2: f64, p0: f64, n: usize) -> Result<Self> {
        let tilde = p2 + p0;
        if !(p2 >= 0.0 && p0 >= 0.0 && tilde > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "populations p_(n+2) = {p2}, p_n = {p0} invalid"
            )));
        }
        let nf = n as f64;
        Self::from_scalars(
            (p2 * (nf + 2.0) / tilde).sqrt(),
            (p0 * (nf + 1.0) / tilde).sqrt(),
            0.0,
            (p2 * p0 * (nf + 2.0) * (nf + 1.0)).sqrt() / tilde,
            nf + 1.0,
            (p2 * (nf + 2.0) + p0 * nf) / tilde,
            0.0,
        )
    }
}

pub fn two_fock_pair_with_sources(n: usize) -> Result<SpecialBasisPair> {
    let dim = n + 4;
    SpecialBasisPair::two_fock(n).with_sources(&make_fock(n + 1, dim)?, &make_fock(n, dim)?)
}

pub fn cat_pair_with_sources(alpha: f64) -> Result<SpecialBasisPair> {
    let dim = coherent_cutoff(alpha);
    let a = C64::new(alpha, 0.0);
    SpecialBasisPair::cat(alpha)?
        .with_sources(&make_cat(a, Parity::Even, dim)?, &make_cat(a, Parity::Odd, dim)?)
}

pub fn squeezed_pair_with_sources(gamma: f64, mu: f64) -> Result<SpecialBasisPair> {
    let dim = squeezed_cutoff(gamma);
    SpecialBasisPair::squeezed(gamma, mu)?.with_sources(
        &make_squeezed_vacuum(gamma, mu, dim)?,
        &make_photon_subtracted_sv(gamma, mu, dim)?,
    )
}

pub fn level_skip_pair_with_sources(n: usize, beta2: C64) -> Result<SpecialBasisPair> {
    let (phi1, phi2) = make_level_skip_pair(n, beta2)?;
    SpecialBasisPair::level_skip(n, beta2.norm())?.with_sources(&phi1, &phi2)
}

pub fn indefinite_parity_pair_with_sources(
    n: usize,
    y: f64,
    a: f64,
    b: f64,
) -> Result<SpecialBasisPair> {
    let (x1, x2) = make_indefinite_parity_pair(n, y, a, b)?;
    SpecialBasisPair::indefinite_parity(n, y)?.with_sources(&x1, &x2)
}

pub fn three_fock_pair_with_sources(p2: f64, p0: f64, n: usize) -> Result<SpecialBasisPair> {
    let dim = n + 5;
    let tilde = p2 + p0;
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[n + 2] = C64::new((p2 / tilde).sqrt(), 0.0);
    v[n] = C64::new((p0 / tilde).sqrt(), 0.0);
    SpecialBasisPair::three_fock(p2, p0, n)?
        .with_sources(&make_fock(n + 1, dim)?, &StateVector::from_unnormalized(v)?)
}

/// p|n+1><n+1| + (1-p)|n><n| with coherence f.
pub fn two_fock(n: usize, p: f64, f: f64) -> Result<Rank2State> {
    Rank2State::new(SpecialBasisPair::two_fock(n), p, f, 0.0)
}

/// p|cat+><cat+| + (1-p)|cat-><cat-| with coherence f.
pub fn cat_mixture(alpha: f64, p: f64, f: f64) -> Result<Rank2State> {
    Rank2State::new(SpecialBasisPair::cat(alpha)?, p, f, 0.0)
}

/// p|SV><SV| + (1-p)|SV-><SV-|.
pub fn sv_mixture(gamma: f64, mu: f64, p: f64) -> Result<Rank2State> {
    Rank2State::new(SpecialBasisPair::squeezed(gamma, mu)?, p, 0.0, 0.0)
}

/// p|phi1><phi1| + (1-p)|phi2><phi2|.
pub fn level_skip(n: usize, beta_abs: f64, p: f64) -> Result<Rank2State> {
    Rank2State::new(SpecialBasisPair::level_skip(n, beta_abs)?, p, 0.0, 0.0)
}

/// p|Xi1><Xi1| + (1-p)|Xi2><Xi2|.
pub fn indefinite_parity(n: usize, y: f64, p: f64) -> Result<Rank2State> {
    Rank2State::new(SpecialBasisPair::indefinite_parity(n, y)?, p, 0.0, 0.0)
}

/// Three neighboring Fock levels with nearest-neighbor coherence f and full
/// skip coherence; rank 2 for f < 1.
pub fn rank2_three_fock(p2: f64, p1: f64, p0: f64, f: f64, n: usize) -> Result<Rank2State> {
    if (p2 + p1 + p0 - 1.0).abs() > 1e-10 || p1 < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "populations ({p2}, {p1}, {p0}) must be non-negative and sum to 1"
        )));
    }
    Rank2State::new(SpecialBasisPair::three_fock(p2, p0, n)?, p1, f, 0.0)
}

/// Measure of the pure superposition sqrt(p)|cat+> + e^{-i chi} sqrt(1-p)|cat->
/// with p = (1 + e^{-2 alpha^2}) / 2, from scalars only.
pub fn cat_qubit_pure(alpha: f64, chi: f64) -> Result<f64> {
    let pair = SpecialBasisPair::cat(alpha)?;
    let p = (1.0 + (-2.0 * alpha * alpha).exp()) / 2.0;
    let pp = p * (1.0 - p);
    let nbar = p * pair.n1 + (1.0 - p) * pair.n2;
    let a2 = p * pair.s1 + (1.0 - p) * pair.s2;
    // <a> = sqrt(p(1-p)) (r12 e^{-i chi} + r21 e^{i chi})
    let mean_a = (C64::from_polar(pair.r12, -chi) + C64::from_polar(pair.r21, chi)) * pp.sqrt();
    Ok((nbar - mean_a.norm_sqr() + (C64::new(a2, 0.0) - mean_a * mean_a).norm()).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::ort_pure;
    use std::f64::consts::PI;

    #[test]
    fn closed_forms_match_states() {
        two_fock_pair_with_sources(3).unwrap();
        cat_pair_with_sources(0.5).unwrap();
        cat_pair_with_sources(1.7).unwrap();
        squeezed_pair_with_sources(0.3, 0.2).unwrap();
        level_skip_pair_with_sources(1, C64::from_polar(0.75f64.sqrt(), 0.4)).unwrap();
        level_skip_pair_with_sources(0, C64::new(0.5, 0.0)).unwrap();
        indefinite_parity_pair_with_sources(1, 2.0, 0.3 + PI, 0.3).unwrap();
        three_fock_pair_with_sources(0.4, 0.2, 0).unwrap();
    }

    #[test]
    fn cat_qubit_extremes() {
        assert!(cat_qubit_pure(1.0, 0.0).unwrap().abs() < 1e-12);
        assert!(cat_qubit_pure(1.0, PI).unwrap().abs() < 1e-12);
        assert!((cat_qubit_pure(1.0, PI / 2.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cat_qubit_matches_state_vector() {
        let alpha = 0.8;
        let pair = cat_pair_with_sources(alpha).unwrap();
        let (plus, minus) = pair.sources().unwrap();
        let p = (1.0 + (-2.0 * alpha * alpha).exp()) / 2.0;
        for chi in [0.3, 1.1, 2.5] {
            let amps = plus
                .amps()
                .iter()
                .zip(minus.amps())
                .map(|(a, b)| a * p.sqrt() + b * C64::from_polar((1.0 - p).sqrt(), -chi))
                .collect();
            let psi = StateVector::from_unnormalized(amps).unwrap();
            let direct = ort_pure(&psi).unwrap();
            assert!((direct - cat_qubit_pure(alpha, chi).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn large_alpha_without_truncation() {
        let s = cat_mixture(700.0, 0.3, 0.0).unwrap();
        let r = s.ort().unwrap();
        assert!(r.value.is_finite());
    }
}

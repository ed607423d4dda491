//! Truncated Fock-space states, density matrices and the state families used
//! throughout the crate.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;

const NORM_TOL: f64 = 1e-12;
const TAIL_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

pub(crate) fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Pure state over the basis |0>..|dim-1>.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "state dimension {} is below 2",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "state norm^2 {norm} differs from 1"
            )));
        }
        Ok(Self { amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a zero vector".into()));
        }
        for z in amps.iter_mut() {
            *z /= norm;
        }
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude at level `n`, zero beyond the cutoff.
    pub fn amp(&self, n: usize) -> C64 {
        self.amps.get(n).copied().unwrap_or_else(czero)
    }

    /// Copy embedded in a larger (or equal) cutoff.
    pub fn padded(&self, dim: usize) -> StateVector {
        assert!(dim >= self.dim());
        let mut amps = self.amps.clone();
        amps.resize(dim, czero());
        StateVector { amps }
    }

    pub fn outer(&self) -> DensityMatrix {
        let d = self.dim();
        let mut elems = vec![czero(); d * d];
        for i in 0..d {
            for j in 0..d {
                elems[i * d + j] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix { dim: d, elems }
    }

    /// <self|other>
    pub fn inner(&self, other: &StateVector) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub fn mul_phase(&self, phi: f64) -> StateVector {
        let ph = C64::from_polar(1.0, phi);
        StateVector {
            amps: self.amps.iter().map(|z| z * ph).collect(),
        }
    }
}

/// <u|v> for vectors that may have different cutoffs.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// <u|a|v>
pub fn bra_a_ket(u: &[C64], v: &[C64]) -> C64 {
    (0..u.len())
        .filter(|&n| n + 1 < v.len())
        .map(|n| u[n].conj() * v[n + 1] * ((n + 1) as f64).sqrt())
        .sum()
}

/// <u|a^2|v>
pub fn bra_a2_ket(u: &[C64], v: &[C64]) -> C64 {
    (0..u.len())
        .filter(|&n| n + 2 < v.len())
        .map(|n| u[n].conj() * v[n + 2] * (((n + 1) * (n + 2)) as f64).sqrt())
        .sum()
}

/// <u|n|v>
pub fn bra_n_ket(u: &[C64], v: &[C64]) -> C64 {
    u.iter()
        .zip(v)
        .enumerate()
        .map(|(n, (a, b))| a.conj() * b * n as f64)
        .sum()
}

/// Applies the annihilation operator; the result is not renormalized.
pub fn ladder_annihilate(state: &StateVector) -> Vec<C64> {
    let d = state.dim();
    let mut out = vec![czero(); d];
    for n in 0..d - 1 {
        out[n] = state.amps[n + 1] * ((n + 1) as f64).sqrt();
    }
    out
}

/// Hermitian, positive-semidefinite, unit-trace matrix in the Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    elems: Vec<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity of a row-major matrix.
    pub fn new(dim: usize, elems: Vec<C64>) -> Result<Self> {
        let rho = Self::check_shape(dim, elems)?;
        let eig = hermitian_eigen(dim, &rho.elems);
        if let Some(&lo) = eig.values.last() {
            if lo < -PSD_TOL {
                return Err(Error::NotPsd(lo));
            }
        }
        Ok(rho)
    }

    fn check_shape(dim: usize, elems: Vec<C64>) -> Result<Self> {
        if dim < 2 || elems.len() != dim * dim {
            return Err(Error::InvalidParameter(format!(
                "density matrix storage of length {} for dim {dim}",
                elems.len()
            )));
        }
        for i in 0..dim {
            for j in i..dim {
                if (elems[i * dim + j] - elems[j * dim + i].conj()).norm() > NORM_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "matrix not Hermitian at ({i},{j})"
                    )));
                }
            }
        }
        let tr: f64 = (0..dim).map(|i| elems[i * dim + i].re).sum();
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("trace {tr} differs from 1")));
        }
        Ok(Self { dim, elems })
    }

    /// Convex combination of pure states; weights must be non-negative and
    /// sum to one. The result is embedded in the largest cutoff present.
    pub fn from_mixture(parts: &[(f64, &StateVector)]) -> Result<Self> {
        let dim = parts.iter().map(|(_, s)| s.dim()).max().ok_or_else(|| {
            Error::InvalidParameter("empty mixture".into())
        })?;
        let mut elems = vec![czero(); dim * dim];
        let mut total = 0.0;
        for &(w, s) in parts {
            if !(w >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative weight {w}")));
            }
            total += w;
            for i in 0..s.dim() {
                if s.amps[i] == czero() {
                    continue;
                }
                for j in 0..s.dim() {
                    elems[i * dim + j] += s.amps[i] * s.amps[j].conj() * w;
                }
            }
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}")));
        }
        if (total - 1.0).abs() > 0.0 {
            for z in elems.iter_mut() {
                *z /= total;
            }
        }
        // a non-negative combination of projectors is PSD by construction
        Self::check_shape(dim, elems)
    }

    /// rho = p|psi1><psi1| + f e^{i chi} sqrt(p(1-p)) |psi1><psi2| + h.c. + (1-p)|psi2><psi2|
    pub fn partially_coherent(
        psi1: &StateVector,
        psi2: &StateVector,
        p: f64,
        f: f64,
        chi: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidParameter(format!(
                "need 0<=p<=1 and 0<=f<=1, got p={p}, f={f}"
            )));
        }
        let dim = psi1.dim().max(psi2.dim());
        let u = psi1.padded(dim);
        let v = psi2.padded(dim);
        let c = C64::from_polar(f * (p * (1.0 - p)).sqrt(), chi);
        let mut elems = vec![czero(); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let (ui, uj, vi, vj) = (u.amps[i], u.amps[j].conj(), v.amps[i], v.amps[j].conj());
                elems[i * dim + j] =
                    ui * uj * p + vi * vj * (1.0 - p) + ui * vj * c + vi * uj * c.conj();
            }
        }
        Self::check_shape(dim, elems)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elems(&self) -> &[C64] {
        &self.elems
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.elems[n * self.dim + m]
    }

    /// Copy embedded in a larger cutoff.
    pub fn padded(&self, dim: usize) -> DensityMatrix {
        assert!(dim >= self.dim);
        let mut elems = vec![czero(); dim * dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                elems[i * dim + j] = self.get(i, j);
            }
        }
        DensityMatrix { dim, elems }
    }

    /// Population in the two highest Fock levels.
    pub fn top_population(&self) -> f64 {
        let d = self.dim;
        self.get(d - 1, d - 1).re + self.get(d - 2, d - 2).re
    }

    /// Applies `elems'[n][m] = g(n - m) * elems[n][m]`. Used by phase shifts
    /// and dephasing, both of which preserve Hermiticity and trace.
    pub(crate) fn map_diagonals(&self, g: impl Fn(i64) -> C64) -> DensityMatrix {
        let d = self.dim;
        let mut elems = self.elems.clone();
        for n in 0..d {
            for m in 0..d {
                elems[n * d + m] *= g(n as i64 - m as i64);
            }
        }
        DensityMatrix { dim: d, elems }
    }

    /// Largest elementwise deviation from another matrix, padding as needed.
    pub fn max_deviation(&self, other: &DensityMatrix) -> f64 {
        let d = self.dim.max(other.dim);
        let at = |r: &DensityMatrix, i: usize, j: usize| {
            if i < r.dim && j < r.dim {
                r.get(i, j)
            } else {
                czero()
            }
        };
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((at(self, i, j) - at(other, i, j)).norm());
            }
        }
        worst
    }
}

/// First and second moments entering the measures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expectations {
    pub mean_n: f64,
    pub mean_a: C64,
    pub mean_a2: C64,
}

/// Traces of n, a and a^2 against `rho`.
///
/// Fails with [`Error::Truncation`] when the top two levels carry more than
/// `1e-10` population, since then the truncated moments are unreliable.
pub fn expectations(rho: &DensityMatrix) -> Result<Expectations> {
    let pop = rho.top_population();
    if pop > 1e-10 {
        return Err(Error::Truncation {
            dim: rho.dim,
            population: pop,
        });
    }
    Ok(expectations_unchecked(rho))
}

pub(crate) fn expectations_unchecked(rho: &DensityMatrix) -> Expectations {
    let d = rho.dim;
    let mut mean_n = 0.0;
    let mut mean_a = czero();
    let mut mean_a2 = czero();
    for n in 0..d {
        mean_n += n as f64 * rho.get(n, n).re;
        if n >= 1 {
            mean_a += rho.get(n, n - 1) * (n as f64).sqrt();
        }
        if n >= 2 {
            mean_a2 += rho.get(n, n - 2) * ((n * (n - 1)) as f64).sqrt();
        }
    }
    Expectations {
        mean_n,
        mean_a,
        mean_a2,
    }
}

/// `elems'[n][m] = e^{-i(n-m)chi} elems[n][m]`
pub fn apply_phase_shift(rho: &DensityMatrix, chi: f64) -> DensityMatrix {
    rho.map_diagonals(|k| C64::from_polar(1.0, -(k as f64) * chi))
}

/// Spectral decomposition, eigenvalues descending and clipped at zero.
pub fn eigendecompose(rho: &DensityMatrix) -> Result<Vec<(f64, StateVector)>> {
    let eig = hermitian_eigen(rho.dim, &rho.elems);
    let mut out = Vec::with_capacity(rho.dim);
    for (lam, vec) in eig.values.into_iter().zip(eig.vectors) {
        if lam < -PSD_TOL {
            return Err(Error::NotPsd(lam));
        }
        out.push((lam.max(0.0), StateVector { amps: vec }));
    }
    Ok(out)
}

/// Weighted pure states realizing a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    entries: Vec<(f64, StateVector)>,
}

impl Decomposition {
    pub fn new(entries: Vec<(f64, StateVector)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("empty decomposition".into()));
        }
        let mut total = 0.0;
        for (w, _) in &entries {
            if !(*w > 0.0) {
                return Err(Error::InvalidParameter(format!("non-positive weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}")));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(f64, StateVector)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn reconstruct(&self) -> DensityMatrix {
        let parts: Vec<(f64, &StateVector)> = self.entries.iter().map(|(w, s)| (*w, s)).collect();
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        let parts: Vec<(f64, &StateVector)> = parts.into_iter().map(|(w, s)| (w / total, s)).collect();
        DensityMatrix::from_mixture(&parts).expect("validated weights")
    }
}

/// Checks that `d` reproduces `rho` within `1e-8` elementwise and returns the
/// largest deviation.
pub fn verify_decomposition(rho: &DensityMatrix, d: &Decomposition) -> Result<f64> {
    let dev = rho.max_deviation(&d.reconstruct());
    if dev > 1e-8 {
        Err(Error::DecompositionMismatch(dev))
    } else {
        Ok(dev)
    }
}

// ---------------------------------------------------------------------------
// constructors

/// Default cutoff for coherent-state based families.
pub fn coherent_cutoff(alpha_abs: f64) -> usize {
    let d = (alpha_abs * alpha_abs + 10.0 * alpha_abs + 20.0).ceil() as usize;
    d.max(24)
}

/// Default cutoff for squeezed-vacuum based families.
/// Populations fall off like tanh(gamma)^n; the cutoff leaves ~1e-16 behind.
pub fn squeezed_cutoff(gamma: f64) -> usize {
    let rate = -gamma.abs().tanh().ln();
    if !rate.is_finite() || rate <= 0.0 {
        return usize::MAX;
    }
    ((37.0 / rate).ceil() as usize + 10).max(24)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("dimension {dim} is below 2")));
    }
    Ok(())
}

fn check_tail(dim: usize, kept: f64) -> Result<()> {
    let tail = 1.0 - kept;
    if tail >= TAIL_TOL {
        return Err(Error::CutoffTooSmall { dim, tail });
    }
    Ok(())
}

pub fn make_fock(n: usize, dim: usize) -> Result<StateVector> {
    check_dim(dim)?;
    if n >= dim {
        return Err(Error::InvalidParameter(format!(
            "Fock level {n} does not fit in dimension {dim}"
        )));
    }
    let mut amps = vec![czero(); dim];
    amps[n] = C64::new(1.0, 0.0);
    Ok(StateVector { amps })
}

/// Unnormalized coherent amplitudes alpha^n / sqrt(n!) for n < dim.
fn coherent_powers(alpha: C64, dim: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(dim);
    let mut c = C64::new(1.0, 0.0);
    for n in 0..dim {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        out.push(c);
    }
    out
}

pub fn make_coherent(alpha: C64, dim: usize) -> Result<StateVector> {
    check_dim(dim)?;
    let x = alpha.norm_sqr();
    let amps: Vec<C64> = coherent_powers(alpha, dim)
        .into_iter()
        .map(|c| c * (-x / 2.0).exp())
        .collect();
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    check_tail(dim, kept)?;
    StateVector::from_unnormalized(amps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Even or odd cat state (|alpha> +- |-alpha>) / sqrt(2 +- 2 e^{-2|alpha|^2}).
pub fn make_cat(alpha: C64, parity: Parity, dim: usize) -> Result<StateVector> {
    check_dim(dim)?;
    let x = alpha.norm_sqr();
    if x == 0.0 && parity == Parity::Odd {
        return Err(Error::InvalidParameter("odd cat needs alpha != 0".into()));
    }
    let keep = |n: usize| (n % 2 == 0) == (parity == Parity::Even);
    // sum over the parity class of |alpha|^{2n}/n! equals cosh x or sinh x
    let exact = match parity {
        Parity::Even => x.cosh(),
        Parity::Odd => x.sinh(),
    };
    let amps: Vec<C64> = coherent_powers(alpha, dim)
        .into_iter()
        .enumerate()
        .map(|(n, c)| if keep(n) { c / exact.sqrt() } else { czero() })
        .collect();
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    check_tail(dim, kept)?;
    StateVector::from_unnormalized(amps)
}

/// Three-component cat with Fock support on n = -k (mod 3).
pub fn make_cat3(alpha: C64, k: usize, dim: usize) -> Result<StateVector> {
    check_dim(dim)?;
    if k > 2 {
        return Err(Error::InvalidParameter(format!("cat3 branch {k} not in 0..=2")));
    }
    let x = alpha.norm_sqr();
    if x == 0.0 && k != 0 {
        return Err(Error::InvalidParameter("cat3 branch needs alpha != 0".into()));
    }
    let r = (3 - k) % 3;
    // sum_{n = r mod 3} x^n/n! = (1/3) sum_j w^{-jr} exp(w^j x)
    let exact: f64 = (0..3)
        .map(|j| {
            let w = C64::from_polar(1.0, 2.0 * PI * j as f64 / 3.0);
            (w * x).exp() * C64::from_polar(1.0, -2.0 * PI * (j * r) as f64 / 3.0)
        })
        .sum::<C64>()
        .re
        / 3.0;
    let amps: Vec<C64> = coherent_powers(alpha, dim)
        .into_iter()
        .enumerate()
        .map(|(n, c)| if n % 3 == r { c / exact.sqrt() } else { czero() })
        .collect();
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    check_tail(dim, kept)?;
    StateVector::from_unnormalized(amps)
}

/// Exact squeezed-vacuum amplitudes for n < dim, vacuum amplitude positive.
fn sv_amps(gamma: f64, mu: f64, dim: usize) -> Vec<C64> {
    let t = gamma.tanh();
    let step = -C64::from_polar(t, 2.0 * mu);
    let mut amps = vec![czero(); dim];
    let mut c = C64::new(1.0 / gamma.cosh().sqrt(), 0.0);
    let mut m = 0usize;
    while 2 * m < dim {
        amps[2 * m] = c;
        // |c_{2m+2}/c_{2m}| = tanh * sqrt((2m+1)/(2m+2))
        c = c * step * ((2 * m + 1) as f64 / (2 * m + 2) as f64).sqrt();
        m += 1;
    }
    amps
}

pub fn make_squeezed_vacuum(gamma: f64, mu: f64, dim: usize) -> Result<StateVector> {
    check_dim(dim)?;
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("squeezing {gamma} must be positive")));
    }
    let amps = sv_amps(gamma, mu, dim);
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    check_tail(dim, kept)?;
    StateVector::from_unnormalized(amps)
}

/// (-i e^{-i mu} csch gamma) a |SV>, which is already unit norm before truncation.
pub fn make_photon_subtracted_sv(gamma: f64, mu: f64, dim: usize) -> Result<StateVector> {
    check_dim(dim)?;
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("squeezing {gamma} must be positive")));
    }
    let sv = sv_amps(gamma, mu, dim + 1);
    let pre = C64::new(0.0, -1.0) * C64::from_polar(1.0 / gamma.sinh(), -mu);
    let amps: Vec<C64> = (0..dim)
        .map(|n| sv[n + 1] * ((n + 1) as f64).sqrt() * pre)
        .collect();
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    check_tail(dim, kept)?;
    StateVector::from_unnormalized(amps)
}

/// Level-skipping pair: phi2 = alpha2|n> + beta2|n+2> with alpha2 real
/// positive, and phi1 = a phi2 / sqrt(n + 2|beta2|^2). Returns (phi1, phi2).
pub fn make_level_skip_pair(n: usize, beta2: C64) -> Result<(StateVector, StateVector)> {
    let b2 = beta2.norm_sqr();
    if b2 > 1.0 + 1e-15 {
        return Err(Error::InvalidParameter(format!("|beta2|^2 = {b2} exceeds 1")));
    }
    if n == 0 && b2 == 0.0 {
        return Err(Error::InvalidParameter("a|0> vanishes; need beta2 != 0 for n = 0".into()));
    }
    let alpha2 = (1.0 - b2).max(0.0).sqrt();
    let dim = n + 5;
    let mut a2 = vec![czero(); dim];
    a2[n] = C64::new(alpha2, 0.0);
    a2[n + 2] = beta2;
    let phi2 = StateVector::from_unnormalized(a2)?;
    let phi1 = StateVector::from_unnormalized(ladder_annihilate(&phi2))?;
    Ok((phi1, phi2))
}

/// Indefinite-parity pair (Xi1, Xi2) with z = (2n+3)/y, a - b = k pi for odd k.
///
/// Xi1 = B (sqrt(n+1)|n+2> + z e^{ib}|n+1> - sqrt(n+2) e^{2ib}|n>), Xi2 the
/// same with (A, y, a). A and B are taken real positive.
pub fn make_indefinite_parity_pair(
    n: usize,
    y: f64,
    a: f64,
    b: f64,
) -> Result<(StateVector, StateVector)> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::InvalidParameter(format!("y = {y} must be positive")));
    }
    let k = (a - b) / PI;
    let k_round = k.round();
    if (k - k_round).abs() > 1e-9 || (k_round as i64).rem_euclid(2) != 1 {
        return Err(Error::InvalidParameter(format!(
            "a - b = {} is not an odd multiple of pi",
            a - b
        )));
    }
    let z = (2 * n + 3) as f64 / y;
    let dim = n + 5;
    let build = |w: f64, ph: f64| {
        let mut v = vec![czero(); dim];
        v[n + 2] = C64::new(((n + 1) as f64).sqrt(), 0.0);
        v[n + 1] = C64::from_polar(w, ph);
        v[n] = -C64::from_polar(((n + 2) as f64).sqrt(), 2.0 * ph);
        StateVector::from_unnormalized(v)
    };
    Ok((build(z, b)?, build(y, a)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn pure_moments(s: &StateVector) -> Expectations {
        expectations(&s.outer()).unwrap()
    }

    #[test]
    fn annihilation_on_fock_states() {
        let one = make_fock(1, 4).unwrap();
        assert_eq!(ladder_annihilate(&one)[0], C64::new(1.0, 0.0));
        let four = make_fock(4, 6).unwrap();
        assert!(close(ladder_annihilate(&four)[3].re, 2.0, 1e-15));
        let vac = make_fock(0, 3).unwrap();
        assert!(ladder_annihilate(&vac).iter().all(|z| *z == czero()));
    }

    #[test]
    fn fock_and_coherent_moments() {
        let e = pure_moments(&make_fock(1, 5).unwrap());
        assert_eq!((e.mean_n, e.mean_a, e.mean_a2), (1.0, czero(), czero()));
        let alpha = C64::new(0.5, 0.0);
        let e = pure_moments(&make_coherent(alpha, coherent_cutoff(0.5)).unwrap());
        assert!(close(e.mean_n, 0.25, 1e-12));
        assert!((e.mean_a - 0.5).norm() < 1e-12);
        assert!((e.mean_a2 - 0.25).norm() < 1e-12);
    }

    #[test]
    fn truncation_is_reported() {
        let s = make_fock(3, 4).unwrap();
        assert!(matches!(expectations(&s.outer()), Err(Error::Truncation { .. })));
    }

    #[test]
    fn cat_moments() {
        let d = coherent_cutoff(0.5);
        let a = C64::new(0.5, 0.0);
        let even = make_cat(a, Parity::Even, d).unwrap();
        let odd = make_cat(a, Parity::Odd, d).unwrap();
        assert!(close(pure_moments(&even).mean_n, 0.25 * 0.25f64.tanh(), 1e-12));
        assert!(close(pure_moments(&odd).mean_n, 0.25 / 0.25f64.tanh(), 1e-12));
        assert!(even.inner(&odd).norm() < 1e-15);
    }

    #[test]
    fn cutoff_too_small() {
        let r = make_coherent(C64::new(3.0, 0.0), 10);
        assert!(matches!(r, Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn squeezed_moments() {
        let g = 0.3f64;
        let d = squeezed_cutoff(g);
        let sv = make_squeezed_vacuum(g, 0.0, d).unwrap();
        let e = pure_moments(&sv);
        assert!(close(e.mean_n, g.sinh().powi(2), 1e-12));
        assert!(close(e.mean_a2.re, -g.sinh() * g.cosh(), 1e-12));
        let svm = make_photon_subtracted_sv(g, 0.0, d).unwrap();
        let e = pure_moments(&svm);
        assert!(close(e.mean_n, 2.0 * g.sinh().powi(2) + g.cosh().powi(2), 1e-12));
        assert!(sv.inner(&svm).norm() < 1e-15);
    }

    #[test]
    fn level_skip_cross_element() {
        let beta = C64::new(0.75f64.sqrt(), 0.0);
        let (p1, p2) = make_level_skip_pair(1, beta).unwrap();
        let r = bra_a_ket(p1.amps(), p2.amps());
        assert!(close(r.norm(), 2.5f64.sqrt(), 1e-12));
        assert!(p1.inner(&p2).norm() < 1e-15);
    }

    #[test]
    fn indefinite_parity_orthogonal_and_centered() {
        let (x1, x2) = make_indefinite_parity_pair(1, 2.0, 0.3 + PI, 0.3).unwrap();
        assert!(x1.inner(&x2).norm() < 1e-14);
        assert!(bra_a_ket(x1.amps(), x1.amps()).norm() < 1e-14);
        assert!(bra_a_ket(x2.amps(), x2.amps()).norm() < 1e-14);
        // z = 5/2 sits on |n+1> of Xi1 relative to sqrt(n+1) on |n+2>
        let ratio = x1.amp(2).norm() / x1.amp(3).norm();
        assert!(close(ratio, 2.5 / 2f64.sqrt(), 1e-12));
        assert!(make_indefinite_parity_pair(1, 2.0, 2.0 * PI, 0.0).is_err());
    }

    #[test]
    fn cat3_support_and_cycling() {
        let a = C64::new(0.5, 0.0);
        let d = coherent_cutoff(0.5);
        let cats: Vec<_> = (0..3).map(|k| make_cat3(a, k, d).unwrap()).collect();
        for i in 0..3 {
            for j in 0..3 {
                let ip = cats[i].inner(&cats[j]).norm();
                assert!(close(ip, if i == j { 1.0 } else { 0.0 }, 1e-14));
            }
            for n in 0..d {
                if (n + i) % 3 != 0 {
                    assert_eq!(cats[i].amp(n), czero());
                }
            }
            let lowered = StateVector::from_unnormalized(ladder_annihilate(&cats[i])).unwrap();
            assert!(close(lowered.inner(&cats[(i + 1) % 3]).norm(), 1.0, 1e-12));
        }
    }

    #[test]
    fn phase_shift_flips_coherence() {
        let s = StateVector::from_unnormalized(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0), czero()])
            .unwrap();
        let rho = s.outer();
        assert_eq!(apply_phase_shift(&rho, 0.0), rho);
        let shifted = apply_phase_shift(&rho, PI);
        assert!((shifted.get(0, 1) + rho.get(0, 1)).norm() < 1e-15);
    }

    #[test]
    fn equal_population_spectrum() {
        let f = 0.4;
        let third = 1.0 / 3.0;
        let mut elems = vec![czero(); 25];
        for i in 0..3 {
            for j in 0..3 {
                elems[i * 5 + j] = C64::new(if i == j { third } else { f * third }, 0.0);
            }
        }
        let rho = DensityMatrix::new(5, elems).unwrap();
        let eig = eigendecompose(&rho).unwrap();
        assert!(close(eig[0].0, (2.0 * f + 1.0) / 3.0, 1e-13));
        assert!(close(eig[1].0, (1.0 - f) / 3.0, 1e-13));
        assert!(close(eig[2].0, (1.0 - f) / 3.0, 1e-13));
    }

    #[test]
    fn non_psd_rejected() {
        let elems = vec![
            C64::new(0.5, 0.0),
            C64::new(0.9, 0.0),
            C64::new(0.9, 0.0),
            C64::new(0.5, 0.0),
        ];
        assert!(matches!(DensityMatrix::new(2, elems), Err(Error::NotPsd(_))));
    }

    #[test]
    fn decomposition_roundtrip() {
        let d = 4;
        let s0 = make_fock(0, d).unwrap();
        let s1 = make_fock(1, d).unwrap();
        let rho = DensityMatrix::from_mixture(&[(0.3, &s0), (0.7, &s1)]).unwrap();
        let dec = Decomposition::new(vec![(0.3, s0.clone()), (0.7, s1.clone())]).unwrap();
        assert!(verify_decomposition(&rho, &dec).unwrap() < 1e-15);
        let bad = Decomposition::new(vec![(0.5, s0), (0.5, s1)]).unwrap();
        assert!(matches!(
            verify_decomposition(&rho, &bad),
            Err(Error::DecompositionMismatch(_))
        ));
    }
}

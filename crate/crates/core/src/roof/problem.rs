//! Special-basis description of a rank-J state for the roof LP.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::{
    bra_a_ket, coherent_cutoff, expectations_unchecked, inner, make_cat3, make_fock, DensityMatrix,
    StateVector,
};
use crate::rank2::Rank2State;
use crate::C64;

const COND_TOL: f64 = 1e-9;

/// Target state expressed in a special basis psi_1..psi_J:
/// <psi_j|a|psi_k> = r_jk e^{i mu}, <a^2> = s e^{2i mu}, populations on the
/// diagonal of `targets` and real coherences off it.
#[derive(Clone, Debug)]
pub struct RoofProblem {
    pub(crate) j: usize,
    /// Row-major J x J, real after removing the common phase.
    pub(crate) r: Vec<f64>,
    /// Row-major J x J real symmetric matrix <psi_j|rho|psi_k>.
    pub(crate) targets: Vec<f64>,
    pub(crate) mean_n: f64,
    /// Signed <a^2> e^{-2i mu}.
    pub(crate) s: f64,
    pub(crate) mu: f64,
    pub(crate) basis: Option<Vec<StateVector>>,
}

impl RoofProblem {
    pub fn rank(&self) -> usize {
        self.j
    }

    pub fn mean_n(&self) -> f64 {
        self.mean_n
    }

    /// |<a^2>|
    pub fn a2_abs(&self) -> f64 {
        self.s.abs()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn basis(&self) -> Option<&[StateVector]> {
        self.basis.as_deref()
    }

    pub fn population(&self, j: usize) -> f64 {
        self.targets[j * self.j + j]
    }

    pub fn coherence(&self, j: usize, k: usize) -> f64 {
        self.targets[j * self.j + k]
    }

    pub(crate) fn r(&self, j: usize, k: usize) -> f64 {
        self.r[j * self.j + k]
    }

    /// Builds the problem from explicit orthonormal basis states and rho,
    /// checking each roof condition.
    pub fn from_basis(basis: Vec<StateVector>, rho: &DensityMatrix) -> Result<Self> {
        let j = basis.len();
        if !(2..=4).contains(&j) {
            return Err(Error::InvalidParameter(format!("rank {j} outside 2..=4")));
        }
        let dim = basis.iter().map(|b| b.dim()).max().unwrap().max(rho.dim());
        let basis: Vec<StateVector> = basis.iter().map(|b| b.padded(dim)).collect();
        let rho = rho.padded(dim);
        for a in 0..j {
            for b in 0..j {
                let g = inner(basis[a].amps(), basis[b].amps());
                let want = if a == b { 1.0 } else { 0.0 };
                if (g - want).norm() > 1e-10 {
                    return Err(Error::ConditionViolation("basis is not orthonormal".into()));
                }
            }
        }
        // <psi_a|rho|psi_b>
        let rho_on = |a: &StateVector, b: &StateVector| -> C64 {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..dim {
                let am = a.amps()[m].conj();
                if am == C64::new(0.0, 0.0) {
                    continue;
                }
                for n in 0..dim {
                    acc += am * rho.get(m, n) * b.amps()[n];
                }
            }
            acc
        };
        let mut targets = vec![0.0; j * j];
        let mut trace = 0.0;
        for a in 0..j {
            for b in 0..j {
                let v = rho_on(&basis[a], &basis[b]);
                if v.im.abs() > COND_TOL {
                    return Err(Error::ConditionViolation(format!(
                        "coherence <psi_{a}|rho|psi_{b}> = {v} is not real"
                    )));
                }
                targets[a * j + b] = v.re;
            }
            trace += targets[a * j + a];
        }
        if (trace - 1.0).abs() > COND_TOL {
            return Err(Error::ConditionViolation(format!(
                "state not supported on the basis (captured weight {trace})"
            )));
        }
        let mut elems = vec![C64::new(0.0, 0.0); j * j];
        for a in 0..j {
            for b in 0..j {
                elems[a * j + b] = bra_a_ket(basis[a].amps(), basis[b].amps());
            }
        }
        let e = expectations_unchecked(&rho);
        Self::from_elements(j, &elems, e.mean_a2, e.mean_n, targets, Some(basis))
    }

    /// Shared checks: vanishing diagonal, common phase, and <a^2> aligned.
    fn from_elements(
        j: usize,
        elems: &[C64],
        mean_a2: C64,
        mean_n: f64,
        targets: Vec<f64>,
        basis: Option<Vec<StateVector>>,
    ) -> Result<Self> {
        let scale = elems.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        for a in 0..j {
            if elems[a * j + a].norm() > COND_TOL * scale {
                return Err(Error::ConditionViolation(format!(
                    "<psi_{a}|a|psi_{a}> = {} is nonzero",
                    elems[a * j + a]
                )));
            }
        }
        let biggest = elems
            .iter()
            .copied()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .unwrap();
        let mu = if biggest.norm() > COND_TOL {
            biggest.arg()
        } else if mean_a2.norm() > COND_TOL {
            mean_a2.arg() / 2.0
        } else {
            0.0
        };
        let rot = C64::from_polar(1.0, -mu);
        let mut r = vec![0.0; j * j];
        for (dst, z) in r.iter_mut().zip(elems) {
            let w = z * rot;
            if w.im.abs() > COND_TOL * scale {
                return Err(Error::ConditionViolation(format!(
                    "matrix elements of a do not share a common phase (mu = {mu})"
                )));
            }
            *dst = w.re;
        }
        let s = mean_a2 * rot * rot;
        if s.im.abs() > COND_TOL * scale {
            return Err(Error::ConditionViolation(format!(
                "<a^2> = {mean_a2} is not aligned with e^(2i mu), mu = {mu}"
            )));
        }
        Ok(Self { j, r, targets, mean_n, s: s.re, mu, basis })
    }

    /// Rank-2 problem from scalars only; the coherence must be real in the
    /// aligned basis unless a phase shift can absorb it.
    pub fn from_rank2(state: &Rank2State) -> Result<Self> {
        let pair = &state.pair;
        let (p, f) = (state.p, state.f);
        let pp = p * (1.0 - p);
        let shiftable = pair.r12 == 0.0 || pair.r21 == 0.0;
        let coh = if f == 0.0 || shiftable {
            f * pp.sqrt()
        } else {
            let c = state.chi.cos();
            if state.chi.sin().abs() > 1e-12 {
                return Err(Error::ConditionViolation(format!(
                    "coherence phase chi = {} is not real in the special basis",
                    state.chi
                )));
            }
            f * pp.sqrt() * c
        };
        let targets = vec![p, coh, coh, 1.0 - p];
        let s = p * pair.s1 + (1.0 - p) * pair.s2;
        let nbar = p * pair.n1 + (1.0 - p) * pair.n2;
        Ok(Self {
            j: 2,
            r: vec![0.0, pair.r12, pair.r21, 0.0],
            targets,
            mean_n: nbar,
            s,
            mu: pair.mu,
            basis: None,
        })
    }

    /// Levels (n+2, n+1, n) with populations (p2, p1, p0) and coherence
    /// ratios (f21, f10, f20).
    pub fn fock3(pops: [f64; 3], coh: [f64; 3], n: usize) -> Result<Self> {
        let rho = crate::spec::fock3_density(pops, coh, n)?;
        let dim = rho.dim();
        let basis = vec![make_fock(n + 2, dim)?, make_fock(n + 1, dim)?, make_fock(n, dim)?];
        Self::from_basis(basis, &rho)
    }

    /// sum_k p_k |cat3_k><cat3_k| for real alpha > 0, in the basis (cat3_0, cat3_1, cat3_2).
    pub fn cat3(alpha: f64, pops: [f64; 3]) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
        }
        let dim = coherent_cutoff(alpha);
        let a = C64::new(alpha, 0.0);
        let basis = (0..3).map(|k| make_cat3(a, k, dim)).collect::<Result<Vec<_>>>()?;
        let parts: Vec<(f64, &StateVector)> =
            pops.iter().zip(&basis).filter(|(p, _)| **p > 0.0).map(|(p, b)| (*p, b)).collect();
        let rho = DensityMatrix::from_mixture(&parts)?;
        Self::from_basis(basis, &rho)
    }

    /// e^{-i mu} <phi|a|phi> for phi = sum_j c_j psi_j.
    pub(crate) fn z_of(&self, c: &[C64]) -> C64 {
        let mut z = C64::new(0.0, 0.0);
        for a in 0..self.j {
            for b in 0..self.j {
                let r = self.r(a, b);
                if r != 0.0 {
                    z += c[a].conj() * c[b] * r;
                }
            }
        }
        z
    }

    /// Objective of an explicit decomposition given by amplitudes in the
    /// special basis; returns (value, witness part, q part). The amplitudes
    /// must reproduce the targets to 1e-9.
    pub fn decomposition_value(&self, parts: &[(f64, Vec<C64>)]) -> Result<(f64, f64, f64)> {
        let j = self.j;
        let mut recon = vec![C64::new(0.0, 0.0); j * j];
        let mut abs2 = 0.0;
        let mut z2 = C64::new(0.0, 0.0);
        for (w, c) in parts {
            if c.len() != j {
                return Err(Error::InvalidParameter("amplitude vector of wrong length".into()));
            }
            for a in 0..j {
                for b in 0..j {
                    recon[a * j + b] += c[a] * c[b].conj() * *w;
                }
            }
            let z = self.z_of(c);
            abs2 += w * z.norm_sqr();
            z2 += z * z * *w;
        }
        let dev = recon
            .iter()
            .zip(&self.targets)
            .map(|(x, t)| (x - t).norm())
            .fold(0.0, f64::max);
        if dev > 1e-9 {
            return Err(Error::DecompositionMismatch(dev));
        }
        let witness = (C64::new(self.s, 0.0) - z2).norm();
        let q_part = self.mean_n - abs2;
        Ok((q_part + witness, witness, q_part))
    }

    /// Largest eigenpair of the target matrix; used to short-circuit pure inputs.
    pub(crate) fn target_eigen(&self) -> Vec<(f64, Vec<f64>)> {
        let elems: Vec<C64> = self.targets.iter().map(|&v| C64::new(v, 0.0)).collect();
        let eig = crate::linalg::hermitian_eigen(self.j, &elems);
        eig.values
            .iter()
            .zip(&eig.vectors)
            .map(|(&l, v)| {
                // vectors of a real symmetric matrix are real up to the phase fix
                (l, v.iter().map(|c| if c.re.abs() >= c.im.abs() { c.re } else { c.im }).collect())
            })
            .collect()
    }

    /// Basis-state superposition with amplitudes x_j e^{i theta_j}.
    pub fn materialize(&self, x: &[f64], theta: &[f64]) -> Result<StateVector> {
        let basis = self
            .basis
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("problem has no basis states".into()))?;
        let dim = basis[0].dim();
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        for ((b, &xj), &tj) in basis.iter().zip(x).zip(theta) {
            let c = C64::from_polar(xj, tj);
            for (a, v) in amps.iter_mut().zip(b.amps()) {
                *a += c * v;
            }
        }
        StateVector::from_unnormalized(amps)
    }
}

/// Phase angle folded into [0, 2 pi).
pub(crate) fn fold(theta: f64) -> f64 {
    theta.rem_euclid(2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank2::two_fock;

    #[test]
    fn fock3_data() {
        let pr = RoofProblem::fock3([0.4, 0.4, 0.2], [0.0, 0.5, 0.0], 0).unwrap();
        assert!((pr.r(1, 0) - 2f64.sqrt()).abs() < 1e-12);
        assert!((pr.r(2, 1) - 1.0).abs() < 1e-12);
        assert_eq!(pr.r(0, 1), 0.0);
        assert!((pr.mean_n() - 1.2).abs() < 1e-12);
        assert!(pr.a2_abs() < 1e-14);
        assert!((pr.coherence(1, 2) - 0.5 * 0.08f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cat3_conditions_hold() {
        let pr = RoofProblem::cat3(0.5, [0.2, 0.3, 0.5]).unwrap();
        assert!(pr.a2_abs() < 1e-12);
        // a maps cat3_k onto cat3_{k+1}
        assert!(pr.r(1, 0) > 0.0 && pr.r(2, 1) > 0.0 && pr.r(0, 2) > 0.0);
        assert!(pr.r(0, 1).abs() < 1e-12);
    }

    #[test]
    fn complex_coherence_rejected() {
        let dim = 5;
        let (p1, p0) = (make_fock(1, dim).unwrap(), make_fock(0, dim).unwrap());
        let rho = DensityMatrix::partially_coherent(&p1, &p0, 0.5, 0.5, 1.0).unwrap();
        let err = RoofProblem::from_basis(vec![p1, p0], &rho).unwrap_err();
        assert!(matches!(err, Error::ConditionViolation(_)));
    }

    #[test]
    fn nonzero_diagonal_rejected() {
        let dim = 12;
        let c = crate::fock::make_coherent(C64::new(0.5, 0.0), dim).unwrap();
        // <alpha|a|alpha> != 0 for any orthogonal partner
        let other = {
            let mut amps = vec![C64::new(0.0, 0.0); dim];
            amps[0] = -c.amps()[1].conj();
            amps[1] = c.amps()[0].conj();
            StateVector::from_unnormalized(amps).unwrap()
        };
        let rho = c.outer();
        let err = RoofProblem::from_basis(vec![c, other], &rho).unwrap_err();
        assert!(matches!(err, Error::ConditionViolation(_)));
    }

    #[test]
    fn rank2_scalars_match_states() {
        let s = two_fock(2, 0.3, 0.4).unwrap();
        let a = RoofProblem::from_rank2(&s).unwrap();
        let dim = 6;
        let (u, v) = (make_fock(3, dim).unwrap(), make_fock(2, dim).unwrap());
        let rho = DensityMatrix::partially_coherent(&u, &v, 0.3, 0.4, 0.0).unwrap();
        let b = RoofProblem::from_basis(vec![u, v], &rho).unwrap();
        for k in 0..4 {
            assert!((a.r[k] - b.r[k]).abs() < 1e-12);
            assert!((a.targets[k] - b.targets[k]).abs() < 1e-12);
        }
        assert!((a.mean_n - b.mean_n).abs() < 1e-12);
    }
}

//! Pure-state measure, fixed-decomposition objective, quadrature QFI and
//! metrological power.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{
    bra_a_ket, eigendecompose, expectations, inner, verify_decomposition, DensityMatrix,
    Decomposition, StateVector,
};

/// Quadrature angle reduced to [0, pi).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct QuadratureAngle(f64);

impl QuadratureAngle {
    pub fn new(mu: f64) -> Self {
        let mut m = mu.rem_euclid(PI);
        if m >= PI {
            m = 0.0;
        }
        Self(m)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// How a measure value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Closed form for pure states.
    Pure,
    /// Objective of a caller-supplied decomposition (an upper bound).
    FixedDecomposition,
    /// Rank-2 regime where <a^2> is too large to cancel.
    OverSqueezed,
    /// Rank-2 regime with a vanishing witness.
    UnderSqueezedA,
    /// Rank-2 regime where <a^2> is too small to cancel.
    UnderSqueezedB,
    /// Convex-roof program with the witness sign fixed positive.
    LPlus,
    /// Convex-roof program with the witness sign fixed negative.
    LMinus,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Pure => "pure",
            Branch::FixedDecomposition => "fixed",
            Branch::OverSqueezed => "over_squeezed",
            Branch::UnderSqueezedA => "under_squeezed_a",
            Branch::UnderSqueezedB => "under_squeezed_b",
            Branch::LPlus => "l_plus",
            Branch::LMinus => "l_minus",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeasureReport {
    pub value: f64,
    pub witness_part: f64,
    pub q_part: f64,
    pub branch: Branch,
    pub decomposition: Option<Decomposition>,
}

/// <n> - |<a>|^2 + |<a^2> - <a>^2|
pub fn ort_pure(psi: &StateVector) -> Result<f64> {
    let e = expectations(&psi.outer())?;
    Ok(pure_bracket(e.mean_n, e.mean_a, e.mean_a2))
}

fn pure_bracket(n: f64, a: C64, a2: C64) -> f64 {
    ((n - a.norm_sqr()) + (a2 - a * a).norm()).max(0.0)
}

/// Evaluates the minimand for one fixed decomposition of `rho`.
pub fn decomposition_objective(rho: &DensityMatrix, d: &Decomposition) -> Result<MeasureReport> {
    verify_decomposition(rho, d)?;
    let e = expectations(rho)?;
    let mut sum_abs2 = 0.0;
    let mut sum_sq = C64::new(0.0, 0.0);
    for (q, phi) in d.entries() {
        let a = bra_a_ket(phi.amps(), phi.amps());
        sum_abs2 += q * a.norm_sqr();
        sum_sq += a * a * *q;
    }
    let q_part = (e.mean_n - sum_abs2).max(0.0);
    let witness_part = (e.mean_a2 - sum_sq).norm();
    Ok(MeasureReport {
        value: q_part + witness_part,
        witness_part,
        q_part,
        branch: Branch::FixedDecomposition,
        decomposition: Some(d.clone()),
    })
}

/// Quadrature variance part of the QFI, precomputed in the eigenbasis so
/// that several angles can be evaluated cheaply.
struct QfiData {
    mean_n: f64,
    mean_a2: C64,
    lambdas: Vec<f64>,
    /// a_jk = <l_j|a|l_k> over the support of rho
    a_elems: Vec<C64>,
}

impl QfiData {
    fn new(rho: &DensityMatrix) -> Result<Self> {
        let e = expectations(rho)?;
        let eig = eigendecompose(rho)?;
        let support: Vec<(f64, StateVector)> =
            eig.into_iter().filter(|(l, _)| *l > 1e-14).collect();
        let r = support.len();
        let mut a_elems = vec![C64::new(0.0, 0.0); r * r];
        let lowered: Vec<Vec<C64>> = support
            .iter()
            .map(|(_, v)| crate::fock::ladder_annihilate(v))
            .collect();
        for j in 0..r {
            for k in 0..r {
                a_elems[j * r + k] = inner(support[j].1.amps(), &lowered[k]);
            }
        }
        Ok(Self {
            mean_n: e.mean_n,
            mean_a2: e.mean_a2,
            lambdas: support.iter().map(|(l, _)| *l).collect(),
            a_elems,
        })
    }

    fn eval(&self, mu: f64) -> f64 {
        let ph = C64::from_polar(1.0, 2.0 * mu);
        let tr_x2 = (2.0 * self.mean_n + 1.0 - 2.0 * (ph * self.mean_a2).re) / 2.0;
        let r = self.lambdas.len();
        let e_m = C64::from_polar(1.0, -mu);
        let e_p = C64::from_polar(1.0, mu);
        let mut sum = 0.0;
        for j in 0..r {
            for k in 0..r {
                let (lj, lk) = (self.lambdas[j], self.lambdas[k]);
                if lj + lk < 1e-12 {
                    continue;
                }
                // X_jk = i (e^{-i mu} conj(a_kj) - e^{i mu} a_jk) / sqrt 2
                let x = C64::new(0.0, 1.0)
                    * (e_m * self.a_elems[k * r + j].conj() - e_p * self.a_elems[j * r + k])
                    / std::f64::consts::SQRT_2;
                sum += x.norm_sqr() * 2.0 * lj * lk / (lj + lk);
            }
        }
        tr_x2 - sum
    }
}

/// F_X(mu) = Tr[X^2 rho] - sum_jk |<l_j|X|l_k>|^2 2 l_j l_k / (l_j + l_k)
pub fn qfi_quadrature(rho: &DensityMatrix, mu: QuadratureAngle) -> Result<f64> {
    Ok(QfiData::new(rho)?.eval(mu.value()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetroPower {
    /// max[max_mu F - 1/2, 0], with values within 1e-12 of zero clamped.
    pub value: f64,
    /// max_mu F - 1/2 before clamping.
    pub raw: f64,
    pub angle: QuadratureAngle,
}

/// Maximizes F_X over the quadrature angle through its exact
/// c0 + c1 cos 2mu + c2 sin 2mu form.
pub fn metrological_power(rho: &DensityMatrix) -> Result<MetroPower> {
    let data = QfiData::new(rho)?;
    let f0 = data.eval(0.0);
    let f45 = data.eval(FRAC_PI_4);
    let f90 = data.eval(FRAC_PI_2);
    let c0 = (f0 + f90) / 2.0;
    let c1 = (f0 - f90) / 2.0;
    let c2 = f45 - c0;
    let amp = c1.hypot(c2);
    let best = c0 + amp;
    let angle = QuadratureAngle::new(c2.atan2(c1) / 2.0);

    let scale = 1.0 + c0.abs();
    for i in 0..64 {
        let mu = PI * i as f64 / 64.0;
        let fit = c0 + c1 * (2.0 * mu).cos() + c2 * (2.0 * mu).sin();
        let dev = (data.eval(mu) - fit).abs();
        if dev > 1e-9 * scale {
            return Err(Error::ConditionViolation(format!(
                "quadrature variance is not a degree-2 trigonometric polynomial (deviation {dev:.3e})"
            )));
        }
    }

    let raw = best - 0.5;
    let value = if raw <= 1e-12 { 0.0 } else { raw };
    Ok(MetroPower { value, raw, angle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{
        coherent_cutoff, make_coherent, make_fock, make_squeezed_vacuum, squeezed_cutoff,
    };

    fn sv_value(g: f64) -> f64 {
        g.sinh().powi(2) + g.sinh() * g.cosh()
    }

    #[test]
    fn angle_reduction() {
        assert!((QuadratureAngle::new(PI + 0.25).value() - 0.25).abs() < 1e-15);
        assert!((QuadratureAngle::new(-0.25).value() - (PI - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn pure_values() {
        let coh = make_coherent(C64::new(0.7, 0.0), coherent_cutoff(0.7)).unwrap();
        assert!(ort_pure(&coh).unwrap().abs() < 1e-12);
        assert!((ort_pure(&make_fock(3, 8).unwrap()).unwrap() - 3.0).abs() < 1e-15);
        let sv = make_squeezed_vacuum(0.3, 0.0, squeezed_cutoff(0.3)).unwrap();
        assert!((ort_pure(&sv).unwrap() - sv_value(0.3)).abs() < 1e-12);
        assert!((sv_value(0.3) - 0.411059).abs() < 1e-6);
    }

    #[test]
    fn fock_variances() {
        let any = QuadratureAngle::new(0.37);
        let vac = make_fock(0, 4).unwrap().outer();
        assert!((qfi_quadrature(&vac, any).unwrap() - 0.5).abs() < 1e-14);
        let one = make_fock(1, 4).unwrap().outer();
        assert!((qfi_quadrature(&one, any).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn two_fock_objectives() {
        let p = 0.5;
        let s0 = make_fock(0, 4).unwrap();
        let s1 = make_fock(1, 4).unwrap();
        let rho = DensityMatrix::from_mixture(&[(p, &s1), (1.0 - p, &s0)]).unwrap();
        let eig = Decomposition::new(vec![(p, s1.clone()), (1.0 - p, s0.clone())]).unwrap();
        assert!((decomposition_objective(&rho, &eig).unwrap().value - p).abs() < 1e-14);

        // sqrt(p)|1> + e^{i theta} sqrt(1-p)|0>
        let branch = |theta: f64| {
            let mut v = vec![C64::new(0.0, 0.0); 4];
            v[0] = C64::from_polar((1.0 - p).sqrt(), theta);
            v[1] = C64::new(p.sqrt(), 0.0);
            StateVector::new(v).unwrap()
        };
        // the +- pair leaves the witness at |sum q <a>^2| = 1/4
        let pair = Decomposition::new(vec![(0.5, branch(0.0)), (0.5, branch(PI))]).unwrap();
        assert!((decomposition_objective(&rho, &pair).unwrap().value - 0.5).abs() < 1e-14);
        // adding the +-pi/2 branches cancels it and reaches n + p - p(1-p)(n+1)
        let four = Decomposition::new(
            [0.0, PI, FRAC_PI_2, -FRAC_PI_2]
                .iter()
                .map(|&t| (0.25, branch(t)))
                .collect(),
        )
        .unwrap();
        let r = decomposition_objective(&rho, &four).unwrap();
        assert!((r.value - 0.25).abs() < 1e-14);
        assert!(r.witness_part < 1e-15);

        let m = metrological_power(&rho).unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn pure_power_equals_measure() {
        let sv = make_squeezed_vacuum(0.3, 0.4, squeezed_cutoff(0.3)).unwrap();
        let m = metrological_power(&sv.outer()).unwrap();
        assert!((m.value - sv_value(0.3)).abs() < 1e-10);
    }

    #[test]
    fn mismatched_decomposition_rejected() {
        let s0 = make_fock(0, 4).unwrap();
        let s1 = make_fock(1, 4).unwrap();
        let rho = DensityMatrix::from_mixture(&[(0.2, &s1), (0.8, &s0)]).unwrap();
        let d = Decomposition::new(vec![(0.5, s1), (0.5, s0)]).unwrap();
        assert!(matches!(
            decomposition_objective(&rho, &d),
            Err(Error::DecompositionMismatch(_))
        ));
    }
}

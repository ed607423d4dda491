//! Closed-form measure and metrological power for rank-2 states spanned by a
//! special basis pair, with optional partial coherence between the pair.

mod families;
mod intervals;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{bra_a2_ket, bra_a_ket, bra_n_ket, DensityMatrix, Decomposition, StateVector};
use crate::measures::{decomposition_objective, Branch};

pub use families::*;
pub use intervals::*;

const ZERO_ELEM: f64 = 1e-12;
const PHASE_TOL: f64 = 1e-8;

/// Exact states behind a pair, with their cross matrix elements.
#[derive(Clone, Debug)]
struct Source {
    psi1: StateVector,
    psi2: StateVector,
    /// <psi1|a|psi2>
    a12: C64,
    /// <psi2|a|psi1>
    a21: C64,
    sq1: C64,
    sq2: C64,
    /// <psi1|a^2|psi2>
    sq12: C64,
    /// <psi2|a^2|psi1>
    sq21: C64,
    mean_a1: C64,
    mean_a2: C64,
}

/// Scalar description of a special basis pair. Source states are optional so
/// that extreme parameters never need a Fock truncation.
#[derive(Clone, Debug)]
pub struct SpecialBasisPair {
    pub r12: f64,
    pub r21: f64,
    pub s1: f64,
    pub s2: f64,
    pub n1: f64,
    pub n2: f64,
    /// Common phase: <psi_j|a|psi_k> = r_jk e^{i mu} in the aligned basis.
    pub mu: f64,
    source: Option<Source>,
}

fn wrap(x: f64) -> f64 {
    ((x + PI).rem_euclid(2.0 * PI) - PI).abs()
}

impl SpecialBasisPair {
    pub fn from_scalars(r12: f64, r21: f64, s1: f64, s2: f64, n1: f64, n2: f64, mu: f64) -> Result<Self> {
        for (name, v) in [("r12", r12), ("r21", r21), ("s1", s1), ("s2", s2), ("n1", n1), ("n2", n2)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParameter("mu must be finite".into()));
        }
        Ok(Self { r12, r21, s1, s2, n1, n2, mu, source: None })
    }

    /// Reads every scalar off two explicit states.
    pub fn from_states(psi1: &StateVector, psi2: &StateVector) -> Result<Self> {
        let dim = psi1.dim().max(psi2.dim());
        let (psi1, psi2) = (psi1.padded(dim), psi2.padded(dim));
        for s in [&psi1, &psi2] {
            let top = s.amp(dim - 1).norm_sqr() + s.amp(dim - 2).norm_sqr();
            if top > 1e-10 {
                return Err(Error::Truncation { dim, population: top });
            }
        }
        let overlap = psi1.inner(&psi2).norm();
        if overlap > 1e-10 {
            return Err(Error::AssumptionViolation(format!(
                "special basis states overlap by {overlap:.3e}"
            )));
        }
        let (u, v) = (psi1.amps(), psi2.amps());
        let src = Source {
            a12: bra_a_ket(u, v),
            a21: bra_a_ket(v, u),
            sq1: bra_a2_ket(u, u),
            sq2: bra_a2_ket(v, v),
            sq12: bra_a2_ket(u, v),
            sq21: bra_a2_ket(v, u),
            mean_a1: bra_a_ket(u, u),
            mean_a2: bra_a_ket(v, v),
            psi1: psi1.clone(),
            psi2: psi2.clone(),
        };
        let (r12, r21) = (src.a12.norm(), src.a21.norm());
        let mu = if r12 > ZERO_ELEM && r21 > ZERO_ELEM {
            (src.a12.arg() + src.a21.arg()) / 2.0
        } else {
            let sq = if src.sq1.norm() >= src.sq2.norm() { src.sq1 } else { src.sq2 };
            if sq.norm() > ZERO_ELEM {
                sq.arg() / 2.0
            } else if r12 > ZERO_ELEM {
                src.a12.arg()
            } else if r21 > ZERO_ELEM {
                src.a21.arg()
            } else {
                0.0
            }
        };
        Ok(Self {
            r12,
            r21,
            s1: src.sq1.norm(),
            s2: src.sq2.norm(),
            n1: bra_n_ket(u, u).re,
            n2: bra_n_ket(v, v).re,
            mu,
            source: Some(src),
        })
    }

    /// Attaches explicit states after checking they reproduce the scalars
    /// within `1e-10` relative.
    pub fn with_sources(self, psi1: &StateVector, psi2: &StateVector) -> Result<Self> {
        let other = Self::from_states(psi1, psi2)?;
        let pairs = [
            ("r12", self.r12, other.r12),
            ("r21", self.r21, other.r21),
            ("s1", self.s1, other.s1),
            ("s2", self.s2, other.s2),
            ("n1", self.n1, other.n1),
            ("n2", self.n2, other.n2),
        ];
        for (name, a, b) in pairs {
            if (a - b).abs() > 1e-10 * a.abs().max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name}: closed form {a} disagrees with source states {b}"
                )));
            }
        }
        Ok(Self { source: other.source, ..self })
    }

    pub fn has_sources(&self) -> bool {
        self.source.is_some()
    }

    pub fn sources(&self) -> Option<(&StateVector, &StateVector)> {
        self.source.as_ref().map(|s| (&s.psi1, &s.psi2))
    }

    fn averages(&self, p: f64) -> (f64, f64, f64) {
        let a2 = p * self.s1 + (1.0 - p) * self.s2;
        let nbar = p * self.n1 + (1.0 - p) * self.n2;
        (a2, nbar, p * (1.0 - p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssumptionCheck {
    pub holds: bool,
    pub residual: f64,
    /// False when the pair carries no states to test against.
    pub checked: bool,
}

impl AssumptionCheck {
    fn assumed() -> Self {
        Self { holds: true, residual: 0.0, checked: false }
    }

    fn measured(residual: f64, tol: f64) -> Self {
        Self { holds: residual <= tol, residual, checked: true }
    }
}

/// Per-assumption outcome for a pair, coherence strength and phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssumptionReport {
    /// Both special basis states have <a> = 0.
    pub centered: AssumptionCheck,
    /// <a^2>_1, <a^2>_2 and the cross-element product share one phase.
    pub phase_alignment: AssumptionCheck,
    /// The coherence phase matches the cross elements.
    pub coherence_phase: AssumptionCheck,
    /// Cross a^2 elements cancel so that <a^2> does not depend on f.
    pub cross_squeezing: AssumptionCheck,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.centered.holds
            && self.phase_alignment.holds
            && self.coherence_phase.holds
            && self.cross_squeezing.holds
    }

    fn first_failure(&self) -> Option<String> {
        [
            ("states are not centered", self.centered),
            ("a^2 phases are not aligned", self.phase_alignment),
            ("coherence phase chi does not match the cross elements", self.coherence_phase),
            ("cross a^2 terms do not cancel", self.cross_squeezing),
        ]
        .into_iter()
        .find(|(_, c)| !c.holds)
        .map(|(what, c)| format!("{what} (residual {:.3e})", c.residual))
    }
}

pub fn verify_assumptions(pair: &SpecialBasisPair, f: f64, chi: f64) -> AssumptionReport {
    let coherent = f > 0.0;
    let both_cross = pair.r12 > ZERO_ELEM && pair.r21 > ZERO_ELEM;
    let Some(s) = pair.source.as_ref() else {
        let coherence_phase = if coherent && both_cross {
            AssumptionCheck::measured(wrap(2.0 * chi), PHASE_TOL)
        } else {
            AssumptionCheck::assumed()
        };
        return AssumptionReport {
            centered: AssumptionCheck::assumed(),
            phase_alignment: AssumptionCheck::assumed(),
            coherence_phase,
            cross_squeezing: AssumptionCheck::assumed(),
        };
    };

    let centered = AssumptionCheck::measured(s.mean_a1.norm().max(s.mean_a2.norm()), 1e-10);

    let mut phases = Vec::new();
    for z in [s.sq1, s.sq2] {
        if z.norm() > ZERO_ELEM {
            phases.push(z.arg());
        }
    }
    if both_cross {
        phases.push(s.a12.arg() + s.a21.arg());
    }
    let mut spread: f64 = 0.0;
    for i in 0..phases.len() {
        for j in i + 1..phases.len() {
            spread = spread.max(wrap(phases[i] - phases[j]));
        }
    }
    let phase_alignment = AssumptionCheck::measured(spread, PHASE_TOL);

    let coherence_phase = if coherent && both_cross {
        AssumptionCheck::measured(wrap(2.0 * chi - (s.a12.arg() - s.a21.arg())), PHASE_TOL)
    } else {
        AssumptionCheck::measured(0.0, PHASE_TOL)
    };
    let cross_squeezing = if coherent {
        let res = (C64::from_polar(1.0, -chi) * s.sq12 + C64::from_polar(1.0, chi) * s.sq21).norm();
        AssumptionCheck::measured(res, 1e-10)
    } else {
        AssumptionCheck::measured(0.0, 1e-10)
    };
    AssumptionReport { centered, phase_alignment, coherence_phase, cross_squeezing }
}

/// rho = p|psi1><psi1| + f e^{i chi} sqrt(p(1-p)) |psi1><psi2| + h.c. + (1-p)|psi2><psi2|
#[derive(Clone, Debug)]
pub struct Rank2State {
    pub pair: SpecialBasisPair,
    pub p: f64,
    pub f: f64,
    pub chi: f64,
}

impl Rank2State {
    pub fn new(pair: SpecialBasisPair, p: f64, f: f64, chi: f64) -> Result<Self> {
        check_unit("p", p)?;
        check_unit("f", f)?;
        if !chi.is_finite() {
            return Err(Error::InvalidParameter("chi must be finite".into()));
        }
        Ok(Self { pair, p, f, chi })
    }

    pub fn ort(&self) -> Result<BranchResult> {
        ort_rank2_coherent(self)
    }

    /// Explicit density matrix; requires source states.
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        let (psi1, psi2) = self.pair.sources().ok_or_else(no_sources)?;
        DensityMatrix::partially_coherent(psi1, psi2, self.p, self.f, self.chi)
    }
}

fn no_sources() -> Error {
    Error::InvalidParameter("pair has no source states to materialize".into())
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!("{name} = {v} must lie in [0, 1]")));
    }
    Ok(())
}

/// Mixture over the states sqrt(p)|psi1> + e^{i(theta - chi')} sqrt(1-p)|psi2'>,
/// listed as (theta, weight), where psi2' and chi' refer to the aligned basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Recipe {
    pub entries: Vec<(f64, f64)>,
}

impl Recipe {
    fn new(raw: Vec<(f64, f64)>) -> Self {
        let mut entries: Vec<(f64, f64)> = Vec::new();
        for (theta, w) in raw {
            if w <= 1e-15 {
                continue;
            }
            let t = theta.rem_euclid(2.0 * PI);
            match entries.iter_mut().find(|(u, _)| wrap(*u - t) < 1e-12) {
                Some(e) => e.1 += w,
                None => entries.push((t, w)),
            }
        }
        Self { entries }
    }
}

#[derive(Clone, Debug)]
pub struct BranchResult {
    pub value: f64,
    pub branch: Branch,
    pub recipe: Recipe,
}

/// eta(f, p) = p(1-p)[(2f^2 - 1)(r21^2 + r12^2) + 2 r21 r12]
pub fn eta(pair: &SpecialBasisPair, f: f64, p: f64) -> f64 {
    let (r12, r21) = (pair.r12, pair.r21);
    p * (1.0 - p) * ((2.0 * f * f - 1.0) * (r21 * r21 + r12 * r12) + 2.0 * r21 * r12)
}

/// Branch and value without assumption checks.
fn classify(pair: &SpecialBasisPair, p: f64, f: f64) -> (Branch, f64) {
    let (a2, nbar, pp) = pair.averages(p);
    let (r12, r21) = (pair.r12, pair.r21);
    let k = (r21 + r12).powi(2);
    if a2 >= pp * k {
        (Branch::OverSqueezed, nbar + a2 - 2.0 * pp * k)
    } else if a2 >= eta(pair, f, p) {
        let r2 = r21 * r21 + r12 * r12;
        let v = nbar - (2.0 * r21 * r12 * a2 + (r21 * r21 - r12 * r12).powi(2) * pp) / r2;
        (Branch::UnderSqueezedA, v)
    } else {
        let v = nbar - a2 + (2.0 * f * f - 2.0) * pp * (r21 - r12).powi(2);
        (Branch::UnderSqueezedB, v)
    }
}

fn recipe(pair: &SpecialBasisPair, p: f64, f: f64, branch: Branch) -> Recipe {
    match branch {
        Branch::OverSqueezed => Recipe::new(vec![(0.0, (1.0 + f) / 2.0), (PI, (1.0 - f) / 2.0)]),
        Branch::UnderSqueezedB => {
            let t = f.clamp(-1.0, 1.0).acos();
            Recipe::new(vec![(t, 0.5), (-t, 0.5)])
        }
        _ => {
            let (a2, _, pp) = pair.averages(p);
            let (r12, r21) = (pair.r12, pair.r21);
            let xbar = ((a2 - 2.0 * r21 * r12 * pp) / (pp * (r21 * r21 + r12 * r12))).clamp(-1.0, 1.0);
            under_squeezed_a_angles(f, xbar)
        }
    }
}

/// Symmetric angle distribution with E[cos theta] = f and E[cos 2 theta] = xbar.
fn under_squeezed_a_angles(f: f64, xbar: f64) -> Recipe {
    if f == 0.0 {
        let a = (xbar + 1.0) / 4.0;
        let b = (1.0 - xbar) / 4.0;
        return Recipe::new(vec![(0.0, a), (PI, a), (FRAC_PI_2, b), (-FRAC_PI_2, b)]);
    }
    let d = ((xbar - (2.0 * f * f - 1.0)) / 2.0).max(0.0).sqrt();
    let (cp, cm) = (f + d, f - d);
    if cp <= 1.0 && cm >= -1.0 {
        let (tp, tm) = (cp.acos(), cm.acos());
        return Recipe::new(vec![(tp, 0.25), (-tp, 0.25), (tm, 0.25), (-tm, 0.25)]);
    }
    // four-angle form leaves [-1, 1]; use cos theta in {1, t} instead, which
    // matches the same two moments
    let m2 = (xbar + 1.0) / 2.0;
    let t = (f - m2) / (1.0 - f);
    let u = (1.0 - f) / (1.0 - t);
    let th = t.clamp(-1.0, 1.0).acos();
    Recipe::new(vec![(0.0, 1.0 - u), (th, u / 2.0), (-th, u / 2.0)])
}

fn evaluate(pair: &SpecialBasisPair, p: f64, f: f64, chi: f64) -> Result<BranchResult> {
    check_unit("p", p)?;
    check_unit("f", f)?;
    let report = verify_assumptions(pair, f, chi);
    if let Some(why) = report.first_failure() {
        return Err(Error::AssumptionViolation(why));
    }
    let (branch, value) = classify(pair, p, f);
    Ok(BranchResult {
        value: value.max(0.0),
        branch,
        recipe: recipe(pair, p, f, branch),
    })
}

/// Incoherent mixture p|psi1><psi1| + (1-p)|psi2><psi2|.
pub fn ort_rank2(pair: &SpecialBasisPair, p: f64) -> Result<BranchResult> {
    evaluate(pair, p, 0.0, 0.0)
}

/// Partially coherent mixture, three-branch formula.
pub fn ort_rank2_coherent(state: &Rank2State) -> Result<BranchResult> {
    evaluate(&state.pair, state.p, state.f, state.chi)
}

/// Metrological power of the incoherent mixture.
pub fn mpower_rank2(pair: &SpecialBasisPair, p: f64) -> Result<f64> {
    check_unit("p", p)?;
    if let Some(why) = verify_assumptions(pair, 0.0, 0.0).first_failure() {
        return Err(Error::AssumptionViolation(why));
    }
    let (a2, nbar, pp) = pair.averages(p);
    let (r12, r21) = (pair.r12, pair.r21);
    let v = if a2 >= 4.0 * pp * r21 * r12 {
        nbar + a2 - 2.0 * pp * (r21 + r12).powi(2)
    } else {
        nbar - a2 - 2.0 * pp * (r12 - r21).powi(2)
    };
    Ok(v.max(0.0))
}

/// Builds the states of a recipe in the original (unaligned) basis.
pub fn materialize(state: &Rank2State, recipe: &Recipe) -> Result<Decomposition> {
    let pair = &state.pair;
    let (psi1, psi2) = pair.sources().ok_or_else(no_sources)?;
    let (sp, sq) = (state.p.sqrt(), (1.0 - state.p).sqrt());
    let mut entries = Vec::with_capacity(recipe.entries.len());
    for &(theta, w) in &recipe.entries {
        // the alignment phase of psi2 cancels against chi' = chi + delta
        let c2 = C64::from_polar(sq, theta - state.chi);
        let amps = psi1
            .amps()
            .iter()
            .zip(psi2.amps())
            .map(|(a, b)| a * sp + b * c2)
            .collect();
        entries.push((w, StateVector::from_unnormalized(amps)?));
    }
    Decomposition::new(entries)
}

/// Analytic result together with its materialized optimal decomposition.
#[derive(Clone, Debug)]
pub struct OptimalDecomposition {
    pub result: BranchResult,
    /// Present when the pair has source states.
    pub decomposition: Option<Decomposition>,
}

/// Evaluates the state and, when possible, checks that the recipe's own
/// objective equals the analytic value within `1e-9`.
pub fn optimal_decomposition(state: &Rank2State) -> Result<OptimalDecomposition> {
    let result = ort_rank2_coherent(state)?;
    if !state.pair.has_sources() {
        return Ok(OptimalDecomposition { result, decomposition: None });
    }
    let dec = materialize(state, &result.recipe)?;
    let rho = state.density_matrix()?;
    let report = decomposition_objective(&rho, &dec).map_err(|e| match e {
        Error::DecompositionMismatch(d) => {
            Error::BranchMismatch(format!("recipe does not reproduce the state (deviation {d:.3e})"))
        }
        other => other,
    })?;
    if (report.value - result.value).abs() > 1e-9 {
        return Err(Error::BranchMismatch(format!(
            "{} recipe reaches {} but the closed form gives {}",
            result.branch.name(),
            report.value,
            result.value
        )));
    }
    Ok(OptimalDecomposition { result, decomposition: Some(dec) })
}

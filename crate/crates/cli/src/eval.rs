//! Dispatch from a parsed state spec to the analytic, numeric or pure route.

use ort_core::channels::{apply_dephasing, DephasingKernel};
use ort_core::fock::{eigendecompose, expectations, make_fock};
use ort_core::measures::{decomposition_objective, metrological_power, ort_pure, Branch};
use ort_core::rank2::{cat_qubit_pure, mpower_rank2, ort_rank2_coherent, two_fock, Rank2State};
use ort_core::roof::{ort_numeric, RoofOptions, RoofProblem, RoofSolution};
use ort_core::spec::{Family, StateSpec};
use ort_core::{DensityMatrix, Decomposition, Error, Result, StateVector, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    N,
    M,
    Both,
}

impl Measure {
    fn wants_n(self) -> bool {
        self != Measure::M
    }

    fn wants_m(self) -> bool {
        self != Measure::N
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "n" | "ort" => Ok(Measure::N),
            "m" | "mpower" => Ok(Measure::M),
            "both" | "all" => Ok(Measure::Both),
            _ => Err(Error::Parse(format!("unknown measure `{s}` (n, m or both)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Analytic,
    Numeric,
    Pure,
    /// No route for N (mixed state outside the supported classes).
    None,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Analytic => "analytic",
            Route::Numeric => "numeric",
            Route::Pure => "pure",
            Route::None => "none",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub n: Option<f64>,
    pub branch: Option<Branch>,
    pub route: Route,
    pub m: Option<f64>,
    /// Optimal quadrature angle; NaN when M came from a scalar formula.
    pub mu_star: f64,
    pub witness: Option<f64>,
    pub q_part: Option<f64>,
    pub mean_n: f64,
    pub a2_abs: f64,
    pub roof: Option<RoofSolution>,
}

impl Evaluation {
    fn empty() -> Self {
        Self {
            n: None,
            branch: None,
            route: Route::None,
            m: None,
            mu_star: f64::NAN,
            witness: None,
            q_part: None,
            mean_n: f64::NAN,
            a2_abs: f64::NAN,
            roof: None,
        }
    }

    fn set_n(&mut self, value: f64, branch: Branch, route: Route, parts: Option<(f64, f64)>) {
        self.n = Some(value);
        self.branch = Some(branch);
        self.route = route;
        if let Some((w, q)) = parts {
            self.witness = Some(w);
            self.q_part = Some(q);
        }
    }

    fn set_roof(&mut self, sol: RoofSolution, route: Route) {
        self.set_n(sol.value, sol.branch, route, Some((sol.witness_part, sol.q_part)));
        self.roof = Some(sol);
    }

    fn set_moments(&mut self, rho: &DensityMatrix) -> Result<()> {
        let e = expectations(rho)?;
        self.mean_n = e.mean_n;
        self.a2_abs = e.mean_a2.norm();
        Ok(())
    }
}

/// Evaluates the requested measures, after the dephasing channel when a
/// kernel is given.
pub fn evaluate(
    spec: &StateSpec,
    kernel: Option<&DephasingKernel>,
    measure: Measure,
    opts: &RoofOptions,
) -> Result<Evaluation> {
    match kernel {
        None => evaluate_spec(spec, measure, opts),
        Some(k) => match dephase_spec(spec, k) {
            Some(s) => evaluate_spec(&s, measure, opts),
            None => evaluate_density(&apply_dephasing(&spec.density_matrix()?, k), measure),
        },
    }
}

/// Spec of the dephased state, for the families where the channel only
/// rescales the parameters.
pub fn dephase_spec(spec: &StateSpec, kernel: &DephasingKernel) -> Option<StateSpec> {
    match *spec {
        StateSpec::Rank2 { family: Family::TwoFock { n }, p, f, chi } => {
            let k = kernel.kappa(1);
            let chi = if f * k.norm() > 0.0 { chi + k.arg() } else { 0.0 };
            Some(StateSpec::Rank2 { family: Family::TwoFock { n }, p, f: f * k.norm(), chi })
        }
        StateSpec::Rank2 { family: Family::Cat { alpha }, p, f, chi } => match kernel {
            // the cat pair is a parity pair: only odd coherences get scaled
            DephasingKernel::TwoPoint { ratio } => {
                Some(StateSpec::Rank2 { family: Family::Cat { alpha }, p, f: f * ratio, chi })
            }
            _ => None,
        },
        StateSpec::FockGap { n, m, p, f } => {
            Some(StateSpec::FockGap { n, m, p, f: f * kernel.kappa(m as i64).norm() })
        }
        StateSpec::Fock3 { pops, coh, n } => {
            let (k1, k2) = (kernel.kappa(1), kernel.kappa(2));
            // rotate the nearest-neighbor coherences back to the real axis
            let phase = if k1.norm() > 0.0 { k1 / k1.norm() } else { C64::new(1.0, 0.0) };
            let skip = k2 / (phase * phase);
            if coh[2] != 0.0 && skip.im.abs() > 1e-12 {
                return None;
            }
            Some(StateSpec::Fock3 {
                pops,
                coh: [coh[0] * k1.norm(), coh[1] * k1.norm(), coh[2] * skip.re],
                n,
            })
        }
        StateSpec::Fock { .. } => Some(spec.clone()),
        _ => None,
    }
}

fn evaluate_spec(spec: &StateSpec, measure: Measure, opts: &RoofOptions) -> Result<Evaluation> {
    match spec {
        StateSpec::Rank2 { .. } => evaluate_rank2(spec, measure),
        StateSpec::CatQubit { alpha, chi } => {
            let mut ev = match spec.pure_state() {
                Some(psi) => evaluate_pure(&psi?, measure)?,
                None => Evaluation::empty(),
            };
            if measure.wants_n() && ev.n.is_none() {
                ev.set_n(cat_qubit_pure(*alpha, *chi)?, Branch::Pure, Route::Analytic, None);
            }
            Ok(ev)
        }
        StateSpec::Fock3 { pops, coh, n } => {
            let problem = RoofProblem::fock3(*pops, *coh, *n)?;
            evaluate_roof(problem, &spec.density_matrix()?, measure, opts)
        }
        StateSpec::Cat3Mix { alpha, pops } => {
            let problem = RoofProblem::cat3(*alpha, *pops)?;
            evaluate_roof(problem, &spec.density_matrix()?, measure, opts)
        }
        StateSpec::FockGap { n, m, p, f } => {
            let rho = spec.density_matrix()?;
            if *m == 1 {
                let mut ev = m_only(&rho, measure)?;
                if measure.wants_n() {
                    let r = ort_rank2_coherent(&two_fock(*n, *p, *f)?)?;
                    ev.set_n(r.value, r.branch, Route::Analytic, None);
                }
                Ok(ev)
            } else {
                fock_gap_roof(*n, *m, &rho, measure, opts)
            }
        }
        _ => match spec.pure_state() {
            Some(psi) => evaluate_pure(&psi?, measure),
            None => evaluate_density(&spec.density_matrix()?, measure),
        },
    }
}

/// p|n+m><n+m| + (1-p)|n><n| plus coherence as a two-level roof problem.
/// For m >= 2 the basis has no <a> matrix elements, so the sampled roof is
/// exact.
pub fn fock_gap_roof(
    n: usize,
    m: usize,
    rho: &DensityMatrix,
    measure: Measure,
    opts: &RoofOptions,
) -> Result<Evaluation> {
    let dim = rho.dim().max(n + m + 3);
    let rho = rho.padded(dim);
    let problem = RoofProblem::from_basis(vec![make_fock(n + m, dim)?, make_fock(n, dim)?], &rho)?;
    evaluate_roof(problem, &rho, measure, opts)
}

fn evaluate_roof(
    problem: RoofProblem,
    rho: &DensityMatrix,
    measure: Measure,
    opts: &RoofOptions,
) -> Result<Evaluation> {
    let mut ev = m_only(rho, measure)?;
    if measure.wants_n() {
        let sol = ort_numeric(&problem, opts)?;
        let route = if sol.branch == Branch::Pure { Route::Pure } else { Route::Numeric };
        ev.set_roof(sol, route);
    }
    Ok(ev)
}

fn evaluate_pure(psi: &StateVector, measure: Measure) -> Result<Evaluation> {
    let rho = psi.outer();
    let mut ev = Evaluation::empty();
    ev.set_moments(&rho)?;
    if measure.wants_n() {
        let value = ort_pure(psi)?;
        let d = Decomposition::new(vec![(1.0, psi.clone())])?;
        let rep = decomposition_objective(&rho, &d)?;
        ev.set_n(value, Branch::Pure, Route::Pure, Some((rep.witness_part, rep.q_part)));
    }
    if measure.wants_m() {
        let mp = metrological_power(&rho)?;
        ev.m = Some(mp.value);
        ev.mu_star = mp.angle.value();
    }
    Ok(ev)
}

/// Moments, plus M when requested.
fn m_only(rho: &DensityMatrix, measure: Measure) -> Result<Evaluation> {
    let mut ev = Evaluation::empty();
    ev.set_moments(rho)?;
    if measure.wants_m() {
        let mp = metrological_power(rho)?;
        ev.m = Some(mp.value);
        ev.mu_star = mp.angle.value();
    }
    Ok(ev)
}

/// General density matrix: N only when it is pure.
fn evaluate_density(rho: &DensityMatrix, measure: Measure) -> Result<Evaluation> {
    let eig = eigendecompose(rho)?;
    if eig[0].0 >= 1.0 - 1e-12 {
        return evaluate_pure(&eig[0].1, measure);
    }
    m_only(rho, measure)
}

fn evaluate_rank2(spec: &StateSpec, measure: Measure) -> Result<Evaluation> {
    let state = spec.rank2_state().expect("rank-2 spec")?;
    let with_sources = spec.rank2_state_with_sources().transpose()?;
    let mut ev = Evaluation::empty();
    let rho = with_sources.as_ref().map(Rank2State::density_matrix).transpose()?;
    match &rho {
        Some(rho) => ev.set_moments(rho)?,
        None => {
            let p = state.p;
            ev.mean_n = p * state.pair.n1 + (1.0 - p) * state.pair.n2;
            ev.a2_abs = (p * state.pair.s1 + (1.0 - p) * state.pair.s2).abs();
        }
    }
    if measure.wants_n() {
        let r = ort_rank2_coherent(&state)?;
        let parts = RoofProblem::from_rank2(&state).ok().and_then(|problem| {
            let sp = state.p.sqrt();
            let sq = (1.0 - state.p).sqrt();
            let entries: Vec<(f64, Vec<C64>)> = r
                .recipe
                .entries
                .iter()
                .map(|&(theta, w)| (w, vec![C64::new(sp, 0.0), C64::from_polar(sq, theta)]))
                .collect();
            problem.decomposition_value(&entries).ok().map(|(_, w, q)| (w, q))
        });
        ev.set_n(r.value, r.branch, Route::Analytic, parts);
    }
    if measure.wants_m() {
        let numeric = rho.as_ref().map(metrological_power).transpose()?;
        if state.f == 0.0 {
            ev.m = Some(mpower_rank2(&state.pair, state.p)?);
            ev.mu_star = numeric.map_or(f64::NAN, |mp| mp.angle.value());
        } else {
            let mp = numeric.ok_or_else(|| {
                Error::InvalidParameter("coherent rank-2 state too large for a numeric M".into())
            })?;
            ev.m = Some(mp.value);
            ev.mu_star = mp.angle.value();
        }
    }
    Ok(ev)
}

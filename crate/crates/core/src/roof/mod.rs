//! Numerical convex roof for states of rank 2 to 4 given in a special basis:
//! the absolute value in the objective is split into two sign branches, each
//! a linear program over weights of sampled candidate states.

mod grid;
mod lp;
mod probe;
mod problem;

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::Decomposition;
use crate::measures::Branch;
use crate::C64;

pub use grid::{refine_around, sample_candidates, Candidate, CandidateFamily};
pub use lp::{solve_lp, LinearProgram, LpOutcome, Sense};
pub use probe::*;
pub use problem::RoofProblem;

/// Solver knobs.
#[derive(Clone, Debug, PartialEq)]
pub struct RoofOptions {
    /// (G_x, G_theta); `None` picks a default by rank.
    pub resolution: Option<(usize, usize)>,
    pub refine_rounds: usize,
    pub gap_tol: f64,
    pub candidate_cap: usize,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self { resolution: None, refine_rounds: 3, gap_tol: 1e-3, candidate_cap: 2_000_000 }
    }
}

impl RoofOptions {
    pub fn resolution_for(&self, rank: usize) -> (usize, usize) {
        self.resolution.unwrap_or(match rank {
            2 => (41, 64),
            3 => (21, 24),
            _ => (9, 12),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCandidate {
    pub weight: f64,
    pub candidate: Candidate,
}

#[derive(Clone, Debug)]
pub struct RoofSolution {
    /// <n> + min(L+, L-)
    pub value: f64,
    pub branch: Branch,
    pub support: Vec<WeightedCandidate>,
    pub iterations: usize,
    pub witness_part: f64,
    pub q_part: f64,
    /// Branch values including the <n> offset; infinite when infeasible.
    pub lplus: f64,
    pub lminus: f64,
    /// Best value after the initial grid and after each refinement round.
    pub history: Vec<f64>,
    pub columns: usize,
}

impl RoofSolution {
    /// Largest deviation between the weighted candidates and the target
    /// populations and coherences.
    pub fn reconstruction_error(&self, problem: &RoofProblem) -> f64 {
        let j = problem.j;
        let mut recon = vec![0.0; j * j];
        for wc in &self.support {
            let c = &wc.candidate;
            for a in 0..j {
                for b in 0..j {
                    recon[a * j + b] += wc.weight * c.x[a] * c.x[b] * (c.theta[a] - c.theta[b]).cos();
                }
            }
        }
        recon.iter().zip(&problem.targets).map(|(r, t)| (r - t).abs()).fold(0.0, f64::max)
    }

    /// Explicit pure-state decomposition, splitting each candidate evenly
    /// with its theta -> -theta partner.
    pub fn decomposition(&self, problem: &RoofProblem) -> Result<Decomposition> {
        let mut entries = Vec::new();
        for wc in &self.support {
            let c = &wc.candidate;
            if c.self_partner() {
                entries.push((wc.weight, problem.materialize(&c.x, &c.theta)?));
            } else {
                let neg: Vec<f64> = c.theta.iter().map(|t| -t).collect();
                entries.push((wc.weight / 2.0, problem.materialize(&c.x, &c.theta)?));
                entries.push((wc.weight / 2.0, problem.materialize(&c.x, &neg)?));
            }
        }
        Decomposition::new(entries)
    }

    /// `weight,x_1..x_J,theta_1..theta_J` rows behind a `#` header.
    pub fn to_csv(&self) -> String {
        let j = self.support.first().map_or(0, |w| w.candidate.x.len());
        let mut out = String::from("# weight");
        for k in 1..=j {
            let _ = write!(out, ",x{k}");
        }
        for k in 1..=j {
            let _ = write!(out, ",theta{k}");
        }
        out.push('\n');
        for wc in &self.support {
            let mut row = vec![crate::format::g12(wc.weight)];
            row.extend(wc.candidate.x.iter().map(|&v| crate::format::g12(v)));
            row.extend(wc.candidate.theta.iter().map(|&v| crate::format::g12(v)));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

struct Columns {
    rows: usize,
    a: Vec<f64>,
    abs2: Vec<f64>,
    re2: Vec<f64>,
}

fn build_columns(problem: &RoofProblem, cands: &[Candidate]) -> Columns {
    let data: Vec<(Vec<f64>, f64, f64)> =
        cands.par_iter().map(|c| grid::column(problem, c)).collect();
    let rows = data.first().map_or(0, |d| d.0.len()) + 1;
    let mut cols = Columns { rows, a: Vec::with_capacity(rows * data.len()), abs2: Vec::new(), re2: Vec::new() };
    for (coeffs, abs2, re2) in data {
        cols.a.extend_from_slice(&coeffs);
        cols.a.push(re2);
        cols.abs2.push(abs2);
        cols.re2.push(re2);
    }
    cols
}

/// The branch LP: equality rows for populations, coherences and
/// normalization, plus the sign condition on sum q Re z^2.
pub fn build_lp(problem: &RoofProblem, cands: &[Candidate], branch: Branch) -> Result<LinearProgram> {
    if !matches!(branch, Branch::LPlus | Branch::LMinus) {
        return Err(Error::InvalidParameter(format!("{} is not an LP branch", branch.name())));
    }
    Ok(assemble(problem, &build_columns(problem, cands), branch))
}

fn assemble(problem: &RoofProblem, cols: &Columns, branch: Branch) -> LinearProgram {
    let j = problem.j;
    let mut b = Vec::with_capacity(cols.rows);
    for a in 0..j {
        b.push(problem.population(a));
    }
    for a in 0..j {
        for c in a + 1..j {
            b.push(problem.coherence(a, c));
        }
    }
    b.push(1.0);
    b.push(problem.s);
    let mut senses = vec![Sense::Eq; cols.rows];
    let plus = branch == Branch::LPlus;
    senses[cols.rows - 1] = if plus { Sense::Le } else { Sense::Ge };
    let sign = if plus { -1.0 } else { 1.0 };
    let c = cols.abs2.iter().zip(&cols.re2).map(|(a, r)| -a + sign * r).collect();
    LinearProgram { rows: cols.rows, a: cols.a.clone(), b, senses, c }
}

struct BranchOutcome {
    /// LP optimum plus the branch constant; +inf when infeasible.
    value: f64,
    weights: Vec<(usize, f64)>,
    iterations: usize,
}

fn solve_branch(problem: &RoofProblem, cols: &Columns, branch: Branch) -> Result<BranchOutcome> {
    let lp = assemble(problem, cols, branch);
    let constant = if branch == Branch::LPlus { problem.s } else { -problem.s };
    match solve_lp(&lp)? {
        LpOutcome::Optimal { x, value, iterations } => {
            Ok(BranchOutcome { value: value + constant, weights: x, iterations })
        }
        LpOutcome::Infeasible => {
            Ok(BranchOutcome { value: f64::INFINITY, weights: Vec::new(), iterations: 0 })
        }
    }
}

/// Eigenvectors of the target matrix as candidates; with their eigenvalues
/// as weights they satisfy every equality row exactly.
fn anchors(problem: &RoofProblem) -> Vec<Candidate> {
    problem
        .target_eigen()
        .into_iter()
        .filter(|(l, _)| *l > 1e-14)
        .map(|(_, v)| {
            let x = v.iter().map(|c| c.abs()).collect();
            let theta = v.iter().map(|&c| if c < 0.0 { PI } else { 0.0 }).collect();
            Candidate::new(x, theta)
        })
        .collect()
}

fn pure_solution(problem: &RoofProblem, v: &[f64]) -> RoofSolution {
    let amps: Vec<C64> = v.iter().map(|&c| C64::new(c, 0.0)).collect();
    let z = problem.z_of(&amps);
    let q_part = problem.mean_n - z.norm_sqr();
    let witness = (C64::new(problem.s, 0.0) - z * z).norm();
    let value = q_part + witness;
    let plus = problem.s - (z * z).re >= 0.0;
    let x = v.iter().map(|c| c.abs()).collect();
    let theta = v.iter().map(|&c| if c < 0.0 { PI } else { 0.0 }).collect();
    RoofSolution {
        value,
        branch: if plus { Branch::LPlus } else { Branch::LMinus },
        support: vec![WeightedCandidate { weight: 1.0, candidate: Candidate::new(x, theta) }],
        iterations: 0,
        witness_part: witness,
        q_part,
        lplus: if plus { value } else { f64::INFINITY },
        lminus: if plus { f64::INFINITY } else { value },
        history: vec![value],
        columns: 1,
    }
}

/// Upper bound on the measure from the sampled roof, refined locally around
/// the support of each solution.
pub fn ort_numeric(problem: &RoofProblem, options: &RoofOptions) -> Result<RoofSolution> {
    let eig = problem.target_eigen();
    if eig[0].0 >= 1.0 - 1e-12 {
        return Ok(pure_solution(problem, &eig[0].1));
    }
    let (gx, gt) = options.resolution_for(problem.j);
    let mut cands = sample_candidates(problem.j, gx, gt, options.candidate_cap)?.candidates;
    cands.extend(anchors(problem));
    let mut du = 1.0 / (gx - 1) as f64;
    let mut dtheta = 2.0 * PI / gt as f64;
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut cols = build_columns(problem, &cands);
    loop {
        let (plus, minus) = rayon::join(
            || solve_branch(problem, &cols, Branch::LPlus),
            || solve_branch(problem, &cols, Branch::LMinus),
        );
        let (plus, minus) = (plus?, minus?);
        iterations += plus.iterations + minus.iterations;
        let best = plus.value.min(minus.value);
        if !best.is_finite() {
            return Err(Error::ConditionViolation("both sign branches infeasible".into()));
        }
        let improved = history.last().is_none_or(|&prev: &f64| prev - best >= 1e-7);
        history.push(best);
        let round = history.len() - 1;
        if round >= options.refine_rounds || !improved {
            return Ok(finish(problem, &cands, &cols, plus, minus, iterations, history));
        }
        let mut fresh = Vec::new();
        for (i, _) in plus.weights.iter().chain(&minus.weights) {
            fresh.extend(refine_around(&cands[*i], du, dtheta));
        }
        du /= 2.0;
        dtheta /= 2.0;
        let extra = build_columns(problem, &fresh);
        cols.a.extend_from_slice(&extra.a);
        cols.abs2.extend_from_slice(&extra.abs2);
        cols.re2.extend_from_slice(&extra.re2);
        cands.extend(fresh);
    }
}

fn finish(
    problem: &RoofProblem,
    cands: &[Candidate],
    cols: &Columns,
    plus: BranchOutcome,
    minus: BranchOutcome,
    iterations: usize,
    history: Vec<f64>,
) -> RoofSolution {
    let (branch, chosen) = if plus.value <= minus.value {
        (Branch::LPlus, &plus)
    } else {
        (Branch::LMinus, &minus)
    };
    let total: f64 = chosen.weights.iter().map(|w| w.1).sum();
    let support: Vec<WeightedCandidate> = chosen
        .weights
        .iter()
        .map(|&(i, w)| WeightedCandidate { weight: w / total, candidate: cands[i].clone() })
        .collect();
    let abs2: f64 = chosen.weights.iter().map(|&(i, w)| w * cols.abs2[i]).sum::<f64>() / total;
    let re2: f64 = chosen.weights.iter().map(|&(i, w)| w * cols.re2[i]).sum::<f64>() / total;
    let q_part = problem.mean_n - abs2;
    let witness_part = (problem.s - re2).abs();
    RoofSolution {
        value: problem.mean_n + chosen.value,
        branch,
        support,
        iterations,
        witness_part,
        q_part,
        lplus: problem.mean_n + plus.value,
        lminus: problem.mean_n + minus.value,
        history,
        columns: cands.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::decomposition_objective;
    use crate::rank2::{cat_mixture, level_skip, sv_mixture, two_fock};

    fn roof(state: &crate::rank2::Rank2State) -> RoofSolution {
        ort_numeric(&RoofProblem::from_rank2(state).unwrap(), &RoofOptions::default()).unwrap()
    }

    #[test]
    fn two_fock_incoherent() {
        let s = two_fock(0, 0.5, 0.0).unwrap();
        let sol = roof(&s);
        assert!((sol.value - 0.25).abs() < 1e-9, "{}", sol.value);
        assert!(sol.reconstruction_error(&RoofProblem::from_rank2(&s).unwrap()) < 1e-9);
    }

    #[test]
    fn rank2_families_within_gap() {
        let cases = [
            two_fock(3, 0.3, 0.2).unwrap(),
            two_fock(1, 0.6, 0.9).unwrap(),
            cat_mixture(0.5, 0.5, 0.0).unwrap(),
            cat_mixture(0.5, 0.3, 0.5).unwrap(),
            sv_mixture(0.1, 0.0, 0.5).unwrap(),
            level_skip(1, 0.75f64.sqrt(), 0.5).unwrap(),
        ];
        for s in &cases {
            let exact = s.ort().unwrap().value;
            let sol = roof(s);
            assert!(sol.value >= exact - 1e-9, "{s:?}: {} < {exact}", sol.value);
            assert!(sol.value <= exact + 1e-3, "{s:?}: {} vs {exact}", sol.value);
            for w in sol.history.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn decomposition_certifies_value() {
        let pr = RoofProblem::fock3([0.4, 0.4, 0.2], [0.2, 0.6, 0.0], 0).unwrap();
        let sol = ort_numeric(&pr, &RoofOptions::default()).unwrap();
        let rho = crate::spec::fock3_density([0.4, 0.4, 0.2], [0.2, 0.6, 0.0], 0).unwrap();
        let d = sol.decomposition(&pr).unwrap();
        let direct = decomposition_objective(&rho, &d);
        // the grid reproduces rho only up to the LP tolerance
        assert!(sol.reconstruction_error(&pr) < 1e-6);
        if let Ok(rep) = direct {
            assert!((rep.value - sol.value).abs() < 1e-6);
        }
        assert!((sol.value - 0.511).abs() < 5e-3, "{}", sol.value);
    }

    #[test]
    fn pure_limit() {
        let pr = RoofProblem::fock3([1.0 / 3.0; 3], [1.0; 3], 0).unwrap();
        let sol = ort_numeric(&pr, &RoofOptions::default()).unwrap();
        let psi = pr.materialize(&[1.0 / 3f64.sqrt(); 3], &[0.0; 3]).unwrap();
        let exact = crate::measures::ort_pure(&psi).unwrap();
        assert!((sol.value - exact).abs() < 1e-12);
    }

    #[test]
    fn lp_branch_rows() {
        let pr = RoofProblem::from_rank2(&two_fock(0, 0.3, 0.4).unwrap()).unwrap();
        let fam = sample_candidates(2, 5, 4, 1000).unwrap();
        let lp = build_lp(&pr, &fam.candidates, Branch::LMinus).unwrap();
        assert_eq!(lp.rows, 2 + 1 + 1 + 1);
        assert_eq!(lp.b[2], 0.4 * 0.21f64.sqrt());
        assert_eq!(lp.senses[4], Sense::Ge);
        assert!(build_lp(&pr, &fam.candidates, Branch::Pure).is_err());
    }
}

//! Dense revised simplex for programs with a handful of rows and many
//! columns: min c^T q subject to A q (=, <=, >=) b, q >= 0.

use rayon::prelude::*;

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;
const PAR_THRESHOLD: usize = 16_384;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

/// Column-major LP; column `j` occupies `a[j * rows .. (j + 1) * rows]`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub rows: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub senses: Vec<Sense>,
    pub c: Vec<f64>,
}

impl LinearProgram {
    pub fn new(rows: usize, b: Vec<f64>, senses: Vec<Sense>) -> Self {
        assert_eq!(b.len(), rows);
        assert_eq!(senses.len(), rows);
        Self { rows, a: Vec::new(), b, senses, c: Vec::new() }
    }

    pub fn push_column(&mut self, coeffs: &[f64], cost: f64) {
        assert_eq!(coeffs.len(), self.rows);
        self.a.extend_from_slice(coeffs);
        self.c.push(cost);
    }

    pub fn cols(&self) -> usize {
        self.c.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal {
        /// Nonzero structural variables as (column, value).
        x: Vec<(usize, f64)>,
        value: f64,
        iterations: usize,
    },
    Infeasible,
}

impl LpOutcome {
    pub fn value(&self) -> f64 {
        match self {
            LpOutcome::Optimal { value, .. } => *value,
            LpOutcome::Infeasible => f64::INFINITY,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural(usize),
    Slack(usize),
    Artificial(usize),
}

struct Solver<'a> {
    lp: &'a LinearProgram,
    m: usize,
    n: usize,
    /// +1 or -1 per row so that the working right-hand side is non-negative
    sign: Vec<f64>,
    b: Vec<f64>,
    /// slack index -> row, and its coefficient before the row sign
    slacks: Vec<(usize, f64)>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
}

impl<'a> Solver<'a> {
    fn new(lp: &'a LinearProgram) -> Self {
        let m = lp.rows;
        let n = lp.cols();
        let sign: Vec<f64> = lp.b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let b = lp.b.iter().zip(&sign).map(|(v, s)| v * s).collect();
        let slacks = lp
            .senses
            .iter()
            .enumerate()
            .filter_map(|(r, s)| match s {
                Sense::Eq => None,
                Sense::Le => Some((r, 1.0)),
                Sense::Ge => Some((r, -1.0)),
            })
            .collect::<Vec<_>>();
        let total = n + slacks.len();
        let basis = (0..m).map(|r| total + r).collect();
        let mut binv = vec![0.0; m * m];
        for r in 0..m {
            binv[r * m + r] = 1.0;
        }
        Self {
            lp,
            m,
            n,
            sign,
            b,
            slacks,
            basis,
            binv,
            iterations: 0,
            max_iterations: 200 * (m + 10) + 20 * n.min(50_000),
        }
    }

    fn kind(&self, j: usize) -> Kind {
        let ns = self.slacks.len();
        if j < self.n {
            Kind::Structural(j)
        } else if j < self.n + ns {
            Kind::Slack(j - self.n)
        } else {
            Kind::Artificial(j - self.n - ns)
        }
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match self.kind(j) {
            Kind::Structural(j) => {
                let col = &self.lp.a[j * self.m..(j + 1) * self.m];
                for r in 0..self.m {
                    out[r] = col[r] * self.sign[r];
                }
            }
            Kind::Slack(s) => {
                let (r, v) = self.slacks[s];
                out[r] = v * self.sign[r];
            }
            Kind::Artificial(r) => out[r] = 1.0,
        }
    }

    fn cost(&self, j: usize, phase_one: bool) -> f64 {
        match (self.kind(j), phase_one) {
            (Kind::Artificial(_), true) => 1.0,
            (_, true) => 0.0,
            (Kind::Structural(j), false) => self.lp.c[j],
            _ => 0.0,
        }
    }

    /// Rebuilds B^{-1} by Gauss-Jordan elimination with partial pivoting.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut bmat = vec![0.0; m * m];
        let mut col = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            for r in 0..m {
                bmat[r * m + k] = col[r];
            }
        }
        let mut inv = vec![0.0; m * m];
        for r in 0..m {
            inv[r * m + r] = 1.0;
        }
        for k in 0..m {
            let piv = (k..m)
                .max_by(|&x, &y| bmat[x * m + k].abs().total_cmp(&bmat[y * m + k].abs()))
                .unwrap();
            if bmat[piv * m + k].abs() < 1e-13 {
                return Err(Error::NumericalStall(self.iterations));
            }
            if piv != k {
                for c in 0..m {
                    bmat.swap(k * m + c, piv * m + c);
                    inv.swap(k * m + c, piv * m + c);
                }
            }
            let d = bmat[k * m + k];
            for c in 0..m {
                bmat[k * m + c] /= d;
                inv[k * m + c] /= d;
            }
            for r in 0..m {
                if r != k {
                    let f = bmat[r * m + k];
                    if f != 0.0 {
                        for c in 0..m {
                            bmat[r * m + c] -= f * bmat[k * m + c];
                            inv[r * m + c] -= f * inv[k * m + c];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        Ok(())
    }

    fn basic_values(&self) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|r| (0..m).map(|k| self.binv[r * m + k] * self.b[k]).sum())
            .collect()
    }

    fn ftran(&self, col: &[f64]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|r| (0..m).map(|k| self.binv[r * m + k] * col[k]).sum())
            .collect()
    }

    fn reduced_cost(&self, j: usize, duals: &[f64], phase_one: bool) -> f64 {
        let m = self.m;
        let dot: f64 = match self.kind(j) {
            Kind::Structural(j) => {
                let col = &self.lp.a[j * m..(j + 1) * m];
                (0..m).map(|r| duals[r] * col[r] * self.sign[r]).sum()
            }
            Kind::Slack(s) => {
                let (r, v) = self.slacks[s];
                duals[r] * v * self.sign[r]
            }
            Kind::Artificial(r) => duals[r],
        };
        self.cost(j, phase_one) - dot
    }

    /// Entering column, or `None` at optimality.
    fn price(&self, duals: &[f64], phase_one: bool, bland: bool, in_basis: &[bool]) -> Option<usize> {
        let allowed = self.n + self.slacks.len() + if phase_one { self.m } else { 0 };
        let candidate = |j: usize| -> Option<(usize, f64)> {
            if in_basis[j] {
                return None;
            }
            let d = self.reduced_cost(j, duals, phase_one);
            (d < -OPT_TOL).then_some((j, d))
        };
        if bland {
            return (0..allowed).find_map(candidate).map(|(j, _)| j);
        }
        let better = |a: Option<(usize, f64)>, b: Option<(usize, f64)>| match (a, b) {
            (Some(x), Some(y)) => {
                if y.1 < x.1 || (y.1 == x.1 && y.0 < x.0) {
                    Some(y)
                } else {
                    Some(x)
                }
            }
            (x, None) => x,
            (None, y) => y,
        };
        let best = if allowed > PAR_THRESHOLD {
            (0..allowed)
                .into_par_iter()
                .map(candidate)
                .reduce(|| None, better)
        } else {
            (0..allowed).map(candidate).fold(None, better)
        };
        best.map(|(j, _)| j)
    }

    fn run(&mut self, phase_one: bool) -> Result<bool> {
        let m = self.m;
        let total = self.n + self.slacks.len() + m;
        let mut degenerate = 0usize;
        let mut col = vec![0.0; m];
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::NumericalStall(self.iterations));
            }
            self.refactor()?;
            let xb = self.basic_values();
            let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost(j, phase_one)).collect();
            let duals: Vec<f64> = (0..m)
                .map(|k| (0..m).map(|r| cb[r] * self.binv[r * m + k]).sum())
                .collect();
            let mut in_basis = vec![false; total];
            for &j in &self.basis {
                in_basis[j] = true;
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let Some(q) = self.price(&duals, phase_one, bland, &in_basis) else {
                return Ok(true);
            };
            self.column(q, &mut col);
            let u = self.ftran(&col);
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                if u[r] > PIVOT_TOL {
                    let ratio = xb[r].max(0.0) / u[r];
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            let tie = (ratio - lratio).abs() <= 1e-12 * lratio.max(1.0);
                            let take = if tie {
                                if bland {
                                    self.basis[r] < self.basis[lr]
                                } else {
                                    u[r] > u[lr]
                                }
                            } else {
                                ratio < lratio
                            };
                            if take { Some((r, ratio)) } else { Some((lr, lratio)) }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else {
                return if phase_one { Err(Error::NumericalStall(self.iterations)) } else { Err(Error::Unbounded) };
            };
            degenerate = if ratio <= 1e-12 { degenerate + 1 } else { 0 };
            self.basis[r] = q;
            self.iterations += 1;
        }
    }

    /// Pivots basic artificials out wherever a structural or slack column
    /// has a nonzero entry in their row; rows where none does are redundant
    /// and keep their artificial at zero.
    fn expel_artificials(&mut self) -> Result<()> {
        let m = self.m;
        let real = self.n + self.slacks.len();
        let mut col = vec![0.0; m];
        for r in 0..m {
            if !matches!(self.kind(self.basis[r]), Kind::Artificial(_)) {
                continue;
            }
            self.refactor()?;
            let mut in_basis = vec![false; real];
            for &j in &self.basis {
                if j < real {
                    in_basis[j] = true;
                }
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..real {
                if in_basis[j] {
                    continue;
                }
                self.column(j, &mut col);
                let v: f64 = (0..m).map(|k| self.binv[r * m + k] * col[k]).sum();
                if v.abs() > PIVOT_TOL && best.is_none_or(|(_, b)| v.abs() > b) {
                    best = Some((j, v.abs()));
                }
            }
            if let Some((j, _)) = best {
                self.basis[r] = j;
            }
        }
        self.refactor()
    }
}

/// Solves the program; an empty feasible set is reported as `Infeasible`.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    let mut s = Solver::new(lp);
    s.run(true)?;
    let xb = s.basic_values();
    let infeas: f64 = s
        .basis
        .iter()
        .zip(&xb)
        .filter(|(j, _)| matches!(s.kind(**j), Kind::Artificial(_)))
        .map(|(_, v)| v.max(0.0))
        .sum();
    let scale = s.b.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if infeas > FEAS_TOL * scale {
        return Ok(LpOutcome::Infeasible);
    }
    s.expel_artificials()?;
    s.run(false)?;
    let xb = s.basic_values();
    let mut x: Vec<(usize, f64)> = s
        .basis
        .iter()
        .zip(&xb)
        .filter_map(|(&j, &v)| match s.kind(j) {
            Kind::Structural(j) if v > 0.0 => Some((j, v)),
            _ => None,
        })
        .collect();
    x.sort_by_key(|e| e.0);
    let value = x.iter().map(|&(j, v)| lp.c[j] * v).sum();
    Ok(LpOutcome::Optimal { x, value, iterations: s.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_equality() {
        let mut lp = LinearProgram::new(1, vec![1.0], vec![Sense::Eq]);
        lp.push_column(&[1.0], -1.0);
        lp.push_column(&[1.0], 0.0);
        match solve_lp(&lp).unwrap() {
            LpOutcome::Optimal { x, value, .. } => {
                assert_eq!(value, -1.0);
                assert_eq!(x, vec![(0, 1.0)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LinearProgram::new(2, vec![1.0, 2.0], vec![Sense::Eq, Sense::Le]);
        lp.push_column(&[1.0, 3.0], 0.0);
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn redundant_rows_and_duplicates() {
        // q1 + q2 + q3 = 1 stated twice, q1 - q3 >= 0.2
        let mut lp = LinearProgram::new(3, vec![1.0, 1.0, 0.2], vec![Sense::Eq, Sense::Eq, Sense::Ge]);
        lp.push_column(&[1.0, 1.0, 1.0], 2.0);
        lp.push_column(&[1.0, 1.0, 0.0], 1.0);
        lp.push_column(&[1.0, 1.0, 0.0], 1.0);
        lp.push_column(&[1.0, 1.0, -1.0], 0.0);
        let v = solve_lp(&lp).unwrap().value();
        // q1 = 0.6, q4 = 0.4
        assert!((v - 1.2).abs() < 1e-12);
    }

    #[test]
    fn classic_lp() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = LinearProgram::new(
            3,
            vec![4.0, 12.0, 18.0],
            vec![Sense::Le, Sense::Le, Sense::Le],
        );
        lp.push_column(&[1.0, 0.0, 3.0], -3.0);
        lp.push_column(&[0.0, 2.0, 2.0], -5.0);
        assert!((solve_lp(&lp).unwrap().value() + 36.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(1, vec![1.0], vec![Sense::Ge]);
        lp.push_column(&[1.0], -1.0);
        assert_eq!(solve_lp(&lp), Err(Error::Unbounded));
    }

    #[test]
    fn negative_rhs() {
        // -q1 - q2 = -1, min q1 + 2 q2
        let mut lp = LinearProgram::new(1, vec![-1.0], vec![Sense::Eq]);
        lp.push_column(&[-1.0], 1.0);
        lp.push_column(&[-1.0], 2.0);
        assert!((solve_lp(&lp).unwrap().value() - 1.0).abs() < 1e-15);
    }
}

//! Candidate pure states sum_j x_j e^{i theta_j} psi_j on a product grid.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::problem::RoofProblem;
use crate::error::{Error, Result};
use crate::C64;

/// One candidate; it stands for itself together with its theta -> -theta
/// partner at equal weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub x: Vec<f64>,
    /// theta[0] = 0
    pub theta: Vec<f64>,
}

impl Candidate {
    pub fn new(x: Vec<f64>, theta: Vec<f64>) -> Self {
        let t0 = theta[0];
        let theta = theta.iter().map(|t| super::problem::fold(t - t0)).collect();
        Self { x, theta }
    }

    pub fn amplitudes(&self) -> Vec<C64> {
        self.x.iter().zip(&self.theta).map(|(&x, &t)| C64::from_polar(x, t)).collect()
    }

    /// Amplitudes of the theta -> -theta partner.
    pub fn partner_amplitudes(&self) -> Vec<C64> {
        self.x.iter().zip(&self.theta).map(|(&x, &t)| C64::from_polar(x, -t)).collect()
    }

    /// True when the partner is the same state.
    pub fn self_partner(&self) -> bool {
        self.x.iter().zip(&self.theta).all(|(&x, &t)| {
            x == 0.0 || (t.sin()).abs() < 1e-14
        })
    }
}

/// Grid of canonical candidates (one per symmetric pair).
#[derive(Clone, Debug)]
pub struct CandidateFamily {
    pub rank: usize,
    pub candidates: Vec<Candidate>,
    /// Product-grid size before pairing.
    pub grid_size: usize,
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Compositions of `total` into `parts` non-negative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Lattice x_j^2 = k_j / (G_x - 1) on the positive orthant of the sphere and
/// theta_j = 2 pi i_j / G_theta, keeping one member of each symmetric pair.
pub fn sample_candidates(rank: usize, g_x: usize, g_theta: usize, cap: usize) -> Result<CandidateFamily> {
    if !(2..=4).contains(&rank) {
        return Err(Error::InvalidParameter(format!("rank {rank} outside 2..=4")));
    }
    if g_x < 2 || g_theta < 1 {
        return Err(Error::InvalidParameter(format!("resolution ({g_x}, {g_theta}) too small")));
    }
    let lattice = binom(g_x - 1 + rank - 1, rank - 1);
    let grid_size = lattice.saturating_mul(g_theta.saturating_pow(rank as u32 - 1));
    if grid_size > cap {
        return Err(Error::GridTooLarge { size: grid_size, cap });
    }
    let steps = g_x - 1;
    let free = rank - 1;
    let angle_sets: Vec<Vec<usize>> = (0..g_theta.pow(free as u32))
        .map(|mut code| {
            (0..free)
                .map(|_| {
                    let i = code % g_theta;
                    code /= g_theta;
                    i
                })
                .collect()
        })
        .collect();
    let candidates = compositions(steps, rank)
        .into_par_iter()
        .flat_map_iter(|ks| {
            let x: Vec<f64> = ks.iter().map(|&k| (k as f64 / steps as f64).sqrt()).collect();
            let mut local = Vec::new();
            for idx in &angle_sets {
                // angles of empty components are irrelevant; pin them to 0
                if idx.iter().zip(&ks[1..]).any(|(&i, &k)| k == 0 && i != 0) {
                    continue;
                }
                // likewise the global phase when x_0 = 0
                if ks[0] == 0 {
                    if let Some(first) = ks[1..].iter().position(|&k| k > 0) {
                        if idx[first] != 0 {
                            continue;
                        }
                    }
                }
                let partner: Vec<usize> = idx.iter().map(|&i| (g_theta - i) % g_theta).collect();
                if partner < *idx {
                    continue;
                }
                let mut theta = vec![0.0];
                theta.extend(idx.iter().map(|&i| 2.0 * PI * i as f64 / g_theta as f64));
                local.push(Candidate { x: x.clone(), theta });
            }
            local
        })
        .collect();
    Ok(CandidateFamily { rank, candidates, grid_size })
}

/// Points within one cell of `c` at half spacing in every coordinate:
/// x_j^2 for j >= 1 (x_0 absorbs the remainder) and theta_j for j >= 1.
pub fn refine_around(c: &Candidate, du: f64, dtheta: f64) -> Vec<Candidate> {
    let rank = c.x.len();
    let offsets = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let dims = 2 * (rank - 1);
    let mut out = Vec::new();
    let total = offsets.len().pow(dims as u32);
    let u: Vec<f64> = c.x.iter().map(|x| x * x).collect();
    'outer: for mut code in 0..total {
        let mut nu = u.clone();
        let mut nt = c.theta.clone();
        for d in 0..dims {
            let o = offsets[code % offsets.len()];
            code /= offsets.len();
            if d < rank - 1 {
                nu[d + 1] += o * du;
            } else {
                nt[d + 2 - rank] += o * dtheta;
            }
        }
        nu[0] = 1.0 - nu[1..].iter().sum::<f64>();
        for v in nu.iter_mut() {
            if *v < -1e-15 {
                continue 'outer;
            }
            *v = v.max(0.0);
        }
        out.push(Candidate::new(nu.iter().map(|v| v.sqrt()).collect(), nt));
    }
    out
}

/// Column data for a candidate: constraint coefficients (populations,
/// coherences, normalization) plus |z|^2 and Re z^2.
pub(crate) fn column(problem: &RoofProblem, c: &Candidate) -> (Vec<f64>, f64, f64) {
    let j = problem.j;
    let mut coeffs = Vec::with_capacity(j + j * (j - 1) / 2 + 1);
    for a in 0..j {
        coeffs.push(c.x[a] * c.x[a]);
    }
    for a in 0..j {
        for b in a + 1..j {
            coeffs.push(c.x[a] * c.x[b] * (c.theta[a] - c.theta[b]).cos());
        }
    }
    coeffs.push(1.0);
    let z = problem.z_of(&c.amplitudes());
    (coeffs, z.norm_sqr(), (z * z).re)
}

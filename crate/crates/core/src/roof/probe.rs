//! Closed-form decomposition families evaluated against the objective; each
//! gives an upper bound on the measure independent of the LP.

use std::f64::consts::PI;

use super::problem::RoofProblem;
use crate::error::{Error, Result};
use crate::roots::golden_min;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeValue {
    pub value: f64,
    pub witness_part: f64,
    pub q_part: f64,
    /// Optimized mixing parameter for the U and L families.
    pub q: Option<f64>,
}

fn evaluate(problem: &RoofProblem, parts: &[(f64, Vec<C64>)], q: Option<f64>) -> Result<ProbeValue> {
    let (value, witness_part, q_part) = problem.decomposition_value(parts)?;
    Ok(ProbeValue { value, witness_part, q_part, q })
}

/// Four states sqrt(p2)|n+2> + e^{i t} sqrt(p1)|n+1> + e^{2 i t} sqrt(p0)|n>
/// with t = +-arccos(f +- sqrt(2 - 4f^2)/2), weight 1/4 each, for the state
/// with equal nearest-neighbor coherence f and no skip coherence.
pub fn four_angle_fock(pops: [f64; 3], f: f64, n: usize) -> Result<ProbeValue> {
    if !(0.0..=0.5f64.sqrt() + 1e-12).contains(&f) {
        return Err(Error::InvalidRecipeParameter(format!("f = {f} outside [0, 1/sqrt(2)]")));
    }
    let f = f.min(0.5f64.sqrt());
    let problem = RoofProblem::fock3(pops, [f, f, 0.0], n)?;
    let h = 0.5 * (2.0 - 4.0 * f * f).max(0.0).sqrt();
    let [p2, p1, p0] = pops;
    let mut parts = Vec::with_capacity(4);
    for c in [f + h, f - h] {
        let t = c.clamp(-1.0, 1.0).acos();
        for s in [t, -t] {
            parts.push((
                0.25,
                vec![
                    C64::new(p2.sqrt(), 0.0),
                    C64::from_polar(p1.sqrt(), s),
                    C64::from_polar(p0.sqrt(), 2.0 * s),
                ],
            ));
        }
    }
    evaluate(&problem, &parts, None)
}

/// Value of the objective on the population-only optimum for three
/// neighboring Fock levels, valid under the known population conditions.
pub fn incoherent_fock_value(pops: [f64; 3], n: usize) -> f64 {
    let [p2, p1, p0] = pops;
    let nf = n as f64;
    let mean_n = p2 * (nf + 2.0) + p1 * (nf + 1.0) + p0 * nf;
    mean_n - ((p2 * p1 * (nf + 2.0)).sqrt() + (p1 * p0 * (nf + 1.0)).sqrt()).powi(2)
}

/// Decomposition families for mixtures of the three cat3 states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cat3Recipe {
    /// Three mu-twisted states with weight 1/3.
    T,
    /// Twisted cat3_1/cat3_2 part at weight q plus a pure cat3_0 remainder;
    /// `None` minimizes over q.
    U(Option<f64>),
    /// Twisted cat3_0/cat3_2 part at weight q' plus a pure cat3_1 remainder.
    L(Option<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cat3Region {
    T,
    U,
    L,
}

impl Cat3Region {
    pub fn name(self) -> &'static str {
        match self {
            Cat3Region::T => "T",
            Cat3Region::U => "U",
            Cat3Region::L => "L",
        }
    }
}

fn twist(k: usize, j: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (k * j % 3) as f64 / 3.0)
}

/// `lead` carries the untwisted component at amplitude sqrt(1-q);
/// (a, b) share sqrt(q) in proportion to their populations and pick up
/// mu^j and mu^{2j}.
fn two_plus_one(pops: [f64; 3], lead: usize, a: usize, b: usize, q: f64) -> Vec<(f64, Vec<C64>)> {
    let share = pops[a] + pops[b];
    let mut parts = Vec::with_capacity(4);
    for j in 0..3 {
        let mut amps = vec![C64::new(0.0, 0.0); 3];
        amps[lead] = C64::new((1.0 - q).max(0.0).sqrt(), 0.0);
        amps[a] = twist(1, j) * (q * pops[a] / share).sqrt();
        amps[b] = twist(2, j) * (q * pops[b] / share).sqrt();
        parts.push((share / (3.0 * q), amps));
    }
    let rest = 1.0 - share / q;
    if rest > 0.0 {
        let mut amps = vec![C64::new(0.0, 0.0); 3];
        amps[lead] = C64::new(1.0, 0.0);
        parts.push((rest, amps));
    }
    parts
}

/// Objective of a cat3 recipe for p0|cat3_0> + p1|cat3_1> + p2|cat3_2>.
pub fn cat3_probe(alpha: f64, pops: [f64; 3], recipe: Cat3Recipe) -> Result<ProbeValue> {
    let problem = RoofProblem::cat3(alpha, pops)?;
    cat3_probe_on(&problem, pops, recipe)
}

fn cat3_probe_on(problem: &RoofProblem, pops: [f64; 3], recipe: Cat3Recipe) -> Result<ProbeValue> {
    let (lead, a, b, fixed) = match recipe {
        Cat3Recipe::T => {
            let parts: Vec<(f64, Vec<C64>)> = (0..3)
                .map(|j| {
                    let amps = (0..3).map(|k| twist(k, j) * pops[k].sqrt()).collect();
                    (1.0 / 3.0, amps)
                })
                .collect();
            return evaluate(problem, &parts, None);
        }
        Cat3Recipe::U(q) => (0, 1, 2, q),
        Cat3Recipe::L(q) => (1, 0, 2, q),
    };
    let lo = pops[a] + pops[b];
    if lo <= 1e-15 {
        // the recipe collapses onto the pure remainder state
        return cat3_probe_on(problem, pops, Cat3Recipe::T).map(|v| ProbeValue { q: Some(1.0), ..v });
    }
    let at = |q: f64| evaluate(problem, &two_plus_one(pops, lead, a, b, q), Some(q));
    match fixed {
        Some(q) if !(lo - 1e-12..=1.0).contains(&q) => Err(Error::InvalidRecipeParameter(format!(
            "q = {q} outside [{lo}, 1]"
        ))),
        Some(q) => at(q.max(lo)),
        None => {
            let (q, _) = golden_min(lo, 1.0, 1e-10, |q| at(q).map_or(f64::INFINITY, |v| v.value));
            at(q)
        }
    }
}

/// Least of the three families; T is reported when neither optimized
/// family improves on it by more than 1e-9 (both contain T at their
/// lower endpoint).
pub fn classify_cat3(alpha: f64, pops: [f64; 3]) -> Result<(Cat3Region, ProbeValue)> {
    let problem = RoofProblem::cat3(alpha, pops)?;
    let t = cat3_probe_on(&problem, pops, Cat3Recipe::T)?;
    let u = cat3_probe_on(&problem, pops, Cat3Recipe::U(None))?;
    let l = cat3_probe_on(&problem, pops, Cat3Recipe::L(None))?;
    let best = if u.value <= l.value { (Cat3Region::U, u) } else { (Cat3Region::L, l) };
    if best.1.value > t.value - 1e-9 {
        Ok((Cat3Region::T, t))
    } else {
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_angle_saturates_incoherent_value() {
        let pops = [0.4, 0.4, 0.2];
        let target = incoherent_fock_value(pops, 0);
        assert!((target - 0.48).abs() < 1e-12);
        for f in [0.0, 0.2, 0.5, 0.5f64.sqrt()] {
            let v = four_angle_fock(pops, f, 0).unwrap();
            assert!((v.value - target).abs() < 1e-10, "f={f}: {}", v.value);
        }
        assert!(matches!(four_angle_fock(pops, 0.8, 0), Err(Error::InvalidRecipeParameter(_))));
    }

    #[test]
    fn four_angle_zero_coherence_angles() {
        // f = 0: cos t = +-1/sqrt(2)
        let h = 0.5 * 2f64.sqrt();
        assert!(((h).acos() - PI / 4.0).abs() < 1e-15);
        assert!(((-h).acos() - 3.0 * PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn cat3_families_bound_each_other() {
        let pops = [1.0 / 3.0; 3];
        let t = cat3_probe(0.5, pops, Cat3Recipe::T).unwrap();
        let u = cat3_probe(0.5, pops, Cat3Recipe::U(None)).unwrap();
        let l = cat3_probe(0.5, pops, Cat3Recipe::L(None)).unwrap();
        assert!(u.value <= t.value + 1e-12 && l.value <= t.value + 1e-12);
        // q at its lower endpoint reproduces T
        let u0 = cat3_probe(0.5, pops, Cat3Recipe::U(Some(2.0 / 3.0))).unwrap();
        assert!((u0.value - t.value).abs() < 1e-12);
        assert!(cat3_probe(0.5, pops, Cat3Recipe::U(Some(0.2))).is_err());
    }

    #[test]
    fn cat3_pure_corner() {
        let (region, v) = classify_cat3(0.5, [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(region, Cat3Region::T);
        assert!(v.value > 0.0);
    }
}

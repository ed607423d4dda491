//! Bosonic dephasing channels and the three-level connectivity test.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::DensityMatrix;

/// Phase-noise distribution of a dephasing channel, described through its
/// characteristic factors kappa(m).
#[derive(Clone, Debug, PartialEq)]
pub enum DephasingKernel {
    /// Uniform phase: removes every coherence.
    Total,
    /// Discrete phase shifts (phi, weight), phi in (-pi, pi].
    Atoms(Vec<(f64, f64)>),
    /// Lorentzian line: kappa(m) = e^{-i m w0t} e^{-|m| gt}.
    Lorentzian { gt: f64, w0t: f64 },
    /// Mixture of the identity and a pi phase flip scaling odd coherences
    /// by `ratio`.
    TwoPoint { ratio: f64 },
}

impl DephasingKernel {
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("atom kernel needs at least one atom".into()));
        }
        let mut total = 0.0;
        for &(phi, w) in &atoms {
            if !(phi > -PI - 1e-12 && phi <= PI + 1e-12) {
                return Err(Error::InvalidParameter(format!("atom phase {phi} outside (-pi, pi]")));
            }
            if !(w > 0.0) {
                return Err(Error::InvalidParameter(format!("atom weight {w} must be positive")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("atom weights sum to {total}")));
        }
        Ok(Self::Atoms(atoms))
    }

    pub fn lorentzian(gt: f64, w0t: f64) -> Result<Self> {
        if !(gt >= 0.0) || !w0t.is_finite() {
            return Err(Error::InvalidParameter(format!("Lorentzian needs gt >= 0, got {gt}")));
        }
        Ok(Self::Lorentzian { gt, w0t })
    }

    pub fn two_point(ratio: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&ratio) {
            return Err(Error::InvalidParameter(format!("two-point ratio {ratio} outside [0, 1]")));
        }
        Ok(Self::TwoPoint { ratio })
    }

    /// Factor multiplying rho_{n, n-m}.
    pub fn kappa(&self, m: i64) -> C64 {
        match self {
            Self::Total => C64::new(if m == 0 { 1.0 } else { 0.0 }, 0.0),
            Self::Atoms(atoms) => atoms
                .iter()
                .map(|&(phi, w)| C64::from_polar(w, -(m as f64) * phi))
                .sum(),
            Self::Lorentzian { gt, w0t } => {
                C64::from_polar((-(m.abs() as f64) * gt).exp(), -(m as f64) * w0t)
            }
            Self::TwoPoint { ratio } => C64::new(if m % 2 == 0 { 1.0 } else { *ratio }, 0.0),
        }
    }
}

impl fmt::Display for DephasingKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Total => write!(f, "total"),
            Self::Atoms(atoms) => {
                let parts: Vec<String> = atoms.iter().map(|(p, w)| format!("({p},{w})")).collect();
                write!(f, "atoms:[{}]", parts.join(","))
            }
            Self::Lorentzian { gt, w0t } => write!(f, "lorentzian:gt={gt},w0t={w0t}"),
            Self::TwoPoint { ratio } => write!(f, "twopoint:ratio={ratio}"),
        }
    }
}

impl FromStr for DephasingKernel {
    type Err = Error;

    /// `total`, `lorentzian:gt=0.35,w0t=0`, `atoms:[(1.57,0.5),(-1.57,0.5)]`,
    /// `twopoint:ratio=0.6`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim() {
            "total" if rest.trim().is_empty() => Ok(Self::Total),
            "lorentzian" => {
                let kv = crate::spec::key_values(rest)?;
                let gt = crate::spec::get_f64(&kv, "gt")?;
                let w0t = crate::spec::get_f64_or(&kv, "w0t", 0.0)?;
                Self::lorentzian(gt, w0t)
            }
            "twopoint" => {
                let kv = crate::spec::key_values(rest)?;
                Self::two_point(crate::spec::get_f64(&kv, "ratio")?)
            }
            "atoms" => Self::atoms(crate::spec::parse_pairs(rest)?),
            "symatoms" => symmetric_kernel(&crate::spec::parse_pairs(rest)?),
            _ => Err(Error::Parse(format!("unknown kernel `{s}`"))),
        }
    }
}

/// rho'_{nm} = rho_{nm} kappa(n - m)
pub fn apply_dephasing(rho: &DensityMatrix, kernel: &DephasingKernel) -> DensityMatrix {
    rho.map_diagonals(|m| kernel.kappa(m))
}

/// Symmetric channel from atoms on [0, pi]: each phase phi becomes +-phi
/// with half the weight, so kappa(m) = sum w cos(m phi).
pub fn symmetric_kernel(atoms: &[(f64, f64)]) -> Result<DephasingKernel> {
    let mut out = Vec::with_capacity(2 * atoms.len());
    for &(phi, w) in atoms {
        if !(-1e-12..=PI + 1e-12).contains(&phi) {
            return Err(Error::InvalidParameter(format!("symmetric atom {phi} outside [0, pi]")));
        }
        if phi.abs() < 1e-12 || (phi - PI).abs() < 1e-12 {
            out.push((phi.clamp(0.0, PI), w));
        } else {
            out.push((phi, w / 2.0));
            out.push((-phi, w / 2.0));
        }
    }
    DephasingKernel::atoms(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Connectivity {
    pub connected: bool,
    /// Common nearest-neighbor reduction factor.
    pub x: f64,
    /// Reduction factor of the level-skipping coherence.
    pub y: f64,
}

/// Ratio rho'/rho of one coherence. `Ok(None)` when both vanish (any factor
/// fits), `Err(())` when only the target is nonzero.
fn coherence_ratio(a: C64, b: C64) -> std::result::Result<Option<f64>, ()> {
    const ZERO: f64 = 1e-14;
    match (a.norm() > ZERO, b.norm() > ZERO) {
        (false, false) => Ok(None),
        (false, true) => Err(()),
        (true, _) => {
            let r = b / a;
            Ok(Some(r.re))
        }
    }
}

/// Decides whether a symmetric dephasing channel maps `rho` to `target`,
/// where both live on three neighboring Fock levels {n, n+1, n+2} with equal
/// populations and equal coherence phases.
pub fn connectivity_check_3fock(rho: &DensityMatrix, target: &DensityMatrix) -> Result<Connectivity> {
    let dim = rho.dim().max(target.dim());
    let (rho, target) = (rho.padded(dim), target.padded(dim));
    for k in 0..dim {
        let d = (rho.get(k, k).re - target.get(k, k).re).abs();
        if d > 1e-10 {
            return Err(Error::PreconditionViolation(format!(
                "populations differ at level {k} by {d:.3e}"
            )));
        }
    }
    let n = (0..dim).find(|&k| rho.get(k, k).re > 1e-12).unwrap_or(0);
    let outside: f64 = (0..dim)
        .filter(|&k| k < n || k > n + 2)
        .map(|k| rho.get(k, k).re)
        .sum();
    if outside > 1e-10 || n + 2 >= dim {
        return Err(Error::PreconditionViolation(
            "states are not supported on three neighboring Fock levels".into(),
        ));
    }
    for (i, j) in [(n + 2, n + 1), (n + 1, n), (n + 2, n)] {
        let (a, b) = (rho.get(i, j), target.get(i, j));
        if a.norm() > 1e-14 && b.norm() > 1e-14 {
            let r = b / a;
            if r.im.abs() > 1e-9 * r.norm().max(1.0) {
                return Err(Error::PreconditionViolation(format!(
                    "coherence phases differ at ({i},{j})"
                )));
            }
        }
    }

    let not_connected = |x: f64, y: f64| Ok(Connectivity { connected: false, x, y });
    let upper = coherence_ratio(rho.get(n + 2, n + 1), target.get(n + 2, n + 1));
    let lower = coherence_ratio(rho.get(n + 1, n), target.get(n + 1, n));
    let skip = coherence_ratio(rho.get(n + 2, n), target.get(n + 2, n));
    let (Ok(upper), Ok(lower), Ok(skip)) = (upper, lower, skip) else {
        return not_connected(f64::NAN, f64::NAN);
    };
    let x = match (upper, lower) {
        (Some(a), Some(b)) => {
            if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1e-300) {
                return not_connected(f64::NAN, skip.unwrap_or(f64::NAN));
            }
            Some(0.5 * (a + b))
        }
        (Some(a), None) | (None, Some(a)) => Some(a),
        (None, None) => None,
    };
    // free factors take the most permissive admissible value
    let x = x.unwrap_or(0.0);
    let y = skip.unwrap_or(1.0);
    let tol = 1e-12;
    let connected = x.abs() <= 1.0 + tol && y.abs() <= 1.0 + tol && 2.0 * x * x - 1.0 <= y + tol;
    Ok(Connectivity { connected, x, y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn three_level(p: [f64; 3], f21: f64, f10: f64, f20: f64) -> DensityMatrix {
        // index 0 is |n>, n = 0; p = (p2, p1, p0)
        let [p2, p1, p0] = p;
        let mut e = vec![C64::new(0.0, 0.0); 25];
        let set = |e: &mut Vec<C64>, i: usize, j: usize, v: f64| {
            e[i * 5 + j] = C64::new(v, 0.0);
            e[j * 5 + i] = C64::new(v, 0.0);
        };
        set(&mut e, 2, 2, p2);
        set(&mut e, 1, 1, p1);
        set(&mut e, 0, 0, p0);
        set(&mut e, 2, 1, f21 * (p2 * p1).sqrt());
        set(&mut e, 1, 0, f10 * (p1 * p0).sqrt());
        set(&mut e, 2, 0, f20 * (p2 * p0).sqrt());
        DensityMatrix::new(5, e).unwrap()
    }

    #[test]
    fn total_keeps_diagonal() {
        let rho = three_level([0.4, 0.4, 0.2], 0.5, 0.5, 0.3);
        let out = apply_dephasing(&rho, &DephasingKernel::Total);
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { rho.get(i, j) } else { C64::new(0.0, 0.0) };
                assert_eq!(out.get(i, j), expect);
            }
        }
    }

    #[test]
    fn lorentzian_plateau_time() {
        let k = DephasingKernel::lorentzian(2f64.ln() / 2.0, 0.0).unwrap();
        assert!((k.kappa(1).norm() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn symmetric_atoms_are_cosines() {
        let k = symmetric_kernel(&[(FRAC_PI_2, 1.0)]).unwrap();
        assert!(k.kappa(1).norm() < 1e-15);
        assert!((k.kappa(2) - C64::new(-1.0, 0.0)).norm() < 1e-15);
        let k = symmetric_kernel(&[(0.0, 0.5), (PI, 0.5)]).unwrap();
        assert!(k.kappa(3).norm() < 1e-15);
        assert!((k.kappa(4).re - 1.0).abs() < 1e-15);
        let phi = 0.77;
        let k = symmetric_kernel(&[(phi, 1.0)]).unwrap();
        for m in 0..5 {
            assert!((k.kappa(m) - C64::new((m as f64 * phi).cos(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn nullifying_kernel_moments() {
        let xbar = 0.3;
        let a = (xbar + 1.0) / 4.0;
        let b = (1.0 - xbar) / 4.0;
        let k = DephasingKernel::atoms(vec![(0.0, a), (PI, a), (FRAC_PI_2, b), (-FRAC_PI_2, b)])
            .unwrap();
        assert!(k.kappa(1).norm() < 1e-15);
        assert!((k.kappa(2).re - xbar).abs() < 1e-15);
    }

    #[test]
    fn two_point_scales_odd_coherences() {
        let k = DephasingKernel::two_point(0.6).unwrap();
        let rho = three_level([0.4, 0.4, 0.2], 0.5, 0.5, 0.3);
        let out = apply_dephasing(&rho, &k);
        assert!((out.get(2, 1).re - 0.6 * rho.get(2, 1).re).abs() < 1e-15);
        assert_eq!(out.get(2, 0), rho.get(2, 0));
    }

    #[test]
    fn connectivity_examples() {
        let rho = three_level([0.4, 0.4, 0.2], 0.5, 0.5, 0.3);
        let c = connectivity_check_3fock(&rho, &rho).unwrap();
        assert!(c.connected && c.x == 1.0 && c.y == 1.0);

        let a = three_level([0.4, 0.4, 0.2], 0.2, 0.6, 0.0);
        let b = three_level([0.4, 0.4, 0.2], 0.0, 0.5, 0.0);
        assert!(!connectivity_check_3fock(&a, &b).unwrap().connected);

        let target = three_level([0.4, 0.4, 0.2], 0.4, 0.4, 0.06);
        let c = connectivity_check_3fock(&rho, &target).unwrap();
        assert!((c.x - 0.8).abs() < 1e-12 && (c.y - 0.2).abs() < 1e-12);
        assert!(!c.connected);

        let other = three_level([0.3, 0.5, 0.2], 0.5, 0.5, 0.3);
        assert!(matches!(
            connectivity_check_3fock(&rho, &other),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn kernel_grammar() {
        assert_eq!("total".parse::<DephasingKernel>().unwrap(), DephasingKernel::Total);
        assert_eq!(
            "lorentzian:gt=0.35,w0t=0".parse::<DephasingKernel>().unwrap(),
            DephasingKernel::Lorentzian { gt: 0.35, w0t: 0.0 }
        );
        assert_eq!(
            "twopoint:ratio=0.6".parse::<DephasingKernel>().unwrap(),
            DephasingKernel::TwoPoint { ratio: 0.6 }
        );
        let k: DephasingKernel = "atoms:[(1.57,0.5),(-1.57,0.5)]".parse().unwrap();
        assert_eq!(k, DephasingKernel::Atoms(vec![(1.57, 0.5), (-1.57, 0.5)]));
        assert!("atoms:[(1.57,0.6)]".parse::<DephasingKernel>().is_err());
        assert!("gaussian".parse::<DephasingKernel>().is_err());
    }
}

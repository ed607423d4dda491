//! `--opts key=val,...` and `--sweep param=from:to:steps`.

use ort_core::roof::RoofOptions;
use ort_core::spec::{key_values, parse_num};
use ort_core::{Error, Result};

/// Solver options from `gx`, `gtheta`, `refine`, `gap_tol` and `cap`.
pub fn parse_roof_options(s: &str) -> Result<RoofOptions> {
    let mut opts = RoofOptions::default();
    let (mut gx, mut gt) = (None, None);
    for (k, v) in key_values(s)? {
        let int = || -> Result<usize> {
            let x = parse_num(&v)?;
            if x < 0.0 || x.fract() != 0.0 {
                return Err(Error::Parse(format!("`{k}` needs a non-negative integer, got `{v}`")));
            }
            Ok(x as usize)
        };
        match k.as_str() {
            "gx" => gx = Some(int()?),
            "gtheta" => gt = Some(int()?),
            "refine" => opts.refine_rounds = int()?,
            "cap" => opts.candidate_cap = int()?,
            "gap_tol" => {
                opts.gap_tol = parse_num(&v)?;
                if !(opts.gap_tol > 0.0) {
                    return Err(Error::Parse(format!("gap_tol must be positive, got `{v}`")));
                }
            }
            _ => return Err(Error::Parse(format!("unknown option `{k}` (gx, gtheta, refine, gap_tol, cap)"))),
        }
    }
    match (gx, gt) {
        (Some(x), Some(t)) => opts.resolution = Some((x, t)),
        (None, None) => {}
        _ => return Err(Error::Parse("gx and gtheta must be given together".into())),
    }
    Ok(opts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepAxis {
    /// Evenly spaced points, both ends included.
    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.to } else { self.from + (self.to - self.from) * i as f64 / last })
            .collect()
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("sweep must look like param=from:to:steps, got `{s}`"));
        let (param, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        let [from, to, steps] = parts.as_slice() else {
            return Err(bad());
        };
        let steps: usize = steps.trim().parse().map_err(|_| bad())?;
        if steps < 2 {
            return Err(Error::Parse(format!("sweep needs at least 2 steps, got {steps}")));
        }
        let param = param.trim();
        if param.is_empty() {
            return Err(bad());
        }
        Ok(Self { param: param.to_string(), from: parse_num(from)?, to: parse_num(to)?, steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roof_options() {
        let o = parse_roof_options("gx=11,gtheta=16,refine=1,gap_tol=1e-4,cap=5000").unwrap();
        assert_eq!(o.resolution, Some((11, 16)));
        assert_eq!((o.refine_rounds, o.candidate_cap), (1, 5000));
        assert_eq!(o.gap_tol, 1e-4);
        assert_eq!(parse_roof_options("").unwrap(), RoofOptions::default());
        assert!(parse_roof_options("gx=11").is_err());
        assert!(parse_roof_options("speed=9").is_err());
        assert!(parse_roof_options("refine=1.5").is_err());
    }

    #[test]
    fn sweep_axis() {
        let a: SweepAxis = "chi=0:pi:5".parse().unwrap();
        assert_eq!(a.param, "chi");
        let pts = a.points();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[4], std::f64::consts::PI);
        assert!("p=0:1:1".parse::<SweepAxis>().is_err());
        assert!("p=0:1".parse::<SweepAxis>().is_err());
        assert!("=0:1:3".parse::<SweepAxis>().is_err());
    }
}

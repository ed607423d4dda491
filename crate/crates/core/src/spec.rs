//! Text grammar for states, e.g. `fock:n=3`, `cat:+,alpha=0.5` or
//! `mix:[(0.4,fock:n=1),(0.6,coherent:alpha=0.3)]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::{
    coherent_cutoff, make_cat, make_cat3, make_coherent, make_fock, make_photon_subtracted_sv,
    make_squeezed_vacuum, squeezed_cutoff, DensityMatrix, Parity, StateVector,
};
use crate::rank2::{
    cat_pair_with_sources, indefinite_parity_pair_with_sources, level_skip_pair_with_sources,
    squeezed_pair_with_sources, three_fock_pair_with_sources, two_fock_pair_with_sources,
    Rank2State, SpecialBasisPair,
};
use crate::C64;

/// Largest Fock dimension built implicitly for a spec.
const MAX_IMPLICIT_DIM: usize = 600;

pub type KeyValues = Vec<(String, String)>;

/// Splits on commas outside brackets and parentheses.
fn split_top(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced brackets in `{s}`")));
                }
            }
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in `{s}`")));
    }
    let last = s[start..].trim();
    if !last.is_empty() || !parts.is_empty() {
        parts.push(last);
    }
    Ok(parts)
}

/// `k1=v1,k2=v2,...`; bare tokens get an empty key.
pub fn key_values(s: &str) -> Result<KeyValues> {
    split_top(s)?
        .into_iter()
        .map(|tok| {
            if tok.is_empty() {
                return Err(Error::Parse(format!("empty field in `{s}`")));
            }
            Ok(match tok.split_once('=') {
                Some((k, v)) if !k.contains(['(', '[']) => (k.trim().to_string(), v.trim().to_string()),
                _ => (String::new(), tok.to_string()),
            })
        })
        .collect()
}

/// Real number, also accepting multiples of pi such as `pi/2`, `-3pi/4`, `2*pi`.
pub fn parse_num(s: &str) -> Result<f64> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let bad = || Error::Parse(format!("not a number: `{s}`"));
    let Some(idx) = t.find("pi") else { return Err(bad()) };
    let head = t[..idx].trim().trim_end_matches('*').trim();
    let tail = t[idx + 2..].trim();
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let div = match tail {
        "" => 1.0,
        d => d.strip_prefix('/').ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?,
    };
    Ok(coeff * PI / div)
}

fn lookup<'a>(kv: &'a KeyValues, key: &str) -> Option<&'a str> {
    kv.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

pub fn get_f64(kv: &KeyValues, key: &str) -> Result<f64> {
    let v = lookup(kv, key).ok_or_else(|| Error::Parse(format!("missing `{key}`")))?;
    parse_num(v)
}

pub fn get_f64_or(kv: &KeyValues, key: &str, default: f64) -> Result<f64> {
    lookup(kv, key).map_or(Ok(default), parse_num)
}

pub fn get_usize(kv: &KeyValues, key: &str) -> Result<usize> {
    let v = lookup(kv, key).ok_or_else(|| Error::Parse(format!("missing `{key}`")))?;
    v.parse().map_err(|_| Error::Parse(format!("`{key}` must be a non-negative integer, got `{v}`")))
}

fn get_usize_opt(kv: &KeyValues, key: &str) -> Result<Option<usize>> {
    lookup(kv, key).map(|_| get_usize(kv, key)).transpose()
}

fn check_keys(kind: &str, kv: &KeyValues, allowed: &[&str]) -> Result<()> {
    for (k, v) in kv {
        if !allowed.contains(&k.as_str()) {
            let what = if k.is_empty() { format!("token `{v}`") } else { format!("key `{k}`") };
            return Err(Error::Parse(format!("unexpected {what} for `{kind}`")));
        }
    }
    Ok(())
}

/// Items of a bracketed list of parenthesized tuples: `[(a,b),(c,d)]`.
pub fn parse_tuples(s: &str) -> Result<Vec<Vec<String>>> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected `[...]`, got `{s}`")))?;
    split_top(inner)?
        .into_iter()
        .map(|item| {
            let body = item
                .strip_prefix('(')
                .and_then(|x| x.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected `(...)`, got `{item}`")))?;
            Ok(split_top(body)?.into_iter().map(str::to_string).collect())
        })
        .collect()
}

/// `[(x,y),...]` as numeric pairs.
pub fn parse_pairs(s: &str) -> Result<Vec<(f64, f64)>> {
    parse_tuples(s)?
        .into_iter()
        .map(|t| match t.as_slice() {
            [a, b] => Ok((parse_num(a)?, parse_num(b)?)),
            _ => Err(Error::Parse(format!("expected a pair, got {t:?}"))),
        })
        .collect()
}

/// Replaces (or appends) `key=value` among the top-level fields of a spec.
pub fn set_param(spec: &str, key: &str, value: f64) -> Result<String> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("spec `{spec}` has no parameters")))?;
    let mut kv = key_values(rest)?;
    let formatted = format!("{value:?}");
    match kv.iter_mut().find(|(k, _)| k == key) {
        Some(e) => e.1 = formatted,
        None => kv.push((key.to_string(), formatted)),
    }
    let body: Vec<String> = kv
        .into_iter()
        .map(|(k, v)| if k.is_empty() { v } else { format!("{k}={v}") })
        .collect();
    Ok(format!("{}:{}", kind.trim(), body.join(",")))
}

/// Special-basis family of a rank-2 spec.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    TwoFock { n: usize },
    Cat { alpha: f64 },
    Squeezed { gamma: f64, mu: f64 },
    LevelSkip { n: usize, beta: f64 },
    IndefiniteParity { n: usize, y: f64, a: f64, b: f64 },
    ThreeFock { p2: f64, p0: f64, n: usize },
}

impl Family {
    pub fn pair(&self) -> Result<SpecialBasisPair> {
        match *self {
            Family::TwoFock { n } => Ok(SpecialBasisPair::two_fock(n)),
            Family::Cat { alpha } => SpecialBasisPair::cat(alpha),
            Family::Squeezed { gamma, mu } => SpecialBasisPair::squeezed(gamma, mu),
            Family::LevelSkip { n, beta } => SpecialBasisPair::level_skip(n, beta),
            Family::IndefiniteParity { n, y, .. } => SpecialBasisPair::indefinite_parity(n, y),
            Family::ThreeFock { p2, p0, n } => SpecialBasisPair::three_fock(p2, p0, n),
        }
    }

    /// Pair with explicit basis states, or `None` when the Fock truncation
    /// would exceed the implicit size limit.
    pub fn pair_with_sources(&self) -> Option<Result<SpecialBasisPair>> {
        match *self {
            Family::TwoFock { n } => Some(two_fock_pair_with_sources(n)),
            Family::Cat { alpha } => {
                (coherent_cutoff(alpha) <= MAX_IMPLICIT_DIM).then(|| cat_pair_with_sources(alpha))
            }
            Family::Squeezed { gamma, mu } => (squeezed_cutoff(gamma) <= MAX_IMPLICIT_DIM)
                .then(|| squeezed_pair_with_sources(gamma, mu)),
            Family::LevelSkip { n, beta } => {
                Some(level_skip_pair_with_sources(n, C64::new(beta, 0.0)))
            }
            Family::IndefiniteParity { n, y, a, b } => {
                Some(indefinite_parity_pair_with_sources(n, y, a, b))
            }
            Family::ThreeFock { p2, p0, n } => Some(three_fock_pair_with_sources(p2, p0, n)),
        }
    }
}

/// A parsed state description.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Fock { n: usize, dim: Option<usize> },
    Coherent { alpha: C64 },
    Cat { alpha: C64, parity: Parity },
    Cat3 { alpha: C64, k: usize },
    Squeezed { gamma: f64, mu: f64 },
    PhotonSubtracted { gamma: f64, mu: f64 },
    Mix(Vec<(f64, StateSpec)>),
    /// p|psi1><psi1| + (1-p)|psi2><psi2| with coherence f e^{i chi}.
    Rank2 { family: Family, p: f64, f: f64, chi: f64 },
    /// sqrt(p)|cat+> + e^{-i chi} sqrt(1-p)|cat-> at p = (1 + e^{-2 alpha^2})/2.
    CatQubit { alpha: f64, chi: f64 },
    /// Levels n+2, n+1, n with populations (p2, p1, p0) and real coherence
    /// ratios (f21, f10, f20).
    Fock3 { pops: [f64; 3], coh: [f64; 3], n: usize },
    /// sum_k p_k |cat3_k><cat3_k|
    Cat3Mix { alpha: f64, pops: [f64; 3] },
    /// p|n+m><n+m| + (1-p)|n><n| with coherence f.
    FockGap { n: usize, m: usize, p: f64, f: f64 },
}

fn complex_amp(kv: &KeyValues) -> Result<C64> {
    let r = get_f64(kv, "alpha")?;
    let phase = get_f64_or(kv, "phase", 0.0)?;
    Ok(C64::from_polar(r, phase))
}

fn populations(kv: &KeyValues, keys: [&str; 3]) -> Result<[f64; 3]> {
    let p = [get_f64(kv, keys[0])?, get_f64(kv, keys[1])?, get_f64(kv, keys[2])?];
    if p.iter().any(|&x| x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "populations {p:?} must be non-negative and sum to 1"
        )));
    }
    Ok(p)
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let kind = kind.trim();
        if kind == "mix" {
            let mut parts = Vec::new();
            for t in parse_tuples(rest)? {
                let [w, spec @ ..] = t.as_slice() else {
                    return Err(Error::Parse("empty mix entry".into()));
                };
                if spec.is_empty() {
                    return Err(Error::Parse(format!("mix entries are (weight,spec), got {t:?}")));
                }
                parts.push((parse_num(w)?, spec.join(",").parse()?));
            }
            let total: f64 = parts.iter().map(|(w, _)| w).sum();
            if parts.is_empty() || parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "mix weights must be non-negative and sum to 1 (sum {total})"
                )));
            }
            return Ok(StateSpec::Mix(parts));
        }
        let kv = key_values(rest)?;
        let spec = match kind {
            "fock" => {
                check_keys(kind, &kv, &["n", "dim"])?;
                StateSpec::Fock { n: get_usize(&kv, "n")?, dim: get_usize_opt(&kv, "dim")? }
            }
            "coherent" => {
                check_keys(kind, &kv, &["alpha", "phase"])?;
                StateSpec::Coherent { alpha: complex_amp(&kv)? }
            }
            "cat" => {
                check_keys(kind, &kv, &["", "alpha", "phase"])?;
                let parity = match lookup(&kv, "") {
                    Some("+") => Parity::Even,
                    Some("-") => Parity::Odd,
                    _ => return Err(Error::Parse("cat needs a parity token `+` or `-`".into())),
                };
                StateSpec::Cat { alpha: complex_amp(&kv)?, parity }
            }
            "cat3" => {
                check_keys(kind, &kv, &["k", "alpha", "phase"])?;
                StateSpec::Cat3 { alpha: complex_amp(&kv)?, k: get_usize(&kv, "k")? }
            }
            "sv" | "svm" => {
                check_keys(kind, &kv, &["gamma", "mu"])?;
                let (gamma, mu) = (get_f64(&kv, "gamma")?, get_f64_or(&kv, "mu", 0.0)?);
                if kind == "sv" {
                    StateSpec::Squeezed { gamma, mu }
                } else {
                    StateSpec::PhotonSubtracted { gamma, mu }
                }
            }
            "mix2fock" => {
                check_keys(kind, &kv, &["n", "p", "f", "chi"])?;
                StateSpec::Rank2 {
                    family: Family::TwoFock { n: get_usize(&kv, "n")? },
                    p: get_f64(&kv, "p")?,
                    f: get_f64_or(&kv, "f", 0.0)?,
                    chi: get_f64_or(&kv, "chi", 0.0)?,
                }
            }
            "catmix" => {
                check_keys(kind, &kv, &["alpha", "p", "f"])?;
                StateSpec::Rank2 {
                    family: Family::Cat { alpha: get_f64(&kv, "alpha")? },
                    p: get_f64(&kv, "p")?,
                    f: get_f64_or(&kv, "f", 0.0)?,
                    chi: 0.0,
                }
            }
            "svmix" => {
                check_keys(kind, &kv, &["gamma", "mu", "p"])?;
                StateSpec::Rank2 {
                    family: Family::Squeezed {
                        gamma: get_f64(&kv, "gamma")?,
                        mu: get_f64_or(&kv, "mu", 0.0)?,
                    },
                    p: get_f64(&kv, "p")?,
                    f: 0.0,
                    chi: 0.0,
                }
            }
            "levelskip" => {
                check_keys(kind, &kv, &["n", "beta", "p"])?;
                StateSpec::Rank2 {
                    family: Family::LevelSkip { n: get_usize(&kv, "n")?, beta: get_f64(&kv, "beta")? },
                    p: get_f64(&kv, "p")?,
                    f: 0.0,
                    chi: 0.0,
                }
            }
            "indef" => {
                check_keys(kind, &kv, &["n", "y", "p", "a", "b"])?;
                StateSpec::Rank2 {
                    family: Family::IndefiniteParity {
                        n: get_usize(&kv, "n")?,
                        y: get_f64(&kv, "y")?,
                        a: get_f64_or(&kv, "a", PI)?,
                        b: get_f64_or(&kv, "b", 0.0)?,
                    },
                    p: get_f64(&kv, "p")?,
                    f: 0.0,
                    chi: 0.0,
                }
            }
            "fock3r2" => {
                check_keys(kind, &kv, &["p2", "p1", "p0", "f", "n"])?;
                let [p2, p1, p0] = populations(&kv, ["p2", "p1", "p0"])?;
                StateSpec::Rank2 {
                    family: Family::ThreeFock { p2, p0, n: get_usize(&kv, "n")? },
                    p: p1,
                    f: get_f64_or(&kv, "f", 0.0)?,
                    chi: 0.0,
                }
            }
            "catqubit" => {
                check_keys(kind, &kv, &["alpha", "chi"])?;
                StateSpec::CatQubit { alpha: get_f64(&kv, "alpha")?, chi: get_f64(&kv, "chi")? }
            }
            "fock3" => {
                check_keys(kind, &kv, &["p2", "p1", "p0", "f21", "f10", "f20", "n"])?;
                let coh = [
                    get_f64_or(&kv, "f21", 0.0)?,
                    get_f64_or(&kv, "f10", 0.0)?,
                    get_f64_or(&kv, "f20", 0.0)?,
                ];
                if coh.iter().any(|c| c.abs() > 1.0) {
                    return Err(Error::InvalidParameter(format!("coherences {coh:?} exceed 1")));
                }
                StateSpec::Fock3 {
                    pops: populations(&kv, ["p2", "p1", "p0"])?,
                    coh,
                    n: get_usize_opt(&kv, "n")?.unwrap_or(0),
                }
            }
            "cat3mix" => {
                check_keys(kind, &kv, &["alpha", "p0", "p1", "p2"])?;
                StateSpec::Cat3Mix {
                    alpha: get_f64(&kv, "alpha")?,
                    pops: populations(&kv, ["p0", "p1", "p2"])?,
                }
            }
            "fockgap" => {
                check_keys(kind, &kv, &["n", "m", "p", "f"])?;
                let m = get_usize(&kv, "m")?;
                if m == 0 {
                    return Err(Error::InvalidParameter("fockgap needs m >= 1".into()));
                }
                StateSpec::FockGap {
                    n: get_usize(&kv, "n")?,
                    m,
                    p: get_f64(&kv, "p")?,
                    f: get_f64_or(&kv, "f", 0.0)?,
                }
            }
            _ => return Err(Error::Parse(format!("unknown state kind `{kind}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!("{name} = {v} must lie in [0, 1]")));
    }
    Ok(())
}

impl StateSpec {
    fn validate(&self) -> Result<()> {
        match self {
            StateSpec::Rank2 { family, p, f, .. } => {
                unit("p", *p)?;
                unit("f", *f)?;
                family.pair().map(|_| ())
            }
            StateSpec::FockGap { p, f, .. } => {
                unit("p", *p)?;
                unit("f", *f)
            }
            StateSpec::Squeezed { gamma, .. } | StateSpec::PhotonSubtracted { gamma, .. }
                if !(*gamma > 0.0) =>
            {
                Err(Error::InvalidParameter(format!("gamma = {gamma} must be positive")))
            }
            _ => Ok(()),
        }
    }

    /// Scalar rank-2 description when the spec is an analytic family.
    pub fn rank2_state(&self) -> Option<Result<Rank2State>> {
        match self {
            StateSpec::Rank2 { family, p, f, chi } => {
                Some(family.pair().and_then(|pair| Rank2State::new(pair, *p, *f, *chi)))
            }
            _ => None,
        }
    }

    /// Rank-2 description carrying basis states, when they fit in memory.
    pub fn rank2_state_with_sources(&self) -> Option<Result<Rank2State>> {
        match self {
            StateSpec::Rank2 { family, p, f, chi } => family
                .pair_with_sources()
                .map(|r| r.and_then(|pair| Rank2State::new(pair, *p, *f, *chi))),
            _ => None,
        }
    }

    /// The state vector for pure specs.
    pub fn pure_state(&self) -> Option<Result<StateVector>> {
        let r = match *self {
            StateSpec::Fock { n, dim } => make_fock(n, dim.unwrap_or(n + 3)),
            StateSpec::Coherent { alpha } => make_coherent(alpha, cutoff(coherent_cutoff(alpha.norm()))?),
            StateSpec::Cat { alpha, parity } => make_cat(alpha, parity, cutoff(coherent_cutoff(alpha.norm()))?),
            StateSpec::Cat3 { alpha, k } => make_cat3(alpha, k, cutoff(coherent_cutoff(alpha.norm()))?),
            StateSpec::Squeezed { gamma, mu } => make_squeezed_vacuum(gamma, mu, cutoff(squeezed_cutoff(gamma))?),
            StateSpec::PhotonSubtracted { gamma, mu } => {
                make_photon_subtracted_sv(gamma, mu, cutoff(squeezed_cutoff(gamma))?)
            }
            StateSpec::CatQubit { alpha, chi } => {
                let pair = match (Family::Cat { alpha }).pair_with_sources()? {
                    Ok(p) => p,
                    Err(e) => return Some(Err(e)),
                };
                let (plus, minus) = pair.sources().expect("sources requested");
                let p = (1.0 + (-2.0 * alpha * alpha).exp()) / 2.0;
                let amps = plus
                    .amps()
                    .iter()
                    .zip(minus.amps())
                    .map(|(a, b)| a * p.sqrt() + b * C64::from_polar((1.0 - p).sqrt(), -chi))
                    .collect();
                StateVector::from_unnormalized(amps)
            }
            _ => return None,
        };
        Some(r)
    }

    /// Explicit density matrix in a truncated Fock space.
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        if let Some(psi) = self.pure_state() {
            return Ok(psi?.outer());
        }
        match self {
            StateSpec::Mix(parts) => {
                let mats = parts
                    .iter()
                    .map(|(w, s)| Ok((*w, s.density_matrix()?)))
                    .collect::<Result<Vec<_>>>()?;
                let dim = mats.iter().map(|(_, m)| m.dim()).max().unwrap_or(2);
                let mut elems = vec![C64::new(0.0, 0.0); dim * dim];
                for (w, m) in &mats {
                    for (e, v) in elems.iter_mut().zip(m.padded(dim).elems()) {
                        *e += v * *w;
                    }
                }
                DensityMatrix::new(dim, elems)
            }
            StateSpec::Rank2 { .. } => match self.rank2_state_with_sources() {
                Some(state) => state?.density_matrix(),
                None => Err(Error::InvalidParameter(
                    "state too large for an explicit density matrix".into(),
                )),
            },
            StateSpec::Fock3 { pops, coh, n } => fock3_density(*pops, *coh, *n),
            StateSpec::Cat3Mix { alpha, pops } => {
                let dim = cutoff(coherent_cutoff(*alpha))
                    .ok_or_else(|| Error::InvalidParameter(format!("alpha = {alpha} too large")))?;
                let a = C64::new(*alpha, 0.0);
                let states = (0..3).map(|k| make_cat3(a, k, dim)).collect::<Result<Vec<_>>>()?;
                let parts: Vec<(f64, &StateVector)> =
                    pops.iter().zip(&states).filter(|(p, _)| **p > 0.0).map(|(p, s)| (*p, s)).collect();
                DensityMatrix::from_mixture(&parts)
            }
            StateSpec::FockGap { n, m, p, f } => {
                let dim = n + m + 3;
                DensityMatrix::partially_coherent(&make_fock(n + m, dim)?, &make_fock(*n, dim)?, *p, *f, 0.0)
            }
            _ => unreachable!("pure specs handled above"),
        }
    }
}

fn cutoff(dim: usize) -> Option<usize> {
    (dim <= MAX_IMPLICIT_DIM).then_some(dim)
}

/// Three neighboring Fock levels n+2, n+1, n with real coherences.
pub fn fock3_density(pops: [f64; 3], coh: [f64; 3], n: usize) -> Result<DensityMatrix> {
    let dim = n + 5;
    let [p2, p1, p0] = pops;
    let [f21, f10, f20] = coh;
    let mut elems = vec![C64::new(0.0, 0.0); dim * dim];
    let mut set = |i: usize, j: usize, v: f64| {
        elems[i * dim + j] = C64::new(v, 0.0);
        elems[j * dim + i] = C64::new(v, 0.0);
    };
    set(n + 2, n + 2, p2);
    set(n + 1, n + 1, p1);
    set(n, n, p0);
    set(n + 2, n + 1, f21 * (p2 * p1).sqrt());
    set(n + 1, n, f10 * (p1 * p0).sqrt());
    set(n + 2, n, f20 * (p2 * p0).sqrt());
    DensityMatrix::new(dim, elems)
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "+",
            Parity::Odd => "-",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(parse_num("0.25").unwrap(), 0.25);
        assert!((parse_num("pi/2").unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((parse_num("-3pi/4").unwrap() + 0.75 * PI).abs() < 1e-15);
        assert!((parse_num("2*pi").unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!(parse_num("pie").is_err());
    }

    #[test]
    fn nested_mixture() {
        let s: StateSpec = "mix:[(0.4,fock:n=1),(0.6,mix:[(0.5,coherent:alpha=0.3),(0.5,cat:+,alpha=0.5)])]"
            .parse()
            .unwrap();
        let StateSpec::Mix(parts) = &s else { panic!() };
        assert_eq!(parts.len(), 2);
        let rho = s.density_matrix().unwrap();
        let tr: f64 = (0..rho.dim()).map(|i| rho.get(i, i).re).sum();
        assert!((tr - 1.0).abs() < 1e-12);
        assert!((rho.get(1, 1).re - 0.4 - 0.6 * 0.5 * (-0.09f64).exp() * 0.09).abs() < 1e-12);
    }

    #[test]
    fn examples_parse() {
        for s in [
            "fock:n=3",
            "coherent:alpha=0.5",
            "cat:+,alpha=0.5",
            "sv:gamma=0.3,mu=0",
            "mix:[(0.4,fock:n=0),(0.6,fock:n=2)]",
            "mix2fock:n=0,p=0.5,f=0",
            "catqubit:alpha=1,chi=1.5707963",
            "catmix:alpha=700,p=0.3",
            "fock3:p2=0.4,p1=0.4,p0=0.2,f21=0,f10=0.5",
            "cat3mix:alpha=0.5,p0=0.2,p1=0.3,p2=0.5",
            "fockgap:n=6,m=2,p=0.75,f=0.3",
            "indef:n=1,y=2,p=0.4",
            "levelskip:n=1,beta=0.866,p=0.5",
            "fock3r2:p2=0.3,p1=0.4,p0=0.3,f=0.2,n=0",
        ] {
            s.parse::<StateSpec>().unwrap_or_else(|e| panic!("{s}: {e}"));
        }
    }

    #[test]
    fn parse_errors() {
        for s in [
            "fock:n=-1",
            "cat:alpha=0.5",
            "mix:[(0.4,fock:n=0)]",
            "mix2fock:n=0,p=1.5",
            "fock:n=1,q=2",
            "blob:x=1",
            "mix:[(0.5,fock:n=0),(0.5,fock:n=1)",
        ] {
            assert!(s.parse::<StateSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn sweep_substitution() {
        let s = set_param("mix2fock:n=0,p=0.5,f=0", "p", 0.25).unwrap();
        assert_eq!(s, "mix2fock:n=0,p=0.25,f=0");
        let s = set_param("cat:+,alpha=0.5", "phase", 1.0).unwrap();
        assert_eq!(s, "cat:+,alpha=0.5,phase=1.0");
    }

    #[test]
    fn fock3_matrix() {
        let rho = fock3_density([0.4, 0.4, 0.2], [0.2, 0.6, 0.0], 0).unwrap();
        assert!((rho.get(2, 1).re - 0.2 * 0.4).abs() < 1e-15);
        assert!((rho.get(0, 1).re - 0.6 * 0.08f64.sqrt()).abs() < 1e-15);
        assert_eq!(rho.get(2, 0).re, 0.0);
    }
}

//! Figure datasets as CSV tables.

use std::f64::consts::PI;

use rayon::prelude::*;

use ort_core::channels::{apply_dephasing, DephasingKernel};
use ort_core::measures::metrological_power;
use ort_core::rank2::{
    f_crit, mpower_rank2, ort_rank2, ort_rank2_coherent, two_fock, under_squeezed_interval,
    SpecialBasisPair,
};
use ort_core::roof::{classify_cat3, RoofOptions};
use ort_core::spec::{fock3_density, Family, StateSpec};
use ort_core::{Error, Result};

use crate::eval::{evaluate, fock_gap_roof, Measure};
use crate::table::{Cell, Table};

pub const FIGURES: &[(&str, &str)] = &[
    ("fig1", "Fock superpositions |n+m>,|n> under Lorentzian dephasing, N and M vs gamma t"),
    ("fig3a", "cat mixture, alpha = 0.5, N and M vs p"),
    ("fig3b", "cat mixture, alpha = 700 (scalar route), N and M vs p"),
    ("fig4", "squeezed-vacuum mixtures, gamma = 0.1 and 0.3, N and M vs p"),
    ("fig5a", "level-skipping mixture, n = 1, |beta|^2 = 0.75, N and M vs p"),
    ("fig5b", "level-skipping interval (p_L, p_R) vs |beta|, n = 1"),
    ("fig6", "indefinite-parity mixture, n = 1, y = 2, N and M vs p"),
    ("fig7", "cat qubit, alpha = 1, N and M vs chi"),
    ("fig8", "two-Fock |1>,|0> with coherence f, p = 2/3 and 1/3"),
    ("fig8b", "cat pair with coherence f, alpha = 0.5, p = 0.15, 0.3, 0.5"),
    ("fig8c", "rank-2 three-Fock family, n = 0: f_crit over (p2, p1)"),
    ("fig9", "three Fock levels, populations 1/3, all coherences f, numeric roof"),
    ("fig10", "three Fock levels (0.4, 0.4, 0.2), grid over (f21, f10), f20 = 0"),
    ("fig11", "mixtures of three cat3 states, alpha = 0.5, simplex grid"),
];

pub fn figure(id: &str, opts: &RoofOptions) -> Result<Table> {
    match id {
        "fig1" => fig1(opts, 0.01),
        "fig3a" => cat_mixture(0.5),
        "fig3b" => cat_mixture(700.0),
        "fig4" => squeezed(),
        "fig5a" => incoherent_family("n=1 beta^2=0.75", Family::LevelSkip { n: 1, beta: 0.75f64.sqrt() }),
        "fig5b" => level_skip_interval(),
        "fig6" => incoherent_family("n=1 y=2", Family::IndefiniteParity { n: 1, y: 2.0, a: PI, b: 0.0 }),
        "fig7" => cat_qubit(opts),
        "fig8" => coherent_family("n=0", Family::TwoFock { n: 0 }, &[2.0 / 3.0, 1.0 / 3.0], opts),
        "fig8b" => coherent_family("alpha=0.5", Family::Cat { alpha: 0.5 }, &[0.15, 0.3, 0.5], opts),
        "fig8c" => three_fock_regions(0.02),
        "fig9" => equal_population(opts, 0.01),
        "fig10" => valley(opts, 0.1),
        "fig11" => three_cats(0.5, 100),
        _ => {
            let ids: Vec<&str> = FIGURES.iter().map(|f| f.0).collect();
            Err(Error::Parse(format!("unknown figure `{id}` (one of {})", ids.join(", "))))
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

fn steps(step: f64) -> usize {
    (1.0 / step).round() as usize + 1
}

/// (m, n, p) of the three dephasing curves.
pub const FIG1_CURVES: [(usize, usize, f64); 3] = [(1, 9, 0.5), (2, 6, 0.75), (3, 3, 0.5)];

/// N through the closed form for m = 1 (coherence read off the dephased
/// matrix) and through the two-level roof for m >= 2.
pub fn fig1(opts: &RoofOptions, dt: f64) -> Result<Table> {
    let ts = linspace(0.0, 2.0, (2.0 / dt).round() as usize + 1);
    let rows = ts
        .par_iter()
        .map(|&t| {
            let kernel = DephasingKernel::lorentzian(t, 0.0)?;
            let mut row = vec![Cell::Num(t)];
            for (m, n, p) in FIG1_CURVES {
                let rho0 = StateSpec::FockGap { n, m, p, f: 1.0 }.density_matrix()?;
                let rho = apply_dephasing(&rho0, &kernel);
                let value = if m == 1 {
                    let f = rho.get(n + 1, n).norm() / (p * (1.0 - p)).sqrt();
                    ort_rank2_coherent(&two_fock(n, p, f.min(1.0))?)?.value
                } else {
                    fock_gap_roof(n, m, &rho, Measure::N, opts)?.n.expect("N requested")
                };
                row.push(value.into());
                row.push(metrological_power(&rho)?.value.into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["gt", "N_m1", "M_m1", "N_m2", "M_m2", "N_m3", "M_m3"])
        .param("m1:n=9,p=0.5 m2:n=6,p=0.75 m3:n=3,p=0.5 kernel=lorentzian w0t=0");
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn cat_mixture(alpha: f64) -> Result<Table> {
    let pair = SpecialBasisPair::cat(alpha)?;
    let mut t = Table::new(&["p", "N", "M", "branch"]).param(format!("alpha={alpha}"));
    for p in linspace(0.0, 1.0, 201) {
        let r = ort_rank2(&pair, p)?;
        t.push(vec![p.into(), r.value.into(), mpower_rank2(&pair, p)?.into(), r.branch.name().into()]);
    }
    Ok(t)
}

fn squeezed() -> Result<Table> {
    let pairs = [SpecialBasisPair::squeezed(0.1, 0.0)?, SpecialBasisPair::squeezed(0.3, 0.0)?];
    let mut t = Table::new(&["p", "N_g0.1", "M_g0.1", "N_g0.3", "M_g0.3"]).param("mu=0");
    for p in linspace(0.0, 1.0, 201) {
        let mut row = vec![Cell::Num(p)];
        for pair in &pairs {
            row.push(ort_rank2(pair, p)?.value.into());
            row.push(mpower_rank2(pair, p)?.into());
        }
        t.push(row);
    }
    Ok(t)
}

fn incoherent_family(note: &str, family: Family) -> Result<Table> {
    let pair = family.pair()?;
    let mut t = Table::new(&["p", "N", "M", "branch"]).param(note);
    for p in linspace(0.0, 1.0, 201) {
        let r = ort_rank2(&pair, p)?;
        t.push(vec![p.into(), r.value.into(), mpower_rank2(&pair, p)?.into(), r.branch.name().into()]);
    }
    Ok(t)
}

fn level_skip_interval() -> Result<Table> {
    let mut t = Table::new(&["beta", "p_L", "p_R"]).param("n=1");
    for beta in linspace(0.01, 1.0, 100) {
        let interval = under_squeezed_interval(&SpecialBasisPair::level_skip(1, beta)?);
        t.push(vec![beta.into(), interval.map(|i| i.0).into(), interval.map(|i| i.1).into()]);
    }
    Ok(t)
}

fn cat_qubit(opts: &RoofOptions) -> Result<Table> {
    let mut t = Table::new(&["chi", "N", "M"]).param("alpha=1");
    for chi in linspace(0.0, 2.0 * PI, 201) {
        let ev = evaluate(&StateSpec::CatQubit { alpha: 1.0, chi }, None, Measure::Both, opts)?;
        t.push(vec![chi.into(), ev.n.into(), ev.m.into()]);
    }
    Ok(t)
}

fn coherent_family(note: &str, family: Family, ps: &[f64], opts: &RoofOptions) -> Result<Table> {
    let mut cols = vec!["f".to_string()];
    for p in ps {
        let p = ort_core::format::g12(*p);
        cols.push(format!("N_p{p}"));
        cols.push(format!("M_p{p}"));
    }
    let fs = linspace(0.0, 1.0, 101);
    let rows = fs
        .par_iter()
        .map(|&f| {
            let mut row = vec![Cell::Num(f)];
            for &p in ps {
                let spec = StateSpec::Rank2 { family: family.clone(), p, f, chi: 0.0 };
                let ev = evaluate(&spec, None, Measure::Both, opts)?;
                row.push(ev.n.into());
                row.push(ev.m.into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new(&names).param(note);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// f_crit of the rank-2 three-Fock family with p = p_{n+1}; NaN where the
/// over-squeezed formula holds at every f.
fn three_fock_regions(step: f64) -> Result<Table> {
    let k = steps(step) - 1;
    let mut t = Table::new(&["p2", "p1", "p0", "f_crit"]).param("n=0");
    for i in 0..=k {
        for j in 0..k - i {
            let (p2, p1) = (i as f64 / k as f64, j as f64 / k as f64);
            let p0 = (k - i - j) as f64 / k as f64;
            let pair = SpecialBasisPair::three_fock(p2, p0, 0)?;
            t.push(vec![p2.into(), p1.into(), p0.into(), f_crit(&pair, p1).into()]);
        }
    }
    Ok(t)
}

fn fock3_rows(points: &[[f64; 2]], pops: [f64; 3], coh: impl Fn([f64; 2]) -> [f64; 3] + Sync, opts: &RoofOptions) -> Result<Vec<Vec<Cell>>> {
    points
        .par_iter()
        .map(|&x| {
            let spec = StateSpec::Fock3 { pops, coh: coh(x), n: 0 };
            let ev = evaluate(&spec, None, Measure::Both, opts)?;
            Ok(vec![
                ev.n.into(),
                ev.m.into(),
                ev.witness.into(),
                ev.q_part.into(),
                ev.branch.map_or("none", |b| b.name()).into(),
            ])
        })
        .collect()
}

pub fn equal_population(opts: &RoofOptions, step: f64) -> Result<Table> {
    let fs: Vec<[f64; 2]> = linspace(0.0, 1.0, steps(step)).into_iter().map(|f| [f, f]).collect();
    let rows = fock3_rows(&fs, [1.0 / 3.0; 3], |[f, _]| [f, f, f], opts)?;
    let mut t = Table::new(&["f", "N", "M", "witness", "q_part", "branch"]).param("n=0 p=1/3,1/3,1/3 f21=f10=f20=f");
    for (x, r) in fs.iter().zip(rows) {
        let mut row = vec![Cell::Num(x[0])];
        row.extend(r);
        t.push(row);
    }
    Ok(t)
}

/// Points with a non-positive density matrix are left out.
pub fn valley(opts: &RoofOptions, step: f64) -> Result<Table> {
    let pops = [0.4, 0.4, 0.2];
    let axis = linspace(0.0, 1.0, steps(step));
    let mut points = Vec::new();
    for &a in &axis {
        for &b in &axis {
            match fock3_density(pops, [a, b, 0.0], 0) {
                Ok(_) => points.push([a, b]),
                Err(Error::NotPsd(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let rows = fock3_rows(&points, pops, |[a, b]| [a, b, 0.0], opts)?;
    let mut t = Table::new(&["f21", "f10", "N", "M", "witness", "q_part", "branch"]).param("n=0 p=0.4,0.4,0.2 f20=0");
    for (x, r) in points.iter().zip(rows) {
        let mut row = vec![Cell::Num(x[0]), Cell::Num(x[1])];
        row.extend(r);
        t.push(row);
    }
    Ok(t)
}

/// Region of the least closed-form decomposition family and its value.
fn three_cats(alpha: f64, k: usize) -> Result<Table> {
    let mut grid = Vec::new();
    for i in 0..=k {
        for j in 0..=k - i {
            grid.push([(k - i - j) as f64 / k as f64, i as f64 / k as f64, j as f64 / k as f64]);
        }
    }
    let rows = grid
        .par_iter()
        .map(|&pops| {
            let (region, v) = classify_cat3(alpha, pops)?;
            let m = metrological_power(&StateSpec::Cat3Mix { alpha, pops }.density_matrix()?)?.value;
            let mut row: Vec<Cell> = pops.iter().map(|&p| Cell::Num(p)).collect();
            row.extend([v.value.into(), m.into(), region.name().into(), v.q.into()]);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["p0", "p1", "p2", "N", "M", "region", "q"]).param(format!("alpha={alpha}"));
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_endpoints() {
        let t = figure("fig3a", &RoofOptions::default()).unwrap();
        let n = t.numbers("N").unwrap();
        let a2: f64 = 0.25;
        assert!((n[0] - a2 * (1.0 / a2.tanh() + 1.0)).abs() < 1e-10);
        assert!((n[200] - a2 * (a2.tanh() + 1.0)).abs() < 1e-10);
        let t = figure("fig3b", &RoofOptions::default()).unwrap();
        let n = t.numbers("N").unwrap();
        assert!((n[0] - 2.0 * 700.0 * 700.0).abs() < 1e-6 * 7e5);
    }

    #[test]
    fn weakly_squeezed_curve_stays_positive() {
        let t = figure("fig4", &RoofOptions::default()).unwrap();
        assert!(t.numbers("N_g0.1").unwrap().iter().all(|&v| v > 1e-6));
    }

    #[test]
    fn level_skip_interval_matches_fig5a_parameters() {
        let t = figure("fig5b", &RoofOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 100);
        let t = figure("fig5a", &RoofOptions::default()).unwrap();
        let branches: Vec<&Cell> = t.rows.iter().map(|r| &r[3]).collect();
        assert!(branches.contains(&&Cell::Text("under_squeezed_a".into())));
    }

    #[test]
    fn region_map_and_cats_have_expected_shape() {
        let t = three_fock_regions(0.1).unwrap();
        assert_eq!(t.rows.len(), 55);
        let t = three_cats(0.5, 10).unwrap();
        assert_eq!(t.rows.len(), 66);
        let regions: std::collections::HashSet<String> = t
            .rows
            .iter()
            .map(|r| match &r[5] {
                Cell::Text(s) => s.clone(),
                Cell::Num(_) => unreachable!(),
            })
            .collect();
        assert!(regions.contains("T") && regions.contains("U"));
    }

    #[test]
    fn unknown_figure() {
        assert!(matches!(figure("fig2", &RoofOptions::default()), Err(Error::Parse(_))));
    }
}

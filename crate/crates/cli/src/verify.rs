//! Verification battery: twelve checks against closed forms and published
//! numbers, each with a runtime budget.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ort_core::channels::{connectivity_check_3fock, DephasingKernel};
use ort_core::fock::apply_phase_shift;
use ort_core::measures::metrological_power;
use ort_core::rank2::{
    f_crit, gamma_crit, mpower_rank2, ort_rank2, ort_rank2_coherent, under_squeezed_interval,
    Rank2State, SpecialBasisPair,
};
use ort_core::roof::{ort_numeric, RoofOptions, RoofProblem};
use ort_core::roots::bisect;
use ort_core::spec::{fock3_density, Family, StateSpec};
use ort_core::{Error, Result, StateVector, C64};

use crate::eval::{evaluate, Measure, Route};
use crate::figures::fig1;

pub const DEFAULT_SEED: u64 = 7;

type CheckFn = fn(u64) -> Result<std::result::Result<String, String>>;

pub struct Check {
    pub id: &'static str,
    pub name: &'static str,
    pub groups: &'static [&'static str],
    pub budget: Duration,
    run: CheckFn,
}

pub const CHECKS: &[Check] = &[
    Check { id: "c1", name: "two_fock_mixture", groups: &["rank2", "roof"], budget: secs(10), run: two_fock_mixture },
    Check { id: "c2", name: "gamma_crit", groups: &["rank2"], budget: secs(1), run: gamma_crit_check },
    Check { id: "c3", name: "coherence_plateau", groups: &["rank2"], budget: secs(5), run: coherence_plateau },
    Check { id: "c4", name: "cat_mixture_zeros", groups: &["rank2", "mpower"], budget: secs(5), run: cat_zeros },
    Check { id: "c5", name: "level_skip_interval", groups: &["rank2"], budget: secs(1), run: level_skip_interval },
    Check { id: "c6", name: "indefinite_parity", groups: &["rank2", "mpower"], budget: secs(5), run: indefinite_parity },
    Check { id: "c7", name: "cat_qubit_phase", groups: &["rank2", "pure"], budget: secs(1), run: cat_qubit },
    Check { id: "c8", name: "valley", groups: &["roof", "channels"], budget: secs(120), run: valley },
    Check { id: "c9", name: "rank3_f_crit", groups: &["roof"], budget: secs(300), run: rank3_f_crit },
    Check { id: "c10", name: "cat_f_crit_min", groups: &["rank2"], budget: secs(1), run: cat_f_crit_min },
    Check { id: "c11", name: "properties", groups: &["properties"], budget: secs(600), run: properties },
    Check { id: "c12", name: "dephasing_dynamics", groups: &["channels"], budget: secs(5), run: dephasing_dynamics },
];

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub struct Outcome {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:<4} {:<20} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Checks matching a comma-separated list of ids, names or groups; all when
/// `None`.
pub fn select(only: Option<&str>) -> Result<Vec<&'static Check>> {
    let Some(only) = only else {
        return Ok(CHECKS.iter().collect());
    };
    let keys: Vec<&str> = only.split(',').map(str::trim).filter(|k| !k.is_empty()).collect();
    for k in &keys {
        if !CHECKS.iter().any(|c| c.id == *k || c.name == *k || c.groups.contains(k)) {
            return Err(Error::Parse(format!("no check or group named `{k}`")));
        }
    }
    Ok(CHECKS
        .iter()
        .filter(|c| keys.iter().any(|k| c.id == *k || c.name == *k || c.groups.contains(k)))
        .collect())
}

pub fn run_check(check: &Check, seed: u64) -> Outcome {
    let start = Instant::now();
    let result = (check.run)(seed);
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(e) => (false, format!("error: {e}")),
    };
    if passed && elapsed > check.budget {
        passed = false;
        detail = format!("over budget ({:.1}s > {}s); {detail}", elapsed.as_secs_f64(), check.budget.as_secs());
    }
    Outcome { id: check.id, name: check.name, passed, detail, elapsed }
}

/// Collects failure messages; passes when none were recorded.
struct Tally {
    failures: Vec<String>,
    checked: usize,
}

impl Tally {
    fn new() -> Self {
        Self { failures: Vec::new(), checked: 0 }
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    fn close(self, summary: String) -> std::result::Result<String, String> {
        if self.failures.is_empty() {
            Ok(summary)
        } else {
            let n = self.failures.len();
            let mut shown: Vec<String> = self.failures.into_iter().take(3).collect();
            if n > 3 {
                shown.push(format!("... {} more", n - 3));
            }
            Err(format!("{n}/{} failed: {}", self.checked, shown.join("; ")))
        }
    }
}

fn rank2(family: Family, p: f64, f: f64) -> StateSpec {
    StateSpec::Rank2 { family, p, f, chi: 0.0 }
}

fn roof_value(state: &Rank2State) -> Result<f64> {
    Ok(ort_numeric(&RoofProblem::from_rank2(state)?, &RoofOptions::default())?.value)
}

fn two_fock_mixture(_: u64) -> Result<std::result::Result<String, String>> {
    let opts = RoofOptions::default();
    let mut t = Tally::new();
    let mut worst_gap: f64 = 0.0;
    for n in 0..10 {
        for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let expect = n as f64 + p - p * (1.0 - p) * (n as f64 + 1.0);
            let spec = rank2(Family::TwoFock { n }, p, 0.0);
            let ev = evaluate(&spec, None, Measure::N, &opts)?;
            let v = ev.n.unwrap_or(f64::NAN);
            t.expect(ev.route == Route::Analytic && (v - expect).abs() <= 1e-12, || {
                format!("analytic n={n} p={p}: {v} vs {expect}")
            });
            let numeric = roof_value(&spec.rank2_state().expect("rank-2")?)?;
            let gap = numeric - expect;
            worst_gap = worst_gap.max(gap.abs());
            t.expect((-1e-9..=1e-3).contains(&gap), || format!("roof n={n} p={p}: gap {gap:.3e}"));
        }
    }
    Ok(t.close(format!("50 points, worst roof gap {worst_gap:.2e}")))
}

fn gamma_crit_check(_: u64) -> Result<std::result::Result<String, String>> {
    let g = gamma_crit(1e-12);
    let expect = (1.0 + 2.0 / 3f64.sqrt()).ln() / 4.0;
    let mut t = Tally::new();
    t.expect((g - expect).abs() <= 1e-4, || format!("gamma_crit {g} vs {expect}"));
    t.expect((g - 0.19193).abs() <= 1e-4, || format!("gamma_crit {g} vs 0.19193"));
    Ok(t.close(format!("gamma_crit = {g:.8}")))
}

fn coherence_plateau(_: u64) -> Result<std::result::Result<String, String>> {
    let mut t = Tally::new();
    let mut worst: f64 = 0.0;
    for n in 0..=5 {
        for p in [0.25, 0.5, 0.75] {
            let pair = SpecialBasisPair::two_fock(n);
            let at = |f: f64| -> Result<f64> {
                Ok(ort_rank2_coherent(&Rank2State::new(pair.clone(), p, f, 0.0)?)?.value)
            };
            let n0 = at(0.0)?;
            for i in 1..=14 {
                let f = 0.05 * i as f64;
                let v = at(f)?;
                t.expect((v - n0).abs() <= 1e-12, || format!("n={n} p={p} f={f}: {v} vs plateau {n0}"));
            }
            // above the plateau N - N(0) is proportional to f^2 - 1/2
            let ratios = [0.75, 0.8, 0.9, 1.0]
                .iter()
                .map(|&f| Ok((at(f)? - n0) / (f * f - 0.5)))
                .collect::<Result<Vec<f64>>>()?;
            let spread = ratios.iter().fold(0.0f64, |m, r| m.max((r - ratios[0]).abs()));
            t.expect(ratios[0] > 0.0 && spread <= 1e-9 * ratios[0], || {
                format!("n={n} p={p}: not quadratic above the plateau ({ratios:?})")
            });
            let edge = bisect(0.5, 0.9, 1e-12, |f| at(f).map_or(f64::NAN, |v| v - n0 - 1e-12));
            match edge {
                Some(e) => {
                    worst = worst.max((e - FRAC_1_SQRT_2).abs());
                    t.expect((e - FRAC_1_SQRT_2).abs() <= 1e-6, || format!("n={n} p={p}: boundary {e}"));
                }
                None => t.expect(false, || format!("n={n} p={p}: no plateau boundary")),
            }
        }
    }
    Ok(t.close(format!("18 cases, boundary within {worst:.1e} of 1/sqrt(2)")))
}

fn cat_zeros(_: u64) -> Result<std::result::Result<String, String>> {
    let alpha = 0.5;
    let pair = SpecialBasisPair::cat(alpha)?;
    let p_r = (1.0 + (-0.5f64).exp()) / 2.0;
    let mut t = Tally::new();
    let n = ort_rank2(&pair, p_r)?.value;
    t.expect(n.abs() < 1e-9, || format!("N(p_R) = {n:e}"));
    let mut worst: f64 = 0.0;
    for i in 1..=20 {
        let p = 0.5 + (p_r - 0.5) * i as f64 / 21.0;
        let m = mpower_rank2(&pair, p)?;
        let spec = rank2(Family::Cat { alpha }, p, 0.0);
        let numeric = metrological_power(&spec.density_matrix()?)?.value;
        worst = worst.max(m.abs()).max(numeric.abs());
        t.expect(m.abs() < 1e-9 && numeric.abs() < 1e-9, || format!("M({p}) = {m:e} / {numeric:e}"));
    }
    Ok(t.close(format!("N(p_R) = {n:.1e}, max |M| on (1/2, p_R) = {worst:.1e}")))
}

fn interval_check(pair: &SpecialBasisPair, expect: (f64, f64)) -> (Tally, String) {
    let mut t = Tally::new();
    match under_squeezed_interval(pair) {
        Some((l, r)) => {
            t.expect((l - expect.0).abs() <= 1e-5 && (r - expect.1).abs() <= 1e-5, || {
                format!("({l:.6}, {r:.6}) vs {expect:?}")
            });
            (t, format!("(p_L, p_R) = ({l:.6}, {r:.6})"))
        }
        None => {
            t.expect(false, || "no under-squeezed interval".into());
            (t, String::new())
        }
    }
}

fn level_skip_interval(_: u64) -> Result<std::result::Result<String, String>> {
    let (t, s) = interval_check(&SpecialBasisPair::level_skip(1, 0.75f64.sqrt())?, (0.234823, 0.890667));
    Ok(t.close(s))
}

fn indefinite_parity(_: u64) -> Result<std::result::Result<String, String>> {
    let family = Family::IndefiniteParity { n: 1, y: 2.0, a: PI, b: 0.0 };
    let pair = family.pair()?;
    let (mut t, s) = interval_check(&pair, (0.160063, 0.867715));
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let p = i as f64 / 49.0;
        let n = ort_rank2(&pair, p)?.value;
        let m = metrological_power(&rank2(family.clone(), p, 0.0).density_matrix()?)?.value;
        worst = worst.max((n - m).abs());
        t.expect((n - m).abs() <= 1e-9, || format!("p={p}: N={n} M={m}"));
    }
    Ok(t.close(format!("{s}, max |N - M| = {worst:.1e}")))
}

fn cat_qubit(_: u64) -> Result<std::result::Result<String, String>> {
    let opts = RoofOptions::default();
    let mut t = Tally::new();
    let mut vals = Vec::new();
    for (chi, expect) in [(0.0, 0.0), (PI, 0.0), (PI / 2.0, 2.0)] {
        let ev = evaluate(&StateSpec::CatQubit { alpha: 1.0, chi }, None, Measure::N, &opts)?;
        let v = ev.n.unwrap_or(f64::NAN);
        vals.push(v);
        t.expect((v - expect).abs() <= 1e-10, || format!("N(chi={chi:.4}) = {v} vs {expect}"));
    }
    Ok(t.close(format!("N(0), N(pi), N(pi/2) = {:.1e}, {:.1e}, {:.12}", vals[0], vals[1], vals[2])))
}

fn valley(_: u64) -> Result<std::result::Result<String, String>> {
    let opts = RoofOptions::default();
    let pops = [0.4, 0.4, 0.2];
    let mut t = Tally::new();
    let mut notes = Vec::new();
    for (coh, n_ref, m_ref) in [([0.2, 0.6, 0.0], 0.511, 0.233), ([0.0, 0.5, 0.0], 0.523, 0.235)] {
        let ev = evaluate(&StateSpec::Fock3 { pops, coh, n: 0 }, None, Measure::Both, &opts)?;
        let (n, m) = (ev.n.unwrap_or(f64::NAN), ev.m.unwrap_or(f64::NAN));
        notes.push(format!("N{:?} = {n:.4}, M = {m:.4}", &coh[..2]));
        t.expect((n - n_ref).abs() <= 5e-3, || format!("N at {coh:?} = {n} vs {n_ref}"));
        t.expect((m - m_ref).abs() <= 5e-3, || format!("M at {coh:?} = {m} vs {m_ref}"));
    }
    let a = fock3_density(pops, [0.2, 0.6, 0.0], 0)?;
    let b = fock3_density(pops, [0.0, 0.5, 0.0], 0)?;
    let forward = connectivity_check_3fock(&a, &b)?.connected;
    let backward = connectivity_check_3fock(&b, &a)?.connected;
    t.expect(!forward && !backward, || format!("connectivity {forward}/{backward}"));
    notes.push("not connected".into());
    Ok(t.close(notes.join("; ")))
}

fn rank3_f_crit(_: u64) -> Result<std::result::Result<String, String>> {
    let opts = RoofOptions::default();
    let eval = |f: f64| evaluate(&StateSpec::Fock3 { pops: [1.0 / 3.0; 3], coh: [f; 3], n: 0 }, None, Measure::Both, &opts);
    // a positive witness is one well above the solver noise
    let threshold = 1e-6;
    let mut t = Tally::new();
    let (mut lo, mut hi) = (0.80, 0.90);
    let w_lo = eval(lo)?.witness.unwrap_or(f64::NAN);
    let w_hi = eval(hi)?.witness.unwrap_or(f64::NAN);
    t.expect(w_lo <= threshold && w_hi > threshold, || format!("no sign change: w(0.8)={w_lo:e}, w(0.9)={w_hi:e}"));
    while hi - lo > 1e-3 {
        let mid = (lo + hi) / 2.0;
        if eval(mid)?.witness.unwrap_or(f64::NAN) > threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let fc = (lo + hi) / 2.0;
    t.expect(lo > 0.86 && hi < 0.87, || format!("f_crit in ({lo:.4}, {hi:.4})"));
    let mut worst: f64 = 0.0;
    for f in [0.88, 0.92, 0.96] {
        let ev = eval(f)?;
        let gap = (ev.n.unwrap_or(f64::NAN) - ev.m.unwrap_or(f64::NAN)).abs();
        worst = worst.max(gap);
        t.expect(gap < 2.0 * opts.gap_tol, || format!("f={f}: |N - M| = {gap:e}"));
    }
    Ok(t.close(format!("f_crit = {fc:.4} (+-5e-4), max |N - M| above = {worst:.1e}")))
}

fn cat_f_crit_min(_: u64) -> Result<std::result::Result<String, String>> {
    let mut t = Tally::new();
    let fc = f_crit(&SpecialBasisPair::cat(0.5)?, 0.5);
    t.expect(fc.is_some_and(|f| (f - 0.855).abs() <= 3e-3), || format!("f_crit = {fc:?}"));
    Ok(t.close(format!("f_crit = {:.6}", fc.unwrap_or(f64::NAN))))
}

fn dephasing_dynamics(_: u64) -> Result<std::result::Result<String, String>> {
    let dt = 0.01;
    let table = fig1(&RoofOptions::default(), dt)?;
    let ts = table.numbers("gt").expect("column");
    let (n1, n2, n3) = (
        table.numbers("N_m1").expect("column"),
        table.numbers("N_m2").expect("column"),
        table.numbers("N_m3").expect("column"),
    );
    let mut t = Tally::new();
    let plateau = *n1.last().expect("rows");
    let reached = ts.iter().zip(&n1).find(|(_, v)| (*v - plateau).abs() <= 1e-9).map(|(t, _)| *t);
    let expect = 2f64.ln() / 2.0;
    t.expect(reached.is_some_and(|r| (r - expect).abs() <= dt), || format!("plateau reached at {reached:?}"));
    // m = 2: <n> + |rho_{n+2,n}| sqrt((n+2)(n+1)) with |rho_{n+2,n}| = sqrt(p(1-p)) e^{-2 gamma t}
    let (n, p): (f64, f64) = (6.0, 0.75);
    let mean2 = p * (n + 2.0) + (1.0 - p) * n;
    for (&time, &v) in ts.iter().zip(&n2) {
        let expect = mean2 + (p * (1.0 - p)).sqrt() * (-2.0 * time).exp() * ((n + 2.0) * (n + 1.0)).sqrt();
        t.expect((v - expect).abs() <= 1e-9, || format!("m=2 t={time}: {v} vs {expect}"));
    }
    let mean3 = 0.5 * 6.0 + 0.5 * 3.0;
    for (&time, &v) in ts.iter().zip(&n3) {
        t.expect((v - mean3).abs() <= 1e-9, || format!("m=3 t={time}: {v} vs {mean3}"));
    }
    Ok(t.close(format!("m=1 plateau at gt = {:.2} (ln2/2 = {expect:.4})", reached.unwrap_or(f64::NAN))))
}

/// Random rank-2 family with explicit basis states.
fn random_family(rng: &mut ChaCha8Rng) -> Family {
    match rng.random_range(0..5) {
        0 => Family::TwoFock { n: rng.random_range(0..5) },
        1 => Family::Cat { alpha: rng.random_range(0.2..1.5) },
        2 => Family::Squeezed { gamma: rng.random_range(0.05..0.5), mu: rng.random_range(0.0..PI) },
        3 => Family::LevelSkip { n: rng.random_range(0..3), beta: rng.random_range(0.1..1.0) },
        _ => Family::IndefiniteParity { n: rng.random_range(0..3), y: rng.random_range(0.5..3.0), a: PI, b: 0.0 },
    }
}

fn allows_coherence(family: &Family) -> bool {
    matches!(family, Family::TwoFock { .. } | Family::Cat { .. })
}

fn random_rank2(rng: &mut ChaCha8Rng) -> (Family, f64, f64) {
    let family = random_family(rng);
    let p = rng.random_range(0.0..1.0);
    let f = if allows_coherence(&family) { rng.random_range(0.0..1.0) } else { 0.0 };
    (family, p, f)
}

fn shift(psi: &StateVector, phi: f64) -> Result<StateVector> {
    let amps = psi.amps().iter().enumerate().map(|(n, a)| a * C64::from_polar(1.0, -(n as f64) * phi)).collect();
    StateVector::new(amps)
}

fn properties(seed: u64) -> Result<std::result::Result<String, String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = RoofOptions::default();
    let mut t = Tally::new();
    let mut both = Vec::new();

    // (a) phase-shift invariance
    for _ in 0..100 {
        let (family, p, f) = random_rank2(&mut rng);
        let phi = rng.random_range(-PI..PI);
        let spec = rank2(family.clone(), p, f);
        let state = spec.rank2_state_with_sources().expect("rank-2")?;
        let rho = state.density_matrix()?;
        let shifted = apply_phase_shift(&rho, phi);
        let (psi1, psi2) = state.pair.sources().expect("sources");
        let pair = SpecialBasisPair::from_states(&shift(psi1, phi)?, &shift(psi2, phi)?)?;
        let moved = Rank2State::new(pair, p, f, 0.0)?;
        t.expect(moved.density_matrix()?.max_deviation(&shifted) < 1e-12, || format!("{family:?}: shifted state mismatch"));
        let (n0, n1) = (ort_rank2_coherent(&state)?.value, ort_rank2_coherent(&moved)?.value);
        t.expect((n0 - n1).abs() <= 1e-8, || format!("{family:?} p={p} f={f} phi={phi}: N {n0} vs {n1}"));
        let (m0, m1) = (metrological_power(&rho)?.value, metrological_power(&shifted)?.value);
        t.expect((m0 - m1).abs() <= 1e-8, || format!("{family:?} p={p} f={f} phi={phi}: M {m0} vs {m1}"));
        both.push((n0, m0));
    }

    // (b) dephasing monotonicity
    for _ in 0..100 {
        let spec = random_dephasing_state(&mut rng)?;
        let kernel = random_kernel(&mut rng, &spec)?;
        let before = evaluate(&spec, None, Measure::Both, &opts)?;
        let after = evaluate(&spec, Some(&kernel), Measure::Both, &opts)?;
        if let (Some(a), Some(b)) = (before.n, after.n) {
            t.expect(b <= a + 1e-8, || format!("{spec:?} {kernel}: N {a} -> {b}"));
        }
        let (a, b) = (before.m.unwrap_or(f64::NAN), after.m.unwrap_or(f64::NAN));
        t.expect(b <= a + 1e-8, || format!("{spec:?} {kernel}: M {a} -> {b}"));
        for ev in [before, after] {
            if let (Some(n), Some(m)) = (ev.n, ev.m) {
                both.push((n, m));
            }
        }
    }

    // (d) convexity on two-component mixtures within one family
    for _ in 0..50 {
        let family = random_family(&mut rng);
        let pair = family.pair()?;
        let coherent = allows_coherence(&family);
        let draw = |rng: &mut ChaCha8Rng| -> (f64, f64) {
            (rng.random_range(0.0..1.0), if coherent { rng.random_range(0.0..1.0) } else { 0.0 })
        };
        let ((pa, fa), (pb, fb)) = (draw(&mut rng), draw(&mut rng));
        let w = rng.random_range(0.0..1.0);
        let p = w * pa + (1.0 - w) * pb;
        let c = w * fa * (pa * (1.0 - pa)).sqrt() + (1.0 - w) * fb * (pb * (1.0 - pb)).sqrt();
        let pp = p * (1.0 - p);
        let f = if pp > 0.0 { (c / pp.sqrt()).min(1.0) } else { 0.0 };
        let value = |p: f64, f: f64| -> Result<f64> { Ok(ort_rank2_coherent(&Rank2State::new(pair.clone(), p, f, 0.0)?)?.value) };
        let lhs = w * value(pa, fa)? + (1.0 - w) * value(pb, fb)?;
        let rhs = value(p, f)?;
        t.expect(lhs >= rhs - 1e-6, || format!("{family:?}: convexity {lhs} < {rhs}"));
    }

    // (e) roof against closed form
    let mut worst_gap: f64 = 0.0;
    for _ in 0..30 {
        let (family, p, f) = random_rank2(&mut rng);
        if matches!(family, Family::IndefiniteParity { .. }) {
            continue;
        }
        let state = rank2(family.clone(), p, f).rank2_state().expect("rank-2")?;
        let exact = ort_rank2_coherent(&state)?.value;
        let gap = roof_value(&state)? - exact;
        worst_gap = worst_gap.max(gap.abs());
        t.expect((-1e-9..=1e-3).contains(&gap), || format!("{family:?} p={p} f={f}: roof gap {gap:e}"));
    }

    // (c) M <= N wherever both were computed
    for (n, m) in &both {
        t.expect(*m <= n + 1e-8, || format!("M {m} > N {n}"));
    }
    let checked = t.checked;
    Ok(t.close(format!("{checked} assertions, worst roof gap {worst_gap:.1e}")))
}

fn random_dephasing_state(rng: &mut ChaCha8Rng) -> Result<StateSpec> {
    Ok(match rng.random_range(0..4) {
        0 => StateSpec::Rank2 {
            family: Family::TwoFock { n: rng.random_range(0..6) },
            p: rng.random_range(0.0..1.0),
            f: rng.random_range(0.0..1.0),
            chi: rng.random_range(-PI..PI),
        },
        1 => rank2(Family::Cat { alpha: rng.random_range(0.2..1.5) }, rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)),
        2 => StateSpec::FockGap {
            n: rng.random_range(0..5),
            m: rng.random_range(2..4),
            p: rng.random_range(0.0..1.0),
            f: rng.random_range(0.0..1.0),
        },
        _ => loop {
            let a: f64 = rng.random_range(0.0..1.0);
            let b: f64 = rng.random_range(0.0..1.0);
            let pops = [a.min(b), a.max(b) - a.min(b), 1.0 - a.max(b)];
            let coh = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            if let Ok(rho) = fock3_density(pops, coh, 0) {
                if ort_core::fock::eigendecompose(&rho).is_ok() {
                    break StateSpec::Fock3 { pops, coh, n: 0 };
                }
            }
        },
    })
}

/// Kernels are drawn so that N stays on an exact route where one exists.
fn random_kernel(rng: &mut ChaCha8Rng, spec: &StateSpec) -> Result<DephasingKernel> {
    if matches!(spec, StateSpec::Rank2 { family: Family::Cat { .. }, .. }) {
        return DephasingKernel::two_point(rng.random_range(0.0..1.0));
    }
    match rng.random_range(0..4) {
        0 => DephasingKernel::lorentzian(rng.random_range(0.0..2.0), rng.random_range(-PI..PI)),
        1 => DephasingKernel::two_point(rng.random_range(0.0..1.0)),
        2 => Ok(DephasingKernel::Total),
        _ => {
            let k = rng.random_range(1..4);
            let mut w: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
            let last = 1.0 - w[..k - 1].iter().sum::<f64>();
            w[k - 1] = last;
            DephasingKernel::atoms(w.into_iter().map(|x| (rng.random_range(-PI..PI), x)).collect())
        }
    }
}

//! Reproduction commands: each computes a result and checks it against the
//! published reference values.

use serde::Serialize;
use serde_json::{json, Value};

use bellforge_core::bell::{build_derived, build_i3, build_ich, build_ich3, local_bound, BellFunctional, RankProfile};
use bellforge_core::optimize::noise::{curve_from_points, linear_grid, noise_threshold, NoiseCurve, NoiseReading};
use bellforge_core::optimize::psiplus::{projective_max_psiplus, projective_max_psiplus_cases, psiplus_case_max, PovmAdvantage};
use bellforge_core::optimize::seesaw::{best_report, seesaw_run, OptimizationReport, SeesawConfig, StateMode};
use bellforge_core::optimize::table::{row_config, row_from_reports, table_profiles, TableRow};
use bellforge_core::optimize::wopt::{maximize_w_povm, maximize_w_projective, wopt_problem};
use bellforge_core::quantum::random::{random_extremal_qubit_povm, random_pure_state, stream_rng};
use bellforge_core::quantum::{neumark_dilate, psi_plus};
use bellforge_core::sdp::verify_certificate;

use crate::parallel::par_map;
use crate::Error;

/// Published values the commands are checked against.
pub mod reference {
    pub const W: f64 = 1.0714198987;
    pub const W_TOL: f64 = 1e-7;
    pub const CROSSOVER: f64 = 2.9826;
    pub const CROSSOVER_TOL: f64 = 1e-4;
    pub const CROSSOVER_AGREEMENT: f64 = 1e-6;
    /// Qubit maxima at `c = 100` in table order I00, I01, I10, I11, I02, I20.
    pub const QUBIT_TABLE_C: f64 = 100.0;
    pub const QUBIT_TABLE: [f64; 6] = [20.71068, 20.91928, 21.06690, 21.06801, 20.71775, 20.71775];
    pub const QUBIT_TABLE_TOL: f64 = 1e-4;
    pub const POVM_BOUND_100: f64 = 21.0895;
    pub const POVM_BOUND_TOL: f64 = 1e-3;
    pub const NOISE_P: f64 = 0.00249717;
    pub const NOISE_P_TOL: f64 = 1e-5;
    pub const NOISE_C: f64 = 6.56182;
    pub const NOISE_C_TOL: f64 = 1e-2;
    pub const SEESAW_AGREEMENT: f64 = 1e-6;
    pub const NEUMARK_TOL: f64 = 1e-9;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `|value − reference| ≤ tolerance`
    Within,
    /// `value ≥ reference − tolerance`
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn within(label: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        let pass = (value - reference).abs() <= tolerance;
        Self { label: label.into(), value, reference, tolerance, relation: Relation::Within, pass }
    }

    pub fn at_least(label: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        let pass = value >= reference - tolerance;
        Self { label: label.into(), value, reference, tolerance, relation: Relation::AtLeast, pass }
    }

    pub fn flag(label: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self::within(label, v, 1.0, 0.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproResult {
    pub command: String,
    pub inputs: Value,
    pub value: Value,
    /// What the result reproduces.
    pub reference: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ReproResult {
    fn new(command: &str, inputs: Value, value: Value, reference: &str, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { command: command.into(), inputs, value, reference: reference.into(), checks, pass }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Error> {
    Ok(serde_json::to_value(v)?)
}

pub fn wopt(tol: f64) -> Result<ReproResult, Error> {
    let opt = maximize_w_povm(tol)?;
    let cert = verify_certificate(&wopt_problem(), &opt.solution, 1e-8);
    let checks = vec![
        Check::within("w", opt.value, reference::W, reference::W_TOL),
        Check::flag("certificate", cert.passed),
        Check::within("duality gap", opt.solution.gap, 0.0, tol),
    ];
    let value = json!({
        "value": opt.value,
        "m0": opt.m0(),
        "m1": opt.m1(),
        "m2": opt.povm.element(2),
        "iterations": opt.solution.iterations,
        "gap": opt.solution.gap,
        "certificate": cert,
    });
    Ok(ReproResult::new("wopt", json!({"tol": tol}), value, "POVM optimum w of the three-outcome W problem", checks))
}

pub fn wproj() -> Result<ReproResult, Error> {
    let opt = maximize_w_projective();
    let target = RankProfile::new(1, 1)?;
    let checks = vec![
        Check::within("max W over projectors", opt.value, 1.0, 0.0),
        Check::flag("(1,1) attains the maximum", opt.ties.contains(&target)),
    ];
    Ok(ReproResult::new(
        "wproj",
        json!({}),
        to_value(&opt)?,
        "projective maximum of W over the six rank cases",
        checks,
    ))
}

/// Inequalities addressable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inequality {
    Ich,
    I3,
    Ich3,
    Derived(RankProfile),
}

impl Inequality {
    pub fn parse(s: &str) -> Result<Self, Error> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "ich" => Self::Ich,
            "i3" => Self::I3,
            "ich3" => Self::Ich3,
            other => Self::Derived(RankProfile::parse(other)?),
        })
    }

    pub fn name(self) -> String {
        match self {
            Self::Ich => "ich".into(),
            Self::I3 => "i3".into(),
            Self::Ich3 => "ich3".into(),
            Self::Derived(p) => p.label().to_ascii_lowercase(),
        }
    }

    /// Functional and its stated local bound.
    pub fn build(self, c: f64) -> Result<(BellFunctional, f64), Error> {
        Ok(match self {
            Self::Ich => (build_ich(), 0.0),
            Self::I3 => (build_i3(), 1.0),
            Self::Ich3 => (build_ich3(c)?, 1.0),
            Self::Derived(p) => {
                let d = build_derived(p, c)?;
                (d.functional, d.stated_bound)
            }
        })
    }
}

pub fn local_bound_cmd(ineq: Inequality, c: f64) -> Result<ReproResult, Error> {
    let (f, stated) = ineq.build(c)?;
    let lb = local_bound(&f)?;
    let checks = vec![Check::within("local bound", lb.value, stated, 1e-12)];
    Ok(ReproResult::new(
        "local-bound",
        json!({"ineq": ineq.name(), "c": c}),
        json!({"value": lb.value, "strategy": lb.strategy}),
        "local bound by enumeration of deterministic strategies",
        checks,
    ))
}

const PSIPLUS_RESTARTS: usize = 20;

/// Best ψ⁺-fixed see-saw value over `cfg`'s restarts, run in parallel.
fn parallel_seesaw(f: &BellFunctional, cfg: &SeesawConfig, jobs: usize) -> Result<OptimizationReport, Error> {
    let runs = par_map(jobs, cfg.total_runs(), |i| seesaw_run(f, cfg, i));
    let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(best_report(runs).expect("at least one restart"))
}

pub fn psiplus_table(c: f64, seed: u64, jobs: usize) -> Result<ReproResult, Error> {
    let state = StateMode::Fixed(psi_plus().density());
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for p in RankProfile::ALL {
        let closed = psiplus_case_max(p, c)?;
        let d = build_derived(p, c)?;
        let mut cfg = SeesawConfig::rank_one(&d.functional, (2, 2), state.clone());
        cfg.restarts = PSIPLUS_RESTARTS;
        cfg.seed = seed;
        let r = parallel_seesaw(&d.functional, &cfg, jobs)?;
        checks.push(Check::within(format!("{} see-saw", p.label()), r.value, closed, reference::SEESAW_AGREEMENT));
        rows.push(json!({"case": p.label(), "closed_form": closed, "seesaw": r.value}));
    }
    let best = projective_max_psiplus_cases(c)?;
    let f = build_ich3(c)?;
    let mut cfg = SeesawConfig::rank_one(&f, (2, 2), state);
    cfg.restarts = PSIPLUS_RESTARTS;
    cfg.seed = seed;
    let full = parallel_seesaw(&f, &cfg, jobs)?;
    checks.push(Check::within("ich3 projective see-saw", full.value, best.value, reference::SEESAW_AGREEMENT));
    let argmax: Vec<String> = best.argmax.iter().map(|p| p.label()).collect();
    checks.push(Check::flag("I10 dominates", argmax == ["I10"]));
    Ok(ReproResult::new(
        "psiplus-table",
        json!({"c": c, "seed": seed, "restarts": PSIPLUS_RESTARTS}),
        json!({"rows": rows, "projective_max": best.value, "argmax": argmax, "ich3_seesaw": full.value}),
        "maxima of the derived inequalities on the maximally entangled state",
        checks,
    ))
}

pub fn crossover(adv: &PovmAdvantage) -> Result<ReproResult, Error> {
    let x = adv.crossover()?;
    let checks = vec![
        Check::within("closed form", x.closed_form, reference::CROSSOVER, reference::CROSSOVER_TOL),
        Check::within("bisection agreement", x.bisection, x.closed_form, reference::CROSSOVER_AGREEMENT),
    ];
    Ok(ReproResult::new(
        "crossover",
        json!({"w": adv.w}),
        to_value(&x)?,
        "c where the POVM bound on psi+ overtakes the projective maximum",
        checks,
    ))
}

/// Qubit table rows, all restarts of all rows spread over `jobs` workers.
pub fn qubit_rows(c: f64, restarts: usize, seed: u64, jobs: usize) -> Result<Vec<TableRow>, Error> {
    let profiles = table_profiles();
    let setups = profiles
        .iter()
        .map(|&p| Ok((build_derived(p, c)?.functional, row_config(p, c, restarts, seed)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let per_row = restarts.max(1);
    let runs = par_map(jobs, profiles.len() * per_row, |k| {
        let (f, cfg) = &setups[k / per_row];
        seesaw_run(f, cfg, k % per_row)
    });
    let mut runs = runs.into_iter();
    profiles
        .iter()
        .map(|&p| {
            let reports = runs.by_ref().take(per_row).collect::<Result<Vec<_>, _>>()?;
            Ok(row_from_reports(p, c, reports)?)
        })
        .collect()
}

pub fn qubit_table_cmd(c: f64, restarts: usize, seed: u64, jobs: usize) -> Result<ReproResult, Error> {
    let rows = qubit_rows(c, restarts, seed, jobs)?;
    let mut checks = Vec::new();
    if c == reference::QUBIT_TABLE_C {
        for (row, want) in rows.iter().zip(reference::QUBIT_TABLE) {
            checks.push(Check::within(row.profile.label(), row.value, want, reference::QUBIT_TABLE_TOL));
        }
    }
    checks.push(Check::within("I02 equals I20", rows[4].value, rows[5].value, 1e-6));
    checks.push(Check::flag("all runs monotone", rows.iter().all(|r| r.report.history.windows(2).all(|w| w[1] >= w[0]))));
    let table: Vec<Value> = rows
        .iter()
        .map(|r| json!({"case": r.profile.label(), "value": r.value, "local_bound": r.stated_bound, "restart": r.report.restart}))
        .collect();
    Ok(ReproResult::new(
        "qubit-table",
        json!({"c": c, "restarts": restarts, "seed": seed}),
        json!({"rows": table}),
        "two-qubit projective maxima of the derived inequalities",
        checks,
    ))
}

pub fn povm_bound(adv: &PovmAdvantage, c: f64) -> Result<ReproResult, Error> {
    let bound = adv.lower_bound_psiplus(c)?;
    let proj = projective_max_psiplus(c)?;
    let mut checks = Vec::new();
    if c == reference::QUBIT_TABLE_C {
        checks.push(Check::within("POVM bound", bound, reference::POVM_BOUND_100, reference::POVM_BOUND_TOL));
        let best_qubit = reference::QUBIT_TABLE.iter().copied().fold(f64::MIN, f64::max);
        checks.push(Check::at_least("gap over qubit projective", bound - best_qubit, 0.02, 0.0));
    }
    if c > 3.0 {
        checks.push(Check::at_least("gap over psi+ projective", bound - proj, 0.0, 0.0));
    }
    Ok(ReproResult::new(
        "povm-bound",
        json!({"c": c, "w": adv.w}),
        json!({"value": bound, "projective_psiplus": proj, "gap": bound - proj}),
        "POVM lower bound on psi+",
        checks,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct NoiseCurves {
    pub curves: Vec<NoiseCurve>,
}

impl NoiseCurves {
    pub fn get(&self, reading: NoiseReading) -> &NoiseCurve {
        self.curves.iter().find(|c| c.reading == reading).expect("both readings computed")
    }
}

pub fn noise_curves(adv: &PovmAdvantage, lo: f64, hi: f64, steps: usize, jobs: usize) -> Result<NoiseCurves, Error> {
    let grid = linear_grid(lo, hi, steps)?;
    if let Some(&bad) = grid.iter().find(|&&c| c <= 3.0) {
        return Err(bellforge_core::Error::Domain(format!("noise curve requires c > 3, got {bad}")).into());
    }
    let curves = NoiseReading::ALL
        .iter()
        .map(|&reading| {
            let points = par_map(jobs, grid.len(), |i| noise_threshold(adv, reading, grid[i]));
            let points = points.into_iter().collect::<Result<Vec<_>, _>>()?;
            Ok(curve_from_points(adv, reading, points)?)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(NoiseCurves { curves })
}

pub fn noise_curve_cmd(curves: &NoiseCurves, lo: f64, hi: f64, steps: usize) -> Result<ReproResult, Error> {
    let matching = curves.get(NoiseReading::NoiseFree);
    let mut checks = Vec::new();
    if lo < reference::NOISE_C && reference::NOISE_C < hi {
        match matching.refined_max {
            Some(m) => {
                checks.push(Check::within("maximum p", m.p, reference::NOISE_P, reference::NOISE_P_TOL));
                checks.push(Check::within("maximizing c", m.c, reference::NOISE_C, reference::NOISE_C_TOL));
            }
            None => checks.push(Check::flag("interior maximum", false)),
        }
    }
    let summary: Vec<Value> = curves
        .curves
        .iter()
        .map(|c| json!({"reading": c.reading.name(), "grid_max": c.grid_max, "refined_max": c.refined_max}))
        .collect();
    Ok(ReproResult::new(
        "noise-curve",
        json!({"c_min": lo, "c_max": hi, "steps": steps}),
        json!({"maxima": summary, "curves": curves.curves}),
        "white-noise threshold curve of the POVM advantage",
        checks,
    ))
}

pub fn neumark_check(seed: u64, trials: usize) -> Result<ReproResult, Error> {
    let mut worst: f64 = 0.0;
    let mut projector_err: f64 = 0.0;
    for t in 0..trials {
        let mut rng = stream_rng(seed, t as u64);
        let povm = random_extremal_qubit_povm(&mut rng, false);
        let d = neumark_dilate(&povm)?;
        for p in &d.projectors {
            projector_err = projector_err.max((&(p.matrix() * p.matrix()) - p.matrix()).max_abs());
        }
        let rho = random_pure_state(&mut rng, 2, false).density();
        let probs = d.probabilities(&rho)?;
        for (a, p) in probs.iter().enumerate() {
            let want = bellforge_core::linalg::frob_inner(rho.operator(), povm.element(a))?;
            worst = worst.max((p - want).abs());
        }
    }
    let checks = vec![
        Check::within("statistics deviation", worst, 0.0, reference::NEUMARK_TOL),
        Check::within("projector idempotence", projector_err, 0.0, reference::NEUMARK_TOL),
    ];
    Ok(ReproResult::new(
        "neumark-check",
        json!({"seed": seed, "trials": trials}),
        json!({"max_deviation": worst, "max_idempotence_error": projector_err}),
        "projective qutrit realization of extremal three-outcome qubit POVMs",
        checks,
    ))
}

/// Commands that need the SDP solver.
pub const SDP_COMMANDS: [&str; 4] = ["wopt", "crossover", "povm-bound", "noise-curve"];

/// Every command name accepted by `all --skip`.
pub const COMMANDS: [&str; 9] = [
    "wopt",
    "wproj",
    "local-bound",
    "psiplus-table",
    "crossover",
    "qubit-table",
    "povm-bound",
    "noise-curve",
    "neumark-check",
];

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryLine {
    pub command: String,
    pub reference: String,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct AllReport {
    pub seed: u64,
    pub summary: Vec<SummaryLine>,
    pub results: Vec<ReproResult>,
    pub pass: bool,
}

pub fn run_all(seed: u64, skip: &[String], jobs: usize) -> Result<AllReport, Error> {
    let mut skipped: Vec<&str> = Vec::new();
    for s in skip {
        match s.as_str() {
            "sdp" => skipped.extend(SDP_COMMANDS),
            name if COMMANDS.contains(&name) => skipped.push(COMMANDS[COMMANDS.iter().position(|c| *c == name).unwrap()]),
            other => return Err(Error::Usage(format!("unknown command to skip: {other}"))),
        }
    }
    let needs_sdp = SDP_COMMANDS.iter().any(|c| !skipped.contains(c));
    let adv = if needs_sdp { Some(PovmAdvantage::compute(1e-10)?) } else { None };
    let adv = || adv.as_ref().expect("computed when an SDP command runs");
    let mut results = Vec::new();
    let mut summary = Vec::new();
    for name in COMMANDS {
        if skipped.contains(&name) {
            let reason = if SDP_COMMANDS.contains(&name) { "skipped, needs the SDP solver" } else { "skipped on request" };
            summary.push(SummaryLine { command: name.into(), reference: reason.into(), status: Status::Skipped });
            continue;
        }
        let batch = match name {
            "wopt" => vec![wopt(1e-10)?],
            "wproj" => vec![wproj()?],
            "local-bound" => {
                let mut v = vec![local_bound_cmd(Inequality::Ich, 1.0)?];
                for c in [0.5, 1.0, 3.0, 100.0] {
                    v.push(local_bound_cmd(Inequality::Ich3, c)?);
                }
                v
            }
            "psiplus-table" => vec![psiplus_table(100.0, seed, jobs)?],
            "crossover" => vec![crossover(adv())?],
            "qubit-table" => vec![qubit_table_cmd(100.0, 50, seed, jobs)?],
            "povm-bound" => vec![povm_bound(adv(), 100.0)?],
            "noise-curve" => {
                let curves = noise_curves(adv(), 3.05, 12.0, 200, jobs)?;
                vec![noise_curve_cmd(&curves, 3.05, 12.0, 200)?]
            }
            "neumark-check" => vec![neumark_check(seed, 100)?],
            _ => unreachable!(),
        };
        for r in batch {
            let status = if r.pass { Status::Pass } else { Status::Fail };
            summary.push(SummaryLine { command: r.command.clone(), reference: r.reference.clone(), status });
            results.push(r);
        }
    }
    let pass = results.iter().all(|r| r.pass);
    Ok(AllReport { seed, summary, results, pass })
}

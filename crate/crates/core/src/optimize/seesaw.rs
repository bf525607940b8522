//! Alternating maximization over state, Alice's and Bob's measurements.
//!
//! Each step is optimal given the other variables, so the value cannot
//! decrease; a step whose recomputed value falls below the current one by
//! round-off is rejected, which keeps the history monotone.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::wopt::{povm_from_blocks, povm_step_problem};
use crate::bell::{bell_operator, bell_operator_bob, evaluate, full_bell_operator, BellFunctional, RankProfile};
use crate::linalg::{herm_eig, HermitianOperator, Matrix};
use crate::quantum::random::{random_extremal_qubit_povm, random_projector, random_pure_state, random_rank_one_povm, stream_rng};
use crate::quantum::{DensityMatrix, Povm, PureState};
use crate::sdp::{self, derealify, realify, real_part, SdpStatus};
use crate::{Error, Result};

pub const DEFAULT_RESTARTS: usize = 50;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 500;
const POVM_STEP_TOL: f64 = 1e-10;

/// Admissible measurements for one setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementClass {
    /// Any projective measurement. Binary settings use the projector onto
    /// the positive eigenspace; ternary qubit settings the best rank profile.
    Projective,
    /// Binary measurement with rank-1 projectors.
    RankOne,
    /// Ternary qubit projective measurement with the given ranks.
    Profile(RankProfile),
    /// Arbitrary POVM, updated by an SDP.
    Povm,
    /// Never updated.
    Fixed(Povm),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateMode {
    Fixed(DensityMatrix),
    /// Pure state updated to the top eigenvector of the Bell operator.
    Free,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub dims: (usize, usize),
    pub alice: Vec<MeasurementClass>,
    pub bob: Vec<MeasurementClass>,
    pub state: StateMode,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    /// Draw real starting points; with real functionals every step then
    /// stays real.
    pub real: bool,
    /// Extra deterministic starting measurements, tried after the random
    /// restarts.
    pub starts: Vec<(Vec<Povm>, Vec<Povm>)>,
}

impl SeesawConfig {
    pub fn new(dims: (usize, usize), alice: Vec<MeasurementClass>, bob: Vec<MeasurementClass>, state: StateMode) -> Self {
        Self {
            dims,
            alice,
            bob,
            state,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            real: true,
            starts: Vec::new(),
        }
    }

    /// Every binary setting rank-1 projective.
    pub fn rank_one(f: &BellFunctional, dims: (usize, usize), state: StateMode) -> Self {
        let sc = f.scenario();
        let class = |r: usize| if r == 2 { MeasurementClass::RankOne } else { MeasurementClass::Projective };
        Self::new(
            dims,
            sc.alice_outcomes.iter().map(|&r| class(r)).collect(),
            sc.bob_outcomes.iter().map(|&r| class(r)).collect(),
            state,
        )
    }

    pub fn total_runs(&self) -> usize {
        self.restarts + self.starts.len()
    }

    fn validate(&self, f: &BellFunctional) -> Result<()> {
        let (da, db) = self.dims;
        if !(2..=3).contains(&da) || !(2..=3).contains(&db) {
            return Err(Error::InvalidClass(format!("local dimensions must be 2 or 3, got {da}x{db}")));
        }
        if self.restarts + self.starts.len() == 0 {
            return Err(Error::InvalidClass("at least one restart required".into()));
        }
        let sc = f.scenario();
        if self.alice.len() != sc.alice_settings() || self.bob.len() != sc.bob_settings() {
            return Err(Error::InvalidClass("one measurement class per setting required".into()));
        }
        for (classes, outcomes, d) in [(&self.alice, &sc.alice_outcomes, da), (&self.bob, &sc.bob_outcomes, db)] {
            for (x, (cl, &r)) in classes.iter().zip(outcomes).enumerate() {
                check_class(cl, r, d).map_err(|e| Error::InvalidClass(format!("setting {x}: {e}")))?;
            }
        }
        if let StateMode::Fixed(rho) = &self.state {
            if rho.dim() != da * db {
                return Err(Error::Dimension(format!("fixed state of dimension {} for {da}x{db}", rho.dim())));
            }
        }
        Ok(())
    }
}

fn check_class(cl: &MeasurementClass, outcomes: usize, dim: usize) -> core::result::Result<(), &'static str> {
    match cl {
        MeasurementClass::RankOne if outcomes != 2 => Err("rank-1 class needs a binary setting"),
        MeasurementClass::Projective if outcomes > 3 || (outcomes == 3 && dim != 2) => {
            Err("projective class supports binary settings or ternary qubit settings")
        }
        MeasurementClass::Profile(_) if outcomes != 3 || dim != 2 => Err("rank profile needs a ternary qubit setting"),
        MeasurementClass::Fixed(p) if p.outcomes() != outcomes || p.dim() != dim => Err("fixed measurement has the wrong shape"),
        _ => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub value: f64,
    pub state: DensityMatrix,
    /// Present when the state is pure.
    pub pure_state: Option<PureState>,
    pub alice: Vec<Povm>,
    pub bob: Vec<Povm>,
    pub iterations: usize,
    pub restarts_used: usize,
    /// Index of the restart that produced this report.
    pub restart: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

fn binary(p: HermitianOperator) -> Result<Povm> {
    let rest = HermitianOperator::identity(p.dim()).sub(&p)?;
    Ok(Povm::from_elements_unchecked(vec![p, rest]))
}

fn top_projector(g: &HermitianOperator) -> Result<HermitianOperator> {
    let e = herm_eig(g)?;
    Ok(HermitianOperator::projector(&e.vector(e.values.len() - 1)))
}

fn positive_projector(g: &HermitianOperator) -> Result<HermitianOperator> {
    let e = herm_eig(g)?;
    Ok(e.map_spectrum(|l| if l > 0.0 { 1.0 } else { 0.0 }))
}

/// Ternary qubit measurement with the given ranks maximizing
/// `Σ_a tr(M_a G_a)`.
fn profile_step(profile: RankProfile, g: &[HermitianOperator]) -> Result<Povm> {
    let ranks = [profile.first(), profile.second(), profile.third()];
    let mut elems = vec![HermitianOperator::zero(2); 3];
    if let Some(full) = ranks.iter().position(|&r| r == 2) {
        elems[full] = HermitianOperator::identity(2);
    } else {
        let ones: Vec<usize> = (0..3).filter(|&a| ranks[a] == 1).collect();
        let (a, b) = (ones[0], ones[1]);
        let p = top_projector(&g[a].sub(&g[b])?)?;
        elems[b] = HermitianOperator::identity(2).sub(&p)?;
        elems[a] = p;
    }
    Ok(Povm::from_elements_unchecked(elems))
}

fn setting_score(g: &[HermitianOperator], m: &Povm) -> Result<f64> {
    let mut v = 0.0;
    for (gk, e) in g.iter().zip(m.elements()) {
        v += crate::linalg::frob_inner(gk, e)?;
    }
    Ok(v)
}

fn povm_step(g: &[HermitianOperator]) -> Result<Povm> {
    let real = g.iter().all(|x| x.matrix().is_real());
    let objectives: Vec<_> = if real {
        g.iter().map(real_part).collect()
    } else {
        g.iter().map(|x| realify(x).scaled(0.5)).collect()
    };
    let problem = povm_step_problem(&objectives)?;
    let sol = sdp::solve(&problem, POVM_STEP_TOL)?;
    if sol.status != SdpStatus::Optimal && sol.status != SdpStatus::NumericalFailure {
        return Err(Error::Solver(format!("measurement step ended with {:?}", sol.status)));
    }
    if real {
        povm_from_blocks(&sol.primal)
    } else {
        let mut elems: Vec<HermitianOperator> = sol.primal.iter().map(derealify).collect::<Result<_>>()?;
        elems.pop();
        Povm::completed(elems)
    }
}

/// Best measurement in a class for effective operators `g`.
fn measurement_step(cl: &MeasurementClass, g: &[HermitianOperator], current: &Povm) -> Result<Povm> {
    match cl {
        MeasurementClass::Fixed(_) => Ok(current.clone()),
        MeasurementClass::RankOne => binary(top_projector(&g[0].sub(&g[1])?)?),
        MeasurementClass::Projective if g.len() == 2 => binary(positive_projector(&g[0].sub(&g[1])?)?),
        MeasurementClass::Projective if g.len() == 1 => Ok(current.clone()),
        MeasurementClass::Projective => {
            let mut best: Option<(f64, Povm)> = None;
            for p in RankProfile::ALL {
                let m = profile_step(p, g)?;
                let v = setting_score(g, &m)?;
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, m));
                }
            }
            Ok(best.expect("six profiles").1)
        }
        MeasurementClass::Profile(p) => profile_step(*p, g),
        MeasurementClass::Povm => povm_step(g),
    }
}

fn random_measurement<R: Rng + ?Sized>(rng: &mut R, cl: &MeasurementClass, outcomes: usize, dim: usize, real: bool) -> Result<Povm> {
    Ok(match cl {
        MeasurementClass::Fixed(p) => p.clone(),
        MeasurementClass::Povm if outcomes == 3 && dim == 2 => random_extremal_qubit_povm(rng, real),
        MeasurementClass::Povm if outcomes >= dim => random_rank_one_povm(rng, dim, outcomes, real)?,
        MeasurementClass::Profile(p) => {
            // random direction realized in the profile
            let proj = random_projector(rng, 2, real);
            let g = [proj.clone(), proj.scale(-1.0), HermitianOperator::zero(2)];
            profile_step(*p, &g)?
        }
        _ if outcomes == 1 => Povm::deterministic(dim, 1, 0),
        _ if outcomes == 2 => binary(random_projector(rng, dim, real))?,
        _ => {
            let proj = random_projector(rng, 2, real);
            profile_step(RankProfile::new(1, 1)?, &[proj.clone(), proj.scale(-1.0), HermitianOperator::zero(2)])?
        }
    })
}

struct Run<'a> {
    f: &'a BellFunctional,
    cfg: &'a SeesawConfig,
    rho: DensityMatrix,
    pure: Option<PureState>,
    alice: Vec<Povm>,
    bob: Vec<Povm>,
    value: f64,
}

impl Run<'_> {
    fn eval(&self, rho: &DensityMatrix, alice: &[Povm], bob: &[Povm]) -> Result<f64> {
        evaluate(self.f, rho, alice, bob)
    }

    fn state_step(&mut self) -> Result<()> {
        if !matches!(self.cfg.state, StateMode::Free) {
            return Ok(());
        }
        let op = full_bell_operator(self.f, &self.alice, &self.bob)?;
        let e = herm_eig(&op)?;
        let v = e.vector(e.values.len() - 1);
        let psi = PureState::normalized(v)?;
        let rho = psi.density();
        let value = self.eval(&rho, &self.alice, &self.bob)?;
        if value >= self.value {
            self.rho = rho;
            self.pure = Some(psi);
            self.value = value;
        }
        Ok(())
    }

    fn alice_step(&mut self) -> Result<()> {
        let g = bell_operator(self.f, &self.rho, &self.bob)?;
        let mut next = self.alice.clone();
        for (x, cl) in self.cfg.alice.iter().enumerate() {
            next[x] = measurement_step(cl, &g.operators[x], &self.alice[x])?;
        }
        let value = self.eval(&self.rho, &next, &self.bob)?;
        if value >= self.value {
            self.alice = next;
            self.value = value;
        }
        Ok(())
    }

    fn bob_step(&mut self) -> Result<()> {
        let g = bell_operator_bob(self.f, &self.rho, &self.alice)?;
        let mut next = self.bob.clone();
        for (y, cl) in self.cfg.bob.iter().enumerate() {
            next[y] = measurement_step(cl, &g.operators[y], &self.bob[y])?;
        }
        let value = self.eval(&self.rho, &self.alice, &next)?;
        if value >= self.value {
            self.bob = next;
            self.value = value;
        }
        Ok(())
    }
}

/// A single see-saw run from restart `index`: random restarts come first,
/// then the configured extra starts.
pub fn seesaw_run(f: &BellFunctional, cfg: &SeesawConfig, index: usize) -> Result<OptimizationReport> {
    cfg.validate(f)?;
    let sc = f.scenario();
    let (da, db) = cfg.dims;
    let mut rng = stream_rng(cfg.seed, index as u64);
    let (alice, bob) = if index < cfg.restarts {
        let alice = cfg
            .alice
            .iter()
            .zip(&sc.alice_outcomes)
            .map(|(cl, &r)| random_measurement(&mut rng, cl, r, da, cfg.real))
            .collect::<Result<Vec<_>>>()?;
        let bob = cfg
            .bob
            .iter()
            .zip(&sc.bob_outcomes)
            .map(|(cl, &r)| random_measurement(&mut rng, cl, r, db, cfg.real))
            .collect::<Result<Vec<_>>>()?;
        (alice, bob)
    } else {
        cfg.starts
            .get(index - cfg.restarts)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("restart index {index} out of range")))?
    };
    let (rho, pure) = match &cfg.state {
        StateMode::Fixed(r) => (r.clone(), None),
        StateMode::Free => {
            let psi = random_pure_state(&mut rng, da * db, cfg.real);
            (psi.density(), Some(psi))
        }
    };
    let value = evaluate(f, &rho, &alice, &bob)?;
    let mut run = Run { f, cfg, rho, pure, alice, bob, value };
    let mut history = vec![run.value];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        let before = run.value;
        run.state_step()?;
        run.alice_step()?;
        run.bob_step()?;
        history.push(run.value);
        if run.value - before < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(OptimizationReport {
        value: run.value,
        state: run.rho,
        pure_state: run.pure,
        alice: run.alice,
        bob: run.bob,
        iterations,
        restarts_used: 1,
        restart: index,
        converged,
        history,
    })
}

/// Best of several reports; ties keep the lowest restart index. The
/// returned report counts every run in `restarts_used`.
pub fn best_report(reports: impl IntoIterator<Item = OptimizationReport>) -> Option<OptimizationReport> {
    let mut count = 0;
    let mut best: Option<OptimizationReport> = None;
    for r in reports {
        count += 1;
        let better = match &best {
            None => true,
            Some(b) => r.value > b.value || (r.value == b.value && r.restart < b.restart),
        };
        if better {
            best = Some(r);
        }
    }
    best.map(|mut b| {
        b.restarts_used = count;
        b
    })
}

/// All restarts in sequence; see [`seesaw_run`] for a single one.
pub fn seesaw(f: &BellFunctional, cfg: &SeesawConfig) -> Result<OptimizationReport> {
    cfg.validate(f)?;
    let reports = (0..cfg.total_runs()).map(|i| seesaw_run(f, cfg, i)).collect::<Result<Vec<_>>>()?;
    Ok(best_report(reports).expect("at least one run"))
}

/// Real 2×2 matrix helper for tests and callers building fixed settings.
pub fn real_qubit_operator(entries: [f64; 4]) -> Result<HermitianOperator> {
    HermitianOperator::new(Matrix::from_real(2, 2, &entries)?)
}

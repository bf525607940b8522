//! Bell functionals over marginal and joint conditional probabilities.
//!
//! A functional is `constant + Σ coeff · p(event)` where an event is a
//! marginal `p_A(a|x)`, a marginal `p_B(b|y)` or a joint `p(ab|xy)`.

mod builders;
mod local;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::HermitianOperator;
use crate::quantum::{self, contract_alice, contract_bob, expectation_product, DensityMatrix, Povm};
use crate::{Error, Result};

pub use builders::{build_derived, build_i3, build_ich, build_ich3, DerivedInequality, RankProfile};
pub use local::{local_bound, local_bound_shard, local_bound_with_cap, LocalBound, ENUMERATION_CAP};

/// Measurement settings and outcome counts of both parties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub alice_outcomes: Vec<usize>,
    pub bob_outcomes: Vec<usize>,
}

impl Scenario {
    pub fn new(alice_outcomes: Vec<usize>, bob_outcomes: Vec<usize>) -> Result<Self> {
        if alice_outcomes.is_empty() || bob_outcomes.is_empty() {
            return Err(Error::Shape("each party needs at least one setting".into()));
        }
        if alice_outcomes.iter().chain(&bob_outcomes).any(|&r| r == 0) {
            return Err(Error::Shape("outcome counts must be positive".into()));
        }
        Ok(Self { alice_outcomes, bob_outcomes })
    }

    pub fn alice_settings(&self) -> usize {
        self.alice_outcomes.len()
    }

    pub fn bob_settings(&self) -> usize {
        self.bob_outcomes.len()
    }

    /// Number of deterministic strategies `Π r_A(x) · Π r_B(y)`.
    pub fn strategy_count(&self) -> u128 {
        self.alice_outcomes
            .iter()
            .chain(&self.bob_outcomes)
            .fold(1u128, |acc, &r| acc.saturating_mul(r as u128))
    }

    /// Warnings for scenarios that cannot show any violation.
    pub fn lint(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.alice_settings() < 2 {
            out.push("Alice has fewer than two settings; no violation is possible".into());
        }
        if self.bob_settings() < 2 {
            out.push("Bob has fewer than two settings; no violation is possible".into());
        }
        out
    }

    fn check(&self, e: &Event) -> Result<()> {
        let alice_ok = |a: usize, x: usize| x < self.alice_settings() && a < self.alice_outcomes[x];
        let bob_ok = |b: usize, y: usize| y < self.bob_settings() && b < self.bob_outcomes[y];
        let ok = match *e {
            Event::Alice { a, x } => alice_ok(a, x),
            Event::Bob { b, y } => bob_ok(b, y),
            Event::Joint { a, x, b, y } => alice_ok(a, x) && bob_ok(b, y),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Shape(format!("{e:?} outside scenario {:?}/{:?}", self.alice_outcomes, self.bob_outcomes)))
        }
    }
}

/// Probability entering a functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    /// `p_A(a|x)`
    Alice { a: usize, x: usize },
    /// `p_B(b|y)`
    Bob { b: usize, y: usize },
    /// `p(ab|xy)`
    Joint { a: usize, x: usize, b: usize, y: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub event: Event,
    pub coeff: f64,
}

impl Term {
    pub fn alice(a: usize, x: usize, coeff: f64) -> Self {
        Self { event: Event::Alice { a, x }, coeff }
    }
    pub fn bob(b: usize, y: usize, coeff: f64) -> Self {
        Self { event: Event::Bob { b, y }, coeff }
    }
    pub fn joint(a: usize, x: usize, b: usize, y: usize, coeff: f64) -> Self {
        Self { event: Event::Joint { a, x, b, y }, coeff }
    }
}

/// Linear functional of a behaviour, with coefficients pre-summed and
/// ordered by event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "FunctionalRecord", try_from = "FunctionalRecord")]
pub struct BellFunctional {
    scenario: Scenario,
    constant: f64,
    terms: Vec<Term>,
}

impl BellFunctional {
    pub fn new(scenario: Scenario, constant: f64, terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        if !constant.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut merged: BTreeMap<Event, f64> = BTreeMap::new();
        for t in terms {
            scenario.check(&t.event)?;
            if !t.coeff.is_finite() {
                return Err(Error::NonFinite);
            }
            *merged.entry(t.event).or_insert(0.0) += t.coeff;
        }
        let terms = merged.into_iter().map(|(event, coeff)| Term { event, coeff }).collect();
        Ok(Self { scenario, constant, terms })
    }

    pub fn zero(scenario: Scenario) -> Self {
        Self { scenario, constant: 0.0, terms: Vec::new() }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn coefficient(&self, event: Event) -> f64 {
        self.terms.iter().find(|t| t.event == event).map_or(0.0, |t| t.coeff)
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            scenario: self.scenario.clone(),
            constant: self.constant * k,
            terms: self.terms.iter().map(|t| Term { event: t.event, coeff: t.coeff * k }).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.scenario != other.scenario {
            return Err(Error::Shape("functionals over different scenarios".into()));
        }
        Self::new(
            self.scenario.clone(),
            self.constant + other.constant,
            self.terms.iter().chain(&other.terms).copied(),
        )
    }

    pub fn with_constant(&self, constant: f64) -> Self {
        Self { constant, ..self.clone() }
    }

    /// Same functional viewed in a larger scenario (settings keep their
    /// indices).
    pub fn embed(&self, scenario: Scenario) -> Result<Self> {
        Self::new(scenario, self.constant, self.terms.iter().copied())
    }

    /// Renames Alice's outcomes at setting `x`: outcome `a` becomes `perm[a]`.
    pub fn relabel_alice(&self, x: usize, perm: &[usize]) -> Result<Self> {
        self.relabel(|e| match e {
            Event::Alice { a, x: xx } if xx == x => Event::Alice { a: perm[a], x },
            Event::Joint { a, x: xx, b, y } if xx == x => Event::Joint { a: perm[a], x, b, y },
            other => other,
        })
    }

    /// Renames Bob's outcomes at setting `y`.
    pub fn relabel_bob(&self, y: usize, perm: &[usize]) -> Result<Self> {
        self.relabel(|e| match e {
            Event::Bob { b, y: yy } if yy == y => Event::Bob { b: perm[b], y },
            Event::Joint { a, x, b, y: yy } if yy == y => Event::Joint { a, x, b: perm[b], y },
            other => other,
        })
    }

    fn relabel(&self, f: impl Fn(Event) -> Event) -> Result<Self> {
        Self::new(
            self.scenario.clone(),
            self.constant,
            self.terms.iter().map(|t| Term { event: f(t.event), coeff: t.coeff }),
        )
    }

    /// Value on a deterministic strategy.
    pub fn deterministic_value(&self, s: &Strategy) -> f64 {
        let mut v = self.constant;
        for t in &self.terms {
            let hit = match t.event {
                Event::Alice { a, x } => s.alice[x] == a,
                Event::Bob { b, y } => s.bob[y] == b,
                Event::Joint { a, x, b, y } => s.alice[x] == a && s.bob[y] == b,
            };
            if hit {
                v += t.coeff;
            }
        }
        v
    }

    fn check_measurements(&self, alice: &[Povm], bob: &[Povm]) -> Result<(usize, usize)> {
        let sc = &self.scenario;
        if alice.len() != sc.alice_settings() || bob.len() != sc.bob_settings() {
            return Err(Error::Shape(format!(
                "{} Alice and {} Bob measurements for a {}x{} setting scenario",
                alice.len(),
                bob.len(),
                sc.alice_settings(),
                sc.bob_settings()
            )));
        }
        for (x, m) in alice.iter().enumerate() {
            if m.outcomes() != sc.alice_outcomes[x] {
                return Err(Error::Shape(format!("Alice setting {x} has {} outcomes", m.outcomes())));
            }
        }
        for (y, m) in bob.iter().enumerate() {
            if m.outcomes() != sc.bob_outcomes[y] {
                return Err(Error::Shape(format!("Bob setting {y} has {} outcomes", m.outcomes())));
            }
        }
        let da = alice[0].dim();
        let db = bob[0].dim();
        if alice.iter().any(|m| m.dim() != da) || bob.iter().any(|m| m.dim() != db) {
            return Err(Error::Shape("measurements of one party differ in dimension".into()));
        }
        Ok((da, db))
    }
}

/// Deterministic local strategy: one output per setting and party.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Strategy {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl Strategy {
    /// The strategy realized by measurements that put the identity on the
    /// chosen outcome.
    pub fn as_measurements(&self, scenario: &Scenario, da: usize, db: usize) -> (Vec<Povm>, Vec<Povm>) {
        let alice = self
            .alice
            .iter()
            .enumerate()
            .map(|(x, &a)| Povm::deterministic(da, scenario.alice_outcomes[x], a))
            .collect();
        let bob = self
            .bob
            .iter()
            .enumerate()
            .map(|(y, &b)| Povm::deterministic(db, scenario.bob_outcomes[y], b))
            .collect();
        (alice, bob)
    }
}

/// Quantum value: constant plus Born-rule probabilities, with marginals
/// computed by padding the other party with the identity.
pub fn evaluate(f: &BellFunctional, rho: &DensityMatrix, alice: &[Povm], bob: &[Povm]) -> Result<f64> {
    let (da, db) = f.check_measurements(alice, bob)?;
    if da * db != rho.dim() {
        return Err(Error::Dimension(format!("{da}x{db} measurements on a state of dimension {}", rho.dim())));
    }
    let id_a = HermitianOperator::identity(da);
    let id_b = HermitianOperator::identity(db);
    let mut v = f.constant;
    for t in &f.terms {
        let p = match t.event {
            Event::Alice { a, x } => quantum::born_joint(rho, alice[x].element(a), &id_b)?,
            Event::Bob { b, y } => quantum::born_joint(rho, &id_a, bob[y].element(b))?,
            Event::Joint { a, x, b, y } => quantum::born_joint(rho, alice[x].element(a), bob[y].element(b))?,
        };
        v += t.coeff * p;
    }
    Ok(v)
}

/// One party's effective operators for fixed state and fixed measurements
/// of the other party: the value equals
/// `constant + Σ_{x,a} tr(M_a^x · operators[x][a])`.
#[derive(Clone, Debug)]
pub struct EffectiveOperators {
    pub constant: f64,
    pub operators: Vec<Vec<HermitianOperator>>,
}

impl EffectiveOperators {
    pub fn value(&self, measurements: &[Povm]) -> Result<f64> {
        let mut v = self.constant;
        for (ops, m) in self.operators.iter().zip(measurements) {
            for (g, e) in ops.iter().zip(m.elements()) {
                v += crate::linalg::frob_inner(g, e)?;
            }
        }
        Ok(v)
    }

    /// Contribution of a single setting.
    pub fn setting_value(&self, setting: usize, m: &Povm) -> Result<f64> {
        let mut v = 0.0;
        for (g, e) in self.operators[setting].iter().zip(m.elements()) {
            v += crate::linalg::frob_inner(g, e)?;
        }
        Ok(v)
    }
}

/// Alice-side effective operators `G_a^x` for fixed `ρ` and Bob measurements.
pub fn bell_operator(f: &BellFunctional, rho: &DensityMatrix, bob: &[Povm]) -> Result<EffectiveOperators> {
    let sc = f.scenario();
    if bob.len() != sc.bob_settings() {
        return Err(Error::Shape(format!("{} Bob measurements for {} settings", bob.len(), sc.bob_settings())));
    }
    let db = bob[0].dim();
    if !rho.dim().is_multiple_of(db) {
        return Err(Error::Dimension(format!("state dimension {} not divisible by {db}", rho.dim())));
    }
    let da = rho.dim() / db;
    let id_a = HermitianOperator::identity(da);
    let id_b = HermitianOperator::identity(db);
    let reduced = contract_bob(rho, da, &id_b)?;
    let contracted: Vec<Vec<HermitianOperator>> = bob
        .iter()
        .map(|m| m.elements().iter().map(|e| contract_bob(rho, da, e)).collect())
        .collect::<Result<_>>()?;
    let mut operators: Vec<Vec<HermitianOperator>> =
        sc.alice_outcomes.iter().map(|&r| vec![HermitianOperator::zero(da); r]).collect();
    let mut constant = f.constant;
    for t in &f.terms {
        match t.event {
            Event::Alice { a, x } => operators[x][a].add_scaled(t.coeff, &reduced)?,
            Event::Bob { b, y } => constant += t.coeff * expectation_product(rho, &id_a, bob[y].element(b))?,
            Event::Joint { a, x, b, y } => operators[x][a].add_scaled(t.coeff, &contracted[y][b])?,
        }
    }
    Ok(EffectiveOperators { constant, operators })
}

/// Bob-side effective operators for fixed `ρ` and Alice measurements.
pub fn bell_operator_bob(f: &BellFunctional, rho: &DensityMatrix, alice: &[Povm]) -> Result<EffectiveOperators> {
    let sc = f.scenario();
    if alice.len() != sc.alice_settings() {
        return Err(Error::Shape(format!(
            "{} Alice measurements for {} settings",
            alice.len(),
            sc.alice_settings()
        )));
    }
    let da = alice[0].dim();
    if !rho.dim().is_multiple_of(da) {
        return Err(Error::Dimension(format!("state dimension {} not divisible by {da}", rho.dim())));
    }
    let db = rho.dim() / da;
    let id_a = HermitianOperator::identity(da);
    let id_b = HermitianOperator::identity(db);
    let reduced = contract_alice(rho, &id_a, db)?;
    let contracted: Vec<Vec<HermitianOperator>> = alice
        .iter()
        .map(|m| m.elements().iter().map(|e| contract_alice(rho, e, db)).collect())
        .collect::<Result<_>>()?;
    let mut operators: Vec<Vec<HermitianOperator>> =
        sc.bob_outcomes.iter().map(|&r| vec![HermitianOperator::zero(db); r]).collect();
    let mut constant = f.constant;
    for t in &f.terms {
        match t.event {
            Event::Alice { a, x } => constant += t.coeff * expectation_product(rho, alice[x].element(a), &id_b)?,
            Event::Bob { b, y } => operators[y][b].add_scaled(t.coeff, &reduced)?,
            Event::Joint { a, x, b, y } => operators[y][b].add_scaled(t.coeff, &contracted[x][a])?,
        }
    }
    Ok(EffectiveOperators { constant, operators })
}

/// Full Bell operator `B` on `A ⊗ B` with `⟨ψ|B|ψ⟩` equal to the value.
pub fn full_bell_operator(f: &BellFunctional, alice: &[Povm], bob: &[Povm]) -> Result<HermitianOperator> {
    let (da, db) = f.check_measurements(alice, bob)?;
    let id_a = HermitianOperator::identity(da);
    let id_b = HermitianOperator::identity(db);
    let mut total = HermitianOperator::identity(da * db).scale(f.constant);
    for t in &f.terms {
        let op = match t.event {
            Event::Alice { a, x } => quantum::tensor(alice[x].element(a), &id_b)?,
            Event::Bob { b, y } => quantum::tensor(&id_a, bob[y].element(b))?,
            Event::Joint { a, x, b, y } => quantum::tensor(alice[x].element(a), bob[y].element(b))?,
        };
        total.add_scaled(t.coeff, &op)?;
    }
    Ok(total)
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    kind: TermKind,
    indices: Vec<usize>,
    coeff: f64,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum TermKind {
    MarginalA,
    MarginalB,
    Joint,
}

#[derive(Serialize, Deserialize)]
struct FunctionalRecord {
    scenario: Scenario,
    constant: f64,
    terms: Vec<TermRecord>,
}

impl From<BellFunctional> for FunctionalRecord {
    fn from(f: BellFunctional) -> Self {
        let terms = f
            .terms
            .iter()
            .map(|t| {
                let (kind, indices) = match t.event {
                    Event::Alice { a, x } => (TermKind::MarginalA, vec![a, x]),
                    Event::Bob { b, y } => (TermKind::MarginalB, vec![b, y]),
                    Event::Joint { a, x, b, y } => (TermKind::Joint, vec![a, x, b, y]),
                };
                TermRecord { kind, indices, coeff: t.coeff }
            })
            .collect();
        FunctionalRecord { scenario: f.scenario, constant: f.constant, terms }
    }
}

impl TryFrom<FunctionalRecord> for BellFunctional {
    type Error = Error;
    fn try_from(r: FunctionalRecord) -> Result<Self> {
        let scenario = Scenario::new(r.scenario.alice_outcomes, r.scenario.bob_outcomes)?;
        let mut terms = Vec::with_capacity(r.terms.len());
        for t in r.terms {
            let event = match (t.kind, t.indices.as_slice()) {
                (TermKind::MarginalA, &[a, x]) => Event::Alice { a, x },
                (TermKind::MarginalB, &[b, y]) => Event::Bob { b, y },
                (TermKind::Joint, &[a, x, b, y]) => Event::Joint { a, x, b, y },
                _ => return Err(Error::Shape(format!("term indices {:?} do not match kind", t.indices))),
            };
            terms.push(Term { event, coeff: t.coeff });
        }
        let f = BellFunctional::new(scenario, r.constant, terms)?;
        Ok(f)
    }
}

#[cfg(test)]
mod tests;

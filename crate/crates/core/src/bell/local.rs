use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{BellFunctional, Event, Strategy};
use crate::{Error, Result};

/// Largest strategy space enumerated by [`local_bound`].
pub const ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalBound {
    pub value: f64,
    /// Lexicographically smallest maximizer (Alice outputs first).
    pub strategy: Strategy,
}

impl LocalBound {
    /// Combines shard results, keeping the earlier strategy on ties.
    pub fn merge(self, other: LocalBound) -> LocalBound {
        let (lo, hi) = if self.strategy <= other.strategy { (self, other) } else { (other, self) };
        if hi.value > lo.value + tie_tol(lo.value) {
            hi
        } else {
            lo
        }
    }
}

fn tie_tol(v: f64) -> f64 {
    1e-12 * (1.0 + v.abs())
}

/// Dense coefficient tables for fast enumeration.
struct Tables {
    alice: Vec<Vec<f64>>,
    bob: Vec<Vec<f64>>,
    // joint[x][a][y][b]
    joint: Vec<Vec<Vec<Vec<f64>>>>,
}

impl Tables {
    fn new(f: &BellFunctional) -> Self {
        let sc = f.scenario();
        let mut alice: Vec<Vec<f64>> = sc.alice_outcomes.iter().map(|&r| vec![0.0; r]).collect();
        let mut bob: Vec<Vec<f64>> = sc.bob_outcomes.iter().map(|&r| vec![0.0; r]).collect();
        let mut joint: Vec<Vec<Vec<Vec<f64>>>> = sc
            .alice_outcomes
            .iter()
            .map(|&ra| vec![sc.bob_outcomes.iter().map(|&rb| vec![0.0; rb]).collect(); ra])
            .collect();
        for t in f.terms() {
            match t.event {
                Event::Alice { a, x } => alice[x][a] += t.coeff,
                Event::Bob { b, y } => bob[y][b] += t.coeff,
                Event::Joint { a, x, b, y } => joint[x][a][y][b] += t.coeff,
            }
        }
        Self { alice, bob, joint }
    }

    /// Best value and Bob response for a fixed Alice assignment.
    fn respond(&self, constant: f64, alice: &[usize], bob_out: &mut [usize]) -> f64 {
        let mut v = constant;
        for (x, &a) in alice.iter().enumerate() {
            v += self.alice[x][a];
        }
        for (y, row) in self.bob.iter().enumerate() {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for (b, &base) in row.iter().enumerate() {
                let mut s = base;
                for (x, &a) in alice.iter().enumerate() {
                    s += self.joint[x][a][y][b];
                }
                if s > best + tie_tol(best) || best == f64::NEG_INFINITY {
                    best = s;
                    arg = b;
                }
            }
            bob_out[y] = arg;
            v += best;
        }
        v
    }
}

/// Exact local bound by enumerating Alice's deterministic strategies and
/// taking Bob's best response per setting.
pub fn local_bound(f: &BellFunctional) -> Result<LocalBound> {
    local_bound_with_cap(f, ENUMERATION_CAP)
}

pub fn local_bound_with_cap(f: &BellFunctional, cap: u128) -> Result<LocalBound> {
    local_bound_shard(f, cap, 0, 1)
}

/// Enumerates every `shards`-th Alice strategy starting at `shard`; merging
/// all shards with [`LocalBound::merge`] gives the same result as one pass.
pub fn local_bound_shard(f: &BellFunctional, cap: u128, shard: usize, shards: usize) -> Result<LocalBound> {
    let sc = f.scenario();
    let size = sc.strategy_count();
    if size > cap {
        return Err(Error::EnumerationCap { size, cap });
    }
    if shards == 0 || shard >= shards {
        return Err(Error::Domain("shard index out of range".into()));
    }
    let tables = Tables::new(f);
    let radices = &sc.alice_outcomes;
    let mut alice = vec![0usize; radices.len()];
    let mut bob = vec![0usize; sc.bob_settings()];
    let mut best: Option<LocalBound> = None;
    let mut index = 0usize;
    loop {
        if index % shards == shard {
            let v = tables.respond(f.constant(), &alice, &mut bob);
            let better = match &best {
                None => true,
                Some(b) => v > b.value + tie_tol(b.value),
            };
            if better {
                best = Some(LocalBound { value: v, strategy: Strategy { alice: alice.clone(), bob: bob.clone() } });
            }
        }
        index += 1;
        // odometer with setting 0 most significant
        let mut k = radices.len();
        loop {
            if k == 0 {
                return best.ok_or_else(|| Error::Domain("empty shard".into()));
            }
            k -= 1;
            alice[k] += 1;
            if alice[k] < radices[k] {
                break;
            }
            alice[k] = 0;
        }
    }
}

use alloc::format;
use alloc::string::String;
use alloc::vec;

use serde::{Deserialize, Serialize};

use super::{BellFunctional, Scenario, Term};
use crate::{Error, Result};

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Ranks `(i, j)` of the first two elements of Alice's ternary measurement,
/// with `i + j ≤ 2` on a qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u8, u8)", into = "(u8, u8)")]
pub struct RankProfile {
    first: u8,
    second: u8,
}

impl RankProfile {
    /// The six admissible qubit profiles.
    pub const ALL: [RankProfile; 6] = [
        RankProfile { first: 0, second: 0 },
        RankProfile { first: 0, second: 1 },
        RankProfile { first: 1, second: 0 },
        RankProfile { first: 1, second: 1 },
        RankProfile { first: 0, second: 2 },
        RankProfile { first: 2, second: 0 },
    ];

    pub fn new(first: u8, second: u8) -> Result<Self> {
        if first > 2 || second > 2 || first + second > 2 {
            return Err(Error::InvalidClass(format!("rank pair ({first},{second}) not admissible on a qubit")));
        }
        Ok(Self { first, second })
    }

    pub fn first(self) -> u8 {
        self.first
    }

    pub fn second(self) -> u8 {
        self.second
    }

    /// Rank of the third element.
    pub fn third(self) -> u8 {
        2 - self.first - self.second
    }

    /// `"I01"` style label.
    pub fn label(self) -> String {
        format!("I{}{}", self.first, self.second)
    }

    pub fn parse(label: &str) -> Result<Self> {
        let digits = label.strip_prefix('I').or_else(|| label.strip_prefix('i')).unwrap_or(label);
        let b = digits.as_bytes();
        if b.len() != 2 || !b.iter().all(u8::is_ascii_digit) {
            return Err(Error::InvalidClass(format!("unknown rank profile {label:?}")));
        }
        Self::new(b[0] - b'0', b[1] - b'0')
    }
}

impl TryFrom<(u8, u8)> for RankProfile {
    type Error = Error;
    fn try_from((i, j): (u8, u8)) -> Result<Self> {
        Self::new(i, j)
    }
}

impl From<RankProfile> for (u8, u8) {
    fn from(r: RankProfile) -> Self {
        (r.first, r.second)
    }
}

fn ch_scenario() -> Scenario {
    Scenario { alice_outcomes: vec![2, 2], bob_outcomes: vec![2, 2] }
}

fn ich3_scenario() -> Scenario {
    Scenario { alice_outcomes: vec![2, 2, 3], bob_outcomes: vec![2, 2] }
}

fn derived_scenario() -> Scenario {
    Scenario { alice_outcomes: vec![2, 2, 2], bob_outcomes: vec![2, 2] }
}

/// `−p_A(0|0) − p_B(0|0) + p(00|00) + p(00|01) + p(00|10) − p(00|11)`, local bound 0.
pub fn build_ich() -> BellFunctional {
    BellFunctional::new(
        ch_scenario(),
        0.0,
        [
            Term::alice(0, 0, -1.0),
            Term::bob(0, 0, -1.0),
            Term::joint(0, 0, 0, 0, 1.0),
            Term::joint(0, 0, 0, 1, 1.0),
            Term::joint(0, 1, 0, 0, 1.0),
            Term::joint(0, 1, 0, 1, -1.0),
        ],
    )
    .expect("static functional")
}

/// Terms on Alice's ternary setting 2:
/// `−p_A(0|2) − (1−1/√2) p_A(1|2) + p(00|20) + p(00|21) + p(10|20) − p(10|21)`.
pub fn build_i3() -> BellFunctional {
    BellFunctional::new(
        ich3_scenario(),
        0.0,
        [
            Term::alice(0, 2, -1.0),
            Term::alice(1, 2, -(1.0 - FRAC_1_SQRT_2)),
            Term::joint(0, 2, 0, 0, 1.0),
            Term::joint(0, 2, 0, 1, 1.0),
            Term::joint(1, 2, 0, 0, 1.0),
            Term::joint(1, 2, 0, 1, -1.0),
        ],
    )
    .expect("static functional")
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("c must be positive and finite, got {c}")));
    }
    Ok(())
}

/// `c·I_CH + I_3` with local bound 1 for every `c > 0`.
pub fn build_ich3(c: f64) -> Result<BellFunctional> {
    check_c(c)?;
    build_ich().scaled(c).embed(ich3_scenario())?.plus(&build_i3())
}

/// Two-outcome inequality obtained from `I_CH3` by fixing the ranks of
/// Alice's ternary measurement, with its quoted right-hand side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedInequality {
    pub profile: RankProfile,
    pub functional: BellFunctional,
    pub stated_bound: f64,
}

/// All derived inequalities live on Alice settings `[2, 2, 2]`, Bob `[2, 2]`.
///
/// For `(0,1)` the substituted form `−(1−1/√2) p_A(0|2) + p(00|20) − p(00|21)`
/// is used; the other five are taken as written.
pub fn build_derived(profile: RankProfile, c: f64) -> Result<DerivedInequality> {
    check_c(c)?;
    let ch = build_ich().scaled(c).embed(derived_scenario())?;
    let (constant, extra, stated_bound) = match (profile.first(), profile.second()) {
        (0, 0) => (0.0, vec![], 0.0),
        (0, 1) => (
            0.0,
            vec![
                Term::alice(0, 2, -(1.0 - FRAC_1_SQRT_2)),
                Term::joint(0, 2, 0, 0, 1.0),
                Term::joint(0, 2, 0, 1, -1.0),
            ],
            FRAC_1_SQRT_2,
        ),
        (1, 0) => (
            0.0,
            vec![Term::alice(0, 0, -1.0), Term::joint(0, 0, 0, 0, 1.0), Term::joint(0, 0, 0, 1, 1.0)],
            1.0,
        ),
        (1, 1) => (
            FRAC_1_SQRT_2 - 1.0,
            vec![
                Term::alice(0, 2, -FRAC_1_SQRT_2),
                Term::bob(0, 0, 1.0),
                Term::bob(0, 1, -1.0),
                Term::joint(0, 2, 0, 1, 2.0),
            ],
            1.0,
        ),
        (0, 2) => (0.0, vec![Term::bob(0, 0, 1.0), Term::bob(0, 1, -1.0)], 1.0),
        (2, 0) => (-1.0, vec![Term::bob(0, 0, 1.0), Term::bob(0, 1, 1.0)], 1.0),
        _ => unreachable!("RankProfile::new admits only six pairs"),
    };
    let extra = BellFunctional::new(derived_scenario(), constant, extra)?;
    Ok(DerivedInequality { profile, functional: ch.plus(&extra)?, stated_bound })
}

//! Closed forms on the maximally entangled state and the POVM advantage.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::wopt::{maximize_w_povm, PovmOptimum};
use crate::bell::RankProfile;
use crate::{Error, Result};

pub(crate) fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("c must be positive and finite, got {c}")));
    }
    Ok(())
}

/// `max |b₁+b₂| + k|b₁−b₂|` over unit vectors, `2√(1+k²)`.
pub fn lemma2_max(k: f64) -> Result<f64> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("k must be non-negative, got {k}")));
    }
    Ok(2.0 * (1.0 + k * k).sqrt())
}

/// `√(c² + (c+1)²)`
fn hyp(c: f64) -> f64 {
    (c * c + (c + 1.0) * (c + 1.0)).sqrt()
}

/// Maximum of a derived inequality over rank-1 projective measurements on
/// `ψ⁺` mixed with white noise of weight `p` (visibility `1−p`).
pub fn psiplus_case_max_visibility(profile: RankProfile, c: f64, p: f64) -> Result<f64> {
    check_c(c)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("noise fraction {p} outside [0, 1]")));
    }
    let v = 1.0 - p;
    Ok(match (profile.first(), profile.second()) {
        (0, 0) | (0, 2) | (2, 0) => 0.5 * c * (v * SQRT_2 - 1.0),
        (0, 1) => -0.5 * c + 0.5 * v * hyp(c) + 0.5 * (FRAC_1_SQRT_2 - 1.0),
        (1, 0) => -0.5 * c + 0.5 * v * hyp(c),
        (1, 1) => 0.5 * c * (v * SQRT_2 - 1.0) + 0.5 * FRAC_1_SQRT_2 - 0.5 + 0.5 * v,
        _ => unreachable!(),
    })
}

/// Noise-free maximum on `ψ⁺` for each derived inequality.
pub fn psiplus_case_max(profile: RankProfile, c: f64) -> Result<f64> {
    check_c(c)?;
    Ok(match (profile.first(), profile.second()) {
        (0, 0) | (0, 2) | (2, 0) => 0.5 * c * (SQRT_2 - 1.0),
        (0, 1) => 0.5 * (FRAC_1_SQRT_2 - 1.0 - c + hyp(c)),
        (1, 0) => 0.5 * (-c + hyp(c)),
        (1, 1) => 0.5 * (FRAC_1_SQRT_2 + c * (SQRT_2 - 1.0)),
        _ => unreachable!(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseMaximum {
    pub value: f64,
    /// All profiles attaining `value` within `1e-12`.
    pub argmax: Vec<RankProfile>,
}

fn case_maximum(values: impl Iterator<Item = (RankProfile, f64)>) -> CaseMaximum {
    let all: Vec<(RankProfile, f64)> = values.collect();
    let value = all.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let argmax = all.iter().filter(|(_, v)| value - v <= 1e-12 * (1.0 + value.abs())).map(|(p, _)| *p).collect();
    CaseMaximum { value, argmax }
}

/// Maximum over the six profiles on `ψ⁺`; always attained by `(1,0)`.
pub fn projective_max_psiplus_cases(c: f64) -> Result<CaseMaximum> {
    let vals = RankProfile::ALL.iter().map(|&p| psiplus_case_max(p, c).map(|v| (p, v))).collect::<Result<Vec<_>>>()?;
    Ok(case_maximum(vals.into_iter()))
}

pub fn projective_max_psiplus(c: f64) -> Result<f64> {
    Ok(projective_max_psiplus_cases(c)?.value)
}

/// Projective maximum on the noisy state, maximized over profiles.
pub fn projective_max_werner(c: f64, p: f64) -> Result<f64> {
    let vals = RankProfile::ALL
        .iter()
        .map(|&r| psiplus_case_max_visibility(r, c, p).map(|v| (r, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(case_maximum(vals.into_iter()).value)
}

/// `c(√2−1)/2 + w/(2√2)`
pub fn povm_lower_bound(c: f64, w: f64) -> Result<f64> {
    check_c(c)?;
    Ok(0.5 * c * (SQRT_2 - 1.0) + w / (2.0 * SQRT_2))
}

/// `(2 − w²)/(4w − 4)`
pub fn crossover_closed_form(w: f64) -> f64 {
    (2.0 - w * w) / (4.0 * w - 4.0)
}

/// Bisection to absolute width `tol` for a sign change of `f` on `[lo, hi]`.
pub fn bisect(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub closed_form: f64,
    pub bisection: f64,
}

/// The POVM optimum `w` and `tr M₁` of the optimal POVM, computed once and
/// reused by every bound that depends on them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PovmAdvantage {
    pub w: f64,
    pub m1_trace: f64,
    pub optimum: PovmOptimum,
}

impl PovmAdvantage {
    pub fn compute(tol: f64) -> Result<Self> {
        Ok(Self::from_optimum(maximize_w_povm(tol)?))
    }

    pub fn from_optimum(optimum: PovmOptimum) -> Self {
        Self { w: optimum.value, m1_trace: optimum.m1().trace(), optimum }
    }

    pub fn lower_bound_psiplus(&self, c: f64) -> Result<f64> {
        povm_lower_bound(c, self.w)
    }

    /// `(1−p)·bound(c) + (−2c + 2(1/√2−1) tr M₁)·p/4`
    pub fn noise_lower_bound(&self, c: f64, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("noise fraction {p} outside [0, 1]")));
        }
        let noise = (-2.0 * c + 2.0 * (FRAC_1_SQRT_2 - 1.0) * self.m1_trace) * p / 4.0;
        Ok((1.0 - p) * self.lower_bound_psiplus(c)? + noise)
    }

    pub fn crossover(&self) -> Result<Crossover> {
        let closed_form = crossover_closed_form(self.w);
        let bisection = bisect(
            |c| Ok(self.lower_bound_psiplus(c)? - projective_max_psiplus(c)?),
            1.0,
            10.0,
            1e-12,
        )?;
        Ok(Crossover { closed_form, bisection })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    const W: f64 = 1.0714198987;

    fn rp(i: u8, j: u8) -> RankProfile {
        RankProfile::new(i, j).unwrap()
    }

    #[test]
    fn lemma2_values() {
        assert_eq!(lemma2_max(0.0).unwrap(), 2.0);
        assert!((lemma2_max(1.0).unwrap() - 2.0 * SQRT_2).abs() < 1e-15);
        assert!(lemma2_max(-1.0).is_err());
    }

    #[test]
    fn case_values() {
        assert!((psiplus_case_max(rp(0, 0), 1.0).unwrap() - (SQRT_2 - 1.0) / 2.0).abs() < 1e-15);
        assert!((psiplus_case_max(rp(1, 0), 100.0).unwrap() - 21.065_111_0).abs() < 1e-7);
        assert!((projective_max_psiplus(3.0).unwrap() - 1.0).abs() < 1e-15);
        for c in [0.5, 3.0, 10.0, 100.0] {
            let v = |i, j| psiplus_case_max(rp(i, j), c).unwrap();
            assert!(v(1, 0) > v(1, 1) && v(1, 1) > v(0, 0) && v(1, 0) > v(0, 1));
            assert_eq!(projective_max_psiplus_cases(c).unwrap().argmax, alloc::vec![rp(1, 0)]);
        }
        assert!(psiplus_case_max(rp(0, 0), 0.0).is_err());
    }

    #[test]
    fn visibility_one_reduces_to_noise_free() {
        for p in RankProfile::ALL {
            for c in [0.7, 3.1, 42.0] {
                let a = psiplus_case_max_visibility(p, c, 0.0).unwrap();
                let b = psiplus_case_max(p, c).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn crossover_values() {
        assert!((crossover_closed_form(W) - 2.9826).abs() < 1e-4);
        assert!(crossover_closed_form(SQRT_2).abs() < 1e-15);
        let root = bisect(|c| Ok(povm_lower_bound(c, W)? - projective_max_psiplus(c)?), 1.0, 10.0, 1e-12).unwrap();
        assert!((root - crossover_closed_form(W)).abs() < 1e-6);
        assert!(matches!(bisect(|_| Ok(1.0), 0.0, 1.0, 1e-9), Err(Error::Bracket { .. })));
    }

    #[test]
    fn povm_bound_values() {
        assert!((povm_lower_bound(100.0, W).unwrap() - 21.0895).abs() < 1e-3);
        assert!((povm_lower_bound(1e-12, W).unwrap() - 0.378_804_1).abs() < 1e-6);
        for c in [3.0, 3.5, 10.0, 100.0, 1e4] {
            assert!(povm_lower_bound(c, W).unwrap() > projective_max_psiplus(c).unwrap());
        }
    }
}

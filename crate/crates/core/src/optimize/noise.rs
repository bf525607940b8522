//! White-noise robustness of the POVM advantage.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::psiplus::{bisect, projective_max_psiplus, projective_max_werner, PovmAdvantage};
use crate::{Error, Result};

/// Upper end of the noise bracket searched for a threshold.
pub const NOISE_BRACKET: f64 = 1.0;
const THRESHOLD_TOL: f64 = 1e-13;

/// What the POVM bound on the noisy state is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseReading {
    /// Projective maximum on the same noisy state (visibility scaled).
    Werner,
    /// Noise-free projective maximum on `ψ⁺`.
    NoiseFree,
}

impl NoiseReading {
    pub const ALL: [NoiseReading; 2] = [NoiseReading::Werner, NoiseReading::NoiseFree];

    pub fn name(self) -> &'static str {
        match self {
            NoiseReading::Werner => "werner",
            NoiseReading::NoiseFree => "noise-free",
        }
    }

    fn comparator(self, c: f64, p: f64) -> Result<f64> {
        match self {
            NoiseReading::Werner => projective_max_werner(c, p),
            NoiseReading::NoiseFree => projective_max_psiplus(c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub c: f64,
    pub p: f64,
    /// False when `[0, 1]` showed no sign change; `p` is then 0.
    pub bracketed: bool,
}

/// POVM bound minus the comparator at `(c, p)`.
pub fn advantage_margin(adv: &PovmAdvantage, reading: NoiseReading, c: f64, p: f64) -> Result<f64> {
    Ok(adv.noise_lower_bound(c, p)? - reading.comparator(c, p)?)
}

/// Largest noise fraction at which the POVM bound still exceeds the
/// projective comparator.
pub fn noise_threshold(adv: &PovmAdvantage, reading: NoiseReading, c: f64) -> Result<Threshold> {
    match bisect(|p| advantage_margin(adv, reading, c, p), 0.0, NOISE_BRACKET, THRESHOLD_TOL) {
        Ok(p) => Ok(Threshold { c, p, bracketed: true }),
        Err(Error::Bracket { .. }) => Ok(Threshold { c, p: 0.0, bracketed: false }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseCurve {
    pub reading: NoiseReading,
    pub points: Vec<Threshold>,
    /// Largest grid point.
    pub grid_max: Threshold,
    /// Golden-section refinement of the maximum when it is interior to the grid.
    pub refined_max: Option<Threshold>,
}

/// Evenly spaced grid of `steps` points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || !(hi > lo) {
        return Err(Error::Domain(format!("grid needs steps >= 2 and hi > lo, got {steps} on [{lo}, {hi}]")));
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

pub fn noise_threshold_curve(adv: &PovmAdvantage, reading: NoiseReading, grid: &[f64]) -> Result<NoiseCurve> {
    if let Some(&bad) = grid.iter().find(|&&c| !(c > 3.0 && c.is_finite())) {
        return Err(Error::Domain(format!("noise curve requires c > 3, got {bad}")));
    }
    let points = grid.iter().map(|&c| noise_threshold(adv, reading, c)).collect::<Result<Vec<_>>>()?;
    curve_from_points(adv, reading, points)
}

/// Assembles a curve from already computed points, in grid order.
pub fn curve_from_points(adv: &PovmAdvantage, reading: NoiseReading, points: Vec<Threshold>) -> Result<NoiseCurve> {
    let (imax, grid_max) = points
        .iter()
        .copied()
        .enumerate()
        .fold(None::<(usize, Threshold)>, |best, (i, t)| match best {
            Some((_, b)) if b.p >= t.p => best,
            _ => Some((i, t)),
        })
        .ok_or_else(|| Error::Domain("empty grid".into()))?;
    let refined_max = if imax > 0 && imax + 1 < points.len() && grid_max.bracketed {
        Some(golden_max(adv, reading, points[imax - 1].c, points[imax + 1].c)?)
    } else {
        None
    };
    Ok(NoiseCurve { reading, points, grid_max, refined_max })
}

fn golden_max(adv: &PovmAdvantage, reading: NoiseReading, mut a: f64, mut b: f64) -> Result<Threshold> {
    // 1/φ
    let inv_phi = 0.618_033_988_749_894_9;
    let f = |c: f64| noise_threshold(adv, reading, c).map(|t| t.p);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > 1e-9 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        }
    }
    noise_threshold(adv, reading, 0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn adv() -> PovmAdvantage {
        PovmAdvantage::compute(1e-10).unwrap()
    }

    #[test]
    fn bound_endpoints_and_monotonicity() {
        let a = adv();
        for c in [1.0, 4.0, 50.0] {
            assert!((a.noise_lower_bound(c, 0.0).unwrap() - a.lower_bound_psiplus(c).unwrap()).abs() < 1e-15);
            let mut prev = f64::INFINITY;
            for k in 0..=10 {
                let v = a.noise_lower_bound(c, k as f64 / 10.0).unwrap();
                assert!(v < prev);
                prev = v;
            }
        }
        let want = (-2.0 + 2.0 * (FRAC_1_SQRT_2 - 1.0) * a.m1_trace) / 4.0;
        assert!((a.noise_lower_bound(1.0, 1.0).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn thresholds_separate_the_bounds() {
        let a = adv();
        for reading in NoiseReading::ALL {
            for c in [3.5, 6.5, 11.0] {
                let t = noise_threshold(&a, reading, c).unwrap();
                assert!(t.bracketed, "{reading:?} {c}");
                assert!(advantage_margin(&a, reading, c, t.p - 1e-9).unwrap() > 0.0);
                assert!(advantage_margin(&a, reading, c, t.p + 1e-9).unwrap() <= 0.0);
            }
        }
    }

    #[test]
    fn noise_free_reading_has_interior_maximum() {
        let a = adv();
        let grid = linear_grid(3.05, 12.0, 200).unwrap();
        let curve = noise_threshold_curve(&a, NoiseReading::NoiseFree, &grid).unwrap();
        let m = curve.refined_max.unwrap();
        assert!((m.p - 0.00249717).abs() < 1e-5, "{}", m.p);
        assert!((m.c - 6.56182).abs() < 1e-2, "{}", m.c);
    }

    #[test]
    fn threshold_vanishes_towards_crossover() {
        let a = adv();
        let cx = a.crossover().unwrap().closed_form;
        for reading in NoiseReading::ALL {
            let t = noise_threshold(&a, reading, cx + 1e-6).unwrap();
            assert!(t.p < 1e-6);
        }
    }

    #[test]
    fn rejects_small_c() {
        let a = adv();
        assert!(noise_threshold_curve(&a, NoiseReading::Werner, &[2.5, 4.0]).is_err());
        assert!(linear_grid(1.0, 1.0, 5).is_err());
    }
}

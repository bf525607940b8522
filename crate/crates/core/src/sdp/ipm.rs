//! Infeasible-start primal-dual path following.
//!
//! Per block, with `S = X^{1/2}` and `S Z S = Q diag(t) Qᵀ`, the NT scaling
//! `G = S Q diag(t^{-1/4})` maps both `X` and `Z` to `V = diag(√t)`.
//! In scaled coordinates the linearized complementarity
//! `V(ΔX + ΔZ) + (ΔX + ΔZ)V = 2R` is solved entrywise.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{Residuals, SdpProblem, SdpSolution, SdpStatus};
use crate::linalg::{cholesky, cholesky_solve, sym_eig, SymMatrix};
use crate::{Error, Result};

const MAX_ITER: usize = 200;
const STEP_FRACTION: f64 = 0.98;
/// Iterate norm beyond which an infeasibility certificate is sought.
const DIVERGENCE: f64 = 1e8;
const HARD_DIVERGENCE: f64 = 1e12;

struct Iterate {
    x: Vec<SymMatrix>,
    u: Vec<f64>,
    z: Vec<SymMatrix>,
}

struct Scaling {
    g: Vec<SymMatrix>,
    v: Vec<Vec<f64>>,
}

fn block_dot(a: &[SymMatrix], b: &[SymMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn block_max_abs(a: &[SymMatrix]) -> f64 {
    a.iter().map(SymMatrix::max_abs).fold(0.0, f64::max)
}

fn scaling(x: &[SymMatrix], z: &[SymMatrix]) -> Result<Scaling> {
    let mut g = Vec::with_capacity(x.len());
    let mut v = Vec::with_capacity(x.len());
    for (xk, zk) in x.iter().zip(z) {
        let ex = sym_eig(xk)?;
        let s = ex.map_spectrum(|l| l.max(0.0).sqrt());
        let t_mat = zk.congruence(&s);
        let et = sym_eig(&t_mat)?;
        if et.values[0] <= 0.0 || ex.values[0] <= 0.0 {
            return Err(Error::Solver("iterate left the interior".into()));
        }
        let gq = s.matmul(&et.scaled_vectors(|t| t.powf(-0.25)));
        g.push(gq);
        v.push(et.values.iter().map(|t| t.sqrt()).collect());
    }
    Ok(Scaling { g, v })
}

/// Largest `α` with `diag(v) + α D ⪰ 0`.
fn max_step(v: &[Vec<f64>], d: &[SymMatrix]) -> Result<f64> {
    let mut alpha = f64::INFINITY;
    for (vk, dk) in v.iter().zip(d) {
        let n = vk.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = dk[(i, j)] / (vk[i] * vk[j]).sqrt();
            }
        }
        m.symmetrize();
        let lmin = sym_eig(&m)?.values[0];
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    Ok(alpha)
}

struct Direction {
    du: Vec<f64>,
    dx: Vec<SymMatrix>,
    dz: Vec<SymMatrix>,
}

struct NewtonSystem<'a> {
    a_tilde: Vec<Vec<(usize, SymMatrix)>>,
    rd_tilde: Vec<SymMatrix>,
    rp: &'a [f64],
    chol: Vec<f64>,
    m: usize,
}

impl NewtonSystem<'_> {
    fn solve(&self, v: &[Vec<f64>], rc: &[SymMatrix]) -> Direction {
        let h: Vec<SymMatrix> = v
            .iter()
            .zip(rc)
            .map(|(vk, rk)| {
                let n = vk.len();
                let mut hk = SymMatrix::zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        hk[(i, j)] = 2.0 * rk[(i, j)] / (vk[i] + vk[j]);
                    }
                }
                hk
            })
            .collect();
        let base: Vec<SymMatrix> = h.iter().zip(&self.rd_tilde).map(|(a, b)| a.plus(b)).collect();
        let rhs: Vec<f64> = (0..self.m)
            .map(|j| {
                let s: f64 = self.a_tilde[j].iter().map(|(k, a)| a.dot(&base[*k])).sum();
                s - self.rp[j]
            })
            .collect();
        let du = cholesky_solve(&self.chol, self.m, &rhs);
        let mut dx = base;
        for (dui, ai) in du.iter().zip(&self.a_tilde) {
            for (k, a) in ai {
                dx[*k].axpy(-dui, a);
            }
        }
        let dz = h.iter().zip(&dx).map(|(hk, xk)| hk.minus(xk)).collect();
        Direction { du, dx, dz }
    }
}

fn initial_point(p: &SdpProblem) -> Iterate {
    let n = p.total_dim() as f64;
    let mut xi = 10.0f64.max(n.sqrt());
    let mut eta = 10.0f64.max(n.sqrt());
    let c_norm = p.objective.iter().map(|c| c.frobenius_norm()).fold(0.0, f64::max);
    eta = eta.max(1.0 + c_norm);
    for con in &p.constraints {
        let a_norm = con.terms.iter().map(|(_, a)| a.frobenius_norm()).fold(0.0, f64::max);
        xi = xi.max(n * (1.0 + con.rhs.abs()) / (1.0 + a_norm));
        eta = eta.max(1.0 + a_norm);
    }
    Iterate {
        x: p.blocks.iter().map(|&nk| SymMatrix::scaled_identity(nk, xi)).collect(),
        u: vec![0.0; p.constraints.len()],
        z: p.blocks.iter().map(|&nk| SymMatrix::scaled_identity(nk, eta)).collect(),
    }
}

struct Measures {
    rp: Vec<f64>,
    rd: Vec<SymMatrix>,
    pinf: f64,
    dinf: f64,
    gap: f64,
}

fn measures(p: &SdpProblem, it: &Iterate) -> Measures {
    let rp: Vec<f64> = (0..p.constraints.len())
        .map(|i| p.constraints[i].rhs - p.constraint_value(i, &it.x))
        .collect();
    // R_d = C + Z − Σ u A, so that the full dual step restores Z = Σ u A − C
    let rd: Vec<SymMatrix> = p.dual_slack(&it.u).iter().zip(&it.z).map(|(s, z)| z.minus(s)).collect();
    let pinf = rp.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let dinf = block_max_abs(&rd);
    let gap = block_dot(&it.x, &it.z);
    Measures { rp, rd, pinf, dinf, gap }
}

/// Looks for a Farkas-type certificate in a diverging iterate.
fn infeasibility_certificate(p: &SdpProblem, it: &Iterate) -> bool {
    let unorm = it.u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if unorm > DIVERGENCE {
        // primal infeasible: Σ ū A ⪰ 0 with bᵀū < 0
        let ub: Vec<f64> = it.u.iter().map(|x| x / unorm).collect();
        let by: f64 = ub.iter().zip(&p.constraints).map(|(y, c)| y * c.rhs).sum();
        let mut s: Vec<SymMatrix> = p.blocks.iter().map(|&n| SymMatrix::zeros(n)).collect();
        for (yi, con) in ub.iter().zip(&p.constraints) {
            for (k, a) in &con.terms {
                s[*k].axpy(*yi, a);
            }
        }
        let psd = s.iter().all(|b| sym_eig(b).map(|e| e.values[0] >= -1e-6).unwrap_or(false));
        if psd && by < -1e-6 {
            return true;
        }
    }
    let xnorm = block_max_abs(&it.x);
    if xnorm > DIVERGENCE {
        // dual infeasible: A(X̄) = 0, X̄ ⪰ 0, C•X̄ > 0
        let xb: Vec<SymMatrix> = it.x.iter().map(|b| b.scaled(1.0 / xnorm)).collect();
        let ax = (0..p.constraints.len()).map(|i| p.constraint_value(i, &xb).abs()).fold(0.0, f64::max);
        if ax < 1e-6 && p.objective_value(&xb) > 1e-6 {
            return true;
        }
    }
    unorm > HARD_DIVERGENCE || xnorm > HARD_DIVERGENCE
}

/// Solves the problem to absolute tolerance `tol` on the equality residuals,
/// the dual residual and the gap `X•Z`.
pub fn solve(p: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::Domain(alloc::format!("tolerance {tol:e} outside [1e-12, 1e-4]")));
    }
    let dependent = p.dependent_constraints();
    if !dependent.is_empty() {
        return Err(Error::DependentConstraints(dependent));
    }
    let m = p.constraints.len();
    let n = p.total_dim() as f64;
    let mut it = initial_point(p);
    let mut best: Option<(f64, Iterate)> = None;
    let mut status = SdpStatus::NumericalFailure;
    let mut iterations = 0;
    let mut stalled = 0;

    for iter in 0..=MAX_ITER {
        iterations = iter;
        let ms = measures(p, &it);
        let merit = ms.pinf.max(ms.dinf).max(ms.gap.abs());
        if best.as_ref().is_none_or(|(b, _)| merit < *b) {
            best = Some((merit, Iterate { x: it.x.clone(), u: it.u.clone(), z: it.z.clone() }));
        }
        if ms.pinf <= tol && ms.dinf <= tol && ms.gap <= tol {
            status = SdpStatus::Optimal;
            break;
        }
        if infeasibility_certificate(p, &it) {
            status = SdpStatus::Infeasible;
            break;
        }
        if iter == MAX_ITER || stalled >= 5 {
            break;
        }
        let mu = ms.gap / n;
        let sc = match scaling(&it.x, &it.z) {
            Ok(s) => s,
            Err(_) => break,
        };
        let a_tilde: Vec<Vec<(usize, SymMatrix)>> = p
            .constraints
            .iter()
            .map(|c| c.terms.iter().map(|(k, a)| (*k, a.congruence(&sc.g[*k]))).collect())
            .collect();
        let rd_tilde: Vec<SymMatrix> = ms.rd.iter().zip(&sc.g).map(|(r, g)| r.congruence(g)).collect();
        let mut schur = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..=i {
                let mut s = 0.0;
                for (ki, ai) in &a_tilde[i] {
                    for (kj, aj) in &a_tilde[j] {
                        if ki == kj {
                            s += ai.dot(aj);
                        }
                    }
                }
                schur[i * m + j] = s;
                schur[j * m + i] = s;
            }
        }
        let chol = match cholesky(&schur, m) {
            Some(l) => l,
            None => {
                let reg = 1e-14 * (0..m).map(|i| schur[i * m + i]).fold(1.0, f64::max);
                for i in 0..m {
                    schur[i * m + i] += reg;
                }
                match cholesky(&schur, m) {
                    Some(l) => l,
                    None => break,
                }
            }
        };
        let sys = NewtonSystem { a_tilde, rd_tilde, rp: &ms.rp, chol, m };

        // predictor
        let rc_aff: Vec<SymMatrix> = sc.v.iter().map(|vk| SymMatrix::diagonal(&vk.iter().map(|x| -x * x).collect::<Vec<_>>())).collect();
        let aff = sys.solve(&sc.v, &rc_aff);
        let (ap, ad) = match (max_step(&sc.v, &aff.dx), max_step(&sc.v, &aff.dz)) {
            (Ok(a), Ok(b)) => ((STEP_FRACTION * a).min(1.0), (STEP_FRACTION * b).min(1.0)),
            _ => break,
        };
        let mut mu_aff = 0.0;
        for ((vk, dxk), dzk) in sc.v.iter().zip(&aff.dx).zip(&aff.dz) {
            let vm = SymMatrix::diagonal(vk);
            let xa = vm.plus(&dxk.scaled(ap));
            let za = vm.plus(&dzk.scaled(ad));
            mu_aff += xa.dot(&za);
        }
        mu_aff /= n;
        let sigma = if mu > 0.0 { (mu_aff / mu).max(0.0).powi(3).min(1.0) } else { 0.0 };

        // corrector
        let rc: Vec<SymMatrix> = sc
            .v
            .iter()
            .zip(aff.dx.iter().zip(&aff.dz))
            .map(|(vk, (dxk, dzk))| {
                let mut r = SymMatrix::diagonal(&vk.iter().map(|x| sigma * mu - x * x).collect::<Vec<_>>());
                let mut cross = dxk.matmul(dzk);
                cross.axpy(1.0, &dzk.matmul(dxk));
                r.axpy(-0.5, &cross);
                r.symmetrize();
                r
            })
            .collect();
        let dir = sys.solve(&sc.v, &rc);
        let (ap, ad) = match (max_step(&sc.v, &dir.dx), max_step(&sc.v, &dir.dz)) {
            (Ok(a), Ok(b)) => ((STEP_FRACTION * a).min(1.0), (STEP_FRACTION * b).min(1.0)),
            _ => break,
        };
        if ap < 1e-10 && ad < 1e-10 {
            stalled += 1;
        } else {
            stalled = 0;
        }

        for ((xk, dxk), g) in it.x.iter_mut().zip(&dir.dx).zip(&sc.g) {
            xk.axpy(ap, &dxk.congruence_t(g));
            xk.symmetrize();
        }
        for (ui, dui) in it.u.iter_mut().zip(&dir.du) {
            *ui += ad * dui;
        }
        // ΔZ = Σ Δu A − R_d, exact in the original coordinates
        let mut dz: Vec<SymMatrix> = ms.rd.iter().map(|r| r.scaled(-1.0)).collect();
        for (dui, con) in dir.du.iter().zip(&p.constraints) {
            for (k, a) in &con.terms {
                dz[*k].axpy(*dui, a);
            }
        }
        for (zk, dzk) in it.z.iter_mut().zip(&dz) {
            zk.axpy(ad, dzk);
            zk.symmetrize();
        }
    }

    if status == SdpStatus::NumericalFailure {
        if let Some((_, b)) = best {
            it = b;
        }
    }
    finish(p, it, status, iterations)
}

fn finish(p: &SdpProblem, it: Iterate, status: SdpStatus, iterations: usize) -> Result<SdpSolution> {
    let ms = measures(p, &it);
    let mut min_eig = f64::INFINITY;
    for b in &it.x {
        min_eig = min_eig.min(sym_eig(b)?.values[0]);
    }
    let mut dual_min_eig = f64::INFINITY;
    for b in &it.z {
        dual_min_eig = dual_min_eig.min(sym_eig(b)?.values[0]);
    }
    let value = p.objective_value(&it.x);
    let dual_value = it.u.iter().zip(&p.constraints).map(|(y, c)| y * c.rhs).sum();
    Ok(SdpSolution {
        status,
        value,
        dual_value,
        gap: ms.gap,
        residuals: Residuals { primal_eq: ms.pinf, dual_eq: ms.dinf, min_eig, dual_min_eig },
        primal: it.x,
        dual: it.u,
        slack: it.z,
        iterations,
    })
}

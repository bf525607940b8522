//! Quantum states, projective and POVM measurements, and the Born rule.

mod neumark;
pub mod random;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::linalg::{herm_eig, kron, HermitianOperator, Matrix};
use crate::{Error, Result, C64};

pub use neumark::{neumark_dilate, NeumarkDilation};

/// Entrywise completeness and positivity tolerance for [`Povm`].
pub const POVM_TOL: f64 = 1e-9;
/// Positivity and trace tolerance for [`DensityMatrix`].
pub const STATE_TOL: f64 = 1e-10;
/// Born-rule values within this distance of `[0, 1]` are clamped.
pub const PROBABILITY_CLAMP: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if amplitudes.is_empty() || (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("state norm² {norm2} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain(format!("cannot normalize a vector of norm {norm}")));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { op: HermitianOperator::projector(&self.amplitudes) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "HermitianOperator", try_from = "HermitianOperator")]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::Domain(format!("density matrix trace {tr}")));
        }
        let min = op.min_eigenvalue()?;
        if min < -STATE_TOL {
            return Err(Error::Domain(format!("density matrix eigenvalue {min}")));
        }
        Ok(Self { op })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { op: HermitianOperator::identity(dim).scale(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }
}

impl From<DensityMatrix> for HermitianOperator {
    fn from(d: DensityMatrix) -> Self {
        d.op
    }
}

impl TryFrom<HermitianOperator> for DensityMatrix {
    type Error = Error;
    fn try_from(op: HermitianOperator) -> Result<Self> {
        DensityMatrix::new(op)
    }
}

/// Unit vector on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("Bloch vector norm {n}")));
        }
        Ok(Self { x, y, z })
    }

    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n > 0.0) {
            return Err(Error::Domain("zero Bloch vector".into()));
        }
        Ok(Self { x: x / n, y: y / n, z: z / n })
    }

    pub fn dot(&self, o: &BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// `v·σ` as a 2×2 matrix.
    pub fn sigma(&self) -> Matrix {
        Matrix::new(
            2,
            2,
            vec![
                C64::new(self.z, 0.0),
                C64::new(self.x, -self.y),
                C64::new(self.x, self.y),
                C64::new(-self.z, 0.0),
            ],
        )
        .expect("finite Bloch components")
    }
}

/// Bob's ideal CH settings, `(±1/√2, 0, 1/√2)`.
pub fn bob_ch_vectors() -> [BlochVector; 2] {
    [
        BlochVector { x: FRAC_1_SQRT_2, y: 0.0, z: FRAC_1_SQRT_2 },
        BlochVector { x: -FRAC_1_SQRT_2, y: 0.0, z: FRAC_1_SQRT_2 },
    ]
}

/// Measurement: positive operators summing to the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmRecord", into = "PovmRecord")]
pub struct Povm {
    elements: Vec<HermitianOperator>,
}

#[derive(Serialize, Deserialize)]
struct PovmRecord {
    elements: Vec<HermitianOperator>,
}

impl From<Povm> for PovmRecord {
    fn from(p: Povm) -> Self {
        PovmRecord { elements: p.elements }
    }
}

impl TryFrom<PovmRecord> for Povm {
    type Error = Error;
    fn try_from(r: PovmRecord) -> Result<Self> {
        Povm::new(r.elements)
    }
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        Self::with_tolerance(elements, POVM_TOL)
    }

    pub fn with_tolerance(elements: Vec<HermitianOperator>, tol: f64) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidPovm("no elements".into()));
        };
        let d = first.dim();
        let mut sum = HermitianOperator::zero(d);
        for (i, e) in elements.iter().enumerate() {
            if e.dim() != d {
                return Err(Error::InvalidPovm(format!("element {i} has dimension {}", e.dim())));
            }
            let min = e.min_eigenvalue()?;
            if min < -tol {
                return Err(Error::InvalidPovm(format!("element {i} has eigenvalue {min}")));
            }
            sum.add_scaled(1.0, e)?;
        }
        let dev = (sum.matrix() - &Matrix::identity(d)).max_abs();
        if dev > tol {
            return Err(Error::InvalidPovm(format!("elements sum to identity only within {dev:e}")));
        }
        Ok(Self { elements })
    }

    /// Two-outcome projective measurement `{½(1+v·σ), ½(1−v·σ)}`.
    pub fn from_bloch(v: BlochVector) -> Self {
        Self { elements: vec![bloch_projector_unchecked(v, 0), bloch_projector_unchecked(v, 1)] }
    }

    /// `{P, 1−P}` for a projector or effect `P` of the given dimension.
    pub fn binary(p: HermitianOperator) -> Result<Self> {
        let rest = HermitianOperator::identity(p.dim()).sub(&p)?;
        Self::new(vec![p, rest])
    }

    /// Deterministic measurement: outcome `which` has the identity.
    pub fn deterministic(dim: usize, outcomes: usize, which: usize) -> Self {
        let elements = (0..outcomes)
            .map(|a| if a == which { HermitianOperator::identity(dim) } else { HermitianOperator::zero(dim) })
            .collect();
        Self { elements }
    }

    /// Completes the first `k-1` elements with `1 − Σ` and validates.
    pub fn completed(mut leading: Vec<HermitianOperator>) -> Result<Self> {
        let d = leading
            .first()
            .map(HermitianOperator::dim)
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let mut last = HermitianOperator::identity(d);
        for e in &leading {
            last.add_scaled(-1.0, e)?;
        }
        leading.push(last);
        Self::new(leading)
    }

    pub(crate) fn from_elements_unchecked(elements: Vec<HermitianOperator>) -> Self {
        Self { elements }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn element(&self, a: usize) -> &HermitianOperator {
        &self.elements[a]
    }

    pub fn is_real(&self) -> bool {
        self.elements.iter().all(|e| e.matrix().is_real())
    }
}

/// `cos θ |00⟩ + sin θ |11⟩`.
pub fn pure_state(theta: f64) -> PureState {
    let z = C64::new(0.0, 0.0);
    PureState { amplitudes: vec![C64::new(theta.cos(), 0.0), z, z, C64::new(theta.sin(), 0.0)] }
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn psi_plus() -> PureState {
    let z = C64::new(0.0, 0.0);
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    PureState { amplitudes: vec![h, z, z, h] }
}

/// Werner state `(1−p)|ψ⁺⟩⟨ψ⁺| + p·1/4`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("noise fraction {p} outside [0, 1]")));
    }
    let mut op = psi_plus().density().op.scale(1.0 - p);
    op.add_scaled(p / 4.0, &HermitianOperator::identity(4))?;
    DensityMatrix::new(op)
}

fn bloch_projector_unchecked(v: BlochVector, outcome: usize) -> HermitianOperator {
    let sign = if outcome == 0 { 0.5 } else { -0.5 };
    let m = &Matrix::identity(2).scale_real(0.5) + &v.sigma().scale_real(sign);
    HermitianOperator::symmetrized(m)
}

/// `½(1 ± v·σ)` for outcome 0 / 1.
pub fn bloch_projector(v: BlochVector, outcome: usize) -> Result<HermitianOperator> {
    BlochVector::new(v.x, v.y, v.z)?;
    if outcome > 1 {
        return Err(Error::Domain(format!("binary outcome {outcome}")));
    }
    Ok(bloch_projector_unchecked(v, outcome))
}

fn clamp_probability(p: f64) -> f64 {
    debug_assert!(
        (-PROBABILITY_CLAMP * 10.0..=1.0 + PROBABILITY_CLAMP * 10.0).contains(&p),
        "Born-rule value {p} outside [0, 1]"
    );
    p.clamp(0.0, 1.0)
}

/// `tr(ρ (A ⊗ B))` without clamping.
pub fn expectation_product(
    rho: &DensityMatrix,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<f64> {
    let (da, db) = (a.dim(), b.dim());
    if da * db != rho.dim() {
        return Err(Error::Dimension(format!(
            "operators of dimensions {da} and {db} on a state of dimension {}",
            rho.dim()
        )));
    }
    let r = rho.operator().matrix();
    let (am, bm) = (a.matrix(), b.matrix());
    // tr(ρ (A⊗B)) = Σ ρ_{(i,k),(j,l)} A_{j,i} B_{l,k}
    let mut s = C64::new(0.0, 0.0);
    for i in 0..da {
        for j in 0..da {
            let aji = am[(j, i)];
            if aji == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    s += r[(i * db + k, j * db + l)] * aji * bm[(l, k)];
                }
            }
        }
    }
    Ok(s.re)
}

/// Born rule `p = tr(ρ M_a ⊗ M_b)`, clamped to `[0, 1]`.
pub fn born_joint(rho: &DensityMatrix, ma: &HermitianOperator, mb: &HermitianOperator) -> Result<f64> {
    Ok(clamp_probability(expectation_product(rho, ma, mb)?))
}

/// Joint probability of outcomes 0/0 on `|ψ⁺⟩` for Bloch settings `a`, `b`:
/// `¼(1 + a_x b_x − a_y b_y + a_z b_z)`.
pub fn psiplus_joint_bloch(a: BlochVector, b: BlochVector) -> Result<f64> {
    BlochVector::new(a.x, a.y, a.z)?;
    BlochVector::new(b.x, b.y, b.z)?;
    Ok(0.25 * (1.0 + a.x * b.x - a.y * b.y + a.z * b.z))
}

/// Partial contraction `tr_B[ρ (1 ⊗ B)]`, an operator on Alice's space.
pub fn contract_bob(rho: &DensityMatrix, da: usize, b: &HermitianOperator) -> Result<HermitianOperator> {
    let db = b.dim();
    if da * db != rho.dim() {
        return Err(Error::Dimension(format!("{da}x{db} split of dimension {}", rho.dim())));
    }
    let r = rho.operator().matrix();
    let bm = b.matrix();
    let mut g = Matrix::zeros(da, da);
    for i in 0..da {
        for j in 0..da {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..db {
                for l in 0..db {
                    s += r[(i * db + k, j * db + l)] * bm[(l, k)];
                }
            }
            g[(i, j)] = s;
        }
    }
    Ok(HermitianOperator::symmetrized(g))
}

/// Partial contraction `tr_A[ρ (A ⊗ 1)]`, an operator on Bob's space.
pub fn contract_alice(rho: &DensityMatrix, a: &HermitianOperator, db: usize) -> Result<HermitianOperator> {
    let da = a.dim();
    if da * db != rho.dim() {
        return Err(Error::Dimension(format!("{da}x{db} split of dimension {}", rho.dim())));
    }
    let r = rho.operator().matrix();
    let am = a.matrix();
    let mut h = Matrix::zeros(db, db);
    for k in 0..db {
        for l in 0..db {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..da {
                for j in 0..da {
                    s += r[(i * db + k, j * db + l)] * am[(j, i)];
                }
            }
            h[(k, l)] = s;
        }
    }
    Ok(HermitianOperator::symmetrized(h))
}

/// `⟨ψ⁺|A⊗B|ψ⁺⟩ = tr(A Bᵀ)/2` for 2×2 matrices.
pub fn psiplus_expectation(a: &Matrix, b: &Matrix) -> C64 {
    (a * &b.transpose()).trace() * 0.5
}

/// Rank of a PSD operator at the given eigenvalue cutoff.
pub fn numerical_rank(op: &HermitianOperator, cutoff: f64) -> Result<usize> {
    Ok(herm_eig(op)?.values.iter().filter(|&&v| v > cutoff).count())
}

/// `A ⊗ B` for operators, used to assemble Bell operators.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(HermitianOperator::symmetrized(kron(a.matrix(), b.matrix())?))
}

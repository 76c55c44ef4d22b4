//! Predictive states of a finite bipartite system `H_A ⊗ H_B`.
//!
//! A set of mutually orthogonal subspaces of `H_B` is declared predictively
//! equivalent. Each subspace with orthonormal basis `φ_1..φ_{N1}` collapses
//! onto the ray of `γ = (1/√N1) Σ φ_i`; the inequivalent remainder is kept
//! as is. For every basis vector `ψ_i` of `H_A`, the coefficients
//! `a_j = ⟨ψ_i φ_j|Ψ⟩` of one subspace are replaced by the single coefficient
//!
//! ```text
//! √(Σ_j |a_j|²) · (Σ_j a_j) / |Σ_j a_j|      on |ψ_i⟩|γ⟩,
//! ```
//!
//! which keeps the probability of the class and the phase of its projection.
//! The predictive complexity is the von Neumann entropy of the reduced
//! density operator of the resulting state.
//!
//! When `Σ_j a_j` vanishes (relative to `√(Σ|a_j|²)`) the projection lies in
//! the kernel and the phase is undefined; it is then set to 1 and counted in
//! [`PredictiveState::degenerate_phases`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, trace_distance};

/// Relative size of `|Σ a_j|` below which the phase is treated as undefined.
pub const DEGENERATE_PHASE_TOL: f64 = 1e-12;
pub const STATE_NORM_TOL: f64 = 1e-12;
pub const DENSITY_TRACE_TOL: f64 = 1e-9;
/// Eigenvalues down to this are clipped to zero; anything lower is an error.
pub const EIGENVALUE_CLIP: f64 = 1e-12;
const ORTHONORMAL_TOL: f64 = 1e-10;

/// A pure state of `H_A ⊗ H_B` as the coefficient matrix `a_ij`
/// (rows over `H_A`, columns over `H_B`).
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    amplitudes: DMatrix<C64>,
}

impl BipartiteState {
    pub fn new(amplitudes: DMatrix<C64>) -> Result<Self> {
        let deviation = (amplitudes.norm_squared() - 1.0).abs();
        if deviation > STATE_NORM_TOL {
            return Err(Error::Normalization { deviation });
        }
        Ok(BipartiteState { amplitudes })
    }

    /// Rescale to unit norm.
    pub fn normalized(amplitudes: DMatrix<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Normalization { deviation: 1.0 });
        }
        Ok(BipartiteState { amplitudes: amplitudes / C64::new(norm, 0.0) })
    }

    /// `|ψ⟩ ⊗ |φ⟩` for unit vectors.
    pub fn product(psi: &DVector<C64>, phi: &DVector<C64>) -> Result<Self> {
        BipartiteState::new(psi * phi.transpose())
    }

    /// Interpret a flat vector with index `i·dim_b + j`.
    pub fn from_flat(flat: &DVector<C64>, dim_a: usize, dim_b: usize) -> Result<Self> {
        if flat.len() != dim_a * dim_b {
            return Err(Error::Shape { expected: dim_a * dim_b, got: flat.len() });
        }
        BipartiteState::new(DMatrix::from_fn(dim_a, dim_b, |i, j| flat[i * dim_b + j]))
    }

    pub fn to_flat(&self) -> DVector<C64> {
        let (da, db) = self.amplitudes.shape();
        DVector::from_fn(da * db, |k, _| self.amplitudes[(k / db, k % db)])
    }

    pub fn dim_a(&self) -> usize {
        self.amplitudes.nrows()
    }

    pub fn dim_b(&self) -> usize {
        self.amplitudes.ncols()
    }

    pub fn amplitudes(&self) -> &DMatrix<C64> {
        &self.amplitudes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Mutually orthogonal equivalence subspaces of `H_B` and the orthonormal
/// basis of their complement.
#[derive(Clone, Debug)]
pub struct EquivalencePartition {
    dim_b: usize,
    subspaces: Vec<Vec<DVector<C64>>>,
    remainder: Vec<DVector<C64>>,
}

impl EquivalencePartition {
    /// No equivalences: the predictive map is the identity.
    pub fn trivial(dim_b: usize) -> Self {
        EquivalencePartition { dim_b, subspaces: Vec::new(), remainder: unit_vectors(dim_b, 0..dim_b) }
    }

    pub fn new(dim_b: usize, subspaces: Vec<Vec<DVector<C64>>>) -> Result<Self> {
        let all: Vec<&DVector<C64>> = subspaces.iter().flatten().collect();
        for (k, sub) in subspaces.iter().enumerate() {
            if sub.len() < 2 {
                return Err(Error::Geometry(format!("subspace {k} has dimension {} (< 2)", sub.len())));
            }
        }
        if let Some(v) = all.iter().find(|v| v.len() != dim_b) {
            return Err(Error::Geometry(format!("vector of length {} in a space of dimension {dim_b}", v.len())));
        }
        if all.len() > dim_b {
            return Err(Error::Geometry(format!("{} vectors cannot be orthonormal in dimension {dim_b}", all.len())));
        }
        for (a, u) in all.iter().enumerate() {
            for (b, v) in all.iter().enumerate().skip(a) {
                let target = if a == b { 1.0 } else { 0.0 };
                let dev = (u.dotc(v) - C64::new(target, 0.0)).norm();
                if dev > ORTHONORMAL_TOL {
                    return Err(Error::Geometry(format!("vectors {a} and {b} violate orthonormality by {dev:e}")));
                }
            }
        }
        let remainder = complement_basis(dim_b, &all);
        Ok(EquivalencePartition { dim_b, subspaces, remainder })
    }

    /// Classes of computational basis vectors `|k⟩_B`; everything not listed
    /// is inequivalent.
    pub fn from_basis_classes(dim_b: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut used = vec![false; dim_b];
        for class in classes {
            if class.len() < 2 {
                return Err(Error::Geometry(format!("class of size {} (< 2)", class.len())));
            }
            for &k in class {
                if k >= dim_b || std::mem::replace(&mut used[k], true) {
                    return Err(Error::Geometry(format!("basis index {k} out of range or repeated")));
                }
            }
        }
        let subspaces = classes.iter().map(|c| unit_vectors(dim_b, c.iter().copied())).collect();
        let remainder = unit_vectors(dim_b, (0..dim_b).filter(|&k| !used[k]));
        Ok(EquivalencePartition { dim_b, subspaces, remainder })
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn subspaces(&self) -> &[Vec<DVector<C64>>] {
        &self.subspaces
    }

    pub fn remainder(&self) -> &[DVector<C64>] {
        &self.remainder
    }

    /// `γ = (1/√N1) Σ φ_i`, one per subspace.
    pub fn gammas(&self) -> Vec<DVector<C64>> {
        self.subspaces
            .iter()
            .map(|sub| {
                let scale = C64::new(1.0 / (sub.len() as f64).sqrt(), 0.0);
                sub.iter().fold(DVector::zeros(self.dim_b), |acc, v| acc + v) * scale
            })
            .collect()
    }

    /// Orthonormal basis of the predictive space `H'_B`: the gammas, then the
    /// remainder.
    pub fn predictive_basis(&self) -> Vec<DVector<C64>> {
        let mut basis = self.gammas();
        basis.extend(self.remainder.iter().cloned());
        basis
    }
}

fn unit_vectors(dim: usize, indices: impl Iterator<Item = usize>) -> Vec<DVector<C64>> {
    indices
        .map(|k| {
            let mut v = DVector::zeros(dim);
            v[k] = C64::new(1.0, 0.0);
            v
        })
        .collect()
}

/// Orthonormal basis of the complement of `span(vectors)` by Gram-Schmidt
/// over the computational basis.
fn complement_basis(dim: usize, vectors: &[&DVector<C64>]) -> Vec<DVector<C64>> {
    let mut basis: Vec<DVector<C64>> = vectors.iter().map(|v| (*v).clone()).collect();
    let start = basis.len();
    for mut candidate in unit_vectors(dim, 0..dim) {
        if basis.len() == dim {
            break;
        }
        // Two passes keep the result orthogonal to working precision.
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&candidate);
                candidate.axpy(-c, b, C64::new(1.0, 0.0));
            }
        }
        let norm = candidate.norm();
        if norm > 1e-6 {
            basis.push(candidate / C64::new(norm, 0.0));
        }
    }
    basis.split_off(start)
}

/// The projector `P = Id_remainder + Σ |γ⟩⟨γ|` on `H_B`.
#[derive(Clone, Debug)]
pub struct Projector {
    pub matrix: DMatrix<C64>,
    pub gammas: Vec<DVector<C64>>,
}

pub fn build_projector(part: &EquivalencePartition) -> Projector {
    let gammas = part.gammas();
    let mut matrix = DMatrix::zeros(part.dim_b, part.dim_b);
    for v in &part.remainder {
        matrix += v * v.adjoint();
    }
    for g in &gammas {
        matrix += g * g.adjoint();
    }
    Projector { matrix, gammas }
}

/// `|Ψ'⟩` expressed in the predictive basis of `H'_B`.
#[derive(Clone, Debug)]
pub struct PredictiveState {
    /// `dim_a × dim(H'_B)`; columns follow [`EquivalencePartition::predictive_basis`].
    pub coefficients: DMatrix<C64>,
    pub basis: Vec<DVector<C64>>,
    /// Number of (A-index, subspace) blocks whose phase was undefined.
    pub degenerate_phases: usize,
}

impl PredictiveState {
    /// The state on `H_A ⊗ H'_B`, columns in predictive-basis order.
    pub fn to_bipartite(&self) -> Result<BipartiteState> {
        BipartiteState::new(self.coefficients.clone())
    }

    /// The same state as a vector of `H_A ⊗ H_B` (it lies in the image of `P`).
    pub fn embed(&self) -> Result<BipartiteState> {
        let dim_b = self.basis.first().map_or(0, |b| b.len());
        let basis = DMatrix::from_fn(self.basis.len(), dim_b, |r, c| self.basis[r][c]);
        BipartiteState::new(&self.coefficients * basis)
    }
}

/// Coefficient `√(Σ|a_j|²)·phase(Σ a_j)` and whether the phase was undefined.
fn collapse(coeffs: impl Iterator<Item = C64>) -> (C64, bool) {
    let (mass, sum) = coeffs.fold((0.0, C64::new(0.0, 0.0)), |(m, s), a| (m + a.norm_sqr(), s + a));
    if mass == 0.0 {
        return (C64::new(0.0, 0.0), false);
    }
    let root = mass.sqrt();
    if sum.norm() < DEGENERATE_PHASE_TOL * root {
        (C64::new(root, 0.0), true)
    } else {
        (sum / sum.norm() * root, false)
    }
}

fn check_partition(psi: &BipartiteState, part: &EquivalencePartition) -> Result<()> {
    if psi.dim_b() != part.dim_b {
        return Err(Error::Shape { expected: part.dim_b, got: psi.dim_b() });
    }
    Ok(())
}

/// Collapse every equivalence class of `psi` onto its `γ` direction.
pub fn predictive_map(psi: &BipartiteState, part: &EquivalencePartition) -> Result<PredictiveState> {
    check_partition(psi, part)?;
    let basis = part.predictive_basis();
    let n_sub = part.subspaces.len();
    let mut coefficients = DMatrix::zeros(psi.dim_a(), basis.len());
    let mut degenerate = 0;
    for i in 0..psi.dim_a() {
        let row = psi.amplitudes.row(i).transpose();
        for (s, sub) in part.subspaces.iter().enumerate() {
            let (c, flagged) = collapse(sub.iter().map(|phi| phi.dotc(&row)));
            coefficients[(i, s)] = c;
            degenerate += usize::from(flagged);
        }
        for (r, v) in part.remainder.iter().enumerate() {
            coefficients[(i, n_sub + r)] = v.dotc(&row);
        }
    }
    Ok(PredictiveState { coefficients, basis, degenerate_phases: degenerate })
}

/// `ρ_A = tr_B |Ψ⟩⟨Ψ|` or `ρ_B = tr_A |Ψ⟩⟨Ψ|`.
pub fn reduced_density(psi: &BipartiteState, side: Side) -> DMatrix<C64> {
    let a = &psi.amplitudes;
    match side {
        Side::A => a * a.adjoint(),
        Side::B => a.transpose() * a.map(|z| z.conj()),
    }
}

/// `ρ'_A` assembled directly from class sums:
/// `ρ'_A[i,k] = Σ_rem c_ir c_kr* + Σ_classes √(m_i m_k) e^{i(φ_i − φ_k)}`.
pub fn predictive_reduced_density(psi: &BipartiteState, part: &EquivalencePartition) -> Result<DMatrix<C64>> {
    check_partition(psi, part)?;
    let dim_a = psi.dim_a();
    let rows: Vec<DVector<C64>> = (0..dim_a).map(|i| psi.amplitudes.row(i).transpose()).collect();
    let collapsed: Vec<Vec<C64>> = rows
        .iter()
        .map(|row| part.subspaces.iter().map(|sub| collapse(sub.iter().map(|phi| phi.dotc(row))).0).collect())
        .collect();
    let kept: Vec<Vec<C64>> =
        rows.iter().map(|row| part.remainder.iter().map(|v| v.dotc(row)).collect()).collect();
    Ok(DMatrix::from_fn(dim_a, dim_a, |i, k| {
        let rem: C64 = kept[i].iter().zip(&kept[k]).map(|(x, y)| x * y.conj()).sum();
        let cls: C64 = collapsed[i].iter().zip(&collapsed[k]).map(|(x, y)| x * y.conj()).sum();
        rem + cls
    }))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

/// `−tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(rho: &DMatrix<C64>) -> Result<f64> {
    von_neumann_entropy_in(rho, LogBase::Bits)
}

pub fn von_neumann_entropy_in(rho: &DMatrix<C64>, base: LogBase) -> Result<f64> {
    let trace: C64 = rho.trace();
    let deviation = (trace - C64::new(1.0, 0.0)).norm();
    if deviation > DENSITY_TRACE_TOL {
        return Err(Error::Normalization { deviation });
    }
    let hermitian = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let eig = hermitian_eigenvalues(&hermitian);
    if eig[0] < -EIGENVALUE_CLIP {
        return Err(Error::NegativeEigenvalue(eig[0]));
    }
    let nats: f64 = eig.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum();
    Ok(match base {
        LogBase::Bits => nats / std::f64::consts::LN_2,
        LogBase::Nats => nats,
    })
}

/// `½‖tr_B ρ1(t) − tr_B ρ2(t)‖₁` for `ρk(0) = |ψ φk⟩⟨ψ φk|`.
///
/// `dynamics` evolves a flat vector of `H_A ⊗ H_B` (index `i·dim_b + j`) for
/// time `t`. Zero means `φ1` and `φ2` are predictively equivalent at `t` for
/// this `ψ`.
pub fn equivalence_residual<F>(
    phi1: &DVector<C64>,
    phi2: &DVector<C64>,
    psi: &DVector<C64>,
    t: f64,
    dynamics: F,
) -> Result<f64>
where
    F: Fn(&DVector<C64>, f64) -> DVector<C64>,
{
    if phi1.len() != phi2.len() {
        return Err(Error::Shape { expected: phi1.len(), got: phi2.len() });
    }
    let reduced = |phi: &DVector<C64>| -> Result<DMatrix<C64>> {
        let start = BipartiteState::product(psi, phi)?;
        let evolved = dynamics(&start.to_flat(), t);
        let state = BipartiteState::from_flat(&evolved, psi.len(), phi.len())
            .or_else(|_| BipartiteState::normalized(DMatrix::from_fn(psi.len(), phi.len(), |i, j| evolved[i * phi.len() + j])))?;
        Ok(reduced_density(&state, Side::A))
    };
    Ok(trace_distance(&reduced(phi1)?, &reduced(phi2)?))
}

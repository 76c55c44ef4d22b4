//! Bethe-ansatz eigenstates of the two-magnon sector.
//!
//! Wavefunctions have the form
//! `a(n1, n2) = e^{i(k1 n1 + k2 n2 + θ/2)} + e^{i(k1 n2 + k2 n1 − θ/2)}` with
//! `2 cot(θ/2) = cot(k1/2) − cot(k2/2)` and energy `J(2 − cos k1 − cos k2)`
//! above the ferromagnetic reference.
//!
//! Roots are organised by total momentum `K = k1 + k2 = 2πm/N`, taken in
//! `(−π, π]`, and relative momentum `q` with `k1,2 = K/2 ± q`. Periodicity
//! requires `N q − θ(q) = π p` with `p ≡ m (mod 2)`. For each `K` the cell
//! holds:
//!
//! * one zero-momentum root `k1 = 0, k2 = K, θ = 0` (the total-spin
//!   descendant of a one-magnon state);
//! * real roots `0 < q < π`, one per admissible `p`, found by safeguarded
//!   Newton iteration on the increasing branch of `N q − θ(q)`;
//! * at most one bound root `q = i v`, `v > 0`, whose equation is
//!   `tanh(Nv/2) = (cosh v − cos(K/2))/sinh v` for even `p` and the same with
//!   `coth` for odd `p`;
//! * at `K = π` (even `N`) the bound root degenerates to infinite `v`: the two
//!   magnons sit on neighbouring sites with energy `J`. This contact root has
//!   no finite momenta, so it carries no dispersion or phase residual.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::propagate::Propagator;
use crate::sector::{pairs, ChainConfig, SectorState};

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootClass {
    /// One momentum vanishes; `θ = 0`.
    KZero,
    /// Real momenta: two-magnon scattering states.
    RealPair,
    /// Complex-conjugate momenta `K/2 ± iv`: bound states.
    Bound,
    /// The `K = π` bound state in its `v → ∞` limit.
    ContactBound,
}

impl RootClass {
    pub fn label(self) -> &'static str {
        match self {
            RootClass::KZero => "k-zero",
            RootClass::RealPair => "real-pair",
            RootClass::Bound => "bound",
            RootClass::ContactBound => "contact-bound",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetheRoot {
    /// Total momentum index `m`, `K = 2πm/N` folded into `(−π, π]`.
    pub momentum_index: i64,
    /// Quantization integer `p` of `N q − θ = π p`.
    pub quantum_number: i64,
    pub k1: C64,
    pub k2: C64,
    pub theta: C64,
    /// Energy relative to E0, including the coupling.
    pub energy: f64,
    pub class: RootClass,
}

impl BetheRoot {
    pub fn total_momentum(&self, sites: usize) -> f64 {
        2.0 * PI * self.momentum_index as f64 / sites as f64
    }

    /// `|E − J(2 − cos k1 − cos k2)|`, or `None` for the contact root.
    pub fn dispersion_residual(&self, coupling: f64) -> Option<f64> {
        if self.class == RootClass::ContactBound {
            return None;
        }
        Some((C64::new(self.energy, 0.0) - dispersion(self.k1, self.k2, coupling)).norm())
    }

    /// Residual of the phase relation, where it is defined.
    pub fn phase_relation_residual(&self) -> Option<f64> {
        match self.class {
            RootClass::KZero | RootClass::ContactBound => None,
            _ => Some(phase_relation_residual(self.k1, self.k2, self.theta)),
        }
    }

    fn cell(&self) -> String {
        format!("m={}, p={}, {}", self.momentum_index, self.quantum_number, self.class.label())
    }
}

/// `J(2 − cos k1 − cos k2)`; complex in general, real on Bethe roots.
pub fn dispersion(k1: C64, k2: C64, coupling: f64) -> C64 {
    (C64::new(2.0, 0.0) - k1.cos() - k2.cos()) * coupling
}

fn cot(z: C64) -> C64 {
    z.cos() / z.sin()
}

/// `|2 cot(θ/2) − (cot(k1/2) − cot(k2/2))|`.
pub fn phase_relation_residual(k1: C64, k2: C64, theta: C64) -> f64 {
    (cot(theta / 2.0) * 2.0 - (cot(k1 / 2.0) - cot(k2 / 2.0))).norm()
}

/// Scattering phase on the principal branch, `θ = 2 arctan(2 / (cot(k1/2) − cot(k2/2)))`.
///
/// When either momentum is a multiple of 2π its cotangent diverges and the
/// root belongs to the zero-momentum class, for which `θ = 0`.
pub fn solve_theta(k1: C64, k2: C64) -> C64 {
    if (k1 / 2.0).sin().norm() < 1e-14 || (k2 / 2.0).sin().norm() < 1e-14 {
        return C64::new(0.0, 0.0);
    }
    let x = cot(k1 / 2.0) - cot(k2 / 2.0);
    if x.norm() == 0.0 {
        return C64::new(PI, 0.0);
    }
    (C64::new(2.0, 0.0) / x).atan() * 2.0
}

/// Number of sector states with total momentum index `m`.
fn cell_dimension(sites: usize, m: i64) -> usize {
    if sites.is_multiple_of(2) {
        sites / 2 - 1 + usize::from(m.rem_euclid(2) == 0)
    } else {
        (sites - 1) / 2
    }
}

/// Relative-momentum problem at fixed total momentum: `c = cos(K/2) ≥ 0`.
struct RealBranch {
    n: f64,
    c: f64,
}

impl RealBranch {
    fn theta(&self, q: f64) -> f64 {
        2.0 * (self.c - q.cos()).atan2(q.sin())
    }

    fn dtheta(&self, q: f64) -> f64 {
        let c = self.c;
        2.0 * (1.0 - c * q.cos()) / (1.0 - 2.0 * c * q.cos() + c * c)
    }

    fn g(&self, q: f64) -> f64 {
        self.n * q - self.theta(q)
    }

    /// Start of the increasing branch of `g`: zero unless `g` first dips.
    fn branch_start(&self) -> f64 {
        let (n, c) = (self.n, self.c);
        if c >= 1.0 || 2.0 / (1.0 - c) <= n {
            return 0.0;
        }
        let cos_q = (n * (1.0 + c * c) - 2.0) / (2.0 * c * (n - 1.0));
        cos_q.clamp(-1.0, 1.0).acos()
    }

    fn g_at_start(&self, start: f64) -> f64 {
        if start == 0.0 {
            // Limit q → 0+: θ → −π unless c = 1, where θ(q) = q.
            if self.c >= 1.0 {
                0.0
            } else {
                PI
            }
        } else {
            self.g(start)
        }
    }

    /// Root of `g(q) = level` on `[lo, π)`, where `g(lo) < level < g(π)`.
    fn solve(&self, level: f64, lo: f64, seed: f64) -> std::result::Result<f64, String> {
        let f = |q: f64| self.g(q) - level;
        let (mut a, mut b) = (lo, PI);
        let mut q = seed.clamp(a, b);
        for _ in 0..NEWTON_MAX_ITER {
            let fq = f(q);
            if fq < 0.0 {
                a = q;
            } else {
                b = q;
            }
            let slope = self.n - self.dtheta(q);
            let mut next = q - fq / slope;
            if !(next > a && next < b) || !next.is_finite() {
                next = 0.5 * (a + b);
            }
            if (next - q).abs() < NEWTON_TOL {
                return Ok(next);
            }
            q = next;
        }
        Err(format!("no convergence after {NEWTON_MAX_ITER} iterations (last q = {q})"))
    }
}

/// Bound-state equation `F(v) = L(Nv/2)·sinh v − cosh v + c` with
/// `L = tanh` (even parity) or `coth` (odd parity).
fn solve_bound(n: f64, c: f64, odd: bool) -> std::result::Result<f64, String> {
    let f = |v: f64| {
        let x = 0.5 * n * v;
        let l = if odd { 1.0 / x.tanh() } else { x.tanh() };
        l * v.sinh() - v.cosh() + c
    };
    let df = |v: f64| {
        let x = 0.5 * n * v;
        let (l, dl) = if odd {
            let s = x.sinh();
            (1.0 / x.tanh(), -0.5 * n / (s * s))
        } else {
            let ch = x.cosh();
            (x.tanh(), 0.5 * n / (ch * ch))
        };
        dl * v.sinh() + l * v.cosh() - v.sinh()
    };
    let mut a = 1e-9;
    if f(a) >= 0.0 {
        return Err("bound-state equation has no sign change near v = 0".into());
    }
    let mut b = (2.0 * (1.0 / c).ln()).max(1.0);
    let mut grow = 0;
    while f(b) <= 0.0 {
        b *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err("could not bracket the bound-state root".into());
        }
    }
    let mut v = ((1.0 / c).ln()).clamp(a, b);
    for _ in 0..NEWTON_MAX_ITER {
        let fv = f(v);
        if fv < 0.0 {
            a = v;
        } else {
            b = v;
        }
        let mut next = v - fv / df(v);
        if !(next > a && next < b) || !next.is_finite() {
            next = 0.5 * (a + b);
        }
        if (next - v).abs() < NEWTON_TOL * v.max(1.0) {
            return Ok(next);
        }
        v = next;
    }
    Err(format!("no convergence after {NEWTON_MAX_ITER} iterations (last v = {v})"))
}

fn solve_cell(cfg: &ChainConfig, m: usize) -> Result<Vec<BetheRoot>> {
    let sites = cfg.sites();
    let n = sites as f64;
    let coupling = cfg.coupling();
    let ms = if 2 * m <= sites { m as i64 } else { m as i64 - sites as i64 };
    let k = 2.0 * PI * ms as f64 / n;
    let half = 0.5 * k;
    let c = (0.5 * k.abs()).cos().max(0.0);
    let fail = |p: i64, reason: String| Error::SolverFailure { cell: format!("m={ms}, p={p}"), reason };

    let mut roots = vec![BetheRoot {
        momentum_index: ms,
        quantum_number: ms,
        k1: C64::new(0.0, 0.0),
        k2: C64::new(k, 0.0),
        theta: C64::new(0.0, 0.0),
        energy: coupling * (1.0 - k.cos()),
        class: RootClass::KZero,
    }];

    let branch = RealBranch { n, c: if ms == 0 { 1.0 } else { c } };
    let start = branch.branch_start();
    let g_start = branch.g_at_start(start);
    for p in 1..=(sites as i64 - 2) {
        if (p - ms).rem_euclid(2) != 0 {
            continue;
        }
        let level = PI * p as f64;
        if level <= g_start + 1e-12 {
            continue;
        }
        let q = branch.solve(level, start, level / n).map_err(|r| fail(p, r))?;
        if ms != 0 && (q - 0.5 * k.abs()).abs() < 1e-8 {
            // Same state as the zero-momentum root of this cell.
            continue;
        }
        let k1 = C64::new(half + q, 0.0);
        let k2 = C64::new(half - q, 0.0);
        roots.push(BetheRoot {
            momentum_index: ms,
            quantum_number: p,
            k1,
            k2,
            theta: C64::new(branch.theta(q), 0.0),
            energy: dispersion(k1, k2, coupling).re,
            class: RootClass::RealPair,
        });
    }

    let parity = ms.rem_euclid(2);
    if ms != 0 && 2 * ms.unsigned_abs() as usize == sites {
        roots.push(BetheRoot {
            momentum_index: ms,
            quantum_number: parity,
            k1: C64::new(half, f64::INFINITY),
            k2: C64::new(half, f64::NEG_INFINITY),
            theta: C64::new(-PI * parity as f64, f64::INFINITY),
            energy: coupling,
            class: RootClass::ContactBound,
        });
    } else if ms != 0 && (parity == 0 || 1.0 - c > 2.0 / n) {
        let v = solve_bound(n, c, parity == 1).map_err(|r| fail(parity, r))?;
        let k1 = C64::new(half, v);
        let k2 = C64::new(half, -v);
        roots.push(BetheRoot {
            momentum_index: ms,
            quantum_number: parity,
            k1,
            k2,
            theta: C64::new(-PI * parity as f64, n * v),
            energy: coupling * (2.0 - 2.0 * c * v.cosh()),
            class: RootClass::Bound,
        });
    }

    let expected = cell_dimension(sites, ms);
    if roots.len() != expected {
        return Err(fail(
            -1,
            format!("found {} roots, the momentum block has dimension {expected}", roots.len()),
        ));
    }
    Ok(roots)
}

/// All `N(N−1)/2` Bethe roots, ordered by total momentum index `0..N` and
/// then by class and quantum number.
pub fn enumerate_roots(cfg: &ChainConfig) -> Result<Vec<BetheRoot>> {
    enumerate_roots_with(cfg, Execution::default())
}

pub fn enumerate_roots_with(cfg: &ChainConfig, exec: Execution) -> Result<Vec<BetheRoot>> {
    let cells = exec.try_map(cfg.sites(), |m| solve_cell(cfg, m))?;
    Ok(cells.into_iter().flatten().collect())
}

/// A normalized Bethe eigenstate in the position basis.
#[derive(Clone, Debug)]
pub struct BetheState {
    pub root: BetheRoot,
    pub amplitudes: SectorState,
    /// `A` in `a = A·(e^{…} + e^{…})`, making the state unit-norm.
    pub norm_constant: f64,
}

pub fn bethe_state(root: &BetheRoot, cfg: &ChainConfig) -> Result<BetheState> {
    let sites = cfg.sites();
    let k = root.total_momentum(sites);
    let i = C64::new(0.0, 1.0);
    let raw: Vec<C64> = pairs(sites)
        .map(|(n1, n2)| {
            let (x1, x2) = (n1 as f64, n2 as f64);
            if root.class == RootClass::ContactBound {
                let centre = (i * (0.5 * k * (x1 + x2))).exp();
                let r = n2 - n1;
                if r == 1 {
                    centre
                } else if r == sites - 1 {
                    centre * if root.momentum_index.rem_euclid(2) == 0 { 1.0 } else { -1.0 }
                } else {
                    C64::new(0.0, 0.0)
                }
            } else {
                let half = root.theta / 2.0;
                (i * (root.k1 * x1 + root.k2 * x2 + half)).exp() + (i * (root.k1 * x2 + root.k2 * x1 - half)).exp()
            }
        })
        .collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 1e-8) {
        return Err(Error::DegenerateRoot { cell: root.cell() });
    }
    let a = 1.0 / norm;
    let amps = DVector::from_iterator(raw.len(), raw.into_iter().map(|z| z * a));
    Ok(BetheState { root: *root, amplitudes: SectorState::from_amplitudes(sites, amps)?, norm_constant: a })
}

/// `e^{−iHt}|n1, n2⟩ = Σ_k e^{−iE_k t} a_k*(n1, n2) |k⟩` over a complete basis.
pub fn bethe_evolve(n1: usize, n2: usize, t: f64, basis: &[BetheState]) -> Result<SectorState> {
    let first = basis.first().ok_or(Error::IncompleteBasis { expected: 1, got: 0 })?;
    let sites = first.amplitudes.sites();
    let expected = sites * (sites - 1) / 2;
    if basis.len() != expected {
        return Err(Error::IncompleteBasis { expected, got: basis.len() });
    }
    let flat = crate::sector::pair_index(n1, n2, sites)?;
    let mut out = DVector::zeros(expected);
    for state in basis {
        let weight = state.amplitudes.amplitudes()[flat].conj() * C64::from_polar(1.0, -state.root.energy * t);
        out.axpy(weight, state.amplitudes.amplitudes(), C64::new(1.0, 0.0));
    }
    SectorState::from_amplitudes(sites, out)
}

/// Squared overlap of an initial state with each root class.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClassWeights {
    pub k_zero: f64,
    pub real_pair: f64,
    pub bound: f64,
}

/// The complete Bethe eigenbasis, usable as an evolution backend.
#[derive(Clone, Debug)]
pub struct BetheBasis {
    config: ChainConfig,
    states: Vec<BetheState>,
    energies: Vec<f64>,
    /// Eigenstates as columns.
    matrix: DMatrix<C64>,
}

impl BetheBasis {
    pub fn new(cfg: &ChainConfig) -> Result<Self> {
        Self::with_execution(cfg, Execution::default())
    }

    pub fn with_execution(cfg: &ChainConfig, exec: Execution) -> Result<Self> {
        if cfg.sector_dim() > crate::sector::MAX_SECTOR_DIM {
            return Err(Error::ResourceLimit(format!(
                "sector dimension {} exceeds the dense basis budget",
                cfg.sector_dim()
            )));
        }
        let roots = enumerate_roots_with(cfg, exec)?;
        if roots.len() != cfg.sector_dim() {
            return Err(Error::IncompleteBasis { expected: cfg.sector_dim(), got: roots.len() });
        }
        let states = exec.try_map(roots.len(), |i| bethe_state(&roots[i], cfg))?;
        let dim = cfg.sector_dim();
        let matrix = DMatrix::from_fn(dim, dim, |r, c| states[c].amplitudes.amplitudes()[r]);
        let energies = states.iter().map(|s| s.root.energy).collect();
        Ok(BetheBasis { config: *cfg, states, energies, matrix })
    }

    pub fn states(&self) -> &[BetheState] {
        &self.states
    }

    pub fn roots(&self) -> impl Iterator<Item = &BetheRoot> {
        self.states.iter().map(|s| &s.root)
    }

    /// Smallest eigenvalue of the Gram matrix `B†B`, i.e. the squared smallest
    /// singular value of the basis.
    pub fn gram_min_eigenvalue(&self) -> f64 {
        let gram = self.matrix.adjoint() * &self.matrix;
        crate::linalg::hermitian_eigenvalues(&gram)[0]
    }

    /// How much of `psi0` lives on each class of roots.
    pub fn class_weights(&self, psi0: &SectorState) -> Result<ClassWeights> {
        let overlaps = self.overlaps(psi0)?;
        let mut w = ClassWeights::default();
        for (state, c) in self.states.iter().zip(overlaps.iter()) {
            let p = c.norm_sqr();
            match state.root.class {
                RootClass::KZero => w.k_zero += p,
                RootClass::RealPair => w.real_pair += p,
                RootClass::Bound | RootClass::ContactBound => w.bound += p,
            }
        }
        Ok(w)
    }
}

impl Propagator for BetheBasis {
    fn config(&self) -> &ChainConfig {
        &self.config
    }

    fn energies(&self) -> &[f64] {
        &self.energies
    }

    fn overlaps(&self, psi0: &SectorState) -> Result<DVector<C64>> {
        if psi0.dim() != self.matrix.nrows() {
            return Err(Error::Shape { expected: self.matrix.nrows(), got: psi0.dim() });
        }
        Ok(self.matrix.ad_mul(psi0.amplitudes()))
    }

    fn synthesize(&self, coeffs: &DVector<C64>) -> SectorState {
        SectorState::from_amplitudes(self.config.sites(), &self.matrix * coeffs).expect("basis rows match sector")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sector::{build_sector_hamiltonian, SpectralDecomposition};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn theta_equal_momenta_is_pi() {
        let th = solve_theta(c(0.7), c(0.7));
        assert!((th - c(PI)).norm() < 1e-15);
    }

    #[test]
    fn theta_k_pi_and_half_pi() {
        // Independent route: bisection on 2cot(θ/2) + 1 = 0 over θ ∈ (−π, 0).
        let f = |t: f64| 2.0 / (t / 2.0).tan() + 1.0;
        let (mut lo, mut hi) = (-PI + 1e-12, -1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let th = solve_theta(c(PI), c(PI / 2.0));
        assert!((th.re - 0.5 * (lo + hi)).abs() < 1e-10);
        assert!(th.im.abs() < 1e-15);
        assert!(phase_relation_residual(c(PI), c(PI / 2.0), th) < 1e-10);
    }

    #[test]
    fn theta_conjugate_momenta_is_complex() {
        let k1 = C64::new(1.1, 0.4);
        let th = solve_theta(k1, k1.conj());
        assert!(th.im.abs() > 1e-3);
        assert!(phase_relation_residual(k1, k1.conj(), th) < 1e-8);
    }

    #[test]
    fn theta_zero_momentum_convention() {
        assert_eq!(solve_theta(c(0.0), c(1.0)), c(0.0));
        assert_eq!(solve_theta(c(1.0), c(2.0 * PI)), c(0.0));
    }

    #[test]
    fn root_counts_and_spectra_match_diagonalization() {
        for n in 4..=13 {
            let cfg = ChainConfig::new(n, 1.0).unwrap();
            let roots = enumerate_roots(&cfg).unwrap();
            assert_eq!(roots.len(), cfg.sector_dim(), "N={n}");
            let mut e: Vec<f64> = roots.iter().map(|r| r.energy).collect();
            e.sort_by(f64::total_cmp);
            let spec = SpectralDecomposition::new(&cfg).unwrap();
            let worst = e.iter().zip(spec.energies()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-9, "N={n}: mismatch {worst}");
        }
    }

    #[test]
    fn states_are_eigenvectors() {
        let cfg = ChainConfig::new(10, 1.0).unwrap();
        let h = build_sector_hamiltonian(&cfg).map(c);
        for root in enumerate_roots(&cfg).unwrap() {
            let st = bethe_state(&root, &cfg).unwrap();
            let v = st.amplitudes.amplitudes();
            assert!((v.norm() - 1.0).abs() < 1e-12);
            let resid = (&h * v - v * c(root.energy)).norm();
            assert!(resid < 1e-8, "{root:?}: {resid}");
        }
    }

    #[test]
    fn bound_state_decays_with_separation() {
        let cfg = ChainConfig::new(16, 1.0).unwrap();
        let root = enumerate_roots(&cfg).unwrap().into_iter().find(|r| r.class == RootClass::Bound).unwrap();
        let st = bethe_state(&root, &cfg).unwrap();
        let mag = |r: usize| st.amplitudes.amplitude(1, 1 + r).unwrap().norm();
        for r in 1..7 {
            assert!(mag(r + 1) < mag(r), "r={r}");
        }
    }

    #[test]
    fn incomplete_basis_rejected() {
        let cfg = ChainConfig::new(6, 1.0).unwrap();
        let basis = BetheBasis::new(&cfg).unwrap();
        assert!(matches!(
            bethe_evolve(1, 2, 1.0, &basis.states()[..14]),
            Err(Error::IncompleteBasis { expected: 15, got: 14 })
        ));
    }
}

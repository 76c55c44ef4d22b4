//! The two-magnon sector of the periodic isotropic Heisenberg chain.
//!
//! Basis states `|n1, n2⟩` carry flipped spins at sites `1 ≤ n1 < n2 ≤ N` on a
//! ferromagnetic (all-up) background and are stored in lexicographic order.
//! All energies are measured relative to the ferromagnetic reference
//! `E0 = −J·N/4`, so the sector Hamiltonian has hopping `−J/2` and a diagonal
//! of `J/2` per antialigned bond.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::trace_distance_pure;

/// Largest sector dimension handled by the dense eigensolver (N = 64).
pub const MAX_SECTOR_DIM: usize = 2016;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainConfig {
    sites: usize,
    coupling: f64,
}

impl ChainConfig {
    pub fn new(sites: usize, coupling: f64) -> Result<Self> {
        if sites < 4 {
            return Err(Error::InvalidConfig(format!("chain needs at least 4 sites, got {sites}")));
        }
        if coupling == 0.0 || !coupling.is_finite() {
            return Err(Error::InvalidConfig(format!("coupling must be finite and nonzero, got {coupling}")));
        }
        Ok(ChainConfig { sites, coupling })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// `N(N−1)/2`.
    pub fn sector_dim(&self) -> usize {
        self.sites * (self.sites - 1) / 2
    }

    /// Energy of the all-up state, `−J·N/4`.
    pub fn ferromagnetic_energy(&self) -> f64 {
        -self.coupling * self.sites as f64 / 4.0
    }

    /// Map any integer onto a site label in `1..=N`.
    pub fn wrap(&self, site: i64) -> usize {
        (site - 1).rem_euclid(self.sites as i64) as usize + 1
    }

    /// Distance between two sites around the ring.
    pub fn circular_distance(&self, a: usize, b: usize) -> usize {
        circular_distance(a, b, self.sites)
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.sites {
            return Err(Error::InvalidConfig(format!("site {site} outside 1..={}", self.sites)));
        }
        Ok(())
    }
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig { sites: 32, coupling: 1.0 }
    }
}

pub fn circular_distance(a: usize, b: usize, sites: usize) -> usize {
    let d = a.abs_diff(b) % sites;
    d.min(sites - d)
}

/// An ordered pair of flipped sites together with its flat basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairIndex {
    pub n1: usize,
    pub n2: usize,
    pub flat: usize,
}

impl PairIndex {
    pub fn new(n1: usize, n2: usize, sites: usize) -> Result<Self> {
        Ok(PairIndex { n1, n2, flat: pair_index(n1, n2, sites)? })
    }

    /// Same as [`PairIndex::new`] but accepts the two sites in either order.
    pub fn unordered(a: usize, b: usize, sites: usize) -> Result<Self> {
        PairIndex::new(a.min(b), a.max(b), sites)
    }

    pub fn contains(&self, site: usize) -> bool {
        self.n1 == site || self.n2 == site
    }
}

/// Lexicographic zero-based index of `|n1, n2⟩`.
pub fn pair_index(n1: usize, n2: usize, sites: usize) -> Result<usize> {
    if n1 == 0 || n1 >= n2 || n2 > sites {
        return Err(Error::InvalidPair { n1, n2, sites });
    }
    Ok((n1 - 1) * sites - n1 * (n1 - 1) / 2 + (n2 - n1 - 1))
}

/// Inverse of [`pair_index`].
pub fn pair_unindex(flat: usize, sites: usize) -> Result<(usize, usize)> {
    let dim = sites * sites.saturating_sub(1) / 2;
    if flat >= dim {
        return Err(Error::InvalidPair { n1: 0, n2: 0, sites });
    }
    // Row n1 holds N − n1 entries.
    let mut start = 0;
    for n1 in 1..sites {
        let len = sites - n1;
        if flat < start + len {
            return Ok((n1, n1 + 1 + (flat - start)));
        }
        start += len;
    }
    unreachable!("flat index below dimension must land in some row")
}

/// All pairs in basis order.
pub fn pairs(sites: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..sites).flat_map(move |n1| (n1 + 1..=sites).map(move |n2| (n1, n2)))
}

/// Complex amplitudes over the two-magnon position basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorState {
    sites: usize,
    amplitudes: DVector<C64>,
}

impl SectorState {
    pub fn from_amplitudes(sites: usize, amplitudes: DVector<C64>) -> Result<Self> {
        let expected = sites * (sites - 1) / 2;
        if amplitudes.len() != expected {
            return Err(Error::Shape { expected, got: amplitudes.len() });
        }
        Ok(SectorState { sites, amplitudes })
    }

    /// The position eigenstate `|n1, n2⟩`.
    pub fn basis(sites: usize, n1: usize, n2: usize) -> Result<Self> {
        let flat = pair_index(n1, n2, sites)?;
        let mut amplitudes = DVector::zeros(sites * (sites - 1) / 2);
        amplitudes[flat] = C64::new(1.0, 0.0);
        Ok(SectorState { sites, amplitudes })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    /// `b(n1, n2) = ⟨n1, n2|ψ⟩`, with the two sites in either order.
    pub fn amplitude(&self, a: usize, b: usize) -> Result<C64> {
        Ok(self.amplitudes[PairIndex::unordered(a, b, self.sites)?.flat])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        self.amplitudes /= C64::new(n, 0.0);
        self
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &SectorState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn trace_distance(&self, other: &SectorState) -> f64 {
        trace_distance_pure(&self.amplitudes, &other.amplitudes)
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &SectorState) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_compatible(&self, cfg: &ChainConfig) -> Result<()> {
        if self.sites != cfg.sites() || self.dim() != cfg.sector_dim() {
            return Err(Error::Shape { expected: cfg.sector_dim(), got: self.dim() });
        }
        Ok(())
    }
}

/// Real symmetric sector Hamiltonian `H − E0` in the lexicographic pair basis.
pub fn build_sector_hamiltonian(cfg: &ChainConfig) -> DMatrix<f64> {
    let n = cfg.sites();
    let j = cfg.coupling();
    let dim = cfg.sector_dim();
    let mut h = DMatrix::zeros(dim, dim);
    for (n1, n2) in pairs(n) {
        let col = pair_index(n1, n2, n).expect("pair from enumeration");
        let flipped = |s: usize| s == n1 || s == n2;
        let antialigned = (1..=n).filter(|&s| flipped(s) != flipped(cfg.wrap(s as i64 + 1))).count();
        h[(col, col)] = 0.5 * j * antialigned as f64;
        for (mover, other) in [(n1, n2), (n2, n1)] {
            for step in [-1i64, 1] {
                let dest = cfg.wrap(mover as i64 + step);
                if dest == other {
                    continue;
                }
                let row = PairIndex::unordered(dest, other, n).expect("distinct sites").flat;
                h[(row, col)] -= 0.5 * j;
            }
        }
    }
    h
}

/// `⟨ψ|H|ψ⟩` for a real symmetric sector Hamiltonian.
pub fn energy_expectation(h: &DMatrix<f64>, psi: &SectorState) -> f64 {
    let re = psi.amplitudes.map(|z| z.re);
    let im = psi.amplitudes.map(|z| z.im);
    re.dot(&(h * &re)) + im.dot(&(h * &im))
}

/// Eigenpairs of the sector Hamiltonian, energies ascending (relative to E0).
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    config: ChainConfig,
    energies: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    vectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn new(cfg: &ChainConfig) -> Result<Self> {
        if cfg.sector_dim() > MAX_SECTOR_DIM {
            return Err(Error::ResourceLimit(format!(
                "sector dimension {} exceeds the dense eigensolver budget of {MAX_SECTOR_DIM}",
                cfg.sector_dim()
            )));
        }
        let h = build_sector_hamiltonian(cfg);
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(SpectralDecomposition { config: *cfg, energies, vectors })
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_examples() {
        assert_eq!(pair_index(1, 2, 32).unwrap(), 0);
        assert_eq!(pair_index(31, 32, 32).unwrap(), 495);
        assert_eq!(pair_index(1, 3, 32).unwrap(), 1);
        assert_eq!(pair_index(2, 3, 32).unwrap(), 31);
    }

    #[test]
    fn pair_index_round_trips_exhaustively() {
        let mut expected = 0;
        for (n1, n2) in pairs(32) {
            let flat = pair_index(n1, n2, 32).unwrap();
            assert_eq!(flat, expected);
            assert_eq!(pair_unindex(flat, 32).unwrap(), (n1, n2));
            expected += 1;
        }
        assert_eq!(expected, 496);
    }

    #[test]
    fn invalid_pairs_rejected() {
        assert!(matches!(pair_index(3, 3, 8), Err(Error::InvalidPair { .. })));
        assert!(matches!(pair_index(5, 2, 8), Err(Error::InvalidPair { .. })));
        assert!(matches!(pair_index(0, 2, 8), Err(Error::InvalidPair { .. })));
        assert!(matches!(pair_index(2, 9, 8), Err(Error::InvalidPair { .. })));
        assert!(pair_unindex(28, 8).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ChainConfig::new(3, 1.0).is_err());
        assert!(ChainConfig::new(8, 0.0).is_err());
        assert!(ChainConfig::new(8, f64::NAN).is_err());
        let cfg = ChainConfig::new(32, 1.0).unwrap();
        assert_eq!(cfg.sector_dim(), 496);
        assert_eq!(cfg.ferromagnetic_energy(), -8.0);
        assert_eq!(cfg.wrap(33), 1);
        assert_eq!(cfg.wrap(0), 32);
        assert_eq!(cfg.circular_distance(1, 32), 1);
        assert_eq!(cfg.circular_distance(17, 1), 16);
    }

    #[test]
    fn hamiltonian_is_symmetric_with_expected_entries() {
        let cfg = ChainConfig::new(8, 1.0).unwrap();
        let h = build_sector_hamiltonian(&cfg);
        assert_eq!(h, h.transpose());
        // Separated flips: four antialigned bonds.
        let far = pair_index(2, 5, 8).unwrap();
        assert_eq!(h[(far, far)], 2.0);
        // Neighbours, including across the periodic boundary: two.
        let near = pair_index(1, 8, 8).unwrap();
        assert_eq!(h[(near, near)], 1.0);
        let hop = pair_index(1, 5, 8).unwrap();
        assert_eq!(h[(hop, far)], -0.5);
        // Row sums vanish on the zero-momentum descendant: E = 0 eigenvector.
        let ones = DVector::from_element(cfg.sector_dim(), 1.0);
        assert!((&h * &ones).amax() < 1e-14);
    }

    #[test]
    fn spectral_decomposition_is_orthonormal_eigenbasis() {
        let cfg = ChainConfig::new(10, 1.3).unwrap();
        let spec = SpectralDecomposition::new(&cfg).unwrap();
        let v = spec.vectors();
        let gram = v.transpose() * v;
        assert!((gram - DMatrix::identity(45, 45)).amax() < 1e-10);
        let h = build_sector_hamiltonian(&cfg);
        for (k, &e) in spec.energies().iter().enumerate() {
            let col = v.column(k);
            assert!((&h * col - col * e).amax() < 1e-10);
        }
        assert!(spec.energies().windows(2).all(|w| w[0] <= w[1]));
        assert!(spec.energies()[0].abs() < 1e-12);
    }

    #[test]
    fn resource_guard() {
        let cfg = ChainConfig::new(80, 1.0).unwrap();
        assert!(matches!(SpectralDecomposition::new(&cfg), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn sector_state_shape_checks() {
        assert!(matches!(
            SectorState::from_amplitudes(8, DVector::zeros(27)),
            Err(Error::Shape { expected: 28, got: 27 })
        ));
        let s = SectorState::basis(8, 2, 5).unwrap();
        assert_eq!(s.amplitude(5, 2).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(s.norm(), 1.0);
    }
}

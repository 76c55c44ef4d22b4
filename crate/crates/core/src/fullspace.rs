//! Brute-force evolution in the full `2^N`-dimensional Hilbert space.
//!
//! This path never touches the sector Hamiltonian or any eigensolver: the
//! Heisenberg Hamiltonian is applied bond by bond to bit-encoded spin
//! configurations and the propagator is a short-step Taylor series. It exists
//! to validate the sector code on small chains.
//!
//! Encoding: bit `n − 1` of a configuration is set when site `n` is flipped
//! (spin down).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::sector::{pair_index, ChainConfig, SectorState};

pub const MAX_FULL_SPACE_SITES: usize = 12;

/// Heisenberg Hamiltonian `H = −J Σ S_n·S_{n+1}` acting on full-space vectors.
#[derive(Clone, Copy, Debug)]
pub struct FullSpaceHamiltonian {
    config: ChainConfig,
}

impl FullSpaceHamiltonian {
    pub fn new(cfg: &ChainConfig) -> Result<Self> {
        if cfg.sites() > MAX_FULL_SPACE_SITES {
            return Err(Error::ResourceLimit(format!(
                "full-space evolution is limited to N ≤ {MAX_FULL_SPACE_SITES}, got {}",
                cfg.sites()
            )));
        }
        Ok(FullSpaceHamiltonian { config: *cfg })
    }

    pub fn dim(&self) -> usize {
        1 << self.config.sites()
    }

    /// `out = H·psi`.
    pub fn apply(&self, psi: &[C64], out: &mut [C64]) {
        let n = self.config.sites();
        let j = self.config.coupling();
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (state, &amp) in psi.iter().enumerate() {
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            for site in 0..n {
                let next = (site + 1) % n;
                let a = (state >> site) & 1;
                let b = (state >> next) & 1;
                if a == b {
                    out[state] += amp * (-0.25 * j);
                } else {
                    out[state] += amp * (0.25 * j);
                    let swapped = state ^ (1 << site) ^ (1 << next);
                    out[swapped] += amp * (-0.5 * j);
                }
            }
        }
    }

    /// `⟨F|H|F⟩` for the all-up configuration.
    pub fn ferromagnetic_energy(&self) -> f64 {
        let mut psi = vec![C64::new(0.0, 0.0); self.dim()];
        psi[0] = C64::new(1.0, 0.0);
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply(&psi, &mut out);
        out[0].re
    }

    /// `e^{−i(H − E0)t} psi` via a Taylor series on steps of norm at most ½.
    pub fn evolve(&self, psi: &[C64], t: f64) -> Vec<C64> {
        let e0 = self.ferromagnetic_energy();
        // ‖H − E0‖ ≤ |J|·N (each bond term has norm ≤ |J|·3/4, plus |E0|).
        let bound = self.config.coupling().abs() * self.config.sites() as f64;
        let steps = ((t.abs() * bound) / 0.5).ceil().max(1.0) as usize;
        let h = t / steps as f64;
        let mut state = psi.to_vec();
        let mut term = vec![C64::new(0.0, 0.0); self.dim()];
        let mut scratch = vec![C64::new(0.0, 0.0); self.dim()];
        for _ in 0..steps {
            term.copy_from_slice(&state);
            for k in 1..=60 {
                self.apply(&term, &mut scratch);
                let factor = C64::new(0.0, -h / k as f64);
                let mut size = 0.0;
                for ((t_i, s_i), st_i) in term.iter_mut().zip(&scratch).zip(state.iter_mut()) {
                    *t_i = factor * (s_i - *t_i * e0);
                    *st_i += *t_i;
                    size += t_i.norm_sqr();
                }
                if size < 1e-36 {
                    break;
                }
            }
        }
        state
    }
}

/// The configuration with flips at sites `n1` and `n2`.
pub fn basis_configuration(n1: usize, n2: usize) -> usize {
    (1 << (n1 - 1)) | (1 << (n2 - 1))
}

/// Restrict a full-space vector to its two-magnon components (not renormalized).
pub fn project_two_magnon(cfg: &ChainConfig, full: &[C64]) -> SectorState {
    let n = cfg.sites();
    let mut amps = DVector::zeros(cfg.sector_dim());
    for (state, &amp) in full.iter().enumerate() {
        if state.count_ones() == 2 {
            let n1 = state.trailing_zeros() as usize + 1;
            let n2 = (usize::BITS - 1 - state.leading_zeros()) as usize + 1;
            amps[pair_index(n1, n2, n).expect("two set bits")] = amp;
        }
    }
    SectorState::from_amplitudes(n, amps).expect("sector dimension")
}

/// Embed a sector state into the full space.
pub fn embed_two_magnon(psi: &SectorState) -> Vec<C64> {
    let n = psi.sites();
    let mut full = vec![C64::new(0.0, 0.0); 1 << n];
    for (flat, (n1, n2)) in crate::sector::pairs(n).enumerate() {
        full[basis_configuration(n1, n2)] = psi.amplitudes()[flat];
    }
    full
}

/// `e^{−iHt}|n1, n2⟩` evolved in the full space and projected onto the
/// two-magnon sector. Global phase matches the sector convention (E0 removed).
pub fn full_space_oracle(cfg: &ChainConfig, n1: usize, n2: usize, t: f64) -> Result<SectorState> {
    let ham = FullSpaceHamiltonian::new(cfg)?;
    pair_index(n1, n2, cfg.sites())?;
    let mut psi = vec![C64::new(0.0, 0.0); ham.dim()];
    psi[basis_configuration(n1, n2)] = C64::new(1.0, 0.0);
    Ok(project_two_magnon(cfg, &ham.evolve(&psi, t)))
}

/// Reshape a full-space vector into a `2 × 2^{N−1}` amplitude matrix for the
/// bipartition (site `j`) | (rest). Row 0 is site `j` down, row 1 up; columns
/// enumerate the remaining sites' configurations with site `j` removed.
pub fn split_site(cfg: &ChainConfig, full: &[C64], j: usize) -> DMatrix<C64> {
    let n = cfg.sites();
    let bit = j - 1;
    let low_mask = (1usize << bit) - 1;
    let mut m = DMatrix::zeros(2, 1 << (n - 1));
    for (state, &amp) in full.iter().enumerate() {
        let down = (state >> bit) & 1;
        let rest = (state & low_mask) | ((state >> (bit + 1)) << bit);
        m[(1 - down, rest)] = amp;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagate::Propagator;
    use crate::sector::SpectralDecomposition;

    #[test]
    fn ferromagnetic_reference_energy() {
        for (n, j) in [(6, 1.0), (8, 1.0), (10, -0.7)] {
            let cfg = ChainConfig::new(n, j).unwrap();
            let ham = FullSpaceHamiltonian::new(&cfg).unwrap();
            assert!((ham.ferromagnetic_energy() - cfg.ferromagnetic_energy()).abs() < 1e-14);
        }
    }

    #[test]
    fn initial_condition() {
        let cfg = ChainConfig::new(6, 1.0).unwrap();
        let s = full_space_oracle(&cfg, 2, 5, 0.0).unwrap();
        assert_eq!(s, SectorState::basis(6, 2, 5).unwrap());
    }

    #[test]
    fn sector_closure() {
        let cfg = ChainConfig::new(8, 1.0).unwrap();
        for t in [0.3, 2.0, 7.5] {
            let s = full_space_oracle(&cfg, 1, 6, t).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-10, "t={t}: {}", s.norm());
        }
    }

    #[test]
    fn matches_sector_evolution() {
        let cfg = ChainConfig::new(8, 1.0).unwrap();
        let spec = SpectralDecomposition::new(&cfg).unwrap();
        let oracle = full_space_oracle(&cfg, 1, 4, 5.0).unwrap();
        let sector = spec.evolve_pair(1, 4, 5.0).unwrap();
        assert!(oracle.trace_distance(&sector) < 1e-10);
        // Same phase convention, so amplitudes agree too.
        assert!(oracle.max_abs_diff(&sector) < 1e-10);
    }

    #[test]
    fn size_limit() {
        let cfg = ChainConfig::new(13, 1.0).unwrap();
        assert!(matches!(full_space_oracle(&cfg, 1, 2, 1.0), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn embed_project_round_trip() {
        let cfg = ChainConfig::new(7, 1.0).unwrap();
        let s = SectorState::basis(7, 3, 6).unwrap();
        assert_eq!(project_two_magnon(&cfg, &embed_two_magnon(&s)), s);
    }

    #[test]
    fn split_site_layout() {
        let cfg = ChainConfig::new(4, 1.0).unwrap();
        let mut full = vec![C64::new(0.0, 0.0); 16];
        // flips at sites 1 and 3 -> bits 0 and 2
        full[0b0101] = C64::new(1.0, 0.0);
        let m = split_site(&cfg, &full, 3);
        // site 3 down; remaining sites (1,2,4) have only site 1 flipped -> column 1
        assert_eq!(m[(0, 0b001)], C64::new(1.0, 0.0));
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }
}

//! Exact time evolution inside the two-magnon sector by eigen-expansion.
//!
//! Both backends (dense diagonalization and the Bethe basis) expose the same
//! contract: expand the initial state in energy eigenstates, attach the
//! phases `e^{−iEt}` and resynthesize position amplitudes.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::sector::{ChainConfig, SectorState, SpectralDecomposition};

pub trait Propagator: Sync {
    fn config(&self) -> &ChainConfig;

    /// Eigenenergies relative to E0, in the order used by `overlaps`.
    fn energies(&self) -> &[f64];

    /// `⟨k|ψ0⟩` for every eigenstate `k`.
    fn overlaps(&self, psi0: &SectorState) -> Result<DVector<C64>>;

    /// Position-basis state `Σ_k c_k |k⟩`.
    fn synthesize(&self, coeffs: &DVector<C64>) -> SectorState;

    fn evolve(&self, psi0: &SectorState, t: f64) -> Result<SectorState> {
        Ok(Trajectory::new(self, psi0)?.at(t))
    }

    /// `e^{−iHt}|n1, n2⟩`.
    fn evolve_pair(&self, n1: usize, n2: usize, t: f64) -> Result<SectorState> {
        self.evolve(&SectorState::basis(self.config().sites(), n1, n2)?, t)
    }
}

/// An initial state expanded once in the eigenbasis, evaluated at any time.
pub struct Trajectory<'a, P: Propagator + ?Sized> {
    propagator: &'a P,
    overlaps: DVector<C64>,
}

impl<'a, P: Propagator + ?Sized> Trajectory<'a, P> {
    pub fn new(propagator: &'a P, psi0: &SectorState) -> Result<Self> {
        psi0.check_compatible(propagator.config())?;
        let overlaps = propagator.overlaps(psi0)?;
        Ok(Trajectory { propagator, overlaps })
    }

    pub fn from_pair(propagator: &'a P, n1: usize, n2: usize) -> Result<Self> {
        Trajectory::new(propagator, &SectorState::basis(propagator.config().sites(), n1, n2)?)
    }

    pub fn overlaps(&self) -> &DVector<C64> {
        &self.overlaps
    }

    pub fn at(&self, t: f64) -> SectorState {
        let phased = DVector::from_iterator(
            self.overlaps.len(),
            self.overlaps
                .iter()
                .zip(self.propagator.energies())
                .map(|(c, &e)| c * C64::from_polar(1.0, -e * t)),
        );
        self.propagator.synthesize(&phased)
    }
}

impl Propagator for SpectralDecomposition {
    fn config(&self) -> &ChainConfig {
        SpectralDecomposition::config(self)
    }

    fn energies(&self) -> &[f64] {
        SpectralDecomposition::energies(self)
    }

    fn overlaps(&self, psi0: &SectorState) -> Result<DVector<C64>> {
        psi0.check_compatible(self.config())?;
        let v = self.vectors();
        let re = v.tr_mul(&psi0.amplitudes().map(|z| z.re));
        let im = v.tr_mul(&psi0.amplitudes().map(|z| z.im));
        Ok(DVector::from_iterator(re.len(), re.iter().zip(im.iter()).map(|(&a, &b)| C64::new(a, b))))
    }

    fn synthesize(&self, coeffs: &DVector<C64>) -> SectorState {
        let v = self.vectors();
        let re = v * coeffs.map(|z| z.re);
        let im = v * coeffs.map(|z| z.im);
        let amps = DVector::from_iterator(re.len(), re.iter().zip(im.iter()).map(|(&a, &b)| C64::new(a, b)));
        SectorState::from_amplitudes(self.config().sites(), amps).expect("eigenvector length matches sector")
    }
}

/// Which eigenbasis drives the evolution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EngineKind {
    #[default]
    Spectral,
    Bethe,
}

impl std::str::FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(EngineKind::Spectral),
            "bethe" => Ok(EngineKind::Bethe),
            other => Err(Error::InvalidConfig(format!("unknown engine '{other}' (expected spectral or bethe)"))),
        }
    }
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EngineKind::Spectral => "spectral",
            EngineKind::Bethe => "bethe",
        })
    }
}

/// Build the requested backend for a chain.
pub fn build_engine(kind: EngineKind, cfg: &ChainConfig) -> Result<Box<dyn Propagator>> {
    Ok(match kind {
        EngineKind::Spectral => Box::new(SpectralDecomposition::new(cfg)?),
        EngineKind::Bethe => Box::new(crate::bethe::BetheBasis::new(cfg)?),
    })
}

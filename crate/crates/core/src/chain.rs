//! Predictive complexity of a single site `j` of the chain.
//!
//! Subsystem A is site `j` (basis `[↓, ↑]`), B is the rest of the ring. A
//! two-magnon state puts B either in a one-magnon state `|n⟩_B` (when `j` is
//! flipped, amplitude `b(j, n)`) or in a two-magnon state `|n1, n2⟩_B`.
//!
//! Sites within circular distance `r_h` of `j` are inside the horizon. Exterior
//! states are grouped by what the horizon sees:
//!
//! * class I: nothing flipped inside, i.e. out-out pairs together with the
//!   one-magnon states `|n⟩_B` with `n` outside;
//! * class II(n_in): pairs with one flip at `n_in` inside and one outside;
//! * everything else (both flips inside, one-magnon inside) is kept as is.
//!
//! Only class I mixes the two rows of A, which gives
//!
//! ```text
//! ⟨↓|ρ'_A|↑⟩ = √(Σ_out |b(j,n)|²) · √(Σ_{out,out} |b|²) · e^{i(φ↓ − φ↑)}
//! ```
//!
//! with `φ↓ = arg Σ_out b(j, n)` and `φ↑ = arg Σ_{out,out} b`. The unprojected
//! `ρ_A` is diagonal because a state cannot be in both magnon sectors of B.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::predictive::{
    predictive_map, reduced_density, BipartiteState, EquivalencePartition, PredictiveState, Side,
    DEGENERATE_PHASE_TOL,
};
use crate::propagate::{Propagator, Trajectory};
use crate::sector::{circular_distance, pair_index, pairs, ChainConfig, SectorState};

/// Slack on the monitored `C ≤ S` relation.
pub const CONJECTURE_SLACK: f64 = 1e-9;

/// Focal site and horizon radius on a ring of `sites`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HorizonSpec {
    sites: usize,
    site: usize,
    radius: usize,
}

impl HorizonSpec {
    pub fn new(sites: usize, site: usize, radius: usize) -> Result<Self> {
        if site == 0 || site > sites {
            return Err(Error::InvalidConfig(format!("site {site} outside 1..={sites}")));
        }
        if radius == 0 {
            return Err(Error::InvalidConfig("horizon radius must be at least 1".into()));
        }
        if 2 * radius + 1 >= sites {
            return Err(Error::InvalidConfig(format!(
                "horizon radius {radius} covers the whole chain of {sites} sites"
            )));
        }
        Ok(HorizonSpec { sites, site, radius })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Within the horizon (the focal site itself counts as inside).
    pub fn is_inside(&self, n: usize) -> bool {
        circular_distance(n, self.site, self.sites) <= self.radius
    }

    /// Number of sites outside the horizon, `N − 2r_h − 1`.
    pub fn outside_count(&self) -> usize {
        self.sites - 2 * self.radius - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairClass {
    /// Pair `(j, other)`: site `j` is flipped, B holds one magnon.
    ContainsSite { other: usize },
    /// Type I.
    Outside,
    /// Type II, labelled by the flipped site inside the horizon.
    Straddle { inside: usize },
    /// Type III.
    Inside,
}

#[derive(Clone, Debug)]
pub struct PairClassification {
    spec: HorizonSpec,
    classes: Vec<PairClass>,
}

fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

pub fn classify_pairs(h: &HorizonSpec) -> PairClassification {
    let classes = pairs(h.sites)
        .map(|(n1, n2)| {
            if n1 == h.site || n2 == h.site {
                return PairClass::ContainsSite { other: if n1 == h.site { n2 } else { n1 } };
            }
            match (h.is_inside(n1), h.is_inside(n2)) {
                (false, false) => PairClass::Outside,
                (true, true) => PairClass::Inside,
                (true, false) => PairClass::Straddle { inside: n1 },
                (false, true) => PairClass::Straddle { inside: n2 },
            }
        })
        .collect();
    PairClassification { spec: *h, classes }
}

impl PairClassification {
    pub fn spec(&self) -> &HorizonSpec {
        &self.spec
    }

    /// Class of every basis pair, in basis order.
    pub fn classes(&self) -> &[PairClass] {
        &self.classes
    }

    fn flats(&self, keep: impl Fn(&PairClass) -> bool) -> Vec<usize> {
        self.classes.iter().enumerate().filter(|(_, c)| keep(c)).map(|(k, _)| k).collect()
    }

    /// Flat indices of the type I pairs.
    pub fn outside_pairs(&self) -> Vec<usize> {
        self.flats(|c| *c == PairClass::Outside)
    }

    pub fn inside_pairs(&self) -> Vec<usize> {
        self.flats(|c| *c == PairClass::Inside)
    }

    /// Pairs `(j, n)` for every `n ≠ j`.
    pub fn site_pairs(&self) -> Vec<usize> {
        self.flats(|c| matches!(c, PairClass::ContainsSite { .. }))
    }

    /// Pairs `(j, n)` with `n` outside the horizon.
    pub fn site_outside_pairs(&self) -> Vec<usize> {
        let h = self.spec;
        self.flats(|c| matches!(c, PairClass::ContainsSite { other } if !h.is_inside(*other)))
    }

    /// Type II classes ordered by their inside site.
    pub fn straddle_classes(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
        for (flat, c) in self.classes.iter().enumerate() {
            if let PairClass::Straddle { inside } = *c {
                match out.iter_mut().find(|(s, _)| *s == inside) {
                    Some((_, v)) => v.push(flat),
                    None => out.push((inside, vec![flat])),
                }
            }
        }
        out.sort_by_key(|(s, _)| *s);
        out
    }

    /// Check the class sizes against their closed forms and that every pair
    /// was assigned exactly once.
    pub fn verify(&self) -> Result<()> {
        let h = self.spec;
        let m = h.outside_count();
        let fail = |what: &str, expected: usize, got: usize| {
            Err(Error::Geometry(format!("{what}: expected {expected}, got {got}")))
        };
        let n_i = self.outside_pairs().len();
        if n_i != choose2(m) {
            return fail("type I pairs", choose2(m), n_i);
        }
        let straddle = self.straddle_classes();
        if straddle.len() != 2 * h.radius {
            return fail("type II classes", 2 * h.radius, straddle.len());
        }
        if let Some((_, c)) = straddle.iter().find(|(_, c)| c.len() != m) {
            return fail("type II class size", m, c.len());
        }
        let n_iii = self.inside_pairs().len();
        if n_iii != choose2(2 * h.radius) {
            return fail("type III pairs", choose2(2 * h.radius), n_iii);
        }
        let n_site = self.site_pairs().len();
        if n_site != h.sites - 1 {
            return fail("pairs containing the site", h.sites - 1, n_site);
        }
        let total = n_i + straddle.iter().map(|(_, c)| c.len()).sum::<usize>() + n_iii + n_site;
        if total != self.classes.len() || total != choose2(h.sites) {
            return fail("total pairs", choose2(h.sites), total);
        }
        Ok(())
    }
}

/// `b(n1, n2, t) = ⟨n1, n2|e^{−iHt}|n1p, n2p⟩`.
pub fn amplitudes_b(engine: &dyn Propagator, n1p: usize, n2p: usize, t: f64) -> Result<SectorState> {
    engine.evolve_pair(n1p.min(n2p), n1p.max(n2p), t)
}

/// A single-site density matrix in the basis `[↓, ↑]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedDensity2 {
    pub p_down: f64,
    pub p_up: f64,
    /// `⟨↓|ρ|↑⟩`.
    pub coherence: C64,
}

impl ReducedDensity2 {
    pub fn matrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(self.p_down, 0.0), self.coherence, self.coherence.conj(), C64::new(self.p_up, 0.0)],
        )
    }

    /// `(λ+, λ−)` from the closed form `½tr ± √(Δ²/4 + |c|²)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let trace = self.p_down + self.p_up;
        let delta = self.p_down - self.p_up;
        let radius = (0.25 * delta * delta + self.coherence.norm_sqr()).sqrt();
        let plus = 0.5 * trace + radius;
        // The determinant keeps the small eigenvalue accurate.
        let det = self.p_down * self.p_up - self.coherence.norm_sqr();
        let minus = if plus > 0.0 { det / plus } else { 0.0 };
        (plus, minus)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        let (plus, minus) = self.eigenvalues();
        [plus, minus].iter().filter(|&&l| l > 0.0).map(|&l| -l * l.log2()).sum::<f64>().max(0.0)
    }
}

fn phase(sum: C64, mass: f64) -> C64 {
    if mass == 0.0 || sum.norm() < DEGENERATE_PHASE_TOL * mass.sqrt() {
        C64::new(1.0, 0.0)
    } else {
        sum / sum.norm()
    }
}

fn mass_and_sum(amps: &DVector<C64>, flats: &[usize]) -> (f64, C64) {
    flats.iter().fold((0.0, C64::new(0.0, 0.0)), |(m, s), &k| (m + amps[k].norm_sqr(), s + amps[k]))
}

/// Precomputed index sets for evaluating one site at many times.
#[derive(Clone, Debug)]
pub struct SiteProbe {
    site: usize,
    site_pairs: Vec<usize>,
    horizons: Vec<HorizonProbe>,
}

#[derive(Clone, Debug)]
struct HorizonProbe {
    radius: usize,
    site_outside: Vec<usize>,
    outside: Vec<usize>,
}

/// Entropy and complexities of one site at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteSample {
    pub entropy: f64,
    pub complexity: Vec<f64>,
}

impl SiteProbe {
    pub fn new(cfg: &ChainConfig, site: usize, radii: &[usize]) -> Result<Self> {
        cfg.check_site(site)?;
        let mut site_pairs = Vec::new();
        let mut horizons = Vec::with_capacity(radii.len());
        for &radius in radii {
            let cls = classify_pairs(&HorizonSpec::new(cfg.sites(), site, radius)?);
            site_pairs = cls.site_pairs();
            horizons.push(HorizonProbe { radius, site_outside: cls.site_outside_pairs(), outside: cls.outside_pairs() });
        }
        if radii.is_empty() {
            site_pairs = (1..=cfg.sites())
                .filter(|&n| n != site)
                .map(|n| pair_index(n.min(site), n.max(site), cfg.sites()))
                .collect::<Result<_>>()?;
        }
        Ok(SiteProbe { site, site_pairs, horizons })
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn radii(&self) -> Vec<usize> {
        self.horizons.iter().map(|h| h.radius).collect()
    }

    fn diagonal(&self, amps: &DVector<C64>) -> (f64, f64) {
        let p_down: f64 = self.site_pairs.iter().map(|&k| amps[k].norm_sqr()).sum();
        (p_down, amps.norm_squared() - p_down)
    }

    /// `ρ_A` of the site.
    pub fn rho(&self, b: &SectorState) -> ReducedDensity2 {
        let (p_down, p_up) = self.diagonal(b.amplitudes());
        ReducedDensity2 { p_down, p_up, coherence: C64::new(0.0, 0.0) }
    }

    /// `ρ'_A` for the horizon at position `h` in the radius list, with phases.
    pub fn rho_predictive(&self, b: &SectorState, h: usize) -> ReducedDensity2 {
        let amps = b.amplitudes();
        let (p_down, p_up) = self.diagonal(amps);
        let hp = &self.horizons[h];
        let (m_down, s_down) = mass_and_sum(amps, &hp.site_outside);
        let (m_up, s_up) = mass_and_sum(amps, &hp.outside);
        let coherence = phase(s_down, m_down) * phase(s_up, m_up).conj() * (m_down * m_up).sqrt();
        ReducedDensity2 { p_down, p_up, coherence }
    }

    /// `ρ'_A` with every phase set to 1; same eigenvalues as the true one.
    pub fn rho_predictive_magnitude(&self, b: &SectorState, h: usize) -> ReducedDensity2 {
        let amps = b.amplitudes();
        let (p_down, p_up) = self.diagonal(amps);
        let hp = &self.horizons[h];
        let m_down: f64 = hp.site_outside.iter().map(|&k| amps[k].norm_sqr()).sum();
        let m_up: f64 = hp.outside.iter().map(|&k| amps[k].norm_sqr()).sum();
        ReducedDensity2 { p_down, p_up, coherence: C64::new((m_down * m_up).sqrt(), 0.0) }
    }

    pub fn sample(&self, b: &SectorState) -> SiteSample {
        SiteSample {
            entropy: self.rho(b).entropy(),
            complexity: (0..self.horizons.len()).map(|h| self.rho_predictive_magnitude(b, h).entropy()).collect(),
        }
    }
}

/// `ρ_A` of site `j`.
pub fn rho_a_site(b: &SectorState, j: usize) -> Result<ReducedDensity2> {
    let cfg = ChainConfig::new(b.sites(), 1.0)?;
    Ok(SiteProbe::new(&cfg, j, &[])?.rho(b))
}

/// `ρ'_A` of the focal site of `cls`, phases included.
pub fn rho_a_predictive(b: &SectorState, cls: &PairClassification) -> Result<ReducedDensity2> {
    let h = cls.spec();
    if b.sites() != h.sites() {
        return Err(Error::Shape { expected: h.sites(), got: b.sites() });
    }
    let cfg = ChainConfig::new(h.sites(), 1.0)?;
    Ok(SiteProbe::new(&cfg, h.site(), &[h.radius()])?.rho_predictive(b, 0))
}

/// Column layout of `H_B` for the site split: one-magnon states `|n⟩_B`
/// (`n ≠ j`, ascending) first, then pairs not containing `j` in basis order.
#[derive(Clone, Debug)]
pub struct SiteSplit {
    sites: usize,
    site: usize,
    /// Column of each basis pair, on row ↓ for pairs containing `j`.
    columns: Vec<usize>,
    dim_b: usize,
}

impl SiteSplit {
    pub fn new(sites: usize, site: usize) -> Result<Self> {
        if site == 0 || site > sites {
            return Err(Error::InvalidConfig(format!("site {site} outside 1..={sites}")));
        }
        let one = |n: usize| if n < site { n - 1 } else { n - 2 };
        let mut next = sites - 1;
        let columns = pairs(sites)
            .map(|(n1, n2)| {
                if n1 == site {
                    one(n2)
                } else if n2 == site {
                    one(n1)
                } else {
                    next += 1;
                    next - 1
                }
            })
            .collect();
        Ok(SiteSplit { sites, site, columns, dim_b: next })
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Column of `|n⟩_B`.
    pub fn one_magnon_column(&self, n: usize) -> usize {
        if n < self.site {
            n - 1
        } else {
            n - 2
        }
    }

    /// Column of the pair with flat index `flat` (row ↓ if it contains `j`).
    pub fn column(&self, flat: usize) -> usize {
        self.columns[flat]
    }

    /// `b` as a 2 × dim_B amplitude matrix, row 0 = ↓.
    pub fn bipartite(&self, b: &SectorState) -> Result<BipartiteState> {
        if b.sites() != self.sites {
            return Err(Error::Shape { expected: self.sites, got: b.sites() });
        }
        let mut m = DMatrix::zeros(2, self.dim_b);
        for (flat, (n1, n2)) in pairs(self.sites).enumerate() {
            let row = usize::from(n1 != self.site && n2 != self.site);
            m[(row, self.columns[flat])] = b.amplitudes()[flat];
        }
        BipartiteState::new(m)
    }

    /// Horizon classes of `H_B` as a generic partition. Classes of fewer
    /// than two states stay in the remainder.
    pub fn partition(&self, cls: &PairClassification) -> Result<EquivalencePartition> {
        let h = cls.spec();
        if h.sites() != self.sites || h.site() != self.site {
            return Err(Error::Geometry("classification does not match the site split".into()));
        }
        let mut class_i: Vec<usize> =
            (1..=self.sites).filter(|&n| n != self.site && !h.is_inside(n)).map(|n| self.one_magnon_column(n)).collect();
        class_i.extend(cls.outside_pairs().iter().map(|&k| self.columns[k]));
        let mut classes = vec![class_i];
        classes.extend(cls.straddle_classes().into_iter().map(|(_, c)| c.iter().map(|&k| self.columns[k]).collect()));
        classes.retain(|c: &Vec<usize>| c.len() >= 2);
        EquivalencePartition::from_basis_classes(self.dim_b, &classes)
    }
}

/// `|Ψ'⟩` for the focal site of `cls`, phases included.
pub fn predictive_state(b: &SectorState, cls: &PairClassification) -> Result<PredictiveState> {
    let split = SiteSplit::new(b.sites(), cls.spec().site())?;
    predictive_map(&split.bipartite(b)?, &split.partition(cls)?)
}

/// `ρ'_A` through the generic predictive map and partial trace.
pub fn rho_a_predictive_oracle(b: &SectorState, cls: &PairClassification) -> Result<DMatrix<C64>> {
    Ok(reduced_density(&predictive_state(b, cls)?.to_bipartite()?, Side::A))
}

/// `{0, dt, 2dt, ..., t_max}`; `t_max` is included when it is a multiple of `dt`.
pub fn time_grid(dt: f64, t_max: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("time step must be positive, got {dt}")));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidConfig(format!("final time must be positive, got {t_max}")));
    }
    let steps = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

/// A `(site, time, r_h)` cell where the complexity exceeded the entropy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjectureViolation {
    pub site: usize,
    pub time: f64,
    pub radius: usize,
    pub entropy: f64,
    pub complexity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiteSeries {
    pub site: usize,
    pub radii: Vec<usize>,
    pub times: Vec<f64>,
    /// Bits.
    pub entropy: Vec<f64>,
    /// Bits, one series per radius.
    pub complexity: Vec<Vec<f64>>,
}

impl SiteSeries {
    pub fn violations(&self) -> Vec<ConjectureViolation> {
        let mut out = Vec::new();
        for (h, series) in self.complexity.iter().enumerate() {
            for (k, (&c, &s)) in series.iter().zip(&self.entropy).enumerate() {
                if c > s + CONJECTURE_SLACK {
                    out.push(ConjectureViolation {
                        site: self.site,
                        time: self.times[k],
                        radius: self.radii[h],
                        entropy: s,
                        complexity: c,
                    });
                }
            }
        }
        out
    }
}

/// Check the flips and return them ordered.
pub fn check_flips(cfg: &ChainConfig, flips: (usize, usize)) -> Result<(usize, usize)> {
    let (a, b) = (flips.0.min(flips.1), flips.0.max(flips.1));
    pair_index(a, b, cfg.sites())?;
    Ok((a, b))
}

/// Entropy and complexities of site `j` on the grid `{0, dt, ..., t_max}`.
pub fn site_series(
    engine: &dyn Propagator,
    flips: (usize, usize),
    j: usize,
    radii: &[usize],
    dt: f64,
    t_max: f64,
    exec: Execution,
) -> Result<SiteSeries> {
    let cfg = *engine.config();
    let (n1, n2) = check_flips(&cfg, flips)?;
    let probe = SiteProbe::new(&cfg, j, radii)?;
    let times = time_grid(dt, t_max)?;
    let traj = Trajectory::from_pair(engine, n1, n2)?;
    let samples = exec.map(times.len(), |k| probe.sample(&traj.at(times[k])));
    let entropy = samples.iter().map(|s| s.entropy).collect();
    let complexity = (0..radii.len()).map(|h| samples.iter().map(|s| s.complexity[h]).collect()).collect();
    Ok(SiteSeries { site: j, radii: radii.to_vec(), times, entropy, complexity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::predictive::von_neumann_entropy;
    use crate::sector::SpectralDecomposition;

    fn engine(n: usize) -> SpectralDecomposition {
        SpectralDecomposition::new(&ChainConfig::new(n, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn class_sizes_radius_two() {
        for j in [1, 17, 32] {
            let cls = classify_pairs(&HorizonSpec::new(32, j, 2).unwrap());
            cls.verify().unwrap();
            assert_eq!(cls.outside_pairs().len(), 351);
            let ii = cls.straddle_classes();
            assert_eq!(ii.len(), 4);
            assert!(ii.iter().all(|(_, c)| c.len() == 27));
            assert_eq!(cls.inside_pairs().len(), 6);
            assert_eq!(cls.site_pairs().len(), 31);
        }
    }

    #[test]
    fn class_sizes_radius_one() {
        let cls = classify_pairs(&HorizonSpec::new(32, 17, 1).unwrap());
        cls.verify().unwrap();
        assert_eq!(cls.outside_pairs().len(), 406);
        assert_eq!(cls.straddle_classes().iter().map(|(s, c)| (*s, c.len())).collect::<Vec<_>>(), vec![(16, 29), (18, 29)]);
        assert_eq!(cls.inside_pairs().len(), 1);
    }

    #[test]
    fn horizon_wraps_around() {
        let h = HorizonSpec::new(10, 1, 2).unwrap();
        assert!(h.is_inside(10) && h.is_inside(9) && h.is_inside(3));
        assert!(!h.is_inside(4) && !h.is_inside(8));
    }

    #[test]
    fn degenerate_horizons_rejected() {
        assert!(HorizonSpec::new(5, 1, 2).is_err());
        assert!(HorizonSpec::new(6, 1, 2).is_ok());
        assert!(HorizonSpec::new(6, 1, 0).is_err());
        assert!(HorizonSpec::new(6, 7, 1).is_err());
    }

    #[test]
    fn initial_product_states() {
        let b = SectorState::basis(32, 10, 25).unwrap();
        let far = rho_a_site(&b, 17).unwrap();
        assert_eq!((far.p_down, far.p_up), (0.0, 1.0));
        assert_eq!(far.entropy(), 0.0);
        let on = rho_a_site(&b, 10).unwrap();
        assert_eq!((on.p_down, on.p_up), (1.0, 0.0));
        let cls = classify_pairs(&HorizonSpec::new(32, 17, 1).unwrap());
        let p = rho_a_predictive(&b, &cls).unwrap();
        assert_eq!(p.coherence, C64::new(0.0, 0.0));
        assert_eq!(p.entropy(), 0.0);
    }

    #[test]
    fn closed_form_entropy_matches_eigensolver() {
        let rho = ReducedDensity2 { p_down: 0.3, p_up: 0.7, coherence: C64::new(0.2, -0.1) };
        let general = von_neumann_entropy(&rho.matrix()).unwrap();
        assert!((rho.entropy() - general).abs() < 1e-14);
        let pure = ReducedDensity2 { p_down: 0.5, p_up: 0.5, coherence: C64::new(0.0, 0.5) };
        assert!(pure.entropy().abs() < 1e-14);
    }

    #[test]
    fn fast_path_matches_generic_oracle() {
        let spec = engine(8);
        for (t, j, r) in [(0.7, 3, 1), (2.0, 5, 2), (5.3, 8, 1)] {
            let b = amplitudes_b(&spec, 2, 6, t).unwrap();
            let cls = classify_pairs(&HorizonSpec::new(8, j, r).unwrap());
            let fast = rho_a_predictive(&b, &cls).unwrap().matrix();
            let oracle = rho_a_predictive_oracle(&b, &cls).unwrap();
            assert!(max_abs_diff(&fast, &oracle) < 1e-12, "t={t} j={j} r={r}");
            let plain = reduced_density(&SiteSplit::new(8, j).unwrap().bipartite(&b).unwrap(), Side::A);
            assert!(max_abs_diff(&rho_a_site(&b, j).unwrap().matrix(), &plain) < 1e-12);
        }
    }

    #[test]
    fn phases_do_not_change_entropy() {
        let spec = engine(12);
        let b = amplitudes_b(&spec, 3, 9, 3.1).unwrap();
        let probe = SiteProbe::new(spec.config(), 6, &[1, 2]).unwrap();
        for h in 0..2 {
            let a = probe.rho_predictive(&b, h).entropy();
            let m = probe.rho_predictive_magnitude(&b, h).entropy();
            assert!((a - m).abs() < 1e-12);
        }
    }

    #[test]
    fn site_split_dimension() {
        let s = SiteSplit::new(8, 4).unwrap();
        assert_eq!(s.dim_b(), 7 + 21);
        assert_eq!(s.one_magnon_column(3), 2);
        assert_eq!(s.one_magnon_column(5), 3);
    }

    #[test]
    fn time_grid_endpoints() {
        let g = time_grid(0.2, 200.0).unwrap();
        assert_eq!(g.len(), 1001);
        assert!((g[1000] - 200.0).abs() < 1e-9);
        assert_eq!(g[45], 45.0 * 0.2);
        assert!(time_grid(0.0, 1.0).is_err());
        assert!(time_grid(0.1, -1.0).is_err());
    }

    #[test]
    fn series_starts_at_zero_and_respects_bounds() {
        let spec = engine(12);
        let s = site_series(&spec, (3, 9), 6, &[1, 2], 0.25, 10.0, Execution::Sequential).unwrap();
        assert_eq!(s.entropy[0], 0.0);
        assert!(s.complexity.iter().all(|c| c[0] == 0.0));
        for (k, &e) in s.entropy.iter().enumerate() {
            assert!((0.0..=1.0 + 1e-12).contains(&e));
            for c in &s.complexity {
                assert!(c[k] >= 0.0 && c[k] <= e + CONJECTURE_SLACK);
            }
        }
        assert!(s.violations().is_empty());
    }
}

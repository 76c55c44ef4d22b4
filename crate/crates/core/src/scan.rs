//! Spacetime grids over all sites, late-time statistics and peak ratios.

use crate::chain::{check_flips, time_grid, ConjectureViolation, SiteProbe, SiteSeries, CONJECTURE_SLACK};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::propagate::{Propagator, Trajectory};

pub const DEFAULT_DT: f64 = 0.2;
pub const DEFAULT_T_MAX: f64 = 200.0;
/// Peaks are searched within this distance of the hint.
pub const PEAK_SEARCH_HALF_WIDTH: f64 = 1.0;
pub const MIN_WINDOW_SAMPLES: usize = 100;
const TIME_EPS: f64 = 1e-9;

/// Late-time window `[t_max/2, t_max]`.
pub fn default_window(t_max: f64) -> (f64, f64) {
    (0.5 * t_max, t_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Entropy,
    Complexity { radius: usize },
}

impl GridKind {
    /// Short label used in file names and CSV columns.
    pub fn label(&self) -> String {
        match self {
            GridKind::Entropy => "S".into(),
            GridKind::Complexity { radius } => format!("C_rh{radius}"),
        }
    }
}

/// Values in bits for sites `1..=N` (rows) and the time grid (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeGrid {
    pub kind: GridKind,
    pub sites: usize,
    pub times: Vec<f64>,
    values: Vec<f64>,
}

impl SpacetimeGrid {
    pub fn get(&self, site: usize, k: usize) -> f64 {
        self.values[(site - 1) * self.times.len() + k]
    }

    pub fn row(&self, site: usize) -> &[f64] {
        let n = self.times.len();
        &self.values[(site - 1) * n..site * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Index of the grid time closest to `t`.
    pub fn time_index(&self, t: f64) -> usize {
        nearest_index(&self.times, t)
    }

    /// `value(site, t) / grid mean`.
    pub fn contrast(&self, site: usize, t: f64) -> f64 {
        self.get(site, self.time_index(t)) / self.mean()
    }
}

fn nearest_index(times: &[f64], t: f64) -> usize {
    let mut best = 0;
    for (k, &tk) in times.iter().enumerate() {
        if (tk - t).abs() < (times[best] - t).abs() {
            best = k;
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub entropy: SpacetimeGrid,
    /// One grid per radius, in request order.
    pub complexity: Vec<SpacetimeGrid>,
    pub violations: Vec<ConjectureViolation>,
}

impl ScanResult {
    pub fn grids(&self) -> impl Iterator<Item = &SpacetimeGrid> {
        std::iter::once(&self.entropy).chain(&self.complexity)
    }

    /// The series of one site, identical to the corresponding grid rows.
    pub fn site_series(&self, site: usize) -> SiteSeries {
        SiteSeries {
            site,
            radii: self
                .complexity
                .iter()
                .map(|g| match g.kind {
                    GridKind::Complexity { radius } => radius,
                    GridKind::Entropy => unreachable!("complexity grids only"),
                })
                .collect(),
            times: self.entropy.times.clone(),
            entropy: self.entropy.row(site).to_vec(),
            complexity: self.complexity.iter().map(|g| g.row(site).to_vec()).collect(),
        }
    }
}

/// Entropy and complexity of every site on `{0, dt, ..., t_max}`.
///
/// Work is split over time steps: each step synthesizes the state once and
/// evaluates all sites from it.
pub fn spacetime_scan(
    engine: &dyn Propagator,
    flips: (usize, usize),
    radii: &[usize],
    dt: f64,
    t_max: f64,
    exec: Execution,
) -> Result<ScanResult> {
    let cfg = *engine.config();
    let (n1, n2) = check_flips(&cfg, flips)?;
    let times = time_grid(dt, t_max)?;
    let probes = (1..=cfg.sites()).map(|j| SiteProbe::new(&cfg, j, radii)).collect::<Result<Vec<_>>>()?;
    let traj = Trajectory::from_pair(engine, n1, n2)?;
    let columns = exec.map(times.len(), |k| {
        let b = traj.at(times[k]);
        probes.iter().map(|p| p.sample(&b)).collect::<Vec<_>>()
    });

    let n_t = times.len();
    let grid = |kind: GridKind, pick: &dyn Fn(&crate::chain::SiteSample) -> f64| {
        let mut values = vec![0.0; cfg.sites() * n_t];
        for (k, column) in columns.iter().enumerate() {
            for (s, sample) in column.iter().enumerate() {
                values[s * n_t + k] = pick(sample);
            }
        }
        SpacetimeGrid { kind, sites: cfg.sites(), times: times.clone(), values }
    };
    let entropy = grid(GridKind::Entropy, &|s| s.entropy);
    let complexity: Vec<SpacetimeGrid> = radii
        .iter()
        .enumerate()
        .map(|(h, &radius)| grid(GridKind::Complexity { radius }, &|s| s.complexity[h]))
        .collect();

    let mut violations = Vec::new();
    for g in &complexity {
        let GridKind::Complexity { radius } = g.kind else { continue };
        for site in 1..=cfg.sites() {
            for (k, &time) in times.iter().enumerate() {
                let (s, c) = (entropy.get(site, k), g.get(site, k));
                if c > s + CONJECTURE_SLACK {
                    violations.push(ConjectureViolation { site, time, radius, entropy: s, complexity: c });
                }
            }
        }
    }
    Ok(ScanResult { entropy, complexity, violations })
}

/// Mean and population standard deviation over a time window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquilibriumStats {
    pub mean: f64,
    pub std: f64,
    pub samples: usize,
    pub window: (f64, f64),
}

pub fn equilibrium_stats(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<EquilibriumStats> {
    if times.len() != values.len() {
        return Err(Error::Shape { expected: times.len(), got: values.len() });
    }
    let (t0, t1) = window;
    let (first, last) = match (times.first(), times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::Stats("empty series".into())),
    };
    if t0.partial_cmp(&t1) != Some(std::cmp::Ordering::Less) || t0 < first - TIME_EPS || t1 > last + TIME_EPS {
        return Err(Error::Stats(format!("window [{t0}, {t1}] is not inside [{first}, {last}]")));
    }
    let picked: Vec<f64> = times
        .iter()
        .zip(values)
        .filter(|(&t, _)| t >= t0 - TIME_EPS && t <= t1 + TIME_EPS)
        .map(|(_, &v)| v)
        .collect();
    if picked.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::Stats(format!(
            "window [{t0}, {t1}] holds {} samples, need at least {MIN_WINDOW_SAMPLES}",
            picked.len()
        )));
    }
    // Shifted by the first sample so a constant series gives exactly zero spread.
    let n = picked.len() as f64;
    let shift = picked[0];
    let offset = picked.iter().map(|v| v - shift).sum::<f64>() / n;
    let var = picked.iter().map(|v| (v - shift - offset).powi(2)).sum::<f64>() / n;
    Ok(EquilibriumStats { mean: shift + offset, std: var.sqrt(), samples: picked.len(), window })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub time: f64,
    pub value: f64,
    pub ratio: f64,
}

/// Local maxima as `(start, end)` index runs of equal values whose neighbours
/// on both sides are strictly lower. A constant series is one run.
pub fn local_maxima(values: &[f64]) -> Vec<(usize, usize)> {
    let n = values.len();
    if n > 0 && values.iter().all(|&v| v == values[0]) {
        return vec![(0, n - 1)];
    }
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && values[end + 1] == values[start] {
            end += 1;
        }
        if start > 0 && end + 1 < n && values[start - 1] < values[start] && values[end + 1] < values[end] {
            out.push((start, end));
        }
        start = end + 1;
    }
    out
}

/// Representative of a run: the sample nearest `hint`, earlier on ties.
fn run_representative(times: &[f64], run: (usize, usize), hint: f64) -> usize {
    (run.0..=run.1).fold(run.0, |best, k| if (times[k] - hint).abs() < (times[best] - hint).abs() { k } else { best })
}

/// The local maximum nearest `hint` (within ±1), relative to `stats.mean`.
pub fn peak_ratio(times: &[f64], values: &[f64], hint: f64, stats: &EquilibriumStats) -> Result<Peak> {
    if times.len() != values.len() {
        return Err(Error::Shape { expected: times.len(), got: values.len() });
    }
    let candidates = local_maxima(values)
        .into_iter()
        .map(|run| run_representative(times, run, hint))
        .filter(|&k| (times[k] - hint).abs() <= PEAK_SEARCH_HALF_WIDTH + TIME_EPS);
    let best = candidates.fold(None, |best: Option<usize>, k| match best {
        Some(b) if (times[b] - hint).abs() <= (times[k] - hint).abs() => Some(b),
        _ => Some(k),
    });
    let index = best.ok_or(Error::PeakNotFound { hint, window: PEAK_SEARCH_HALF_WIDTH })?;
    Ok(Peak { index, time: times[index], value: values[index], ratio: values[index] / stats.mean })
}

/// The earliest local maximum that rises above the equilibrium mean.
pub fn first_pronounced_peak(times: &[f64], values: &[f64], stats: &EquilibriumStats) -> Option<Peak> {
    local_maxima(values).into_iter().map(|(s, _)| s).find(|&k| values[k] > stats.mean).map(|k| Peak {
        index: k,
        time: times[k],
        value: values[k],
        ratio: values[k] / stats.mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::site_series;
    use crate::sector::{ChainConfig, SpectralDecomposition};

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * dt).collect()
    }

    #[test]
    fn constant_series() {
        let t = grid(200, 0.5);
        let v = vec![0.3; 200];
        let stats = equilibrium_stats(&t, &v, (0.0, 99.5)).unwrap();
        assert_eq!(stats.std, 0.0);
        assert!((stats.mean - 0.3).abs() < 1e-15);
        let p = peak_ratio(&t, &v, 42.0, &stats).unwrap();
        assert!((p.ratio - 1.0).abs() < 1e-15);
        assert_eq!(p.time, 42.0);
    }

    #[test]
    fn population_std() {
        let t = grid(100, 1.0);
        let v: Vec<f64> = (0..100).map(|k| if k % 2 == 0 { 1.0 } else { 3.0 }).collect();
        let s = equilibrium_stats(&t, &v, (0.0, 99.0)).unwrap();
        assert_eq!((s.mean, s.std, s.samples), (2.0, 1.0, 100));
    }

    #[test]
    fn short_or_misplaced_window() {
        let t = grid(150, 1.0);
        let v = vec![1.0; 150];
        assert!(matches!(equilibrium_stats(&t, &v, (100.0, 149.0)), Err(Error::Stats(_))));
        assert!(matches!(equilibrium_stats(&t, &v, (0.0, 200.0)), Err(Error::Stats(_))));
        assert!(matches!(equilibrium_stats(&t, &v, (50.0, 10.0)), Err(Error::Stats(_))));
    }

    #[test]
    fn maxima_and_plateaus() {
        let v = [0.0, 1.0, 0.5, 2.0, 2.0, 2.0, 1.0, 3.0];
        assert_eq!(local_maxima(&v), vec![(1, 1), (3, 5)]);
        let t = grid(8, 1.0);
        let stats = EquilibriumStats { mean: 1.0, std: 0.0, samples: 8, window: (0.0, 7.0) };
        // Plateau 3..=5 with hint midway between samples 3 and 4 -> earlier.
        assert_eq!(peak_ratio(&t, &v, 3.5, &stats).unwrap().index, 3);
        assert_eq!(peak_ratio(&t, &v, 4.9, &stats).unwrap().index, 5);
        assert!(matches!(peak_ratio(&t, &v, 7.0, &stats), Err(Error::PeakNotFound { .. })));
        assert_eq!(first_pronounced_peak(&t, &v, &stats).unwrap().index, 3);
    }

    #[test]
    fn scan_rows_match_site_series() {
        let spec = SpectralDecomposition::new(&ChainConfig::new(10, 1.0).unwrap()).unwrap();
        let scan = spacetime_scan(&spec, (2, 7), &[1, 2], 0.5, 6.0, Execution::Parallel).unwrap();
        assert_eq!(scan.entropy.times.len(), 13);
        for j in [1, 4, 10] {
            let s = site_series(&spec, (2, 7), j, &[1, 2], 0.5, 6.0, Execution::Sequential).unwrap();
            assert_eq!(scan.site_series(j), s);
        }
        assert!(scan.entropy.row(3).iter().zip(scan.complexity[0].row(3)).all(|(s, c)| c <= &(s + 1e-9)));
        // Product state at t = 0.
        assert!((1..=10).all(|j| scan.entropy.get(j, 0) == 0.0));
        assert!(scan.violations.is_empty());
    }

    #[test]
    fn scan_is_deterministic_across_modes() {
        let spec = SpectralDecomposition::new(&ChainConfig::new(9, 1.0).unwrap()).unwrap();
        let a = spacetime_scan(&spec, (1, 5), &[1], 0.3, 4.0, Execution::Sequential).unwrap();
        let b = spacetime_scan(&spec, (1, 5), &[1], 0.3, 4.0, Execution::Parallel).unwrap();
        assert_eq!(a.entropy, b.entropy);
        assert_eq!(a.complexity, b.complexity);
    }
}

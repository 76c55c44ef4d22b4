use nalgebra::DVector;
use pcx_core::chain::{
    amplitudes_b, classify_pairs, rho_a_predictive, site_series, HorizonSpec, SiteSeries,
};
use pcx_core::fullspace::{full_space_oracle, FullSpaceHamiltonian};
use pcx_core::predictive::equivalence_residual;
use pcx_core::scan::{default_window, equilibrium_stats, peak_ratio, spacetime_scan, EquilibriumStats};
use pcx_core::{build_engine, ChainConfig, EngineKind, Execution, SectorState, SpectralDecomposition, C64};

fn paper_engine() -> SpectralDecomposition {
    SpectralDecomposition::new(&ChainConfig::default()).unwrap()
}

fn paper_series(engine: &SpectralDecomposition) -> SiteSeries {
    site_series(engine, (10, 25), 17, &[1, 2, 3], 0.2, 200.0, Execution::Parallel).unwrap()
}

fn stats(s: &SiteSeries, v: &[f64]) -> EquilibriumStats {
    equilibrium_stats(&s.times, v, default_window(200.0)).unwrap()
}

#[test]
fn amplitudes_start_on_the_flips() {
    let engine = paper_engine();
    let b = amplitudes_b(&engine, 25, 10, 0.0).unwrap();
    assert!(b.max_abs_diff(&SectorState::basis(32, 10, 25).unwrap()) < 1e-13);
}

#[test]
fn amplitudes_match_full_space_on_eight_sites() {
    let cfg = ChainConfig::new(8, 1.0).unwrap();
    let engine = SpectralDecomposition::new(&cfg).unwrap();
    let b = amplitudes_b(&engine, 2, 7, 2.0).unwrap();
    let oracle = full_space_oracle(&cfg, 2, 7, 2.0).unwrap();
    assert!(b.max_abs_diff(&oracle) < 1e-10);
    assert!((b.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn reflection_symmetry_about_the_flip_midpoint() {
    let engine = paper_engine();
    let reflect = |n: usize| ChainConfig::default().wrap(35 - n as i64);
    for t in [5.0, 9.0, 31.7] {
        let b = amplitudes_b(&engine, 10, 25, t).unwrap();
        for n1 in 1..32 {
            for n2 in n1 + 1..=32 {
                let d = (b.amplitude(n1, n2).unwrap() - b.amplitude(reflect(n1), reflect(n2)).unwrap()).norm();
                assert!(d < 1e-10, "t={t} ({n1},{n2}) differs by {d}");
            }
        }
    }
}

#[test]
fn bethe_and_spectral_series_agree() {
    let cfg = ChainConfig::new(16, 1.0).unwrap();
    let a = build_engine(EngineKind::Spectral, &cfg).unwrap();
    let b = build_engine(EngineKind::Bethe, &cfg).unwrap();
    let sa = site_series(a.as_ref(), (3, 11), 7, &[1, 2], 0.5, 20.0, Execution::Sequential).unwrap();
    let sb = site_series(b.as_ref(), (3, 11), 7, &[1, 2], 0.5, 20.0, Execution::Sequential).unwrap();
    for (x, y) in sa.entropy.iter().zip(&sb.entropy) {
        assert!((x - y).abs() < 1e-8);
    }
    for (cx, cy) in sa.complexity.iter().zip(&sb.complexity) {
        for (x, y) in cx.iter().zip(cy) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

#[test]
fn collision_peak_and_later_collisions() {
    let engine = paper_engine();
    let s = paper_series(&engine);
    let ratio = |v: &[f64], hint: f64| peak_ratio(&s.times, v, hint, &stats(&s, v)).unwrap().ratio;

    let s_first = ratio(&s.entropy, 9.0);
    let c_first: Vec<f64> = s.complexity.iter().map(|c| ratio(c, 9.0)).collect();
    assert!(c_first[0] > s_first);
    // Larger horizons show the same effect, less strongly.
    assert!(c_first[0] > c_first[1] && c_first[1] > c_first[2], "{c_first:?}");

    // The off-diagonal of rho'_A is live at the collision.
    let b = amplitudes_b(&engine, 10, 25, 9.0).unwrap();
    let cls = classify_pairs(&HorizonSpec::new(32, 17, 1).unwrap());
    assert!(rho_a_predictive(&b, &cls).unwrap().coherence.norm() > 1e-3);

    for hint in [26.0, 41.0] {
        let s_later = ratio(&s.entropy, hint);
        let c_later = ratio(&s.complexity[0], hint);
        assert!(c_later > s_later, "t≈{hint}: C {c_later} vs S {s_later}");
        assert!(c_later / s_later < c_first[0] / s_first, "t≈{hint}");
    }
}

#[test]
fn equilibrium_mean_is_stable_under_a_one_step_shift() {
    let engine = paper_engine();
    let s = paper_series(&engine);
    for v in std::iter::once(&s.entropy).chain(&s.complexity) {
        let a = equilibrium_stats(&s.times, v, (100.0, 200.0)).unwrap().mean;
        let b = equilibrium_stats(&s.times, v, (99.8, 199.8)).unwrap().mean;
        assert!((a - b).abs() / a < 0.05);
    }
}

#[test]
fn scan_shows_beams_and_collision_contrast() {
    let engine = paper_engine();
    let scan = spacetime_scan(&engine, (10, 25), &[2], 0.2, 60.0, Execution::Parallel).unwrap();
    assert!((1..=32).all(|j| scan.entropy.get(j, 0) == 0.0 && scan.complexity[0].get(j, 0) == 0.0));
    let k = scan.entropy.time_index(4.0);
    for beam in [10, 25] {
        assert!(scan.entropy.get(beam, k) > 100.0 * scan.entropy.get(1, k));
        assert!(scan.entropy.get(beam, k) > scan.entropy.get(17, k));
    }
    // Contrast is measured against the long-run grid, so use the full run.
    let full = spacetime_scan(&engine, (10, 25), &[2], 0.2, 200.0, Execution::Parallel).unwrap();
    assert!(full.complexity[0].contrast(17, 9.0) > full.entropy.contrast(17, 9.0));
    assert!(full.grids().all(|g| g.values().iter().all(|v| (0.0..=1.0).contains(v))));
}

/// Full-space dynamics on the (site j) x (rest) split used by the residual.
fn split_dynamics(cfg: ChainConfig, j: usize) -> impl Fn(&DVector<C64>, f64) -> DVector<C64> {
    let n = cfg.sites();
    let ham = FullSpaceHamiltonian::new(&cfg).unwrap();
    let dim_b = 1usize << (n - 1);
    let bit = j - 1;
    let to_full = move |row: usize, rest: usize| {
        let low = rest & ((1 << bit) - 1);
        let high = rest >> bit;
        low | ((1 - row) << bit) | (high << (bit + 1))
    };
    move |v: &DVector<C64>, t: f64| {
        let mut full = vec![C64::new(0.0, 0.0); 1 << n];
        for row in 0..2 {
            for rest in 0..dim_b {
                full[to_full(row, rest)] = v[row * dim_b + rest];
            }
        }
        let out = ham.evolve(&full, t);
        DVector::from_fn(2 * dim_b, |k, _| out[to_full(k / dim_b, k % dim_b)])
    }
}

#[test]
fn residual_grows_for_states_differing_far_away() {
    let cfg = ChainConfig::new(8, 1.0).unwrap();
    let j = 1;
    let dim_b = 1 << 7;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = DVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]);
    // B configurations drop site 1, so bit 3 of `rest` is site 5 (distance 4).
    let phi1 = DVector::from_fn(dim_b, |k, _| C64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0));
    let phi2 = DVector::from_fn(dim_b, |k, _| C64::new(if k == 1 << 3 { 1.0 } else { 0.0 }, 0.0));
    let dynamics = split_dynamics(cfg, j);
    let residuals: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|&t| equivalence_residual(&phi1, &phi2, &psi, t, &dynamics).unwrap())
        .collect();
    assert!(residuals[0] < 1e-14);
    assert!(residuals.windows(2).all(|w| w[1] > w[0]), "{residuals:?}");
    assert!(residuals[4] < 0.05, "{residuals:?}");
}

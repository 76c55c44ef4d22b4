use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use pcx_core::bethe::BetheBasis;
use pcx_core::chain::site_series;
use pcx_core::predictive::{
    build_projector, predictive_map, predictive_reduced_density, reduced_density, von_neumann_entropy,
    BipartiteState, EquivalencePartition, Side,
};
use pcx_core::scan::{equilibrium_stats, first_pronounced_peak, peak_ratio, spacetime_scan, GridKind};
use pcx_core::{build_engine, EngineKind, Execution, SpectralDecomposition, C64};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{emit, ensure_dir, num, pgm, write_file, Table};

/// The paper's collision recipe: flips at 10 and 25 meet at site 17 near t = 9.
const RECIPE_FLIPS: (usize, usize) = (10, 25);
const RECIPE_SITE: usize = 17;
const RECIPE_PEAK_HINT: f64 = 9.0;

fn exec() -> Execution {
    Execution::Parallel
}

fn report(path: Option<PathBuf>) {
    if let Some(p) = path {
        eprintln!("wrote {}", p.display());
    }
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let spectral = || -> Result<Vec<f64>, CliError> { Ok(SpectralDecomposition::new(&cfg.chain)?.energies().to_vec()) };
    let bethe = || -> Result<BetheBasis, CliError> { Ok(BetheBasis::with_execution(&cfg.chain, exec())?) };

    let (mut table, own, other) = match cfg.engine {
        EngineKind::Spectral => {
            let energies = spectral()?;
            let mut table = Table::new(&["index", "energy_J"]);
            for (i, e) in energies.iter().enumerate() {
                table.line([i.to_string(), num(*e)]);
            }
            let mut other: Vec<f64> = bethe()?.roots().map(|r| r.energy).collect();
            other.sort_by(f64::total_cmp);
            (table, energies, other)
        }
        EngineKind::Bethe => {
            let basis = bethe()?;
            let mut roots: Vec<_> = basis.roots().collect();
            roots.sort_by(|a, b| a.energy.total_cmp(&b.energy));
            let mut table = Table::new(&["index", "energy_J", "class", "dispersion_residual_J"]);
            for (i, r) in roots.iter().enumerate() {
                let residual = r.dispersion_residual(cfg.chain.coupling()).map_or("NA".to_string(), num);
                table.line([i.to_string(), num(r.energy), r.class.label().to_string(), residual]);
            }
            let own = roots.iter().map(|r| r.energy).collect();
            (table, own, spectral()?)
        }
    };
    let other_name = match cfg.engine {
        EngineKind::Spectral => EngineKind::Bethe,
        EngineKind::Bethe => EngineKind::Spectral,
    };
    let max_diff = own.iter().zip(&other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    table.comment(format!("energies relative to the ferromagnetic state, engine {}", cfg.engine));
    table.comment(format!("max_abs_energy_difference_vs_{other_name},{}", num(max_diff)));
    report(emit(cfg.out.as_deref(), "spectrum.csv", &table)?);
    Ok(())
}

pub fn series(cfg: &RunConfig) -> Result<(), CliError> {
    let site = cfg.site.expect("series always has a site");
    let engine = build_engine(cfg.engine, &cfg.chain)?;
    let s = site_series(engine.as_ref(), cfg.flips, site, &cfg.radii, cfg.dt, cfg.t_max, exec())?;

    let labels: Vec<String> = std::iter::once("S_bits".to_string())
        .chain(cfg.radii.iter().map(|r| format!("C_rh{r}_bits")))
        .collect();
    let mut header = vec!["t_hbar_over_J"];
    header.extend(labels.iter().map(String::as_str));
    let mut table = Table::new(&header);
    let columns: Vec<&Vec<f64>> = std::iter::once(&s.entropy).chain(&s.complexity).collect();
    for (k, t) in s.times.iter().enumerate() {
        table.line(std::iter::once(num(*t)).chain(columns.iter().map(|c| num(c[k]))));
    }

    table.comment(format!(
        "N={} J={} flips={},{} site={} dt={} tmax={} engine={}",
        cfg.chain.sites(),
        cfg.chain.coupling(),
        cfg.flips.0,
        cfg.flips.1,
        site,
        cfg.dt,
        cfg.t_max,
        cfg.engine
    ));
    let stats: Result<Vec<_>, _> = columns.iter().map(|c| equilibrium_stats(&s.times, c, cfg.window)).collect();
    match stats {
        Ok(stats) => {
            table.comment(format!(
                "equilibrium window [{}, {}] with {} samples, population std",
                cfg.window.0, cfg.window.1, stats[0].samples
            ));
            table.comment(row("column", labels.iter().cloned()));
            table.comment(row("mean", stats.iter().map(|st| num(st.mean))));
            table.comment(row("std", stats.iter().map(|st| num(st.std))));
            table.comment(row("std_ratio_S_over_column", stats.iter().map(|st| num(stats[0].std / st.std))));
            if let Some(p) = first_pronounced_peak(&s.times, &s.entropy, &stats[0]) {
                table.comment(format!("first_pronounced_peak_S,{},{}", num(p.time), num(p.ratio)));
            }
            if cfg.flips == RECIPE_FLIPS {
                let peaks: Vec<_> =
                    columns.iter().zip(&stats).map(|(c, st)| peak_ratio(&s.times, c, RECIPE_PEAK_HINT, st)).collect();
                let field = |f: &dyn Fn(&pcx_core::scan::Peak) -> f64| {
                    peaks.iter().map(|p| p.as_ref().map_or("NA".to_string(), |p| num(f(p)))).collect::<Vec<_>>()
                };
                table.comment(row(&format!("peak_time_hint_{RECIPE_PEAK_HINT}"), field(&|p| p.time)));
                table.comment(row(&format!("peak_ratio_hint_{RECIPE_PEAK_HINT}"), field(&|p| p.ratio)));
            }
        }
        Err(e) if cfg.window_explicit => return Err(e.into()),
        Err(e) => table.comment(format!("equilibrium statistics unavailable: {e}")),
    }
    let violations = s.violations();
    table.comment(format!("conjecture_violations,{}", violations.len()));
    for v in &violations {
        eprintln!("warning: C > S at t={} r_h={}: C={} S={}", v.time, v.radius, v.complexity, v.entropy);
    }
    report(emit(cfg.out.as_deref(), &format!("series_site{site}.csv"), &table)?);
    Ok(())
}

fn row(key: &str, values: impl IntoIterator<Item = String>) -> String {
    std::iter::once(key.to_string()).chain(values).collect::<Vec<_>>().join(",")
}

pub fn scan(cfg: &RunConfig) -> Result<(), CliError> {
    let dir: PathBuf = cfg.out.clone().unwrap_or_else(|| PathBuf::from("pcx-scan"));
    ensure_dir(&dir)?;
    let engine = build_engine(cfg.engine, &cfg.chain)?;
    let result = spacetime_scan(engine.as_ref(), cfg.flips, &cfg.radii, cfg.dt, cfg.t_max, exec())?;

    let mut table = Table::new(&["t_hbar_over_J", "site", "kind", "value_bits"]);
    for grid in result.grids() {
        let label = grid.kind.label();
        for site in 1..=grid.sites {
            for (k, t) in grid.times.iter().enumerate() {
                table.line([num(*t), site.to_string(), label.clone(), num(grid.get(site, k))]);
            }
        }
    }
    write_file(&dir.join("scan.csv"), table.as_str().as_bytes())?;

    let mut meta = String::new();
    meta.push_str(&format!(
        "N {}\nJ {}\nflips {},{}\nengine {}\ndt {}\ntmax {}\n",
        cfg.chain.sites(),
        cfg.chain.coupling(),
        cfg.flips.0,
        cfg.flips.1,
        cfg.engine,
        cfg.dt,
        cfg.t_max
    ));
    meta.push_str(&format!(
        "image_width {} (time samples, t = column * dt, left to right)\nimage_height {} (sites, site 1 at the top)\n",
        result.entropy.times.len(),
        cfg.chain.sites()
    ));
    meta.push_str("gray_scale 0 = 0 bits, 255 = 1 bit, pixel = round(255 * value)\n");
    for grid in result.grids() {
        let name = format!("{}.pgm", grid.kind.label());
        write_file(&dir.join(&name), &pgm(grid))?;
        meta.push_str(&format!("image {name} kind {} grid_mean_bits {}\n", describe(grid.kind), num(grid.mean())));
        if cfg.flips == RECIPE_FLIPS && cfg.chain.sites() >= RECIPE_SITE {
            meta.push_str(&format!(
                "contrast {} site {RECIPE_SITE} t {RECIPE_PEAK_HINT} value/grid_mean {}\n",
                grid.kind.label(),
                num(grid.contrast(RECIPE_SITE, RECIPE_PEAK_HINT))
            ));
        }
    }
    meta.push_str(&format!("conjecture_violations {}\n", result.violations.len()));
    for v in &result.violations {
        meta.push_str(&format!("violation site {} t {} r_h {} C {} S {}\n", v.site, num(v.time), v.radius, num(v.complexity), num(v.entropy)));
        eprintln!("warning: C > S at site {} t={} r_h={}", v.site, v.time, v.radius);
    }
    write_file(&dir.join("scan_meta.txt"), meta.as_bytes())?;
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn describe(kind: GridKind) -> String {
    match kind {
        GridKind::Entropy => "entanglement_entropy".into(),
        GridKind::Complexity { radius } => format!("predictive_complexity r_h={radius}"),
    }
}

/// `(1/2, 1/2, 0, 1/2, 0, 1/2)`.
pub const SUPPLEMENT_A_DEFAULT: [f64; 6] = [0.5, 0.5, 0.0, 0.5, 0.0, 0.5];

pub fn supplement_a(coeffs: Option<&[f64]>, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = String::new();
    text.push_str(&worked_example("built-in", &SUPPLEMENT_A_DEFAULT)?);
    if let Some(c) = coeffs {
        text.push('\n');
        text.push_str(&worked_example("user", c)?);
    }
    match out {
        Some(dir) => {
            ensure_dir(dir)?;
            let path = dir.join("supplement_a.txt");
            write_file(&path, text.as_bytes())?;
            report(Some(path));
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn worked_example(name: &str, a: &[f64]) -> Result<String, CliError> {
    if a.len() != 6 {
        return Err(CliError::Config(format!("expected 6 coefficients, got {}", a.len())));
    }
    let amps = DMatrix::from_fn(2, 3, |i, j| C64::new(a[3 * i + j], 0.0));
    let norm = amps.norm();
    let psi = match BipartiteState::new(amps.clone()) {
        Ok(psi) => psi,
        Err(_) => {
            eprintln!("warning: {name} coefficients have norm {norm}; normalizing");
            BipartiteState::normalized(amps)?
        }
    };
    let part = EquivalencePartition::from_basis_classes(3, &[vec![0, 1]])?;
    let projector = build_projector(&part);
    let primed = predictive_map(&psi, &part)?;
    if primed.degenerate_phases > 0 {
        eprintln!(
            "warning: {name} example has {} class projection(s) in the kernel of P; phase set to 1",
            primed.degenerate_phases
        );
    }
    let rho = reduced_density(&psi, Side::A);
    let rho_p = predictive_reduced_density(&psi, &part)?;
    let s = von_neumann_entropy(&rho)?;
    let c = von_neumann_entropy(&rho_p)?;

    let mut t = format!("[{name}] a1..a6 = {}\n", psi.amplitudes().transpose().iter().map(|z| fmt_c(*z)).collect::<Vec<_>>().join(", "));
    t.push_str("equivalence: |1>_B ~ |2>_B, beta = (|1>_B + |2>_B)/sqrt(2)\n");
    t.push_str(&format!("P =\n{}", format_matrix(&projector.matrix)));
    t.push_str("Psi' on |1 beta>, |1 3>, |2 beta>, |2 3>: ");
    let k = &primed.coefficients;
    t.push_str(&[k[(0, 0)], k[(0, 1)], k[(1, 0)], k[(1, 1)]].map(fmt_c).join(", "));
    t.push('\n');
    t.push_str(&format!("rho_A =\n{}", format_matrix(&rho)));
    t.push_str(&format!("rho'_A =\n{}", format_matrix(&rho_p)));
    t.push_str(&format!("S_A = {} bits\nC_A = {} bits\n", num(s), num(c)));
    t.push_str(&format!("degenerate_phases = {}\n", primed.degenerate_phases));
    Ok(t)
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        num(z.re)
    } else {
        format!("{}{:+.16e}i", num(z.re), z.im)
    }
}

fn format_matrix(m: &DMatrix<C64>) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_c(m[(i, j)])).collect();
        s.push_str("  ");
        s.push_str(&row.join("  "));
        s.push('\n');
    }
    s
}

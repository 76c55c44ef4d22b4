use std::path::PathBuf;

use clap::Args;
use pcx_core::chain::{check_flips, time_grid, HorizonSpec};
use pcx_core::scan::{default_window, MIN_WINDOW_SAMPLES};
use pcx_core::{ChainConfig, EngineKind};

use crate::error::CliError;

/// Flags shared by every simulation command.
#[derive(Args, Clone, Debug)]
pub struct ChainArgs {
    /// Number of sites N on the periodic chain.
    #[arg(long, default_value_t = 32)]
    pub sites: usize,

    /// Exchange coupling J (positive is ferromagnetic).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub coupling: f64,

    /// Evolution backend.
    #[arg(long, default_value = "spectral")]
    pub engine: EngineKind,

    /// Output directory; tables go to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker threads (0 = all cores).
    #[arg(long, env = "PCX_THREADS", default_value_t = 0)]
    pub threads: usize,
}

#[derive(Args, Clone, Debug)]
pub struct DynamicsArgs {
    /// Initial spin flips, e.g. 10,25.
    #[arg(long, value_delimiter = ',', default_values_t = [10, 25])]
    pub flips: Vec<usize>,

    /// Horizon radii, e.g. 1,2,3.
    #[arg(long, value_delimiter = ',')]
    pub horizon: Option<Vec<usize>>,

    /// Time step in units of ħ/J.
    #[arg(long, default_value_t = 0.2)]
    pub dt: f64,

    /// Final time in units of ħ/J.
    #[arg(long, default_value_t = 200.0)]
    pub tmax: f64,

    /// Equilibrium window t0,t1 (default: second half of the run).
    #[arg(long = "eq-window", value_delimiter = ',', allow_negative_numbers = true)]
    pub eq_window: Option<Vec<f64>>,
}

/// A fully validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub chain: ChainConfig,
    pub engine: EngineKind,
    pub flips: (usize, usize),
    pub radii: Vec<usize>,
    pub dt: f64,
    pub t_max: f64,
    pub site: Option<usize>,
    pub window: (f64, f64),
    /// Whether the window was given explicitly.
    pub window_explicit: bool,
    pub out: Option<PathBuf>,
    pub threads: usize,
}

impl RunConfig {
    pub fn chain_only(args: &ChainArgs) -> Result<Self, CliError> {
        let chain = ChainConfig::new(args.sites, args.coupling)?;
        Ok(RunConfig {
            chain,
            engine: args.engine,
            flips: (1, 2),
            radii: Vec::new(),
            dt: 0.2,
            t_max: 200.0,
            site: None,
            window: default_window(200.0),
            window_explicit: false,
            out: args.out.clone(),
            threads: args.threads,
        })
    }

    pub fn new(
        args: &ChainArgs,
        dynamics: &DynamicsArgs,
        site: Option<usize>,
        default_radii: &[usize],
    ) -> Result<Self, CliError> {
        let mut cfg = RunConfig::chain_only(args)?;
        let [a, b] = dynamics.flips[..] else {
            return Err(CliError::Config(format!("--flips takes two sites, got {}", dynamics.flips.len())));
        };
        cfg.flips = check_flips(&cfg.chain, (a, b))?;
        cfg.radii = dynamics.horizon.clone().unwrap_or_else(|| default_radii.to_vec());
        if cfg.radii.is_empty() {
            return Err(CliError::Config("at least one horizon radius is required".into()));
        }
        let sites: Vec<usize> = match site {
            Some(j) => {
                cfg.chain.check_site(j)?;
                vec![j]
            }
            None => vec![1],
        };
        for &r in &cfg.radii {
            for &j in &sites {
                HorizonSpec::new(cfg.chain.sites(), j, r)?;
            }
        }
        let times = time_grid(dynamics.dt, dynamics.tmax)?;
        cfg.dt = dynamics.dt;
        cfg.t_max = dynamics.tmax;
        cfg.site = site;
        match &dynamics.eq_window {
            Some(w) => {
                let [t0, t1] = w[..] else {
                    return Err(CliError::Config(format!("--eq-window takes two times, got {}", w.len())));
                };
                let inside = times.iter().filter(|&&t| t >= t0 - 1e-9 && t <= t1 + 1e-9).count();
                if t0.partial_cmp(&t1) != Some(std::cmp::Ordering::Less) || t0 < -1e-9 || t1 > times[times.len() - 1] + 1e-9 {
                    return Err(CliError::Config(format!("equilibrium window [{t0}, {t1}] is not inside [0, {}]", cfg.t_max)));
                }
                if inside < MIN_WINDOW_SAMPLES {
                    return Err(CliError::Config(format!(
                        "equilibrium window [{t0}, {t1}] holds {inside} samples, need at least {MIN_WINDOW_SAMPLES}"
                    )));
                }
                cfg.window = (t0, t1);
                cfg.window_explicit = true;
            }
            None => cfg.window = default_window(cfg.t_max),
        }
        Ok(cfg)
    }
}

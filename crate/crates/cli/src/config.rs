//! Command-line flags, JSON configuration files and their resolution into a
//! validated [`RunConfig`].

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use enhanced_zeta::invariants::ComplexPair;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "enhanced-zeta", version, about = "Zeta integrals on the enhanced positive symmetric cone")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArg,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandArg {
    /// Exact Bernstein-Sato identities over the exponent grid.
    Bfunction,
    /// Tabulate gamma factors, γ(α, β), c(s) and u_ρ(s) over an s-grid.
    Gamma,
    /// Tabulate Z(φ, s)/Γ(s) for the standard Gaussian over an s-grid.
    Zeta,
    /// Run one family of numerical checks.
    Verify {
        #[arg(value_enum)]
        check: Check,
    },
    /// Run every check family under the selected profile.
    Suite,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    GammaConst,
    Clerc,
    Shift,
    FtTheorem,
    Corollary,
    OrbitFeq,
    Xi,
    DeltaResidue,
    Orbits,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::GammaConst,
        Check::Clerc,
        Check::Shift,
        Check::FtTheorem,
        Check::Corollary,
        Check::OrbitFeq,
        Check::Xi,
        Check::DeltaResidue,
        Check::Orbits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::GammaConst => "gamma-const",
            Check::Clerc => "clerc",
            Check::Shift => "shift",
            Check::FtTheorem => "ft-theorem",
            Check::Corollary => "corollary",
            Check::OrbitFeq => "orbit-feq",
            Check::Xi => "xi",
            Check::DeltaResidue => "delta-residue",
            Check::Orbits => "orbits",
        }
    }
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Quick,
    Full,
}

/// One point of an s-grid, as `[re, im]` pairs.
#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SPoint {
    pub s1: [f64; 2],
    pub s2: [f64; 2],
}

impl SPoint {
    pub fn pair(&self) -> ComplexPair {
        ComplexPair::new(Complex64::new(self.s1[0], self.s1[1]), Complex64::new(self.s2[0], self.s2[1]))
    }
}

/// Settings that may come from flags or from a JSON file; every field is
/// optional so the two sources can be layered.
#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// s₁ as `RE` or `RE,IM`.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub s1: Option<[f64; 2]>,
    /// s₂ as `RE` or `RE,IM`.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub s2: Option<[f64; 2]>,
    /// Explicit s-grid (configuration file only).
    #[arg(skip)]
    pub s_grid: Option<Vec<SPoint>>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo sample budget per estimate.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Replaces the numeric parameter of every non-exact tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub profile: Option<Profile>,
    /// Shorthand for `--profile quick`.
    #[arg(long, global = true, conflicts_with = "profile")]
    #[serde(skip)]
    pub quick: bool,
    /// Shorthand for `--profile full`.
    #[arg(long, global = true, conflicts_with_all = ["profile", "quick"])]
    #[serde(skip)]
    pub full: bool,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV output for `gamma` and `zeta` tables.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON file whose fields override the flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn parse_complex(text: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("invalid number {t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected RE or RE,IM, got {text:?}")),
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("invalid configuration {}: {e}", path.display())))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            n: over.n.or(self.n),
            d: over.d.or(self.d),
            s1: over.s1.or(self.s1),
            s2: over.s2.or(self.s2),
            s_grid: over.s_grid.or(self.s_grid),
            seed: over.seed.or(self.seed),
            samples: over.samples.or(self.samples),
            tol: over.tol.or(self.tol),
            profile: over.profile.or(self.profile),
            quick: self.quick,
            full: self.full,
            out: over.out.or(self.out),
            csv: over.csv.or(self.csv),
            threads: over.threads.or(self.threads),
            config: self.config,
        }
    }
}

/// Budgets that differ between the quick and full profiles.
#[derive(Serialize, Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub mc_samples: usize,
    pub xi_points: usize,
    pub orbit_samples: usize,
    pub orbit_actions: usize,
    pub random_s: usize,
}

impl Budget {
    pub fn for_profile(profile: Profile) -> Self {
        match profile {
            Profile::Quick => Self { mc_samples: 20_000, xi_points: 2, orbit_samples: 1_000, orbit_actions: 10, random_s: 5 },
            Profile::Full => Self { mc_samples: 1_000_000, xi_points: 10, orbit_samples: 10_000, orbit_actions: 100, random_s: 20 },
        }
    }
}

/// A validated run.
#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub n: usize,
    pub d: usize,
    pub s_grid: Option<Vec<SPoint>>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub profile: Profile,
    pub budget: Budget,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    #[serde(skip)]
    pub threads: usize,
}

pub const MAX_N: usize = 8;

impl RunConfig {
    pub fn resolve(command: CommandArg, settings: Settings) -> Result<Self, ConfigError> {
        let settings = match settings.config.clone() {
            Some(path) => settings.overlay(Settings::from_file(&path)?),
            None => settings,
        };
        let n = settings.n.unwrap_or(1);
        let d = settings.d.unwrap_or(1);
        if n == 0 || d == 0 {
            return Err(ConfigError(format!("n and d must be positive (got n={n}, d={d})")));
        }
        if d > n {
            return Err(ConfigError(format!(
                "d ≤ n required (got n={n}, d={d}); for d > n the second invariant P2 vanishes identically"
            )));
        }
        if n > MAX_N {
            return Err(ConfigError(format!("n ≤ {MAX_N} supported (got n={n})")));
        }
        let profile = if settings.quick {
            Profile::Quick
        } else if settings.full {
            Profile::Full
        } else {
            settings.profile.unwrap_or_default()
        };
        let mut budget = Budget::for_profile(profile);
        if let Some(k) = settings.samples {
            if k == 0 {
                return Err(ConfigError("--samples must be positive".into()));
            }
            budget.mc_samples = k;
        }
        if let Some(t) = settings.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ConfigError(format!("--tol must be a positive number (got {t})")));
            }
        }
        let s_grid = match (&settings.s_grid, settings.s1, settings.s2) {
            (Some(g), _, _) if g.is_empty() => return Err(ConfigError("s_grid is empty".into())),
            (Some(g), _, _) => Some(g.clone()),
            (None, None, None) => None,
            (None, s1, s2) => Some(vec![SPoint { s1: s1.unwrap_or([0.0, 0.0]), s2: s2.unwrap_or([0.0, 0.0]) }]),
        };
        let cfg = Self {
            command: command_name(command),
            n,
            d,
            s_grid,
            seed: settings.seed,
            tol: settings.tol,
            profile,
            budget,
            out: settings.out,
            csv: settings.csv,
            threads: settings.threads.unwrap_or(0),
        };
        if cfg.uses_monte_carlo(command) && cfg.seed.is_none() {
            return Err(ConfigError(format!("{} uses Monte Carlo sampling; --seed is required", cfg.command)));
        }
        Ok(cfg)
    }

    /// Whether any estimate of the command is a Monte Carlo average.
    pub fn uses_monte_carlo(&self, command: CommandArg) -> bool {
        match command {
            CommandArg::Bfunction | CommandArg::Gamma => false,
            CommandArg::Zeta => self.n > 1,
            CommandArg::Suite => true,
            CommandArg::Verify { check } => match check {
                Check::GammaConst => true,
                Check::Clerc | Check::Shift | Check::FtTheorem | Check::OrbitFeq | Check::DeltaResidue => self.n > 1,
                Check::Corollary | Check::Xi | Check::Orbits => false,
            },
        }
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

pub fn command_name(command: CommandArg) -> String {
    match command {
        CommandArg::Bfunction => "bfunction".into(),
        CommandArg::Gamma => "gamma".into(),
        CommandArg::Zeta => "zeta".into(),
        CommandArg::Verify { check } => format!("verify {}", check.name()),
        CommandArg::Suite => "suite".into(),
    }
}

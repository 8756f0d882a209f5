//! The commands: each builds a list of independent tasks that run in the
//! rayon pool and return check records or table rows.

use std::f64::consts::PI;

use enhanced_zeta::functional_eq::{
    coefficient_identity_check, corollary_check, delta_residue_check, ft_theorem_check, orbit_functional_eq_check,
    prefactor_forms_check, s_tag, xi_decomposition_check,
};
use enhanced_zeta::invariants::{enumerate_orbits, orbit_machinery_check, ComplexPair, OrbitParam};
use enhanced_zeta::linalg::{EnhancedPoint, RectMatrix};
use enhanced_zeta::polyalg::{bs_check_grid, BsContext, Identity};
use enhanced_zeta::report::{CheckRecord, Tolerance};
use enhanced_zeta::specfun::{c_factor, gamma_tilde_omega, gamma_tilde_poles, gindikin_gamma, recip_gamma_tilde_omega, u_rho};
use enhanced_zeta::zeta_num::{
    check_direct, clerc_check, gamma_const_check, normalized_zeta_descended, phi_covariance_check,
    shift_relation_check, zeta_integral, ConeCutoffFn, Descent, EvalSpec, GaussianTestFn, McConfig, MCEstimate, Region,
};
use enhanced_zeta::Error;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Budget, Check, CommandArg, RunConfig};
use crate::report::{Cell, Report, Table};

/// Why a command stopped before producing a report.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(String),
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Numerical(m) => write!(f, "numerical abort: {m}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionOrder { .. }
            | Error::OutOfRange(_)
            | Error::InvalidOrbit(_)
            | Error::TooLarge(_)
            | Error::Convergence(_)
            | Error::Pole(_)
            | Error::Shape(_) => RunError::Config(e.to_string()),
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

type Records = Result<Vec<CheckRecord>, RunError>;
type Task = Box<dyn Fn() -> Records + Send + Sync>;

fn task(f: impl Fn() -> Result<Vec<CheckRecord>, Error> + Send + Sync + 'static) -> Task {
    Box::new(move || f().map_err(RunError::from))
}

fn one(f: impl Fn() -> Result<CheckRecord, Error> + Send + Sync + 'static) -> Task {
    task(move || f().map(|r| vec![r]))
}

/// Runs the tasks in the pool; the first error in task order wins.
fn run_tasks(tasks: Vec<Task>) -> Records {
    let results: Vec<Records> = tasks.par_iter().map(|t| t()).collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Runs the command and assembles its report.
pub fn run(command: CommandArg, cfg: &RunConfig) -> Result<Report, RunError> {
    let (records, tables) = match command {
        CommandArg::Bfunction => (run_tasks(bfunction_tasks(cfg.n, cfg.d))?, Vec::new()),
        CommandArg::Gamma => (Vec::new(), vec![gamma_table(cfg)?]),
        CommandArg::Zeta => (Vec::new(), vec![zeta_table(cfg)?]),
        CommandArg::Verify { check } => (run_tasks(verify_tasks(check, cfg.n, cfg.d, cfg)?)?, Vec::new()),
        CommandArg::Suite => (run_tasks(suite_tasks(cfg)?)?, Vec::new()),
    };
    Ok(Report::new(cfg, records, tables))
}

fn pt(n: usize, d: usize, x: &[f64]) -> EnhancedPoint {
    EnhancedPoint::from_coordinates(n, d, x)
}

fn real(s1: f64, s2: f64) -> ComplexPair {
    ComplexPair::real(s1, s2)
}

fn grid_or(cfg: &RunConfig, default: Vec<ComplexPair>) -> Vec<ComplexPair> {
    cfg.s_grid.as_ref().map(|g| g.iter().map(|p| p.pair()).collect()).unwrap_or(default)
}

/// A deterministic off-center point with small coordinates.
fn offset_center(n: usize, d: usize) -> EnhancedPoint {
    let dim = n * (n + 1) / 2 + n * d;
    let x: Vec<f64> = (0..dim).map(|k| 0.3 * (1.7 * k as f64 + 0.4).sin()).collect();
    pt(n, d, &x)
}

pub const BS_EXPONENTS: [(u32, u32); 9] = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)];

pub fn bfunction_tasks(n: usize, d: usize) -> Vec<Task> {
    [Identity::First, Identity::Second]
        .into_iter()
        .map(|which| {
            task(move || {
                let ctx = BsContext::new(n, d)?;
                let id = format!("bfunction/n{n}d{d}/{which}");
                let anchor = "Bernstein-Sato identity P_i*(∂) P^{s+e_i} = b_i(s) P^s";
                let grid = match bs_check_grid(&ctx, &BS_EXPONENTS, which) {
                    Ok(g) => g,
                    Err(Error::IdentityViolated(msg)) => {
                        let params = json!({"n": n, "d": d, "identity": which.to_string()});
                        return Ok(vec![CheckRecord::flag(id, anchor, params, false).with_note(msg)]);
                    }
                    Err(e) => return Err(e),
                };
                let (kappa, stable, outcomes) = (grid.kappa, grid.stable, grid.outcomes);
                let grid: Vec<_> = outcomes
                    .iter()
                    .map(|o| json!({"m1": o.m1, "m2": o.m2, "quotient": o.quotient.to_string(), "b": o.b_value.to_string()}))
                    .collect();
                let params = json!({"n": n, "d": d, "identity": which.to_string(), "kappa": kappa.to_string(), "grid": grid});
                Ok(vec![CheckRecord::flag(id, anchor, params, stable).with_note(format!("kappa = {kappa}"))])
            })
        })
        .collect()
}

fn gamma_const_tasks(n: usize, d: usize, cfg: &RunConfig) -> Vec<Task> {
    let default = vec![real(0.5, 0.5), real(1.0, 0.25), real(0.25, 1.0), real(1.5, 1.0)];
    let mc = McConfig::new(cfg.budget.mc_samples, cfg.seed_or_default());
    let mut tasks: Vec<Task> = grid_or(cfg, default)
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            let mc = mc.substream(k as u64 + 1);
            one(move || gamma_const_check(n, d, s.s1.re, s.s2.re, &mc))
        })
        .collect();
    if n <= 3 {
        let x = RectMatrix::from_fn(n, d, |i, j| if i == j { 1.0 } else { 0.3 * ((i + 2 * j) as f64 + 1.0).sin() });
        let mc = mc.substream(100);
        tasks.push(task(move || phi_covariance_check(&x, 0.5, 0.75, &mc)));
    }
    tasks
}

fn clerc_tasks(n: usize, d: usize, cfg: &RunConfig) -> Vec<Task> {
    let (nf, df) = (n as f64, d as f64);
    let (lo, hi) = (0.5 * (df - 1.0 - nf), -0.5 * (df - 1.0));
    let default = if n == 1 { vec![-0.4, -0.25, -0.1] } else { vec![0.5 * (lo + hi)] };
    let alphas: Vec<f64> = cfg.s_grid.as_ref().map(|g| g.iter().map(|p| p.s1[0]).collect()).unwrap_or(default);
    let center: Vec<f64> = (0..n * d).map(|k| 0.3 * (1.3 * k as f64 + 0.5).cos()).collect();
    let mc = McConfig::new(cfg.budget.mc_samples, cfg.seed_or_default());
    alphas
        .into_iter()
        .enumerate()
        .map(|(k, alpha)| {
            let (center, mc) = (center.clone(), mc.substream(k as u64 + 1));
            one(move || clerc_check(n, d, alpha, PI, &center, &mc))
        })
        .collect()
}

/// `Z/Γ_Ω̃` for the centered standard Gaussian at `n = d = 1`.
pub fn normalized_zeta_exact_1d(s: ComplexPair) -> Complex64 {
    use enhanced_zeta::specfun::{gamma, recip_gamma};
    gamma((s.s1 + 1.0) * 0.5).expect("Re s1 > -1")
        * 0.5
        * recip_gamma(s.s1 + 1.0)
        * recip_gamma(s.s2 + 1.0)
}

fn shift_tasks(n: usize, d: usize, cfg: &RunConfig) -> Vec<Task> {
    let default = if n == 1 { vec![real(0.5, 0.25), real(1.5, 1.0)] } else { vec![real(0.5, 0.5), real(1.0, 0.25)] };
    let spec = EvalSpec::new(cfg.budget.mc_samples, cfg.seed_or_default());
    let f = GaussianTestFn::new(n, d, 1.2, 0.8).with_center(&offset_center(n, d)).to_modulated().as_poly();
    let mut tasks: Vec<Task> = Vec::new();
    for (k, s) in grid_or(cfg, default).into_iter().enumerate() {
        for which in [Identity::First, Identity::Second] {
            let (f, spec) = (f.clone(), spec.substream(10 * k as u64 + which as u64 + 1));
            tasks.push(one(move || shift_relation_check(&f, s, which, &spec)));
        }
    }
    let g = GaussianTestFn::new(n, d, 1.0, 1.0).to_modulated().as_poly();
    let anchor = "Z(φ, s)/Γ_Ω̃(s) continues across the pole lines of Γ_Ω̃";
    if n == 1 {
        for s in [real(-1.5, -0.5), real(-0.5, -1.0), real(-1.25, -0.75)] {
            let g = g.clone();
            tasks.push(one(move || {
                let desc = Descent::new(1, 1)?;
                let v = normalized_zeta_descended(&g, s, &EvalSpec::new(0, 0).extended(), &desc)?;
                let exact = MCEstimate::exact(normalized_zeta_exact_1d(s), "closed-form");
                let tol = if exact.value.norm() < 1e-12 { Tolerance::Absolute(1e-9) } else { Tolerance::Relative(1e-3) };
                Ok(CheckRecord::compare(
                    format!("shift/n1d1/pole-crossing/{}", s_tag(s)),
                    anchor,
                    json!({"n": 1, "d": 1, "s1": [s.s1.re, s.s1.im], "s2": [s.s2.re, s.s2.im], "poles": gamma_tilde_poles(1, 1, s)}),
                    &v,
                    &exact,
                    tol,
                ))
            }));
        }
    } else {
        let s = real(-0.5, -1.0);
        let spec = spec.substream(1000).extended();
        tasks.push(one(move || {
            let desc = Descent::new(n, d)?;
            let v = normalized_zeta_descended(&g, s, &spec, &desc)?;
            let poles = gamma_tilde_poles(n, d, s);
            let finite = v.value.re.is_finite() && v.value.im.is_finite() && v.stderr.is_finite();
            Ok(CheckRecord::flag(
                format!("shift/n{n}d{d}/pole-crossing/{}", s_tag(s)),
                anchor,
                json!({"n": n, "d": d, "s1": [s.s1.re, s.s1.im], "s2": [s.s2.re, s.s2.im], "poles": poles,
                       "value": [v.value.re, v.value.im], "stderr": v.stderr}),
                finite && !poles.is_empty(),
            )
            .with_note(format!("Z/Γ = {:.6e}{:+.6e}i ± {:.2e} on {} pole line(s)", v.value.re, v.value.im, v.stderr, poles.len())))
        }));
    }
    tasks
}

/// Test functions and parameters for the Fourier transform theorem.
pub fn ft_cases(n: usize, d: usize, cfg: &RunConfig) -> Vec<(GaussianTestFn, ComplexPair)> {
    let cases = if n == 1 && d == 1 {
        vec![
            (GaussianTestFn::new(1, 1, 1.0, 1.3).with_center(&pt(1, 1, &[0.3, -0.2])), real(-0.5, -0.25)),
            (GaussianTestFn::standard(1, 1), real(-0.3, -0.1)),
            (GaussianTestFn::new(1, 1, 0.8, 2.0).with_center(&pt(1, 1, &[-0.5, 0.4])), real(-0.7, -0.4)),
        ]
    } else {
        let phi = GaussianTestFn::new(n, d, 0.6, 0.6);
        vec![(phi.clone(), real(-0.8, -0.8)), (phi, real(-0.9, -0.85))]
    };
    match &cfg.s_grid {
        Some(g) => g.iter().map(|p| (cases[0].0.clone(), p.pair())).collect(),
        None => cases,
    }
}

fn ft_tasks(n: usize, d: usize, cfg: &RunConfig, orbit_form: bool) -> Vec<Task> {
    let spec = EvalSpec::new(cfg.budget.mc_samples, cfg.seed_or_default()).extended();
    let mut tasks: Vec<Task> = ft_cases(n, d, cfg)
        .into_iter()
        .enumerate()
        .map(|(k, (phi, s))| {
            let spec = spec.substream(k as u64 + 1);
            if orbit_form {
                one(move || orbit_functional_eq_check(&phi, s, &spec))
            } else {
                one(move || ft_theorem_check(&phi, s, &spec))
            }
        })
        .collect();
    if orbit_form {
        let (count, seed) = (cfg.budget.random_s, cfg.seed_or_default());
        tasks.push(one(move || coefficient_identity_check(n, d, count, seed)));
    }
    tasks
}

pub fn corollary_cutoff() -> ConeCutoffFn {
    ConeCutoffFn::new(GaussianTestFn::new(1, 1, 1.0, 1.0).with_center(&pt(1, 1, &[1.0, 0.8])), 0.5)
}

fn corollary_tasks(n: usize, d: usize, cfg: &RunConfig) -> Vec<Task> {
    let mut tasks: Vec<Task> = Vec::new();
    if n == 1 {
        for s in grid_or(cfg, vec![real(-0.5, -0.25), real(-0.7, -0.1), real(-0.3, 0.0)]) {
            tasks.push(task(move || corollary_check(&corollary_cutoff(), s)));
        }
    }
    let (count, seed) = (cfg.budget.random_s, cfg.seed_or_default());
    tasks.push(one(move || prefactor_forms_check(n, d, count, seed)));
    tasks
}

fn xi_tasks(n: usize, d: usize, cfg: &RunConfig) -> Vec<Task> {
    let (points, seed) = (cfg.budget.xi_points, cfg.seed_or_default());
    grid_or(cfg, vec![real(1.0, 1.0), real(2.0, 1.0), real(1.0, 2.0)])
        .into_iter()
        .enumerate()
        .map(|(k, s)| task(move || xi_decomposition_check(n, d, s, points, seed.wrapping_add(k as u64))))
        .collect()
}

fn delta_tasks(n: usize, d: usize, cfg: &RunConfig) -> Vec<Task> {
    let spec = EvalSpec::new(cfg.budget.mc_samples, cfg.seed_or_default());
    let offset = GaussianTestFn::new(n, d, 1.0, 1.3).with_center(&offset_center(n, d));
    [GaussianTestFn::standard(n, d), offset]
        .into_iter()
        .enumerate()
        .map(|(k, phi)| {
            let spec = spec.substream(k as u64 + 1);
            one(move || delta_residue_check(&phi, &spec))
        })
        .collect()
}

/// Orbit counts from enumerating signatures by hand.
pub fn hand_orbit_count(n: usize, d: usize) -> Option<usize> {
    match (n, d) {
        (1, 1) => Some(2),
        (2, 1) => Some(4),
        (2, 2) => Some(3),
        (3, 2) => Some(6),
        _ => None,
    }
}

fn orbit_tasks(n: usize, d: usize, budget: Budget, seed: u64) -> Vec<Task> {
    let mut tasks = vec![task(move || orbit_machinery_check(n, d, budget.orbit_samples, budget.orbit_actions, seed))];
    if let Some(expected) = hand_orbit_count(n, d) {
        tasks.push(one(move || {
            let found = enumerate_orbits(n, d)?;
            let labels: Vec<String> = found.iter().map(OrbitParam::to_string).collect();
            Ok(CheckRecord::flag(
                format!("orbits/n{n}d{d}/count"),
                "open orbits classified by the signatures of z and ᵗy z⁻¹ y",
                json!({"n": n, "d": d, "expected": expected, "orbits": labels}),
                found.len() == expected,
            ))
        }));
    }
    tasks
}

pub fn verify_tasks(check: Check, n: usize, d: usize, cfg: &RunConfig) -> Result<Vec<Task>, RunError> {
    Ok(match check {
        Check::GammaConst => gamma_const_tasks(n, d, cfg),
        Check::Clerc => clerc_tasks(n, d, cfg),
        Check::Shift => shift_tasks(n, d, cfg),
        Check::FtTheorem => ft_tasks(n, d, cfg, false),
        Check::OrbitFeq => ft_tasks(n, d, cfg, true),
        Check::Corollary => corollary_tasks(n, d, cfg),
        Check::Xi => xi_tasks(n, d, cfg),
        Check::DeltaResidue if (n, d) != (1, 1) => {
            return Err(RunError::Config(format!(
                "delta-residue is available for n = d = 1 only (got n={n}, d={d}); Monte Carlo at the residue point is too noisy to test"
            )))
        }
        Check::DeltaResidue => delta_tasks(n, d, cfg),
        Check::Orbits => orbit_tasks(n, d, cfg.budget, cfg.seed_or_default()),
    })
}

/// The `(n, d)` pairs the suite runs for each check family.
pub fn suite_pairs(check: Check) -> &'static [(usize, usize)] {
    match check {
        Check::GammaConst => &[(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)],
        Check::Clerc | Check::Shift | Check::FtTheorem | Check::OrbitFeq | Check::Xi => &[(1, 1), (2, 1)],
        Check::Corollary => &[(1, 1), (2, 1), (2, 2)],
        Check::DeltaResidue => &[(1, 1)],
        Check::Orbits => &[(1, 1), (2, 1), (2, 2), (3, 2)],
    }
}

pub const BFUNCTION_PAIRS: [(usize, usize); 5] = [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)];

fn suite_tasks(cfg: &RunConfig) -> Result<Vec<Task>, RunError> {
    let mut tasks = Vec::new();
    for (n, d) in BFUNCTION_PAIRS {
        tasks.extend(bfunction_tasks(n, d));
    }
    let cfg = RunConfig { s_grid: None, ..cfg.clone() };
    for check in Check::ALL {
        for &(n, d) in suite_pairs(check) {
            tasks.extend(verify_tasks(check, n, d, &cfg)?);
        }
    }
    Ok(tasks)
}

fn default_line(cfg: &RunConfig, lo: f64, hi: f64, step: f64) -> Vec<ComplexPair> {
    let count = ((hi - lo) / step).round() as usize;
    grid_or(cfg, (0..=count).map(|k| real(lo + step * k as f64, 0.0)).collect())
}

fn complex_cells(v: Option<Complex64>) -> [Cell; 2] {
    match v {
        Some(z) => [Cell::num(z.re), Cell::num(z.im)],
        None => [Cell::Num(None), Cell::Num(None)],
    }
}

fn s_cells(s: ComplexPair) -> [Cell; 4] {
    [Cell::num(s.s1.re), Cell::num(s.s1.im), Cell::num(s.s2.re), Cell::num(s.s2.im)]
}

const S_COLUMNS: [&str; 4] = ["s1_re", "s1_im", "s2_re", "s2_im"];

fn gamma_table(cfg: &RunConfig) -> Result<Table, RunError> {
    let (n, d) = (cfg.n, cfg.d);
    let orbits = enumerate_orbits(n, d)?;
    let mut columns: Vec<String> = S_COLUMNS.iter().map(|s| s.to_string()).collect();
    for name in ["gamma_tilde", "recip_gamma_tilde", "gindikin_gamma", "c"] {
        columns.push(format!("{name}_re"));
        columns.push(format!("{name}_im"));
    }
    for rho in &orbits {
        columns.push(format!("u{rho}_re"));
        columns.push(format!("u{rho}_im"));
    }
    columns.push("poles".into());
    let mut rows = Vec::new();
    for s in default_line(cfg, -3.0, 3.0, 0.5) {
        let mut row: Vec<Cell> = s_cells(s).into();
        row.extend(complex_cells(gamma_tilde_omega(n, d, s).ok()));
        row.extend(complex_cells(Some(recip_gamma_tilde_omega(n, d, s))));
        row.extend(complex_cells(gindikin_gamma(n, d, s.s1, s.s2).ok()));
        row.extend(complex_cells(Some(c_factor(n, d, s))));
        for rho in &orbits {
            row.extend(complex_cells(Some(u_rho(n, d, *rho, s)?)));
        }
        let poles: Vec<String> = gamma_tilde_poles(n, d, s).iter().map(|p| p.to_string()).collect();
        row.push(Cell::Text(poles.join("; ")));
        rows.push(row);
    }
    Ok(Table { name: "gamma".into(), columns, rows })
}

fn zeta_table(cfg: &RunConfig) -> Result<Table, RunError> {
    let (n, d) = (cfg.n, cfg.d);
    let f = GaussianTestFn::new(n, d, 1.0, 1.0).to_modulated().as_poly();
    let desc = Descent::new(n, d)?;
    let spec = EvalSpec::new(cfg.budget.mc_samples, cfg.seed_or_default()).extended();
    let mut columns: Vec<String> = S_COLUMNS.iter().map(|s| s.to_string()).collect();
    columns.extend(["normalized_re", "normalized_im", "stderr", "method"].map(String::from));
    let points = default_line(cfg, -1.5, 1.5, 0.25);
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .enumerate()
        .map(|(k, &s)| {
            let spec = spec.substream(k as u64 + 1);
            let direct = check_direct(n, s, Region::Extended).is_ok();
            let (value, method) = if direct {
                let z = zeta_integral(&f, s, &spec).map(|z| z.scale(recip_gamma_tilde_omega(n, d, s)));
                (z, "direct")
            } else {
                (normalized_zeta_descended(&f, s, &spec, &desc), "descent")
            };
            let mut row: Vec<Cell> = s_cells(s).into();
            match value {
                Ok(v) => {
                    row.extend(complex_cells(Some(v.value)));
                    row.push(Cell::num(v.stderr));
                    row.push(Cell::Text(method.into()));
                }
                Err(e) => {
                    row.extend(complex_cells(None));
                    row.push(Cell::Num(None));
                    row.push(Cell::Text(format!("unavailable: {e}")));
                }
            }
            row
        })
        .collect();
    Ok(Table { name: "zeta".into(), columns, rows })
}

//! Numerical evaluation of zeta integrals, orbit pairings, the gamma constant
//! and the auxiliary lemmas behind the functional equation.

pub mod mc;
pub mod quad;
pub mod testfn;

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::invariants::{classify_orbit, enumerate_orbits, p2, ComplexPair, OrbitParam};
use crate::linalg::{principal_minor, EnhancedPoint, RectMatrix, SquareMatrix};
use crate::polyalg::{BPolynomial, BsContext, DiffOperator, Identity};
use crate::report::{CheckRecord, Tolerance};
use crate::specfun::{gindikin_gamma, multi_gamma, real_pow};
use crate::{Error, Result};

pub use mc::{MCEstimate, McConfig};
pub use testfn::{ConeCutoffFn, GaussianTestFn, ModulatedGaussian, PolyGaussian};

/// Lower bound on `Re s_i` for direct Monte Carlo evaluation in the
/// extended region; keeps the second moment of the weights finite.
pub const MC_MARGIN: f64 = 0.25;

/// Which parameters a direct (non-continued) evaluation accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// `Re s1 >= 0` and `Re s2 >= 0`.
    Conservative,
    /// Quadrature (`n = 1`): local integrability, `Re s1 > -1`, `Re s2 > -1/2`.
    /// Monte Carlo: `Re s_i >= -1/4`.
    Extended,
}

/// Evaluation settings shared by the integrators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSpec {
    pub mc: McConfig,
    pub region: Region,
    /// Variance inflation of Gaussian proposals relative to the test function.
    pub widen: f64,
}

impl EvalSpec {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { mc: McConfig::new(samples, seed), region: Region::Conservative, widen: 2.0 }
    }

    pub fn extended(mut self) -> Self {
        self.region = Region::Extended;
        self
    }

    pub fn substream(&self, tag: u64) -> Self {
        Self { mc: self.mc.substream(tag), ..*self }
    }
}

/// A function on `W` in the flat coordinates of [`EnhancedPoint::coordinates`].
pub trait WFunction: Sync {
    fn dims(&self) -> (usize, usize);
    fn eval(&self, x: &[f64]) -> Complex64;
    /// Center and per-coordinate Gaussian rate `a_k` of an envelope
    /// `exp(-Σ a_k ω_k (x_k - c_k)²)` with the same decay as the function.
    fn envelope(&self) -> (Vec<f64>, Vec<f64>);
}

impl WFunction for GaussianTestFn {
    fn dims(&self) -> (usize, usize) {
        (self.n, self.d)
    }
    fn eval(&self, x: &[f64]) -> Complex64 {
        Complex64::new(GaussianTestFn::eval(self, x), 0.0)
    }
    fn envelope(&self) -> (Vec<f64>, Vec<f64>) {
        self.to_modulated().envelope()
    }
}

impl WFunction for ModulatedGaussian {
    fn dims(&self) -> (usize, usize) {
        (self.n, self.d)
    }
    fn eval(&self, x: &[f64]) -> Complex64 {
        ModulatedGaussian::eval(self, x)
    }
    fn envelope(&self) -> (Vec<f64>, Vec<f64>) {
        (self.center.clone(), self.a.clone())
    }
}

impl WFunction for PolyGaussian {
    fn dims(&self) -> (usize, usize) {
        (self.gauss.n, self.gauss.d)
    }
    fn eval(&self, x: &[f64]) -> Complex64 {
        PolyGaussian::eval(self, x)
    }
    fn envelope(&self) -> (Vec<f64>, Vec<f64>) {
        self.gauss.envelope()
    }
}

impl WFunction for ConeCutoffFn {
    fn dims(&self) -> (usize, usize) {
        (self.base.n, self.base.d)
    }
    fn eval(&self, x: &[f64]) -> Complex64 {
        Complex64::new(ConeCutoffFn::eval(self, x), 0.0)
    }
    fn envelope(&self) -> (Vec<f64>, Vec<f64>) {
        self.base.to_modulated().envelope()
    }
}

/// Orbit label and `(ln|P1|, ln|P2|)` at a regular point; `None` on the
/// singular set.
pub fn log_invariants(n: usize, d: usize, x: &[f64]) -> Option<(OrbitParam, f64, f64)> {
    let p = EnhancedPoint::from_coordinates(n, d, x);
    let a = p.z.determinant().abs();
    let b = p2(&p).abs();
    if a == 0.0 || b == 0.0 {
        return None;
    }
    let rho = classify_orbit(&p).ok()?;
    Some((rho, a.ln(), b.ln()))
}

fn kernel(s: ComplexPair, l1: f64, l2: f64) -> Complex64 {
    (s.s1 * l1 + s.s2 * l2).exp()
}

/// Whether `s` may be evaluated directly by the integrator used for `n`.
pub fn check_direct(n: usize, s: ComplexPair, region: Region) -> Result<()> {
    let (a, b) = (s.s1.re, s.s2.re);
    let ok = match (region, n) {
        (Region::Conservative, _) => a >= 0.0 && b >= 0.0,
        (Region::Extended, 1) => a > -1.0 && b > -0.5,
        (Region::Extended, _) => a >= -MC_MARGIN && b >= -MC_MARGIN,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Convergence(format!(
            "Re s = ({a}, {b}) outside the {region:?} region for n = {n}; use descent or the extended region"
        )))
    }
}

fn quad_rules(f: &impl WFunction) -> (quad::DeRule, quad::DeRule) {
    let (c, a) = f.envelope();
    let sz = 1.0 / a[0].sqrt() + c[0].abs();
    let sy = 1.0 / a[1].sqrt() + c[1].abs();
    (quad::DeRule::with_scale(sz), quad::DeRule::with_scale(sy))
}

/// `n = d = 1`: the orbits are `z > 0` and `z < 0`, with `|P1| = |z|`,
/// `|P2| = y²`.
fn quad_pairing_1d(f: &impl WFunction, s: ComplexPair, sign: f64) -> MCEstimate {
    let (rz, ry) = quad_rules(f);
    let r = quad::half_plane(&rz, &ry, sign, |z, y| {
        f.eval(&[z, y]) * kernel(s, z.abs().ln(), 2.0 * y.abs().ln())
    });
    MCEstimate { value: r.value, stderr: r.error, n_samples: r.evaluations, method: "de-quadrature".into() }
}

fn proposal(f: &impl WFunction, widen: f64) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = f.dims();
    let w = testfn::pairing_weights(n, d);
    let (c, a) = f.envelope();
    let var = a.iter().zip(&w).map(|(a, w)| widen / (2.0 * a * w)).collect();
    (c, var)
}

/// `⟨K^ρ_s, f⟩ = ∫_{O_ρ} |P1|^{s1} |P2|^{s2} f` for every open orbit, in the
/// order of [`enumerate_orbits`], by direct evaluation.
pub fn orbit_pairings_direct(f: &impl WFunction, s: ComplexPair, spec: &EvalSpec) -> Result<Vec<(OrbitParam, MCEstimate)>> {
    let (n, d) = f.dims();
    check_direct(n, s, spec.region)?;
    let orbits = enumerate_orbits(n, d)?;
    if n == 1 {
        return Ok(orbits.iter().map(|&rho| (rho, quad_pairing_1d(f, s, rho.sign_p1()))).collect());
    }
    let (center, var) = proposal(f, spec.widen);
    let len = center.len();
    let est = mc::run(&spec.mc, orbits.len(), "gaussian-is", |rng, out| {
        let mut x = vec![0.0; len];
        let logq = mc::gaussian_coords(&center, &var, rng, &mut x);
        if let Some((rho, l1, l2)) = log_invariants(n, d, &x) {
            let k = orbits.iter().position(|o| *o == rho).expect("classified orbit is enumerated");
            out[k] = f.eval(&x) * kernel(s, l1, l2) * (-logq).exp();
        }
    });
    Ok(orbits.into_iter().zip(est).collect())
}

fn lin_eval(b: &BPolynomial, s: ComplexPair) -> Complex64 {
    b.factors
        .iter()
        .map(|f| {
            let a1 = f.a1.to_f64().unwrap();
            let a2 = f.a2.to_f64().unwrap();
            let c = f.c.to_f64().unwrap();
            s.s1 * a1 + s.s2 * a2 + c
        })
        .product()
}

/// One b-function descent step `s ↦ s + (1,1)`:
/// `⟨K^ρ_s, f⟩ = ⟨K^ρ_{s+(1,1)}, P2*(-∂) P1*(-∂) f⟩ / (ε1 ε2 κ1 κ2 b10(s) b01(s1+1, s2))`
/// with `ε_i` the sign of `P_i` on `O_ρ`.
pub struct Descent {
    pub n: usize,
    pub d: usize,
    pub kappa: [f64; 2],
    pub p1_dual: DiffOperator,
    pub p2_dual: DiffOperator,
    pub b10: BPolynomial,
    pub b01: BPolynomial,
}

impl Descent {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        let ctx = BsContext::new(n, d)?;
        let k1 = ctx.check(1, 1, Identity::First)?.kappa.to_f64().unwrap();
        let k2 = ctx.check(1, 1, Identity::Second)?.kappa.to_f64().unwrap();
        Ok(Self { n, d, kappa: [k1, k2], p1_dual: ctx.p1_dual, p2_dual: ctx.p2_dual, b10: ctx.b10, b01: ctx.b01 })
    }

    pub fn b_first(&self, s: ComplexPair) -> Complex64 {
        lin_eval(&self.b10, s)
    }

    pub fn b_second(&self, s: ComplexPair) -> Complex64 {
        lin_eval(&self.b01, s)
    }

    pub fn test_function(&self, f: &PolyGaussian) -> PolyGaussian {
        f.apply_reflected(&self.p1_dual).apply_reflected(&self.p2_dual)
    }

    pub fn factor(&self, s: ComplexPair, rho: OrbitParam) -> Complex64 {
        let shifted = ComplexPair::new(s.s1 + 1.0, s.s2);
        let den = self.b_first(s) * self.b_second(shifted) * (self.kappa[0] * self.kappa[1] * rho.sign_p1() * rho.sign_p2());
        den.inv()
    }
}

fn shift(s: ComplexPair, a: f64, b: f64) -> ComplexPair {
    ComplexPair::new(s.s1 + a, s.s2 + b)
}

/// Orbit pairings at `s`, through one descent step when `descent` is set.
pub fn orbit_pairings(f: &PolyGaussian, s: ComplexPair, spec: &EvalSpec, descent: Option<&Descent>) -> Result<Vec<(OrbitParam, MCEstimate)>> {
    match descent {
        None => orbit_pairings_direct(f, s, spec),
        Some(desc) => {
            let g = desc.test_function(f);
            let raw = orbit_pairings_direct(&g, shift(s, 1.0, 1.0), spec)?;
            Ok(raw.into_iter().map(|(rho, e)| (rho, e.scale(desc.factor(s, rho)))).collect())
        }
    }
}

/// `⟨K^ρ_s, f⟩` for a single orbit.
pub fn k_rho_pairing(rho: OrbitParam, s: ComplexPair, f: &PolyGaussian, spec: &EvalSpec, descent: Option<&Descent>) -> Result<MCEstimate> {
    let (n, d) = f.dims();
    rho.validate(n, d)?;
    let all = orbit_pairings(f, s, spec, descent)?;
    Ok(all.into_iter().find(|(r, _)| *r == rho).map(|(_, e)| e).expect("validated orbit is enumerated"))
}

/// `Z(φ, s) = ∫_{Ω̃} φ P1^{s1} P2^{s2}` in Lebesgue measure.
///
/// `n = 1` uses double-exponential quadrature; otherwise importance sampling
/// with `z ~ c·W_n(1, n + 1 + 2 Re s1)` and Gaussian `y`.
pub fn zeta_integral(f: &impl WFunction, s: ComplexPair, spec: &EvalSpec) -> Result<MCEstimate> {
    let (n, d) = f.dims();
    if d > n {
        return Err(Error::DimensionOrder { n, d });
    }
    check_direct(n, s, spec.region)?;
    if n == 1 {
        return Ok(quad_pairing_1d(f, s, 1.0));
    }
    let nsym = n * (n + 1) / 2;
    let (center, var) = proposal(f, spec.widen);
    let dof = n as f64 + 1.0 + 2.0 * s.s1.re;
    let (c, a) = f.envelope();
    let coords = crate::polyalg::Coordinates::new(n, d);
    let diag = (0..n).map(|i| c[coords.z(i, i)].max(0.0)).sum::<f64>() / n as f64;
    let typical = diag + 1.0 / a[0].sqrt();
    let scale = typical / dof;
    let est = mc::run(&spec.mc, 1, "wishart-is", |rng, out| {
        let (z, lz) = mc::scaled_wishart(n, dof, scale, rng);
        let mut x = z.upper();
        x.resize(center.len(), 0.0);
        let ly = mc::gaussian_coords(&center[nsym..], &var[nsym..], rng, &mut x[nsym..]);
        let p = EnhancedPoint::from_coordinates(n, d, &x);
        let b = p2(&p);
        if b > 0.0 {
            let det = p.z.determinant();
            out[0] = f.eval(&x) * kernel(s, det.ln(), b.ln()) * (-(lz + ly)).exp();
        }
    });
    Ok(est.into_iter().next().unwrap())
}

/// `Z(φ, s)` through one descent step.
pub fn zeta_integral_descended(f: &PolyGaussian, s: ComplexPair, spec: &EvalSpec, desc: &Descent) -> Result<MCEstimate> {
    let g = desc.test_function(f);
    Ok(zeta_integral(&g, shift(s, 1.0, 1.0), spec)?.scale(desc.factor(s, OrbitParam::cone(desc.n, desc.d))))
}

/// `2^{-n(n-1)/4}`: ratio of Lebesgue measure `∏_{i<=j} dz_ij` to the
/// Euclidean measure of the trace form `Tr(z²)` on `Sym_n`.
pub fn trace_measure_ratio(n: usize) -> f64 {
    let nf = n as f64;
    2f64.powf(-0.25 * nf * (nf - 1.0))
}

fn check_gamma_region(n: usize, d: usize, alpha: f64, beta: f64) -> Result<()> {
    let (nf, df) = (n as f64, d as f64);
    let first = alpha + beta + 0.5 * (nf + 1.0) - 0.5 * (df - 1.0);
    if alpha <= -1.0 || first <= 0.0 {
        return Err(Error::Convergence(format!("γ(α, β) diverges or is not sampled at α = {alpha}, β = {beta}")));
    }
    Ok(())
}

/// `∫_Ω e^{-Tr z} det(z)^α Δ_d(z)^β dz` in Lebesgue measure, sampling
/// `z ~ ½ W_n(1, n + 1 + 2α)`.
pub fn gamma_const_integral_mc(n: usize, d: usize, alpha: f64, beta: f64, cfg: &McConfig) -> Result<MCEstimate> {
    if d > n {
        return Err(Error::DimensionOrder { n, d });
    }
    check_gamma_region(n, d, alpha, beta)?;
    let dof = n as f64 + 1.0 + 2.0 * alpha;
    let est = mc::run(cfg, 1, "wishart-is", |rng, out| {
        let (z, lq) = mc::scaled_wishart(n, dof, 0.5, rng);
        let det = z.determinant();
        let minor = principal_minor(&z, d).expect("d <= n");
        let lw = -z.trace() + alpha * det.ln() + beta * minor.ln() - lq;
        out[0] = Complex64::new(lw.exp(), 0.0);
    });
    Ok(est.into_iter().next().unwrap())
}

/// Compares the Monte Carlo gamma constant with the closed form.
///
/// The closed form is normalized for the trace-form measure on `Sym_n`; the
/// Lebesgue integral is converted by [`trace_measure_ratio`].
pub fn gamma_const_check(n: usize, d: usize, alpha: f64, beta: f64, cfg: &McConfig) -> Result<CheckRecord> {
    let mc_est = gamma_const_integral_mc(n, d, alpha, beta, cfg)?;
    let closed = gindikin_gamma(n, d, Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))?;
    let rhs = MCEstimate::exact(closed * trace_measure_ratio(n), "closed-form");
    let rel = mc_est.relative_stderr();
    Ok(CheckRecord::compare(
        format!("gamma-const/n{n}d{d}/a{alpha}/b{beta}"),
        "gamma constant of the cone (Gindikin closed form)",
        json!({"n": n, "d": d, "alpha": alpha, "beta": beta, "samples": cfg.samples, "seed": cfg.seed,
               "measure_ratio": trace_measure_ratio(n)}),
        &mc_est,
        &rhs,
        Tolerance::Stderr(3.0),
    )
    .and(rel <= 0.01, format!("relative stderr {rel:.3e} exceeds 1%")))
}

/// `Φ(x) = ∫_Ω e^{-Tr z} det(z)^α det(ᵗx z x)^β dz` for full-rank `x ∈ M_{n,d}`.
pub fn phi_integral(x: &RectMatrix, alpha: f64, beta: f64, cfg: &McConfig) -> Result<MCEstimate> {
    let (n, d) = (x.n(), x.d());
    if x.gram().determinant().abs() < 1e-12 {
        return Err(Error::Shape("x must have full rank".into()));
    }
    check_gamma_region(n, d, alpha, beta)?;
    let dof = n as f64 + 1.0 + 2.0 * alpha;
    let est = mc::run(cfg, 1, "wishart-is", |rng, out| {
        let (z, lq) = mc::scaled_wishart(n, dof, 0.5, rng);
        let q = x.quadratic(&z).determinant();
        let lw = -z.trace() + alpha * z.determinant().ln() + beta * q.ln() - lq;
        out[0] = Complex64::new(lw.exp(), 0.0);
    });
    Ok(est.into_iter().next().unwrap())
}

/// A Haar-distributed orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SquareMatrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for c in &cols {
            let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(c).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    SquareMatrix::from_fn(n, |i, j| cols[j][i])
}

fn right_mul(x: &RectMatrix, a: &SquareMatrix) -> RectMatrix {
    RectMatrix::from_fn(x.n(), x.d(), |i, j| (0..x.d()).map(|k| x.get(i, k) * a.get(k, j)).sum())
}

fn left_mul(u: &SquareMatrix, x: &RectMatrix) -> RectMatrix {
    RectMatrix::from_fn(x.n(), x.d(), |i, j| (0..x.n()).map(|k| u.get(i, k) * x.get(k, j)).sum())
}

/// Covariance of `Φ` under `x ↦ xa`, `x ↦ ux` and the reduction
/// `Φ(x) = det(ᵗx x)^β γ(α, β)`; each side uses an independent stream.
pub fn phi_covariance_check(x: &RectMatrix, alpha: f64, beta: f64, cfg: &McConfig) -> Result<Vec<CheckRecord>> {
    let (n, d) = (x.n(), x.d());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let a = SquareMatrix::from_fn(d, |i, j| if i == j { 1.0 + rng.gen::<f64>() } else { 0.5 * rng.gen::<f64>() - 0.25 });
    let u = random_orthogonal(n, &mut rng);
    let base = phi_integral(x, alpha, beta, &cfg.substream(1))?;
    let xa = phi_integral(&right_mul(x, &a), alpha, beta, &cfg.substream(2))?;
    let ux = phi_integral(&left_mul(&u, x), alpha, beta, &cfg.substream(3))?;
    let id = phi_integral(&RectMatrix::standard(n, d), alpha, beta, &cfg.substream(4))?;
    let det_a = a.determinant();
    let params = json!({"n": n, "d": d, "alpha": alpha, "beta": beta, "det_a": det_a, "samples": cfg.samples});
    let gamma = gindikin_gamma(n, d, Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))? * trace_measure_ratio(n);
    let reduced = MCEstimate::exact(gamma * x.gram().determinant().powf(beta), "closed-form");
    Ok(vec![
        CheckRecord::compare(
            format!("phi-cov/n{n}d{d}/xa"),
            "right covariance of Φ under GL_d",
            params.clone(),
            &xa,
            &base.scale(Complex64::new(det_a.abs().powf(2.0 * beta), 0.0)),
            Tolerance::Stderr(3.0),
        ),
        CheckRecord::compare(format!("phi-cov/n{n}d{d}/ux"), "left invariance of Φ under O(n)", params.clone(), &ux, &base, Tolerance::Stderr(3.0)),
        CheckRecord::compare(format!("phi-cov/n{n}d{d}/identity"), "Φ at the standard frame equals γ(α, β)", params.clone(), &id, &MCEstimate::exact(gamma, "closed-form"), Tolerance::Stderr(3.0)),
        CheckRecord::compare(format!("phi-cov/n{n}d{d}/reduction"), "reduction of Φ to det(ᵗx x)^β γ(α, β)", params, &base, &reduced, Tolerance::Stderr(3.0)),
    ])
}

/// Checks `∫ (P_i*(-∂)φ) K⁺_{s+e_i} = κ_i b_i(s) Z(φ, s)` on the cone.
pub fn shift_relation_check(f: &PolyGaussian, s: ComplexPair, which: Identity, spec: &EvalSpec) -> Result<CheckRecord> {
    let (n, d) = f.dims();
    let desc = Descent::new(n, d)?;
    let (g, s_up, b, kappa) = match which {
        Identity::First => (f.apply_reflected(&desc.p1_dual), shift(s, 1.0, 0.0), desc.b_first(s), desc.kappa[0]),
        Identity::Second => (f.apply_reflected(&desc.p2_dual), shift(s, 0.0, 1.0), desc.b_second(s), desc.kappa[1]),
    };
    let lhs = zeta_integral(&g, s_up, &spec.substream(1))?;
    let rhs = zeta_integral(f, s, &spec.substream(2))?.scale(b * kappa);
    let tol = if n == 1 { Tolerance::Relative(1e-3) } else { Tolerance::Stderr(3.0) };
    Ok(CheckRecord::compare(
        format!("shift/n{n}d{d}/{which}/s({},{})", s.s1.re, s.s2.re),
        "b-function shift relation of the zeta integral",
        json!({"n": n, "d": d, "s1": [s.s1.re, s.s1.im], "s2": [s.s2.re, s.s2.im], "identity": which.to_string(), "kappa": kappa}),
        &lhs,
        &rhs,
        tol,
    ))
}

/// `Z(φ, s)/Γ_Ω̃(s)` through one descent step, finite across the pole lines
/// of `Γ_Ω̃` that the step crosses.
///
/// Since `b10(s) b01(s1+1, s2) = Γ_Ω̃(s+(1,1))/Γ_Ω̃(s)`, this is
/// `⟨K⁺_{s+(1,1)}, P2*(-∂)P1*(-∂)φ⟩ / (κ1 κ2 Γ_Ω̃(s+(1,1)))`.
pub fn normalized_zeta_descended(f: &PolyGaussian, s: ComplexPair, spec: &EvalSpec, desc: &Descent) -> Result<MCEstimate> {
    let (n, d) = f.dims();
    let up = shift(s, 1.0, 1.0);
    let raw = zeta_integral(&desc.test_function(f), up, spec)?;
    let recip = crate::specfun::recip_gamma_tilde_omega(n, d, up);
    Ok(raw.scale(recip / (desc.kappa[0] * desc.kappa[1])))
}

/// `Γ_Ω̃(s + (1,1)) / Γ_Ω̃(s)` as a product of linear factors.
pub fn gamma_shift_ratio(n: usize, d: usize, s: ComplexPair) -> Complex64 {
    let mut r = Complex64::new(1.0, 0.0);
    for (idx, (_, rank, arg)) in crate::specfun::gamma_tilde_factors(n, d, s).into_iter().enumerate() {
        for j in 0..rank {
            let a = arg - 0.5 * j as f64;
            r *= if idx == 3 { a * (a + 1.0) } else { a };
        }
    }
    r
}

/// Left and right sides of the lemma
/// `∫_E ψ̂(y) det(ᵗy y)^α dy = π^{-2d(α+n/4)} Γ_d(α+n/2)/Γ_d(-α) ∫_E ψ(x) det(ᵗx x)^{-α-n/2} dx`
/// for `ψ(y) = exp(-a |y - c|²)`.
pub fn clerc_check(n: usize, d: usize, alpha: f64, a: f64, center: &[f64], cfg: &McConfig) -> Result<CheckRecord> {
    if d > n {
        return Err(Error::DimensionOrder { n, d });
    }
    let (nf, df) = (n as f64, d as f64);
    if !(alpha > 0.5 * (df - 1.0 - nf) && alpha < -0.5 * (df - 1.0)) {
        return Err(Error::Convergence(format!("α = {alpha} outside the strip where both sides converge")));
    }
    let c = center.to_vec();
    let psi = |y: &[f64]| -> Complex64 {
        let r: f64 = y.iter().zip(&c).map(|(u, v)| (u - v) * (u - v)).sum();
        Complex64::new((-a * r).exp(), 0.0)
    };
    let psi_hat = |x: &[f64]| -> Complex64 {
        let r: f64 = x.iter().map(|u| u * u).sum();
        let ph: f64 = x.iter().zip(&c).map(|(u, v)| u * v).sum();
        Complex64::from_polar((PI / a).powf(0.5 * nf * df) * (-PI * PI * r / a).exp(), -2.0 * PI * ph)
    };
    let beta = -alpha - 0.5 * nf;
    let constant = real_pow(PI, Complex64::new(-2.0 * df * (alpha + 0.25 * nf), 0.0))
        * multi_gamma(d, Complex64::new(alpha + 0.5 * nf, 0.0))?
        / multi_gamma(d, Complex64::new(-alpha, 0.0))?;
    let (lhs, rhs) = if n * d == 1 {
        let rule = quad::DeRule::with_scale(1.0 / a.sqrt() + c[0].abs());
        let l = quad::real_line(&rule, |y| psi_hat(&[y]) * y.abs().powf(2.0 * alpha));
        let r = quad::real_line(&rule, |x| psi(&[x]) * x.abs().powf(2.0 * beta));
        (
            MCEstimate { value: l.value, stderr: l.error, n_samples: l.evaluations, method: "de-quadrature".into() },
            MCEstimate { value: r.value, stderr: r.error, n_samples: r.evaluations, method: "de-quadrature".into() },
        )
    } else {
        let side = |exponent: f64, rate: f64, g: &(dyn Fn(&[f64]) -> Complex64 + Sync), tag: u64| {
            let sampler = mc::RadialSampler::new(n, d, exponent, 1.0 / rate);
            mc::run(&cfg.substream(tag), 1, "radial-is", move |rng, out| {
                let (y, lq) = sampler.sample(rng);
                out[0] = g(y.entries()) * (exponent * y.gram().determinant().ln() - lq).exp();
            })
            .remove(0)
        };
        let shift_rate = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        (side(alpha, PI * PI / a, &psi_hat, 1), side(beta, a / (1.0 + shift_rate), &psi, 2))
    };
    let rhs = rhs.scale(constant);
    let tol = if n * d == 1 { Tolerance::Relative(1e-4) } else { Tolerance::Stderr(3.0) };
    Ok(CheckRecord::compare(
        format!("clerc/n{n}d{d}/alpha{alpha}"),
        "Fourier transform of det(ᵗy y)^α on M_{n,d}",
        json!({"n": n, "d": d, "alpha": alpha, "a": a, "center": center}),
        &lhs,
        &rhs,
        tol,
    ))
}

#[cfg(test)]
mod tests;

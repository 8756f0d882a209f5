//! Complex gamma functions and the closed-form constants attached to the
//! enhanced positive cone.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{ComplexPair, OrbitParam};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Structural description of a gamma pole: which factor, which term, and the
/// linear form in `s` that hit a nonpositive integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    /// Human-readable name of the multi-gamma factor, e.g. `Γ_d(s2 + n/2)`.
    pub factor: String,
    /// 1-based index `j` of the term `Γ(α - (j-1)/2)` inside the factor.
    pub term: usize,
    /// The nonpositive integer hit by the argument.
    pub at: i64,
}

impl fmt::Display for Pole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} term j={} has argument {}", self.factor, self.term, self.at)
    }
}

/// Returns `Some(k)` when `z` sits on the pole `k ∈ {0, -1, -2, ...}` of Γ.
pub fn gamma_pole(z: Complex64) -> Option<i64> {
    let r = z.re.round();
    if r <= 0.0 && (z.re - r).abs() < 1e-12 && z.im.abs() < 1e-12 {
        Some(r as i64)
    } else {
        None
    }
}

fn wrap_phase(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI { PI } else { y }
}

// Stirling series after shifting Re z to at least 15.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    const B: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for b in B {
        series += pow * b;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift
}

/// `log Γ(α)` with the imaginary part reduced to `(-π, π]`.
pub fn log_gamma(alpha: Complex64) -> Result<Complex64> {
    if let Some(k) = gamma_pole(alpha) {
        return Err(Error::Pole(Pole { factor: "Γ".into(), term: 1, at: k }));
    }
    let v = if alpha.re < 0.5 {
        // Γ(α)Γ(1-α) = π / sin(πα)
        let s = (alpha * PI).sin();
        Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_right(Complex64::new(1.0, 0.0) - alpha)
    } else {
        ln_gamma_right(alpha)
    };
    Ok(Complex64::new(v.re, wrap_phase(v.im)))
}

pub fn gamma(alpha: Complex64) -> Result<Complex64> {
    Ok(log_gamma(alpha)?.exp())
}

/// `1/Γ(α)`, entire; zero at the poles of Γ.
pub fn recip_gamma(alpha: Complex64) -> Complex64 {
    match log_gamma(alpha) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// Real `log Γ(x)` for `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma_right(Complex64::new(x, 0.0)).re
}

/// `log(π^{n(n-1)/4} ∏_{j=1}^n Γ(a - (j-1)/2))`, the multivariate gamma of
/// the Wishart normalization.
pub fn log_multivariate_gamma(n: usize, a: f64) -> f64 {
    let nf = n as f64;
    0.25 * nf * (nf - 1.0) * PI.ln() + (0..n).map(|j| ln_gamma_real(a - 0.5 * j as f64)).sum::<f64>()
}

/// `Γ_k(α) = ∏_{j=1}^k Γ(α - (j-1)/2)`; `Γ_0 = 1`.
pub fn multi_gamma(k: usize, alpha: Complex64) -> Result<Complex64> {
    multi_gamma_named(k, alpha, "Γ_k(α)")
}

fn multi_gamma_named(k: usize, alpha: Complex64, name: &str) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 1..=k {
        let arg = alpha - 0.5 * (j - 1) as f64;
        match log_gamma(arg) {
            Ok(l) => acc += l,
            Err(Error::Pole(p)) => return Err(Error::Pole(Pole { factor: name.to_string(), term: j, at: p.at })),
            Err(e) => return Err(e),
        }
    }
    Ok(acc.exp())
}

/// `1/Γ_k(α)`, entire.
pub fn recip_multi_gamma(k: usize, alpha: Complex64) -> Complex64 {
    (1..=k).map(|j| recip_gamma(alpha - 0.5 * (j - 1) as f64)).product()
}

/// The four multi-gamma factors of `Γ_Ω̃(s)` as `(name, rank, argument)`.
pub fn gamma_tilde_factors(n: usize, d: usize, s: ComplexPair) -> [(&'static str, usize, Complex64); 4] {
    let (nf, df) = (n as f64, d as f64);
    [
        ("Γ_d(s1 + (d+1)/2)", d, s.s1 + 0.5 * (df + 1.0)),
        ("Γ_d(s2 + (d+1)/2)", d, s.s2 + 0.5 * (df + 1.0)),
        ("Γ_d(s2 + n/2)", d, s.s2 + 0.5 * nf),
        ("Γ_{n-d}(s1 + s2 + (n+1)/2)", n - d, s.s1 + s.s2 + 0.5 * (nf + 1.0)),
    ]
}

/// `Γ_Ω̃(s) = Γ_d(s1+(d+1)/2) Γ_d(s2+(d+1)/2) Γ_d(s2+n/2) Γ_{n-d}(s1+s2+(n+1)/2)`.
pub fn gamma_tilde_omega(n: usize, d: usize, s: ComplexPair) -> Result<Complex64> {
    check_dims(n, d)?;
    let mut acc = Complex64::new(1.0, 0.0);
    for (name, k, arg) in gamma_tilde_factors(n, d, s) {
        acc *= multi_gamma_named(k, arg, name)?;
    }
    Ok(acc)
}

/// `1/Γ_Ω̃(s)`, entire.
pub fn recip_gamma_tilde_omega(n: usize, d: usize, s: ComplexPair) -> Complex64 {
    gamma_tilde_factors(n, d, s).iter().map(|&(_, k, a)| recip_multi_gamma(k, a)).product()
}

/// All poles of `Γ_Ω̃` at `s`, reported structurally.
pub fn gamma_tilde_poles(n: usize, d: usize, s: ComplexPair) -> Vec<Pole> {
    let mut out = Vec::new();
    for (name, k, arg) in gamma_tilde_factors(n, d, s) {
        for j in 1..=k {
            if let Some(at) = gamma_pole(arg - 0.5 * (j - 1) as f64) {
                out.push(Pole { factor: name.to_string(), term: j, at });
            }
        }
    }
    out
}

/// Gindikin-type gamma constant
/// `γ(α,β) = (2π)^{n(n-1)/4} Γ_d(α+β+(n+1)/2) Γ_{n-d}(α+(n-d+1)/2)`.
pub fn gindikin_gamma(n: usize, d: usize, alpha: Complex64, beta: Complex64) -> Result<Complex64> {
    check_dims(n, d)?;
    let (nf, df) = (n as f64, d as f64);
    let pre = (2.0 * PI).powf(0.25 * nf * (nf - 1.0));
    let a = multi_gamma_named(d, alpha + beta + 0.5 * (nf + 1.0), "Γ_d(α+β+(n+1)/2)")?;
    let b = multi_gamma_named(n - d, alpha + 0.5 * (nf - df + 1.0), "Γ_{n-d}(α+(n-d+1)/2)")?;
    Ok(a * b * pre)
}

/// `base^exponent` for a positive real base.
pub fn real_pow(base: f64, exponent: Complex64) -> Complex64 {
    (exponent * base.ln()).exp()
}

/// `c(s) = (2π)^{n(n-1)/4} π^{-2d(s2 + n/4)}`.
pub fn c_factor(n: usize, d: usize, s: ComplexPair) -> Complex64 {
    let (nf, df) = (n as f64, d as f64);
    real_pow(2.0 * PI, Complex64::new(0.25 * nf * (nf - 1.0), 0.0)) * real_pow(PI, -(s.s2 + 0.25 * nf) * (2.0 * df))
}

/// `u_ρ(s) = (2π)^{n s1 + (n-d) s2} exp((πi/2)((p-q)(s1+s2) - (p'-q') s2))`.
pub fn u_rho(n: usize, d: usize, rho: OrbitParam, s: ComplexPair) -> Result<Complex64> {
    rho.validate(n, d)?;
    let (nf, df) = (n as f64, d as f64);
    let modulus = real_pow(2.0 * PI, s.s1 * nf + s.s2 * (nf - df));
    let pq = rho.p as f64 - rho.q as f64;
    let pq2 = rho.p2 as f64 - rho.q2 as f64;
    let phase = ((s.s1 + s.s2) * pq - s.s2 * pq2) * Complex64::new(0.0, 0.5 * PI);
    Ok(modulus * phase.exp())
}

/// Which of the two displayed expressions of the corollary prefactor to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrefactorForm {
    Gamma,
    Sine,
}

/// `(-2πi)^{-(n s1 + (n-d) s2 + n(n+1)/2)}` on the principal branch.
pub fn minus_two_pi_i_power(n: usize, d: usize, s: ComplexPair) -> Complex64 {
    let (nf, df) = (n as f64, d as f64);
    let e = s.s1 * nf + s.s2 * (nf - df) + 0.5 * nf * (nf + 1.0);
    let log_base = Complex64::new(0.0, -2.0 * PI).ln();
    (-e * log_base).exp()
}

/// Prefactor of the functional equation for test functions supported in the
/// closed cone. The sine form uses `sin(π(s2 + (d-j)/2))`.
pub fn corollary_prefactor(n: usize, d: usize, s: ComplexPair, form: PrefactorForm) -> Result<Complex64> {
    check_dims(n, d)?;
    let df = d as f64;
    let head = c_factor(n, d, s) * minus_two_pi_i_power(n, d, s);
    Ok(match form {
        PrefactorForm::Gamma => {
            head * recip_multi_gamma(d, s.s2 + 0.5 * (df + 1.0)) * recip_multi_gamma(d, -s.s2)
        }
        PrefactorForm::Sine => {
            let prod: Complex64 = (1..=d).map(|j| ((s.s2 + 0.5 * (df - j as f64)) * PI).sin()).product();
            head * prod / (-PI).powi(d as i32)
        }
    })
}

fn check_dims(n: usize, d: usize) -> Result<()> {
    if d > n {
        return Err(Error::DimensionOrder { n, d });
    }
    Ok(())
}

//! Test functions on `W = Sym_n(R) ⊕ M_{n,d}(R)` with closed-form Fourier
//! transforms and exact derivatives.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::linalg::EnhancedPoint;
use crate::polyalg::{Coordinates, DiffOperator};

/// Weight of coordinate `k` in `⟨z̃, w̃⟩ = Σ_k weight_k z_k w_k`: `2` for
/// off-diagonal `z_ij`, `1` otherwise.
pub fn pairing_weights(n: usize, d: usize) -> Vec<f64> {
    let coords = Coordinates::new(n, d);
    (0..coords.len()).map(|k| if coords.is_off_diagonal(k) { 2.0 } else { 1.0 }).collect()
}

/// `φ(z, y) = exp(-a_z Tr (z - c_z)² - a_y Tr ᵗ(y - c_y)(y - c_y))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianTestFn {
    pub n: usize,
    pub d: usize,
    pub az: f64,
    pub ay: f64,
    pub center: Option<Vec<f64>>,
}

impl GaussianTestFn {
    pub fn new(n: usize, d: usize, az: f64, ay: f64) -> Self {
        Self { n, d, az, ay, center: None }
    }

    /// `e^{-π(Tr z² + Tr ᵗy y)}`, its own Fourier transform up to `2^{-n(n-1)/4}`.
    pub fn standard(n: usize, d: usize) -> Self {
        Self::new(n, d, PI, PI)
    }

    pub fn with_center(mut self, center: &EnhancedPoint) -> Self {
        self.center = Some(center.coordinates());
        self
    }

    pub fn to_modulated(&self) -> ModulatedGaussian {
        let len = Coordinates::new(self.n, self.d).len();
        let nsym = self.n * (self.n + 1) / 2;
        ModulatedGaussian {
            n: self.n,
            d: self.d,
            amplitude: Complex64::new(1.0, 0.0),
            a: (0..len).map(|k| if k < nsym { self.az } else { self.ay }).collect(),
            center: self.center.clone().unwrap_or_else(|| vec![0.0; len]),
            freq: vec![0.0; len],
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.to_modulated().eval(x).re
    }

    /// `∫_W φ` in Lebesgue measure `∏ dz_ij ∏ dy_ab`.
    pub fn integral(&self) -> f64 {
        self.to_modulated().fourier().eval(&vec![0.0; self.to_modulated().a.len()]).re
    }
}

/// `A · exp(-Σ_k a_k ω_k (x_k - c_k)²) · exp(-2πi Σ_k ω_k f_k x_k)` with
/// `ω` the pairing weights; closed under the Fourier transform.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulatedGaussian {
    pub n: usize,
    pub d: usize,
    pub amplitude: Complex64,
    pub a: Vec<f64>,
    pub center: Vec<f64>,
    pub freq: Vec<f64>,
}

impl ModulatedGaussian {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Exponent `-Σ a ω (x - c)² - 2πi Σ ω f x`.
    pub fn exponent(&self, x: &[f64]) -> Complex64 {
        let w = pairing_weights(self.n, self.d);
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..self.len() {
            let t = x[k] - self.center[k];
            re -= self.a[k] * w[k] * t * t;
            im -= 2.0 * PI * w[k] * self.freq[k] * x[k];
        }
        Complex64::new(re, im)
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.amplitude * self.exponent(x).exp()
    }

    /// `φ̂(w̃) = ∫_W φ(z̃) e^{-2πi⟨z̃, w̃⟩} dz̃` in Lebesgue measure.
    pub fn fourier(&self) -> ModulatedGaussian {
        let w = pairing_weights(self.n, self.d);
        let mut amp = self.amplitude;
        let mut phase = 0.0;
        for k in 0..self.len() {
            amp *= (PI / (self.a[k] * w[k])).sqrt();
            phase -= 2.0 * PI * w[k] * self.center[k] * self.freq[k];
        }
        ModulatedGaussian {
            n: self.n,
            d: self.d,
            amplitude: amp * Complex64::from_polar(1.0, phase),
            a: self.a.iter().map(|a| PI * PI / a).collect(),
            center: self.freq.iter().map(|f| -f).collect(),
            freq: self.center.clone(),
        }
    }

    /// `ψ ↦ 2^{-n(n-1)/2} ∫ ψ(w̃) e^{2πi⟨w̃, z̃⟩} dw̃`, evaluated at `x`.
    pub fn inverse_fourier_at(&self, x: &[f64]) -> Complex64 {
        let minus: Vec<f64> = x.iter().map(|v| -v).collect();
        let nf = self.n as f64;
        self.fourier().eval(&minus) * 2f64.powf(0.5 * nf * (nf - 1.0))
    }

    pub fn as_poly(&self) -> PolyGaussian {
        PolyGaussian { gauss: self.clone(), poly: FloatPoly::constant(self.len(), Complex64::new(1.0, 0.0)) }
    }
}

/// Sparse polynomial with complex coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FloatPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u16>, Complex64>,
}

impl FloatPoly {
    pub fn constant(nvars: usize, c: Complex64) -> Self {
        Self { nvars, terms: BTreeMap::from([(vec![0; nvars], c)]) }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    fn add_term(&mut self, exps: Vec<u16>, c: Complex64) {
        let e = self.terms.entry(exps).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().map(|&k| k as u32).sum()).max().unwrap_or(0)
    }
}

/// `p(x) · G(x)` with `p` a polynomial and `G` a [`ModulatedGaussian`].
#[derive(Clone, Debug, PartialEq)]
pub struct PolyGaussian {
    pub gauss: ModulatedGaussian,
    pub poly: FloatPoly,
}

impl PolyGaussian {
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.poly.eval(x) * self.gauss.eval(x)
    }

    /// `∂/∂x_k`, using `∂_k G = -(2 a_k ω_k (x_k - c_k) + 2πi ω_k f_k) G`.
    pub fn partial(&self, k: usize) -> PolyGaussian {
        let w = pairing_weights(self.gauss.n, self.gauss.d)[k];
        let slope = 2.0 * self.gauss.a[k] * w;
        let shift = Complex64::new(-slope * self.gauss.center[k], 2.0 * PI * w * self.gauss.freq[k]);
        let mut out = FloatPoly { nvars: self.poly.nvars, terms: BTreeMap::new() };
        for (e, c) in &self.poly.terms {
            if e[k] > 0 {
                let mut de = e.clone();
                de[k] -= 1;
                out.add_term(de, c * e[k] as f64);
            }
            let mut up = e.clone();
            up[k] += 1;
            out.add_term(up, -c * slope);
            out.add_term(e.clone(), -c * shift);
        }
        out.terms.retain(|_, c| c.norm() != 0.0);
        PolyGaussian { gauss: self.gauss.clone(), poly: out }
    }

    /// `D(-∂) f` for a constant-coefficient operator `D` on the first
    /// `D.nvars()` coordinates.
    pub fn apply_reflected(&self, op: &DiffOperator) -> PolyGaussian {
        let mut cache: BTreeMap<Vec<u16>, PolyGaussian> = BTreeMap::new();
        let mut acc = FloatPoly { nvars: self.poly.nvars, terms: BTreeMap::new() };
        for (exps, coef) in op.terms() {
            let deriv = derivative(self, exps, &mut cache);
            let order: u32 = exps.iter().map(|&e| e as u32).sum();
            let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
            let c = coef.to_f64().expect("finite coefficient") * sign;
            for (e, v) in deriv.poly.terms {
                acc.add_term(e, v * c);
            }
        }
        acc.terms.retain(|_, c| c.norm() != 0.0);
        PolyGaussian { gauss: self.gauss.clone(), poly: acc }
    }
}

fn derivative(f: &PolyGaussian, exps: &[u16], cache: &mut BTreeMap<Vec<u16>, PolyGaussian>) -> PolyGaussian {
    let mut key: Vec<u16> = vec![0; f.poly.nvars];
    key[..exps.len()].copy_from_slice(exps);
    if let Some(v) = cache.get(&key) {
        return v.clone();
    }
    let out = match key.iter().position(|&e| e > 0) {
        None => f.clone(),
        Some(k) => {
            let mut lower = key.clone();
            lower[k] -= 1;
            derivative(f, &lower, cache).partial(k)
        }
    };
    cache.insert(key, out.clone());
    out
}

/// `σ(t)`: smooth, `0` on `(-∞, 0]`, `1` on `[1, ∞)`.
pub fn smooth_step(t: f64) -> f64 {
    fn g(t: f64) -> f64 {
        if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() }
    }
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        g(t) / (g(t) + g(1.0 - t))
    }
}

/// A Gaussian tapered to vanish near the boundary of the closed cone:
/// `φ(z, y) = base(z, y) σ(λ_min(z)/m) σ(s_min(y)/m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeCutoffFn {
    pub base: GaussianTestFn,
    pub margin: f64,
}

impl ConeCutoffFn {
    pub fn new(base: GaussianTestFn, margin: f64) -> Self {
        Self { base, margin }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let p = EnhancedPoint::from_coordinates(self.base.n, self.base.d, x);
        let lmin = p.z.eigenvalues()[0];
        let smin = p.y.gram().eigenvalues()[0].max(0.0).sqrt();
        let taper = smooth_step(lmin / self.margin) * smooth_step(smin / self.margin);
        if taper == 0.0 { 0.0 } else { taper * self.base.eval(x) }
    }

    /// The `z` and `y` factors for `n = d = 1`, where the function is a product.
    pub fn factors_1d(&self) -> (impl Fn(f64) -> f64 + '_, impl Fn(f64) -> f64 + '_) {
        assert!(self.base.n == 1 && self.base.d == 1);
        let c = self.base.center.clone().unwrap_or_else(|| vec![0.0, 0.0]);
        let (cz, cy) = (c[0], c[1]);
        let fz = move |z: f64| smooth_step(z / self.margin) * (-self.base.az * (z - cz) * (z - cz)).exp();
        let fy = move |y: f64| smooth_step(y.abs() / self.margin) * (-self.base.ay * (y - cy) * (y - cy)).exp();
        (fz, fy)
    }
}

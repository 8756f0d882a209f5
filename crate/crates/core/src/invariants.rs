//! The relative invariants `P1`, `P2` and the open-orbit classification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::linalg::{group_action, signature, signature_with_zero, EnhancedPoint, GroupElement, RectMatrix, SquareMatrix, SymMatrix};
use crate::report::CheckRecord;

/// Open-orbit label `ρ = (p, q; p', q')`: signature of `z` and of `ᵗy z⁻¹ y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrbitParam {
    pub p: usize,
    pub q: usize,
    /// `p'`
    pub p2: usize,
    /// `q'`
    pub q2: usize,
}

/// The zeta exponents `s = (s1, s2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair {
    pub s1: Complex64,
    pub s2: Complex64,
}

impl ComplexPair {
    pub fn new(s1: Complex64, s2: Complex64) -> Self {
        Self { s1, s2 }
    }

    pub fn real(s1: f64, s2: f64) -> Self {
        Self { s1: Complex64::new(s1, 0.0), s2: Complex64::new(s2, 0.0) }
    }

    /// The reflected parameter `-s - ½(d+1, n)`.
    pub fn reflect(self, n: usize, d: usize) -> Self {
        Self { s1: -self.s1 - 0.5 * (d as f64 + 1.0), s2: -self.s2 - 0.5 * n as f64 }
    }
}

impl OrbitParam {
    /// `(n, 0; d, 0)`, the enhanced positive cone.
    pub fn cone(n: usize, d: usize) -> Self {
        Self { p: n, q: 0, p2: d, q2: 0 }
    }

    pub fn validate(&self, n: usize, d: usize) -> Result<()> {
        let ok = self.p + self.q == n && self.p2 + self.q2 == d && self.p2 <= self.p && self.q2 <= self.q;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidOrbit(format!("{self} is not an open-orbit label for n={n}, d={d}")))
        }
    }

    /// `(q, p; q', p')`, the label of the image under `z ↦ -z`.
    pub fn flipped(&self) -> Self {
        Self { p: self.q, q: self.p, p2: self.q2, q2: self.p2 }
    }

    /// The representative `(diag(1_p, -1_q), y0)` with `ᵗy0 z0⁻¹ y0 = diag(1_{p'}, -1_{q'})`.
    pub fn representative(&self) -> EnhancedPoint {
        let n = self.p + self.q;
        let d = self.p2 + self.q2;
        let mut diag = vec![1.0; self.p];
        diag.extend(std::iter::repeat(-1.0).take(self.q));
        let y = RectMatrix::from_fn(n, d, |i, a| {
            let row = if a < self.p2 { a } else { n - self.q2 + (a - self.p2) };
            if i == row { 1.0 } else { 0.0 }
        });
        EnhancedPoint { z: SymMatrix::diag(&diag), y }
    }

    /// Sign of `P1` on the orbit: `(-1)^q`.
    pub fn sign_p1(&self) -> f64 {
        if self.q % 2 == 0 { 1.0 } else { -1.0 }
    }

    /// Sign of `P2` on the orbit: `(-1)^{q+q'}`.
    pub fn sign_p2(&self) -> f64 {
        if (self.q + self.q2) % 2 == 0 { 1.0 } else { -1.0 }
    }
}

impl std::fmt::Display for OrbitParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{};{},{})", self.p, self.q, self.p2, self.q2)
    }
}

/// `P1(z, y) = det z`.
pub fn p1(p: &EnhancedPoint) -> f64 {
    p.z.determinant()
}

/// `(n+d)×(n+d)` bordered matrix `[[z, y], [ᵗy, 0]]`.
pub fn bordered(p: &EnhancedPoint) -> SquareMatrix {
    let (n, d) = (p.n(), p.d());
    SquareMatrix::from_fn(n + d, |i, j| match (i < n, j < n) {
        (true, true) => p.z.get(i, j),
        (true, false) => p.y.get(i, j - n),
        (false, true) => p.y.get(j, i - n),
        (false, false) => 0.0,
    })
}

/// `P2(z, y) = (-1)^d det [[z, y], [ᵗy, 0]]`.
pub fn p2(p: &EnhancedPoint) -> f64 {
    let sign = if p.d() % 2 == 0 { 1.0 } else { -1.0 };
    sign * bordered(p).determinant()
}

/// `ᵗy z⁻¹ y`, via a linear solve against `z`.
pub fn y_quadratic(p: &EnhancedPoint) -> Result<SymMatrix> {
    let x = p.z.as_square().solve(&p.y).ok_or_else(|| {
        let (sig, zero) = signature_with_zero(&p.z);
        Error::Singular { p: sig.p, q: sig.q, zero }
    })?;
    let (n, d) = (p.n(), p.d());
    Ok(SymMatrix::from_fn(d, |a, b| {
        let ab: f64 = (0..n).map(|i| p.y.get(i, a) * x.get(i, b)).sum();
        let ba: f64 = (0..n).map(|i| p.y.get(i, b) * x.get(i, a)).sum();
        0.5 * (ab + ba)
    }))
}

/// `P2 = det z · det(ᵗy z⁻¹ y)` for regular `z`.
pub fn p2_via_inverse(p: &EnhancedPoint) -> Result<f64> {
    signature(&p.z)?;
    Ok(p.z.determinant() * y_quadratic(p)?.determinant())
}

/// Open orbit containing `p`, or `NotOpen` if `z` or `ᵗy z⁻¹ y` is singular.
pub fn classify_orbit(p: &EnhancedPoint) -> Result<OrbitParam> {
    let sz = signature(&p.z).map_err(|e| Error::NotOpen(format!("z is singular: {e}")))?;
    let q = y_quadratic(p).map_err(|e| Error::NotOpen(e.to_string()))?;
    let sy = signature(&q).map_err(|e| Error::NotOpen(format!("ᵗy z⁻¹ y is singular: {e}")))?;
    Ok(OrbitParam { p: sz.p, q: sz.q, p2: sy.p, q2: sy.q })
}

/// All `(p,q;p',q')` with `p+q=n`, `p'+q'=d`, `p'<=p`, `q'<=q`, ordered by
/// decreasing `p` and then decreasing `p'`.
pub fn enumerate_orbits(n: usize, d: usize) -> Result<Vec<OrbitParam>> {
    if d > n {
        return Err(Error::DimensionOrder { n, d });
    }
    let mut out = Vec::new();
    for p in (0..=n).rev() {
        let q = n - p;
        for p2 in (0..=d.min(p)).rev() {
            let q2 = d - p2;
            if q2 <= q {
                out.push(OrbitParam { p, q, p2, q2 });
            }
        }
    }
    Ok(out)
}

/// Samples uniform points of `[-1,1]^dim W`, classifies the regular ones and
/// applies random group elements to each orbit representative.
///
/// Points whose classification is refused as too close to the singular set
/// are skipped and counted in the parameters.
pub fn orbit_machinery_check(n: usize, d: usize, samples: usize, actions: usize, seed: u64) -> Result<Vec<CheckRecord>> {
    let orbits = enumerate_orbits(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = n * (n + 1) / 2 + n * d;
    let mut hits = vec![0usize; orbits.len()];
    let (mut stray, mut refused) = (0usize, 0usize);
    for _ in 0..samples {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        match classify_orbit(&EnhancedPoint::from_coordinates(n, d, &x)) {
            Ok(rho) => match orbits.iter().position(|o| *o == rho) {
                Some(k) => hits[k] += 1,
                None => stray += 1,
            },
            Err(_) => refused += 1,
        }
    }
    let tag = format!("n{n}d{d}");
    let anchor = "open orbits classified by the signatures of z and ᵗy z⁻¹ y";
    let counts: serde_json::Map<String, serde_json::Value> = orbits.iter().zip(&hits).map(|(o, h)| (o.to_string(), json!(h))).collect();
    let params = json!({"n": n, "d": d, "samples": samples, "seed": seed, "refused": refused, "hits": counts});
    let mut out = vec![
        CheckRecord::flag(format!("orbits/{tag}/sampling"), anchor, params.clone(), stray == 0)
            .with_note(format!("{} of {samples} samples classified, {stray} outside the enumeration", samples - refused - stray)),
        CheckRecord::flag(format!("orbits/{tag}/coverage"), anchor, params, hits.iter().all(|&h| h > 0))
            .with_note(format!("{} of {} orbits hit", hits.iter().filter(|&&h| h > 0).count(), orbits.len())),
    ];
    for rho in &orbits {
        let rep = rho.representative();
        let mut moved_ok = 0usize;
        for _ in 0..actions {
            let el = GroupElement::random(n, d, &mut rng);
            if group_action(&el, &rep).and_then(|p| classify_orbit(&p)).map(|r| r == *rho).unwrap_or(false) {
                moved_ok += 1;
            }
        }
        out.push(
            CheckRecord::flag(
                format!("orbits/{tag}/action/{rho}"),
                "orbit classification is invariant under the group action",
                json!({"n": n, "d": d, "orbit": rho.to_string(), "actions": actions, "seed": seed}),
                moved_ok == actions,
            )
            .with_note(format!("{moved_ok} of {actions} images keep the label")),
        );
    }
    Ok(out)
}

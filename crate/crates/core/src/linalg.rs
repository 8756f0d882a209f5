//! Dense real linear algebra on `Sym_n(R)` and `M_{n,d}(R)`.
//!
//! Everything here is small and dense (n <= 8). Matrices are stored row-major.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative band inside which an eigenvalue counts as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Real symmetric n×n matrix, stored densely and symmetrized on construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Real n×d matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectMatrix {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

/// A point `(z, y)` of `W = Sym_n ⊕ M_{n,d}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnhancedPoint {
    pub z: SymMatrix,
    pub y: RectMatrix,
}

/// Inertia `(p, q)`: number of positive and negative eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

/// Square dense matrix used for group elements and factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Element `(g, h)` of `GL_n(R) × GL_d(R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub g: SquareMatrix,
    pub h: SquareMatrix,
}

impl SymMatrix {
    /// Builds from a full row-major array, averaging `a[i][j]` and `a[j][i]`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("symmetric matrix rows must be square".into()));
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| 0.0)
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// Builds from the independent coordinates `z_ij`, `i <= j`, in row order.
    pub fn from_upper(n: usize, upper: &[f64]) -> Self {
        assert_eq!(upper.len(), n * (n + 1) / 2);
        let mut it = upper.iter();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = *it.next().unwrap();
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    /// Independent coordinates `z_ij`, `i <= j`, in row order.
    pub fn upper(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n + 1) / 2);
        for i in 0..self.n {
            for j in i..self.n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| c * v).collect() }
    }

    pub fn add(&self, other: &SymMatrix) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn as_square(&self) -> SquareMatrix {
        SquareMatrix { n: self.n, data: self.data.clone() }
    }

    /// `Tr(z^2) = Σ z_ii^2 + 2 Σ_{i<j} z_ij^2`.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn determinant(&self) -> f64 {
        self.as_square().determinant()
    }

    /// `g z gᵀ`.
    pub fn congruence(&self, g: &SquareMatrix) -> Self {
        assert_eq!(g.n, self.n);
        let gz = g.matmul(&self.as_square());
        let n = self.n;
        Self::from_fn(n, |i, j| (0..n).map(|k| gz.get(i, k) * g.get(j, k)).sum())
    }

    /// Eigenvalues in ascending order (cyclic Jacobi).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = self.data.clone();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j] * a[i * n + j])
                .sum();
            let scale: f64 = a.iter().map(|v| v * v).sum();
            if off <= 1e-30 * scale || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ev
    }

    /// Lower-triangular Cholesky factor `L` with `z = L Lᵀ`.
    pub fn cholesky(&self) -> Option<SquareMatrix> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut diag = self.get(j, j);
            for k in 0..j {
                diag -= l[j * n + k] * l[j * n + k];
            }
            if !(diag > 0.0) {
                return None;
            }
            let ljj = diag.sqrt();
            l[j * n + j] = ljj;
            for i in (j + 1)..n {
                let mut v = self.get(i, j);
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = v / ljj;
            }
        }
        Some(SquareMatrix { n, data: l })
    }
}

impl RectMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Self { n, d, data: rows.iter().flatten().copied().collect() })
    }

    pub fn from_fn(n: usize, d: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * d);
        for i in 0..n {
            for j in 0..d {
                data.push(f(i, j));
            }
        }
        Self { n, d, data }
    }

    pub fn from_vec(n: usize, d: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * d);
        Self { n, d, data }
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Self { n, d, data: vec![0.0; n * d] }
    }

    /// `𝕀_d = (1_d; 0)`.
    pub fn standard(n: usize, d: usize) -> Self {
        Self::from_fn(n, d, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `ᵗy y`.
    pub fn gram(&self) -> SymMatrix {
        SymMatrix::from_fn(self.d, |a, b| (0..self.n).map(|i| self.get(i, a) * self.get(i, b)).sum())
    }

    /// `ᵗy z y`.
    pub fn quadratic(&self, z: &SymMatrix) -> SymMatrix {
        assert_eq!(z.n(), self.n);
        let n = self.n;
        SymMatrix::from_fn(self.d, |a, b| {
            let mut acc = 0.0;
            for i in 0..n {
                let yia = self.get(i, a);
                if yia == 0.0 {
                    continue;
                }
                for j in 0..n {
                    acc += yia * z.get(i, j) * self.get(j, b);
                }
            }
            acc
        })
    }

    /// `g y ᵗh`.
    pub fn transform(&self, g: &SquareMatrix, h: &SquareMatrix) -> Self {
        assert_eq!(g.n, self.n);
        assert_eq!(h.n, self.d);
        let gy = Self::from_fn(self.n, self.d, |i, b| (0..self.n).map(|k| g.get(i, k) * self.get(k, b)).sum());
        Self::from_fn(self.n, self.d, |i, b| (0..self.d).map(|k| gy.get(i, k) * h.get(b, k)).sum())
    }
}

impl SquareMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("square matrix rows must have length n".into()));
        }
        Ok(Self { n, data: rows.iter().flatten().copied().collect() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &SquareMatrix) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        Self::from_fn(n, |i, j| (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum())
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.n).all(|i| ((i + 1)..self.n).all(|j| self.get(i, j) == 0.0))
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[x * n + col].abs().partial_cmp(&a[y * n + col].abs()).unwrap())
                .unwrap();
            if a[piv * n + col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                for k in 0..n {
                    a.swap(col * n + k, piv * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in (col + 1)..n {
                let f = a[r * n + col] / p;
                if f != 0.0 {
                    for k in col..n {
                        a[r * n + k] -= f * a[col * n + k];
                    }
                }
            }
        }
        det
    }

    /// Solves `self · X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &RectMatrix) -> Option<RectMatrix> {
        let n = self.n;
        assert_eq!(rhs.n, n);
        let m = rhs.d;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[x * n + col].abs().partial_cmp(&a[y * n + col].abs()).unwrap())
                .unwrap();
            if a[piv * n + col].abs() <= RANK_TOL * scale * 1e-3 {
                return None;
            }
            if piv != col {
                for k in 0..n {
                    a.swap(col * n + k, piv * n + k);
                }
                for k in 0..m {
                    b.swap(col * m + k, piv * m + k);
                }
            }
            let p = a[col * n + col];
            for r in (col + 1)..n {
                let f = a[r * n + col] / p;
                if f != 0.0 {
                    for k in col..n {
                        a[r * n + k] -= f * a[col * n + k];
                    }
                    for k in 0..m {
                        b[r * m + k] -= f * b[col * m + k];
                    }
                }
            }
        }
        for col in (0..n).rev() {
            let p = a[col * n + col];
            for k in 0..m {
                let mut v = b[col * m + k];
                for j in (col + 1)..n {
                    v -= a[col * n + j] * b[j * m + k];
                }
                b[col * m + k] = v / p;
            }
        }
        Some(RectMatrix { n, d: m, data: b })
    }
}

impl EnhancedPoint {
    pub fn new(z: SymMatrix, y: RectMatrix) -> Result<Self> {
        if z.n() != y.n() {
            return Err(Error::Shape(format!("z is {}×{} but y has {} rows", z.n(), z.n(), y.n())));
        }
        Ok(Self { z, y })
    }

    /// `(1_n, 𝕀_d)`, the base point of the enhanced positive cone.
    pub fn base(n: usize, d: usize) -> Self {
        Self { z: SymMatrix::identity(n), y: RectMatrix::standard(n, d) }
    }

    pub fn n(&self) -> usize {
        self.z.n()
    }

    pub fn d(&self) -> usize {
        self.y.d()
    }

    /// Independent real coordinates: `z_ij (i <= j)` followed by `y_ab`.
    pub fn coordinates(&self) -> Vec<f64> {
        let mut c = self.z.upper();
        c.extend_from_slice(self.y.entries());
        c
    }

    pub fn from_coordinates(n: usize, d: usize, coords: &[f64]) -> Self {
        let m = n * (n + 1) / 2;
        Self { z: SymMatrix::from_upper(n, &coords[..m]), y: RectMatrix::from_vec(n, d, coords[m..].to_vec()) }
    }
}

impl GroupElement {
    pub fn new(g: SquareMatrix, h: SquareMatrix) -> Result<Self> {
        if g.determinant().abs() == 0.0 || h.determinant().abs() == 0.0 {
            return Err(Error::Shape("group element must be invertible".into()));
        }
        Ok(Self { g, h })
    }

    pub fn identity(n: usize, d: usize) -> Self {
        Self { g: SquareMatrix::identity(n), h: SquareMatrix::identity(d) }
    }

    pub fn compose(&self, other: &GroupElement) -> Self {
        Self { g: self.g.matmul(&other.g), h: self.h.matmul(&other.h) }
    }

    /// Random element with entries drawn so that `|det|` stays away from zero.
    pub fn random<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Self {
        let draw = |k: usize, rng: &mut R| loop {
            let m = SquareMatrix::from_fn(k, |i, j| {
                let v: f64 = rng.sample(StandardNormal);
                if i == j { v + 2.0f64.copysign(v) } else { 0.5 * v }
            });
            if m.determinant().abs() > 1e-2 {
                return m;
            }
        };
        let g = draw(n, rng);
        let h = draw(d, rng);
        Self { g, h }
    }
}

/// Inertia of `z`. Refuses when an eigenvalue falls inside the zero band.
pub fn signature(z: &SymMatrix) -> Result<Signature> {
    let (sig, zero) = signature_with_zero(z);
    if zero > 0 {
        return Err(Error::Singular { p: sig.p, q: sig.q, zero });
    }
    Ok(sig)
}

/// Inertia plus the number of eigenvalues inside the zero band.
pub fn signature_with_zero(z: &SymMatrix) -> (Signature, usize) {
    let tol = RANK_TOL * z.max_abs();
    let ev = z.eigenvalues();
    let p = ev.iter().filter(|&&l| l > tol).count();
    let q = ev.iter().filter(|&&l| l < -tol).count();
    (Signature { p, q }, z.n() - p - q)
}

/// Determinant of the top-left k×k block.
pub fn principal_minor(z: &SymMatrix, k: usize) -> Result<f64> {
    if k > z.n() {
        return Err(Error::OutOfRange(format!("minor order {k} exceeds n = {}", z.n())));
    }
    Ok(SquareMatrix::from_fn(k, |i, j| z.get(i, j)).determinant())
}

/// `⟨(z,y),(w,x)⟩ = Tr(zw) + Tr(ᵗy x)`.
pub fn inner_product(a: &EnhancedPoint, b: &EnhancedPoint) -> Result<f64> {
    if a.n() != b.n() || a.d() != b.d() {
        return Err(Error::Shape("inner product of points with different shapes".into()));
    }
    let n = a.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += a.z.get(i, j) * b.z.get(j, i);
        }
    }
    acc += a.y.entries().iter().zip(b.y.entries()).map(|(u, v)| u * v).sum::<f64>();
    Ok(acc)
}

/// Lower-triangular `g` with positive diagonal and `z = ᵗg g`.
pub fn borel_factor(z: &SymMatrix) -> Result<SquareMatrix> {
    let n = z.n();
    // z = ᵗg g with g lower is a Cholesky factorization of the index-reversed matrix.
    let reversed = SymMatrix::from_fn(n, |i, j| z.get(n - 1 - i, n - 1 - j));
    let l = match reversed.cholesky() {
        Some(l) => l,
        None => {
            let (sig, zero) = signature_with_zero(z);
            return Err(Error::NotPositiveDefinite { p: sig.p, q: sig.q, zero });
        }
    };
    // J L J is upper triangular U with z = U ᵗU, so g = ᵗU.
    Ok(SquareMatrix::from_fn(n, |i, j| l.get(n - 1 - j, n - 1 - i)))
}

/// Degrees of freedom used by [`sample_omega`].
pub fn default_wishart_dof(n: usize) -> f64 {
    n as f64 + 1.0
}

/// Draws from the Wishart law `W_n(1_n, dof)` by the Bartlett decomposition.
///
/// Requires `dof > n - 1`.
pub fn sample_wishart<R: Rng + ?Sized>(n: usize, dof: f64, rng: &mut R) -> SymMatrix {
    assert!(dof > n as f64 - 1.0, "Wishart dof must exceed n - 1");
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        let chi = ChiSquared::new(dof - i as f64).expect("positive chi-square dof");
        a[i * n + i] = chi.sample(rng).sqrt();
        for j in 0..i {
            a[i * n + j] = rng.sample(StandardNormal);
        }
    }
    SymMatrix::from_fn(n, |i, j| (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum())
}

/// A point of the cone `Ω = Sym_n^+(R)` drawn from `W_n(1_n, n + 1)`.
pub fn sample_omega<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SymMatrix {
    sample_wishart(n, default_wishart_dof(n), rng)
}

/// Log-density of `W_n(1_n, dof)` with respect to `∏_{i<=j} dz_ij`.
pub fn wishart_log_density(z: &SymMatrix, dof: f64) -> f64 {
    let n = z.n() as f64;
    let det = z.determinant();
    if !(det > 0.0) {
        return f64::NEG_INFINITY;
    }
    0.5 * (dof - n - 1.0) * det.ln() - 0.5 * z.trace() - 0.5 * dof * n * std::f64::consts::LN_2
        - crate::specfun::log_multivariate_gamma(z.n(), 0.5 * dof)
}

/// `(g,h)·(z,y) = (g z ᵗg, g y ᵗh)`.
pub fn group_action(el: &GroupElement, p: &EnhancedPoint) -> Result<EnhancedPoint> {
    if el.g.n() != p.n() || el.h.n() != p.d() {
        return Err(Error::Shape("group element does not match point shape".into()));
    }
    Ok(EnhancedPoint { z: p.z.congruence(&el.g), y: p.y.transform(&el.g, &el.h) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
        SymMatrix::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
    }

    #[test]
    fn signature_basic() {
        assert_eq!(signature(&SymMatrix::identity(2)).unwrap(), Signature { p: 2, q: 0 });
        assert_eq!(signature(&SymMatrix::diag(&[1.0, -1.0])).unwrap(), Signature { p: 1, q: 1 });
        for (p, q) in [(3, 0), (2, 1), (0, 3), (1, 2)] {
            let mut v = vec![1.0; p];
            v.extend(std::iter::repeat(-1.0).take(q));
            assert_eq!(signature(&SymMatrix::diag(&v)).unwrap(), Signature { p, q });
        }
    }

    #[test]
    fn signature_refuses_singular() {
        let z = SymMatrix::diag(&[1.0, 0.0]);
        assert!(matches!(signature(&z), Err(Error::Singular { p: 1, q: 0, zero: 1 })));
        let z = SymMatrix::diag(&[1.0, 1e-13]);
        assert!(signature(&z).is_err());
    }

    #[test]
    fn sylvester_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=4 {
            for _ in 0..100 {
                let z = random_sym(n, &mut rng);
                let Ok(sig) = signature(&z) else { continue };
                let g = GroupElement::random(n, 1, &mut rng).g;
                assert_eq!(signature(&z.congruence(&g)).unwrap(), sig);
            }
        }
    }

    #[test]
    fn minors() {
        assert_eq!(principal_minor(&SymMatrix::identity(3), 2).unwrap(), 1.0);
        let z = SymMatrix::diag(&[2.0, 3.0]);
        assert_eq!(principal_minor(&z, 0).unwrap(), 1.0);
        assert_eq!(principal_minor(&z, 1).unwrap(), 2.0);
        assert!((principal_minor(&z, 2).unwrap() - 6.0).abs() < 1e-15);
        assert!(principal_minor(&z, 3).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let a = EnhancedPoint::base(2, 1);
        assert_eq!(inner_product(&a, &a).unwrap(), 3.0);
        let zero = EnhancedPoint::new(SymMatrix::zeros(2), RectMatrix::zeros(2, 1)).unwrap();
        assert_eq!(inner_product(&a, &zero).unwrap(), 0.0);
        let b = EnhancedPoint::base(3, 1);
        assert!(inner_product(&a, &b).is_err());
    }

    #[test]
    fn inner_product_coordinate_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (n, d) = (3, 2);
            let a = EnhancedPoint::from_coordinates(n, d, &(0..12).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<_>>());
            let b = EnhancedPoint::from_coordinates(n, d, &(0..12).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<_>>());
            let mut hand = 0.0;
            for i in 0..n {
                hand += a.z.get(i, i) * b.z.get(i, i);
                for j in (i + 1)..n {
                    hand += 2.0 * a.z.get(i, j) * b.z.get(i, j);
                }
            }
            hand += a.y.entries().iter().zip(b.y.entries()).map(|(u, v)| u * v).sum::<f64>();
            assert!((inner_product(&a, &b).unwrap() - hand).abs() < 1e-12);
            assert!(inner_product(&a, &a).unwrap() > 0.0);
        }
    }

    #[test]
    fn borel_examples() {
        assert_eq!(borel_factor(&SymMatrix::identity(2)).unwrap(), SquareMatrix::identity(2));
        let g = borel_factor(&SymMatrix::diag(&[4.0, 9.0])).unwrap();
        assert_eq!(g, SquareMatrix::diag(&[2.0, 3.0]));
        assert!(matches!(
            borel_factor(&SymMatrix::diag(&[1.0, -1.0])),
            Err(Error::NotPositiveDefinite { p: 1, q: 1, .. })
        ));
    }

    #[test]
    fn borel_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=6 {
            for _ in 0..50 {
                // Condition number up to ~1e6 through a spread diagonal.
                let q = GroupElement::random(n, 1, &mut rng).g;
                let spread: Vec<f64> = (0..n).map(|i| 10f64.powf(-6.0 * i as f64 / (n.max(2) - 1) as f64)).collect();
                let z = SymMatrix::diag(&spread).congruence(&q);
                let g = borel_factor(&z).unwrap();
                assert!(g.is_lower_triangular());
                assert!((0..n).all(|i| g.get(i, i) > 0.0));
                let back = g.transpose().matmul(&g);
                let err = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| (back.get(i, j) - z.get(i, j)).abs())
                    .fold(0.0, f64::max);
                assert!(err <= 1e-10 * z.max_abs().max(1.0), "n={n} err={err}");
            }
        }
    }

    #[test]
    fn omega_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=4 {
            for _ in 0..200 {
                assert_eq!(signature(&sample_omega(n, &mut rng)).unwrap(), Signature { p: n, q: 0 });
            }
        }
        let a = sample_omega(3, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_omega(3, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn omega_trace_mean() {
        // E Tr W = n·dof, Var Tr W = 2·n·dof for identity scale.
        let n = 3;
        let dof = default_wishart_dof(n);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 100_000;
        let mean = (0..draws).map(|_| sample_omega(n, &mut rng).trace()).sum::<f64>() / draws as f64;
        let sigma = (2.0 * n as f64 * dof / draws as f64).sqrt();
        assert!((mean - n as f64 * dof).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn group_action_examples() {
        let p = EnhancedPoint::base(2, 1);
        assert_eq!(group_action(&GroupElement::identity(2, 1), &p).unwrap(), p);
        let el = GroupElement::new(SquareMatrix::diag(&[2.0, 3.0]), SquareMatrix::diag(&[5.0])).unwrap();
        let q = group_action(&el, &p).unwrap();
        assert_eq!(q.z, SymMatrix::diag(&[4.0, 9.0]));
        assert_eq!(q.y, RectMatrix::from_rows(&[vec![10.0], vec![0.0]]).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = GroupElement::random(3, 2, &mut rng);
        let b = GroupElement::random(3, 2, &mut rng);
        let x = EnhancedPoint::from_coordinates(3, 2, &(0..12).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let lhs = group_action(&a.compose(&b), &x).unwrap();
        let rhs = group_action(&a, &group_action(&b, &x).unwrap()).unwrap();
        for (u, v) in lhs.coordinates().iter().zip(rhs.coordinates()) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}

//! Exact multivariate polynomials over Q in the coordinates of `W`, the dual
//! constant-coefficient operators `P*(∂)`, and exact checks of the two
//! Bernstein-Sato identities.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u16>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Self { degree: 0, exps: vec![0; nvars] }
    }

    pub fn from_exps(exps: Vec<u16>) -> Self {
        Self { degree: exps.iter().map(|&e| e as u32).sum(), exps }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Self { degree: 1, exps }
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            degree: self.degree + other.degree,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial {
            degree: self.degree - other.degree,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Coordinate layout of `W = Sym_n ⊕ M_{n,d}`: `z_ij (i <= j)` in row order,
/// then `y_ab` in row order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coordinates {
    pub n: usize,
    pub d: usize,
}

impl Coordinates {
    pub fn new(n: usize, d: usize) -> Self {
        Self { n, d }
    }

    pub fn n_sym(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn len(&self) -> usize {
        self.n_sym() + self.n * self.d
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of `z_ij` (order of `i, j` irrelevant).
    pub fn z(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // Row i starts at Σ_{k<i} (n - k) = i·n - i(i-1)/2.
        i * self.n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn y(&self, a: usize, b: usize) -> usize {
        self.n_sym() + a * self.d + b
    }

    /// `true` for off-diagonal `z_ij`.
    pub fn is_off_diagonal(&self, var: usize) -> bool {
        var < self.n_sym() && !self.diag_indices().contains(&var)
    }

    fn diag_indices(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.z(i, i)).collect()
    }

    pub fn name(&self, var: usize) -> String {
        if var < self.n_sym() {
            for i in 0..self.n {
                for j in i..self.n {
                    if self.z(i, j) == var {
                        return format!("z{}{}", i + 1, j + 1);
                    }
                }
            }
            unreachable!()
        } else {
            let k = var - self.n_sym();
            format!("y{}{}", k / self.d + 1, k % self.d + 1)
        }
    }
}

/// Exact polynomial over Q; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl RationalPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), Rational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u16>, Rational)>) -> Self {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            *acc.entry(Monomial::from_exps(e)).or_insert_with(Rational::zero) += c;
        }
        Self::from_map(nvars, acc)
    }

    fn from_map(nvars: usize, acc: HashMap<Monomial, Rational>) -> Self {
        Self { nvars, terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u16]) -> Rational {
        self.terms.get(&Monomial::from_exps(exps.to_vec())).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant value if the polynomial has degree <= 0.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|m| m.degree);
        match it.next() {
            None => true,
            Some(d0) => it.all(|d| d == d0),
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.terms.clone();
        for (m, c) in &other.terms {
            let e = out.entry(m.clone()).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                out.remove(m);
            }
        }
        Self { nvars: self.nvars, terms: out }
    }

    pub fn neg(&self) -> Self {
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Self::from_map(self.nvars, acc)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Exact division. Returns `None` if `divisor` does not divide `self`.
    ///
    /// Plain multivariate division by a single polynomial in graded-lex order;
    /// the remainder must vanish.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        assert_eq!(self.nvars, divisor.nvars);
        let (lm, lc) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quotient: HashMap<Monomial, Rational> = HashMap::new();
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let qm = m.div(lm);
            let qc = c / lc;
            let step = Self { nvars: self.nvars, terms: BTreeMap::from([(qm.clone(), qc.clone())]) };
            rem = rem.sub(&step.mul(divisor));
            *quotient.entry(qm).or_insert_with(Rational::zero) += qc;
        }
        Some(Self::from_map(self.nvars, quotient))
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.exps) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                c.to_f64().unwrap() * point.iter().zip(&m.exps).map(|(x, &e)| x.powi(e as i32)).product::<f64>()
            })
            .sum()
    }

    /// Substitutes `x_i ↦ factors[i]·x_i`.
    pub fn scale_vars(&self, factors: &[Rational]) -> Self {
        assert_eq!(factors.len(), self.nvars);
        let terms = self.terms.iter().map(|(m, c)| {
            let mut k = c.clone();
            for (f, &e) in factors.iter().zip(&m.exps) {
                if e > 0 {
                    k *= num_traits::pow(f.clone(), e as usize);
                }
            }
            (m.clone(), k)
        });
        Self { nvars: self.nvars, terms: terms.filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// Embeds into a ring with `total` variables, placing this ring's
    /// variables at `offset..offset + nvars`.
    pub fn embed(&self, offset: usize, total: usize) -> Self {
        assert!(offset + self.nvars <= total);
        let terms = self.terms.iter().map(|(m, c)| {
            let mut exps = vec![0; total];
            exps[offset..offset + self.nvars].copy_from_slice(&m.exps);
            (Monomial::from_exps(exps), c.clone())
        });
        Self { nvars: total, terms: terms.collect() }
    }

    pub fn display_with(&self, coords: &Coordinates) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let a = c.abs();
            let vars: Vec<String> = m
                .exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { coords.name(i) } else { format!("{}^{}", coords.name(i), e) })
                .collect();
            if !a.is_one() || vars.is_empty() {
                out.push_str(&a.to_string());
                if !vars.is_empty() {
                    out.push('*');
                }
            }
            out.push_str(&vars.join("*"));
        }
        out
    }
}

/// Symbolic determinant by the Leibniz expansion; `entry(i, j)` returns the
/// polynomial at position `(i, j)` or `None` for a structural zero.
fn leibniz_det(size: usize, nvars: usize, entry: &dyn Fn(usize, usize) -> Option<RationalPoly>) -> RationalPoly {
    let mut acc: HashMap<Monomial, Rational> = HashMap::new();
    let mut perm: Vec<usize> = (0..size).collect();
    let mut used = vec![false; size];
    fn rec(
        row: usize,
        size: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        partial: RationalPoly,
        entry: &dyn Fn(usize, usize) -> Option<RationalPoly>,
        acc: &mut HashMap<Monomial, Rational>,
    ) {
        if row == size {
            let sign = permutation_sign(perm);
            for (m, c) in partial.terms {
                *acc.entry(m).or_insert_with(Rational::zero) += if sign > 0 { c } else { -c };
            }
            return;
        }
        for col in 0..size {
            if used[col] {
                continue;
            }
            let Some(e) = entry(row, col) else { continue };
            used[col] = true;
            perm[row] = col;
            rec(row + 1, size, perm, used, partial.mul(&e), entry, acc);
            used[col] = false;
        }
    }
    rec(0, size, &mut perm, &mut used, RationalPoly::one(nvars), entry, &mut acc);
    RationalPoly::from_map(nvars, acc)
}

fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// `P1 = det z` as a polynomial in the coordinates of `W` with `d = 0`.
pub fn expand_p1(n: usize) -> Result<RationalPoly> {
    expand_p1_in(Coordinates::new(n, 0))
}

/// `P1 = det z` in the coordinate ring of `(n, d)`.
pub fn expand_p1_in(coords: Coordinates) -> Result<RationalPoly> {
    let n = coords.n;
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    if n > 6 {
        return Err(Error::TooLarge(format!("det of a {n}×{n} symbolic matrix")));
    }
    let nv = coords.len();
    Ok(leibniz_det(n, nv, &|i, j| Some(RationalPoly::var(nv, coords.z(i, j)))))
}

/// `P2 = (-1)^d det [[z, y], [ᵗy, 0]]`; the zero polynomial when `d > n`.
pub fn expand_p2(n: usize, d: usize) -> Result<RationalPoly> {
    if n == 0 || d == 0 {
        return Err(Error::OutOfRange("n and d must be at least 1".into()));
    }
    if n + d > 8 {
        return Err(Error::TooLarge(format!("bordered determinant of size {}", n + d)));
    }
    let coords = Coordinates::new(n, d);
    let nv = coords.len();
    let det = leibniz_det(n + d, nv, &|i, j| match (i < n, j < n) {
        (true, true) => Some(RationalPoly::var(nv, coords.z(i, j))),
        (true, false) => Some(RationalPoly::var(nv, coords.y(i, j - n))),
        (false, true) => Some(RationalPoly::var(nv, coords.y(j, i - n))),
        (false, false) => None,
    });
    Ok(if d % 2 == 0 { det } else { det.neg() })
}

/// Constant-coefficient differential operator `Σ c_α ∂^α` acting on the
/// first `nvars` variables of a ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffOperator {
    pub fn partial(nvars: usize, var: usize, order: u16) -> Self {
        let mut exps = vec![0; nvars];
        exps[var] = order;
        Self { nvars, terms: BTreeMap::from([(Monomial::from_exps(exps), Rational::one())]) }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &Rational)> {
        self.terms.iter().map(|(m, c)| (m.exps.as_slice(), c))
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|m| m.degree).max().unwrap_or(0)
    }
}

/// The operator `P*(∂)` with `P*(∂) e^{⟨z̃, w̃⟩} = P(w̃) e^{⟨z̃, w̃⟩}`
/// for the pairing `Tr zw + Tr ᵗy x`.
///
/// Since `∂/∂z_ij e^{Tr zw} = 2 w_ij e^{Tr zw}` for `i ≠ j`, an off-diagonal
/// `w_ij` becomes `½ ∂/∂z_ij`; diagonal and `x_ab` coordinates map to the
/// plain partials.
pub fn dual_operator(p: &RationalPoly, coords: &Coordinates) -> DiffOperator {
    assert_eq!(p.nvars, coords.len());
    let half = rat(1, 2);
    let off: Vec<bool> = (0..coords.len()).map(|v| coords.is_off_diagonal(v)).collect();
    let terms = p.terms.iter().map(|(m, c)| {
        let mut k = c.clone();
        for (v, &e) in m.exps.iter().enumerate() {
            if off[v] && e > 0 {
                k *= num_traits::pow(half.clone(), e as usize);
            }
        }
        (m.clone(), k)
    });
    DiffOperator { nvars: p.nvars, terms: terms.collect() }
}

/// Applies `op` to `f`; the operator acts on the first `op.nvars()` variables.
pub fn apply(op: &DiffOperator, f: &RationalPoly) -> RationalPoly {
    assert!(op.nvars <= f.nvars);
    let mut acc: HashMap<Monomial, Rational> = HashMap::new();
    for (dm, dc) in &op.terms {
        'term: for (fm, fc) in &f.terms {
            let mut exps = fm.exps.clone();
            let mut k = BigInt::one();
            for (v, &order) in dm.exps.iter().enumerate() {
                let e = exps[v];
                if order > e {
                    continue 'term;
                }
                for t in 0..order {
                    k *= BigInt::from(e - t);
                }
                exps[v] = e - order;
            }
            let c = dc * fc * Rational::from_integer(k);
            *acc.entry(Monomial::from_exps(exps)).or_insert_with(Rational::zero) += c;
        }
    }
    RationalPoly::from_map(f.nvars, acc)
}

/// Linear form `a1·s1 + a2·s2 + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub a1: Rational,
    pub a2: Rational,
    pub c: Rational,
}

impl LinearForm {
    pub fn eval(&self, s1: &Rational, s2: &Rational) -> Rational {
        &self.a1 * s1 + &self.a2 * s2 + &self.c
    }

    fn as_poly(&self) -> RationalPoly {
        RationalPoly::from_terms(
            2,
            [(vec![1, 0], self.a1.clone()), (vec![0, 1], self.a2.clone()), (vec![0, 0], self.c.clone())],
        )
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (a, name) in [(&self.a1, "s1"), (&self.a2, "s2")] {
            if a.is_one() {
                parts.push(name.to_string());
            } else if !a.is_zero() {
                parts.push(format!("{a}*{name}"));
            }
        }
        if !self.c.is_zero() || parts.is_empty() {
            parts.push(self.c.to_string());
        }
        write!(f, "({})", parts.join(" + "))
    }
}

/// A b-function: a product of linear forms in `(s1, s2)` with its exact
/// expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BPolynomial {
    pub factors: Vec<LinearForm>,
    pub expanded: RationalPoly,
}

impl BPolynomial {
    fn from_factors(factors: Vec<LinearForm>) -> Self {
        let expanded = factors.iter().fold(RationalPoly::one(2), |acc, f| acc.mul(&f.as_poly()));
        Self { factors, expanded }
    }

    pub fn eval(&self, s1: &Rational, s2: &Rational) -> Rational {
        self.expanded.eval(&[s1.clone(), s2.clone()])
    }

    /// Coefficient of `s1^i s2^j`.
    pub fn coefficient(&self, i: u16, j: u16) -> Rational {
        self.expanded.coefficient(&[i, j])
    }
}

impl fmt::Display for BPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> = self.factors.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", s.join(""))
    }
}

fn lf(a1: i64, a2: i64, c: Rational) -> LinearForm {
    LinearForm { a1: Rational::from_integer(a1.into()), a2: Rational::from_integer(a2.into()), c }
}

fn half_int(twice: i64) -> Rational {
    rat(twice, 2)
}

fn check_order(n: usize, d: usize) -> Result<()> {
    if d == 0 || n == 0 {
        return Err(Error::OutOfRange("n and d must be at least 1".into()));
    }
    if d > n {
        return Err(Error::DimensionOrder { n, d });
    }
    Ok(())
}

/// `b_{1,0}(s) = ∏_{j=1}^d (s1 + (d+1)/2 - (j-1)/2) ∏_{k=1}^{n-d} (s1 + s2 + (n+1)/2 - (k-1)/2)`.
pub fn b10_formula(n: usize, d: usize) -> Result<BPolynomial> {
    check_order(n, d)?;
    let (n, d) = (n as i64, d as i64);
    let mut f = Vec::new();
    for j in 1..=d {
        f.push(lf(1, 0, half_int(d + 1 - (j - 1))));
    }
    for k in 1..=(n - d) {
        f.push(lf(1, 1, half_int(n + 1 - (k - 1))));
    }
    Ok(BPolynomial::from_factors(f))
}

/// `b_{0,1}(s) = ∏_{j=1}^d (s2 + (d+1)/2 - (j-1)/2)(s2 + n/2 - (j-1)/2) ∏_{k=1}^{n-d} (s1 + s2 + (n+1)/2 - (k-1)/2)`.
pub fn b01_formula(n: usize, d: usize) -> Result<BPolynomial> {
    check_order(n, d)?;
    let (n, d) = (n as i64, d as i64);
    let mut f = Vec::new();
    for j in 1..=d {
        f.push(lf(0, 1, half_int(d + 1 - (j - 1))));
        f.push(lf(0, 1, half_int(n - (j - 1))));
    }
    for k in 1..=(n - d) {
        f.push(lf(1, 1, half_int(n + 1 - (k - 1))));
    }
    Ok(BPolynomial::from_factors(f))
}

/// Which Bernstein-Sato identity: `P1*` raising `s1`, or `P2*` raising `s2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Identity {
    First,
    Second,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Identity::First => "first",
            Identity::Second => "second",
        })
    }
}

/// Outcome of one exact Bernstein-Sato check at integer exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsOutcome {
    pub m1: u32,
    pub m2: u32,
    /// The exact quotient `P_i*(∂)(P1^{m1+δ} P2^{m2+δ'}) / (P1^{m1} P2^{m2})`.
    pub quotient: Rational,
    /// `b_i(m1, m2)`.
    pub b_value: Rational,
    /// `quotient / b_i(m1, m2)`.
    pub kappa: Rational,
}

/// Expanded invariants and dual operators for one `(n, d)`, reusable across
/// exponents.
pub struct BsContext {
    pub coords: Coordinates,
    pub p1: RationalPoly,
    pub p2: RationalPoly,
    pub p1_dual: DiffOperator,
    pub p2_dual: DiffOperator,
    pub b10: BPolynomial,
    pub b01: BPolynomial,
}

impl BsContext {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        check_order(n, d)?;
        if n + d > 6 {
            return Err(Error::TooLarge(format!("Bernstein-Sato check for n + d = {} > 6", n + d)));
        }
        let coords = Coordinates::new(n, d);
        let p1 = expand_p1_in(coords)?;
        let p2 = expand_p2(n, d)?;
        let p1_dual = dual_operator(&p1, &coords);
        let p2_dual = dual_operator(&p2, &coords);
        Ok(Self { coords, p1, p2, p1_dual, p2_dual, b10: b10_formula(n, d)?, b01: b01_formula(n, d)? })
    }

    pub fn check(&self, m1: u32, m2: u32, which: Identity) -> Result<BsOutcome> {
        let base = self.p1.pow(m1).mul(&self.p2.pow(m2));
        let (raised, op, b) = match which {
            Identity::First => (base.mul(&self.p1), &self.p1_dual, &self.b10),
            Identity::Second => (base.mul(&self.p2), &self.p2_dual, &self.b01),
        };
        let lhs = apply(op, &raised);
        let q = lhs.div_exact(&base).ok_or_else(|| {
            Error::IdentityViolated(format!("P1^{m1} P2^{m2} does not divide the image for the {which} identity"))
        })?;
        let quotient = q.as_constant().ok_or_else(|| {
            Error::IdentityViolated(format!("quotient is not constant for the {which} identity at ({m1},{m2})"))
        })?;
        let b_value = b.eval(&Rational::from_integer(m1.into()), &Rational::from_integer(m2.into()));
        let kappa = &quotient / &b_value;
        Ok(BsOutcome { m1, m2, quotient, b_value, kappa })
    }
}

/// Single exact check. `ok` stability across exponents is decided by
/// [`bs_check_grid`].
pub fn bs_check(n: usize, d: usize, m1: u32, m2: u32, which: Identity) -> Result<BsOutcome> {
    BsContext::new(n, d)?.check(m1, m2, which)
}

/// Grid result: the common κ if every quotient is constant and all κ agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsGrid {
    pub outcomes: Vec<BsOutcome>,
    pub kappa: Rational,
    pub stable: bool,
}

pub fn bs_check_grid(ctx: &BsContext, exps: &[(u32, u32)], which: Identity) -> Result<BsGrid> {
    let outcomes = exps.iter().map(|&(a, b)| ctx.check(a, b, which)).collect::<Result<Vec<_>>>()?;
    let kappa = outcomes.first().map(|o| o.kappa.clone()).unwrap_or_else(Rational::zero);
    let stable = outcomes.iter().all(|o| o.kappa == kappa) && !kappa.is_zero();
    Ok(BsGrid { outcomes, kappa, stable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    // Fraction-free (Bareiss) elimination over Q, independent of the
    // Leibniz expansion.
    fn bareiss_det(mut a: Vec<Vec<Rational>>) -> Rational {
        let n = a.len();
        let mut sign = r(1);
        let mut prev = r(1);
        for k in 0..n.saturating_sub(1) {
            if a[k][k].is_zero() {
                let Some(sw) = ((k + 1)..n).find(|&i| !a[i][k].is_zero()) else { return r(0) };
                a.swap(k, sw);
                sign = -sign;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    #[test]
    fn coordinate_layout() {
        let c = Coordinates::new(3, 2);
        let names: Vec<String> = (0..c.len()).map(|v| c.name(v)).collect();
        assert_eq!(names, ["z11", "z12", "z13", "z22", "z23", "z33", "y11", "y12", "y21", "y22", "y31", "y32"]);
        assert_eq!(c.z(2, 1), c.z(1, 2));
        assert!(c.is_off_diagonal(c.z(0, 2)));
        assert!(!c.is_off_diagonal(c.z(1, 1)));
    }

    #[test]
    fn p1_small() {
        let c1 = Coordinates::new(1, 0);
        assert_eq!(expand_p1(1).unwrap().display_with(&c1), "z11");
        let c2 = Coordinates::new(2, 0);
        assert_eq!(expand_p1(2).unwrap().display_with(&c2), "z11*z22 - z12^2");
        assert!(matches!(expand_p1(7), Err(Error::TooLarge(_))));
    }

    #[test]
    fn p1_matches_bareiss() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 1..=5 {
            let p = expand_p1(n).unwrap();
            let c = Coordinates::new(n, 0);
            for _ in 0..5 {
                let pt: Vec<Rational> = (0..c.len()).map(|_| rat(rng.gen_range(-9..10), rng.gen_range(1..5))).collect();
                let m: Vec<Vec<Rational>> =
                    (0..n).map(|i| (0..n).map(|j| pt[c.z(i, j)].clone()).collect()).collect();
                assert_eq!(p.eval(&pt), bareiss_det(m));
            }
        }
    }

    #[test]
    fn p2_small() {
        let c = Coordinates::new(1, 1);
        assert_eq!(expand_p2(1, 1).unwrap().display_with(&c), "y11^2");
        let c = Coordinates::new(2, 1);
        let p = expand_p2(2, 1).unwrap();
        let expect = RationalPoly::from_terms(
            c.len(),
            [
                (vec![0, 0, 1, 2, 0], r(1)),
                (vec![0, 1, 0, 1, 1], r(-2)),
                (vec![1, 0, 0, 0, 2], r(1)),
            ],
        );
        assert_eq!(p, expect);
        assert!(expand_p2(1, 2).unwrap().is_zero());
        assert!(expand_p2(2, 3).unwrap().is_zero());
        assert!(matches!(expand_p2(5, 4), Err(Error::TooLarge(_))));
    }

    #[test]
    fn p2_matches_bareiss() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for (n, d) in [(2, 1), (2, 2), (3, 2), (4, 2)] {
            let p = expand_p2(n, d).unwrap();
            let c = Coordinates::new(n, d);
            let pt: Vec<Rational> = (0..c.len()).map(|_| rat(rng.gen_range(-9..10), rng.gen_range(1..5))).collect();
            let m: Vec<Vec<Rational>> = (0..n + d)
                .map(|i| {
                    (0..n + d)
                        .map(|j| match (i < n, j < n) {
                            (true, true) => pt[c.z(i, j)].clone(),
                            (true, false) => pt[c.y(i, j - n)].clone(),
                            (false, true) => pt[c.y(j, i - n)].clone(),
                            (false, false) => r(0),
                        })
                        .collect()
                })
                .collect();
            let sign = if d % 2 == 0 { r(1) } else { r(-1) };
            assert_eq!(p.eval(&pt), sign * bareiss_det(m));
        }
    }

    #[test]
    fn relative_invariance_diagonal() {
        // z_ij ↦ t_i t_j z_ij, y_ab ↦ t_a u_b y_ab.
        for (n, d) in [(2, 1), (3, 2)] {
            let c = Coordinates::new(n, d);
            let t: Vec<Rational> = (0..n).map(|i| rat(i as i64 + 2, 3)).collect();
            let u: Vec<Rational> = (0..d).map(|b| rat(5, b as i64 + 2)).collect();
            let mut factors = vec![r(0); c.len()];
            for i in 0..n {
                for j in i..n {
                    factors[c.z(i, j)] = &t[i] * &t[j];
                }
                for b in 0..d {
                    factors[c.y(i, b)] = &t[i] * &u[b];
                }
            }
            let tt: Rational = t.iter().map(|x| x * x).product();
            let uu: Rational = u.iter().map(|x| x * x).product();
            let p1 = expand_p1_in(c).unwrap();
            let p2 = expand_p2(n, d).unwrap();
            assert_eq!(p1.scale_vars(&factors), p1.scale(&tt));
            assert_eq!(p2.scale_vars(&factors), p2.scale(&(&tt * &uu)));
        }
    }

    #[test]
    fn dual_operator_examples() {
        let c1 = Coordinates::new(1, 0);
        let op = dual_operator(&RationalPoly::var(1, 0), &c1);
        assert_eq!(op, DiffOperator::partial(1, 0, 1));
        let c2 = Coordinates::new(2, 0);
        let op = dual_operator(&RationalPoly::var(3, c2.z(0, 1)), &c2);
        let (exps, coef) = op.terms().next().unwrap();
        assert_eq!(exps, &[0, 1, 0]);
        assert_eq!(coef, &rat(1, 2));
    }

    // Truncated exponential series of ⟨z̃, w̃⟩ in 2·len variables
    // (z̃ first, then w̃), through total degree 2·order.
    fn exp_series(c: &Coordinates, order: u32) -> Vec<RationalPoly> {
        let m = c.len();
        let nv = 2 * m;
        let mut pairing = RationalPoly::zero(nv);
        for v in 0..m {
            let w = if c.is_off_diagonal(v) { r(2) } else { r(1) };
            pairing = pairing.add(&RationalPoly::var(nv, v).mul(&RationalPoly::var(nv, m + v)).scale(&w));
        }
        let mut out = vec![RationalPoly::one(nv)];
        let mut fact = r(1);
        let mut pw = RationalPoly::one(nv);
        for k in 1..=order {
            pw = pw.mul(&pairing);
            fact *= r(k as i64);
            out.push(pw.scale(&(r(1) / &fact)));
        }
        out
    }

    #[test]
    fn dual_operator_series_identity() {
        for (n, d) in [(1, 1), (2, 1), (2, 2)] {
            let c = Coordinates::new(n, d);
            let m = c.len();
            for p in [expand_p1_in(c).unwrap(), expand_p2(n, d).unwrap()] {
                let deg = p.total_degree().unwrap();
                let op = dual_operator(&p, &c);
                let terms = exp_series(&c, deg + 2);
                let series = |upto: u32| terms[..=upto as usize].iter().fold(RationalPoly::zero(2 * m), |a, t| a.add(t));
                let lhs = apply(&op, &series(deg + 2));
                let rhs = p.embed(m, 2 * m).mul(&series(2));
                assert_eq!(lhs, rhs, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn apply_examples() {
        let z3 = RationalPoly::var(1, 0).pow(3);
        assert_eq!(apply(&DiffOperator::partial(1, 0, 1), &z3), RationalPoly::var(1, 0).pow(2).scale(&r(3)));
        let y4 = RationalPoly::var(2, 1).pow(4);
        assert_eq!(apply(&DiffOperator::partial(2, 1, 2), &y4), RationalPoly::var(2, 1).pow(2).scale(&r(12)));
    }

    #[test]
    fn leibniz_rule() {
        let c = Coordinates::new(2, 1);
        let p1 = expand_p1_in(c).unwrap();
        let p2 = expand_p2(2, 1).unwrap();
        for v in 0..c.len() {
            let dv = DiffOperator::partial(c.len(), v, 1);
            let lhs = apply(&dv, &p1.mul(&p2));
            let rhs = apply(&dv, &p1).mul(&p2).add(&p1.mul(&apply(&dv, &p2)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn division() {
        let c = Coordinates::new(2, 1);
        let p1 = expand_p1_in(c).unwrap();
        let p2 = expand_p2(2, 1).unwrap();
        let prod = p1.mul(&p2).mul(&p2);
        assert_eq!(prod.div_exact(&p2).unwrap(), p1.mul(&p2));
        assert!(prod.add(&RationalPoly::one(c.len())).div_exact(&p1).is_none());
    }

    #[test]
    fn b_formulas() {
        let b = b10_formula(1, 1).unwrap();
        assert_eq!(b.to_string(), "(s1 + 1)");
        let b = b01_formula(1, 1).unwrap();
        assert_eq!(b.to_string(), "(s2 + 1)(s2 + 1/2)");
        let b = b10_formula(2, 1).unwrap();
        assert_eq!(b.to_string(), "(s1 + 1)(s1 + s2 + 3/2)");
        assert_eq!(b.coefficient(1, 1), r(1));
        assert_eq!(b.coefficient(0, 0), rat(3, 2));
        assert!(matches!(b10_formula(1, 2), Err(Error::DimensionOrder { .. })));
        assert!(matches!(b01_formula(2, 3), Err(Error::DimensionOrder { .. })));
    }

    #[test]
    fn bs_hand_cases() {
        for m1 in 0..4 {
            let o = bs_check(1, 1, m1, 0, Identity::First).unwrap();
            assert_eq!(o.quotient, r(m1 as i64 + 1));
            assert_eq!(o.kappa, r(1));
        }
        for m2 in 0..4 {
            let o = bs_check(1, 1, 0, m2, Identity::Second).unwrap();
            let k = 2 * m2 as i64;
            assert_eq!(o.quotient, r((k + 2) * (k + 1)));
            assert_eq!(o.kappa, r(4));
        }
    }

    #[test]
    fn bs_two_one_grid() {
        let ctx = BsContext::new(2, 1).unwrap();
        let grid: Vec<(u32, u32)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
        for which in [Identity::First, Identity::Second] {
            let g = bs_check_grid(&ctx, &grid, which).unwrap();
            assert!(g.stable, "{which}: {:?}", g.outcomes.iter().map(|o| o.kappa.to_string()).collect::<Vec<_>>());
        }
    }
}

//! Moments, Hankel determinants, the Weyl function and the coordinate maps
//! τ (moments → cluster variables) and ρ (cluster variables → parameters).
//!
//! Two gauges coexist: `h_j` with `h_0 = 1`, and `H_j = H_0 h_j` with a free
//! nonzero `H_0`. Hankel determinants in the second gauge are written `𝔻`.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::coxeter::{build_x, kappa_of, validate_eps, CoxeterPair, FactorParams};
use crate::error::{CoxError, Result};
use crate::linalg::{powi, Matrix, Rat, RatMatrix, Scalar};

/// Two-sided moment sequence of an invertible matrix (or of a Weyl
/// function). Moments outside the stored window are generated by the
/// recursion `Σ (−1)^i p_i h_{k+i} = 0`, where `p_i` are the coefficients of
/// `det(λ + X)` with `p_n = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSeq<T: Scalar = Rat> {
    gauge: T,
    lo: i64,
    h: Vec<T>,
    p: Vec<T>,
}

impl<T: Scalar> MomentSeq<T> {
    /// Builds from a window of normalized moments `h_lo, h_lo+1, …`.
    pub fn from_window(gauge: T, lo: i64, h: Vec<T>, p: Vec<T>) -> Result<Self> {
        if gauge.is_zero() {
            return Err(CoxError::InvalidParams("H_0 must be nonzero".into()));
        }
        if p.len() < 2 || p.last() != Some(&T::one()) {
            return Err(CoxError::Argument("p must be monic of degree ≥ 1".into()));
        }
        if h.len() < p.len() - 1 {
            return Err(CoxError::Range("moment window shorter than n".into()));
        }
        Ok(MomentSeq { gauge, lo, h, p })
    }

    /// Solves the recursion for `p` from `H_0 … H_{2n−1}`.
    pub fn from_moments(big_h: &[T]) -> Result<Self> {
        if big_h.len() < 2 || big_h.len() % 2 != 0 {
            return Err(CoxError::Argument("need H_0 … H_{2n−1}".into()));
        }
        let n = big_h.len() / 2;
        let h0 = big_h[0].clone();
        if h0.is_zero() {
            return Err(CoxError::NonGeneric("H_0 = 0".into()));
        }
        let h: Vec<T> = big_h.iter().map(|x| x.clone() / h0.clone()).collect();
        let sign = |i: usize| if i % 2 == 0 { T::one() } else { -T::one() };
        let sys = Matrix::from_rows((0..n).map(|k| (0..n).map(|i| sign(i) * h[k + i].clone()).collect()).collect())?;
        let rhs: Vec<T> = (0..n).map(|k| -(sign(n) * h[k + n].clone())).collect();
        let inv = sys.inverse().map_err(|_| CoxError::NonGeneric("Δ_n^(n−1) = 0: P and Q are not coprime".into()))?;
        let mut p = inv.mul_vec(&rhs);
        p.push(T::one());
        MomentSeq::from_window(h0, 0, h, p)
    }

    pub fn n(&self) -> usize {
        self.p.len() - 1
    }

    /// `H_0`.
    pub fn gauge(&self) -> &T {
        &self.gauge
    }

    /// `p_0 … p_n` of `det(λ + X)`.
    pub fn p(&self) -> &[T] {
        &self.p
    }

    /// Stored window `[lo, hi]`.
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.lo + self.h.len() as i64 - 1)
    }

    fn step_up(&self, tail: &[T]) -> T {
        // h_{m} = −Σ_{i<n} (−1)^{i+n} p_i h_{m−n+i}
        let n = self.n();
        let mut s = T::zero();
        for i in 0..n {
            let t = self.p[i].clone() * tail[i].clone();
            s = if (i + n) % 2 == 0 { s - t } else { s + t };
        }
        s
    }

    fn step_down(&self, head: &[T]) -> Result<T> {
        // p_0 h_k = −Σ_{i≥1} (−1)^i p_i h_{k+i}
        if self.p[0].is_zero() {
            return Err(CoxError::Range("p_0 = 0: negative moments undefined".into()));
        }
        let n = self.n();
        let mut s = T::zero();
        for i in 1..=n {
            let t = self.p[i].clone() * head[i - 1].clone();
            s = if i % 2 == 0 { s - t } else { s + t };
        }
        Ok(s / self.p[0].clone())
    }

    /// Grows the stored window to cover `[lo, hi]`.
    pub fn extend(&mut self, lo: i64, hi: i64) -> Result<()> {
        let n = self.n();
        while self.window().1 < hi {
            let tail = &self.h[self.h.len() - n..];
            let next = self.step_up(tail);
            self.h.push(next);
        }
        while self.lo > lo {
            let prev = self.step_down(&self.h[..n])?;
            self.h.insert(0, prev);
            self.lo -= 1;
        }
        Ok(())
    }

    /// Normalized moment `h_j`.
    pub fn h(&self, j: i64) -> Result<T> {
        let (lo, hi) = self.window();
        if (lo..=hi).contains(&j) {
            return Ok(self.h[(j - lo) as usize].clone());
        }
        let mut m = self.clone();
        m.extend(j.min(lo), j.max(hi))?;
        m.h(j)
    }

    /// `H_j = H_0 h_j`.
    pub fn big_h(&self, j: i64) -> Result<T> {
        Ok(self.h(j)? * self.gauge.clone())
    }

    /// Moments `H_lo … H_hi`.
    pub fn big_h_range(&self, lo: i64, hi: i64) -> Result<Vec<T>> {
        let mut m = self.clone();
        m.extend(lo, hi)?;
        (lo..=hi).map(|j| m.big_h(j)).collect()
    }

    /// Replaces `H_0`, keeping the normalized moments.
    pub fn with_gauge(&self, gauge: T) -> Result<Self> {
        MomentSeq::from_window(gauge, self.lo, self.h.clone(), self.p.clone())
    }

    /// Multiplies every `H_j` by `t`.
    pub fn scale(&self, t: T) -> Result<Self> {
        self.with_gauge(self.gauge.clone() * t)
    }

    /// `η`: `H_j ↦ H_{j+1}`.
    pub fn eta(&self) -> Result<Self> {
        let h1 = self.h(1)?;
        if h1.is_zero() {
            return Err(CoxError::NonGeneric("H_1 = 0: shifted gauge vanishes".into()));
        }
        let mut m = self.clone();
        m.extend(m.lo.min(1), m.window().1.max(1 + self.n() as i64))?;
        let h = m.h[1..].iter().map(|x| x.clone() / h1.clone()).collect();
        MomentSeq::from_window(self.gauge.clone() * h1, m.lo, h, self.p.clone())
    }
}

impl MomentSeq<Rat> {
    /// Moments of `X` over `[jmin, jmax]` (which must contain `[0, n]`),
    /// with gauge `H_0 = 1`.
    pub fn from_matrix(x: &RatMatrix, jmin: i64, jmax: i64) -> Result<Self> {
        let n = x.rows();
        if !x.is_square() || n < 2 {
            return Err(CoxError::Argument("moments need a square matrix, n ≥ 2".into()));
        }
        if jmin > 0 || jmax < n as i64 {
            return Err(CoxError::Argument("moment window must contain [0, n]".into()));
        }
        let inv = x.inverse()?;
        let e1: Vec<Rat> = (0..n).map(|i| if i == 0 { Rat::one() } else { Rat::zero() }).collect();
        let mut h = Vec::new();
        let mut v = e1.clone();
        for _ in 0..-jmin {
            v = inv.mul_vec(&v);
            h.push(v[0].clone());
        }
        h.reverse();
        let mut v = e1;
        for _ in 0..=jmax {
            h.push(v[0].clone());
            v = x.mul_vec(&v);
        }
        let mut p = x.scale(&Rat::from_i64(-1)).char_poly()?;
        p.reverse();
        MomentSeq::from_window(Rat::from_i64(1), jmin, h, p)
    }

    /// Default window `[−2n, 2n]`.
    pub fn of(x: &RatMatrix) -> Result<Self> {
        let n = x.rows() as i64;
        MomentSeq::from_matrix(x, -2 * n, 2 * n)
    }

    pub fn to_f64(&self) -> MomentSeq<f64> {
        MomentSeq {
            gauge: self.gauge.to_f64(),
            lo: self.lo,
            h: self.h.iter().map(Scalar::to_f64).collect(),
            p: self.p.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// Memoized Hankel determinants of one moment sequence.
#[derive(Clone, Debug)]
pub struct HankelCache<T: Scalar = Rat> {
    moments: MomentSeq<T>,
    memo: HashMap<(usize, i64), T>,
}

impl<T: Scalar> HankelCache<T> {
    pub fn new(moments: MomentSeq<T>) -> Self {
        HankelCache { moments, memo: HashMap::new() }
    }

    pub fn moments(&self) -> &MomentSeq<T> {
        &self.moments
    }

    pub fn n(&self) -> usize {
        self.moments.n()
    }

    /// `Δ_i^{(l)} = det(h_{α+β+l−i−1})_{α,β=1..i}`, `Δ_0 = 1`.
    pub fn delta(&mut self, i: usize, l: i64) -> Result<T> {
        if i == 0 {
            return Ok(T::one());
        }
        if let Some(v) = self.memo.get(&(i, l)) {
            return Ok(v.clone());
        }
        let first = l - i as i64 + 1;
        let last = l + i as i64 - 1;
        let (lo, hi) = self.moments.window();
        if first < lo || last > hi {
            self.moments.extend(first.min(lo), last.max(hi))?;
        }
        let m = &self.moments;
        let rows = (0..i as i64).map(|a| (0..i as i64).map(|b| m.h(first + a + b)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        let v = Matrix::from_rows(rows)?.det()?;
        self.memo.insert((i, l), v.clone());
        Ok(v)
    }

    /// `𝔻_i^{(l)} = H_0^i Δ_i^{(l)}`. Index `i = −1` is defined as 0.
    pub fn dd(&mut self, i: i64, l: i64) -> Result<T> {
        if i < 0 {
            return Ok(T::zero());
        }
        let d = self.delta(i as usize, l)?;
        Ok(powi(self.moments.gauge(), i)? * d)
    }

    /// `Δ_{i+1}Δ_{i−1} = Δ_i^{(l−1)}Δ_i^{(l+1)} − (Δ_i^{(l)})²` at `(i, l)`.
    pub fn jacobi_holds(&mut self, i: usize, l: i64) -> Result<bool> {
        if i == 0 {
            return Ok(true);
        }
        let lhs = self.delta(i + 1, l)? * self.delta(i - 1, l)?;
        let c = self.delta(i, l)?;
        let rhs = self.delta(i, l - 1)? * self.delta(i, l + 1)? - c.clone() * c;
        Ok(lhs == rhs)
    }
}

/// Cluster coordinates `x(ε) = (x_{01}, x_{11}, …, x_{0,n−1}, x_{1,n−1},
/// 𝔻_n^{(n−1)}, 1/det X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterCoords<T: Scalar = Rat> {
    pub x: Vec<T>,
    pub eps: Vec<u8>,
}

/// `τ`: Hankel determinants in the chart of `ε`.
pub fn tau<T: Scalar>(eps: &[u8], cache: &mut HankelCache<T>) -> Result<ClusterCoords<T>> {
    validate_eps(eps)?;
    let n = eps.len();
    if cache.n() != n {
        return Err(CoxError::Argument("ε and moments differ in size".into()));
    }
    let kappa = kappa_of(eps);
    let mut x = Vec::with_capacity(2 * n);
    for i in 1..n {
        x.push(cache.dd(i as i64, kappa[i - 1])?);
        x.push(cache.dd(i as i64, kappa[i - 1] + 1)?);
    }
    let top = cache.dd(n as i64, n as i64 - 1)?;
    let below = cache.dd(n as i64, n as i64 - 2)?;
    if top.is_zero() {
        return Err(CoxError::NonGeneric("𝔻_n^(n−1) = 0".into()));
    }
    x.push(top.clone());
    x.push(below / top);
    if let Some(k) = x.iter().position(|v| v.is_zero()) {
        return Err(CoxError::NonGeneric(format!("cluster variable x_{} vanishes", k + 1)));
    }
    Ok(ClusterCoords { x, eps: eps.to_vec() })
}

/// `ρ`: reduced parameters `(d, c)` from cluster coordinates.
pub fn rho<T: Scalar>(coords: &ClusterCoords<T>) -> Result<(Vec<T>, Vec<T>)> {
    let eps = &coords.eps;
    validate_eps(eps)?;
    let n = eps.len();
    let x = &coords.x;
    if x.len() != 2 * n {
        return Err(CoxError::Argument("cluster coordinates have wrong length".into()));
    }
    if x.iter().any(|v| v.is_zero()) {
        return Err(CoxError::NonGeneric("zero cluster variable".into()));
    }
    let kappa_n = kappa_of(eps)[n - 1];
    let mut x0 = vec![T::one()];
    let mut x1 = vec![T::one()];
    for i in 0..n - 1 {
        x0.push(x[2 * i].clone());
        x1.push(x[2 * i + 1].clone());
    }
    let top = x[2 * n - 2].clone() * powi(&x[2 * n - 1], n as i64 - 1 - kappa_n)?;
    x1.push(top.clone() / x[2 * n - 1].clone());
    x0.push(top);
    let d = (1..=n).map(|i| x1[i].clone() * x0[i - 1].clone() / (x0[i].clone() * x1[i - 1].clone())).collect();
    let mut c = Vec::with_capacity(n - 1);
    for i in 1..n {
        let base = x0[i - 1].clone() * x0[i + 1].clone() / (x1[i].clone() * x1[i].clone());
        let up = powi(&(x1[i + 1].clone() / x0[i + 1].clone()), eps[i] as i64)?;
        let down = powi(&(x1[i - 1].clone() / x0[i - 1].clone()), 2 - eps[i - 1] as i64)?;
        c.push(base * up * down);
    }
    Ok((d, c))
}

/// `ρ` into reduced factorization parameters.
pub fn rho_params(coords: &ClusterCoords<Rat>) -> Result<FactorParams> {
    let (d, c) = rho(coords)?;
    FactorParams::reduced(d, c)
}

/// The full inverse problem: parameters from moments in the chart of `pair`.
pub fn restore_params(pair: &CoxeterPair, moments: &MomentSeq<Rat>) -> Result<FactorParams> {
    let mut cache = HankelCache::new(moments.clone());
    rho_params(&tau(pair.eps(), &mut cache)?)
}

/// `ρ(τ(moments(build_X)))`.
pub fn inverse_roundtrip(pair: &CoxeterPair, p: &FactorParams) -> Result<FactorParams> {
    restore_params(pair, &MomentSeq::of(&build_x(pair, p)?)?)
}

/// Weyl function `m(λ) = ((λ − X)^{-1} e_1, e_1) = Q(λ)/P(λ)`, coefficients
/// leading first.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylFunction {
    pub p: Vec<Rat>,
    pub q: Vec<Rat>,
}

impl WeylFunction {
    pub fn n(&self) -> usize {
        self.p.len() - 1
    }

    /// Laurent coefficients: `m(λ) = Σ_{j≥0} h_j λ^{−j−1}`, `j < count`.
    pub fn laurent(&self, count: usize) -> Vec<Rat> {
        let n = self.n();
        let mut a: Vec<Rat> = Vec::with_capacity(count);
        for j in 0..count {
            let mut v = if j < n { self.q[j].clone() } else { Rat::zero() };
            for t in 1..=j.min(n) {
                v -= &self.p[t] * &a[j - t];
            }
            a.push(v);
        }
        a
    }

    /// Moment sequence in gauge `H_0`.
    pub fn moments(&self, h0: Rat) -> Result<MomentSeq<Rat>> {
        let n = self.n();
        let h = self.laurent(2 * n);
        let mut m = MomentSeq::from_moments(&h.iter().map(|x| x * &h0).collect::<Vec<_>>())?;
        m = m.with_gauge(h0)?;
        Ok(m)
    }
}

/// `P = det(λ − X)`, `Q = det(λ − X̂)` with `X̂` the matrix without its
/// first row and column. Rejects non-coprime pairs.
pub fn weyl_from_x(x: &RatMatrix) -> Result<WeylFunction> {
    let n = x.rows();
    if !x.is_square() || n < 2 {
        return Err(CoxError::Argument("Weyl function needs a square matrix, n ≥ 2".into()));
    }
    let p = x.char_poly()?;
    if p[n].is_zero() {
        return Err(CoxError::NonGeneric("P(0) = 0".into()));
    }
    let rest: Vec<usize> = (1..n).collect();
    let q = x.submatrix(&rest, &rest)?.char_poly()?;
    let w = WeylFunction { p, q };
    let h = w.laurent(2 * n);
    // coefficients of det(λ + X): p_i = (−1)^{n−i} P_{n−i}
    let pl = (0..=n).map(|i| if (n - i) % 2 == 0 { w.p[n - i].clone() } else { -w.p[n - i].clone() }).collect();
    let mut cache = HankelCache::new(MomentSeq::from_window(Rat::from_i64(1), 0, h, pl)?);
    if cache.delta(n, n as i64 - 1)?.is_zero() {
        return Err(CoxError::NonGeneric("Δ_n^(n−1) = 0: P and Q are not coprime".into()));
    }
    Ok(w)
}

/// The `M`-form `H_0((λ + X)^{-1} e_1, e_1) = Q_M/P_M`.
pub fn m_form(x: &RatMatrix, h0: &Rat) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let n = x.rows();
    let neg = x.scale(&Rat::from_i64(-1));
    let p = neg.char_poly()?;
    let rest: Vec<usize> = (1..n).collect();
    let q = neg.submatrix(&rest, &rest)?.char_poly()?.into_iter().map(|c| c * h0).collect();
    Ok((p, q))
}

/// `𝒫_i^{(l)}(λ)` as coefficients of `λ^0 … λ^i`.
pub fn hankel_poly(m: &MomentSeq<Rat>, i: usize, l: i64) -> Result<Vec<Rat>> {
    if i == 0 {
        return Ok(vec![Rat::from_i64(1)]);
    }
    let first = l - i as i64 + 1;
    let rows: Vec<Vec<Rat>> =
        (0..i as i64).map(|r| (0..=i as i64).map(|c| m.h(first + r + c)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let all_rows: Vec<usize> = (0..i).collect();
    let mat = RatMatrix::from_rows(rows)?;
    (0..=i)
        .map(|c| {
            let cols: Vec<usize> = (0..=i).filter(|&k| k != c).collect();
            let minor = mat.minor(&all_rows, &cols)?;
            Ok(if (i + c) % 2 == 0 { minor } else { -minor })
        })
        .collect()
}

fn laurent_at(x: &RatMatrix, coeffs: &[Rat], shift: i64) -> Result<RatMatrix> {
    let mut acc = RatMatrix::zeros(x.rows(), x.cols());
    for (c, a) in coeffs.iter().enumerate() {
        if !a.is_zero() {
            acc = acc.add(&x.pow(c as i64 + shift)?.scale(a));
        }
    }
    Ok(acc)
}

/// `h_α(X_m) = h_α(X)` for `α ∈ [κ_m − m + 1, κ_m + m]`, every `m < n`.
pub fn check_submoments(pair: &CoxeterPair, p: &FactorParams) -> Result<bool> {
    let x = build_x(pair, p)?;
    let full = MomentSeq::of(&x)?;
    let n = pair.n();
    for m in 1..n {
        let kappa = pair.comb().kappa[m - 1];
        let idx: Vec<usize> = (0..m).collect();
        let xm = x.submatrix(&idx, &idx)?;
        for a in kappa - m as i64 + 1..=kappa + m as i64 {
            if xm.pow(a)?.get(0, 0) != &full.h(a)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `d_1⋯d_m = Δ_m^{(κ_m+1)}/Δ_m^{(κ_m)}` and
/// `det(λ − X_m) = 𝒫_m^{(κ_m)}(λ)/Δ_m^{(κ_m)}`.
pub fn check_leading_products(pair: &CoxeterPair, p: &FactorParams) -> Result<bool> {
    let x = build_x(pair, p)?;
    let mut cache = HankelCache::new(MomentSeq::of(&x)?);
    let n = pair.n();
    let mut prod = Rat::from_i64(1);
    for m in 1..=n {
        let kappa = pair.comb().kappa[m - 1];
        prod *= &p.d[m - 1];
        let lo = cache.delta(m, kappa)?;
        if prod != cache.delta(m, kappa + 1)? / &lo {
            return Ok(false);
        }
        if m < n {
            let idx: Vec<usize> = (0..m).collect();
            let mut cp = x.submatrix(&idx, &idx)?.char_poly()?;
            cp.reverse();
            let poly: Vec<Rat> = hankel_poly(cache.moments(), m, kappa)?.into_iter().map(|c| c / &lo).collect();
            if cp != poly {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `Γ_l = Π_{i=2}^{l} d_i^{−ε_i} Π_{j<i} c_j d_j^{ε̄_j − ε_i}`.
pub fn gamma_l(pair: &CoxeterPair, p: &FactorParams, l: usize) -> Result<Rat> {
    let comb = pair.comb();
    let eb = comb.eps_bar();
    let c = p.c();
    let mut g = Rat::from_i64(1);
    for i in 2..=l {
        let ei = comb.eps[i - 1] as i64;
        g *= powi(&p.d[i - 1], -ei)?;
        for j in 1..i {
            g *= &c[j - 1] * powi(&p.d[j - 1], eb[j - 1] as i64 - ei)?;
        }
    }
    Ok(g)
}

/// `Δ_l^{(κ_l + k)} = Γ_l · det (X^k)_{[1,l]}` for `k ∈ [kmin, kmax]`.
pub fn check_delta_shift(pair: &CoxeterPair, p: &FactorParams, kmin: i64, kmax: i64) -> Result<bool> {
    let x = build_x(pair, p)?;
    let mut cache = HankelCache::new(MomentSeq::of(&x)?);
    for l in 2..=pair.n() {
        let g = gamma_l(pair, p, l)?;
        let kappa = pair.comb().kappa[l - 1];
        let idx: Vec<usize> = (0..l).collect();
        for k in kmin..=kmax {
            if cache.delta(l, kappa + k)? != &g * x.pow(k)?.minor(&idx, &idx)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `γ_i^±` for label `i`.
pub fn gamma_pm(pair: &CoxeterPair, p: &FactorParams, i: usize, plus: bool) -> Result<Rat> {
    if i == 1 {
        return Ok(Rat::from_i64(1));
    }
    let comb = pair.comb();
    let (eps, ebar, cs) = if plus {
        (&comb.eps_plus, &comb.eps_bar_plus, &p.c_plus)
    } else {
        (&comb.eps_minus, &comb.eps_bar_minus, &p.c_minus)
    };
    let ei = eps[i - 1] as i64;
    let mut g = if (i as i64 - 1) * ei % 2 == 0 { Rat::from_i64(1) } else { Rat::from_i64(-1) };
    g *= powi(&p.d[i - 1], -ei)?;
    for j in 1..i {
        g *= &cs[j - 1] * powi(&p.d[j - 1], ebar[j - 1] as i64 - ei)?;
    }
    Ok(g)
}

/// Laurent polynomials `p_i^±` as `(coefficients of λ^0…, lowest power)`.
pub fn flag_polynomial(pair: &CoxeterPair, p: &FactorParams, m: &MomentSeq<Rat>, i: usize, plus: bool) -> Result<(Vec<Rat>, i64)> {
    let comb = pair.comb();
    let (eps, k) = if plus { (&comb.eps_plus, &comb.k_plus) } else { (&comb.eps_minus, &comb.k_minus) };
    let ei = eps[i - 1] as i64;
    let kappa_prev = if i >= 2 { comb.kappa[i - 2] } else { 0 };
    let mut cache = HankelCache::new(m.clone());
    let sign = if (i as i64 - 1) * ei % 2 == 0 { Rat::from_i64(1) } else { Rat::from_i64(-1) };
    let denom = gamma_pm(pair, p, i, plus)? * cache.delta(i - 1, kappa_prev)?;
    if denom.is_zero() {
        return Err(CoxError::NonGeneric("vanishing normalization".into()));
    }
    let poly = hankel_poly(m, i - 1, kappa_prev - ei)?;
    Ok((poly.into_iter().map(|c| c * &sign / &denom).collect(), k[i - 1] - i as i64 + 1))
}

/// `e_1^T p_i^+(X) = e_i^T` and `p_i^−(X) e_1 = e_i` for every `i`.
pub fn check_flag_polynomials(pair: &CoxeterPair, p: &FactorParams) -> Result<bool> {
    let x = build_x(pair, p)?;
    let m = MomentSeq::of(&x)?;
    let n = pair.n();
    for i in 1..=n {
        let (cp, sp) = flag_polynomial(pair, p, &m, i, true)?;
        let (cm, sm) = flag_polynomial(pair, p, &m, i, false)?;
        let plus = laurent_at(&x, &cp, sp)?;
        let minus = laurent_at(&x, &cm, sm)?;
        for j in 0..n {
            let e = Rat::from_i64(i64::from(j == i - 1));
            if plus.get(0, j) != &e || minus.get(j, 0) != &e {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Right eigenvector `(p_i^+(λ))_i` at an eigenvalue `λ`.
pub fn flag_eigenvector(pair: &CoxeterPair, p: &FactorParams, lambda: &Rat) -> Result<Vec<Rat>> {
    let m = MomentSeq::of(&build_x(pair, p)?)?;
    (1..=pair.n())
        .map(|i| {
            let (c, s) = flag_polynomial(pair, p, &m, i, true)?;
            let mut v = Rat::zero();
            for (k, a) in c.iter().enumerate() {
                v += a * powi(lambda, k as i64 + s)?;
            }
            Ok(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::all_eps;
    use crate::linalg::{poly_eval, rat, rat_int};
    use num_traits::Signed;
    use proptest::prelude::*;

    fn rp(n: usize, v: &[i64]) -> FactorParams {
        let r = |k: usize| {
            let a = v[k % v.len()];
            rat(if a == 0 { 1 } else { a }, 1 + (k as i64 * 7 % 4))
        };
        FactorParams::new((0..n).map(r).collect(), (0..n - 1).map(|k| r(n + k)).collect(), (0..n - 1).map(|k| r(2 * n + k + 1)).collect())
            .unwrap()
    }

    fn running() -> CoxeterPair {
        CoxeterPair::from_sets(5, vec![1, 3, 4, 5], vec![1, 4, 5]).unwrap()
    }

    #[test]
    fn diagonal_moments() {
        let x = RatMatrix::diag(&[rat_int(2), rat_int(3)]);
        let m = MomentSeq::of(&x).unwrap();
        assert_eq!(m.h(1).unwrap(), rat_int(2));
        assert_eq!(m.h(-1).unwrap(), rat(1, 2));
        assert_eq!(m.h(-7).unwrap(), rat(1, 128));
    }

    #[test]
    fn two_by_two_by_hand() {
        let pair = CoxeterPair::tridiagonal(2).unwrap();
        let (d1, d2, c) = (rat(3, 2), rat(-5, 3), rat(7, 4));
        let p = FactorParams::reduced(vec![d1.clone(), d2.clone()], vec![c.clone()]).unwrap();
        let x = build_x(&pair, &p).unwrap();
        let m = MomentSeq::of(&x).unwrap();
        assert_eq!(m.h(1).unwrap(), d1.clone());
        assert_eq!(m.h(2).unwrap(), &d1 * &d1 * (rat_int(1) + &c));
        let coords = tau(&[2, 0], &mut HankelCache::new(m)).unwrap();
        assert_eq!(coords.x[..3], [rat_int(1), d1.clone(), &c * &d1 * &d1]);
        assert_eq!(coords.x[3], (&d1 * &d2).recip());
        assert_eq!(rho_params(&coords).unwrap(), p);
    }

    #[test]
    fn weyl_n2_example() {
        let pair = CoxeterPair::tridiagonal(2).unwrap();
        let p = FactorParams::reduced(vec![rat_int(2), rat_int(3)], vec![rat_int(1)]).unwrap();
        let x = build_x(&pair, &p).unwrap();
        let w = weyl_from_x(&x).unwrap();
        assert_eq!(w.p, vec![rat_int(1), rat_int(-7), rat_int(6)]);
        assert_eq!(w.q, vec![rat_int(1), rat_int(-5)]);
        let m = MomentSeq::of(&x).unwrap();
        let l = w.laurent(5);
        for j in 0..5 {
            assert_eq!(l[j], m.h(j as i64).unwrap());
        }
        // Laurent expansion oracle: m(λ) at a large rational against the partial sum
        let lam = rat_int(1000);
        let exact = poly_eval(&w.q, &lam) / poly_eval(&w.p, &lam);
        let approx: Rat = w.laurent(30).iter().enumerate().map(|(j, h)| h / num_traits::pow(lam.clone(), j + 1)).sum();
        assert!((exact - approx).abs() < rat(1, 10i64.pow(18)));
        let back = w.moments(rat_int(3)).unwrap();
        assert_eq!(back.big_h(4).unwrap(), rat_int(3) * m.h(4).unwrap());
    }

    #[test]
    fn non_coprime_rejected() {
        // block diagonal: e_1 is not cyclic
        let x = RatMatrix::diag(&[rat_int(2), rat_int(3), rat_int(5)]);
        let mut y = x.clone();
        y.set(1, 2, rat_int(1));
        assert!(matches!(weyl_from_x(&y), Err(CoxError::NonGeneric(_))));
    }

    #[test]
    fn ph_and_qh_recursions() {
        let pair = running();
        let p = rp(5, &[2, -3, 1, 5, -2, 7]);
        let x = build_x(&pair, &p).unwrap();
        let m = MomentSeq::of(&x).unwrap();
        let n = 5;
        // independent oracle: powers of X directly
        for k in -10i64..=5 {
            let mut s = Rat::zero();
            for i in 0..=n {
                let t = &m.p()[i] * x.pow(k + i as i64).unwrap().get(0, 0);
                s += if i % 2 == 0 { t } else { -t };
            }
            assert!(s.is_zero(), "k={k}");
            assert_eq!(m.h(k).unwrap(), x.pow(k).unwrap().get(0, 0).clone());
        }
        let h0 = rat(5, 3);
        let (pm, qm) = m_form(&x, &h0).unwrap();
        let mut pl = pm.clone();
        pl.reverse();
        assert_eq!(pl, m.p());
        let mut ql = qm.clone();
        ql.reverse();
        let mg = m.with_gauge(h0.clone()).unwrap();
        for j in 0..n {
            let mut s = Rat::zero();
            for i in j + 1..=n {
                let t = &mg.p()[i] * mg.big_h((i - j - 1) as i64).unwrap();
                s += if i % 2 == 0 { t } else { -t };
            }
            let lhs = if (j + 1) % 2 == 0 { ql[j].clone() } else { -ql[j].clone() };
            assert_eq!(lhs, s);
        }
        let from = MomentSeq::from_moments(&mg.big_h_range(0, 9).unwrap()).unwrap();
        assert_eq!(from.p(), m.p());
        assert_eq!(from.big_h(-3).unwrap(), mg.big_h(-3).unwrap());
    }

    #[test]
    fn hankel_facts() {
        let pair = running();
        let p = rp(5, &[3, -1, 2, 4, -5]);
        let x = build_x(&pair, &p).unwrap();
        let det = x.det().unwrap();
        let mut cache = HankelCache::new(MomentSeq::of(&x).unwrap());
        assert_eq!(cache.delta(0, 17).unwrap(), rat_int(1));
        for l in -4..8 {
            assert!(cache.delta(6, l).unwrap().is_zero());
            assert_eq!(cache.delta(5, l).unwrap(), cache.delta(5, 4).unwrap() * powi(&det, l + 1 - 5).unwrap());
            for i in 1..=5 {
                assert!(cache.jacobi_holds(i, l).unwrap());
            }
        }
        let g = rat(-7, 2);
        let mut gc = HankelCache::new(cache.moments().with_gauge(g.clone()).unwrap());
        assert_eq!(gc.dd(3, 1).unwrap(), powi(&g, 3).unwrap() * cache.delta(3, 1).unwrap());
        assert!(gc.dd(-1, 4).unwrap().is_zero());
    }

    #[test]
    fn eta_shift() {
        let pair = CoxeterPair::tridiagonal(3).unwrap();
        let p = rp(3, &[2, 3, -1, 4]);
        let x = build_x(&pair, &p).unwrap();
        let m = MomentSeq::of(&x).unwrap().with_gauge(rat(2, 3)).unwrap();
        let e = m.eta().unwrap();
        for j in -4..6 {
            assert_eq!(e.big_h(j).unwrap(), m.big_h(j + 1).unwrap());
        }
        let mut e3 = m.clone();
        for _ in 0..3 {
            e3 = e3.eta().unwrap();
        }
        for j in 0..4 {
            assert_eq!(e3.h(j).unwrap(), m.h(j + 3).unwrap() / m.h(3).unwrap());
        }
    }

    #[test]
    fn tau_positive_for_ones() {
        for n in 2..=6 {
            let pair = CoxeterPair::tridiagonal(n).unwrap();
            let ones = FactorParams::reduced(vec![rat_int(1); n], vec![rat_int(1); n - 1]).unwrap();
            let mut c = HankelCache::new(MomentSeq::of(&build_x(&pair, &ones).unwrap()).unwrap());
            let t = tau(pair.eps(), &mut c).unwrap();
            assert!(t.x.iter().all(|v| v > &Rat::zero()));
        }
    }

    #[test]
    fn running_checks() {
        let pair = running();
        let p = rp(5, &[2, -3, 1, 5, -2, 7]);
        assert!(check_submoments(&pair, &p).unwrap());
        assert!(check_leading_products(&pair, &p).unwrap());
        assert!(check_delta_shift(&pair, &p, -3, 3).unwrap());
        assert!(check_flag_polynomials(&pair, &p).unwrap());
        assert_eq!(inverse_roundtrip(&pair, &p).unwrap(), p.to_reduced());
    }

    #[test]
    fn eigenvector_at_rational_eigenvalue() {
        // X = [[1, 1], [−2, 4]] has eigenvalues 2 and 3
        let pair = CoxeterPair::tridiagonal(2).unwrap();
        let p = FactorParams::reduced(vec![rat_int(1), rat_int(6)], vec![rat_int(-2)]).unwrap();
        let x = build_x(&pair, &p).unwrap();
        let w = weyl_from_x(&x).unwrap();
        let lam = (-10..10).map(rat_int).find(|l| poly_eval(&w.p, l).is_zero()).expect("rational eigenvalue");
        let v = flag_eigenvector(&pair, &p, &lam).unwrap();
        assert_eq!(x.mul_vec(&v), v.iter().map(|a| a * &lam).collect::<Vec<_>>());
    }

    #[test]
    fn rho_is_gauge_free() {
        for eps in all_eps(4) {
            let pair = CoxeterPair::canonical_for_eps(&eps).unwrap();
            let p = rp(4, &[2, -3, 5, 1, 4]);
            let m = MomentSeq::of(&build_x(&pair, &p).unwrap()).unwrap();
            for g in [rat(1, 1), rat(-3, 7), rat(11, 2)] {
                let mut c = HankelCache::new(m.with_gauge(g).unwrap());
                assert_eq!(rho_params(&tau(&eps, &mut c).unwrap()).unwrap(), p.to_reduced());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn roundtrip_and_identities(v in proptest::collection::vec(prop_oneof![-9i64..=-1, 1i64..=9], 15), n in 2usize..=5, pick in 0usize..256) {
            let pairs = CoxeterPair::all(n);
            let pair = &pairs[pick % pairs.len()];
            let p = rp(n, &v);
            match inverse_roundtrip(pair, &p) {
                Ok(back) => prop_assert_eq!(back, p.to_reduced()),
                Err(CoxError::NonGeneric(_)) => return Ok(()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
            prop_assert!(check_submoments(pair, &p).unwrap());
            prop_assert!(check_leading_products(pair, &p).unwrap());
            prop_assert!(check_delta_shift(pair, &p, -2, 2).unwrap());
            if n <= 4 {
                prop_assert!(check_flag_polynomials(pair, &p).unwrap());
            }
        }
    }
}

//! Coxeter–Toda flows on the reduced coordinates `(c, d)`: Hamiltonians,
//! the log-canonical bracket, RK4 integration, the explicit moment solver
//! and the classical lattice reductions.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coxeter::{build_x_generic, factor_matrix, factor_sequence, CoxeterPair, Factor, FactorParams};
use crate::error::{CoxError, Result};
use crate::linalg::{rat_from_f64, round_rel, rk4_step, FloatMatrix, Matrix, Rat, Scalar};
use crate::weyl::{rho, tau, HankelCache, MomentSeq};

/// Fractional bits kept by the moment solver.
const MOMENT_BITS: u32 = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub t: f64,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub eps: Vec<u8>,
}

impl FlowState {
    pub fn new(pair: &CoxeterPair, c: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        let n = pair.n();
        if d.len() != n || c.len() != n - 1 {
            return Err(CoxError::InvalidParams(format!("expected {} c's and {n} d's", n - 1)));
        }
        let s = FlowState { t: 0.0, c, d, eps: pair.eps().to_vec() };
        s.check()?;
        Ok(s)
    }

    pub fn from_params(pair: &CoxeterPair, p: &FactorParams) -> Result<Self> {
        p.validate(pair.n())?;
        Self::new(pair, p.c().iter().map(Scalar::to_f64).collect(), p.d.iter().map(Scalar::to_f64).collect())
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    fn check(&self) -> Result<()> {
        if self.c.iter().chain(&self.d).any(|v| !v.is_finite()) {
            return Err(CoxError::FlowDiverged(format!("non-finite state at t = {}", self.t)));
        }
        if self.c.iter().chain(&self.d).any(|&v| v == 0.0) {
            return Err(CoxError::InvalidParams("c and d must be nonzero".into()));
        }
        Ok(())
    }

    /// `(c_1 … c_{n−1}, d_1 … d_n)`.
    pub fn packed(&self) -> Vec<f64> {
        self.c.iter().chain(&self.d).copied().collect()
    }

    fn unpack(&self, t: f64, y: &[f64]) -> FlowState {
        let m = self.c.len();
        FlowState { t, c: y[..m].to_vec(), d: y[m..].to_vec(), eps: self.eps.clone() }
    }

    /// Cell element in the gauge `c^+ = 1`, `c^- = c`.
    pub fn matrix(&self, pair: &CoxeterPair) -> FloatMatrix {
        let ones = vec![1.0; self.c.len()];
        build_x_generic(pair, &self.d, &ones, &self.c)
    }
}

/// Log-canonical bracket `{x_a, x_b} = ω_ab x_a x_b` on `(c, d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTable {
    n: usize,
    omega: Vec<Vec<i64>>,
}

impl BracketTable {
    pub fn new(eps: &[u8]) -> Self {
        let n = eps.len();
        let m = 2 * n - 1;
        let mut omega = vec![vec![0i64; m]; m];
        let (ci, di) = (|i: usize| i - 1, |i: usize| n - 1 + i - 1);
        let mut put = |a: usize, b: usize, v: i64| {
            omega[a][b] = v;
            omega[b][a] = -v;
        };
        for i in 1..n {
            if i + 1 < n {
                put(ci(i), ci(i + 1), eps[i] as i64 - 1);
            }
            put(ci(i), di(i), -1);
            put(ci(i), di(i + 1), 1);
        }
        BracketTable { n, omega }
    }

    /// Coefficient between packed coordinates `a`, `b`.
    pub fn coeff(&self, a: usize, b: usize) -> i64 {
        self.omega[a][b]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.omega
    }
}

/// `F_k = tr(X^k)/k`.
pub fn hamiltonian_fk(pair: &CoxeterPair, state: &FlowState, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(CoxError::Argument("k must be positive".into()));
    }
    Ok(state.matrix(pair).pow(k as i64)?.trace() / k as f64)
}

/// `F_k` at exact parameters.
pub fn hamiltonian_fk_exact(pair: &CoxeterPair, p: &FactorParams, k: u32) -> Result<crate::linalg::Rat> {
    if k == 0 {
        return Err(CoxError::Argument("k must be positive".into()));
    }
    let x = crate::coxeter::build_x(pair, p)?;
    Ok(x.pow(k as i64)?.trace() / crate::linalg::Rat::from_i64(k as i64))
}

/// `F_1` summed block by block over `I^- ∪ I^+ = {1 = i_1 < … < i_m = n}`.
pub fn f1_closed_form<T: Scalar>(pair: &CoxeterPair, c: &[T], d: &[T]) -> T {
    let mut idx: Vec<usize> = pair.iplus().iter().chain(pair.iminus()).copied().collect();
    idx.sort_unstable();
    idx.dedup();
    let mut f = d[0].clone();
    for w in idx.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        for j in lo + 1..=hi {
            f = f + d[j - 1].clone();
            let mut run = T::one();
            for a in (lo..j).rev() {
                run = run * c[a - 1].clone();
                f = f + run.clone() * d[a - 1].clone();
            }
        }
    }
    f
}

/// `∂F_k/∂(c, d)` in packed order, from `∂ tr X^k = k tr(X^{k−1} ∂X)` and
/// the product structure of `X`.
pub fn gradient_fk(pair: &CoxeterPair, state: &FlowState, k: u32) -> Result<Vec<f64>> {
    let n = state.n();
    let ones = vec![1.0; n - 1];
    let seq = factor_sequence(pair);
    let mats: Vec<FloatMatrix> = seq.iter().map(|&f| factor_matrix(n, f, &state.d, &ones, &state.c)).collect();
    let mut prefix = vec![Matrix::identity(n)];
    for m in &mats {
        let next = prefix.last().unwrap().mul(m);
        prefix.push(next);
    }
    let mut suffix = vec![Matrix::identity(n); mats.len() + 1];
    for idx in (0..mats.len()).rev() {
        suffix[idx] = mats[idx].mul(&suffix[idx + 1]);
    }
    let x = prefix.last().unwrap().clone();
    let xk1 = x.pow(k as i64 - 1)?;
    let mut g = vec![0.0; 2 * n - 1];
    for (idx, f) in seq.iter().enumerate() {
        let m = suffix[idx + 1].mul(&xk1).mul(&prefix[idx]);
        match *f {
            Factor::Lower(i) => g[i - 1] += *m.get(i - 1, i),
            Factor::Diag => {
                for j in 0..n {
                    g[n - 1 + j] += *m.get(j, j);
                }
            }
            Factor::Upper(_) => {}
        }
    }
    Ok(g)
}

/// Hamiltonian vector field of `F_k` in packed order.
pub fn vector_field(pair: &CoxeterPair, state: &FlowState, k: u32) -> Result<Vec<f64>> {
    let table = BracketTable::new(&state.eps);
    let g = gradient_fk(pair, state, k)?;
    let y = state.packed();
    Ok((0..y.len())
        .map(|a| y[a] * (0..y.len()).map(|b| table.coeff(a, b) as f64 * y[b] * g[b]).sum::<f64>())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// `max_t |F_j(t) − F_j(0)|` for `j = 1 … n−1`.
    pub f_drift: Vec<f64>,
    pub det_drift: f64,
    /// Drift of the characteristic polynomial coefficients.
    pub charpoly_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<FlowState>,
    pub report: ConservationReport,
}

struct Invariants {
    f: Vec<f64>,
    det: f64,
    cp: Vec<f64>,
}

fn invariants(pair: &CoxeterPair, s: &FlowState) -> Result<Invariants> {
    let x = s.matrix(pair);
    let n = s.n();
    let f = (1..n as u32).map(|j| hamiltonian_fk(pair, s, j)).collect::<Result<_>>()?;
    Ok(Invariants { f, det: x.det()?, cp: x.char_poly()? })
}

/// Classical RK4 on the `k`-th flow from `t = 0` to `t_end`, sampled every
/// step.
pub fn rk4_flow(pair: &CoxeterPair, start: &FlowState, k: u32, t_end: f64, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(CoxError::Argument("need dt > 0 and t_end ≥ 0".into()));
    }
    if start.eps != pair.eps() {
        return Err(CoxError::InvalidMove("state chart differs from the pair".into()));
    }
    start.check()?;
    let steps = (t_end / dt).round() as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let inv0 = invariants(pair, start)?;
    let mut report = ConservationReport { f_drift: vec![0.0; inv0.f.len()], det_drift: 0.0, charpoly_drift: 0.0 };
    let mut states = vec![start.clone()];
    let mut y = start.packed();
    let field = |y: &[f64]| -> Vec<f64> {
        let s = start.unpack(0.0, y);
        vector_field(pair, &s, k).unwrap_or_else(|_| vec![f64::NAN; y.len()])
    };
    for step in 1..=steps {
        y = rk4_step(&field, &y, h);
        let s = start.unpack(start.t + step as f64 * h, &y);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(CoxError::FlowDiverged(format!("non-finite state at t = {}", s.t)));
        }
        let inv = invariants(pair, &s)?;
        for (j, f) in inv.f.iter().enumerate() {
            report.f_drift[j] = report.f_drift[j].max((f - inv0.f[j]).abs());
        }
        report.det_drift = report.det_drift.max((inv.det - inv0.det).abs());
        let cp = inv.cp.iter().zip(&inv0.cp).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        report.charpoly_drift = report.charpoly_drift.max(cp);
        states.push(s);
    }
    Ok(Trajectory { states, report })
}

/// Explicit solution of the `k`-th flow: `H_i(t) = (X_0^i e^{tX_0^k} e_1, e_1)`
/// with frozen characteristic polynomial, pushed through `ρ ∘ τ`.
pub fn moment_flow(pair: &CoxeterPair, p0: &FactorParams, k: u32, t: f64) -> Result<FlowState> {
    let start = FlowState::from_params(pair, p0)?;
    moment_flow_state(pair, &start, k, t)
}

pub fn moment_flow_state(pair: &CoxeterPair, start: &FlowState, k: u32, t: f64) -> Result<FlowState> {
    if k == 0 {
        return Err(CoxError::Argument("k must be positive".into()));
    }
    start.check()?;
    let n = start.n();
    // The Hankel determinants of H(t) cancel catastrophically once the
    // leading eigenvalue dominates, so the solution is evaluated in rounded
    // rationals and converted only at the end.
    let exact = |v: &[f64]| v.iter().map(|x| rat_from_f64(*x)).collect::<Result<Vec<Rat>>>();
    let (c, d) = (exact(&start.c)?, exact(&start.d)?);
    let x0 = build_x_generic(pair, &d, &vec![Rat::one(); n - 1], &c);
    let e = x0.pow(k as i64)?.exp_rounded(&rat_from_f64(t)?, MOMENT_BITS)?;
    let fl = |x: &Rat| round_rel(x, MOMENT_BITS);
    let mut v: Vec<Rat> = (0..n).map(|r| e.get(r, 0).clone()).collect();
    let mut big_h = Vec::with_capacity(2 * n);
    for _ in 0..2 * n {
        big_h.push(v[0].clone());
        v = x0.mul_vec(&v).iter().map(fl).collect();
    }
    let h0 = big_h[0].clone();
    if h0.is_zero() {
        return Err(CoxError::NonGeneric("H_0(t) vanishes".into()));
    }
    let mut p: Vec<Rat> = x0.scale(&-Rat::one()).char_poly()?.iter().map(fl).collect();
    p.reverse();
    let m = MomentSeq::from_window(h0.clone(), 0, big_h.iter().map(|x| fl(&(x / &h0))).collect(), p)?;
    let mut cache = HankelCache::new(m);
    let mut coords = tau(pair.eps(), &mut cache)?;
    coords.x = coords.x.iter().map(fl).collect();
    let (d, c) = rho(&coords)?;
    let s = FlowState {
        t: start.t + t,
        c: c.iter().map(Scalar::to_f64).collect(),
        d: d.iter().map(Scalar::to_f64).collect(),
        eps: start.eps.clone(),
    };
    if s.c.iter().chain(&s.d).any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(CoxError::NonGeneric(format!("moment solution leaves the generic stratum at t = {t}")));
    }
    Ok(s)
}

/// Largest coordinate difference between two states.
pub fn sup_diff(a: &FlowState, b: &FlowState) -> f64 {
    a.packed().iter().zip(b.packed()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Named coordinates of the classical lattices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Reduction {
    /// Tridiagonal chart: `r_{2i−1} = d_i`, `r_{2i} = c_i d_i`.
    Volterra(Vec<f64>),
    /// Tridiagonal chart: `a_i = c_i d_i²`, `b_i = d_i + c_{i−1} d_{i−1}`.
    Toda { a: Vec<f64>, b: Vec<f64> },
    /// Chart `(2,1,…,1,0)`: `d` and `c̃_i = c_i d_i`.
    Relativistic { d: Vec<f64>, ct: Vec<f64> },
}

fn is_tridiagonal_chart(eps: &[u8]) -> bool {
    eps[0] == 2 && eps[1..].iter().all(|&e| e == 0)
}

fn is_relativistic_chart(eps: &[u8]) -> bool {
    let n = eps.len();
    eps[0] == 2 && eps[n - 1] == 0 && eps[1..n - 1].iter().all(|&e| e == 1)
}

pub fn volterra(s: &FlowState) -> Result<Vec<f64>> {
    if !is_tridiagonal_chart(&s.eps) {
        return Err(CoxError::InvalidMove("Volterra coordinates need the tridiagonal chart".into()));
    }
    let n = s.n();
    let mut r = Vec::with_capacity(2 * n - 1);
    for i in 0..n {
        r.push(s.d[i]);
        if i + 1 < n {
            r.push(s.c[i] * s.d[i]);
        }
    }
    Ok(r)
}

pub fn toda_ab(s: &FlowState) -> Result<(Vec<f64>, Vec<f64>)> {
    if !is_tridiagonal_chart(&s.eps) {
        return Err(CoxError::InvalidMove("Toda coordinates need the tridiagonal chart".into()));
    }
    let a = s.c.iter().zip(&s.d).map(|(c, d)| c * d * d).collect();
    let b = (0..s.n()).map(|i| s.d[i] + if i > 0 { s.c[i - 1] * s.d[i - 1] } else { 0.0 }).collect();
    Ok((a, b))
}

pub fn relativistic_coords(s: &FlowState) -> Result<(Vec<f64>, Vec<f64>)> {
    if !is_relativistic_chart(&s.eps) {
        return Err(CoxError::InvalidMove("relativistic coordinates need the chart (2,1,…,1,0)".into()));
    }
    Ok((s.d.clone(), s.c.iter().zip(&s.d).map(|(c, d)| c * d).collect()))
}

/// Every reduction the state's chart admits.
pub fn reductions(s: &FlowState) -> Result<Vec<Reduction>> {
    let mut out = Vec::new();
    if is_tridiagonal_chart(&s.eps) {
        out.push(Reduction::Volterra(volterra(s)?));
        let (a, b) = toda_ab(s)?;
        out.push(Reduction::Toda { a, b });
    }
    if is_relativistic_chart(&s.eps) {
        let (d, ct) = relativistic_coords(s)?;
        out.push(Reduction::Relativistic { d, ct });
    }
    if out.is_empty() {
        return Err(CoxError::InvalidMove(format!("no named lattice on the chart {:?}", s.eps)));
    }
    Ok(out)
}

/// Jacobi matrix with diagonal `b`, unit superdiagonal and subdiagonal `a`.
pub fn jacobi_matrix<T: Scalar>(a: &[T], b: &[T]) -> Matrix<T> {
    let n = b.len();
    let mut l = Matrix::diag(b);
    for i in 0..n - 1 {
        l.set(i, i + 1, T::one());
        l.set(i + 1, i, a[i].clone());
    }
    l
}

/// Centered-difference residual of a first order system along equally
/// spaced samples; `rhs` gives the right-hand side at a sample.
pub fn ode_residual(samples: &[Vec<f64>], dt: f64, rhs: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let mut worst = 0.0f64;
    for w in samples.windows(3) {
        let f = rhs(&w[1]);
        for (i, fi) in f.iter().enumerate() {
            let deriv = (w[2][i] - w[0][i]) / (2.0 * dt);
            worst = worst.max((deriv - fi).abs());
        }
    }
    worst
}

/// `ṙ_i = r_i (r_{i+1} − r_{i−1})` with `r_0 = r_{2n} = 0`.
pub fn volterra_rhs(r: &[f64]) -> Vec<f64> {
    let m = r.len();
    (0..m)
        .map(|i| {
            let next = if i + 1 < m { r[i + 1] } else { 0.0 };
            let prev = if i > 0 { r[i - 1] } else { 0.0 };
            r[i] * (next - prev)
        })
        .collect()
}

/// Relativistic lattice on packed `(d_1 … d_n, c̃_1 … c̃_{n−1})`:
/// `ḋ_i = d_i(c̃_i − c̃_{i−1})`, `c̃̇_i = c̃_i(d_{i+1} − d_i + c̃_{i+1} − c̃_{i−1})`.
pub fn relativistic_rhs(y: &[f64]) -> Vec<f64> {
    let n = (y.len() + 1) / 2;
    let d = &y[..n];
    let ct = |i: isize| if i >= 1 && (i as usize) < n { y[n + i as usize - 1] } else { 0.0 };
    let mut out = Vec::with_capacity(y.len());
    for i in 1..=n as isize {
        out.push(d[i as usize - 1] * (ct(i) - ct(i - 1)));
    }
    for i in 1..n as isize {
        out.push(ct(i) * (d[i as usize] - d[i as usize - 1] + ct(i + 1) - ct(i - 1)));
    }
    out
}

/// `max |ḣ_i − (h_{i+k} − h_k h_i)|` along a trajectory, for `i ∈ [1, imax]`,
/// with `ḣ` from the five-point centered stencil.
pub fn moment_residual(pair: &CoxeterPair, traj: &[FlowState], k: u32, imax: u32, dt: f64) -> Result<f64> {
    let moments = |s: &FlowState| -> Vec<f64> {
        let x = s.matrix(pair);
        let n = x.rows();
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        let mut h = Vec::new();
        for _ in 0..=(imax + k) {
            h.push(v[0]);
            v = x.mul_vec(&v);
        }
        h
    };
    let hs: Vec<Vec<f64>> = traj.iter().map(moments).collect();
    let k = k as usize;
    let mut worst = 0.0f64;
    for w in hs.windows(5) {
        for i in 1..=imax as usize {
            let deriv = (w[0][i] - 8.0 * w[1][i] + 8.0 * w[3][i] - w[4][i]) / (12.0 * dt);
            worst = worst.max((deriv - (w[2][i + k] - w[2][k] * w[2][i])).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::build_x;
    use crate::linalg::{rat, Rat};
    use proptest::prelude::*;

    fn state(pair: &CoxeterPair, c: &[f64], d: &[f64]) -> FlowState {
        FlowState::new(pair, c.to_vec(), d.to_vec()).unwrap()
    }

    fn exact(c: &[i64], d: &[i64]) -> (Vec<Rat>, Vec<Rat>) {
        (c.iter().map(|&v| rat(v, 1)).collect(), d.iter().map(|&v| rat(v, 1)).collect())
    }

    #[test]
    fn f1_forms_agree() {
        let running = CoxeterPair::from_sets(5, vec![1, 3, 4, 5], vec![1, 4, 5]).unwrap();
        let (c, d) = exact(&[2, 3, 5, 7], &[11, 13, 17, 19, 23]);
        let expect = &d[0] + &d[1] + &c[0] * &d[0] + &d[2] + &c[1] * &d[1] + &c[1] * &c[0] * &d[0] + &d[3] + &c[2] * &d[2] + &d[4] + &c[3] * &d[3];
        assert_eq!(f1_closed_form(&running, &c, &d), expect);
        let p = FactorParams::reduced(d.clone(), c.clone()).unwrap();
        assert_eq!(hamiltonian_fk_exact(&running, &p, 1).unwrap(), expect);
        for pair in CoxeterPair::all(4) {
            let (c, d) = exact(&[2, -3, 5], &[7, 4, -1, 6]);
            let p = FactorParams::reduced(d.clone(), c.clone()).unwrap();
            assert_eq!(hamiltonian_fk_exact(&pair, &p, 1).unwrap(), f1_closed_form(&pair, &c, &d));
        }
        let tri = CoxeterPair::tridiagonal(2).unwrap();
        assert_eq!(hamiltonian_fk(&tri, &state(&tri, &[1.0], &[1.0, 1.0]), 1).unwrap(), 3.0);
    }

    #[test]
    fn bracket_table_entries() {
        let t = BracketTable::new(&[2, 1, 2, 0]);
        // packed: c1 c2 c3 d1 d2 d3 d4
        assert_eq!(t.coeff(0, 1), 0);
        assert_eq!(t.coeff(1, 2), 1);
        assert_eq!(t.coeff(2, 1), -1);
        assert_eq!(t.coeff(0, 3), -1);
        assert_eq!(t.coeff(0, 4), 1);
        assert_eq!(t.coeff(0, 5), 0);
        assert_eq!(t.coeff(4, 5), 0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for pair in CoxeterPair::all(4) {
            let s = state(&pair, &[0.7, -1.3, 0.4], &[1.1, 0.9, -0.6, 1.7]);
            for k in 1..=3 {
                let g = gradient_fk(&pair, &s, k).unwrap();
                let y = s.packed();
                for b in 0..y.len() {
                    let h = 1e-6;
                    let mut up = y.clone();
                    up[b] += h;
                    let mut dn = y.clone();
                    dn[b] -= h;
                    let fd = (hamiltonian_fk(&pair, &s.unpack(0.0, &up), k).unwrap() - hamiltonian_fk(&pair, &s.unpack(0.0, &dn), k).unwrap()) / (2.0 * h);
                    assert!((fd - g[b]).abs() < 1e-6, "k={k} b={b}: {fd} vs {}", g[b]);
                }
            }
        }
    }

    #[test]
    fn named_vector_fields() {
        let n = 4;
        let (c, d) = ([0.5, 1.5, -0.3], [1.2, 0.8, 2.0, -1.1]);
        let cd = |i: usize| if (1..n).contains(&i) { c[i - 1] * d[i - 1] } else { 0.0 };
        let tri = CoxeterPair::tridiagonal(n).unwrap();
        let v = vector_field(&tri, &state(&tri, &c, &d), 1).unwrap();
        for i in 1..=n {
            let dd = d[i - 1] * (cd(i) - cd(i - 1));
            assert!((v[n - 1 + i - 1] - dd).abs() < 1e-12);
        }
        for i in 1..n {
            let cc = c[i - 1] * (d[i] - d[i - 1] + cd(i - 1) - cd(i));
            assert!((v[i - 1] - cc).abs() < 1e-12);
        }
        let rel = CoxeterPair::relativistic(n).unwrap();
        let v = vector_field(&rel, &state(&rel, &c, &d), 1).unwrap();
        for i in 1..=n {
            assert!((v[n - 1 + i - 1] - d[i - 1] * (cd(i) - cd(i - 1))).abs() < 1e-12);
        }
        for i in 1..n {
            let cc = c[i - 1] * (d[i] - d[i - 1] + cd(i + 1) - cd(i));
            assert!((v[i - 1] - cc).abs() < 1e-12);
        }
        // d and c_i d_i constant: interior d's are at rest, the open ends are not
        let v = vector_field(&tri, &state(&tri, &[0.5, 0.5, 0.5], &[2.0; 4]), 1).unwrap();
        assert!(v[n..2 * n - 2].iter().all(|x| x.abs() < 1e-14));
        assert_eq!(v[n - 1], 2.0);
        assert_eq!(v[2 * n - 2], -2.0);
    }

    #[test]
    fn rk4_conserves_and_is_fourth_order() {
        let tri = CoxeterPair::tridiagonal(3).unwrap();
        let s = state(&tri, &[0.6, 1.3], &[0.9, 1.4, 0.7]);
        let tr = rk4_flow(&tri, &s, 1, 1.0, 1e-3).unwrap();
        assert_eq!(tr.states.len(), 1001);
        assert!(tr.report.f_drift.iter().all(|&x| x < 1e-8), "{:?}", tr.report);
        assert!(tr.report.det_drift < 1e-10);
        let reference = moment_flow_state(&tri, &s, 1, 1.0).unwrap();
        let err = |dt: f64| sup_diff(rk4_flow(&tri, &s, 1, 1.0, dt).unwrap().states.last().unwrap(), &reference);
        let ratio = err(0.1) / err(0.05);
        assert!((10.0..24.0).contains(&ratio), "ratio {ratio}");
        let zero = rk4_flow(&tri, &s, 1, 0.0, 1e-3).unwrap();
        assert_eq!(zero.states, vec![s]);
    }

    #[test]
    fn moment_solver_matches_rk4() {
        for pair in [CoxeterPair::tridiagonal(3).unwrap(), CoxeterPair::relativistic(4).unwrap()] {
            let n = pair.n();
            let c: Vec<f64> = (0..n - 1).map(|i| 0.4 + 0.3 * i as f64).collect();
            let d: Vec<f64> = (0..n).map(|i| 1.5 - 0.2 * i as f64).collect();
            let s = state(&pair, &c, &d);
            for k in 1..=2 {
                let tr = rk4_flow(&pair, &s, k, 0.5, 1e-3).unwrap();
                let m = moment_flow_state(&pair, &s, k, 0.5).unwrap();
                assert!(sup_diff(tr.states.last().unwrap(), &m) < 1e-6);
                assert!(tr.report.charpoly_drift < 1e-9);
                let res = moment_residual(&pair, &tr.states, k, 3, 1e-3).unwrap();
                assert!(res < 1e-5, "n={n} k={k} residual {res}");
            }
        }
        let tri = CoxeterPair::tridiagonal(3).unwrap();
        let p = FactorParams::reduced(vec![rat(3, 2), rat(1, 1), rat(2, 3)], vec![rat(1, 2), rat(5, 4)]).unwrap();
        let at0 = moment_flow(&tri, &p, 1, 0.0).unwrap();
        assert!(sup_diff(&at0, &FlowState::from_params(&tri, &p).unwrap()) < 1e-12);
    }

    #[test]
    fn moment_solver_is_stable_on_every_chart() {
        // c_1 decays like e^{-t(λ_1^k − λ_2^k)} here, which wipes out a
        // double precision evaluation of the Hankel determinants
        for eps in crate::coxeter::all_eps(4) {
            let pair = CoxeterPair::canonical_for_eps(&eps).unwrap();
            let s = state(&pair, &[0.9, 0.3, 0.8], &[1.4, 1.2, 0.6, 1.3]);
            for k in 1..=2 {
                let tr = rk4_flow(&pair, &s, k, 1.0, 5e-4).unwrap();
                for st in tr.states.iter().step_by(500).skip(1) {
                    let m = moment_flow_state(&pair, &s, k, st.t).unwrap();
                    assert!(sup_diff(st, &m) < 1e-6, "{eps:?} k={k} t={}", st.t);
                }
                assert!(tr.report.det_drift < 1e-10 && tr.report.charpoly_drift < 1e-9, "{eps:?} k={k}");
            }
        }
    }

    #[test]
    fn reductions_and_volterra() {
        let tri = CoxeterPair::tridiagonal(3).unwrap();
        let s = state(&tri, &[1.0, 1.0], &[1.0, 1.0, 1.0]);
        assert_eq!(volterra(&s).unwrap(), vec![1.0; 5]);
        assert_eq!(toda_ab(&s).unwrap(), (vec![1.0, 1.0], vec![1.0, 2.0, 2.0]));
        assert!(matches!(relativistic_coords(&s), Err(CoxError::InvalidMove(_))));
        let l = jacobi_matrix(&[1.0, 1.0], &[1.0, 2.0, 2.0]);
        assert_eq!(l.get(0, 1), &1.0);
        assert_eq!(l.get(0, 2), &0.0);
        let s = state(&tri, &[0.6, 1.3], &[0.9, 1.4, 0.7]);
        let tr = rk4_flow(&tri, &s, 1, 1.0, 1e-3).unwrap();
        let rs: Vec<Vec<f64>> = tr.states.iter().map(|s| volterra(s).unwrap()).collect();
        assert!(ode_residual(&rs, 1e-3, volterra_rhs) < 1e-5);
        let rel = CoxeterPair::relativistic(3).unwrap();
        let tr = rk4_flow(&rel, &state(&rel, &[0.6, 1.3], &[0.9, 1.4, 0.7]), 1, 1.0, 1e-3).unwrap();
        let ys: Vec<Vec<f64>> = tr.states.iter().map(|s| {
            let (d, ct) = relativistic_coords(s).unwrap();
            d.into_iter().chain(ct).collect()
        }).collect();
        assert!(ode_residual(&ys, 1e-3, relativistic_rhs) < 1e-5);
    }

    #[test]
    fn jacobi_matrix_conjugate_to_cell_element() {
        let tri = CoxeterPair::tridiagonal(3).unwrap();
        let p = FactorParams::reduced(vec![rat(2, 1), rat(3, 1), rat(5, 1)], vec![rat(7, 1), rat(11, 1)]).unwrap();
        let x = build_x(&tri, &p).unwrap();
        let s = FlowState::from_params(&tri, &p).unwrap();
        let (a, b) = toda_ab(&s).unwrap();
        let l = jacobi_matrix(&a, &b);
        let xf = x.to_f64();
        for k in 1..=3 {
            assert!((l.pow(k).unwrap().trace() - xf.pow(k).unwrap().trace()).abs() < 1e-9);
        }
    }

    #[test]
    fn diverging_flow_reported() {
        let tri = CoxeterPair::tridiagonal(2).unwrap();
        let s = state(&tri, &[-50.0], &[40.0, -40.0]);
        assert!(matches!(rk4_flow(&tri, &s, 1, 100.0, 0.5), Err(CoxError::FlowDiverged(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn flows_commute(c in proptest::collection::vec(0.3f64..1.5, 2), d in proptest::collection::vec(0.3f64..1.5, 3)) {
            let tri = CoxeterPair::tridiagonal(3).unwrap();
            let s = state(&tri, &c, &d);
            let tr = rk4_flow(&tri, &s, 2, 0.3, 1e-3).unwrap();
            prop_assert!(tr.report.f_drift.iter().all(|&x| x < 1e-8));
        }
    }
}

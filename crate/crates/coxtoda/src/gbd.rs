//! Generalized Bäcklund–Darboux maps between the quotients of two Coxeter
//! cells (three independent routes), the classical Darboux map and its
//! cluster realization.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::cluster::{eps0, seed_init, swap_pair, mutate, transport, transport_path, EpsMove, MoveRow, SeedTag};
use crate::coxeter::{build_x, kappa_of, params_from_x, validate_eps, CoxeterPair, FactorParams};
use crate::error::{CoxError, Result};
use crate::linalg::{powi, rat_nth_root, Matrix, Rat, RatMatrix, Scalar};
use crate::weyl::{restore_params, rho_params, ClusterCoords, HankelCache, MomentSeq};

/// Source and target cells plus a point of the source quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct GbdRequest {
    pub from: CoxeterPair,
    pub to: CoxeterPair,
    pub params: FactorParams,
}

impl GbdRequest {
    pub fn new(from: CoxeterPair, to: CoxeterPair, params: FactorParams) -> Result<Self> {
        if from.n() != to.n() {
            return Err(CoxError::Argument("pairs differ in size".into()));
        }
        params.validate(from.n())?;
        Ok(GbdRequest { from, to, params: params.to_reduced() })
    }

    /// Request keyed by ε-tuples through their canonical pairs.
    pub fn from_eps(from: &[u8], to: &[u8], params: FactorParams) -> Result<Self> {
        Self::new(CoxeterPair::canonical_for_eps(from)?, CoxeterPair::canonical_for_eps(to)?, params)
    }

    pub fn inverse(&self, params: FactorParams) -> Result<Self> {
        Self::new(self.to.clone(), self.from.clone(), params)
    }
}

/// `σ = ρ_{ε′} ∘ T_ε^{ε′} ∘ τ_ε`.
pub fn sigma_cluster(req: &GbdRequest) -> Result<FactorParams> {
    let x = build_x(&req.from, &req.params)?;
    let mut cache = HankelCache::new(MomentSeq::of(&x)?);
    let seed = seed_init(req.from.eps(), &mut cache)?;
    let moved = transport(&seed, req.to.eps())?;
    rho_params(&ClusterCoords { x: moved.x, eps: req.to.eps().to_vec() })
}

fn one_plus(c: &Rat) -> Result<Rat> {
    let v = Rat::one() + c;
    if v.is_zero() {
        return Err(CoxError::NonGeneric("1 + c_i = 0".into()));
    }
    Ok(v)
}

fn nz(v: Rat, what: &str) -> Result<Rat> {
    if v.is_zero() {
        return Err(CoxError::NonGeneric(format!("{what} = 0")));
    }
    Ok(v)
}

/// One elementary transformation from the closed-form table; inverse moves
/// use the printed inverse column. Returns the new ε and parameters.
pub fn sigma_table(eps: &[u8], p: &FactorParams, m: EpsMove) -> Result<(Vec<u8>, FactorParams)> {
    let target = m.apply_eps(eps)?;
    p.validate(eps.len())?;
    let mut c = p.c();
    let mut d = p.d.clone();
    let i = m.i;
    // 0-based views
    let (ci, di, dj) = (i - 1, i - 1, i);
    match (m.row, m.inverse) {
        (MoveRow::R1 | MoveRow::R5, false) => {
            let s = nz(&d[dj] + &c[ci] * &d[di], "d_{i+1} + c_i d_i")?;
            let (c0, d0, d1) = (c[ci].clone(), d[di].clone(), d[dj].clone());
            c[ci] = &c0 * &d0 / &d1;
            d[di] = &d0 * &d1 / &s;
            d[dj] = s;
        }
        (MoveRow::R1 | MoveRow::R5, true) => {
            let q = one_plus(&c[ci])?;
            let (c0, d0, d1) = (c[ci].clone(), d[di].clone(), d[dj].clone());
            c[ci] = &c0 * &d1 / (&d0 * &q * &q);
            d[di] = &d0 * &q;
            d[dj] = &d1 / &q;
        }
        (MoveRow::R2 | MoveRow::R3 | MoveRow::R4, false) => {
            let q = one_plus(&c[ci])?;
            let (c0, d0, d1) = (c[ci].clone(), d[di].clone(), d[dj].clone());
            c[ci] = &c0 * &d1 / (&d0 * &q * &q);
            // ε_i: 2 → 1 touches c_{i−1}, ε_{i+1}: 0 → 1 touches c_{i+1}
            if matches!(m.row, MoveRow::R2 | MoveRow::R4) {
                c[ci - 1] = &c[ci - 1] * &q;
            }
            if matches!(m.row, MoveRow::R2 | MoveRow::R3) {
                c[ci + 1] = &c[ci + 1] * &q;
            }
            d[di] = &d0 * &q;
            d[dj] = &d1 / &q;
        }
        (MoveRow::R2 | MoveRow::R3 | MoveRow::R4, true) => {
            let s = nz(&d[dj] + &c[ci] * &d[di], "d′_{i+1} + c′_i d′_i")?;
            let (c0, d0, d1) = (c[ci].clone(), d[di].clone(), d[dj].clone());
            c[ci] = &c0 * &d0 / &d1;
            if matches!(m.row, MoveRow::R2 | MoveRow::R4) {
                c[ci - 1] = &c[ci - 1] * &d1 / &s;
            }
            if matches!(m.row, MoveRow::R2 | MoveRow::R3) {
                c[ci + 1] = &c[ci + 1] * &d1 / &s;
            }
            d[di] = &d0 * &d1 / &s;
            d[dj] = s;
        }
        (MoveRow::R6, false) => {
            let s = nz(&d[dj] + &c[ci] * &d[di], "d_n + c_{n−1} d_{n−1}")?;
            let (c0, d0, d1) = (c[ci].clone(), d[di].clone(), d[dj].clone());
            c[ci] = &c0 * &d0 / &d1;
            c[ci - 1] = &c[ci - 1] * &d1 / &s;
            d[di] = &d0 * &d1 / &s;
            d[dj] = s;
        }
        (MoveRow::R6, true) => {
            let q = one_plus(&c[ci])?;
            let (c0, d0, d1) = (c[ci].clone(), d[di].clone(), d[dj].clone());
            c[ci] = &c0 * &d1 / (&d0 * &q * &q);
            c[ci - 1] = &c[ci - 1] * &q;
            d[di] = &d0 * &q;
            d[dj] = &d1 / &q;
        }
    }
    for v in c.iter().chain(&d) {
        if v.is_zero() {
            return Err(CoxError::NonGeneric("a transformed parameter vanishes".into()));
        }
    }
    Ok((target, FactorParams::reduced(d, c)?))
}

/// The table applied along the canonical transport path.
pub fn sigma_table_path(req: &GbdRequest) -> Result<FactorParams> {
    let mut eps = req.from.eps().to_vec();
    let mut p = req.params.clone();
    for m in transport_path(&eps.clone(), req.to.eps())? {
        (eps, p) = sigma_table(&eps, &p, m)?;
    }
    Ok(p)
}

/// Leading principal minors of powers of one matrix, memoized.
pub struct PowerMinors<T: Scalar> {
    x: Matrix<T>,
    powers: HashMap<i64, Matrix<T>>,
}

impl<T: Scalar> PowerMinors<T> {
    pub fn new(x: Matrix<T>) -> Self {
        PowerMinors { x, powers: HashMap::new() }
    }

    /// `(X^m)_{[i]}`, with `(·)_{[0]} = 1`.
    pub fn get(&mut self, m: i64, i: usize) -> Result<T> {
        if i == 0 {
            return Ok(T::one());
        }
        if !self.powers.contains_key(&m) {
            let pm = self.x.pow(m)?;
            self.powers.insert(m, pm);
        }
        self.powers[&m].leading_minor(i)
    }
}

fn nonzero<T: Scalar>(v: T) -> Result<T> {
    if v.is_zero() {
        return Err(CoxError::NonGeneric("vanishing principal minor".into()));
    }
    Ok(v)
}

/// `σ` from leading principal minors of powers of `X` (built with
/// `c^- = c`, `c^+ = 1`). The two power factors carry exponents `ε′`.
pub fn sigma_minors(req: &GbdRequest) -> Result<FactorParams> {
    let x = build_x(&req.from, &req.params)?;
    let (d, c) = minor_formula(x, &req.params.c(), &req.params.d, req.from.eps(), req.to.eps())?;
    FactorParams::reduced(d, c)
}

/// Core of [`sigma_minors`] over any scalar.
pub fn minor_formula<T: Scalar>(x: Matrix<T>, c: &[T], d: &[T], eps: &[u8], eps_to: &[u8]) -> Result<(Vec<T>, Vec<T>)> {
    validate_eps(eps)?;
    validate_eps(eps_to)?;
    let n = eps.len();
    let (k, k2) = (kappa_of(eps), kappa_of(eps_to));
    // δκ_j for j ∈ [0, n], δκ_0 = 0
    let dk: Vec<i64> = std::iter::once(0).chain((0..n).map(|j| k2[j] - k[j])).collect();
    let mut pm = PowerMinors::new(x);
    let mut dn = Vec::with_capacity(n);
    for i in 1..=n {
        let num = pm.get(dk[i] + 1, i)? * pm.get(dk[i - 1], i - 1)?;
        let den = pm.get(dk[i], i)? * pm.get(dk[i - 1] + 1, i - 1)?;
        dn.push(num / nonzero(den)?);
    }
    let mut cn = Vec::with_capacity(n - 1);
    for i in 1..n {
        let gamma = c[i - 1].clone() * d[i - 1].clone() * d[i - 1].clone() * powi(&pm.get(1, i - 1)?, eps[i - 1] as i64)?
            / nonzero(powi(&pm.get(1, i + 1)?, eps[i] as i64)?)?;
        let mid = pm.get(dk[i - 1], i - 1)? * pm.get(dk[i + 1], i + 1)? / nonzero(powi(&pm.get(dk[i] + 1, i)?, 2)?)?;
        let up = pm.get(dk[i + 1] + 1, i + 1)? / nonzero(pm.get(dk[i + 1], i + 1)?)?;
        let down = pm.get(dk[i - 1] + 1, i - 1)? / nonzero(pm.get(dk[i - 1], i - 1)?)?;
        cn.push(gamma * mid * powi(&up, eps_to[i] as i64)? * powi(&down, 2 - eps_to[i - 1] as i64)?);
    }
    Ok((dn, cn))
}

/// Every σ route at once, with an agreement flag.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaRoutes {
    pub cluster: FactorParams,
    pub table: FactorParams,
    pub minors: FactorParams,
}

impl SigmaRoutes {
    pub fn agree(&self) -> bool {
        self.cluster == self.table && self.cluster == self.minors
    }
}

pub fn sigma_all(req: &GbdRequest) -> Result<SigmaRoutes> {
    Ok(SigmaRoutes { cluster: sigma_cluster(req)?, table: sigma_table_path(req)?, minors: sigma_minors(req)? })
}

/// `D(X) = X_0 X_+ X_−` for `X = X_− X_0 X_+`.
pub fn darboux_d(x: &RatMatrix) -> Result<RatMatrix> {
    let (l, d, u) = x.gauss_ldu()?;
    Ok(Matrix::diag(&d).mul(&u).mul(&l))
}

/// `𝒟 = ρ ∘ x ∘ η ∘ m`: parameters of `D(X)` from the shifted moments.
pub fn cal_d(pair: &CoxeterPair, p: &FactorParams) -> Result<FactorParams> {
    let m = MomentSeq::of(&build_x(pair, p)?)?;
    restore_params(pair, &m.eta()?)
}

/// `𝒟` through the matrix route: `params_from_x(D(X))` in the reduced gauge.
pub fn cal_d_direct(pair: &CoxeterPair, p: &FactorParams) -> Result<FactorParams> {
    Ok(params_from_x(pair, &darboux_d(&build_x(pair, p)?)?)?.to_reduced())
}

/// `d` rescaled so that `det X = Π d_i = 1`, with the factor `s` applied
/// (`d ↦ s d`); `None` when `det X` has no rational `n`-th root.
pub fn det_one_scaling(p: &FactorParams) -> Option<(FactorParams, Rat)> {
    let det: Rat = p.d.iter().fold(Rat::one(), |a, b| a * b);
    let n = p.n() as u32;
    let r = rat_nth_root(&det, n)?;
    let s = Rat::one() / r;
    let d = p.d.iter().map(|v| v * &s).collect();
    Some((FactorParams { d, c_plus: p.c_plus.clone(), c_minus: p.c_minus.clone() }, s))
}

/// `𝒟` through cluster transformations on the `det X = 1` slice:
/// transport to `ε^{(0)}`, mutate at `1, 3, …, 2n−3`, exchange every
/// `(0,i)`/`(1,i)` pair, transport back, apply `ρ`.
pub fn cal_d_cluster(pair: &CoxeterPair, p: &FactorParams) -> Result<FactorParams> {
    let (scaled, s) = det_one_scaling(p)
        .ok_or_else(|| CoxError::InvalidParams("det X has no rational n-th root; cannot reach the det-1 slice".into()))?;
    let n = pair.n();
    let mut cache = HankelCache::new(MomentSeq::of(&build_x(pair, &scaled)?)?);
    let start = seed_init(pair.eps(), &mut cache)?;
    let mut seed = transport(&start, &eps0(n))?;
    seed = shift_on_slice(&seed)?;
    let back = transport(&seed, pair.eps())?;
    let out = rho_params(&ClusterCoords { x: back.x, eps: pair.eps().to_vec() })?;
    let d = out.d.iter().map(|v| v / &s).collect();
    FactorParams::reduced(d, out.c())
}

/// The unit moment shift at `ε^{(0)}` with `x_{2n} = 1`.
pub fn shift_on_slice(seed: &crate::cluster::ClusterSeed) -> Result<crate::cluster::ClusterSeed> {
    let n = seed.n();
    if seed.eps() != Some(&eps0(n)[..]) {
        return Err(CoxError::InvalidMove("the unit shift needs the chart ε = (2,0,…,0)".into()));
    }
    if !seed.x[2 * n - 1].is_one() {
        return Err(CoxError::InvalidParams("the unit shift needs x_{2n} = 1".into()));
    }
    let mut s = seed.clone();
    for k in (0..n - 1).map(|j| 2 * j) {
        s = mutate(&s, k)?;
    }
    for i in 1..n {
        s = swap_pair(&s, i);
    }
    // the x_{2n} column is erased on the slice; restore the chart's column
    let reference = crate::network::b_matrix(CoxeterPair::canonical_for_eps(&eps0(n))?.comb()).1;
    for (row, r) in s.b.iter_mut().zip(&reference) {
        row[2 * n - 1] = r[2 * n - 1];
    }
    s.tag = Some(SeedTag { eps: eps0(n), shift: 0 });
    Ok(s)
}

/// Corollary map from a Jacobi matrix `L` (entries `a`, `b`) of the
/// tridiagonal lattice to relativistic coordinates `(d′, c̃′)`:
/// `d′_i = (L^{2−i})_{[i]}(L^{2−i})_{[i−1]} / ((L^{1−i})_{[i]}(L^{3−i})_{[i−1]})`,
/// `c̃′_i = a_i (L^{1−i})_{[i+1]}(L^{2−i})_{[i−1]} / ((L^{1−i})_{[i]}(L^{2−i})_{[i]})`.
pub fn toda_to_relativistic<T: Scalar>(a: &[T], b: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let n = b.len();
    let mut pm = PowerMinors::new(crate::toda::jacobi_matrix(a, b));
    let mut d = Vec::with_capacity(n);
    for i in 1..=n {
        let ii = i as i64;
        let num = pm.get(2 - ii, i)? * pm.get(2 - ii, i - 1)?;
        let den = pm.get(1 - ii, i)? * pm.get(3 - ii, i - 1)?;
        d.push(num / nonzero(den)?);
    }
    let mut ct = Vec::with_capacity(n - 1);
    for i in 1..n {
        let ii = i as i64;
        let num = a[i - 1].clone() * pm.get(1 - ii, i + 1)? * pm.get(2 - ii, i - 1)?;
        let den = pm.get(1 - ii, i)? * pm.get(2 - ii, i)?;
        ct.push(num / nonzero(den)?);
    }
    Ok((d, ct))
}

/// The corollary's `c̃′` exactly as printed:
/// `a_i (L^{−i})_{[i+1]}(L^{3−i})_{[i−1]} / ((L^{1−i})_{[i]}(L^{2−i})_{[i]})`.
pub fn printed_relativistic_ct<T: Scalar>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    let n = b.len();
    let mut pm = PowerMinors::new(crate::toda::jacobi_matrix(a, b));
    (1..n)
        .map(|i| {
            let ii = i as i64;
            let num = a[i - 1].clone() * pm.get(-ii, i + 1)? * pm.get(3 - ii, i - 1)?;
            Ok(num / nonzero(pm.get(1 - ii, i)? * pm.get(2 - ii, i)?)?)
        })
        .collect()
}

/// Relativistic coordinates along a tridiagonal trajectory, packed as
/// `(d′_1 … d′_n, c̃′_1 … c̃′_{n−1})` per sample.
pub fn relativistic_trajectory(traj: &[crate::toda::FlowState]) -> Result<Vec<Vec<f64>>> {
    traj.iter()
        .map(|s| {
            let (a, b) = crate::toda::toda_ab(s)?;
            let (d, ct) = toda_to_relativistic(&a, &b)?;
            if d.iter().chain(&ct).any(|v| !v.is_finite()) {
                return Err(CoxError::NonGeneric(format!("vanishing minor at t = {}", s.t)));
            }
            Ok(d.into_iter().chain(ct).collect())
        })
        .collect()
}

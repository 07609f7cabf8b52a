//! Coxeter elements of S_n, the combinatorial data of a pair of them, the
//! bidiagonal factorization of Coxeter cell elements and its inversion.
//!
//! Index sets `I`, `L` and all per-index arrays follow 1-based mathematical
//! labels in their *values*; arrays themselves are 0-based (`d[0]` is d_1).

use num_traits::{One, Zero};

use crate::error::{CoxError, Result};
use crate::linalg::{rank, Matrix, Rat, RatMatrix, Scalar};

/// A Coxeter element `v = s_[i_{k-1},i_k] ⋯ s_[i_1,i_2] s_[1,i_1]` stored by
/// its index set `I = {1 = i_0 < … < i_k = n}`, where `s_[p,q] = s_p ⋯ s_{q-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoxeterElement {
    n: usize,
    iset: Vec<usize>,
}

impl CoxeterElement {
    pub fn new(n: usize, iset: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(CoxError::Argument("Coxeter elements need n >= 2".into()));
        }
        let ok = iset.first() == Some(&1)
            && iset.last() == Some(&n)
            && iset.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(CoxError::Argument(format!("{iset:?} is not an index set 1 = i_0 < ... < i_k = {n}")));
        }
        Ok(CoxeterElement { n, iset })
    }

    /// Recovers `I` from any word using each of `s_1..s_{n-1}` once. Only the
    /// relative order of the non-commuting neighbours `s_{i-1}`, `s_i` matters:
    /// `i ∈ I` exactly when `s_i` stands to the left of `s_{i-1}`.
    pub fn from_word(n: usize, word: &[usize]) -> Result<Self> {
        if n < 2 || word.len() != n - 1 {
            return Err(CoxError::NotCoxeter(format!("word of length {} for n = {n}", word.len())));
        }
        let mut pos = vec![usize::MAX; n];
        for (p, &g) in word.iter().enumerate() {
            if g == 0 || g >= n {
                return Err(CoxError::NotCoxeter(format!("generator s_{g} outside S_{n}")));
            }
            if pos[g] != usize::MAX {
                return Err(CoxError::NotCoxeter(format!("generator s_{g} repeated")));
            }
            pos[g] = p;
        }
        let mut iset = vec![1];
        iset.extend((2..n).filter(|&i| pos[i] < pos[i - 1]));
        iset.push(n);
        Self::new(n, iset)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn iset(&self) -> &[usize] {
        &self.iset
    }
    /// Number of blocks `k` (so `I = {i_0, …, i_k}`).
    pub fn k(&self) -> usize {
        self.iset.len() - 1
    }

    /// The canonical reduced word, generators listed left to right.
    pub fn word(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.n - 1);
        for j in (1..self.iset.len()).rev() {
            w.extend(self.iset[j - 1]..self.iset[j]);
        }
        w
    }

    /// `L = {1} ∪ ([1,n] \ I) ∪ {n}`, the index set of the inverse.
    pub fn inverse_sets(&self) -> Vec<usize> {
        let mut l = vec![1];
        l.extend((2..self.n).filter(|i| !self.iset.contains(i)));
        l.push(self.n);
        l
    }

    pub fn inverse(&self) -> CoxeterElement {
        CoxeterElement { n: self.n, iset: self.inverse_sets() }
    }

    /// `ṽ = Σ_j e_{i_{j-1} i_j} + Σ_j e_{l_j l_{j-1}}`.
    pub fn perm_matrix(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.n, self.n);
        for w in self.iset.windows(2) {
            m.set(w[0] - 1, w[1] - 1, Rat::one());
        }
        for w in self.inverse_sets().windows(2) {
            m.set(w[1] - 1, w[0] - 1, Rat::one());
        }
        m
    }

    /// Every Coxeter element of S_n in lexicographic order of `I`.
    pub fn all(n: usize) -> Vec<CoxeterElement> {
        let inner = n.saturating_sub(2);
        (0..1usize << inner)
            .map(|mask| {
                let mut iset = vec![1];
                iset.extend((0..inner).filter(|b| mask >> b & 1 == 1).map(|b| b + 2));
                iset.push(n);
                CoxeterElement { n, iset }
            })
            .collect()
    }
}

/// Permutation matrix of the product `s_{w_1} s_{w_2} ⋯` of adjacent
/// transpositions, multiplied out as matrices.
pub fn word_matrix(n: usize, word: &[usize]) -> RatMatrix {
    word.iter().fold(RatMatrix::identity(n), |acc, &g| {
        let mut s = RatMatrix::identity(n);
        s.set(g - 1, g - 1, Rat::zero());
        s.set(g, g, Rat::zero());
        s.set(g - 1, g, Rat::one());
        s.set(g, g - 1, Rat::one());
        acc.mul(&s)
    })
}

/// Combinatorial data of a Coxeter pair. Index 0 of each array is label 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombData {
    pub n: usize,
    pub eps_plus: Vec<u8>,
    pub eps_minus: Vec<u8>,
    pub zeta_plus: Vec<i64>,
    pub zeta_minus: Vec<i64>,
    pub k_plus: Vec<i64>,
    pub k_minus: Vec<i64>,
    pub eps: Vec<u8>,
    pub kappa: Vec<i64>,
    pub eps_bar_plus: Vec<u8>,
    pub eps_bar_minus: Vec<u8>,
}

fn eps_of(c: &CoxeterElement) -> Vec<u8> {
    (1..=c.n).map(|i| u8::from(i == 1 || !c.iset.contains(&i))).collect()
}

fn zeta_of(e: &[u8]) -> Vec<i64> {
    let mut acc = 0i64;
    e.iter()
        .enumerate()
        .map(|(idx, &x)| {
            let z = (idx as i64 + 1) * (1 - x as i64) - acc;
            acc += x as i64;
            z
        })
        .collect()
}

fn k_of(e: &[u8]) -> Vec<i64> {
    let mut acc = 0i64;
    e.iter()
        .enumerate()
        .map(|(idx, &x)| {
            acc += x as i64;
            idx as i64 + 1 - acc
        })
        .collect()
}

fn eps_bar_of(e: &[u8]) -> Vec<u8> {
    let n = e.len();
    (0..n).map(|i| if i == 0 { 1 } else { 1 - e[i] }).collect()
}

/// `κ_i = i + 1 − Σ_{β≤i} ε_β`.
pub fn kappa_of(eps: &[u8]) -> Vec<i64> {
    let mut acc = 0i64;
    eps.iter()
        .enumerate()
        .map(|(idx, &x)| {
            acc += x as i64;
            idx as i64 + 2 - acc
        })
        .collect()
}

/// Checks `ε_1 = 2`, `ε_n = 0`, entries in {0,1,2}.
pub fn validate_eps(eps: &[u8]) -> Result<()> {
    let n = eps.len();
    if n < 2 || eps[0] != 2 || eps[n - 1] != 0 || eps.iter().any(|&e| e > 2) {
        return Err(CoxError::Argument(format!("{eps:?} is not a valid ε (ε_1 = 2, ε_n = 0, entries in 0..=2)")));
    }
    Ok(())
}

/// All valid ε tuples of length `n` in lexicographic order.
pub fn all_eps(n: usize) -> Vec<Vec<u8>> {
    let inner = n.saturating_sub(2) as u32;
    (0..3usize.pow(inner))
        .map(|mut code| {
            let mut e = vec![2u8];
            let mut mid = Vec::new();
            for _ in 0..inner {
                mid.push((code % 3) as u8);
                code /= 3;
            }
            mid.reverse();
            e.extend(mid);
            e.push(0);
            e
        })
        .collect()
}

impl CombData {
    pub fn new(u: &CoxeterElement, v: &CoxeterElement) -> Result<Self> {
        if u.n != v.n {
            return Err(CoxError::Argument("Coxeter pair of different sizes".into()));
        }
        let eps_plus = eps_of(v);
        let eps_minus = eps_of(&u.inverse());
        let eps: Vec<u8> = eps_plus.iter().zip(&eps_minus).map(|(a, b)| a + b).collect();
        Ok(CombData {
            n: u.n,
            zeta_plus: zeta_of(&eps_plus),
            zeta_minus: zeta_of(&eps_minus),
            k_plus: k_of(&eps_plus),
            k_minus: k_of(&eps_minus),
            kappa: kappa_of(&eps),
            eps_bar_plus: eps_bar_of(&eps_plus),
            eps_bar_minus: eps_bar_of(&eps_minus),
            eps_plus,
            eps_minus,
            eps,
        })
    }

    /// `M_i^± = [k_i^± − i + 1, k_i^±]` for label `i` (1-based).
    pub fn m_interval(&self, i: usize, plus: bool) -> (i64, i64) {
        let k = if plus { self.k_plus[i - 1] } else { self.k_minus[i - 1] };
        (k - i as i64 + 1, k)
    }

    /// `ε̄ = ε̄^+ + ε̄^-`.
    pub fn eps_bar(&self) -> Vec<u8> {
        self.eps_bar_plus.iter().zip(&self.eps_bar_minus).map(|(a, b)| a + b).collect()
    }
}

/// A pair `(u, v)` stored as `I^+` (from `v`) and `I^-` (from `u^{-1}`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterPair {
    v: CoxeterElement,
    u_inv: CoxeterElement,
    comb: CombData,
}

impl CoxeterPair {
    pub fn from_elements(u: &CoxeterElement, v: &CoxeterElement) -> Result<Self> {
        let comb = CombData::new(u, v)?;
        Ok(CoxeterPair { v: v.clone(), u_inv: u.inverse(), comb })
    }

    pub fn from_sets(n: usize, iplus: Vec<usize>, iminus: Vec<usize>) -> Result<Self> {
        let v = CoxeterElement::new(n, iplus)?;
        let u = CoxeterElement::new(n, iminus)?.inverse();
        Self::from_elements(&u, &v)
    }

    /// Tridiagonal pair `u = v^{-1}`, `v = s_{n-1} ⋯ s_1`: ε = (2,0,…,0).
    pub fn tridiagonal(n: usize) -> Result<Self> {
        Self::from_sets(n, (1..=n).collect(), (1..=n).collect())
    }

    /// Relativistic pair `u = v = s_{n-1} ⋯ s_1`: ε = (2,1,…,1,0).
    pub fn relativistic(n: usize) -> Result<Self> {
        Self::from_sets(n, (1..=n).collect(), vec![1, n])
    }

    /// The pair used to key a chart Σ(ε): where ε_i = 1 the `+` side
    /// carries the block boundary (ε_i^+ = 0, ε_i^- = 1).
    pub fn canonical_for_eps(eps: &[u8]) -> Result<Self> {
        validate_eps(eps)?;
        let n = eps.len();
        let mut ip = vec![1];
        let mut im = vec![1];
        for i in 2..n {
            match eps[i - 1] {
                0 => {
                    ip.push(i);
                    im.push(i);
                }
                1 => ip.push(i),
                _ => {}
            }
        }
        ip.push(n);
        im.push(n);
        Self::from_sets(n, ip, im)
    }

    /// Every pair for S_n (|pairs| = 4^{n-2}).
    pub fn all(n: usize) -> Vec<CoxeterPair> {
        let els = CoxeterElement::all(n);
        let mut out = Vec::new();
        for p in &els {
            for m in &els {
                out.push(Self::from_sets(n, p.iset.clone(), m.iset.clone()).expect("valid sets"));
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.v.n
    }
    pub fn v(&self) -> &CoxeterElement {
        &self.v
    }
    pub fn u(&self) -> CoxeterElement {
        self.u_inv.inverse()
    }
    pub fn u_inv(&self) -> &CoxeterElement {
        &self.u_inv
    }
    pub fn iplus(&self) -> &[usize] {
        &self.v.iset
    }
    pub fn iminus(&self) -> &[usize] {
        &self.u_inv.iset
    }
    pub fn comb(&self) -> &CombData {
        &self.comb
    }
    pub fn eps(&self) -> &[u8] {
        &self.comb.eps
    }
}

/// Factorization parameters `d_1..d_n`, `c_1^±..c_{n-1}^±`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorParams {
    pub d: Vec<Rat>,
    pub c_plus: Vec<Rat>,
    pub c_minus: Vec<Rat>,
}

impl FactorParams {
    pub fn new(d: Vec<Rat>, c_plus: Vec<Rat>, c_minus: Vec<Rat>) -> Result<Self> {
        let p = FactorParams { d, c_plus, c_minus };
        p.validate(p.d.len())?;
        Ok(p)
    }

    /// Reduced coordinates in the canonical gauge `c^- = c`, `c^+ = 1`.
    pub fn reduced(d: Vec<Rat>, c: Vec<Rat>) -> Result<Self> {
        let ones = vec![Rat::one(); c.len()];
        Self::new(d, ones, c)
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// `c_i = c_i^+ c_i^-`.
    pub fn c(&self) -> Vec<Rat> {
        self.c_plus.iter().zip(&self.c_minus).map(|(a, b)| a * b).collect()
    }

    /// The same point of the quotient in the canonical gauge.
    pub fn to_reduced(&self) -> FactorParams {
        FactorParams { d: self.d.clone(), c_plus: vec![Rat::one(); self.c_plus.len()], c_minus: self.c() }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n < 2 || self.d.len() != n || self.c_plus.len() != n - 1 || self.c_minus.len() != n - 1 {
            return Err(CoxError::InvalidParams(format!(
                "expected {n} d's and {} c's per side",
                n.saturating_sub(1)
            )));
        }
        if self.d.iter().chain(&self.c_plus).chain(&self.c_minus).any(|x| x.is_zero()) {
            return Err(CoxError::InvalidParams("factorization parameters must be nonzero".into()));
        }
        Ok(())
    }
}

/// One elementary factor of the canonical factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `E_i^-(c_i^-) = 1 + c_i^- e_{i+1,i}` (label `i`).
    Lower(usize),
    /// `D = diag(d)`.
    Diag,
    /// `E_j^+(c_j^+) = 1 + c_j^+ e_{j,j+1}` (label `j`).
    Upper(usize),
}

/// Left-to-right factor order of
/// `X = (1−C_1^-)^{-1} ⋯ (1−C_{k^-}^-)^{-1} D (1−C_{k^+}^+)^{-1} ⋯ (1−C_1^+)^{-1}`.
pub fn factor_sequence(pair: &CoxeterPair) -> Vec<Factor> {
    let mut f = Vec::with_capacity(2 * pair.n() - 1);
    let im = pair.iminus();
    for j in 1..im.len() {
        f.extend((im[j - 1]..im[j]).rev().map(Factor::Lower));
    }
    f.push(Factor::Diag);
    let ip = pair.iplus();
    for j in (1..ip.len()).rev() {
        f.extend((ip[j - 1]..ip[j]).map(Factor::Upper));
    }
    f
}

/// Matrix of one factor with explicit weights.
pub fn factor_matrix<T: Scalar>(n: usize, f: Factor, d: &[T], c_plus: &[T], c_minus: &[T]) -> Matrix<T> {
    match f {
        Factor::Diag => Matrix::diag(d),
        Factor::Lower(i) => {
            let mut m = Matrix::identity(n);
            m.set(i, i - 1, c_minus[i - 1].clone());
            m
        }
        Factor::Upper(j) => {
            let mut m = Matrix::identity(n);
            m.set(j - 1, j, c_plus[j - 1].clone());
            m
        }
    }
}

/// `X` from parameters over any scalar type.
pub fn build_x_generic<T: Scalar>(pair: &CoxeterPair, d: &[T], c_plus: &[T], c_minus: &[T]) -> Matrix<T> {
    let n = pair.n();
    factor_sequence(pair)
        .into_iter()
        .fold(Matrix::identity(n), |acc, f| acc.mul(&factor_matrix(n, f, d, c_plus, c_minus)))
}

/// The cell element with the given factorization parameters.
pub fn build_x(pair: &CoxeterPair, p: &FactorParams) -> Result<RatMatrix> {
    p.validate(pair.n())?;
    Ok(build_x_generic(pair, &p.d, &p.c_plus, &p.c_minus))
}

/// `X^{-1}` assembled from the barred factors over the inverse sets `L^±`.
pub fn build_x_inverse(pair: &CoxeterPair, p: &FactorParams) -> Result<RatMatrix> {
    p.validate(pair.n())?;
    let n = pair.n();
    let lp = pair.v().inverse_sets();
    let lm = pair.u_inv().inverse_sets();
    let neg_p: Vec<Rat> = p.c_plus.iter().map(|x| -x).collect();
    let neg_m: Vec<Rat> = p.c_minus.iter().map(|x| -x).collect();
    let dinv: Vec<Rat> = p.d.iter().map(|x| x.recip()).collect();
    let mut seq = Vec::new();
    for j in (1..lp.len()).rev() {
        seq.extend((lp[j - 1]..lp[j]).map(Factor::Upper));
    }
    seq.push(Factor::Diag);
    for j in 1..lm.len() {
        seq.extend((lm[j - 1]..lm[j]).rev().map(Factor::Lower));
    }
    Ok(seq
        .into_iter()
        .fold(RatMatrix::identity(n), |acc, f| acc.mul(&factor_matrix(n, f, &dinv, &neg_p, &neg_m))))
}

fn nonzero(x: Rat, what: &str) -> Result<Rat> {
    if x.is_zero() {
        Err(CoxError::NonGeneric(format!("vanishing minor {what}")))
    } else {
        Ok(x)
    }
}

/// Minor with 1-based labels; empty lists give 1.
fn minor1(x: &RatMatrix, rows: &[usize], cols: &[usize]) -> Result<Rat> {
    let r: Vec<usize> = rows.iter().map(|i| i - 1).collect();
    let c: Vec<usize> = cols.iter().map(|i| i - 1).collect();
    x.minor(&r, &c)
}

/// Lower-side parameters `c^-` from the minors of `X` (use `X^T` and `I^+`
/// for the upper side).
fn lower_params(x: &RatMatrix, iset: &[usize], lead: &[Rat]) -> Result<Vec<Rat>> {
    let n = x.rows();
    let mut c = Vec::with_capacity(n - 1);
    for i in 1..n {
        let j = iset.iter().rposition(|&b| b <= i).expect("1 ∈ I");
        let cols: Vec<usize> = iset[..=j].to_vec();
        let head: Vec<usize> = iset[1..=j].to_vec();
        if iset[j] < i {
            let mut num_rows = head.clone();
            num_rows.push(i + 1);
            let mut den_rows = head;
            den_rows.push(i);
            let num = minor1(x, &num_rows, &cols)?;
            let den = nonzero(minor1(x, &den_rows, &cols)?, "in c_i (interior)")?;
            c.push(num / den);
        } else {
            let mut num_rows = head.clone();
            num_rows.push(i + 1);
            let num = minor1(x, &num_rows, &cols)? * lead[i - 1].clone();
            let den = minor1(x, &head, &iset[..j])? * lead[i].clone();
            let den = nonzero(den, "in c_i (block end)")?;
            c.push(num / den);
        }
    }
    Ok(c)
}

/// Inverts the factorization from minors of `X`.
pub fn params_from_x(pair: &CoxeterPair, x: &RatMatrix) -> Result<FactorParams> {
    let n = pair.n();
    if x.rows() != n || x.cols() != n {
        return Err(CoxError::Argument(format!("expected a {n}x{n} matrix")));
    }
    let lead: Vec<Rat> = (0..=n).map(|k| x.leading_minor(k)).collect::<Result<_>>()?;
    let mut d = Vec::with_capacity(n);
    for i in 1..=n {
        let den = nonzero(lead[i - 1].clone(), "leading principal")?;
        d.push(nonzero(lead[i].clone(), "leading principal")? / den);
    }
    let c_minus = lower_params(x, pair.iminus(), &lead)?;
    let c_plus = lower_params(&x.transpose(), pair.iplus(), &lead)?;
    let p = FactorParams { d, c_plus, c_minus };
    p.validate(n).map_err(|e| CoxError::NonGeneric(e.to_string()))?;
    Ok(p)
}

fn block(x: &RatMatrix, r0: usize, r1: usize, c0: usize, c1: usize) -> Option<RatMatrix> {
    // 1-based inclusive ranges; None when empty
    if r0 > r1 || c0 > c1 {
        return None;
    }
    let rows: Vec<usize> = (r0 - 1..r1).collect();
    let cols: Vec<usize> = (c0 - 1..c1).collect();
    x.submatrix(&rows, &cols).ok()
}

fn greedy_chain(x: &RatMatrix, lower: bool) -> Option<Vec<usize>> {
    let n = x.rows();
    let mut chain = vec![1];
    while *chain.last().unwrap() < n {
        let cur = *chain.last().unwrap();
        let next = (cur + 1..=n).rev().find(|&i| {
            let e = if lower { x.get(i - 1, cur - 1) } else { x.get(cur - 1, i - 1) };
            !e.is_zero()
        })?;
        chain.push(next);
    }
    Some(chain)
}

/// Returns the Coxeter pair whose double Bruhat cell contains `X`, if any.
///
/// The rank conditions checked for every `l ∈ [1, n−1]` are
/// rank X([l+1,n],[1,l]) = 1, rank X([l,n],[1,l]) > 1 ⇒ X([l+1,n],[1,l−1]) = 0,
/// and their transposes.
pub fn cell_membership(x: &RatMatrix) -> Result<Option<CoxeterPair>> {
    let n = x.rows();
    if !x.is_square() || n < 2 {
        return Err(CoxError::Argument("cell membership needs a square matrix, n >= 2".into()));
    }
    if x.det()?.is_zero() {
        return Err(CoxError::SingularMatrix("cell membership of a singular matrix".into()));
    }
    let xt = x.transpose();
    for m in [x, &xt] {
        for l in 1..n {
            if rank(&block(m, l + 1, n, 1, l).unwrap()) != 1 {
                return Ok(None);
            }
            if l >= 2 && rank(&block(m, l, n, 1, l).unwrap()) > 1 {
                if let Some(b) = block(m, l + 1, n, 1, l - 1) {
                    if !crate::linalg::is_zero_matrix(&b) {
                        return Ok(None);
                    }
                }
            }
        }
    }
    let (Some(im), Some(ip)) = (greedy_chain(x, true), greedy_chain(x, false)) else {
        return Ok(None);
    };
    Ok(Some(CoxeterPair::from_sets(n, ip, im)?))
}

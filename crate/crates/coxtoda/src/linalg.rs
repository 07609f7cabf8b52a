//! Exact rationals, dense matrices over any [`Scalar`], and the two floating
//! point kernels the dynamics need (matrix exponential and an RK4 step).
//!
//! Indices are 0-based throughout this module.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{CoxError, Result};

/// Exact arbitrary precision rational, always stored reduced with a
/// positive denominator.
pub type Rat = BigRational;
pub type RatMatrix = Matrix<Rat>;
pub type FloatMatrix = Matrix<f64>;

/// Field operations shared by the exact and the floating point code paths.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Num + Neg<Output = Self> {
    fn from_i64(v: i64) -> Self;
    /// Elimination picks the first entry of maximal weight as pivot. For
    /// rationals every nonzero entry weighs the same, so this is the first
    /// nonzero pivot; for floats it is partial pivoting.
    fn pivot_weight(&self) -> f64;
    fn to_f64(&self) -> f64;
    /// A specialised determinant, when the type has a faster one than
    /// plain elimination.
    fn fast_det(_a: &Matrix<Self>) -> Option<Self> {
        None
    }
}

impl Scalar for Rat {
    fn from_i64(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }
    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn fast_det(a: &Matrix<Self>) -> Option<Self> {
        Some(bareiss_det(a))
    }
}

/// Fraction-free elimination: scale each row to integers, then run Bareiss
/// with exact integer divisions.
fn bareiss_det(a: &RatMatrix) -> Rat {
    let n = a.rows;
    let mut scale = BigInt::one();
    let mut m: Vec<BigInt> = Vec::with_capacity(n * n);
    for r in 0..n {
        let row = &a.data[r * n..(r + 1) * n];
        let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        m.extend(row.iter().map(|x| x.numer() * (&l / x.denom())));
        scale *= l;
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r * n + k].is_zero()) else {
            return Rat::zero();
        };
        if p != k {
            for j in 0..n {
                m.swap(p * n + j, k * n + j);
            }
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                m[i * n + j] = v / &prev;
            }
        }
        prev = m[k * n + k].clone();
    }
    let det = if n == 0 { BigInt::one() } else { prev };
    let r = Rat::new(det, scale);
    if sign {
        -r
    } else {
        r
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn pivot_weight(&self) -> f64 {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// `num/den` as an exact rational.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Parses `"-3/7"`, `"5"` or a plain decimal such as `"0.25"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    if let Ok(r) = Rat::from_str(t) {
        if t.contains('/') && r.denom().is_zero() {
            return Err(CoxError::Argument(format!("zero denominator in {s:?}")));
        }
        return Ok(r);
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        if let Ok(num) = BigInt::from_str(&digits) {
            let den = num_traits::pow(BigInt::from(10), fp.len());
            let r = Rat::new(num, den);
            return Ok(if neg { -r } else { r });
        }
    }
    Err(CoxError::Argument(format!("cannot parse rational {s:?}")))
}

/// Integer power with negative exponents allowed.
pub fn powi<T: Scalar>(x: &T, e: i64) -> Result<T> {
    if e < 0 {
        if x.is_zero() {
            return Err(CoxError::NonGeneric("zero raised to a negative power".into()));
        }
        return Ok(T::one() / powi(x, -e)?);
    }
    let mut base = x.clone();
    let mut acc = T::one();
    let mut k = e as u64;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base.clone();
        }
        k >>= 1;
        if k > 0 {
            base = base.clone() * base;
        }
    }
    Ok(acc)
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(CoxError::Argument(format!(
                "matrix data of length {} does not fit {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(CoxError::Argument("ragged matrix rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn diag(d: &[T]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in d.iter().enumerate() {
            m.data[i * n + i] = v.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        m
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix add shape");
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix sub shape");
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Matrix product; panics on a shape mismatch (callers construct shapes).
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    m.data[idx] = m.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut s = T::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        s = s + a.clone() * x.clone();
                    }
                }
                s
            })
            .collect()
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |s, i| s + self.get(i, i).clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(CoxError::Argument("empty index list".into()));
        }
        if rows.iter().any(|&r| r >= self.rows) || cols.iter().any(|&c| c >= self.cols) {
            return Err(CoxError::Argument("index out of bounds".into()));
        }
        let data = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self.get(r, c).clone())
            .collect();
        Ok(Matrix { rows: rows.len(), cols: cols.len(), data })
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(CoxError::Argument(format!("det of {}x{} matrix", self.rows, self.cols)));
        }
        if let Some(d) = T::fast_det(self) {
            return Ok(d);
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = T::one();
        for col in 0..n {
            let mut piv = None;
            let mut best = 0.0;
            for r in col..n {
                let w = a[r * n + col].pivot_weight();
                if w > best {
                    best = w;
                    piv = Some(r);
                }
            }
            let Some(p) = piv else { return Ok(T::zero()) };
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                }
                det = -det;
            }
            let pv = a[col * n + col].clone();
            det = det * pv.clone();
            for r in col + 1..n {
                let f = a[r * n + col].clone();
                if f.is_zero() {
                    continue;
                }
                let f = f / pv.clone();
                for j in col + 1..n {
                    let t = a[col * n + j].clone();
                    if !t.is_zero() {
                        a[r * n + j] = a[r * n + j].clone() - f.clone() * t;
                    }
                }
            }
        }
        Ok(det)
    }

    /// Minor on strictly increasing row and column index lists.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<T> {
        if rows.len() != cols.len() {
            return Err(CoxError::Argument("minor needs equally many rows and columns".into()));
        }
        if rows.is_empty() {
            return Ok(T::one());
        }
        let inc = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        if !inc(rows) || !inc(cols) {
            return Err(CoxError::Argument("minor indices must increase strictly".into()));
        }
        self.submatrix(rows, cols)?.det()
    }

    /// Leading principal minor of order `k`; the empty minor is 1.
    pub fn leading_minor(&self, k: usize) -> Result<T> {
        let idx: Vec<usize> = (0..k).collect();
        self.minor(&idx, &idx)
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(CoxError::Argument("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for col in 0..n {
            let mut piv = None;
            let mut best = 0.0;
            for r in col..n {
                let w = a[r * n + col].pivot_weight();
                if w > best {
                    best = w;
                    piv = Some(r);
                }
            }
            let p = piv.ok_or_else(|| CoxError::SingularMatrix("no pivot in inverse".into()))?;
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                    inv.swap(p * n + j, col * n + j);
                }
            }
            let pv = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] = a[col * n + j].clone() / pv.clone();
                inv[col * n + j] = inv[col * n + j].clone() / pv.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col].clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = a[col * n + j].clone();
                    if !t.is_zero() {
                        a[r * n + j] = a[r * n + j].clone() - f.clone() * t;
                    }
                    let t = inv[col * n + j].clone();
                    if !t.is_zero() {
                        inv[r * n + j] = inv[r * n + j].clone() - f.clone() * t;
                    }
                }
            }
        }
        Ok(Matrix { rows: n, cols: n, data: inv })
    }

    /// `A^k`; negative powers go through the explicit inverse.
    pub fn pow(&self, k: i64) -> Result<Self> {
        if !self.is_square() {
            return Err(CoxError::Argument("power of a non-square matrix".into()));
        }
        let mut base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Coefficients of `det(λ·1 − A)`, leading coefficient first
    /// (Faddeev–LeVerrier).
    pub fn char_poly(&self) -> Result<Vec<T>> {
        if !self.is_square() {
            return Err(CoxError::Argument("char_poly of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut coeffs = vec![T::one()];
        let mut m = Self::zeros(n, n);
        let id = Self::identity(n);
        let mut c_prev = T::one();
        for k in 1..=n {
            m = self.mul(&m).add(&id.scale(&c_prev));
            let c = -(self.mul(&m).trace() / T::from_i64(k as i64));
            coeffs.push(c.clone());
            c_prev = c;
        }
        Ok(coeffs)
    }

    /// LDU (Gauss) factorization `A = L·D·U` with unit triangular `L`, `U`.
    pub fn gauss_ldu(&self) -> Result<(Self, Vec<T>, Self)> {
        if !self.is_square() {
            return Err(CoxError::Argument("Gauss factorization of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut u = self.clone();
        let mut l = Self::identity(n);
        for col in 0..n {
            let pv = u.get(col, col).clone();
            if pv.is_zero() {
                return Err(CoxError::NonGeneric(format!("leading minor of order {} vanishes", col + 1)));
            }
            for r in col + 1..n {
                let f = u.get(r, col).clone() / pv.clone();
                if f.is_zero() {
                    continue;
                }
                l.set(r, col, f.clone());
                for j in col..n {
                    let v = u.get(r, j).clone() - f.clone() * u.get(col, j).clone();
                    u.set(r, j, v);
                }
            }
        }
        let d: Vec<T> = (0..n).map(|i| u.get(i, i).clone()).collect();
        for i in 0..n {
            let pv = d[i].clone();
            for j in i..n {
                let v = u.get(i, j).clone() / pv.clone();
                u.set(i, j, v);
            }
        }
        Ok((l, d, u))
    }
}

impl RatMatrix {
    pub fn to_f64(&self) -> FloatMatrix {
        self.map(|x| Scalar::to_f64(x))
    }
}

impl FloatMatrix {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `exp(t·A)` by scaling and squaring around a truncated Taylor series.
    pub fn exp_scaled(&self, t: f64) -> Result<FloatMatrix> {
        if !self.is_square() {
            return Err(CoxError::Argument("exp of a non-square matrix".into()));
        }
        let a = self.scale(&t);
        let norm = a.max_abs() * a.rows as f64;
        if !norm.is_finite() {
            return Err(CoxError::NumericOverflow("non-finite matrix in exp".into()));
        }
        let mut s = 0u32;
        while norm / 2f64.powi(s as i32) > 0.5 {
            s += 1;
        }
        let a = a.scale(&(1.0 / 2f64.powi(s as i32)));
        let mut term = Self::identity(a.rows);
        let mut sum = term.clone();
        for k in 1..40 {
            term = term.mul(&a).scale(&(1.0 / k as f64));
            sum = sum.add(&term);
            if term.max_abs() <= 1e-18 * sum.max_abs() {
                break;
            }
        }
        for _ in 0..s {
            sum = sum.mul(&sum);
        }
        if !sum.data.iter().all(|x| x.is_finite()) {
            return Err(CoxError::NumericOverflow("matrix exponential overflowed".into()));
        }
        Ok(sum)
    }
}

/// Nearest multiple of `2^-bits`.
pub fn round_bits(x: &Rat, bits: u32) -> Rat {
    let scale = BigInt::one() << bits;
    Rat::new((x * &scale).round().to_integer(), scale)
}

/// `x` rounded to `bits` significant bits (a binary float of that
/// precision, stored as a rational).
pub fn round_rel(x: &Rat, bits: u32) -> Rat {
    if x.is_zero() {
        return Rat::zero();
    }
    let e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let shift = bits as i64 - e;
    let v = if shift >= 0 {
        (x * Rat::from_integer(BigInt::one() << shift as u64)).round().to_integer()
    } else {
        (x / Rat::from_integer(BigInt::one() << (-shift) as u64)).round().to_integer()
    };
    if shift >= 0 {
        Rat::new(v, BigInt::one() << shift as u64)
    } else {
        Rat::from_integer(v << (-shift) as u64)
    }
}

/// Exact rational value of a finite float.
pub fn rat_from_f64(x: f64) -> Result<Rat> {
    Rat::from_float(x).ok_or_else(|| CoxError::NumericOverflow(format!("{x} is not finite")))
}

impl RatMatrix {
    /// `exp(t·A)` to absolute accuracy about `2^-bits` relative to its size.
    /// Runs in fixed point: every entry is an integer multiple of `2^-bits`.
    pub fn exp_rounded(&self, t: &Rat, bits: u32) -> Result<RatMatrix> {
        if !self.is_square() {
            return Err(CoxError::Argument("exp of a non-square matrix".into()));
        }
        let n = self.rows;
        let a = self.scale(t);
        let norm = a.to_f64().max_abs() * n as f64;
        if !norm.is_finite() {
            return Err(CoxError::NumericOverflow("non-finite matrix in exp".into()));
        }
        let mut s = 0u32;
        while norm / 2f64.powi(s as i32) > 0.5 {
            s += 1;
        }
        let one = BigInt::one() << bits;
        let fixed: Vec<BigInt> = a.data.iter().map(|x| (x * &one).round().to_integer() >> s).collect();
        let mul = |x: &[BigInt], y: &[BigInt]| -> Vec<BigInt> {
            let mut out = Vec::with_capacity(n * n);
            for r in 0..n {
                for c in 0..n {
                    let acc: BigInt = (0..n).map(|k| &x[r * n + k] * &y[k * n + c]).sum();
                    out.push(acc >> bits);
                }
            }
            out
        };
        let mut term: Vec<BigInt> = (0..n * n).map(|k| if k % (n + 1) == 0 { one.clone() } else { BigInt::zero() }).collect();
        let mut sum = term.clone();
        // ‖A‖ ≤ 1/2, so the terms drop below 2^-bits well before k = bits
        for k in 1..=bits as i64 {
            term = mul(&term, &fixed).into_iter().map(|v| v / k).collect();
            if term.iter().all(Zero::is_zero) {
                break;
            }
            for (x, y) in sum.iter_mut().zip(&term) {
                *x += y;
            }
        }
        for _ in 0..s {
            sum = mul(&sum, &sum);
        }
        Matrix::new(n, n, sum.into_iter().map(|v| Rat::new(v, one.clone())).collect())
    }
}

/// Free-function spellings of the matrix kernels.
pub fn minor<T: Scalar>(a: &Matrix<T>, rows: &[usize], cols: &[usize]) -> Result<T> {
    a.minor(rows, cols)
}
pub fn det<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    a.det()
}
pub fn char_poly<T: Scalar>(a: &Matrix<T>) -> Result<Vec<T>> {
    a.char_poly()
}
pub fn mat_pow<T: Scalar>(a: &Matrix<T>, k: i64) -> Result<Matrix<T>> {
    a.pow(k)
}
pub fn mat_exp(a: &FloatMatrix, t: f64) -> Result<FloatMatrix> {
    a.exp_scaled(t)
}

/// One classical fourth order Runge–Kutta step of `y' = f(y)`.
pub fn rk4_step(f: &dyn Fn(&[f64]) -> Vec<f64>, y: &[f64], dt: f64) -> Vec<f64> {
    let axpy = |a: &[f64], b: &[f64], h: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, k)| x + h * k).collect()
    };
    let k1 = f(y);
    let k2 = f(&axpy(y, &k1, dt / 2.0));
    let k3 = f(&axpy(y, &k2, dt / 2.0));
    let k4 = f(&axpy(y, &k3, dt));
    y.iter()
        .enumerate()
        .map(|(i, x)| x + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Evaluates a leading-first coefficient list at `x` (Horner).
pub fn poly_eval<T: Scalar>(coeffs: &[T], x: &T) -> T {
    coeffs.iter().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Exact `n`-th root of a rational when it exists.
pub fn rat_nth_root(x: &Rat, n: u32) -> Option<Rat> {
    if x.is_negative() && n % 2 == 0 {
        return None;
    }
    let root = |v: &BigInt| -> Option<BigInt> {
        let r = v.abs().nth_root(n);
        (num_traits::pow(r.clone(), n as usize) == v.abs()).then(|| if v.is_negative() { -r } else { r })
    };
    Some(Rat::new(root(x.numer())?, root(x.denom())?))
}

/// `true` when every entry is exactly zero.
pub fn is_zero_matrix<T: Scalar>(m: &Matrix<T>) -> bool {
    m.data.iter().all(|x| x.is_zero())
}

/// Rank by elimination (first nonzero pivot for rationals).
pub fn rank<T: Scalar>(m: &Matrix<T>) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.data.clone();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i * cols + c].pivot_weight() > 0.0) else { continue };
        for j in 0..cols {
            a.swap(p * cols + j, r * cols + j);
        }
        let pv = a[r * cols + c].clone();
        for i in r + 1..rows {
            let f = a[i * cols + c].clone();
            if f.is_zero() {
                continue;
            }
            let f = f / pv.clone();
            for j in c..cols {
                a[i * cols + j] = a[i * cols + j].clone() - f.clone() * a[r * cols + j].clone();
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

impl<T: Scalar + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.data.chunks(self.cols) {
            let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

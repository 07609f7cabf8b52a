//! The planar disk network of a factorization and the combinatorial Poisson
//! data (faces, directed dual, Ω, A, B(ε)) of the annulus network.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::coxeter::{factor_sequence, CombData, CoxeterPair, Factor, FactorParams};
use crate::error::{CoxError, Result};
use crate::linalg::{rat, Rat, RatMatrix};

/// One building block of the disk network.
#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    /// Path source `i+1` → sink `i` with the given weight (labels 1-based).
    Lower(usize, Rat),
    /// Path source `j` → sink `j+1` with the given weight.
    Upper(usize, Rat),
    /// Multiplies level `i` by `d_i`.
    Diagonal(Vec<Rat>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Source,
    Sink,
    /// Exactly one incoming edge.
    White,
    /// Exactly one outgoing edge.
    Black,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Vertex {
    pub level: usize,
    pub column: usize,
    pub color: Color,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: Rat,
}

/// Acyclic planar network with sources on the left and sinks on the right.
/// Vertex ids are a topological order.
#[derive(Clone, Debug)]
pub struct PlanarNetwork {
    pub n: usize,
    pub blocks: Vec<Block>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

impl PlanarNetwork {
    /// Concatenates blocks left to right. Diagonal weights are carried onto
    /// the next horizontal edge of each level, so every internal vertex is
    /// trivalent.
    pub fn from_blocks(n: usize, blocks: Vec<Block>) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut last = Vec::with_capacity(n);
        let mut pending = vec![Rat::one(); n];
        for level in 1..=n {
            last.push(vertices.len());
            vertices.push(Vertex { level, column: 0, color: Color::Source });
        }
        let sources = last.clone();
        for (col, b) in blocks.iter().enumerate() {
            let column = col + 1;
            let (from_level, to_level, w) = match b {
                Block::Diagonal(d) => {
                    if d.len() != n {
                        return Err(CoxError::Argument("diagonal block of wrong size".into()));
                    }
                    for (p, x) in pending.iter_mut().zip(d) {
                        *p *= x;
                    }
                    continue;
                }
                Block::Upper(j, t) => (*j, j + 1, t),
                Block::Lower(i, t) => (i + 1, *i, t),
            };
            if from_level.max(to_level) > n || from_level.min(to_level) == 0 {
                return Err(CoxError::Argument("block level outside the network".into()));
            }
            let white = vertices.len();
            vertices.push(Vertex { level: from_level, column, color: Color::White });
            let black = vertices.len();
            vertices.push(Vertex { level: to_level, column, color: Color::Black });
            for (lvl, v) in [(from_level, white), (to_level, black)] {
                let w = std::mem::replace(&mut pending[lvl - 1], Rat::one());
                edges.push(Edge { from: last[lvl - 1], to: v, weight: w });
                last[lvl - 1] = v;
            }
            edges.push(Edge { from: white, to: black, weight: w.clone() });
        }
        let mut sinks = Vec::with_capacity(n);
        for level in 1..=n {
            let s = vertices.len();
            vertices.push(Vertex { level, column: blocks.len() + 1, color: Color::Sink });
            edges.push(Edge { from: last[level - 1], to: s, weight: pending[level - 1].clone() });
            sinks.push(s);
        }
        edges.sort_by_key(|e| (e.from, e.to));
        Ok(PlanarNetwork { n, blocks, vertices, edges, sources, sinks })
    }

    /// Edges joining two vertices on the same level.
    pub fn horizontal_edges(&self) -> usize {
        self.edges.iter().filter(|e| self.vertices[e.from].level == self.vertices[e.to].level).count()
    }

    pub fn internal_vertices(&self) -> usize {
        self.vertices.iter().filter(|v| matches!(v.color, Color::White | Color::Black)).count()
    }

    fn out_edges(&self, v: usize) -> impl Iterator<Item = &Edge> {
        let start = self.edges.partition_point(|e| e.from < v);
        self.edges[start..].iter().take_while(move |e| e.from == v)
    }

    /// All source-to-sink paths as vertex lists with their weights.
    fn paths_between(&self, from: usize, to: usize) -> Vec<(Vec<usize>, Rat)> {
        let mut out = Vec::new();
        let mut stack = vec![(vec![from], Rat::one())];
        while let Some((path, w)) = stack.pop() {
            let v = *path.last().unwrap();
            if v == to {
                out.push((path, w));
                continue;
            }
            for e in self.out_edges(v) {
                let mut p = path.clone();
                p.push(e.to);
                stack.push((p, &w * &e.weight));
            }
        }
        out
    }
}

/// The network of the canonical factorization of `X`.
pub fn build_disk_network(pair: &CoxeterPair, p: &FactorParams) -> Result<PlanarNetwork> {
    p.validate(pair.n())?;
    let blocks = factor_sequence(pair)
        .into_iter()
        .map(|f| match f {
            Factor::Lower(i) => Block::Lower(i, p.c_minus[i - 1].clone()),
            Factor::Upper(j) => Block::Upper(j, p.c_plus[j - 1].clone()),
            Factor::Diag => Block::Diagonal(p.d.clone()),
        })
        .collect();
    PlanarNetwork::from_blocks(pair.n(), blocks)
}

/// Boundary measurement matrix: entry (i,j) sums path weights from source
/// `i` to sink `j`.
pub fn boundary_matrix(net: &PlanarNetwork) -> RatMatrix {
    let n = net.n;
    let mut m = RatMatrix::zeros(n, n);
    for (i, &s) in net.sources.iter().enumerate() {
        let mut acc = vec![Rat::zero(); net.vertices.len()];
        acc[s] = Rat::one();
        for e in &net.edges {
            if !acc[e.from].is_zero() {
                let add = &acc[e.from] * &e.weight;
                acc[e.to] += add;
            }
        }
        for (j, &t) in net.sinks.iter().enumerate() {
            m.set(i, j, acc[t].clone());
        }
    }
    m
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Signed sum over vertex-disjoint path families joining `sources` to
/// `sinks` (0-based level indices). In a planar network only the identity
/// pairing admits disjoint families, so this is the plain family sum.
pub fn lindstrom_minor(net: &PlanarNetwork, sources: &[usize], sinks: &[usize]) -> Result<Rat> {
    if sources.len() != sinks.len() || sources.iter().chain(sinks).any(|&i| i >= net.n) {
        return Err(CoxError::Argument("lindstrom_minor index lists".into()));
    }
    let k = sources.len();
    let mut total = Rat::zero();
    for perm in permutations(k) {
        let inversions = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).filter(|&(a, b)| perm[a] > perm[b]).count();
        let options: Vec<Vec<(Vec<usize>, Rat)>> = (0..k)
            .map(|a| net.paths_between(net.sources[sources[a]], net.sinks[sinks[perm[a]]]))
            .collect();
        let mut sum = Rat::zero();
        let mut used = vec![false; net.vertices.len()];
        disjoint_families(&options, 0, &mut used, Rat::one(), &mut sum);
        if inversions % 2 == 0 {
            total += sum;
        } else {
            total -= sum;
        }
    }
    Ok(total)
}

fn disjoint_families(opts: &[Vec<(Vec<usize>, Rat)>], a: usize, used: &mut [bool], w: Rat, sum: &mut Rat) {
    if a == opts.len() {
        *sum += w;
        return;
    }
    for (path, pw) in &opts[a] {
        if path.iter().any(|&v| used[v]) {
            continue;
        }
        for &v in path {
            used[v] = true;
        }
        disjoint_families(opts, a + 1, used, &w * pw, sum);
        for &v in path {
            used[v] = false;
        }
    }
}

/// Face weights `y_{00}, y_{10}, y_{01}, y_{11}, …, y_{0,n-1}, y_{1,n-1}`
/// followed by `y_{0n} = d_n`, with gauge `H_0`.
pub fn face_weights(p: &FactorParams, h0: &Rat) -> Result<Vec<Rat>> {
    let n = p.n();
    p.validate(n)?;
    if h0.is_zero() {
        return Err(CoxError::InvalidParams("H_0 must be nonzero".into()));
    }
    let c = p.c();
    let h1 = &p.d[0] * h0;
    let mut y = vec![h0.recip(), h0 * h0 / h1];
    for i in 0..n - 1 {
        y.push(c[i].recip());
        y.push(&c[i] * &p.d[i] / &p.d[i + 1]);
    }
    y.push(p.d[n - 1].clone());
    Ok(y)
}

/// Small dense integer matrix (row-major `Vec` of rows).
pub type IntMatrix = Vec<Vec<i64>>;

pub fn int_to_rat(m: &IntMatrix) -> RatMatrix {
    RatMatrix::from_rows(m.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect()).expect("rectangular")
}

type B2 = [[i64; 2]; 2];
const U: B2 = [[0, 2], [-2, 0]];
const HALF_U: B2 = [[0, 1], [-1, 0]];

fn neg(b: B2) -> B2 {
    [[-b[0][0], -b[0][1]], [-b[1][0], -b[1][1]]]
}
fn tr(b: B2) -> B2 {
    [[b[0][0], b[1][0]], [b[0][1], b[1][1]]]
}

/// `V_i` for label `i ∈ [1, n]`.
pub fn v_block(comb: &CombData, i: usize) -> B2 {
    let n = comb.n;
    if i == 1 {
        [[-1, 0], [2, -1]]
    } else if i == n {
        let k = comb.kappa[n - 1];
        [[-1, k - n as i64 + 1], [1, n as i64 - k]]
    } else {
        let e = comb.eps[i - 1] as i64;
        [[e - 1, -e], [2 - e, e - 1]]
    }
}

fn place(m: &mut IntMatrix, br: usize, bc: usize, b: B2) {
    for r in 0..2 {
        for c in 0..2 {
            m[2 * br + r][2 * bc + c] = b[r][c];
        }
    }
}

/// `2Ω(ε)`, integral because only the corner block is `½U`.
pub fn omega_times_two(comb: &CombData) -> IntMatrix {
    let n = comb.n;
    let mut m = vec![vec![0i64; 2 * n]; 2 * n];
    let dbl = |b: B2| [[2 * b[0][0], 2 * b[0][1]], [2 * b[1][0], 2 * b[1][1]]];
    for k in 0..n {
        place(&mut m, k, k, if k == 0 { HALF_U } else { U }.map(|r| r.map(|x| 2 * x)));
        if k + 1 < n {
            let v = v_block(comb, k + 1);
            place(&mut m, k, k + 1, dbl(v));
            place(&mut m, k + 1, k, dbl(neg(tr(v))));
        }
    }
    m
}

/// `Ω(ε)` as exact rationals.
pub fn omega_matrix(comb: &CombData) -> RatMatrix {
    int_to_rat(&omega_times_two(comb)).scale(&rat(1, 2))
}

/// Both factors of `Ω = L·R`: `L` unit block lower bidiagonal with blocks
/// `½V_i^T U`, `R` block upper bidiagonal with `½U` diagonal and `V_i` above.
pub fn omega_factors(comb: &CombData) -> (RatMatrix, RatMatrix) {
    let n = comb.n;
    let mut l = vec![vec![0i64; 2 * n]; 2 * n];
    let mut r = vec![vec![0i64; 2 * n]; 2 * n];
    for k in 0..n {
        place(&mut l, k, k, [[1, 0], [0, 1]]);
        place(&mut r, k, k, HALF_U);
        if k + 1 < n {
            let v = v_block(comb, k + 1);
            place(&mut r, k, k + 1, v);
            // ½ V^T U = V^T · HALF_U
            let vt = tr(v);
            let prod = [
                [vt[0][0] * HALF_U[0][0] + vt[0][1] * HALF_U[1][0], vt[0][0] * HALF_U[0][1] + vt[0][1] * HALF_U[1][1]],
                [vt[1][0] * HALF_U[0][0] + vt[1][1] * HALF_U[1][0], vt[1][0] * HALF_U[0][1] + vt[1][1] * HALF_U[1][1]],
            ];
            place(&mut l, k + 1, k, prod);
        }
    }
    (int_to_rat(&l), int_to_rat(&r))
}

/// Exponent matrix `A` with `y = x^A`.
pub fn a_matrix(comb: &CombData) -> IntMatrix {
    let n = comb.n;
    let mut m = vec![vec![0i64; 2 * n]; 2 * n];
    place(&mut m, 0, 0, v_block(comb, 1));
    for k in 1..n {
        if k >= 2 {
            place(&mut m, k, k - 2, neg(tr(v_block(comb, k))));
        }
        place(&mut m, k, k - 1, U);
        place(&mut m, k, k, v_block(comb, k + 1));
    }
    m
}

/// `(Bfull, Btilde)`: the skew-symmetric `2n×2n` matrix and its first
/// `2n−2` rows.
pub fn b_matrix(comb: &CombData) -> (IntMatrix, IntMatrix) {
    let n = comb.n;
    let mut m = vec![vec![0i64; 2 * n]; 2 * n];
    for k in 0..n {
        place(&mut m, k, k, if k + 1 == n { HALF_U } else { neg(U) });
        if k + 1 < n {
            let v = v_block(comb, k + 2);
            place(&mut m, k, k + 1, neg(v));
            place(&mut m, k + 1, k, tr(v));
        }
    }
    let tilde = m[..2 * n - 2].to_vec();
    (m, tilde)
}

/// Face label: `(0, i)` for `f_{0i}`, `(1, i)` for `f_{1i}`.
pub type Face = (u8, usize);

/// Directed dual edge with multiplicity (negative reverses it) and the
/// weight `1` or `1/2` of Prop. 2.4.
#[derive(Clone, Debug, PartialEq)]
pub struct DualEdge {
    pub from: Face,
    pub to: Face,
    pub count: i64,
    pub weight: Rat,
}

/// Combinatorial data of the annulus network for one ε.
#[derive(Clone, Debug)]
pub struct AnnulusData {
    pub faces: Vec<Face>,
    pub dual_edges: Vec<DualEdge>,
    pub omega: RatMatrix,
    pub a: IntMatrix,
    pub bfull: IntMatrix,
    pub btilde: IntMatrix,
}

fn dual_edges(comb: &CombData) -> Vec<DualEdge> {
    let n = comb.n;
    let one = Rat::one;
    let e = |from: Face, to: Face, count: i64, weight: Rat| DualEdge { from, to, count, weight };
    let mut out = vec![e((0, 0), (1, 0), 2, rat(1, 2))];
    for i in 1..n {
        out.push(e((0, i), (1, i), 2, one()));
    }
    // level 0 touches the boundary circles
    out.push(e((1, 0), (0, 1), 2, one()));
    out.push(e((1, 1), (1, 0), 1, one()));
    out.push(e((0, 1), (0, 0), 1, one()));
    for i in 1..n.saturating_sub(1) {
        let ei = comb.eps[i] as i64;
        out.push(e((1, i + 1), (1, i), 1 - ei, one()));
        out.push(e((1, i), (0, i + 1), 2 - ei, one()));
        out.push(e((0, i + 1), (0, i), 1 - ei, one()));
        out.push(e((1, i + 1), (0, i), ei, one()));
    }
    out.push(e((1, n - 1), (0, n), 1, one()));
    out.push(e((0, n), (0, n - 1), 1, one()));
    out
}

/// Bracket coefficient `{y_f, y_g} = coef·y_f y_g` from the dual edges.
pub fn dual_bracket(edges: &[DualEdge], f: Face, g: Face) -> Rat {
    let mut s = Rat::zero();
    for d in edges {
        let w = &d.weight * Rat::from_integer(d.count.into());
        if d.from == f && d.to == g {
            s += w;
        } else if d.from == g && d.to == f {
            s -= w;
        }
    }
    s
}

pub fn annulus_data(comb: &CombData) -> AnnulusData {
    let n = comb.n;
    let mut faces: Vec<Face> = Vec::new();
    for i in 0..n {
        faces.push((0, i));
        faces.push((1, i));
    }
    faces.push((0, n));
    let (bfull, btilde) = b_matrix(comb);
    AnnulusData { faces, dual_edges: dual_edges(comb), omega: omega_matrix(comb), a: a_matrix(comb), bfull, btilde }
}

/// Listed bracket coefficient between two face weights, or 0 when the text
/// lists none.
pub fn listed_bracket(comb: &CombData, f: Face, g: Face) -> i64 {
    let n = comb.n;
    let eps = |i: usize| comb.eps[i - 1] as i64;
    let one = |f: Face, g: Face| -> Option<i64> {
        match (f, g) {
            ((0, 0), (1, 0)) => Some(1),
            ((1, 0), (0, 1)) => Some(2),
            ((1, 0), (1, 1)) => Some(-1),
            ((0, 0), (0, 1)) => Some(-1),
            ((0, a), (0, b)) if a == n && b + 1 == n => Some(1),
            ((0, a), (1, b)) if a == n && b + 1 == n => Some(-1),
            ((0, a), (1, b)) if a == b && a >= 1 && a < n => Some(2),
            ((1, a), (1, b)) if a >= 1 && b == a + 1 && b < n => Some(-(1 - eps(b))),
            ((1, a), (0, b)) if a >= 1 && b == a + 1 && b < n => Some(2 - eps(b)),
            ((0, a), (0, b)) if a >= 1 && b == a + 1 && b < n => Some(-(1 - eps(b))),
            ((0, a), (1, b)) if a >= 1 && b == a + 1 && b < n => Some(-eps(b)),
            _ => None,
        }
    };
    one(f, g).or_else(|| one(g, f).map(|x| -x)).unwrap_or(0)
}

/// Checks that Ω, the dual-edge counts and the listed bracket relations
/// describe the same Poisson structure on the face weights.
pub fn face_poisson_check(comb: &CombData) -> bool {
    let data = annulus_data(comb);
    let n = comb.n;
    let mut faces = data.faces.clone();
    faces.pop();
    let mut ok = true;
    for (a, &f) in faces.iter().enumerate() {
        for (b, &g) in faces.iter().enumerate() {
            let w = data.omega.get(a, b).clone();
            ok &= w == dual_bracket(&data.dual_edges, f, g);
            ok &= w == rat(listed_bracket(comb, f, g), 1);
        }
        let yn: Face = (0, n);
        ok &= dual_bracket(&data.dual_edges, yn, f) == rat(listed_bracket(comb, yn, f), 1);
    }
    ok
}

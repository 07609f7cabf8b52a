//! Seeded random instances for tests and the verification harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coxeter::{all_eps, build_x, CoxeterPair, FactorParams};
use crate::linalg::{rat, Rat};
use crate::weyl::MomentSeq;

pub type CoxRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CoxRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for a named stream derived from a base seed.
pub fn substream(seed: u64, tag: &str) -> CoxRng {
    let h = tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x1000_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

/// `p/q` with `p ∈ [−9, 9] \ {0}`, `q ∈ [1, 9]`.
pub fn nonzero_rat(r: &mut CoxRng) -> Rat {
    let mut p = 0;
    while p == 0 {
        p = r.gen_range(-9i64..=9);
    }
    rat(p, r.gen_range(1..=9))
}

pub fn positive_rat(r: &mut CoxRng) -> Rat {
    rat(r.gen_range(1i64..=9), r.gen_range(1..=9))
}

/// Full parameters `d`, `c^+`, `c^-`, all nonzero.
pub fn random_params(r: &mut CoxRng, n: usize) -> FactorParams {
    let d = (0..n).map(|_| nonzero_rat(r)).collect();
    let cp = (1..n).map(|_| nonzero_rat(r)).collect();
    let cm = (1..n).map(|_| nonzero_rat(r)).collect();
    FactorParams::new(d, cp, cm).expect("nonzero by construction")
}

/// Reduced parameters `(d, c)`, all nonzero.
pub fn random_reduced(r: &mut CoxRng, n: usize) -> FactorParams {
    let d = (0..n).map(|_| nonzero_rat(r)).collect();
    let c = (1..n).map(|_| nonzero_rat(r)).collect();
    FactorParams::reduced(d, c).expect("nonzero by construction")
}

pub fn random_positive_reduced(r: &mut CoxRng, n: usize) -> FactorParams {
    let d = (0..n).map(|_| positive_rat(r)).collect();
    let c = (1..n).map(|_| positive_rat(r)).collect();
    FactorParams::reduced(d, c).expect("positive by construction")
}

pub fn random_pair(r: &mut CoxRng, n: usize) -> CoxeterPair {
    let mut side = || {
        let mut s = vec![1];
        s.extend((2..n).filter(|_| r.gen_bool(0.5)));
        s.push(n);
        s
    };
    let (ip, im) = (side(), side());
    CoxeterPair::from_sets(n, ip, im).expect("valid sets")
}

pub fn random_eps(r: &mut CoxRng, n: usize) -> Vec<u8> {
    let all = all_eps(n);
    all[r.gen_range(0..all.len())].clone()
}

/// Moments `H_j` of a random tridiagonal cell element with a random gauge
/// `H_0`.
pub fn random_moments(r: &mut CoxRng, n: usize) -> MomentSeq<Rat> {
    loop {
        let p = random_params(r, n);
        let pair = CoxeterPair::tridiagonal(n).expect("n ≥ 2");
        let x = build_x(&pair, &p).expect("valid params");
        if let Ok(m) = MomentSeq::of(&x) {
            if let Ok(g) = m.with_gauge(nonzero_rat(r)) {
                return g;
            }
        }
    }
}

/// Positive floats `(c, d)` in moderate ranges for flow experiments.
pub fn flow_start(r: &mut CoxRng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let c = (1..n).map(|_| r.gen_range(0.2..1.0)).collect();
    let d = (0..n).map(|_| r.gen_range(0.5..1.5)).collect();
    (c, d)
}

//! Batch verification suites. Each suite runs seeded random trials and
//! reports `{suite, trials, failures, max_error}`; identical seeds give
//! identical reports.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::cluster::{
    case_formula, eps0, mutate_dir, positivity_probe, seed_init, shift_t, special_exchange_holds, special_x, transport,
    Dir,
};
use crate::config::Config;
use crate::coxeter::{all_eps, build_x, cell_membership, CoxeterPair};
use crate::error::{CoxError, Result};
use crate::gbd::{
    cal_d, cal_d_cluster, cal_d_direct, darboux_d, relativistic_trajectory, sigma_all, sigma_cluster, sigma_minors,
    toda_to_relativistic, GbdRequest,
};
use crate::io::float_value;
use crate::linalg::{rat, Rat, Scalar};
use crate::network::{a_matrix, b_matrix, boundary_matrix, build_disk_network, int_to_rat, lindstrom_minor, omega_matrix};
use crate::random::{
    flow_start, random_eps, random_moments, random_pair, random_params, random_positive_reduced, substream, CoxRng,
};
use crate::toda::{moment_flow_state, ode_residual, relativistic_rhs, rk4_flow, sup_diff, FlowState};
use crate::weyl::{inverse_roundtrip, weyl_from_x, HankelCache, MomentSeq};

pub const SUITES: [&str; 10] = [
    "inverse-roundtrip",
    "lindstrom",
    "integer-matrices",
    "transport",
    "mutation-cases",
    "gbd",
    "flow",
    "darboux",
    "toda-relativistic",
    "special-variables",
];

/// Redraws allowed per trial before a non-generic sample counts as a failure.
const REDRAWS: usize = 50;
const MAX_NOTES: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub failures: usize,
    pub max_error: f64,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.into(), trials: 0, failures: 0, max_error: 0.0, notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }

    fn check(&mut self, ok: bool, err: f64, note: impl FnOnce() -> String) {
        self.trials += 1;
        if err.is_nan() {
            self.max_error = f64::INFINITY;
        } else {
            self.max_error = self.max_error.max(err);
        }
        if !ok {
            self.failures += 1;
            if self.notes.len() < MAX_NOTES {
                self.notes.push(note());
            }
        }
    }

    fn exact(&mut self, ok: bool, note: impl FnOnce() -> String) {
        self.check(ok, if ok { 0.0 } else { 1.0 }, note)
    }

    fn error(&mut self, e: &CoxError, what: &str) {
        self.check(false, f64::INFINITY, || format!("{what}: {e}"))
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "suite": self.suite,
            "trials": self.trials,
            "failures": self.failures,
            "max_error": float_value(self.max_error),
        });
        if !self.notes.is_empty() {
            v["notes"] = json!(self.notes);
        }
        v
    }
}

/// Suite selection. `n` restricts to one size; `trials` overrides the
/// per-instance repetition count.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub config: Config,
}

impl VerifyOptions {
    pub fn new(config: Config) -> Self {
        VerifyOptions { n: None, trials: None, config }
    }

    fn sizes(&self, lo: usize, hi: usize) -> Vec<usize> {
        match self.n {
            Some(n) => vec![n],
            None => (lo..=hi).collect(),
        }
    }

    fn reps(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    fn rng(&self, suite: &str) -> CoxRng {
        substream(self.config.seed, suite)
    }
}

/// Runs one suite, or every suite for `"all"`.
pub fn run(name: &str, opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    opts.config.validate()?;
    if let Some(n) = opts.n {
        if n < 2 {
            return Err(CoxError::Argument("n must be at least 2".into()));
        }
    }
    if name == "all" {
        return SUITES.iter().map(|s| run_one(s, opts)).collect();
    }
    Ok(vec![run_one(name, opts)?])
}

pub fn run_one(name: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    Ok(match name {
        "inverse-roundtrip" => inverse_roundtrip_suite(opts),
        "lindstrom" => lindstrom_suite(opts),
        "integer-matrices" => integer_matrices_suite(opts),
        "transport" => transport_suite(opts),
        "mutation-cases" => mutation_cases_suite(opts),
        "gbd" => gbd_suite(opts),
        "flow" => flow_suite(opts),
        "darboux" => darboux_suite(opts),
        "toda-relativistic" => toda_relativistic_suite(opts),
        "special-variables" => special_variables_suite(opts),
        other => return Err(CoxError::Argument(format!("unknown suite {other:?}; expected one of {SUITES:?} or all"))),
    })
}

/// One report for a single suite, an aggregate with a `suites` list
/// otherwise.
pub fn report_json(reports: &[SuiteReport]) -> Value {
    if let [one] = reports {
        return one.to_json();
    }
    let max = reports.iter().map(|r| r.max_error).fold(0.0, f64::max);
    json!({
        "suite": "all",
        "trials": reports.iter().map(|r| r.trials).sum::<usize>(),
        "failures": reports.iter().map(|r| r.failures).sum::<usize>(),
        "max_error": float_value(max),
        "suites": reports.iter().map(SuiteReport::to_json).collect::<Vec<_>>(),
    })
}

fn rat_gap(a: &[Rat], b: &[Rat]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs().to_f64()).fold(0.0, f64::max)
}

/// Retries `f` while it reports a non-generic sample.
fn generic<T>(rng: &mut CoxRng, mut f: impl FnMut(&mut CoxRng) -> Result<T>) -> Result<T> {
    let mut last = None;
    for _ in 0..REDRAWS {
        match f(rng) {
            Err(e @ CoxError::NonGeneric(_)) | Err(e @ CoxError::SingularMatrix(_)) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one draw"))
}

fn inverse_roundtrip_suite(o: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("inverse-roundtrip");
    let mut rng = o.rng(&rep.suite);
    for n in o.sizes(2, 6) {
        let pairs = if n <= 4 { CoxeterPair::all(n) } else { (0..20).map(|_| random_pair(&mut rng, n)).collect() };
        for pair in &pairs {
            for _ in 0..o.reps(100) {
                let out = generic(&mut rng, |r| {
                    let p = random_params(r, n);
                    Ok((inverse_roundtrip(pair, &p)?, p))
                });
                match out {
                    Ok((q, p)) => {
                        let err = rat_gap(&q.d, &p.d).max(rat_gap(&q.c(), &p.c()));
                        rep.check(err == 0.0, err, || format!("n={n} {pair:?}: {p:?} → {q:?}"));
                    }
                    Err(e) => rep.error(&e, &format!("n={n} {:?}", pair.iplus())),
                }
            }
        }
    }
    rep
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn lindstrom_suite(o: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("lindstrom");
    let mut rng = o.rng(&rep.suite);
    for n in o.sizes(2, 5) {
        for pair in CoxeterPair::all(n) {
            for _ in 0..o.reps(1) {
                let p = random_params(&mut rng, n);
                let (net, x) = match build_disk_network(&pair, &p).and_then(|net| Ok((net, build_x(&pair, &p)?))) {
                    Ok(v) => v,
                    Err(e) => {
                        rep.error(&e, "network");
                        continue;
                    }
                };
                let b = boundary_matrix(&net);
                rep.exact(b == x, || format!("boundary matrix differs for {pair:?}"));
                let mut bad = 0;
                for k in 1..=n.min(3) {
                    for rows in subsets(n, k) {
                        for cols in subsets(n, k) {
                            let ok = matches!((lindstrom_minor(&net, &rows, &cols), x.minor(&rows, &cols)), (Ok(a), Ok(b)) if a == b);
                            bad += usize::from(!ok);
                        }
                    }
                }
                rep.exact(bad == 0, || format!("{bad} minors differ for {pair:?}"));
            }
        }
    }
    rep
}

fn integer_matrices_suite(o: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("integer-matrices");
    for n in o.sizes(2, 7) {
        for eps in all_eps(n) {
            let pair = match CoxeterPair::canonical_for_eps(&eps) {
                Ok(p) => p,
                Err(e) => {
                    rep.error(&e, &format!("{eps:?}"));
                    continue;
                }
            };
            let comb = pair.comb();
            let om = omega_matrix(comb);
            let (bf, _) = b_matrix(comb);
            let det_one = om.det().map(|d| d.is_one()).unwrap_or(false);
            let skew = (0..2 * n).all(|r| (0..2 * n).all(|c| bf[r][c] == -bf[c][r]));
            let a = int_to_rat(&a_matrix(comb));
            let congruent = om.inverse().map(|oi| a.transpose().mul(&oi).mul(&a) == int_to_rat(&bf)).unwrap_or(false);
            rep.exact(det_one && skew && congruent, || {
                format!("ε={eps:?}: det Ω = 1 {det_one}, skew {skew}, AᵀΩ⁻¹A = B {congruent}")
            });
        }
    }
    rep
}

fn moment_cache(rng: &mut CoxRng, n: usize) -> HankelCache<Rat> {
    HankelCache::new(random_moments(rng, n))
}

fn transport_suite(o: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("transport");
    let mut rng = o.rng(&rep.suite);
    for n in o.sizes(2, 5) {
        let all = all_eps(n);
        for _ in 0..o.reps(10) {
            let got = generic(&mut rng, |r| {
                let mut c = moment_cache(r, n);
                all.iter().map(|e| seed_init(e, &mut c)).collect::<Result<Vec<_>>>()
            });
            let seeds = match got {
                Ok(s) => s,
                Err(e) => {
                    rep.error(&e, "seed_init");
                    continue;
                }
            };
            for (a, s) in seeds.iter().enumerate() {
                for (b, t) in seeds.iter().enumerate() {
                    let ok = matches!(transport(s, &all[b]), Ok(u) if &u == t);
                    rep.exact(ok, || format!("{:?} → {:?}", all[a], all[b]));
                }
            }
        }
    }
    rep
}

fn mutation_cases_suite(o: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("mutation-cases");
    let mut rng = o.rng(&rep.suite);
    for n in o.sizes(2, 5) {
        for _ in 0..o.reps(3) {
            let mut c = moment_cache(&mut rng, n);
            for eps in all_eps(n) {
                let s = match seed_init(&eps, &mut c) {
                    Ok(s) => s,
                    Err(e) => {
                        rep.error(&e, &format!("seed_init {eps:?}"));
                        continue;
                    }
                };
                for i in 1..n {
                    for sl in 0..2 {
                        let d = Dir::new(sl, i);
                        match (mutate_dir(&s, d), case_formula(&eps, d, &mut c)) {
                            (Ok(m), Ok(v)) => {
                                let err = (m.at(d) - &v).abs().to_f64();
                                rep.check(err == 0.0 && m.at(d) == &v, err, || format!("ε={eps:?} {d:?}"));
                            }
                            (Err(e), _) | (_, Err(e)) => rep.error(&e, &format!("ε={eps:?} {d:?}")),
                        }
                    }
                }
            }
        }
    }
    rep
}

fn gbd_suite(o: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("gbd");
    let mut rng = o.rng(&rep.suite);
    for n in o.sizes(2, 4) {
        for _ in 0..o.reps(50) {
            let got = generic(&mut rng, |r| {
                let (e, f) = (random_eps(r, n), random_eps(r, n));
                let req = GbdRequest::from_eps(&e, &f, random_params(r, n))?;
                let routes = sigma_all(&req)?;
                Ok((req, routes))
            });
            let (req, routes) = match got {
                Ok(v) => v,
                Err(e) => {
                    rep.error(&e, "gbd");
                    continue;
                }
            };
            let tag = format!("{:?} → {:?}", req.from.eps(), req.to.eps());
            let err = rat_gap(&routes.cluster.d, &routes.minors.d)
                .max(rat_gap(&routes.cluster.c(), &routes.minors.c()))
                .max(rat_gap(&routes.cluster.d, &routes.table.d))
                .max(rat_gap(&routes.cluster.c(), &routes.table.c()));
            rep.check(routes.agree(), err, || format!("routes differ {tag}"));
            let inv = (|| -> Result<bool> {
                let x = build_x(&req.from, &req.params)?;
                let y = build_x(&req.to, &routes.cluster)?;
                let (hx, hy) = (MomentSeq::of(&x)?, MomentSeq::of(&y)?);
                let same_h = (0..2 * n as i64).map(|j| Ok(hx.h(j)? == hy.h(j)?)).collect::<Result<Vec<_>>>()?;
                let back = sigma_cluster(&req.inverse(routes.cluster.clone())?)?;
                Ok(same_h.iter().all(|b| *b) && weyl_from_x(&x)? == weyl_from_x(&y)? && back == req.params)
            })();
            match inv {
                Ok(ok) => rep.exact(ok, || format!("moments or inverse differ {tag}")),
                Err(e) => rep.error(&e, &tag),
            }
        }
    }
    rep
}

fn flow_suite(o: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("flow");
    let mut rng = o.rng(&rep.suite);
    let cfg = &o.config;
    let stride = ((0.1 / cfg.dt).round() as usize).max(1);
    for n in o.sizes(2, 5) {
        let charts = [CoxeterPair::tridiagonal(n), CoxeterPair::relativistic(n)];
        for pair in charts.into_iter().flatten() {
            for _ in 0..o.reps(2) {
                let k = 1;
                let (c, d) = flow_start(&mut rng, n);
                let tag = format!("n={n} ε={:?} k={k}", pair.eps());
                let run = (|| -> Result<(f64, crate::toda::ConservationReport)> {
                    let start = FlowState::new(&pair, c, d)?;
                    let tr = rk4_flow(&pair, &start, k, 1.0, cfg.dt)?;
                    let mut diff: f64 = 0.0;
                    for s in tr.states.iter().step_by(stride).skip(1) {
                        diff = diff.max(sup_diff(&moment_flow_state(&pair, &start, k, s.t)?, s));
                    }
                    Ok((diff, tr.report))
                })();
                match run {
                    Ok((diff, r)) => {
                        let fd = r.f_drift.iter().cloned().fold(0.0, f64::max);
                        let ok = diff < cfg.tol_flow
                            && fd < cfg.tol_conservation
                            && r.det_drift < cfg.tol_det
                            && r.charpoly_drift < cfg.tol_charpoly;
                        rep.check(ok, diff, || {
                            format!("{tag}: diff {diff:e}, F drift {fd:e}, det {:e}, charpoly {:e}", r.det_drift, r.charpoly_drift)
                        });
                    }
                    Err(e) => rep.error(&e, &tag),
                }
            }
        }
    }
    rep
}

fn darboux_suite(o: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("darboux");
    let mut rng = o.rng(&rep.suite);
    for n in o.sizes(2, 4) {
        for pair in CoxeterPair::all(n) {
            for _ in 0..o.reps(2) {
                let tag = format!("n={n} I+={:?} I-={:?}", pair.iplus(), pair.iminus());
                let got = generic(&mut rng, |r| {
                    let p = random_params(r, n);
                    let x = build_x(&pair, &p)?;
                    let dx = darboux_d(&x)?;
                    let direct = cal_d_direct(&pair, &p)?;
                    let via = cal_d(&pair, &p)?;
                    Ok((x, dx, direct, via))
                });
                let (x, dx, direct, via) = match got {
                    Ok(v) => v,
                    Err(e) => {
                        rep.error(&e, &tag);
                        continue;
                    }
                };
                let shift = (|| -> Result<bool> {
                    let (hx, hd) = (MomentSeq::of(&x)?, MomentSeq::of(&dx)?);
                    let h1 = hx.h(1)?;
                    for i in -2..=2 * n as i64 - 2 {
                        if hd.h(i)? != hx.h(i + 1)? / &h1 {
                            return Ok(false);
                        }
                    }
                    Ok(cell_membership(&dx)?.as_ref() == Some(&pair))
                })();
                match shift {
                    Ok(ok) => rep.exact(ok, || format!("moment shift or membership fails {tag}")),
                    Err(e) => rep.error(&e, &tag),
                }
                rep.exact(direct == via, || format!("calD routes differ {tag}"));
                // cluster route on the det-1 slice: positive data with Π d = 2^n
                let mut p = random_positive_reduced(&mut rng, n);
                let rest = p.d[..n - 1].iter().fold(Rat::one(), |a, b| a * b);
                p.d[n - 1] = rat(1 << n, 1) / rest;
                match (cal_d_cluster(&pair, &p), cal_d(&pair, &p)) {
                    (Ok(a), Ok(b)) => rep.exact(a == b, || format!("cluster calD differs {tag}")),
                    (Err(e), _) | (_, Err(e)) => rep.error(&e, &tag),
                }
            }
        }
    }
    rep
}

fn toda_relativistic_suite(o: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("toda-relativistic");
    let mut rng = o.rng(&rep.suite);
    let cfg = &o.config;
    for n in o.sizes(3, 4) {
        for _ in 0..o.reps(3) {
            let (c, d) = flow_start(&mut rng, n);
            let run = (|| -> Result<f64> {
                let tri = CoxeterPair::tridiagonal(n)?;
                let tr = rk4_flow(&tri, &FlowState::new(&tri, c, d)?, 1, 1.0, cfg.dt)?;
                Ok(ode_residual(&relativistic_trajectory(&tr.states)?, cfg.dt, relativistic_rhs))
            })();
            match run {
                Ok(res) => rep.check(res < cfg.tol_residual, res, || format!("n={n} residual {res:e}")),
                Err(e) => rep.error(&e, &format!("n={n}")),
            }
            // exact endpoint: the corollary map equals the minor route
            let exact = generic(&mut rng, |r| {
                let p = random_params(r, n).to_reduced();
                let req = GbdRequest::new(CoxeterPair::tridiagonal(n)?, CoxeterPair::relativistic(n)?, p.clone())?;
                let target = sigma_minors(&req)?;
                let (c, d) = (p.c(), p.d.clone());
                let a: Vec<Rat> = c.iter().zip(&d).map(|(c, d)| c * d * d).collect();
                let b: Vec<Rat> =
                    (0..n).map(|i| &d[i] + if i > 0 { &c[i - 1] * &d[i - 1] } else { Rat::zero() }).collect();
                let (d2, ct) = toda_to_relativistic(&a, &b)?;
                let expect: Vec<Rat> = target.c().iter().zip(&target.d).map(|(c, d)| c * d).collect();
                Ok(d2 == target.d && ct == expect)
            });
            match exact {
                Ok(ok) => rep.exact(ok, || format!("n={n} endpoint map differs")),
                Err(e) => rep.error(&e, &format!("n={n} endpoint")),
            }
        }
    }
    rep
}

fn special_variables_suite(o: &VerifyOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("special-variables");
    let mut rng = o.rng(&rep.suite);
    for n in o.sizes(2, 5) {
        for _ in 0..o.reps(3) {
            let run = (|| -> Result<(bool, bool, bool)> {
                let mut c = moment_cache(&mut rng, n);
                let s0 = seed_init(&eps0(n), &mut c)?;
                let x2n = s0.x[2 * n - 1].clone();
                let m = c.moments().clone();
                // (0,1) carries H_{2r}, (1,1) carries H_{2r+1}, after r shifts
                let mut moments_ok = true;
                let mut windows_ok = true;
                let mut s = s0.clone();
                for r in 0..n as i64 {
                    if r > 0 {
                        s = shift_t(&s, true)?;
                    }
                    moments_ok &= s.x[0] == m.big_h(2 * r)?;
                    if 2 * r + 1 <= 2 * n as i64 - 2 {
                        moments_ok &= s.x[1] == m.big_h(2 * r + 1)?;
                    }
                    for j in 1..n {
                        for sl in 0..2u8 {
                            let k = sl as i64 + j as i64 - 1 + 2 * r;
                            windows_ok &= s.at(Dir::new(sl, j)) == &special_x(&mut c, &x2n, j, k)?;
                        }
                    }
                }
                let mut exch = true;
                for j in 1..n {
                    for k in -2..=2 * n as i64 + 1 {
                        exch &= special_exchange_holds(&mut c, &x2n, j, k)?;
                    }
                }
                Ok((moments_ok, windows_ok, exch))
            })();
            match run {
                Ok((a, b, e)) => {
                    rep.exact(a, || format!("n={n}: shifted seed misses some H_k"));
                    rep.exact(b, || format!("n={n}: shifted window differs from x(j,k)"));
                    rep.exact(e, || format!("n={n}: exchange identity fails"));
                }
                Err(e) => rep.error(&e, &format!("n={n}")),
            }
            // positivity shadow: positive parameters keep every probed value positive
            let pos = (|| -> Result<bool> {
                let pair = random_pair(&mut rng, n);
                let x = build_x(&pair, &random_positive_reduced(&mut rng, n))?;
                let mut c = HankelCache::new(MomentSeq::of(&x)?);
                let paths: Vec<Vec<usize>> = (0..20)
                    .map(|_| (0..rng.gen_range(1..=6)).map(|_| rng.gen_range(1..=2 * n - 2)).collect())
                    .collect();
                for eps in all_eps(n) {
                    if !positivity_probe(&eps, &mut c, &paths)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            })();
            match pos {
                Ok(ok) => rep.exact(ok, || format!("n={n}: positivity probe failed")),
                Err(e) => rep.error(&e, &format!("n={n} positivity")),
            }
        }
    }
    rep
}

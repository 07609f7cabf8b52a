//! The ten acceptance criteria, each run through the verification harness
//! with its pinned sizes, trial counts and tolerances. Prints one line per
//! criterion and fails if any criterion fails.

use std::time::{Duration, Instant};

use coxtoda::config::Config;
use coxtoda::verify::{run_one, SuiteReport, VerifyOptions};

struct Criterion {
    id: usize,
    suite: &'static str,
    claim: &'static str,
    budget: Option<Duration>,
}

const fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        suite: "inverse-roundtrip",
        claim: "rho(tau(moments(X))) = (d, c) exactly; all pairs n<=4, 20 random pairs n=5,6, 100 parameter sets each",
        budget: secs(60),
    },
    Criterion {
        id: 2,
        suite: "lindstrom",
        claim: "boundary matrix = X and path-family sums = minors up to order 3, n<=5",
        budget: secs(30),
    },
    Criterion {
        id: 3,
        suite: "integer-matrices",
        claim: "det Omega = 1, Bfull skew, A^T Omega^-1 A = Bfull for every eps, n<=7",
        budget: secs(10),
    },
    Criterion {
        id: 4,
        suite: "transport",
        claim: "transport(seed_init(eps)) = seed_init(eps') for all ordered pairs, n<=5, 10 moment sequences",
        budget: secs(60),
    },
    Criterion {
        id: 5,
        suite: "mutation-cases",
        claim: "every single mutation equals its Hankel case formula, n<=5",
        budget: None,
    },
    Criterion {
        id: 6,
        suite: "gbd",
        claim: "cluster = table = minor routes, moments and Weyl function invariant, inverse is identity; n<=4, 50 instances",
        budget: secs(60),
    },
    Criterion {
        id: 7,
        suite: "flow",
        claim: "moment vs RK4 < 1e-6 on [0,1] at dt=1e-3; F drift < 1e-8, det < 1e-10, char-poly < 1e-9; n<=5",
        budget: None,
    },
    Criterion {
        id: 8,
        suite: "darboux",
        claim: "h_i(D(X)) = h_{i+1}/h_1 for i in [-2, 2n-2], membership, calD routes agree incl. cluster route on det-1 slice; n<=4",
        budget: None,
    },
    Criterion {
        id: 9,
        suite: "toda-relativistic",
        claim: "transformed Toda trajectory solves the relativistic lattice, residual < 1e-5, n=3,4",
        budget: None,
    },
    Criterion {
        id: 10,
        suite: "special-variables",
        claim: "shift_T windows hold H_k and x(j,k), exchange identities hold, positivity probe passes",
        budget: None,
    },
];

fn line(c: &Criterion, r: &SuiteReport, took: Duration) -> (bool, String) {
    let in_time = c.budget.map_or(true, |b| took <= b);
    let ok = r.passed() && in_time;
    let budget = c.budget.map_or(String::new(), |b| format!(" (budget {}s)", b.as_secs()));
    let mut s = format!(
        "[{}] criterion {:>2} {:<18} trials={} failures={} max_error={:.3e} time={:.1}s{}  -- {}",
        if ok { "PASS" } else { "FAIL" },
        c.id,
        c.suite,
        r.trials,
        r.failures,
        r.max_error,
        took.as_secs_f64(),
        budget,
        c.claim
    );
    for n in &r.notes {
        s.push_str(&format!("\n        {n}"));
    }
    (ok, s)
}

#[test]
fn acceptance_criteria() {
    let opts = VerifyOptions::new(Config::default());
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let report = run_one(c.suite, &opts).expect("known suite");
        let (ok, text) = line(c, &report, start.elapsed());
        println!("{text}");
        if !ok {
            failed.push(c.id);
        }
    }
    println!("acceptance: {}/{} criteria pass", CRITERIA.len() - failed.len(), CRITERIA.len());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

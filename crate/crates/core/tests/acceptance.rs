use std::process::ExitCode;
use std::time::Instant;

use polyheight_core::verify::{run_all, DEFAULT_SEED};

const CRITERIA: [(usize, &str, &str); 10] = [
    (1, "route_consistency", "Okounkov and BKK heights agree; pinned instance -12, -12, -4"),
    (2, "i_zero", "I_hat at i = 0 is vol(D) deg(gamma)"),
    (3, "polynomiality", "finite differences of order t+i+1 vanish"),
    (4, "derivative", "mixed derivative on a unimodular cone is i deg(c(A)^(i-1) [inf] gamma)"),
    (5, "non_cone", "mixed derivatives along non-cone rays vanish"),
    (6, "simplex_formula", "symmetric form integral equals diagonal integral"),
    (7, "minima", "worked minima, closed absolute minimum, essential minimum, monotonicity"),
    (8, "legendre", "double conjugation is the identity"),
    (9, "toric_height", "chi of the toric body is (t+1)! times the roof integral"),
    (10, "hypograph_volume", "hypograph volume is the roof integral"),
];

fn main() -> ExitCode {
    let start = Instant::now();
    let results = run_all(DEFAULT_SEED);
    let mut failed = 0;
    for (n, suite, what) in CRITERIA {
        let r = results.iter().find(|r| r.name == suite).expect("every criterion has a suite");
        let verdict = if r.ok() { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {n} [{suite}] {}/{} cases: {what}", r.passed, r.cases);
        if let Some(c) = &r.counterexample {
            println!("    counterexample: {c}");
        }
        if !r.ok() {
            failed += 1;
        }
    }
    println!("acceptance: {} of 10 criteria passed in {:.1?} (seed {DEFAULT_SEED})", 10 - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

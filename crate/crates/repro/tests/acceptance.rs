//! Runs every acceptance criterion, printing one line each.
//!
//! `UPHOCORE_SEED` overrides the seed of the randomized criteria.

use uphocore_repro::{run_criterion, CRITERIA, DEFAULT_SEED};

fn main() {
    let seed = std::env::var("UPHOCORE_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    let filter: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, _) in CRITERIA {
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let outcome = run_criterion(n, seed);
        println!("{outcome}");
        failed += !outcome.passed as usize;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}

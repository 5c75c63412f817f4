//! Replays the full benchmark protocol on the bundled 1000-sample digits set:
//! budgets 20..120, one initial label per class, a 50/50 split, ten pseudo
//! annotators and k-means++ with 500 restarts.
//!
//! `cargo run --release --example protocol_replay -- [trials] [out.csv]`

use std::time::Instant;

use alrl::bench::{aggregate, write_rows, write_rows_to, ExperimentConfig, OVERALL};
use alrl::prelude::*;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/protocol_digits.json");
    let mut cfg = ExperimentConfig::from_file(path)?;
    if let Some(t) = args.next() {
        cfg.trials = t.parse().map_err(|_| Error::Config(format!("bad trial count {t}")))?;
    }
    cfg.record_timing = true;

    let start = Instant::now();
    let rows = run_experiment(&cfg)?;
    println!("{} rows in {:.1}s", rows.len(), start.elapsed().as_secs_f64());
    if let Some(out) = args.next() {
        write_rows_to(&rows, out)?;
    }

    let mut per_method: Vec<(String, u64)> = Vec::new();
    for r in rows.iter().filter(|r| r.budget == *cfg.budgets.last().unwrap()) {
        match per_method.iter_mut().find(|(m, _)| *m == r.method) {
            Some((_, ms)) => *ms += r.elapsed_ms,
            None => per_method.push((r.method.clone(), r.elapsed_ms)),
        }
    }
    for (m, ms) in per_method {
        println!("{m:>10}: {:.1}s at the largest budget", ms as f64 / 1000.0);
    }
    let summary: Vec<_> = aggregate(&rows).into_iter().filter(|s| s.dataset != OVERALL).collect();
    write_rows(&summary, std::io::stdout().lock())
}

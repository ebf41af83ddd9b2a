//! Runs the 75-trial benchmark for both methods and prints per-trial
//! outcomes.
//!
//!     cargo run --release --example bench_dump [seed]

use graspgeom::eval::{run_benchmark, Method, OutcomeKind};
use graspgeom::synthscene::standard_suite;
use graspgeom::PipelineConfig;

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7u64);
    let cfg = PipelineConfig::default();
    let suite = standard_suite(seed);
    for method in [Method::Ours, Method::Baseline] {
        let t0 = std::time::Instant::now();
        let report = run_benchmark(&suite, method, seed, &cfg).unwrap();
        let dt = t0.elapsed();
        let successes = report.count(OutcomeKind::Success);
        println!(
            "== {} ({dt:?}): failed {}%, unstable {}%, dropped {}%, success {}/{}",
            report.method,
            report.rates.failed_pct,
            report.rates.unstable_pct,
            report.rates.dropped_pct,
            successes,
            report.trial_count,
        );
        for t in &report.trials {
            println!(
                "  {:2}  {:14} {:9} {:?}{}",
                t.trial,
                t.shape,
                t.pose,
                t.outcome,
                t.torque_margin
                    .map(|m| format!("  margin {:.1} mm", m * 1e3))
                    .unwrap_or_default()
            );
        }
    }
}

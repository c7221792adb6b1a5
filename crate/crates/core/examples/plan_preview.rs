//! Non-rigorous planning pass: locate states, propose a segment cover.
//!
//! The planner runs cheap floating-point shooting to guess where the bound
//! states sit, then lays out a cover of the initial-height half-line:
//! `fall` segments between states, a narrow `bound_state_good` segment
//! around each, and a rescaled tail for all large heights. Nothing here is
//! trusted — the rigorous phase re-proves every segment.

use boundstate::methods::MethodConfig;
use boundstate::planner::{build_plan, locate_bound_states};

fn main() {
    let states = locate_bound_states(2).unwrap();
    println!("float estimates of the first bound states:");
    for (n, b) in states.iter().enumerate() {
        println!("  n = {n}: b ~ {b:.6}");
    }

    let plan = build_plan(1, 0.2, &MethodConfig::default()).unwrap();
    println!("proposed cover for n <= 1 ({} segments):", plan.segments.len());
    for seg in &plan.segments {
        let idx = seg
            .state_index
            .map(|n| format!(" (state {n})"))
            .unwrap_or_default();
        println!(
            "  [{:>9.6}, {:>9.6}]  {}{idx}",
            seg.interval.lo(),
            seg.interval.hi(),
            seg.method.name()
        );
    }
    println!("plan JSON is stable and replayable:");
    println!("{}", plan.to_json());
}

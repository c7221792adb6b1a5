//! The full pipeline: plan, verify the cover, execute, recheck.
//!
//! Proves that the ground state (`n = 0`) is the unique bound state with no
//! sign change, by covering the whole half-line of initial heights with
//! rigorously-dispatched segments. Produces the same JSON certificate as
//! `prove --n 0` and re-validates it from its serialized form.

use boundstate::orchestrator::{emit_table, prove, recheck, ProverConfig};

fn main() {
    let config = ProverConfig {
        n_states: 0,
        ..ProverConfig::default()
    };

    let cert = prove(&config).expect("planning and cover check");
    println!("{}", emit_table(&cert));
    for c in &cert.conclusions {
        println!(
            "state {}: {} in [{:.6}, {:.6}]",
            c.state_index,
            if c.unique { "unique" } else { "unproved" },
            c.interval.lo(),
            c.interval.hi()
        );
    }

    let json = serde_json::to_string_pretty(&cert).unwrap();
    recheck(&json).expect("certificate self-check");
    println!("certificate rechecked OK ({} bytes of JSON)", json.len());

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, &json).unwrap();
        println!("wrote {path}");
    }
}

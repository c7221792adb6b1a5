//! Running the per-interval proof methods by hand.
//!
//! `fall` rules out bound states on an interval of initial heights by
//! certifying negative energy (the creek: once below, trapped forever with
//! the wrong asymptotics). `bound_state_good` pins down the interval that
//! contains the n-th excited state via a trapping-region argument on the
//! reflected solution. Both bisect the input interval as needed.

use boundstate::interval::Interval;
use boundstate::methods::{bound_state_good, fall, MethodConfig, MethodStatus};

fn report(label: &str, r: &boundstate::methods::MethodResult) {
    match (&r.status, &r.witness) {
        (MethodStatus::Proved, Some(w)) => println!(
            "{label}: proved with {} subdivision(s), {} crossing(s), final t = {:.3}, \
             y in [{:+.6}, {:+.6}]",
            w.subdivisions,
            w.crossings,
            w.t,
            w.y.lo(),
            w.y.hi()
        ),
        (st, _) => println!("{label}: {st:?}"),
    }
}

fn main() {
    let cfg = MethodConfig::default();

    // no bound state anywhere in [2, 2.2]: every solution falls into the creek
    let r = fall(&Interval::new(2.0, 2.2), &cfg);
    report("fall [2.0, 2.2]", &r);

    // the ground state lives in this window: fall must fail on it...
    let r = fall(&Interval::new(4.33, 4.34), &cfg);
    println!(
        "fall [4.33, 4.34]: {:?} (expected: the ground state is inside)",
        r.status
    );

    // ...and bound_state_good proves uniqueness of the state it contains
    let r = bound_state_good(&Interval::new(4.33, 4.345), 0, &cfg);
    report("bound_state_good [4.33, 4.345] (n = 0)", &r);
}

//! Exact zero-crossing counts along validated trajectories.
//!
//! The number of sign changes of `y(t)` is what distinguishes candidate
//! excited states, so it must be counted exactly, not estimated. Whenever
//! the enclosure of `y` touches zero, a sign-ambiguity window opens; it is
//! closed either by an energy-based travel bound (too little speed for two
//! crossings) or by a sign-definite velocity (monotone, so at most one),
//! and the end-sign parity then settles the count.

use boundstate::desingularize::{choose_t0, initial_enclosure_main};
use boundstate::dynamics::count_crossings;
use boundstate::integrator::{integrate, Integration, IntegratorConfig, StopCondition};
use boundstate::interval::Interval;

fn main() {
    // below the ground state a solution never crosses; between consecutive
    // bound states it crosses a fixed number of times before trapping
    for (b, t_end) in [(2.0, 4.0), (6.0, 5.0), (10.0, 5.0), (16.0, 5.0)] {
        let bi = Interval::point(b);
        let t0 = choose_t0(&bi, 0.1).unwrap();
        let seed = initial_enclosure_main(&bi, &t0).unwrap();
        let session = Integration::from_seed(&seed, IntegratorConfig::default());
        let traj = integrate(session, StopCondition::AtTime(t_end)).unwrap();
        let count = count_crossings(&traj).unwrap();
        println!(
            "b = {b:>4}: {} crossing(s) by t = {t_end} (exact: {}, {} steps)",
            count.count,
            count.exact,
            traj.steps.len()
        );
    }
}

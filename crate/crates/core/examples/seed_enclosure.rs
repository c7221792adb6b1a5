//! Rigorous launch data near the singular time.
//!
//! The equation has a `2/t` damping term, so we cannot start an enclosure
//! at `t = 0`. Instead a Picard iterate with explicit one-sided error bounds
//! gives a tight box at a small positive `t0`, valid whenever `t0` stays
//! below a computable threshold `t*(b)`.

use boundstate::desingularize::{
    initial_enclosure_main, initial_enclosure_scaled, t_star,
};
use boundstate::interval::Interval;

fn show(label: &str, x: Interval) {
    println!("  {label:8} [{:+.12e}, {:+.12e}]  width {:.2e}", x.lo(), x.hi(), x.width());
}

fn main() {
    let b = Interval::point(3.0);
    let ts = t_star(&b).unwrap();
    println!("b = 3: seed valid for t0 <= t* = {:.6}", ts.lo());

    let t0 = Interval::point(0.1);
    let seed = initial_enclosure_main(&b, &t0).unwrap();
    println!("main-system seed at t0 = 0.1:");
    show("y", seed.y);
    show("y'", seed.v_y);
    show("d/db y", seed.delta);
    show("d/db y'", seed.v_delta);

    // a thick b gives a thick seed, still rigorous
    let bw = Interval::new(3.0, 3.01);
    let thick = initial_enclosure_main(&bw, &t0).unwrap();
    println!("same, for b in [3, 3.01]:");
    show("y", thick.y);
    show("d/db y", thick.delta);

    // t0 above t* is rejected rather than silently unsound
    let err = initial_enclosure_main(&b, &Interval::point(1.0)).unwrap_err();
    println!("t0 = 1.0 rejected: {err}");

    // the rescaled system covers the b -> infinity tail, parametrised by
    // beta = 1/b; beta = 0 is the limiting equation and is accepted
    let beta = Interval::new(0.0, 0.05);
    let scaled = initial_enclosure_scaled(&beta, &Interval::point(0.05)).unwrap();
    println!("rescaled seed for beta in [0, 0.05] at t0 = 0.05:");
    show("w", scaled.w);
    show("w'", scaled.v_w);
}

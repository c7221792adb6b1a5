//! Non-rigorous floating-point reference solutions.
//!
//! Used by the planner to locate bound states and by the test suite as an
//! independent check on the rigorous enclosures. Nothing in the proof path
//! depends on this module.
//!
//! The singular origin is handled by a power-series expansion of the solution
//! at `t = 0` (the even-order recurrence of the radial Laplacian), evaluated
//! at a small positive time; classic RK4 takes over from there.

/// Plain-f64 versions of the nonlinearity, kept separate from the interval ones.
pub mod cubic_f64 {
    pub fn f(y: f64) -> f64 {
        y * y * y - y
    }
    pub fn f_prime(y: f64) -> f64 {
        3.0 * y * y - 1.0
    }
    pub fn potential(y: f64) -> f64 {
        0.25 * y.powi(4) - 0.5 * y * y
    }
    pub fn energy(y: f64, v: f64) -> f64 {
        0.5 * v * v + potential(y)
    }
}

use cubic_f64::{energy, f, f_prime};

const SERIES_ORDER: usize = 28;

/// Power-series start for the main 4-variable system at time `t`.
///
/// Ansatz `y = sum a_k t^k` with `a_{k+2} = -f(y)_k / ((k+2)(k+3))`, and the
/// same recurrence for the variation with `f'(y) delta` on the right.
pub fn series_start_main(b: f64, t: f64) -> [f64; 4] {
    let n = SERIES_ORDER;
    let mut a = vec![0.0; n + 1]; // y coefficients
    let mut d = vec![0.0; n + 1]; // delta coefficients
    a[0] = b;
    d[0] = 1.0;
    let mut y2 = vec![0.0; n + 1];
    let mut y3 = vec![0.0; n + 1];
    let mut y2d = vec![0.0; n + 1];
    for k in 0..n - 1 {
        y2[k] = (0..=k).map(|i| a[i] * a[k - i]).sum();
        y3[k] = (0..=k).map(|i| y2[i] * a[k - i]).sum();
        y2d[k] = (0..=k).map(|i| y2[i] * d[k - i]).sum();
        let fk = y3[k] - a[k];
        let fpk = 3.0 * y2d[k] - d[k];
        let denom = ((k + 2) * (k + 3)) as f64;
        a[k + 2] = -fk / denom;
        d[k + 2] = -fpk / denom;
    }
    let eval = |c: &[f64]| {
        let mut v = 0.0;
        for &ck in c.iter().rev() {
            v = v * t + ck;
        }
        v
    };
    let deriv = |c: &[f64]| {
        let mut s = 0.0;
        for (k, &ck) in c.iter().enumerate().skip(1) {
            s += ck * k as f64 * t.powi(k as i32 - 1);
        }
        s
    };
    [eval(&a), deriv(&a), eval(&d), deriv(&d)]
}

/// Power-series start for the rescaled equation at time `t`.
pub fn series_start_scaled(beta: f64, t: f64) -> [f64; 2] {
    let n = SERIES_ORDER;
    let mut a = vec![0.0; n + 1];
    a[0] = 1.0;
    let b2 = beta * beta;
    for k in 0..n - 1 {
        let w3k: f64 = (0..=k)
            .map(|i| {
                let w2i: f64 = (0..=i).map(|j| a[j] * a[i - j]).sum();
                w2i * a[k - i]
            })
            .sum();
        let fk = w3k - b2 * a[k];
        a[k + 2] = -fk / (((k + 2) * (k + 3)) as f64);
    }
    let mut w = 0.0;
    for &ck in a.iter().rev() {
        w = w * t + ck;
    }
    let mut vw = 0.0;
    for (k, &ck) in a.iter().enumerate().skip(1) {
        vw += ck * k as f64 * t.powi(k as i32 - 1);
    }
    [w, vw]
}

fn deriv_main(t: f64, s: &[f64; 4]) -> [f64; 4] {
    let [y, vy, d, vd] = *s;
    [
        vy,
        -2.0 / t * vy - f(y),
        vd,
        -2.0 / t * vd - f_prime(y) * d,
    ]
}

fn deriv_scaled(t: f64, s: &[f64; 2], beta: f64) -> [f64; 2] {
    let [w, vw] = *s;
    [vw, -2.0 / t * vw - (w * w * w - beta * beta * w)]
}

fn rk4<const N: usize>(t: f64, s: &[f64; N], dt: f64, fd: impl Fn(f64, &[f64; N]) -> [f64; N]) -> [f64; N] {
    let k1 = fd(t, s);
    let mut s2 = *s;
    for i in 0..N {
        s2[i] = s[i] + 0.5 * dt * k1[i];
    }
    let k2 = fd(t + 0.5 * dt, &s2);
    for i in 0..N {
        s2[i] = s[i] + 0.5 * dt * k2[i];
    }
    let k3 = fd(t + 0.5 * dt, &s2);
    for i in 0..N {
        s2[i] = s[i] + dt * k3[i];
    }
    let k4 = fd(t + dt, &s2);
    let mut out = *s;
    for i in 0..N {
        out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Hand-off time below which the power series alone is accurate.
pub fn start_time(b: f64) -> f64 {
    (0.115 / b.abs().max(1.0)).min(0.01)
}

/// High-accuracy reference state of the main system at time `t`.
pub fn reference_state(b: f64, t: f64) -> [f64; 4] {
    let ts = start_time(b);
    if t <= ts {
        return series_start_main(b, t);
    }
    let omega = (3.0 * b * b).sqrt().max(1.0);
    let dt = (1e-4f64).min(1e-3 / omega);
    let mut s = series_start_main(b, ts);
    let mut tc = ts;
    while tc < t {
        let h = dt.min(t - tc);
        s = rk4(tc, &s, h, deriv_main);
        tc += h;
    }
    s
}

/// High-accuracy reference state of the rescaled system at time `t`.
pub fn reference_scaled(beta: f64, t: f64) -> [f64; 2] {
    let ts = 0.01;
    if t <= ts {
        return series_start_scaled(beta, t);
    }
    let dt: f64 = 1e-4;
    let mut s = series_start_scaled(beta, ts);
    let mut tc = ts;
    while tc < t {
        let h = dt.min(t - tc);
        s = rk4(tc, &s, h, |tt, ss| deriv_scaled(tt, ss, beta));
        tc += h;
    }
    s
}

/// Sampled non-rigorous trajectory of the main system.
#[derive(Clone, Debug)]
pub struct FloatTrajectory {
    pub b: f64,
    pub dt: f64,
    pub samples: Vec<(f64, [f64; 4])>,
    pub crossings: usize,
    /// true if integration stopped early because the energy fell below -0.01
    pub trapped: bool,
}

impl FloatTrajectory {
    pub fn final_state(&self) -> (f64, [f64; 4]) {
        *self.samples.last().unwrap()
    }
}

/// Fixed-step RK4 sweep with crossing counting and trapping detection.
pub fn float_solve(b: f64, t_end: f64, dt: f64) -> FloatTrajectory {
    let ts = start_time(b);
    let mut s = series_start_main(b, ts);
    let mut t = ts;
    let mut samples = vec![(t, s)];
    let mut crossings = 0;
    let mut trapped = false;
    let mut sign = s[0] > 0.0;
    while t < t_end {
        let h = dt.min(t_end - t);
        s = rk4(t, &s, h, deriv_main);
        t += h;
        samples.push((t, s));
        let ns = s[0] > 0.0;
        if ns != sign {
            crossings += 1;
            sign = ns;
        }
        if energy(s[0], s[1]) < -0.01 {
            trapped = true;
            break;
        }
    }
    FloatTrajectory {
        b,
        dt,
        samples,
        crossings,
        trapped,
    }
}

/// Crossing count of the rescaled system up to `t_end` (non-rigorous).
pub fn float_crossings_scaled(beta: f64, t_end: f64, dt: f64) -> usize {
    let ts = 0.01;
    let mut s = series_start_scaled(beta, ts);
    let mut t = ts;
    let mut crossings = 0;
    let mut sign = s[0] > 0.0;
    while t < t_end {
        let h = dt.min(t_end - t);
        s = rk4(t, &s, h, |tt, ss| deriv_scaled(tt, ss, beta));
        t += h;
        let ns = s[0] > 0.0;
        if ns != sign {
            crossings += 1;
            sign = ns;
        }
    }
    crossings
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_matches_picard_for_small_t() {
        let b = 2.0;
        let t = 0.01;
        let s = series_start_main(b, t);
        let fb = f(b);
        let fpb = f_prime(b);
        // agreement up to the next series order (t^3 terms ~ 2e-6 here)
        assert!((s[0] - (b - t * t * fb / 6.0)).abs() < 1e-7);
        assert!((s[1] + t * fb / 3.0).abs() < 1e-5);
        assert!((s[2] - (1.0 - t * t * fpb / 6.0)).abs() < 1e-7);
        assert!((s[3] + t * fpb / 3.0).abs() < 1e-5);
    }

    #[test]
    fn low_height_traps_without_crossing() {
        let traj = float_solve(1.5, 20.0, 1e-3);
        assert_eq!(traj.crossings, 0);
        assert!(traj.trapped);
    }

    #[test]
    fn high_height_crosses_repeatedly() {
        let traj = float_solve(20.0, 20.0, 2e-4);
        assert!(traj.crossings >= 2, "crossings = {}", traj.crossings);
    }

    #[test]
    fn self_consistency_under_dt_refinement() {
        let a = float_solve(4.0, 6.0, 1e-3);
        let b = float_solve(4.0, 6.0, 5e-4);
        assert_eq!(a.crossings, b.crossings);
        assert_eq!(a.trapped, b.trapped);
        if !a.trapped && !b.trapped {
            let (_, sa) = a.final_state();
            let (_, sb) = b.final_state();
            assert!((sa[0] - sb[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn reference_consistent_with_series_handoff() {
        let b = 4.3373;
        let s1 = reference_state(b, 0.1);
        // independent route: series start evaluated at a different time, RK4 rest
        let s2 = {
            let ts = 0.02;
            let mut s = series_start_main(b, ts);
            let mut t = ts;
            let dt: f64 = 2e-5;
            while t < 0.1 {
                let h = dt.min(0.1 - t);
                s = rk4(t, &s, h, deriv_main);
                t += h;
            }
            s
        };
        for i in 0..4 {
            assert!((s1[i] - s2[i]).abs() < 1e-9, "component {i}: {} vs {}", s1[i], s2[i]);
        }
    }

    #[test]
    fn scaled_reference_initial_shape() {
        let s = reference_scaled(0.05, 0.2);
        let want = 1.0 - (1.0 - 0.0025) / 6.0 * 0.04;
        // the quadratic model is off by O(t^4/40) ~ 4e-5 at t = 0.2
        assert!((s[0] - want).abs() < 1e-4);
    }
}

//! Rigorous state enclosures at a small positive time, bridging the `t = 0`
//! singularity of the radial ODE.
//!
//! The second Picard iterate of the integral form of the equation, together
//! with explicit one-sided error bounds, gives a box provably containing
//! `(y, dy/dt, delta, ddelta/dt)` at any time in the seed window, uniformly
//! over the initial-height interval. The same construction with a quadratic
//! approximant handles the rescaled equation used for large initial heights.

use thiserror::Error;

use crate::cubic;
use crate::interval::{Interval, IntervalError};

#[derive(Debug, Error)]
pub enum DesingularizeError {
    #[error("initial height must satisfy b >= sqrt(2), got lower endpoint {0}")]
    DomainError(f64),
    #[error("seed time {t0} exceeds the rigorous t* lower bound {t_star}")]
    TStarViolation { t0: f64, t_star: f64 },
    #[error("beta must lie in [0, 1/10], got upper endpoint {0}")]
    BetaRangeError(f64),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// Interval box for `(y, v_y, delta, v_delta)` over a window of times.
#[derive(Clone, Debug)]
pub struct StateEnclosure {
    pub y: Interval,
    pub v_y: Interval,
    pub delta: Interval,
    pub v_delta: Interval,
    pub t: Interval,
}

impl StateEnclosure {
    pub fn components(&self) -> [Interval; 4] {
        [self.y, self.v_y, self.delta, self.v_delta]
    }
}

/// Interval box for the rescaled variables `(w, v_w)` with parameter `beta`.
#[derive(Clone, Debug)]
pub struct ScaledStateEnclosure {
    pub w: Interval,
    pub v_w: Interval,
    pub beta: Interval,
    pub t: Interval,
}

impl ScaledStateEnclosure {
    pub fn components(&self) -> [Interval; 2] {
        [self.w, self.v_w]
    }
}

fn require_b_above_sqrt2(b: &Interval) -> Result<(), DesingularizeError> {
    // permissive gate: allow a sub-sqrt(2) sliver of at most one rounding step;
    // those heights are never bound states and the enclosure formulas remain
    // interval evaluations over the whole input
    if b.lo() < Interval::sqrt2().lo() {
        Err(DesingularizeError::DomainError(b.lo()))
    } else {
        Ok(())
    }
}

/// Time horizon below which the variational error bounds hold:
/// `t* = min( sqrt(6(sqrt3 b - 1)/(sqrt3 b (b^2-1))), ln 4 / (sqrt3 b) )`,
/// evaluated over the whole `b` interval. The lower endpoint of the result is
/// a rigorous lower bound on `t*(b)` for every `b` in the input.
pub fn t_star(b: &Interval) -> Result<Interval, DesingularizeError> {
    require_b_above_sqrt2(b)?;
    let sqrt3 = Interval::point(3.0).sqrt()?;
    let s3b = sqrt3 * *b;
    let num = (s3b - Interval::ONE).scale(6.0);
    let den = s3b * (b.pow_int(2)? - Interval::ONE);
    let branch_sqrt = num.div(&den)?.sqrt()?;
    let branch_log = Interval::point(4.0).ln()?.div(&s3b)?;
    // enclosure of min(branch1, branch2) over the input range
    Ok(Interval::new(
        branch_sqrt.lo().min(branch_log.lo()),
        branch_sqrt.hi().min(branch_log.hi()),
    ))
}

/// Second Picard iterate of the 4-variable system, evaluated in interval
/// arithmetic: `(b - t^2 f(b)/6, -t f(b)/3, 1 - t^2 f'(b)/6, -t f'(b)/3)`.
pub fn picard_z2(b: &Interval, t: &Interval) -> StateEnclosure {
    let fb = cubic::f(*b);
    let fpb = cubic::f_prime(*b);
    let t2 = t.pow_int(2).unwrap();
    let sixth = Interval::point(6.0).recip().unwrap();
    let third = Interval::point(3.0).recip().unwrap();
    StateEnclosure {
        y: *b - t2 * fb * sixth,
        v_y: -(*t * fb * third),
        delta: Interval::ONE - t2 * fpb * sixth,
        v_delta: -(*t * fpb * third),
        t: *t,
    }
}

/// One-sided error terms on top of the second Picard iterate, with the time
/// taken at the top of the seed window and `b` at its worst endpoint.
fn picard_errors(b: &Interval, t0_hi: f64) -> [Interval; 4] {
    let th = Interval::point(t0_hi);
    let t3 = th.pow_int(3).unwrap();
    let t4 = th.pow_int(4).unwrap();
    let bh = Interval::point(b.hi());
    let ffp = cubic::f(bh) * cubic::f_prime(bh);
    let b4 = bh.pow_int(4).unwrap();
    let err_y = (ffp * t4).div(&Interval::point(120.0)).unwrap();
    let err_vy = (ffp * t3).div(&Interval::point(30.0)).unwrap();
    let err_d = (b4 * t4).scale(0.125);
    let err_vd = (b4 * t3).scale(0.5);
    [err_y, err_vy, err_d, err_vd]
}

/// Rigorous seed enclosure for the main system at the window `t0`.
///
/// The lower endpoints are those of the Picard iterate itself (the error
/// bounds are one-sided); the upper endpoints absorb the explicit error
/// terms. Requires `t0.hi` at or below the rigorous `t*` lower bound.
pub fn initial_enclosure_main(
    b: &Interval,
    t0: &Interval,
) -> Result<StateEnclosure, DesingularizeError> {
    require_b_above_sqrt2(b)?;
    let ts = t_star(b)?;
    if t0.hi() > ts.lo() {
        return Err(DesingularizeError::TStarViolation {
            t0: t0.hi(),
            t_star: ts.lo(),
        });
    }
    let z2 = picard_z2(b, t0);
    let [ey, evy, ed, evd] = picard_errors(b, t0.hi());
    let widen = |base: Interval, err: Interval| base + Interval::new(0.0, err.hi().max(0.0));
    Ok(StateEnclosure {
        y: widen(z2.y, ey),
        v_y: widen(z2.v_y, evy),
        delta: widen(z2.delta, ed),
        v_delta: widen(z2.v_delta, evd),
        t: *t0,
    })
}

/// Rigorous seed enclosure for the rescaled equation at the window `t0`.
///
/// `w ~ 1 - (1-beta^2)/6 t^2` with one-sided errors `t^4/40` and `t^3/10`.
/// Accepts `beta.lo() == 0`: the limiting system satisfies the same bounds.
pub fn initial_enclosure_scaled(
    beta: &Interval,
    t0: &Interval,
) -> Result<ScaledStateEnclosure, DesingularizeError> {
    if beta.lo() < 0.0 || beta.hi() > 0.1f64.next_down() {
        return Err(DesingularizeError::BetaRangeError(beta.hi()));
    }
    let one_m_b2 = Interval::ONE - beta.pow_int(2)?;
    let t2 = t0.pow_int(2)?;
    let w_tilde = Interval::ONE - one_m_b2 * t2.div(&Interval::point(6.0))?;
    let vw_tilde = -(one_m_b2 * t0.div(&Interval::point(3.0))?);
    let th = Interval::point(t0.hi());
    let err_w = th.pow_int(4)?.scale(1.0 / 40.0).hi().max(0.0);
    let err_vw = th.pow_int(3)?.scale(0.1).hi().max(0.0);
    Ok(ScaledStateEnclosure {
        w: w_tilde + Interval::new(0.0, err_w),
        v_w: vw_tilde + Interval::new(0.0, err_vw),
        beta: *beta,
        t: *t0,
    })
}

/// Pick a seed time for the main system: at most `default`, strictly below
/// the rigorous `t*` bound, and small enough that the Picard error terms are
/// negligible against each component's natural scale.
pub fn choose_t0(b: &Interval, default: f64) -> Result<Interval, DesingularizeError> {
    let ts = t_star(b)?;
    let mut t0 = default.min(0.9 * ts.lo());
    for _ in 0..60 {
        let [ey, evy, ed, evd] = picard_errors(b, t0);
        let fb = cubic::f(Interval::point(b.hi())).hi();
        let fpb = cubic::f_prime(Interval::point(b.hi())).hi();
        let scale_vy = (t0 * fb / 3.0).abs().max(1e-3);
        let scale_vd = (t0 * fpb / 3.0).abs().max(1e-3);
        let ok = ey.hi() <= 1e-9 * b.hi().max(1.0)
            && evy.hi() <= 1e-7 * scale_vy
            && ed.hi() <= 1e-8
            && evd.hi() <= 1e-6 * scale_vd;
        if ok {
            break;
        }
        t0 *= 0.5;
    }
    Ok(Interval::point(t0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_star_ground_state_height() {
        // at b = 4.3373 the log branch attains the min: ln4/(sqrt3 b)
        let b = Interval::point(4.3373);
        let ts = t_star(&b).unwrap();
        let expect = 4f64.ln() / (3f64.sqrt() * 4.3373);
        assert!((ts.mid() - expect).abs() < 1e-12, "{ts:?} vs {expect}");
        assert!(ts.width() < 1e-10);
        // the sqrt branch evaluates to ~0.5404 there, so the min is the log one
        assert!(ts.hi() < 0.2);
    }

    #[test]
    fn t_star_at_sqrt2() {
        let b = Interval::sqrt2();
        let ts = t_star(&b).unwrap();
        assert!(ts.lo() > 0.0);
    }

    #[test]
    fn t_star_decreasing_branch() {
        let b = Interval::new(14.0, 14.2);
        let ts = t_star(&b).unwrap();
        let log_at_top = Interval::point(4.0).ln().unwrap()
            .div(&(Interval::point(3.0).sqrt().unwrap() * Interval::point(14.2)))
            .unwrap();
        assert!(ts.lo() <= log_at_top.hi());
    }

    #[test]
    fn t_star_requires_b_above_sqrt2() {
        assert!(matches!(
            t_star(&Interval::point(1.2)),
            Err(DesingularizeError::DomainError(_))
        ));
    }

    #[test]
    fn picard_z2_values() {
        let b = Interval::point(2.0);
        let t = Interval::point(0.1);
        let z = picard_z2(&b, &t);
        // f(2) = 6: y = 2 - 0.01*6/6 = 1.99
        assert!(z.y.contains(1.99));
        // f'(2) = 11: v_delta = -0.1*11/3
        assert!(z.v_delta.contains(-0.1 * 11.0 / 3.0));
        let z0 = picard_z2(&b, &Interval::ZERO);
        assert!(z0.y.contains(2.0) && z0.v_y.contains(0.0));
        assert!(z0.delta.contains(1.0) && z0.v_delta.contains(0.0));
    }

    #[test]
    fn enclosure_main_at_zero_time() {
        let b = Interval::sqrt2();
        let enc = initial_enclosure_main(&b, &Interval::ZERO).unwrap();
        assert!(enc.y.contains(2.0f64.sqrt()));
        assert!(enc.v_y.contains(0.0) && enc.v_y.width() < 1e-12);
        assert!(enc.delta.contains(1.0) && enc.delta.width() < 1e-12);
        assert!(enc.v_delta.contains(0.0));
    }

    #[test]
    fn enclosure_main_rejects_time_past_t_star() {
        let b = Interval::point(49.0);
        let err = initial_enclosure_main(&b, &Interval::new(0.1, 0.101));
        assert!(matches!(err, Err(DesingularizeError::TStarViolation { .. })));
    }

    #[test]
    fn enclosure_main_width_budget() {
        let b = Interval::new(4.25, 4.43);
        let t0 = Interval::new(0.1, 0.101);
        let enc = initial_enclosure_main(&b, &t0).unwrap();
        let fb = cubic::f(Interval::point(b.hi())).hi();
        let fpb = cubic::f_prime(Interval::point(b.hi())).hi();
        let th = t0.hi();
        let budget = b.width() + 2.0 * th * th * fb / 6.0 + fb * fpb * th.powi(4) / 120.0 + 1e-10;
        assert!(enc.y.width() <= budget, "{} vs {budget}", enc.y.width());
    }

    #[test]
    fn enclosure_main_lower_edge_is_picard() {
        let b = Interval::new(4.25, 4.43);
        let t0 = Interval::new(0.1, 0.101);
        let enc = initial_enclosure_main(&b, &t0).unwrap();
        let z2 = picard_z2(&b, &t0);
        for (e, z) in enc.components().iter().zip(z2.components()) {
            // equal up to the outward rounding of adding the one-sided error
            assert!(e.lo() <= z.lo() && z.lo() - e.lo() < 1e-12);
        }
    }

    #[test]
    fn scaled_enclosure_values() {
        let beta = Interval::new(0.01, 0.019);
        let t0 = Interval::point(0.1);
        let enc = initial_enclosure_scaled(&beta, &t0).unwrap();
        // w ~ 1 - (1-beta^2)/6 * 0.01 ~ 0.99833
        assert!(enc.w.contains(0.998334), "{:?}", enc.w);
        let at0 = initial_enclosure_scaled(&beta, &Interval::ZERO).unwrap();
        assert!(at0.w.contains(1.0) && at0.v_w.contains(0.0));
    }

    #[test]
    fn scaled_enclosure_beta_range() {
        assert!(matches!(
            initial_enclosure_scaled(&Interval::new(0.12, 0.13), &Interval::point(0.1)),
            Err(DesingularizeError::BetaRangeError(_))
        ));
        // beta touching zero is accepted
        assert!(initial_enclosure_scaled(&Interval::new(0.0, 0.019), &Interval::point(0.1)).is_ok());
    }

    #[test]
    fn monotone_widening_in_t0() {
        let b = Interval::new(2.0, 2.1);
        let w1 = initial_enclosure_main(&b, &Interval::new(0.0, 0.05)).unwrap();
        let w2 = initial_enclosure_main(&b, &Interval::new(0.0, 0.1)).unwrap();
        assert!(w1.y.width() <= w2.y.width());
        assert!(w1.delta.width() <= w2.delta.width());
    }

    #[test]
    fn choose_t0_respects_t_star() {
        for bh in [2.0, 5.0, 15.0, 30.0, 50.0] {
            let b = Interval::new(bh - 0.05, bh);
            let t0 = choose_t0(&b, 0.1).unwrap();
            assert!(t0.hi() <= t_star(&b).unwrap().lo());
            assert!(initial_enclosure_main(&b, &t0).is_ok());
        }
    }
}

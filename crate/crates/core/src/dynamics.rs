//! Energy bookkeeping and rigorous zero-crossing counting.
//!
//! The energy `E = v^2/2 + y^4/4 - y^2/2` is non-increasing along solutions,
//! which gives a global speed bound `|y'| <= sqrt(2 E_0 + 1/2)` from any
//! energy upper bound `E_0`. A solution can only turn around at `|y| > sqrt 2`
//! while its energy is positive, so two consecutive zero crossings force the
//! solution to travel a distance of more than `2 sqrt 2 > 2`; a time window
//! shorter than `2 / v_max` therefore contains at most one crossing. Crossing
//! counts are made exact by resolving every window in which the sign of the
//! `y`-enclosure is ambiguous against that bound (or against a sign-definite
//! velocity, which makes `y` monotone over the window).

use thiserror::Error;

use crate::integrator::{speed_cap, TrajStep, Trajectory};
use crate::interval::Interval;
use crate::series::System;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("sign of y ambiguous at trajectory end (window open since t = {0})")]
    AmbiguousSign(f64),
}

/// Interval energy of a state box.
pub fn energy(y: Interval, v: Interval) -> Interval {
    crate::integrator::energy_interval(y, v)
}

/// Rigorous speed bound `sqrt(2 E_0 + 1/2)` from an energy upper bound.
pub fn max_speed(energy_hi: f64) -> f64 {
    speed_cap(energy_hi)
}

/// True iff a time span of length `span` with speed bound `v_max` cannot
/// contain two zero crossings (`span * v_max <= 2`, rounded outward).
pub fn certify_no_double_cross(span: f64, v_max: f64) -> bool {
    f64::next_up(span * v_max) <= 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    fn of(y: &Interval) -> Option<Sign> {
        if y.lo() > 0.0 {
            Some(Sign::Pos)
        } else if y.hi() < 0.0 {
            Some(Sign::Neg)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct CrossingCount {
    pub count: usize,
    /// true when every sign-ambiguity window was certified to hold at most
    /// one crossing, so `count` is exact rather than a lower bound
    pub exact: bool,
    pub last_sign: Sign,
}

struct Window {
    t_enter: f64,
    v_max: f64,
    /// hull of the velocity over all a-priori boxes in the window
    v_hull: Interval,
}

/// Incremental crossing counter consuming trajectory steps in order.
pub struct CrossingTracker {
    last: Sign,
    count: usize,
    exact: bool,
    window: Option<Window>,
}

impl CrossingTracker {
    /// The seed box must have a definite sign (for the systems integrated
    /// here the seed component is positive).
    pub fn new(seed_y: &Interval) -> CrossingTracker {
        let last = Sign::of(seed_y).expect("seed box must have definite sign");
        CrossingTracker {
            last,
            count: 0,
            exact: true,
            window: None,
        }
    }

    /// Account for one accepted step.
    pub fn push(&mut self, step: &TrajStep) {
        let y_end = step.end_box[0];
        match (Sign::of(&y_end), &mut self.window) {
            (Some(s), None) => {
                if s != self.last {
                    // the crossing happened inside this single step
                    let span = step.t_end.hi() - step.t_start.lo();
                    let certified = certify_no_double_cross(span, max_speed(step.energy_start_hi))
                        || !step.apriori[1].contains(0.0);
                    if !certified {
                        self.exact = false;
                    }
                    self.count += 1;
                    self.last = s;
                }
            }
            (None, None) => {
                self.window = Some(Window {
                    t_enter: step.t_start.lo(),
                    v_max: max_speed(step.energy_start_hi),
                    v_hull: step.apriori[1],
                });
            }
            (None, Some(w)) => {
                w.v_hull = w.v_hull.hull(&step.apriori[1]);
            }
            (Some(s), Some(w)) => {
                // window closes: parity gives the crossing count mod 2, the
                // certificates bound it by one
                let span = step.t_end.hi() - w.t_enter;
                let certified =
                    certify_no_double_cross(span, w.v_max) || !w.v_hull.contains(0.0);
                if !certified {
                    self.exact = false;
                }
                if s != self.last {
                    self.count += 1;
                    self.last = s;
                }
                self.window = None;
            }
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn exact(&self) -> bool {
        self.exact
    }

    pub fn last_sign(&self) -> Sign {
        self.last
    }

    pub fn window_open(&self) -> bool {
        self.window.is_some()
    }

    /// Final verdict; errors if the sign is still unresolved.
    pub fn finish(&self) -> Result<CrossingCount, DynamicsError> {
        if let Some(w) = &self.window {
            return Err(DynamicsError::AmbiguousSign(w.t_enter));
        }
        Ok(CrossingCount {
            count: self.count,
            exact: self.exact,
            last_sign: self.last,
        })
    }
}

/// Count zero crossings of the first component over a whole trajectory.
pub fn count_crossings(traj: &Trajectory) -> Result<CrossingCount, DynamicsError> {
    let mut tr = CrossingTracker::new(&traj.seed_box[0]);
    for s in &traj.steps {
        tr.push(s);
    }
    tr.finish()
}

/// Lower bound on crossings via strict sign alternations only (used for the
/// scaled system, where no energy-based speed bound is available).
pub fn count_sign_alternations(traj: &Trajectory) -> usize {
    debug_assert!(matches!(traj.sys, System::Scaled { .. }) || true);
    let mut last = Sign::of(&traj.seed_box[0]).expect("seed box must have definite sign");
    let mut count = 0;
    for s in &traj.steps {
        if let Some(sg) = Sign::of(&s.end_box[0]) {
            if sg != last {
                count += 1;
                last = sg;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate, Integration, IntegratorConfig, StopCondition};
    use crate::linalg::IVec;
    use crate::oracle;

    fn traj_for(b: f64, t_end: f64) -> Trajectory {
        let t0 = oracle::start_time(b);
        let seed: IVec = oracle::series_start_main(b, t0)
            .iter()
            .map(|&v| Interval::around(v).inflate(1e-9))
            .collect();
        let session = Integration::new(
            System::Main,
            seed,
            Interval::point(t0),
            IntegratorConfig::default(),
        );
        integrate(session, StopCondition::AtTime(t_end)).unwrap()
    }

    #[test]
    fn energy_of_rest_state_at_one_is_negative() {
        let e = energy(Interval::point(1.0), Interval::point(0.0));
        assert!(e.contains(-0.25));
        assert!(e.hi() < 0.0);
    }

    #[test]
    fn max_speed_matches_hand_value() {
        // E = 0: v_max = sqrt(1/2)
        let v = max_speed(0.0);
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12 || v >= 0.5f64.sqrt());
        assert!(v >= 0.5f64.sqrt() && v < 0.5f64.sqrt() + 1e-12);
    }

    #[test]
    fn double_cross_certificate_is_a_strict_budget() {
        assert!(certify_no_double_cross(0.1, 10.0));
        assert!(!certify_no_double_cross(0.3, 10.0));
        assert!(certify_no_double_cross(1.0, 1.9));
    }

    #[test]
    fn falling_solution_has_no_crossings() {
        let traj = traj_for(1.5, 8.0);
        let c = count_crossings(&traj).unwrap();
        assert_eq!(c.count, 0);
        assert!(c.exact);
        assert_eq!(c.last_sign, Sign::Pos);
    }

    #[test]
    fn crossing_count_matches_float_oracle() {
        for &b in &[3.0, 6.0, 10.0] {
            let float = oracle::float_solve(b, 12.0, 1e-4);
            let traj = traj_for(b, 12.0);
            match count_crossings(&traj) {
                Ok(c) => {
                    assert!(c.exact, "b = {b} not exact");
                    assert_eq!(c.count, float.crossings, "b = {b}");
                }
                Err(DynamicsError::AmbiguousSign(_)) => {
                    // only legitimate if the float solution sits near zero
                    let st = oracle::reference_state(b, 12.0);
                    assert!(st[0].abs() < 0.05, "b = {b}: spurious ambiguity");
                }
            }
        }
    }

    #[test]
    fn tracker_flags_open_window() {
        // build a synthetic step whose end box straddles zero
        let step = TrajStep {
            t_start: Interval::point(1.0),
            t_end: Interval::point(1.1),
            h: 0.1,
            end_box: vec![
                Interval::new(-0.1, 0.1),
                Interval::new(-1.0, -0.5),
                Interval::point(0.0),
                Interval::point(0.0),
            ],
            apriori: vec![
                Interval::new(-0.2, 0.2),
                Interval::new(-1.1, -0.4),
                Interval::point(0.0),
                Interval::point(0.0),
            ],
            energy_start_hi: 1.0,
        };
        let mut tr = CrossingTracker::new(&Interval::new(0.5, 0.6));
        tr.push(&step);
        assert!(tr.window_open());
        assert!(matches!(tr.finish(), Err(DynamicsError::AmbiguousSign(_))));
    }

    #[test]
    fn tracker_certifies_single_crossing_via_definite_velocity() {
        let mk = |ylo: f64, yhi: f64| TrajStep {
            t_start: Interval::point(1.0),
            t_end: Interval::point(2.0),
            h: 1.0,
            end_box: vec![
                Interval::new(ylo, yhi),
                Interval::new(-1.0, -0.5),
                Interval::point(0.0),
                Interval::point(0.0),
            ],
            apriori: vec![
                Interval::new(ylo - 0.1, yhi + 0.1),
                Interval::new(-1.1, -0.4),
                Interval::point(0.0),
                Interval::point(0.0),
            ],
            // large energy so the span*v_max budget alone would fail
            energy_start_hi: 50.0,
        };
        let mut tr = CrossingTracker::new(&Interval::new(0.5, 0.6));
        tr.push(&mk(-0.05, 0.05));
        tr.push(&mk(-0.4, -0.3));
        let c = tr.finish().unwrap();
        assert_eq!(c.count, 1);
        assert!(c.exact, "monotone window must stay exact");
        assert_eq!(c.last_sign, Sign::Neg);
    }
}

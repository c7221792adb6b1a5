//! Non-rigorous planning: locate the bound states with the float oracle and
//! assemble a covering list of segments for the rigorous methods.
//!
//! Nothing in this module contributes to the proof itself. The plan only
//! proposes intervals; every segment is then certified (or rejected) by the
//! interval methods, and the orchestrator independently re-checks that the
//! segments cover `[sqrt 2, infinity)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::Interval;
use crate::methods::{self, MethodConfig, MethodKind, MethodStatus};
use crate::oracle;

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("bracketing failed for state {0}: {1}")]
    Bracketing(usize, String),
    #[error("float oracle ambiguous near b = {0} (crossing count unstable under dt refinement)")]
    OracleAmbiguous(f64),
    #[error("planning failure: {0}")]
    PlanningFailure(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanSegment {
    pub interval: Interval,
    pub method: MethodKind,
    /// which excited state a `bound_state_good` segment targets
    pub state_index: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProofPlan {
    pub n_states: usize,
    /// finite-`b` segments in increasing order, overlapping pairwise, then
    /// one rescaled segment last
    pub segments: Vec<PlanSegment>,
    /// float approximations of the bound states, for diagnostics only
    pub located: Vec<f64>,
}

impl ProofPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serialization")
    }

    pub fn from_json(s: &str) -> Result<ProofPlan, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Non-rigorous crossing count for shooting parameter `b` (oracle wrapper).
pub fn float_solve(b: f64, t_end: f64) -> oracle::FloatTrajectory {
    oracle::float_solve(b, t_end, step_dt(b))
}

fn step_dt(b: f64) -> f64 {
    // resolve the fast oscillation of frequency ~ sqrt(3) b
    (0.05 / b.abs().max(1.0)).min(1e-3)
}

fn crossings_at(b: f64, dt: f64) -> usize {
    oracle::float_solve(b, 30.0, dt).crossings
}

/// Locate the first `n + 1` bound states to within `1e-6` by bisection on the
/// float crossing count.
pub fn locate_bound_states(n: usize) -> Result<Vec<f64>, PlannerError> {
    let mut out: Vec<f64> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut lo = match out.last() {
            None => 2f64.sqrt() + 0.01,
            Some(&prev) => prev + 0.1,
        };
        let dt0 = step_dt(lo + 5.0);
        if crossings_at(lo, dt0) > k {
            return Err(PlannerError::Bracketing(
                k,
                format!("lower bracket b = {lo} already crosses more than {k} times"),
            ));
        }
        let mut hi = lo + 1.0;
        let mut grow = 0;
        while crossings_at(hi, step_dt(hi)) <= k {
            hi *= 1.4;
            grow += 1;
            if grow > 40 {
                return Err(PlannerError::Bracketing(
                    k,
                    format!("no upper bracket below b = {hi}"),
                ));
            }
        }
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if crossings_at(mid, step_dt(mid)) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // the count must be stable under dt refinement just outside the
        // located root, else the oracle cannot be trusted here
        let b_est = 0.5 * (lo + hi);
        for (side, want_more) in [(lo - 1e-4, false), (hi + 1e-4, true)] {
            let c1 = crossings_at(side, step_dt(side));
            let c2 = crossings_at(side, step_dt(side) * 0.5);
            if c1 != c2 || (c1 > k) != want_more {
                return Err(PlannerError::OracleAmbiguous(b_est));
            }
        }
        out.push(b_est);
    }
    Ok(out)
}

/// Probe-and-shrink a `bound_state_good` interval around the located value.
fn bsg_interval(
    b_est: f64,
    k: usize,
    max_width: f64,
    cfg: &MethodConfig,
) -> Result<Interval, PlannerError> {
    let mut w = 0.5f64.min(max_width);
    let mut last_err = String::new();
    // a shallow depth budget keeps failed probes cheap; the rigorous phase
    // re-runs the accepted interval with the full budget
    let probe_cfg = MethodConfig {
        max_depth: cfg.max_depth.min(6),
        ..cfg.clone()
    };
    while w >= 1e-4 {
        let cand = Interval::new(b_est - 0.5 * w, b_est + 0.5 * w);
        match methods::bound_state_good(&cand, k, &probe_cfg).status {
            MethodStatus::Proved => return Ok(cand),
            MethodStatus::Failed(e) => last_err = e,
        }
        w *= 0.5;
    }
    Err(PlannerError::PlanningFailure(format!(
        "no bound_state_good interval found for state {k} near b = {b_est}: {last_err}"
    )))
}

/// Assemble a full covering plan for the first `n + 1` states.
pub fn build_plan(n: usize, max_bsg_width: f64, cfg: &MethodConfig) -> Result<ProofPlan, PlannerError> {
    let located = locate_bound_states(n)?;
    let mut bsg: Vec<Interval> = Vec::with_capacity(n + 1);
    for (k, &b_est) in located.iter().enumerate() {
        bsg.push(bsg_interval(b_est, k, max_bsg_width, cfg)?);
    }
    let overlap = 1e-3;
    let mut segments = Vec::new();
    let fall = |lo: f64, hi: f64| PlanSegment {
        interval: Interval::new(lo, hi),
        method: MethodKind::Fall,
        state_index: None,
    };
    let start = Interval::sqrt2().lo();
    segments.push(fall(start, bsg[0].lo() + overlap));
    for (k, seg) in bsg.iter().enumerate() {
        segments.push(PlanSegment {
            interval: *seg,
            method: MethodKind::BoundStateGood,
            state_index: Some(k),
        });
        if k + 1 < bsg.len() {
            segments.push(fall(seg.hi() - overlap, bsg[k + 1].lo() + overlap));
        }
    }
    // buffer past the last state, far enough that the rescaled segment can
    // take over at beta = 1/b_end below the small-beta threshold
    let b_end = (bsg[n].hi() + 2.0).max(10.5);
    segments.push(fall(bsg[n].hi() - overlap, b_end));
    let beta_hi = Interval::ONE.div(&Interval::point(b_end)).unwrap().hi();
    segments.push(PlanSegment {
        interval: Interval::new(0.0, beta_hi),
        method: MethodKind::InftyCrossesMany,
        state_index: None,
    });
    Ok(ProofPlan {
        n_states: n,
        segments,
        located,
    })
}

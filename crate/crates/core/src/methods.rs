//! The three per-segment proof methods.
//!
//! * `fall`: certify that every solution started in a `b`-interval keeps a
//!   definite sign eventually (its energy goes negative, trapping it in one
//!   well), with an exact crossing count on the way; subdivide the interval
//!   recursively when a single enclosure is too wide to decide.
//! * `bound_state_good`: certify that every solution in a `b`-interval either
//!   falls to `+1`-side or `-1`-side after at most `n` crossings — the
//!   interval straddles the `n`-th bound state and the solutions on both
//!   sides are funnelled into the two absorbing regimes. Concretely: after
//!   exactly `n` certified crossings the reflected state is monotonically
//!   decreasing, below `1/sqrt 3`, with a negative variation `delta`, and
//!   satisfies the trapping inequality.
//! * `infty_crosses_many`: in rescaled variables, certify at least `n + 1`
//!   crossings for every `beta` in a range, covering all `b` above the last
//!   finite segment.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::desingularize::{
    choose_t0, initial_enclosure_main, initial_enclosure_scaled, DesingularizeError,
};
use crate::dynamics::{CrossingTracker, Sign};
use crate::integrator::{Integration, IntegratorConfig};
use crate::interval::Interval;

#[derive(Debug, Error)]
pub enum MethodError {
    #[error(transparent)]
    Desingularize(#[from] DesingularizeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Fall,
    BoundStateGood,
    InftyCrossesMany,
}

impl MethodKind {
    pub fn name(&self) -> &'static str {
        match self {
            MethodKind::Fall => "fall",
            MethodKind::BoundStateGood => "bound_state_good",
            MethodKind::InftyCrossesMany => "infty_crosses_many",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MethodStatus {
    Proved,
    Failed(String),
}

/// Final-state data backing a `Proved` verdict (hulled over subdivisions).
#[derive(Clone, Debug)]
pub struct Witness {
    pub t: f64,
    pub y: Interval,
    pub vy: Interval,
    pub delta: Interval,
    pub vdelta: Interval,
    pub crossings: usize,
    pub subdivisions: usize,
}

#[derive(Clone, Debug)]
pub struct MethodResult {
    pub interval: Interval,
    pub method: MethodKind,
    pub state_index: Option<usize>,
    pub status: MethodStatus,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct MethodConfig {
    pub integrator: IntegratorConfig,
    /// preferred seed time; shrunk automatically for large `b`
    pub t0: f64,
    /// bisection depth budget for `fall` and `infty_crosses_many`
    pub max_depth: usize,
    /// give-up horizon for `fall`
    pub fall_t_max: f64,
    /// give-up horizon for `bound_state_good`
    pub bsg_t_max: f64,
    /// give-up horizon for `infty_crosses_many` (rescaled time)
    pub infty_t_max: f64,
}

impl Default for MethodConfig {
    fn default() -> Self {
        MethodConfig {
            integrator: IntegratorConfig::default(),
            t0: 0.1,
            max_depth: 60,
            fall_t_max: 40.0,
            bsg_t_max: 50.0,
            infty_t_max: 1500.0,
        }
    }
}

struct Leaf {
    t: f64,
    boxes: [Interval; 4],
    crossings: usize,
}

fn aggregate(interval: Interval, leaves: &[Leaf]) -> Witness {
    let mut it = leaves.iter();
    let first = it.next().expect("at least one leaf");
    let mut w = Witness {
        t: first.t,
        y: first.boxes[0],
        vy: first.boxes[1],
        delta: first.boxes[2],
        vdelta: first.boxes[3],
        crossings: first.crossings,
        subdivisions: leaves.len(),
    };
    for l in it {
        w.t = w.t.max(l.t);
        w.y = w.y.hull(&l.boxes[0]);
        w.vy = w.vy.hull(&l.boxes[1]);
        w.delta = w.delta.hull(&l.boxes[2]);
        w.vdelta = w.vdelta.hull(&l.boxes[3]);
        w.crossings = w.crossings.max(l.crossings);
    }
    let _ = interval;
    w
}

/// One `fall` attempt on an undivided interval.
fn fall_leaf(b: &Interval, cfg: &MethodConfig) -> Result<Leaf, String> {
    let t0 = choose_t0(b, cfg.t0).map_err(|e| e.to_string())?;
    let seed = initial_enclosure_main(b, &t0).map_err(|e| e.to_string())?;
    let mut session = Integration::from_seed(&seed, cfg.integrator.clone());
    let mut tracker = CrossingTracker::new(&session.traj.seed_box[0]);
    loop {
        if session.t().lo() > cfg.fall_t_max {
            return Err(format!("energy not negative by t = {}", cfg.fall_t_max));
        }
        let (end_box, t_end) = {
            let step = session.step().map_err(|e| e.to_string())?;
            tracker.push(step);
            (step.end_box.clone(), step.t_end)
        };
        if session.energy_hi() < 0.0 && !tracker.window_open() {
            let c = tracker.finish().map_err(|e| e.to_string())?;
            if !c.exact {
                return Err("crossing count not exact".into());
            }
            return Ok(Leaf {
                t: t_end.lo(),
                boxes: [end_box[0], end_box[1], end_box[2], end_box[3]],
                crossings: c.count,
            });
        }
    }
}

fn fall_rec(
    b: &Interval,
    depth: usize,
    cfg: &MethodConfig,
    leaves: &mut Vec<Leaf>,
) -> Result<(), String> {
    match fall_leaf(b, cfg) {
        Ok(l) => {
            leaves.push(l);
            Ok(())
        }
        Err(e) if depth == 0 => Err(format!(
            "depth exhausted at [{:.9}, {:.9}]: {e}",
            b.lo(),
            b.hi()
        )),
        Err(_) => {
            let (l, r) = b.bisect();
            fall_rec(&l, depth - 1, cfg, leaves)?;
            fall_rec(&r, depth - 1, cfg, leaves)
        }
    }
}

/// Certify that every solution with `y(0)` in `b` eventually has negative
/// energy (hence a final sign) after an exactly-counted number of crossings.
pub fn fall(b: &Interval, cfg: &MethodConfig) -> MethodResult {
    let mut leaves = Vec::new();
    let status = match fall_rec(b, cfg.max_depth, cfg, &mut leaves) {
        Ok(()) => MethodStatus::Proved,
        Err(e) => MethodStatus::Failed(e),
    };
    let witness = if leaves.is_empty() {
        None
    } else {
        Some(aggregate(*b, &leaves))
    };
    MethodResult {
        interval: *b,
        method: MethodKind::Fall,
        state_index: None,
        status,
        witness,
    }
}

/// The trapping inequality: once inside this region the solution converges
/// to the well at `+1` without further crossings. All comparisons are strict
/// and outward-rounded.
pub fn check_trap(y: &Interval, v: &Interval, e: &Interval, t: &Interval) -> bool {
    if !(y.lo() >= 0.0 && y.hi() < 0.5 && v.hi() < 0.0 && e.lo() > 0.0 && e.hi() < 0.25) {
        return false;
    }
    let ln_e = match e.ln() {
        Ok(l) => l,
        Err(_) => return false,
    };
    let expr = *e * (*t - ln_e.scale(2.0) + Interval::point(1.5));
    expr.hi() < 0.375
}

/// One `bound_state_good` attempt on an undivided interval.
fn bsg_leaf(b: &Interval, n: usize, cfg: &MethodConfig) -> Result<Leaf, String> {
    let t0 = choose_t0(b, cfg.t0).map_err(|e| e.to_string())?;
    let seed = initial_enclosure_main(b, &t0).map_err(|e| e.to_string())?;
    let mut session = Integration::from_seed(&seed, cfg.integrator.clone());
    let mut tracker = CrossingTracker::new(&session.traj.seed_box[0]);
    let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
    // rigorous lower bound on 1/sqrt(3)
    let inv_sqrt3_lo = Interval::point(3.0).sqrt().unwrap().recip().unwrap().lo();
    loop {
        if session.t().lo() > cfg.bsg_t_max {
            return Err(format!(
                "conditions not met by T_max = {} ({} crossings so far)",
                cfg.bsg_t_max,
                tracker.count()
            ));
        }
        let (end_box, t_end) = {
            let step = session.step().map_err(|e| e.to_string())?;
            tracker.push(step);
            (step.end_box.clone(), step.t_end)
        };
        if tracker.window_open() {
            continue;
        }
        if tracker.count() > n {
            return Err(format!("{} crossings exceed target {n}", tracker.count()));
        }
        // the trap needs E > 0, and energy never increases: once the upper
        // bound is negative this leaf can never qualify
        if session.energy_hi() < 0.0 {
            return Err(format!(
                "energy negative at t = {:.3} before the trap conditions held",
                t_end.lo()
            ));
        }
        if tracker.count() < n || !tracker.exact() {
            continue;
        }
        // reflect odd states so the checks are one-sided
        let yr = end_box[0].scale(sgn);
        let vr = end_box[1].scale(sgn);
        let dr = end_box[2].scale(sgn);
        let vdr = end_box[3].scale(sgn);
        if !(yr.lo() > 0.0 && yr.hi() <= inv_sqrt3_lo && vr.hi() < 0.0) {
            continue;
        }
        if !(dr.hi() < 0.0 && vdr.hi() < 0.0) {
            continue;
        }
        let e = crate::dynamics::energy(end_box[0], end_box[1]);
        if !check_trap(&yr, &vr, &e, &t_end) {
            continue;
        }
        return Ok(Leaf {
            t: t_end.lo(),
            boxes: [end_box[0], end_box[1], end_box[2], end_box[3]],
            crossings: n,
        });
    }
}

fn bsg_rec(
    b: &Interval,
    n: usize,
    depth: usize,
    cfg: &MethodConfig,
    leaves: &mut Vec<Leaf>,
) -> Result<(), String> {
    match bsg_leaf(b, n, cfg) {
        Ok(l) => {
            leaves.push(l);
            Ok(())
        }
        Err(e) if depth == 0 => Err(format!(
            "depth exhausted at [{:.9}, {:.9}]: {e}",
            b.lo(),
            b.hi()
        )),
        Err(_) => {
            let (l, r) = b.bisect();
            bsg_rec(&l, n, depth - 1, cfg, leaves)?;
            bsg_rec(&r, n, depth - 1, cfg, leaves)
        }
    }
}

/// Certify the bound-state dichotomy for an interval containing the `n`-th
/// excited state: every solution reaches the trap after exactly `n` sign
/// changes, and the monotone dependence on `b` holds with a uniform sign,
/// so the interval contains at most one `n`-th excited state.
pub fn bound_state_good(b: &Interval, n: usize, cfg: &MethodConfig) -> MethodResult {
    let mut leaves = Vec::new();
    let status = match bsg_rec(b, n, cfg.max_depth, cfg, &mut leaves) {
        Ok(()) => MethodStatus::Proved,
        Err(e) => MethodStatus::Failed(e),
    };
    let witness = if leaves.is_empty() {
        None
    } else {
        Some(aggregate(*b, &leaves))
    };
    MethodResult {
        interval: *b,
        method: MethodKind::BoundStateGood,
        state_index: Some(n),
        status,
        witness,
    }
}

/// One `infty_crosses_many` attempt on an undivided `beta` interval.
fn infty_leaf(beta: &Interval, need: usize, cfg: &MethodConfig) -> Result<Leaf, String> {
    let t0 = Interval::point(0.05);
    let seed = initial_enclosure_scaled(beta, &t0).map_err(|e| e.to_string())?;
    let mut session = Integration::from_scaled_seed(
        &seed,
        IntegratorConfig {
            careful_stepping: false,
            max_box_width: 2.0,
            ..cfg.integrator.clone()
        },
    );
    let mut last = Sign::Pos;
    let mut count = 0usize;
    loop {
        if session.t().lo() > cfg.infty_t_max {
            return Err(format!(
                "only {count} alternations by s = {}",
                cfg.infty_t_max
            ));
        }
        let (end_box, t_end) = {
            let step = session.step().map_err(|e| e.to_string())?;
            (step.end_box.clone(), step.t_end)
        };
        let y = end_box[0];
        let sign = if y.lo() > 0.0 {
            Some(Sign::Pos)
        } else if y.hi() < 0.0 {
            Some(Sign::Neg)
        } else {
            None
        };
        if let Some(s) = sign {
            if s != last {
                count += 1;
                last = s;
            }
        }
        if count >= need {
            return Ok(Leaf {
                t: t_end.lo(),
                boxes: [end_box[0], end_box[1], Interval::ZERO, Interval::ZERO],
                crossings: count,
            });
        }
    }
}

fn infty_rec(
    beta: &Interval,
    need: usize,
    depth: usize,
    cfg: &MethodConfig,
    leaves: &mut Vec<Leaf>,
) -> Result<(), String> {
    match infty_leaf(beta, need, cfg) {
        Ok(l) => {
            leaves.push(l);
            Ok(())
        }
        Err(e) if depth == 0 => Err(format!(
            "depth exhausted at beta in [{:.9}, {:.9}]: {e}",
            beta.lo(),
            beta.hi()
        )),
        Err(_) => {
            let (l, r) = beta.bisect();
            infty_rec(&l, need, depth - 1, cfg, leaves)?;
            infty_rec(&r, need, depth - 1, cfg, leaves)
        }
    }
}

/// Certify at least `n + 1` zero crossings of the rescaled solution for every
/// `beta` in the interval, which rules out the first `n + 1` bound states for
/// every `b >= 1 / beta.hi()`.
pub fn infty_crosses_many(beta: &Interval, n: usize, cfg: &MethodConfig) -> MethodResult {
    let mut leaves = Vec::new();
    let status = match infty_rec(beta, n + 1, cfg.max_depth, cfg, &mut leaves) {
        Ok(()) => MethodStatus::Proved,
        Err(e) => MethodStatus::Failed(e),
    };
    let witness = if leaves.is_empty() {
        None
    } else {
        Some(aggregate(*beta, &leaves))
    };
    MethodResult {
        interval: *beta,
        method: MethodKind::InftyCrossesMany,
        state_index: None,
        status,
        witness,
    }
}

/// Run a plan segment on the appropriate method.
pub fn run_segment(
    interval: &Interval,
    method: MethodKind,
    state_index: Option<usize>,
    n_states: usize,
    cfg: &MethodConfig,
) -> MethodResult {
    match method {
        MethodKind::Fall => fall(interval, cfg),
        MethodKind::BoundStateGood => {
            bound_state_good(interval, state_index.expect("state index"), cfg)
        }
        MethodKind::InftyCrossesMany => infty_crosses_many(interval, n_states, cfg),
    }
}

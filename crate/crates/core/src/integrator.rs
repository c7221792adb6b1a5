//! Validated Taylor integrator with Lohner-style wrapping control.
//!
//! Each step does:
//!   1. a rough a-priori enclosure of the solution over the step via a
//!      low-order Taylor polynomial plus a fixed-point inclusion check,
//!   2. a high-order Taylor evaluation at the current centre with a rigorous
//!      Lagrange remainder (the order `p+1` coefficient computed over the
//!      a-priori box and the step's time span),
//!   3. a variational (flow-derivative) series that transports the box part
//!      of the enclosure, re-orthogonalised with a QR factorisation so the
//!      box does not wrap.
//!
//! The enclosure is kept as a doubleton `c + C r`: a thin centre `c`, a
//! point transform `C`, and an interval box `r` in transformed coordinates.
//! Step sizes back off multiplicatively when validation fails and stop at a
//! hard floor.

use thiserror::Error;

use crate::interval::Interval;
use crate::linalg::{self, IMat, IVec};
use crate::series::{SeriesError, StateSeries, System, VarSeries};

#[derive(Debug, Error)]
pub enum IntegratorError {
    #[error("step validation failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },
    #[error("step budget of {0} steps exhausted")]
    MaxStepsExceeded(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// How the box part of the doubleton is re-based after each step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WrapControl {
    /// Orthogonalise the transported transform (default; robust).
    Qr,
    /// Keep the transported transform itself (tighter on short runs, can
    /// degenerate on long ones).
    Parallelepiped,
}

#[derive(Clone, Debug)]
pub struct IntegratorConfig {
    /// Taylor order `p` of the accepted polynomial part.
    pub order: usize,
    /// Order of the polynomial used for the a-priori enclosure.
    pub enclosure_order: usize,
    /// Absolute width tolerance for the Lagrange remainder.
    pub tol_abs: f64,
    /// Initial trial step.
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    pub wrap: WrapControl,
    /// Cap step length while the first component straddles zero, so that
    /// sign-ambiguity windows stay short enough for exact crossing counting.
    pub careful_stepping: bool,
    /// Abort when the hull gets wider than this (the enclosure has blown up
    /// and no further step will succeed).
    pub max_box_width: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            order: 15,
            enclosure_order: 4,
            tol_abs: 1e-10,
            h_init: 1e-3,
            h_min: 1e-6,
            h_max: 0.1,
            max_steps: 200_000,
            wrap: WrapControl::Qr,
            careful_stepping: true,
            max_box_width: 4.0,
        }
    }
}

/// Widen by an absolute margin plus a fraction of the current width.
fn puff(x: &Interval, abs: f64, rel: f64) -> Interval {
    x.inflate(abs + rel * x.width())
}

/// Doubleton enclosure `c + C r` with a point transform.
#[derive(Clone, Debug)]
pub struct EnclosureRepresentation {
    pub center: Vec<f64>,
    /// row-major `n x n`
    pub transform: Vec<f64>,
    pub box_r: IVec,
}

impl EnclosureRepresentation {
    pub fn from_box(b: &[Interval]) -> Self {
        let n = b.len();
        let center: Vec<f64> = b.iter().map(|x| x.mid()).collect();
        let mut transform = vec![0.0; n * n];
        for i in 0..n {
            transform[i * n + i] = 1.0;
        }
        let box_r: IVec = b
            .iter()
            .zip(&center)
            .map(|(x, &c)| *x - Interval::point(c))
            .collect();
        EnclosureRepresentation {
            center,
            transform,
            box_r,
        }
    }

    /// Interval hull `c + C r`.
    pub fn hull(&self) -> IVec {
        let n = self.center.len();
        (0..n)
            .map(|i| {
                let mut acc = Interval::point(self.center[i]);
                for j in 0..n {
                    acc = acc + Interval::point(self.transform[i * n + j]) * self.box_r[j];
                }
                acc
            })
            .collect()
    }
}

/// One accepted step, with everything crossing-counting needs later.
#[derive(Clone, Debug)]
pub struct TrajStep {
    pub t_start: Interval,
    pub t_end: Interval,
    pub h: f64,
    /// tight enclosure of the state at `t_end`
    pub end_box: IVec,
    /// rough enclosure valid over the whole step
    pub apriori: IVec,
    /// rigorous upper bound on the energy at `t_start` (main system only;
    /// infinity for the scaled system)
    pub energy_start_hi: f64,
}

/// Taylor data for one accepted step (kept for diagnostics).
#[derive(Clone, Debug)]
pub struct TaylorStep {
    pub order: usize,
    pub coeffs: Vec<IVec>,
    pub apriori: IVec,
    pub h: Interval,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub sys: System,
    pub t0: Interval,
    pub seed_box: IVec,
    pub seed_energy_hi: f64,
    pub steps: Vec<TrajStep>,
}

impl Trajectory {
    pub fn final_box(&self) -> &IVec {
        &self.steps.last().expect("non-empty trajectory").end_box
    }

    pub fn final_time(&self) -> Interval {
        self.steps.last().expect("non-empty trajectory").t_end
    }

    /// Dump the per-step enclosures as CSV (`t, lo_0, hi_0, ...`).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let dim = self.sys.dim();
        out.push('t');
        for v in 0..dim {
            out.push_str(&format!(",lo{v},hi{v}"));
        }
        out.push('\n');
        let mut row = |t: &Interval, b: &IVec| {
            out.push_str(&format!("{}", t.mid()));
            for x in b {
                out.push_str(&format!(",{},{}", x.lo(), x.hi()));
            }
            out.push('\n');
        };
        row(&self.t0, &self.seed_box);
        for s in &self.steps {
            row(&s.t_end, &s.end_box);
        }
        out
    }
}

/// When to stop a run driven by [`integrate`].
pub enum StopCondition {
    /// Integrate up to `t = T` (landing within a rounding error of it).
    AtTime(f64),
    /// Stop as soon as the energy is certified negative, giving up at `t_max`.
    EnergyNegative { t_max: f64 },
}

pub(crate) fn energy_interval(y: Interval, v: Interval) -> Interval {
    v.pow_int(2).unwrap().scale(0.5) + crate::cubic::potential(y)
}

/// Rigorous upper bound on `|y'|` from an energy upper bound: the potential
/// minimum is `-1/4`, so `v^2 <= 2 E + 1/2`.
pub(crate) fn speed_cap(energy_hi: f64) -> f64 {
    let s = 2.0 * energy_hi + 0.5;
    if s <= 0.0 {
        0.0
    } else {
        f64::next_up(f64::next_up(s).sqrt())
    }
}

/// A stepping session over either system.
pub struct Integration {
    pub cfg: IntegratorConfig,
    sys: System,
    rep: EnclosureRepresentation,
    t: Interval,
    h_next: f64,
    energy_hi: f64,
    pub traj: Trajectory,
    pub last_taylor: Option<TaylorStep>,
}

impl Integration {
    /// Start from a box at a thin time `t0`.
    pub fn new(sys: System, seed: IVec, t0: Interval, cfg: IntegratorConfig) -> Integration {
        assert!(t0.lo() > 0.0, "start time must be positive");
        assert_eq!(seed.len(), sys.dim());
        let energy_hi = match sys {
            System::Main => energy_interval(seed[0], seed[1]).hi(),
            System::Scaled { .. } => f64::INFINITY,
        };
        let rep = EnclosureRepresentation::from_box(&seed);
        let h_next = cfg.h_init;
        Integration {
            cfg,
            sys: sys.clone(),
            rep,
            t: t0,
            h_next,
            energy_hi,
            traj: Trajectory {
                sys,
                t0,
                seed_box: seed,
                seed_energy_hi: energy_hi,
                steps: Vec::new(),
            },
            last_taylor: None,
        }
    }

    /// Start the main system from a desingularised seed, collapsing the start
    /// time to the midpoint of its window: the seed box is valid at every
    /// time in the window, in particular at the midpoint, and a thin start
    /// time keeps the velocity components from inheriting the window width.
    pub fn from_seed(seed: &crate::desingularize::StateEnclosure, cfg: IntegratorConfig) -> Self {
        let t0 = Interval::point(seed.t.mid());
        Integration::new(System::Main, seed.components().to_vec(), t0, cfg)
    }

    pub fn from_scaled_seed(
        seed: &crate::desingularize::ScaledStateEnclosure,
        cfg: IntegratorConfig,
    ) -> Self {
        let t0 = Interval::point(seed.t.mid());
        Integration::new(
            System::Scaled { beta: seed.beta },
            vec![seed.w, seed.v_w],
            t0,
            cfg,
        )
    }

    pub fn t(&self) -> Interval {
        self.t
    }

    pub fn current_box(&self) -> IVec {
        self.rep.hull()
    }

    pub fn representation(&self) -> &EnclosureRepresentation {
        &self.rep
    }

    pub fn energy_hi(&self) -> f64 {
        self.energy_hi
    }

    pub fn steps_taken(&self) -> usize {
        self.traj.steps.len()
    }

    /// Rough enclosure valid for all of `[0, h]`: iterate inflation until the
    /// Taylor fixed-point inclusion `poly + x_{q+1} [0,h]^{q+1} ⊂ int(cand)`
    /// holds with the top coefficient computed over the candidate itself.
    fn apriori_enclosure(&self, hull: &IVec, h: f64) -> Option<IVec> {
        let q = self.cfg.enclosure_order;
        let hull_series = StateSeries::compute(&self.sys, hull, &self.t, q).ok()?;
        let poly = hull_series.eval_range(h, q);
        let mut cand: IVec = poly.iter().map(|x| puff(x, 1e-12, 0.1)).collect();
        let t_span = Interval::new(self.t.lo(), self.t.hi() + h);
        let h_pow = Interval::new(0.0, h).pow_int((q + 1) as i32).unwrap();
        for _ in 0..12 {
            let cand_series = StateSeries::compute(&self.sys, &cand, &t_span, q + 1).ok()?;
            let top = cand_series.coeff(q + 1);
            let refined: IVec = poly
                .iter()
                .zip(&top)
                .map(|(p, r)| *p + *r * h_pow)
                .collect();
            let inside = refined
                .iter()
                .zip(&cand)
                .all(|(s, c)| c.contains_in_interior(s));
            if inside {
                return Some(refined);
            }
            cand = refined
                .iter()
                .zip(&cand)
                .map(|(s, c)| puff(&c.hull(s), 1e-12, 0.3))
                .collect();
        }
        None
    }

    /// Attempt one step; on success the enclosure and time advance and a
    /// [`TrajStep`] is recorded.
    pub fn step(&mut self) -> Result<&TrajStep, IntegratorError> {
        if self.traj.steps.len() >= self.cfg.max_steps {
            return Err(IntegratorError::MaxStepsExceeded(self.cfg.max_steps));
        }
        let hull = self.rep.hull();
        if linalg::max_width(&hull) > self.cfg.max_box_width {
            return Err(IntegratorError::StepFailure {
                t: self.t.lo(),
                reason: format!(
                    "enclosure width {:.3} exceeds limit {:.3}",
                    linalg::max_width(&hull),
                    self.cfg.max_box_width
                ),
            });
        }
        let mut h = self.h_next.min(self.cfg.h_max);
        // keep ambiguity windows short while the sign of the first component
        // is unresolved; a sign-definite velocity already certifies at most
        // one crossing, so only slow down when both signs are ambiguous
        if self.cfg.careful_stepping
            && matches!(self.sys, System::Main)
            && hull[0].contains(0.0)
            && hull[1].contains(0.0)
        {
            let vmax = speed_cap(self.energy_hi).max(1e-3);
            h = h.min(0.25 * 2.0 / vmax);
        }
        loop {
            match self.try_step(&hull, h) {
                Ok(slack) => {
                    self.h_next = (h * if slack { 1.4 } else { 1.0 }).min(self.cfg.h_max);
                    return Ok(self.traj.steps.last().unwrap());
                }
                Err(reason) => {
                    if h <= self.cfg.h_min {
                        return Err(IntegratorError::StepFailure {
                            t: self.t.lo(),
                            reason: format!("at h_min={}: {reason}", self.cfg.h_min),
                        });
                    }
                    h = (h * 0.7).max(self.cfg.h_min);
                }
            }
        }
    }

    /// Core of one step at a fixed `h`. `Ok(slack)` advances the state;
    /// `slack` says the remainder left room to enlarge the next trial step.
    fn try_step(&mut self, hull: &IVec, h: f64) -> Result<bool, String> {
        let p = self.cfg.order;
        let n = self.sys.dim();
        let apriori = self
            .apriori_enclosure(hull, h)
            .ok_or_else(|| "a-priori enclosure did not converge".to_string())?;
        let t_span = Interval::new(self.t.lo(), self.t.hi() + h);
        let h_thin = Interval::point(h);
        let h_pow = h_thin.pow_int((p + 1) as i32).map_err(|e| e.to_string())?;

        // high-order series at the centre (thin seed) for the point part
        let center_iv: IVec = self.rep.center.iter().map(|&c| Interval::point(c)).collect();
        let center_series =
            StateSeries::compute(&self.sys, &center_iv, &self.t, p).map_err(|e| e.to_string())?;
        // series over the a-priori box for the remainder and the flow matrix
        let ap_series =
            StateSeries::compute(&self.sys, &apriori, &t_span, p + 1).map_err(|e| e.to_string())?;
        let remainder: IVec = ap_series.coeff(p + 1).iter().map(|r| *r * h_pow).collect();
        let rem_width = linalg::max_width(&remainder);
        if rem_width > self.cfg.tol_abs && h > self.cfg.h_min {
            return Err(format!("remainder width {rem_width:.3e}"));
        }

        // variational series for the polynomial part: expanded at the thin
        // start time over the hull (the 1/t series over the whole span would
        // be far too wide at small t)
        let hull_series =
            StateSeries::compute(&self.sys, hull, &self.t, p).map_err(|e| e.to_string())?;
        let var = VarSeries::compute(&hull_series, p);
        // variational series over the a-priori box and time span, for the
        // rough matrix enclosure and the order-(p+1) remainder coefficient
        let var_span = VarSeries::compute(&ap_series, p + 1);
        // rough enclosure BM of the flow matrix over [0, h]: fixed-point
        // inclusion at low order q, using linearity M(s; M0) = Phi(s) M0
        let q = self.cfg.enclosure_order.min(p);
        let hq = Interval::new(0.0, h);
        let hq_pow = hq.pow_int((q + 1) as i32).map_err(|e| e.to_string())?;
        let phi_poly = var_span.eval(&hq, q);
        let phi_top = var_span.coeff(q + 1);
        let mut bm = IMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                *bm.at_mut(i, j) = puff(&phi_poly.at(i, j), 1e-12, 0.1);
            }
        }
        let mut bm_ok = false;
        for _ in 0..12 {
            let prod = phi_top.mul_mat(&bm);
            let mut cand = IMat::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    *cand.at_mut(i, j) = phi_poly.at(i, j) + prod.at(i, j) * hq_pow;
                }
            }
            let inside =
                (0..n).all(|i| (0..n).all(|j| bm.at(i, j).contains_in_interior(&cand.at(i, j))));
            if inside {
                bm = cand;
                bm_ok = true;
                break;
            }
            for i in 0..n {
                for j in 0..n {
                    *bm.at_mut(i, j) = puff(&bm.at(i, j).hull(&cand.at(i, j)), 1e-12, 0.3);
                }
            }
        }
        if !bm_ok {
            return Err("variational a-priori enclosure did not converge".into());
        }
        // one-step flow matrix A = sum_{k<=p} Phi_k h^k + Phi_{p+1} BM h^{p+1}
        let mut a = var.eval(&h_thin, p);
        let var_rem = var_span.coeff(p + 1).mul_mat(&bm);
        for i in 0..n {
            for j in 0..n {
                *a.at_mut(i, j) = a.at(i, j) + var_rem.at(i, j) * h_pow;
            }
        }

        // Lohner update of the doubleton
        let v: IVec = center_series
            .eval(&h_thin, p)
            .iter()
            .zip(&remainder)
            .map(|(x, r)| *x + *r)
            .collect();
        let c_mat = IMat::from_point(n, &self.rep.transform);
        let ac = a.mul_mat(&c_mat);
        let new_center: Vec<f64> = v.iter().map(|x| x.mid()).collect();
        let e_vec: IVec = v
            .iter()
            .zip(&new_center)
            .map(|(x, &c)| *x - Interval::point(c))
            .collect();
        let ac_mid = ac.mid();
        let q_flat = match self.cfg.wrap {
            WrapControl::Qr => linalg::point_qr(n, &ac_mid),
            WrapControl::Parallelepiped => ac_mid,
        };
        let q_imat = IMat::from_point(n, &q_flat);
        let q_inv = q_imat
            .solve(&IMat::identity(n))
            .map_err(|e| format!("transform inversion failed: {e}"))?;
        let new_r = {
            let qac = q_inv.mul_mat(&ac);
            let mut r = qac.mul_vec(&self.rep.box_r);
            let qe = q_inv.mul_vec(&e_vec);
            for i in 0..n {
                r[i] = r[i] + qe[i];
            }
            r
        };

        // end-of-step hull for bookkeeping: v + (A C) r
        let spread = ac.mul_vec(&self.rep.box_r);
        let end_box: IVec = v.iter().zip(&spread).map(|(x, s)| *x + *s).collect();

        let t_end = self.t + h_thin;
        let step = TrajStep {
            t_start: self.t,
            t_end,
            h,
            end_box: end_box.clone(),
            apriori,
            energy_start_hi: self.energy_hi,
        };
        self.last_taylor = Some(TaylorStep {
            order: p,
            coeffs: (0..=p).map(|k| center_series.coeff(k)).collect(),
            apriori: step.apriori.clone(),
            h: h_thin,
        });
        if let System::Main = self.sys {
            let e_end = energy_interval(end_box[0], end_box[1]);
            // energy is non-increasing along solutions, so the running upper
            // bound may only shrink
            self.energy_hi = self.energy_hi.min(e_end.hi());
        }
        self.rep = EnclosureRepresentation {
            center: new_center,
            transform: q_flat,
            box_r: new_r,
        };
        self.t = t_end;
        self.traj.steps.push(step);
        Ok(rem_width < 0.1 * self.cfg.tol_abs)
    }

    /// Force the next trial step to be exactly `h` (used to land on a time).
    pub fn set_next_step(&mut self, h: f64) {
        self.h_next = h;
    }
}

/// Drive a session until the stop condition holds.
pub fn integrate(
    mut session: Integration,
    stop: StopCondition,
) -> Result<Trajectory, IntegratorError> {
    match stop {
        StopCondition::AtTime(t_end) => loop {
            let now = session.t();
            if now.hi() >= t_end {
                return Ok(session.traj);
            }
            let gap = t_end - now.lo();
            if gap <= session.cfg.h_max && gap < session.h_next * 1.5 {
                session.set_next_step(gap);
            }
            session.step()?;
        },
        StopCondition::EnergyNegative { t_max } => loop {
            if session.energy_hi() < 0.0 {
                return Ok(session.traj);
            }
            if session.t().lo() >= t_max {
                return Err(IntegratorError::StepFailure {
                    t: session.t().lo(),
                    reason: format!("energy not certified negative by t = {t_max}"),
                });
            }
            session.step()?;
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn main_session(b: f64, t0: f64, cfg: IntegratorConfig) -> Integration {
        let seed: IVec = oracle::series_start_main(b, t0)
            .iter()
            .map(|&v| Interval::around(v).inflate(1e-9))
            .collect();
        Integration::new(System::Main, seed, Interval::point(t0), cfg)
    }

    #[test]
    fn tracks_float_reference() {
        let b = 3.0;
        let t0 = oracle::start_time(b);
        let session = main_session(b, t0, IntegratorConfig::default());
        let traj = integrate(session, StopCondition::AtTime(1.5)).unwrap();
        let want = oracle::reference_state(b, 1.5);
        let got = traj.final_box();
        for v in 0..4 {
            assert!(
                got[v].contains(want[v]),
                "var {v}: {:?} should contain {}",
                got[v],
                want[v]
            );
            assert!(got[v].width() < 1e-4, "var {v} too wide: {:?}", got[v]);
        }
        let t_final = traj.final_time();
        assert!(t_final.hi() >= 1.5 && t_final.lo() < 1.5 + 1e-9);
    }

    #[test]
    fn interval_seed_stays_tight() {
        // a genuinely thick seed: widths should grow roughly like the flow
        // derivative, not explode from wrapping
        let t0 = oracle::start_time(3.0);
        let lo = oracle::series_start_main(3.0, t0);
        let hi = oracle::series_start_main(3.0 + 1e-6, t0);
        let seed: IVec = (0..4)
            .map(|v| Interval::new(lo[v].min(hi[v]), lo[v].max(hi[v])).inflate(1e-9))
            .collect();
        let session = Integration::new(
            System::Main,
            seed,
            Interval::point(t0),
            IntegratorConfig::default(),
        );
        let traj = integrate(session, StopCondition::AtTime(2.0)).unwrap();
        let got = traj.final_box();
        for v in 0..4 {
            assert!(got[v].width() < 1e-3, "var {v}: {:?}", got[v]);
        }
    }

    #[test]
    fn both_wrap_modes_remain_rigorous() {
        for wrap in [WrapControl::Qr, WrapControl::Parallelepiped] {
            let cfg = IntegratorConfig {
                wrap,
                ..IntegratorConfig::default()
            };
            let b = 2.0;
            let t0 = oracle::start_time(b);
            let session = main_session(b, t0, cfg);
            let traj = integrate(session, StopCondition::AtTime(1.0)).unwrap();
            let want = oracle::reference_state(b, 1.0);
            assert!(traj.final_box()[0].contains(want[0]));
        }
    }

    #[test]
    fn energy_negative_stop_for_falling_solution() {
        // b = 1.5 falls into the well around y = 1 without crossing
        let b = 1.5;
        let t0 = oracle::start_time(b);
        let session = main_session(b, t0, IntegratorConfig::default());
        let traj = integrate(session, StopCondition::EnergyNegative { t_max: 40.0 }).unwrap();
        let last = traj.steps.last().unwrap();
        let e = energy_interval(last.end_box[0], last.end_box[1]);
        assert!(e.hi() < 0.0);
    }

    #[test]
    fn scaled_system_tracks_reference() {
        let beta = 0.05;
        let t0 = 0.1;
        let want = oracle::reference_scaled(beta, 2.0);
        let start = oracle::series_start_scaled(beta, t0);
        let seed: IVec = start
            .iter()
            .map(|&v| Interval::around(v).inflate(1e-9))
            .collect();
        let session = Integration::new(
            System::Scaled {
                beta: Interval::around(beta),
            },
            seed,
            Interval::point(t0),
            IntegratorConfig {
                careful_stepping: false,
                ..IntegratorConfig::default()
            },
        );
        let traj = integrate(session, StopCondition::AtTime(2.0)).unwrap();
        let got = traj.final_box();
        for v in 0..2 {
            assert!(
                got[v].contains(want[v]),
                "var {v}: {:?} vs {}",
                got[v],
                want[v]
            );
        }
    }

    #[test]
    fn max_steps_is_enforced() {
        let cfg = IntegratorConfig {
            max_steps: 3,
            ..IntegratorConfig::default()
        };
        let session = main_session(2.0, 0.05, cfg);
        let err = integrate(session, StopCondition::AtTime(10.0)).unwrap_err();
        assert!(matches!(err, IntegratorError::MaxStepsExceeded(3)));
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let session = main_session(2.0, 0.05, IntegratorConfig::default());
        let traj = integrate(session, StopCondition::AtTime(0.2)).unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,lo0,hi0,lo1,hi1,lo2,hi2,lo3,hi3");
        assert!(lines.count() >= 2);
    }
}

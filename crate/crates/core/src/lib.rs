//! Rigorous uniqueness proofs for the excited states of the radial equation
//! `y'' + (2/t) y' + y^3 - y = 0`.
//!
//! The crate implements a computer-assisted shooting argument: solutions are
//! seeded near `t = 0` with a desingularised Picard enclosure, integrated by
//! a validated interval Taylor method with Lohner-style wrapping control, and
//! classified by three certified methods (`fall`, `bound_state_good`,
//! `infty_crosses_many`). A non-rigorous planner proposes a covering of the
//! shooting parameter range `[sqrt 2, infinity)`; the orchestrator verifies
//! the cover independently, runs every segment, and emits a self-contained
//! JSON certificate with hex-float interval endpoints.
//!
//! Module map:
//! * [`interval`], [`linalg`], [`cubic`] — directed-rounded interval
//!   arithmetic, interval linear algebra, and the cubic nonlinearity;
//! * [`desingularize`] — rigorous seed enclosures at small `t`;
//! * [`series`], [`integrator`] — Taylor coefficients and the validated
//!   integrator;
//! * [`dynamics`] — energy bounds and exact zero-crossing counting;
//! * [`methods`] — the three per-segment proof methods;
//! * [`planner`] — float-oracle planning (not part of the proof);
//! * [`orchestrator`] — cover verification, execution, certificates;
//! * [`oracle`] — non-rigorous floating-point reference solver;
//! * [`hexfloat`] — lossless endpoint serialization.

pub mod cubic;
pub mod desingularize;
pub mod dynamics;
pub mod hexfloat;
pub mod integrator;
pub mod interval;
pub mod linalg;
pub mod methods;
pub mod oracle;
pub mod orchestrator;
pub mod planner;
pub mod series;

pub use interval::Interval;
pub use orchestrator::{prove, ProofCertificate, ProverConfig};
pub use planner::ProofPlan;

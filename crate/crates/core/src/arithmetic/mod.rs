//! Continued-fraction arithmetic, exact orbit points of the rotation
//! `R_α : x ↦ x + α (mod 1)` and the arithmetic predicates used by the
//! rigidity and weak-mixing experiments.
//!
//! Irrationals are always specified by partial quotients. Denominators follow
//! the convention `q_{-1} = q_0 = 1`, `q_n = a_n q_{n-1} + q_{n-2}`, which makes
//! the sequence `(a_1, a_2, ...)` describe `α = [0; 1, a_1, a_2, ...] ∈ (1/2, 1)`
//! and keeps every `q_n` a best-approximation denominator of `α`.

mod angle;
mod cf;
mod dd;
mod predicates;
mod rotation;

pub use angle::Angle;
pub use cf::{CfSpec, ContinuedFraction};
pub use dd::Dd;
pub use predicates::{
    circle_norm, circle_norm_f64, general_position, half_general_position_certificate,
    in_l_alpha, relation_for_l, GeneralPositionReport, GeneralPositionRow, GpVerdict, HalfCertificate,
    RelationSearch, DEFAULT_GP_THRESHOLD,
};
pub use rotation::{orbit_point, Rotation, ORBIT_POINT_MAX_ITERATE, ORBIT_POINT_TOLERANCE};

//! Near-integrable Hamiltonian `u + r²/2 + εH(θ, r, s)` on `T × R × T × R`,
//! its section map at `s = 0`, minimizing periodic orbits and reparametrized
//! ceilings.

mod aubry;
mod integrator;
mod lyapunov;
mod system;
mod timechange;
mod trigpoly;

pub use aubry::{am_cantor_approx, am_minimize, is_birkhoff_ordered, lift_displacement, uniform_action, AmApproximation, AmLevel, OrbitConfiguration};
pub use integrator::{dopri5_step, integrate_adaptive, integrate_fixed, Tolerance};
pub use lyapunov::{lyapunov_exponent, periodic_exponent, LyapunovReport};
pub use system::{det2, mul2, HamiltonianSpec, HamiltonianSystem, JacobianReport, Mat2, PerturbationSpec, TwistReport};
pub use timechange::{reparam_ceiling, TimeChange};
pub use trigpoly::{Jet, Mode, Term, Trig, TrigPoly};

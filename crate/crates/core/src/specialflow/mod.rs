//! Special (suspension) flows over the rotation and over Denjoy models:
//! ceilings, flow advancement, Weyl-sum eigenvalue scans and Cesàro
//! correlation decay.

mod ceiling;
mod correlation;
mod flow;
mod weyl;

pub use ceiling::{make_step_ceiling, CeilingFunction, CeilingSpec, Interpolation};
pub use correlation::{cesaro_mixing_test, correlation, CesaroReport, CesaroVerdict, Observable};
pub use flow::{BaseDynamics, SpecialFlow, SpecialFlowPoint};
pub use weyl::{
    birkhoff_prefix, default_lambda_grid, eigenvalue_scan, ks_exclusion, weyl_sum, KsExclusion, ScanReport,
    ScanThresholds, WeylReport, WeylVerdict,
};

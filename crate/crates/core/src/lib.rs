//! Planar three-fluid capillarity toolkit.
//!
//! * [`tensions`]: surface tensions, their per-fluid weights and the Neumann
//!   junction angles.
//! * [`fermat`]: the weighted Fermat problem and good-triangle construction.
//! * [`cones`]: sector configurations about a vertex, their scaled energy and
//!   improvement tests.
//! * [`polyconfig`]: exact polyline configurations, monotonicity quantities,
//!   conical projection and first variation.
//! * [`gridmin`]: labelled-grid energy minimization and measurements.

pub mod cones;
pub mod fermat;
pub mod geom;
pub mod gridmin;
pub mod polyconfig;
pub mod quadrature;
pub mod tensions;

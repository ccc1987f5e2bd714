//! Verification toolkit for set-valued maps ordered by a convex cone.
//!
//! The crate samples set-valued maps on finite grids and mechanically checks
//! generalized convexity properties, transfer conditions, and minimax
//! certificates for them:
//!
//! * [`cone`] — pointed polyhedral cones in halfspace form;
//! * [`value`] — exact value-set descriptors plus deterministic samples;
//! * [`extremal`] — minimal/maximal points of clouds and cone-translate
//!   inclusions;
//! * [`fixture`] — a catalog of built-in maps and a loader for user-defined
//!   ones;
//! * [`engine`] — the evaluation context (grids, caches, unions, rows);
//! * [`checks`] — property checkers with replayable witnesses;
//! * [`gcurve`] — simplex reparameterization curves used by the weakened
//!   graph-convexity checker;
//! * [`minimax`] — saddle-value certificates and theorem-shaped bundles;
//! * [`report`] — serializable run reports and the regression suite.

pub mod checks;
pub mod cone;
pub mod config;
pub mod engine;
pub mod extremal;
pub mod fixture;
pub mod fixture_file;
pub mod gcurve;
pub mod minimax;
pub mod report;
pub mod value;

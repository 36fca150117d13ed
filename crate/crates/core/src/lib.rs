//! Verification toolkit for holomorphic contact geometry.
//!
//! The crate is organised bottom-up:
//!
//! * [`holoalg`]: complex vectors, holomorphic expression trees with exact
//!   symbolic differentiation, truncated jets and holomorphic maps.
//! * [`forms`]: pointwise exterior algebra, holomorphic differential forms,
//!   paths and adaptive Gauss–Legendre path integrals.
//! * [`domains`]: model domains with membership, seeded sampling and the
//!   exact Kobayashi metric, distance and geodesic discs.
//! * [`contact`]: contact/symplectic checks and Reeb field solves.
//! * [`lifts`]: contact symplectic lifts over trivial bundles, disc and chain
//!   lifting, period classes, monodromy and automorphism lifting.
//! * [`metrics`]: the sub-Finsler pseudometric on lifts and certified bounds.
//! * [`scenario`]: scenario files, built-in scenarios and reports.
//!
//! Sample loops run on rayon when the `parallel` feature is enabled (the
//! default); reductions are always performed in sample order so results are
//! bit-identical with and without it.

pub mod contact;
pub mod domains;
pub mod error;
pub mod forms;
pub mod holoalg;
pub mod lifts;
pub mod linalg;
pub mod metrics;
pub mod par;
pub mod scenario;

pub use error::{Error, Result};
pub use holoalg::{CVec, HoloExpr, HoloMap, Jet, C64};

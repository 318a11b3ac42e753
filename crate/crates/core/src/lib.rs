//! Exact computation of mapping class group orbits on conjugacy classes of
//! scalar, affine and reducible rank-2 representations of surface groups.
//!
//! - [`words`]: free-group words in α_i, β_i, γ_j
//! - [`surface`]: the presentation of Λ_{g,n}
//! - [`mcg`]: twist and half-twist automorphisms
//! - [`cyclo`]: exact arithmetic in Q(ζ_N)
//! - [`reps`]: representations, the action, canonical conjugacy classes
//! - [`orbit`]: orbit enumeration
//! - [`classify`]: finite-orbit decision and orbit-size bounds
//! - [`cli`]: configs and JSON reports

pub mod cyclo;
pub mod words;
pub mod surface;
pub mod mcg;
#[macro_use]
pub mod reps;
pub mod orbit;
pub mod classify;
pub mod cli;

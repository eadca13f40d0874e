//! Periodic trajectories of the elliptic billiard.
//!
//! Builds simple and self-intersected N-periodics (N = 3..8) from closed-form
//! caustics, measures a catalogue of candidate invariants over each family,
//! and checks everything against a brute-force reflection-map oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bowtie;
pub mod conic;
pub mod error;
pub mod invariants;
pub mod oracle;
pub mod orbit;
pub mod poly;
pub mod sweep;
pub mod tol;

pub use conic::{Billiard, CausticKind, ConfocalConic, Focus, InversionContext, Line, Polygon, Vec2};
pub use error::{Error, Result};
pub use invariants::InvariantCode;
pub use orbit::{Orbit, Tag, Topology};

//! Symbolic calculator for self-crossing stable generalized complex structures
//! on four-manifolds.
//!
//! * [`chart`]: pointwise exterior algebra over the elliptic and complex log
//!   frames, residues, and classification of crossing points.
//! * [`divisor`]: necklace graphs of strands and crossings with indices,
//!   co-orientations and parities.
//! * [`surgery`]: building blocks, connected sums, self-sums and smoothing.
//! * [`family`], [`script`], [`report`]: the family generator, the surgery
//!   script language and report emitters.

pub mod chart;
pub mod divisor;
pub mod exchange;
pub mod family;
pub mod par;
pub mod report;
pub mod scalar;
pub mod script;
pub mod sign;
pub mod surgery;

pub use chart::{ChartError, ChartFrame, ComplexLogForm, EllipticForm, PointClass};
pub use divisor::{DivisorGraph, EdgeId, GraphError, VertexId};
pub use family::{FamilyKind, FamilySpec};
pub use scalar::{Rational, Scalar};
pub use sign::Sign;
pub use surgery::{ManifoldState, SumPairing, SurgeryError};

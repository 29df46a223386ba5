//! Finite-dimensional frame theory: frames, K-frames, fusion frames and
//! K-fusion frames, with optimal bounds, reconstructions and the operator
//! criteria (Douglas factorization, quotient operators) that characterize
//! them.
//!
//! Everything is computed over `Complex<f64>`; real inputs are the special
//! case with zero imaginary parts. See [`numkit::Field`].

pub mod demo;
pub mod document;
pub mod error;
pub mod frames;
pub mod fusion;
pub mod numkit;
pub mod optools;
pub mod random;
pub mod subspace;

pub use error::{FrameError, Result};
pub use frames::{BoundsReport, VectorFrame};
pub use fusion::{EllTwoTuple, FusionSystem, Member};
pub use numkit::{Field, Mat, Tolerances, Vector, C64};
pub use subspace::{Projection, Subspace};

//! Exact computations with Galois points of plane curves over finite fields.

pub mod arith;
pub mod error;
pub mod gf;
pub mod polyring;
pub mod projective;
pub mod curve;
pub mod embedder;
pub mod families;
pub mod galois;

pub use error::{Error, Result};
pub use gf::{embed, make_field, Field, Fq};
pub use polyring::{Polynomial, UPoly};

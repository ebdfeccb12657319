//! Finite-scale computational geometric group theory.
//!
//! Cayley balls and word metrics, growth classification, quasi-isometry
//! constant fitting, thin-triangle hyperbolicity estimates, coned-off
//! graphs with bounded coset penetration checks, tree-graded graph
//! verification, Følner search and ping-pong certificates.

pub mod cayley;
pub mod error;
pub mod graph;
pub mod group;
pub mod hyperbolicity;
pub mod qi;
pub mod relhyp;
pub mod treegraded;
pub mod word;

pub use cayley::CayleyBall;
pub use error::Error;
pub use group::Presentation;
pub use word::{Alphabet, Letter, Word};

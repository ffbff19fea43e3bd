//! Numerical companion for degenerate principal series of `SO(p+1,p+1)`
//! restricted to `SO(p+1,p)`, with `p = 2q - 1`.
//!
//! The crate builds every object it talks about as a dense matrix or a
//! sampled function and checks the identities between them. The guide in
//! `book/` walks through the pieces in order.

pub mod error;
pub mod gausspoly;
pub mod liegroups;
pub mod nilgroup;
pub mod numerics;
pub mod orbits;
pub mod repsim;
pub mod skewlin;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};

pub use nilgroup::NilElement;
pub use skewlin::SkewMatrix;

pub type Complex = num_complex::Complex64;


// The guide's code blocks run as doctests, one module per chapter so that a
// failure names its chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/pfaffian.md")]
    mod pfaffian {}
    #[doc = include_str!("../../../book/src/lie-groups.md")]
    mod lie_groups {}
    #[doc = include_str!("../../../book/src/nilpotent.md")]
    mod nilpotent {}
    #[doc = include_str!("../../../book/src/orbits.md")]
    mod orbits {}
    #[doc = include_str!("../../../book/src/zeta.md")]
    mod zeta {}
    #[doc = include_str!("../../../book/src/representations.md")]
    mod representations {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}

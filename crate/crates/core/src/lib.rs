//! Symbolic and connectionist realizations of machine uncertainty, and an
//! engine that decides whether a system is uncertain, in which sense, and
//! whether it behaves like it.
//!
//! Start with [`harness`] to run scenarios, or [`ascription`] for verdicts.

pub mod ascription;
pub mod connectionist;
pub mod harness;
pub mod lang;
pub mod oracle;
pub mod symbolic;

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/language.md")]
    mod language {}
    #[doc = include_str!("../../../book/src/symbolic.md")]
    mod symbolic {}
    #[doc = include_str!("../../../book/src/connectionist.md")]
    mod connectionist {}
    #[doc = include_str!("../../../book/src/ascription.md")]
    mod ascription {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/checking.md")]
    mod checking {}
}

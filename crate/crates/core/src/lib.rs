//! Simulation and analysis toolkit for authenticated quantum key
//! distribution, controlled key agreement and the DL04 attack game.
//!
//! The crate is organized bottom-up: [`qcore`] supplies states, gates and
//! measurements; [`itheory`] turns distributions and density matrices into
//! entropies; the protocol modules build on both.

pub mod auth;
pub mod channels;
pub mod dl04game;
pub mod itheory;
pub mod keydist;
pub mod keyagree;
pub mod numeric;
pub mod qcore;

/// Book chapters, compiled so their snippets stay in sync with the API.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod chapter0 {}
    #[doc = include_str!("../../../book/src/states.md")]
    pub mod chapter1 {}
    #[doc = include_str!("../../../book/src/information.md")]
    pub mod chapter2 {}
    #[doc = include_str!("../../../book/src/authentication.md")]
    pub mod chapter3 {}
    #[doc = include_str!("../../../book/src/key-distribution.md")]
    pub mod chapter4 {}
    #[doc = include_str!("../../../book/src/key-agreement.md")]
    pub mod chapter5 {}
    #[doc = include_str!("../../../book/src/noise.md")]
    pub mod chapter6 {}
    #[doc = include_str!("../../../book/src/dl04-game.md")]
    pub mod chapter7 {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    pub mod chapter8 {}
}

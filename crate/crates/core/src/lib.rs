//! Maker-Breaker clique games on the infinite complete graph `K_ℕ`.
//!
//! Maker and Breaker alternately claim edges of `K_ℕ`; Maker wants a large
//! clique. This crate provides the board, a deterministic game engine, the
//! Maker and Breaker strategies, and certificates that check a finite game
//! prefix against the invariants the Maker strategies maintain.

pub mod board;
pub mod breaker;
pub mod certificate;
pub mod engine;
pub mod maker;
pub mod strategy;

pub use board::{Claim, ClaimLedger, ColourId, Colouring, Edge, Player, VertexId};
pub use engine::{run_game, BiasSchedule, GameConfig, GameTrace, Strategy};
pub use strategy::{play, StrategySpec};

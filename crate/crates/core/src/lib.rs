//! Entropy measurements for economic systems.
//!
//! Two programs share one crate:
//!
//! * [`macro_entropy`] treats entropy as a production function over yearly
//!   macroeconomic observations (capital, worker population, capital stock)
//!   and derives the entropic elasticity between periods.
//! * [`ca`], [`schelling`], [`exchange`] and [`consumer`] make up a
//!   cellular-automaton micro-economy: elementary 1D automata, a Schelling
//!   segregation dynamic on a 2D lattice, the conservative random money
//!   exchange game and the composite consumer model that measures the
//!   satisfaction entropy of the lattice over time.
//!
//! Every randomized routine takes an explicit seed or random stream and is
//! reproducible bit-for-bit on a given platform.

pub mod ca;
pub mod consumer;
pub mod entropy;
pub mod exchange;
pub mod macro_entropy;
pub mod render;
pub mod rng;
pub mod schelling;
pub mod special;

pub use entropy::{shannon_entropy, EntropyError, EntropySample, EntropyTrace};

//! Cooperative reactive synthesis from deterministic Rabin word automata.
//!
//! Given assumptions `A` and guarantees `G`, the crate enumerates the
//! hierarchy of cooperation levels, decides which levels are realizable,
//! synthesizes a Mealy machine that climbs to higher levels whenever the
//! environment allows it, and model-checks machines against levels.

pub mod alphabet;
pub mod checker;
pub mod cli;
pub mod dra;
pub mod error;
pub mod fixtures;
pub mod games;
pub mod hierarchy;
pub mod maxcoop;
pub mod mealy;
pub mod tree;

mod graph;
mod text;

pub use alphabet::{Alphabet, Letter};
pub use dra::{derive_combination, parse_dra, BaseAutomata, Combination, CombinationOverrides, RabinPair, RabinWordAutomaton};
pub use error::{ModelError, ParseError};
pub use hierarchy::{BaseProp, Conjunct, Lattice, LevelSpec, Modality, Ruleset};
pub use mealy::{parse_mealy, MealyStrategy};

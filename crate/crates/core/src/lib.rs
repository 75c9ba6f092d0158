//! Words, undirected repetitions, morphic words and the ternary ranking
//! encoding, together with the finite checks that certify undirected
//! repetition thresholds.

pub mod error;
pub mod factor_index;
pub mod morphisms;
pub mod pansiot;
pub mod powers;
pub mod prover;
pub mod report;
pub mod word;

pub use error::{Error, Result};
pub use morphisms::{builtin, BuiltinName, Morphism};
pub use pansiot::{decode, encode, Permutation};
pub use powers::{scan_undirected, Kind, PowerWitness};
pub use report::{Check, Report};
pub use word::{Letter, Threshold, Word};

//! Uniformly resolvable decompositions of the twofold complete graph into
//! classes of 4-cycles and classes of 3-stars.
//!
//! The crate is split into an admissibility layer ([`spectrum`]), a data model
//! ([`model`]) with a JSON certificate encoding ([`format`]), an independent
//! checker ([`verifier`]), the designs that are written out explicitly
//! ([`catalog`]), auxiliary designs ([`ingredients`], [`search`]) and the
//! recursive constructions themselves ([`constructor`]).

pub mod catalog;
pub mod constructor;
pub mod format;
pub mod ingredients;
pub mod model;
pub mod search;
pub mod spectrum;
pub mod verifier;

pub use model::{Block, BlockClass, BlockKind, Certificate, Claimed, Coverage, Edge, Point, TargetGraph, TargetShape};
pub use spectrum::{admissible, spectrum_set, ClassPair};
pub use verifier::{verify, VerificationReport};

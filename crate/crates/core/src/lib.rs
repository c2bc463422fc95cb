//! Linear temporal logic with Until, Since and the Stavi connectives over
//! words indexed by arbitrary linear orderings.
//!
//! Formulas are compiled into non-ambiguous letter-to-letter transducers with
//! limit transitions ([`construction::compile`]). Running such a transducer on
//! an input word yields the truth word of the formula; checking that some
//! transition emitting `1` is accessible and co-accessible decides
//! satisfiability ([`reach::satisfiable`]).

pub mod automaton;
pub mod construction;
pub mod error;
pub mod formula;
pub mod oracle;
pub mod reach;
pub mod selftest;
pub mod words;

pub use automaton::{RunTerm, State, StateSet, Transducer};
pub use error::{Error, Result};
pub use formula::Formula;
pub use words::{Alphabet, Letter, WordTerm};

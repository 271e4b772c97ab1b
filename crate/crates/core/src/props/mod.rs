//! Generators and executable checkers for the normalisation argument.

pub mod enumerate;
pub mod gen;
pub mod interp;
pub mod lemmas;
pub mod suite;
pub mod sweep;
pub mod typed;
pub mod valuation;

pub use gen::{gen_term, gen_with, gen_with_redex, GenConfig, GenError, Generated};
pub use interp::{bounded_interp_member, InterpConfig, InterpVerdict};
pub use suite::{replay_case, run_suite, LemmaVerdict, SuiteConfig, SuiteReport};
pub use sweep::{exhaustive_sweep, SweepConfig, SweepReport};
pub use valuation::{apply_valuation, Valuation};

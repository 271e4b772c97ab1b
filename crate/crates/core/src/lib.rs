//! Kernel for Martin-Löf's logical framework and its extension with kind
//! application: syntax, arity inference, reduction, typechecking, and
//! executable checks of the normalisation argument.

pub mod arity;
pub mod explore;
pub mod position;
pub mod props;
pub mod reduce;
pub mod signature;
pub mod surface;
pub mod syntax;
pub mod typecheck;

pub use arity::{infer_arity, ArityError};
pub use explore::{sn_explore, SnReport};
pub use position::{Position, PositionError};
pub use reduce::{normalize, redexes, step, Reducer, RuleSet, RuleTag, Strategy};
pub use signature::{ConstDecl, RewriteRule, Signature, SignatureError};
pub use syntax::{alpha_eq, fv, subst, Arity, ArityContext, Binder, Class, Expr, Kind, Name, Term};
pub use typecheck::{arity_translate, arity_translate_ctx, arity_translate_entries, Checker, TypeContext, TypeError};

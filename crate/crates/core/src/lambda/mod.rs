//! The simply typed λ-calculus with differential application `D t · u`,
//! idempotent sums and `0`.

mod parse;
mod reduce;
mod subst;
mod term;
mod typecheck;
mod types;

pub use parse::{parse_context, parse_term, parse_type, ParseError};
pub use reduce::{
    is_normal, normalize, reduce, reduce_with_rule, root_step, Rule, StepLimit, DEFAULT_MAX_STEPS,
};
pub use subst::{diff_substitute, fresh, substitute};
pub use term::Term;
pub use typecheck::{check, infer_type, typecheck, Context, TypeError};
pub use types::Type;

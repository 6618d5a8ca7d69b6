//! Translate moded logic programs into a lazy functional IR and cross-check
//! the result against an LD-resolution interpreter.

pub mod compare;
pub mod lazyeval;
pub mod modes;
pub mod oracle;
pub mod syntax;
pub mod term;
pub mod translate;

pub use compare::{compare_query, CompareRow, Verdict};
pub use lazyeval::{eval_call, run_with_stats, EvalError, EvalStats, Outcome};
pub use modes::{analyze, make_plain, ProgramReport};
pub use oracle::{ld_solve, unify, DerivationLimits, Substitution};
pub use syntax::{parse_program, parse_query, print_program, Program, Query};
pub use term::{print_term, Term, Var};
pub use translate::{emit_haskell, translate, FunProgram};

/// Runs `f` with a grown stack on native targets; deep recursion in the
/// evaluators goes through here.
#[inline]
pub(crate) fn grow<R>(f: impl FnOnce() -> R) -> R {
    #[cfg(not(target_arch = "wasm32"))]
    {
        stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, f)
    }
    #[cfg(target_arch = "wasm32")]
    {
        f()
    }
}

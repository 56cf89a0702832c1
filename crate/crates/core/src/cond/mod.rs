//! Guard language for transition conditions.
//!
//! Guards are boolean expressions over token values (`val`), marking predicates
//! (`in`, `bonded`, `tokens_in`), real arithmetic and comparisons, and calls to host
//! functions registered by the embedding application. The grammar, loosest binding first:
//!
//! ```text
//! expr    := and ("or" and)*
//! and     := not ("and" not)*
//! not     := ["not"] cmp
//! cmp     := sum (("<" | "<=" | "=" | "!=" | ">=" | ">") sum)?
//! sum     := prod (("+" | "-") prod)*
//! prod    := atom (("*" | "/") atom)*
//! atom    := ["-"] number | "true" | "false" | "val(" id ")" | "in(" id "," id ")"
//!          | "bonded(" id "," id "," id ")" | "tokens_in(" id "," id ")"
//!          | id "(" [expr ("," expr)*] ")" | id | "(" expr ")"
//! ```
//!
//! A bare `id` atom only type checks as a host-function argument whose parameter is a
//! base, place or type reference.

mod ast;
mod check;
mod eval;
mod parse;

pub use ast::{ArithOp, CmpOp, CondExpr};
pub use check::{typecheck, typecheck_guard, Kind, TypeError};
pub use eval::{eval, EvalContext, EvalError, HostCallback, HostFunction, HostRegistry, Value};
pub use parse::{is_identifier, parse, SyntaxError};

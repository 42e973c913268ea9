//! Approximate computations for a bounded-arithmetic equational theory.

pub mod beckmann;
pub mod comp;
pub mod corpus;
pub mod def;
pub mod eval;
pub mod proof;
pub mod stdlib;
pub mod syntax;
pub mod term;
pub mod transform;

pub use comp::{CompDag, Node, RuleTag, Statement};
pub use def::{Bit, DefKind, FunctionDef};
pub use stdlib::StdLib;
pub use term::{Development, GNumeral, Term};

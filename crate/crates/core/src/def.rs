//! Cobham-style definition trees for function symbols.
//!
//! A function symbol *is* its definition tree: two symbols are the same
//! symbol exactly when their trees are structurally equal.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A binary digit, used by the successor symbols `s0` and `s1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn from_u8(b: u8) -> Option<Bit> {
        match b {
            0 => Some(Bit::Zero),
            1 => Some(Bit::One),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DefError {
    #[error("constant function must have arity >= 1")]
    ZeroArityConst,
    #[error("projection proj({n},{i}) out of range")]
    BadProjection { n: usize, i: usize },
    #[error("composition needs at least one inner function")]
    EmptyComposition,
    #[error("composition outer arity {outer} does not match {inner} inner functions")]
    CompositionOuterArity { outer: usize, inner: usize },
    #[error("inner functions of a composition must share one arity >= 1")]
    CompositionInnerArity,
    #[error("recursion step arities ({zero}, {one}) must equal base arity {base} + 2")]
    RecursionArity { base: usize, zero: usize, one: usize },
}

/// The shape of a definition. Sub-definitions are shared [`FunctionDef`] handles.
#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DefKind {
    /// The nullary constant `ε`.
    Eps,
    /// Binary successor `s0` / `s1`.
    Succ(Bit),
    /// `εⁿ`, the n-ary constant function with value `ε`.
    ConstN(usize),
    /// `projⁿᵢ`, 1-based index.
    Proj { n: usize, i: usize },
    /// `f(x̄) = g(h₁(x̄), …, hₘ(x̄))`.
    Comp { outer: FunctionDef, inner: Vec<FunctionDef> },
    /// Recursion on notation over the first argument.
    Rec {
        base: FunctionDef,
        step0: FunctionDef,
        step1: FunctionDef,
    },
}

/// A well-formed function symbol. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionDef(Arc<DefKind>);

impl FunctionDef {
    pub fn eps() -> Self {
        FunctionDef(Arc::new(DefKind::Eps))
    }

    pub fn succ(bit: Bit) -> Self {
        FunctionDef(Arc::new(DefKind::Succ(bit)))
    }

    pub fn const_n(n: usize) -> Result<Self, DefError> {
        if n == 0 {
            return Err(DefError::ZeroArityConst);
        }
        Ok(FunctionDef(Arc::new(DefKind::ConstN(n))))
    }

    pub fn proj(n: usize, i: usize) -> Result<Self, DefError> {
        if n == 0 || i == 0 || i > n {
            return Err(DefError::BadProjection { n, i });
        }
        Ok(FunctionDef(Arc::new(DefKind::Proj { n, i })))
    }

    pub fn comp(outer: FunctionDef, inner: Vec<FunctionDef>) -> Result<Self, DefError> {
        let first = inner.first().ok_or(DefError::EmptyComposition)?;
        let n = first.arity();
        if n == 0 || inner.iter().any(|h| h.arity() != n) {
            return Err(DefError::CompositionInnerArity);
        }
        if outer.arity() != inner.len() {
            return Err(DefError::CompositionOuterArity {
                outer: outer.arity(),
                inner: inner.len(),
            });
        }
        Ok(FunctionDef(Arc::new(DefKind::Comp { outer, inner })))
    }

    pub fn rec(base: FunctionDef, step0: FunctionDef, step1: FunctionDef) -> Result<Self, DefError> {
        let b = base.arity();
        if step0.arity() != b + 2 || step1.arity() != b + 2 {
            return Err(DefError::RecursionArity {
                base: b,
                zero: step0.arity(),
                one: step1.arity(),
            });
        }
        Ok(FunctionDef(Arc::new(DefKind::Rec { base, step0, step1 })))
    }

    pub fn kind(&self) -> &DefKind {
        &self.0
    }

    pub fn arity(&self) -> usize {
        match self.kind() {
            DefKind::Eps => 0,
            DefKind::Succ(_) => 1,
            DefKind::ConstN(n) | DefKind::Proj { n, .. } => *n,
            DefKind::Comp { inner, .. } => inner[0].arity(),
            DefKind::Rec { base, .. } => base.arity() + 1,
        }
    }

    /// `||f||`. `ConstN`/`Proj` count `n + 1` so that `ar(f) <= ||f||`.
    pub fn symbol_size(&self) -> usize {
        match self.kind() {
            DefKind::Eps | DefKind::Succ(_) => 1,
            DefKind::ConstN(n) | DefKind::Proj { n, .. } => n + 1,
            DefKind::Comp { outer, inner } => {
                1 + outer.symbol_size() + inner.iter().map(FunctionDef::symbol_size).sum::<usize>()
            }
            DefKind::Rec { base, step0, step1 } => {
                1 + base.symbol_size() + step0.symbol_size() + step1.symbol_size()
            }
        }
    }

    pub fn is_eps(&self) -> bool {
        matches!(self.kind(), DefKind::Eps)
    }

    pub fn succ_bit(&self) -> Option<Bit> {
        match self.kind() {
            DefKind::Succ(b) => Some(*b),
            _ => None,
        }
    }

    /// Numeral constructors: `ε`, `s0`, `s1`.
    pub fn is_constructor(&self) -> bool {
        matches!(self.kind(), DefKind::Eps | DefKind::Succ(_))
    }

    /// Immediate sub-definitions.
    pub fn children(&self) -> Vec<&FunctionDef> {
        match self.kind() {
            DefKind::Comp { outer, inner } => std::iter::once(outer).chain(inner.iter()).collect(),
            DefKind::Rec { base, step0, step1 } => vec![base, step0, step1],
            _ => Vec::new(),
        }
    }

    /// `Base(f)`: this symbol together with every symbol of its definition tree.
    pub fn base_symbols(&self) -> BTreeSet<FunctionDef> {
        let mut out = BTreeSet::new();
        self.collect_base(&mut out);
        out
    }

    pub(crate) fn collect_base(&self, out: &mut BTreeSet<FunctionDef>) {
        if out.insert(self.clone()) {
            for c in self.children() {
                c.collect_base(out);
            }
        }
    }
}

/// `Base(S)` for a set of symbols.
pub fn base_of_set<'a>(defs: impl IntoIterator<Item = &'a FunctionDef>) -> BTreeSet<FunctionDef> {
    let mut out = BTreeSet::new();
    for d in defs {
        d.collect_base(&mut out);
    }
    out
}

impl fmt::Debug for FunctionDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FunctionDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            DefKind::Eps => write!(f, "eps"),
            DefKind::Succ(b) => write!(f, "s{b}"),
            DefKind::ConstN(n) => write!(f, "(eps-n {n})"),
            DefKind::Proj { n, i } => write!(f, "(proj {n} {i})"),
            DefKind::Comp { outer, inner } => {
                write!(f, "(comp {outer}")?;
                for h in inner {
                    write!(f, " {h}")?;
                }
                write!(f, ")")
            }
            DefKind::Rec { base, step0, step1 } => write!(f, "(rec {base} {step0} {step1})"),
        }
    }
}

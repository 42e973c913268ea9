//! Denotational semantics and construction of computations.

pub(crate) mod build;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::def::{Bit, DefKind, FunctionDef};
use crate::term::{Development, GNumeral, Term};

pub use build::{approx_eval, exact_eval, extend_succ, numeral_comp, Demand, Evaluator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{def} expects {expected} arguments, got {got}")]
    Arity { def: String, expected: usize, got: usize },
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("exact evaluation does not accept * in its input")]
    StarInInput,
    #[error("statement {0} does not occur in the computation")]
    MissingStatement(String),
    #[error("invalid bit string {0:?}")]
    BadBits(String),
}

/// A finite bit string, most significant (outermost) bit first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(pub Vec<Bit>);

impl BitString {
    pub fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sᵢ x`.
    pub fn push_front(&self, b: Bit) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(b);
        v.extend_from_slice(&self.0);
        BitString(v)
    }

    pub fn to_term(&self) -> Term {
        self.0.iter().rev().fold(Term::eps(), |acc, &b| Term::succ(b, acc))
    }

    pub fn to_gnumeral(&self) -> GNumeral {
        GNumeral::closed(self.0.clone())
    }

    /// The bit string of a closed numeral.
    pub fn from_term(t: &Term) -> Option<Self> {
        let g = GNumeral::from_term(t)?;
        (!g.open).then_some(BitString(g.bits))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "ε" || s == "e" {
            return Ok(BitString::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(Bit::Zero),
                '1' => Ok(Bit::One),
                _ => Err(EvalError::BadBits(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

fn check_arity<T>(f: &FunctionDef, args: &[T]) -> Result<(), EvalError> {
    if f.arity() != args.len() {
        return Err(EvalError::Arity { def: f.to_string(), expected: f.arity(), got: args.len() });
    }
    Ok(())
}

/// Cobham semantics of a function symbol.
pub fn denote(f: &FunctionDef, args: &[BitString]) -> Result<BitString, EvalError> {
    check_arity(f, args)?;
    Ok(denote_unchecked(f, args))
}

fn denote_unchecked(f: &FunctionDef, args: &[BitString]) -> BitString {
    match f.kind() {
        DefKind::Eps | DefKind::ConstN(_) => BitString::empty(),
        DefKind::Succ(b) => args[0].push_front(*b),
        DefKind::Proj { i, .. } => args[i - 1].clone(),
        DefKind::Comp { outer, inner } => {
            let w: Vec<BitString> = inner.iter().map(|h| denote_unchecked(h, args)).collect();
            denote_unchecked(outer, &w)
        }
        DefKind::Rec { base, step0, step1 } => {
            let bits = &args[0].0;
            let rest = &args[1..];
            let mut val = denote_unchecked(base, rest);
            let mut step_args = Vec::with_capacity(args.len() + 1);
            for k in (0..bits.len()).rev() {
                step_args.clear();
                step_args.push(BitString(bits[k + 1..].to_vec()));
                step_args.push(val);
                step_args.extend_from_slice(rest);
                let step = if bits[k] == Bit::Zero { step0 } else { step1 };
                val = denote_unchecked(step, &step_args);
            }
            val
        }
    }
}

/// The value of a `*`-free term under a development.
pub fn denote_term(t: &Term, env: &Development) -> Result<BitString, EvalError> {
    if t.contains_star() {
        return Err(EvalError::StarInInput);
    }
    let g = sem(t, env)?;
    Ok(BitString(g.bits))
}

/// Monotone semantics over g-numerals: `*` stands for an unknown value.
pub fn denote_partial(f: &FunctionDef, args: &[GNumeral]) -> Result<GNumeral, EvalError> {
    check_arity(f, args)?;
    Ok(partial_unchecked(f, args))
}

pub(crate) fn partial_unchecked(f: &FunctionDef, args: &[GNumeral]) -> GNumeral {
    match f.kind() {
        DefKind::Eps | DefKind::ConstN(_) => GNumeral::closed(Vec::new()),
        DefKind::Succ(b) => args[0].push_front(*b),
        DefKind::Proj { i, .. } => args[i - 1].clone(),
        DefKind::Comp { outer, inner } => {
            let w: Vec<GNumeral> = inner.iter().map(|h| partial_unchecked(h, args)).collect();
            partial_unchecked(outer, &w)
        }
        DefKind::Rec { base, step0, step1 } => {
            let a0 = &args[0];
            let rest = &args[1..];
            let mut val = if a0.open { GNumeral::star() } else { partial_unchecked(base, rest) };
            let mut step_args = Vec::with_capacity(args.len() + 1);
            for k in (0..a0.bits.len()).rev() {
                step_args.clear();
                step_args.push(GNumeral { bits: a0.bits[k + 1..].to_vec(), open: a0.open });
                step_args.push(val);
                step_args.extend_from_slice(rest);
                let step = if a0.bits[k] == Bit::Zero { step0 } else { step1 };
                val = partial_unchecked(step, &step_args);
            }
            val
        }
    }
}

/// The partial value of a term under a development.
pub fn sem(t: &Term, env: &Development) -> Result<GNumeral, EvalError> {
    match t {
        Term::Star => Ok(GNumeral::star()),
        Term::Var(x) => {
            let (u, suffix) = env.lookup(x).ok_or_else(|| EvalError::Unbound(x.to_string()))?;
            sem(&u, &suffix)
        }
        Term::App(f, args) => {
            let vals = args.iter().map(|a| sem(a, env)).collect::<Result<Vec<_>, _>>()?;
            Ok(partial_unchecked(f, &vals))
        }
    }
}

//! A small library of named definitions.

use std::collections::BTreeMap;

use crate::def::{Bit, FunctionDef};

/// Named definitions available to every workspace.
#[derive(Clone, Debug)]
pub struct StdLib {
    entries: BTreeMap<String, FunctionDef>,
}

impl StdLib {
    pub fn new() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert("identity".to_string(), Self::identity());
        for k in 1..=3 {
            entries.insert(format!("zeroize{k}"), Self::zeroize(k));
        }
        entries.insert("discard".to_string(), Self::discard());
        entries.insert("tail".to_string(), Self::tail());
        entries.insert("flip".to_string(), Self::flip());
        entries.insert("concat".to_string(), Self::concat());
        entries.insert("first".to_string(), Self::first());
        StdLib { entries }
    }

    pub fn get(&self, name: &str) -> Option<&FunctionDef> {
        self.entries.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FunctionDef)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn identity() -> FunctionDef {
        Self::proj(1, 1)
    }

    pub fn eps_n(n: usize) -> FunctionDef {
        FunctionDef::const_n(n).expect("n >= 1")
    }

    pub fn proj(n: usize, i: usize) -> FunctionDef {
        FunctionDef::proj(n, i).expect("1 <= i <= n")
    }

    /// `step(x, r) = s0 ⋯ s0 r` with `k` successors.
    pub fn zero_block(k: usize) -> FunctionDef {
        assert!(k >= 1);
        let s0 = FunctionDef::succ(Bit::Zero);
        let mut step = FunctionDef::comp(s0.clone(), vec![Self::proj(2, 2)]).unwrap();
        for _ in 1..k {
            step = FunctionDef::comp(s0.clone(), vec![step]).unwrap();
        }
        step
    }

    /// `g(ε) = ε`, `g(sᵢx) = s0 ⋯ s0 g(x)` with a block of `k` zeros.
    pub fn zeroize(k: usize) -> FunctionDef {
        let step = Self::zero_block(k);
        FunctionDef::rec(FunctionDef::eps(), step.clone(), step).unwrap()
    }

    /// `h(ε) = ε`, `h(sᵢx) = ε²(x, h(x))`.
    pub fn discard() -> FunctionDef {
        FunctionDef::rec(FunctionDef::eps(), Self::eps_n(2), Self::eps_n(2)).unwrap()
    }

    /// Drops the leading bit: `tail(sᵢx) = x`.
    pub fn tail() -> FunctionDef {
        FunctionDef::rec(FunctionDef::eps(), Self::proj(2, 1), Self::proj(2, 1)).unwrap()
    }

    /// Complements every bit.
    pub fn flip() -> FunctionDef {
        let s0 = FunctionDef::succ(Bit::Zero);
        let s1 = FunctionDef::succ(Bit::One);
        FunctionDef::rec(
            FunctionDef::eps(),
            FunctionDef::comp(s1, vec![Self::proj(2, 2)]).unwrap(),
            FunctionDef::comp(s0, vec![Self::proj(2, 2)]).unwrap(),
        )
        .unwrap()
    }

    /// `concat(ε, y) = y`, `concat(sᵢx, y) = sᵢ concat(x, y)`.
    pub fn concat() -> FunctionDef {
        let step = |b| FunctionDef::comp(FunctionDef::succ(b), vec![Self::proj(3, 2)]).unwrap();
        FunctionDef::rec(Self::proj(1, 1), step(Bit::Zero), step(Bit::One)).unwrap()
    }

    /// The leading bit as a one-bit numeral (`ε` for `ε`).
    pub fn first() -> FunctionDef {
        let bit = |b| {
            let s = FunctionDef::succ(b);
            let e3 = Self::eps_n(2);
            FunctionDef::comp(s, vec![e3]).unwrap()
        };
        FunctionDef::rec(FunctionDef::eps(), bit(Bit::Zero), bit(Bit::One)).unwrap()
    }
}

impl Default for StdLib {
    fn default() -> Self {
        Self::new()
    }
}

//! Size-bounded transformations of computations: fusion, the two
//! substitution lemmas, unfolding and folding defining axioms, and the walk
//! along an equational proof.

mod layout;
mod work;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::comp::{CompDag, Statement};
use crate::def::FunctionDef;
use crate::proof::{AxiomCase, Equation, ProofError, ProofTree};
use crate::term::{Development, Term};

use work::Work;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    #[serde(rename = "U")]
    pub u: usize,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "C")]
    pub c: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { u: 1 << 40, b: 1 << 30, v: 1 << 30, c: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// From `⟨t, ρ⟩` to `⟨u, ρ⟩` for a proof of `t = u`.
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    #[default]
    Permissive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub op: String,
    pub path: String,
    pub claimed_nodes: usize,
    pub actual_nodes: usize,
    pub claimed_m: Option<usize>,
    pub actual_m: usize,
    pub pass: bool,
}

/// Claimed-versus-actual bounds for every step of a transformation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Ledger {
    pub entries: Vec<LedgerEntry>,
    pub warnings: Vec<String>,
}

impl Ledger {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

impl fmt::Display for Ledger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{:<10} {:<24} nodes {:>6} <= {:>6}  M {:>5}{}  {}",
                e.op,
                e.path,
                e.actual_nodes,
                e.claimed_nodes,
                e.actual_m,
                e.claimed_m.map(|m| format!(" <= {m}")).unwrap_or_default(),
                if e.pass { "ok" } else { "FAIL" }
            )?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("statement {0} is not a conclusion")]
    NotAConclusion(String),
    #[error("variable {0} is not fresh for the computation")]
    NotFresh(String),
    #[error("{0}")]
    Shape(String),
    #[error("budget violated: {0}")]
    Budget(String),
    #[error("incomparable approximations {0} and {1}")]
    Incomparable(String, String),
    #[error("proof does not check: {0}")]
    Proof(#[from] ProofError),
    #[error("at {path}: {message}")]
    Internal { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, TransformError>;

fn start(dag: &CompDag, target: &Statement, budget: Budget, mode: Mode) -> Result<(Work, usize)> {
    let t = dag
        .find_conclusion(target)
        .ok_or_else(|| TransformError::NotAConclusion(target.to_string()))?;
    let mut w = Work::new(dag, budget, mode);
    for c in dag.conclusion_indices() {
        if c != t {
            w.protect(c);
        }
    }
    Ok((w, t))
}

/// Adds `⟨f(t̄), ρ⟩ ↓ z` from a purely numerical `head` deriving `⟨f(v̄*), ()⟩ ↓ z`
/// and `arg_nodes` deriving `⟨tᵢ, ρ⟩ ↓ vᵢ` for the arguments that are not g-numerals.
pub fn fuse(
    dag: &CompDag,
    f: &FunctionDef,
    args: &[Term],
    env: &Development,
    head: usize,
    arg_nodes: &BTreeMap<usize, usize>,
) -> Result<CompDag> {
    let mut w = Work::new(dag, Budget::default(), Mode::Permissive);
    for c in dag.conclusion_indices() {
        w.protect(c);
    }
    let r = w.fuse(f, args, env, head, arg_nodes)?;
    Ok(w.finish(r))
}

/// Moves a substitution into the environment: each target `⟨tᵢ[u/x], ρ⟩ ↓ vᵢ` becomes `⟨tᵢ, [u/x]ρ⟩ ↓ vᵢ`.
pub fn subst_in(
    dag: &CompDag,
    targets: &[(Statement, Term)],
    u: &Term,
    x: &str,
    budget: Budget,
    mode: Mode,
) -> Result<(CompDag, Ledger)> {
    if dag.uses_var(x) {
        return Err(TransformError::NotFresh(x.to_string()));
    }
    let mut w = Work::new(dag, budget, mode);
    let idx = w.targets(dag, targets.iter().map(|(s, _)| s))?;
    let mut roots = Vec::new();
    for ((_, t), i) in targets.iter().zip(idx) {
        roots.push(w.subst_in_step(i, t, u, x, "subst-in")?);
    }
    Ok(w.finish_many(&roots))
}

/// Moves a substitution out of the environment: each target `⟨tᵢ, [u/x]ρ⟩ ↓ vᵢ` becomes `⟨tᵢ[u/x], ρ⟩ ↓ vᵢ`.
pub fn subst_out(
    dag: &CompDag,
    targets: &[Statement],
    u: &Term,
    x: &str,
    budget: Budget,
    mode: Mode,
) -> Result<(CompDag, Ledger)> {
    let mut w = Work::new(dag, budget, mode);
    let idx = w.targets(dag, targets.iter())?;
    let mut roots = Vec::new();
    for i in idx {
        roots.push(w.subst_out_step(i, u, x, "subst-out")?);
    }
    Ok(w.finish_many(&roots))
}

/// Rewrites the conclusion `⟨lhs, ρ⟩ ↓ v` to `⟨rhs, ρ⟩ ↓ v'` along a defining axiom.
pub fn unfold_axiom(
    dag: &CompDag,
    target: &Statement,
    f: &FunctionDef,
    case: AxiomCase,
    eq: &Equation,
) -> Result<(CompDag, Ledger)> {
    let (mut w, t) = start(dag, target, Budget::default(), Mode::Permissive)?;
    let r = w.axiom_step(t, f, case, eq, Direction::Forward, "axiom")?;
    Ok(w.finish_with_ledger(r))
}

/// Rewrites the conclusion `⟨rhs, ρ⟩ ↓ v` to `⟨lhs, ρ⟩ ↓ v'` along a defining axiom.
pub fn fold_axiom(
    dag: &CompDag,
    target: &Statement,
    f: &FunctionDef,
    case: AxiomCase,
    eq: &Equation,
) -> Result<(CompDag, Ledger)> {
    let (mut w, t) = start(dag, target, Budget::default(), Mode::Permissive)?;
    let r = w.axiom_step(t, f, case, eq, Direction::Backward, "axiom")?;
    Ok(w.finish_with_ledger(r))
}

/// Carries the conclusion `⟨t, ρ⟩ ↓ v` across a proof of `t = u`
/// (or `u = t` backwards), yielding `⟨u, ρ⟩ ↓ v'` with `v' ⊑ v`.
pub fn transform_along_proof(
    dag: &CompDag,
    target: &Statement,
    proof: &ProofTree,
    direction: Direction,
    budget: Budget,
    mode: Mode,
) -> Result<(CompDag, Ledger)> {
    let eq = proof.conclusion()?;
    let from = match direction {
        Direction::Forward => &eq.lhs,
        Direction::Backward => &eq.rhs,
    };
    if &target.term != from {
        return Err(TransformError::Shape(format!(
            "target main term {} is not the proof's {} side",
            target.term,
            match direction {
                Direction::Forward => "left",
                Direction::Backward => "right",
            }
        )));
    }
    let (mut w, t) = start(dag, target, budget, mode)?;
    w.check_budget(dag, target, proof)?;
    let r = w.proof_step(t, proof, direction, "root")?;
    Ok(w.finish_with_ledger(r))
}

#[cfg(test)]
mod tests;

//! Computation statements, computation DAGs and the rule schemas that
//! govern them.

mod audit;
mod builder;
mod surgery;
pub(crate) mod validate;

use std::fmt;

use crate::def::Bit;
use crate::term::{Development, Term};

pub use audit::{AuditReport, BoundCheck, Metrics};
pub use builder::DagBuilder;
pub use surgery::SurgeryError;
pub use validate::{Condition, Violation};

/// `⟨t, ρ⟩ ↓ v`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Statement {
    pub term: Term,
    pub env: Development,
    pub value: Term,
}

impl Statement {
    pub fn new(term: Term, env: Development, value: Term) -> Self {
        Statement { term, env, value }
    }

    /// `⟨v, ()⟩ ↓ v`.
    pub fn numeral(v: Term) -> Self {
        Statement { term: v.clone(), env: Development::empty(), value: v }
    }

    pub fn is_purely_numeric(&self) -> bool {
        self.env.is_empty() && self.term.args().iter().all(Term::is_g_numeral)
    }
}

impl fmt::Debug for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}> => {}", self.term, self.env, self.value)
    }
}

/// One tag per inference rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleTag {
    Subst,
    Star,
    Eps,
    EpsN,
    Succ(Bit),
    SuccN(Bit),
    ConstFn(usize),
    /// `projᵐᵢ`, 1-based `i`.
    Proj { i: usize, m: usize },
    Comp,
    RecEps,
    RecSucc(Bit),
}

impl RuleTag {
    /// Every tag kind, with representative parameters.
    pub const KINDS: [&'static str; 11] = [
        "subst", "star", "eps", "eps-n", "succ", "succ-n", "const-fn", "proj", "comp", "rec-eps", "rec-succ",
    ];

    pub fn kind_name(&self) -> &'static str {
        match self {
            RuleTag::Subst => "subst",
            RuleTag::Star => "star",
            RuleTag::Eps => "eps",
            RuleTag::EpsN => "eps-n",
            RuleTag::Succ(_) => "succ",
            RuleTag::SuccN(_) => "succ-n",
            RuleTag::ConstFn(_) => "const-fn",
            RuleTag::Proj { .. } => "proj",
            RuleTag::Comp => "comp",
            RuleTag::RecEps => "rec-eps",
            RuleTag::RecSucc(_) => "rec-succ",
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTag::Succ(b) | RuleTag::SuccN(b) | RuleTag::RecSucc(b) => write!(f, "{} {b}", self.kind_name()),
            RuleTag::ConstFn(m) => write!(f, "const-fn {m}"),
            RuleTag::Proj { i, m } => write!(f, "proj {i} {m}"),
            _ => write!(f, "{}", self.kind_name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub premises: Vec<usize>,
    pub rule: RuleTag,
    pub stmt: Statement,
}

impl Node {
    pub fn new(rule: RuleTag, premises: Vec<usize>, stmt: Statement) -> Self {
        Node { premises, rule, stmt }
    }
}

/// A topologically ordered computation. Premises always point backwards.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CompDag {
    nodes: Vec<Node>,
}

impl CompDag {
    pub fn from_nodes(nodes: Vec<Node>) -> Self {
        CompDag { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn into_nodes(self) -> Vec<Node> {
        self.nodes
    }

    /// `|||σ|||`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// For each node, whether some other node uses it as a premise.
    pub fn used_flags(&self) -> Vec<bool> {
        let mut used = vec![false; self.nodes.len()];
        for n in &self.nodes {
            for &p in &n.premises {
                if let Some(u) = used.get_mut(p) {
                    *u = true;
                }
            }
        }
        used
    }

    /// Indices of nodes never used as a premise, in index order.
    pub fn conclusion_indices(&self) -> Vec<usize> {
        self.used_flags()
            .iter()
            .enumerate()
            .filter(|(_, &u)| !u)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn conclusions(&self) -> Vec<Statement> {
        self.conclusion_indices().into_iter().map(|i| self.nodes[i].stmt.clone()).collect()
    }

    pub fn is_conclusion(&self, i: usize) -> bool {
        i < self.nodes.len() && !self.nodes.iter().any(|n| n.premises.contains(&i))
    }

    /// First node deriving exactly `s`.
    pub fn find(&self, s: &Statement) -> Option<usize> {
        self.nodes.iter().position(|n| &n.stmt == s)
    }

    pub fn contains(&self, s: &Statement) -> bool {
        self.find(s).is_some()
    }

    /// Index of the last conclusion node whose statement is `s`.
    pub fn find_conclusion(&self, s: &Statement) -> Option<usize> {
        self.conclusion_indices().into_iter().rev().find(|&i| &self.nodes[i].stmt == s)
    }

    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.nodes.iter().map(|n| &n.stmt)
    }

    /// Every variable name used anywhere in the computation.
    pub fn uses_var(&self, x: &str) -> bool {
        self.nodes
            .iter()
            .any(|n| n.stmt.term.has_free(x) || n.stmt.env.mentions(x))
    }

    /// The derivation of node `i` as (rule, premise statements).
    pub fn derivation_of(&self, i: usize) -> (RuleTag, Vec<Statement>) {
        let n = &self.nodes[i];
        (n.rule, n.premises.iter().map(|&p| self.nodes[p].stmt.clone()).collect())
    }
}

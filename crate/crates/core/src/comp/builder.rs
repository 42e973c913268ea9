use std::collections::{HashMap, HashSet};

use super::{CompDag, Node, RuleTag, Statement};
use crate::term::Term;

/// Incremental construction of a [`CompDag`] with statement-level sharing.
#[derive(Clone, Debug, Default)]
pub struct DagBuilder {
    nodes: Vec<Node>,
    index: HashMap<Statement, Vec<usize>>,
    protected: HashSet<usize>,
}

impl DagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_dag(dag: CompDag) -> Self {
        let mut b = Self::new();
        for n in dag.into_nodes() {
            b.push(n.rule, n.premises, n.stmt);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn stmt(&self, i: usize) -> &Statement {
        &self.nodes[i].stmt
    }

    /// A node deriving `s` that is not protected.
    pub fn find(&self, s: &Statement) -> Option<usize> {
        self.index.get(s)?.iter().copied().find(|i| !self.protected.contains(i))
    }

    /// Protected nodes are never handed out for reuse, so they stay conclusions.
    pub fn protect(&mut self, i: usize) {
        self.protected.insert(i);
    }

    pub fn protected(&self) -> impl Iterator<Item = usize> + '_ {
        self.protected.iter().copied()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Appends a node unconditionally.
    pub fn push(&mut self, rule: RuleTag, premises: Vec<usize>, stmt: Statement) -> usize {
        let i = self.nodes.len();
        self.index.entry(stmt.clone()).or_default().push(i);
        self.nodes.push(Node::new(rule, premises, stmt));
        i
    }

    /// Reuses a node deriving `stmt`, or appends one.
    pub fn ensure(&mut self, rule: RuleTag, premises: Vec<usize>, stmt: Statement) -> usize {
        match self.find(&stmt) {
            Some(i) => i,
            None => self.push(rule, premises, stmt),
        }
    }

    /// A node deriving `⟨v, ()⟩ ↓ v` for a g-numeral `v`.
    pub fn numeral(&mut self, v: &Term) -> usize {
        let s = Statement::numeral(v.clone());
        if let Some(i) = self.find(&s) {
            return i;
        }
        if v.is_star() {
            return self.push(RuleTag::Star, vec![], s);
        }
        if v.is_eps() {
            return self.push(RuleTag::EpsN, vec![], s);
        }
        let (b, inner) = v.as_succ().expect("g-numeral");
        let p = self.numeral(inner);
        self.push(RuleTag::SuccN(b), vec![p], s)
    }

    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.nodes.iter().map(|n| &n.stmt)
    }

    pub fn finish(self) -> CompDag {
        CompDag::from_nodes(self.nodes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeral_chain_shares() {
        let mut b = DagBuilder::new();
        let v = Term::s1(Term::s0(Term::eps()));
        let i = b.numeral(&v);
        assert_eq!(i, 2);
        assert_eq!(b.numeral(&Term::s0(Term::eps())), 1);
        let d = b.finish();
        assert_eq!(d.len(), 3);
        assert_eq!(d.validate(), Ok(()));
    }
}

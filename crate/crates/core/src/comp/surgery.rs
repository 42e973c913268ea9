use thiserror::Error;

use super::{CompDag, Node, Statement};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("node index {0} out of range")]
    OutOfRange(usize),
    #[error("statement {0} is not a conclusion")]
    NotAConclusion(String),
    #[error("dropping {0} would leave no conclusions")]
    LastConclusion(String),
}

impl CompDag {
    /// Surfaces `stmt(i)` as a conclusion by duplicating its inference.
    pub fn make_conclusion(&self, i: usize) -> Result<CompDag, SurgeryError> {
        if i >= self.len() {
            return Err(SurgeryError::OutOfRange(i));
        }
        let stmt = &self.node(i).stmt;
        if self.find_conclusion(stmt).is_some() {
            return Ok(self.clone());
        }
        let mut nodes = self.nodes().to_vec();
        nodes.push(self.node(i).clone());
        Ok(CompDag::from_nodes(nodes))
    }

    /// Removes one conclusion deriving `s` and every node only it needed.
    pub fn drop_conclusion(&self, s: &Statement) -> Result<CompDag, SurgeryError> {
        let concl = self.conclusion_indices();
        let Some(target) = concl.iter().rev().copied().find(|&i| &self.node(i).stmt == s) else {
            return Err(SurgeryError::NotAConclusion(s.to_string()));
        };
        if concl.len() == 1 {
            return Err(SurgeryError::LastConclusion(s.to_string()));
        }
        let roots: Vec<usize> = concl.into_iter().filter(|&i| i != target).collect();
        Ok(self.retain_reachable(&roots))
    }

    /// Keeps the nodes reachable from `roots`, reindexed in their original order.
    pub fn retain_reachable(&self, roots: &[usize]) -> CompDag {
        self.retain_reachable_map(roots).0
    }

    /// As [`CompDag::retain_reachable`], also returning each old index's new index.
    pub fn retain_reachable_map(&self, roots: &[usize]) -> (CompDag, Vec<Option<usize>>) {
        let mut keep = vec![false; self.len()];
        let mut stack: Vec<usize> = roots.to_vec();
        while let Some(i) = stack.pop() {
            if !keep[i] {
                keep[i] = true;
                stack.extend(self.node(i).premises.iter().copied());
            }
        }
        let mut remap = vec![None; self.len()];
        let mut nodes = Vec::new();
        for (i, n) in self.nodes().iter().enumerate() {
            if keep[i] {
                remap[i] = Some(nodes.len());
                let premises = n.premises.iter().map(|&p| remap[p].expect("premise kept")).collect();
                nodes.push(Node::new(n.rule, premises, n.stmt.clone()));
            }
        }
        (CompDag::from_nodes(nodes), remap)
    }
}

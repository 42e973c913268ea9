use std::collections::BTreeMap;

use crate::comp::validate::x_positions;
use crate::comp::{Node, RuleTag};
use crate::def::DefKind;
use crate::term::Term;

/// The premises of an `f`-form inference split into the purely numerical
/// part and the per-argument premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Layout {
    /// Premises before the scrutinee: `⟨g(…),()⟩`, and for composition the `hⱼ` premises.
    pub head: Vec<usize>,
    /// The recursive-call premise of a successor recursion step.
    pub tail: Vec<usize>,
    /// Argument position to premise, for arguments that are not g-numerals.
    pub args: BTreeMap<usize, usize>,
    pub rec: bool,
}

impl Layout {
    /// `None` for rules that are not of `f`-form.
    pub fn of(node: &Node) -> Option<Layout> {
        let args = node.stmt.term.args();
        let p = &node.premises;
        let (head_len, rec, tail_len) = match node.rule {
            RuleTag::ConstFn(_) | RuleTag::Proj { .. } => (1, false, 0),
            RuleTag::Comp => match node.stmt.term.head()?.kind() {
                DefKind::Comp { inner, .. } => (1 + inner.len(), false, 0),
                _ => return None,
            },
            RuleTag::RecEps => (1, true, 0),
            RuleTag::RecSucc(_) => (1, true, 1),
            _ => return None,
        };
        let mut k = 0;
        let head = p.get(..head_len)?.to_vec();
        k += head_len;
        let mut map = BTreeMap::new();
        if rec && !args[0].is_g_numeral() {
            map.insert(0, *p.get(k)?);
            k += 1;
        }
        let tail = p.get(k..k + tail_len)?.to_vec();
        k += tail_len;
        for pos in x_positions(args, usize::from(rec)) {
            map.insert(pos, *p.get(k)?);
            k += 1;
        }
        Some(Layout { head, tail, args: map, rec })
    }

    pub fn premises(&self) -> Vec<usize> {
        let mut out = self.head.clone();
        if self.rec {
            out.extend(self.args.get(&0));
        }
        out.extend(&self.tail);
        out.extend(self.args.iter().filter(|(&k, _)| !(self.rec && k == 0)).map(|(_, &i)| i));
        out
    }

    /// The value standing in for argument `k`.
    pub fn arg_value(&self, nodes: &[Node], args: &[Term], k: usize) -> Term {
        match self.args.get(&k) {
            Some(&i) => nodes[i].stmt.value.clone(),
            None => args[k].clone(),
        }
    }
}

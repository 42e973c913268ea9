//! The counterexample `h(g(s₁n))`: `g` replaces every bit by a block of `k`
//! zeros, `h` discards its argument. Approximate evaluation stays constant
//! while exact evaluation grows with `n`.

use serde::Serialize;

use crate::comp::CompDag;
use crate::def::{Bit, DefKind, FunctionDef};
use crate::eval::{approx_eval, exact_eval, Demand};
use crate::proof::{axiom_instance, AxiomCase, ProofTree};
use crate::stdlib::StdLib;
use crate::term::{Development, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub k: usize,
    pub len: usize,
    pub n: Term,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub len: usize,
    pub approx_nodes: usize,
    pub exact_nodes: usize,
    pub proof_nodes: usize,
    pub proof_size: usize,
}

/// `s₁ s₀ s₁ ⋯ ε` with `len` bits.
pub fn numeral(len: usize) -> Term {
    (0..len).fold(Term::eps(), |t, i| if i % 2 == 0 { Term::s1(t) } else { Term::s0(t) })
}

impl Instance {
    pub fn new(k: usize, len: usize) -> Self {
        assert!(k >= 1, "block length must be positive");
        Instance { k, len, n: numeral(len) }
    }

    pub fn g(&self) -> FunctionDef {
        StdLib::zeroize(self.k)
    }

    pub fn h(&self) -> FunctionDef {
        StdLib::discard()
    }

    /// `h(g(s₁n))`.
    pub fn term(&self) -> Term {
        let inner = Term::app(&self.g(), vec![Term::s1(self.n.clone())]);
        Term::app(&self.h(), vec![inner])
    }

    pub fn approx(&self) -> CompDag {
        approx_eval(&self.term(), &Development::empty(), Demand::Depth(1)).expect("closed term")
    }

    pub fn exact(&self) -> CompDag {
        exact_eval(&self.term(), &Development::empty()).expect("closed term")
    }

    /// A proof of `h(g(s₁n)) = ε` whose tree shape does not depend on `n`.
    pub fn proof(&self) -> ProofTree {
        let (g, h) = (self.g(), self.h());
        let n = self.n.clone();
        let gn = Term::app(&g, vec![n.clone()]);
        let step = match g.kind() {
            DefKind::Rec { step1, .. } => step1.clone(),
            _ => unreachable!("g is a recursion"),
        };
        let unfold_g = axiom_instance(&g, AxiomCase::Succ(Bit::One), Some(&n), &[]).expect("g axiom");
        let unfold_step = axiom_instance(&step, AxiomCase::Comp, None, &[n, gn]).expect("step axiom");
        let w = unfold_step.rhs.args()[0].clone();
        let p3 = ProofTree::trans(
            ProofTree::axiom(&g, AxiomCase::Succ(Bit::One), unfold_g),
            ProofTree::axiom(&step, AxiomCase::Comp, unfold_step),
        );
        let p4 = ProofTree::cong(&h, vec![p3]);
        let unfold_h = axiom_instance(&h, AxiomCase::Succ(Bit::Zero), Some(&w), &[]).expect("h axiom");
        let e2 = StdLib::eps_n(2);
        let drop = axiom_instance(&e2, AxiomCase::ConstN, None, unfold_h.rhs.args()).expect("const axiom");
        ProofTree::trans(
            p4,
            ProofTree::trans(
                ProofTree::axiom(&h, AxiomCase::Succ(Bit::Zero), unfold_h),
                ProofTree::axiom(&e2, AxiomCase::ConstN, drop),
            ),
        )
    }

    pub fn row(&self) -> Row {
        let p = self.proof();
        Row {
            len: self.len,
            approx_nodes: self.approx().len(),
            exact_nodes: self.exact().len(),
            proof_nodes: p.node_count(),
            proof_size: p.size().expect("proof checks"),
        }
    }
}

/// Growth table for block length `k` over the given numeral lengths.
pub fn table(k: usize, lens: &[usize]) -> Vec<Row> {
    lens.iter().map(|&l| Instance::new(k, l).row()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{transform_along_proof, Budget, Direction, Mode};

    #[test]
    fn proof_checks_and_concludes() {
        for k in 1..=3 {
            let inst = Instance::new(k, 3);
            let p = inst.proof();
            let eq = p.conclusion().unwrap();
            assert_eq!(eq.lhs, inst.term());
            assert_eq!(eq.rhs, Term::eps());
        }
    }

    #[test]
    fn growth_shape() {
        for k in 1..=3 {
            let rows = table(k, &[1, 2, 3, 4, 5, 6, 7, 8]);
            assert!(rows.windows(2).all(|w| w[0].approx_nodes == w[1].approx_nodes));
            assert!(rows.windows(2).all(|w| w[0].exact_nodes < w[1].exact_nodes));
            assert!(rows.windows(2).all(|w| w[0].proof_nodes == w[1].proof_nodes));
            assert!(rows.windows(2).all(|w| w[0].proof_size < w[1].proof_size));
        }
    }

    #[test]
    fn transform_reaches_eps() {
        for k in 1..=3 {
            let inst = Instance::new(k, 4);
            let d = inst.approx();
            let s = d.conclusions()[0].clone();
            let p = inst.proof();
            let (out, ledger) =
                transform_along_proof(&d, &s, &p, Direction::Forward, Budget::default(), Mode::Strict).unwrap();
            out.validate().unwrap();
            let c = out.conclusions();
            assert_eq!(c.len(), 1);
            assert_eq!(c[0].term, Term::eps());
            assert_eq!(c[0].value, Term::eps());
            assert!(out.len() <= d.len() + p.size().unwrap());
            assert!(ledger.all_pass(), "{ledger}");
        }
    }
}

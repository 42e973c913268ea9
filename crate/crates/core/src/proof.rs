//! Proofs in the equational theory: defining axioms, equality rules and
//! substitution. There is no induction rule.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::def::{Bit, DefKind, FunctionDef};
use crate::term::{Name, Term};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    pub fn size(&self) -> usize {
        self.lhs.size() + self.rhs.size() + 1
    }

    pub fn flip(&self) -> Equation {
        Equation::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn substitute(&self, r: &Term, x: &str) -> Equation {
        Equation::new(self.lhs.substitute(r, x), self.rhs.substitute(r, x))
    }
}

impl fmt::Debug for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxiomCase {
    Eps,
    Succ(Bit),
    Comp,
    ConstN,
    Proj,
}

impl AxiomCase {
    pub fn name(self) -> &'static str {
        match self {
            AxiomCase::Eps => "eps",
            AxiomCase::Succ(Bit::Zero) => "s0",
            AxiomCase::Succ(Bit::One) => "s1",
            AxiomCase::Comp => "comp",
            AxiomCase::ConstN => "constn",
            AxiomCase::Proj => "proj",
        }
    }
}

impl fmt::Display for AxiomCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "eps" => AxiomCase::Eps,
            "s0" => AxiomCase::Succ(Bit::Zero),
            "s1" => AxiomCase::Succ(Bit::One),
            "comp" => AxiomCase::Comp,
            "constn" => AxiomCase::ConstN,
            "proj" => AxiomCase::Proj,
            _ => return Err(format!("unknown axiom case {s:?}")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofTree {
    Axiom { f: FunctionDef, case: AxiomCase, eq: Equation },
    Refl(Term),
    Sym(Box<ProofTree>),
    Trans(Box<ProofTree>, Box<ProofTree>),
    Cong(FunctionDef, Vec<ProofTree>),
    /// From `t = u` infer `t[r/x] = u[r/x]`.
    Subst { p: Box<ProofTree>, r: Term, x: Name },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProofErrorKind {
    #[error("{f} has no defining axiom of case {case}")]
    NoAxiom { f: String, case: AxiomCase },
    #[error("{0} is not an instance of the defining axiom")]
    NotInstance(String),
    #[error("transitivity middle terms differ: {0} vs {1}")]
    Middle(String, String),
    #[error("congruence over {f} needs {expected} proofs, got {got}")]
    CongArity { f: String, expected: usize, got: usize },
    #[error("proofs speak of *-free terms only: {0}")]
    Star(String),
}

/// A violation with the child-index path from the root to the failing node.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("at {path:?}: {message}")]
pub struct ProofError {
    pub path: Vec<usize>,
    pub message: String,
    #[serde(skip)]
    pub kind: ProofErrorKind,
}

fn var_n(k: usize) -> Term {
    Term::var(&format!("x{k}"))
}

fn vars(n: usize) -> Vec<Term> {
    (1..=n).map(var_n).collect()
}

/// The defining axiom of `f` for `case`, over the variables `x, x1, …, xn`.
pub fn axiom_schema(f: &FunctionDef, case: AxiomCase) -> Result<Equation, ProofErrorKind> {
    let none = || ProofErrorKind::NoAxiom { f: f.to_string(), case };
    match (f.kind(), case) {
        (DefKind::ConstN(n), AxiomCase::ConstN) => Ok(Equation::new(Term::app(f, vars(*n)), Term::eps())),
        (DefKind::Proj { n, i }, AxiomCase::Proj) => Ok(Equation::new(Term::app(f, vars(*n)), var_n(*i))),
        (DefKind::Comp { outer, inner }, AxiomCase::Comp) => {
            let xs = vars(f.arity());
            let hs = inner.iter().map(|h| Term::app(h, xs.clone())).collect();
            Ok(Equation::new(Term::app(f, xs), Term::app(outer, hs)))
        }
        (DefKind::Rec { base, .. }, AxiomCase::Eps) => {
            let xs = vars(base.arity());
            let mut args = vec![Term::eps()];
            args.extend(xs.iter().cloned());
            Ok(Equation::new(Term::app(f, args), Term::app(base, xs)))
        }
        (DefKind::Rec { base, step0, step1 }, AxiomCase::Succ(b)) => {
            let xs = vars(base.arity());
            let x = Term::var("x");
            let mut largs = vec![Term::succ(b, x.clone())];
            largs.extend(xs.iter().cloned());
            let mut rec_args = vec![x.clone()];
            rec_args.extend(xs.iter().cloned());
            let mut rargs = vec![x, Term::app(f, rec_args)];
            rargs.extend(xs);
            let step = if b == Bit::Zero { step0 } else { step1 };
            Ok(Equation::new(Term::app(f, largs), Term::app(step, rargs)))
        }
        _ => Err(none()),
    }
}

/// First-order matching of `pat` against `t`.
fn match_into(pat: &Term, t: &Term, binds: &mut HashMap<Name, Term>) -> bool {
    match pat {
        Term::Var(x) => match binds.get(x) {
            Some(b) => b == t,
            None => {
                binds.insert(x.clone(), t.clone());
                true
            }
        },
        Term::Star => t.is_star(),
        Term::App(f, pa) => match t {
            Term::App(g, ta) => f == g && pa.iter().zip(ta.iter()).all(|(p, u)| match_into(p, u, binds)),
            _ => false,
        },
    }
}

/// The substitution making `eq` an instance of the schema, if any.
pub fn match_axiom(f: &FunctionDef, case: AxiomCase, eq: &Equation) -> Result<HashMap<Name, Term>, ProofErrorKind> {
    let schema = axiom_schema(f, case)?;
    let mut binds = HashMap::new();
    if match_into(&schema.lhs, &eq.lhs, &mut binds) && match_into(&schema.rhs, &eq.rhs, &mut binds) {
        Ok(binds)
    } else {
        Err(ProofErrorKind::NotInstance(eq.to_string()))
    }
}

/// Instantiates the schema with `args` for `x1, …` and `x` for the recursion variable.
pub fn axiom_instance(f: &FunctionDef, case: AxiomCase, x: Option<&Term>, args: &[Term]) -> Result<Equation, ProofErrorKind> {
    let mut eq = axiom_schema(f, case)?;
    // Rename to fresh placeholders first so that arguments mentioning x1… are not captured.
    let n = args.len();
    for k in 1..=n {
        let tmp = Term::var(&format!("\u{0}{k}"));
        eq = eq.substitute(&tmp, &format!("x{k}"));
    }
    if let Some(x) = x {
        let tmp = Term::var("\u{0}x");
        eq = eq.substitute(&tmp, "x");
        eq = eq.substitute(x, "\u{0}x");
    }
    for (k, a) in args.iter().enumerate() {
        eq = eq.substitute(a, &format!("\u{0}{}", k + 1));
    }
    Ok(eq)
}

impl ProofTree {
    pub fn refl(t: Term) -> Self {
        ProofTree::Refl(t)
    }

    pub fn sym(p: ProofTree) -> Self {
        ProofTree::Sym(Box::new(p))
    }

    pub fn trans(p: ProofTree, q: ProofTree) -> Self {
        ProofTree::Trans(Box::new(p), Box::new(q))
    }

    pub fn cong(f: &FunctionDef, ps: Vec<ProofTree>) -> Self {
        ProofTree::Cong(f.clone(), ps)
    }

    pub fn subst(p: ProofTree, r: Term, x: &str) -> Self {
        ProofTree::Subst { p: Box::new(p), r, x: Name::from(x) }
    }

    pub fn axiom(f: &FunctionDef, case: AxiomCase, eq: Equation) -> Self {
        ProofTree::Axiom { f: f.clone(), case, eq }
    }

    pub fn children(&self) -> Vec<&ProofTree> {
        match self {
            ProofTree::Axiom { .. } | ProofTree::Refl(_) => Vec::new(),
            ProofTree::Sym(p) | ProofTree::Subst { p, .. } => vec![p],
            ProofTree::Trans(p, q) => vec![p, q],
            ProofTree::Cong(_, ps) => ps.iter().collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    /// Leaves have depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// The derived equation; checks every node on the way.
    pub fn conclusion(&self) -> Result<Equation, ProofError> {
        self.analyze().map(|(e, _)| e)
    }

    pub fn check(&self) -> Result<(), ProofError> {
        self.analyze().map(|_| ())
    }

    /// `||r||`: the sum of the conclusion sizes over all nodes.
    pub fn size(&self) -> Result<usize, ProofError> {
        self.analyze().map(|(_, s)| s)
    }

    fn analyze(&self) -> Result<(Equation, usize), ProofError> {
        let mut path = Vec::new();
        self.analyze_at(&mut path)
    }

    fn analyze_at(&self, path: &mut Vec<usize>) -> Result<(Equation, usize), ProofError> {
        let err = |path: &Vec<usize>, kind: ProofErrorKind| ProofError {
            path: path.clone(),
            message: kind.to_string(),
            kind,
        };
        let child = |k: usize, p: &ProofTree, path: &mut Vec<usize>| {
            path.push(k);
            let r = p.analyze_at(path);
            path.pop();
            r
        };
        let (eq, below) = match self {
            ProofTree::Axiom { f, case, eq } => {
                match_axiom(f, *case, eq).map_err(|k| err(path, k))?;
                (eq.clone(), 0)
            }
            ProofTree::Refl(t) => (Equation::new(t.clone(), t.clone()), 0),
            ProofTree::Sym(p) => {
                let (e, s) = child(0, p, path)?;
                (e.flip(), s)
            }
            ProofTree::Trans(p, q) => {
                let (e1, s1) = child(0, p, path)?;
                let (e2, s2) = child(1, q, path)?;
                if e1.rhs != e2.lhs {
                    return Err(err(path, ProofErrorKind::Middle(e1.rhs.to_string(), e2.lhs.to_string())));
                }
                (Equation::new(e1.lhs, e2.rhs), s1 + s2)
            }
            ProofTree::Cong(f, ps) => {
                if ps.len() != f.arity() {
                    return Err(err(
                        path,
                        ProofErrorKind::CongArity { f: f.to_string(), expected: f.arity(), got: ps.len() },
                    ));
                }
                let mut l = Vec::with_capacity(ps.len());
                let mut r = Vec::with_capacity(ps.len());
                let mut s = 0;
                for (k, p) in ps.iter().enumerate() {
                    let (e, sk) = child(k, p, path)?;
                    l.push(e.lhs);
                    r.push(e.rhs);
                    s += sk;
                }
                (Equation::new(Term::app(f, l), Term::app(f, r)), s)
            }
            ProofTree::Subst { p, r, x } => {
                let (e, s) = child(0, p, path)?;
                if r.contains_star() {
                    return Err(err(path, ProofErrorKind::Star(r.to_string())));
                }
                (e.substitute(r, x), s)
            }
        };
        if eq.lhs.contains_star() || eq.rhs.contains_star() {
            return Err(err(path, ProofErrorKind::Star(eq.to_string())));
        }
        let size = below + eq.size();
        Ok((eq, size))
    }

    /// Every variable name mentioned anywhere in the tree.
    pub fn variables(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            ProofTree::Axiom { eq, .. } => {
                eq.lhs.collect_vars(out);
                eq.rhs.collect_vars(out);
            }
            ProofTree::Refl(t) => t.collect_vars(out),
            ProofTree::Subst { r, x, .. } => {
                r.collect_vars(out);
                out.insert(x.clone());
            }
            _ => {}
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    /// Renames `x` to `y` throughout, including substitution variables.
    /// `y` must not occur in the tree.
    pub fn rename(&self, x: &str, y: &str) -> ProofTree {
        let ty = Term::var(y);
        let rn = |t: &Term| t.substitute(&ty, x);
        match self {
            ProofTree::Axiom { f, case, eq } => ProofTree::Axiom {
                f: f.clone(),
                case: *case,
                eq: Equation::new(rn(&eq.lhs), rn(&eq.rhs)),
            },
            ProofTree::Refl(t) => ProofTree::Refl(rn(t)),
            ProofTree::Sym(p) => ProofTree::sym(p.rename(x, y)),
            ProofTree::Trans(p, q) => ProofTree::trans(p.rename(x, y), q.rename(x, y)),
            ProofTree::Cong(f, ps) => ProofTree::Cong(f.clone(), ps.iter().map(|p| p.rename(x, y)).collect()),
            ProofTree::Subst { p, r, x: z } => ProofTree::Subst {
                p: Box::new(p.rename(x, y)),
                r: rn(r),
                x: if &**z == x { Name::from(y) } else { z.clone() },
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stdlib::StdLib;

    #[test]
    fn schemas() {
        let e2 = StdLib::eps_n(2);
        let s = axiom_schema(&e2, AxiomCase::ConstN).unwrap();
        assert_eq!(s.to_string(), "(app (eps-n 2) (var x1) (var x2)) = eps");
        assert!(axiom_schema(&FunctionDef::succ(Bit::Zero), AxiomCase::Succ(Bit::Zero)).is_err());
        assert!(axiom_schema(&FunctionDef::eps(), AxiomCase::Eps).is_err());
        let z = StdLib::zeroize(1);
        let s = axiom_schema(&z, AxiomCase::Succ(Bit::One)).unwrap();
        let x = Term::var("x");
        assert_eq!(s.lhs, Term::app(&z, vec![Term::s1(x.clone())]));
        assert_eq!(s.rhs, Term::app(&StdLib::zero_block(1), vec![x.clone(), Term::app(&z, vec![x])]));
    }

    #[test]
    fn wrong_rhs_rejected() {
        let e2 = StdLib::eps_n(2);
        let eq = Equation::new(Term::app(&e2, vec![Term::var("x1"), Term::var("x2")]), Term::var("x1"));
        let p = ProofTree::axiom(&e2, AxiomCase::ConstN, eq);
        assert!(matches!(p.check().unwrap_err().kind, ProofErrorKind::NotInstance(_)));
    }

    #[test]
    fn sizes() {
        assert_eq!(ProofTree::refl(Term::eps()).size().unwrap(), 3);
        assert_eq!(ProofTree::sym(ProofTree::refl(Term::eps())).size().unwrap(), 6);
    }

    #[test]
    fn trans_middle_mismatch() {
        let p = ProofTree::trans(ProofTree::refl(Term::eps()), ProofTree::refl(Term::s0(Term::eps())));
        let e = p.check().unwrap_err();
        assert_eq!(e.path, Vec::<usize>::new());
        assert!(matches!(e.kind, ProofErrorKind::Middle(..)));
    }

    #[test]
    fn instance_with_capture_free_arguments() {
        let c = StdLib::concat();
        let eq = axiom_instance(&c, AxiomCase::Succ(Bit::Zero), Some(&Term::var("x1")), &[Term::var("x")]).unwrap();
        let p = ProofTree::axiom(&c, AxiomCase::Succ(Bit::Zero), eq.clone());
        assert_eq!(p.conclusion().unwrap(), eq);
        assert_eq!(eq.lhs, Term::app(&c, vec![Term::s0(Term::var("x1")), Term::var("x")]));
    }

    #[test]
    fn substitution_and_rename() {
        let z = StdLib::zeroize(1);
        let eq = axiom_schema(&z, AxiomCase::Succ(Bit::Zero)).unwrap();
        let p = ProofTree::subst(ProofTree::axiom(&z, AxiomCase::Succ(Bit::Zero), eq), Term::eps(), "x");
        let c = p.conclusion().unwrap();
        let q = p.rename("x", "y");
        assert_eq!(q.conclusion().unwrap(), c);
        let r = p.size().unwrap();
        let r1 = match &p {
            ProofTree::Subst { p, .. } => p.size().unwrap(),
            _ => unreachable!(),
        };
        assert!(r >= r1 + c.lhs.size() + c.rhs.size());
    }
}

//! Seeded generators for terms, developments, computations and proofs, and
//! a suite of schema-breaking mutations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comp::{CompDag, DagBuilder, Node, RuleTag, Statement};
use crate::def::{Bit, DefKind, FunctionDef};
use crate::eval::{denote_term, Demand, Evaluator};
use crate::proof::{axiom_instance, AxiomCase, Equation, ProofTree};
use crate::stdlib::StdLib;
use crate::term::{Development, Term};

/// Longest value a generated closed term may denote.
pub const MAX_VALUE_LEN: usize = 48;

/// Every definition reachable from the library, deduplicated.
pub fn library_symbols() -> Vec<FunctionDef> {
    let lib = StdLib::new();
    let mut out: Vec<FunctionDef> = Vec::new();
    let mut stack: Vec<FunctionDef> = lib.iter().map(|(_, f)| f.clone()).collect();
    stack.push(StdLib::eps_n(1));
    stack.push(StdLib::proj(2, 2));
    while let Some(f) = stack.pop() {
        if out.contains(&f) {
            continue;
        }
        stack.extend(f.children().into_iter().cloned());
        out.push(f);
    }
    out.sort();
    out
}

/// Axiom cases that apply to `f`.
pub fn axiom_cases(f: &FunctionDef) -> Vec<AxiomCase> {
    match f.kind() {
        DefKind::ConstN(_) => vec![AxiomCase::ConstN],
        DefKind::Proj { .. } => vec![AxiomCase::Proj],
        DefKind::Comp { .. } => vec![AxiomCase::Comp],
        DefKind::Rec { .. } => vec![AxiomCase::Eps, AxiomCase::Succ(Bit::Zero), AxiomCase::Succ(Bit::One)],
        _ => vec![],
    }
}

/// A rewrite site: the path of argument indices to an axiom redex.
#[derive(Clone, Debug)]
pub struct Site {
    pub path: Vec<usize>,
    pub f: FunctionDef,
    pub case: AxiomCase,
    pub eq: Equation,
}

fn redex(t: &Term) -> Option<(FunctionDef, AxiomCase, Equation)> {
    let f = t.head()?.clone();
    let args = t.args();
    let (case, x, rest) = match f.kind() {
        DefKind::ConstN(_) => (AxiomCase::ConstN, None, args),
        DefKind::Proj { .. } => (AxiomCase::Proj, None, args),
        DefKind::Comp { .. } => (AxiomCase::Comp, None, args),
        DefKind::Rec { .. } => {
            if args[0].is_eps() {
                (AxiomCase::Eps, None, &args[1..])
            } else if let Some((b, x)) = args[0].as_succ() {
                (AxiomCase::Succ(b), Some(x), &args[1..])
            } else {
                return None;
            }
        }
        _ => return None,
    };
    let eq = axiom_instance(&f, case, x, rest).ok()?;
    Some((f, case, eq))
}

/// Every place in `t` where a defining axiom can be applied left to right.
pub fn sites(t: &Term) -> Vec<Site> {
    fn go(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Site>) {
        if let Some((f, case, eq)) = redex(t) {
            out.push(Site { path: path.clone(), f, case, eq });
        }
        for (k, a) in t.args().iter().enumerate() {
            path.push(k);
            go(a, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Lifts a proof of `a = b` to the subterm of `t` at `path`.
pub fn lift(t: &Term, path: &[usize], p: ProofTree) -> ProofTree {
    match path.split_first() {
        None => p,
        Some((&k, rest)) => {
            let f = t.head().expect("path follows applications");
            let ps = t
                .args()
                .iter()
                .enumerate()
                .map(|(j, a)| if j == k { lift(a, rest, p.clone()) } else { ProofTree::refl(a.clone()) })
                .collect();
            ProofTree::cong(f, ps)
        }
    }
}

/// Seeded random source for every suite.
pub struct Gen {
    rng: ChaCha8Rng,
    symbols: Vec<FunctionDef>,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        let lib = StdLib::new();
        let mut symbols: Vec<FunctionDef> = lib.iter().map(|(_, f)| f.clone()).collect();
        symbols.extend([StdLib::proj(2, 1), StdLib::proj(2, 2), StdLib::eps_n(1), StdLib::eps_n(2)]);
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), symbols }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn bit(&mut self) -> Bit {
        if self.rng.gen() {
            Bit::One
        } else {
            Bit::Zero
        }
    }

    pub fn numeral(&mut self, max_len: usize) -> Term {
        let len = self.rng.gen_range(0..=max_len);
        (0..len).fold(Term::eps(), |t, _| {
            let b = self.bit();
            Term::succ(b, t)
        })
    }

    /// A `*`-free term over the library with leaves drawn from `leaves`.
    fn raw_term(&mut self, depth: usize, leaves: &[Term]) -> Term {
        if depth == 0 || self.rng.gen_ratio(1, 4) {
            if !leaves.is_empty() && self.rng.gen_ratio(1, 2) {
                return leaves.choose(&mut self.rng).expect("nonempty").clone();
            }
            return self.numeral(depth.min(3));
        }
        if self.rng.gen_ratio(1, 5) {
            let b = self.bit();
            return Term::succ(b, self.raw_term(depth - 1, leaves));
        }
        let f = self.symbols.choose(&mut self.rng).expect("library").clone();
        let args = (0..f.arity()).map(|_| self.raw_term(depth - 1, leaves)).collect();
        Term::app(&f, args)
    }

    /// A term of depth at most `depth` whose value under `env` has at most
    /// [`MAX_VALUE_LEN`] bits.
    pub fn term(&mut self, depth: usize, env: &Development, vars: &[&str]) -> Term {
        let leaves: Vec<Term> = vars.iter().map(|x| Term::var(x)).collect();
        loop {
            let t = self.raw_term(depth.saturating_sub(1), &leaves);
            if t.depth() <= depth && denote_term(&t, env).is_ok_and(|v| v.len() <= MAX_VALUE_LEN) {
                return t;
            }
        }
    }

    pub fn closed_term(&mut self, depth: usize) -> Term {
        self.term(depth, &Development::empty(), &[])
    }

    /// A development binding `vars` in order, each to a small closed term.
    pub fn env(&mut self, vars: &[&str]) -> Development {
        let pairs: Vec<(&str, Term)> = vars.iter().map(|&x| (x, self.closed_term(2))).collect();
        Development::from_pairs(pairs).expect("distinct variables")
    }

    pub fn demand(&mut self) -> Demand {
        match self.rng.gen_range(0..5) {
            0 => Demand::Full,
            d => Demand::Depth(d - 1),
        }
    }

    /// Evaluates every term into one computation and makes each a conclusion.
    pub fn computation(&mut self, terms: &[Term], env: &Development) -> (CompDag, Vec<Statement>) {
        let mut b = DagBuilder::new();
        let exact = self.rng.gen_ratio(1, 3);
        let mut roots = Vec::new();
        for t in terms {
            let d = if exact { Demand::Full } else { self.demand() };
            let mut ev = if exact { Evaluator::exact(&mut b) } else { Evaluator::approximate(&mut b) };
            roots.push(ev.eval(t, env, d).expect("generated terms evaluate"));
        }
        let used = b.clone().finish().used_flags();
        let mut nodes = b.finish().into_nodes();
        let mut surfaced = std::collections::BTreeSet::new();
        for &r in &roots {
            if used[r] || !surfaced.insert(r) {
                let dup = nodes[r].clone();
                nodes.push(dup);
            }
        }
        let dag = CompDag::from_nodes(nodes);
        let stmts = roots.iter().map(|&r| dag.node(r).stmt.clone()).collect();
        (dag, stmts)
    }

    /// A proof of `t = u` for some `u`, with tree depth at most `max_depth`.
    pub fn proof_from(&mut self, t: &Term, max_depth: usize) -> Option<ProofTree> {
        for _ in 0..32 {
            let steps = self.rng.gen_range(1..=3);
            let mut cur = t.clone();
            let mut proof: Option<ProofTree> = None;
            for _ in 0..steps {
                let ss = sites(&cur);
                let Some(site) = ss.choose(&mut self.rng).cloned() else { break };
                let leaf = self.axiom_leaf(&site);
                let step = lift(&cur, &site.path, leaf);
                cur = step.conclusion().ok()?.rhs;
                proof = Some(match proof {
                    None => step,
                    Some(p) => ProofTree::trans(p, step),
                });
            }
            let p = match proof {
                Some(p) => p,
                None => ProofTree::refl(t.clone()),
            };
            if p.depth() <= max_depth {
                return Some(p);
            }
        }
        None
    }

    /// An axiom instance, sometimes reached through the substitution rule.
    fn axiom_leaf(&mut self, site: &Site) -> ProofTree {
        let direct = ProofTree::axiom(&site.f, site.case, site.eq.clone());
        if !self.rng.gen_ratio(1, 3) {
            return direct;
        }
        let lhs_args = site.eq.lhs.args();
        let (x, rest) = match site.case {
            AxiomCase::Succ(_) => {
                let x = lhs_args[0].as_succ().map(|(_, x)| x.clone());
                (x, lhs_args[1..].to_vec())
            }
            AxiomCase::Eps => (None, lhs_args[1..].to_vec()),
            _ => (None, lhs_args.to_vec()),
        };
        if rest.is_empty() {
            return direct;
        }
        let k = self.rng.gen_range(0..rest.len());
        let z = "zz";
        if rest.iter().chain(x.iter()).any(|a| a.has_free(z)) {
            return direct;
        }
        let mut generic = rest.clone();
        let r = std::mem::replace(&mut generic[k], Term::var(z));
        match axiom_instance(&site.f, site.case, x.as_ref(), &generic) {
            Ok(eq) => ProofTree::subst(ProofTree::axiom(&site.f, site.case, eq), r, z),
            Err(_) => direct,
        }
    }
}

/// The kinds of single-field damage applied by [`mutate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MutationKind {
    Value,
    ForwardPremise,
    DropPremise,
    ExtraPremise,
    Rule,
    MainTerm,
}

impl MutationKind {
    pub const ALL: [MutationKind; 6] = [
        MutationKind::Value,
        MutationKind::ForwardPremise,
        MutationKind::DropPremise,
        MutationKind::ExtraPremise,
        MutationKind::Rule,
        MutationKind::MainTerm,
    ];
}

#[derive(Clone, Debug)]
pub struct Mutation {
    pub kind: MutationKind,
    pub node: usize,
    pub dag: CompDag,
}

fn other_rules(r: RuleTag) -> Vec<RuleTag> {
    let flip = |b: Bit| if b == Bit::Zero { Bit::One } else { Bit::Zero };
    let mut all = vec![
        RuleTag::Subst,
        RuleTag::Star,
        RuleTag::Eps,
        RuleTag::EpsN,
        RuleTag::Comp,
        RuleTag::RecEps,
        RuleTag::Succ(Bit::Zero),
        RuleTag::Succ(Bit::One),
        RuleTag::SuccN(Bit::Zero),
        RuleTag::SuccN(Bit::One),
        RuleTag::RecSucc(Bit::Zero),
        RuleTag::RecSucc(Bit::One),
        RuleTag::ConstFn(1),
        RuleTag::ConstFn(2),
        RuleTag::Proj { i: 1, m: 1 },
        RuleTag::Proj { i: 1, m: 2 },
        RuleTag::Proj { i: 2, m: 2 },
    ];
    match r {
        RuleTag::Succ(b) => all.push(RuleTag::Succ(flip(b))),
        RuleTag::ConstFn(m) => all.push(RuleTag::ConstFn(m + 1)),
        RuleTag::Proj { i, m } => all.push(RuleTag::Proj { i, m: m + 1 }),
        _ => {}
    }
    all.retain(|&t| t != r);
    all
}

/// A single-field change to a node that breaks its rule schema or that of a
/// consumer. `None` when the chosen kind does not apply to the chosen node.
pub fn mutate(dag: &CompDag, kind: MutationKind, node: usize, rng: &mut impl Rng) -> Option<Mutation> {
    let mut nodes: Vec<Node> = dag.nodes().to_vec();
    let n = &mut nodes[node];
    match kind {
        MutationKind::Value => {
            if n.rule == RuleTag::Star {
                return None;
            }
            let v = n.stmt.value.clone();
            let mut cands = vec![Term::s0(v.clone()), Term::s1(v.clone())];
            if !v.is_star() {
                cands.push(Term::Star);
            }
            if let Some((_, inner)) = v.as_succ() {
                cands.push(inner.clone());
            }
            n.stmt.value = cands.choose(rng).expect("candidates").clone();
        }
        MutationKind::ForwardPremise => {
            if n.premises.is_empty() {
                return None;
            }
            let k = rng.gen_range(0..n.premises.len());
            n.premises[k] = rng.gen_range(node..dag.len().max(node + 1) + 1);
        }
        MutationKind::DropPremise => {
            if n.premises.is_empty() {
                return None;
            }
            let k = rng.gen_range(0..n.premises.len());
            n.premises.remove(k);
        }
        MutationKind::ExtraPremise => {
            if node == 0 {
                return None;
            }
            let p = rng.gen_range(0..node);
            let k = rng.gen_range(0..=n.premises.len());
            n.premises.insert(k, p);
        }
        MutationKind::Rule => {
            n.rule = *other_rules(n.rule).choose(rng).expect("other rules");
        }
        MutationKind::MainTerm => {
            if n.rule == RuleTag::Star {
                return None;
            }
            let t = n.stmt.term.clone();
            let mut cands = vec![Term::s0(t.clone()), Term::s1(t.clone()), Term::var("mutant")];
            if !t.is_eps() {
                cands.push(Term::eps());
            }
            n.stmt.term = cands.choose(rng).expect("candidates").clone();
        }
    }
    Some(Mutation { kind, node, dag: CompDag::from_nodes(nodes) })
}

/// Up to `count` mutations spread over the kinds and nodes of `dags`.
pub fn mutation_suite(dags: &[CompDag], count: usize, seed: u64) -> Vec<Mutation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 20 && !dags.is_empty() {
        attempts += 1;
        let d = &dags[attempts % dags.len()];
        if d.is_empty() {
            continue;
        }
        let kind = MutationKind::ALL[attempts % MutationKind::ALL.len()];
        let node = rng.gen_range(0..d.len());
        if let Some(m) = mutate(d, kind, node, &mut rng) {
            out.push(m);
        }
    }
    out
}

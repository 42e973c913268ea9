use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::layout::Layout;
use super::{Budget, Direction, Ledger, LedgerEntry, Mode, Result, TransformError};
use crate::comp::validate::x_positions;
use crate::comp::{CompDag, DagBuilder, Node, RuleTag, Statement};
use crate::def::{Bit, DefKind, FunctionDef};
use crate::eval::build::{extend_succ_at, numeral_into};
use crate::proof::{match_axiom, AxiomCase, Equation, ProofTree};
use crate::term::{Development, Name, Term};

fn internal(path: &str, message: impl Into<String>) -> TransformError {
    TransformError::Internal { path: path.to_string(), message: message.into() }
}

/// An append-only working copy of a computation.
pub(crate) struct Work {
    b: DagBuilder,
    budget: Budget,
    mode: Mode,
    ledger: Ledger,
    m_max: usize,
    scanned: usize,
}

impl Work {
    pub fn new(dag: &CompDag, budget: Budget, mode: Mode) -> Self {
        Work {
            b: DagBuilder::from_dag(dag.clone()),
            budget,
            mode,
            ledger: Ledger::default(),
            m_max: 0,
            scanned: 0,
        }
    }

    pub fn protect(&mut self, i: usize) {
        self.b.protect(i);
    }

    /// Conclusion indices of `targets`; every other conclusion is protected.
    pub fn targets<'a>(&mut self, dag: &CompDag, targets: impl Iterator<Item = &'a Statement>) -> Result<Vec<usize>> {
        let concl = dag.conclusion_indices();
        let mut taken = BTreeSet::new();
        let mut out = Vec::new();
        for s in targets {
            let i = concl
                .iter()
                .rev()
                .copied()
                .find(|i| !taken.contains(i) && &dag.node(*i).stmt == s)
                .ok_or_else(|| TransformError::NotAConclusion(s.to_string()))?;
            taken.insert(i);
            out.push(i);
        }
        for c in concl {
            if !taken.contains(&c) {
                self.protect(c);
            }
        }
        Ok(out)
    }

    fn node(&self, i: usize) -> Node {
        self.b.node(i).clone()
    }

    fn value(&self, i: usize) -> &Term {
        &self.b.stmt(i).value
    }

    fn m_now(&mut self) -> usize {
        for n in &self.b.nodes()[self.scanned..] {
            self.m_max = self.m_max.max(n.stmt.term.size());
        }
        self.scanned = self.b.len();
        self.m_max
    }

    fn record(&mut self, op: &str, path: &str, before: usize, claim: usize, claimed_m: Option<usize>) {
        let actual_nodes = self.b.len();
        let actual_m = self.m_now();
        let claimed_nodes = before + claim;
        let pass = actual_nodes <= claimed_nodes && claimed_m.is_none_or(|m| actual_m <= m);
        self.ledger.entries.push(LedgerEntry {
            op: op.to_string(),
            path: path.to_string(),
            claimed_nodes,
            actual_nodes,
            claimed_m,
            actual_m,
            pass,
        });
    }

    pub fn finish(self, root: usize) -> CompDag {
        self.finish_many(&[root]).0
    }

    pub fn finish_with_ledger(self, root: usize) -> (CompDag, Ledger) {
        self.finish_many(&[root])
    }

    /// Garbage-collects everything not needed by the protected conclusions
    /// and `roots`, then makes sure every root is a conclusion.
    pub fn finish_many(self, roots: &[usize]) -> (CompDag, Ledger) {
        let mut keep: Vec<usize> = self.b.protected().collect();
        keep.extend_from_slice(roots);
        keep.sort_unstable();
        keep.dedup();
        let (dag, remap) = self.b.finish().retain_reachable_map(&keep);
        let mut nodes = dag.into_nodes();
        let used = CompDag::from_nodes(nodes.clone()).used_flags();
        let mut surfaced = BTreeSet::new();
        for &r in roots {
            let i = remap[r].expect("root kept");
            if used[i] && surfaced.insert(i) {
                let dup = nodes[i].clone();
                nodes.push(dup);
            }
        }
        (CompDag::from_nodes(nodes), self.ledger)
    }

    fn star(&mut self, t: Term, env: Development) -> usize {
        self.b.ensure(RuleTag::Star, vec![], Statement::new(t, env, Term::Star))
    }

    fn push(&mut self, rule: RuleTag, premises: Vec<usize>, stmt: Statement) -> usize {
        self.b.push(rule, premises, stmt)
    }

    // ---- fusion ----

    pub fn fuse(
        &mut self,
        f: &FunctionDef,
        args: &[Term],
        env: &Development,
        head: usize,
        arg_nodes: &BTreeMap<usize, usize>,
    ) -> Result<usize> {
        let h = self.node(head);
        let stmt = Statement::new(Term::app(f, args.to_vec()), env.clone(), h.stmt.value.clone());
        if h.rule != RuleTag::Star && h.stmt.term.head() != Some(f) {
            return Err(internal("fuse", format!("head {} is not an application of {f}", h.stmt)));
        }
        match h.rule {
            RuleTag::Star => Ok(self.push(RuleTag::Star, vec![], Statement::new(stmt.term, stmt.env, Term::Star))),
            RuleTag::EpsN | RuleTag::Eps => {
                let e = if h.rule == RuleTag::EpsN { head } else { h.premises[0] };
                if env.is_empty() {
                    Ok(self.push(RuleTag::EpsN, vec![], stmt))
                } else {
                    Ok(self.push(RuleTag::Eps, vec![e], stmt))
                }
            }
            RuleTag::SuccN(b) | RuleTag::Succ(b) => {
                let p1 = if h.rule == RuleTag::SuccN(b) { head } else { h.premises[0] };
                let vstar = h.stmt.value.as_succ().map(|(_, v)| v.clone()).expect("successor value");
                if let Some(&a) = arg_nodes.get(&0) {
                    return Ok(self.push(RuleTag::Succ(b), vec![p1, a], stmt));
                }
                let t1 = &args[0];
                if env.is_empty() && t1 == &vstar {
                    let n1 = self.node(p1);
                    return Ok(self.push(n1.rule, n1.premises, stmt));
                }
                let a = self.numeral_like(t1, env, &vstar);
                Ok(self.push(RuleTag::Succ(b), vec![p1, a], stmt))
            }
            RuleTag::Subst => Err(internal("fuse", "a substitution inference cannot head a fusion")),
            _ => {
                let lay = Layout::of(&h).ok_or_else(|| internal("fuse", format!("malformed head {}", h.stmt)))?;
                let want: BTreeSet<usize> = x_positions(args, 0).into_iter().collect();
                let have: BTreeSet<usize> = arg_nodes.keys().copied().collect();
                if want != have {
                    return Err(internal("fuse", format!("argument premises {have:?} do not cover {want:?}")));
                }
                let new = Layout { args: arg_nodes.clone(), ..lay };
                Ok(self.push(h.rule, new.premises(), stmt))
            }
        }
    }

    /// A node deriving `⟨t, ρ⟩ ↓ w` for a g-numeral `t` with `w ⊑ bound`.
    fn numeral_like(&mut self, t: &Term, env: &Development, bound: &Term) -> usize {
        let protected: BTreeSet<usize> = self.b.protected().collect();
        let found = self.b.nodes().iter().enumerate().position(|(i, n)| {
            !protected.contains(&i) && &n.stmt.term == t && &n.stmt.env == env && n.stmt.value.approx_leq(bound)
        });
        match found {
            Some(i) => i,
            None => numeral_into(&mut self.b, t, env),
        }
    }

    // ---- substitution ----

    pub fn subst_in_step(&mut self, idx: usize, t: &Term, u: &Term, x: &str, path: &str) -> Result<usize> {
        let before = self.b.len();
        let m0 = self.m_now();
        let expect = t.substitute(u, x);
        if self.b.stmt(idx).term != expect {
            return Err(internal(path, format!("{} is not {expect}", self.b.stmt(idx).term)));
        }
        let mut memo = HashMap::new();
        let r = self.sin(idx, t, u, x, path, &mut memo)?;
        self.record("subst-in", path, before, expect.size(), Some(m0));
        Ok(r)
    }

    fn sin(
        &mut self,
        idx: usize,
        t: &Term,
        u: &Term,
        x: &str,
        path: &str,
        memo: &mut HashMap<(usize, Term), usize>,
    ) -> Result<usize> {
        if let Some(&r) = memo.get(&(idx, t.clone())) {
            return Ok(r);
        }
        let n = self.node(idx);
        let env = n.stmt.env.prepend(x, u.clone()).map_err(|e| internal(path, e.to_string()))?;
        let stmt = Statement::new(t.clone(), env.clone(), n.stmt.value.clone());
        let r = if t.as_var().is_some_and(|v| &**v == x) {
            self.push(RuleTag::Subst, vec![idx], stmt)
        } else if n.rule == RuleTag::Star {
            self.push(RuleTag::Star, vec![], stmt)
        } else if t.as_var().is_some() {
            self.push(RuleTag::Subst, vec![n.premises[0]], stmt)
        } else if t.is_eps() {
            let e = if n.rule == RuleTag::EpsN { idx } else { n.premises[0] };
            self.push(RuleTag::Eps, vec![e], stmt)
        } else if let Some((b, t1)) = t.as_succ() {
            let (p1, p2) = match n.rule {
                RuleTag::SuccN(_) => (idx, n.premises[0]),
                RuleTag::Succ(_) => (n.premises[0], n.premises[1]),
                _ => return Err(internal(path, format!("unexpected inference for {}", n.stmt))),
            };
            let q = self.sin(p2, t1, u, x, path, memo)?;
            self.push(RuleTag::Succ(b), vec![p1, q], stmt)
        } else {
            let lay = Layout::of(&n).ok_or_else(|| internal(path, format!("unexpected inference for {}", n.stmt)))?;
            let targs = t.args();
            let nargs = n.stmt.term.args().to_vec();
            let mut args = BTreeMap::new();
            for k in x_positions(targs, 0) {
                let src = match lay.args.get(&k) {
                    Some(&p) => p,
                    None => numeral_into(&mut self.b, &nargs[k], &n.stmt.env),
                };
                args.insert(k, self.sin(src, &targs[k], u, x, path, memo)?);
            }
            let new = Layout { args, ..lay };
            self.push(n.rule, new.premises(), stmt)
        };
        memo.insert((idx, t.clone()), r);
        Ok(r)
    }

    pub fn subst_out_step(&mut self, idx: usize, u: &Term, x: &str, path: &str) -> Result<usize> {
        let before = self.b.len();
        let m0 = self.m_now();
        let claim = self.b.stmt(idx).term.substitute(u, x).size();
        let mut memo = HashMap::new();
        let r = self.sout(idx, u, x, path, &mut memo)?;
        self.record("subst-out", path, before, claim, Some(m0 * u.size()));
        Ok(r)
    }

    fn sout(&mut self, idx: usize, u: &Term, x: &str, path: &str, memo: &mut HashMap<usize, usize>) -> Result<usize> {
        if let Some(&r) = memo.get(&idx) {
            return Ok(r);
        }
        let n = self.node(idx);
        let t = &n.stmt.term;
        let (_, env) = n
            .stmt
            .env
            .strip_first(x)
            .ok_or_else(|| internal(path, format!("environment of {} does not start with {x}", n.stmt)))?;
        let stmt = Statement::new(t.substitute(u, x), env.clone(), n.stmt.value.clone());
        let r = if n.rule == RuleTag::Star {
            self.push(RuleTag::Star, vec![], stmt)
        } else if t.as_var().is_some_and(|v| &**v == x) {
            n.premises[0]
        } else if t.as_var().is_some() {
            self.push(RuleTag::Subst, vec![n.premises[0]], stmt)
        } else if t.is_eps() {
            if env.is_empty() {
                n.premises[0]
            } else {
                self.push(RuleTag::Eps, vec![n.premises[0]], stmt)
            }
        } else if let Some((b, _)) = t.as_succ() {
            if !matches!(n.rule, RuleTag::Succ(_)) {
                return Err(internal(path, format!("unexpected inference for {}", n.stmt)));
            }
            let p1 = n.premises[0];
            let q = self.sout(n.premises[1], u, x, path, memo)?;
            let vstar = n.stmt.value.as_succ().map(|(_, v)| v.clone()).expect("successor value");
            let t1 = stmt.term.as_succ().map(|(_, a)| a.clone()).expect("successor term");
            if env.is_empty() && t1 == vstar {
                p1
            } else {
                self.push(RuleTag::Succ(b), vec![p1, q], stmt)
            }
        } else {
            let lay = Layout::of(&n).ok_or_else(|| internal(path, format!("unexpected inference for {}", n.stmt)))?;
            let new_args = stmt.term.args().to_vec();
            let mut args = BTreeMap::new();
            for k in x_positions(&new_args, 0) {
                let p = lay.args[&k];
                args.insert(k, self.sout(p, u, x, path, memo)?);
            }
            let new = Layout { args, ..lay };
            self.push(n.rule, new.premises(), stmt)
        };
        memo.insert(idx, r);
        Ok(r)
    }

    // ---- defining axioms ----

    pub fn axiom_step(
        &mut self,
        idx: usize,
        f: &FunctionDef,
        case: AxiomCase,
        eq: &Equation,
        dir: Direction,
        path: &str,
    ) -> Result<usize> {
        match_axiom(f, case, eq).map_err(|e| internal(path, e.to_string()))?;
        let (from, to) = match dir {
            Direction::Forward => (&eq.lhs, &eq.rhs),
            Direction::Backward => (&eq.rhs, &eq.lhs),
        };
        if &self.b.stmt(idx).term != from {
            return Err(internal(path, format!("{} does not match {from}", self.b.stmt(idx).term)));
        }
        let before = self.b.len();
        let r = match dir {
            Direction::Forward => self.unfold(idx, f, case, eq, path)?,
            Direction::Backward => self.fold(idx, f, case, eq, path)?,
        };
        if &self.b.stmt(r).term != to {
            return Err(internal(path, format!("derived {} instead of {to}", self.b.stmt(r).term)));
        }
        let op = match dir {
            Direction::Forward => "unfold",
            Direction::Backward => "fold",
        };
        self.record(op, path, before, eq.size(), None);
        Ok(r)
    }

    fn unfold(&mut self, idx: usize, f: &FunctionDef, case: AxiomCase, eq: &Equation, path: &str) -> Result<usize> {
        let n = self.node(idx);
        let env = n.stmt.env.clone();
        if n.rule == RuleTag::Star {
            return Ok(self.push(RuleTag::Star, vec![], Statement::new(eq.rhs.clone(), env, Term::Star)));
        }
        let lay = Layout::of(&n).ok_or_else(|| internal(path, format!("unexpected inference for {}", n.stmt)))?;
        let args = n.stmt.term.args().to_vec();
        match (f.kind(), case) {
            (DefKind::ConstN(_), AxiomCase::ConstN) => {
                let e = lay.head[0];
                if env.is_empty() {
                    Ok(e)
                } else {
                    Ok(self.push(RuleTag::Eps, vec![e], Statement::new(Term::eps(), env, Term::eps())))
                }
            }
            (DefKind::Proj { i, .. }, AxiomCase::Proj) => match lay.args.get(&(i - 1)) {
                Some(&a) => Ok(a),
                None => Ok(numeral_into(&mut self.b, &args[i - 1], &env)),
            },
            (DefKind::Comp { outer, inner }, AxiomCase::Comp) => {
                let mut g_args = Vec::with_capacity(inner.len());
                let mut g_nodes = BTreeMap::new();
                for (j, h) in inner.iter().enumerate() {
                    let hj = Term::app(h, args.clone());
                    if !hj.is_g_numeral() {
                        let fj = self.fuse(h, &args, &env, lay.head[1 + j], &lay.args)?;
                        g_nodes.insert(j, fj);
                    }
                    g_args.push(hj);
                }
                self.fuse(outer, &g_args, &env, lay.head[0], &g_nodes)
            }
            (DefKind::Rec { base, .. }, AxiomCase::Eps) => {
                let shifted = shift_down(&lay.args);
                self.fuse(base, &args[1..], &env, lay.head[0], &shifted)
            }
            (DefKind::Rec { step0, step1, .. }, AxiomCase::Succ(b)) => {
                let step = if b == Bit::Zero { step0 } else { step1 };
                let (_, t) = args[0].as_succ().ok_or_else(|| internal(path, "scrutinee is not a successor"))?;
                let t = t.clone();
                let t_node = match lay.args.get(&0) {
                    Some(&s) => {
                        let sn = self.node(s);
                        match sn.rule {
                            RuleTag::Succ(_) => Some(sn.premises[1]),
                            _ => return Err(internal(path, format!("scrutinee derived by {}", sn.rule))),
                        }
                    }
                    None => None,
                };
                let params = &args[1..];
                let mut f_args = vec![t.clone()];
                f_args.extend_from_slice(params);
                let mut f_nodes: BTreeMap<usize, usize> = lay.args.iter().filter(|(&k, _)| k > 0).map(|(&k, &v)| (k, v)).collect();
                if let Some(tn) = t_node {
                    f_nodes.insert(0, tn);
                }
                let fnode = self.fuse(f, &f_args, &env, lay.tail[0], &f_nodes)?;

                let mut g_args = vec![t, Term::app(f, f_args)];
                g_args.extend_from_slice(params);
                let mut g_nodes: BTreeMap<usize, usize> = lay.args.iter().filter(|(&k, _)| k > 0).map(|(&k, &v)| (k + 1, v)).collect();
                if let Some(tn) = t_node {
                    g_nodes.insert(0, tn);
                }
                g_nodes.insert(1, fnode);
                self.fuse(step, &g_args, &env, lay.head[0], &g_nodes)
            }
            _ => Err(internal(path, format!("{f} has no defining axiom of case {case}"))),
        }
    }

    /// A purely numerical copy of the inference at `idx`, plus the argument premises it consumed.
    fn unfuse(&mut self, idx: usize, path: &str) -> Result<(usize, BTreeMap<usize, usize>)> {
        let n = self.node(idx);
        let f = n
            .stmt
            .term
            .head()
            .cloned()
            .ok_or_else(|| internal(path, format!("{} has no head symbol", n.stmt)))?;
        match n.rule {
            RuleTag::Star => {
                let stars = vec![Term::Star; f.arity()];
                Ok((self.star(Term::app(&f, stars), Development::empty()), BTreeMap::new()))
            }
            RuleTag::EpsN | RuleTag::SuccN(_) => Ok((idx, BTreeMap::new())),
            RuleTag::Eps => Ok((n.premises[0], BTreeMap::new())),
            RuleTag::Succ(b) => {
                let (p1, p2) = (n.premises[0], n.premises[1]);
                let w = self.value(p2).clone();
                let vstar = n.stmt.value.as_succ().map(|(_, v)| v.clone()).expect("successor value");
                let cand = BTreeMap::from([(0, p2)]);
                if w == vstar {
                    return Ok((p1, cand));
                }
                let nw = self.b.numeral(&w);
                let stmt = Statement::new(Term::succ(b, w), Development::empty(), n.stmt.value.clone());
                Ok((self.b.ensure(RuleTag::Succ(b), vec![p1, nw], stmt), cand))
            }
            RuleTag::Subst => Err(internal(path, "cannot unfuse a substitution inference")),
            _ => {
                let lay = Layout::of(&n).ok_or_else(|| internal(path, format!("unexpected inference for {}", n.stmt)))?;
                if n.stmt.env.is_empty() && lay.args.is_empty() {
                    return Ok((idx, BTreeMap::new()));
                }
                let args = n.stmt.term.args();
                let vals: Vec<Term> = (0..args.len()).map(|k| lay.arg_value(self.b.nodes(), args, k)).collect();
                let stmt = Statement::new(Term::app(&f, vals), Development::empty(), n.stmt.value.clone());
                let cand = lay.args.clone();
                let bare = Layout { args: BTreeMap::new(), ..lay };
                Ok((self.b.ensure(n.rule, bare.premises(), stmt), cand))
            }
        }
    }

    /// The candidate whose value is the most precise; all must be comparable.
    fn most_precise(&self, cands: impl IntoIterator<Item = usize>) -> Result<Option<usize>> {
        let mut best: Option<usize> = None;
        for c in cands {
            best = Some(match best {
                None => c,
                Some(b) => {
                    let (vc, vb) = (self.value(c), self.value(b));
                    if vc.approx_leq(vb) {
                        c
                    } else if vb.approx_leq(vc) {
                        b
                    } else {
                        return Err(TransformError::Incomparable(vc.to_string(), vb.to_string()));
                    }
                }
            });
        }
        Ok(best)
    }

    fn pick_or_star(&mut self, cands: Vec<usize>, t: &Term, env: &Development) -> Result<usize> {
        match self.most_precise(cands)? {
            Some(c) => Ok(c),
            None => Ok(self.star(t.clone(), env.clone())),
        }
    }

    fn fold(&mut self, idx: usize, f: &FunctionDef, case: AxiomCase, eq: &Equation, path: &str) -> Result<usize> {
        let n = self.node(idx);
        let env = n.stmt.env.clone();
        let lhs = eq.lhs.clone();
        let largs = lhs.args().to_vec();
        let value = n.stmt.value.clone();
        if n.rule == RuleTag::Star {
            return Ok(self.push(RuleTag::Star, vec![], Statement::new(lhs, env, Term::Star)));
        }
        let stmt = Statement::new(lhs.clone(), env.clone(), value.clone());
        match (f.kind(), case) {
            (DefKind::ConstN(m), AxiomCase::ConstN) => {
                let e = self.b.numeral(&Term::eps());
                let mut prem = vec![e];
                for k in x_positions(&largs, 0) {
                    prem.push(self.star(largs[k].clone(), env.clone()));
                }
                Ok(self.push(RuleTag::ConstFn(*m), prem, stmt))
            }
            (DefKind::Proj { n: m, i }, AxiomCase::Proj) => {
                let pv = self.b.numeral(&value);
                let mut prem = vec![pv];
                for k in x_positions(&largs, 0) {
                    if k == i - 1 {
                        prem.push(idx);
                    } else {
                        prem.push(self.star(largs[k].clone(), env.clone()));
                    }
                }
                Ok(self.push(RuleTag::Proj { i: *i, m: *m }, prem, stmt))
            }
            (DefKind::Comp { inner, .. }, AxiomCase::Comp) => {
                let (g, cand) = self.unfuse(idx, path)?;
                let targs = n.stmt.term.args().to_vec();
                let mut prem = vec![g];
                let mut arg_cands: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for (j, _) in inner.iter().enumerate() {
                    match cand.get(&j) {
                        Some(&q) => {
                            let (h, cj) = self.unfuse(q, path)?;
                            prem.push(h);
                            for (k, c) in cj {
                                arg_cands.entry(k).or_default().push(c);
                            }
                        }
                        None => prem.push(self.b.numeral(&targs[j])),
                    }
                }
                for k in x_positions(&largs, 0) {
                    let c = arg_cands.remove(&k).unwrap_or_default();
                    prem.push(self.pick_or_star(c, &largs[k], &env)?);
                }
                Ok(self.push(RuleTag::Comp, prem, stmt))
            }
            (DefKind::Rec { .. }, AxiomCase::Eps) => {
                let (g, cand) = self.unfuse(idx, path)?;
                let mut prem = vec![g];
                for k in x_positions(&largs, 1) {
                    let c: Vec<usize> = cand.get(&(k - 1)).copied().into_iter().collect();
                    prem.push(self.pick_or_star(c, &largs[k], &env)?);
                }
                Ok(self.push(RuleTag::RecEps, prem, stmt))
            }
            (DefKind::Rec { .. }, AxiomCase::Succ(b)) => {
                let (g, cand) = self.unfuse(idx, path)?;
                let pf = *cand.get(&1).ok_or_else(|| internal(path, "recursive call has no premise"))?;
                let (fp, cand_f) = self.unfuse(pf, path)?;
                let mut prem = vec![g];
                let (_, t) = largs[0].as_succ().ok_or_else(|| internal(path, "scrutinee is not a successor"))?;
                if !t.is_g_numeral() {
                    let c: Vec<usize> = cand.get(&0).into_iter().chain(cand_f.get(&0)).copied().collect();
                    let nt = self.pick_or_star(c, t, &env)?;
                    prem.push(extend_succ_at(&mut self.b, nt, b));
                }
                prem.push(fp);
                for k in x_positions(&largs, 1) {
                    let c: Vec<usize> = cand.get(&(k + 1)).into_iter().chain(cand_f.get(&k)).copied().collect();
                    prem.push(self.pick_or_star(c, &largs[k], &env)?);
                }
                Ok(self.push(RuleTag::RecSucc(b), prem, stmt))
            }
            _ => Err(internal(path, format!("{f} has no defining axiom of case {case}"))),
        }
    }

    // ---- proofs ----

    pub fn check_budget(&mut self, dag: &CompDag, target: &Statement, proof: &ProofTree) -> Result<()> {
        let r = proof.size()?;
        let bud = self.budget;
        let room = bud.u.saturating_sub(r);
        let mut problems = Vec::new();
        if bud.u < r {
            problems.push(format!("||r|| = {r} exceeds U = {}", bud.u));
        }
        if target.env.size() > room {
            problems.push(format!("||rho|| = {} exceeds U - ||r|| = {room}", target.env.size()));
        }
        if bud.b > room {
            problems.push(format!("B = {} exceeds U - ||r|| = {room}", bud.b));
        }
        if target.value.size() > bud.b {
            problems.push(format!("||v|| = {} exceeds B = {}", target.value.size(), bud.b));
        }
        if dag.len() > bud.b {
            problems.push(format!("|||sigma||| = {} exceeds B = {}", dag.len(), bud.b));
        }
        let m_untouched = dag
            .conclusions()
            .iter()
            .filter(|s| *s != target)
            .map(|s| s.term.size())
            .max()
            .unwrap_or(0);
        if m_untouched > room {
            problems.push(format!("untouched conclusion size {m_untouched} exceeds U - ||r|| = {room}"));
        }
        if target.term.size() > bud.v {
            problems.push(format!("||t|| = {} exceeds V = {}", target.term.size(), bud.v));
        }
        if problems.is_empty() {
            return Ok(());
        }
        match self.mode {
            Mode::Strict => Err(TransformError::Budget(problems.join("; "))),
            Mode::Permissive => {
                self.ledger.warnings.extend(problems);
                Ok(())
            }
        }
    }

    fn fresh_name(&self, x: &str, extra: &BTreeSet<Name>) -> String {
        let mut used: BTreeSet<Name> = extra.clone();
        for s in self.b.statements() {
            s.term.collect_vars(&mut used);
            s.env.collect_vars(&mut used);
        }
        (1..)
            .map(|k| format!("{x}_{k}"))
            .find(|c| !used.contains(c.as_str()))
            .expect("infinitely many names")
    }

    pub fn proof_step(&mut self, idx: usize, p: &ProofTree, dir: Direction, path: &str) -> Result<usize> {
        let before = self.b.len();
        let (op, r) = match p {
            ProofTree::Refl(_) => ("refl", idx),
            ProofTree::Sym(q) => ("sym", self.proof_step(idx, q, dir.flip(), &format!("{path}/sym"))?),
            ProofTree::Trans(q1, q2) => {
                let (a, b) = match dir {
                    Direction::Forward => (q1, q2),
                    Direction::Backward => (q2, q1),
                };
                let mid = self.proof_step(idx, a, dir, &format!("{path}/trans"))?;
                ("trans", self.proof_step(mid, b, dir, &format!("{path}/trans"))?)
            }
            ProofTree::Axiom { f, case, eq } => ("axiom", self.axiom_step(idx, f, *case, eq, dir, &format!("{path}/axiom"))?),
            ProofTree::Subst { p: q, r, x } => {
                let sub = format!("{path}/substitution");
                let mut extra = q.variables();
                r.collect_vars(&mut extra);
                let x2 = self.fresh_name(x, &extra);
                let q2 = q.rename(x, &x2);
                let eq = q2.conclusion()?;
                let pre = match dir {
                    Direction::Forward => &eq.lhs,
                    Direction::Backward => &eq.rhs,
                };
                let a = self.subst_in_step(idx, pre, r, &x2, &sub)?;
                let c = self.proof_step(a, &q2, dir, &sub)?;
                ("substitution", self.subst_out_step(c, r, &x2, &sub)?)
            }
            ProofTree::Cong(f, ps) => {
                let mut cur = idx;
                for (k, q) in ps.iter().enumerate() {
                    cur = self.cong_step(cur, f, k, q, dir, &format!("{path}/congruence"))?;
                }
                ("congruence", cur)
            }
        };
        let claim = p.size()?;
        self.record(op, path, before, claim, None);
        Ok(r)
    }

    fn cong_step(&mut self, idx: usize, f: &FunctionDef, k: usize, p: &ProofTree, dir: Direction, path: &str) -> Result<usize> {
        let eq = p.conclusion()?;
        let (s, s2) = match dir {
            Direction::Forward => (eq.lhs, eq.rhs),
            Direction::Backward => (eq.rhs, eq.lhs),
        };
        if s == s2 {
            return Ok(idx);
        }
        let n = self.node(idx);
        let env = n.stmt.env.clone();
        let args = n.stmt.term.args().to_vec();
        if n.stmt.term.head() != Some(f) || args.get(k) != Some(&s) {
            return Err(internal(path, format!("{} does not have {s} as argument {} of {f}", n.stmt.term, k + 1)));
        }
        let mut new_args = args.clone();
        new_args[k] = s2.clone();
        let stmt = Statement::new(Term::app(f, new_args), env.clone(), n.stmt.value.clone());
        match n.rule {
            RuleTag::Star => Ok(self.push(RuleTag::Star, vec![], stmt)),
            RuleTag::Succ(b) | RuleTag::SuccN(b) => {
                let (p1, p2) = if n.rule == RuleTag::SuccN(b) { (idx, n.premises[0]) } else { (n.premises[0], n.premises[1]) };
                let q = self.proof_step(p2, p, dir, path)?;
                let vstar = n.stmt.value.as_succ().map(|(_, v)| v.clone()).expect("successor value");
                if env.is_empty() && s2 == vstar {
                    return Ok(p1);
                }
                Ok(self.push(RuleTag::Succ(b), vec![p1, q], stmt))
            }
            _ => {
                let lay = Layout::of(&n).ok_or_else(|| internal(path, format!("unexpected inference for {}", n.stmt)))?;
                let mut new = lay.clone();
                if s.is_g_numeral() {
                    let h = numeral_into(&mut self.b, &s, &env);
                    let q = self.proof_step(h, p, dir, path)?;
                    if s2.is_g_numeral() {
                        return Err(internal(path, format!("proof equates distinct numerals {s} and {s2}")));
                    }
                    new.args.insert(k, q);
                } else {
                    let pk = lay.args[&k];
                    let q = self.proof_step(pk, p, dir, path)?;
                    if s2.is_g_numeral() {
                        new.args.remove(&k);
                    } else {
                        new.args.insert(k, q);
                    }
                }
                Ok(self.push(n.rule, new.premises(), stmt))
            }
        }
    }
}

fn shift_down(args: &BTreeMap<usize, usize>) -> BTreeMap<usize, usize> {
    args.iter().filter(|(&k, _)| k > 0).map(|(&k, &v)| (k - 1, v)).collect()
}

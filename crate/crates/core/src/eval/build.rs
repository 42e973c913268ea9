use std::collections::HashMap;

use super::{partial_unchecked, sem, EvalError};
use crate::comp::validate::x_positions;
use crate::comp::{CompDag, DagBuilder, RuleTag, Statement};
use crate::def::{Bit, DefKind, FunctionDef};
use crate::term::{Development, GNumeral, Term};

/// How many head constructors of the value a computation must pin down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Demand {
    Depth(usize),
    Full,
}

impl Demand {
    fn depth(self) -> usize {
        match self {
            Demand::Depth(d) => d,
            Demand::Full => usize::MAX,
        }
    }
}

/// Builds computations into a [`DagBuilder`], sharing nodes by statement.
///
/// In exact mode every premise carries the exact value. Otherwise each
/// premise is made as imprecise as the conclusion allows.
pub struct Evaluator<'a> {
    b: &'a mut DagBuilder,
    exact: bool,
    memo: HashMap<(Term, Development, usize), usize>,
    sem_memo: HashMap<(Term, Development), GNumeral>,
}

impl<'a> Evaluator<'a> {
    pub fn approximate(b: &'a mut DagBuilder) -> Self {
        Evaluator { b, exact: false, memo: HashMap::new(), sem_memo: HashMap::new() }
    }

    pub fn exact(b: &'a mut DagBuilder) -> Self {
        Evaluator { b, exact: true, memo: HashMap::new(), sem_memo: HashMap::new() }
    }

    fn sem(&mut self, t: &Term, env: &Development) -> Result<GNumeral, EvalError> {
        let key = (t.clone(), env.clone());
        if let Some(v) = self.sem_memo.get(&key) {
            return Ok(v.clone());
        }
        let v = sem(t, env)?;
        self.sem_memo.insert(key, v.clone());
        Ok(v)
    }

    /// Node index of a computation of `⟨t, ρ⟩ ↓ v` where `v` is the value
    /// truncated to `demand`.
    pub fn eval(&mut self, t: &Term, env: &Development, demand: Demand) -> Result<usize, EvalError> {
        self.eval_at(t, env, demand.depth())
    }

    fn eval_at(&mut self, t: &Term, env: &Development, d: usize) -> Result<usize, EvalError> {
        let full = self.sem(t, env)?;
        let d = d.min(full.depth());
        let key = (t.clone(), env.clone(), d);
        if let Some(&i) = self.memo.get(&key) {
            return Ok(i);
        }
        let val = full.truncate(d);
        let stmt = Statement::new(t.clone(), env.clone(), val.to_term());
        let idx = if val.is_star() {
            self.b.ensure(RuleTag::Star, vec![], stmt)
        } else {
            self.build(t, env, d, stmt)?
        };
        self.memo.insert(key, idx);
        Ok(idx)
    }

    fn build(&mut self, t: &Term, env: &Development, d: usize, stmt: Statement) -> Result<usize, EvalError> {
        if let Some(x) = t.as_var() {
            let (u, suffix) = env.lookup(x).ok_or_else(|| EvalError::Unbound(x.to_string()))?;
            let p = self.eval_at(&u, &suffix, d)?;
            return Ok(self.b.ensure(RuleTag::Subst, vec![p], stmt));
        }
        if t.is_eps() {
            let e = self.b.numeral(t);
            if env.is_empty() {
                return Ok(e);
            }
            return Ok(self.b.ensure(RuleTag::Eps, vec![e], stmt));
        }
        if let Some((bit, u)) = t.as_succ() {
            let p = self.eval_at(u, env, d - 1)?;
            let w = self.b.stmt(p).value.clone();
            if env.is_empty() && u == &w {
                return Ok(self.b.ensure(RuleTag::SuccN(bit), vec![p], stmt));
            }
            let n = self.b.numeral(&Term::succ(bit, w));
            return Ok(self.b.ensure(RuleTag::Succ(bit), vec![n, p], stmt));
        }
        let Term::App(f, args) = t else {
            unreachable!("star has no value");
        };
        let a: Vec<GNumeral> = args.iter().map(|x| self.sem(x, env)).collect::<Result<_, _>>()?;
        let full_dem = |a: &[GNumeral]| a.iter().map(GNumeral::depth).collect::<Vec<_>>();
        let val = GNumeral::from_term(&stmt.value).expect("numeral value");

        let (rule, mut premises, demands, x_from) = match f.kind() {
            DefKind::ConstN(m) => {
                let e = self.b.numeral(&Term::eps());
                let dem = if self.exact { full_dem(&a) } else { vec![0; a.len()] };
                (RuleTag::ConstFn(*m), vec![e], dem, 0)
            }
            DefKind::Proj { n, i } => {
                let v = self.b.numeral(&stmt.value);
                let mut dem = if self.exact { full_dem(&a) } else { vec![0; a.len()] };
                dem[i - 1] = d;
                (RuleTag::Proj { i: *i, m: *n }, vec![v], dem, 0)
            }
            DefKind::Comp { outer, inner } => {
                let (prem, dem) = self.build_comp(outer, inner, &a, d, &val)?;
                (RuleTag::Comp, prem, dem, 0)
            }
            DefKind::Rec { base, step0, step1 } => {
                return self.build_rec(f, [base, step0, step1], args, env, &a, d, &val, stmt);
            }
            DefKind::Eps | DefKind::Succ(_) => unreachable!("constructors handled above"),
        };
        for k in x_positions(args, x_from) {
            premises.push(self.eval_at(&args[k], env, demands[k])?);
        }
        Ok(self.b.ensure(rule, premises, stmt))
    }

    /// Premises `⟨g(w*),()⟩`, `⟨hⱼ(vʲ),()⟩`; returns them with the demand on each argument.
    fn build_comp(
        &mut self,
        outer: &FunctionDef,
        inner: &[FunctionDef],
        a: &[GNumeral],
        d: usize,
        val: &GNumeral,
    ) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
        let w_full: Vec<GNumeral> = inner.iter().map(|h| partial_unchecked(h, a)).collect();
        let e = self.minimize(&w_full, |ws| &partial_unchecked(outer, ws).truncate(d) == val);
        let wstar = truncate_all(&w_full, &e);
        let mut dem = vec![0; a.len()];
        let mut h_prem = Vec::with_capacity(inner.len());
        for (j, h) in inner.iter().enumerate() {
            let target = &wstar[j];
            let c = self.minimize(a, |vs| &partial_unchecked(h, vs).truncate(e[j]) == target);
            for (k, &ck) in c.iter().enumerate() {
                dem[k] = dem[k].max(ck);
            }
            let vj = truncate_all(a, &c);
            h_prem.push(self.eval_at(&numeric_app(h, &vj), &Development::empty(), e[j])?);
        }
        let p0 = self.eval_at(&numeric_app(outer, &wstar), &Development::empty(), d)?;
        let mut prem = vec![p0];
        prem.extend(h_prem);
        Ok((prem, dem))
    }

    #[allow(clippy::too_many_arguments)]
    fn build_rec(
        &mut self,
        f: &FunctionDef,
        [base, step0, step1]: [&FunctionDef; 3],
        args: &[Term],
        env: &Development,
        a: &[GNumeral],
        d: usize,
        val: &GNumeral,
        stmt: Statement,
    ) -> Result<usize, EvalError> {
        let params = &a[1..];
        let empty = Development::empty();
        let scrut_is_numeral = args[0].is_g_numeral();
        let (rule, mut premises, scrut_dem, param_dem) = match a[0].split_front() {
            None => {
                let c = self.minimize(params, |vs| &partial_unchecked(base, vs).truncate(d) == val);
                let v1 = truncate_all(params, &c);
                let p0 = self.eval_at(&numeric_app(base, &v1), &empty, d)?;
                (RuleTag::RecEps, vec![p0], 1, c)
            }
            Some((bit, v0)) => {
                let step = if bit == Bit::Zero { step0 } else { step1 };
                let mut f_full = vec![v0.clone()];
                f_full.extend_from_slice(params);
                let r_full = partial_unchecked(f, &f_full);
                let mut g_full = vec![v0, r_full.clone()];
                g_full.extend_from_slice(params);

                let cg = self.minimize(&g_full, |xs| &partial_unchecked(step, xs).truncate(d) == val);
                let e = cg[1];
                let target = r_full.truncate(e);
                let cf = self.minimize(&f_full, |xs| partial_unchecked(f, xs).truncate(e) == target);

                let p0 = self.eval_at(&numeric_app(step, &truncate_all(&g_full, &cg)), &empty, d)?;
                let pf = self.eval_at(&numeric_app(f, &truncate_all(&f_full, &cf)), &empty, e)?;
                let dem: Vec<usize> = (0..params.len()).map(|k| cg[2 + k].max(cf[1 + k])).collect();
                let sd = 1usize.saturating_add(cg[0].max(cf[0]));
                if !scrut_is_numeral {
                    let s = self.eval_at(&args[0], env, sd)?;
                    return self.finish_rec(RuleTag::RecSucc(bit), vec![p0, s, pf], args, env, &dem, stmt);
                }
                (RuleTag::RecSucc(bit), vec![p0, pf], sd, dem)
            }
        };
        if !scrut_is_numeral {
            let s = self.eval_at(&args[0], env, scrut_dem)?;
            premises.insert(1, s);
        }
        self.finish_rec(rule, premises, args, env, &param_dem, stmt)
    }

    fn finish_rec(
        &mut self,
        rule: RuleTag,
        mut premises: Vec<usize>,
        args: &[Term],
        env: &Development,
        param_dem: &[usize],
        stmt: Statement,
    ) -> Result<usize, EvalError> {
        for k in x_positions(args, 1) {
            premises.push(self.eval_at(&args[k], env, param_dem[k - 1])?);
        }
        Ok(self.b.ensure(rule, premises, stmt))
    }

    /// Greedy coordinate-wise minimal truncation depths preserving `ok`.
    fn minimize(&self, full: &[GNumeral], ok: impl Fn(&[GNumeral]) -> bool) -> Vec<usize> {
        let mut depth: Vec<usize> = full.iter().map(GNumeral::depth).collect();
        if self.exact {
            return depth;
        }
        let mut cur = full.to_vec();
        for k in 0..full.len() {
            let (mut lo, mut hi) = (0, depth[k]);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                cur[k] = full[k].truncate(mid);
                if ok(&cur) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            depth[k] = lo;
            cur[k] = full[k].truncate(lo);
        }
        depth
    }
}

fn truncate_all(vals: &[GNumeral], depth: &[usize]) -> Vec<GNumeral> {
    vals.iter().zip(depth).map(|(v, &d)| v.truncate(d)).collect()
}

fn numeric_app(f: &FunctionDef, vals: &[GNumeral]) -> Term {
    Term::app(f, vals.iter().map(GNumeral::to_term).collect())
}

fn single(b: DagBuilder, root: usize) -> CompDag {
    b.finish().retain_reachable(&[root])
}

/// The computation of `⟨t, ρ⟩ ↓ v` with exact values throughout.
pub fn exact_eval(t: &Term, env: &Development) -> Result<CompDag, EvalError> {
    if t.contains_star() || env.bindings().iter().any(|b| b.term.contains_star()) {
        return Err(EvalError::StarInInput);
    }
    let mut b = DagBuilder::new();
    let root = Evaluator::exact(&mut b).eval(t, env, Demand::Full)?;
    Ok(single(b, root))
}

/// A computation whose value pins down `demand` head constructors.
pub fn approx_eval(t: &Term, env: &Development, demand: Demand) -> Result<CompDag, EvalError> {
    let mut b = DagBuilder::new();
    let root = Evaluator::approximate(&mut b).eval(t, env, demand)?;
    Ok(single(b, root))
}

/// `⟨v, ρ⟩ ↓ v` for a g-numeral `v`.
pub fn numeral_comp(v: &Term, env: &Development) -> CompDag {
    assert!(v.is_g_numeral(), "numeral_comp needs a g-numeral");
    let mut b = DagBuilder::new();
    let root = numeral_into(&mut b, v, env);
    single(b, root)
}

pub(crate) fn numeral_into(b: &mut DagBuilder, v: &Term, env: &Development) -> usize {
    Evaluator::approximate(b).eval(v, env, Demand::Full).expect("g-numerals have no variables")
}

/// Adds `⟨sᵢ t, ρ⟩ ↓ sᵢ v` after the node `idx` deriving `⟨t, ρ⟩ ↓ v`.
pub(crate) fn extend_succ_at(b: &mut DagBuilder, idx: usize, bit: Bit) -> usize {
    let s = b.stmt(idx).clone();
    let value = Term::succ(bit, s.value.clone());
    let stmt = Statement::new(Term::succ(bit, s.term.clone()), s.env.clone(), value.clone());
    if s.env.is_empty() && s.term == s.value {
        return b.push(RuleTag::SuccN(bit), vec![idx], stmt);
    }
    let n = b.numeral(&value);
    b.push(RuleTag::Succ(bit), vec![n, idx], stmt)
}

/// Extends `σ` by a computation of `⟨sᵢ t, ρ⟩ ↓ sᵢ v` for `s = ⟨t, ρ⟩ ↓ v`.
pub fn extend_succ(dag: &CompDag, s: &Statement, bit: Bit) -> Result<CompDag, EvalError> {
    let idx = dag.find(s).ok_or_else(|| EvalError::MissingStatement(s.to_string()))?;
    let mut b = DagBuilder::from_dag(dag.clone());
    extend_succ_at(&mut b, idx, bit);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::denote;
    use crate::eval::BitString;
    use crate::stdlib::StdLib;

    fn x_eps() -> Development {
        Development::from_pairs([("x", Term::eps())]).unwrap()
    }

    fn value(d: &CompDag) -> Term {
        let c = d.conclusions();
        assert_eq!(c.len(), 1);
        c[0].value.clone()
    }

    #[test]
    fn exact_eps() {
        let d = exact_eval(&Term::eps(), &Development::empty()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.node(0).rule, RuleTag::EpsN);
    }

    #[test]
    fn exact_proj_and_zeroize() {
        let t = Term::apply(&StdLib::proj(2, 1), vec![Term::s0(Term::eps()), Term::eps()]).unwrap();
        let d = exact_eval(&t, &Development::empty()).unwrap();
        assert_eq!(d.validate(), Ok(()));
        assert_eq!(value(&d), Term::s0(Term::eps()));

        let t = Term::apply(&StdLib::zeroize(1), vec![Term::s1(Term::eps())]).unwrap();
        let d = exact_eval(&t, &Development::empty()).unwrap();
        assert_eq!(d.validate(), Ok(()));
        assert_eq!(value(&d), Term::s0(Term::eps()));
        assert!(d.audit_structural().all_pass());
    }

    #[test]
    fn exact_rejects_star_and_unbound() {
        assert_eq!(exact_eval(&Term::s0(Term::Star), &Development::empty()), Err(EvalError::StarInInput));
        assert!(matches!(exact_eval(&Term::var("x"), &Development::empty()), Err(EvalError::Unbound(_))));
    }

    #[test]
    fn numeral_comp_sizes() {
        let v = Term::s1(Term::s0(Term::eps()));
        let d = numeral_comp(&v, &Development::empty());
        assert_eq!(d.len(), 3);
        let d = numeral_comp(&v, &x_eps());
        assert_eq!(d.len(), 6);
        assert_eq!(d.validate(), Ok(()));
        assert_eq!(numeral_comp(&Term::Star, &x_eps()).len(), 1);
    }

    #[test]
    fn extend_succ_counts() {
        let d = numeral_comp(&Term::eps(), &Development::empty());
        let e = extend_succ(&d, &Statement::numeral(Term::eps()), Bit::Zero).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.conclusions(), vec![Statement::numeral(Term::s0(Term::eps()))]);

        let d = numeral_comp(&Term::eps(), &x_eps());
        let s = Statement::new(Term::eps(), x_eps(), Term::eps());
        let e = extend_succ(&d, &s, Bit::One).unwrap();
        assert_eq!(e.len(), d.len() + 2);
        assert_eq!(e.validate(), Ok(()));
        assert_eq!(e.conclusions(), vec![Statement::new(Term::s1(Term::eps()), x_eps(), Term::s1(Term::eps()))]);
    }

    #[test]
    fn demand_zero_is_star() {
        let t = Term::apply(&StdLib::zeroize(1), vec![Term::s1(Term::eps())]).unwrap();
        let d = approx_eval(&t, &Development::empty(), Demand::Depth(0)).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.node(0).rule, RuleTag::Star);
    }

    #[test]
    fn demand_one_on_zeroize() {
        let t = Term::apply(&StdLib::zeroize(1), vec![Term::s1(Term::eps())]).unwrap();
        let d = approx_eval(&t, &Development::empty(), Demand::Depth(1)).unwrap();
        assert_eq!(d.validate(), Ok(()));
        assert_eq!(value(&d), Term::s0(Term::Star));
        assert!(d.audit_structural().all_pass());
    }

    #[test]
    fn discard_after_zeroize_is_constant_size() {
        let mut sizes = Vec::new();
        for l in [1usize, 4, 16, 40] {
            let n = BitString(vec![Bit::One; l]).to_term();
            let g = Term::apply(&StdLib::zeroize(2), vec![Term::s1(n)]).unwrap();
            let t = Term::apply(&StdLib::discard(), vec![g]).unwrap();
            let d = approx_eval(&t, &Development::empty(), Demand::Full).unwrap();
            assert_eq!(d.validate(), Ok(()));
            assert_eq!(value(&d), Term::eps());
            sizes.push(d.len());
        }
        assert!(sizes.windows(2).all(|w| w[0] == w[1]), "{sizes:?}");
    }

    #[test]
    fn full_demand_matches_denotation() {
        let t = Term::apply(&StdLib::concat(), vec![Term::s1(Term::eps()), Term::var("x")]).unwrap();
        let env = Development::from_pairs([("x", Term::s0(Term::s1(Term::eps())))]).unwrap();
        let d = approx_eval(&t, &env, Demand::Full).unwrap();
        assert_eq!(d.validate(), Ok(()));
        let exact = denote(&StdLib::concat(), &["1".parse().unwrap(), "01".parse().unwrap()]).unwrap();
        assert_eq!(value(&d), exact.to_term());
    }
}

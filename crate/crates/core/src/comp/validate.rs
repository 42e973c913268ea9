use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{CompDag, Node, RuleTag, Statement};
use crate::def::{Bit, DefKind, FunctionDef};
use crate::term::{Development, Term};

/// Which part of a rule schema failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    EmptyComputation,
    PremiseOrder,
    ValueNotNumeral,
    PremiseCount,
    MainTerm,
    Environment,
    PremiseStatement,
    Value,
    Approximation,
    SideCondition,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::EmptyComputation => "empty-computation",
            Condition::PremiseOrder => "premise-order",
            Condition::ValueNotNumeral => "value-not-numeral",
            Condition::PremiseCount => "premise-count",
            Condition::MainTerm => "main-term",
            Condition::Environment => "environment",
            Condition::PremiseStatement => "premise-statement",
            Condition::Value => "value",
            Condition::Approximation => "approximation",
            Condition::SideCondition => "side-condition",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("node {node}: {condition}: {detail}")]
pub struct Violation {
    pub node: usize,
    pub condition: Condition,
    pub detail: String,
}

type Check = Result<(), (Condition, String)>;

fn fail<T>(c: Condition, detail: impl Into<String>) -> Result<T, (Condition, String)> {
    Err((c, detail.into()))
}

fn ensure(ok: bool, c: Condition, detail: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err((c, detail()))
    }
}

impl CompDag {
    /// Checks that every node instantiates its rule schema.
    pub fn validate(&self) -> Result<(), Violation> {
        if self.is_empty() {
            return Err(Violation {
                node: 0,
                condition: Condition::EmptyComputation,
                detail: "a computation needs at least one node".into(),
            });
        }
        for (i, node) in self.nodes().iter().enumerate() {
            self.check_node(i, node).map_err(|(condition, detail)| Violation {
                node: i,
                condition,
                detail: format!("[{}] {detail}", node.rule),
            })?;
        }
        Ok(())
    }

    fn check_node(&self, i: usize, node: &Node) -> Check {
        if let Some(&p) = node.premises.iter().find(|&&p| p >= i) {
            return fail(Condition::PremiseOrder, format!("premise {p} does not precede node {i}"));
        }
        ensure(node.stmt.value.is_g_numeral(), Condition::ValueNotNumeral, || {
            format!("value {} is not a g-numeral", node.stmt.value)
        })?;
        let prem: Vec<&Statement> = node.premises.iter().map(|&p| &self.node(p).stmt).collect();
        check_rule(node.rule, &node.stmt, &prem)
    }
}

/// The rule schema check for one inference, independent of any DAG.
pub(crate) fn check_rule(rule: RuleTag, st: &Statement, prem: &[&Statement]) -> Check {
    match rule {
        RuleTag::Subst => check_subst(st, prem),
        RuleTag::Star => {
            count(prem, 0)?;
            ensure(st.value.is_star(), Condition::Value, || "star rule must yield *".into())
        }
        RuleTag::Eps => {
            ensure(st.term.is_eps(), Condition::MainTerm, || "main term must be eps".into())?;
            ensure(!st.env.is_empty(), Condition::Environment, || "environment must be nonempty".into())?;
            ensure(st.value.is_eps(), Condition::Value, || "value must be eps".into())?;
            count(prem, 1)?;
            numeral_premise(prem[0], &Term::eps())
        }
        RuleTag::EpsN => {
            ensure(st.term.is_eps(), Condition::MainTerm, || "main term must be eps".into())?;
            ensure(st.env.is_empty(), Condition::Environment, || "environment must be empty".into())?;
            ensure(st.value.is_eps(), Condition::Value, || "value must be eps".into())?;
            count(prem, 0)
        }
        RuleTag::Succ(b) => check_succ(b, st, prem),
        RuleTag::SuccN(b) => {
            let Some((tb, inner)) = st.term.as_succ() else {
                return fail(Condition::MainTerm, "main term must be a successor");
            };
            ensure(tb == b, Condition::MainTerm, || format!("main term is not s{b}"))?;
            ensure(inner.is_g_numeral(), Condition::MainTerm, || "argument must be a g-numeral".into())?;
            ensure(st.env.is_empty(), Condition::Environment, || "environment must be empty".into())?;
            ensure(st.value == st.term, Condition::Value, || "value must equal the numeral".into())?;
            count(prem, 1)?;
            numeral_premise(prem[0], inner)
        }
        RuleTag::ConstFn(m) => {
            let args = head_args(st, |k| matches!(k, DefKind::ConstN(n) if *n == m))?;
            ensure(st.value.is_eps(), Condition::Value, || "value must be eps".into())?;
            let x = x_positions(args, 0);
            count(prem, 1 + x.len())?;
            numeral_premise(prem[0], &Term::eps())?;
            x_premises(args, &x, &st.env, &prem[1..]).map(|_| ())
        }
        RuleTag::Proj { i, m } => {
            let args = head_args(st, |k| matches!(k, DefKind::Proj { n, i: j } if *n == m && *j == i))?;
            let x = x_positions(args, 0);
            count(prem, 1 + x.len())?;
            numeral_premise(prem[0], &st.value)?;
            let vals = x_premises(args, &x, &st.env, &prem[1..])?;
            ensure(vals[i - 1].approx_leq(&st.value), Condition::Approximation, || {
                format!("selected argument value {} is not approximated by {}", vals[i - 1], st.value)
            })
        }
        RuleTag::Comp => check_comp(st, prem),
        RuleTag::RecEps => check_rec(None, st, prem),
        RuleTag::RecSucc(b) => check_rec(Some(b), st, prem),
    }
}

fn count(prem: &[&Statement], n: usize) -> Check {
    ensure(prem.len() == n, Condition::PremiseCount, || {
        format!("expected {n} premises, found {}", prem.len())
    })
}

/// The premise must be exactly `⟨v, ()⟩ ↓ v`.
fn numeral_premise(p: &Statement, v: &Term) -> Check {
    ensure(
        &p.term == v && p.env.is_empty() && &p.value == v,
        Condition::PremiseStatement,
        || format!("expected premise <{v}, ()> => {v}, found {p}"),
    )
}

fn head_args(st: &Statement, want: impl Fn(&DefKind) -> bool) -> Result<&[Term], (Condition, String)> {
    match &st.term {
        Term::App(f, args) if want(f.kind()) => Ok(args),
        _ => fail(Condition::MainTerm, format!("main term {} does not fit the rule", st.term)),
    }
}

/// Positions (0-based, starting at `from`) of arguments that are not g-numerals.
pub(crate) fn x_positions(args: &[Term], from: usize) -> Vec<usize> {
    (from..args.len()).filter(|&k| !args[k].is_g_numeral()).collect()
}

/// Checks the `(⟨tᵢ, ρ⟩ ↓ vᵢ)_{i∈X}` block and returns the value standing in
/// for each argument: the premise value for `i ∈ X`, the argument itself otherwise.
fn x_premises(args: &[Term], x: &[usize], env: &Development, prem: &[&Statement]) -> Result<Vec<Term>, (Condition, String)> {
    let mut vals: Vec<Term> = args.to_vec();
    for (&k, p) in x.iter().zip(prem) {
        ensure(p.term == args[k] && &p.env == env, Condition::PremiseStatement, || {
            format!("expected premise for argument {} under the same environment, found {p}", k + 1)
        })?;
        vals[k] = p.value.clone();
    }
    Ok(vals)
}

/// Premise `⟨g(w̄), ()⟩ ↓ _` with g-numeral arguments; returns `w̄`.
fn numeric_app<'a>(p: &'a Statement, g: &FunctionDef) -> Result<&'a [Term], (Condition, String)> {
    match &p.term {
        Term::App(f, args) if f == g && args.iter().all(Term::is_g_numeral) && p.env.is_empty() => Ok(args),
        _ => fail(Condition::PremiseStatement, format!("expected purely numerical premise for {g}, found {p}")),
    }
}

fn approx_all(vals: &[Term], approx: &[Term], what: &str) -> Check {
    for (k, (v, a)) in vals.iter().zip(approx).enumerate() {
        ensure(v.approx_leq(a), Condition::Approximation, || {
            format!("{what} {}: {a} does not approximate {v}", k + 1)
        })?;
    }
    Ok(())
}

fn check_subst(st: &Statement, prem: &[&Statement]) -> Check {
    let Some(x) = st.term.as_var() else {
        return fail(Condition::MainTerm, "main term must be a variable");
    };
    let Some((t, suffix)) = st.env.lookup(x) else {
        return fail(Condition::Environment, format!("variable {x} is not bound"));
    };
    count(prem, 1)?;
    let p = prem[0];
    ensure(p.term == t && p.env == suffix, Condition::PremiseStatement, || {
        format!("expected premise for <{t}, {suffix}>, found {p}")
    })?;
    ensure(p.value == st.value, Condition::Value, || "value must equal the premise value".into())
}

fn check_succ(b: Bit, st: &Statement, prem: &[&Statement]) -> Check {
    let Some((tb, t)) = st.term.as_succ() else {
        return fail(Condition::MainTerm, "main term must be a successor");
    };
    ensure(tb == b, Condition::MainTerm, || format!("main term is not s{b}"))?;
    let Some((vb, vstar)) = st.value.as_succ() else {
        return fail(Condition::Value, format!("value must be s{b} of a g-numeral"));
    };
    ensure(vb == b, Condition::Value, || format!("value is not s{b}"))?;
    count(prem, 2)?;
    numeral_premise(prem[0], &st.value)?;
    let p = prem[1];
    ensure(&p.term == t && p.env == st.env, Condition::PremiseStatement, || {
        format!("expected premise for <{t}, env>, found {p}")
    })?;
    ensure(p.value.approx_leq(vstar), Condition::Approximation, || {
        format!("{vstar} does not approximate {}", p.value)
    })?;
    ensure(t != vstar || !st.env.is_empty(), Condition::SideCondition, || {
        "argument equals v* under the empty environment".into()
    })
}

fn check_comp(st: &Statement, prem: &[&Statement]) -> Check {
    let (outer, inner, args) = match &st.term {
        Term::App(f, args) => match f.kind() {
            DefKind::Comp { outer, inner } => (outer, inner, args),
            _ => return fail(Condition::MainTerm, "main term is not a composition"),
        },
        _ => return fail(Condition::MainTerm, "main term is not a composition"),
    };
    let m = inner.len();
    let x = x_positions(args, 0);
    count(prem, 1 + m + x.len())?;
    let wstar = numeric_app(prem[0], outer)?;
    ensure(prem[0].value == st.value, Condition::Value, || "value must equal the outer premise value".into())?;
    let vals = x_premises(args, &x, &st.env, &prem[1 + m..])?;
    for (j, h) in inner.iter().enumerate() {
        let p = prem[1 + j];
        let vj = numeric_app(p, h)?;
        approx_all(&vals, vj, "inner argument")?;
        ensure(p.value.approx_leq(&wstar[j]), Condition::Approximation, || {
            format!("outer argument {} does not approximate {}", wstar[j], p.value)
        })?;
    }
    Ok(())
}

fn check_rec(succ: Option<Bit>, st: &Statement, prem: &[&Statement]) -> Check {
    let (f, base, step0, step1, args) = match &st.term {
        Term::App(f, args) => match f.kind() {
            DefKind::Rec { base, step0, step1 } => (f, base, step0, step1, args),
            _ => return fail(Condition::MainTerm, "main term is not a recursion"),
        },
        _ => return fail(Condition::MainTerm, "main term is not a recursion"),
    };
    let scrut = &args[0];
    let scrut_premise = !scrut.is_g_numeral();
    let x = x_positions(args, 1);
    let fixed = match succ {
        None => 1,
        Some(_) => 2,
    };
    count(prem, fixed + usize::from(scrut_premise) + x.len())?;
    let mut k = 1;

    // Scrutinee value: ε, or sᵢ v₀.
    let scrut_value = if scrut_premise {
        let p = prem[k];
        k += 1;
        ensure(&p.term == scrut && p.env == st.env, Condition::PremiseStatement, || {
            format!("expected scrutinee premise for {scrut}, found {p}")
        })?;
        p.value.clone()
    } else {
        scrut.clone()
    };
    let rec_call = if succ.is_some() {
        let p = prem[k];
        k += 1;
        Some(p)
    } else {
        None
    };
    let vals = x_premises(args, &x, &st.env, &prem[k..])?;
    let params = &vals[1..];

    ensure(prem[0].value == st.value, Condition::Value, || "value must equal the step premise value".into())?;
    match succ {
        None => {
            ensure(scrut_value.is_eps(), Condition::SideCondition, || {
                format!("scrutinee value {scrut_value} is not eps")
            })?;
            let v1 = numeric_app(prem[0], base)?;
            approx_all(params, v1, "parameter")
        }
        Some(b) => {
            let Some((sb, v0)) = scrut_value.as_succ() else {
                return fail(Condition::SideCondition, format!("scrutinee value {scrut_value} is not s{b} v"));
            };
            ensure(sb == b, Condition::SideCondition, || format!("scrutinee value is not s{b} v"))?;
            let step = if b == Bit::Zero { step0 } else { step1 };
            let g_args = numeric_app(prem[0], step)?;
            let call = rec_call.expect("recursive premise");
            let f_args = numeric_app(call, f)?;
            ensure(v0.approx_leq(&g_args[0]) && v0.approx_leq(&f_args[0]), Condition::Approximation, || {
                format!("recursion argument does not approximate {v0}")
            })?;
            ensure(call.value.approx_leq(&g_args[1]), Condition::Approximation, || {
                format!("{} does not approximate the recursive value {}", g_args[1], call.value)
            })?;
            approx_all(params, &g_args[2..], "parameter")?;
            approx_all(params, &f_args[1..], "parameter")
        }
    }
}

use super::*;
use crate::comp::RuleTag;
use crate::def::Bit;
use crate::eval::{approx_eval, exact_eval, Demand};
use crate::proof::axiom_instance;
use crate::stdlib::StdLib;

fn eps_dag() -> CompDag {
    exact_eval(&Term::eps(), &Development::empty()).unwrap()
}

fn concl(d: &CompDag) -> Statement {
    let c = d.conclusions();
    assert_eq!(c.len(), 1, "{c:?}");
    c[0].clone()
}

fn ok(d: &CompDag) {
    d.validate().unwrap_or_else(|v| panic!("{v:?}"));
    assert!(d.audit_structural().all_pass(), "{:?}", d.audit_structural());
}

fn app(f: &FunctionDef, args: Vec<Term>) -> Term {
    Term::apply(f, args).unwrap()
}

#[test]
fn subst_in_var_target() {
    let d = eps_dag();
    let s = concl(&d);
    let (out, ledger) = subst_in(&d, &[(s, Term::var("x"))], &Term::eps(), "x", Budget::default(), Mode::Strict).unwrap();
    ok(&out);
    assert_eq!(out.len(), 2);
    let c = concl(&out);
    assert_eq!(c.term, Term::var("x"));
    assert_eq!(c.value, Term::eps());
    assert!(ledger.all_pass());
}

#[test]
fn subst_in_empty_targets_is_identity() {
    let d = eps_dag();
    let (out, _) = subst_in(&d, &[], &Term::eps(), "x", Budget::default(), Mode::Strict).unwrap();
    assert_eq!(out, d);
}

#[test]
fn subst_in_rejects_used_variable() {
    let env = Development::from_pairs([("x", Term::eps())]).unwrap();
    let d = exact_eval(&Term::var("x"), &env).unwrap();
    let s = concl(&d);
    let r = subst_in(&d, &[(s, Term::var("x"))], &Term::eps(), "x", Budget::default(), Mode::Strict);
    assert!(matches!(r, Err(TransformError::NotFresh(_))));
}

#[test]
fn subst_out_promotes_premise() {
    let d = eps_dag();
    let s = concl(&d);
    let (mid, _) = subst_in(&d, &[(s.clone(), Term::var("x"))], &Term::eps(), "x", Budget::default(), Mode::Strict).unwrap();
    let (out, ledger) = subst_out(&mid, &[concl(&mid)], &Term::eps(), "x", Budget::default(), Mode::Strict).unwrap();
    ok(&out);
    assert_eq!(concl(&out), s);
    assert_eq!(out.len(), 1);
    assert!(ledger.all_pass());
}

#[test]
fn subst_round_trip_on_application() {
    let cat = StdLib::concat();
    let u = Term::s1(Term::s0(Term::eps()));
    let t = app(&cat, vec![Term::var("x"), Term::s1(Term::var("x"))]);
    let inst = t.substitute(&u, "x");
    let d = exact_eval(&inst, &Development::empty()).unwrap();
    let s = concl(&d);
    let (mid, l1) = subst_in(&d, &[(s.clone(), t)], &u, "x", Budget::default(), Mode::Strict).unwrap();
    ok(&mid);
    assert!(l1.all_pass(), "{l1}");
    let m = concl(&mid);
    assert_eq!(m.value, s.value);
    let (back, l2) = subst_out(&mid, &[m], &u, "x", Budget::default(), Mode::Strict).unwrap();
    ok(&back);
    assert!(l2.all_pass(), "{l2}");
    assert_eq!(concl(&back), s);
}

#[test]
fn subst_out_star_target() {
    let env = Development::from_pairs([("x", Term::eps())]).unwrap();
    let t = app(&StdLib::zeroize(1), vec![Term::var("x")]);
    let d = approx_eval(&t, &env, Demand::Depth(0)).unwrap();
    assert_eq!(concl(&d).value, Term::Star);
    let (out, _) = subst_out(&d, &[concl(&d)], &Term::eps(), "x", Budget::default(), Mode::Strict).unwrap();
    ok(&out);
    let c = concl(&out);
    assert_eq!(c.value, Term::Star);
    assert!(c.env.is_empty());
}

#[test]
fn unfold_const() {
    let f = StdLib::eps_n(1);
    let env = Development::from_pairs([("y", Term::eps())]).unwrap();
    let t = app(&f, vec![Term::s0(Term::eps())]);
    let d = exact_eval(&t, &env).unwrap();
    let eq = axiom_instance(&f, AxiomCase::ConstN, None, &[Term::s0(Term::eps())]).unwrap();
    let (out, ledger) = unfold_axiom(&d, &concl(&d), &f, AxiomCase::ConstN, &eq).unwrap();
    ok(&out);
    let c = concl(&out);
    assert_eq!(c.term, Term::eps());
    assert_eq!(c.value, Term::eps());
    assert_eq!(c.env, env);
    assert!(ledger.all_pass());
}

#[test]
fn unfold_proj_tightens_value() {
    let f = StdLib::proj(2, 1);
    let env = Development::from_pairs([("y", Term::s1(Term::s1(Term::eps())))]).unwrap();
    let args = vec![Term::var("y"), Term::eps()];
    let t = app(&f, args.clone());
    let d = approx_eval(&t, &env, Demand::Depth(1)).unwrap();
    let before = concl(&d);
    let eq = axiom_instance(&f, AxiomCase::Proj, None, &args).unwrap();
    let (out, _) = unfold_axiom(&d, &before, &f, AxiomCase::Proj, &eq).unwrap();
    ok(&out);
    let c = concl(&out);
    assert_eq!(c.term, Term::var("y"));
    assert!(c.value.approx_leq(&before.value));
}

#[test]
fn unfold_rec_succ_adds_two() {
    let f = StdLib::concat();
    let env = Development::from_pairs([("y", Term::s0(Term::eps()))]).unwrap();
    let t0 = Term::var("y");
    let args = vec![Term::s1(t0.clone()), Term::s1(Term::eps())];
    let t = app(&f, args.clone());
    let d = exact_eval(&t, &env).unwrap();
    let before = concl(&d);
    let eq = axiom_instance(&f, AxiomCase::Succ(Bit::One), Some(&t0), &args[1..]).unwrap();
    let (out, ledger) = unfold_axiom(&d, &before, &f, AxiomCase::Succ(Bit::One), &eq).unwrap();
    ok(&out);
    let c = concl(&out);
    assert_eq!(c.term, eq.rhs);
    assert_eq!(c.value, before.value);
    assert!(ledger.entries[0].actual_nodes <= d.len() + 2, "{ledger}");
}

#[test]
fn fold_const_uses_star_premises() {
    let f = StdLib::eps_n(2);
    let env = Development::from_pairs([("u", Term::eps()), ("w", Term::eps())]).unwrap();
    let d = exact_eval(&Term::eps(), &env).unwrap();
    let args = vec![Term::var("u"), Term::var("w")];
    let eq = axiom_instance(&f, AxiomCase::ConstN, None, &args).unwrap();
    let (out, ledger) = fold_axiom(&d, &concl(&d), &f, AxiomCase::ConstN, &eq).unwrap();
    ok(&out);
    let c = concl(&out);
    assert_eq!(c.term, app(&f, args));
    assert_eq!(c.value, Term::eps());
    let root = out.conclusion_indices()[0];
    let stars = out.node(root).premises.iter().filter(|&&p| out.node(p).rule == RuleTag::Star).count();
    assert_eq!(stars, 2);
    assert!(ledger.all_pass());
}

#[test]
fn fold_proj() {
    let f = StdLib::proj(3, 2);
    let env = Development::from_pairs([("y", Term::s0(Term::eps()))]).unwrap();
    let d = exact_eval(&Term::var("y"), &env).unwrap();
    let args = vec![Term::eps(), Term::var("y"), Term::var("y")];
    let eq = axiom_instance(&f, AxiomCase::Proj, None, &args).unwrap();
    let (out, ledger) = fold_axiom(&d, &concl(&d), &f, AxiomCase::Proj, &eq).unwrap();
    ok(&out);
    assert_eq!(concl(&out).term, eq.lhs);
    assert!(ledger.all_pass(), "{ledger}");
}

#[test]
fn unfold_fold_round_trip_rec() {
    let f = StdLib::concat();
    let env = Development::from_pairs([("y", Term::s0(Term::eps()))]).unwrap();
    let t0 = Term::var("y");
    let args = vec![Term::s0(t0.clone()), Term::var("y")];
    let d = exact_eval(&app(&f, args.clone()), &env).unwrap();
    let before = concl(&d);
    let eq = axiom_instance(&f, AxiomCase::Succ(Bit::Zero), Some(&t0), &args[1..]).unwrap();
    let (mid, _) = unfold_axiom(&d, &before, &f, AxiomCase::Succ(Bit::Zero), &eq).unwrap();
    ok(&mid);
    let (back, ledger) = fold_axiom(&mid, &concl(&mid), &f, AxiomCase::Succ(Bit::Zero), &eq).unwrap();
    ok(&back);
    let c = concl(&back);
    assert_eq!(c.term, before.term);
    assert!(c.value.approx_leq(&before.value));
    assert!(ledger.all_pass(), "{ledger}");
}

#[test]
fn identity_proof_leaves_dag_unchanged() {
    let d = eps_dag();
    let p = ProofTree::refl(Term::eps());
    let (out, ledger) = transform_along_proof(&d, &concl(&d), &p, Direction::Forward, Budget::default(), Mode::Strict).unwrap();
    assert_eq!(out, d);
    assert!(ledger.all_pass());
}

#[test]
fn proof_with_substitution_and_congruence() {
    let f = StdLib::eps_n(1);
    let g = StdLib::identity();
    let schema = axiom_instance(&g, AxiomCase::Proj, None, &[Term::var("z")]).unwrap();
    let ax = ProofTree::axiom(&g, AxiomCase::Proj, schema);
    let inst = ProofTree::subst(ax, Term::s1(Term::eps()), "z");
    let p = ProofTree::cong(&f, vec![inst]);
    let eq = p.conclusion().unwrap();
    let env = Development::from_pairs([("q", Term::eps())]).unwrap();
    let d = exact_eval(&eq.lhs, &env).unwrap();
    let (out, ledger) = transform_along_proof(&d, &concl(&d), &p, Direction::Forward, Budget::default(), Mode::Strict).unwrap();
    ok(&out);
    assert_eq!(concl(&out).term, eq.rhs);
    assert!(ledger.all_pass(), "{ledger}");
    let (back, ledger) = transform_along_proof(&out, &concl(&out), &p, Direction::Backward, Budget::default(), Mode::Strict).unwrap();
    ok(&back);
    assert_eq!(concl(&back).term, eq.lhs);
    assert!(ledger.all_pass(), "{ledger}");
}

#[test]
fn strict_budget_rejects() {
    let d = eps_dag();
    let p = ProofTree::refl(Term::eps());
    let tiny = Budget { u: 1, b: 0, v: 0, c: 8 };
    let r = transform_along_proof(&d, &concl(&d), &p, Direction::Forward, tiny, Mode::Strict);
    assert!(matches!(r, Err(TransformError::Budget(_))));
    let (_, ledger) = transform_along_proof(&d, &concl(&d), &p, Direction::Forward, tiny, Mode::Permissive).unwrap();
    assert!(!ledger.warnings.is_empty());
}

#[test]
fn untouched_conclusions_are_kept() {
    let mut b = crate::comp::DagBuilder::new();
    b.numeral(&Term::eps());
    b.numeral(&Term::s0(Term::eps()));
    let d = b.finish();
    assert_eq!(d.conclusions().len(), 1);
    let d = d.make_conclusion(0).unwrap();
    let t = Statement::numeral(Term::s0(Term::eps()));
    let p = ProofTree::refl(t.term.clone());
    let (out, _) = transform_along_proof(&d, &t, &p, Direction::Forward, Budget::default(), Mode::Strict).unwrap();
    let cs = out.conclusions();
    assert!(cs.contains(&Statement::numeral(Term::eps())));
    assert!(cs.contains(&t));
}

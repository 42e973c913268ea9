use super::*;
use crate::beckmann::Instance;
use crate::eval::{approx_eval, exact_eval, Demand};

#[test]
fn parse_eps() {
    assert_eq!(parse_term("eps", &Defs::empty()).unwrap(), Term::eps());
}

#[test]
fn parse_projection_application() {
    let t = parse_term("(app (proj 2 1) (s0 eps) eps)", &Defs::empty()).unwrap();
    let want = Term::apply(&StdLib::proj(2, 1), vec![Term::s0(Term::eps()), Term::eps()]).unwrap();
    assert_eq!(t, want);
}

#[test]
fn malformed_successor_is_located() {
    let e = parse_term("\n  (s0)", &Defs::empty()).unwrap_err();
    assert_eq!(e.pos, Pos { line: 2, col: 3 });
}

#[test]
fn unclosed_and_stray_parens() {
    assert!(read_all("(a (b)").is_err());
    let e = read_all("a )").unwrap_err();
    assert_eq!(e.pos, Pos { line: 1, col: 3 });
}

#[test]
fn unknown_name_is_reported() {
    let e = parse_term("(app (named nope) eps)", &Defs::with_stdlib()).unwrap_err();
    assert!(e.message.contains("nope"));
}

#[test]
fn arity_mismatch_is_reported() {
    assert!(parse_term("(app (proj 2 1) eps)", &Defs::empty()).is_err());
}

#[test]
fn named_and_defs_file() {
    let src = "; helpers\n(def two (eps-n 2))\n(def drop (rec eps (named two) (named two)))\n";
    let defs = parse_defs(src, &Defs::empty()).unwrap();
    assert_eq!(defs.get("drop"), Some(&StdLib::discard()));
    let again = parse_defs(&emit_defs(&defs), &Defs::empty()).unwrap();
    assert_eq!(again, defs);
}

#[test]
fn env_round_trip() {
    let defs = Defs::with_stdlib();
    let e = parse_env("(env (bind x (s1 eps)) (bind y (app (named tail) (var x))))", &defs).unwrap();
    assert_eq!(parse_env(&emit_env(&e), &defs).unwrap(), e);
}

#[test]
fn comp_round_trip() {
    let defs = Defs::with_stdlib();
    let t = parse_term("(app (named concat) (s1 (var x)) (s0 eps))", &defs).unwrap();
    let env = parse_env("(env (bind x (s0 eps)))", &defs).unwrap();
    for d in [exact_eval(&t, &env).unwrap(), approx_eval(&t, &env, Demand::Depth(2)).unwrap()] {
        let s = emit_comp(&d);
        assert_eq!(parse_comp(&s, &defs).unwrap(), d);
    }
}

#[test]
fn comp_index_must_be_sequential() {
    let e = parse_comp("(comp (node 1 (rule eps-n) (prem) (stmt eps (env) eps)))", &Defs::empty()).unwrap_err();
    assert!(e.message.contains("index"));
}

#[test]
fn proof_round_trip() {
    let p = Instance::new(2, 3).proof();
    let s = emit_proof(&p);
    let q = parse_proof(&s, &Defs::empty()).unwrap();
    assert_eq!(q, p);
    q.check().unwrap();
}

#[test]
fn proof_forms() {
    let src = "(proof (substp (sym (axiom (proj 1 1) proj (eq (app (proj 1 1) (var z)) (var z)))) (s1 eps) z))";
    let p = parse_proof(src, &Defs::empty()).unwrap();
    assert_eq!(parse_proof(&emit_proof(&p), &Defs::empty()).unwrap(), p);
    let eq = p.conclusion().unwrap();
    assert_eq!(eq.lhs, Term::s1(Term::eps()));
}

//! One line per acceptance criterion; exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use rand::Rng;

use pvw_core::beckmann::{self, Instance};
use pvw_core::comp::{CompDag, RuleTag, Statement};
use pvw_core::corpus::{self, axiom_cases, library_symbols, Gen};
use pvw_core::eval::{denote_term, exact_eval, extend_succ, numeral_comp, BitString};
use pvw_core::proof::{axiom_instance, AxiomCase};
use pvw_core::syntax::{self, Defs};
use pvw_core::term::{Development, Term};
use pvw_core::transform::{
    fold_axiom, subst_in, subst_out, transform_along_proof, unfold_axiom, Budget, Direction, Mode,
};

const SEED: u64 = 0x5eed;
const C: u64 = 8;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

/// Every computation seen by any suite, for the global checks.
#[derive(Default)]
struct Seen {
    dags: Vec<CompDag>,
}

impl Seen {
    fn add(&mut self, d: &CompDag) {
        self.dags.push(d.clone());
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn files(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

fn fixture_defs() -> Defs {
    let src = fs::read_to_string(fixtures().join("defs/extra.defs")).expect("defs fixture");
    syntax::parse_defs(&src, &Defs::with_stdlib()).expect("defs fixture parses")
}

fn healthy(d: &CompDag) -> bool {
    d.validate().is_ok() && d.audit_structural().all_pass()
}

fn rule_coverage(seen: &mut Seen) -> Outcome {
    let defs = fixture_defs();
    let paths = files(&fixtures().join("comp"), "comp");
    let mut dags = Vec::new();
    let mut bad = Vec::new();
    let mut tags: BTreeMap<&'static str, usize> = RuleTag::KINDS.iter().map(|k| (*k, 0)).collect();
    for p in &paths {
        let d = syntax::parse_comp(&fs::read_to_string(p).expect("fixture"), &defs).expect("fixture parses");
        if !healthy(&d) {
            bad.push(p.file_name().expect("name").to_string_lossy().to_string());
        }
        for n in d.nodes() {
            *tags.entry(n.rule.kind_name()).or_default() += 1;
        }
        seen.add(&d);
        dags.push(d);
    }
    let thin: Vec<_> = tags.iter().filter(|(_, &c)| c < 2).map(|(k, _)| *k).collect();
    let muts = corpus::mutation_suite(&dags, 600, SEED);
    let accepted: Vec<_> = muts.iter().filter(|m| m.dag.validate().is_ok()).collect();
    let pass = paths.len() >= 25 && bad.is_empty() && thin.is_empty() && muts.len() >= 500 && accepted.is_empty();
    Outcome::new(
        pass,
        format!(
            "{} fixtures, invalid {:?}, under-covered tags {:?}, {} mutations, {} falsely accepted",
            paths.len(),
            bad,
            thin,
            muts.len(),
            accepted.len()
        ),
    )
}

fn oracle(seen: &mut Seen) -> Outcome {
    let mut g = Gen::new(SEED);
    let mut mismatches = 0;
    let mut max_depth = 0;
    for _ in 0..1000 {
        let t = g.closed_term(6);
        max_depth = max_depth.max(t.depth());
        let d = exact_eval(&t, &Development::empty()).expect("closed terms evaluate");
        let got = d.conclusions()[0].value.clone();
        let want = denote_term(&t, &Development::empty()).expect("closed terms denote");
        if BitString::from_term(&got).as_ref() != Some(&want) {
            mismatches += 1;
        }
        seen.add(&d);
    }
    Outcome::new(mismatches == 0, format!("1000 closed terms (max depth {max_depth}), {mismatches} mismatches"))
}

fn numeral_bounds(seen: &mut Seen) -> Outcome {
    let mut g = Gen::new(SEED ^ 4);
    let mut bad = 0;
    let env = Development::from_pairs([("x", Term::eps())]).expect("env");
    for l in 0..24 {
        let v = (0..l).fold(Term::eps(), |t, _| {
            let b = g.bit();
            Term::succ(b, t)
        });
        let open = numeral_comp(&v, &env);
        let closed = numeral_comp(&v, &Development::empty());
        bad += usize::from(open.len() != 2 * l + 2 || !healthy(&open));
        bad += usize::from(closed.len() != l + 1 || !healthy(&closed));
        seen.add(&open);
        seen.add(&closed);
    }
    let (mut plain, mut starred, mut plain_bad, mut star_bad) = (0, 0, 0, 0);
    for _ in 0..200 {
        let vars = ["y"];
        let env = g.env(&vars);
        let t = g.term(3, &env, &vars);
        let (d, st) = g.computation(&[t], &env);
        let b = g.bit();
        let e = extend_succ(&d, &st[0], b).expect("statement present");
        let over = e.len() > d.len() + 2 || !healthy(&e);
        if st[0].value.is_star() {
            starred += 1;
            star_bad += usize::from(over);
        } else {
            plain += 1;
            plain_bad += usize::from(over);
        }
        seen.add(&e);
    }
    Outcome::new(
        bad == 0 && plain_bad == 0 && star_bad == 0,
        format!(
            "numeral lengths 0..24 in both environments: {bad} violations; successor extensions: \
             {plain_bad} of {plain} over +2 for *-free values, {star_bad} of {starred} over +2 for value * \
             (a fresh <*, ()> => * premise is needed, so these take +3)"
        ),
    )
}

fn substitution(seen: &mut Seen) -> Outcome {
    let mut g = Gen::new(SEED ^ 5);
    let (mut n_in, mut n_out, mut bad) = (0, 0, Vec::new());
    let x = "x";
    while n_in < 500 || n_out < 500 {
        let rho = g.env(&["y"]);
        let u = g.term(3, &rho, &["y"]);
        let inner = rho.prepend(x, u.clone()).expect("x is fresh");
        let count = g.rng().gen_range(1..=2);
        let ts: Vec<Term> = (0..count).map(|_| g.term(4, &inner, &["x", "y"])).collect();
        if !ts.iter().all(|t| t.has_free(x)) {
            continue;
        }
        let claim: usize = ts.iter().map(|t| t.substitute(&u, x).size()).sum();

        if n_in < 500 {
            let inst: Vec<Term> = ts.iter().map(|t| t.substitute(&u, x)).collect();
            let (d, st) = g.computation(&inst, &rho);
            let targets: Vec<(Statement, Term)> = st.iter().cloned().zip(ts.iter().cloned()).collect();
            match subst_in(&d, &targets, &u, x, Budget::default(), Mode::Permissive) {
                Ok((out, ledger)) => {
                    let m0 = d.metrics().m;
                    let concl = out.conclusions();
                    let reached =
                        targets.iter().all(|(s, t)| concl.contains(&Statement::new(t.clone(), inner.clone(), s.value.clone())));
                    let back_targets: Vec<Statement> =
                        targets.iter().map(|(s, t)| Statement::new(t.clone(), inner.clone(), s.value.clone())).collect();
                    let round = subst_out(&out, &back_targets, &u, x, Budget::default(), Mode::Permissive)
                        .map(|(b, _)| {
                            seen.add(&b);
                            let c = b.conclusions();
                            st.iter().all(|s| c.contains(s))
                        })
                        .unwrap_or(false);
                    if !(healthy(&out) && out.len() <= d.len() + claim && out.metrics().m <= m0 && ledger.all_pass() && reached && round) {
                        bad.push(format!("in#{n_in}"));
                    }
                    seen.add(&d);
                    seen.add(&out);
                }
                Err(e) => bad.push(format!("in#{n_in}: {e}")),
            }
            n_in += 1;
        }

        if n_out < 500 {
            let (d, st) = g.computation(&ts, &inner);
            match subst_out(&d, &st, &u, x, Budget::default(), Mode::Permissive) {
                Ok((out, ledger)) => {
                    let m0 = d.metrics().m;
                    let concl = out.conclusions();
                    let reached = st
                        .iter()
                        .zip(&ts)
                        .all(|(s, t)| concl.contains(&Statement::new(t.substitute(&u, x), rho.clone(), s.value.clone())));
                    if !(healthy(&out) && out.len() <= d.len() + claim && out.metrics().m <= m0 * u.size() && ledger.all_pass() && reached) {
                        bad.push(format!("out#{n_out}"));
                    }
                    seen.add(&d);
                    seen.add(&out);
                }
                Err(e) => bad.push(format!("out#{n_out}: {e}")),
            }
            n_out += 1;
        }
    }
    Outcome::new(bad.is_empty(), format!("{n_in} substitution-in and {n_out} substitution-out instances, violations {bad:?}"))
}

fn axioms(seen: &mut Seen) -> Outcome {
    let mut g = Gen::new(SEED ^ 6);
    let syms = library_symbols();
    let (mut runs, mut bad) = (0, Vec::new());
    let mut pairs = 0;
    for f in &syms {
        for case in axiom_cases(f) {
            pairs += 1;
            for rep in 0..6 {
                let vars = ["y"];
                let env = g.env(&vars);
                let n = f.arity() - usize::from(matches!(case, AxiomCase::Eps | AxiomCase::Succ(_)));
                let args: Vec<Term> = (0..n).map(|_| g.term(2, &env, &vars)).collect();
                let xt = g.term(2, &env, &vars);
                let x = matches!(case, AxiomCase::Succ(_)).then_some(&xt);
                let eq = axiom_instance(f, case, x, &args).expect("applicable case");
                if denote_term(&eq.lhs, &env).map_or(true, |v| v.len() > corpus::MAX_VALUE_LEN) {
                    continue;
                }
                let forward = rep % 2 == 0;
                let start = if forward { &eq.lhs } else { &eq.rhs };
                let (d, st) = g.computation(std::slice::from_ref(start), &env);
                let r = if forward {
                    unfold_axiom(&d, &st[0], f, case, &eq)
                } else {
                    fold_axiom(&d, &st[0], f, case, &eq)
                };
                runs += 1;
                match r {
                    Ok((out, _)) => {
                        let want = if forward { &eq.rhs } else { &eq.lhs };
                        let mono = out
                            .conclusions()
                            .iter()
                            .any(|s| &s.term == want && s.env == env && s.value.approx_leq(&st[0].value));
                        if !(healthy(&out) && out.len() <= d.len() + eq.size() && mono) {
                            bad.push(format!("{f} {case} {}", if forward { "unfold" } else { "fold" }));
                        }
                        seen.add(&d);
                        seen.add(&out);
                    }
                    Err(e) => bad.push(format!("{f} {case}: {e}")),
                }
            }
        }
    }
    Outcome::new(bad.is_empty() && runs >= 200, format!("{pairs} symbol/case pairs, {runs} instances, violations {bad:?}"))
}

fn soundness(seen: &mut Seen) -> Outcome {
    let mut g = Gen::new(SEED ^ 7);
    let (mut runs, mut bad) = (0, Vec::new());
    let mut tries = 0;
    while runs < 150 && tries < 10_000 {
        tries += 1;
        let vars = ["y"];
        let env = g.env(&vars);
        let t = g.term(4, &env, &vars);
        let Some(p) = g.proof_from(&t, 5) else { continue };
        let eq = p.conclusion().expect("generated proofs check");
        if eq.lhs == eq.rhs {
            continue;
        }
        let dir = if runs % 2 == 0 { Direction::Forward } else { Direction::Backward };
        let (from, to) = if dir == Direction::Forward { (&eq.lhs, &eq.rhs) } else { (&eq.rhs, &eq.lhs) };
        let other = g.term(2, &env, &vars);
        let (d, st) = g.computation(&[from.clone(), other], &env);
        runs += 1;
        let r = p.size().expect("checked");
        match transform_along_proof(&d, &st[0], &p, dir, Budget::default(), Mode::Permissive) {
            Ok((out, ledger)) => {
                let c = out.conclusions();
                let untouched = st[1] == st[0] || c.contains(&st[1]);
                let mono = c.iter().any(|s| &s.term == to && s.env == env && s.value.approx_leq(&st[0].value));
                if !(healthy(&out) && out.len() <= d.len() + r && mono && untouched && ledger.all_pass()) {
                    bad.push(format!("#{runs}"));
                }
                seen.add(&d);
                seen.add(&out);
            }
            Err(e) => bad.push(format!("#{runs}: {e}")),
        }
    }
    Outcome::new(bad.is_empty() && runs >= 100, format!("{runs} proofs of depth <= 5 in both directions, violations {bad:?}"))
}

fn beckmann_growth(seen: &mut Seen) -> Outcome {
    let lens: Vec<usize> = (1..=8).collect();
    let mut notes = Vec::new();
    let mut pass = true;
    for k in 1..=3 {
        let rows = beckmann::table(k, &lens);
        let approx_const = rows.windows(2).all(|w| w[0].approx_nodes == w[1].approx_nodes);
        let exact_grows = rows.windows(2).all(|w| w[0].exact_nodes < w[1].exact_nodes);
        let proof_const = rows.windows(2).all(|w| w[0].proof_nodes == w[1].proof_nodes);
        let mut reached = true;
        for &l in &lens {
            let inst = Instance::new(k, l);
            let p = inst.proof();
            let proof_ok = p.check().is_ok();
            let d = inst.approx();
            let s = d.conclusions()[0].clone();
            let ok = match transform_along_proof(&d, &s, &p, Direction::Forward, Budget::default(), Mode::Strict) {
                Ok((out, ledger)) => {
                    let hit = out.conclusions().iter().any(|c| c.term == Term::eps() && c.value == Term::eps() && c.env == s.env);
                    seen.add(&out);
                    hit && healthy(&out) && out.len() <= d.len() + p.size().expect("checked") && ledger.all_pass()
                }
                Err(_) => false,
            };
            reached &= proof_ok && ok;
            seen.add(&d);
            seen.add(&inst.exact());
        }
        pass &= approx_const && exact_grows && proof_const && reached;
        notes.push(format!(
            "k={k}: approx {} nodes, exact {}..{} nodes, proof {} nodes",
            rows[0].approx_nodes,
            rows[0].exact_nodes,
            rows[rows.len() - 1].exact_nodes,
            rows[0].proof_nodes
        ));
    }
    Outcome::new(pass, notes.join("; "))
}

fn value_bound(seen: &Seen) -> Outcome {
    let bad = seen.dags.iter().filter(|d| d.metrics().value_max > 3 * d.len()).count();
    Outcome::new(bad == 0, format!("{} computations, {bad} with a value larger than 3 x node count", seen.dags.len()))
}

fn m_bound(seen: &Seen) -> Outcome {
    let mut worst = Ratio::from_integer(0u64);
    let mut bad = 0;
    for d in &seen.dags {
        let b = d.audit_m_bound(C);
        worst = worst.max(b.minimal_c);
        bad += usize::from(!b.holds);
    }
    let approx = *worst.numer() as f64 / *worst.denom() as f64;
    Outcome::new(
        bad == 0,
        format!("{} computations, C = {C}, observed maximum minimal C = {worst} ({approx:.4}), {bad} violations", seen.dags.len()),
    )
}

fn consistency(seen: &Seen) -> Outcome {
    let bogus = Statement::new(Term::s1(Term::eps()), Development::empty(), Term::eps());
    let found = seen.dags.iter().filter(|d| d.validate().is_ok() && d.contains(&bogus)).count();
    let defs = Defs::with_stdlib();
    let mut rejected = Vec::new();
    let paths: Vec<PathBuf> = files(&fixtures().join("proof"), "proof")
        .into_iter()
        .filter(|p| p.file_name().is_some_and(|n| n.to_string_lossy().starts_with("bogus")))
        .collect();
    for p in &paths {
        let src = fs::read_to_string(p).expect("proof fixture");
        if let Ok(Err(e)) = syntax::parse_proof(&src, &defs).map(|t| t.conclusion()) {
            rejected.push(format!("{:?}", e.path));
        }
    }
    Outcome::new(
        found == 0 && paths.len() == 5 && rejected.len() == 5,
        format!("{found} computations derive <s1 eps, ()> => eps; bogus proofs rejected at paths {rejected:?}"),
    )
}

fn main() {
    let mut seen = Seen::default();
    let results = [
        ("1 rule-checker soundness", rule_coverage(&mut seen)),
        ("2 oracle equivalence", oracle(&mut seen)),
        ("4 numeral bounds", numeral_bounds(&mut seen)),
        ("5 substitution", substitution(&mut seen)),
        ("6 axiom unfold/fold", axioms(&mut seen)),
        ("7 soundness walk", soundness(&mut seen)),
        ("8 counterexample growth", beckmann_growth(&mut seen)),
    ];
    let global = [
        ("3 value bound", value_bound(&seen)),
        ("9 size bound calibration", m_bound(&seen)),
        ("10 consistency smoke", consistency(&seen)),
    ];
    let mut all: Vec<(&str, Outcome)> = results.into_iter().chain(global).collect();
    all.sort_by_key(|(name, _)| name.split(' ').next().and_then(|n| n.parse::<u32>().ok()).unwrap_or(0));
    let mut failed = 0;
    for (name, o) in &all {
        println!("[{}] criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria pass", all.len() - failed, all.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

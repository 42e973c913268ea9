//! S-expression formats for definitions, terms, developments, computations
//! and proofs.

mod sexp;

use std::collections::BTreeMap;
use std::fmt::Write as _;

pub use sexp::{read_all, read_one, Pos, Sexp, SyntaxError};

use crate::comp::{CompDag, Node, RuleTag, Statement};
use crate::def::{Bit, FunctionDef};
use crate::proof::{AxiomCase, Equation, ProofTree};
use crate::stdlib::StdLib;
use crate::term::{Development, Term};

pub type Result<T> = std::result::Result<T, SyntaxError>;

/// Named definitions visible to the parsers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Defs(BTreeMap<String, FunctionDef>);

impl Defs {
    pub fn empty() -> Self {
        Defs::default()
    }

    pub fn with_stdlib() -> Self {
        let lib = StdLib::new();
        Defs(lib.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
    }

    pub fn get(&self, name: &str) -> Option<&FunctionDef> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: &str, f: FunctionDef) {
        self.0.insert(name.to_string(), f);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FunctionDef)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn atom(s: &Sexp) -> Result<&str> {
    match s {
        Sexp::Atom(a, _) => Ok(a),
        Sexp::List(_, p) => Err(SyntaxError::at(*p, "expected an atom")),
    }
}

fn number(s: &Sexp) -> Result<usize> {
    let a = atom(s)?;
    a.parse().map_err(|_| SyntaxError::at(s.pos(), format!("expected a number, found {a:?}")))
}

fn bit(s: &Sexp) -> Result<Bit> {
    match atom(s)? {
        "0" => Ok(Bit::Zero),
        "1" => Ok(Bit::One),
        a => Err(SyntaxError::at(s.pos(), format!("expected 0 or 1, found {a:?}"))),
    }
}

/// The head keyword and arguments of a list form.
fn form(s: &Sexp) -> Result<(&str, &[Sexp], Pos)> {
    match s {
        Sexp::List(items, p) => match items.split_first() {
            Some((Sexp::Atom(h, _), rest)) => Ok((h, rest, *p)),
            _ => Err(SyntaxError::at(*p, "expected a keyword after '('")),
        },
        Sexp::Atom(_, p) => Err(SyntaxError::at(*p, "expected a list")),
    }
}

fn arity(kw: &str, rest: &[Sexp], n: usize, p: Pos) -> Result<()> {
    if rest.len() == n {
        Ok(())
    } else {
        Err(SyntaxError::at(p, format!("{kw} takes {n} argument(s), found {}", rest.len())))
    }
}

fn expect_form<'a>(s: &'a Sexp, kw: &str) -> Result<(&'a [Sexp], Pos)> {
    let (h, rest, p) = form(s)?;
    if h == kw {
        Ok((rest, p))
    } else {
        Err(SyntaxError::at(p, format!("expected ({kw} …), found ({h} …)")))
    }
}

// ---- definitions ----

pub fn def_from(s: &Sexp, defs: &Defs) -> Result<FunctionDef> {
    if let Sexp::Atom(a, p) = s {
        return match a.as_str() {
            "eps" => Ok(FunctionDef::eps()),
            "s0" => Ok(FunctionDef::succ(Bit::Zero)),
            "s1" => Ok(FunctionDef::succ(Bit::One)),
            _ => Err(SyntaxError::at(*p, format!("unknown definition {a:?}"))),
        };
    }
    let (kw, rest, p) = form(s)?;
    let bad = |e: crate::def::DefError| SyntaxError::at(p, e.to_string());
    match kw {
        "eps-n" => {
            arity(kw, rest, 1, p)?;
            FunctionDef::const_n(number(&rest[0])?).map_err(bad)
        }
        "proj" => {
            arity(kw, rest, 2, p)?;
            FunctionDef::proj(number(&rest[0])?, number(&rest[1])?).map_err(bad)
        }
        "comp" => {
            if rest.len() < 2 {
                return Err(SyntaxError::at(p, "comp takes an outer and at least one inner definition"));
            }
            let outer = def_from(&rest[0], defs)?;
            let inner = rest[1..].iter().map(|d| def_from(d, defs)).collect::<Result<_>>()?;
            FunctionDef::comp(outer, inner).map_err(bad)
        }
        "rec" => {
            arity(kw, rest, 3, p)?;
            FunctionDef::rec(def_from(&rest[0], defs)?, def_from(&rest[1], defs)?, def_from(&rest[2], defs)?).map_err(bad)
        }
        "named" => {
            arity(kw, rest, 1, p)?;
            let name = atom(&rest[0])?;
            defs.get(name)
                .cloned()
                .ok_or_else(|| SyntaxError::at(rest[0].pos(), format!("unknown named definition {name:?}")))
        }
        _ => Err(SyntaxError::at(p, format!("unknown definition form {kw:?}"))),
    }
}

pub fn parse_def(src: &str, defs: &Defs) -> Result<FunctionDef> {
    def_from(&read_one(src)?, defs)
}

/// A file of `(def NAME DEF)` forms; later forms may name earlier ones.
pub fn parse_defs(src: &str, base: &Defs) -> Result<Defs> {
    let mut out = base.clone();
    for s in read_all(src)? {
        let (rest, p) = expect_form(&s, "def")?;
        arity("def", rest, 2, p)?;
        let name = atom(&rest[0])?;
        let f = def_from(&rest[1], &out)?;
        out.insert(name, f);
    }
    Ok(out)
}

pub fn emit_defs(defs: &Defs) -> String {
    defs.iter().map(|(k, v)| format!("(def {k} {v})\n")).collect()
}

// ---- terms and developments ----

pub fn term_from(s: &Sexp, defs: &Defs) -> Result<Term> {
    if let Sexp::Atom(a, p) = s {
        return match a.as_str() {
            "eps" => Ok(Term::eps()),
            "star" => Ok(Term::Star),
            _ => Err(SyntaxError::at(*p, format!("unknown term {a:?}"))),
        };
    }
    let (kw, rest, p) = form(s)?;
    match kw {
        "s0" | "s1" => {
            arity(kw, rest, 1, p)?;
            let b = if kw == "s0" { Bit::Zero } else { Bit::One };
            Ok(Term::succ(b, term_from(&rest[0], defs)?))
        }
        "var" => {
            arity(kw, rest, 1, p)?;
            Ok(Term::var(atom(&rest[0])?))
        }
        "app" => {
            let (f, args) = rest.split_first().ok_or_else(|| SyntaxError::at(p, "app needs a definition"))?;
            let f = def_from(f, defs)?;
            let args = args.iter().map(|a| term_from(a, defs)).collect::<Result<_>>()?;
            Term::apply(&f, args).map_err(|e| SyntaxError::at(p, e.to_string()))
        }
        _ => Err(SyntaxError::at(p, format!("unknown term form {kw:?}"))),
    }
}

pub fn parse_term(src: &str, defs: &Defs) -> Result<Term> {
    term_from(&read_one(src)?, defs)
}

pub fn env_from(s: &Sexp, defs: &Defs) -> Result<Development> {
    let (rest, p) = expect_form(s, "env")?;
    let mut pairs = Vec::new();
    for b in rest {
        let (br, bp) = expect_form(b, "bind")?;
        arity("bind", br, 2, bp)?;
        pairs.push((atom(&br[0])?.to_string(), term_from(&br[1], defs)?));
    }
    Development::from_pairs(pairs.iter().map(|(x, t)| (x.as_str(), t.clone())))
        .map_err(|e| SyntaxError::at(p, e.to_string()))
}

pub fn parse_env(src: &str, defs: &Defs) -> Result<Development> {
    env_from(&read_one(src)?, defs)
}

// ---- computations ----

fn rule_from(s: &Sexp) -> Result<RuleTag> {
    let (rest, p) = expect_form(s, "rule")?;
    let (tag, params) = rest.split_first().ok_or_else(|| SyntaxError::at(p, "rule needs a tag"))?;
    let tag = atom(tag)?;
    let n = |k| arity(tag, params, k, p);
    Ok(match tag {
        "subst" => n(0).map(|_| RuleTag::Subst)?,
        "star" => n(0).map(|_| RuleTag::Star)?,
        "eps" => n(0).map(|_| RuleTag::Eps)?,
        "eps-n" => n(0).map(|_| RuleTag::EpsN)?,
        "comp" => n(0).map(|_| RuleTag::Comp)?,
        "rec-eps" => n(0).map(|_| RuleTag::RecEps)?,
        "succ" => {
            n(1)?;
            RuleTag::Succ(bit(&params[0])?)
        }
        "succ-n" => {
            n(1)?;
            RuleTag::SuccN(bit(&params[0])?)
        }
        "rec-succ" => {
            n(1)?;
            RuleTag::RecSucc(bit(&params[0])?)
        }
        "const-fn" => {
            n(1)?;
            RuleTag::ConstFn(number(&params[0])?)
        }
        "proj" => {
            n(2)?;
            RuleTag::Proj { i: number(&params[0])?, m: number(&params[1])? }
        }
        _ => return Err(SyntaxError::at(p, format!("unknown rule tag {tag:?}"))),
    })
}

fn node_from(s: &Sexp, at: usize, defs: &Defs) -> Result<Node> {
    let (rest, p) = expect_form(s, "node")?;
    arity("node", rest, 4, p)?;
    let i = number(&rest[0])?;
    if i != at {
        return Err(SyntaxError::at(rest[0].pos(), format!("expected node index {at}, found {i}")));
    }
    let rule = rule_from(&rest[1])?;
    let (prem, _) = expect_form(&rest[2], "prem")?;
    let premises = prem.iter().map(number).collect::<Result<Vec<_>>>()?;
    let (st, sp) = expect_form(&rest[3], "stmt")?;
    arity("stmt", st, 3, sp)?;
    let stmt = Statement::new(term_from(&st[0], defs)?, env_from(&st[1], defs)?, term_from(&st[2], defs)?);
    Ok(Node::new(rule, premises, stmt))
}

pub fn comp_from(s: &Sexp, defs: &Defs) -> Result<CompDag> {
    let (rest, _) = expect_form(s, "comp")?;
    let nodes = rest.iter().enumerate().map(|(i, n)| node_from(n, i, defs)).collect::<Result<_>>()?;
    Ok(CompDag::from_nodes(nodes))
}

pub fn parse_comp(src: &str, defs: &Defs) -> Result<CompDag> {
    comp_from(&read_one(src)?, defs)
}

pub fn emit_comp(dag: &CompDag) -> String {
    let mut out = String::from("(comp\n");
    for (i, n) in dag.nodes().iter().enumerate() {
        let prem: Vec<String> = n.premises.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(
            out,
            "  (node {i} (rule {}) (prem{}{}) (stmt {} {} {}))",
            n.rule,
            if prem.is_empty() { "" } else { " " },
            prem.join(" "),
            n.stmt.term,
            n.stmt.env,
            n.stmt.value
        );
    }
    out.push_str(")\n");
    out
}

// ---- proofs ----

pub fn proof_tree_from(s: &Sexp, defs: &Defs) -> Result<ProofTree> {
    let (kw, rest, p) = form(s)?;
    match kw {
        "refl" => {
            arity(kw, rest, 1, p)?;
            Ok(ProofTree::refl(term_from(&rest[0], defs)?))
        }
        "sym" => {
            arity(kw, rest, 1, p)?;
            Ok(ProofTree::sym(proof_tree_from(&rest[0], defs)?))
        }
        "trans" => {
            arity(kw, rest, 2, p)?;
            Ok(ProofTree::trans(proof_tree_from(&rest[0], defs)?, proof_tree_from(&rest[1], defs)?))
        }
        "cong" => {
            let (f, ps) = rest.split_first().ok_or_else(|| SyntaxError::at(p, "cong needs a definition"))?;
            let f = def_from(f, defs)?;
            let ps = ps.iter().map(|q| proof_tree_from(q, defs)).collect::<Result<_>>()?;
            Ok(ProofTree::cong(&f, ps))
        }
        "substp" => {
            arity(kw, rest, 3, p)?;
            let q = proof_tree_from(&rest[0], defs)?;
            Ok(ProofTree::subst(q, term_from(&rest[1], defs)?, atom(&rest[2])?))
        }
        "axiom" => {
            arity(kw, rest, 3, p)?;
            let f = def_from(&rest[0], defs)?;
            let case: AxiomCase = atom(&rest[1])?.parse().map_err(|e: String| SyntaxError::at(rest[1].pos(), e))?;
            let (eq, ep) = expect_form(&rest[2], "eq")?;
            arity("eq", eq, 2, ep)?;
            let eq = Equation::new(term_from(&eq[0], defs)?, term_from(&eq[1], defs)?);
            Ok(ProofTree::axiom(&f, case, eq))
        }
        _ => Err(SyntaxError::at(p, format!("unknown proof form {kw:?}"))),
    }
}

pub fn proof_from(s: &Sexp, defs: &Defs) -> Result<ProofTree> {
    let (rest, p) = expect_form(s, "proof")?;
    arity("proof", rest, 1, p)?;
    proof_tree_from(&rest[0], defs)
}

pub fn parse_proof(src: &str, defs: &Defs) -> Result<ProofTree> {
    proof_from(&read_one(src)?, defs)
}

fn emit_tree(p: &ProofTree, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let _ = match p {
        ProofTree::Refl(t) => write!(out, "{pad}(refl {t})"),
        ProofTree::Axiom { f, case, eq } => write!(out, "{pad}(axiom {f} {case} (eq {} {}))", eq.lhs, eq.rhs),
        ProofTree::Sym(q) => {
            out.push_str(&pad);
            out.push_str("(sym\n");
            emit_tree(q, depth + 1, out);
            write!(out, ")")
        }
        ProofTree::Trans(a, b) => {
            out.push_str(&pad);
            out.push_str("(trans\n");
            emit_tree(a, depth + 1, out);
            out.push('\n');
            emit_tree(b, depth + 1, out);
            write!(out, ")")
        }
        ProofTree::Cong(f, ps) => {
            let _ = write!(out, "{pad}(cong {f}");
            for q in ps {
                out.push('\n');
                emit_tree(q, depth + 1, out);
            }
            write!(out, ")")
        }
        ProofTree::Subst { p: q, r, x } => {
            out.push_str(&pad);
            out.push_str("(substp\n");
            emit_tree(q, depth + 1, out);
            write!(out, "\n{pad}  {r} {x})")
        }
    };
}

pub fn emit_proof(p: &ProofTree) -> String {
    let mut out = String::from("(proof\n");
    emit_tree(p, 1, &mut out);
    out.push_str(")\n");
    out
}

pub fn emit_term(t: &Term) -> String {
    t.to_string()
}

pub fn emit_env(e: &Development) -> String {
    e.to_string()
}

#[cfg(test)]
mod tests;

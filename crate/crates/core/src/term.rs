//! Approximate terms: variables, the approximation constant `*`, and
//! applications of function symbols.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::def::{base_of_set, Bit, FunctionDef};

pub type Name = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("symbol {def} expects {expected} arguments, got {got}")]
    Arity { def: String, expected: usize, got: usize },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    Star,
    App(FunctionDef, Arc<[Term]>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Arc::from(name))
    }

    pub fn eps() -> Term {
        Term::App(FunctionDef::eps(), Arc::from(Vec::new()))
    }

    pub fn succ(bit: Bit, t: Term) -> Term {
        Term::App(FunctionDef::succ(bit), Arc::from(vec![t]))
    }

    pub fn s0(t: Term) -> Term {
        Term::succ(Bit::Zero, t)
    }

    pub fn s1(t: Term) -> Term {
        Term::succ(Bit::One, t)
    }

    pub fn apply(f: &FunctionDef, args: Vec<Term>) -> Result<Term, TermError> {
        if f.arity() != args.len() {
            return Err(TermError::Arity {
                def: f.to_string(),
                expected: f.arity(),
                got: args.len(),
            });
        }
        Ok(Term::App(f.clone(), Arc::from(args)))
    }

    /// Application without the arity check; callers guarantee it.
    pub(crate) fn app(f: &FunctionDef, args: Vec<Term>) -> Term {
        debug_assert_eq!(f.arity(), args.len(), "arity mismatch for {f}");
        Term::App(f.clone(), Arc::from(args))
    }

    /// `||t||`. Variables and `*` count 1; a nullary application counts its
    /// symbol only; otherwise the symbol, the arguments, and `m + 1`
    /// punctuation marks.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Star => 1,
            Term::App(f, args) if args.is_empty() => f.symbol_size(),
            Term::App(f, args) => f.symbol_size() + args.iter().map(Term::size).sum::<usize>() + args.len() + 1,
        }
    }

    pub fn head(&self) -> Option<&FunctionDef> {
        match self {
            Term::App(f, _) => Some(f),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            _ => &[],
        }
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self {
            Term::Var(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_star(&self) -> bool {
        matches!(self, Term::Star)
    }

    pub fn is_eps(&self) -> bool {
        matches!(self, Term::App(f, _) if f.is_eps())
    }

    /// `Some((i, t))` when the term is `sᵢ t`.
    pub fn as_succ(&self) -> Option<(Bit, &Term)> {
        match self {
            Term::App(f, args) => f.succ_bit().map(|b| (b, &args[0])),
            _ => None,
        }
    }

    /// Built only from `ε`, `s0`, `s1` and `*`.
    pub fn is_g_numeral(&self) -> bool {
        let mut t = self;
        loop {
            match t {
                Term::Star => return true,
                _ if t.is_eps() => return true,
                _ => match t.as_succ() {
                    Some((_, inner)) => t = inner,
                    None => return false,
                },
            }
        }
    }

    pub fn contains_star(&self) -> bool {
        match self {
            Term::Star => true,
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().any(Term::contains_star),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Star => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::Star => false,
            Term::App(_, args) => args.iter().any(|a| a.has_free(x)),
        }
    }

    pub fn occurrences(&self, x: &str) -> usize {
        match self {
            Term::Var(y) => usize::from(&**y == x),
            Term::Star => 0,
            Term::App(_, args) => args.iter().map(|a| a.occurrences(x)).sum(),
        }
    }

    /// `t[u/x]`.
    pub fn substitute(&self, u: &Term, x: &str) -> Term {
        match self {
            Term::Var(y) if &**y == x => u.clone(),
            Term::Var(_) | Term::Star => self.clone(),
            Term::App(f, args) => {
                if !self.has_free(x) {
                    return self.clone();
                }
                Term::App(f.clone(), args.iter().map(|a| a.substitute(u, x)).collect())
            }
        }
    }

    /// `self ⊑ other`: `other` is obtained from `self` by replacing subterms with `*`.
    /// Identical variables are related (reflexivity).
    pub fn approx_leq(&self, other: &Term) -> bool {
        match (self, other) {
            (_, Term::Star) => true,
            (Term::Var(x), Term::Var(y)) => x == y,
            (Term::App(f, a), Term::App(g, b)) => {
                f == g && a.iter().zip(b.iter()).all(|(r, t)| r.approx_leq(t))
            }
            _ => false,
        }
    }

    /// All function symbols occurring in the term.
    pub fn symbols(&self) -> BTreeSet<FunctionDef> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    pub(crate) fn collect_symbols(&self, out: &mut BTreeSet<FunctionDef>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone());
            args.iter().for_each(|a| a.collect_symbols(out));
        }
    }

    pub fn base_symbols(&self) -> BTreeSet<FunctionDef> {
        base_of_set(self.symbols().iter())
    }

    /// Visits every subterm, including `self`.
    pub fn for_each_subterm<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        for a in self.args() {
            a.for_each_subterm(f);
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "(var {x})"),
            Term::Star => write!(f, "star"),
            Term::App(d, _) if d.is_eps() => write!(f, "eps"),
            Term::App(d, args) => match d.succ_bit() {
                Some(b) => write!(f, "(s{b} {})", args[0]),
                None => {
                    write!(f, "(app {d}")?;
                    for a in args.iter() {
                        write!(f, " {a}")?;
                    }
                    write!(f, ")")
                }
            },
        }
    }
}

/// A g-numeral in flat form: successor bits from the outside in, and whether
/// the innermost leaf is `*` (open) rather than `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GNumeral {
    pub bits: Vec<Bit>,
    pub open: bool,
}

impl GNumeral {
    pub fn star() -> Self {
        GNumeral { bits: Vec::new(), open: true }
    }

    pub fn closed(bits: Vec<Bit>) -> Self {
        GNumeral { bits, open: false }
    }

    pub fn from_term(t: &Term) -> Option<GNumeral> {
        let mut bits = Vec::new();
        let mut cur = t;
        loop {
            match cur {
                Term::Star => return Some(GNumeral { bits, open: true }),
                _ if cur.is_eps() => return Some(GNumeral { bits, open: false }),
                _ => {
                    let (b, inner) = cur.as_succ()?;
                    bits.push(b);
                    cur = inner;
                }
            }
        }
    }

    pub fn to_term(&self) -> Term {
        let leaf = if self.open { Term::Star } else { Term::eps() };
        self.bits.iter().rev().fold(leaf, |acc, &b| Term::succ(b, acc))
    }

    pub fn is_star(&self) -> bool {
        self.open && self.bits.is_empty()
    }

    /// Number of constructor positions needed to pin this value down exactly.
    pub fn depth(&self) -> usize {
        self.bits.len() + usize::from(!self.open)
    }

    /// Keeps the first `d` constructors; everything below becomes `*`.
    pub fn truncate(&self, d: usize) -> GNumeral {
        if d >= self.depth() {
            return self.clone();
        }
        GNumeral { bits: self.bits[..d].to_vec(), open: true }
    }

    /// `self ⊑ other` on g-numerals.
    pub fn approx_leq(&self, other: &GNumeral) -> bool {
        if other.open {
            self.bits.len() >= other.bits.len() && self.bits[..other.bits.len()] == other.bits[..]
        } else {
            self == other
        }
    }

    /// `sᵢ v`.
    pub fn push_front(&self, b: Bit) -> GNumeral {
        let mut bits = Vec::with_capacity(self.bits.len() + 1);
        bits.push(b);
        bits.extend_from_slice(&self.bits);
        GNumeral { bits, open: self.open }
    }

    /// Splits `sᵢ v` into `(i, v)`.
    pub fn split_front(&self) -> Option<(Bit, GNumeral)> {
        let (&b, rest) = self.bits.split_first()?;
        Some((b, GNumeral { bits: rest.to_vec(), open: self.open }))
    }

    pub fn size(&self) -> usize {
        3 * self.bits.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DevError {
    #[error("variable {0} is bound twice in the development")]
    DuplicateVar(Name),
    #[error("variable {0} occurs free in its own binding")]
    SelfReference(Name),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binding {
    pub var: Name,
    pub term: Term,
}

/// An ordered list of substitutions `[t₁/x₁]…[tₙ/xₙ]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Development(Arc<[Binding]>);

impl Development {
    pub fn empty() -> Self {
        Development(Arc::from(Vec::new()))
    }

    pub fn new(bindings: Vec<Binding>) -> Result<Self, DevError> {
        for (k, b) in bindings.iter().enumerate() {
            if bindings[..k].iter().any(|p| p.var == b.var) {
                return Err(DevError::DuplicateVar(b.var.clone()));
            }
            if b.term.has_free(&b.var) {
                return Err(DevError::SelfReference(b.var.clone()));
            }
        }
        Ok(Development(Arc::from(bindings)))
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Term)>) -> Result<Self, DevError> {
        Development::new(
            pairs
                .into_iter()
                .map(|(x, t)| Binding { var: Arc::from(x), term: t })
                .collect(),
        )
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// `||ρ|| = Σ (||tᵢ|| + 4)`.
    pub fn size(&self) -> usize {
        self.0.iter().map(|b| b.term.size() + 4).sum()
    }

    pub fn binds(&self, x: &str) -> bool {
        self.0.iter().any(|b| &*b.var == x)
    }

    /// The binding for `x` and the development strictly after it.
    pub fn lookup(&self, x: &str) -> Option<(Term, Development)> {
        let pos = self.0.iter().position(|b| &*b.var == x)?;
        Some((self.0[pos].term.clone(), self.suffix(pos + 1)))
    }

    pub fn suffix(&self, from: usize) -> Development {
        Development(Arc::from(self.0[from..].to_vec()))
    }

    /// `[u/x]ρ`.
    pub fn prepend(&self, x: &str, u: Term) -> Result<Development, DevError> {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(Binding { var: Arc::from(x), term: u });
        v.extend_from_slice(&self.0);
        Development::new(v)
    }

    /// Drops a leading `[u/x]`, if present.
    pub fn strip_first(&self, x: &str) -> Option<(Term, Development)> {
        let first = self.0.first()?;
        (&*first.var == x).then(|| (first.term.clone(), self.suffix(1)))
    }

    /// Order-preserving subsequence test.
    pub fn is_subsequence_of(&self, other: &Development) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|b| it.any(|o| o == b))
    }

    pub fn mentions(&self, x: &str) -> bool {
        self.0.iter().any(|b| &*b.var == x || b.term.has_free(x))
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        for b in self.0.iter() {
            out.insert(b.var.clone());
            b.term.collect_vars(out);
        }
    }

    pub fn collect_symbols(&self, out: &mut BTreeSet<FunctionDef>) {
        for b in self.0.iter() {
            b.term.collect_symbols(out);
        }
    }
}

impl fmt::Debug for Development {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Development {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(env")?;
        for b in self.0.iter() {
            write!(f, " (bind {} {})", b.var, b.term)?;
        }
        write!(f, ")")
    }
}

/// `Base(α)` over terms and developments together.
pub fn base_symbols_of<'a>(
    terms: impl IntoIterator<Item = &'a Term>,
    devs: impl IntoIterator<Item = &'a Development>,
) -> BTreeSet<FunctionDef> {
    let mut syms = BTreeSet::new();
    for t in terms {
        t.collect_symbols(&mut syms);
    }
    for d in devs {
        d.collect_symbols(&mut syms);
    }
    base_of_set(syms.iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stdlib::StdLib;
    use proptest::prelude::*;

    fn num(bits: &str) -> Term {
        GNumeral::closed(bits.bytes().map(|b| Bit::from_u8(b - b'0').unwrap()).collect()).to_term()
    }

    #[test]
    fn sizes() {
        assert_eq!(Term::eps().size(), 1);
        assert_eq!(Term::s1(Term::s0(Term::eps())).size(), 7);
        let p = FunctionDef::proj(2, 1).unwrap();
        assert_eq!(Term::apply(&p, vec![Term::var("x"), Term::eps()]).unwrap().size(), 8);
        for l in 0..10 {
            assert_eq!(num(&"10".repeat(l)[..l]).size(), 3 * l + 1);
        }
    }

    #[test]
    fn free_vars_examples() {
        assert_eq!(Term::var("x").free_vars().len(), 1);
        assert!(Term::eps().free_vars().is_empty());
        let z = StdLib::zeroize(1);
        let t = Term::apply(&z, vec![Term::s0(Term::var("y"))]).unwrap();
        let fv: Vec<_> = t.free_vars().into_iter().collect();
        assert_eq!(fv, vec![Arc::<str>::from("y")]);
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(Term::var("x").substitute(&Term::eps(), "x"), Term::eps());
        assert_eq!(
            Term::s0(Term::var("x")).substitute(&Term::s1(Term::eps()), "x"),
            Term::s0(Term::s1(Term::eps()))
        );
        assert_eq!(Term::var("y").substitute(&Term::eps(), "x"), Term::var("y"));
    }

    #[test]
    fn approximation_examples() {
        let t = Term::s0(Term::var("q"));
        assert!(t.approx_leq(&Term::Star));
        assert!(Term::s0(Term::eps()).approx_leq(&Term::s0(Term::Star)));
        assert!(!Term::s0(Term::eps()).approx_leq(&Term::s1(Term::Star)));
        assert!(Term::var("x").approx_leq(&Term::var("x")));
    }

    #[test]
    fn g_numeral_examples() {
        assert!(Term::s1(Term::Star).is_g_numeral());
        assert!(Term::eps().is_g_numeral());
        let p = FunctionDef::proj(1, 1).unwrap();
        assert!(!Term::apply(&p, vec![Term::eps()]).unwrap().is_g_numeral());
    }

    #[test]
    fn dev_lookup_examples() {
        let d = Development::from_pairs([("x", Term::eps())]).unwrap();
        assert_eq!(d.lookup("x"), Some((Term::eps(), Development::empty())));
        let d = Development::from_pairs([("y", Term::s0(Term::eps())), ("x", Term::eps())]).unwrap();
        assert_eq!(d.lookup("x"), Some((Term::eps(), Development::empty())));
        let d = Development::from_pairs([("y", Term::eps())]).unwrap();
        assert_eq!(d.lookup("x"), None);
    }

    #[test]
    fn development_invariants() {
        assert!(Development::from_pairs([("x", Term::eps()), ("x", Term::eps())]).is_err());
        assert!(Development::from_pairs([("x", Term::s0(Term::var("x")))]).is_err());
        let d = Development::from_pairs([("x", Term::eps())]).unwrap();
        assert_eq!(d.size(), 5);
    }

    #[test]
    fn base_symbols_examples() {
        let b = Term::eps().base_symbols();
        assert_eq!(b.into_iter().collect::<Vec<_>>(), vec![FunctionDef::eps()]);
        let z = StdLib::zeroize(1);
        let b = z.base_symbols();
        assert!(b.contains(&z));
        assert!(b.contains(&FunctionDef::succ(Bit::Zero)));
        assert!(b.contains(&FunctionDef::proj(2, 2).unwrap()));
        assert!(b.contains(&FunctionDef::eps()));
    }

    #[test]
    fn gnumeral_truncation() {
        let v = GNumeral::from_term(&num("110")).unwrap();
        assert_eq!(v.depth(), 4);
        assert_eq!(v.truncate(0), GNumeral::star());
        assert_eq!(v.truncate(1).to_term(), Term::s1(Term::Star));
        assert_eq!(v.truncate(4), v);
        assert!(v.approx_leq(&v.truncate(2)));
        assert!(!v.truncate(2).approx_leq(&v));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::eps()),
            Just(Term::Star),
            prop_oneof![Just("x"), Just("y"), Just("z")].prop_map(Term::var),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Term::s0),
                inner.clone().prop_map(Term::s1),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Term::apply(&FunctionDef::proj(2, 1).unwrap(), vec![a, b]).unwrap()),
                inner.prop_map(|a| Term::apply(&StdLib::discard(), vec![a]).unwrap()),
            ]
        })
    }

    fn star_some(t: &Term, mask: &mut impl Iterator<Item = bool>) -> Term {
        if mask.next().unwrap_or(false) {
            return Term::Star;
        }
        match t {
            Term::App(f, args) => Term::app(f, args.iter().map(|a| star_some(a, mask)).collect()),
            _ => t.clone(),
        }
    }

    proptest! {
        #[test]
        fn substitution_size_homomorphism(t in arb_term(), u in arb_term()) {
            let r = t.substitute(&u, "x");
            prop_assert_eq!(r.size(), t.size() + t.occurrences("x") * u.size() - t.occurrences("x"));
        }

        #[test]
        fn approx_reflexive_and_star_max(t in arb_term()) {
            prop_assert!(t.approx_leq(&t));
            prop_assert!(t.approx_leq(&Term::Star));
            if !t.is_star() {
                prop_assert!(!Term::Star.approx_leq(&t));
            }
        }

        #[test]
        fn approx_transitive(t in arb_term(), m1 in proptest::collection::vec(any::<bool>(), 0..40),
                             m2 in proptest::collection::vec(any::<bool>(), 0..40)) {
            let a = star_some(&t, &mut m1.into_iter());
            let b = star_some(&a, &mut m2.into_iter());
            prop_assert!(t.approx_leq(&a));
            prop_assert!(a.approx_leq(&b));
            prop_assert!(t.approx_leq(&b));
        }

        #[test]
        fn approx_on_star_free_is_identity(a in arb_term(), b in arb_term()) {
            if !a.contains_star() && !b.contains_star() {
                prop_assert_eq!(a.approx_leq(&b), a == b);
            }
        }

        #[test]
        fn gnumeral_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..12), open in any::<bool>()) {
            let g = GNumeral { bits: bits.into_iter().map(|b| if b { Bit::One } else { Bit::Zero }).collect(), open };
            let t = g.to_term();
            prop_assert_eq!(GNumeral::from_term(&t), Some(g.clone()));
            prop_assert_eq!(t.size(), g.size());
        }
    }
}

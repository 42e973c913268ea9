use std::collections::{BTreeSet, HashSet};

use num_rational::Ratio;
use serde::Serialize;

use super::{CompDag, Statement};
use crate::def::{base_of_set, FunctionDef};
use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub node_count: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub value_max: usize,
}

/// One flag per structural audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub succ: bool,
    pub num: bool,
    pub const_value: bool,
    pub env_subseq: bool,
    pub value_bound: bool,
    pub numeral_subterm: bool,
    pub base: bool,
}

impl AuditReport {
    pub fn all_pass(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn failures(&self) -> Vec<&'static str> {
        [
            (self.succ, "succ"),
            (self.num, "num"),
            (self.const_value, "const_value"),
            (self.env_subseq, "env_subseq"),
            (self.value_bound, "value_bound"),
            (self.numeral_subterm, "numeral_subterm"),
            (self.base, "base"),
        ]
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, n)| n)
        .collect()
    }
}

/// Result of checking `M ≤ C·(T + n + 1)²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub holds: bool,
    pub minimal_c: Ratio<u64>,
}

impl BoundCheck {
    pub fn minimal_c_f64(&self) -> f64 {
        *self.minimal_c.numer() as f64 / *self.minimal_c.denom() as f64
    }
}

impl CompDag {
    pub fn metrics(&self) -> Metrics {
        let node_count = self.len();
        let m = self.statements().map(|s| s.term.size()).max().unwrap_or(0);
        let value_max = self.statements().map(|s| s.value.size()).max().unwrap_or(0);
        let t = self
            .conclusions()
            .iter()
            .map(|s| s.term.size().max(s.env.size()))
            .max()
            .unwrap_or(0);
        Metrics { node_count, m, t, value_max }
    }

    pub fn audit_m_bound(&self, c: u64) -> BoundCheck {
        let mt = self.metrics();
        let denom = (mt.t + mt.node_count + 1) as u64;
        let denom = denom * denom;
        let m = mt.m as u64;
        BoundCheck { holds: m <= c * denom, minimal_c: Ratio::new(m, denom) }
    }

    pub fn audit_structural(&self) -> AuditReport {
        let n = self.len();
        let concl = self.conclusions();
        let t_max = self.metrics().t;

        let succ = self
            .statements()
            .filter(|s| s.term.is_eps())
            .all(|s| s.value.is_eps() || s.value.is_star());

        let num = self
            .statements()
            .filter(|s| s.term.is_g_numeral())
            .all(|s| s.term.approx_leq(&s.value));

        let numerals: HashSet<&Term> = self
            .statements()
            .filter(|s| s.env.is_empty() && s.term == s.value)
            .map(|s| &s.value)
            .collect();
        // `*` is exempt: the star rule has no premises.
        let const_value = self
            .statements()
            .all(|s| s.value.is_star() || numerals.contains(&s.value));

        let env_subseq = self
            .statements()
            .all(|s| concl.iter().any(|c| s.env.is_subsequence_of(&c.env)));

        let value_bound = self.statements().all(|s| s.value.size() <= 3 * n);

        let limit = (3 * n).max(t_max);
        let numeral_subterm = self.statements().all(|s| {
            let mut ok = true;
            for a in s.term.args() {
                a.for_each_subterm(&mut |u| {
                    if u.is_g_numeral() && u.size() > limit {
                        ok = false;
                    }
                });
            }
            ok
        });

        let base = self.base_ok(&concl);

        AuditReport { succ, num, const_value, env_subseq, value_bound, numeral_subterm, base }
    }

    fn base_ok(&self, concl: &[Statement]) -> bool {
        let mut allowed = BTreeSet::new();
        for c in concl {
            c.term.collect_symbols(&mut allowed);
            c.env.collect_symbols(&mut allowed);
        }
        let allowed = base_of_set(allowed.iter());
        let mut used = BTreeSet::new();
        for s in self.statements() {
            s.term.collect_symbols(&mut used);
            s.env.collect_symbols(&mut used);
            s.value.collect_symbols(&mut used);
        }
        used.iter().filter(|f| !FunctionDef::is_constructor(f)).all(|f| allowed.contains(f))
    }
}

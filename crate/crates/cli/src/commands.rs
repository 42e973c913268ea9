use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use pvw_core::beckmann::{Instance, Row};
use pvw_core::comp::{AuditReport, CompDag, Metrics};
use pvw_core::eval::{approx_eval, exact_eval, Demand};
use pvw_core::syntax::{self, Defs};
use pvw_core::transform::{transform_along_proof, Budget, Direction, Mode, TransformError};

use crate::{BudgetArgs, Cli, Cmd, Dir};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_EVAL: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn parse_err(what: &str) -> impl Fn(syntax::SyntaxError) -> Failure + '_ {
    move |e| Failure::new(EXIT_PARSE, format!("{what}:{e}"))
}

fn load_defs(path: Option<&Path>) -> Result<Defs> {
    let base = Defs::with_stdlib();
    match path {
        None => Ok(base),
        Some(p) => syntax::parse_defs(&read(p)?, &base).map_err(parse_err(&p.display().to_string())),
    }
}

fn emit_json(path: Option<&Path>, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("json values serialize");
    match path {
        Some(p) => write(p, &(text + "\n")),
        None => {
            eprintln!("{text}");
            Ok(())
        }
    }
}

fn emit_comp(out: Option<&Path>, dag: &CompDag) -> Result<()> {
    let text = syntax::emit_comp(dag);
    match out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CompReport {
    valid: bool,
    violation: Option<pvw_core::comp::Violation>,
    #[serde(flatten)]
    metrics: Metrics,
    audits: AuditReport,
    bound_holds: bool,
    #[serde(rename = "minimal_C")]
    minimal_c: f64,
    c: u64,
}

fn comp_report(dag: &CompDag, c: u64) -> CompReport {
    let bound = dag.audit_m_bound(c);
    CompReport {
        valid: dag.validate().is_ok(),
        violation: dag.validate().err(),
        metrics: dag.metrics(),
        audits: dag.audit_structural(),
        bound_holds: bound.holds,
        minimal_c: bound.minimal_c_f64(),
        c,
    }
}

fn parse_mode(s: &str) -> Result<Demand> {
    if s == "exact" {
        return Ok(Demand::Full);
    }
    s.strip_prefix("demand:")
        .and_then(|d| d.parse().ok())
        .map(Demand::Depth)
        .ok_or_else(|| Failure::new(EXIT_PARSE, format!("mode must be exact or demand:N, found {s:?}")))
}

fn budget(b: BudgetArgs) -> Budget {
    let d = Budget::default();
    Budget {
        u: b.budget_u.unwrap_or(d.u),
        b: b.budget_b.unwrap_or(d.b),
        v: b.budget_v.unwrap_or(d.v),
        c: b.const_c.unwrap_or(d.c),
    }
}

pub fn run(cli: Cli) -> Result<u8> {
    let defs = load_defs(cli.defs.as_deref())?;
    let json = cli.json.as_deref();
    match cli.cmd {
        Cmd::Eval { term, env, mode, out } => {
            let t = syntax::parse_term(&term, &defs).map_err(parse_err("--term"))?;
            let e = syntax::parse_env(&env, &defs).map_err(parse_err("--env"))?;
            let dag = match parse_mode(&mode)? {
                Demand::Full => exact_eval(&t, &e),
                d => approx_eval(&t, &e, d),
            }
            .map_err(|e| Failure::new(EXIT_EVAL, e.to_string()))?;
            emit_comp(out.as_deref(), &dag)?;
            let concl = dag.conclusions();
            let value = concl.first().map(|s| s.value.to_string());
            emit_json(json, &json!({ "value": value, "metrics": dag.metrics() }))?;
            Ok(EXIT_OK)
        }
        Cmd::Check { comp, proof, const_c } => {
            if let Some(p) = proof {
                let pf = syntax::parse_proof(&read(&p)?, &defs).map_err(parse_err(&p.display().to_string()))?;
                let report = match pf.conclusion() {
                    Ok(eq) => json!({
                        "ok": true,
                        "conclusion": eq.to_string(),
                        "size": pf.size().ok(),
                        "nodes": pf.node_count(),
                    }),
                    Err(e) => json!({ "ok": false, "violation": e }),
                };
                emit_json(json, &report)?;
                return Ok(if report["ok"] == json!(true) { EXIT_OK } else { EXIT_INVALID });
            }
            let p = comp.expect("clap requires --comp or --proof");
            let dag = syntax::parse_comp(&read(&p)?, &defs).map_err(parse_err(&p.display().to_string()))?;
            let r = comp_report(&dag, const_c);
            emit_json(json, &serde_json::to_value(&r).expect("report serializes"))?;
            Ok(if r.valid && r.audits.all_pass() { EXIT_OK } else { EXIT_INVALID })
        }
        Cmd::Audit { comp, const_c } => {
            let dag = syntax::parse_comp(&read(&comp)?, &defs).map_err(parse_err(&comp.display().to_string()))?;
            let r = comp_report(&dag, const_c);
            emit_json(json, &serde_json::to_value(&r).expect("report serializes"))?;
            Ok(if r.valid && r.audits.all_pass() && r.bound_holds { EXIT_OK } else { EXIT_INVALID })
        }
        Cmd::Transform { proof, comp, direction, budget: b, strict, out } => {
            let pf = syntax::parse_proof(&read(&proof)?, &defs).map_err(parse_err(&proof.display().to_string()))?;
            let dag = syntax::parse_comp(&read(&comp)?, &defs).map_err(parse_err(&comp.display().to_string()))?;
            if let Err(v) = dag.validate() {
                return Err(Failure::new(EXIT_INVALID, format!("input computation: {v}")));
            }
            let eq = pf.conclusion().map_err(|e| Failure::new(EXIT_INVALID, format!("proof: {e}")))?;
            let dir = match direction {
                Dir::Fwd => Direction::Forward,
                Dir::Bwd => Direction::Backward,
            };
            let from = if dir == Direction::Forward { &eq.lhs } else { &eq.rhs };
            let target = dag
                .conclusions()
                .into_iter()
                .find(|s| &s.term == from)
                .ok_or_else(|| Failure::new(EXIT_INVALID, format!("no conclusion has main term {from}")))?;
            let mode = if strict { Mode::Strict } else { Mode::Permissive };
            let (res, ledger) = match transform_along_proof(&dag, &target, &pf, dir, budget(b), mode) {
                Ok(r) => r,
                Err(TransformError::Budget(m)) => return Err(Failure::new(EXIT_BUDGET, format!("budget violated: {m}"))),
                Err(e) => return Err(Failure::new(EXIT_INVALID, e.to_string())),
            };
            emit_comp(out.as_deref(), &res)?;
            let valid = res.validate().is_ok();
            let overall = valid && ledger.all_pass();
            let steps: Vec<Value> = ledger
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "op": e.op,
                        "path": e.path,
                        "claimed": e.claimed_nodes,
                        "actual_nodes": e.actual_nodes,
                        "claimed_M": e.claimed_m,
                        "actual_M": e.actual_m,
                        "pass": e.pass,
                    })
                })
                .collect();
            let report = json!({
                "steps": steps,
                "warnings": ledger.warnings,
                "input_nodes": dag.len(),
                "output_nodes": res.len(),
                "proof_size": pf.size().ok(),
                "valid": valid,
                "overall": overall,
            });
            emit_json(json, &report)?;
            Ok(if overall { EXIT_OK } else { EXIT_INVALID })
        }
        Cmd::Beckmann { k, lens, out_dir } => {
            if k == 0 {
                return Err(Failure::new(EXIT_INVALID, "k must be at least 1"));
            }
            let mut rows: Vec<Row> = Vec::new();
            for &len in &lens {
                let inst = Instance::new(k, len);
                if let Some(dir) = &out_dir {
                    fs::create_dir_all(dir).map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", dir.display())))?;
                    write(&dir.join(format!("k{k}_l{len}_approx.comp")), &syntax::emit_comp(&inst.approx()))?;
                    write(&dir.join(format!("k{k}_l{len}_exact.comp")), &syntax::emit_comp(&inst.exact()))?;
                    write(&dir.join(format!("k{k}_l{len}.proof")), &syntax::emit_proof(&inst.proof()))?;
                }
                rows.push(inst.row());
            }
            let text = serde_json::to_string_pretty(&json!({ "k": k, "rows": rows })).expect("rows serialize");
            match json {
                Some(p) => write(p, &(text + "\n"))?,
                None => println!("{text}"),
            }
            Ok(EXIT_OK)
        }
    }
}

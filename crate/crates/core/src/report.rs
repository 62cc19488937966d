//! Report documents rendered as aligned text tables, JSON, or CSV.

use serde_json::{json, Map, Value};

use crate::charsys::{block_multiplicity, YTerm};
use crate::combinatorics::Rational;
use crate::kinetic::{HankelReport, OracleReport};
use crate::solver::{ExactForm, IndependenceReport, Root, SpeedSet};
use crate::subluminal::SublumReport;
use crate::tensor::Theorem3Report;

pub const SCHEMA: &str = "momentwave/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// One report: a JSON body plus a flat table shared by the text and CSV views.
#[derive(Clone, Debug)]
pub struct Document {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Lines printed under the text table (verdicts, summaries).
    pub notes: Vec<String>,
}

impl Document {
    pub fn new(kind: &str, body: Map<String, Value>, header: &[&str]) -> Self {
        let mut json = Map::new();
        json.insert("schema".into(), SCHEMA.into());
        json.insert("kind".into(), kind.into());
        json.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        json.extend(body);
        Document { json: Value::Object(json), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), notes: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for r in &self.rows {
                    w.write_record(r).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
            }
            Format::Table => {
                let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
                for r in &self.rows {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |cells: &[String]| -> String {
                    let padded: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                        .collect();
                    padded.join("  ").trim_end().to_string()
                };
                let mut out = String::new();
                if !self.header.is_empty() {
                    out += &line(&self.header);
                    out.push('\n');
                    out += &widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("  ");
                    out.push('\n');
                }
                for r in &self.rows {
                    out += &line(r);
                    out.push('\n');
                }
                for n in &self.notes {
                    out += n;
                    out.push('\n');
                }
                out
            }
        }
    }
}

pub fn rational_json(q: &Rational) -> Value {
    json!({ "num": q.numer().to_string(), "den": q.denom().to_string() })
}

pub fn exact_json(e: &ExactForm) -> Value {
    match e {
        ExactForm::Rational(q) => rational_json(q),
        ExactForm::Sqrt { sign, q } => json!({ "sqrt_of": rational_json(q), "sign": sign }),
        ExactForm::Interval { lo, hi, poly } => json!({
            "interval": { "lo": rational_json(lo), "hi": rational_json(hi) },
            "poly": poly.coeff_strings(),
        }),
    }
}

pub fn root_json(r: &Root) -> Value {
    let (num, den) = match &r.exact {
        ExactForm::Rational(q) | ExactForm::Sqrt { q, .. } => (json!(q.numer().to_string()), json!(q.denom().to_string())),
        ExactForm::Interval { .. } => (Value::Null, Value::Null),
    };
    json!({
        "approx": r.to_f64(),
        "multiplicity": r.multiplicity,
        "exact_kind": r.exact.kind(),
        "exact_num": num,
        "exact_den": den,
        "exact": exact_json(&r.exact),
    })
}

fn speed_rows(doc: &mut Document, block: &str, set: &SpeedSet) {
    for r in &set.roots {
        doc.row(vec![
            block.to_string(),
            format!("{:+.12}", r.to_f64()),
            r.multiplicity.to_string(),
            r.exact.kind().to_string(),
            r.exact.to_string(),
        ]);
    }
}

/// Per-block speeds and, for a whole-model run, the aggregate multiset.
pub fn speeds_document(order: usize, blocks: &[SpeedSet], model: Option<&SpeedSet>, closure: Value) -> Document {
    let block_json: Vec<Value> = blocks
        .iter()
        .map(|b| {
            let p = b.p.expect("block speed set");
            json!({
                "p": p,
                "block_multiplicity": block_multiplicity(p),
                "count": b.total(),
                "roots": b.roots.iter().map(root_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut body = Map::new();
    body.insert("N".into(), order.into());
    body.insert("closure".into(), closure);
    body.insert("blocks".into(), block_json.into());
    if let Some(m) = model {
        body.insert("model".into(), json!({ "count": m.total(), "roots": m.roots.iter().map(root_json).collect::<Vec<_>>() }));
    }
    let mut doc = Document::new("speeds", body, &["block", "speed", "mult", "kind", "exact"]);
    for b in blocks {
        speed_rows(&mut doc, &format!("p={}", b.p.unwrap_or(0)), b);
    }
    if let Some(m) = model {
        speed_rows(&mut doc, "all", m);
        doc.note(format!("N={order}: {} eigenvalues in total", m.total()));
    }
    doc
}

pub fn coeffs_document(p: usize, b: usize, n: usize, terms: &[YTerm]) -> Document {
    let mut body = Map::new();
    body.insert("p".into(), p.into());
    body.insert("b".into(), b.into());
    body.insert("n".into(), n.into());
    body.insert(
        "terms".into(),
        terms
            .iter()
            .map(|t| json!({ "h": t.h, "k": t.k, "mu_coeff": rational_json(&t.mu_coeff), "phi_coeff": rational_json(&t.phi_coeff) }))
            .collect::<Vec<_>>()
            .into(),
    );
    let mut doc = Document::new("coeffs", body, &["h", "k", "mu_coeff", "phi_coeff"]);
    for t in terms {
        doc.row(vec![t.h.to_string(), t.k.to_string(), t.mu_coeff.to_string(), t.phi_coeff.to_string()]);
    }
    doc.note("coefficients with the common factor 4π removed");
    doc
}

fn pass_str(ok: bool) -> String {
    if ok { "pass" } else { "FAIL" }.to_string()
}

/// Outcome of one theorem check in one frame.
#[derive(Clone, Debug)]
pub struct TensorCheck {
    pub frame: String,
    pub theorem: u8,
    pub label: String,
    pub pass: bool,
}

pub fn tensors_document(checks: &[TensorCheck], theorem3: &[(String, Theorem3Report)], stable: bool) -> Document {
    let mut body = Map::new();
    let t12: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "frame": c.frame, "theorem": c.theorem, "case": c.label, "pass": c.pass }))
        .collect();
    let t3: Vec<Value> = theorem3
        .iter()
        .map(|(frame, r)| {
            json!({
                "frame": frame, "p": r.p, "s": r.s, "c": r.c, "d": r.d, "pass": r.pass,
                "max_abs_component_diff": rational_json(&r.max_abs_component_diff),
                "index_layout": r.index_layout,
            })
        })
        .collect();
    let pass = checks.iter().all(|c| c.pass) && stable;
    body.insert("pass".into(), pass.into());
    body.insert("identities".into(), t12.into());
    body.insert("theorem3".into(), t3.into());
    body.insert("theorem3_stable_across_frames".into(), stable.into());
    let mut doc = Document::new("verify-tensors", body, &["frame", "check", "result", "max diff"]);
    for c in checks {
        doc.row(vec![c.frame.clone(), format!("theorem {} {}", c.theorem, c.label), pass_str(c.pass), String::new()]);
    }
    for (frame, r) in theorem3 {
        doc.row(vec![
            frame.clone(),
            format!("theorem 3 p={} s={} c={} d={}", r.p, r.s, r.c, r.d),
            if r.pass { "holds" } else { "differs" }.to_string(),
            r.max_abs_component_diff.to_string(),
        ]);
    }
    if let Some((_, r)) = theorem3.iter().max_by_key(|(_, r)| r.p) {
        doc.note(format!("theorem 3 index layout: {}", r.index_layout));
    }
    doc.note(format!("theorem 3 outcomes stable across frames: {stable}"));
    doc.note(format!("overall: {}", pass_str(pass)));
    doc
}

pub fn independence_document(report: &IndependenceReport) -> Document {
    let trials: Vec<Value> = report
        .trials
        .iter()
        .map(|t| {
            json!({
                "trial": t.trial,
                "seed": t.seed,
                "resamples": t.resamples,
                "blocks": t.blocks.iter().map(|b| json!({
                    "p": b.p,
                    "equal": b.equal,
                    "degrees_match": b.degrees_match,
                    "full": b.full.coeff_strings(),
                    "reduced": b.reduced.coeff_strings(),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut body = Map::new();
    body.insert("N".into(), report.order.into());
    body.insert("seed".into(), report.seed.into());
    body.insert("pass".into(), report.pass().into());
    body.insert("trials".into(), trials.into());
    let mut doc = Document::new("verify-independence", body, &["trial", "seed", "resamples", "p", "equal", "polynomial"]);
    for t in &report.trials {
        for b in &t.blocks {
            doc.row(vec![
                t.trial.to_string(),
                t.seed.to_string(),
                t.resamples.to_string(),
                b.p.to_string(),
                (b.equal && b.degrees_match).to_string(),
                b.reduced.to_string(),
            ]);
        }
    }
    let total: usize = report.trials.iter().map(|t| t.resamples).sum();
    doc.note(format!("N={}: {} trials, {total} rejected draws, overall {}", report.order, report.trials.len(), pass_str(report.pass())));
    doc
}

pub fn oracle_document(report: &OracleReport) -> Document {
    let mut body = Map::new();
    body.insert("N".into(), report.order.into());
    body.insert(
        "state".into(),
        json!({ "lambda": report.state.lam, "gamma": report.state.gamma, "k": report.state.k_b }),
    );
    body.insert("tol".into(), report.tol.into());
    body.insert("pass".into(), report.pass().into());
    body.insert("max_abs_diff".into(), report.max_abs_diff.into());
    body.insert("eigenvalues".into(), report.oracle.eigenvalues.iter().map(|e| e.to_f64()).collect::<Vec<_>>().into());
    body.insert(
        "matches".into(),
        report
            .matches
            .iter()
            .map(|m| json!({
                "model": m.model,
                "model_exact": m.model_exact,
                "model_multiplicity": m.model_multiplicity,
                "oracle_multiplicity": m.oracle_multiplicity,
            }))
            .collect::<Vec<_>>()
            .into(),
    );
    body.insert("adjudication".into(), format!("{:?}", report.adjudication).into());
    body.insert("verdict".into(), report.verdict().into());
    let mut doc = Document::new("verify-oracle4d", body, &["model speed", "exact", "model mult", "oracle mult"]);
    for m in &report.matches {
        doc.row(vec![
            format!("{:+.12}", m.model),
            m.model_exact.clone(),
            m.model_multiplicity.to_string(),
            m.oracle_multiplicity.to_string(),
        ]);
    }
    doc.note(format!(
        "N={}: {} oracle eigenvalues, {} model speeds, max |diff| = {:.3e}, tol = {:.1e}: {}",
        report.order,
        report.oracle.eigenvalues.len(),
        report.model_total,
        report.max_abs_diff,
        report.tol,
        pass_str(report.pass())
    ));
    doc.note(report.verdict());
    doc
}

pub fn hankel_document(report: &HankelReport, pd: &[(usize, String, bool)]) -> Document {
    let pd_pass = pd.iter().all(|x| x.2);
    let mut body = Map::new();
    body.insert("pass".into(), (report.pass() && pd_pass).into());
    body.insert(
        "determinants".into(),
        report
            .cases
            .iter()
            .map(|c| json!({ "a": c.a, "d": c.d, "exact": c.exact.to_string(), "closed": c.closed.to_string() }))
            .collect::<Vec<_>>()
            .into(),
    );
    body.insert("prefactor_failures".into(), report.prefactor_failures.clone().into());
    body.insert(
        "positive_definite".into(),
        pd.iter().map(|(n, s, ok)| json!({ "N": n, "state": s, "pass": ok })).collect::<Vec<_>>().into(),
    );
    let mut doc = Document::new("verify-hankel", body, &["a", "d", "det", "closed form", "equal"]);
    for c in &report.cases {
        doc.row(vec![c.a.to_string(), c.d.to_string(), c.exact.to_string(), c.closed.to_string(), (c.exact == c.closed).to_string()]);
    }
    for f in &report.prefactor_failures {
        doc.note(format!("prefactor mismatch: {f}"));
    }
    let failed_pd = pd.iter().filter(|x| !x.2).count();
    doc.note(format!("positive definiteness: {} states checked, {failed_pd} failures", pd.len()));
    doc.note(format!("overall: {}", pass_str(report.pass() && pd_pass)));
    doc
}

pub fn sublum_document(report: &SublumReport) -> Document {
    let mut body = Map::new();
    body.insert("samples".into(), report.samples.into());
    body.insert("seed".into(), report.seed.into());
    body.insert("tol".into(), report.tol.into());
    body.insert("pass".into(), report.pass().into());
    body.insert("max_discriminant_gap".into(), report.max_discriminant_gap.into());
    body.insert("max_abs_root".into(), report.max_abs_root.into());
    body.insert("failures".into(), report.failures.clone().into());
    body.insert("monotonicity_flags".into(), report.monotonicity_flags.into());
    let mut doc = Document::new("verify-sublum", body, &["quantity", "value"]);
    doc.row(vec!["samples".into(), report.samples.to_string()]);
    doc.row(vec!["max |Δ/4 - closed form|".into(), format!("{:.3e}", report.max_discriminant_gap)]);
    doc.row(vec!["max |λ|".into(), format!("{:.15}", report.max_abs_root)]);
    doc.row(vec!["failures".into(), report.failures.len().to_string()]);
    doc.row(vec!["monotonicity flags (diagnostic)".into(), report.monotonicity_flags.to_string()]);
    for f in report.failures.iter().take(20) {
        doc.note(f.clone());
    }
    doc.note(format!("overall: {}", pass_str(report.pass())));
    doc
}

/// `(p, m, a, b, n, equal)` for one cross-generator comparison.
pub type CoeffCase = (usize, usize, usize, usize, usize, bool);

pub fn coeff_check_document(order: usize, cases: &[CoeffCase]) -> Document {
    let pass = cases.iter().all(|c| c.5);
    let mut body = Map::new();
    body.insert("N".into(), order.into());
    body.insert("cases".into(), cases.len().into());
    body.insert("pass".into(), pass.into());
    body.insert(
        "mismatches".into(),
        cases
            .iter()
            .filter(|c| !c.5)
            .map(|c| json!({ "p": c.0, "m": c.1, "a": c.2, "b": c.3, "n": c.4 }))
            .collect::<Vec<_>>()
            .into(),
    );
    let mut doc = Document::new("verify-coeffs", body, &["p", "m", "a", "b", "n", "equal"]);
    for c in cases.iter().filter(|c| !c.5) {
        doc.row(vec![c.0.to_string(), c.1.to_string(), c.2.to_string(), c.3.to_string(), c.4.to_string(), "false".into()]);
    }
    doc.note(format!("N≤{order}: {} index combinations compared, {}", cases.len(), pass_str(pass)));
    doc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::rational;

    #[test]
    fn rational_and_sqrt_forms() {
        assert_eq!(rational_json(&rational(-1, 3)), json!({ "num": "-1", "den": "3" }));
        let e = ExactForm::Sqrt { sign: -1, q: rational(1, 5) };
        assert_eq!(exact_json(&e), json!({ "sqrt_of": { "num": "1", "den": "5" }, "sign": -1 }));
    }

    #[test]
    fn renderings() {
        let mut doc = Document::new("demo", Map::new(), &["a", "bb"]);
        doc.row(vec!["1".into(), "x,y".into()]);
        assert_eq!(doc.render(Format::Csv), "a,bb\n1,\"x,y\"\n");
        assert_eq!(doc.render(Format::Table), "a  bb\n-  ---\n1  x,y\n");
        let v: Value = serde_json::from_str(&doc.render(Format::Json)).unwrap();
        assert_eq!(v["schema"], SCHEMA);
    }
}

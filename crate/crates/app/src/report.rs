//! Evaluation reports shared by the CLI and the HTTP service.

use serde::Serialize;

use pcm_core::io::emit_matrix;
use pcm_core::{cm_lower_bound, cm_triad, min_cm_completion, PcMatrix, Triad, TriadIndex, Verdict};

#[derive(Debug, Clone, Serialize)]
pub struct TriadReport {
    pub indices: TriadIndex,
    pub values: (f64, f64, f64),
    pub cm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub n: usize,
    pub given: usize,
    pub missing: usize,
    pub cm_star: f64,
    pub lower_bound: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub maximal_triads: Vec<TriadReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completion: Option<CompletionReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletionReport {
    pub cm_star: f64,
    /// Full grid, row-major, with the filled-in values.
    pub grid: Vec<Vec<f64>>,
    /// `(i, j, x_ij)` for each pair that was missing.
    pub filled: Vec<(usize, usize, f64)>,
    pub text: String,
}

fn triad_report(t: &Triad) -> Option<TriadReport> {
    let (a, b, c) = t.values()?;
    Some(TriadReport {
        indices: t.indices,
        values: (a, b, c),
        cm: cm_triad(a, b, c).ok()?,
    })
}

/// Minimal completion of `m`. Orders below 3 have no triads: CM* is 0 and
/// missing entries are filled with 1.
pub fn complete(m: &PcMatrix) -> pcm_core::Result<(f64, PcMatrix, Vec<TriadReport>)> {
    if m.order() < 3 {
        let mut c = m.clone();
        for (i, j) in m.missing_pairs() {
            c.insert(i, j, 1.0)?;
        }
        return Ok((0.0, c, Vec::new()));
    }
    let c = min_cm_completion(m)?;
    let triads = c.maximal_triads.iter().filter_map(triad_report).collect();
    Ok((c.cm_star, c.completion, triads))
}

pub fn completion_report(m: &PcMatrix, cm_star: f64, completed: &PcMatrix) -> CompletionReport {
    let n = m.order();
    let grid = (1..=n)
        .map(|i| (1..=n).map(|j| completed.get(i, j).unwrap_or(f64::NAN)).collect())
        .collect();
    let filled = m
        .missing_pairs()
        .into_iter()
        .filter_map(|(i, j)| Some((i, j, completed.get(i, j)?)))
        .collect();
    CompletionReport {
        cm_star,
        grid,
        filled,
        text: emit_matrix(completed, 6),
    }
}

pub fn evaluate(m: &PcMatrix, threshold: f64, with_completion: bool) -> pcm_core::Result<EvalReport> {
    let (cm_star, completed, maximal_triads) = complete(m)?;
    Ok(EvalReport {
        n: m.order(),
        given: m.given_count(),
        missing: m.missing_count(),
        cm_star,
        lower_bound: cm_lower_bound(m),
        threshold,
        verdict: if cm_star > threshold {
            Verdict::NotCompletable
        } else {
            Verdict::Completable
        },
        maximal_triads,
        completion: with_completion.then(|| completion_report(m, cm_star, &completed)),
    })
}

pub fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::Completable => "completable",
        Verdict::NotCompletable => "not completable",
    }
}

pub fn format_triad((i, j, k): TriadIndex) -> String {
    format!("({i},{j},{k})")
}

pub fn render_text(r: &EvalReport) -> String {
    let mut out = format!(
        "CM* = {:.3}  ({} at threshold {:.4})\n",
        r.cm_star,
        verdict_text(r.verdict),
        r.threshold
    );
    out.push_str(&format!(
        "order {}, {} given, {} missing; known-triad lower bound {:.3}\n",
        r.n, r.given, r.missing, r.lower_bound
    ));
    if !r.maximal_triads.is_empty() {
        let list: Vec<String> = r.maximal_triads.iter().map(|t| format_triad(t.indices)).collect();
        out.push_str(&format!("maximal triads: {}\n", list.join(" ")));
    }
    if let Some(c) = &r.completion {
        out.push_str("completion:\n");
        out.push_str(&c.text);
    }
    out
}

pub fn render_triads(r: &EvalReport) -> String {
    let mut out = format!("CM* = {:.6}\n", r.cm_star);
    for t in &r.maximal_triads {
        let (a, b, c) = t.values;
        out.push_str(&format!(
            "{}  a = {a:.6}  b = {b:.6}  c = {c:.6}  CM = {:.6}\n",
            format_triad(t.indices),
            t.cm
        ));
    }
    out
}

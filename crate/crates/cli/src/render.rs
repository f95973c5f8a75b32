//! Text, JSON and DOT renderings of an evaluation.

use std::fmt::Write;

use m0n::{DecoratedTree, EvalResult, Reason, StableTree};
use serde_json::{json, Value};

/// An evaluated product together with the decorated stratum it ran on
/// (absent when the divisors do not meet).
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub n: u32,
    pub decorated: Option<DecoratedTree>,
    pub result: EvalResult,
}

pub(crate) fn reason_text(reason: Reason) -> &'static str {
    match reason {
        Reason::Ok => "",
        Reason::Empty => " (empty intersection)",
        Reason::NoBalance => " (no balanced weighting)",
    }
}

fn psi_text(d: &DecoratedTree, v: m0n::VertexId) -> String {
    d.psi_at(v)
        .iter()
        .map(|&(l, w)| {
            if w == 1 {
                format!("psi{l}")
            } else {
                format!("psi{l}^{w}")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn text(ev: &Evaluation) -> String {
    let r = &ev.result;
    let mut out = String::new();
    writeln!(out, "value = {}{}", r.value, reason_text(r.reason)).unwrap();
    writeln!(out, "sign = {}", r.sign).unwrap();
    let Some(d) = &ev.decorated else {
        writeln!(out, "the divisors do not pairwise intersect").unwrap();
        return out;
    };
    let t = d.tree();
    writeln!(
        out,
        "stratum: n = {}, codim {}, dim {}",
        ev.n,
        t.codim(),
        t.dim()
    )
    .unwrap();
    if t.codim() > 0 {
        writeln!(out, "edges:").unwrap();
    }
    for e in t.edge_ids() {
        let edge = t.edge(e);
        write!(
            out,
            "  {e}  {}  {}--{}  k = {}",
            edge.split,
            edge.ends[0],
            edge.ends[1],
            d.edge_weight(e)
        )
        .unwrap();
        if let Some(w) = &r.weighting {
            let [a, b] = w.halves(e);
            write!(out, "  halves {a} | {b}").unwrap();
        }
        if let Some((_, f)) = r.edge_factors.get(e.0) {
            write!(out, "  factor {f}").unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "vertices:").unwrap();
    for v in t.vertex_ids() {
        let vx = t.vertex(v);
        write!(
            out,
            "  {v}  deg {}  n(v) = {}",
            t.degree(v),
            t.vertex_dim(v)
        )
        .unwrap();
        if !vx.leaves.is_empty() {
            write!(out, "  leaves {}", vx.leaves).unwrap();
        }
        let psi = psi_text(d, v);
        if !psi.is_empty() {
            write!(out, "  {psi}").unwrap();
        }
        if let Some((_, f)) = r.vertex_factors.get(v.0) {
            write!(out, "  factor {f}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn splits_json(t: &StableTree) -> Vec<Vec<u32>> {
    t.splits().map(|s| s.block().iter().collect()).collect()
}

pub fn json_value(ev: &Evaluation) -> Value {
    let r = &ev.result;
    let (splits, edge_weights, vertex_dims) = match &ev.decorated {
        Some(d) => (
            splits_json(d.tree()),
            d.edge_weights().to_vec(),
            d.tree().vertex_ids().map(|v| d.vertex_dim(v)).collect(),
        ),
        None => (Vec::new(), Vec::new(), Vec::new()),
    };
    let balanced: Vec<Value> = match (&ev.decorated, &r.weighting) {
        (Some(d), Some(w)) => d
            .tree()
            .edge_ids()
            .map(|e| {
                json!({
                    "edge": d.tree().edge(e).split.block().iter().collect::<Vec<u32>>(),
                    "halves": w.halves(e),
                })
            })
            .collect(),
        _ => Vec::new(),
    };
    json!({
        "n": ev.n,
        "value": r.value.to_string(),
        "sign": r.sign,
        "reason": r.reason.name(),
        "stratum": { "splits": splits },
        "edge_weights": edge_weights,
        "vertex_dims": vertex_dims,
        "balanced": balanced,
        "factors": {
            "edges": r.edge_factors.iter().map(|(_, f)| f.to_string()).collect::<Vec<_>>(),
            "vertices": r.vertex_factors.iter().map(|(_, f)| f.to_string()).collect::<Vec<_>>(),
        },
    })
}

pub fn json(ev: &Evaluation) -> String {
    let mut s = serde_json::to_string_pretty(&json_value(ev)).expect("json values serialize");
    s.push('\n');
    s
}

/// Vertices labelled `n(v)`, edges `k(e)` with the two half-weights at their
/// ends, psi weights as dashed pendant edges.
pub fn dot(ev: &Evaluation) -> String {
    let r = &ev.result;
    let mut out = String::from("graph decorated {\n  node [shape=circle];\n");
    writeln!(
        out,
        "  label=\"value = {}{}\";",
        r.value,
        reason_text(r.reason)
    )
    .unwrap();
    if let Some(d) = &ev.decorated {
        let t = d.tree();
        for v in t.vertex_ids() {
            writeln!(
                out,
                "  {v} [label=\"{}\", tooltip=\"{v} leaves {}\"];",
                t.vertex_dim(v),
                t.vertex(v).leaves
            )
            .unwrap();
        }
        for e in t.edge_ids() {
            let [a, b] = t.edge(e).ends;
            write!(out, "  {a} -- {b} [label=\"{}\"", d.edge_weight(e)).unwrap();
            if let Some(w) = &r.weighting {
                let [ha, hb] = w.halves(e);
                write!(out, ", taillabel=\"{ha}\", headlabel=\"{hb}\"").unwrap();
            }
            out.push_str("];\n");
        }
        for (&l, &w) in d.psi_weights() {
            let v = t.leaf_vertex(l);
            writeln!(out, "  psi{l} [shape=plaintext, label=\"psi{l}\"];").unwrap();
            writeln!(out, "  {v} -- psi{l} [style=dashed, label=\"{w}\"];").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

//! Step-by-step account of an evaluation: stratum construction (optionally
//! through the blue/red colorings), decoration, greedy balancing, factors.

use std::fmt::Write;

use m0n::{
    balance_trace, color_for_divisor, evaluate, meet_divisor, product_to_decorated, Branch, Color,
    Error, StableTree,
};

use crate::parse::Expression;
use crate::render::reason_text;
use crate::CliError;

fn color_name(c: Color) -> &'static str {
    c.name()
}

pub fn explain(expr: &Expression, coloring: bool) -> Result<String, CliError> {
    let mut out = String::new();
    let product = expr.to_product()?;
    let decorated = product_to_decorated(&product)?;
    writeln!(out, "product on n = {}: {expr}", expr.n()).unwrap();
    writeln!(
        out,
        "degree {} against dim = n - 3 = {}",
        product.total_degree(),
        expr.ground.dim()
    )
    .unwrap();

    writeln!(out, "\n# stratum").unwrap();
    let mut tree = StableTree::trivial(expr.ground);
    for (split, exponent) in product.divisor_powers() {
        writeln!(out, "insert {split} (exponent {exponent})").unwrap();
        if coloring {
            match color_for_divisor(&tree, split) {
                Ok(c) => {
                    for e in tree.edge_ids() {
                        writeln!(
                            out,
                            "  edge {e} {}: {}",
                            tree.edge(e).split,
                            color_name(c.edge_color(e))
                        )
                        .unwrap();
                    }
                    writeln!(
                        out,
                        "  blue leaves {}  red leaves {}",
                        c.blue_labels(),
                        c.red_labels()
                    )
                    .unwrap();
                    let path: Vec<String> = c.path.iter().map(|v| v.to_string()).collect();
                    writeln!(
                        out,
                        "  path {}  split vertex {}",
                        path.join(" "),
                        c.split_vertex
                    )
                    .unwrap();
                    for (b, col) in c.branches() {
                        let name = match b {
                            Branch::Leaf(l) => format!("leaf {l}"),
                            Branch::Edge(e) => format!("edge {e}"),
                        };
                        writeln!(
                            out,
                            "    branch {name} {{{}}}: {}",
                            c.branch_labels(c.split_vertex, b),
                            color_name(col)
                        )
                        .unwrap();
                    }
                    if c.is_existing_edge() {
                        writeln!(out, "  one branch differs: the divisor is already an edge")
                            .unwrap();
                    } else {
                        writeln!(out, "  new edge separates the blue branches from the red")
                            .unwrap();
                    }
                    tree = c.separate()?;
                }
                Err(Error::EdgeConditionFails(w)) => {
                    writeln!(out, "  edge {w} is incompatible with {split}").unwrap();
                    writeln!(out, "\nvalue = 0{}", reason_text(m0n::Reason::Empty)).unwrap();
                    return Ok(out);
                }
                Err(e) => return Err(e.into()),
            }
        } else {
            match meet_divisor(&tree, split)? {
                Some(t) => tree = t,
                None => {
                    writeln!(out, "  incompatible with an edge of the current stratum").unwrap();
                    writeln!(out, "\nvalue = 0{}", reason_text(m0n::Reason::Empty)).unwrap();
                    return Ok(out);
                }
            }
        }
        writeln!(out, "  stratum now {tree}").unwrap();
    }

    let decorated = decorated.expect("support meets, as just constructed");
    let t = decorated.tree();
    debug_assert_eq!(t, &tree);
    writeln!(out, "\n# decoration").unwrap();
    for v in t.vertex_ids() {
        let psi: Vec<String> = decorated
            .psi_at(v)
            .iter()
            .map(|(l, w)| format!("psi{l}^{w}"))
            .collect();
        writeln!(
            out,
            "{v}: leaves {{{}}}  n(v) = {}{}",
            t.vertex(v).leaves,
            t.vertex_dim(v),
            if psi.is_empty() {
                String::new()
            } else {
                format!("  {}", psi.join(" "))
            }
        )
        .unwrap();
    }
    for e in t.edge_ids() {
        let edge = t.edge(e);
        writeln!(
            out,
            "{e}: {}--{}  {}  k(e) = {}",
            edge.ends[0],
            edge.ends[1],
            edge.split,
            decorated.edge_weight(e)
        )
        .unwrap();
    }

    writeln!(out, "\n# balancing").unwrap();
    let (steps, weighting) = balance_trace(&decorated)?;
    for s in &steps {
        let other = t.other_end(s.edge, s.vertex);
        writeln!(
            out,
            "{} is a leaf on {}: k({},{}) = {}, k({},{}) = {} - {} = {}",
            s.vertex,
            s.edge,
            s.vertex,
            s.edge,
            s.here,
            other,
            s.edge,
            decorated.edge_weight(s.edge),
            s.here,
            s.there
        )
        .unwrap();
    }
    if weighting.is_none() {
        writeln!(out, "no balanced weighting").unwrap();
    }

    writeln!(out, "\n# result").unwrap();
    let r = evaluate(&decorated)?;
    writeln!(
        out,
        "sign (-1)^{} = {}",
        decorated.edge_weight_sum(),
        r.sign
    )
    .unwrap();
    if let Some(w) = &r.weighting {
        for (e, f) in &r.edge_factors {
            let [a, b] = w.halves(*e);
            writeln!(
                out,
                "edge {e}: multinomial({}; {a}, {b}) = {f}",
                decorated.edge_weight(*e)
            )
            .unwrap();
        }
        for (v, f) in &r.vertex_factors {
            let parts: Vec<String> = w.parts_at(*v).iter().map(|p| p.to_string()).collect();
            writeln!(
                out,
                "vertex {v}: multinomial({}; {}) = {f}",
                t.vertex_dim(*v),
                parts.join(", ")
            )
            .unwrap();
        }
    }
    writeln!(out, "value = {}{}", r.value, reason_text(r.reason)).unwrap();
    Ok(out)
}

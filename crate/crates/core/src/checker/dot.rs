//! Graphviz export of explored systems.

use std::fmt::Write;

use crate::checker::explore::{EdgeLabel, TransitionSystem};
use crate::model::ExtValue;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT text with one vertex per state (decoded global state, plus rank when
/// given) and sinks drawn as double circles.
pub fn to_dot(ts: &TransitionSystem, name: &str, ranks: Option<&[ExtValue]>) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(name)).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    for id in 0..ts.len() {
        let mut label = ts.global(id).to_string();
        if let Some(r) = ranks {
            write!(label, "\\nrank {}", r[id]).unwrap();
        }
        let shape = if ts.out_degree(id) == 0 { "doublecircle" } else { "ellipse" };
        let style = if ts.initial().contains(&id) { ", style=bold" } else { "" };
        writeln!(out, "  s{id} [label=\"{}\", shape={shape}{style}];", escape(&label).replace("\\\\n", "\\n")).unwrap();
    }
    for (s, t, l) in ts.edges() {
        let label = match l {
            EdgeLabel::Move(v) => v.to_string(),
            EdgeLabel::Delivery(c) => format!("c{c}"),
        };
        writeln!(out, "  s{s} -> s{t} [label=\"{label}\"];").unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::MaximalMatching;
    use crate::checker::explore::{explore, FreshRelation, DEFAULT_BUDGET};
    use crate::checker::props::annotate;
    use crate::graph::fig4;
    use crate::model::Algorithm;

    #[test]
    fn sinks_are_double_circled() {
        let mm = MaximalMatching::new(fig4()).unwrap();
        let ts = explore(&FreshRelation::new(&mm), [mm.default_init()], DEFAULT_BUDGET).unwrap();
        let ann = annotate(&ts, &mm);
        let dot = to_dot(&ts, "fig4", Some(&ann.rank));
        assert_eq!(dot.matches("doublecircle").count(), 3);
        assert_eq!(dot.matches(" -> ").count(), ts.edge_count());
        assert!(dot.contains("⟨⊤,⊤,⊤,⊤⟩\\nrank 8"));
        assert!(dot.starts_with("digraph \"fig4\" {"));
    }
}

//! Graphviz output: Hasse diagrams and component graphs.

use std::fmt::Write as _;

use crate::decomposition::component_graph;
use crate::poset::Poset;

fn quote(s: &str) -> String {
    format!("\"{s}\"")
}

/// Cover edges drawn bottom-up, minimal points on the lowest rank.
pub fn hasse(p: &Poset) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=circle];\n");
    for name in p.names() {
        writeln!(out, "  {};", quote(name)).unwrap();
    }
    let minimal: Vec<String> = p.minimal().iter().map(|x| quote(p.name(x))).collect();
    writeln!(out, "  {{ rank=min; {}; }}", minimal.join("; ")).unwrap();
    for (x, y) in p.covers() {
        writeln!(out, "  {} -> {};", quote(p.name(x)), quote(p.name(y))).unwrap();
    }
    out.push_str("}\n");
    out
}

/// One node per component of `P^×`, one edge per minmax covering pair.
pub fn component_graph_dot(p: &Poset) -> String {
    let g = component_graph(p);
    let mut out = String::from("graph components {\n  node [shape=box];\n");
    for (i, &k) in g.vertices.iter().enumerate() {
        writeln!(out, "  K{i} [label={}];", quote(&p.names_of(k).join(","))).unwrap();
    }
    for e in &g.edges {
        writeln!(
            out,
            "  K{} -- K{} [label={}];",
            e.lower_component,
            e.upper_component,
            quote(&format!("{}<{}", p.name(e.lower), p.name(e.upper)))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn hasse_lists_covers_only() {
        let out = hasse(&fixtures::ch3());
        assert!(out.contains("\"x\" -> \"y\";") && out.contains("\"y\" -> \"z\";"));
        assert!(!out.contains("\"x\" -> \"z\""));
        assert!(out.contains("rank=min; \"x\";"));
    }

    #[test]
    fn component_graph_of_loopy_has_a_loop() {
        let out = component_graph_dot(&fixtures::loopy());
        assert!(out.contains("K0 -- K0"));
    }
}

//! Graphviz DOT output for forwarding graphs.
//!
//! Output is deterministic: clusters in flex-group order, nodes and edges
//! sorted by instance id. Splitters draw as diamonds, entries and exits get
//! a double border, flexible groups become labeled clusters.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::{ForwardingGraph, NodeRole};

pub fn to_dot(graph: &ForwardingGraph) -> String {
    let mut out = String::from("digraph service {\n  rankdir=LR;\n  node [fontname=\"sans-serif\"];\n");

    let mut clustered: Vec<&str> = Vec::new();
    for (i, group) in graph.flex_groups.iter().enumerate() {
        out.push_str(&format!(
            "  subgraph cluster_{i} {{\n    label={};\n    style=dashed;\n",
            quote(group.kind.as_str())
        ));
        for id in &group.members {
            if let Some(node) = graph.nodes.get(id) {
                out.push_str("    ");
                out.push_str(&node_stmt(graph, &node.id));
                clustered.push(id);
            }
        }
        out.push_str("  }\n");
    }

    for id in graph.nodes.keys() {
        if !clustered.contains(&id.as_str()) {
            out.push_str("  ");
            out.push_str(&node_stmt(graph, id));
        }
    }

    for (a, b) in &graph.edges {
        out.push_str(&format!("  {} -> {};\n", quote(a), quote(b)));
    }

    out.push_str("}\n");
    out
}

fn node_stmt(graph: &ForwardingGraph, id: &str) -> String {
    let node = &graph.nodes[id];
    let mut attrs = format!("label={}", quote(node.function.as_str()));
    if node.role == NodeRole::Splitter {
        attrs.push_str(", shape=diamond");
    }
    if graph.entries.contains(&node.id) || graph.exits.contains(&node.id) {
        attrs.push_str(", peripheries=2");
    }
    format!("{} [{}];\n", quote(id), attrs)
}

/// DOT double-quoted string with backslash escapes for quote and backslash.
fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

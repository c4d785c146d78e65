//! Concrete forwarding graphs produced by expansion.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::diag::{Code, Diagnostic};
use crate::name::FunctionName;

/// Globally unique node id, a slash-joined path into the model plus the
/// function name (`c0/k0/NAT`); duplicate paths get a `#2`, `#3`, ... suffix.
pub type InstanceId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Plain,
    /// Fan-out classifier at the head of a split.
    Splitter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeInstance {
    pub id: InstanceId,
    pub function: FunctionName,
    pub role: NodeRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlexKind {
    BestBinding,
    AllBindings,
}

impl FlexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FlexKind::BestBinding => "best-binding",
            FlexKind::AllBindings => "all-bindings",
        }
    }
}

/// A set of nodes whose mutual order is flexible. Emitted for `all-bindings`
/// groups always, and for `best-binding` groups in annotate mode (where the
/// mesh stands in for the not-yet-chosen order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlexGroup {
    pub kind: FlexKind,
    pub members: BTreeSet<InstanceId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ForwardingGraph {
    pub nodes: BTreeMap<InstanceId, NodeInstance>,
    pub edges: BTreeSet<(InstanceId, InstanceId)>,
    /// Where traffic enters; order follows the model.
    pub entries: Vec<InstanceId>,
    /// Where traffic leaves.
    pub exits: Vec<InstanceId>,
    pub flex_groups: Vec<FlexGroup>,
}

impl ForwardingGraph {
    pub fn node(&self, id: &str) -> Option<&NodeInstance> {
        self.nodes.get(id)
    }

    /// Internal consistency: endpoints exist, no self-loops, entry and exit
    /// lists and group members name real nodes. Expansion output always
    /// passes; hand-built graphs may not.
    pub fn integrity_issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        for (a, b) in &self.edges {
            if !self.nodes.contains_key(a) {
                issues.push(format!("edge source {a} is not a node"));
            }
            if !self.nodes.contains_key(b) {
                issues.push(format!("edge target {b} is not a node"));
            }
            if a == b {
                issues.push(format!("self-loop on {a}"));
            }
        }
        for id in self.entries.iter().chain(&self.exits) {
            if !self.nodes.contains_key(id) {
                issues.push(format!("entry/exit {id} is not a node"));
            }
        }
        for group in &self.flex_groups {
            for id in &group.members {
                if !self.nodes.contains_key(id) {
                    issues.push(format!("flex group member {id} is not a node"));
                }
            }
        }
        issues
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub entries: usize,
    pub exits: usize,
    pub flex_groups: usize,
    /// True when some sink (out-degree zero) is not a declared exit.
    pub has_dangling_exits: bool,
}

impl core::fmt::Display for GraphStats {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "nodes={} edges={} entries={} exits={} flexgroups={}",
            self.nodes, self.edges, self.entries, self.exits, self.flex_groups
        )
    }
}

pub fn graph_stats(graph: &ForwardingGraph) -> GraphStats {
    let mut with_out: BTreeSet<&InstanceId> = BTreeSet::new();
    for (a, _) in &graph.edges {
        with_out.insert(a);
    }
    let has_dangling_exits = graph
        .nodes
        .keys()
        .any(|id| !with_out.contains(id) && !graph.exits.contains(id));
    GraphStats {
        nodes: graph.nodes.len(),
        edges: graph.edges.len(),
        entries: graph.entries.len(),
        exits: graph.exits.len(),
        flex_groups: graph.flex_groups.len(),
        has_dangling_exits,
    }
}

/// Every node must be reachable from some entry by following edges forward.
pub fn reachability_check(graph: &ForwardingGraph) -> Vec<Diagnostic> {
    let mut succ: BTreeMap<&InstanceId, Vec<&InstanceId>> = BTreeMap::new();
    for (a, b) in &graph.edges {
        succ.entry(a).or_default().push(b);
    }
    let mut seen: BTreeSet<&InstanceId> = BTreeSet::new();
    let mut work: Vec<&InstanceId> = graph.entries.iter().collect();
    while let Some(id) = work.pop() {
        if !seen.insert(id) {
            continue;
        }
        if let Some(next) = succ.get(id) {
            work.extend(next.iter().copied());
        }
    }
    graph
        .nodes
        .keys()
        .filter(|id| !seen.contains(id))
        .map(|id| {
            Diagnostic::error(
                Code::UnreachableNode,
                format!("/nodes/{id}"),
                format!("node {id} is not reachable from any entry"),
            )
        })
        .collect()
}

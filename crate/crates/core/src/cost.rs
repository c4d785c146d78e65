//! Cost models and best-candidate selection.
//!
//! A cost model maps a forwarding graph to a finite f64; lower is better.
//! Selection is deterministic: ties keep the earliest candidate, so the
//! result depends only on candidate order, which expansion fixes.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::ForwardingGraph;
use crate::name::FunctionName;

pub trait CostModel {
    fn name(&self) -> &str;
    fn evaluate(&self, graph: &ForwardingGraph) -> f64;
}

impl CostModel for Box<dyn CostModel> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn evaluate(&self, graph: &ForwardingGraph) -> f64 {
        (**self).evaluate(graph)
    }
}

/// Fewest edges wins; the simplest proxy for forwarding overhead.
#[derive(Debug, Clone, Copy, Default)]
pub struct EdgeCount;

impl CostModel for EdgeCount {
    fn name(&self) -> &str {
        "edge-count"
    }

    fn evaluate(&self, graph: &ForwardingGraph) -> f64 {
        graph.edges.len() as f64
    }
}

/// Counts adjacency violations. A preference `(before, after)` wants
/// `before` somewhere upstream-adjacent to `after`; an edge from `after`
/// into `before` violates it. Zero cost means no preference is inverted.
#[derive(Debug, Clone, Default)]
pub struct AdjacencyPreference {
    prefs: Vec<(FunctionName, FunctionName)>,
}

impl AdjacencyPreference {
    pub fn new(prefs: Vec<(FunctionName, FunctionName)>) -> Self {
        AdjacencyPreference { prefs }
    }

    pub fn push(&mut self, before: FunctionName, after: FunctionName) {
        self.prefs.push((before, after));
    }
}

impl CostModel for AdjacencyPreference {
    fn name(&self) -> &str {
        "adjacency-pref"
    }

    fn evaluate(&self, graph: &ForwardingGraph) -> f64 {
        let mut violations = 0usize;
        for (a, b) in &graph.edges {
            let fa = &graph.nodes[a].function;
            let fb = &graph.nodes[b].function;
            for (before, after) in &self.prefs {
                if fa == after && fb == before {
                    violations += 1;
                }
            }
        }
        violations as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectError {
    /// No candidates to choose from.
    EmptyCandidates,
}

impl fmt::Display for SelectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectError::EmptyCandidates => write!(f, "no candidate graphs to select from"),
        }
    }
}

impl core::error::Error for SelectError {}

#[derive(Debug, Clone, Copy)]
pub struct Selected<'a> {
    pub graph: &'a ForwardingGraph,
    /// Position in the candidate slice; on cost ties the smallest index wins.
    pub index: usize,
    pub cost: f64,
}

pub fn select_best<'a>(
    candidates: &'a [ForwardingGraph],
    cost: &dyn CostModel,
) -> Result<Selected<'a>, SelectError> {
    let mut best: Option<Selected<'a>> = None;
    for (index, graph) in candidates.iter().enumerate() {
        let value = cost.evaluate(graph);
        let better = match &best {
            None => true,
            Some(b) => value.total_cmp(&b.cost) == core::cmp::Ordering::Less,
        };
        if better {
            best = Some(Selected {
                graph,
                index,
                cost: value,
            });
        }
    }
    best.ok_or(SelectError::EmptyCandidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_support::graph;

    #[test]
    fn edge_count_counts_edges() {
        let g = graph(
            &["a/A", "b/B", "c/C"],
            &[("a/A", "b/B"), ("b/B", "c/C"), ("a/A", "c/C")],
            &["a/A"],
            &["c/C"],
        );
        assert_eq!(EdgeCount.evaluate(&g), 3.0);
        assert_eq!(EdgeCount.name(), "edge-count");
    }

    #[test]
    fn adjacency_violation_is_after_feeding_before() {
        let f = |s: &str| FunctionName::new(s).unwrap();
        let wants_a_first = AdjacencyPreference::new(alloc::vec![(f("A"), f("B"))]);
        let a_then_b = graph(&["x/A", "y/B"], &[("x/A", "y/B")], &["x/A"], &["y/B"]);
        let b_then_a = graph(&["x/B", "y/A"], &[("x/B", "y/A")], &["x/B"], &["y/A"]);
        assert_eq!(wants_a_first.evaluate(&a_then_b), 0.0);
        assert_eq!(wants_a_first.evaluate(&b_then_a), 1.0);
        assert_eq!(wants_a_first.name(), "adjacency-pref");
    }

    #[test]
    fn adjacency_counts_each_violating_edge_and_pref() {
        let f = |s: &str| FunctionName::new(s).unwrap();
        // Mesh of A and B: both directions present; each preference is
        // violated by exactly one of the two edges.
        let mesh = graph(
            &["x/A", "y/B"],
            &[("x/A", "y/B"), ("y/B", "x/A")],
            &["x/A", "y/B"],
            &["x/A", "y/B"],
        );
        let one = AdjacencyPreference::new(alloc::vec![(f("A"), f("B"))]);
        assert_eq!(one.evaluate(&mesh), 1.0);
        let both = AdjacencyPreference::new(alloc::vec![(f("A"), f("B")), (f("B"), f("A"))]);
        assert_eq!(both.evaluate(&mesh), 2.0);
    }

    #[test]
    fn unrelated_functions_never_violate() {
        let f = |s: &str| FunctionName::new(s).unwrap();
        let g = graph(&["x/C", "y/D"], &[("x/C", "y/D")], &["x/C"], &["y/D"]);
        let model = AdjacencyPreference::new(alloc::vec![(f("A"), f("B"))]);
        assert_eq!(model.evaluate(&g), 0.0);
    }

    #[test]
    fn select_best_picks_minimum() {
        let g1 = graph(&["a/A", "b/B"], &[("a/A", "b/B")], &["a/A"], &["b/B"]);
        let g2 = graph(&["a/A"], &[], &["a/A"], &["a/A"]);
        let candidates = alloc::vec![g1, g2];
        let sel = select_best(&candidates, &EdgeCount).unwrap();
        assert_eq!(sel.index, 1);
        assert_eq!(sel.cost, 0.0);
    }

    #[test]
    fn ties_keep_the_earliest_candidate() {
        let g1 = graph(&["a/A"], &[], &["a/A"], &["a/A"]);
        let g2 = graph(&["b/B"], &[], &["b/B"], &["b/B"]);
        let candidates = alloc::vec![g1.clone(), g2];
        let sel = select_best(&candidates, &EdgeCount).unwrap();
        assert_eq!(sel.index, 0);
        assert_eq!(sel.graph, &g1);
    }

    #[test]
    fn empty_candidates_is_an_error() {
        assert_eq!(
            select_best(&[], &EdgeCount).unwrap_err(),
            SelectError::EmptyCandidates
        );
    }
}

//! Flat component model: the YANG-shaped form of a service.
//!
//! A model is a set of named components, each holding an ordered list of
//! compositions. Nesting is expressed by reference: a split branch points at
//! a component, and a `link-to-composition` entry splices another component
//! in place. The reference graph over components must be acyclic.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::num::NonZeroU8;

use crate::diag::{Code, Diagnostic};
use crate::name::{ComponentId, CompositionId, FunctionName};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentModel {
    pub starting_component: ComponentId,
    pub components: Vec<Component>,
}

impl ComponentModel {
    pub fn component(&self, id: &ComponentId) -> Option<&Component> {
        self.components.iter().find(|c| &c.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: ComponentId,
    /// Traversed in order; must be non-empty.
    pub compositions: Vec<CompositionEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionEntry {
    pub id: CompositionId,
    pub body: FlatComposition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlatComposition {
    Single(FunctionName),
    /// Fixed-order chain. Kept distinct from repeated [`FlatComposition::Single`]
    /// entries so instance documents round-trip their spelling.
    Sequence(Vec<FunctionName>),
    BestBinding(Vec<FunctionName>),
    AllBindings(Vec<FunctionName>),
    Split(FlatSplit),
    /// Splice of another component at this position.
    LinkRef(ComponentId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatSplit {
    pub splitter: FunctionName,
    /// Empty means no best-binding stage between splitter and branches.
    pub pre: Vec<FunctionName>,
    pub branches: Vec<FlatBranch>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlatBranch {
    Normal {
        target: ComponentId,
        replications: NonZeroU8,
    },
    Pass,
}

/// Where references stand: what dangles and what cycles.
///
/// Branch targets and link targets are reported separately because callers
/// treat them differently: a dangling branch is always fatal, while a
/// dangling link may legitimately point into a catalog that a later
/// resolution step will import.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReferenceReport {
    pub start_missing: bool,
    /// (path, target) pairs in model order.
    pub dangling_branches: Vec<(String, ComponentId)>,
    pub dangling_links: Vec<(String, ComponentId)>,
    /// Each cycle lists its members in model order.
    pub cycles: Vec<Vec<ComponentId>>,
}

impl ReferenceReport {
    pub fn is_clean(&self) -> bool {
        !self.start_missing
            && self.dangling_branches.is_empty()
            && self.dangling_links.is_empty()
            && self.cycles.is_empty()
    }
}

pub fn reference_report(model: &ComponentModel) -> ReferenceReport {
    let mut report = ReferenceReport::default();
    let ids: Vec<&ComponentId> = model.components.iter().map(|c| &c.id).collect();
    let position = |id: &ComponentId| ids.iter().position(|x| *x == id);

    if position(&model.starting_component).is_none() {
        report.start_missing = true;
    }

    // Adjacency over component indices, entry order, first occurrence only.
    let n = model.components.len();
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for (v, comp) in model.components.iter().enumerate() {
        for entry in &comp.compositions {
            let base = format!("/components/{}/compositions/{}", comp.id, entry.id);
            match &entry.body {
                FlatComposition::LinkRef(target) => match position(target) {
                    Some(w) => {
                        if !adj[v].contains(&w) {
                            adj[v].push(w);
                        }
                    }
                    None => report.dangling_links.push((base, target.clone())),
                },
                FlatComposition::Split(split) => {
                    for (i, branch) in split.branches.iter().enumerate() {
                        if let FlatBranch::Normal { target, .. } = branch {
                            match position(target) {
                                Some(w) => {
                                    if !adj[v].contains(&w) {
                                        adj[v].push(w);
                                    }
                                }
                                None => report
                                    .dangling_branches
                                    .push((format!("{base}/branches/{i}"), target.clone())),
                            }
                        }
                    }
                }
                _ => {}
            }
        }
    }

    for scc in tarjan_sccs(&adj) {
        let cyclic = scc.len() > 1 || adj[scc[0]].contains(&scc[0]);
        if cyclic {
            let mut members = scc;
            members.sort_unstable();
            report
                .cycles
                .push(members.into_iter().map(|v| model.components[v].id.clone()).collect());
        }
    }
    report.cycles.sort();
    report
}

/// Iterative Tarjan; returns every strongly connected component.
fn tarjan_sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index: Vec<Option<usize>> = alloc::vec![None; n];
    let mut lowlink: Vec<usize> = alloc::vec![0; n];
    let mut on_stack: Vec<bool> = alloc::vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    struct Frame {
        v: usize,
        edge: usize,
    }

    for root in 0..n {
        if index[root].is_some() {
            continue;
        }
        let mut frames = alloc::vec![Frame { v: root, edge: 0 }];
        index[root] = Some(next_index);
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(frame) = frames.last_mut() {
            let v = frame.v;
            if frame.edge < adj[v].len() {
                let w = adj[v][frame.edge];
                frame.edge += 1;
                match index[w] {
                    None => {
                        index[w] = Some(next_index);
                        lowlink[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push(Frame { v: w, edge: 0 });
                    }
                    Some(wi) => {
                        if on_stack[w] && wi < lowlink[v] {
                            lowlink[v] = wi;
                        }
                    }
                }
            } else {
                if lowlink[v] == index[v].unwrap() {
                    let mut scc = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        scc.push(w);
                        if w == v {
                            break;
                        }
                    }
                    sccs.push(scc);
                }
                frames.pop();
                if let Some(parent) = frames.last() {
                    if lowlink[v] < lowlink[parent.v] {
                        lowlink[parent.v] = lowlink[v];
                    }
                }
            }
        }
    }
    sccs
}

/// Reference findings as diagnostics.
pub fn check_references(model: &ComponentModel) -> Vec<Diagnostic> {
    let report = reference_report(model);
    let mut diags = Vec::new();
    if report.start_missing {
        diags.push(Diagnostic::error(
            Code::BadStart,
            "/starting-component",
            format!(
                "starting component {} is not defined",
                model.starting_component
            ),
        ));
    }
    for (path, target) in &report.dangling_branches {
        diags.push(Diagnostic::error(
            Code::UnresolvedRef,
            path.as_str(),
            format!("branch target {target} is not defined"),
        ));
    }
    for (path, target) in &report.dangling_links {
        diags.push(Diagnostic::error(
            Code::UnresolvedRef,
            path.as_str(),
            format!("link target {target} is not defined"),
        ));
    }
    for cycle in &report.cycles {
        let mut names: Vec<&str> = cycle.iter().map(|id| id.as_str()).collect();
        names.push(names[0]);
        diags.push(Diagnostic::error(
            Code::CyclicRef,
            format!("/components/{}", cycle[0]),
            format!("reference cycle: {}", names.join(" -> ")),
        ));
    }
    diags
}

/// Structure plus references. An empty result (no errors) means the model is
/// safe to expand, serialize, or store.
pub fn validate_model(model: &ComponentModel) -> Vec<Diagnostic> {
    let mut diags = validate_structure(model);
    diags.extend(check_references(model));
    diags
}

/// Structure only: id uniqueness and per-composition body shape. Unlike
/// [`validate_model`] this accepts unresolved references, so it is the right
/// gate for serializing a model that still links to external components.
pub fn validate_structure(model: &ComponentModel) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen: Vec<&ComponentId> = Vec::new();
    let mut dup_reported: Vec<&ComponentId> = Vec::new();
    for comp in &model.components {
        if seen.contains(&&comp.id) {
            if !dup_reported.contains(&&comp.id) {
                diags.push(Diagnostic::error(
                    Code::DupId,
                    format!("/components/{}", comp.id),
                    format!("duplicate component id {}", comp.id),
                ));
                dup_reported.push(&comp.id);
            }
        } else {
            seen.push(&comp.id);
        }

        let cpath = format!("/components/{}", comp.id);
        if comp.compositions.is_empty() {
            diags.push(Diagnostic::error(
                Code::EmptyComponent,
                cpath.as_str(),
                "component has no compositions",
            ));
        }
        let mut kseen: Vec<&CompositionId> = Vec::new();
        for entry in &comp.compositions {
            if kseen.contains(&&entry.id) {
                diags.push(Diagnostic::error(
                    Code::DupId,
                    format!("{cpath}/compositions/{}", entry.id),
                    format!("duplicate composition id {}", entry.id),
                ));
            } else {
                kseen.push(&entry.id);
            }
            let epath = format!("{cpath}/compositions/{}", entry.id);
            check_body(&entry.body, &epath, &mut diags);
        }
    }
    diags
}

fn check_body(body: &FlatComposition, path: &str, diags: &mut Vec<Diagnostic>) {
    match body {
        FlatComposition::Single(_) | FlatComposition::LinkRef(_) => {}
        FlatComposition::Sequence(fs) => {
            if fs.is_empty() {
                diags.push(Diagnostic::error(
                    Code::EmptySequence,
                    path,
                    "sequence has no functions",
                ));
            }
        }
        FlatComposition::BestBinding(fs) => check_function_set(fs, "best-binding", path, diags),
        FlatComposition::AllBindings(fs) => check_function_set(fs, "all-bindings", path, diags),
        FlatComposition::Split(split) => {
            if !split.pre.is_empty() {
                check_function_set(&split.pre, "best-binding", &format!("{path}/pre"), diags);
            }
            if split.branches.is_empty() {
                diags.push(Diagnostic::error(
                    Code::EmptySplit,
                    path,
                    "split has no branches",
                ));
            } else if split
                .branches
                .iter()
                .all(|b| matches!(b, FlatBranch::Pass))
            {
                diags.push(Diagnostic::warning(
                    Code::AllPass,
                    path,
                    "every branch is pass; the split routes no traffic through functions",
                ));
            }
        }
    }
}

fn check_function_set(
    fs: &[FunctionName],
    kind: &str,
    path: &str,
    diags: &mut Vec<Diagnostic>,
) {
    if fs.is_empty() {
        diags.push(Diagnostic::error(
            Code::EmptyFunctions,
            path,
            format!("{kind} has no functions"),
        ));
    }
    let mut seen: Vec<&FunctionName> = Vec::new();
    let mut reported: Vec<&FunctionName> = Vec::new();
    for f in fs {
        if seen.contains(&f) {
            if !reported.contains(&f) {
                diags.push(Diagnostic::error(
                    Code::DupFunction,
                    path,
                    format!("duplicate function {f} in {kind}"),
                ));
                reported.push(f);
            }
        } else {
            seen.push(f);
        }
    }
}

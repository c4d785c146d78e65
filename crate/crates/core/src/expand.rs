//! Expansion of a component model into concrete forwarding graphs.
//!
//! Flexible constructs multiply into candidates as follows:
//!
//! * `best-binding { F }` is one chain over `F` per permutation; every
//!   occurrence (site) chooses independently, so the candidate count is the
//!   product of `|F|!` over all best-binding sites. In annotate mode the
//!   group stays unresolved and is emitted as a full mesh plus a
//!   [`FlexGroup`].
//! * `all-bindings { F }` is always a full mesh plus a [`FlexGroup`]; it
//!   never multiplies candidates.
//! * `split` fans out from the splitter (optionally through a best-binding
//!   stage) into every branch copy; `pass` wires the fan-out stage straight
//!   through to whatever follows the split.
//! * A branch with `.k` produces `k` copies sharing one permutation choice:
//!   copies are replicas, so they stay isomorphic. Each `link` traversal, by
//!   contrast, is its own site with its own choice.
//!
//! Candidate order is the odometer over sites in discovery order, each site
//! running through its permutations lexicographically, with the last site
//! varying fastest. Equivalently: candidates sort by the concatenation of
//! their per-site permutation sequences.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cost::{CostModel, EdgeCount};
use crate::diag::{has_errors, Code, Diagnostic};
use crate::graph::{FlexGroup, FlexKind, ForwardingGraph, InstanceId, NodeInstance, NodeRole};
use crate::model::{validate_model, ComponentModel, FlatBranch, FlatComposition};
use crate::name::{ComponentId, FunctionName};
use crate::perm::{factorial, Permutations};

pub const DEFAULT_CAP: u64 = 10000;

pub enum ExpansionMode {
    /// One graph: every best-binding keeps its written order.
    First,
    /// Every candidate graph, in documented order.
    Enumerate,
    /// One graph: the candidate minimizing the cost model (ties keep the
    /// earliest candidate).
    Select(Box<dyn CostModel>),
    /// One graph: flexible groups stay unresolved as meshes with
    /// [`FlexGroup`] annotations.
    Annotate,
}

impl fmt::Debug for ExpansionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpansionMode::First => f.write_str("First"),
            ExpansionMode::Enumerate => f.write_str("Enumerate"),
            ExpansionMode::Select(m) => write!(f, "Select({})", m.name()),
            ExpansionMode::Annotate => f.write_str("Annotate"),
        }
    }
}

#[derive(Debug)]
pub struct ExpansionPolicy {
    pub mode: ExpansionMode,
    /// Enumerate and select refuse to run when the candidate count exceeds
    /// this.
    pub cap: u64,
}

impl ExpansionPolicy {
    pub fn first() -> Self {
        ExpansionPolicy {
            mode: ExpansionMode::First,
            cap: DEFAULT_CAP,
        }
    }

    pub fn enumerate() -> Self {
        ExpansionPolicy {
            mode: ExpansionMode::Enumerate,
            cap: DEFAULT_CAP,
        }
    }

    pub fn select(cost: Box<dyn CostModel>) -> Self {
        ExpansionPolicy {
            mode: ExpansionMode::Select(cost),
            cap: DEFAULT_CAP,
        }
    }

    pub fn select_edge_count() -> Self {
        Self::select(Box::new(EdgeCount))
    }

    pub fn annotate() -> Self {
        ExpansionPolicy {
            mode: ExpansionMode::Annotate,
            cap: DEFAULT_CAP,
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }
}

/// Candidate count; `saturated` means the true count does not fit in u128
/// and `value` holds `u128::MAX` as a floor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionCount {
    pub value: u128,
    pub saturated: bool,
}

impl ExpansionCount {
    pub fn exact(value: u128) -> Self {
        ExpansionCount {
            value,
            saturated: false,
        }
    }

    pub fn exceeds(&self, cap: u64) -> bool {
        self.saturated || self.value > cap as u128
    }
}

impl fmt::Display for ExpansionCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.saturated {
            write!(f, "more than {}", u128::MAX)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub graphs: Vec<ForwardingGraph>,
    /// Structural warnings that hold for every candidate (e.g. a pass
    /// branch bypassing into the service exit).
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug)]
pub enum ExpandError {
    InvalidModel(Vec<Diagnostic>),
    CapExceeded { count: ExpansionCount, cap: u64 },
}

impl ExpandError {
    pub fn code(&self) -> Code {
        match self {
            ExpandError::InvalidModel(_) => Code::InvalidModel,
            ExpandError::CapExceeded { .. } => Code::CapExceeded,
        }
    }
}

impl fmt::Display for ExpandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpandError::InvalidModel(diags) => {
                let n = diags.iter().filter(|d| d.is_error()).count();
                write!(f, "model is invalid ({n} error(s))")?;
                if let Some(first) = diags.iter().find(|d| d.is_error()) {
                    write!(f, "; first: {first}")?;
                }
                Ok(())
            }
            ExpandError::CapExceeded { count, cap } => write!(
                f,
                "expansion would produce {count} candidate graphs, over the cap of {cap}"
            ),
        }
    }
}

impl core::error::Error for ExpandError {}

/// Number of candidates `expand` would enumerate with an unlimited cap.
/// Total on any model: unknown references contribute nothing and reference
/// cycles are cut at the revisit.
pub fn count_expansions(model: &ComponentModel) -> ExpansionCount {
    product_of_factorials(&discover_groups(model))
}

pub fn expand(model: &ComponentModel, policy: &ExpansionPolicy) -> Result<Expansion, ExpandError> {
    let diags = validate_model(model);
    if has_errors(&diags) {
        return Err(ExpandError::InvalidModel(diags));
    }
    let groups = discover_groups(model);
    let site_index: BTreeMap<String, usize> = groups
        .iter()
        .enumerate()
        .map(|(i, g)| (g.site.clone(), i))
        .collect();

    match &policy.mode {
        ExpansionMode::First => {
            let perms: Vec<Vec<usize>> = groups.iter().map(|g| (0..g.size).collect()).collect();
            let (graph, warnings) = build(model, &site_index, &perms, false);
            Ok(Expansion {
                graphs: alloc::vec![graph],
                warnings,
            })
        }
        ExpansionMode::Annotate => {
            let perms: Vec<Vec<usize>> = groups.iter().map(|g| (0..g.size).collect()).collect();
            let (graph, warnings) = build(model, &site_index, &perms, true);
            Ok(Expansion {
                graphs: alloc::vec![graph],
                warnings,
            })
        }
        ExpansionMode::Enumerate => {
            let count = product_of_factorials(&groups);
            if count.exceeds(policy.cap) {
                return Err(ExpandError::CapExceeded {
                    count,
                    cap: policy.cap,
                });
            }
            let mut graphs = Vec::new();
            let mut warnings = Vec::new();
            for_each_assignment(&groups, |perms| {
                let (graph, w) = build(model, &site_index, perms, false);
                if graphs.is_empty() {
                    warnings = w;
                }
                graphs.push(graph);
            });
            Ok(Expansion { graphs, warnings })
        }
        ExpansionMode::Select(cost) => {
            let count = product_of_factorials(&groups);
            if count.exceeds(policy.cap) {
                return Err(ExpandError::CapExceeded {
                    count,
                    cap: policy.cap,
                });
            }
            let mut best: Option<(ForwardingGraph, f64)> = None;
            let mut warnings = Vec::new();
            for_each_assignment(&groups, |perms| {
                let (graph, w) = build(model, &site_index, perms, false);
                if warnings.is_empty() && best.is_none() {
                    warnings = w;
                }
                let value = cost.evaluate(&graph);
                let better = match &best {
                    None => true,
                    Some((_, b)) => value.total_cmp(b) == core::cmp::Ordering::Less,
                };
                if better {
                    best = Some((graph, value));
                }
            });
            let (graph, _) = best.expect("at least one candidate exists");
            Ok(Expansion {
                graphs: alloc::vec![graph],
                warnings,
            })
        }
    }
}

/// One flexible-order site: a best-binding occurrence reached on a distinct
/// reference path. `site` is the copy-free path (no `rN` segments), so all
/// replication copies of a branch share the site.
#[derive(Debug, Clone, PartialEq, Eq)]
struct GroupSite {
    site: String,
    size: usize,
}

fn product_of_factorials(groups: &[GroupSite]) -> ExpansionCount {
    let mut value: u128 = 1;
    let mut saturated = false;
    for g in groups {
        match factorial(g.size).and_then(|f| value.checked_mul(f)) {
            Some(v) => value = v,
            None => {
                saturated = true;
                break;
            }
        }
    }
    if saturated {
        ExpansionCount {
            value: u128::MAX,
            saturated: true,
        }
    } else {
        ExpansionCount::exact(value)
    }
}

fn discover_groups(model: &ComponentModel) -> Vec<GroupSite> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    discover_component(
        model,
        &model.starting_component,
        model.starting_component.as_str(),
        &mut out,
        &mut stack,
    );
    out
}

fn discover_component<'m>(
    model: &'m ComponentModel,
    cid: &'m ComponentId,
    site: &str,
    out: &mut Vec<GroupSite>,
    stack: &mut Vec<&'m ComponentId>,
) {
    if stack.contains(&cid) {
        return;
    }
    let Some(comp) = model.component(cid) else {
        return;
    };
    stack.push(cid);
    for entry in &comp.compositions {
        let base = format!("{site}/{}", entry.id);
        match &entry.body {
            FlatComposition::BestBinding(fs) => out.push(GroupSite {
                site: base,
                size: fs.len(),
            }),
            FlatComposition::Split(split) => {
                if !split.pre.is_empty() {
                    out.push(GroupSite {
                        site: format!("{base}/pre"),
                        size: split.pre.len(),
                    });
                }
                for (i, branch) in split.branches.iter().enumerate() {
                    if let FlatBranch::Normal { target, .. } = branch {
                        discover_component(
                            model,
                            target,
                            &format!("{base}/b{}", i + 1),
                            out,
                            stack,
                        );
                    }
                }
            }
            FlatComposition::LinkRef(target) => {
                discover_component(model, target, &format!("{base}/{target}"), out, stack);
            }
            _ => {}
        }
    }
    stack.pop();
}

/// Invoke `f` once per permutation assignment, odometer order, last site
/// fastest. With no sites there is exactly one (empty) assignment.
fn for_each_assignment(groups: &[GroupSite], mut f: impl FnMut(&[Vec<usize>])) {
    let per_group: Vec<Vec<Vec<usize>>> = groups
        .iter()
        .map(|g| Permutations::new(g.size).collect())
        .collect();
    let mut idx = alloc::vec![0usize; groups.len()];
    loop {
        let current: Vec<Vec<usize>> = idx
            .iter()
            .zip(&per_group)
            .map(|(&i, perms)| perms[i].clone())
            .collect();
        f(&current);
        let mut pos = groups.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per_group[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn build(
    model: &ComponentModel,
    site_index: &BTreeMap<String, usize>,
    perms: &[Vec<usize>],
    annotate: bool,
) -> (ForwardingGraph, Vec<Diagnostic>) {
    let mut builder = Builder {
        model,
        site_index,
        perms,
        annotate,
        nodes: BTreeMap::new(),
        edges: BTreeSet::new(),
        flex_groups: Vec::new(),
        bypasses: Vec::new(),
    };
    let start = &model.starting_component;
    let (entries, exits) = builder.component(start, start.as_str(), start.as_str());
    let warnings = builder
        .bypasses
        .iter()
        .filter(|(_, xs)| xs.iter().any(|x| exits.contains(x)))
        .map(|(site, _)| {
            Diagnostic::warning(
                Code::DanglingPass,
                site.as_str(),
                "pass branch bypasses into the service exit; bypassing traffic leaves unprocessed",
            )
        })
        .collect();
    (
        ForwardingGraph {
            nodes: builder.nodes,
            edges: builder.edges,
            entries,
            exits,
            flex_groups: builder.flex_groups,
        },
        warnings,
    )
}

struct Builder<'a> {
    model: &'a ComponentModel,
    site_index: &'a BTreeMap<String, usize>,
    perms: &'a [Vec<usize>],
    annotate: bool,
    nodes: BTreeMap<InstanceId, NodeInstance>,
    edges: BTreeSet<(InstanceId, InstanceId)>,
    flex_groups: Vec<FlexGroup>,
    /// Fan-out stages wired through by a pass branch, with the split's site;
    /// used for the dangling-pass warning.
    bypasses: Vec<(String, Vec<InstanceId>)>,
}

impl Builder<'_> {
    /// Build one component; returns its (entries, exits).
    fn component(&mut self, cid: &ComponentId, path: &str, site: &str) -> (Vec<InstanceId>, Vec<InstanceId>) {
        let comp = self
            .model
            .component(cid)
            .expect("expand validates references");
        let mut first_entries: Option<Vec<InstanceId>> = None;
        let mut prev_exits: Vec<InstanceId> = Vec::new();
        for entry in &comp.compositions {
            let base_path = format!("{path}/{}", entry.id);
            let base_site = format!("{site}/{}", entry.id);
            let (e, x) = self.entry_body(&entry.body, &base_path, &base_site);
            match &first_entries {
                None => first_entries = Some(e),
                Some(_) => self.bipartite(&prev_exits, &e),
            }
            prev_exits = x;
        }
        (first_entries.unwrap_or_default(), prev_exits)
    }

    fn entry_body(
        &mut self,
        body: &FlatComposition,
        path: &str,
        site: &str,
    ) -> (Vec<InstanceId>, Vec<InstanceId>) {
        match body {
            FlatComposition::Single(f) => {
                let id = self.add_node(path, f, NodeRole::Plain);
                (alloc::vec![id.clone()], alloc::vec![id])
            }
            FlatComposition::Sequence(fs) => {
                let order: Vec<usize> = (0..fs.len()).collect();
                self.chain(path, fs, &order)
            }
            FlatComposition::BestBinding(fs) => {
                if self.annotate {
                    self.mesh(path, fs, FlexKind::BestBinding)
                } else {
                    let idx = *self
                        .site_index
                        .get(site)
                        .expect("every best-binding site is discovered");
                    let order = self.perms[idx].clone();
                    self.chain(path, fs, &order)
                }
            }
            FlatComposition::AllBindings(fs) => self.mesh(path, fs, FlexKind::AllBindings),
            FlatComposition::LinkRef(target) => {
                let path = format!("{path}/{target}");
                let site = format!("{site}/{target}");
                self.component(target, &path, &site)
            }
            FlatComposition::Split(split) => {
                let s = self.add_node(path, &split.splitter, NodeRole::Splitter);
                // Fan-out stage: the splitter alone, or the exit side of the
                // pre best-binding stage.
                let mut fan_out = alloc::vec![s.clone()];
                if !split.pre.is_empty() {
                    let (pe, px) = if self.annotate {
                        self.mesh(path, &split.pre, FlexKind::BestBinding)
                    } else {
                        let pre_site = format!("{site}/pre");
                        let idx = *self
                            .site_index
                            .get(&pre_site)
                            .expect("every best-binding site is discovered");
                        let order = self.perms[idx].clone();
                        self.chain(path, &split.pre, &order)
                    };
                    self.bipartite(&fan_out, &pe);
                    fan_out = px;
                }
                let mut exits: Vec<InstanceId> = Vec::new();
                let mut bypassed = false;
                for (i, branch) in split.branches.iter().enumerate() {
                    match branch {
                        FlatBranch::Normal {
                            target,
                            replications,
                        } => {
                            for copy in 1..=replications.get() {
                                let bpath = format!("{path}/b{}r{copy}", i + 1);
                                let bsite = format!("{site}/b{}", i + 1);
                                let (be, bx) = self.component(target, &bpath, &bsite);
                                self.bipartite(&fan_out, &be);
                                for x in bx {
                                    push_unique(&mut exits, x);
                                }
                            }
                        }
                        FlatBranch::Pass => {
                            for x in &fan_out {
                                push_unique(&mut exits, x.clone());
                            }
                            bypassed = true;
                        }
                    }
                }
                if bypassed {
                    self.bypasses.push((String::from(site), fan_out));
                }
                (alloc::vec![s], exits)
            }
        }
    }

    /// Chain `fs[order[0]] -> fs[order[1]] -> ...`; entries and exits are the
    /// chain's two ends.
    fn chain(
        &mut self,
        path: &str,
        fs: &[FunctionName],
        order: &[usize],
    ) -> (Vec<InstanceId>, Vec<InstanceId>) {
        let mut prev: Option<InstanceId> = None;
        let mut first = None;
        for &i in order {
            let id = self.add_node(path, &fs[i], NodeRole::Plain);
            if let Some(p) = prev {
                self.edges.insert((p, id.clone()));
            } else {
                first = Some(id.clone());
            }
            prev = Some(id);
        }
        (
            alloc::vec![first.expect("chain is non-empty")],
            alloc::vec![prev.expect("chain is non-empty")],
        )
    }

    /// All nodes, all ordered pairs, one flex group; entries and exits are
    /// every member.
    fn mesh(
        &mut self,
        path: &str,
        fs: &[FunctionName],
        kind: FlexKind,
    ) -> (Vec<InstanceId>, Vec<InstanceId>) {
        let ids: Vec<InstanceId> = fs
            .iter()
            .map(|f| self.add_node(path, f, NodeRole::Plain))
            .collect();
        for a in &ids {
            for b in &ids {
                if a != b {
                    self.edges.insert((a.clone(), b.clone()));
                }
            }
        }
        self.flex_groups.push(FlexGroup {
            kind,
            members: ids.iter().cloned().collect(),
        });
        (ids.clone(), ids)
    }

    fn add_node(&mut self, path: &str, f: &FunctionName, role: NodeRole) -> InstanceId {
        let base = format!("{path}/{f}");
        let mut id = base.clone();
        let mut k = 2;
        while self.nodes.contains_key(&id) {
            id = format!("{base}#{k}");
            k += 1;
        }
        self.nodes.insert(
            id.clone(),
            NodeInstance {
                id: id.clone(),
                function: f.clone(),
                role,
            },
        );
        id
    }

    fn bipartite(&mut self, from: &[InstanceId], to: &[InstanceId]) {
        for a in from {
            for b in to {
                self.edges.insert((a.clone(), b.clone()));
            }
        }
    }
}

fn push_unique(v: &mut Vec<InstanceId>, id: InstanceId) {
    if !v.contains(&id) {
        v.push(id);
    }
}

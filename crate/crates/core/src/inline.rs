//! Raising a flat component model back into a nested AST.
//!
//! Components referenced exactly once are spliced in place, which makes
//! `inline` undo `normalize` (the round trip through text is the identity on
//! normalized models). Components referenced from two or more places cannot
//! be spliced without changing meaning, so those references stay `link(<id>)`
//! in the output; the same holds for links whose target is not in the model
//! at all (catalog references). Unreachable components are dropped.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{Branch, Composition, NormalBranch, ServiceSpec};
use crate::diag::{Code, Diagnostic};
use crate::model::{reference_report, ComponentModel, FlatBranch, FlatComposition};
use crate::name::ComponentId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InlineError {
    pub code: Code,
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for InlineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.diagnostics.first() {
            Some(d) => write!(f, "cannot inline: {d}"),
            None => write!(f, "cannot inline: {}", self.code),
        }
    }
}

impl core::error::Error for InlineError {}

fn fail(code: Code, diagnostics: Vec<Diagnostic>) -> InlineError {
    InlineError { code, diagnostics }
}

pub fn inline(model: &ComponentModel) -> Result<ServiceSpec, InlineError> {
    let report = reference_report(model);
    if !report.cycles.is_empty() {
        let diags = crate::model::check_references(model)
            .into_iter()
            .filter(|d| d.code == Code::CyclicRef)
            .collect();
        return Err(fail(Code::CyclicRef, diags));
    }
    if report.start_missing {
        return Err(fail(
            Code::BadStart,
            alloc::vec![Diagnostic::error(
                Code::BadStart,
                "/starting-component",
                format!(
                    "starting component {} is not defined",
                    model.starting_component
                ),
            )],
        ));
    }
    if !report.dangling_branches.is_empty() {
        let diags = report
            .dangling_branches
            .iter()
            .map(|(path, target)| {
                Diagnostic::error(
                    Code::UnresolvedRef,
                    path.as_str(),
                    format!("branch target {target} is not defined"),
                )
            })
            .collect();
        return Err(fail(Code::UnresolvedRef, diags));
    }
    {
        let mut dups: Vec<Diagnostic> = Vec::new();
        let mut seen: BTreeSet<&ComponentId> = BTreeSet::new();
        for comp in &model.components {
            if !seen.insert(&comp.id) {
                dups.push(Diagnostic::error(
                    Code::DupId,
                    format!("/components/{}", comp.id),
                    format!("duplicate component id {}", comp.id),
                ));
            }
        }
        if !dups.is_empty() {
            return Err(fail(Code::DupId, dups));
        }
    }

    let reachable = reachable_components(model);
    for id in &reachable {
        let comp = model.component(id).unwrap();
        if comp.compositions.is_empty() {
            return Err(fail(
                Code::EmptyComponent,
                alloc::vec![Diagnostic::error(
                    Code::EmptyComponent,
                    format!("/components/{id}"),
                    "component has no compositions",
                )],
            ));
        }
    }

    // Reference counts over reachable components only; the start counts as
    // one reference so it is never spliced into anything.
    let mut refcount: BTreeMap<&ComponentId, usize> = BTreeMap::new();
    *refcount.entry(&model.starting_component).or_default() += 1;
    for id in &reachable {
        let comp = model.component(id).unwrap();
        for entry in &comp.compositions {
            match &entry.body {
                FlatComposition::LinkRef(t) => {
                    if model.component(t).is_some() {
                        *refcount.entry(t).or_default() += 1;
                    }
                }
                FlatComposition::Split(split) => {
                    for branch in &split.branches {
                        if let FlatBranch::Normal { target, .. } = branch {
                            *refcount.entry(target).or_default() += 1;
                        }
                    }
                }
                _ => {}
            }
        }
    }

    let ctx = Ctx { model, refcount };
    Ok(ServiceSpec::new(
        ctx.component_body(&model.starting_component),
    ))
}

fn reachable_components(model: &ComponentModel) -> BTreeSet<ComponentId> {
    let mut seen = BTreeSet::new();
    let mut work = alloc::vec![model.starting_component.clone()];
    while let Some(id) = work.pop() {
        if model.component(&id).is_none() || !seen.insert(id.clone()) {
            continue;
        }
        let comp = model.component(&id).unwrap();
        for entry in &comp.compositions {
            match &entry.body {
                FlatComposition::LinkRef(t) => work.push(t.clone()),
                FlatComposition::Split(split) => {
                    for branch in &split.branches {
                        if let FlatBranch::Normal { target, .. } = branch {
                            work.push(target.clone());
                        }
                    }
                }
                _ => {}
            }
        }
    }
    seen
}

struct Ctx<'m> {
    model: &'m ComponentModel,
    refcount: BTreeMap<&'m ComponentId, usize>,
}

impl Ctx<'_> {
    fn splice_target(&self, id: &ComponentId) -> bool {
        self.model.component(id).is_some() && self.refcount.get(id).copied().unwrap_or(0) == 1
    }

    fn component_body(&self, id: &ComponentId) -> Vec<Composition> {
        let comp = self.model.component(id).unwrap();
        let mut out = Vec::new();
        for entry in &comp.compositions {
            match &entry.body {
                FlatComposition::Single(f) => out.push(Composition::Single(f.clone())),
                FlatComposition::Sequence(fs) => out.push(Composition::Sequence(
                    fs.iter().cloned().map(Composition::Single).collect(),
                )),
                FlatComposition::BestBinding(fs) => {
                    out.push(Composition::BestBinding(fs.clone()))
                }
                FlatComposition::AllBindings(fs) => {
                    out.push(Composition::AllBindings(fs.clone()))
                }
                FlatComposition::LinkRef(t) => {
                    if self.splice_target(t) {
                        out.extend(self.component_body(t));
                    } else {
                        out.push(Composition::LinkRef(t.clone()));
                    }
                }
                FlatComposition::Split(split) => {
                    let branches = split
                        .branches
                        .iter()
                        .map(|branch| match branch {
                            FlatBranch::Pass => Branch::Pass,
                            FlatBranch::Normal {
                                target,
                                replications,
                            } => {
                                let body = if self.splice_target(target) {
                                    self.component_body(target)
                                } else {
                                    alloc::vec![Composition::LinkRef(target.clone())]
                                };
                                Branch::Normal(NormalBranch {
                                    body,
                                    replications: *replications,
                                })
                            }
                        })
                        .collect();
                    out.push(Composition::Split(crate::ast::SplitComposition {
                        splitter: split.splitter.clone(),
                        pre: split.pre.clone(),
                        branches,
                    }));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_support::*;
    use crate::normalize::normalize;
    use crate::parser::parse;
    use crate::render::render;
    use alloc::string::String;
    use alloc::vec;

    fn round_trip(src: &str) -> String {
        render(&inline(&normalize(&parse(src).unwrap()).unwrap()).unwrap())
    }

    #[test]
    fn inline_undoes_normalize_on_canonical_chains() {
        for src in [
            "service { BNG , NAT }",
            "service { best-binding { BNG , NAT } }",
            "service { split { BNG ; HTTP-Filter ; pass } , NAT }",
            "service { PGW , FW , split { DPI ; Header-Enr ; LI , Video-Opt ; TCP-Opt } }",
            "service { all-bindings { WOC , EdgeFW , MON , ADC , AppFW } }",
            "service { split { CL , best-binding { X , Y } ; A , B.3 ; pass } }",
            "service { split { A ; split { B ; C.2 ; D } ; E } , F }",
        ] {
            assert_eq!(round_trip(src), src);
        }
    }

    #[test]
    fn dangling_link_is_preserved_as_link() {
        let src = "service { link(ext) , A }";
        assert_eq!(round_trip(src), src);
    }

    #[test]
    fn cycle_is_rejected() {
        let m = model(
            "c0",
            vec![
                component("c0", vec![link_entry("k0", "c1")]),
                component("c1", vec![link_entry("k0", "c0")]),
            ],
        );
        let err = inline(&m).unwrap_err();
        assert_eq!(err.code, Code::CyclicRef);
    }

    #[test]
    fn dangling_branch_target_is_rejected() {
        let m = model(
            "c0",
            vec![component(
                "c0",
                vec![entry(
                    "k0",
                    FlatComposition::Split(crate::model::FlatSplit {
                        splitter: fun("CL"),
                        pre: vec![],
                        branches: vec![FlatBranch::Normal {
                            target: cid("missing"),
                            replications: core::num::NonZeroU8::MIN,
                        }],
                    }),
                )],
            )],
        );
        let err = inline(&m).unwrap_err();
        assert_eq!(err.code, Code::UnresolvedRef);
        assert_eq!(err.diagnostics.len(), 1);
    }

    #[test]
    fn missing_start_is_rejected() {
        let m = model("nope", vec![component("c0", vec![entry("k0", FlatComposition::Single(fun("A")))])]);
        assert_eq!(inline(&m).unwrap_err().code, Code::BadStart);
    }

    #[test]
    fn shared_component_stays_linked() {
        let m = model(
            "c0",
            vec![
                component("c0", vec![link_entry("k0", "c1"), link_entry("k1", "c1")]),
                component("c1", vec![entry("k0", FlatComposition::Single(fun("A")))]),
            ],
        );
        let spec = inline(&m).unwrap();
        assert_eq!(render(&spec), "service { link(c1) , link(c1) }");
    }

    #[test]
    fn singly_linked_component_is_spliced() {
        let m = model(
            "c0",
            vec![
                component(
                    "c0",
                    vec![
                        entry("k0", FlatComposition::Single(fun("A"))),
                        link_entry("k1", "c1"),
                    ],
                ),
                component(
                    "c1",
                    vec![
                        entry("k0", FlatComposition::Single(fun("B"))),
                        entry("k1", FlatComposition::Single(fun("C"))),
                    ],
                ),
            ],
        );
        assert_eq!(render(&inline(&m).unwrap()), "service { A , B , C }");
    }

    #[test]
    fn unreachable_components_are_dropped() {
        let m = model(
            "c0",
            vec![
                component("c0", vec![entry("k0", FlatComposition::Single(fun("A")))]),
                component("orphan", vec![entry("k0", FlatComposition::Single(fun("B")))]),
            ],
        );
        assert_eq!(render(&inline(&m).unwrap()), "service { A }");
    }

    #[test]
    fn reachable_empty_component_is_rejected() {
        let m = model(
            "c0",
            vec![component("c0", vec![link_entry("k0", "c1")]), component("c1", vec![])],
        );
        assert_eq!(inline(&m).unwrap_err().code, Code::EmptyComponent);
    }

    #[test]
    fn unreachable_empty_component_is_ignored() {
        let m = model(
            "c0",
            vec![
                component("c0", vec![entry("k0", FlatComposition::Single(fun("A")))]),
                component("junk", vec![]),
            ],
        );
        assert!(inline(&m).is_ok());
    }

    #[test]
    fn duplicate_component_ids_are_rejected() {
        let m = model(
            "c0",
            vec![
                component("c0", vec![entry("k0", FlatComposition::Single(fun("A")))]),
                component("c0", vec![entry("k0", FlatComposition::Single(fun("B")))]),
            ],
        );
        assert_eq!(inline(&m).unwrap_err().code, Code::DupId);
    }

    #[test]
    fn shared_branch_target_stays_linked() {
        let m = model(
            "c0",
            vec![
                component(
                    "c0",
                    vec![entry(
                        "k0",
                        FlatComposition::Split(crate::model::FlatSplit {
                            splitter: fun("CL"),
                            pre: vec![],
                            branches: vec![
                                FlatBranch::Normal {
                                    target: cid("c1"),
                                    replications: core::num::NonZeroU8::MIN,
                                },
                                FlatBranch::Normal {
                                    target: cid("c1"),
                                    replications: core::num::NonZeroU8::MIN,
                                },
                            ],
                        }),
                    )],
                ),
                component("c1", vec![entry("k0", FlatComposition::Single(fun("A")))]),
            ],
        );
        assert_eq!(
            render(&inline(&m).unwrap()),
            "service { split { CL ; link(c1) ; link(c1) } }"
        );
    }
}

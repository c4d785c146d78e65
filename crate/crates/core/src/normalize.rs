//! Lowering from the nested AST to the flat component model.
//!
//! Every split branch body is hoisted into its own component. Component ids
//! are `c0` for the root and `c1, c2, ...` in depth-first pre-order of the
//! hoists (a branch's component is numbered before anything to its right);
//! composition ids are `k0, k1, ...` per component. The scheme is total and
//! deterministic, so equal specs normalize to equal models.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{Branch, Composition, ServiceSpec};
use crate::diag::{has_errors, Code, Diagnostic};
use crate::model::{
    Component, ComponentModel, CompositionEntry, FlatBranch, FlatComposition, FlatSplit,
};
use crate::name::{ComponentId, CompositionId};
use crate::validate::validate_spec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizeError {
    /// The findings of [`validate_spec`], errors and warnings alike.
    pub diagnostics: Vec<Diagnostic>,
}

impl NormalizeError {
    pub fn code(&self) -> Code {
        Code::InvalidSpec
    }
}

impl fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.diagnostics.iter().filter(|d| d.is_error()).count();
        write!(f, "spec is invalid ({n} error(s))")?;
        if let Some(first) = self.diagnostics.iter().find(|d| d.is_error()) {
            write!(f, "; first: {first}")?;
        }
        Ok(())
    }
}

impl core::error::Error for NormalizeError {}

pub fn normalize(spec: &ServiceSpec) -> Result<ComponentModel, NormalizeError> {
    let diagnostics = validate_spec(spec);
    if has_errors(&diagnostics) {
        return Err(NormalizeError { diagnostics });
    }
    let mut hoister = Hoister { slots: Vec::new() };
    let root = hoister.alloc();
    hoister.build(root, &spec.compositions);
    Ok(ComponentModel {
        starting_component: component_id(0),
        components: hoister.slots.into_iter().map(Option::unwrap).collect(),
    })
}

fn component_id(idx: usize) -> ComponentId {
    ComponentId::new(format!("c{idx}")).unwrap()
}

fn composition_id(idx: usize) -> CompositionId {
    CompositionId::new(format!("k{idx}")).unwrap()
}

/// Slot `i` holds component `c<i>`; a slot is claimed when the hoist is
/// encountered and filled when its subtree is done, which yields pre-order
/// numbering.
struct Hoister {
    slots: Vec<Option<Component>>,
}

impl Hoister {
    fn alloc(&mut self) -> usize {
        self.slots.push(None);
        self.slots.len() - 1
    }

    fn build(&mut self, idx: usize, comps: &[Composition]) {
        let mut bodies = Vec::new();
        for comp in comps {
            self.flatten(comp, &mut bodies);
        }
        let compositions = bodies
            .into_iter()
            .enumerate()
            .map(|(i, body)| CompositionEntry {
                id: composition_id(i),
                body,
            })
            .collect();
        self.slots[idx] = Some(Component {
            id: component_id(idx),
            compositions,
        });
    }

    fn flatten(&mut self, comp: &Composition, out: &mut Vec<FlatComposition>) {
        match comp {
            Composition::Single(f) => out.push(FlatComposition::Single(f.clone())),
            Composition::LinkRef(id) => out.push(FlatComposition::LinkRef(id.clone())),
            Composition::BestBinding(fs) => out.push(FlatComposition::BestBinding(fs.clone())),
            Composition::AllBindings(fs) => out.push(FlatComposition::AllBindings(fs.clone())),
            Composition::Sequence(items) => {
                // A run of plain functions keeps its sequence spelling; any
                // other content splices into sibling entries.
                let singles: Option<Vec<_>> = items
                    .iter()
                    .map(|c| match c {
                        Composition::Single(f) => Some(f.clone()),
                        _ => None,
                    })
                    .collect();
                match singles {
                    Some(fs) => out.push(FlatComposition::Sequence(fs)),
                    None => {
                        for item in items {
                            self.flatten(item, out);
                        }
                    }
                }
            }
            Composition::Split(split) => {
                let mut branches = Vec::new();
                for branch in &split.branches {
                    match branch {
                        Branch::Pass => branches.push(FlatBranch::Pass),
                        Branch::Normal(nb) => {
                            let idx = self.alloc();
                            self.build(idx, &nb.body);
                            branches.push(FlatBranch::Normal {
                                target: component_id(idx),
                                replications: nb.replications,
                            });
                        }
                    }
                }
                out.push(FlatComposition::Split(FlatSplit {
                    splitter: split.splitter.clone(),
                    pre: split.pre.clone(),
                    branches,
                }));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_support::*;
    use crate::parser::parse;
    use alloc::vec;
    use core::num::NonZeroU8;

    fn norm(src: &str) -> ComponentModel {
        normalize(&parse(src).unwrap()).unwrap()
    }

    #[test]
    fn simple_chain_becomes_single_component() {
        let m = norm("service { BNG , NAT }");
        assert_eq!(
            m,
            model(
                "c0",
                vec![component(
                    "c0",
                    vec![
                        entry("k0", FlatComposition::Single(fun("BNG"))),
                        entry("k1", FlatComposition::Single(fun("NAT"))),
                    ],
                )],
            )
        );
    }

    #[test]
    fn split_branch_is_hoisted_into_c1() {
        let m = norm("service { split { BNG ; HTTP-Filter ; pass } , NAT }");
        assert_eq!(
            m,
            model(
                "c0",
                vec![
                    component(
                        "c0",
                        vec![
                            entry(
                                "k0",
                                FlatComposition::Split(FlatSplit {
                                    splitter: fun("BNG"),
                                    pre: vec![],
                                    branches: vec![
                                        FlatBranch::Normal {
                                            target: cid("c1"),
                                            replications: NonZeroU8::MIN,
                                        },
                                        FlatBranch::Pass,
                                    ],
                                }),
                            ),
                            entry("k1", FlatComposition::Single(fun("NAT"))),
                        ],
                    ),
                    component(
                        "c1",
                        vec![entry("k0", FlatComposition::Single(fun("HTTP-Filter")))],
                    ),
                ],
            )
        );
    }

    #[test]
    fn branch_components_are_numbered_preorder() {
        let m = norm("service { split { A ; split { B ; C ; D } ; E } }");
        let ids: Vec<&str> = m.components.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, vec!["c0", "c1", "c2", "c3", "c4"]);
        // c1 is the first branch (containing the inner split), c2 and c3 its
        // branches, c4 the outer second branch.
        assert!(matches!(
            m.components[1].compositions[0].body,
            FlatComposition::Split(_)
        ));
        assert_eq!(
            m.components[2].compositions[0].body,
            FlatComposition::Single(fun("C"))
        );
        assert_eq!(
            m.components[3].compositions[0].body,
            FlatComposition::Single(fun("D"))
        );
        assert_eq!(
            m.components[4].compositions[0].body,
            FlatComposition::Single(fun("E"))
        );
    }

    #[test]
    fn mobile_chain_layout() {
        let m = norm(
            "service { PGW , FW , split { DPI ; Header-Enr ; LI , Video-Opt ; TCP-Opt } }",
        );
        assert_eq!(m.components.len(), 4);
        let c2 = &m.components[2];
        assert_eq!(c2.id, cid("c2"));
        assert_eq!(
            c2.compositions,
            vec![
                entry("k0", FlatComposition::Single(fun("LI"))),
                entry("k1", FlatComposition::Single(fun("Video-Opt"))),
            ]
        );
    }

    #[test]
    fn replications_survive_normalization() {
        let m = norm("service { split { CL ; A.3 } }");
        let FlatComposition::Split(split) = &m.components[0].compositions[0].body else {
            panic!()
        };
        let FlatBranch::Normal { replications, .. } = &split.branches[0] else {
            panic!()
        };
        assert_eq!(replications.get(), 3);
    }

    #[test]
    fn link_refs_pass_through_unresolved() {
        let m = norm("service { link(ext) , A }");
        assert_eq!(
            m.components[0].compositions[0].body,
            FlatComposition::LinkRef(cid("ext"))
        );
    }

    #[test]
    fn sequence_of_singles_keeps_sequence_spelling() {
        use crate::ast::{Composition, ServiceSpec};
        let spec = ServiceSpec::new(vec![Composition::Sequence(vec![
            Composition::Single(fun("A")),
            Composition::Single(fun("B")),
        ])]);
        let m = normalize(&spec).unwrap();
        assert_eq!(
            m.components[0].compositions,
            vec![entry("k0", FlatComposition::Sequence(vec![fun("A"), fun("B")]))]
        );
    }

    #[test]
    fn mixed_sequence_splices_into_entries() {
        use crate::ast::{Composition, ServiceSpec};
        let spec = ServiceSpec::new(vec![Composition::Sequence(vec![
            Composition::Single(fun("A")),
            Composition::BestBinding(vec![fun("B"), fun("C")]),
        ])]);
        let m = normalize(&spec).unwrap();
        assert_eq!(m.components[0].compositions.len(), 2);
        assert_eq!(
            m.components[0].compositions[1].body,
            FlatComposition::BestBinding(vec![fun("B"), fun("C")])
        );
    }

    #[test]
    fn invalid_spec_is_rejected_with_diagnostics() {
        let spec = crate::ast::ServiceSpec::new(vec![]);
        let err = normalize(&spec).unwrap_err();
        assert_eq!(err.code(), Code::InvalidSpec);
        assert_eq!(err.diagnostics.len(), 1);
        assert!(err.to_string().contains("1 error(s)"));
    }

    #[test]
    fn normalization_is_deterministic() {
        let src = "service { split { A ; split { B ; C.2 ; pass } ; E } , best-binding { X , Y } }";
        assert_eq!(norm(src), norm(src));
    }

    #[test]
    fn result_passes_model_validation() {
        let m = norm("service { split { A , best-binding { P , Q } ; B , C.2 ; pass } , D }");
        assert_eq!(crate::model::validate_model(&m), vec![]);
    }
}

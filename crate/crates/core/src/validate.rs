//! Structural validation of a [`ServiceSpec`].
//!
//! Returns every finding, not just the first. The diagnostic list contains
//! no errors exactly when the spec satisfies the list-level invariants the
//! AST cannot encode in its types.

use alloc::format;
use alloc::vec::Vec;

use crate::ast::{Branch, Composition, ServiceSpec};
use crate::diag::{Code, Diagnostic};
use crate::name::FunctionName;

pub fn validate_spec(spec: &ServiceSpec) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if spec.compositions.is_empty() {
        diags.push(Diagnostic::error(
            Code::EmptyService,
            "/compositions",
            "service has no compositions",
        ));
    }
    for (i, comp) in spec.compositions.iter().enumerate() {
        walk(comp, &format!("/compositions/{i}"), &mut diags);
    }
    diags
}

fn walk(comp: &Composition, path: &str, diags: &mut Vec<Diagnostic>) {
    match comp {
        Composition::Single(_) | Composition::LinkRef(_) => {}
        Composition::Sequence(items) => {
            if items.is_empty() {
                diags.push(Diagnostic::error(
                    Code::EmptySequence,
                    path,
                    "sequence has no items",
                ));
            }
            for (i, item) in items.iter().enumerate() {
                walk(item, &format!("{path}/items/{i}"), diags);
            }
        }
        Composition::BestBinding(fs) => check_functions(fs, "best-binding", path, diags),
        Composition::AllBindings(fs) => check_functions(fs, "all-bindings", path, diags),
        Composition::Split(split) => {
            if !split.pre.is_empty() {
                check_functions(&split.pre, "best-binding", &format!("{path}/pre"), diags);
            }
            if split.branches.is_empty() {
                diags.push(Diagnostic::error(
                    Code::EmptySplit,
                    path,
                    "split has no branches",
                ));
            } else if split.branches.iter().all(|b| matches!(b, Branch::Pass)) {
                diags.push(Diagnostic::warning(
                    Code::AllPass,
                    path,
                    "every branch is pass; the split routes no traffic through functions",
                ));
            }
            for (i, branch) in split.branches.iter().enumerate() {
                if let Branch::Normal(nb) = branch {
                    let bpath = format!("{path}/branches/{i}");
                    if nb.body.is_empty() {
                        diags.push(Diagnostic::error(
                            Code::EmptyBranch,
                            &*bpath,
                            "branch has no compositions",
                        ));
                    }
                    for (j, item) in nb.body.iter().enumerate() {
                        walk(item, &format!("{bpath}/body/{j}"), diags);
                    }
                }
            }
        }
    }
}

fn check_functions(fs: &[FunctionName], kind: &str, path: &str, diags: &mut Vec<Diagnostic>) {
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
                    format!("duplicate function {} in {kind}", f),
                ));
                reported.push(f);
            }
        } else {
            seen.push(f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{NormalBranch, SplitComposition};
    use crate::diag::has_errors;
    use alloc::vec;

    fn f(s: &str) -> FunctionName {
        FunctionName::new(s).unwrap()
    }

    #[test]
    fn simple_chain_is_clean() {
        let spec = ServiceSpec::new(vec![
            Composition::Single(f("BNG")),
            Composition::Single(f("NAT")),
        ]);
        assert_eq!(validate_spec(&spec), vec![]);
    }

    #[test]
    fn empty_service_is_an_error() {
        let spec = ServiceSpec::new(vec![]);
        let diags = validate_spec(&spec);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::EmptyService);
    }

    #[test]
    fn split_without_branches_is_an_error() {
        let spec = ServiceSpec::new(vec![Composition::Split(SplitComposition {
            splitter: f("BNG"),
            pre: vec![],
            branches: vec![],
        })]);
        let diags = validate_spec(&spec);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::EmptySplit);
        assert_eq!(diags[0].path, "/compositions/0");
    }

    #[test]
    fn duplicate_function_in_best_binding() {
        let spec = ServiceSpec::new(vec![Composition::BestBinding(vec![
            f("A"),
            f("B"),
            f("A"),
            f("A"),
        ])]);
        let diags = validate_spec(&spec);
        assert_eq!(diags.len(), 1, "one report per offending name");
        assert_eq!(diags[0].code, Code::DupFunction);
        assert!(diags[0].message.contains('A'));
    }

    #[test]
    fn all_pass_split_is_a_warning_not_error() {
        let spec = ServiceSpec::new(vec![Composition::Split(SplitComposition {
            splitter: f("CL"),
            pre: vec![],
            branches: vec![Branch::Pass, Branch::Pass],
        })]);
        let diags = validate_spec(&spec);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::AllPass);
        assert!(!has_errors(&diags));
    }

    #[test]
    fn empty_branch_body_is_an_error() {
        let spec = ServiceSpec::new(vec![Composition::Split(SplitComposition {
            splitter: f("CL"),
            pre: vec![],
            branches: vec![Branch::Normal(NormalBranch::new(vec![]))],
        })]);
        let diags = validate_spec(&spec);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::EmptyBranch);
        assert_eq!(diags[0].path, "/compositions/0/branches/0");
    }

    #[test]
    fn nested_findings_are_all_reported() {
        let spec = ServiceSpec::new(vec![
            Composition::BestBinding(vec![]),
            Composition::Split(SplitComposition {
                splitter: f("CL"),
                pre: vec![f("X"), f("X")],
                branches: vec![Branch::Normal(NormalBranch::new(vec![
                    Composition::AllBindings(vec![]),
                ]))],
            }),
        ]);
        let codes: Vec<Code> = validate_spec(&spec).iter().map(|d| d.code).collect();
        assert_eq!(
            codes,
            vec![Code::EmptyFunctions, Code::DupFunction, Code::EmptyFunctions]
        );
    }

    #[test]
    fn sequence_items_are_walked() {
        let spec = ServiceSpec::new(vec![Composition::Sequence(vec![
            Composition::Single(f("A")),
            Composition::BestBinding(vec![]),
        ])]);
        let diags = validate_spec(&spec);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].path, "/compositions/0/items/1");
    }
}

//! Canonical text rendering of a [`ServiceSpec`], plus a structural dump for
//! debugging.
//!
//! The canonical form puts one space around every delimiter and brace
//! (`service { BNG , NAT }`), appends `.N` only when a branch has more than
//! one replication, and writes `link(<id>)` without inner spaces. `render`
//! then `parse` is the identity on the AST, and `parse` then `render` is the
//! identity on canonical text.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::{Branch, Composition, Direction, ServiceSpec};

pub fn render(spec: &ServiceSpec) -> String {
    let mut out = String::from("service { ");
    push_list(&mut out, &spec.compositions);
    out.push_str(" }");
    out
}

fn push_list(out: &mut String, comps: &[Composition]) {
    for (i, c) in comps.iter().enumerate() {
        if i > 0 {
            out.push_str(" , ");
        }
        push_comp(out, c);
    }
}

fn push_comp(out: &mut String, comp: &Composition) {
    match comp {
        Composition::Single(f) => out.push_str(f.as_str()),
        Composition::LinkRef(id) => {
            out.push_str("link(");
            out.push_str(id.as_str());
            out.push(')');
        }
        // A sequence renders as its comma-joined items; the grouping is not
        // representable in the text and is lost on reparse.
        Composition::Sequence(items) => push_list(out, items),
        Composition::BestBinding(fs) => push_functions(out, "best-binding", fs),
        Composition::AllBindings(fs) => push_functions(out, "all-bindings", fs),
        Composition::Split(split) => {
            out.push_str("split { ");
            out.push_str(split.splitter.as_str());
            if !split.pre.is_empty() {
                out.push_str(" , ");
                push_functions(out, "best-binding", &split.pre);
            }
            for branch in &split.branches {
                out.push_str(" ; ");
                match branch {
                    Branch::Pass => out.push_str("pass"),
                    Branch::Normal(nb) => {
                        push_list(out, &nb.body);
                        if nb.replications.get() > 1 {
                            out.push_str(&format!(".{}", nb.replications));
                        }
                    }
                }
            }
            out.push_str(" }");
        }
    }
}

fn push_functions(out: &mut String, kw: &str, fs: &[crate::name::FunctionName]) {
    out.push_str(kw);
    out.push_str(" { ");
    for (i, f) in fs.iter().enumerate() {
        if i > 0 {
            out.push_str(" , ");
        }
        out.push_str(f.as_str());
    }
    out.push_str(" }");
}

/// One line per AST node, two-space indentation. Meant for humans and for
/// golden tests; the format is stable.
pub fn dump(spec: &ServiceSpec) -> String {
    let mut out = String::new();
    let dir = match spec.direction {
        Direction::Forward => "forward",
        Direction::Symmetric => "symmetric",
    };
    out.push_str(&format!("service direction={dir}\n"));
    for c in &spec.compositions {
        dump_comp(&mut out, c, 1);
    }
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn dump_comp(out: &mut String, comp: &Composition, depth: usize) {
    indent(out, depth);
    match comp {
        Composition::Single(f) => out.push_str(&format!("single {f}\n")),
        Composition::LinkRef(id) => out.push_str(&format!("link {id}\n")),
        Composition::Sequence(items) => {
            out.push_str("sequence\n");
            for item in items {
                dump_comp(out, item, depth + 1);
            }
        }
        Composition::BestBinding(fs) => out.push_str(&format!("best-binding {}\n", join(fs))),
        Composition::AllBindings(fs) => out.push_str(&format!("all-bindings {}\n", join(fs))),
        Composition::Split(split) => {
            out.push_str(&format!("split {}", split.splitter));
            if !split.pre.is_empty() {
                out.push_str(&format!(" pre=[{}]", join(&split.pre)));
            }
            out.push('\n');
            for (i, branch) in split.branches.iter().enumerate() {
                indent(out, depth + 1);
                match branch {
                    Branch::Pass => out.push_str(&format!("branch {} pass\n", i + 1)),
                    Branch::Normal(nb) => {
                        if nb.replications.get() > 1 {
                            out.push_str(&format!(
                                "branch {} replications={}\n",
                                i + 1,
                                nb.replications
                            ));
                        } else {
                            out.push_str(&format!("branch {}\n", i + 1));
                        }
                        for item in &nb.body {
                            dump_comp(out, item, depth + 2);
                        }
                    }
                }
            }
        }
    }
}

fn join(fs: &[crate::name::FunctionName]) -> String {
    let parts: Vec<&str> = fs.iter().map(|f| f.as_str()).collect();
    parts.join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    /// The five canonical strings; parse then render must reproduce each
    /// byte for byte.
    const CANONICAL: [&str; 5] = [
        "service { BNG , NAT }",
        "service { best-binding { BNG , NAT } }",
        "service { split { BNG ; HTTP-Filter ; pass } , NAT }",
        "service { PGW , FW , split { DPI ; Header-Enr ; LI , Video-Opt ; TCP-Opt } }",
        "service { all-bindings { WOC , EdgeFW , MON , ADC , AppFW } }",
    ];

    #[test]
    fn canonical_strings_are_fixpoints() {
        for src in CANONICAL {
            assert_eq!(render(&parse(src).unwrap()), src);
        }
    }

    #[test]
    fn renders_compact_input_canonically() {
        let spec = parse("service{BNG,NAT}").unwrap();
        assert_eq!(render(&spec), "service { BNG , NAT }");
    }

    #[test]
    fn single_replication_is_elided() {
        let spec = parse("service { split { CL ; A.1 ; B.2 } }").unwrap();
        assert_eq!(render(&spec), "service { split { CL ; A ; B.2 } }");
    }

    #[test]
    fn replication_and_pre_render_canonically() {
        let src = "service { split { CL , best-binding { X , Y } ; A , B.3 ; pass } }";
        assert_eq!(render(&parse(src).unwrap()), src);
    }

    #[test]
    fn link_renders_compactly() {
        let src = "service { link(acme.c2) , A }";
        assert_eq!(render(&parse(src).unwrap()), src);
    }

    #[test]
    fn sequence_renders_as_comma_list() {
        use crate::ast::{Composition, ServiceSpec};
        use crate::name::FunctionName;
        let f = |s: &str| FunctionName::new(s).unwrap();
        let spec = ServiceSpec::new(alloc::vec![Composition::Sequence(alloc::vec![
            Composition::Single(f("A")),
            Composition::Single(f("B")),
        ])]);
        assert_eq!(render(&spec), "service { A , B }");
    }

    #[test]
    fn dump_shows_structure() {
        let spec = parse("service { split { CL ; A , B.2 ; pass } , NAT }").unwrap();
        assert_eq!(
            dump(&spec),
            "service direction=forward\n\
             \x20 split CL\n\
             \x20   branch 1 replications=2\n\
             \x20     single A\n\
             \x20     single B\n\
             \x20   branch 2 pass\n\
             \x20 single NAT\n"
        );
    }

    #[test]
    fn dump_shows_pre_stage_and_links() {
        let spec = parse("service { split { CL , best-binding { A , B } ; link(x) } }").unwrap();
        assert_eq!(
            dump(&spec),
            "service direction=forward\n\
             \x20 split CL pre=[A, B]\n\
             \x20   branch 1\n\
             \x20     link x\n"
        );
    }
}

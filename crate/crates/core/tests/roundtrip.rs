//! Round-trip properties of the text frontend over random ASTs.

use proptest::prelude::*;

use chainc_core::{
    parse, render, Branch, ComponentId, Composition, FunctionName, NormalBranch, ServiceSpec,
    SplitComposition,
};

fn function_name() -> impl Strategy<Value = FunctionName> {
    "[A-Za-z_][A-Za-z0-9_-]{0,8}"
        .prop_filter("keywords are not function names", |s| {
            !chainc_core::name::is_keyword(s)
        })
        .prop_map(|s| FunctionName::new(s).unwrap())
}

/// Distinct names, as groups must not repeat a function.
fn function_set(max: usize) -> impl Strategy<Value = Vec<FunctionName>> {
    proptest::collection::btree_set(function_name(), 1..=max)
        .prop_map(|set| set.into_iter().collect())
}

fn component_id() -> impl Strategy<Value = ComponentId> {
    "[A-Za-z_][A-Za-z0-9_-]{0,6}(\\.[A-Za-z_][A-Za-z0-9_-]{0,6}){0,2}"
        .prop_filter("pass segments are reserved", |s| {
            s.split('.').all(|seg| seg != "pass")
        })
        .prop_map(|s| ComponentId::new(s).unwrap())
}

fn composition(depth: u32) -> BoxedStrategy<Composition> {
    let leaf = prop_oneof![
        3 => function_name().prop_map(Composition::Single),
        1 => function_set(4).prop_map(Composition::BestBinding),
        1 => function_set(4).prop_map(Composition::AllBindings),
        1 => component_id().prop_map(Composition::LinkRef),
    ];
    if depth == 0 {
        leaf.boxed()
    } else {
        prop_oneof![
            3 => leaf,
            1 => split(depth),
        ]
        .boxed()
    }
}

fn split(depth: u32) -> BoxedStrategy<Composition> {
    let branch = prop_oneof![
        1 => Just(Branch::Pass),
        3 => (
            proptest::collection::vec(composition(depth - 1), 1..=3),
            1u8..=3,
        )
            .prop_map(|(body, reps)| {
                Branch::Normal(NormalBranch {
                    body,
                    replications: reps.try_into().unwrap(),
                })
            }),
    ];
    (
        function_name(),
        prop_oneof![2 => Just(Vec::new()), 1 => function_set(3)],
        proptest::collection::vec(branch, 1..=3),
    )
        .prop_map(|(splitter, pre, branches)| {
            Composition::Split(SplitComposition {
                splitter,
                pre,
                branches,
            })
        })
        .boxed()
}

/// Random spec, nesting depth at most 5, never containing `Sequence` (the
/// parser cannot produce one, so it is outside the round-trip image).
fn service_spec() -> impl Strategy<Value = ServiceSpec> {
    proptest::collection::vec(composition(4), 1..=4).prop_map(ServiceSpec::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Rendering then parsing reproduces the AST exactly.
    #[test]
    fn parse_render_round_trip(spec in service_spec()) {
        let text = render(&spec);
        let back = parse(&text).unwrap();
        prop_assert_eq!(back, spec);
    }

    /// Rendered text is canonical: parsing and re-rendering is a fixpoint.
    #[test]
    fn render_is_canonical(spec in service_spec()) {
        let text = render(&spec);
        let again = render(&parse(&text).unwrap());
        prop_assert_eq!(again, text);
    }
}

proptest! {
    /// Tokenizing never panics and either yields tokens or a positioned error.
    #[test]
    fn tokenize_is_total(src in "[ -~\\n\\t]{0,80}") {
        match chainc_core::tokenize(&src) {
            Ok(tokens) => prop_assert!(!tokens.is_empty(), "EOF token is always present"),
            Err(err) => prop_assert!(err.span.start.line >= 1 && err.span.start.col >= 1),
        }
    }

    /// Parsing arbitrary text never panics.
    #[test]
    fn parse_is_total(src in "[ -~\\n]{0,120}") {
        let _ = parse(&src);
    }
}

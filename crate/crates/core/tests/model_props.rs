//! Properties of the flat component model produced by `normalize`.

use proptest::prelude::*;

use chainc_core::{
    inline, normalize, parse, render, validate_spec, Branch, Composition, FunctionName,
    NormalBranch, ServiceSpec, SplitComposition,
};

fn function_name() -> impl Strategy<Value = FunctionName> {
    "[A-Za-z_][A-Za-z0-9_-]{0,6}"
        .prop_filter("keywords are not function names", |s| {
            !chainc_core::name::is_keyword(s)
        })
        .prop_map(|s| FunctionName::new(s).unwrap())
}

fn function_set(max: usize) -> impl Strategy<Value = Vec<FunctionName>> {
    proptest::collection::btree_set(function_name(), 1..=max)
        .prop_map(|set| set.into_iter().collect())
}

/// Valid, link-free compositions: every one of these passes `validate_spec`
/// and resolves completely, so `normalize` must succeed.
fn composition(depth: u32) -> BoxedStrategy<Composition> {
    let leaf = prop_oneof![
        3 => function_name().prop_map(Composition::Single),
        1 => function_set(3).prop_map(Composition::BestBinding),
        1 => function_set(3).prop_map(Composition::AllBindings),
    ];
    if depth == 0 {
        leaf.boxed()
    } else {
        let branch = prop_oneof![
            1 => Just(Branch::Pass),
            3 => (
                proptest::collection::vec(composition(depth - 1), 1..=2),
                1u8..=3,
            )
                .prop_map(|(body, reps)| {
                    Branch::Normal(NormalBranch {
                        body,
                        replications: reps.try_into().unwrap(),
                    })
                }),
        ];
        let split = (
            function_name(),
            prop_oneof![2 => Just(Vec::new()), 1 => function_set(2)],
            proptest::collection::vec(branch, 1..=3),
        )
            .prop_map(|(splitter, pre, branches)| {
                Composition::Split(SplitComposition {
                    splitter,
                    pre,
                    branches,
                })
            });
        prop_oneof![3 => leaf, 1 => split].boxed()
    }
}

fn closed_spec() -> impl Strategy<Value = ServiceSpec> {
    proptest::collection::vec(composition(3), 1..=3).prop_map(ServiceSpec::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Normalization of a valid closed spec yields a model that passes every
    /// model-level check: unique ids, resolvable references, no cycles.
    #[test]
    fn normalize_image_is_valid(spec in closed_spec()) {
        prop_assert!(!chainc_core::diag::has_errors(&validate_spec(&spec)));
        let model = normalize(&spec).unwrap();
        let diags = chainc_core::validate_model(&model);
        prop_assert!(!chainc_core::diag::has_errors(&diags), "diags: {diags:?}");
        prop_assert!(chainc_core::reference_report(&model).is_clean());
    }

    /// Inlining a normalized model reproduces the original text exactly.
    #[test]
    fn inline_inverts_normalize(spec in closed_spec()) {
        let model = normalize(&spec).unwrap();
        let back = inline(&model).unwrap();
        prop_assert_eq!(render(&back), render(&spec));
    }

    /// Normalization is deterministic: equal input, equal model.
    #[test]
    fn normalize_is_deterministic(spec in closed_spec()) {
        let a = normalize(&spec).unwrap();
        let b = normalize(&spec).unwrap();
        prop_assert_eq!(a, b);
    }

    /// Hoisted component ids follow the `c<N>` scheme with a contiguous range,
    /// and the starting component is always `c0`.
    #[test]
    fn hoisted_ids_are_contiguous(spec in closed_spec()) {
        let model = normalize(&spec).unwrap();
        prop_assert_eq!(model.starting_component.as_str(), "c0");
        for (i, comp) in model.components.iter().enumerate() {
            prop_assert_eq!(comp.id.as_str(), format!("c{i}"));
        }
    }

    /// The full pipeline text -> AST -> model -> AST -> text is the identity
    /// on canonical text.
    #[test]
    fn text_model_text_round_trip(spec in closed_spec()) {
        let text = render(&spec);
        let model = normalize(&parse(&text).unwrap()).unwrap();
        prop_assert_eq!(render(&inline(&model).unwrap()), text);
    }
}

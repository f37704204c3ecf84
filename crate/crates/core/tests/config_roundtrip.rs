use copula_oed::cli::{
    parse_config, render, Command, CopulaBlock, CriterionBlock, CriterionKind, DesignBlock, ModelBlock, ModelKind,
    OutputBlock, RunConfig, ScenarioBlock, Tolerances,
};
use proptest::prelude::*;

fn copula_block() -> impl Strategy<Value = CopulaBlock> {
    let empty = CopulaBlock {
        family: None,
        alpha1: None,
        alpha2: None,
        alpha3: None,
        mixture: None,
        weight: None,
        tau_max: None,
        epsilon: None,
    };
    let base = empty.clone();
    let kh = empty.clone();
    prop_oneof![
        (prop_oneof![Just("clayton"), Just("gumbel"), Just("joe")], 1.0..40.0f64).prop_map(move |(f, a)| {
            CopulaBlock {
                family: Some(f.to_string()),
                alpha1: Some(a),
                ..base.clone()
            }
        }),
        (1.0..10.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(move |(a, b, c)| CopulaBlock {
            family: Some("frank".into()),
            alpha1: Some(a),
            alpha2: Some(b),
            alpha3: Some(c),
            ..kh.clone()
        }),
        Just(CopulaBlock {
            family: Some("product".into()),
            ..empty
        }),
    ]
}

fn tolerances() -> impl Strategy<Value = Option<Tolerances>> {
    proptest::option::of(
        (
            proptest::option::of(1e-8..0.1f64),
            proptest::option::of(1e-9..1e-3f64),
            proptest::option::of(1usize..100_000),
            proptest::option::of(0usize..60),
            proptest::option::of(1usize..20),
        )
            .prop_map(|(delta, w_floor, max_iter, polish_rounds, refine_factor)| Tolerances {
                delta,
                w_floor,
                max_iter,
                polish_rounds,
                refine_factor,
            }),
    )
}

fn fedorov_config() -> impl Strategy<Value = RunConfig> {
    (
        copula_block(),
        proptest::option::of(2usize..1000),
        tolerances(),
        proptest::option::of("[a-z]{1,8}(/[a-z0-9_]{1,8}){0,2}"),
        any::<bool>(),
        1usize..6,
        proptest::option::of(proptest::collection::vec(-5.0..5.0f64, 6)),
    )
        .prop_map(|(copula, grid, tol, dir, use_d, s, beta)| {
            let dim = if copula.family.as_deref() == Some("product") {
                6
            } else if copula.alpha2.is_some() {
                9
            } else {
                7
            };
            RunConfig {
                command: Command::Optimize,
                grid,
                model: Some(ModelBlock {
                    kind: ModelKind::Fedorov,
                    beta,
                    beta1: None,
                    beta2: None,
                    x_max: None,
                    base: None,
                    cutoffs: None,
                }),
                copula: Some(copula),
                criterion: Some(CriterionBlock {
                    kind: if use_d { CriterionKind::D } else { CriterionKind::Ds },
                    s: if use_d { None } else { Some(s.min(dim - 1)) },
                    a: None,
                }),
                tolerances: tol,
                design: None,
                reference: None,
                scenario: None,
                output: dir.map(|dir| OutputBlock { dir }),
            }
        })
}

fn binary_efficiency_config() -> impl Strategy<Value = RunConfig> {
    (
        prop_oneof![Just("clayton"), Just("gumbel"), Just("frank"), Just("joe")],
        prop_oneof![Just("clayton"), Just("gumbel"), Just("frank"), Just("joe")],
        0.0..=1.0f64,
        0.1..0.9f64,
        proptest::collection::vec(0.0..10.0f64, 6..10),
        proptest::collection::vec(0.1..1.0f64, 10),
    )
        .prop_map(|(f1, f2, weight, tau_max, points, weights)| {
            let n = points.len();
            RunConfig {
                command: Command::Efficiency,
                grid: None,
                model: Some(ModelBlock {
                    kind: ModelKind::Binary,
                    beta: None,
                    beta1: Some(vec![-1.0, 1.0]),
                    beta2: Some(vec![-2.0, 0.5]),
                    x_max: Some(10.0),
                    base: None,
                    cutoffs: None,
                }),
                copula: Some(CopulaBlock {
                    family: None,
                    alpha1: None,
                    alpha2: None,
                    alpha3: None,
                    mixture: Some(vec![f1.into(), f2.into()]),
                    weight: Some(weight),
                    tau_max: Some(tau_max),
                    epsilon: Some(0.05),
                }),
                criterion: Some(CriterionBlock {
                    kind: CriterionKind::DA,
                    s: None,
                    a: Some(vec![
                        vec![1.0, 0.0],
                        vec![0.0, 1.0],
                        vec![0.0, 0.0],
                        vec![0.0, 0.0],
                        vec![0.0, 0.0],
                        vec![0.0, 0.0],
                    ]),
                }),
                tolerances: None,
                design: Some(DesignBlock {
                    points,
                    weights: weights[..n].to_vec(),
                }),
                reference: None,
                scenario: None,
                output: None,
            }
        })
}

fn scenario_config() -> impl Strategy<Value = RunConfig> {
    (
        prop_oneof![Just("fedorov"), Just("binary_tables"), Just("weibull")],
        proptest::option::of(2usize..500),
        tolerances(),
    )
        .prop_map(|(name, grid, tol)| RunConfig {
            command: Command::Scenario,
            grid,
            model: None,
            copula: None,
            criterion: None,
            tolerances: tol,
            design: None,
            reference: None,
            scenario: Some(ScenarioBlock { name: name.into() }),
            output: None,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_then_parse_is_identity(cfg in prop_oneof![fedorov_config(), binary_efficiency_config(), scenario_config()]) {
        cfg.validate().unwrap();
        let text = render(&cfg).unwrap();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(back, cfg, "{}", text);
    }
}

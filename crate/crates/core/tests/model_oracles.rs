//! Independent checks of the outcome models: Fisher information against the expected negative
//! Hessian of the multinomial log-likelihood, and shock-model cell probabilities against
//! simulation of the shock mechanism. The copula axioms are also checked on fixed grids.

mod common;

use copula_oed::copulas::{CopulaSpec, Family, TauLink};
use copula_oed::models::binary::{BETA1, BETA2};
use copula_oed::models::{BinaryLogitModel, DiscreteModel, WeibullDependence, WeibullModel};

fn check_model(model: &dyn DiscreteModel, seed: u64) {
    let err = common::worst_fim_error(model, seed).unwrap();
    assert!(err < 1e-4, "{}: relative error {err}", model.name());
}

#[test]
fn binary_mixtures_match_the_multinomial_oracle() {
    let link = TauLink::calibrated(0.05, 0.9, 10.0).unwrap();
    use Family::*;
    for (k, (a, b)) in [(Clayton, Gumbel), (Frank, Gumbel), (Joe, Clayton), (Joe, Frank)].into_iter().enumerate() {
        let m = BinaryLogitModel::tau_matched(a, b, &link, 0.5, BETA1, BETA2).unwrap();
        check_model(&m, 10 + k as u64);
    }
}

#[test]
fn binary_fixed_copulas_match_the_multinomial_oracle() {
    for (k, c) in [
        CopulaSpec::base(Family::Clayton, 2.0).unwrap(),
        CopulaSpec::khoudraji(Family::Gumbel, 2.5, 0.6, 0.9).unwrap(),
    ]
    .into_iter()
    .enumerate()
    {
        let m = BinaryLogitModel::with_copula(c, BETA1, BETA2, 10.0).unwrap();
        check_model(&m, 20 + k as u64);
    }
}

#[test]
fn weibull_models_match_the_multinomial_oracle() {
    let models = [
        WeibullDependence::MarshallOlkin,
        WeibullDependence::KhoudrajiClayton { alpha1: 1.5, alpha2: 0.4, alpha3: 0.0 },
        WeibullDependence::KhoudrajiClayton { alpha1: 2.0, alpha2: 0.4, alpha3: 0.2 },
        WeibullDependence::KhoudrajiClayton { alpha1: 3.6, alpha2: 0.6, alpha3: 0.0 },
    ];
    for (k, d) in models.into_iter().enumerate() {
        let m = WeibullModel::localized(d).unwrap();
        check_model(&m, 30 + k as u64);
    }
}

#[test]
fn shock_cells_match_simulation() {
    let z = common::shock_simulation_z(1_000_000);
    assert!(z <= 3.0, "largest deviation {z} standard errors");
}

#[test]
fn copula_axioms_hold_on_grids() {
    let (n, first) = common::axiom_violations(1e-12);
    assert_eq!(n, 0, "first violation: {first:?}");
}

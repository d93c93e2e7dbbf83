use pairsec::cost::{evaluate_point, LinalgForm, Model, ModelParams, SieveShape};
use pairsec::dickman::log2_rho;
use pairsec::families::Registry;
use pairsec::norms::{NormEngine, NormOptions, NormSampler, NormStatistic};
use pairsec::setup::{build_setup, HPolicy};
use proptest::prelude::*;

fn shape() -> SieveShape {
    SieveShape { eta: 6, w: 1, aut: 2, r_bits: 256 }
}

#[test]
fn published_bn256_point() {
    let c = evaluate_point(&shape(), 176, [424.80, 466.51], 57.6, &ModelParams::default());
    assert!((c.log2_sieving_space - 100.57).abs() < 0.01);
    assert!((c.log2_relations - 53.32).abs() < 0.02);
    assert!((c.log2_factor_base - 53.28).abs() < 0.02);
    assert!((c.log2_cost_sieve - 99.53).abs() < 0.02);
    assert!((c.log2_cost_linalg - 97.86).abs() < 0.02);
    assert!((c.log2_total - 99.92).abs() < 0.02);
    assert!(c.feasible);
    assert!((c.log2_p1 - log2_rho(424.80 / 57.6).unwrap()).abs() < 1e-12);
}

proptest! {
    #[test]
    fn point_invariants(
        a in 2u64..5000,
        n1 in 200.0f64..1500.0,
        n2 in 200.0f64..1500.0,
        b in 30.0f64..100.0,
        gs in any::<bool>(),
        twice in any::<bool>(),
    ) {
        let params = ModelParams {
            model: if gs { Model::GS } else { Model::BD },
            linalg_form: if twice { LinalgForm::TwiceSquared } else { LinalgForm::Squared },
            ..ModelParams::default()
        };
        let c = evaluate_point(&shape(), a, [n1, n2], b, &params);
        let sum = (c.log2_cost_sieve.exp2() + c.log2_cost_linalg.exp2()).log2();
        prop_assert!((c.log2_total - sum).abs() < 1e-9);
        prop_assert_eq!(c.feasible, c.log2_relations >= c.log2_factor_base);
        prop_assert!(c.log2_total >= c.log2_cost_sieve.max(c.log2_cost_linalg));
        // Larger norms never help the attacker.
        let worse = evaluate_point(&shape(), a, [n1 + 10.0, n2], b, &params);
        prop_assert!(worse.log2_relations <= c.log2_relations);
        prop_assert!(worse.log2_cost_sieve >= c.log2_cost_sieve);
    }
}

#[test]
fn norms_grow_with_a() {
    let reg = Registry::builtin();
    let inst = reg.instance("BN256").unwrap();
    let setup = build_setup(reg.family("BN").unwrap(), &inst, HPolicy::Recipe).unwrap();
    let s = NormSampler::new(&setup).unwrap();
    let opts = NormOptions { engine: NormEngine::Float, statistic: NormStatistic::MeanLog };
    let mut prev = [0.0, 0.0];
    for a in [4u64, 16, 64, 256, 1024] {
        let e = s.estimate(a, 2000, 7, opts).unwrap();
        assert!(e.log2_n1 > prev[0] && e.log2_n2 > prev[1], "A={a}");
        let ub = s.log2_upper_bound(a);
        assert!(e.log2_n1 <= ub[0] && e.log2_n2 <= ub[1]);
        prev = [e.log2_n1, e.log2_n2];
    }
    let again = s.estimate(1024, 2000, 7, opts).unwrap();
    assert_eq!(again.log2_n1, prev[0]);
}

#[test]
fn exact_and_float_engines_agree_on_average() {
    let reg = Registry::builtin();
    let inst = reg.instance("BLS12-381").unwrap();
    let setup = build_setup(reg.family("BLS12").unwrap(), &inst, HPolicy::Recipe).unwrap();
    let s = NormSampler::new(&setup).unwrap();
    let est = |engine| {
        s.estimate(639, 500, 3, NormOptions { engine, statistic: NormStatistic::MeanLog })
            .unwrap()
    };
    let (x, f) = (est(NormEngine::Exact), est(NormEngine::Float));
    assert!((x.log2_n1 - f.log2_n1).abs() < 1e-6);
    assert!((x.log2_n2 - f.log2_n2).abs() < 1e-6);
}

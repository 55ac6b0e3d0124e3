use std::collections::BTreeMap;

use ingham_core::arith::SieveTable;
use ingham_core::dirichlet::{zeta_real, EvalParams};
use ingham_core::sequences::{CoefficientSequence, MultiplicativeSpec};
use ingham_core::verify::{
    check_axer, check_wintner, difference_identity_check, keys, s_decomposition_identity,
    s_difference_identity, s_multiplicative_identity, theorem1_spec_report, theorem2_conditions,
    theorem3_check, MultiplicativeTable, Ratio, ReportRow, Theorem2Config, VerificationReport,
    THEOREM1_COEFF,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn f2zero() -> MultiplicativeSpec {
    MultiplicativeSpec::trivial(1_000_000)
        .with_prime(2, c(0.0))
        .unwrap()
}

#[test]
fn theorem1_trend_for_f2zero() {
    let spec = f2zero();
    let table = SieveTable::new(100_000).unwrap();
    let mt = MultiplicativeTable::new(&spec, &table, 100_000).unwrap();
    let grid = [1000, 10_000, 100_000];
    let rep = theorem1_spec_report(&mt, &grid, 2.0, Some(THEOREM1_COEFF), true).unwrap();
    assert!(rep.summary.pass);
    for row in &rep.rows {
        let n = row.n as f64;
        let g = 1.0 - 2f64.powf(-1.0 - 1.0 / n.ln());
        assert!((row.g.unwrap().re - g).abs() < 1e-15);
        assert_eq!(row.mean.re, (row.n as f64 / 2.0).ceil() / n);
    }
    assert!(rep.recheck());
}

#[test]
fn theorem3_residual_for_a_sign_flip_at_three() {
    let spec = MultiplicativeSpec::trivial(1000)
        .with_prime(3, c(-1.0))
        .unwrap();
    let table = SieveTable::new(10_001).unwrap();
    for n in [9999usize, 10_000, 10_001] {
        let chk = theorem3_check(&spec, &table, n, 2.0).unwrap();
        assert!((chk.product.re - 0.5).abs() < 1e-15);
        let sum: f64 = (1..=n)
            .map(|mut m| {
                let mut sign = 1.0;
                while m % 3 == 0 {
                    m /= 3;
                    sign = -sign;
                }
                sign
            })
            .sum();
        let want = (sum / n as f64 - 0.5).abs();
        assert!(
            (chk.residual - want).abs() < 1e-12,
            "n = {n}: {}",
            chk.residual
        );
    }
}

#[test]
fn theorem3_needs_bounded_spec() {
    let table = SieveTable::new(100).unwrap();
    let spec = MultiplicativeSpec::new(100, c(2.0), false).unwrap();
    assert!(theorem3_check(&spec, &table, 50, 2.0).is_err());
}

#[test]
fn multiplicative_table_capacity() {
    let table = SieveTable::new(1000).unwrap();
    let spec = MultiplicativeSpec::liouville(1_000_000);
    let mt = MultiplicativeTable::new(&spec, &table, 1000).unwrap();
    assert!(matches!(
        mt.g(2.0),
        Err(ingham_core::Error::Capacity { .. })
    ));
}

#[test]
fn wintner_for_inverse_squares() {
    let a = CoefficientSequence::from_fn(10_000, |k| c((k as f64).powi(-2)));
    let w = check_wintner(&a, 10_000).unwrap();
    assert!((w.mean.re - zeta_real(3.0).unwrap()).abs() <= 3e-4);
    assert!((w.target.re - zeta_real(3.0).unwrap()).abs() <= 1e-8);
}

#[test]
fn axer_ratios_for_the_constant_sequence() {
    let a = CoefficientSequence::from_real([1.0; 100]);
    let ax = check_axer(&a, &[10, 100], 1.0).unwrap();
    assert_eq!(ax.ratios, vec![(10, 1.0), (100, 1.0)]);
    assert!(ax.pass);
    assert!(!check_axer(&a, &[10], 0.5).unwrap().pass);
}

#[test]
fn theorem2_for_inverse_squares() {
    let a = CoefficientSequence::from_fn(100_000, |k| c((k as f64).powi(-2)));
    let grid = [1000, 10_000, 100_000];
    let sigma: Vec<f64> = grid.iter().map(|&n| 1.0 + 1.0 / (n as f64).ln()).collect();
    let params = EvalParams::default().with_truncation(100_000);
    let rep = theorem2_conditions(&a, &grid, &sigma, &params, &Theorem2Config::default()).unwrap();
    assert!(rep.summary.pass, "{}", rep.to_json());
    assert_eq!(rep.sigma_rows.len(), 3);
    assert!(
        theorem2_conditions(&a, &grid, &[1.5, 2.0], &params, &Theorem2Config::default()).is_err()
    );
}

#[test]
fn difference_identity_small_cases() {
    let table = SieveTable::new(50).unwrap();
    let params = EvalParams::default().with_truncation(2000);
    let mu = table.mobius_table(50).unwrap();
    let a = CoefficientSequence::from_real(mu[1..=50].iter().map(|&v| f64::from(v)));
    for n in [5, 10, 20] {
        let d = difference_identity_check(&a, &table, n, &params).unwrap();
        assert!(d.error <= 1e-5, "n = {n}: {d:?}");
    }
    assert!(difference_identity_check(&a, &table, 60, &params).is_err());
    let long = CoefficientSequence::from_real([1.0; 3000]);
    assert!(difference_identity_check(&long, &table, 10, &params).is_err());
}

fn reals(len: usize) -> impl Strategy<Value = CoefficientSequence> {
    prop::collection::vec((-1f64..1.0, -1f64..1.0), len).prop_map(|v| {
        CoefficientSequence::new(v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect())
    })
}

fn unit_disc() -> impl Strategy<Value = Complex64> {
    (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, th)| Complex64::from_polar(r, th))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn s_identities_hold(a in reals(300)) {
        let table = SieveTable::new(300).unwrap();
        prop_assert!(s_difference_identity(&a, &table, 300).unwrap().relative() <= 1e-8);
        prop_assert!(s_decomposition_identity(&a, &table, 300).unwrap().relative() <= 1e-8);
    }

    #[test]
    fn s_multiplicative_holds(f2 in unit_disc(), f3 in unit_disc(), default in unit_disc(), m in 2usize..300) {
        let spec = MultiplicativeSpec::new(100, default, true).unwrap()
            .with_prime(2, f2).unwrap()
            .with_prime(3, f3).unwrap();
        let table = SieveTable::new(300).unwrap();
        prop_assert!(s_multiplicative_identity(&spec, &table, m).unwrap().relative() <= 1e-8);
    }

    #[test]
    fn ratio_serde_round_trips(residual in 0.0f64..10.0, denom in prop_oneof![Just(0.0), 1e-6f64..10.0]) {
        let r = Ratio::of(residual, denom);
        let text = serde_json::to_string(&r).unwrap();
        prop_assert_eq!(serde_json::from_str::<Ratio>(&text).unwrap(), r);
        if denom == 0.0 && residual > 1e-12 {
            prop_assert_eq!(text, "\"inf\"");
        }
    }

    #[test]
    fn report_json_is_byte_stable(
        rows in prop::collection::vec((1u64..1_000_000, -1f64..1.0, prop::option::of(0f64..1.0), prop::option::of(0f64..5.0)), 1..12),
        coeff in 0.01f64..2.0,
    ) {
        let rows: Vec<ReportRow> = rows
            .into_iter()
            .map(|(n, m, res, r)| {
                let mut row = ReportRow::new(n, Complex64::new(m, -m / 3.0));
                row.theorem1_residual = res;
                row.ratio = r.map(|r| Ratio::of(r, 0.5));
                row
            })
            .collect();
        let thresholds = BTreeMap::from([(keys::T1_COEFF.to_string(), coeff)]);
        let rep = VerificationReport::assemble("prop", Some(c(0.5)), rows, vec![], thresholds, BTreeMap::new());
        let text = rep.to_json();
        let back = VerificationReport::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert!(back.recheck());
        prop_assert_eq!(back.to_csv(), rep.to_csv());
    }
}

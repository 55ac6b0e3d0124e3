use ingham_core::arith::{PsiTable, SieveTable};
use ingham_core::sequences::CoefficientSequence;
use ingham_core::summation::{batch_sums, ingham_a, ingham_s};
use num_complex::Complex64;
use proptest::prelude::*;

fn naive(a: &[Complex64], n: usize) -> (Complex64, Complex64) {
    let mut big_a = Complex64::new(0.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    for k in 1..=n.min(a.len()) {
        let w = (n / k) as f64;
        big_a += a[k - 1] * w;
        s += a[k - 1] * w * (k as f64).ln();
    }
    (big_a, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blocks_match_naive(
        values in prop::collection::vec((-10f64..10.0, -10f64..10.0), 1..400),
        n in 1usize..400,
    ) {
        let a = CoefficientSequence::new(values.iter().map(|&(r, i)| Complex64::new(r, i)).collect());
        let n = n.min(a.len());
        let (na, ns) = naive(a.values(), n);
        let scale = 1.0 + 10.0 * n as f64 * (n as f64).ln().max(1.0) * 5.0;
        prop_assert!((ingham_a(&a, n).unwrap() - na).norm() <= 1e-10 * scale);
        prop_assert!((ingham_s(&a, n).unwrap() - ns).norm() <= 1e-10 * scale);
    }

    #[test]
    fn sums_are_linear(
        x in prop::collection::vec(-5f64..5.0, 300),
        y in prop::collection::vec(-5f64..5.0, 300),
        c in -3f64..3.0,
        n in 1usize..=300,
    ) {
        let a = CoefficientSequence::from_real(x.iter().copied());
        let b = CoefficientSequence::from_real(y.iter().copied());
        let ab = CoefficientSequence::from_real(x.iter().zip(&y).map(|(u, v)| u + c * v));
        let lhs = ingham_a(&ab, n).unwrap();
        let rhs = ingham_a(&a, n).unwrap() + ingham_a(&b, n).unwrap() * c;
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + n as f64 * 20.0));
    }
}

#[test]
fn mobius_sequence_identities() {
    let table = SieveTable::new(5000).unwrap();
    let mu = table.mobius_table(5000).unwrap();
    let a = CoefficientSequence::from_real(mu[1..].iter().map(|&v| f64::from(v)));
    let psi = PsiTable::new(&table, 5000).unwrap();
    let grid: Vec<usize> = (1..=5000).collect();
    for v in batch_sums(&a, &grid).unwrap() {
        assert_eq!(v.a, Complex64::new(1.0, 0.0), "A({})", v.n);
        let p = psi.psi_int(v.n);
        assert!((v.s.re + p).abs() <= 1e-9 * p.max(1.0), "S({})", v.n);
    }
}

#[test]
fn batch_rejects_unsorted_grids() {
    let a = CoefficientSequence::from_real([1.0; 10]);
    assert!(batch_sums(&a, &[5, 3]).is_err());
    assert!(batch_sums(&a, &[11]).is_err());
}

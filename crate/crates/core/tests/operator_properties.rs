//! Property tests for the operator algebra and lattice indexing.

use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use bsh_core::lattice::{build_lattice, AxisBounds, BohrSommerfeldLattice, QuantizationConfig};
use bsh_core::opalg::{matrix_exp, BandedOperator, DenseMatrix};

fn lattice_strategy() -> impl Strategy<Value = Arc<BohrSommerfeldLattice>> {
    (1usize..=2)
        .prop_flat_map(|n| proptest::collection::vec((-3i64..3, 1i64..4), n))
        .prop_map(|axes| {
            let bounds: Vec<AxisBounds> = axes
                .iter()
                .map(|&(lo, len)| AxisBounds::window(lo, lo + len))
                .collect();
            Arc::new(
                build_lattice(bounds.len(), bounds, QuantizationConfig::default()).unwrap(),
            )
        })
}

fn operator_strategy(
    lat: Arc<BohrSommerfeldLattice>,
) -> impl Strategy<Value = BandedOperator> {
    let n = lat.degrees_of_freedom();
    let dim = lat.dimension();
    proptest::collection::vec(
        (
            proptest::collection::vec(-2i64..=2, n),
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim),
        ),
        1..=3,
    )
    .prop_map(move |bands| {
        let mut acc = BandedOperator::zero(lat.clone());
        for (shift, coeffs) in bands {
            let lat_inner = lat.clone();
            let op = BandedOperator::from_shift_rule(lat.clone(), shift, move |idx| {
                let flat = lat_inner.flat_index(idx).unwrap();
                Complex64::new(coeffs[flat].0, coeffs[flat].1)
            });
            acc = acc.add(&op).unwrap();
        }
        acc
    })
}

fn operator_pair() -> impl Strategy<Value = (BandedOperator, BandedOperator)> {
    lattice_strategy()
        .prop_flat_map(|lat| (operator_strategy(lat.clone()), operator_strategy(lat)))
}

fn operator_triple() -> impl Strategy<Value = (BandedOperator, BandedOperator, BandedOperator)> {
    lattice_strategy().prop_flat_map(|lat| {
        (
            operator_strategy(lat.clone()),
            operator_strategy(lat.clone()),
            operator_strategy(lat),
        )
    })
}

proptest! {
    #[test]
    fn adjoint_is_an_involution(ops in operator_pair()) {
        let (a, _) = ops;
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn adjoint_reverses_products((a, b) in operator_pair()) {
        let lhs = a.compose(&b).unwrap().adjoint();
        let rhs = b.adjoint().compose(&a.adjoint()).unwrap();
        let diff = lhs.sub(&rhs).unwrap().frobenius_norm();
        prop_assert!(diff <= 1e-12 * (1.0 + a.frobenius_norm() * b.frobenius_norm()));
    }

    #[test]
    fn commutator_is_antisymmetric((a, b) in operator_pair()) {
        let lhs = a.commutator(&b).unwrap();
        let rhs = b.commutator(&a).unwrap().scale(Complex64::new(-1.0, 0.0));
        let diff = lhs.sub(&rhs).unwrap().frobenius_norm();
        prop_assert!(diff <= 1e-12 * (1.0 + a.frobenius_norm() * b.frobenius_norm()));
    }

    #[test]
    fn jacobi_identity_holds((a, b, c) in operator_triple()) {
        let term1 = a.commutator(&b.commutator(&c).unwrap()).unwrap();
        let term2 = b.commutator(&c.commutator(&a).unwrap()).unwrap();
        let term3 = c.commutator(&a.commutator(&b).unwrap()).unwrap();
        let total = term1.add(&term2).unwrap().add(&term3).unwrap();
        let scale = a.frobenius_norm() * b.frobenius_norm() * c.frobenius_norm();
        prop_assert!(total.frobenius_norm() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn to_dense_is_multiplicative((a, b) in operator_pair()) {
        let lhs = a.compose(&b).unwrap().to_dense();
        let rhs = a.to_dense().mul(&b.to_dense()).unwrap();
        let diff = lhs.sub(&rhs).unwrap().frobenius_norm();
        prop_assert!(diff <= 1e-12 * (1.0 + a.frobenius_norm() * b.frobenius_norm()));
    }

    #[test]
    fn flat_indexing_is_a_bijection(lat in lattice_strategy()) {
        for (flat, idx) in lat.indices().enumerate() {
            prop_assert_eq!(lat.flat_index(&idx).unwrap(), flat);
        }
    }

    #[test]
    fn shift_up_then_down_is_identity(lat in lattice_strategy()) {
        for idx in lat.indices() {
            for axis in 0..lat.degrees_of_freedom() {
                if let Some(up) = lat.shift_index(&idx, axis, 1) {
                    if let Some(back) = lat.shift_index(&up, axis, -1) {
                        prop_assert_eq!(back, idx.clone());
                    }
                }
            }
        }
    }

    #[test]
    fn exponential_of_skew_hermitian_is_unitary(entries in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36)) {
        let dim = 6;
        let raw = DenseMatrix::from_fn(dim, |i, j| {
            let (re, im) = entries[i * dim + j];
            Complex64::new(re, im)
        });
        let skew = raw.sub(&raw.adjoint()).unwrap().scale(Complex64::new(0.5, 0.0));
        let u = matrix_exp(&skew).unwrap();
        let defect = u
            .adjoint()
            .mul(&u)
            .unwrap()
            .sub(&DenseMatrix::identity(dim))
            .unwrap()
            .frobenius_norm();
        prop_assert!(defect <= 1e-10 * dim as f64, "defect {}", defect);
    }
}

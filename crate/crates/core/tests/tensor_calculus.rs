//! Exact identities of the tensor calculus: adjointness, commutation,
//! intertwining, composition counts and kernel characterization. Everything
//! here runs in integer arithmetic.

mod common;

use common::*;
use semicircle::series::Basis;
use semicircle::tensor::{composition_count, Scalar, TensorSeries};
use semicircle::util::binomial_u128;
use semicircle::ChebSeries;

fn psi(n: u32) -> TensorSeries {
    TensorSeries::psi(n).unwrap()
}

#[test]
fn number_operator_factors_through_the_derivative() {
    // adjoint o derivative = counting: psi_n -> n psi_n, exactly
    for n in 0..=30u32 {
        let composed = psi(n).nc_derivative().unwrap().adjoint_partial().unwrap();
        let expect = psi(n).scale_int(n as i64);
        assert_eq!(composed, expect, "n = {n}");
        assert!(composed.is_integer());
    }
}

#[test]
fn adjointness_under_the_semicircular_pairing() {
    // <adjoint(psi_a (x) psi_b), psi_c> = <psi_a (x) psi_b, d psi_c>
    for a in 0..=12u32 {
        for b in 0..=12u32 {
            let t = TensorSeries::basis(&[a, b]).unwrap();
            let lifted = t.adjoint_partial().unwrap();
            for c in 0..=12u32 {
                let lhs = lifted.inner_alpha(&psi(c)).unwrap();
                let rhs = t.inner_alpha(&psi(c).nc_derivative().unwrap()).unwrap();
                assert_eq!(lhs, rhs, "a = {a}, b = {b}, c = {c}");
            }
        }
    }
}

/// All order-k basis tensors with the given index sum.
fn basis_tensors(order: usize, index_sum: u32) -> Vec<TensorSeries> {
    fn keys(order: usize, remaining: u32) -> Vec<Vec<u32>> {
        if order == 1 {
            return vec![vec![remaining]];
        }
        let mut out = Vec::new();
        for first in 0..=remaining {
            for mut tail in keys(order - 1, remaining - first) {
                let mut key = vec![first];
                key.append(&mut tail);
                out.push(key);
            }
        }
        out
    }
    keys(order, index_sum)
        .into_iter()
        .map(|k| TensorSeries::basis(&k).unwrap())
        .collect()
}

#[test]
fn first_slot_derivative_commutation() {
    // raise-then-count equals count-plus-one-then-raise on basis tensors:
    // (d (x) I^(k-1)) M^(k) = (M^(k+1) + I)(d (x) I^(k-1))
    for order in 1..=3usize {
        for index_sum in 0..=10u32 {
            for t in basis_tensors(order, index_sum) {
                let lhs = t.apply_m().partial_first_slot().unwrap();
                let raised = t.partial_first_slot().unwrap();
                let rhs = raised.apply_m().add(&raised).unwrap();
                assert_eq!(lhs, rhs);
                assert!(lhs.is_integer());
            }
        }
    }
}

#[test]
fn iterated_derivative_intertwines_the_counting_operator() {
    // M^(k) d^(k-1) = d^(k-1) (M - (k-1) I) on psi_l
    for l in 0..=15u32 {
        for k in 1..=4usize {
            let d = psi(l).nc_derivative_k(k - 1).unwrap();
            let lhs = d.apply_m();
            let shifted = psi(l)
                .apply_m()
                .add(&psi(l).scale_int(-(k as i64 - 1)))
                .unwrap();
            let rhs = shifted.nc_derivative_k(k - 1).unwrap();
            assert_eq!(lhs, rhs, "l = {l}, k = {k}");
        }
    }
}

#[test]
fn energy_identity_in_integer_arithmetic() {
    // <M^(k) d^(k-1) psi_l, d^(k-1) psi_l> = k <d^(k) psi_l, d^(k) psi_l>,
    // i.e. (l - k + 1) C(l, k-1) = k C(l, k)
    for l in 0..=15u32 {
        for k in 1..=4usize {
            let dk1 = psi(l).nc_derivative_k(k - 1).unwrap();
            let dk = psi(l).nc_derivative_k(k).unwrap();
            let lhs = dk1.apply_m().inner_alpha(&dk1).unwrap();
            let rhs = dk.inner_alpha(&dk).unwrap();
            let rhs_scaled = match rhs {
                Scalar::Int(v) => Scalar::Int(v * k as i64),
                Scalar::Float(v) => Scalar::Float(v * k as f64),
            };
            assert_eq!(lhs, rhs_scaled, "l = {l}, k = {k}");
            // and both sides against the closed binomial forms
            if l >= k as u32 - 1 {
                let closed =
                    (l as i64 - k as i64 + 1) * binomial_u128(l as u64, k as u64 - 1) as i64;
                assert_eq!(lhs, Scalar::Int(closed.max(0)), "closed form l={l} k={k}");
            }
        }
    }
}

#[test]
fn derivative_norms_count_compositions() {
    // |d^(k) psi_l|^2 = C(l, k): each composition contributes one unit
    for l in 0..=14u32 {
        for k in 0..=4usize {
            let d = psi(l).nc_derivative_k(k).unwrap();
            let norm = d.inner_alpha(&d).unwrap();
            assert_eq!(norm, Scalar::Int(binomial_u128(l as u64, k as u64) as i64));
        }
    }
}

#[test]
fn composition_counts_match_enumeration() {
    for k in 0..=5u32 {
        for l in 0..=8u32 {
            let counted = composition_count(k as u64, l as u64);
            let enumerated = count_compositions(l, k + 1);
            assert_eq!(counted.value, enumerated as u128, "k = {k}, l = {l}");
        }
    }
}

#[test]
fn kernel_of_the_iterated_derivative() {
    // d^(k) annihilates degree <= k-1 and sends degree k to the constant
    // tensor with the leading coefficient
    for k in 1..=4usize {
        for l in 0..k as u32 {
            assert!(psi(l).nc_derivative_k(k).unwrap().is_empty());
        }
        let d = psi(k as u32).nc_derivative_k(k).unwrap();
        assert_eq!(d.len(), 1);
        let key = vec![0u32; k + 1];
        assert_eq!(d.coeff(&key), Scalar::Int(1));
        // one degree higher is no longer constant
        let d = psi(k as u32 + 1).nc_derivative_k(k).unwrap();
        assert!(d.len() > 1);
        assert_eq!(d.coeff(&key), Scalar::Int(0));
    }
    // a full polynomial of degree k: the leading coefficient survives
    let poly = psi(3)
        .scale_int(5)
        .add(&psi(1).scale_int(-2))
        .unwrap()
        .add(&psi(0).scale_int(7))
        .unwrap();
    let d3 = poly.nc_derivative_k(3).unwrap();
    assert_eq!(d3.len(), 1);
    assert_eq!(d3.coeff(&[0, 0, 0, 0]), Scalar::Int(5));
    assert!(poly.nc_derivative_k(4).unwrap().is_empty());
}

#[test]
fn resolvent_commutation_with_the_iterated_derivative() {
    // (M^(k) + a I)^{-1} d^(k-1) = d^(k-1) (M + (1 + a - k) I)^{-1} for a > k-1
    for l in 0..=12u32 {
        for k in 2..=4usize {
            let a = k as f64 + 0.5;
            let lhs = psi(l)
                .nc_derivative_k(k - 1)
                .unwrap()
                .resolvent_m(a)
                .unwrap();
            let rhs = psi(l)
                .resolvent_m(1.0 + a - k as f64)
                .unwrap()
                .nc_derivative_k(k - 1)
                .unwrap();
            for (idx, c) in lhs.terms() {
                let diff = (c.as_f64() - rhs.coeff(idx).as_f64()).abs();
                assert!(diff <= 1e-15, "l = {l}, k = {k}");
            }
            assert_eq!(lhs.len(), rhs.len());
        }
    }
}

#[test]
fn monomial_leibniz_rule_matches_the_basis_rule() {
    // the divided-difference derivative of x^a is sum_{p+q=a-1} x^p (x) x^q;
    // expanding everything in the second-kind basis must agree with the
    // basis rule, numerically to roundoff
    for a in 1..=12usize {
        // x^a as a second-kind series (independent recurrence oracle)
        let xa = ChebSeries::new(
            Basis::SecondKind,
            monomial_in_psi_basis(a),
            semicircle::Interval::REFERENCE,
        );
        let ours = TensorSeries::from_series(&xa)
            .unwrap()
            .nc_derivative()
            .unwrap();
        // Leibniz side: sum over p + q = a - 1 of psi-expansions of x^p, x^q
        let mut leibniz = TensorSeries::zero(2).unwrap();
        for p in 0..a {
            let q = a - 1 - p;
            let xp = monomial_in_psi_basis(p);
            let xq = monomial_in_psi_basis(q);
            for (i, &ci) in xp.iter().enumerate() {
                if ci == 0.0 {
                    continue;
                }
                for (j, &cj) in xq.iter().enumerate() {
                    if cj == 0.0 {
                        continue;
                    }
                    let term = TensorSeries::basis(&[i as u32, j as u32])
                        .unwrap()
                        .scale(ci * cj);
                    leibniz = leibniz.add(&term).unwrap();
                }
            }
        }
        for (idx, c) in leibniz.terms() {
            let diff = (c.as_f64() - ours.coeff(idx).as_f64()).abs();
            assert!(diff <= 1e-9, "a = {a}, idx = {idx:?}, diff = {diff}");
        }
        for (idx, c) in ours.terms() {
            let diff = (c.as_f64() - leibniz.coeff(idx).as_f64()).abs();
            assert!(diff <= 1e-9, "a = {a}, idx = {idx:?} (reverse)");
        }
    }
}

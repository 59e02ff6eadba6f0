//! Sparse tensor algebra for the non-commutative calculus.
//!
//! An order-k element is a sparse sum of basis tensors
//! `psi_{a_1} (x) ... (x) psi_{a_k}` keyed by the multi-index. The
//! divided-difference derivative acts by the second-kind expansion
//! `psi_n -> sum_{l=0}^{n-1} psi_l (x) psi_{n-1-l}`, its adjoint under the
//! semicircular inner product by `psi_a (x) psi_b -> psi_{a+b+1}`, and the
//! number operator scales a basis tensor by its index sum.

use crate::error::{Error, Result};
use crate::series::{Basis, ChebSeries};
use crate::util::{binomial_u128, pairwise_sum};
use std::collections::BTreeMap;

/// Practical caps; larger tensors signal a misuse of the desk-scale toolkit.
pub const MAX_TENSOR_ORDER: usize = 5;
pub const MAX_INDEX_SUM: u32 = 64;

/// Coefficient that stays an exact machine integer until a non-integer
/// scaling forces it to floating point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scalar {
    Int(i64),
    Float(f64),
}

impl Scalar {
    pub const ONE: Scalar = Scalar::Int(1);

    pub fn as_f64(self) -> f64 {
        match self {
            Scalar::Int(v) => v as f64,
            Scalar::Float(v) => v,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Scalar::Int(v) => v == 0,
            Scalar::Float(v) => v == 0.0,
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, Scalar::Int(_))
    }

    pub fn mul_f64(self, factor: f64) -> Scalar {
        Scalar::Float(self.as_f64() * factor)
    }
}

impl std::ops::Add for Scalar {
    type Output = Scalar;

    /// Integer addition with overflow spilling into floating point.
    fn add(self, other: Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => match a.checked_add(b) {
                Some(v) => Scalar::Int(v),
                None => Scalar::Float(a as f64 + b as f64),
            },
            (a, b) => Scalar::Float(a.as_f64() + b.as_f64()),
        }
    }
}

impl std::ops::Mul for Scalar {
    type Output = Scalar;

    fn mul(self, other: Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => match a.checked_mul(b) {
                Some(v) => Scalar::Int(v),
                None => Scalar::Float(a as f64 * b as f64),
            },
            (a, b) => Scalar::Float(a.as_f64() * b.as_f64()),
        }
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(v)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}

/// Iterated divided-difference derivative of a second-kind series: an
/// order-(k+1) tensor summing over all writings of each index minus `k`.
pub fn nc_derivative_k(series: &ChebSeries, k: usize) -> Result<TensorSeries> {
    TensorSeries::from_series(series)?.nc_derivative_k(k)
}

/// Number of writings of `l` as an ordered sum of `k + 1` non-negative
/// integers: `binomial(l + k, l)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompositionCount {
    pub k: u64,
    pub l: u64,
    pub value: u128,
}

pub fn composition_count(k: u64, l: u64) -> CompositionCount {
    CompositionCount {
        k,
        l,
        value: binomial_u128(l + k, l),
    }
}

/// Sparse order-k tensor with lexicographically ordered multi-indices.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSeries {
    order: usize,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

fn check_capacity(order: usize, index_sum: u32) -> Result<()> {
    if order > MAX_TENSOR_ORDER || index_sum > MAX_INDEX_SUM {
        return Err(Error::TensorCapacity {
            order,
            index_sum,
            max_order: MAX_TENSOR_ORDER,
            max_index_sum: MAX_INDEX_SUM,
        });
    }
    Ok(())
}

impl TensorSeries {
    pub fn zero(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_TENSOR_ORDER {
            return Err(Error::TensorCapacity {
                order,
                index_sum: 0,
                max_order: MAX_TENSOR_ORDER,
                max_index_sum: MAX_INDEX_SUM,
            });
        }
        Ok(TensorSeries {
            order,
            terms: BTreeMap::new(),
        })
    }

    /// Basis tensor with unit integer coefficient.
    pub fn basis(indices: &[u32]) -> Result<Self> {
        let mut t = TensorSeries::zero(indices.len())?;
        t.insert_add(indices.to_vec(), Scalar::ONE)?;
        Ok(t)
    }

    /// Order-1 basis element `psi_n`.
    pub fn psi(n: u32) -> Result<Self> {
        Self::basis(&[n])
    }

    /// Order-1 tensor from a second-kind series (floating coefficients).
    pub fn from_series(series: &ChebSeries) -> Result<Self> {
        if series.basis() != Basis::SecondKind {
            return Err(Error::BasisMismatch {
                expected: Basis::SecondKind,
                found: series.basis(),
            });
        }
        let mut t = TensorSeries::zero(1)?;
        for (n, &c) in series.coeffs().iter().enumerate() {
            if c != 0.0 {
                t.insert_add(vec![n as u32], Scalar::Float(c))?;
            }
        }
        Ok(t)
    }

    /// Order-1 tensor back to a second-kind series on the reference interval.
    pub fn to_series(&self) -> Result<ChebSeries> {
        if self.order != 1 {
            return Err(Error::OrderMismatch(self.order, 1));
        }
        let deg = self.terms.keys().map(|k| k[0]).max().unwrap_or(0) as usize;
        let mut coeffs = vec![0.0; if self.terms.is_empty() { 0 } else { deg + 1 }];
        for (idx, c) in &self.terms {
            coeffs[idx[0] as usize] = c.as_f64();
        }
        Ok(ChebSeries::second_kind(coeffs))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Scalar)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, indices: &[u32]) -> Scalar {
        self.terms.get(indices).copied().unwrap_or(Scalar::Int(0))
    }

    /// All stored coefficients are exact integers.
    pub fn is_integer(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    fn insert_add(&mut self, indices: Vec<u32>, coeff: Scalar) -> Result<()> {
        debug_assert_eq!(indices.len(), self.order);
        check_capacity(self.order, indices.iter().sum())?;
        use std::collections::btree_map::Entry;
        match self.terms.entry(indices) {
            Entry::Vacant(slot) => {
                if !coeff.is_zero() {
                    slot.insert(coeff);
                }
            }
            Entry::Occupied(mut slot) => {
                let v = *slot.get() + coeff;
                if v.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = v;
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorSeries) -> Result<TensorSeries> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.insert_add(idx.clone(), *c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> TensorSeries {
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, c)| {
                let v = c.mul_f64(factor);
                (!v.is_zero()).then(|| (k.clone(), v))
            })
            .collect();
        TensorSeries {
            order: self.order,
            terms,
        }
    }

    pub fn scale_int(&self, factor: i64) -> TensorSeries {
        if factor == 0 {
            return TensorSeries {
                order: self.order,
                terms: BTreeMap::new(),
            };
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.clone(), *c * Scalar::Int(factor)))
            .collect();
        TensorSeries {
            order: self.order,
            terms,
        }
    }

    /// Divided-difference derivative of an order-1 tensor:
    /// `psi_n -> sum_{l=0}^{n-1} psi_l (x) psi_{n-1-l}`, zero on constants.
    pub fn nc_derivative(&self) -> Result<TensorSeries> {
        if self.order != 1 {
            return Err(Error::OrderMismatch(self.order, 1));
        }
        self.partial_first_slot()
    }

    /// Applies the order-1 derivative rule to the first slot, identity on the
    /// rest, raising the order by one.
    pub fn partial_first_slot(&self) -> Result<TensorSeries> {
        let mut out = TensorSeries::zero(self.order + 1)?;
        for (idx, &c) in &self.terms {
            let a = idx[0];
            for l in 0..a {
                let mut key = Vec::with_capacity(self.order + 1);
                key.push(l);
                key.push(a - 1 - l);
                key.extend_from_slice(&idx[1..]);
                out.insert_add(key, c)?;
            }
        }
        Ok(out)
    }

    /// Iterated first-slot derivative, raising the order by `k`.
    ///
    /// On `psi_l` this is the sum over all writings of `l - k` as an ordered
    /// sum of `k + 1` non-negative indices, each with unit coefficient, and
    /// zero when `l < k`.
    pub fn nc_derivative_k(&self, k: usize) -> Result<TensorSeries> {
        if self.order != 1 {
            return Err(Error::OrderMismatch(self.order, 1));
        }
        let mut t = self.clone();
        for _ in 0..k {
            t = t.partial_first_slot()?;
        }
        Ok(t)
    }

    /// Adjoint of the derivative on order-2 tensors:
    /// `psi_a (x) psi_b -> psi_{a+b+1}`.
    pub fn adjoint_partial(&self) -> Result<TensorSeries> {
        if self.order != 2 {
            return Err(Error::OrderMismatch(self.order, 2));
        }
        let mut out = TensorSeries::zero(1)?;
        for (idx, &c) in &self.terms {
            out.insert_add(vec![idx[0] + idx[1] + 1], c)?;
        }
        Ok(out)
    }

    /// Tensor number operator: scales each basis tensor by its index sum.
    pub fn apply_m(&self) -> TensorSeries {
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, c)| {
                let sum: u32 = k.iter().sum();
                let v = *c * Scalar::Int(sum as i64);
                (!v.is_zero()).then(|| (k.clone(), v))
            })
            .collect();
        TensorSeries {
            order: self.order,
            terms,
        }
    }

    /// Resolvent of the tensor number operator: divides each basis tensor by
    /// `index sum + shift`; requires `shift > 0`.
    pub fn resolvent_m(&self, shift: f64) -> Result<TensorSeries> {
        if shift.is_nan() || shift <= 0.0 {
            return Err(Error::NonPositiveShift(shift));
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| {
                let sum: u32 = k.iter().sum();
                (k.clone(), c.mul_f64(1.0 / (sum as f64 + shift)))
            })
            .collect();
        Ok(TensorSeries {
            order: self.order,
            terms,
        })
    }

    /// Inner product under the k-fold semicircular measure; the basis tensors
    /// are orthonormal, so this is the coefficient pairing over shared
    /// multi-indices. Stays an exact integer when both sides do.
    pub fn inner_alpha(&self, other: &TensorSeries) -> Result<Scalar> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut all_int = true;
        let mut int_acc: i64 = 0;
        let mut float_terms = Vec::new();
        for (idx, &c1) in &small.terms {
            if let Some(&c2) = large.terms.get(idx) {
                let p = c1 * c2;
                match (all_int, p) {
                    (true, Scalar::Int(v)) => match int_acc.checked_add(v) {
                        Some(acc) => int_acc = acc,
                        None => {
                            all_int = false;
                            float_terms.push(int_acc as f64);
                            float_terms.push(v as f64);
                        }
                    },
                    _ => {
                        if all_int {
                            all_int = false;
                            float_terms.push(int_acc as f64);
                        }
                        float_terms.push(p.as_f64());
                    }
                }
            }
        }
        if all_int {
            Ok(Scalar::Int(int_acc))
        } else {
            Ok(Scalar::Float(pairwise_sum(&float_terms)))
        }
    }

    /// Squared norm under the k-fold semicircular measure.
    pub fn norm_sq_alpha(&self) -> f64 {
        let terms: Vec<f64> = self
            .terms
            .values()
            .map(|c| {
                let v = c.as_f64();
                v * v
            })
            .collect();
        pairwise_sum(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi(n: u32) -> TensorSeries {
        TensorSeries::psi(n).unwrap()
    }

    #[test]
    fn derivative_basis_rule() {
        // psi_2 -> psi_0 (x) psi_1 + psi_1 (x) psi_0
        let d = psi(2).nc_derivative().unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.coeff(&[0, 1]), Scalar::Int(1));
        assert_eq!(d.coeff(&[1, 0]), Scalar::Int(1));
        // constants die
        assert!(psi(0).nc_derivative().unwrap().is_empty());
        // linearity: 3 psi_1 -> 3 (psi_0 (x) psi_0)
        let d = psi(1).scale_int(3).nc_derivative().unwrap();
        assert_eq!(d.coeff(&[0, 0]), Scalar::Int(3));
    }

    #[test]
    fn first_slot_rule() {
        // psi_2 (x) psi_1 -> psi_0 (x) psi_1 (x) psi_1 + psi_1 (x) psi_0 (x) psi_1
        let t = TensorSeries::basis(&[2, 1]).unwrap();
        let d = t.partial_first_slot().unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.coeff(&[0, 1, 1]), Scalar::Int(1));
        assert_eq!(d.coeff(&[1, 0, 1]), Scalar::Int(1));
        // constant first slot dies
        let t = TensorSeries::basis(&[0, 5]).unwrap();
        assert!(t.partial_first_slot().unwrap().is_empty());
        let c = TensorSeries::basis(&[0, 0]).unwrap();
        assert!(c.partial_first_slot().unwrap().is_empty());
    }

    #[test]
    fn iterated_derivative_composition_sum() {
        // psi_3 with k = 2: the N_{2,1} = 3 order-3 tensors of index sum 1
        let d = psi(3).nc_derivative_k(2).unwrap();
        assert_eq!(d.len() as u128, composition_count(2, 1).value);
        for key in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            assert_eq!(d.coeff(&key), Scalar::Int(1));
        }
        // degree below the derivative order dies
        assert!(psi(2).nc_derivative_k(3).unwrap().is_empty());
        // k = 1 coincides with the one-step derivative
        assert_eq!(psi(2).nc_derivative_k(1).unwrap(), psi(2).nc_derivative().unwrap());
    }

    #[test]
    fn adjoint_rule() {
        let t = TensorSeries::basis(&[1, 2]).unwrap();
        assert_eq!(t.adjoint_partial().unwrap(), psi(4));
        let t = TensorSeries::basis(&[0, 0]).unwrap();
        assert_eq!(t.adjoint_partial().unwrap(), psi(1));
        // linearity: psi_0 (x) psi_1 + psi_1 (x) psi_0 -> 2 psi_2
        let t = TensorSeries::basis(&[0, 1])
            .unwrap()
            .add(&TensorSeries::basis(&[1, 0]).unwrap())
            .unwrap();
        assert_eq!(t.adjoint_partial().unwrap(), psi(2).scale_int(2));
        assert!(psi(3).adjoint_partial().is_err());
    }

    #[test]
    fn number_operator_and_resolvent() {
        let t = TensorSeries::basis(&[1, 3]).unwrap();
        assert_eq!(t.apply_m(), t.scale_int(4));
        assert!(TensorSeries::basis(&[0, 0]).unwrap().apply_m().is_empty());
        assert_eq!(psi(2).apply_m(), psi(2).scale_int(2));

        let r = psi(3).resolvent_m(1.0).unwrap();
        assert_eq!(r.coeff(&[3]), Scalar::Float(0.25));
        let r = TensorSeries::basis(&[0, 0]).unwrap().resolvent_m(2.0).unwrap();
        assert_eq!(r.coeff(&[0, 0]), Scalar::Float(0.5));
        assert!(psi(1).resolvent_m(0.0).is_err());
        assert!(psi(1).resolvent_m(-1.0).is_err());
    }

    #[test]
    fn resolvent_inverts_shifted_number_operator() {
        // (M + s)^(-1) then M + s*I restores the tensor
        let t = TensorSeries::basis(&[2, 1])
            .unwrap()
            .add(&TensorSeries::basis(&[0, 4]).unwrap().scale_int(-3))
            .unwrap();
        let shift = 2.0;
        let r = t.resolvent_m(shift).unwrap();
        let back = r.apply_m().add(&r.scale(shift)).unwrap();
        for (idx, c) in t.terms() {
            assert!((back.coeff(idx).as_f64() - c.as_f64()).abs() < 1e-15);
        }
    }

    #[test]
    fn inner_product_counts_compositions() {
        // <d^(k) psi_l, d^(k) psi_l> = C(l, k) for l = 5, k = 2
        let d = psi(5).nc_derivative_k(2).unwrap();
        assert_eq!(d.inner_alpha(&d).unwrap(), Scalar::Int(10));
        // distinct basis tensors are orthogonal
        let a = TensorSeries::basis(&[1, 2]).unwrap();
        let b = TensorSeries::basis(&[2, 1]).unwrap();
        assert_eq!(a.inner_alpha(&b).unwrap(), Scalar::Int(0));
        // derivatives of distinct basis elements have disjoint index sums
        let d5 = psi(5).nc_derivative().unwrap();
        let d7 = psi(7).nc_derivative().unwrap();
        assert_eq!(d5.inner_alpha(&d7).unwrap(), Scalar::Int(0));
        assert!(a.inner_alpha(&psi(1)).is_err());
    }

    #[test]
    fn composition_count_values() {
        assert_eq!(composition_count(2, 3).value, 10);
        assert_eq!(composition_count(0, 17).value, 1);
        assert_eq!(composition_count(9, 0).value, 1);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(TensorSeries::basis(&[1, 1, 1, 1, 1, 1]).is_err());
        assert!(TensorSeries::psi(65).is_err());
        assert!(TensorSeries::psi(64).is_ok());
    }

    #[test]
    fn series_round_trip() {
        let s = ChebSeries::second_kind(vec![1.5, 0.0, -2.0]);
        let t = TensorSeries::from_series(&s).unwrap();
        assert_eq!(t.len(), 2);
        let back = t.to_series().unwrap();
        assert_eq!(back.coeffs(), s.coeffs());
    }
}

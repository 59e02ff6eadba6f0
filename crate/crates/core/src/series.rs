//! Chebyshev series on an interval.
//!
//! The working bases are the rescaled Chebyshev polynomials on (-2, 2):
//! first kind `T_n(x/2)` (orthogonal for the arcsine measure) and second
//! kind `U_n(x/2)` (orthonormal for the semicircular measure). A series on
//! a general interval (a, b) stores the coefficients of its pullback to
//! the reference interval.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::util::pairwise_sum;
use serde::{Deserialize, Serialize};

/// Relative size below which trailing coefficients are dropped.
pub const TRUNCATION_RELATIVE_TOL: f64 = 1e-14;

/// Fraction of the interval length below which a divided difference switches
/// to its derivative-based diagonal limit.
pub const DIAGONAL_BAND_FRACTION: f64 = 1e-6;

/// Correctly-inverted division: walks `x0` by ulps until `back(x)` lands on
/// `target` bit for bit. Some targets have no representable preimage (the
/// image grid of a multiplication can skip values across a binade); those
/// keep the correctly-rounded `x0`.
pub(crate) fn nudge_to_preimage(x0: f64, target: f64, back: impl Fn(f64) -> f64) -> f64 {
    let first = back(x0);
    if first == target || !first.is_finite() || !x0.is_finite() {
        return x0;
    }
    let upward = first < target;
    let mut x = x0;
    for _ in 0..3 {
        x = if upward { x.next_up() } else { x.next_down() };
        let missed = back(x);
        if missed == target {
            return x;
        }
        if !missed.is_finite() || (missed < target) != upward {
            break;
        }
    }
    x0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// Rescaled first kind, `T_n(x/2)`.
    FirstKind,
    /// Rescaled second kind, `U_n(x/2)`.
    SecondKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChebSeries {
    basis: Basis,
    coeffs: Vec<f64>,
    interval: Interval,
}

impl ChebSeries {
    pub fn new(basis: Basis, coeffs: Vec<f64>, interval: Interval) -> Self {
        ChebSeries {
            basis,
            coeffs,
            interval,
        }
    }

    /// First-kind series on the reference interval.
    pub fn first_kind(coeffs: Vec<f64>) -> Self {
        Self::new(Basis::FirstKind, coeffs, Interval::REFERENCE)
    }

    /// Second-kind series on the reference interval.
    pub fn second_kind(coeffs: Vec<f64>) -> Self {
        Self::new(Basis::SecondKind, coeffs, Interval::REFERENCE)
    }

    /// The basis element `T_n(x/2)` on the reference interval.
    pub fn phi(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Self::first_kind(coeffs)
    }

    /// The basis element `U_n(x/2)` on the reference interval.
    pub fn psi(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Self::second_kind(coeffs)
    }

    pub fn zero(basis: Basis) -> Self {
        Self::new(basis, Vec::new(), Interval::REFERENCE)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    /// Index of the last kept coefficient (0 for an empty series).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Same coefficients reinterpreted on the reference interval (the pullback).
    pub fn to_reference(&self) -> ChebSeries {
        ChebSeries::new(self.basis, self.coeffs.clone(), Interval::REFERENCE)
    }

    pub fn with_interval(&self, interval: Interval) -> ChebSeries {
        ChebSeries::new(self.basis, self.coeffs.clone(), interval)
    }

    /// Drops trailing coefficients below `1e-14 * max |coeff|`.
    pub fn truncated(&self) -> ChebSeries {
        let tol = TRUNCATION_RELATIVE_TOL * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while let Some(&last) = coeffs.last() {
            if last.abs() <= tol {
                coeffs.pop();
            } else {
                break;
            }
        }
        ChebSeries::new(self.basis, coeffs, self.interval)
    }

    /// Interpolates `f` at the degree+1 Chebyshev-Lobatto nodes of the interval.
    ///
    /// Exact to roundoff when `f` is a polynomial of degree at most `degree`.
    /// A non-finite sample is rejected with the offending node.
    pub fn project<F: Fn(f64) -> f64>(f: F, degree: usize, interval: Interval) -> Result<Self> {
        let n = degree.max(1);
        // cos(pi*m/n) table indexed mod 2n keeps the transform symmetric.
        let table: Vec<f64> = (0..2 * n)
            .map(|m| (std::f64::consts::PI * m as f64 / n as f64).cos())
            .collect();
        let mut samples = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let u = 2.0 * table[j % (2 * n)];
            let x = interval.from_reference(u);
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { node: x, value: v });
            }
            samples.push(v);
        }
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut terms = vec![0.0; n + 1];
        for k in 0..=n {
            for (j, term) in terms.iter_mut().enumerate() {
                let halved = j == 0 || j == n;
                let c = table[(j * k) % (2 * n)];
                *term = samples[j] * c * if halved { 0.5 } else { 1.0 };
            }
            let gamma = if k == 0 || k == n { 2.0 } else { 1.0 };
            coeffs.push(2.0 * pairwise_sum(&terms) / (n as f64 * gamma));
        }
        Ok(ChebSeries::new(Basis::FirstKind, coeffs, interval).truncated())
    }

    /// Clenshaw evaluation at `x`. Points outside the interval are allowed
    /// (the polynomial simply extends).
    pub fn evaluate(&self, x: f64) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        // map to y in [-1, 1]
        let y = self.interval.to_reference(x) / 2.0;
        let two_y = 2.0 * y;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let next = c + two_y * b1 - b2;
            b2 = b1;
            b1 = next;
        }
        match self.basis {
            Basis::FirstKind => self.coeffs[0] + y * b1 - b2,
            Basis::SecondKind => self.coeffs[0] + two_y * b1 - b2,
        }
    }

    /// Derivative of a first-kind series, expressed in the second-kind basis:
    /// `d/dx T_n(x/2) = (n/2) U_{n-1}(x/2)`, rescaled by `4/(b-a)` on a
    /// general interval.
    pub fn differentiate(&self) -> Result<ChebSeries> {
        if self.basis != Basis::FirstKind {
            return Err(Error::BasisMismatch {
                expected: Basis::FirstKind,
                found: self.basis,
            });
        }
        let scale = 1.0 / self.interval.scale();
        let mut coeffs = vec![0.0; self.coeffs.len().saturating_sub(1)];
        for (n, &a) in self.coeffs.iter().enumerate().skip(1) {
            coeffs[n - 1] = a * n as f64 / 2.0 * scale;
        }
        Ok(ChebSeries::new(Basis::SecondKind, coeffs, self.interval))
    }

    /// Converts between the two bases, exactly in the coefficients.
    ///
    /// Uses `T_n = (U_n - U_{n-2})/2` one way and
    /// `U_n = 2(T_n + T_{n-2} + ...) [+ T_0 adjustment]` the other.
    pub fn convert_basis(&self) -> ChebSeries {
        match self.basis {
            Basis::FirstKind => {
                let mut out = vec![0.0; self.coeffs.len()];
                for (n, &a) in self.coeffs.iter().enumerate() {
                    match n {
                        0 => out[0] += a,
                        1 => out[1] += a / 2.0,
                        _ => {
                            out[n] += a / 2.0;
                            out[n - 2] -= a / 2.0;
                        }
                    }
                }
                ChebSeries::new(Basis::SecondKind, out, self.interval)
            }
            Basis::SecondKind => {
                let mut out = vec![0.0; self.coeffs.len()];
                for (n, &b) in self.coeffs.iter().enumerate() {
                    let mut k = n as isize;
                    while k >= 0 {
                        let w = if k == 0 { 1.0 } else { 2.0 };
                        out[k as usize] += w * b;
                        k -= 2;
                    }
                }
                ChebSeries::new(Basis::FirstKind, out, self.interval)
            }
        }
    }

    /// View in the first-kind basis (identity or exact conversion).
    pub fn as_first_kind(&self) -> ChebSeries {
        match self.basis {
            Basis::FirstKind => self.clone(),
            Basis::SecondKind => self.convert_basis(),
        }
    }

    /// View in the second-kind basis.
    pub fn as_second_kind(&self) -> ChebSeries {
        match self.basis {
            Basis::FirstKind => self.convert_basis(),
            Basis::SecondKind => self.clone(),
        }
    }

    /// Antiderivative of a second-kind series with zero arcsine mean:
    /// the unique first-kind series `F` with `F' = self` and zero `phi_0`
    /// coefficient.
    ///
    /// Each coefficient is the correctly-inverted division: among the
    /// representable candidates it picks the one that [`differentiate`]
    /// maps back onto the input bit for bit (whenever such a value exists),
    /// so the derivative undoes this exactly.
    ///
    /// [`differentiate`]: ChebSeries::differentiate
    pub fn antiderivative_zero_mean(&self) -> Result<ChebSeries> {
        if self.basis != Basis::SecondKind {
            return Err(Error::BasisMismatch {
                expected: Basis::SecondKind,
                found: self.basis,
            });
        }
        let scale = self.interval.scale();
        let inv_scale = 1.0 / self.interval.scale();
        let mut coeffs = vec![0.0; self.coeffs.len() + 1];
        for (n, &b) in self.coeffs.iter().enumerate() {
            let n1 = n as f64 + 1.0;
            // mirror of the expression in differentiate()
            let back = |a: f64| a * n1 / 2.0 * inv_scale;
            let a0 = b * 2.0 / n1 * scale;
            coeffs[n + 1] = nudge_to_preimage(a0, b, back);
        }
        if self.coeffs.is_empty() {
            coeffs.clear();
        }
        Ok(ChebSeries::new(Basis::FirstKind, coeffs, self.interval))
    }

    fn check_compatible(&self, other: &ChebSeries) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                expected: self.basis,
                found: other.basis,
            });
        }
        if self.interval != other.interval {
            return Err(Error::IntervalMismatch(
                self.interval.lower(),
                self.interval.upper(),
                other.interval.lower(),
                other.interval.upper(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &ChebSeries) -> Result<ChebSeries> {
        self.check_compatible(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|n| self.coeff(n) + other.coeff(n)).collect();
        Ok(ChebSeries::new(self.basis, coeffs, self.interval))
    }

    pub fn sub(&self, other: &ChebSeries) -> Result<ChebSeries> {
        self.check_compatible(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|n| self.coeff(n) - other.coeff(n)).collect();
        Ok(ChebSeries::new(self.basis, coeffs, self.interval))
    }

    pub fn scale(&self, factor: f64) -> ChebSeries {
        let coeffs = self.coeffs.iter().map(|c| c * factor).collect();
        ChebSeries::new(self.basis, coeffs, self.interval)
    }

    /// Arcsine inner product of two first-kind series:
    /// `<phi_0, phi_0> = 1`, `<phi_n, phi_n> = 1/2` for n >= 1.
    pub fn inner_beta(&self, other: &ChebSeries) -> Result<f64> {
        if self.basis != Basis::FirstKind || other.basis != Basis::FirstKind {
            return Err(Error::BasisMismatch {
                expected: Basis::FirstKind,
                found: if self.basis != Basis::FirstKind {
                    self.basis
                } else {
                    other.basis
                },
            });
        }
        self.check_compatible(other)?;
        let len = self.coeffs.len().min(other.coeffs.len());
        let terms: Vec<f64> = (0..len)
            .map(|n| {
                let w = if n == 0 { 1.0 } else { 0.5 };
                w * self.coeffs[n] * other.coeffs[n]
            })
            .collect();
        Ok(pairwise_sum(&terms))
    }

    /// Semicircular inner product of two second-kind series (orthonormal basis).
    pub fn inner_alpha(&self, other: &ChebSeries) -> Result<f64> {
        if self.basis != Basis::SecondKind || other.basis != Basis::SecondKind {
            return Err(Error::BasisMismatch {
                expected: Basis::SecondKind,
                found: if self.basis != Basis::SecondKind {
                    self.basis
                } else {
                    other.basis
                },
            });
        }
        self.check_compatible(other)?;
        let len = self.coeffs.len().min(other.coeffs.len());
        let terms: Vec<f64> = (0..len).map(|n| self.coeffs[n] * other.coeffs[n]).collect();
        Ok(pairwise_sum(&terms))
    }

    /// Divided difference `(f(x) - f(y))/(x - y)` with the derivative-based
    /// diagonal limit inside the band `|x - y| <= 1e-6 (b - a)`.
    pub fn divided_difference(&self) -> impl Fn(f64, f64) -> f64 {
        let f = self.clone();
        let df = self
            .as_first_kind()
            .differentiate()
            .expect("first-kind conversion is total");
        let band = DIAGONAL_BAND_FRACTION * self.interval.length();
        move |x: f64, y: f64| {
            if (x - y).abs() > band {
                (f.evaluate(x) - f.evaluate(y)) / (x - y)
            } else {
                df.evaluate(0.5 * (x + y))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn project_linear_is_two_phi_one() {
        // x = 2 T_1(x/2)
        let s = ChebSeries::project(|x| x, 4, Interval::REFERENCE).unwrap();
        assert_eq!(s.degree(), 1);
        assert_close(s.coeff(0), 0.0, 1e-15);
        assert_close(s.coeff(1), 2.0, 1e-15);
    }

    #[test]
    fn project_half_square() {
        // x^2/2 = phi_0 + phi_2, checked by expanding T_2(x/2) = x^2/2 - 1
        let s = ChebSeries::project(|x| x * x / 2.0, 4, Interval::REFERENCE).unwrap();
        assert_close(s.coeff(0), 1.0, 1e-14);
        assert_close(s.coeff(1), 0.0, 1e-14);
        assert_close(s.coeff(2), 1.0, 1e-14);
        for x in [-2.0, -0.7, 0.0, 1.1, 2.0] {
            assert_close(s.evaluate(x), x * x / 2.0, 1e-14);
        }
    }

    #[test]
    fn project_quartic_monomial() {
        // x^4 = 6 phi_0 + 8 phi_2 + 2 phi_4 (monomial-to-Chebyshev conversion)
        let s = ChebSeries::project(|x| x.powi(4), 8, Interval::REFERENCE).unwrap();
        assert_eq!(s.degree(), 4);
        for (n, expect) in [(0, 6.0), (1, 0.0), (2, 8.0), (3, 0.0), (4, 2.0)] {
            assert_close(s.coeff(n), expect, 1e-12);
        }
        for x in [-1.9, -0.3, 0.8, 1.5, 2.0] {
            assert_close(s.evaluate(x), x.powi(4), 1e-12);
        }
    }

    #[test]
    fn project_rejects_non_finite() {
        let err = ChebSeries::project(|x| 1.0 / (x - 2.0), 6, Interval::REFERENCE);
        assert!(matches!(err, Err(Error::NonFiniteSample { .. })));
    }

    #[test]
    fn evaluate_basis_endpoints() {
        // T_2(1) = 1, U_3(1) = 4
        assert_close(ChebSeries::phi(2).evaluate(2.0), 1.0, 1e-15);
        assert_close(ChebSeries::psi(3).evaluate(2.0), 4.0, 1e-15);
        let s = ChebSeries::project(|x| x.powi(4), 8, Interval::REFERENCE).unwrap();
        assert_close(s.evaluate(1.5), 5.0625, 1e-12);
    }

    #[test]
    fn differentiate_basis_rule() {
        // phi_1' = (1/2) psi_0
        let d = ChebSeries::phi(1).differentiate().unwrap();
        assert_eq!(d.coeffs(), &[0.5]);
        // phi_0' = 0
        let d0 = ChebSeries::phi(0).differentiate().unwrap();
        assert!(d0.is_empty());
        // (x^2/2 - 1)' = x = psi_1 (symbolic differentiation of T_2(x/2))
        let d2 = ChebSeries::phi(2).differentiate().unwrap();
        assert_eq!(d2.coeffs(), &[0.0, 1.0]);
        // second-kind input is rejected
        assert!(ChebSeries::psi(2).differentiate().is_err());
    }

    #[test]
    fn differentiate_scales_on_general_interval() {
        let iv = Interval::new(0.0, 2.0).unwrap();
        // f(x) = x on (0,2): pullback u/2 + ... -> f' = 1 everywhere
        let s = ChebSeries::project(|x| x, 3, iv).unwrap();
        let d = s.differentiate().unwrap();
        for x in [0.1, 0.9, 1.7] {
            assert_close(d.evaluate(x), 1.0, 1e-13);
        }
    }

    #[test]
    fn convert_basis_examples() {
        // phi_0 -> psi_0
        let c = ChebSeries::phi(0).convert_basis();
        assert_eq!(c.coeffs(), &[1.0]);
        // phi_2 = (psi_2 - psi_0)/2, checked by evaluating both at 5 points
        let c2 = ChebSeries::phi(2).convert_basis();
        assert_eq!(c2.coeffs(), &[-0.5, 0.0, 0.5]);
        for x in [-2.0, -1.0, 0.0, 0.5, 2.0] {
            assert_close(c2.evaluate(x), ChebSeries::phi(2).evaluate(x), 1e-15);
        }
        // psi_1 = 2 phi_1 since U_1 = 2T_1
        let u = ChebSeries::psi(1).convert_basis();
        assert_eq!(u.coeffs(), &[0.0, 2.0]);
    }

    #[test]
    fn antiderivative_examples() {
        // integral of 1 is x = 2 phi_1, already mean-zero for the arcsine measure
        let a = ChebSeries::psi(0).antiderivative_zero_mean().unwrap();
        assert_eq!(a.coeffs(), &[0.0, 2.0]);
        // integral of x is x^2/2 + C; its mean-zero part is phi_2
        let b = ChebSeries::psi(1).antiderivative_zero_mean().unwrap();
        assert_eq!(b.coeffs(), &[0.0, 0.0, 1.0]);
        // zero series maps to zero series
        let z = ChebSeries::zero(Basis::SecondKind)
            .antiderivative_zero_mean()
            .unwrap();
        assert!(z.is_empty());
        // derivative undoes it exactly in coefficients
        let s = ChebSeries::second_kind(vec![0.25, -1.5, 0.0, 3.0]);
        let round = s.antiderivative_zero_mean().unwrap().differentiate().unwrap();
        assert_eq!(round.coeffs(), s.coeffs());
    }

    #[test]
    fn truncation_drops_roundoff_tail() {
        let s = ChebSeries::first_kind(vec![1.0, 0.5, 1e-20, 1e-18]).truncated();
        assert_eq!(s.degree(), 1);
    }

    #[test]
    fn divided_difference_diagonal_limit() {
        let s = ChebSeries::project(|x| x * x / 2.0, 4, Interval::REFERENCE).unwrap();
        let dd = s.divided_difference();
        // (x^2/2 - y^2/2)/(x - y) = (x + y)/2
        assert_close(dd(1.0, -0.5), 0.25, 1e-13);
        // on the diagonal the derivative limit takes over
        assert_close(dd(0.8, 0.8), 0.8, 1e-13);
        assert_close(dd(0.8, 0.8 + 1e-9), 0.8, 1e-8);
    }
}

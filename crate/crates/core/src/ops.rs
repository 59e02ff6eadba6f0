//! Diagonal spectral operators and the variance-expansion machinery.
//!
//! `N` counts the first-kind basis (`N phi_n = n phi_n`), `E` inverts it on
//! mean-zero functions (`E phi_n = phi_n / n`, `E phi_0 = 0`), `M` counts the
//! second-kind basis, and the semigroup acts by `e^{-nt}` on `psi_n`. All
//! functions pull their argument back to the reference interval first, so a
//! series on (a, b) is treated as the function it represents there.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::quad::gauss_legendre;
use crate::series::{Basis, ChebSeries};
use crate::tensor::TensorSeries;
use crate::util::{binomial_f64, pairwise_sum};

/// Degree/order caps under which expansion terms are double-checked against
/// explicit tensor arithmetic.
pub const TENSOR_CHECK_MAX_DEGREE: usize = 15;
pub const TENSOR_CHECK_MAX_ORDER: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralOperator {
    /// Counting operator on the first-kind basis.
    Counting,
    /// Inverse of the counting operator; the mean component maps to zero.
    /// With `require_zero_mean` the input must already have zero arcsine mean.
    InverseCounting { require_zero_mean: bool },
    /// Counting operator on the second-kind basis.
    CountingSecondKind,
    /// Resolvent `(M + shift)^{-1}` on the second-kind basis, `shift > 0`.
    Resolvent { shift: f64 },
    /// Ornstein-Uhlenbeck semigroup `e^{-tM}` on the second-kind basis.
    Semigroup { time: f64 },
}

impl SpectralOperator {
    fn expected_basis(&self) -> Basis {
        match self {
            SpectralOperator::Counting | SpectralOperator::InverseCounting { .. } => {
                Basis::FirstKind
            }
            _ => Basis::SecondKind,
        }
    }
}

/// Coefficient-wise diagonal action of the operator on a matching-basis series.
pub fn apply(op: SpectralOperator, s: &ChebSeries) -> Result<ChebSeries> {
    let expected = op.expected_basis();
    if s.basis() != expected {
        return Err(Error::BasisMismatch {
            expected,
            found: s.basis(),
        });
    }
    let eigen: Box<dyn Fn(usize) -> f64> = match op {
        SpectralOperator::Counting => Box::new(|n| n as f64),
        SpectralOperator::InverseCounting { require_zero_mean } => {
            if require_zero_mean && s.coeff(0).abs() > 1e-14 * s.max_abs_coeff().max(1.0) {
                return Err(Error::Invalid(format!(
                    "inverse counting operator needs a zero-mean input, found mean coefficient {}",
                    s.coeff(0)
                )));
            }
            // correctly-inverted division: the counting operator maps the
            // result back onto the input bit for bit where a representable
            // preimage exists
            let coeffs: Vec<f64> = s
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, &a)| {
                    if n == 0 {
                        return 0.0;
                    }
                    let nf = n as f64;
                    crate::series::nudge_to_preimage(a / nf, a, |e| e * nf)
                })
                .collect();
            return Ok(ChebSeries::new(s.basis(), coeffs, s.interval()));
        }
        SpectralOperator::CountingSecondKind => Box::new(|n| n as f64),
        SpectralOperator::Resolvent { shift } => {
            if shift.is_nan() || shift <= 0.0 {
                return Err(Error::NonPositiveShift(shift));
            }
            Box::new(move |n| 1.0 / (n as f64 + shift))
        }
        SpectralOperator::Semigroup { time } => {
            if time.is_nan() || time < 0.0 {
                return Err(Error::Invalid(format!(
                    "semigroup time must be non-negative, got {time}"
                )));
            }
            Box::new(move |n| (-(n as f64) * time).exp())
        }
    };
    let coeffs = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, &c)| c * eigen(n))
        .collect();
    Ok(ChebSeries::new(s.basis(), coeffs, s.interval()))
}

/// Pullback derivative in the second-kind basis: the interval is forgotten
/// and the coefficients are differentiated on the reference interval.
pub fn derivative_psi(s: &ChebSeries) -> ChebSeries {
    s.to_reference()
        .as_first_kind()
        .differentiate()
        .expect("first-kind conversion is total")
}

/// The quadratic form `(1/2) <N phi, phi>_beta = (1/4) sum n a_n^2`, which is
/// the kernel-weighted double integral of the squared divided difference.
///
/// On a general interval this is the variance under the rescaled kernel.
pub fn omega_variance(phi: &ChebSeries) -> f64 {
    let s = phi.to_reference().as_first_kind();
    let terms: Vec<f64> = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, &a)| 0.25 * n as f64 * a * a)
        .collect();
    pairwise_sum(&terms)
}

/// The resolvent form `2 <(M + I)^{-1} phi', phi'>_alpha = sum 2 b_n^2/(n+1)`,
/// equal to `<N phi, phi>_beta` (twice the kernel variance).
pub fn resolvent_form(phi: &ChebSeries) -> f64 {
    let d = derivative_psi(phi);
    let terms: Vec<f64> = d
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, &b)| 2.0 * b * b / (n as f64 + 1.0))
        .collect();
    pairwise_sum(&terms)
}

/// Semigroup representation of the interpolation pairing:
/// `int_0^1 sum_n b_n c_n s^n ds` for the derivative coefficients of the two
/// inputs, evaluated by Gauss-Legendre on (0, 1) and cross-checked against
/// the closed form `sum b_n c_n/(n+1)`.
pub fn interpolation_rhs(phi: &ChebSeries, psi: &ChebSeries) -> f64 {
    let b = derivative_psi(phi);
    let c = derivative_psi(psi);
    let len = b.coeffs().len().min(c.coeffs().len());
    let prods: Vec<f64> = (0..len).map(|n| b.coeff(n) * c.coeff(n)).collect();
    let closed = pairwise_sum(
        &prods
            .iter()
            .enumerate()
            .map(|(n, &p)| p / (n as f64 + 1.0))
            .collect::<Vec<_>>(),
    );
    let rule = gauss_legendre(len / 2 + 4, Interval::new(0.0, 1.0).expect("unit interval"));
    let value = rule
        .integrate(|s| {
            // Horner evaluation of sum p_n s^n
            prods.iter().rev().fold(0.0, |acc, &p| acc * s + p)
        })
        .expect("polynomial integrand is finite");
    debug_assert!(
        (value - closed).abs() <= 1e-12 * (1.0 + closed.abs()),
        "quadrature {value} disagrees with closed form {closed}"
    );
    value
}

/// Squared norm of the (l-1)-fold derivative of `phi'` under the l-fold
/// semicircular measure, in closed form: `sum_n b_n^2 C(n, l-1)`.
fn derivative_norm_sq(dcoeffs: &[f64], l: usize) -> f64 {
    let terms: Vec<f64> = dcoeffs
        .iter()
        .enumerate()
        .map(|(n, &b)| b * b * binomial_f64(n as u64, (l - 1) as u64))
        .collect();
    pairwise_sum(&terms)
}

/// Alternating expansion terms of the variance:
/// term l is `((-1)^{l-1}/l) * |d^{(l-1)} phi'|^2` for `1 <= l <= kmax`.
///
/// Where the degree and order caps allow, the closed form is cross-checked
/// against explicit tensor arithmetic.
pub fn expansion_terms(phi: &ChebSeries, kmax: usize) -> Vec<f64> {
    let d = derivative_psi(phi);
    let mut out = Vec::with_capacity(kmax);
    for l in 1..=kmax {
        let sign = if l.is_multiple_of(2) { -1.0 } else { 1.0 };
        let norm_sq = derivative_norm_sq(d.coeffs(), l);
        if d.degree() <= TENSOR_CHECK_MAX_DEGREE && l <= TENSOR_CHECK_MAX_ORDER && !d.is_empty() {
            let explicit = TensorSeries::from_series(&d)
                .and_then(|t| t.nc_derivative_k(l - 1))
                .map(|t| t.norm_sq_alpha())
                .expect("within tensor capacity by the caps");
            debug_assert!(
                (explicit - norm_sq).abs() <= 1e-12 * (1.0 + norm_sq.abs()),
                "tensor norm {explicit} disagrees with closed form {norm_sq} at l = {l}"
            );
        }
        out.push(sign / l as f64 * norm_sq);
    }
    out
}

/// Closed-form remainder after `k` expansion terms:
/// `((-1)^k/k) <M^(k)(M^(k)+kI)^{-1} d^{(k-1)} phi', d^{(k-1)} phi'>`,
/// which per basis element contributes `b_n^2 C(n, k-1) (n-k+1)/(n+1)`.
pub fn remainder_term(phi: &ChebSeries, k: usize) -> f64 {
    assert!(k >= 1, "remainder order must be at least 1");
    let d = derivative_psi(phi);
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let terms: Vec<f64> = d
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, &b)| {
            let nf = n as f64;
            b * b * binomial_f64(n as u64, (k - 1) as u64) * (nf - k as f64 + 1.0) / (nf + 1.0)
        })
        .collect();
    sign / k as f64 * pairwise_sum(&terms)
}

/// Remainder computed through explicit tensor operations; errors when the
/// derivative order or degree exceeds the tensor capacity.
pub fn remainder_term_tensor(phi: &ChebSeries, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Invalid("remainder order must be at least 1".into()));
    }
    let d = derivative_psi(phi);
    if d.is_empty() {
        return Ok(0.0);
    }
    let t = TensorSeries::from_series(&d)?.nc_derivative_k(k - 1)?;
    let inner = t
        .apply_m()
        .resolvent_m(k as f64)?
        .inner_alpha(&t)?
        .as_f64();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign / k as f64 * inner)
}

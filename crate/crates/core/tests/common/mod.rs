//! Independent oracles for the integration tests.
//!
//! Everything here avoids the crate's own quadrature rules and spectral
//! formulas: integrals run through theta-substituted composite Simpson,
//! basis conversions through the raw three-term recurrences in monomial
//! space, and counts through direct enumeration.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Composite Simpson on [a, b] with n panels (n even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n.is_multiple_of(2) { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * j as f64);
    }
    acc * h / 3.0
}

/// `int f d beta` via x = 2 cos(theta): `(1/pi) int_0^pi f(2 cos t) dt`.
pub fn beta_integral_oracle<F: Fn(f64) -> f64>(f: F, panels: usize) -> f64 {
    simpson(|t| f(2.0 * t.cos()), 0.0, PI, panels) / PI
}

/// `int f d alpha` via the same substitution:
/// `(2/pi) int_0^pi f(2 cos t) sin^2 t dt`.
pub fn alpha_integral_oracle<F: Fn(f64) -> f64>(f: F, panels: usize) -> f64 {
    simpson(|t| f(2.0 * t.cos()) * t.sin() * t.sin(), 0.0, PI, panels) * 2.0 / PI
}

/// Double integral of `g` against the fluctuation kernel on the reference
/// square, fully substituted: the kernel becomes
/// `(4 - 4 cos s cos t)/(4 pi^2) ds dt` on [0, pi]^2.
pub fn omega_integral_oracle<G: Fn(f64, f64) -> f64 + Copy>(g: G, panels: usize) -> f64 {
    let inner = |s: f64| {
        simpson(
            |t| g(2.0 * s.cos(), 2.0 * t.cos()) * (4.0 - 4.0 * s.cos() * t.cos()),
            0.0,
            PI,
            panels,
        )
    };
    simpson(inner, 0.0, PI, panels) / (4.0 * PI * PI)
}

/// Coefficients of `x^k` in the rescaled first-kind basis, built from the
/// recurrence `x phi_n = phi_{n+1} + phi_{n-1}` (`x phi_0 = 2 phi_1`).
pub fn monomial_in_phi_basis(k: usize) -> Vec<f64> {
    let mut coeffs = vec![1.0]; // x^0 = phi_0
    for _ in 0..k {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (n, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if n == 0 {
                next[1] += 2.0 * c;
            } else {
                next[n + 1] += c;
                next[n - 1] += c;
            }
        }
        coeffs = next;
    }
    coeffs
}

/// Coefficients of `x^k` in the rescaled second-kind basis, from
/// `x psi_n = psi_{n+1} + psi_{n-1}` (`x psi_0 = psi_1`).
pub fn monomial_in_psi_basis(k: usize) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for _ in 0..k {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (n, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            next[n + 1] += c;
            if n > 0 {
                next[n - 1] += c;
            }
        }
        coeffs = next;
    }
    coeffs
}

/// Logarithmic potential of the semicircular measure at `x0` strictly inside
/// the support: `int log|x0 - y| alpha(dy)`, computed in the angular variable
/// (where the density is analytic) with exponential grading into the interior
/// log singularity from both sides. The identity `x0^2/4 - 1/2` is what the
/// tests check.
pub fn semicircle_log_potential_oracle(x0: f64) -> f64 {
    let theta0 = (x0 / 2.0).acos();
    let side = |len: f64, sign: f64| -> f64 {
        if len <= 1e-12 {
            return 0.0;
        }
        // theta = theta0 + sign * len * e^{-t}
        simpson(
            |t| {
                let r = len * (-t).exp();
                let theta = theta0 + sign * r;
                let y = 2.0 * theta.cos();
                let s = theta.sin();
                (2.0 / PI) * s * s * (x0 - y).abs().max(1e-320).ln() * r
            },
            0.0,
            45.0,
            8000,
        )
    };
    side(PI - theta0, 1.0) + side(theta0, -1.0)
}

/// Principal value `p.v. int 2/(x0 - y) alpha(dy)` computed in the angular
/// variable, patched near the singular angle by the analytic limit; the
/// companion `p.v. int dy/((x0 - y) pi sqrt(4-y^2))` vanishes because the
/// arcsine measure is the zero-field equilibrium measure of the interval.
pub fn pv_hilbert_alpha_oracle(x0: f64) -> f64 {
    let t0 = (x0 / 2.0).acos();
    let s0 = t0.sin() * t0.sin();
    let integrand = |t: f64| {
        if (t - t0).abs() < 1e-7 {
            (t0.cos() + t.cos()) / 2.0
        } else {
            (t.sin() * t.sin() - s0) / (x0 - 2.0 * t.cos())
        }
    };
    simpson(integrand, 0.0, PI, 20000) * 4.0 / PI
}

/// Direct enumeration of the writings of `l` as an ordered sum of `parts`
/// non-negative integers.
pub fn count_compositions(l: u32, parts: u32) -> u64 {
    if parts == 0 {
        return (l == 0) as u64;
    }
    if parts == 1 {
        return 1;
    }
    (0..=l)
        .map(|first| count_compositions(l - first, parts - 1))
        .sum()
}

/// Brute-force alternating sum `sum_{j=0}^n (-1)^j C(n, j)/(j+1)`.
pub fn alternating_binomial_sum(n: u64) -> f64 {
    let mut acc = 0.0;
    for j in 0..=n {
        let mut c = 1.0;
        for i in 0..j {
            c = c * (n - i) as f64 / (i + 1) as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * c / (j + 1) as f64;
    }
    acc
}

/// Deterministic xorshift stream for reproducible pseudo-random test inputs,
/// independent of the crate's RNG choices.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in (-1, 1).
    pub fn next_coeff(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 * 2.0 - 1.0
    }
}

pub fn assert_close(a: f64, b: f64, tol: f64, label: &str) {
    assert!(
        (a - b).abs() <= tol,
        "{label}: {a} vs {b} (diff {:.3e}, tol {tol:.3e})",
        (a - b).abs()
    );
}

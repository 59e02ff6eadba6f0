//! Equilibrium measures of convex potentials and the weighted resolvent form.
//!
//! For a convex confining potential the equilibrium measure lives on a single
//! interval (a, b); pulled back to the reference interval its density is
//! `w d beta` with weight `w = 1 - (1/2) N V~`, where `V~` is the rescaled
//! potential. The support is pinned down by the two arcsine moment
//! constraints on `V~'`, and the inverse of `K_V = M_V + V''` is approximated
//! by a Galerkin section in the second-kind basis.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::ops::derivative_psi;
use crate::quad::{gauss_nodes, MeasureKind, Quadrature};
use crate::series::{Basis, ChebSeries};
use crate::util::pairwise_sum;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Default residual tolerance of the support solver.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Convexity slack allowed at the check nodes.
pub const CONVEXITY_TOL: f64 = -1e-10;
/// Pointwise floor for the equilibrium weight.
pub const DENSITY_FLOOR: f64 = -1e-9;
/// Below this the second derivative counts as vanishing in the
/// Brascamp-Lieb integrand.
pub const DEGENERATE_SECOND_DERIVATIVE: f64 = 1e-12;

/// Declared domain of a potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    RealLine,
    /// The open half-line (0, infinity).
    HalfLine,
    Interval(f64, f64),
}

impl Domain {
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Domain::RealLine => true,
            Domain::HalfLine => x > 0.0,
            Domain::Interval(lo, hi) => lo <= x && x <= hi,
        }
    }
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Domain::RealLine => serializer.serialize_str("real-line"),
            Domain::HalfLine => serializer.serialize_str("half-line"),
            Domain::Interval(lo, hi) => [lo, hi].serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Pair([f64; 2]),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Name(s) => match s.as_str() {
                "real-line" => Ok(Domain::RealLine),
                "half-line" => Ok(Domain::HalfLine),
                other => Err(D::Error::custom(format!(
                    "unknown domain {other:?}; expected \"real-line\", \"half-line\" or [lo, hi]"
                ))),
            },
            Repr::Pair([lo, hi]) => Ok(Domain::Interval(lo, hi)),
        }
    }
}

/// Convex confining potential `sum_p c_p x^p - s log(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Potential {
    /// Pairs (power, coefficient), sorted by power, duplicates merged.
    monomials: Vec<(u32, f64)>,
    /// Coefficient `s >= 0` of the `-s log(x)` term.
    #[serde(default)]
    log_s: f64,
    #[serde(default = "default_domain")]
    domain: Domain,
}

fn default_domain() -> Domain {
    Domain::RealLine
}

impl Potential {
    pub fn new(monomials: Vec<(u32, f64)>, log_s: f64, domain: Domain) -> Result<Self> {
        if !log_s.is_finite() || log_s < 0.0 {
            return Err(Error::Invalid(format!(
                "log coefficient must be finite and non-negative, got {log_s}"
            )));
        }
        if log_s > 0.0 && matches!(domain, Domain::RealLine) {
            return Err(Error::Invalid(
                "a logarithmic term needs a positive domain".into(),
            ));
        }
        if let Domain::Interval(lo, hi) = domain {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::InvalidInterval(lo, hi));
            }
        }
        let mut merged: Vec<(u32, f64)> = Vec::new();
        let mut sorted = monomials;
        sorted.sort_by_key(|&(p, _)| p);
        for (p, cfit) in sorted {
            if !cfit.is_finite() {
                return Err(Error::Invalid(format!(
                    "non-finite coefficient for power {p}"
                )));
            }
            match merged.last_mut() {
                Some((q, acc)) if *q == p => *acc += cfit,
                _ => merged.push((p, cfit)),
            }
        }
        merged.retain(|&(_, cf)| cf != 0.0);
        Ok(Potential {
            monomials: merged,
            log_s,
            domain,
        })
    }

    pub fn from_monomials(monomials: Vec<(u32, f64)>) -> Result<Self> {
        Self::new(monomials, 0.0, Domain::RealLine)
    }

    /// `x^2/2`, the potential of the Gaussian unitary ensemble.
    pub fn quadratic() -> Self {
        Potential {
            monomials: vec![(2, 0.5)],
            log_s: 0.0,
            domain: Domain::RealLine,
        }
    }

    /// `x^4/4`.
    pub fn quartic() -> Self {
        Potential {
            monomials: vec![(4, 0.25)],
            log_s: 0.0,
            domain: Domain::RealLine,
        }
    }

    /// `Q(x) - s log(x)` on the half-line.
    pub fn wishart(q_monomials: Vec<(u32, f64)>, s: f64) -> Result<Self> {
        Self::new(q_monomials, s, Domain::HalfLine)
    }

    pub fn monomials(&self) -> &[(u32, f64)] {
        &self.monomials
    }

    pub fn log_coefficient(&self) -> f64 {
        self.log_s
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn poly_degree(&self) -> u32 {
        self.monomials.last().map(|&(p, _)| p).unwrap_or(0)
    }

    pub fn has_log(&self) -> bool {
        self.log_s > 0.0
    }

    pub fn value(&self, x: f64) -> f64 {
        let poly = self
            .monomials
            .iter()
            .fold(0.0, |acc, &(p, cf)| acc + cf * x.powi(p as i32));
        if self.log_s > 0.0 {
            poly - self.log_s * x.ln()
        } else {
            poly
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let poly = self.monomials.iter().fold(0.0, |acc, &(p, cf)| {
            if p == 0 {
                acc
            } else {
                acc + cf * p as f64 * x.powi(p as i32 - 1)
            }
        });
        if self.log_s > 0.0 {
            poly - self.log_s / x
        } else {
            poly
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let poly = self.monomials.iter().fold(0.0, |acc, &(p, cf)| {
            if p < 2 {
                acc
            } else {
                acc + cf * (p * (p - 1)) as f64 * x.powi(p as i32 - 2)
            }
        });
        if self.log_s > 0.0 {
            poly + self.log_s / (x * x)
        } else {
            poly
        }
    }

    /// Human-readable descriptor used in report metadata.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self
            .monomials
            .iter()
            .map(|&(p, cf)| format!("{cf}*x^{p}"))
            .collect();
        if self.log_s > 0.0 {
            parts.push(format!("-{}*log(x)", self.log_s));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Rescaled view of a potential on a candidate support.
struct Rescaled<'a> {
    potential: &'a Potential,
    support: Interval,
}

impl<'a> Rescaled<'a> {
    fn new(potential: &'a Potential, support: Interval) -> Self {
        Rescaled { potential, support }
    }

    /// `V~'(u) = c V'(theta(u))`.
    fn derivative(&self, u: f64) -> f64 {
        self.support.scale() * self.potential.derivative(self.support.from_reference(u))
    }

    /// `V~''(u) = c^2 V''(theta(u))`.
    fn second_derivative(&self, u: f64) -> f64 {
        let c = self.support.scale();
        c * c * self
            .potential
            .second_derivative(self.support.from_reference(u))
    }

    /// Joukowski parameter of the pole of the log term, `|t0| < 1`,
    /// for `log(theta(u)) = log c + log|u - z0|` with `z0 = -d/c`.
    fn log_pole(&self) -> Result<f64> {
        let z0 = -self.support.center() / self.support.scale();
        if z0 >= -2.0 {
            return Err(Error::DomainViolation {
                a: self.support.lower(),
                b: self.support.upper(),
            });
        }
        Ok((z0 + (z0 * z0 - 4.0).sqrt()) / 2.0)
    }

    /// Arcsine moment residuals of the support constraints:
    /// `(int V~' dbeta, int u V~'(u) dbeta - 2)`.
    fn constraint_residuals(&self) -> Result<(f64, f64)> {
        let deg = self.potential.poly_degree().max(1) as usize;
        let rule = gauss_nodes(MeasureKind::Beta, deg + 2, Interval::REFERENCE)?;
        let c = self.support.scale();
        let d = self.support.center();
        let poly_prime = |x: f64| {
            self.potential.monomials.iter().fold(0.0, |acc, &(p, cf)| {
                if p == 0 {
                    acc
                } else {
                    acc + cf * p as f64 * x.powi(p as i32 - 1)
                }
            })
        };
        let mut g1 = c * rule.integrate(|u| poly_prime(c * u + d))?;
        let mut g2 = c * rule.integrate(|u| u * poly_prime(c * u + d))?;
        if self.potential.log_s > 0.0 {
            // analytic arcsine integrals of -s/(cu + d), pole outside (-2, 2)
            let s = self.potential.log_s;
            let z = d / c;
            if z.abs() <= 2.0 {
                return Err(Error::DomainViolation {
                    a: self.support.lower(),
                    b: self.support.upper(),
                });
            }
            let root = (z * z - 4.0).sqrt();
            g1 -= s * z.signum() / root;
            g2 -= s * (1.0 - z.abs() / root);
        }
        Ok((g1, g2 - 2.0))
    }
}

/// Finds the support (a, b) of the equilibrium measure: the interval whose
/// rescaled potential satisfies both arcsine constraints within `tol`.
///
/// Damped two-dimensional Newton in (scale, center), seeded by the minimizer
/// of the potential and a one-dimensional bracket on the scale.
pub fn solve_support(potential: &Potential, tol: f64) -> Result<(f64, f64)> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Invalid(format!("tolerance must be positive: {tol}")));
    }
    let convex_check = |c: f64, d: f64| -> Result<()> {
        // sample the candidate interval for convexity
        for j in 0..=16 {
            let u = -2.0 + 0.25 * j as f64;
            let x = c * u + d;
            let v2 = potential.second_derivative(x);
            if v2 < CONVEXITY_TOL {
                return Err(Error::NotConvex { at: x, value: v2 });
            }
        }
        Ok(())
    };
    let in_domain = |c: f64, d: f64| -> bool {
        c > 1e-9 && potential.domain.contains(d - 2.0 * c) && potential.domain.contains(d + 2.0 * c)
    };
    let residual = |c: f64, d: f64| -> Result<(f64, f64)> {
        let support = Interval::new(d - 2.0 * c, d + 2.0 * c)?;
        Rescaled::new(potential, support).constraint_residuals()
    };

    // seed: minimizer of V and a curvature-sized scale
    let mut d0 = match potential.domain {
        Domain::RealLine => 0.0,
        Domain::HalfLine => 1.0,
        Domain::Interval(lo, hi) => 0.5 * (lo + hi),
    };
    for _ in 0..60 {
        let v1 = potential.derivative(d0);
        let v2 = potential.second_derivative(d0);
        if v2.abs() < 1e-12 {
            break;
        }
        let mut step = v1 / v2;
        let mut next = d0 - step;
        while !potential.domain.contains(next) && step.abs() > 1e-14 {
            step *= 0.5;
            next = d0 - step;
        }
        if (next - d0).abs() < 1e-13 {
            d0 = next;
            break;
        }
        d0 = next;
    }
    let mut c0 = {
        let v2 = potential.second_derivative(d0).max(0.0);
        if v2 > 1e-8 {
            (1.0 / v2.sqrt()).clamp(1e-3, 1e3)
        } else {
            1.0
        }
    };
    // keep the seed support inside the declared domain
    match potential.domain {
        Domain::RealLine => {}
        Domain::HalfLine => c0 = c0.min(0.45 * d0),
        Domain::Interval(lo, hi) => c0 = c0.min(0.45 * (d0 - lo).min(hi - d0)),
    }
    // the analytic log integrals additionally need the pole strictly outside
    if potential.has_log() {
        c0 = c0.min(0.49 * d0.abs());
    }
    c0 = c0.max(1e-6);
    // one-dimensional bracket on the scale for the moment constraint
    {
        let g = |c: f64| residual(c, d0).map(|(_, g2)| g2);
        let mut lo = c0;
        while lo > 1e-6 && in_domain(lo, d0) && g(lo).map(|v| v > 0.0).unwrap_or(false) {
            lo *= 0.5;
        }
        let mut hi = c0;
        while hi < 1e6 && in_domain(2.0 * hi, d0) && g(hi).map(|v| v < 0.0).unwrap_or(false) {
            hi *= 2.0;
        }
        if lo < hi && in_domain(lo, d0) && in_domain(hi, d0) {
            if let (Ok(glo), Ok(ghi)) = (g(lo), g(hi)) {
                if glo <= 0.0 && ghi >= 0.0 {
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        match g(mid) {
                            Ok(v) if v > 0.0 => hi = mid,
                            Ok(_) => lo = mid,
                            Err(_) => break,
                        }
                    }
                    c0 = 0.5 * (lo + hi);
                }
            }
        }
    }

    let (mut c, mut d) = (c0, d0);
    if !in_domain(c, d) {
        return Err(Error::DomainViolation {
            a: d - 2.0 * c,
            b: d + 2.0 * c,
        });
    }
    let mut res = residual(c, d)?;
    let mut norm = res.0.abs().max(res.1.abs());
    let max_iter = 60;
    for iter in 0..max_iter {
        if norm <= tol {
            convex_check(c, d)?;
            return Ok((d - 2.0 * c, d + 2.0 * c));
        }
        // finite-difference Jacobian
        let hc = 1e-7 * (1.0 + c.abs());
        let hd = 1e-7 * (1.0 + d.abs());
        let rc = residual(c + hc, d)?;
        let rc2 = residual(c - hc, d)?;
        let rd = residual(c, d + hd)?;
        let rd2 = residual(c, d - hd)?;
        let j11 = (rc.0 - rc2.0) / (2.0 * hc);
        let j21 = (rc.1 - rc2.1) / (2.0 * hc);
        let j12 = (rd.0 - rd2.0) / (2.0 * hd);
        let j22 = (rd.1 - rd2.1) / (2.0 * hd);
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-14 {
            return Err(Error::SupportSolver {
                iterations: iter,
                r_mean: res.0,
                r_moment: res.1,
            });
        }
        let dc = (j22 * res.0 - j12 * res.1) / det;
        let dd = (-j21 * res.0 + j11 * res.1) / det;
        // damped step with halving; keep the candidate inside the domain
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cn = c - lambda * dc;
            let dn = d - lambda * dd;
            if in_domain(cn, dn) {
                if let Ok(rn) = residual(cn, dn) {
                    let nn = rn.0.abs().max(rn.1.abs());
                    if nn < norm {
                        c = cn;
                        d = dn;
                        res = rn;
                        norm = nn;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::SupportSolver {
                iterations: iter,
                r_mean: res.0,
                r_moment: res.1,
            });
        }
    }
    Err(Error::SupportSolver {
        iterations: max_iter,
        r_mean: res.0,
        r_moment: res.1,
    })
}

/// Equilibrium measure: support plus the first-kind weight of the pullback
/// density `w d beta`.
#[derive(Clone, Debug)]
pub struct EquilibriumMeasure {
    support: Interval,
    weight: ChebSeries,
}

impl EquilibriumMeasure {
    /// Assembles a measure from parts; the weight must be a reference-interval
    /// first-kind series with unit mass coefficient.
    pub fn from_parts(support: Interval, weight: ChebSeries) -> Result<Self> {
        if weight.basis() != Basis::FirstKind {
            return Err(Error::BasisMismatch {
                expected: Basis::FirstKind,
                found: weight.basis(),
            });
        }
        if (weight.coeff(0) - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!(
                "weight mass coefficient must be 1, got {}",
                weight.coeff(0)
            )));
        }
        Ok(EquilibriumMeasure { support, weight })
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    /// Pullback weight `w` with `mu_V = w(theta^{-1}(x)) beta_{(a,b)}(dx)`.
    pub fn weight(&self) -> &ChebSeries {
        &self.weight
    }

    /// Density at a physical point strictly inside the support.
    pub fn density(&self, x: f64) -> f64 {
        let (a, b) = (self.support.lower(), self.support.upper());
        let u = self.support.to_reference(x);
        self.weight.evaluate(u) / (std::f64::consts::PI * ((x - a) * (b - x)).sqrt())
    }

    /// Reference-interval quadrature rule integrating pullbacks against the
    /// measure.
    pub fn quadrature(&self, m: usize) -> Quadrature {
        Quadrature::mu_v(&self.weight, m)
    }
}

/// Computes the equilibrium density for a support satisfying the
/// constraints: `w = 1 - (1/2) N V~` built spectrally from the first-kind
/// coefficients of the rescaled potential.
pub fn equilibrium_density(potential: &Potential, support: (f64, f64)) -> Result<EquilibriumMeasure> {
    let support = Interval::new(support.0, support.1)?;
    let rescaled = Rescaled::new(potential, support);
    let (r1, r2) = rescaled.constraint_residuals()?;
    if r1.abs().max(r2.abs()) > 1e-8 {
        return Err(Error::Invalid(format!(
            "support ({}, {}) violates the equilibrium constraints: residuals ({r1:.3e}, {r2:.3e})",
            support.lower(),
            support.upper()
        )));
    }
    // convexity on the working support
    for j in 0..=64 {
        let u = -2.0 + 4.0 * j as f64 / 64.0;
        let x = support.from_reference(u);
        let v2 = potential.second_derivative(x);
        if v2 < CONVEXITY_TOL {
            return Err(Error::NotConvex { at: x, value: v2 });
        }
    }

    // first-kind coefficients of the rescaled potential
    let deg = potential.poly_degree().max(1) as usize;
    let c = support.scale();
    let d = support.center();
    let poly = |u: f64| {
        let x = c * u + d;
        potential
            .monomials
            .iter()
            .fold(0.0, |acc, &(p, cf)| acc + cf * x.powi(p as i32))
    };
    let mut v_coeffs = ChebSeries::project(poly, deg, Interval::REFERENCE)?
        .coeffs()
        .to_vec();
    if potential.log_s > 0.0 {
        let s = potential.log_s;
        let t0 = rescaled.log_pole()?;
        // log|u - z0| = -log|t0| - sum (2/n) t0^n phi_n(u)
        let mut tn = t0;
        let mut n = 1usize;
        while s * tn.abs() > 1e-17 && n < 600 {
            if v_coeffs.len() <= n {
                v_coeffs.resize(n + 1, 0.0);
            }
            v_coeffs[n] += 2.0 * s / n as f64 * tn;
            tn *= t0;
            n += 1;
        }
    }
    let mut w_coeffs = vec![0.0; v_coeffs.len().max(1)];
    w_coeffs[0] = 1.0;
    for (n, &vn) in v_coeffs.iter().enumerate().skip(1) {
        w_coeffs[n] = -0.5 * n as f64 * vn;
    }
    let weight = ChebSeries::first_kind(w_coeffs).truncated();

    // positivity on a dense grid
    let mut min = f64::INFINITY;
    let mut at = 0.0;
    for j in 0..512 {
        let u = 2.0 * (std::f64::consts::PI * (2.0 * j as f64 + 1.0) / 1024.0).cos();
        let v = weight.evaluate(u);
        if v < min {
            min = v;
            at = u;
        }
    }
    if min < DENSITY_FLOOR {
        return Err(Error::NegativeDensity { min, at });
    }
    EquilibriumMeasure::from_parts(support, weight)
}

/// Log-energy functional `E_V(mu) = int V dmu - iint log|x-y| dmu dmu`.
///
/// The single integral runs through the pullback quadrature; the double one
/// uses the expansion `log|x-y| = log c - sum (2/n) phi_n(u) phi_n(v)` in
/// reference coordinates, truncated at the weight's degree.
pub fn energy(potential: &Potential, measure: &EquilibriumMeasure) -> Result<f64> {
    energy_with_weight(potential, measure.support(), measure.weight())
}

/// Energy of a candidate measure `w d beta` pulled to `support`; used both by
/// the equilibrium value and by perturbation tests.
pub fn energy_with_weight(
    potential: &Potential,
    support: Interval,
    weight: &ChebSeries,
) -> Result<f64> {
    let deg = potential.poly_degree().max(1) as usize + weight.degree();
    let rule = Quadrature::mu_v(weight, 2 * deg + 32);
    let single = rule.integrate(|u| potential.value(support.from_reference(u)))?;
    let mut log_terms: Vec<f64> = weight
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &wn)| wn * wn / (2.0 * n as f64))
        .collect();
    log_terms.push(-support.scale().ln());
    Ok(single + pairwise_sum(&log_terms))
}

/// The weighted divided-difference operator applied through its regularized
/// form `-2 d/du int (phi(u) - phi(v))/(u - v) dmu(v) + V~'(u) phi'(u)`;
/// no principal value is evaluated.
pub fn apply_m_v(
    phi: &ChebSeries,
    measure: &EquilibriumMeasure,
    potential: &Potential,
) -> Result<ChebSeries> {
    let rescaled = Rescaled::new(potential, measure.support());
    let p = phi.to_reference().as_first_kind();
    let pd = p.differentiate()?;
    let dd = p.divided_difference();
    let w_deg = measure.weight().degree();
    let inner_rule = measure.quadrature(p.degree() + w_deg + 8);
    let grid_degree = p.degree() + w_deg + 8;
    let h = ChebSeries::project(
        |u| {
            inner_rule
                .integrate(|v| dd(u, v))
                .expect("divided difference of a polynomial is finite")
        },
        grid_degree,
        Interval::REFERENCE,
    )?;
    let hd = h.differentiate()?;
    let out_degree = p.degree()
        + potential.poly_degree().max(2) as usize
        + w_deg
        + if potential.has_log() { 160 } else { 16 };
    let out = ChebSeries::project(
        |u| -2.0 * hd.evaluate(u) + rescaled.derivative(u) * pd.evaluate(u),
        out_degree,
        Interval::REFERENCE,
    )?;
    Ok(out.convert_basis().truncated())
}

/// Galerkin section of `K_V = M_V + V''` in the second-kind basis,
/// weighted by the equilibrium measure.
pub struct GalerkinSystem {
    dim: usize,
    matrix: DMatrix<f64>,
    factor: Cholesky<f64, Dyn>,
    symmetry_residual: f64,
}

impl GalerkinSystem {
    /// Assembles the stiffness matrix
    /// `A_ij = iint dd(psi_j) dd(psi_i) dmu dmu + int V~'' psi_i psi_j dmu`
    /// over `psi_0 .. psi_{dim-1}` and factors it.
    pub fn assemble(
        potential: &Potential,
        measure: &EquilibriumMeasure,
        dim: usize,
    ) -> Result<Self> {
        if dim < 1 {
            return Err(Error::Invalid("Galerkin dimension must be positive".into()));
        }
        let rescaled = Rescaled::new(potential, measure.support());
        let w_deg = measure.weight().degree();
        let m = 2 * dim + w_deg + 16;
        let rule = measure.quadrature(m);
        let nodes = rule.nodes().to_vec();
        let weights = rule.weights().to_vec();

        // psi_k at the nodes via the three-term recurrence
        let mut psi = vec![vec![0.0; nodes.len()]; dim.max(2)];
        for (p, &u) in nodes.iter().enumerate() {
            psi[0][p] = 1.0;
            if dim > 1 {
                psi[1][p] = u;
            }
            for k in 2..dim {
                psi[k][p] = u * psi[k - 1][p] - psi[k - 2][p];
            }
        }

        let mut a = DMatrix::<f64>::zeros(dim, dim);
        // divided-difference part, symmetric in the node pair
        let mut ddv = vec![0.0; dim];
        for p in 0..nodes.len() {
            for q in p..nodes.len() {
                let up = nodes[p];
                let pair_w = if p == q {
                    weights[p] * weights[q]
                } else {
                    2.0 * weights[p] * weights[q]
                };
                // dd_{j+1}(u, v) = u dd_j(u, v) - dd_{j-1}(u, v) + psi_j(v)
                let mut b0 = 0.0;
                let mut b1 = 1.0;
                if dim > 0 {
                    ddv[0] = 0.0;
                }
                if dim > 1 {
                    ddv[1] = 1.0;
                }
                for j in 2..dim {
                    let b2 = up * b1 - b0 + psi[j - 1][q];
                    ddv[j] = b2;
                    b0 = b1;
                    b1 = b2;
                }
                for i in 0..dim {
                    let wi = pair_w * ddv[i];
                    if wi == 0.0 {
                        continue;
                    }
                    for j in i..dim {
                        a[(i, j)] += wi * ddv[j];
                    }
                }
            }
        }
        // multiplication by the rescaled second derivative
        for p in 0..nodes.len() {
            let wv = weights[p] * rescaled.second_derivative(nodes[p]);
            for i in 0..dim {
                let wi = wv * psi[i][p];
                for j in i..dim {
                    a[(i, j)] += wi * psi[j][p];
                }
            }
        }
        for i in 0..dim {
            for j in 0..i {
                a[(i, j)] = a[(j, i)];
            }
        }
        // explicit symmetrization with a residual report
        let at = a.transpose();
        let scale = a.amax().max(1e-300);
        let symmetry_residual = (&a - &at).amax() / scale;
        let sym = (&a + &at) * 0.5;
        let factor = Cholesky::new(sym.clone()).ok_or(Error::NotPositiveDefinite { dim })?;
        Ok(GalerkinSystem {
            dim,
            matrix: sym,
            factor,
            symmetry_residual,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn symmetry_residual(&self) -> f64 {
        self.symmetry_residual
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.factor.solve(rhs)
    }

    /// Smallest eigenvalue of the stiffness matrix.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = self
            .matrix
            .clone()
            .try_symmetric_eigen(f64::EPSILON, 10_000)
            .ok_or(Error::Eigensolver(self.dim))?;
        Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
    }
}

/// Galerkin approximation of `2 <K_V^{-1} phi', phi'>_{mu_V}` for a function
/// given on the reference interval; by the structure theorem the value does
/// not depend on the potential.
pub fn resolvent_quadratic_form(
    potential: &Potential,
    phi: &ChebSeries,
    dim: usize,
) -> Result<f64> {
    let support = solve_support(potential, SUPPORT_TOL)?;
    let measure = equilibrium_density(potential, support)?;
    resolvent_quadratic_form_with(potential, &measure, phi, dim)
}

/// Same as [`resolvent_quadratic_form`] with a precomputed measure.
pub fn resolvent_quadratic_form_with(
    potential: &Potential,
    measure: &EquilibriumMeasure,
    phi: &ChebSeries,
    dim: usize,
) -> Result<f64> {
    let system = GalerkinSystem::assemble(potential, measure, dim)?;
    let rhs = galerkin_rhs(measure, phi, dim)?;
    Ok(2.0 * rhs.dot(&system.solve(&rhs)))
}

/// Load vector `r_i = <phi', psi_i>_{mu_V}` for a reference-interval function.
pub fn galerkin_rhs(
    measure: &EquilibriumMeasure,
    phi: &ChebSeries,
    dim: usize,
) -> Result<DVector<f64>> {
    let pd = derivative_psi(phi);
    let m = dim + pd.degree() + measure.weight().degree() + 8;
    let rule = measure.quadrature(m);
    let mut r = DVector::<f64>::zeros(dim);
    for i in 0..dim {
        let psi_i = ChebSeries::psi(i);
        r[i] = rule.integrate(|u| pd.evaluate(u) * psi_i.evaluate(u))?;
    }
    Ok(r)
}

/// Order of vanishing of a first-kind series at a point, capped; returns the
/// order and the first non-vanishing derivative value there.
fn valuation_at(series: &ChebSeries, u0: f64, cap: usize) -> (usize, f64) {
    let scale: f64 = series.coeffs().iter().map(|c| c.abs()).sum::<f64>().max(1.0);
    let mut current = series.clone();
    for k in 0..=cap {
        let v = current.evaluate(u0);
        if v.abs() > 1e-9 * scale {
            return (k, v);
        }
        current = match current.differentiate() {
            Ok(d) => d.convert_basis(),
            Err(_) => return (cap + 1, 0.0),
        };
        if current.is_empty() {
            return (cap + 1, 0.0);
        }
    }
    (cap + 1, 0.0)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Right side of the weighted variance bound: `int phi'^2 / V~'' dmu` in
/// reference coordinates.
///
/// Nodes where the second derivative vanishes are treated as divergent unless
/// the numerator vanishes there to matching order; the finite limit is then
/// used instead.
pub fn brascamp_lieb_rhs(potential: &Potential, phi: &ChebSeries) -> Result<f64> {
    let support = solve_support(potential, SUPPORT_TOL)?;
    let measure = equilibrium_density(potential, support)?;
    brascamp_lieb_rhs_with(potential, &measure, phi)
}

/// Same as [`brascamp_lieb_rhs`] with a precomputed measure.
pub fn brascamp_lieb_rhs_with(
    potential: &Potential,
    measure: &EquilibriumMeasure,
    phi: &ChebSeries,
) -> Result<f64> {
    let nodes = 2 * (derivative_psi(phi).degree() + measure.weight().degree()) + 32;
    brascamp_lieb_rhs_nodes(potential, measure, phi, nodes)
}

/// Lowest-level form of the weighted bound with an explicit node count,
/// used for convergence traces.
pub fn brascamp_lieb_rhs_nodes(
    potential: &Potential,
    measure: &EquilibriumMeasure,
    phi: &ChebSeries,
    nodes: usize,
) -> Result<f64> {
    let rescaled = Rescaled::new(potential, measure.support());
    let pd = derivative_psi(phi);
    let pd_first = pd.as_first_kind();
    let rule = measure.quadrature(nodes.max(4));
    // exact second-derivative series for the valuation fallback (polynomial case)
    let v2_series = if potential.has_log() {
        None
    } else {
        let deg = potential.poly_degree().saturating_sub(2).max(1) as usize;
        Some(ChebSeries::project(
            |u| rescaled.second_derivative(u),
            deg,
            Interval::REFERENCE,
        )?)
    };
    let mut terms = Vec::with_capacity(rule.len());
    for (&u, &w) in rule.nodes().iter().zip(rule.weights()) {
        let den = rescaled.second_derivative(u);
        let num_val = pd.evaluate(u);
        if den >= DEGENERATE_SECOND_DERIVATIVE {
            terms.push(w * num_val * num_val / den);
            continue;
        }
        if den < -1e-10 {
            return Err(Error::NotConvex { at: u, value: den });
        }
        match &v2_series {
            None => return Err(Error::DivergentIntegrand { at: u }),
            Some(v2) => {
                let (p, fp) = valuation_at(&pd_first, u, 8);
                let (q, gq) = valuation_at(v2, u, 8);
                if 2 * p > q {
                    terms.push(0.0);
                } else if 2 * p == q && gq.abs() > 0.0 {
                    let lead_num = fp / factorial(p);
                    let lead_den = gq / factorial(q);
                    terms.push(w * lead_num * lead_num / lead_den);
                } else {
                    return Err(Error::DivergentIntegrand { at: u });
                }
            }
        }
    }
    Ok(pairwise_sum(&terms))
}

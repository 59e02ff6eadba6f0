//! Verification reports for the functional inequalities and identities.
//!
//! Each runner computes both sides of one statement and packages them as a
//! [`Report`] with a fixed pass rule: an inequality passes when
//! `slack >= -tolerance`, an identity when `|slack| <= tolerance`. Reports
//! are reproducible bit for bit for a fixed configuration: the quadrature
//! sizes, Galerkin dimensions and summation orders are all pinned by the
//! inputs.

use crate::equilibrium::{
    brascamp_lieb_rhs_nodes, brascamp_lieb_rhs_with, energy, equilibrium_density,
    resolvent_quadratic_form_with, solve_support, GalerkinSystem, Potential,
    SUPPORT_TOL,
};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::ops::{expansion_terms, interpolation_rhs, omega_variance, remainder_term};
use crate::rmt::estimate_fluctuation;
use crate::series::ChebSeries;
use crate::util::pairwise_sum;
use serde_json::{Map, Value};
use std::collections::BTreeMap;

/// Default tolerance for closed-form spectral identities.
pub const TOL_SPECTRAL: f64 = 1e-10;
/// Default tolerance for Galerkin-based identities.
pub const TOL_GALERKIN: f64 = 1e-6;
/// Default sign slack granted to inequalities.
pub const TOL_INEQUALITY: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// Passes when `slack = rhs - lhs >= -tolerance`.
    Inequality,
    /// Passes when `|slack| <= tolerance`.
    Identity,
}

impl Comparison {
    fn as_str(&self) -> &'static str {
        match self {
            Comparison::Inequality => "inequality",
            Comparison::Identity => "identity",
        }
    }
}

/// Outcome record of one verification run.
#[derive(Clone, Debug)]
pub struct Report {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub terms: Option<Vec<f64>>,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
    pub metadata: BTreeMap<String, String>,
}

impl Report {
    pub fn new(name: &str, comparison: Comparison, lhs: f64, rhs: f64, tolerance: f64) -> Report {
        let slack = rhs - lhs;
        let passed = match comparison {
            Comparison::Inequality => slack >= -tolerance,
            Comparison::Identity => slack.abs() <= tolerance,
        };
        Report {
            name: name.to_string(),
            lhs,
            rhs,
            slack,
            terms: None,
            tolerance,
            comparison,
            passed,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Report {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_terms(mut self, terms: Vec<f64>) -> Report {
        self.terms = Some(terms);
        self
    }

    /// Marks the report failed regardless of the slack rule.
    pub fn force_fail(mut self, reason: &str) -> Report {
        self.passed = false;
        self.metadata
            .insert("failure".to_string(), reason.to_string());
        self
    }

    /// Flat JSON object; object keys come out sorted.
    pub fn to_json_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("name".into(), Value::String(self.name.clone()));
        obj.insert("lhs".into(), json_f64(self.lhs));
        obj.insert("rhs".into(), json_f64(self.rhs));
        obj.insert("slack".into(), json_f64(self.slack));
        obj.insert("tol".into(), json_f64(self.tolerance));
        obj.insert("passed".into(), Value::Bool(self.passed));
        obj.insert(
            "comparison".into(),
            Value::String(self.comparison.as_str().into()),
        );
        if let Some(terms) = &self.terms {
            obj.insert(
                "terms".into(),
                Value::Array(terms.iter().map(|&t| json_f64(t)).collect()),
            );
        }
        for (k, v) in &self.metadata {
            obj.insert(format!("meta_{k}"), Value::String(v.clone()));
        }
        Value::Object(obj)
    }

    /// Sorted `key=value` pairs of the metadata joined by semicolons.
    pub fn meta_string(&self) -> String {
        let mut parts: Vec<String> = self
            .metadata
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        if let Some(terms) = &self.terms {
            let joined: Vec<String> = terms.iter().map(|t| format!("{t}")).collect();
            parts.push(format!("terms=[{}]", joined.join(",")));
        }
        parts.join(";")
    }

    /// CSV row in the fixed column order name,lhs,rhs,slack,tol,passed,meta.
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},\"{}\"",
            self.name,
            self.lhs,
            self.rhs,
            self.slack,
            self.tolerance,
            self.passed,
            self.meta_string()
        )
    }

    pub fn csv_header() -> &'static str {
        "name,lhs,rhs,slack,tol,passed,meta"
    }

    /// Fixed-width audit format: both sides in 17-significant-digit
    /// scientific notation.
    pub fn to_pretty(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut out = format!(
            "{:<16} {}  lhs = {:.16e}  rhs = {:.16e}  slack = {:.16e}  tol = {:e}",
            self.name, verdict, self.lhs, self.rhs, self.slack, self.tolerance
        );
        if let Some(terms) = &self.terms {
            out.push_str("\n    terms:");
            for t in terms {
                out.push_str(&format!(" {t:.16e}"));
            }
        }
        for (k, v) in &self.metadata {
            out.push_str(&format!("\n    {k} = {v}"));
        }
        out
    }
}

fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format!("{v}")))
}

/// Variance bound by the derivative's semicircular norm; equality exactly for
/// linear functions.
pub fn run_poincare(phi: &ChebSeries, descriptor: &str, tolerance: f64) -> Report {
    let lhs = omega_variance(phi);
    let d = crate::ops::derivative_psi(phi);
    let rhs = d.inner_alpha(&d).expect("matching bases");
    Report::new("poincare", Comparison::Inequality, lhs, rhs, tolerance)
        .with_meta("function", descriptor)
        .with_meta("degree", phi.degree())
}

/// Alternating expansion with exact remainder; the terms list carries the
/// expansion terms followed by the remainder. Checks both the identity and
/// the parity sandwich of the partial sums.
pub fn run_refinement(phi: &ChebSeries, kmax: usize, descriptor: &str, tolerance: f64) -> Report {
    let kmax = kmax.max(1);
    let lhs = omega_variance(phi);
    let terms = expansion_terms(phi, kmax);
    let remainder = remainder_term(phi, kmax);
    let rhs = pairwise_sum(&terms) + remainder;
    let mut sandwich_ok = true;
    let mut partial = 0.0;
    for (idx, &t) in terms.iter().enumerate() {
        partial += t;
        let l = idx + 1;
        let ok = if l % 2 == 0 {
            partial <= lhs + TOL_INEQUALITY
        } else {
            partial >= lhs - TOL_INEQUALITY
        };
        sandwich_ok &= ok;
    }
    let mut all = terms;
    all.push(remainder);
    let report = Report::new("refinement", Comparison::Identity, lhs, rhs, tolerance)
        .with_terms(all)
        .with_meta("function", descriptor)
        .with_meta("kmax", kmax)
        .with_meta("sandwich", if sandwich_ok { "ordered" } else { "violated" });
    if sandwich_ok {
        report
    } else {
        report.force_fail("partial sums break the parity ordering")
    }
}

/// Interpolation pairing against the variance, an identity for smooth inputs.
pub fn run_interpolation(phi: &ChebSeries, descriptor: &str, tolerance: f64) -> Report {
    let lhs = omega_variance(phi);
    let rhs = interpolation_rhs(phi, phi);
    Report::new("interpolation", Comparison::Identity, lhs, rhs, tolerance)
        .with_meta("function", descriptor)
        .with_meta("degree", phi.degree())
}

/// Weighted variance bound `int phi'^2 / V'' dmu_V` for a convex potential;
/// equality at `phi = V' + C`. An explicit node count overrides the
/// degree-derived default.
pub fn run_brascamp_lieb(
    potential: &Potential,
    phi: &ChebSeries,
    descriptor: &str,
    tolerance: f64,
    quad_nodes: Option<usize>,
) -> Result<Report> {
    let support = solve_support(potential, SUPPORT_TOL)?;
    let measure = equilibrium_density(potential, support)?;
    let lhs = omega_variance(phi);
    let base_nodes = quad_nodes.unwrap_or(
        2 * (crate::ops::derivative_psi(phi).degree() + measure.weight().degree()) + 32,
    );
    let rhs = brascamp_lieb_rhs_nodes(potential, &measure, phi, base_nodes)?;
    let refined = brascamp_lieb_rhs_nodes(potential, &measure, phi, 2 * base_nodes)?;
    Ok(
        Report::new("brascamp_lieb", Comparison::Inequality, lhs, rhs, tolerance)
            .with_meta("function", descriptor)
            .with_meta("potential", potential.describe())
            .with_meta("support", format!("({}, {})", support.0, support.1))
            .with_meta("rhs_refined", refined),
    )
}

/// Sharpness of the weighted bound: at `phi = V~' + C` both sides agree, so
/// the report is an identity rather than an inequality.
pub fn run_equality_case(potential: &Potential, tolerance: f64) -> Result<Report> {
    let support = solve_support(potential, SUPPORT_TOL)?;
    let measure = equilibrium_density(potential, support)?;
    let iv = measure.support();
    let c = iv.scale();
    let degree = (potential.poly_degree().max(2) as usize - 1)
        + if potential.has_log() { 160 } else { 0 };
    let phi = ChebSeries::project(
        |u| c * potential.derivative(iv.from_reference(u)) + 1.0,
        degree,
        crate::interval::Interval::REFERENCE,
    )?;
    let lhs = omega_variance(&phi);
    let rhs = brascamp_lieb_rhs_with(potential, &measure, &phi)?;
    Ok(
        Report::new("equality_case", Comparison::Identity, lhs, rhs, tolerance)
            .with_meta("function", "V' + 1 (rescaled)")
            .with_meta("potential", potential.describe())
            .with_meta("support", format!("({}, {})", support.0, support.1)),
    )
}

/// Galerkin resolvent form across several potentials: the values must agree
/// with each other and with the counting-operator pairing.
pub fn run_v_independence(
    potentials: &[Potential],
    phi: &ChebSeries,
    descriptor: &str,
    dim: usize,
    tolerance: f64,
) -> Result<Report> {
    if potentials.is_empty() {
        return Err(Error::Invalid(
            "independence check needs at least one potential".into(),
        ));
    }
    let spectral = 2.0 * omega_variance(phi);
    let mut values = Vec::with_capacity(potentials.len());
    let mut values_double = Vec::with_capacity(potentials.len());
    for v in potentials {
        let support = solve_support(v, SUPPORT_TOL)?;
        let measure = equilibrium_density(v, support)?;
        values.push(resolvent_quadratic_form_with(v, &measure, phi, dim)?);
        values_double.push(resolvent_quadratic_form_with(v, &measure, phi, 2 * dim)?);
    }
    let deviation = |vals: &[f64]| -> f64 {
        let mut dev = vals
            .iter()
            .fold(0.0f64, |acc, &q| acc.max((q - spectral).abs()));
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                dev = dev.max((vals[i] - vals[j]).abs());
            }
        }
        dev
    };
    let dev = deviation(&values);
    let dev_double = deviation(&values_double);
    let mut report = Report::new("v_independence", Comparison::Identity, dev, 0.0, tolerance)
        .with_terms(values.clone())
        .with_meta("function", descriptor)
        .with_meta("galerkin_dim", dim)
        .with_meta("spectral_value", spectral)
        .with_meta("deviation", dev)
        .with_meta("deviation_doubled_dim", dev_double);
    for (v, q) in potentials.iter().zip(&values) {
        report = report.with_meta(&format!("value[{}]", v.describe()), q);
    }
    Ok(report)
}

/// Named physical test function with an analytic derivative, used where the
/// bound is stated in the physical variable.
pub struct PhysicalFn {
    pub name: String,
    f: Box<dyn Fn(f64) -> f64 + Sync>,
    df: Box<dyn Fn(f64) -> f64 + Sync>,
}

impl PhysicalFn {
    pub fn new(
        name: &str,
        f: impl Fn(f64) -> f64 + Sync + 'static,
        df: impl Fn(f64) -> f64 + Sync + 'static,
    ) -> Self {
        PhysicalFn {
            name: name.to_string(),
            f: Box::new(f),
            df: Box::new(df),
        }
    }

    pub fn identity() -> Self {
        Self::new("x", |x| x, |_| 1.0)
    }

    pub fn reciprocal() -> Self {
        Self::new("1/x", |x| 1.0 / x, |x| -1.0 / (x * x))
    }

    pub fn power(k: u32) -> Self {
        Self::new(
            &format!("x^{k}"),
            move |x| x.powi(k as i32),
            move |x| k as f64 * x.powi(k as i32 - 1),
        )
    }

    pub fn exp() -> Self {
        Self::new("exp", f64::exp, f64::exp)
    }

    pub fn cosh() -> Self {
        Self::new("cosh", f64::cosh, f64::sinh)
    }

    /// `1/(c - x)`.
    pub fn recip_shift(c: f64) -> Self {
        Self::new(
            &format!("1/({c}-x)"),
            move |x| 1.0 / (c - x),
            move |x| 1.0 / ((c - x) * (c - x)),
        )
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.df)(x)
    }
}

/// The half-line bound for `V = Q - s log x`: the rescaled variance against
/// `int x^2 phi'^2 / (s + x^2 Q'') dmu_V`, with the weaker `1/s`-scaled bound
/// carried in the metadata.
pub fn run_wishart(
    potential: &Potential,
    phi: &PhysicalFn,
    degree: usize,
    tolerance: f64,
) -> Result<Report> {
    if !potential.has_log() {
        return Err(Error::Invalid(
            "half-line bound needs a logarithmic term".into(),
        ));
    }
    let s = potential.log_coefficient();
    let support = solve_support(potential, SUPPORT_TOL)?;
    if support.0 <= 0.0 {
        return Err(Error::DomainViolation {
            a: support.0,
            b: support.1,
        });
    }
    let measure = equilibrium_density(potential, support)?;
    let iv = Interval::new(support.0, support.1)?;
    let pullback = ChebSeries::project(|u| phi.evaluate(iv.from_reference(u)), degree, Interval::REFERENCE)?;
    let lhs = omega_variance(&pullback);

    // Q'' is the polynomial curvature without the log part; the bound needs
    // it non-negative on the support
    let q_curvature = |x: f64| potential.second_derivative(x) - s / (x * x);
    for j in 0..=64 {
        let x = iv.from_reference(-2.0 + 4.0 * j as f64 / 64.0);
        let q2 = q_curvature(x);
        if q2 < -1e-10 {
            return Err(Error::NotConvex { at: x, value: q2 });
        }
    }
    let w_deg = measure.weight().degree();
    let rule = measure.quadrature(2 * (degree + w_deg) + 32);
    let strong = rule.integrate(|u| {
        let x = iv.from_reference(u);
        let dp = phi.derivative(x);
        x * x * dp * dp / (s + x * x * q_curvature(x))
    })?;
    let weak = rule.integrate(|u| {
        let x = iv.from_reference(u);
        let dp = phi.derivative(x);
        x * x * dp * dp / s
    })?;
    let report = Report::new("wishart", Comparison::Inequality, lhs, strong, tolerance)
        .with_meta("function", &phi.name)
        .with_meta("potential", potential.describe())
        .with_meta("support", format!("({}, {})", support.0, support.1))
        .with_meta("projection_degree", degree)
        .with_meta("rhs_weak", weak)
        .with_meta("weak_slack", weak - lhs);
    if weak - lhs >= -tolerance {
        Ok(report)
    } else {
        Ok(report.force_fail("weak bound violated"))
    }
}

/// Support, density and energy diagnostics for one potential; the identity
/// checked is the quadrature mass against 1.
pub fn run_equilibrium(
    potential: &Potential,
    tolerance: f64,
    quad_nodes: Option<usize>,
) -> Result<Report> {
    let support = solve_support(potential, SUPPORT_TOL)?;
    let measure = equilibrium_density(potential, support)?;
    let w_deg = measure.weight().degree();
    let base = quad_nodes.unwrap_or(2 * w_deg + 32);
    let mass = measure.quadrature(base).total_mass();
    let mass_refined = measure.quadrature(2 * base).total_mass();
    let mut w_min = f64::INFINITY;
    for j in 0..512 {
        let u = 2.0 * (std::f64::consts::PI * (2.0 * j as f64 + 1.0) / 1024.0).cos();
        w_min = w_min.min(measure.weight().evaluate(u));
    }
    let e = energy(potential, &measure)?;
    let galerkin = GalerkinSystem::assemble(potential, &measure, 24)?;
    Ok(
        Report::new("equilibrium", Comparison::Identity, mass, 1.0, tolerance)
            .with_meta("potential", potential.describe())
            .with_meta("support", format!("({}, {})", support.0, support.1))
            .with_meta("weight_min", w_min)
            .with_meta("weight_at_upper_edge", measure.weight().evaluate(2.0))
            .with_meta("energy", e)
            .with_meta("mass_refined", mass_refined)
            .with_meta("stiffness_min_eigenvalue", galerkin.min_eigenvalue()?)
            .with_meta("symmetry_residual", galerkin.symmetry_residual()),
    )
}

/// Monte-Carlo fluctuation cross-check: the sample variance of `Tr phi(X)`
/// against the kernel-variance limit, judged at three standard errors.
pub fn run_mc_fluctuations(
    phi: &ChebSeries,
    descriptor: &str,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<Report> {
    let est = estimate_fluctuation(phi, descriptor, n, samples, seed)?;
    let tolerance = 3.0 * est.std_error;
    Ok(Report::new(
        "mc_fluctuations",
        Comparison::Identity,
        est.variance,
        est.limit,
        tolerance,
    )
    .with_meta("function", descriptor)
    .with_meta("n", n)
    .with_meta("samples", samples)
    .with_meta("seed", seed)
    .with_meta("std_error", est.std_error)
    .with_meta("z_score", est.z_score)
    .with_meta("mean_trace", est.mean_trace))
}

//! Quadrature rules for the measures of the toolkit.
//!
//! The semicircular measure `alpha` gets the Gauss-Chebyshev rule of the
//! second kind, the arcsine measure `beta` the rule of the first kind, and
//! an equilibrium measure reuses the arcsine nodes with its weight folded in.
//! All rules live on the reference interval unless built for another one.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::series::ChebSeries;
use crate::util::pairwise_sum;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub enum MeasureKind {
    /// Semicircular measure `sqrt(4-x^2)/(2 pi) dx`.
    Alpha,
    /// Arcsine measure `dx / (pi sqrt(4-x^2))`.
    Beta,
    /// Equilibrium measure `w(u) d beta(u)` with a first-kind weight series.
    MuV(ChebSeries),
    /// Plain Lebesgue measure on the interval.
    LebesgueOnInterval,
}

#[derive(Clone, Debug)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    measure: MeasureKind,
    interval: Interval,
    exact_degree: usize,
}

/// Gauss rule with `m` nodes for `alpha` or `beta`, pushed forward to `interval`.
///
/// Exact for polynomials of degree up to `2m - 1`; the weights are positive
/// and sum to the unit mass of the measure.
pub fn gauss_nodes(measure: MeasureKind, m: usize, interval: Interval) -> Result<Quadrature> {
    if m == 0 {
        return Err(Error::Invalid("quadrature needs at least one node".into()));
    }
    match measure {
        MeasureKind::Beta => {
            // nodes are the roots of T_m, equal weights 1/m
            let mut nodes = Vec::with_capacity(m);
            let mut weights = Vec::with_capacity(m);
            for i in 1..=m {
                let theta = (2 * i - 1) as f64 * PI / (2 * m) as f64;
                nodes.push(interval.from_reference(2.0 * theta.cos()));
                weights.push(1.0 / m as f64);
            }
            Ok(Quadrature {
                nodes,
                weights,
                measure: MeasureKind::Beta,
                interval,
                exact_degree: 2 * m - 1,
            })
        }
        MeasureKind::Alpha => {
            // nodes are the roots of U_m
            let mut nodes = Vec::with_capacity(m);
            let mut weights = Vec::with_capacity(m);
            for i in 1..=m {
                let theta = i as f64 * PI / (m + 1) as f64;
                nodes.push(interval.from_reference(2.0 * theta.cos()));
                weights.push(2.0 * theta.sin().powi(2) / (m + 1) as f64);
            }
            Ok(Quadrature {
                nodes,
                weights,
                measure: MeasureKind::Alpha,
                interval,
                exact_degree: 2 * m - 1,
            })
        }
        MeasureKind::MuV(w) => Ok(Quadrature::mu_v(&w, m)),
        MeasureKind::LebesgueOnInterval => Ok(gauss_legendre(m, interval)),
    }
}

/// Gauss-Legendre rule with `m` nodes on `interval` (Newton on the Legendre
/// recurrence from the usual cosine initial guesses).
pub fn gauss_legendre(m: usize, interval: Interval) -> Quadrature {
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    let half = m.div_ceil(2);
    let mut xs = vec![0.0; m];
    let mut ws = vec![0.0; m];
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        ws[i] = w;
        xs[m - 1 - i] = x;
        ws[m - 1 - i] = w;
    }
    let (a, b) = (interval.lower(), interval.upper());
    let mid = 0.5 * (a + b);
    let rad = 0.5 * (b - a);
    for i in 0..m {
        nodes.push(mid + rad * xs[i]);
        weights.push(rad * ws[i]);
    }
    Quadrature {
        nodes,
        weights,
        measure: MeasureKind::LebesgueOnInterval,
        interval,
        exact_degree: 2 * m - 1,
    }
}

impl Quadrature {
    /// Rule for the equilibrium measure `w d beta` on the reference interval:
    /// arcsine nodes with the weight series folded into the weights.
    pub fn mu_v(weight: &ChebSeries, m: usize) -> Quadrature {
        let base = gauss_nodes(MeasureKind::Beta, m.max(1), Interval::REFERENCE)
            .expect("beta rule is total for m >= 1");
        let weights = base
            .nodes
            .iter()
            .zip(&base.weights)
            .map(|(&u, &w)| w * weight.evaluate(u))
            .collect();
        Quadrature {
            nodes: base.nodes,
            weights,
            measure: MeasureKind::MuV(weight.clone()),
            interval: Interval::REFERENCE,
            exact_degree: (2 * m - 1).saturating_sub(weight.degree()),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn measure(&self) -> &MeasureKind {
        &self.measure
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Largest polynomial degree the rule integrates exactly.
    pub fn exact_degree(&self) -> usize {
        self.exact_degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Integrates `f` against the rule; a non-finite value is rejected with
    /// its node.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.nodes.len());
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { node: x, value: v });
            }
            terms.push(w * v);
        }
        Ok(pairwise_sum(&terms))
    }
}

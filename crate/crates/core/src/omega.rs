//! The bivariate fluctuation kernel.
//!
//! On the reference interval the kernel is
//! `(4 - xy) / (4 pi^2 sqrt(4-x^2) sqrt(4-y^2)) dx dy`; applied to a squared
//! divided difference it is the limiting variance of a linear eigenvalue
//! statistic. On a general interval (a, b) the rescaled kernel
//! `(-2ab + (a+b)(x+y) - 2xy) / (8 pi^2 sqrt((x-a)(b-x)) sqrt((y-a)(b-y)))`
//! equals the pullback of the reference kernel times `((b-a)/4)^2`.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::quad::{gauss_nodes, MeasureKind};
use crate::util::pairwise_sum;

/// Tensor-product quadrature representation of the kernel.
#[derive(Clone, Debug)]
pub struct OmegaKernel {
    interval: Interval,
    /// Physical nodes `theta(u_i)`.
    nodes: Vec<f64>,
    /// Reference coordinates of the nodes.
    reference_nodes: Vec<f64>,
    /// Arcsine quadrature weights per axis.
    beta_weights: Vec<f64>,
}

impl OmegaKernel {
    /// Kernel with `m` arcsine nodes per axis.
    pub fn new(m: usize, interval: Interval) -> Result<Self> {
        let rule = gauss_nodes(MeasureKind::Beta, m, Interval::REFERENCE)?;
        let reference_nodes = rule.nodes().to_vec();
        let nodes = reference_nodes
            .iter()
            .map(|&u| interval.from_reference(u))
            .collect();
        Ok(OmegaKernel {
            interval,
            nodes,
            reference_nodes,
            beta_weights: rule.weights().to_vec(),
        })
    }

    /// Default sizing for polynomial workloads of the given degree:
    /// `2 * degree + 16` nodes per axis.
    pub fn for_degree(degree: usize, interval: Interval) -> Result<Self> {
        Self::new(2 * degree + 16, interval)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weight of the node pair (i, j):
    /// `c^2 * w_i w_j (4 - u_i u_j) / 4` with `c` the interval scale.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let c = self.interval.scale();
        let ui = self.reference_nodes[i];
        let uj = self.reference_nodes[j];
        c * c * self.beta_weights[i] * self.beta_weights[j] * (4.0 - ui * uj) / 4.0
    }

    /// Total mass of the kernel over the square.
    pub fn total_mass(&self) -> f64 {
        self.integrate(|_, _| 1.0)
            .expect("constant integrand is finite")
    }

    /// Integrates a bivariate function against the kernel.
    ///
    /// Node pairs are folded symmetrically — `(i, j)` and `(j, i)` are added
    /// together before entering the sum — so antisymmetric integrands cancel
    /// exactly and the summation order is deterministic.
    pub fn integrate<G: Fn(f64, f64) -> f64>(&self, g: G) -> Result<f64> {
        let n = self.nodes.len();
        let mut terms = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let xi = self.nodes[i];
                let xj = self.nodes[j];
                let w = self.weight(i, j);
                let value = if i == j {
                    let v = g(xi, xi);
                    if !v.is_finite() {
                        return Err(Error::NonFiniteSample { node: xi, value: v });
                    }
                    w * v
                } else {
                    let v1 = g(xi, xj);
                    let v2 = g(xj, xi);
                    if !v1.is_finite() || !v2.is_finite() {
                        return Err(Error::NonFiniteSample {
                            node: xi,
                            value: if v1.is_finite() { v2 } else { v1 },
                        });
                    }
                    // weight(i, j) == weight(j, i)
                    w * v1 + w * v2
                };
                terms.push(value);
            }
        }
        Ok(pairwise_sum(&terms))
    }
}

/// Tensor-product quadrature value of a bivariate function against the kernel.
pub fn omega_double_integral<G: Fn(f64, f64) -> f64>(g: G, kernel: &OmegaKernel) -> Result<f64> {
    kernel.integrate(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn reference_mass_is_one() {
        // mass = iint (4 - xy)/4 dbeta dbeta = (4 - 0)/4; the spectral identity
        // iint 1 domega = <N x, x>_beta / 2 = 1 gives the same value.
        let k = OmegaKernel::for_degree(4, Interval::REFERENCE).unwrap();
        assert_close(k.total_mass(), 1.0, 1e-13);
    }

    #[test]
    fn rescaled_kernel_mass_scales_with_interval() {
        let iv = Interval::new(0.0, 2.0).unwrap();
        let k = OmegaKernel::for_degree(4, iv).unwrap();
        assert_close(k.total_mass(), 0.25, 1e-13);
    }

    #[test]
    fn squared_sum_integrand() {
        // ((x^2 - y^2)/(x - y))^2 = (x + y)^2 integrates to 2
        let k = OmegaKernel::for_degree(4, Interval::REFERENCE).unwrap();
        let v = k.integrate(|x, y| (x + y) * (x + y)).unwrap();
        assert_close(v, 2.0, 1e-13);
    }

    #[test]
    fn antisymmetric_integrand_vanishes() {
        let k = OmegaKernel::for_degree(6, Interval::REFERENCE).unwrap();
        let v = k.integrate(|x, y| x - y).unwrap();
        assert_eq!(v, 0.0);
        let w = k.integrate(|x, y| x * x * y - y * y * x).unwrap();
        assert_close(w, 0.0, 1e-16);
    }

    #[test]
    fn rejects_non_finite() {
        let k = OmegaKernel::new(6, Interval::REFERENCE).unwrap();
        let pole = k.nodes()[2];
        assert!(k.integrate(|x, _| 1.0 / (x - pole)).is_err());
    }
}

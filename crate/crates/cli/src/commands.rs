//! Resolution of one command invocation into verification reports.

use crate::config::{
    check_range, KeyValueConfig, SuiteEntry, DEGREE_RANGE, GALERKIN_RANGE, KMAX_RANGE,
    MC_N_RANGE, MC_SAMPLES_RANGE, QUAD_NODES_RANGE,
};
use crate::spec::{parse_potential, FnSpec};
use anyhow::{anyhow, bail, Result};
use semicircle::equilibrium::Potential;
use semicircle::report::{
    self, Report, TOL_GALERKIN, TOL_INEQUALITY, TOL_SPECTRAL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Poincare,
    Refine,
    Interpolate,
    Equilibrium,
    BrascampLieb,
    Wishart,
    VIndependence,
    McFluctuations,
}

impl CommandKind {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "poincare" => CommandKind::Poincare,
            "refine" => CommandKind::Refine,
            "interpolate" => CommandKind::Interpolate,
            "equilibrium" => CommandKind::Equilibrium,
            "brascamp-lieb" => CommandKind::BrascampLieb,
            "wishart" => CommandKind::Wishart,
            "v-independence" => CommandKind::VIndependence,
            "mc-fluctuations" => CommandKind::McFluctuations,
            other => bail!("unknown command {other:?}"),
        })
    }
}

/// Fully resolved parameters of one run.
#[derive(Clone, Debug, Default)]
pub struct RunParams {
    pub function: Option<String>,
    pub potentials: Vec<String>,
    pub degree: Option<usize>,
    pub galerkin_dim: Option<usize>,
    pub quad_nodes: Option<usize>,
    pub kmax: Option<usize>,
    pub mc_n: Option<usize>,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

impl RunParams {
    /// Fills unset fields from a key-value config file.
    pub fn apply_config(&mut self, cfg: &KeyValueConfig) -> Result<()> {
        if self.function.is_none() {
            self.function = cfg.get("fn").map(str::to_string);
        }
        if self.potentials.is_empty() {
            if let Some(p) = cfg.get("potential") {
                self.potentials.push(p.to_string());
            }
            if let Some(list) = cfg.get("potentials") {
                self.potentials
                    .extend(list.split('|').map(|s| s.trim().to_string()));
            }
        }
        macro_rules! fill {
            ($field:ident, $key:literal, $ty:ty) => {
                if self.$field.is_none() {
                    if let Some(text) = cfg.get($key) {
                        self.$field = Some(text.parse::<$ty>().map_err(|e| {
                            anyhow!("bad {} in config: {e}", $key)
                        })?);
                    }
                }
            };
        }
        fill!(degree, "degree", usize);
        fill!(galerkin_dim, "galerkin_dim", usize);
        fill!(quad_nodes, "quad_nodes", usize);
        fill!(kmax, "kmax", usize);
        fill!(mc_n, "mc_n", usize);
        fill!(mc_samples, "mc_samples", usize);
        fill!(seed, "seed", u64);
        fill!(tol, "tol", f64);
        Ok(())
    }

    pub fn from_suite_entry(entry: &SuiteEntry) -> Self {
        let mut potentials = Vec::new();
        if let Some(p) = &entry.potential {
            potentials.push(p.clone());
        }
        if let Some(list) = &entry.potentials {
            potentials.extend(list.iter().cloned());
        }
        RunParams {
            function: entry.function.clone(),
            potentials,
            degree: entry.degree,
            galerkin_dim: entry.galerkin_dim,
            quad_nodes: entry.quad_nodes,
            kmax: entry.kmax,
            mc_n: entry.mc_n,
            mc_samples: entry.mc_samples,
            seed: entry.seed,
            tol: entry.tol,
        }
    }

    fn function_spec(&self) -> Result<FnSpec> {
        let text = self
            .function
            .as_deref()
            .ok_or_else(|| anyhow!("missing --fn"))?;
        FnSpec::parse(text)
    }

    fn single_potential(&self) -> Result<Potential> {
        match self.potentials.as_slice() {
            [one] => parse_potential(one),
            [] => bail!("missing --potential"),
            _ => bail!("this command takes exactly one potential"),
        }
    }

    fn validate_tol(&self, default: f64) -> Result<f64> {
        let tol = self.tol.unwrap_or(default);
        if !tol.is_finite() || tol < 0.0 {
            bail!("tolerance must be a finite non-negative number, got {tol}");
        }
        Ok(tol)
    }
}

/// Runs one command and returns its reports.
pub fn execute(kind: CommandKind, params: &RunParams) -> Result<Vec<Report>> {
    let degree = check_range("degree", params.degree.unwrap_or(24), DEGREE_RANGE)?;
    if let Some(q) = params.quad_nodes {
        check_range("quad_nodes", q, QUAD_NODES_RANGE)?;
    }
    match kind {
        CommandKind::Poincare => {
            let spec = params.function_spec()?;
            let phi = spec.to_series(degree)?;
            let tol = params.validate_tol(TOL_INEQUALITY)?;
            Ok(vec![report::run_poincare(&phi, &spec.describe(), tol)])
        }
        CommandKind::Refine => {
            let spec = params.function_spec()?;
            let phi = spec.to_series(degree)?;
            let kmax = check_range("kmax", params.kmax.unwrap_or(4), KMAX_RANGE)?;
            let tol = params.validate_tol(TOL_SPECTRAL)?;
            Ok(vec![report::run_refinement(
                &phi,
                kmax,
                &spec.describe(),
                tol,
            )])
        }
        CommandKind::Interpolate => {
            let spec = params.function_spec()?;
            let phi = spec.to_series(degree)?;
            let tol = params.validate_tol(TOL_SPECTRAL)?;
            Ok(vec![report::run_interpolation(&phi, &spec.describe(), tol)])
        }
        CommandKind::Equilibrium => {
            let potential = params.single_potential()?;
            let tol = params.validate_tol(1e-12)?;
            Ok(vec![report::run_equilibrium(
                &potential,
                tol,
                params.quad_nodes,
            )?])
        }
        CommandKind::BrascampLieb => {
            let potential = params.single_potential()?;
            // without a test function, verify the sharpness case phi = V' + C
            if params.function.is_none() {
                let tol = params.validate_tol(1e-8)?;
                return Ok(vec![report::run_equality_case(&potential, tol)?]);
            }
            let spec = params.function_spec()?;
            let phi = spec.to_series(degree)?;
            let tol = params.validate_tol(TOL_INEQUALITY)?;
            Ok(vec![report::run_brascamp_lieb(
                &potential,
                &phi,
                &spec.describe(),
                tol,
                params.quad_nodes,
            )?])
        }
        CommandKind::Wishart => {
            let potential = params.single_potential()?;
            let spec = params.function_spec()?;
            let phi = spec.to_physical()?;
            // the reciprocal projections decay like 0.71^n on the shifted
            // support, so the half-line bound defaults to a high degree
            let degree = check_range("degree", params.degree.unwrap_or(160), DEGREE_RANGE)?;
            let tol = params.validate_tol(TOL_GALERKIN)?;
            Ok(vec![report::run_wishart(&potential, &phi, degree, tol)?])
        }
        CommandKind::VIndependence => {
            if params.potentials.is_empty() {
                bail!("missing --potential (repeat the flag for several)");
            }
            let potentials: Result<Vec<Potential>> =
                params.potentials.iter().map(|p| parse_potential(p)).collect();
            let spec = params.function_spec()?;
            let phi = spec.to_series(degree)?;
            let dim = check_range(
                "galerkin_dim",
                params.galerkin_dim.unwrap_or(40),
                GALERKIN_RANGE,
            )?;
            let tol = params.validate_tol(TOL_GALERKIN)?;
            Ok(vec![report::run_v_independence(
                &potentials?,
                &phi,
                &spec.describe(),
                dim,
                tol,
            )?])
        }
        CommandKind::McFluctuations => {
            let spec = params.function_spec()?;
            let phi = spec.to_series(degree)?;
            let n = check_range("mc_n", params.mc_n.unwrap_or(64), MC_N_RANGE)?;
            let samples = check_range(
                "mc_samples",
                params.mc_samples.unwrap_or(400),
                MC_SAMPLES_RANGE,
            )?;
            let seed = params.seed.unwrap_or(1);
            Ok(vec![report::run_mc_fluctuations(
                &phi,
                &spec.describe(),
                n,
                samples,
                seed,
            )?])
        }
    }
}

/// Runs every entry of a suite in order. Per-entry failures are collected
/// into failed reports instead of short-circuiting the batch; only malformed
/// entries (unknown command) abort.
pub fn execute_suite(entries: &[SuiteEntry], tol_override: Option<f64>) -> Result<Vec<Report>> {
    let mut reports = Vec::new();
    for entry in entries {
        let kind = CommandKind::parse(&entry.command)?;
        let mut params = RunParams::from_suite_entry(entry);
        if let Some(tol) = tol_override {
            params.tol = Some(tol);
        }
        match execute(kind, &params) {
            Ok(batch) => reports.extend(batch),
            Err(err) => {
                let report = Report::new(
                    &entry.command,
                    semicircle::report::Comparison::Identity,
                    f64::NAN,
                    f64::NAN,
                    0.0,
                )
                .force_fail(&err.to_string());
                reports.push(report);
            }
        }
    }
    Ok(reports)
}

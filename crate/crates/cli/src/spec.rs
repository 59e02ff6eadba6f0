//! Parsers for the function and potential specifications accepted on the
//! command line and in suite files.

use anyhow::{anyhow, bail, Context, Result};
use semicircle::equilibrium::{Domain, Potential};
use semicircle::report::PhysicalFn;
use semicircle::{ChebSeries, Interval};

/// A test function: a named analytic form, explicit first-kind coefficients,
/// or a monomial coefficient list. Everything is normalized by projection to
/// the declared degree.
#[derive(Clone, Debug, PartialEq)]
pub enum FnSpec {
    Named(NamedFn),
    Cheb(Vec<f64>),
    Mono(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum NamedFn {
    X,
    Pow(u32),
    Exp,
    Cosh,
    /// `1/(c - x)`
    RecipShift(f64),
    /// `1/x`
    Recip,
}

impl FnSpec {
    pub fn parse(text: &str) -> Result<FnSpec> {
        let text = text.trim();
        if let Some(body) = text.strip_prefix("cheb:") {
            return Ok(FnSpec::Cheb(parse_coeff_list(body)?));
        }
        if let Some(body) = text.strip_prefix("mono:") {
            return Ok(FnSpec::Mono(parse_coeff_list(body)?));
        }
        match text {
            "x" => return Ok(FnSpec::Named(NamedFn::X)),
            "exp" => return Ok(FnSpec::Named(NamedFn::Exp)),
            "cosh" => return Ok(FnSpec::Named(NamedFn::Cosh)),
            "1/x" => return Ok(FnSpec::Named(NamedFn::Recip)),
            _ => {}
        }
        if let Some(power) = text.strip_prefix("x^") {
            let p: u32 = power
                .parse()
                .with_context(|| format!("bad power in {text:?}"))?;
            return Ok(FnSpec::Named(NamedFn::Pow(p)));
        }
        // 1/(c-x)
        if let Some(body) = text.strip_prefix("1/(") {
            if let Some(inner) = body.strip_suffix("-x)") {
                let c: f64 = inner
                    .parse()
                    .with_context(|| format!("bad shift in {text:?}"))?;
                return Ok(FnSpec::Named(NamedFn::RecipShift(c)));
            }
        }
        bail!(
            "unknown function {text:?}; expected x, x^k, exp, cosh, 1/x, 1/(c-x), \
             cheb:a0,a1,... or mono:c0,c1,..."
        )
    }

    pub fn describe(&self) -> String {
        match self {
            FnSpec::Named(NamedFn::X) => "x".into(),
            FnSpec::Named(NamedFn::Pow(p)) => format!("x^{p}"),
            FnSpec::Named(NamedFn::Exp) => "exp".into(),
            FnSpec::Named(NamedFn::Cosh) => "cosh".into(),
            FnSpec::Named(NamedFn::RecipShift(c)) => format!("1/({c}-x)"),
            FnSpec::Named(NamedFn::Recip) => "1/x".into(),
            FnSpec::Cheb(c) => format!(
                "cheb:{}",
                c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
            ),
            FnSpec::Mono(c) => format!(
                "mono:{}",
                c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
            ),
        }
    }

    /// Reference-interval series at the declared degree.
    pub fn to_series(&self, degree: usize) -> Result<ChebSeries> {
        let degree = degree.max(1);
        let project = |f: &dyn Fn(f64) -> f64| {
            ChebSeries::project(f, degree, Interval::REFERENCE)
                .map_err(|e| anyhow!("projection failed: {e}"))
        };
        match self {
            FnSpec::Named(NamedFn::X) => project(&|x| x),
            FnSpec::Named(NamedFn::Pow(p)) => {
                let p = *p;
                if p as usize > degree {
                    bail!("x^{p} needs a projection degree of at least {p}");
                }
                project(&move |x: f64| x.powi(p as i32))
            }
            FnSpec::Named(NamedFn::Exp) => project(&f64::exp),
            FnSpec::Named(NamedFn::Cosh) => project(&f64::cosh),
            FnSpec::Named(NamedFn::RecipShift(c)) => {
                let c = *c;
                if c.abs() <= 2.0 {
                    bail!("1/({c}-x) has a pole inside the reference interval");
                }
                project(&move |x: f64| 1.0 / (c - x))
            }
            FnSpec::Named(NamedFn::Recip) => {
                bail!("1/x is only available on a positive support (half-line bound)")
            }
            FnSpec::Cheb(coeffs) => {
                if coeffs.len() > degree + 1 {
                    bail!(
                        "cheb list has {} coefficients but the declared degree is {degree}",
                        coeffs.len()
                    );
                }
                Ok(ChebSeries::first_kind(coeffs.clone()))
            }
            FnSpec::Mono(coeffs) => {
                if coeffs.len() > degree + 1 {
                    bail!(
                        "monomial list of degree {} exceeds the declared degree {degree}",
                        coeffs.len().saturating_sub(1)
                    );
                }
                let coeffs = coeffs.clone();
                project(&move |x: f64| {
                    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
                })
            }
        }
    }

    /// Physical form with an analytic derivative (half-line bound only).
    pub fn to_physical(&self) -> Result<PhysicalFn> {
        match self {
            FnSpec::Named(NamedFn::X) => Ok(PhysicalFn::identity()),
            FnSpec::Named(NamedFn::Pow(p)) => Ok(PhysicalFn::power(*p)),
            FnSpec::Named(NamedFn::Exp) => Ok(PhysicalFn::exp()),
            FnSpec::Named(NamedFn::Cosh) => Ok(PhysicalFn::cosh()),
            FnSpec::Named(NamedFn::RecipShift(c)) => Ok(PhysicalFn::recip_shift(*c)),
            FnSpec::Named(NamedFn::Recip) => Ok(PhysicalFn::reciprocal()),
            _ => bail!("the half-line bound needs a named analytic function, not a series"),
        }
    }
}

fn parse_coeff_list(body: &str) -> Result<Vec<f64>> {
    let coeffs: Result<Vec<f64>> = body
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("bad coefficient {p:?}"))
        })
        .collect();
    let coeffs = coeffs?;
    if coeffs.is_empty() {
        bail!("empty coefficient list");
    }
    Ok(coeffs)
}

/// Parses a potential: either a JSON record
/// `{"monomials": [[p, c], ...], "log_s": s, "domain": ...}` or a compact
/// expression like `x^2/2+x^4/20`, optionally with `;log_s=S` and
/// `;domain=half-line|real-line|lo:hi` suffixes.
pub fn parse_potential(text: &str) -> Result<Potential> {
    let text = text.trim();
    if text.starts_with('{') {
        let v: Potential = serde_json::from_str(text)
            .with_context(|| format!("bad potential record {text:?}"))?;
        return Ok(v);
    }
    let mut expr = text;
    let mut log_s = 0.0;
    let mut domain: Option<Domain> = None;
    if let Some((head, opts)) = text.split_once(';') {
        expr = head;
        for opt in opts.split(';') {
            let (key, value) = opt
                .split_once('=')
                .ok_or_else(|| anyhow!("bad potential option {opt:?}"))?;
            match key.trim() {
                "log_s" => {
                    log_s = value
                        .trim()
                        .parse()
                        .with_context(|| format!("bad log_s {value:?}"))?
                }
                "domain" => {
                    domain = Some(match value.trim() {
                        "real-line" => Domain::RealLine,
                        "half-line" => Domain::HalfLine,
                        pair => {
                            let (lo, hi) = pair
                                .split_once(':')
                                .ok_or_else(|| anyhow!("bad domain {pair:?}"))?;
                            Domain::Interval(lo.trim().parse()?, hi.trim().parse()?)
                        }
                    })
                }
                other => bail!("unknown potential option {other:?}"),
            }
        }
    }
    let mut monomials = Vec::new();
    for term in expr.split('+') {
        let term = term.trim();
        if term.is_empty() {
            bail!("empty term in potential {text:?}");
        }
        monomials.push(parse_monomial(term)?);
    }
    let domain = domain.unwrap_or(if log_s > 0.0 {
        Domain::HalfLine
    } else {
        Domain::RealLine
    });
    Potential::new(monomials, log_s, domain).map_err(|e| anyhow!("invalid potential: {e}"))
}

/// One term: `[c*]x[^p][/d]` or a bare constant.
fn parse_monomial(term: &str) -> Result<(u32, f64)> {
    let (body, divisor) = match term.rsplit_once('/') {
        Some((b, d)) if !d.contains('x') => {
            let d: f64 = d
                .trim()
                .parse()
                .with_context(|| format!("bad divisor in {term:?}"))?;
            (b.trim(), d)
        }
        _ => (term, 1.0),
    };
    let (coeff, power_part) = match body.split_once('*') {
        Some((c, rest)) => (
            c.trim()
                .parse::<f64>()
                .with_context(|| format!("bad coefficient in {term:?}"))?,
            rest.trim(),
        ),
        None => (1.0, body),
    };
    if let Some(p) = power_part.strip_prefix("x^") {
        let p: u32 = p.parse().with_context(|| format!("bad power in {term:?}"))?;
        Ok((p, coeff / divisor))
    } else if power_part == "x" {
        Ok((1, coeff / divisor))
    } else {
        let c: f64 = power_part
            .parse()
            .with_context(|| format!("bad constant term {term:?}"))?;
        Ok((0, c * coeff / divisor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_named_forms() {
        assert_eq!(FnSpec::parse("x").unwrap(), FnSpec::Named(NamedFn::X));
        assert_eq!(FnSpec::parse("x^4").unwrap(), FnSpec::Named(NamedFn::Pow(4)));
        assert_eq!(
            FnSpec::parse("1/(5-x)").unwrap(),
            FnSpec::Named(NamedFn::RecipShift(5.0))
        );
        assert_eq!(FnSpec::parse("1/x").unwrap(), FnSpec::Named(NamedFn::Recip));
        assert!(FnSpec::parse("unknownfn").is_err());
    }

    #[test]
    fn parses_coefficient_lists() {
        assert_eq!(
            FnSpec::parse("cheb:0,0,1").unwrap(),
            FnSpec::Cheb(vec![0.0, 0.0, 1.0])
        );
        assert_eq!(
            FnSpec::parse("mono:0,2.5").unwrap(),
            FnSpec::Mono(vec![0.0, 2.5])
        );
        assert!(FnSpec::parse("cheb:0,zebra").is_err());
    }

    #[test]
    fn series_projection_normalizes() {
        let s = FnSpec::parse("mono:0,1").unwrap().to_series(4).unwrap();
        assert!((s.coeff(1) - 2.0).abs() < 1e-14);
        assert!(FnSpec::parse("x^9").unwrap().to_series(4).is_err());
        assert!(FnSpec::parse("1/(1.5-x)").unwrap().to_series(8).is_err());
    }

    #[test]
    fn parses_potential_expressions() {
        let v = parse_potential("x^2/2").unwrap();
        assert_eq!(v.monomials(), &[(2, 0.5)]);
        let v = parse_potential("x^2/2+x^4/20").unwrap();
        assert_eq!(v.monomials(), &[(2, 0.5), (4, 0.05)]);
        let v = parse_potential("x;log_s=1").unwrap();
        assert_eq!(v.monomials(), &[(1, 1.0)]);
        assert_eq!(v.log_coefficient(), 1.0);
        let v = parse_potential("0.5*x^2+x").unwrap();
        assert_eq!(v.monomials(), &[(1, 1.0), (2, 0.5)]);
        assert!(parse_potential("x^2/2;log_s=-1").is_err());
        assert!(parse_potential("q^2").is_err());
    }

    #[test]
    fn parses_potential_records() {
        let v = parse_potential(r#"{"monomials": [[2, 0.5]], "log_s": 0.0, "domain": "real-line"}"#)
            .unwrap();
        assert_eq!(v.monomials(), &[(2, 0.5)]);
        // unknown keys are rejected
        assert!(parse_potential(r#"{"monomials": [[2, 0.5]], "zebra": 1}"#).is_err());
        // interval domains come as [lo, hi]
        let v = parse_potential(r#"{"monomials": [[2, 0.5]], "domain": [0.5, 9.0]}"#).unwrap();
        assert_eq!(v.domain(), semicircle::equilibrium::Domain::Interval(0.5, 9.0));
    }
}

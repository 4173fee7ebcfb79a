use awq_core::awpoly::{aw_a, aw_d_real, map_params, CondDensityParams};
use awq_core::densities::{f_cn, f_n, phi_cond, DensityEval};
use awq_core::moments::{c_n, phi_expansion_partial, poisson_mehler_partial};
use awq_core::polyfam::{asc_p, asc_q_conjugate, b_poly, b_poly_cont, chebyshev_u, cont_q_hermite, q_hermite, MAX_DEGREE};
use awq_core::verify::{format_json, format_text, run_suite, summarize, CheckName, CheckReport, GridPoint, SuiteConfig};
use awq_core::{Error, QParam, Result, TruncationPolicy};

use crate::args::{EvalArgs, ExpandArgs, ExpandTarget, Format, Params, ReportFormat, VerifyArgs};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Selector {
    ContHermite,
    Hermite,
    AscQ,
    AscP,
    B,
    BCont,
    ChebyshevU,
    D,
    A,
    FN,
    FCn,
    Phi,
    C,
}

impl Selector {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "h" => Selector::ContHermite,
            "H" => Selector::Hermite,
            "Q" => Selector::AscQ,
            "P" => Selector::AscP,
            "B" => Selector::B,
            "b" => Selector::BCont,
            "U" => Selector::ChebyshevU,
            "D" => Selector::D,
            "A" => Selector::A,
            "f_N" => Selector::FN,
            "f_CN" => Selector::FCn,
            "phi" => Selector::Phi,
            "C" | "C_n" => Selector::C,
            _ => {
                return Err(Error::Config(format!(
                    "unknown selector '{s}'; expected one of h, H, Q, P, B, b, U, D, A, f_N, f_CN, phi, C"
                )))
            }
        })
    }

    fn has_degree(self) -> bool {
        !matches!(self, Selector::FN | Selector::FCn | Selector::Phi)
    }

    fn is_density(self) -> bool {
        !self.has_degree()
    }

    /// Which of `(y, z, rho1, rho2)` the selector reads.
    fn uses(self) -> (bool, bool) {
        match self {
            Selector::AscQ | Selector::AscP | Selector::FCn => (true, false),
            Selector::D | Selector::A | Selector::Phi | Selector::C => (true, true),
            _ => (false, false),
        }
    }
}

fn policy(p: &Params) -> Result<TruncationPolicy> {
    let d = TruncationPolicy::default();
    TruncationPolicy::new(p.tol.unwrap_or(d.rel_tol), p.max_terms.unwrap_or(d.max_terms))
}

fn q_of(p: &Params) -> Result<QParam> {
    QParam::new(p.q.ok_or_else(|| Error::Config("--q is required".into()))?)
}

/// `lo:hi:count`, inclusive of both ends.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("grid '{text}' must have the form lo:hi:count with count >= 1"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count)
        .map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 })
        .collect())
}

fn points(p: &Params, default: Option<Vec<f64>>) -> Result<Vec<f64>> {
    if let Some(g) = &p.grid {
        parse_grid(g)
    } else if !p.x.is_empty() {
        Ok(p.x.clone())
    } else {
        default.ok_or_else(|| Error::Config("give evaluation points with --x or --grid".into()))
    }
}

fn render(t: &Table, f: Format) -> String {
    match f {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    }
}

fn cond(p: &Params, q: QParam) -> Result<CondDensityParams> {
    CondDensityParams::new(p.y, p.rho1, p.z, p.rho2, q.value())
}

pub fn eval(a: &EvalArgs) -> Result<String> {
    let sel = Selector::parse(&a.selector)?;
    let p = &a.params;
    let q = q_of(p)?;
    let qv = q.value();
    let pol = policy(p)?;
    let n = if sel.has_degree() {
        let n = a.n.ok_or_else(|| Error::Config(format!("--n is required for '{}'", a.selector)))?;
        if n > MAX_DEGREE {
            return Err(Error::Domain(format!("degree n = {n} exceeds the cap {MAX_DEGREE}")));
        }
        Some(n)
    } else {
        None
    };
    let (uses_first, uses_second) = sel.uses();

    // parameter preconditions, checked once before any evaluation
    let cp = match sel {
        Selector::D | Selector::A | Selector::C => Some(cond(p, q)?),
        Selector::Phi => {
            let c = cond(p, q)?;
            c.require_interior()?;
            Some(c)
        }
        Selector::FCn => {
            let c = CondDensityParams::new(p.y, p.rho1, 0.0, 0.0, qv)?;
            c.require_interior()?;
            None
        }
        _ => None,
    };
    let aw = match sel {
        Selector::D => Some(map_params(cp.as_ref().expect("set above"))?),
        Selector::AscQ => Some(map_params(&CondDensityParams::new(p.y, p.rho1, 0.0, 0.0, qv)?)?),
        _ => None,
    };

    let xs = if sel == Selector::C { vec![] } else { points(p, None)? };
    let mut cols = vec![];
    if sel != Selector::C {
        cols.push("x");
    }
    if n.is_some() {
        cols.push("n");
    }
    cols.push("q");
    if uses_first {
        cols.extend(["y", "rho1"]);
    }
    if uses_second {
        cols.extend(["z", "rho2"]);
    }
    cols.push("value");
    if sel.is_density() {
        cols.push("terms");
    }
    let mut t = Table::new(cols);
    let row_for = |x: Option<f64>, value: f64, terms: Option<usize>| {
        let mut r = vec![];
        if let Some(x) = x {
            r.push(Cell::Num(x));
        }
        if let Some(n) = n {
            r.push(Cell::Int(n as i64));
        }
        r.push(Cell::Num(qv));
        if uses_first {
            r.extend([Cell::Num(p.y), Cell::Num(p.rho1)]);
        }
        if uses_second {
            r.extend([Cell::Num(p.z), Cell::Num(p.rho2)]);
        }
        r.push(Cell::Num(value));
        if let Some(k) = terms {
            r.push(Cell::Int(k as i64));
        }
        r
    };

    if sel == Selector::C {
        let v = c_n(n.expect("C has a degree"), cp.as_ref().expect("set above"))?;
        t.push(row_for(None, v, None));
        return Ok(render(&t, p.format));
    }
    for x in xs {
        let (value, terms) = match sel {
            Selector::ContHermite => (cont_q_hermite(n.unwrap(), &x, &qv), None),
            Selector::Hermite => (q_hermite(n.unwrap(), &x, &qv), None),
            Selector::AscQ => (asc_q_conjugate(n.unwrap(), x, aw.as_ref().unwrap().a, qv)?, None),
            Selector::AscP => (asc_p(n.unwrap(), &x, &p.y, &p.rho1, &qv), None),
            Selector::B => (b_poly(n.unwrap(), &x, &qv), None),
            Selector::BCont => (b_poly_cont(n.unwrap(), &x, &qv), None),
            Selector::ChebyshevU => (chebyshev_u(n.unwrap(), &x), None),
            Selector::D => (aw_d_real(n.unwrap(), x, aw.as_ref().unwrap(), qv)?, None),
            Selector::A => (aw_a(n.unwrap(), x, cp.as_ref().unwrap())?, None),
            Selector::FN => density(f_n(x, q, &pol)?),
            Selector::FCn => density(f_cn(x, p.y, p.rho1, q, &pol)?),
            Selector::Phi => density(phi_cond(x, cp.as_ref().unwrap(), &pol)?),
            Selector::C => unreachable!("handled above"),
        };
        t.push(row_for(Some(x), value, terms));
    }
    Ok(render(&t, p.format))
}

fn density(d: DensityEval) -> (f64, Option<usize>) {
    (d.value, Some(d.terms))
}

pub fn expand(a: &ExpandArgs) -> Result<String> {
    if a.n == 0 {
        return Err(Error::Config("the number of expansion terms --n must be at least 1".into()));
    }
    let p = &a.params;
    let q = q_of(p)?;
    if q.is_gaussian_branch() {
        return Err(Error::Domain("expansions need |q| < 1".into()));
    }
    let pol = policy(p)?;
    let h = q.support_half_width();
    let default: Vec<f64> = (0..21).map(|i| -h + 2.0 * h * i as f64 / 20.0).collect();
    let xs = points(p, Some(default))?;
    let mut t = Table::new(vec!["x", "closed_form", "partial_sum_N", "abs_error"]);
    let rows: Vec<(f64, f64, f64)> = match a.target {
        ExpandTarget::Phi => {
            let cp = cond(p, q)?;
            cp.require_interior()?;
            xs.iter()
                .map(|&x| Ok((x, phi_cond(x, &cp, &pol)?.value, phi_expansion_partial(x, &cp, a.n, &pol)?)))
                .collect::<Result<_>>()?
        }
        ExpandTarget::FCn => {
            CondDensityParams::new(p.y, p.rho1, 0.0, 0.0, q.value())?.require_interior()?;
            xs.iter()
                .map(|&x| {
                    Ok((
                        x,
                        f_cn(x, p.y, p.rho1, q, &pol)?.value,
                        poisson_mehler_partial(x, p.y, p.rho1, q, a.n, &pol)?,
                    ))
                })
                .collect::<Result<_>>()?
        }
    };
    for (x, closed, partial) in rows {
        t.push(vec![Cell::Num(x), Cell::Num(closed), Cell::Num(partial), Cell::Num((partial - closed).abs())]);
    }
    Ok(render(&t, p.format))
}

fn suite_config(a: &VerifyArgs) -> Result<SuiteConfig> {
    let mut cfg = SuiteConfig::default();
    if !a.check.is_empty() {
        if a.all {
            return Err(Error::Config("--all and --check are mutually exclusive".into()));
        }
        cfg.checks = a.check.iter().map(|s| s.trim().parse::<CheckName>()).collect::<Result<_>>()?;
    }
    if let Some(n) = a.nmax {
        if n > MAX_DEGREE {
            return Err(Error::Domain(format!("--nmax {n} exceeds the cap {MAX_DEGREE}")));
        }
        cfg.nmax = n;
    }
    if !a.q.is_empty() {
        for &q in &a.q {
            QParam::new(q)?;
        }
        cfg.q_values = a.q.clone();
    }
    if a.rho1.is_some() || a.rho2.is_some() {
        cfg.rho_pairs = vec![(a.rho1.unwrap_or(0.0), a.rho2.unwrap_or(0.0))];
    }
    if a.y.is_some() || a.z.is_some() {
        cfg.points = vec![GridPoint::Absolute(a.y.unwrap_or(0.0), a.z.unwrap_or(0.0))];
    }
    if let Some(t) = a.tol {
        if !(t >= 0.0) {
            return Err(Error::Config("--tol must be non-negative".into()));
        }
        cfg.tol = Some(t);
    }
    let d = TruncationPolicy::default();
    cfg.policy = TruncationPolicy::new(d.rel_tol, a.max_terms.unwrap_or(d.max_terms))?;
    Ok(cfg)
}

fn reports_csv(reports: &[CheckReport]) -> String {
    let mut t = Table::new(vec!["name", "params", "residual", "tolerance", "pass", "error"]);
    for r in reports {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        t.push(vec![
            Cell::Text(r.name.clone()),
            Cell::Text(params.join(";")),
            Cell::Num(r.residual),
            Cell::Num(r.tolerance),
            Cell::Text(r.pass.to_string()),
            Cell::Text(r.error.clone().unwrap_or_default()),
        ]);
    }
    t.to_csv()
}

/// Report text and whether every check passed.
pub fn verify(a: &VerifyArgs) -> Result<(String, bool)> {
    let cfg = suite_config(a)?;
    let reports = run_suite(&cfg)?;
    let (_, failed) = summarize(&reports);
    let text = match a.format {
        ReportFormat::Text => format_text(&reports),
        ReportFormat::Json => format_json(&reports) + "\n",
        ReportFormat::Csv => reports_csv(&reports),
    };
    Ok((text, failed == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("-2:2:5").unwrap(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(parse_grid("0.5:9:1").unwrap(), vec![0.5]);
        for bad in ["1:2", "1:2:0", "a:2:3", "1:2:3:4", "1:inf:3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn selectors() {
        assert_eq!(Selector::parse("C_n").unwrap(), Selector::C);
        assert!(Selector::parse("Z").is_err());
        assert!(Selector::parse("phi").unwrap().is_density());
    }
}

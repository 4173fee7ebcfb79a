//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each export returns a JSON document. The `*_json` functions hold the
//! logic and are plain Rust, so they are tested natively.

use awq_core::awpoly::CondDensityParams;
use awq_core::densities::{f_n, phi_cond};
use awq_core::moments::{c_n_main_all, phi_expansion_partial};
use awq_core::polyfam::{q_hermite_all, MAX_DEGREE};
use awq_core::qcore::s_n;
use awq_core::verify::checks::check_moments;
use awq_core::{QParam, Result, TruncationPolicy};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 2001;

#[derive(Serialize)]
struct DensityCurve {
    x: Vec<f64>,
    phi: Vec<f64>,
    partial: Vec<f64>,
    f_n: Vec<f64>,
    sup_error: f64,
}

#[derive(Serialize)]
struct HermiteCurves {
    x: Vec<f64>,
    /// `curves[n][i] = H_n(x_i | q)`
    curves: Vec<Vec<f64>>,
    /// `s_n(q) (1-q)^{-n/2}`
    bound: Vec<f64>,
}

#[derive(Serialize)]
struct MomentRow {
    n: usize,
    closed_form: f64,
    quadrature_residual: f64,
    pass: bool,
}

fn check_count(count: usize) -> Result<()> {
    if (2..=MAX_POINTS).contains(&count) {
        Ok(())
    } else {
        Err(awq_core::Error::Config(format!("point count must be in 2..={MAX_POINTS}")))
    }
}

fn support_grid(q: QParam, count: usize) -> Vec<f64> {
    let h = if q.is_gaussian_branch() { 4.0 } else { q.support_half_width() };
    (0..count).map(|i| -h + 2.0 * h * i as f64 / (count - 1) as f64).collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain numeric data")
}

/// `phi(x|y,rho1,z,rho2,q)` on a grid together with the partial sum of its
/// `H_i(x)` expansion with `terms` terms.
pub fn density_curve_json(q: f64, y: f64, z: f64, rho1: f64, rho2: f64, terms: usize, count: usize) -> Result<String> {
    check_count(count)?;
    let p = CondDensityParams::new(y, rho1, z, rho2, q)?;
    p.require_interior()?;
    if p.q.is_gaussian_branch() {
        return Err(awq_core::Error::Domain("the expansion needs |q| < 1".into()));
    }
    let pol = TruncationPolicy::default();
    let x = support_grid(p.q, count);
    let mut c = DensityCurve {
        phi: Vec::with_capacity(count),
        partial: Vec::with_capacity(count),
        f_n: Vec::with_capacity(count),
        sup_error: 0.0,
        x: Vec::new(),
    };
    for &xi in &x {
        let exact = phi_cond(xi, &p, &pol)?.value;
        let part = phi_expansion_partial(xi, &p, terms, &pol)?;
        c.sup_error = c.sup_error.max((exact - part).abs());
        c.phi.push(exact);
        c.partial.push(part);
        c.f_n.push(f_n(xi, p.q, &pol)?.value);
    }
    c.x = x;
    Ok(to_json(&c))
}

/// `H_0..H_nmax` on a grid over the support, with the uniform bound.
pub fn hermite_curves_json(q: f64, nmax: usize, count: usize) -> Result<String> {
    check_count(count)?;
    if nmax > MAX_DEGREE {
        return Err(awq_core::Error::Domain(format!("nmax must be at most {MAX_DEGREE}")));
    }
    let q = QParam::new(q)?;
    let qv = q.value();
    let x = support_grid(q, count);
    let mut curves = vec![Vec::with_capacity(count); nmax + 1];
    for xi in &x {
        for (n, v) in q_hermite_all(nmax, xi, &qv).into_iter().enumerate() {
            curves[n].push(v);
        }
    }
    let bound = if q.is_gaussian_branch() {
        vec![f64::NAN; nmax + 1]
    } else {
        (0..=nmax).map(|n| s_n(n, &qv) * (1.0 - qv).powf(-(n as f64) / 2.0)).collect()
    };
    Ok(to_json(&HermiteCurves { x, curves, bound }))
}

/// Closed-form conditional moments `C_n` next to the quadrature residual of
/// `integral H_n phi dx - C_n`.
pub fn moments_table_json(q: f64, y: f64, z: f64, rho1: f64, rho2: f64, nmax: usize) -> Result<String> {
    if nmax > 16 {
        return Err(awq_core::Error::Domain("nmax must be at most 16 in the demo".into()));
    }
    let p = CondDensityParams::new(y, rho1, z, rho2, q)?;
    p.require_interior()?;
    let pol = TruncationPolicy::default();
    let closed = if p.q.is_gaussian_branch() {
        (0..=nmax).map(|n| awq_core::moments::c_n_gaussian(n, y, z, rho1, rho2)).collect()
    } else {
        c_n_main_all(nmax, &p.float(), &p.q.value())?
    };
    let reports = check_moments(nmax, &p, 1e-7, &pol)?;
    let rows: Vec<MomentRow> = reports
        .iter()
        .zip(closed)
        .enumerate()
        .map(|(n, (r, c))| MomentRow {
            n,
            closed_form: c,
            quadrature_residual: r.residual,
            pass: r.pass,
        })
        .collect();
    Ok(to_json(&rows))
}

fn js(r: Result<String>) -> std::result::Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen(js_name = densityCurve)]
pub fn density_curve(q: f64, y: f64, z: f64, rho1: f64, rho2: f64, terms: usize, count: usize) -> std::result::Result<String, JsValue> {
    js(density_curve_json(q, y, z, rho1, rho2, terms, count))
}

#[wasm_bindgen(js_name = hermiteCurves)]
pub fn hermite_curves(q: f64, nmax: usize, count: usize) -> std::result::Result<String, JsValue> {
    js(hermite_curves_json(q, nmax, count))
}

#[wasm_bindgen(js_name = momentsTable)]
pub fn moments_table(q: f64, y: f64, z: f64, rho1: f64, rho2: f64, nmax: usize) -> std::result::Result<String, JsValue> {
    js(moments_table_json(q, y, z, rho1, rho2, nmax))
}

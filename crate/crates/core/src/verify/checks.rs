//! Individual verification checks. Each returns one or more
//! [`CheckReport`]s; numerical failures inside a check surface as `Err`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use twofloat::TwoFloat;

use super::identities as id;
use super::quadrature::{integrate_on_s, try_integrate_vec_on_s};
use super::CheckReport;
use crate::awpoly::{
    aw_a_free, aw_a_mixed, aw_a_sym, aw_d2_free_closed, aw_d_free, aw_d_real, aw_phi43_exact, map_params, AwParams,
    CondDensityParams, CondParams,
};
use crate::densities::{f_cn, f_cn_free, f_n, f_n_free, fcn_ratio_bounds, phi_cond, phi_free};
use crate::error::{Error, Result};
use crate::moments::{c_n_gaussian, c_n_main_all, phi_expansion_partial, poisson_mehler_partial};
use crate::polyfam::{asc_p, asc_p_all, q_hermite_all};
use crate::qcore::{q_pochhammer, q_pochhammer_inf, s_n, QParam, QTable, TruncationPolicy};
use crate::scalar::{rational, Scalar};

/// Quadrature target for a check tolerance: three orders tighter, floored
/// at `1e-13`.
pub fn quad_tol(tol: f64) -> f64 {
    (tol * 1e-3).max(1e-13)
}

fn pairs(nmax: usize) -> Vec<(usize, usize)> {
    (0..=nmax).flat_map(|n| (n..=nmax).map(move |m| (n, m))).collect()
}

fn pair_report(name: &str, base: &[(&str, f64)], n: usize, m: usize, value: f64, norm: f64, tol: f64) -> CheckReport {
    let mut params = base.to_vec();
    params.push(("n", n as f64));
    params.push(("m", m as f64));
    let residual = if n == m { (value - norm).abs() } else { value.abs() };
    CheckReport::new(name, &params, residual, tol)
}

/// `integral H_n H_m f_N = delta_{nm} [n]_q!` for `n <= m <= nmax`, with
/// absolute residuals.
pub fn check_orthogonality_h(nmax: usize, q: QParam, tol: f64, policy: &TruncationPolicy) -> Result<Vec<CheckReport>> {
    let pr = pairs(nmax);
    let qv = q.value();
    let est = try_integrate_vec_on_s(
        |x, out| {
            let w = f_n(x, q, policy)?.value;
            let h = q_hermite_all(nmax, &x, &qv);
            for (o, (n, m)) in out.iter_mut().zip(&pr) {
                *o = h[*n] * h[*m] * w;
            }
            Ok(())
        },
        pr.len(),
        q,
        quad_tol(tol),
    )?;
    let t = QTable::new(nmax, &qv);
    Ok(pr
        .iter()
        .zip(&est.values)
        .map(|((n, m), v)| pair_report("orthogonality_H", &[("q", qv)], *n, *m, *v, t.factorial(*n), tol))
        .collect())
}

/// `integral H_n(x) f_CN(x|y,rho) dx = rho^n H_n(y)`.
pub fn check_cond_expectation(nmax: usize, y: f64, rho: f64, q: QParam, tol: f64, policy: &TruncationPolicy) -> Result<Vec<CheckReport>> {
    let qv = q.value();
    let est = try_integrate_vec_on_s(
        |x, out| {
            let w = f_cn(x, y, rho, q, policy)?.value;
            let h = q_hermite_all(nmax, &x, &qv);
            for (o, hn) in out.iter_mut().zip(h) {
                *o = hn * w;
            }
            Ok(())
        },
        nmax + 1,
        q,
        quad_tol(tol),
    )?;
    let hy = q_hermite_all(nmax, &y, &qv);
    Ok((0..=nmax)
        .map(|n| {
            let want = rho.powi(n as i32) * hy[n];
            CheckReport::new(
                "cond_expectation",
                &[("q", qv), ("y", y), ("rho", rho), ("n", n as f64)],
                (est.values[n] - want).abs(),
                tol,
            )
        })
        .collect())
}

/// `integral P_n P_m f_CN = delta_{nm} (rho^2)_n [n]_q!`.
pub fn check_orthogonality_p(nmax: usize, y: f64, rho: f64, q: QParam, tol: f64, policy: &TruncationPolicy) -> Result<Vec<CheckReport>> {
    let pr = pairs(nmax);
    let qv = q.value();
    let est = try_integrate_vec_on_s(
        |x, out| {
            let w = f_cn(x, y, rho, q, policy)?.value;
            let p = asc_p_all(nmax, &x, &y, &rho, &qv);
            for (o, (n, m)) in out.iter_mut().zip(&pr) {
                *o = p[*n] * p[*m] * w;
            }
            Ok(())
        },
        pr.len(),
        q,
        quad_tol(tol),
    )?;
    let t = QTable::new(nmax, &qv);
    Ok(pr
        .iter()
        .zip(&est.values)
        .map(|((n, m), v)| {
            let norm = q_pochhammer(&(rho * rho), &qv, *n) * t.factorial(*n);
            pair_report("orthogonality_P", &[("q", qv), ("y", y), ("rho", rho)], *n, *m, *v, norm, tol)
        })
        .collect())
}

/// `integral f_CN(x|y,rho1) f_CN(y|z,rho2) dy = f_CN(x|z,rho1 rho2)`.
pub fn check_chapman_kolmogorov(x: f64, z: f64, rho1: f64, rho2: f64, q: QParam, tol: f64, policy: &TruncationPolicy) -> Result<CheckReport> {
    let est = try_integrate_vec_on_s(
        |y, out| {
            out[0] = f_cn(x, y, rho1, q, policy)?.value * f_cn(y, z, rho2, q, policy)?.value;
            Ok(())
        },
        1,
        q,
        quad_tol(tol),
    )?;
    let want = f_cn(x, z, rho1 * rho2, q, policy)?.value;
    Ok(CheckReport::new(
        "chapman_kolmogorov",
        &[("q", q.value()), ("x", x), ("z", z), ("rho1", rho1), ("rho2", rho2)],
        (est.values[0] - want).abs(),
        tol,
    ))
}

/// `sum_i s_i t^i/(q)_i = 1/(t)_inf^2` and
/// `sum_i s_i^2 t^i/(q)_i = (t^2)_inf/(t)_inf^4`; the residual is the
/// larger relative deviation.
///
/// The second series cancels heavily for negative `t` (terms near `10^3`
/// summing to `10^-4` at `q = 0.7`, `t = -0.6`), so the terms are formed
/// and summed in double-double arithmetic.
pub fn check_sn_series(t: f64, q: QParam, tol: f64, policy: &TruncationPolicy) -> Result<CheckReport> {
    if q.is_gaussian_branch() || t.abs() >= 1.0 {
        return Err(Error::Domain("the s_n series need |t| < 1 and |q| < 1".into()));
    }
    let qv = q.value();
    let one = TwoFloat::from(1.0);
    let (mut s1, mut s2) = (TwoFloat::from(0.0), TwoFloat::from(0.0));
    let (mut s_prev, mut s_cur) = (TwoFloat::from(0.0), one);
    // a = t^i / (q)_i
    let (mut a, mut qi) = (one, one);
    let mut small = 0;
    let mut i = 0;
    while small < 3 {
        if i >= policy.max_terms {
            return Err(Error::Truncation {
                what: "s_n series".into(),
                max_terms: policy.max_terms,
            });
        }
        let t1 = s_cur * a;
        let t2 = t1 * s_cur;
        s1 += t1;
        s2 += t2;
        let mag = f64::from(t1).abs().max(f64::from(t2).abs());
        small = if mag < 1e-20 * f64::from(s2).abs() { small + 1 } else { 0 };
        let next = s_cur * 2.0 - (one - qi) * s_prev;
        s_prev = s_cur;
        s_cur = next;
        qi *= qv;
        a = a * t * dd_recip(one - qi);
        i += 1;
    }
    let (s1, s2) = (f64::from(s1), f64::from(s2));
    let tinf = q_pochhammer_inf(t, q, policy)?;
    let want1 = 1.0 / (tinf * tinf);
    let want2 = q_pochhammer_inf(t * t, q, policy)? / tinf.powi(4);
    let residual = ((s1 - want1).abs() / want1).max((s2 - want2).abs() / want2);
    Ok(CheckReport::new("sn_series", &[("q", qv), ("t", t), ("terms", i as f64)], residual, tol))
}

/// Double-double reciprocal: one Newton step from the `f64` reciprocal.
/// `TwoFloat` division by a `TwoFloat` is only accurate to `f64` precision.
fn dd_recip(d: TwoFloat) -> TwoFloat {
    let r = TwoFloat::from(1.0 / f64::from(d));
    r + r * (TwoFloat::from(1.0) - d * r)
}

/// `integral A_n A_m phi dx = 0` for `0 <= n < m <= nmax`.
pub fn check_aw_orthogonality(nmax: usize, p: &CondDensityParams, tol: f64, policy: &TruncationPolicy) -> Result<Vec<CheckReport>> {
    let pr: Vec<(usize, usize)> = pairs(nmax).into_iter().filter(|(n, m)| n != m).collect();
    let fp = p.float();
    let qv = p.q.value();
    let est = try_integrate_vec_on_s(
        |x, out| {
            let w = phi_cond(x, p, policy)?.value;
            let a: Vec<f64> = (0..=nmax).map(|n| aw_a_sym(n, &x, &fp, &qv)).collect::<Result<_>>()?;
            for (o, (n, m)) in out.iter_mut().zip(&pr) {
                *o = a[*n] * a[*m] * w;
            }
            Ok(())
        },
        pr.len(),
        p.q,
        quad_tol(tol),
    )?;
    Ok(pr
        .iter()
        .zip(&est.values)
        .map(|((n, m), v)| {
            CheckReport::new(
                "aw_orthogonality",
                &params_of(p, &[("n", *n as f64), ("m", *m as f64)]),
                v.abs(),
                tol,
            )
        })
        .collect())
}

fn params_of<'a>(p: &CondDensityParams, extra: &[(&'a str, f64)]) -> Vec<(&'a str, f64)> {
    let mut v = vec![("q", p.q.value()), ("y", p.y), ("z", p.z), ("rho1", p.rho1), ("rho2", p.rho2)];
    v.extend_from_slice(extra);
    v
}

/// Closed form of `V_{n,m}(x,z,rho1,rho2|q) = integral A_n(x|y,rho1,z,rho2) P_m(y|x,rho1) f_CN(y|x,rho1) dy`.
pub fn vnm_closed(n: usize, m: usize, x: f64, z: f64, rho1: f64, rho2: f64, q: f64) -> Result<f64> {
    if m > n {
        return Ok(0.0);
    }
    let (r1, r2) = (rho1 * rho1, rho2 * rho2);
    let t = QTable::new(n, &q);
    let mut den = 1.0;
    for i in 0..n {
        den *= 1.0 - r1 * r2 * q.powi((n - 1 + i) as i32);
    }
    let pre = q_pochhammer(&r1, &q, n) * q_pochhammer(&r2, &q, n) / den;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let v = pre * sign * q.powu(crate::scalar::choose2(m)) * rho1.powi(m as i32) * t.factorial(n) / t.factorial(n - m)
        * asc_p(n - m, &x, &z, &rho2, &q)
        / q_pochhammer(&r2, &q, n - m);
    Ok(v)
}

/// `V_{n,m}` by quadrature in `y` against [`vnm_closed`], for `n <= nmax`
/// and `m <= n + 1` (the `m = n + 1` entries must vanish).
#[allow(clippy::too_many_arguments)]
pub fn check_vnm_family(
    nmax: usize,
    x: f64,
    z: f64,
    rho1: f64,
    rho2: f64,
    q: QParam,
    tol: f64,
    policy: &TruncationPolicy,
) -> Result<Vec<CheckReport>> {
    let idx: Vec<(usize, usize)> = (0..=nmax).flat_map(|n| (0..=n + 1).map(move |m| (n, m))).collect();
    let qv = q.value();
    let est = try_integrate_vec_on_s(
        |y, out| {
            let w = f_cn(y, x, rho1, q, policy)?.value;
            let cp = CondParams { y, rho1, z, rho2 };
            let a: Vec<f64> = (0..=nmax).map(|n| aw_a_sym(n, &x, &cp, &qv)).collect::<Result<_>>()?;
            let pm = asc_p_all(nmax + 1, &y, &x, &rho1, &qv);
            for (o, (n, m)) in out.iter_mut().zip(&idx) {
                *o = a[*n] * pm[*m] * w;
            }
            Ok(())
        },
        idx.len(),
        q,
        quad_tol(tol),
    )?;
    idx.iter()
        .zip(&est.values)
        .map(|((n, m), v)| {
            let want = vnm_closed(*n, *m, x, z, rho1, rho2, qv)?;
            Ok(CheckReport::new(
                "Vnm",
                &[("q", qv), ("x", x), ("z", z), ("rho1", rho1), ("rho2", rho2), ("n", *n as f64), ("m", *m as f64)],
                (v - want).abs(),
                tol,
            ))
        })
        .collect()
}

/// Single `V_{n,m}` check.
#[allow(clippy::too_many_arguments)]
pub fn check_vnm(n: usize, m: usize, x: f64, z: f64, rho1: f64, rho2: f64, q: QParam, tol: f64, policy: &TruncationPolicy) -> Result<CheckReport> {
    let all = check_vnm_family(n.max(m), x, z, rho1, rho2, q, tol, policy)?;
    all.into_iter()
        .find(|r| r.params["n"] == n as f64 && r.params["m"] == m as f64)
        .ok_or_else(|| Error::Config("V_{n,m} index out of range".into()))
}

/// `integral H_n(x) phi(x|p) dx = C_n` for `n <= nmax`, using the closed
/// Gaussian form at `q = 1`.
pub fn check_moments(nmax: usize, p: &CondDensityParams, tol: f64, policy: &TruncationPolicy) -> Result<Vec<CheckReport>> {
    let qv = p.q.value();
    let est = try_integrate_vec_on_s(
        |x, out| {
            let w = phi_cond(x, p, policy)?.value;
            for (o, h) in out.iter_mut().zip(q_hermite_all(nmax, &x, &qv)) {
                *o = h * w;
            }
            Ok(())
        },
        nmax + 1,
        p.q,
        quad_tol(tol),
    )?;
    let want: Vec<f64> = if p.q.is_gaussian_branch() {
        (0..=nmax).map(|n| c_n_gaussian(n, p.y, p.z, p.rho1, p.rho2)).collect()
    } else {
        c_n_main_all(nmax, &p.float(), &qv)?
    };
    Ok((0..=nmax)
        .map(|n| {
            CheckReport::new(
                "moments",
                &params_of(p, &[("n", n as f64)]),
                (est.values[n] - want[n]).abs(),
                tol,
            )
        })
        .collect())
}

/// Relative comparison with a unit floor: `|a - b| / max(1, |a|, |b|)`.
fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Degree cap for the exact `4phi3` comparison, whose rational arithmetic
/// dominates the cost of [`check_representation`].
pub const ORACLE_MAX_DEGREE: usize = 6;

/// Largest relative disagreement between the symmetric, mixed, mapped `D_n`
/// and `4phi3` evaluations of `A_n`, `n <= nmax`, at the given points. The
/// `4phi3` series is used up to [`ORACLE_MAX_DEGREE`]; at `q = 0` it is
/// replaced by the closed forms.
pub fn check_representation(nmax: usize, p: &CondDensityParams, xs: &[f64], tol: f64) -> Result<CheckReport> {
    let q = p.q.value();
    if p.q.is_gaussian_branch() {
        return Err(Error::Domain("the parameter map degenerates at q = 1".into()));
    }
    let fp = p.float();
    let m = map_params(p)?;
    let scale = (1.0 - q).sqrt() / 2.0;
    let mut worst = 0.0f64;
    for &x in xs {
        for n in 0..=nmax {
            let sym = aw_a_sym(n, &x, &fp, &q)?;
            let norm = (1.0 - q).powf(-(n as f64) / 2.0);
            worst = worst.max(rel_diff(sym, aw_a_mixed(n, &x, &fp, &q)?));
            worst = worst.max(rel_diff(sym, norm * aw_d_real(n, x * scale, &m, q)?));
            if q == 0.0 {
                worst = worst.max(rel_diff(sym, aw_a_free(n, &x, &fp)?));
                let xc = Complex64::new(x * scale, 0.0);
                let free = crate::scalar::real_part_checked(aw_d_free(n, &xc, &m)?)?;
                worst = worst.max(rel_diff(sym, norm * free));
                if n == 2 {
                    let closed = crate::scalar::real_part_checked(aw_d2_free_closed(&xc, &m))?;
                    worst = worst.max(rel_diff(sym, norm * closed));
                }
            } else if let (true, Some(ordered)) = (n <= ORACLE_MAX_DEGREE, oracle_order(&m)) {
                let o = aw_phi43_exact(n, x * scale, &ordered, q)?;
                worst = worst.max(rel_diff(sym, norm * crate::scalar::real_part_checked(o)?));
            }
        }
    }
    Ok(CheckReport::new("representation", &params_of(p, &[("nmax", nmax as f64)]), worst, tol))
}

/// The polynomials are symmetric in `(a, b, c, d)`; the `4phi3` series
/// needs a non-zero leading parameter.
fn oracle_order(m: &AwParams<Complex64>) -> Option<AwParams<Complex64>> {
    if m.a.norm() > 0.0 {
        Some(m.clone())
    } else if m.c.norm() > 0.0 {
        Some(AwParams { a: m.c, b: m.d, c: m.a, d: m.b })
    } else {
        None
    }
}

/// `q = 0` densities against their closed forms on an interior grid.
pub fn check_free_densities(p: &CondDensityParams, tol: f64, policy: &TruncationPolicy) -> Result<CheckReport> {
    if p.q.value() != 0.0 {
        return Err(Error::Domain("closed forms are for q = 0".into()));
    }
    let mut worst = 0.0f64;
    for i in 0..41 {
        let x = -2.0 + 4.0 * (i as f64 + 0.5) / 41.0;
        worst = worst.max(rel_diff(f_n(x, p.q, policy)?.value, f_n_free(x)));
        worst = worst.max(rel_diff(f_cn(x, p.y, p.rho1, p.q, policy)?.value, f_cn_free(x, p.y, p.rho1)));
        worst = worst.max(rel_diff(phi_cond(x, p, policy)?.value, phi_free(x, p.y, p.rho1, p.z, p.rho2)));
    }
    Ok(CheckReport::new("collapses/free_densities", &params_of(p, &[]), worst, tol))
}

/// Interior evaluation grid of `count` points for supremum checks.
fn interior_grid(q: QParam, count: usize) -> Vec<f64> {
    let h = if q.is_gaussian_branch() { 4.0 } else { q.support_half_width() };
    (0..count).map(|i| -h + 2.0 * h * (i as f64 + 0.5) / count as f64).collect()
}

/// Poisson-Mehler partial sums with `terms` terms against `f_CN`; residual
/// is the supremum error over a 41-point grid.
pub fn check_poisson_mehler(y: f64, rho: f64, q: QParam, terms: usize, tol: f64, policy: &TruncationPolicy) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    for x in interior_grid(q, 41) {
        let s = poisson_mehler_partial(x, y, rho, q, terms, policy)?;
        worst = worst.max((s - f_cn(x, y, rho, q, policy)?.value).abs());
    }
    Ok(CheckReport::new(
        "expansion/poisson_mehler",
        &[("q", q.value()), ("y", y), ("rho", rho), ("terms", terms as f64)],
        worst,
        tol,
    ))
}

/// Density expansion with `terms` terms against `phi`; supremum error over
/// a 41-point grid.
pub fn check_density_expansion(p: &CondDensityParams, terms: usize, tol: f64, policy: &TruncationPolicy) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    for x in interior_grid(p.q, 41) {
        let s = phi_expansion_partial(x, p, terms, policy)?;
        worst = worst.max((s - phi_cond(x, p, policy)?.value).abs());
    }
    Ok(CheckReport::new(
        "expansion/density",
        &params_of(p, &[("terms", terms as f64)]),
        worst,
        tol,
    ))
}

/// `lower <= f_CN/f_N <= upper` on a 101-point grid; the residual is the
/// largest relative violation (zero when the bounds hold).
pub fn check_ratio_bounds(y: f64, rho: f64, q: QParam, tol: f64, policy: &TruncationPolicy) -> Result<CheckReport> {
    let (lo, up) = fcn_ratio_bounds(y, rho, q, policy)?;
    let mut worst = 0.0f64;
    for x in interior_grid(q, 101) {
        let r = f_cn(x, y, rho, q, policy)?.value / f_n(x, q, policy)?.value;
        worst = worst.max((lo - r) / lo).max((r - up) / up);
    }
    Ok(CheckReport::new(
        "ratio_bounds",
        &[("q", q.value()), ("y", y), ("rho", rho), ("lower", lo), ("upper", up)],
        worst.max(0.0),
        tol,
    ))
}

/// `|H_n(x)| <= s_n(q) (1-q)^{-n/2}` on a 101-point grid over the closed
/// support and `|C_n(y,z)| <= s_n(q) (1-q)^{-n/2}` on an 11 x 11 grid, for
/// `n <= nmax`. The residual is the largest relative excess.
pub fn check_bounds(nmax: usize, rho1: f64, rho2: f64, q: QParam, tol: f64) -> Result<CheckReport> {
    if q.is_gaussian_branch() {
        return Err(Error::Domain("the bounds need |q| < 1".into()));
    }
    let qv = q.value();
    let h = q.support_half_width();
    let bound: Vec<f64> = (0..=nmax).map(|n| s_n(n, &qv) * (1.0 - qv).powf(-(n as f64) / 2.0)).collect();
    let mut worst = 0.0f64;
    for i in 0..101 {
        let x = -h + 2.0 * h * i as f64 / 100.0;
        for (n, hn) in q_hermite_all(nmax, &x, &qv).iter().enumerate() {
            worst = worst.max(hn.abs() / bound[n] - 1.0);
        }
    }
    for i in 0..11 {
        for j in 0..11 {
            let cp = CondParams {
                y: -h + 2.0 * h * i as f64 / 10.0,
                rho1,
                z: -h + 2.0 * h * j as f64 / 10.0,
                rho2,
            };
            for (n, c) in c_n_main_all(nmax, &cp, &qv)?.iter().enumerate() {
                worst = worst.max(c.abs() / bound[n] - 1.0);
            }
        }
    }
    Ok(CheckReport::new(
        "bounds",
        &[("q", qv), ("rho1", rho1), ("rho2", rho2), ("nmax", nmax as f64)],
        worst.max(0.0),
        tol,
    ))
}

/// Rational test points for the exact identity suite.
pub struct ExactGrid {
    pub q: Vec<BigRational>,
    pub x: Vec<BigRational>,
    pub params: Vec<CondParams<BigRational>>,
}

impl Default for ExactGrid {
    fn default() -> Self {
        ExactGrid {
            q: vec![rational(-1, 2), rational(0, 1), rational(3, 10), rational(7, 10), rational(1, 1)],
            x: vec![rational(-7, 5), rational(1, 3), rational(2, 1)],
            params: vec![
                CondParams { y: rational(2, 5), rho1: rational(1, 2), z: rational(-3, 5), rho2: rational(7, 10) },
                CondParams { y: rational(0, 1), rho1: rational(-1, 3), z: rational(5, 4), rho2: rational(2, 5) },
                CondParams { y: rational(-9, 10), rho1: rational(3, 5), z: rational(1, 7), rho2: rational(-4, 5) },
                CondParams { y: rational(3, 2), rho1: rational(1, 10), z: rational(-1, 2), rho2: rational(0, 1) },
                CondParams { y: rational(1, 4), rho1: rational(-7, 10), z: rational(1, 4), rho2: rational(-1, 2) },
            ],
        }
    }
}

/// Running maximum of `|residual|` for one identity.
#[derive(Default)]
struct Worst(f64);

impl Worst {
    fn add(&mut self, r: Result<BigRational>) -> Result<()> {
        self.0 = self.0.max(r?.modulus());
        Ok(())
    }
}

/// Every polynomial identity in exact rational arithmetic, one report per
/// identity and base. Tolerance is zero.
pub fn check_exact_identities(grid: &ExactGrid) -> Result<Vec<CheckReport>> {
    let scalars = [rational(1, 3), rational(-3, 4), rational(5, 2)];
    let mut out = Vec::new();
    for q in &grid.q {
        let mut w: BTreeMap<&str, Worst> = BTreeMap::new();
        for n in 0..=12 {
            for a in &scalars {
                w.entry("bracket_sum_i").or_default().add(Ok(id::bracket_sum_i(n, a, q)))?;
                for b in &scalars {
                    w.entry("bracket_sum_ii").or_default().add(Ok(id::bracket_sum_ii(n, a, b, q)))?;
                }
            }
        }
        for x in &grid.x {
            for n in 0..=10 {
                if n > 0 {
                    w.entry("connection_ii").or_default().add(Ok(id::connection_ii(n, x, q)))?;
                }
                for p in &grid.params {
                    let (y, r) = (&p.y, &p.rho1);
                    w.entry("connection_i").or_default().add(Ok(id::connection_i(n, x, y, r, q)))?;
                    w.entry("connection_iii").or_default().add(Ok(id::connection_iii(n, x, y, r, q)))?;
                }
            }
            for n in 0..=8 {
                w.entry("bh_i").or_default().add(Ok(id::bh_i(n, x, q)))?;
                for m in 0..=8 {
                    if n > 0 {
                        w.entry("bh_ii").or_default().add(Ok(id::bh_ii(n, m, x, q)))?;
                    }
                    w.entry("bh_iii").or_default().add(Ok(id::bh_iii(n, m, x, q)))?;
                    w.entry("bh_iv").or_default().add(Ok(id::bh_iv(m, n, x, q)))?;
                }
                for p in &grid.params {
                    w.entry("al_salam").or_default().add(id::al_salam(n, x, &p.y, &p.rho1, q))?;
                    w.entry("mixed_symmetry").or_default().add(id::mixed_symmetry(n, x, p, q))?;
                    w.entry("representation").or_default().add(id::representation(n, x, p, q))?;
                }
            }
        }
        for p in &grid.params {
            for n in 0..=10 {
                w.entry("moment_forms").or_default().add(id::moment_forms(n, p, q))?;
                if n <= 8 {
                    w.entry("moment_rho1_zero").or_default().add(id::moment_collapse(n, p, q))?;
                }
            }
        }
        let qf = q.to_f64().unwrap_or(f64::NAN);
        for (name, worst) in w {
            out.push(CheckReport::new(&format!("exact_identities/{name}"), &[("q", qf)], worst.0, 0.0));
        }
    }
    Ok(out)
}

/// `integral of f_N`, `f_CN` and `phi` over the support, each against one.
pub fn check_normalization(p: &CondDensityParams, tol: f64, policy: &TruncationPolicy) -> Result<CheckReport> {
    let q = p.q;
    let qt = quad_tol(tol);
    let a = integrate_on_s(|x| f_n(x, q, policy).map(|d| d.value).unwrap_or(f64::NAN), q, qt)?.value;
    let b = integrate_on_s(|x| f_cn(x, p.y, p.rho1, q, policy).map(|d| d.value).unwrap_or(f64::NAN), q, qt)?.value;
    let c = integrate_on_s(|x| phi_cond(x, p, policy).map(|d| d.value).unwrap_or(f64::NAN), q, qt)?.value;
    let worst = (a - 1.0).abs().max((b - 1.0).abs()).max((c - 1.0).abs());
    Ok(CheckReport::new("normalization", &params_of(p, &[]), worst, tol))
}

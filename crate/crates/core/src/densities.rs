//! Weight functions on `S(q) = [-2/sqrt(1-q), 2/sqrt(1-q)]`: the q-Hermite
//! weight `f_N`, the Al-Salam-Chihara weight `f_CN` (a conditional density)
//! and the Askey-Wilson conditional density `phi`.
//!
//! The infinite products are accumulated as sums of logarithms and cut at a
//! single length `K` per evaluation. Each factor differs from one by at most
//! a constant times `|q|^k` on the support, so `K` comes from
//! [`TruncationPolicy::geometric_terms`] and is reported back in
//! [`DensityEval::terms`]. Densities vanish outside the open support,
//! including at its endpoints. At `q = 1` the Gaussian limits are returned
//! with `terms = 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::awpoly::CondDensityParams;
use crate::error::{Error, Result};
use crate::qcore::{QParam, TruncationPolicy};
use crate::scalar::Scalar;

/// Closed support `S(q)`; the whole real line at `q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportInterval {
    pub lo: f64,
    pub hi: f64,
    pub unbounded: bool,
}

impl SupportInterval {
    pub fn of(q: QParam) -> Self {
        let h = q.support_half_width();
        SupportInterval {
            lo: -h,
            hi: h,
            unbounded: q.is_gaussian_branch(),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.unbounded || (self.lo..=self.hi).contains(&x)
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        x.is_finite() && (self.unbounded || (x > self.lo && x < self.hi))
    }
}

/// A density value together with the number of product factors used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEval {
    pub value: f64,
    pub terms: usize,
}

impl DensityEval {
    fn zero() -> Self {
        DensityEval { value: 0.0, terms: 0 }
    }
}

/// `w_k(x,y|rho,q) = (1 - rho^2 q^{2k})^2 - (1-q) rho q^k (1 + rho^2 q^{2k}) x y
///  + (1-q) rho^2 (x^2 + y^2) q^{2k}`.
pub fn w_k<S: Scalar>(k: usize, x: &S, y: &S, rho: &S, q: &S) -> S {
    let one = S::one();
    let r = rho.clone() * q.powu(k as u32);
    let r2 = r.clone() * r.clone();
    let omq = one.clone() - q.clone();
    let a = one.clone() - r2.clone();
    a.clone() * a - omq.clone() * r * (one + r2.clone()) * x.clone() * y.clone()
        + omq * r2 * (x.clone() * x.clone() + y.clone() * y.clone())
}

fn check_rho(rho: f64, name: &str) -> Result<()> {
    if rho.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("|{name}| = {} must be < 1", rho.abs())))
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("x = {x} must be finite")))
    }
}

fn check_interior(v: f64, name: &str, q: QParam) -> Result<()> {
    if SupportInterval::of(q).contains_interior(v) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} must lie in the open support S(q)")))
    }
}

fn gaussian(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Number of factors for a product whose `k`-th factor deviates from one by
/// at most `scale |q|^k`. The doubling absorbs `|log(1+u)| <= 2|u|`.
fn product_length(scale: f64, q: f64, policy: &TruncationPolicy, what: &str) -> Result<usize> {
    policy.geometric_terms(2.0 * scale, q.abs(), what)
}

/// `log f_N(x|q)` without the indicator, for `x` in the open support.
/// Returns the log value and the `k = 1..K-1` factor sums for reuse.
fn log_f_n(x: f64, q: f64, k_max: usize) -> f64 {
    let omq = 1.0 - q;
    let mut acc = 0.5 * omq.ln() - (2.0 * PI).ln() + 0.5 * (4.0 - omq * x * x).ln();
    let mut qk = q;
    for _ in 1..k_max {
        let f = (1.0 + qk) * (1.0 + qk) - omq * x * x * qk;
        acc += (1.0 - qk).ln() + f.ln();
        qk *= q;
    }
    acc
}

/// `sum_{k<K} [log(1 - rho^2 q^k) - log w_k(x,y|rho,q)]`, or `None` if a
/// factor is not positive (only possible at support corners).
fn log_cn_factor(x: f64, y: f64, rho: f64, q: f64, k_max: usize) -> Option<f64> {
    let mut acc = 0.0;
    let mut qk = 1.0;
    for k in 0..k_max {
        let w = w_k(k, &x, &y, &rho, &q);
        if w <= 0.0 {
            return None;
        }
        acc += (1.0 - rho * rho * qk).ln() - w.ln();
        qk *= q;
    }
    Some(acc)
}

/// q-Hermite weight `f_N(x|q)`; standard normal at `q = 1`.
pub fn f_n(x: f64, q: QParam, policy: &TruncationPolicy) -> Result<DensityEval> {
    check_x(x)?;
    if q.is_gaussian_branch() {
        return Ok(DensityEval {
            value: gaussian(x, 0.0, 1.0),
            terms: 0,
        });
    }
    if !SupportInterval::of(q).contains_interior(x) {
        return Ok(DensityEval::zero());
    }
    let qv = q.value();
    let k = product_length(7.0, qv, policy, "f_N product")?;
    Ok(DensityEval {
        value: log_f_n(x, qv, k).exp(),
        terms: k,
    })
}

/// Al-Salam-Chihara weight `f_CN(x|y,rho,q) = f_N(x|q) prod_k (1 - rho^2 q^k) / w_k(x,y|rho,q)`.
pub fn f_cn(x: f64, y: f64, rho: f64, q: QParam, policy: &TruncationPolicy) -> Result<DensityEval> {
    check_x(x)?;
    check_rho(rho, "rho")?;
    check_interior(y, "y", q)?;
    if q.is_gaussian_branch() {
        return Ok(DensityEval {
            value: gaussian(x, rho * y, 1.0 - rho * rho),
            terms: 0,
        });
    }
    if !SupportInterval::of(q).contains_interior(x) {
        return Ok(DensityEval::zero());
    }
    let qv = q.value();
    let scale = 7.0 + rho * rho + 19.0 * rho.abs();
    let k = product_length(scale, qv, policy, "f_CN product")?;
    let value = match log_cn_factor(x, y, rho, qv, k) {
        Some(l) => (log_f_n(x, qv, k) + l).exp(),
        None => 0.0,
    };
    Ok(DensityEval { value, terms: k })
}

/// Askey-Wilson conditional density
/// `phi(x|y,rho1,z,rho2,q) = f_N(x|q) (rho1^2, rho2^2)_inf / (rho1^2 rho2^2)_inf
///  prod_k w_k(y,z|rho1 rho2,q) / (w_k(x,y|rho1,q) w_k(x,z|rho2,q))`,
/// with all three products cut at one common length.
pub fn phi_cond(x: f64, p: &CondDensityParams, policy: &TruncationPolicy) -> Result<DensityEval> {
    check_x(x)?;
    p.require_interior()?;
    let (r1, r2) = (p.rho1, p.rho2);
    if p.q.is_gaussian_branch() {
        let (mean, var) = gaussian_phi_moments(p);
        return Ok(DensityEval {
            value: gaussian(x, mean, var),
            terms: 0,
        });
    }
    if !SupportInterval::of(p.q).contains_interior(x) {
        return Ok(DensityEval::zero());
    }
    let q = p.q.value();
    let scale = 7.0 + r1 * r1 + r2 * r2 + (r1 * r2).powi(2) + 19.0 * (r1.abs() + r2.abs() + (r1 * r2).abs());
    let k_max = product_length(scale, q, policy, "phi product")?;
    let r12 = r1 * r2;
    let mut acc = log_f_n(x, q, k_max);
    let mut qk = 1.0;
    for k in 0..k_max {
        let num = w_k(k, &p.y, &p.z, &r12, &q);
        let d1 = w_k(k, &x, &p.y, &r1, &q);
        let d2 = w_k(k, &x, &p.z, &r2, &q);
        if d1 <= 0.0 || d2 <= 0.0 || num <= 0.0 {
            return Ok(DensityEval { value: 0.0, terms: k_max });
        }
        acc += (1.0 - r1 * r1 * qk).ln() + (1.0 - r2 * r2 * qk).ln() - (1.0 - r12 * r12 * qk).ln();
        acc += num.ln() - d1.ln() - d2.ln();
        qk *= q;
    }
    Ok(DensityEval {
        value: acc.exp(),
        terms: k_max,
    })
}

/// Mean and variance of `phi` at `q = 1`.
pub fn gaussian_phi_moments(p: &CondDensityParams) -> (f64, f64) {
    let (a, b) = (p.rho1 * p.rho1, p.rho2 * p.rho2);
    let den = 1.0 - a * b;
    let mean = (p.y * p.rho1 * (1.0 - b) + p.z * p.rho2 * (1.0 - a)) / den;
    (mean, (1.0 - a) * (1.0 - b) / den)
}

/// `phi` through the ratio `f_CN(z|x,rho2) f_CN(x|y,rho1) / f_CN(z|y,rho1 rho2)`.
/// `x` must lie in the open support.
pub fn phi_cond_ratio(x: f64, p: &CondDensityParams, policy: &TruncationPolicy) -> Result<f64> {
    p.require_interior()?;
    check_interior(x, "x", p.q)?;
    let num = f_cn(p.z, x, p.rho2, p.q, policy)?.value * f_cn(x, p.y, p.rho1, p.q, policy)?.value;
    let den = f_cn(p.z, p.y, p.rho1 * p.rho2, p.q, policy)?.value;
    num.checked_div(den, "f_CN(z|y,rho1 rho2,q)")
}

/// Semicircle `f_N(x|0) = sqrt(4 - x^2) / (2 pi)` on `[-2, 2]`.
pub fn f_n_free(x: f64) -> f64 {
    if x.abs() < 2.0 {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    } else {
        0.0
    }
}

/// `f_CN(x|y,rho,0) = (1 - rho^2) sqrt(4 - x^2) / (2 pi w_0(x,y|rho,0))`.
pub fn f_cn_free(x: f64, y: f64, rho: f64) -> f64 {
    if x.abs() < 2.0 {
        (1.0 - rho * rho) * (4.0 - x * x).sqrt() / (2.0 * PI * w_k(0, &x, &y, &rho, &0.0))
    } else {
        0.0
    }
}

/// `phi(x|y,rho1,z,rho2,0)` in closed form.
pub fn phi_free(x: f64, y: f64, rho1: f64, z: f64, rho2: f64) -> f64 {
    if x.abs() >= 2.0 {
        return 0.0;
    }
    let num = (1.0 - rho1 * rho1) * (1.0 - rho2 * rho2) * w_k(0, &y, &z, &(rho1 * rho2), &0.0) * (4.0 - x * x).sqrt();
    let den = (1.0 - (rho1 * rho2).powi(2)) * w_k(0, &x, &y, &rho1, &0.0) * w_k(0, &x, &z, &rho2, &0.0);
    num / den / (2.0 * PI)
}

/// Bounds `C(y,rho,q) <= f_CN(x|y,rho,q) / f_N(x|q) <= (rho^2)_inf / (|rho|)_inf^4`
/// valid for every `x` in the support.
///
/// The lower constant is `(rho^2)_inf` over
/// `prod_k [(1 + rho^2 q^{2k})^2 + 2 sqrt(1-q) (1 + rho^2 q^{2k}) |y rho q^k| + (1-q) rho^2 y^2 q^{2k}]`,
/// the supremum of `w_k` over `x` in the support.
pub fn fcn_ratio_bounds(y: f64, rho: f64, q: QParam, policy: &TruncationPolicy) -> Result<(f64, f64)> {
    check_rho(rho, "rho")?;
    if q.is_gaussian_branch() {
        return Err(Error::Domain("ratio bounds need |q| < 1".into()));
    }
    if !SupportInterval::of(q).contains(y) {
        return Err(Error::Domain(format!("y = {y} lies outside the support S(q)")));
    }
    let qv = q.value();
    let omq = 1.0 - qv;
    let k_max = product_length(32.0 * rho.abs() + 4.0, qv, policy, "ratio bound products")?;
    let (mut log_low, mut log_up) = (0.0, 0.0);
    let mut qk = 1.0;
    for _ in 0..k_max {
        let r = rho * qk;
        let r2 = r * r;
        let sup_w = (1.0 + r2) * (1.0 + r2) + 2.0 * omq.sqrt() * (1.0 + r2) * (y * r).abs() + omq * r2 * y * y;
        let pair = (1.0 - rho * rho * qk).ln();
        log_low += pair - sup_w.ln();
        log_up += pair - 4.0 * (1.0 - rho.abs() * qk).ln();
        qk *= qv;
    }
    Ok((log_low.exp(), log_up.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::q_pochhammer_inf;

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn w_k_examples() {
        assert_eq!(w_k(3, &0.7, &-0.2, &0.0, &0.5), 1.0);
        assert!((w_k(0, &0.0, &0.0, &0.6, &0.3) - 0.64f64.powi(2)).abs() < 1e-15);
        assert!((w_k(1, &1.0, &1.0, &0.5, &0.5) - 0.80859375).abs() < 1e-15);
        for k in 0..6 {
            let a = w_k(k, &0.4, &-1.1, &0.7, &0.6);
            let b = w_k(0, &0.4, &-1.1, &(0.7 * 0.6f64.powi(k as i32)), &0.6);
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn f_n_examples() {
        assert_eq!(f_n(3.0, q(0.0), &pol()).unwrap().value, 0.0);
        assert!((f_n(0.0, q(0.0), &pol()).unwrap().value - 1.0 / PI).abs() < 1e-15);
        assert!((f_n(0.0, q(1.0), &pol()).unwrap().value - 0.3989422804014327).abs() < 1e-15);
        assert_eq!(f_n(2.0, q(0.0), &pol()).unwrap().value, 0.0);
        for &x in &[-1.7, -0.3, 0.0, 1.2] {
            assert!((f_n(x, q(0.0), &pol()).unwrap().value - f_n_free(x)).abs() < 1e-15);
            for &qq in &[-0.6, 0.3, 0.8] {
                let a = f_n(x, q(qq), &pol()).unwrap().value;
                let b = f_n(-x, q(qq), &pol()).unwrap().value;
                assert!((a - b).abs() < 1e-15 * a.max(1.0));
            }
        }
        assert!(f_n(f64::NAN, q(0.0), &pol()).is_err());
    }

    #[test]
    fn f_cn_examples() {
        let v = f_cn(0.0, 0.0, 0.5, q(0.0), &pol()).unwrap().value;
        assert!((v - 0.4244131815783876).abs() < 1e-12);
        let g = f_cn(0.3, -0.4, 0.6, q(1.0), &pol()).unwrap().value;
        let want = (-(0.3f64 + 0.24).powi(2) / (2.0 * 0.64)).exp() / (2.0 * PI * 0.64).sqrt();
        assert!((g - want).abs() < 1e-15);
        for &qq in &[-0.5, 0.0, 0.4, 0.9] {
            for &x in &[-1.0, 0.2, 0.9] {
                let a = f_cn(x, 0.7, 0.0, q(qq), &pol()).unwrap().value;
                let b = f_n(x, q(qq), &pol()).unwrap().value;
                assert!((a - b).abs() < 1e-14 * b);
                let c = f_cn(x, 0.7, 0.45, q(qq), &pol()).unwrap().value;
                let d = f_cn(-x, -0.7, 0.45, q(qq), &pol()).unwrap().value;
                assert!((c - d).abs() < 1e-13 * c);
            }
        }
        for &(x, y, r) in &[(0.5, -0.3, 0.4), (-1.9, 1.2, -0.7)] {
            let a = f_cn(x, y, r, q(0.0), &pol()).unwrap().value;
            assert!((a - f_cn_free(x, y, r)).abs() < 1e-12 * a.max(1.0));
        }
        assert!(f_cn(0.0, 2.0, 0.5, q(0.0), &pol()).is_err());
        assert!(f_cn(0.0, 0.0, 1.0, q(0.0), &pol()).is_err());
    }

    #[test]
    fn phi_examples() {
        let p = CondDensityParams::new(-0.3, 0.4, 0.8, 0.5, 0.0).unwrap();
        let a = phi_cond(0.5, &p, &pol()).unwrap().value;
        assert!((a - phi_free(0.5, -0.3, 0.4, 0.8, 0.5)).abs() < 1e-12);

        for &qq in &[-0.5, 0.0, 0.5, 0.9] {
            let p0 = CondDensityParams::new(0.4, 0.0, -0.6, 0.0, qq).unwrap();
            let p1 = CondDensityParams::new(0.4, 0.0, -0.6, 0.55, qq).unwrap();
            let p2 = CondDensityParams::new(0.4, 0.3, -0.6, 0.55, qq).unwrap();
            for &x in &[-1.1, 0.05, 0.8] {
                let fnx = f_n(x, p0.q, &pol()).unwrap().value;
                assert!((phi_cond(x, &p0, &pol()).unwrap().value - fnx).abs() < 1e-14 * fnx);
                let fcn = f_cn(x, -0.6, 0.55, p1.q, &pol()).unwrap().value;
                assert!((phi_cond(x, &p1, &pol()).unwrap().value - fcn).abs() < 1e-13 * fcn);
                let a = phi_cond(x, &p2, &pol()).unwrap().value;
                let b = phi_cond(x, &p2.swapped(), &pol()).unwrap().value;
                assert!((a - b).abs() < 1e-13 * a);
                let r = phi_cond_ratio(x, &p2, &pol()).unwrap();
                assert!((a - r).abs() < 1e-10 * a, "q={qq} x={x}: {a} vs {r}");
            }
        }

        let p = CondDensityParams::new(0.3, 0.4, -0.5, 0.6, 1.0).unwrap();
        let (m, v) = gaussian_phi_moments(&p);
        let want = (-(0.2 - m).powi(2) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
        assert!((phi_cond(0.2, &p, &pol()).unwrap().value - want).abs() < 1e-15);
    }

    #[test]
    fn endpoints_vanish() {
        for &qq in &[-0.5, 0.0, 0.7] {
            let h = q(qq).support_half_width();
            assert_eq!(f_n(h, q(qq), &pol()).unwrap().value, 0.0);
            assert_eq!(f_cn(-h, 0.1, 0.5, q(qq), &pol()).unwrap().value, 0.0);
            let near = f_n(h * (1.0 - 1e-9), q(qq), &pol()).unwrap().value;
            assert!(near < 1e-3);
        }
    }

    #[test]
    fn ratio_bounds() {
        assert_eq!(fcn_ratio_bounds(0.3, 0.0, q(0.5), &pol()).unwrap(), (1.0, 1.0));
        let (lo, up) = fcn_ratio_bounds(0.5, 0.6, q(0.4), &pol()).unwrap();
        assert!(lo > 0.0 && lo <= up);
        let h = q(0.4).support_half_width();
        for i in 0..101 {
            let x = -h + 2.0 * h * (i as f64 + 0.5) / 101.0;
            let r = f_cn(x, 0.5, 0.6, q(0.4), &pol()).unwrap().value / f_n(x, q(0.4), &pol()).unwrap().value;
            assert!(lo <= r * (1.0 + 1e-12) && r <= up * (1.0 + 1e-12));
        }
        let (_, up) = fcn_ratio_bounds(0.0, 0.5, q(0.5), &pol()).unwrap();
        let want = q_pochhammer_inf(0.25, q(0.5), &pol()).unwrap() / q_pochhammer_inf(0.5, q(0.5), &pol()).unwrap().powi(4);
        assert!((up - want).abs() < 1e-13 * want);
    }
}

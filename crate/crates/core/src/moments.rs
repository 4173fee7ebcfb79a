//! Conditional q-Hermite moments
//! `C_n(y,z|rho1,rho2,q) = integral of H_n(x|q) phi(x|y,rho1,z,rho2,q) dx`.
//!
//! [`c_n_main`] is the double-sum closed form and [`c_n_via_p`] an
//! independent single sum over `P_s`; the two share no intermediate
//! quantities. The expansion coefficients [`alpha_coeff`] write `C_n` in the
//! product basis `H_j(y) H_m(z)`.

use serde::{Deserialize, Serialize};

use crate::awpoly::{CondDensityParams, CondParams};
use crate::densities::f_n;
use crate::error::{Error, Result};
use crate::polyfam::{asc_p_all, q_hermite_all};
use crate::qcore::{QTable, TruncationPolicy};
use crate::scalar::{choose2, sign, Scalar};

/// `(u)_0, ..., (u)_n`.
fn poch_prefix<S: Scalar>(u: &S, q: &S, n: usize) -> Vec<S> {
    let mut out = vec![S::one()];
    let mut qi = S::one();
    for i in 0..n {
        let next = out[i].clone() * (S::one() - u.clone() * qi.clone());
        out.push(next);
        qi = qi * q.clone();
    }
    out
}

fn c_n_with_table<S: Scalar>(
    t: &QTable<S>,
    n: usize,
    p: &CondParams<S>,
    hy: &[S],
    hz: &[S],
) -> Result<S> {
    let q = t.q();
    let r1 = p.rho1.clone() * p.rho1.clone();
    let r2 = p.rho2.clone() * p.rho2.clone();
    let mut total = S::zero();
    for k in 0..=n / 2 {
        let qk = q.powu(k as u32);
        let p1 = poch_prefix(&(r1.clone() * qk.clone()), q, n - 2 * k);
        let p2 = poch_prefix(&(r2.clone() * qk.clone()), q, n - 2 * k);
        let r = n - 2 * k;
        let mut inner = S::zero();
        for j in 0..=r {
            inner = inner
                + t.binom(r as i64, j as i64)
                    * p1[j].clone()
                    * p2[r - j].clone()
                    * p.rho1.powu((r - j) as u32)
                    * p.rho2.powu(j as u32)
                    * hz[j].clone()
                    * hy[r - j].clone();
        }
        let outer = sign::<S>(k)
            * q.powu(choose2(k))
            * t.binom(n as i64, 2 * k as i64)
            * t.binom(2 * k as i64, k as i64)
            * t.factorial(k)
            * (r1.clone() * r2.clone()).powu(k as u32)
            * poch_prefix(&r1, q, k)[k].clone()
            * poch_prefix(&r2, q, k)[k].clone();
        total = total + outer * inner;
    }
    total.checked_div(poch_prefix(&(r1 * r2), q, n)[n].clone(), "(rho1^2 rho2^2)_n")
}

/// `C_n` from the double-sum closed form
/// `(1/(rho1^2 rho2^2)_n) sum_k (-1)^k q^{C(k,2)} [n 2k] [2k k] [k]! (rho1 rho2)^{2k} (rho1^2, rho2^2)_k
///  sum_j [n-2k j] (rho1^2 q^k)_j (rho2^2 q^k)_{n-2k-j} rho1^{n-2k-j} rho2^j H_j(z) H_{n-2k-j}(y)`.
pub fn c_n_main<S: Scalar>(n: usize, p: &CondParams<S>, q: &S) -> Result<S> {
    let t = QTable::new(n, q);
    let hy = q_hermite_all(n, &p.y, q);
    let hz = q_hermite_all(n, &p.z, q);
    c_n_with_table(&t, n, p, &hy, &hz)
}

/// `C_0, ..., C_nmax` from [`c_n_main`] sharing one table.
pub fn c_n_main_all<S: Scalar>(nmax: usize, p: &CondParams<S>, q: &S) -> Result<Vec<S>> {
    let t = QTable::new(nmax, q);
    let hy = q_hermite_all(nmax, &p.y, q);
    let hz = q_hermite_all(nmax, &p.z, q);
    (0..=nmax).map(|n| c_n_with_table(&t, n, p, &hy, &hz)).collect()
}

/// `C_n = sum_s [n s] rho1^{n-s} rho2^s (rho1^2)_s H_{n-s}(y) P_s(z|y,rho1 rho2) / (rho1^2 rho2^2)_s`.
pub fn c_n_via_p<S: Scalar>(n: usize, p: &CondParams<S>, q: &S) -> Result<S> {
    let t = QTable::new(n, q);
    let r1 = p.rho1.clone() * p.rho1.clone();
    let r12 = p.rho1.clone() * p.rho2.clone();
    let hy = q_hermite_all(n, &p.y, q);
    let pz = asc_p_all(n, &p.z, &p.y, &r12, q);
    let num = poch_prefix(&r1, q, n);
    let den = poch_prefix(&(r12.clone() * r12), q, n);
    let mut total = S::zero();
    for s in 0..=n {
        let term = t.binom(n as i64, s as i64)
            * p.rho1.powu((n - s) as u32)
            * p.rho2.powu(s as u32)
            * num[s].clone()
            * hy[n - s].clone()
            * pz[s].clone();
        total = total + term.checked_div(den[s].clone(), "(rho1^2 rho2^2)_s")?;
    }
    Ok(total)
}

/// Gaussian case `q = 1`: `t^n He_n(mu/t)` with
/// `t^2 = (rho1^2 + rho2^2 - 2 rho1^2 rho2^2)/(1 - rho1^2 rho2^2)` and `mu`
/// the conditional mean. Evaluated through
/// `G_{n+1} = mu G_n - n t^2 G_{n-1}`, so `rho1 = rho2 = 0` needs no special
/// case and yields `1, 0, 0, ...`.
pub fn c_n_gaussian(n: usize, y: f64, z: f64, rho1: f64, rho2: f64) -> f64 {
    let (a, b) = (rho1 * rho1, rho2 * rho2);
    let den = 1.0 - a * b;
    let t2 = (a + b - 2.0 * a * b) / den;
    let mu = (rho1 * (1.0 - b) * y + rho2 * (1.0 - a) * z) / den;
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = mu * cur - k as f64 * t2 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `C_n` for validated parameters: closed Gaussian form at `q = 1`,
/// [`c_n_main`] otherwise.
pub fn c_n(n: usize, p: &CondDensityParams) -> Result<f64> {
    if p.q.is_gaussian_branch() {
        Ok(c_n_gaussian(n, p.y, p.z, p.rho1, p.rho2))
    } else {
        c_n_main(n, &p.float(), &p.q.value())
    }
}

/// Partial sum `sum_{i<terms} rho^i / [i]_q! H_{i+m}(x|q) H_{i+k}(y|q)`.
#[allow(clippy::too_many_arguments)]
pub fn gamma_mk_partial<S: Scalar>(m: usize, k: usize, x: &S, y: &S, rho: &S, q: &S, terms: usize) -> S {
    if terms == 0 {
        return S::zero();
    }
    let top = terms - 1;
    let t = QTable::new(top, q);
    let hx = q_hermite_all(top + m, x, q);
    let hy = q_hermite_all(top + k, y, q);
    let mut acc = S::zero();
    let mut rho_i = S::one();
    for i in 0..terms {
        acc = acc + rho_i.clone() * hx[i + m].clone() * hy[i + k].clone() / t.factorial(i);
        rho_i = rho_i * rho.clone();
    }
    acc
}

/// Finite sum that equals `gamma_{m,k} / gamma_{0,0}`:
/// `sum_s (-1)^s q^{C(s,2)} [k s] rho^s H_{k-s}(y) P_{m+s}(x|y,rho) / (rho^2)_{m+s}`.
pub fn carlitz_ratio<S: Scalar>(m: usize, k: usize, x: &S, y: &S, rho: &S, q: &S) -> Result<S> {
    let t = QTable::new(k, q);
    let hy = q_hermite_all(k, y, q);
    let px = asc_p_all(m + k, x, y, rho, q);
    let poch = poch_prefix(&(rho.clone() * rho.clone()), q, m + k);
    let mut acc = S::zero();
    for s in 0..=k {
        let term = sign::<S>(s)
            * q.powu(choose2(s))
            * t.binom(k as i64, s as i64)
            * rho.powu(s as u32)
            * hy[k - s].clone()
            * px[m + s].clone();
        acc = acc + term.checked_div(poch[m + s].clone(), "(rho^2)_{m+s}")?;
    }
    Ok(acc)
}

/// `P_m(y|x,rho,q)/(rho^2)_m - sum_s (-1)^s [m s] q^{C(s,2)} rho^s H_{m-s}(y) P_s(x|y,rho,q)/(rho^2)_s`.
/// Identically zero.
pub fn alsalam_identity_residual<S: Scalar>(m: usize, x: &S, y: &S, rho: &S, q: &S) -> Result<S> {
    let t = QTable::new(m, q);
    let poch = poch_prefix(&(rho.clone() * rho.clone()), q, m);
    let lhs = asc_p_all(m, y, x, rho, q)[m].clone().checked_div(poch[m].clone(), "(rho^2)_m")?;
    let hy = q_hermite_all(m, y, q);
    let px = asc_p_all(m, x, y, rho, q);
    let mut rhs = S::zero();
    for s in 0..=m {
        let term = sign::<S>(s)
            * t.binom(m as i64, s as i64)
            * q.powu(choose2(s))
            * rho.powu(s as u32)
            * hy[m - s].clone()
            * px[s].clone();
        rhs = rhs + term.checked_div(poch[s].clone(), "(rho^2)_s")?;
    }
    Ok(lhs - rhs)
}

/// Coefficient of `H_j(y|q) H_m(z|q)` in `C_n`:
/// zero unless `n - j - m = 2k >= 0`, and otherwise
/// `(-1)^k q^{C(k,2)} [n]!/([k]! [j]! [m]!) rho1^{n-m} rho2^{n-j} (rho1^2)_{k+m} (rho2^2)_{k+j} / (rho1^2 rho2^2)_n`.
pub fn alpha_coeff<S: Scalar>(n: usize, j: usize, m: usize, rho1: &S, rho2: &S, q: &S) -> Result<S> {
    if j + m > n || (n - j - m) % 2 == 1 {
        return Ok(S::zero());
    }
    let t = QTable::new(n, q);
    alpha_with_table(&t, n, j, m, rho1, rho2)
}

fn alpha_with_table<S: Scalar>(t: &QTable<S>, n: usize, j: usize, m: usize, rho1: &S, rho2: &S) -> Result<S> {
    let q = t.q();
    let k = (n - j - m) / 2;
    let r1 = rho1.clone() * rho1.clone();
    let r2 = rho2.clone() * rho2.clone();
    let num = sign::<S>(k)
        * q.powu(choose2(k))
        * t.factorial(n)
        * rho1.powu((n - m) as u32)
        * rho2.powu((n - j) as u32)
        * poch_prefix(&r1, q, k + m)[k + m].clone()
        * poch_prefix(&r2, q, k + j)[k + j].clone();
    let den = t.factorial(k) * t.factorial(j) * t.factorial(m) * poch_prefix(&(r1 * r2), q, n)[n].clone();
    num.checked_div(den, "alpha denominator")
}

/// All `alpha_{n,j,m}` for one `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoeffs<S> {
    pub n: usize,
    /// `values[j][m]`, `j, m = 0..=n`.
    pub values: Vec<Vec<S>>,
}

impl<S: Scalar> ExpansionCoeffs<S> {
    pub fn new(n: usize, rho1: &S, rho2: &S, q: &S) -> Result<Self> {
        let t = QTable::new(n, q);
        let mut values = vec![vec![S::zero(); n + 1]; n + 1];
        for (j, row) in values.iter_mut().enumerate() {
            for (m, v) in row.iter_mut().enumerate() {
                if j + m <= n && (n - j - m) % 2 == 0 {
                    *v = alpha_with_table(&t, n, j, m, rho1, rho2)?;
                }
            }
        }
        Ok(ExpansionCoeffs { n, values })
    }

    pub fn get(&self, j: usize, m: usize) -> S {
        self.values
            .get(j)
            .and_then(|r| r.get(m))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    /// `sum_{j,m} alpha_{n,j,m} H_j(y) H_m(z)`.
    pub fn evaluate(&self, y: &S, z: &S, q: &S) -> S {
        let hy = q_hermite_all(self.n, y, q);
        let hz = q_hermite_all(self.n, z, q);
        let mut acc = S::zero();
        for (j, row) in self.values.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                acc = acc + v.clone() * hy[j].clone() * hz[m].clone();
            }
        }
        acc
    }
}

/// `f_N(x|q) sum_{i<terms} H_i(x|q) C_i(y,z) / [i]_q!`.
pub fn phi_expansion_partial(x: f64, p: &CondDensityParams, terms: usize, policy: &TruncationPolicy) -> Result<f64> {
    if p.q.is_gaussian_branch() {
        return Err(Error::Domain("the density expansion needs |q| < 1".into()));
    }
    p.require_interior()?;
    if terms == 0 {
        return Ok(0.0);
    }
    let q = p.q.value();
    let c = c_n_main_all(terms - 1, &p.float(), &q)?;
    let h = q_hermite_all(terms - 1, &x, &q);
    let t = QTable::new(terms - 1, &q);
    let sum: f64 = (0..terms).map(|i| h[i] * c[i] / t.factorial(i)).sum();
    Ok(f_n(x, p.q, policy)?.value * sum)
}

/// Poisson-Mehler partial sum `f_N(x|q) sum_{n<terms} rho^n/[n]_q! H_n(x|q) H_n(y|q)`.
pub fn poisson_mehler_partial(
    x: f64,
    y: f64,
    rho: f64,
    q: crate::qcore::QParam,
    terms: usize,
    policy: &TruncationPolicy,
) -> Result<f64> {
    if q.is_gaussian_branch() {
        return Err(Error::Domain("the Poisson-Mehler sum needs |q| < 1".into()));
    }
    let g = gamma_mk_partial(0, 0, &x, &y, &rho, &q.value(), terms);
    Ok(f_n(x, q, policy)?.value * g)
}

/// A priori number of terms after which
/// `s_i(q)^2 (1-q)^{-i} r^i / [i]_q!` drops below `rel_tol`, with
/// `r = max(|rho1|, |rho2|)`.
pub fn expansion_length(p: &CondDensityParams, policy: &TruncationPolicy) -> Result<usize> {
    if p.q.is_gaussian_branch() {
        return Err(Error::Domain("the density expansion needs |q| < 1".into()));
    }
    let q = p.q.value();
    let r = p.rho1.abs().max(p.rho2.abs());
    if r == 0.0 {
        return Ok(1);
    }
    // s_i^2 (1-q)^{-i} / [i]! = s_i^2 / (q)_i; s_i from the recurrence
    // s_{i+1} = 2 s_i + (q^i - 1) s_{i-1} of the continuous Hermite values at 1.
    let (mut s_prev, mut s_cur) = (0.0f64, 1.0f64);
    let (mut poch, mut qi, mut ri) = (1.0f64, 1.0f64, 1.0f64);
    for i in 0..policy.max_terms {
        let bound = s_cur * s_cur * ri / poch;
        if bound < policy.rel_tol {
            return Ok(i.max(1));
        }
        let next = 2.0 * s_cur - (1.0 - qi) * s_prev;
        s_prev = s_cur;
        s_cur = next;
        qi *= q;
        poch *= 1.0 - qi;
        ri *= r;
    }
    Err(Error::Truncation {
        what: "density expansion".into(),
        max_terms: policy.max_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{f_cn, phi_cond, phi_free};
    use crate::polyfam::q_hermite;
    use crate::qcore::{s_n, QParam};
    use crate::scalar::rational;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    fn cp(y: f64, r1: f64, z: f64, r2: f64) -> CondParams<f64> {
        CondParams { y, rho1: r1, z, rho2: r2 }
    }

    #[test]
    fn c_n_examples() {
        let p = cp(0.4, 0.5, -0.6, 0.7);
        assert_eq!(c_n_main(0, &p, &0.5).unwrap(), 1.0);
        let want = (0.5 * (1.0 - 0.49) * 0.4 + 0.7 * (1.0 - 0.25) * -0.6) / (1.0 - 0.25 * 0.49);
        assert!((c_n_main(1, &p, &0.5).unwrap() - want).abs() < 1e-15);
        let p0 = cp(0.4, 0.0, -0.6, 0.7);
        for n in 0..8 {
            let v = c_n_main(n, &p0, &0.3).unwrap();
            let w = 0.7f64.powi(n as i32) * q_hermite(n, &-0.6, &0.3);
            assert!((v - w).abs() < 1e-14);
        }
    }

    #[test]
    fn forms_agree_exactly() {
        let p = CondParams {
            y: rational(2, 5),
            rho1: rational(1, 2),
            z: rational(-3, 5),
            rho2: rational(7, 10),
        };
        let q = rational(1, 2);
        let all = c_n_main_all(8, &p, &q).unwrap();
        for n in 0..=8 {
            let a = c_n_main(n, &p, &q).unwrap();
            assert_eq!(a, all[n]);
            assert_eq!(a, c_n_via_p(n, &p, &q).unwrap(), "n={n}");
            assert_eq!(a, c_n_main(n, &p.swapped(), &q).unwrap());
        }
    }

    #[test]
    fn rho2_zero_collapse() {
        let p = cp(0.9, 0.6, -0.2, 0.0);
        for n in 0..8 {
            let v = c_n_via_p(n, &p, &-0.4).unwrap();
            assert!((v - 0.6f64.powi(n as i32) * q_hermite(n, &0.9, &-0.4)).abs() < 1e-13);
        }
    }

    #[test]
    fn gaussian_examples() {
        assert_eq!(c_n_gaussian(0, 0.3, 0.2, 0.1, 0.4), 1.0);
        let (y, z, r1, r2) = (0.3, -0.7, 0.5, 0.6);
        let want = r1 * (1.0 - r2 * r2) * y / (1.0 - r1 * r1 * r2 * r2) + r2 * (1.0 - r1 * r1) * z / (1.0 - r1 * r1 * r2 * r2);
        assert!((c_n_gaussian(1, y, z, r1, r2) - want).abs() < 1e-15);
        assert!((c_n_gaussian(2, 0.0, 0.0, 0.5, 0.5) + 0.4).abs() < 1e-15);
        assert_eq!(c_n_gaussian(3, 0.5, 0.5, 0.0, 0.0), 0.0);
        // agrees with the general form at q = 1 where that form is still finite
        for n in 0..7 {
            let a = c_n_gaussian(n, y, z, r1, r2);
            let b = c_n_main(n, &cp(y, r1, z, r2), &1.0).unwrap();
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn gamma_and_carlitz() {
        assert!((gamma_mk_partial(2, 3, &0.4, &-0.3, &0.0, &0.5, 10) - q_hermite(2, &0.4, &0.5) * q_hermite(3, &-0.3, &0.5)).abs() < 1e-15);
        let (x, y, rho, q) = (0.4, -0.3, 0.5, 0.5);
        let g00 = gamma_mk_partial(0, 0, &x, &y, &rho, &q, 60);
        let g12 = gamma_mk_partial(1, 2, &x, &y, &rho, &q, 60);
        let r = carlitz_ratio(1, 2, &x, &y, &rho, &q).unwrap();
        assert!((g12 / g00 - r).abs() < 1e-8);
        let g = gamma_mk_partial(0, 0, &x, &y, &rho, &q, 60);
        let qp = QParam::new(q).unwrap();
        let pol = TruncationPolicy::default();
        let lhs = f_n(x, qp, &pol).unwrap().value * g;
        assert!((lhs - f_cn(x, y, rho, qp, &pol).unwrap().value).abs() < 1e-10);
    }

    #[test]
    fn alsalam_examples() {
        assert_eq!(alsalam_identity_residual(0, &0.2, &0.5, &0.3, &0.5).unwrap(), 0.0);
        assert!(alsalam_identity_residual(1, &0.2, &0.5, &0.3, &0.5).unwrap().abs() < 1e-15);
        let r = alsalam_identity_residual(5, &rational(1, 5), &rational(1, 2), &rational(3, 10), &rational(1, 2)).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn alpha_examples() {
        let (r1, r2, q) = (rational(1, 2), rational(7, 10), rational(1, 3));
        assert!(alpha_coeff(4, 1, 2, &r1, &r2, &q).unwrap().is_zero());
        assert!(alpha_coeff(2, 2, 1, &r1, &r2, &q).unwrap().is_zero());
        let a = alpha_coeff(1, 1, 0, &r1, &r2, &q).unwrap();
        let one = BigRational::one();
        let want = r1.clone() * (one.clone() - r2.clone() * r2.clone()) / (one - r1.clone() * r1.clone() * r2.clone() * r2.clone());
        assert_eq!(a, want);
        let p = CondParams {
            y: rational(2, 5),
            rho1: r1.clone(),
            z: rational(-3, 5),
            rho2: r2.clone(),
        };
        for n in 0..=8 {
            let e = ExpansionCoeffs::new(n, &r1, &r2, &q).unwrap();
            assert_eq!(e.evaluate(&p.y, &p.z, &q), c_n_main(n, &p, &q).unwrap(), "n={n}");
        }
    }

    #[test]
    fn expansion_examples() {
        let pol = TruncationPolicy::default();
        let p0 = CondDensityParams::new(0.2, 0.0, -0.4, 0.0, 0.5).unwrap();
        for n in 1..5 {
            let v = phi_expansion_partial(0.3, &p0, n, &pol).unwrap();
            assert!((v - f_n(0.3, p0.q, &pol).unwrap().value).abs() < 1e-15);
        }
        let p = CondDensityParams::new(-0.3, 0.4, 0.8, 0.5, 0.0).unwrap();
        let v = phi_expansion_partial(0.5, &p, 40, &pol).unwrap();
        assert!((v - phi_free(0.5, -0.3, 0.4, 0.8, 0.5)).abs() < 1e-6);
        let p = CondDensityParams::new(0.5, 0.6, -0.5, 0.6, 0.3).unwrap();
        let v = phi_expansion_partial(0.1, &p, 40, &pol).unwrap();
        assert!((v - phi_cond(0.1, &p, &pol).unwrap().value).abs() < 1e-6);
        assert!(expansion_length(&p, &pol).unwrap() > 10);
    }

    #[test]
    fn moment_bound() {
        for &q in &[-0.5, 0.0, 0.5] {
            let h = 2.0 / (1.0f64 - q).sqrt();
            for n in 0..=8 {
                let bound = s_n(n, &q) * (1.0 - q).powf(-(n as f64) / 2.0);
                for i in 0..7 {
                    for j in 0..7 {
                        let (y, z) = (-h + 2.0 * h * i as f64 / 6.0, -h + 2.0 * h * j as f64 / 6.0);
                        let v = c_n_main(n, &cp(y, 0.6, z, -0.5), &q).unwrap();
                        assert!(v.abs() <= bound * (1.0 + 1e-12));
                    }
                }
            }
        }
    }
}

//! Polynomial identities as residual functions. Each returns
//! `left side - right side`, which vanishes identically; in the rational
//! fields the residual is exactly zero.

use crate::awpoly::{aw_a_mixed, aw_a_sym, CondParams};
use crate::error::Result;
use crate::moments::{alsalam_identity_residual, c_n_main, c_n_via_p};
use crate::polyfam::{
    asc_p, b_poly, bh_expand_b, connection_h_from_p, connection_p_from_bh, eval_hermite_series, i_nm, product_hb,
    q_hermite,
};
use crate::qcore::{q_pochhammer, QTable};
use crate::scalar::{choose2, sign, Scalar};

/// `sum_i [n i] a^i (a)_{n-i} - 1`.
pub fn bracket_sum_i<S: Scalar>(n: usize, a: &S, q: &S) -> S {
    let t = QTable::new(n, q);
    let s = (0..=n).fold(S::zero(), |acc, i| {
        acc + t.binom(n as i64, i as i64) * a.powu(i as u32) * q_pochhammer(a, q, n - i)
    });
    s - S::one()
}

/// `sum_i (-1)^i q^{C(i,2)} [n i] (a)_i b^i (ab q^i)_{n-i} - (b)_n`.
pub fn bracket_sum_ii<S: Scalar>(n: usize, a: &S, b: &S, q: &S) -> S {
    let t = QTable::new(n, q);
    let ab = a.clone() * b.clone();
    let s = (0..=n).fold(S::zero(), |acc, i| {
        acc + sign::<S>(i)
            * q.powu(choose2(i))
            * t.binom(n as i64, i as i64)
            * q_pochhammer(a, q, i)
            * b.powu(i as u32)
            * q_pochhammer(&(ab.clone() * q.powu(i as u32)), q, n - i)
    });
    s - q_pochhammer(b, q, n)
}

/// `P_n(x|y,rho) - sum_j [n j] rho^{n-j} B_{n-j}(y) H_j(x)`.
pub fn connection_i<S: Scalar>(n: usize, x: &S, y: &S, rho: &S, q: &S) -> S {
    asc_p(n, x, y, rho, q) - connection_p_from_bh(n, x, y, rho, q)
}

/// `sum_j [n j] B_{n-j}(x) H_j(x)`, zero for `n > 0`.
pub fn connection_ii<S: Scalar>(n: usize, x: &S, q: &S) -> S {
    i_nm(n, 0, x, q)
}

/// `H_n(x) - sum_j [n j] rho^{n-j} H_{n-j}(y) P_j(x|y,rho)`.
pub fn connection_iii<S: Scalar>(n: usize, x: &S, y: &S, rho: &S, q: &S) -> S {
    q_hermite(n, x, q) - connection_h_from_p(n, x, y, rho, q)
}

/// `B_n(x)` from its recurrence minus its expansion in the `H` basis.
pub fn bh_i<S: Scalar>(n: usize, x: &S, q: &S) -> S {
    b_poly(n, x, q) - eval_hermite_series(&bh_expand_b(n, q), x, q)
}

/// `I_{n,m} + sum_{k=1}^n [m k] [n k] [k]! I_{n-k,m-k}`, a recursion for
/// `n >= 1` (`I_{0,m} = H_m` is its base case).
pub fn bh_ii<S: Scalar>(n: usize, m: usize, x: &S, q: &S) -> S {
    let t = QTable::new(n.max(m), q);
    let mut s = i_nm(n, m, x, q);
    for k in 1..=n.min(m) {
        s = s + t.binom(m as i64, k as i64) * t.binom(n as i64, k as i64) * t.factorial(k) * i_nm(n - k, m - k, x, q);
    }
    s
}

/// `I_{n,m}` minus its closed form: `0` for `n > m`, otherwise
/// `(-1)^n q^{C(n,2)} [m]!/[m-n]! H_{m-n}(x)`.
pub fn bh_iii<S: Scalar>(n: usize, m: usize, x: &S, q: &S) -> S {
    let closed = if n > m {
        S::zero()
    } else {
        let t = QTable::new(m, q);
        sign::<S>(n) * q.powu(choose2(n)) * t.factorial(m) / t.factorial(m - n) * q_hermite(m - n, x, q)
    };
    i_nm(n, m, x, q) - closed
}

/// `H_m(x) B_n(x)` minus its expansion in the `H` basis.
pub fn bh_iv<S: Scalar>(m: usize, n: usize, x: &S, q: &S) -> S {
    q_hermite(m, x, q) * b_poly(n, x, q) - eval_hermite_series(&product_hb(m, n, q), x, q)
}

/// The Al-Salam-Chihara reversal identity.
pub fn al_salam<S: Scalar>(m: usize, x: &S, y: &S, rho: &S, q: &S) -> Result<S> {
    alsalam_identity_residual(m, x, y, rho, q)
}

/// Mixed single sum minus the same sum with `(y, rho1)` and `(z, rho2)`
/// exchanged.
pub fn mixed_symmetry<S: Scalar>(n: usize, x: &S, p: &CondParams<S>, q: &S) -> Result<S> {
    Ok(aw_a_mixed(n, x, p, q)? - aw_a_mixed(n, x, &p.swapped(), q)?)
}

/// Symmetric double sum minus the mixed single sum.
pub fn representation<S: Scalar>(n: usize, x: &S, p: &CondParams<S>, q: &S) -> Result<S> {
    Ok(aw_a_sym(n, x, p, q)? - aw_a_mixed(n, x, p, q)?)
}

/// `c_n_main - c_n_via_p`.
pub fn moment_forms<S: Scalar>(n: usize, p: &CondParams<S>, q: &S) -> Result<S> {
    Ok(c_n_main(n, p, q)? - c_n_via_p(n, p, q)?)
}

/// `C_n(y,z|0,rho2) - rho2^n H_n(z)`.
pub fn moment_collapse<S: Scalar>(n: usize, p: &CondParams<S>, q: &S) -> Result<S> {
    let p0 = CondParams {
        rho1: S::zero(),
        ..p.clone()
    };
    Ok(c_n_main(n, &p0, q)? - p.rho2.powu(n as u32) * q_hermite(n, &p.z, q))
}

//! Three-term-recurrence families (q-Hermite `h`/`H`, Al-Salam-Chihara
//! `Q`/`P`, the auxiliary `B`/`b` and Chebyshev `U`) and the identities that
//! connect them.
//!
//! Every family is evaluated by forward iteration of its recurrence from
//! `p_{-1} = 0`, `p_0 = 1`. The closed-form expansions (`B` in the `H` basis,
//! products `H_m B_n`, the connection sums) are separate functions, so that
//! each side of an identity has its own implementation.
//!
//! Floating-point recurrences are reliable up to degree [`MAX_DEGREE`];
//! beyond that cancellation starts to eat digits for `|q|` close to one. The
//! rational field has no such limit.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qcore::{q_bracket, QTable};
use crate::scalar::{choose2, real_part_checked, sign, Scalar};
use num_complex::Complex64;

/// Largest degree the CLI accepts for floating-point evaluation.
pub const MAX_DEGREE: usize = 64;

/// `p_{n+1} = (alpha_n x + beta_n) p_n - gamma_n p_{n-1}` with
/// `p_{-1} = 0`, `p_0 = 1`.
pub struct Recurrence<S, F>
where
    F: Fn(usize) -> (S, S, S),
{
    coeffs: F,
    _field: std::marker::PhantomData<S>,
}

impl<S: Scalar, F: Fn(usize) -> (S, S, S)> Recurrence<S, F> {
    pub fn new(coeffs: F) -> Self {
        Recurrence {
            coeffs,
            _field: std::marker::PhantomData,
        }
    }

    /// Values `p_0(x), ..., p_nmax(x)`.
    pub fn eval_all(&self, nmax: usize, x: &S) -> Vec<S> {
        let mut out = Vec::with_capacity(nmax + 1);
        out.push(S::one());
        let mut prev = S::zero();
        for n in 0..nmax {
            let (alpha, beta, gamma) = (self.coeffs)(n);
            let cur = out[n].clone();
            let next = (alpha * x.clone() + beta) * cur.clone() - gamma * prev;
            prev = cur;
            out.push(next);
        }
        out
    }

    pub fn eval(&self, n: usize, x: &S) -> S {
        self.eval_all(n, x).pop().expect("non-empty")
    }
}

/// Continuous q-Hermite `h_0..h_nmax`: `h_{n+1} = 2x h_n - (1-q^n) h_{n-1}`.
pub fn cont_q_hermite_all<S: Scalar>(nmax: usize, x: &S, q: &S) -> Vec<S> {
    let two = S::from_i64(2);
    Recurrence::new(|n| (two.clone(), S::zero(), S::one() - q.powu(n as u32))).eval_all(nmax, x)
}

pub fn cont_q_hermite<S: Scalar>(n: usize, x: &S, q: &S) -> S {
    cont_q_hermite_all(n, x, q).pop().expect("non-empty")
}

/// Monic q-Hermite `H_0..H_nmax`: `H_{n+1} = x H_n - [n]_q H_{n-1}`.
/// At `q = 1` these are the probabilists' Hermite polynomials.
pub fn q_hermite_all<S: Scalar>(nmax: usize, x: &S, q: &S) -> Vec<S> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(S::one());
    let mut prev = S::zero();
    let mut bracket = S::zero();
    let mut qn = S::one();
    for n in 0..nmax {
        let cur = out[n].clone();
        let next = x.clone() * cur.clone() - bracket.clone() * prev;
        prev = cur;
        out.push(next);
        bracket = bracket + qn.clone();
        qn = qn * q.clone();
    }
    out
}

pub fn q_hermite<S: Scalar>(n: usize, x: &S, q: &S) -> S {
    q_hermite_all(n, x, q).pop().expect("non-empty")
}

/// Al-Salam-Chihara `Q_n(x|a,b,q)`:
/// `Q_{n+1} = (2x - (a+b) q^n) Q_n - (1 - ab q^{n-1})(1 - q^n) Q_{n-1}`.
pub fn asc_q_all<S: Scalar>(nmax: usize, x: &S, a: &S, b: &S, q: &S) -> Vec<S> {
    let two = S::from_i64(2);
    let sum = a.clone() + b.clone();
    let prod = a.clone() * b.clone();
    Recurrence::new(|n| {
        let gamma = if n == 0 {
            S::zero()
        } else {
            (S::one() - prod.clone() * q.powu(n as u32 - 1)) * (S::one() - q.powu(n as u32))
        };
        (two.clone(), -(sum.clone() * q.powu(n as u32)), gamma)
    })
    .eval_all(nmax, x)
}

pub fn asc_q<S: Scalar>(n: usize, x: &S, a: &S, b: &S, q: &S) -> S {
    asc_q_all(n, x, a, b, q).pop().expect("non-empty")
}

/// `Q_n(x|a, conj(a), q)` at real `x`, collapsed to a real number after
/// checking the imaginary residue.
pub fn asc_q_conjugate(n: usize, x: f64, a: Complex64, q: f64) -> Result<f64> {
    let v = asc_q(n, &Complex64::new(x, 0.0), &a, &a.conj(), &Complex64::new(q, 0.0));
    real_part_checked(v)
}

/// Rescaled Al-Salam-Chihara `P_n(x|y,rho,q)`:
/// `P_{n+1} = (x - rho y q^n) P_n - (1 - rho^2 q^{n-1}) [n]_q P_{n-1}`.
pub fn asc_p_all<S: Scalar>(nmax: usize, x: &S, y: &S, rho: &S, q: &S) -> Vec<S> {
    let rho_y = rho.clone() * y.clone();
    let rho2 = rho.clone() * rho.clone();
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(S::one());
    let mut prev = S::zero();
    let mut bracket = S::zero();
    let mut qn = S::one();
    let mut qn_minus_1 = S::zero();
    for n in 0..nmax {
        let cur = out[n].clone();
        let gamma = if n == 0 {
            S::zero()
        } else {
            (S::one() - rho2.clone() * qn_minus_1.clone()) * bracket.clone()
        };
        let next = (x.clone() - rho_y.clone() * qn.clone()) * cur.clone() - gamma * prev;
        prev = cur;
        out.push(next);
        bracket = bracket + qn.clone();
        qn_minus_1 = qn.clone();
        qn = qn * q.clone();
    }
    out
}

pub fn asc_p<S: Scalar>(n: usize, x: &S, y: &S, rho: &S, q: &S) -> S {
    asc_p_all(n, x, y, rho, q).pop().expect("non-empty")
}

/// Auxiliary `B_n(y|q)`: `B_{n+1} = -q^n y B_n + q^{n-1} [n]_q B_{n-1}`.
pub fn b_poly_all<S: Scalar>(nmax: usize, y: &S, q: &S) -> Vec<S> {
    Recurrence::new(|n| {
        let gamma = if n == 0 {
            S::zero()
        } else {
            -(q.powu(n as u32 - 1) * q_bracket(n, q))
        };
        (-q.powu(n as u32), S::zero(), gamma)
    })
    .eval_all(nmax, y)
}

pub fn b_poly<S: Scalar>(n: usize, y: &S, q: &S) -> S {
    b_poly_all(n, y, q).pop().expect("non-empty")
}

/// Continuous version `b_n(y|q)`:
/// `b_{n+1} = -2 q^n y b_n + q^{n-1} (1 - q^n) b_{n-1}`.
pub fn b_poly_cont_all<S: Scalar>(nmax: usize, y: &S, q: &S) -> Vec<S> {
    let two = S::from_i64(2);
    Recurrence::new(|n| {
        let gamma = if n == 0 {
            S::zero()
        } else {
            -(q.powu(n as u32 - 1) * (S::one() - q.powu(n as u32)))
        };
        (-(two.clone() * q.powu(n as u32)), S::zero(), gamma)
    })
    .eval_all(nmax, y)
}

pub fn b_poly_cont<S: Scalar>(n: usize, y: &S, q: &S) -> S {
    b_poly_cont_all(n, y, q).pop().expect("non-empty")
}

/// Chebyshev polynomials of the second kind `U_0..U_nmax`.
pub fn chebyshev_u_all<S: Scalar>(nmax: usize, x: &S) -> Vec<S> {
    let two = S::from_i64(2);
    Recurrence::new(|_| (two.clone(), S::zero(), S::one())).eval_all(nmax, x)
}

pub fn chebyshev_u<S: Scalar>(n: usize, x: &S) -> S {
    chebyshev_u_all(n, x).pop().expect("non-empty")
}

/// Dense coefficient vector in the `H_k(x|q)` basis: entry `k` multiplies
/// `H_k`.
pub type HermiteSeries<S> = Vec<S>;

/// Evaluate `sum_k c_k H_k(x|q)`.
pub fn eval_hermite_series<S: Scalar>(coeffs: &[S], x: &S, q: &S) -> S {
    if coeffs.is_empty() {
        return S::zero();
    }
    let h = q_hermite_all(coeffs.len() - 1, x, q);
    coeffs
        .iter()
        .zip(h)
        .fold(S::zero(), |acc, (c, hk)| acc + c.clone() * hk)
}

/// Linearization `H_n H_m = sum_j c_j H_{n+m-2j}` with
/// `c_j = [m j]_q [n j]_q [j]_q!`, `j = 0..min(n, m)`.
pub fn linearize_hh<S: Scalar>(n: usize, m: usize, q: &S) -> Vec<S> {
    let t = QTable::new(n.max(m), q);
    (0..=n.min(m))
        .map(|j| t.binom(m as i64, j as i64) * t.binom(n as i64, j as i64) * t.factorial(j))
        .collect()
}

/// `B_n` in the `H` basis:
/// `B_n = (-1)^n sum_k [n k] [n-k k] [k]! q^{C(n,2) - k(n-k)} H_{n-2k}`.
///
/// For `k <= n/2` the exponent `C(n,2) - k(n-k)` is non-negative, so no
/// inverse powers of `q` appear and `q = 0` is covered.
pub fn bh_expand_b<S: Scalar>(n: usize, q: &S) -> HermiteSeries<S> {
    let t = QTable::new(n, q);
    let mut coeffs = vec![S::zero(); n + 1];
    let s: S = sign(n);
    for k in 0..=n / 2 {
        let e = choose2(n) - (k * (n - k)) as u32;
        coeffs[n - 2 * k] = s.clone()
            * t.binom(n as i64, k as i64)
            * t.binom((n - k) as i64, k as i64)
            * t.factorial(k)
            * q.powu(e);
    }
    coeffs
}

/// `H_m B_n` in the `H` basis:
/// `(-1)^n sum_i [n i] [n+m-i i] [i]! q^{C(n,2) - i(n-i)} H_{n+m-2i}`.
/// Terms with `i > n` vanish with `[n i]`. Holds for all `m, n >= 0`.
pub fn product_hb<S: Scalar>(m: usize, n: usize, q: &S) -> HermiteSeries<S> {
    let t = QTable::new(n + m, q);
    let mut coeffs = vec![S::zero(); n + m + 1];
    let s: S = sign(n);
    for i in 0..=(n + m) / 2 {
        if i > n {
            break;
        }
        let e = choose2(n - i) + choose2(i);
        coeffs[n + m - 2 * i] = s.clone()
            * t.binom(n as i64, i as i64)
            * t.binom((n + m - i) as i64, i as i64)
            * t.factorial(i)
            * q.powu(e);
    }
    coeffs
}

/// `I_{n,m}(x|q) = sum_{i=0}^n [n i]_q B_{n-i}(x|q) H_{i+m}(x|q)` by direct
/// summation.
pub fn i_nm<S: Scalar>(n: usize, m: usize, x: &S, q: &S) -> S {
    let t = QTable::new(n, q);
    let b = b_poly_all(n, x, q);
    let h = q_hermite_all(n + m, x, q);
    (0..=n).fold(S::zero(), |acc, i| {
        acc + t.binom(n as i64, i as i64) * b[n - i].clone() * h[i + m].clone()
    })
}

/// `sum_{j=0}^n [n j] rho^{n-j} B_{n-j}(y|q) H_j(x|q)`, which equals
/// `P_n(x|y,rho,q)`.
pub fn connection_p_from_bh<S: Scalar>(n: usize, x: &S, y: &S, rho: &S, q: &S) -> S {
    let t = QTable::new(n, q);
    let b = b_poly_all(n, y, q);
    let h = q_hermite_all(n, x, q);
    (0..=n).fold(S::zero(), |acc, j| {
        acc + t.binom(n as i64, j as i64) * rho.powu((n - j) as u32) * b[n - j].clone() * h[j].clone()
    })
}

/// `sum_{j=0}^n [n j] rho^{n-j} H_{n-j}(y|q) P_j(x|y,rho,q)`, which equals
/// `H_n(x|q)`.
pub fn connection_h_from_p<S: Scalar>(n: usize, x: &S, y: &S, rho: &S, q: &S) -> S {
    let t = QTable::new(n, q);
    let hy = q_hermite_all(n, y, q);
    let p = asc_p_all(n, x, y, rho, q);
    (0..=n).fold(S::zero(), |acc, j| {
        acc + t.binom(n as i64, j as i64) * rho.powu((n - j) as u32) * hy[n - j].clone() * p[j].clone()
    })
}

/// Polynomial family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// continuous q-Hermite `h_n`
    ContQHermite,
    /// monic q-Hermite `H_n`
    QHermite,
    /// Al-Salam-Chihara `Q_n`
    AscQ,
    /// rescaled Al-Salam-Chihara `P_n`
    AscP,
    /// auxiliary `B_n`
    BPoly,
    /// continuous auxiliary `b_n`
    BPolyCont,
    /// Chebyshev `U_n`
    ChebyshevU,
    /// Askey-Wilson `D_n` (leading coefficient `2^n`)
    AskeyWilsonD,
    /// Askey-Wilson `A_n` in the `(y, rho1, z, rho2)` parameterization
    AskeyWilsonA,
}

/// A polynomial value tagged with its family and degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyValue {
    pub family: Family,
    pub degree: usize,
    pub value: f64,
}

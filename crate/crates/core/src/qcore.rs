//! q-arithmetic primitives: brackets, factorials, Gaussian binomials,
//! finite and infinite q-Pochhammer symbols and the bound sequence `s_n(q)`.
//!
//! The finite operations are generic over [`Scalar`] and take the base as a
//! field element, so they also run at rational `q` and at formal bases such
//! as `q^{-1} > 1`. Range validation of the base lives in [`QParam`], which
//! the floating-point density and moment code requires.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Base `q` in `(-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QParam(f64);

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > -1.0 && q <= 1.0 {
            Ok(QParam(q))
        } else {
            Err(Error::Domain(format!("base q = {q} must satisfy -1 < q <= 1")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `true` iff `q == 1`, where all densities are Gaussian.
    pub fn is_gaussian_branch(self) -> bool {
        self.0 == 1.0
    }

    /// Half-width `2/sqrt(1-q)` of the support; infinite at `q = 1`.
    pub fn support_half_width(self) -> f64 {
        if self.is_gaussian_branch() {
            f64::INFINITY
        } else {
            2.0 / (1.0 - self.0).sqrt()
        }
    }
}

/// Stopping rule for infinite products and series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            rel_tol: 1e-14,
            max_terms: 10_000,
        }
    }
}

impl TruncationPolicy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::Domain(format!("rel_tol = {rel_tol} must be positive")));
        }
        if max_terms < 1 {
            return Err(Error::Domain("max_terms must be at least 1".into()));
        }
        Ok(TruncationPolicy { rel_tol, max_terms })
    }

    /// Number of factors `K` such that a product whose `k`-th factor differs
    /// from one by at most `scale * ratio^k` has a truncated tail with log
    /// below `rel_tol`, i.e. `scale * ratio^K / (1 - ratio) < rel_tol`.
    /// Always at least one factor.
    pub fn geometric_terms(&self, scale: f64, ratio: f64, what: &str) -> Result<usize> {
        debug_assert!((0.0..1.0).contains(&ratio));
        let mut bound = scale;
        let mut k = 0usize;
        while k == 0 || bound >= self.rel_tol * (1.0 - ratio) {
            if k >= self.max_terms {
                return Err(Error::Truncation {
                    what: what.to_string(),
                    max_terms: self.max_terms,
                });
            }
            bound *= ratio;
            k += 1;
        }
        Ok(k)
    }
}

/// `[n]_q = 1 + q + ... + q^{n-1}`, zero for `n = 0`.
pub fn q_bracket<S: Scalar>(n: usize, q: &S) -> S {
    let mut acc = S::zero();
    let mut p = S::one();
    for _ in 0..n {
        acc = acc + p.clone();
        p = p * q.clone();
    }
    acc
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial<S: Scalar>(n: usize, q: &S) -> S {
    (1..=n).fold(S::one(), |acc, i| acc * q_bracket(i, q))
}

/// Gaussian binomial; exactly zero unless `n >= k >= 0`.
///
/// Built from the q-Pascal rule `[n k] = [n-1 k-1] + q^k [n-1 k]`, which is
/// division free and therefore valid at every base.
pub fn q_binomial<S: Scalar>(n: i64, k: i64, q: &S) -> S {
    if k < 0 || n < 0 || k > n {
        return S::zero();
    }
    let (n, k) = (n as usize, k as usize);
    let k = k.min(n - k);
    let qpow: Vec<S> = (0..=k).map(|j| q.powu(j as u32)).collect();
    // row[j] holds [m j] for the current m
    let mut row = vec![S::zero(); k + 1];
    row[0] = S::one();
    for _m in 1..=n {
        for j in (1..=k).rev() {
            row[j] = row[j - 1].clone() + qpow[j].clone() * row[j].clone();
        }
    }
    row[k].clone()
}

/// `(a; q)_n`.
pub fn q_pochhammer<S: Scalar>(a: &S, q: &S, n: usize) -> S {
    let mut acc = S::one();
    let mut aq = a.clone();
    for _ in 0..n {
        acc = acc * (S::one() - aq.clone());
        aq = aq * q.clone();
    }
    acc
}

/// Length of a Pochhammer symbol: finite or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Finite(usize),
    Infinite,
}

/// Largest base magnitude accepted by [`q_pochhammer_inf`].
pub const MAX_INFINITE_PRODUCT_BASE: f64 = 0.99;

/// `(a; q)_inf` and the number of factors used.
///
/// Stops at the first `k` with `|a| |q|^k < rel_tol (1 - |q|)`, which bounds
/// the log of the discarded tail by `rel_tol`.
pub fn q_pochhammer_inf_terms(a: f64, q: QParam, policy: &TruncationPolicy) -> Result<(f64, usize)> {
    if q.is_gaussian_branch() {
        return Err(Error::Domain("(a; q)_inf is not defined at q = 1".into()));
    }
    let qv = q.value();
    if qv.abs() > MAX_INFINITE_PRODUCT_BASE {
        return Err(Error::Domain(format!(
            "|q| = {} exceeds {MAX_INFINITE_PRODUCT_BASE} for an infinite product",
            qv.abs()
        )));
    }
    if !a.is_finite() {
        return Err(Error::Domain("infinite product argument must be finite".into()));
    }
    let threshold = policy.rel_tol * (1.0 - qv.abs());
    let mut acc = 1.0;
    let mut aq = a;
    let mut k = 0usize;
    while aq.abs() >= threshold {
        if k >= policy.max_terms {
            return Err(Error::Truncation {
                what: "(a; q)_inf".into(),
                max_terms: policy.max_terms,
            });
        }
        acc *= 1.0 - aq;
        aq *= qv;
        k += 1;
    }
    Ok((acc, k))
}

pub fn q_pochhammer_inf(a: f64, q: QParam, policy: &TruncationPolicy) -> Result<f64> {
    q_pochhammer_inf_terms(a, q, policy).map(|(v, _)| v)
}

/// `(a_1, ..., a_k; q)_n` for finite or infinite `n`.
pub fn multi_pochhammer(args: &[f64], q: QParam, order: Order, policy: &TruncationPolicy) -> Result<f64> {
    if args.is_empty() {
        return Err(Error::Domain("multi_pochhammer needs at least one argument".into()));
    }
    let mut acc = 1.0;
    for a in args {
        acc *= match order {
            Order::Finite(n) => q_pochhammer(a, &q.value(), n),
            Order::Infinite => q_pochhammer_inf(*a, q, policy)?,
        };
    }
    Ok(acc)
}

/// `s_n(q) = sum_i [n i]_q`.
pub fn s_n<S: Scalar>(n: usize, q: &S) -> S {
    QTable::new(n, q).s_n(n)
}

/// Brackets, factorials and Gaussian binomials up to a fixed degree,
/// tabulated once per base.
#[derive(Debug, Clone)]
pub struct QTable<S> {
    q: S,
    brackets: Vec<S>,
    factorials: Vec<S>,
    // binomials[n][k] for 0 <= k <= n <= nmax
    binomials: Vec<Vec<S>>,
}

impl<S: Scalar> QTable<S> {
    pub fn new(nmax: usize, q: &S) -> Self {
        let brackets: Vec<S> = (0..=nmax).map(|n| q_bracket(n, q)).collect();
        let mut factorials = Vec::with_capacity(nmax + 1);
        factorials.push(S::one());
        for n in 1..=nmax {
            let next = factorials[n - 1].clone() * brackets[n].clone();
            factorials.push(next);
        }
        let qpow: Vec<S> = (0..=nmax).map(|j| q.powu(j as u32)).collect();
        let mut binomials: Vec<Vec<S>> = Vec::with_capacity(nmax + 1);
        binomials.push(vec![S::one()]);
        for n in 1..=nmax {
            let prev = &binomials[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(S::one());
            for k in 1..n {
                row.push(prev[k - 1].clone() + qpow[k].clone() * prev[k].clone());
            }
            row.push(S::one());
            binomials.push(row);
        }
        QTable {
            q: q.clone(),
            brackets,
            factorials,
            binomials,
        }
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn nmax(&self) -> usize {
        self.brackets.len() - 1
    }

    pub fn bracket(&self, n: usize) -> S {
        self.brackets[n].clone()
    }

    pub fn factorial(&self, n: usize) -> S {
        self.factorials[n].clone()
    }

    /// Zero outside `0 <= k <= n`.
    pub fn binom(&self, n: i64, k: i64) -> S {
        if n < 0 || k < 0 || k > n {
            S::zero()
        } else {
            self.binomials[n as usize][k as usize].clone()
        }
    }

    pub fn s_n(&self, n: usize) -> S {
        self.binomials[n].iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    pub fn qpow(&self, n: u32) -> S {
        self.q.powu(n)
    }
}

//! Exact arithmetic in Q and in the cyclotomic field Q(omega), where omega is a
//! primitive T-th root of unity.
//!
//! Elements of Q(omega) are stored as coordinate vectors in the power basis
//! `1, omega, ..., omega^(phi(T)-1)`; products are reduced modulo the T-th
//! cyclotomic polynomial Phi_T. Division inverts through the extended
//! polynomial gcd with Phi_T, which is valid because Phi_T is irreducible
//! over Q.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always stored reduced with a
/// positive denominator.
pub type Rational = BigRational;

/// Shorthand for small rational constants.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for small integer constants as rationals.
pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` into a rational; used by the CLI config format.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| ExactError::BadRational(s.to_string()))
}

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("cannot parse `{0}` as a rational p/q")]
    BadRational(String),
    #[error("division by zero in Q(omega)")]
    DivisionByZero,
    #[error("cyclotomic context mismatch: T={0} vs T={1}")]
    ContextMismatch(u32, u32),
    #[error("value is not rational: {0}")]
    NotRational(String),
}

/// The representative of `k mod t` in `{0, ..., t-1}`.
pub fn mod_t_bracket(k: i64, t: u32) -> u32 {
    let t = t as i64;
    (((k % t) + t) % t) as u32
}

/// Euler totient.
#[cfg(test)]
fn phi(n: u32) -> u32 {
    let mut result = n;
    let mut n = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Coefficients (low to high) of x^n - 1.
fn xn_minus_one(n: u32) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); n as usize + 1];
    c[0] = -BigInt::one();
    c[n as usize] = BigInt::one();
    c
}

/// Exact division of integer polynomials; panics if not exact (cyclotomic
/// divisions always are).
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let nd = rem.len() - 1;
    assert!(nd >= dd);
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd].clone();
        if !c.is_zero() {
            for (j, dj) in den.iter().enumerate() {
                let t = &c * dj;
                rem[k + j] -= t;
            }
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "polynomial division not exact");
    quot
}

/// The T-th cyclotomic polynomial, computed by dividing x^T - 1 by Phi_d for
/// every proper divisor d of T.
pub fn cyclotomic_polynomial(t: u32) -> Vec<BigInt> {
    assert!(t >= 1);
    if t == 1 {
        return vec![-BigInt::one(), BigInt::one()];
    }
    let mut num = xn_minus_one(t);
    for d in 1..t {
        if t % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            num = poly_div_exact(&num, &phi_d);
        }
    }
    num
}

/// Shared context for Q(omega): the order T, Phi_T, and precomputed
/// reductions of omega^k to the power basis.
pub struct CycloCtx {
    t: u32,
    degree: usize,
    phi_t: Vec<BigInt>,
    /// Row k holds the power-basis coordinates of omega^k, for
    /// k in 0..max(T, 2*degree - 1).
    pow_rows: Vec<Vec<Rational>>,
}

impl fmt::Debug for CycloCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloCtx(T={})", self.t)
    }
}

impl CycloCtx {
    pub fn new(t: u32) -> Arc<Self> {
        assert!(t >= 1, "T must be positive");
        let phi_t = cyclotomic_polynomial(t);
        let degree = phi_t.len() - 1;
        let nrows = (t as usize).max(2 * degree.max(1) - 1);
        let mut pow_rows: Vec<Vec<Rational>> = Vec::with_capacity(nrows);
        for k in 0..nrows {
            if k < degree {
                let mut row = vec![Rational::zero(); degree];
                row[k] = Rational::one();
                pow_rows.push(row);
            } else {
                // omega^k = omega * omega^(k-1), then substitute
                // omega^degree = -(phi_t[0] + ... + phi_t[degree-1] omega^(degree-1)).
                let prev = &pow_rows[k - 1];
                let mut row = vec![Rational::zero(); degree];
                let top = prev[degree - 1].clone();
                for j in (1..degree).rev() {
                    row[j] = prev[j - 1].clone();
                }
                if !top.is_zero() {
                    for j in 0..degree {
                        row[j] -= &top * Rational::from_integer(phi_t[j].clone());
                    }
                }
                pow_rows.push(row);
            }
        }
        Arc::new(CycloCtx { t, degree, phi_t, pow_rows })
    }

    pub fn order(&self) -> u32 {
        self.t
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn phi_coeffs(&self) -> &[BigInt] {
        &self.phi_t
    }
}

/// An exact element of Q(omega).
#[derive(Clone)]
pub struct Cyclo {
    ctx: Arc<CycloCtx>,
    coeffs: Vec<Rational>,
}

impl Cyclo {
    pub fn zero(ctx: &Arc<CycloCtx>) -> Self {
        Cyclo { ctx: ctx.clone(), coeffs: vec![Rational::zero(); ctx.degree] }
    }

    pub fn one(ctx: &Arc<CycloCtx>) -> Self {
        Self::from_rational(ctx, &Rational::one())
    }

    pub fn from_rational(ctx: &Arc<CycloCtx>, r: &Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); ctx.degree];
        coeffs[0] = r.clone();
        Cyclo { ctx: ctx.clone(), coeffs }
    }

    pub fn from_int(ctx: &Arc<CycloCtx>, n: i64) -> Self {
        Self::from_rational(ctx, &rint(n))
    }

    /// omega^k, with k taken mod T.
    pub fn omega_pow(ctx: &Arc<CycloCtx>, k: i64) -> Self {
        let k = mod_t_bracket(k, ctx.t) as usize;
        Cyclo { ctx: ctx.clone(), coeffs: ctx.pow_rows[k].clone() }
    }

    pub fn ctx(&self) -> &Arc<CycloCtx> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check_ctx(&self, other: &Self) {
        assert_eq!(
            self.ctx.t, other.ctx.t,
            "cyclotomic context mismatch: T={} vs T={}",
            self.ctx.t, other.ctx.t
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_ctx(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Cyclo { ctx: self.ctx.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_ctx(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Cyclo { ctx: self.ctx.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        Cyclo { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_ctx(other);
        let d = self.ctx.degree;
        let mut prod = vec![Rational::zero(); 2 * d.max(1) - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        let mut coeffs = vec![Rational::zero(); d];
        for (k, c) in prod.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &self.ctx.pow_rows[k];
            for j in 0..d {
                if !row[j].is_zero() {
                    coeffs[j] += &c * &row[j];
                }
            }
        }
        Cyclo { ctx: self.ctx.clone(), coeffs }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Cyclo { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Multiplicative inverse via extended gcd with Phi_T in the polynomial ring.
    pub fn inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let d = self.ctx.degree;
        if d == 1 {
            // Q(omega) = Q when T is 1 or 2.
            let mut coeffs = vec![Rational::zero(); 1];
            coeffs[0] = self.coeffs[0].recip();
            return Ok(Cyclo { ctx: self.ctx.clone(), coeffs });
        }
        let modulus: Vec<Rational> = self
            .ctx
            .phi_t
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        let u = poly_modinv(&self.coeffs, &modulus).ok_or(ExactError::DivisionByZero)?;
        let mut coeffs = vec![Rational::zero(); d];
        for (k, c) in u.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &self.ctx.pow_rows[k];
            for j in 0..d {
                coeffs[j] += &c * &row[j];
            }
        }
        Ok(Cyclo { ctx: self.ctx.clone(), coeffs })
    }

    pub fn div(&self, other: &Self) -> Result<Self, ExactError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Returns the rational part if the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Numeric embedding with the branch omega -> exp(2*pi*i/T).
    pub fn to_c64(&self) -> Complex64 {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.ctx.t as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * w + Complex64::new(rational_to_f64(c), 0.0);
        }
        acc
    }
}

/// Extended-gcd inverse of `a` modulo the monic polynomial `m` over Q.
/// Returns None when gcd(a, m) is not constant (cannot happen for Phi_T and
/// nonzero a, since Phi_T is irreducible).
fn poly_modinv(a: &[Rational], m: &[Rational]) -> Option<Vec<Rational>> {
    fn deg(p: &[Rational]) -> Option<usize> {
        p.iter().rposition(|c| !c.is_zero())
    }
    fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
        while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
            p.pop();
        }
        p
    }
    // Invariant: r_i = s_i * a (mod m).
    let mut r0: Vec<Rational> = trim(m.to_vec());
    let mut r1: Vec<Rational> = trim(a.to_vec());
    let mut s0: Vec<Rational> = vec![Rational::zero()];
    let mut s1: Vec<Rational> = vec![Rational::one()];
    loop {
        let d1 = deg(&r1)?;
        if d1 == 0 {
            break;
        }
        let d0 = deg(&r0)?;
        debug_assert!(d0 >= d1);
        // Full long division of r0 by r1, updating s0 by the same quotient.
        let mut rem = r0.clone();
        let mut snew = s0.clone();
        let grow = s1.len() + (d0 - d1);
        if snew.len() < grow {
            snew.resize(grow, Rational::zero());
        }
        for k in (0..=d0 - d1).rev() {
            let c = &rem[k + d1] / &r1[d1];
            if c.is_zero() {
                continue;
            }
            for j in 0..=d1 {
                let t = &c * &r1[j];
                rem[k + j] -= t;
            }
            for j in 0..s1.len() {
                let t = &c * &s1[j];
                snew[k + j] -= t;
            }
        }
        r0 = r1;
        s0 = s1;
        r1 = trim(rem);
        s1 = snew;
    }
    if r1.iter().all(|c| c.is_zero()) {
        return None;
    }
    let c = r1[0].recip();
    Some(s1.into_iter().map(|x| x * &c).collect())
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division for extreme magnitudes.
        let n = r.numer().to_f64().unwrap_or(if r.numer().is_negative() { f64::MIN } else { f64::MAX });
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.t == other.ctx.t && self.coeffs == other.coeffs
    }
}

impl Eq for Cyclo {}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{}", c)?;
            } else if k == 1 {
                write!(f, "{}*w", c)?;
            } else {
                write!(f, "{}*w^{}", c, k)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

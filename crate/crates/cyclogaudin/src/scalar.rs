//! One coefficient abstraction for the two arithmetic backends: exact
//! elements of Q(omega) for identity checking, and complex doubles for
//! Bethe-root numerics. Everything downstream (Lie elements, Verma states,
//! operators, eigenvalue formulas) is generic over this trait.

use std::sync::Arc;

use num_complex::Complex64;

use crate::exact::{Cyclo, CycloCtx, Rational};

pub trait Scalar: Clone + PartialEq + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static {
    type Ctx: Clone + Send + Sync;

    fn make_ctx(ctx: &Arc<CycloCtx>) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_rational(ctx: &Self::Ctx, r: &Rational) -> Self;
    fn from_cyclo(ctx: &Self::Ctx, c: &Cyclo) -> Self;
    /// omega^k in this backend, k taken mod T.
    fn omega_pow(ctx: &Self::Ctx, k: i64) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// None for a zero divisor.
    fn inv(&self) -> Option<Self>;
    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|i| self.mul(&i))
    }
    fn mul_rat(&self, r: &Rational) -> Self;

    fn is_zero(&self) -> bool;
    fn to_c64(&self) -> Complex64;
    /// Whether equality in this backend is exact.
    fn exact() -> bool;

    fn from_int(ctx: &Self::Ctx, n: i64) -> Self {
        Self::from_rational(ctx, &crate::exact::rint(n))
    }
}

impl Scalar for Cyclo {
    type Ctx = Arc<CycloCtx>;

    fn make_ctx(ctx: &Arc<CycloCtx>) -> Self::Ctx {
        ctx.clone()
    }
    fn zero(ctx: &Self::Ctx) -> Self {
        Cyclo::zero(ctx)
    }
    fn one(ctx: &Self::Ctx) -> Self {
        Cyclo::one(ctx)
    }
    fn from_rational(ctx: &Self::Ctx, r: &Rational) -> Self {
        Cyclo::from_rational(ctx, r)
    }
    fn from_cyclo(_ctx: &Self::Ctx, c: &Cyclo) -> Self {
        c.clone()
    }
    fn omega_pow(ctx: &Self::Ctx, k: i64) -> Self {
        Cyclo::omega_pow(ctx, k)
    }
    fn add(&self, rhs: &Self) -> Self {
        Cyclo::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Cyclo::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Cyclo::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        Cyclo::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        Cyclo::inv(self).ok()
    }
    fn mul_rat(&self, r: &Rational) -> Self {
        self.scale(r)
    }
    fn is_zero(&self) -> bool {
        Cyclo::is_zero(self)
    }
    fn to_c64(&self) -> Complex64 {
        Cyclo::to_c64(self)
    }
    fn exact() -> bool {
        true
    }
}

/// Context for the complex backend: just the order of Gamma.
#[derive(Clone, Copy, Debug)]
pub struct C64Ctx {
    pub t: u32,
}

impl Scalar for Complex64 {
    type Ctx = C64Ctx;

    fn make_ctx(ctx: &Arc<CycloCtx>) -> Self::Ctx {
        C64Ctx { t: ctx.order() }
    }
    fn zero(_: &Self::Ctx) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one(_: &Self::Ctx) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_rational(_: &Self::Ctx, r: &Rational) -> Self {
        Complex64::new(crate::exact::rational_to_f64(r), 0.0)
    }
    fn from_cyclo(_: &Self::Ctx, c: &Cyclo) -> Self {
        c.to_c64()
    }
    fn omega_pow(ctx: &Self::Ctx, k: i64) -> Self {
        let k = crate::exact::mod_t_bracket(k, ctx.t);
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / ctx.t as f64)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if self.norm_sqr() == 0.0 {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }
    fn mul_rat(&self, r: &Rational) -> Self {
        self * crate::exact::rational_to_f64(r)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn exact() -> bool {
        false
    }
}

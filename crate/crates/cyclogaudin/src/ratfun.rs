//! Gamma-equivariant rational functions valued in a coefficient space, in
//! partial-fraction (pole-orbit) form: local expansions, residues, the
//! splitting of local Laurent data into a global equivariant part plus
//! Taylor parts, and executable forms of the equivariant strong residue
//! theorem.
//!
//! A function with equivariance index k satisfies f(omega t) =
//! omega^k (omega . f)(t), vanishes at infinity, and has poles only on the
//! Gamma-orbits of its base points (and optionally at the origin).

use std::fmt::Debug;

use crate::exact::{rat, Rational};
use crate::scalar::Scalar;

/// A coefficient space carrying an action of the generator of Gamma.
pub trait GammaSpace<S: Scalar> {
    type Elem: Clone + Debug + PartialEq;
    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, s: &S) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Action of omega (applied once).
    fn act_omega(&self, a: &Self::Elem) -> Self::Elem;

    fn act_power(&self, a: &Self::Elem, p: u32) -> Self::Elem {
        let mut out = a.clone();
        for _ in 0..p {
            out = self.act_omega(&out);
        }
        out
    }
}

/// Scalars with the trivial Gamma-action.
pub struct ScalarSpace<S: Scalar> {
    pub ctx: S::Ctx,
}

impl<S: Scalar> GammaSpace<S> for ScalarSpace<S> {
    type Elem = S;
    fn zero(&self) -> S {
        S::zero(&self.ctx)
    }
    fn add(&self, a: &S, b: &S) -> S {
        a.add(b)
    }
    fn scale(&self, a: &S, s: &S) -> S {
        a.mul(s)
    }
    fn is_zero(&self, a: &S) -> bool {
        a.is_zero()
    }
    fn act_omega(&self, a: &S) -> S {
        a.clone()
    }
}

/// The adjoint space: Lie-algebra-valued coefficients with omega acting as
/// sigma.
pub struct AdjointSpace<S: Scalar> {
    pub alg: std::sync::Arc<crate::lie::LieAlgebra>,
    pub auto: std::sync::Arc<crate::autom::AutoTable>,
    pub ctx: S::Ctx,
}

impl<S: Scalar> GammaSpace<S> for AdjointSpace<S> {
    type Elem = crate::lie::LieElement<S>;
    fn zero(&self) -> Self::Elem {
        crate::lie::LieElement::zero()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.add(b)
    }
    fn scale(&self, a: &Self::Elem, s: &S) -> Self::Elem {
        a.scale(s)
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
    fn act_omega(&self, a: &Self::Elem) -> Self::Elem {
        self.auto.apply_power::<S>(&self.ctx, 1, a)
    }
}

/// Weight-space-valued coefficients (fundamental coordinates over S), with
/// omega acting as the induced weight action L_sigma.
pub struct CoweightSpace<S: Scalar> {
    pub auto: std::sync::Arc<crate::autom::AutoTable>,
    pub ctx: S::Ctx,
}

impl<S: Scalar> GammaSpace<S> for CoweightSpace<S> {
    type Elem = Vec<S>;
    fn zero(&self) -> Self::Elem {
        vec![S::zero(&self.ctx); self.auto.alg.rank]
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
    }
    fn scale(&self, a: &Self::Elem, s: &S) -> Self::Elem {
        a.iter().map(|x| x.mul(s)).collect()
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|x| x.is_zero())
    }
    fn act_omega(&self, a: &Self::Elem) -> Self::Elem {
        let mut out = vec![S::zero(&self.ctx); a.len()];
        for (i, x) in a.iter().enumerate() {
            out[self.auto.node_perm_power(i, 1)] = x.clone();
        }
        out
    }
}

/// A Gamma-equivariant rational function in partial-fraction form.
pub struct EquivFunc<S: Scalar, Sp: GammaSpace<S>> {
    pub t: u32,
    pub k: i64,
    /// (base point, pole coefficients A_n indexed by n-1).
    orbits: Vec<(S, Vec<Sp::Elem>)>,
    /// Pole coefficients at the origin (A_n of t^{-n}, n = 1, ...).
    origin: Vec<Sp::Elem>,
}

impl<S: Scalar, Sp: GammaSpace<S>> EquivFunc<S, Sp> {
    pub fn new(t: u32, k: i64) -> Self {
        EquivFunc { t, k, orbits: Vec::new(), origin: Vec::new() }
    }

    /// Adds the equivariant orbit sum
    /// sum_{j in Z_T} omega^{jk} (sigma^j A) / (omega^{-j} t - x)^n,
    /// whose expansion at the base point x has pole part A/(t-x)^n.
    pub fn add_orbit(&mut self, space: &Sp, coeff: Sp::Elem, x: S, n: usize) {
        assert!(n >= 1);
        if !x.is_zero() {
            for (base, coeffs) in self.orbits.iter_mut() {
                if base.sub(&x).is_zero() {
                    if coeffs.len() < n {
                        coeffs.resize(n, space.zero());
                    }
                    coeffs[n - 1] = space.add(&coeffs[n - 1], &coeff);
                    return;
                }
            }
            let mut coeffs = vec![space.zero(); n];
            coeffs[n - 1] = coeff;
            self.orbits.push((x, coeffs));
        } else {
            if self.origin.len() < n {
                self.origin.resize(n, space.zero());
            }
            self.origin[n - 1] = space.add(&self.origin[n - 1], &coeff);
        }
    }

    /// All concrete poles of the completed function: (point, coefficients)
    /// with the orbit phases folded in. The base orbit contributes the
    /// stored coefficients; the image at omega^j x carries
    /// omega^{j(k+n)} sigma^j A_n.
    fn concrete_poles(&self, ctx: &S::Ctx, space: &Sp) -> Vec<(S, Vec<Sp::Elem>)> {
        let mut out = Vec::new();
        for (base, coeffs) in &self.orbits {
            for j in 0..self.t {
                let point = S::omega_pow(ctx, j as i64).mul(base);
                let cs: Vec<Sp::Elem> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let n = (i + 1) as i64;
                        let phase = S::omega_pow(ctx, j as i64 * (self.k + n));
                        space.scale(&space.act_power(a, j), &phase)
                    })
                    .collect();
                out.push((point, cs));
            }
        }
        if !self.origin.is_empty() {
            // All Gamma-images coincide; the sum over j applies the
            // character projector times T.
            let cs: Vec<Sp::Elem> = self
                .origin
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let n = (i + 1) as i64;
                    let mut acc = space.zero();
                    for j in 0..self.t {
                        let phase = S::omega_pow(ctx, j as i64 * (self.k + n));
                        acc = space.add(&acc, &space.scale(&space.act_power(a, j), &phase));
                    }
                    acc
                })
                .collect();
            out.push((S::zero(ctx), cs));
        }
        out
    }

    /// Point evaluation.
    pub fn eval(&self, ctx: &S::Ctx, space: &Sp, t: &S) -> Sp::Elem {
        let mut acc = space.zero();
        for (point, coeffs) in self.concrete_poles(ctx, space) {
            let diff = t.sub(&point);
            let inv = diff.inv().expect("evaluation point collides with a pole");
            let mut pw = S::one(ctx);
            for a in coeffs.iter() {
                pw = pw.mul(&inv);
                if !space.is_zero(a) {
                    acc = space.add(&acc, &space.scale(a, &pw));
                }
            }
        }
        acc
    }

    /// Laurent coefficients of (t - x)^j for j from the local pole order up
    /// to `upto`, inclusive.
    pub fn expand_at(&self, ctx: &S::Ctx, space: &Sp, x: &S, upto: i64) -> Vec<(i64, Sp::Elem)> {
        let mut coeffs: std::collections::BTreeMap<i64, Sp::Elem> = std::collections::BTreeMap::new();
        let mut addc = |j: i64, v: Sp::Elem, space: &Sp| {
            let cur = coeffs.entry(j).or_insert_with(|| space.zero());
            *cur = space.add(cur, &v);
        };
        for (point, cs) in self.concrete_poles(ctx, space) {
            let diff = x.sub(&point);
            if diff.is_zero() {
                // Singular part at x itself.
                for (i, a) in cs.iter().enumerate() {
                    let n = (i + 1) as i64;
                    if !space.is_zero(a) {
                        addc(-n, a.clone(), space);
                    }
                }
            } else {
                // Taylor part: 1/(t-y)^n = sum_p (-1)^p C(n+p-1, p)
                //   (x-y)^{-n-p} (t-x)^p.
                let inv = diff.inv().unwrap();
                for (i, a) in cs.iter().enumerate() {
                    if space.is_zero(a) {
                        continue;
                    }
                    let n = (i + 1) as i64;
                    let mut base_pow = S::one(ctx);
                    for _ in 0..n {
                        base_pow = base_pow.mul(&inv);
                    }
                    for p in 0..=upto.max(0) {
                        let sign = if p % 2 == 0 { 1 } else { -1 };
                        let binom = binomial(n + p - 1, p);
                        let c = base_pow.mul_rat(&(binom * rat(sign, 1)));
                        addc(p, space.scale(a, &c), space);
                        base_pow = base_pow.mul(&inv);
                    }
                }
            }
        }
        coeffs.into_iter().filter(|(j, _)| *j <= upto).collect()
    }

    pub fn residue_at(&self, ctx: &S::Ctx, space: &Sp, x: &S) -> Sp::Elem {
        for (j, c) in self.expand_at(ctx, space, x, -1) {
            if j == -1 {
                return c;
            }
        }
        space.zero()
    }
}

fn binomial(n: i64, k: i64) -> Rational {
    let mut acc = Rational::from_integer(1.into());
    for i in 0..k {
        acc *= rat(n - i, 1);
        acc /= rat(i + 1, 1);
    }
    acc
}

/// Builds sum_{j in Z_T} omega^{jk} (sigma^j A) / (omega^{-j} t - x)^n.
pub fn gamma_orbit_sum<S: Scalar, Sp: GammaSpace<S>>(
    t: u32,
    k: i64,
    space: &Sp,
    coeff: Sp::Elem,
    x: S,
    n: usize,
) -> EquivFunc<S, Sp> {
    let mut f = EquivFunc::new(t, k);
    f.add_orbit(space, coeff, x, n);
    f
}

/// Local Laurent data at one point: finitely many (order, coefficient)
/// entries; negative orders are pole terms.
pub type LaurentData<E> = Vec<(i64, E)>;

/// The unique splitting of a tuple of local Laurent data into a global
/// equivariant function (index k) plus per-point Taylor data.
pub fn split_global<S: Scalar, Sp: GammaSpace<S>>(
    ctx: &S::Ctx,
    space: &Sp,
    t: u32,
    k: i64,
    tuple: &[(S, LaurentData<Sp::Elem>)],
) -> (EquivFunc<S, Sp>, Vec<LaurentData<Sp::Elem>>) {
    let mut global = EquivFunc::new(t, k);
    for (x, data) in tuple {
        for (j, c) in data {
            if *j < 0 {
                global.add_orbit(space, c.clone(), x.clone(), (-j) as usize);
            }
        }
    }
    let mut taylors = Vec::new();
    for (x, data) in tuple {
        let max_order = data.iter().map(|(j, _)| *j).max().unwrap_or(0).max(0);
        let expansion = global.expand_at(ctx, space, x, max_order);
        let mut taylor: LaurentData<Sp::Elem> = Vec::new();
        for j in 0..=max_order {
            let given = data
                .iter()
                .find(|(jj, _)| *jj == j)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(|| space.zero());
            let from_global = expansion
                .iter()
                .find(|(jj, _)| *jj == j)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(|| space.zero());
            let diff = space.add(&given, &space.scale(&from_global, &S::from_rational(ctx, &rat(-1, 1))));
            if !space.is_zero(&diff) {
                taylor.push((j, diff));
            }
        }
        taylors.push(taylor);
    }
    (global, taylors)
}

/// The residue pairing of the equivariant strong residue theorem:
/// sum_i res_{t-x_i} <f_i, iota_{t-x_i} g>   (+ origin term /T if supplied).
/// The tuple globalizes into an index-k function iff this vanishes for every
/// g of index -k-1.
pub fn residue_pairing<S, A, B, P>(
    ctx: &S::Ctx,
    space_b: &B,
    tuple: &[(S, LaurentData<A::Elem>)],
    origin: Option<&LaurentData<A::Elem>>,
    g: &EquivFunc<S, B>,
    pair: P,
) -> S
where
    S: Scalar,
    A: GammaSpace<S>,
    B: GammaSpace<S>,
    P: Fn(&A::Elem, &B::Elem) -> S,
{
    let mut total = S::zero(ctx);
    for (x, data) in tuple {
        let min_order = data.iter().map(|(j, _)| *j).min().unwrap_or(0);
        let expansion = g.expand_at(ctx, space_b, x, -1 - min_order);
        for (j, fc) in data {
            let want = -1 - j;
            for (gj, gc) in &expansion {
                if *gj == want {
                    total = total.add(&pair(fc, gc));
                }
            }
        }
    }
    if let Some(data) = origin {
        let zero = S::zero(ctx);
        let min_order = data.iter().map(|(j, _)| *j).min().unwrap_or(0);
        let expansion = g.expand_at(ctx, space_b, &zero, -1 - min_order);
        let tinv = rat(1, g.t as i64);
        for (j, fc) in data {
            let want = -1 - j;
            for (gj, gc) in &expansion {
                if *gj == want {
                    total = total.add(&pair(fc, gc).mul_rat(&tinv));
                }
            }
        }
    }
    total
}

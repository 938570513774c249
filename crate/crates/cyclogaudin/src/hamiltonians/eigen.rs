//! The master weight lambda(t) attached to a Bethe configuration, and the
//! eigenvalue formulas it generates: the scalar function
//! (1/2)<lambda(u), lambda(u)> - <lambda'(u), rho>, its Laurent data at the
//! site poles, the per-site eigenvalues E_i, and the evaluation
//! homomorphism on products of Cartan modes.

use crate::exact::{Rational, rint};
use crate::lie::Weight;
use crate::scalar::Scalar;

use super::model::Model;

/// lambda(t) = sum_{r in Z_T} ( sum_i L_sigma^r lambda_i / (t - omega^r z_i)
///   - sum_j L_sigma^r alpha_{c(j)} / (t - omega^r w_j) ) + lambda_0 / t,
/// stored as its simple-pole list.
pub struct MasterWeight<S: Scalar> {
    /// (pole point, rational weight coefficient).
    pub poles: Vec<(S, Weight)>,
    rank: usize,
}

/// Builds lambda(t) for the model, a color tuple (Dynkin nodes), and Bethe
/// roots.
pub fn master_weight<S: Scalar>(model: &Model<S>, colors: &[usize], roots: &[S]) -> MasterWeight<S> {
    assert_eq!(colors.len(), roots.len());
    let alg = &model.alg;
    let mut poles = Vec::new();
    for r in 0..model.t {
        let omega_r = model.omega(r as i64);
        for (i, z) in model.sites.iter().enumerate() {
            poles.push((omega_r.mul(z), model.auto.l_sigma(&model.weights[i], r)));
        }
        for (j, w) in roots.iter().enumerate() {
            let alpha = alg.root_weight(alg.simple_root_index(colors[j]));
            poles.push((omega_r.mul(w), model.auto.l_sigma(&alpha, r).scale(&rint(-1))));
        }
    }
    if !model.auto.lambda0.is_zero() {
        poles.push((S::zero(&model.sctx), model.auto.lambda0.clone()));
    }
    MasterWeight { poles, rank: alg.rank }
}

impl<S: Scalar> MasterWeight<S> {
    /// lambda(t) as fundamental-weight coordinates over S.
    pub fn eval(&self, ctx: &S::Ctx, t: &S) -> Vec<S> {
        self.eval_deriv(ctx, t, 0)
    }

    /// The m-th derivative lambda^(m)(t), termwise:
    /// d^m/dt^m 1/(t-p) = (-1)^m m! / (t-p)^{m+1}.
    pub fn eval_deriv(&self, ctx: &S::Ctx, t: &S, m: u32) -> Vec<S> {
        let mut out = vec![S::zero(ctx); self.rank];
        let mut fact = rint(1);
        for q in 1..=m as i64 {
            fact *= rint(q);
        }
        if m % 2 == 1 {
            fact = -fact;
        }
        for (p, w) in &self.poles {
            let inv = t.sub(p).inv().expect("evaluation at a pole of lambda(t)");
            let mut pw = inv.clone();
            for _ in 0..m {
                pw = pw.mul(&inv);
            }
            let c = pw.mul_rat(&fact);
            for (k, wf) in w.fund.iter().enumerate() {
                if !wf.is_zero() {
                    out[k] = out[k].add(&c.mul_rat(wf));
                }
            }
        }
        out
    }

    /// lambda(t)(H_s) for a simple coroot (fundamental coordinate s), with
    /// the (1/(n-1)!) d^{n-1}/dt^{n-1} prefactor of the evaluation map.
    pub fn eval_mode(&self, ctx: &S::Ctx, t: &S, node: usize, n: u32) -> S {
        assert!(n >= 1);
        let d = self.eval_deriv(ctx, t, n - 1);
        let mut fact = rint(1);
        for q in 1..n as i64 {
            fact *= rint(q);
        }
        d[node].mul_rat(&(rint(1) / fact))
    }

    /// The residue of lambda(t) at a pole point, summed over coincident
    /// poles (exact backends only see exact coincidences).
    pub fn residue_at(&self, ctx: &S::Ctx, p: &S) -> Vec<S> {
        let mut out = vec![S::zero(ctx); self.rank];
        for (q, w) in &self.poles {
            if p.sub(q).is_zero() {
                for (k, wf) in w.fund.iter().enumerate() {
                    out[k] = out[k].add(&S::from_rational(ctx, wf));
                }
            }
        }
        out
    }
}

/// Inner product of two S-coefficient weights through the rational Gram
/// matrix of the fundamental weights.
fn ip_s<S: Scalar>(model: &Model<S>, a: &[S], b: &[S]) -> S {
    let ctx = &model.sctx;
    let g = &model.alg.ip_fund;
    let mut s = S::zero(ctx);
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() && !g[i][j].is_zero() {
                s = s.add(&ai.mul(bj).mul_rat(&g[i][j]));
            }
        }
    }
    s
}

/// The eigenvalue of S(u):
/// (1/2) <lambda(u), lambda(u)> - <lambda'(u), rho>.
pub fn eigenvalue_s<S: Scalar>(model: &Model<S>, mw: &MasterWeight<S>, u: &S) -> S {
    let ctx = &model.sctx;
    let lam = mw.eval(ctx, u);
    let dlam = mw.eval_deriv(ctx, u, 1);
    let rho: Vec<S> = model.alg.rho().fund.iter().map(|c| S::from_rational(ctx, c)).collect();
    let half = S::from_rational(ctx, &crate::exact::rat(1, 2));
    ip_s(model, &lam, &lam).mul(&half).sub(&ip_s(model, &dlam, &rho))
}

/// Laurent data of the eigenvalue of S(u) at one of its pole points:
/// (coefficient of (u - p)^{-2}, residue). With lambda(u) = sum c_P/(u-P),
/// the double-pole coefficient at P is <c_P, c_P>/2 + <c_P, rho> and the
/// residue is sum_{Q != P} <c_P, c_Q>/(P - Q).
pub fn eigenvalue_s_pole<S: Scalar>(model: &Model<S>, mw: &MasterWeight<S>, p: &S) -> (S, S) {
    let ctx = &model.sctx;
    let alg = &model.alg;
    // Gather the (merged) coefficient at p.
    let mut c_p = Weight::zero(alg.rank);
    for (q, w) in &mw.poles {
        if p.sub(q).is_zero() {
            c_p = c_p.add(w);
        }
    }
    let rho = alg.rho();
    let double = alg.ip(&c_p, &c_p) / rint(2) + alg.ip(&c_p, &rho);
    let mut residue = S::zero(ctx);
    for (q, w) in &mw.poles {
        let diff = p.sub(q);
        if diff.is_zero() {
            continue;
        }
        let c = alg.ip(&c_p, w);
        if !c.is_zero() {
            residue = residue.add(&diff.inv().unwrap().mul_rat(&c));
        }
    }
    (S::from_rational(ctx, &double), residue)
}

/// E_i = sum_{j != i} sum_s <lambda_i, L_sigma^s lambda_j>/(z_i - omega^s z_j)
///     - sum_j sum_s <lambda_i, L_sigma^s alpha_{c(j)}>/(z_i - omega^s w_j)
///     + (1/z_i)(<lambda_i, lambda_0> + (1/2) sum_{s>=1} <lambda_i, L_sigma^s lambda_i>).
pub fn eigenvalue_e_i<S: Scalar>(
    model: &Model<S>,
    colors: &[usize],
    roots: &[S],
    i: usize,
) -> S {
    let ctx = &model.sctx;
    let alg = &model.alg;
    let lam_i = &model.weights[i];
    let mut e = S::zero(ctx);
    for s in 0..model.t {
        for (j, z) in model.sites.iter().enumerate() {
            if j == i {
                continue;
            }
            let c = alg.ip(lam_i, &model.auto.l_sigma(&model.weights[j], s));
            if !c.is_zero() {
                let denom = model.sites[i].sub(&model.omega(s as i64).mul(z));
                e = e.add(&denom.inv().unwrap().mul_rat(&c));
            }
        }
        for (j, w) in roots.iter().enumerate() {
            let alpha = alg.root_weight(alg.simple_root_index(colors[j]));
            let c = alg.ip(lam_i, &model.auto.l_sigma(&alpha, s));
            if !c.is_zero() {
                let denom = model.sites[i].sub(&model.omega(s as i64).mul(w));
                e = e.sub(&denom.inv().expect("root orbit hits a site").mul_rat(&c));
            }
        }
    }
    let mut bracket = alg.ip(lam_i, &model.auto.lambda0);
    let mut self_sum = Rational::zero();
    for s in 1..model.t {
        self_sum += alg.ip(lam_i, &model.auto.l_sigma(lam_i, s));
    }
    bracket += self_sum / rint(2);
    if !bracket.is_zero() {
        e = e.add(&model.sites[i].inv().unwrap().mul_rat(&bracket));
    }
    e
}

use num_traits::Zero;

/// The evaluation homomorphism on a product of Cartan modes:
/// r_Gamma(b_{s_1}[-n_1] ... b_{s_M}[-n_M])
///   = prod_k (1/(n_k - 1)!) (d/du)^{n_k - 1} lambda(u)(H_{s_k}).
/// `monomial` lists (Dynkin node, n_k >= 1); the empty product is 1.
pub fn r_gamma_eval<S: Scalar>(
    model: &Model<S>,
    mw: &MasterWeight<S>,
    monomial: &[(usize, u32)],
    u: &S,
) -> S {
    let ctx = &model.sctx;
    let mut acc = S::one(ctx);
    for (node, n) in monomial {
        acc = acc.mul(&mw.eval_mode(ctx, u, *node, *n));
    }
    acc
}

//! Operators on tensor products: sparse sums of per-site words of Lie
//! elements, applicable to exact Verma tensor states or emitted as dense
//! matrices on tensor products of irreps.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::autom::AutoTable;
use crate::lie::{LieAlgebra, LieElement};
use crate::repn::{iota_elem, Irrep, TensorState};
use crate::scalar::Scalar;

/// A sum of terms coeff * prod_{site} (word at site); within a word, letters
/// act right to left (`word = [a, b]` is the product a b, i.e. b first).
#[derive(Clone, Debug)]
pub struct TensorOperator<S: Scalar> {
    pub sites: usize,
    terms: Vec<(S, BTreeMap<usize, Vec<LieElement<S>>>)>,
}

impl<S: Scalar> TensorOperator<S> {
    pub fn zero(sites: usize) -> Self {
        TensorOperator { sites, terms: Vec::new() }
    }

    pub fn identity(ctx: &S::Ctx, sites: usize) -> Self {
        TensorOperator { sites, terms: vec![(S::one(ctx), BTreeMap::new())] }
    }

    pub fn add_term(&mut self, coeff: S, words: BTreeMap<usize, Vec<LieElement<S>>>) {
        if coeff.is_zero() {
            return;
        }
        debug_assert!(words.keys().all(|&s| s < self.sites));
        self.terms.push((coeff, words));
    }

    /// Single-site, single-letter convenience term.
    pub fn add_site_letter(&mut self, coeff: S, site: usize, x: LieElement<S>) {
        let mut m = BTreeMap::new();
        m.insert(site, vec![x]);
        self.add_term(coeff, m);
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.sites, other.sites);
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(self.sites);
        }
        TensorOperator {
            sites: self.sites,
            terms: self.terms.iter().map(|(c, w)| (c.mul(s), w.clone())).collect(),
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Applies the operator to an exact tensor state.
    pub fn apply(&self, alg: &LieAlgebra, ctx: &S::Ctx, ts: &TensorState<S>) -> TensorState<S> {
        let mut out = TensorState::zero(ts.hws.clone());
        for (coeff, words) in &self.terms {
            let mut cur = ts.scale(coeff);
            for (&site, word) in words {
                for letter in word.iter().rev() {
                    cur = cur.act_site(alg, ctx, letter, site);
                    if cur.is_zero() {
                        break;
                    }
                }
                if cur.is_zero() {
                    break;
                }
            }
            out = out.add(&cur);
        }
        out
    }

    /// Dense matrix on the tensor product of irreps (row-major; index =
    /// sum_s i_s * prod_{s' > s} dim_{s'}).
    pub fn matrix(&self, ctx: &S::Ctx, irreps: &[Arc<Irrep>]) -> Vec<Vec<S>> {
        assert_eq!(irreps.len(), self.sites);
        let dims: Vec<usize> = irreps.iter().map(|i| i.dim).collect();
        let total: usize = dims.iter().product();
        let mut out = vec![vec![S::zero(ctx); total]; total];
        for (coeff, words) in &self.terms {
            // Per-site matrices (identity when the site is untouched).
            let site_mats: Vec<Option<Vec<Vec<S>>>> = (0..self.sites)
                .map(|s| {
                    words.get(&s).map(|word| {
                        let mut m: Option<Vec<Vec<S>>> = None;
                        for letter in word {
                            let lm = irreps[s].matrix_of::<S>(ctx, letter);
                            m = Some(match m {
                                None => lm,
                                Some(prev) => mat_mul_s(ctx, &prev, &lm),
                            });
                        }
                        m.unwrap_or_else(|| identity_s(ctx, dims[s]))
                    })
                })
                .collect();
            // Accumulate the Kronecker product.
            let mut rows_cols: Vec<(usize, usize, S)> = vec![(0, 0, coeff.clone())];
            for s in 0..self.sites {
                let d = dims[s];
                let mut next = Vec::new();
                match &site_mats[s] {
                    None => {
                        for (r, c, v) in &rows_cols {
                            for i in 0..d {
                                next.push((r * d + i, c * d + i, v.clone()));
                            }
                        }
                    }
                    Some(m) => {
                        for (r, c, v) in &rows_cols {
                            for i in 0..d {
                                for j in 0..d {
                                    if !m[i][j].is_zero() {
                                        next.push((r * d + i, c * d + j, v.mul(&m[i][j])));
                                    }
                                }
                            }
                        }
                    }
                }
                rows_cols = next;
            }
            for (r, c, v) in rows_cols {
                out[r][c] = out[r][c].add(&v);
            }
        }
        out
    }

    /// Cartan anti-involution, applied factorwise: every site word is
    /// reversed and each letter maps E <-> F, H fixed.
    pub fn iota(&self) -> Self {
        TensorOperator {
            sites: self.sites,
            terms: self
                .terms
                .iter()
                .map(|(c, words)| {
                    let w2: BTreeMap<usize, Vec<LieElement<S>>> = words
                        .iter()
                        .map(|(&s, word)| {
                            (s, word.iter().rev().map(iota_elem).collect::<Vec<_>>())
                        })
                        .collect();
                    (c.clone(), w2)
                })
                .collect(),
        }
    }

    /// sigma^p applied to every letter (the diagonal extension of sigma to
    /// the tensor product of enveloping algebras).
    pub fn sigma_power(&self, ctx: &S::Ctx, auto: &AutoTable, p: u32) -> Self {
        TensorOperator {
            sites: self.sites,
            terms: self
                .terms
                .iter()
                .map(|(c, words)| {
                    let w2: BTreeMap<usize, Vec<LieElement<S>>> = words
                        .iter()
                        .map(|(&s, word)| {
                            (
                                s,
                                word.iter()
                                    .map(|x| auto.apply_power::<S>(ctx, p, x))
                                    .collect::<Vec<_>>(),
                            )
                        })
                        .collect();
                    (c.clone(), w2)
                })
                .collect(),
        }
    }
}

pub(crate) fn mat_mul_s<S: Scalar>(ctx: &S::Ctx, a: &[Vec<S>], b: &[Vec<S>]) -> Vec<Vec<S>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![S::zero(ctx); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] = out[i][j].add(&a[i][l].mul(&b[l][j]));
                }
            }
        }
    }
    out
}

pub(crate) fn identity_s<S: Scalar>(ctx: &S::Ctx, n: usize) -> Vec<Vec<S>> {
    let mut m = vec![vec![S::zero(ctx); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = S::one(ctx);
    }
    m
}

pub(crate) fn mat_sub_s<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> Vec<Vec<S>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
        .collect()
}

pub(crate) fn mat_is_zero_s<S: Scalar>(a: &[Vec<S>]) -> bool {
    a.iter().all(|row| row.iter().all(|c| c.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{Cyclo, CycloCtx};
    use crate::lie::{Gen, LieAlgebra, Series, Weight};
    use crate::repn::build_irrep;

    #[test]
    fn apply_and_matrix_agree_on_projected_states() {
        let alg = LieAlgebra::build(Series::A, 2).unwrap();
        let ctx = CycloCtx::new(1);
        let hw = Weight::fundamental(2, 0);
        let ir = build_irrep(&alg, &hw, 200).unwrap();
        let irreps = vec![ir.clone(), ir.clone()];
        // Operator: 3 * F_0^{(0)} E_0^{(0)} + H_1^{(1)}
        let mut op = TensorOperator::<Cyclo>::zero(2);
        let mut w = BTreeMap::new();
        w.insert(
            0usize,
            vec![
                LieElement::gen(Gen::F(0), Cyclo::one(&ctx)),
                LieElement::gen(Gen::E(0), Cyclo::one(&ctx)),
            ],
        );
        op.add_term(Cyclo::from_int(&ctx, 3), w);
        op.add_site_letter(Cyclo::one(&ctx), 1, LieElement::gen(Gen::H(1), Cyclo::one(&ctx)));

        let state = {
            let s = crate::repn::TensorState::<Cyclo>::highest(&ctx, vec![hw.clone(), hw.clone()]);
            // lower once at each site to land somewhere generic
            let f = LieElement::gen(Gen::F(0), Cyclo::one(&ctx));
            s.act_site(&alg, &ctx, &f, 0).act_site(&alg, &ctx, &f, 1)
        };
        let acted = op.apply(&alg, &ctx, &state);
        let lhs = crate::repn::project_to_irrep::<Cyclo>(&ctx, &acted, &irreps);
        let rhs_vec = crate::repn::project_to_irrep::<Cyclo>(&ctx, &state, &irreps);
        let m = op.matrix(&ctx, &irreps);
        let mut rhs = vec![Cyclo::zero(&ctx); lhs.len()];
        for (i, row) in m.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() && !rhs_vec[j].is_zero() {
                    rhs[i] = rhs[i].add(&c.mul(&rhs_vec[j]));
                }
            }
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn iota_involution_on_operators() {
        let ctx = CycloCtx::new(1);
        let mut op = TensorOperator::<Cyclo>::zero(1);
        let mut w = BTreeMap::new();
        w.insert(
            0usize,
            vec![
                LieElement::gen(Gen::E(1), Cyclo::one(&ctx)),
                LieElement::gen(Gen::F(0), Cyclo::from_int(&ctx, 2)),
            ],
        );
        op.add_term(Cyclo::from_int(&ctx, 5), w);
        let twice = op.iota().iota();
        assert_eq!(format!("{:?}", twice.terms), format!("{:?}", op.terms));
    }
}

//! Verma-module machinery: exact sparse vectors in a PBW monomial basis,
//! the g-action by straightening, finite-dimensional irreducible quotients
//! through the contravariant (Shapovalov) pairing, and tensor products.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;

use crate::exact::{Cyclo, CycloCtx, Rational};
use crate::lie::{Gen, LieAlgebra, LieElement, LieError, Weight};
use crate::linalg;
use crate::scalar::Scalar;

/// A PBW monomial F_{b1} F_{b2} ... applied to a highest-weight vector,
/// with positive-root indices stored non-increasing in the canonical root
/// order (height, then lexicographic).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct PbwMonomial(pub Vec<usize>);

impl PbwMonomial {
    pub fn unit() -> Self {
        PbwMonomial(Vec::new())
    }

    pub fn depth_coords(&self, alg: &LieAlgebra) -> Vec<i64> {
        let mut c = vec![0i64; alg.rank];
        for &b in &self.0 {
            for (i, &m) in alg.pos_roots[b].coords.iter().enumerate() {
                c[i] += m;
            }
        }
        c
    }
}

/// Exact sparse vector in a Verma module M_lambda.
#[derive(Clone, PartialEq, Debug)]
pub struct VermaState<S: Scalar> {
    pub hw: Weight,
    terms: BTreeMap<PbwMonomial, S>,
}

impl<S: Scalar> VermaState<S> {
    pub fn zero(hw: Weight) -> Self {
        VermaState { hw, terms: BTreeMap::new() }
    }

    pub fn highest(ctx: &S::Ctx, hw: Weight) -> Self {
        let mut s = Self::zero(hw);
        s.add_term(PbwMonomial::unit(), S::one(ctx));
        s
    }

    pub fn add_term(&mut self, m: PbwMonomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.hw.clone());
        if s.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(s));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PbwMonomial, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &PbwMonomial) -> Option<&S> {
        self.terms.get(m)
    }
}

/// The weight of a monomial inside M_lambda: lambda minus the root sum.
fn monomial_weight(alg: &LieAlgebra, hw: &Weight, mono: &[usize]) -> Weight {
    let mut w = hw.clone();
    for &b in mono {
        w = w.sub(&alg.root_weight(b));
    }
    w
}

/// Memo for repeated generator applications with a fixed highest weight.
pub type ActCache<S> = HashMap<(Gen, PbwMonomial), VermaState<S>>;

/// Action of a single basis generator on a single canonical monomial.
/// The result is a canonically ordered sparse state. Straightening revisits
/// the same (generator, monomial) pairs constantly, so results are memoized.
fn act_gen_mono<S: Scalar>(
    alg: &LieAlgebra,
    ctx: &S::Ctx,
    g: Gen,
    mono: &[usize],
    hw: &Weight,
    cache: &mut ActCache<S>,
) -> VermaState<S> {
    let key = (g, PbwMonomial(mono.to_vec()));
    if let Some(hit) = cache.get(&key) {
        return hit.clone();
    }
    let mut out = VermaState::zero(hw.clone());
    match g {
        Gen::H(i) => {
            let mu = monomial_weight(alg, hw, mono);
            let c = mu.fund[i].clone();
            if !c.is_zero() {
                out.add_term(PbwMonomial(mono.to_vec()), S::from_rational(ctx, &c));
            }
        }
        Gen::F(b) => {
            if mono.is_empty() || b >= mono[0] {
                let mut v = Vec::with_capacity(mono.len() + 1);
                v.push(b);
                v.extend_from_slice(mono);
                out.add_term(PbwMonomial(v), S::one(ctx));
            } else {
                // F_b F_head rest = F_head (F_b rest) + [F_b, F_head] rest
                let head = mono[0];
                let rest = &mono[1..];
                let inner = act_gen_mono::<S>(alg, ctx, Gen::F(b), rest, hw, cache);
                for (m, c) in inner.iter() {
                    let lifted = act_gen_mono::<S>(alg, ctx, Gen::F(head), &m.0, hw, cache);
                    for (m2, c2) in lifted.iter() {
                        out.add_term(m2.clone(), c.mul(c2));
                    }
                }
                for (bg, bc) in alg.bracket_gens(Gen::F(b), Gen::F(head)) {
                    let br = act_gen_mono::<S>(alg, ctx, *bg, rest, hw, cache);
                    for (m2, c2) in br.iter() {
                        out.add_term(m2.clone(), c2.mul_rat(bc));
                    }
                }
            }
        }
        Gen::E(a) => {
            if mono.is_empty() {
                // highest-weight condition
            } else {
                // E_a F_head rest = F_head (E_a rest) + [E_a, F_head] rest
                let head = mono[0];
                let rest = &mono[1..];
                let inner = act_gen_mono::<S>(alg, ctx, Gen::E(a), rest, hw, cache);
                for (m, c) in inner.iter() {
                    let lifted = act_gen_mono::<S>(alg, ctx, Gen::F(head), &m.0, hw, cache);
                    for (m2, c2) in lifted.iter() {
                        out.add_term(m2.clone(), c.mul(c2));
                    }
                }
                for (bg, bc) in alg.bracket_gens(Gen::E(a), Gen::F(head)) {
                    let br = act_gen_mono::<S>(alg, ctx, *bg, rest, hw, cache);
                    for (m2, c2) in br.iter() {
                        out.add_term(m2.clone(), c2.mul_rat(bc));
                    }
                }
            }
        }
    }
    cache.insert(key, out.clone());
    out
}

/// Exact g-action on a Verma state, linear in both arguments.
pub fn verma_act<S: Scalar>(
    alg: &LieAlgebra,
    ctx: &S::Ctx,
    x: &LieElement<S>,
    s: &VermaState<S>,
) -> VermaState<S> {
    let mut cache = ActCache::new();
    verma_act_cached(alg, ctx, x, s, &mut cache)
}

/// Same, with a caller-owned memo; the cache is only valid for one fixed
/// highest weight.
pub fn verma_act_cached<S: Scalar>(
    alg: &LieAlgebra,
    ctx: &S::Ctx,
    x: &LieElement<S>,
    s: &VermaState<S>,
    cache: &mut ActCache<S>,
) -> VermaState<S> {
    let mut out = VermaState::zero(s.hw.clone());
    for (g, xc) in x.iter() {
        for (m, c) in s.iter() {
            let acted = act_gen_mono::<S>(alg, ctx, *g, &m.0, &s.hw, cache);
            for (m2, c2) in acted.iter() {
                out.add_term(m2.clone(), xc.mul(c).mul(c2));
            }
        }
    }
    out
}

pub fn verma_act_gen<S: Scalar>(
    alg: &LieAlgebra,
    ctx: &S::Ctx,
    g: Gen,
    s: &VermaState<S>,
) -> VermaState<S> {
    let mut cache = ActCache::new();
    verma_act_gen_cached(alg, ctx, g, s, &mut cache)
}

pub fn verma_act_gen_cached<S: Scalar>(
    alg: &LieAlgebra,
    ctx: &S::Ctx,
    g: Gen,
    s: &VermaState<S>,
    cache: &mut ActCache<S>,
) -> VermaState<S> {
    let mut out = VermaState::zero(s.hw.clone());
    for (m, c) in s.iter() {
        let acted = act_gen_mono::<S>(alg, ctx, g, &m.0, &s.hw, cache);
        for (m2, c2) in acted.iter() {
            out.add_term(m2.clone(), c.mul(c2));
        }
    }
    out
}

/// The Cartan anti-involution on a word of Lie elements: reverses the word
/// and maps E_alpha <-> F_alpha, H_i -> H_i in each letter.
pub fn cartan_antiinvolution<S: Scalar>(word: &[LieElement<S>]) -> Vec<LieElement<S>> {
    word.iter().rev().map(iota_elem).collect()
}

pub fn iota_gen(g: Gen) -> Gen {
    match g {
        Gen::E(x) => Gen::F(x),
        Gen::F(x) => Gen::E(x),
        Gen::H(i) => Gen::H(i),
    }
}

pub fn iota_elem<S: Scalar>(x: &LieElement<S>) -> LieElement<S> {
    let mut out = LieElement::zero();
    for (g, c) in x.iter() {
        out.add_term(iota_gen(*g), c.clone());
    }
    out
}

// ---------------------------------------------------------------------
// Finite-dimensional irreducible quotients
// ---------------------------------------------------------------------

/// Internal exact scalar used for representation matrices.
type Q = Cyclo;

fn qctx() -> Arc<CycloCtx> {
    CycloCtx::new(1)
}


/// One weight space of the quotient construction.
struct QuotientSpace {
    monomials: Vec<PbwMonomial>,
    /// Indices (into `monomials`) of the chosen quotient basis.
    chosen: Vec<usize>,
    /// Reduction matrix R (dim x n_monomials): quotient coordinates of each
    /// monomial, R = P^{-1} G[chosen, :].
    reduce: linalg::RMat,
    /// Gram of the full monomial set (used to certify radical membership).
    gram: linalg::RMat,
    /// Gram restricted to the chosen basis (the induced contravariant form).
    gram_chosen: linalg::RMat,
    /// Offset of this weight space in the global basis.
    offset: usize,
}

/// A finite-dimensional irreducible highest-weight module, with exact
/// rational generator matrices.
pub struct Irrep {
    pub alg: Arc<LieAlgebra>,
    pub hw: Weight,
    pub dim: usize,
    /// Weight (as depth coordinates) and weight of each basis vector.
    pub basis_weights: Vec<Weight>,
    spaces: HashMap<Vec<i64>, QuotientSpace>,
    /// Dense generator matrices, row-major, mats[g][row][col].
    mats: HashMap<Gen, linalg::RMat>,
}

impl std::fmt::Debug for Irrep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Irrep(dim={})", self.dim)
    }
}

/// All canonical monomials with the given depth (multiset of positive roots
/// summing to `depth` in simple-root coordinates).
fn monomials_at_depth(alg: &LieAlgebra, depth: &[i64]) -> Vec<PbwMonomial> {
    let mut out = Vec::new();
    let nroots = alg.num_pos_roots();
    // Choose roots from the top of the order downwards so each monomial is
    // generated once, already sorted non-increasing.
    fn rec(
        alg: &LieAlgebra,
        root: usize,
        remaining: &mut Vec<i64>,
        stack: &mut Vec<usize>,
        out: &mut Vec<PbwMonomial>,
    ) {
        if remaining.iter().all(|&c| c == 0) {
            out.push(PbwMonomial(stack.clone()));
            return;
        }
        if root == usize::MAX {
            return;
        }
        // Try taking `root` (possibly repeatedly) or moving on.
        let coords = alg.pos_roots[root].coords.clone();
        if coords.iter().zip(remaining.iter()).all(|(a, b)| b >= a) {
            for (r, c) in remaining.iter_mut().zip(&coords) {
                *r -= c;
            }
            stack.push(root);
            rec(alg, root, remaining, stack, out);
            stack.pop();
            for (r, c) in remaining.iter_mut().zip(&coords) {
                *r += c;
            }
        }
        if root > 0 {
            rec(alg, root - 1, remaining, stack, out);
        }
    }
    let mut rem = depth.to_vec();
    if rem.iter().any(|&c| c < 0) {
        return out;
    }
    rec(alg, nroots - 1, &mut rem, &mut Vec::new(), &mut out);
    out
}

/// Contravariant (Shapovalov-type) pairing of two monomials at equal depth:
/// the coefficient of the highest-weight vector in iota(F_m) F_m' v.
fn shap_pair(
    alg: &LieAlgebra,
    ctx: &Arc<CycloCtx>,
    hw: &Weight,
    m1: &PbwMonomial,
    m2: &PbwMonomial,
    cache: &mut ActCache<Q>,
) -> Rational {
    let mut state = VermaState::<Q>::zero(hw.clone());
    state.add_term(m2.clone(), Cyclo::one(ctx));
    // iota(F_{b1}...F_{bk}) = E_{bk}...E_{b1}; rightmost acts first.
    for &b in m1.0.iter() {
        state = verma_act_gen_cached::<Q>(alg, ctx, Gen::E(b), &state, cache);
        if state.is_zero() {
            return Rational::zero();
        }
    }
    state
        .coeff(&PbwMonomial::unit())
        .and_then(|c| c.as_rational())
        .unwrap_or_else(Rational::zero)
}

/// Builds the irreducible quotient L_lambda of M_lambda with exact rational
/// generator matrices; `cap` bounds the Weyl dimension.
pub fn build_irrep(alg: &Arc<LieAlgebra>, hw: &Weight, cap: usize) -> Result<Arc<Irrep>, LieError> {
    if !hw.is_dominant_integral() {
        return Err(LieError::NotDominantIntegral);
    }
    let dim_pred = alg.weyl_dim(hw);
    let dim_pred: usize = dim_pred
        .to_integer()
        .try_into()
        .map_err(|_| LieError::DimensionCap(usize::MAX, cap))?;
    if dim_pred > cap {
        return Err(LieError::DimensionCap(dim_pred, cap));
    }
    let ctx = qctx();
    let mut cache: ActCache<Q> = ActCache::new();

    // BFS over weight spaces from the highest weight downwards.
    let mut spaces: HashMap<Vec<i64>, QuotientSpace> = HashMap::new();
    let mut visited: HashMap<Vec<i64>, usize> = HashMap::new(); // depth -> quotient dim
    let mut frontier: Vec<Vec<i64>> = vec![vec![0; alg.rank]];
    let mut order: Vec<Vec<i64>> = Vec::new(); // deterministic basis order
    visited.insert(vec![0; alg.rank], usize::MAX); // mark queued
    let mut offset = 0usize;
    while let Some(depth) = frontier.pop() {
        let monomials = monomials_at_depth(alg, &depth);
        if monomials.is_empty() {
            visited.insert(depth, 0);
            continue;
        }
        let nm = monomials.len();
        let mut gram = vec![vec![Rational::zero(); nm]; nm];
        for i in 0..nm {
            for j in i..nm {
                let v = shap_pair(alg, &ctx, hw, &monomials[i], &monomials[j], &mut cache);
                gram[i][j] = v.clone();
                gram[j][i] = v;
            }
        }
        let mut echelon = gram.clone();
        let chosen = linalg::rref(&mut echelon);
        let dim = chosen.len();
        visited.insert(depth.clone(), dim);
        if dim == 0 {
            // Keep the gram so radical certification still works for states
            // that land here.
            spaces.insert(
                depth.clone(),
                QuotientSpace {
                    monomials,
                    chosen,
                    reduce: vec![],
                    gram,
                    gram_chosen: vec![],
                    offset: usize::MAX,
                },
            );
            continue;
        }
        // P = G[chosen, chosen] is invertible (principal minor at a maximal
        // independent column set of a symmetric matrix).
        let p: linalg::RMat = chosen
            .iter()
            .map(|&i| chosen.iter().map(|&j| gram[i][j].clone()).collect())
            .collect();
        let p_inv = linalg::invert(&p).expect("principal Gram minor must be invertible");
        let g_rows: linalg::RMat = chosen
            .iter()
            .map(|&i| gram[i].clone())
            .collect();
        let reduce = linalg::mat_mul(&p_inv, &g_rows);
        spaces.insert(
            depth.clone(),
            QuotientSpace {
                monomials,
                chosen,
                reduce,
                gram,
                gram_chosen: p,
                offset,
            },
        );
        order.push(depth.clone());
        offset += dim;
        // Expand downwards.
        for i in 0..alg.rank {
            let mut next = depth.clone();
            let simple = alg.root_index(&{
                let mut c = vec![0i64; alg.rank];
                c[i] = 1;
                c
            });
            let _ = simple;
            next[i] += 1;
            if !visited.contains_key(&next) {
                visited.insert(next.clone(), usize::MAX);
                frontier.push(next);
            }
        }
    }
    let dim = offset;
    if dim != dim_pred {
        panic!(
            "irrep dimension mismatch: built {dim}, Weyl formula {dim_pred} for {:?}",
            hw
        );
    }

    // Deterministic global ordering: sort weight spaces by (height, coords).
    order.sort_by_key(|d| (d.iter().sum::<i64>(), d.clone()));
    let mut offset = 0usize;
    let mut basis_weights = Vec::with_capacity(dim);
    for depth in &order {
        let sp = spaces.get_mut(depth).unwrap();
        sp.offset = offset;
        offset += sp.chosen.len();
        let mu = {
            let mut w = hw.clone();
            for (i, &c) in depth.iter().enumerate() {
                if c != 0 {
                    let simple = alg.root_weight(
                        alg.root_index(&{
                            let mut v = vec![0i64; alg.rank];
                            v[i] = 1;
                            v
                        })
                        .unwrap(),
                    );
                    w = w.sub(&simple.scale(&Rational::from_integer(c.into())));
                }
            }
            w
        };
        for _ in 0..sp.chosen.len() {
            basis_weights.push(mu.clone());
        }
    }

    let mut irrep = Irrep {
        alg: alg.clone(),
        hw: hw.clone(),
        dim,
        basis_weights,
        spaces,
        mats: HashMap::new(),
    };

    // Generator matrices.
    for g in alg.all_gens() {
        let mut mat = vec![vec![Rational::zero(); dim]; dim];
        for depth in &order {
            let sp = &irrep.spaces[depth];
            for (local, &ci) in sp.chosen.iter().enumerate() {
                let col = sp.offset + local;
                let mono = sp.monomials[ci].clone();
                let mut state = VermaState::<Q>::zero(hw.clone());
                state.add_term(mono, Cyclo::one(&ctx));
                let acted = verma_act_gen_cached::<Q>(alg, &ctx, g, &state, &mut cache);
                for (row, c) in irrep.reduce_state(&acted) {
                    mat[row][col] = c;
                }
            }
        }
        irrep.mats.insert(g, mat);
    }
    Ok(Arc::new(irrep))
}

impl Irrep {
    /// Quotient coordinates (global index, coefficient) of a weight-
    /// homogeneous exact Verma state; certifies that unreduced content lies
    /// in the radical.
    fn reduce_state(&self, s: &VermaState<Q>) -> Vec<(usize, Rational)> {
        let alg = &self.alg;
        // Group terms by depth.
        let mut by_depth: HashMap<Vec<i64>, Vec<(PbwMonomial, Rational)>> = HashMap::new();
        for (m, c) in s.iter() {
            let d = m.depth_coords(alg);
            by_depth
                .entry(d)
                .or_default()
                .push((m.clone(), c.as_rational().expect("exact rational state")));
        }
        let mut out = Vec::new();
        for (depth, terms) in by_depth {
            let Some(sp) = self.spaces.get(&depth) else {
                // Not a weight of the irrep: the state must be radical.
                // (Unvisited depths only occur below the weight polytope,
                // where the quotient is zero.)
                continue;
            };
            let mut x = vec![Rational::zero(); sp.monomials.len()];
            for (m, c) in terms {
                let idx = sp
                    .monomials
                    .iter()
                    .position(|mm| *mm == m)
                    .expect("monomial enumerated at its depth");
                x[idx] = c;
            }
            if sp.chosen.is_empty() {
                debug_assert!(linalg::mat_vec(&sp.gram, &x).iter().all(|v| v.is_zero()));
                continue;
            }
            let coords = linalg::mat_vec(&sp.reduce, &x);
            for (local, c) in coords.into_iter().enumerate() {
                if !c.is_zero() {
                    out.push((sp.offset + local, c));
                }
            }
        }
        out
    }

    /// Quotient coordinates of a single Verma monomial.
    pub fn reduce_monomial(&self, m: &PbwMonomial) -> Vec<(usize, Rational)> {
        let ctx = qctx();
        let mut s = VermaState::<Q>::zero(self.hw.clone());
        s.add_term(m.clone(), Cyclo::one(&ctx));
        self.reduce_state(&s)
    }

    pub fn matrix(&self, g: Gen) -> &linalg::RMat {
        &self.mats[&g]
    }

    /// Matrix of a sparse Lie element over any scalar backend.
    pub fn matrix_of<S: Scalar>(&self, ctx: &S::Ctx, x: &LieElement<S>) -> Vec<Vec<S>> {
        let mut m = vec![vec![S::zero(ctx); self.dim]; self.dim];
        for (g, c) in x.iter() {
            let base = self.matrix(*g);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    if !base[i][j].is_zero() {
                        m[i][j] = m[i][j].add(&c.mul_rat(&base[i][j]));
                    }
                }
            }
        }
        m
    }

    /// The induced contravariant form on the chosen basis of one weight
    /// space (for contravariance tests).
    pub fn contravariant_gram(&self, depth: &[i64]) -> Option<&linalg::RMat> {
        self.spaces.get(depth).map(|sp| &sp.gram_chosen)
    }
}

// ---------------------------------------------------------------------
// Tensor products
// ---------------------------------------------------------------------

/// Exact sparse vector in a tensor product of Verma modules.
#[derive(Clone, PartialEq, Debug)]
pub struct TensorState<S: Scalar> {
    pub hws: Vec<Weight>,
    terms: BTreeMap<Vec<PbwMonomial>, S>,
}

impl<S: Scalar> TensorState<S> {
    pub fn zero(hws: Vec<Weight>) -> Self {
        TensorState { hws, terms: BTreeMap::new() }
    }

    /// The vacuum v_{lambda_1} (x) ... (x) v_{lambda_N}.
    pub fn highest(ctx: &S::Ctx, hws: Vec<Weight>) -> Self {
        let n = hws.len();
        let mut s = Self::zero(hws);
        s.add_term(vec![PbwMonomial::unit(); n], S::one(ctx));
        s
    }

    pub fn sites(&self) -> usize {
        self.hws.len()
    }

    pub fn add_term(&mut self, m: Vec<PbwMonomial>, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.hws.clone());
        if s.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(s));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<PbwMonomial>, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// l2 norm of the coefficient vector in the numeric embedding.
    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_c64().norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies x on tensor factor `site` only.
    pub fn act_site(&self, alg: &LieAlgebra, ctx: &S::Ctx, x: &LieElement<S>, site: usize) -> Self {
        assert!(site < self.sites(), "site out of range");
        let mut out = Self::zero(self.hws.clone());
        for (m, c) in &self.terms {
            let mut verma = VermaState::<S>::zero(self.hws[site].clone());
            verma.add_term(m[site].clone(), S::one(ctx));
            let acted = verma_act::<S>(alg, ctx, x, &verma);
            for (vm, vc) in acted.iter() {
                let mut key = m.clone();
                key[site] = vm.clone();
                out.add_term(key, c.mul(vc));
            }
        }
        out
    }

    /// Tensor product of per-site Verma states.
    pub fn from_factors(ctx: &S::Ctx, factors: &[VermaState<S>]) -> Self {
        let hws: Vec<Weight> = factors.iter().map(|f| f.hw.clone()).collect();
        let mut out = Self::zero(hws);
        let mut acc: Vec<(Vec<PbwMonomial>, S)> = vec![(Vec::new(), S::one(ctx))];
        for f in factors {
            let mut next = Vec::new();
            for (prefix, c) in &acc {
                for (m, fc) in f.iter() {
                    let mut key = prefix.clone();
                    key.push(m.clone());
                    next.push((key, c.mul(fc)));
                }
            }
            acc = next;
        }
        for (key, c) in acc {
            out.add_term(key, c);
        }
        out
    }

    /// Largest coefficient magnitude of the difference with another state.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let d = self.sub(other);
        d.terms.values().map(|c| c.to_c64().norm()).fold(0.0, f64::max)
    }
}

/// Image of a Verma tensor state under the canonical quotients
/// M_{lambda_i} ->> L_{lambda_i}, as a dense coefficient vector on the
/// tensor-product basis (row-major over sites).
pub fn project_to_irrep<S: Scalar>(
    ctx: &S::Ctx,
    ts: &TensorState<S>,
    irreps: &[Arc<Irrep>],
) -> Vec<S> {
    assert_eq!(ts.sites(), irreps.len());
    let total: usize = irreps.iter().map(|i| i.dim).product();
    let mut out = vec![S::zero(ctx); total];
    for (monos, c) in ts.iter() {
        // Per-site quotient coordinates.
        let site_coords: Vec<Vec<(usize, Rational)>> = monos
            .iter()
            .zip(irreps)
            .map(|(m, ir)| ir.reduce_monomial(m))
            .collect();
        // Distribute the product.
        let mut partial: Vec<(usize, S)> = vec![(0usize, c.clone())];
        for (site, coords) in site_coords.iter().enumerate() {
            let d = irreps[site].dim;
            let mut next = Vec::new();
            for (idx, pc) in &partial {
                for (k, r) in coords {
                    next.push((idx * d + k, pc.mul_rat(r)));
                }
            }
            partial = next;
            if partial.is_empty() {
                break;
            }
        }
        for (idx, pc) in partial {
            out[idx] = out[idx].add(&pc);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rint};
    use crate::lie::Series;
    use proptest::prelude::*;

    fn sl2() -> Arc<LieAlgebra> {
        LieAlgebra::build(Series::A, 1).unwrap()
    }

    fn sl3() -> Arc<LieAlgebra> {
        LieAlgebra::build(Series::A, 2).unwrap()
    }

    #[test]
    fn highest_weight_conditions() {
        let alg = sl3();
        let ctx = qctx();
        let hw = Weight::fundamental(2, 0);
        let v = VermaState::<Cyclo>::highest(&ctx, hw.clone());
        for a in 0..alg.num_pos_roots() {
            assert!(verma_act_gen::<Cyclo>(&alg, &ctx, Gen::E(a), &v).is_zero());
        }
        // E_i F_j v = delta_ij lambda(H_i) v, over Dynkin nodes i, j
        for i in 0..2 {
            for j in 0..2 {
                let ri = alg.simple_root_index(i);
                let rj = alg.simple_root_index(j);
                let fj = verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F(rj), &v);
                let eifj = verma_act_gen::<Cyclo>(&alg, &ctx, Gen::E(ri), &fj);
                if i == j {
                    let c = eifj
                        .coeff(&PbwMonomial::unit())
                        .and_then(|c| c.as_rational())
                        .unwrap_or_else(Rational::zero);
                    assert_eq!(c, hw.fund[i]);
                } else {
                    assert!(eifj.is_zero());
                }
            }
        }
        // H F_i v = (lambda - alpha_i)(H) F_i v
        let r0 = alg.simple_root_index(0);
        let f0 = verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F(r0), &v);
        let hf = verma_act_gen::<Cyclo>(&alg, &ctx, Gen::H(0), &f0);
        let expect = hw.sub(&alg.root_weight(r0)).fund[0].clone();
        let key = PbwMonomial(vec![r0]);
        assert_eq!(hf.coeff(&key).unwrap().as_rational().unwrap(), expect);
    }

    #[test]
    fn iota_is_an_involution_and_antihomomorphism() {
        let ctx = qctx();
        let x = LieElement::<Cyclo>::gen(Gen::E(0), Cyclo::from_int(&ctx, 2))
            .add(&LieElement::gen(Gen::H(0), Cyclo::one(&ctx)));
        let y = LieElement::<Cyclo>::gen(Gen::F(1), Cyclo::from_int(&ctx, 3));
        let word = vec![x.clone(), y.clone()];
        let w1 = cartan_antiinvolution::<Cyclo>(&word);
        assert_eq!(w1.len(), 2);
        assert_eq!(w1[0], iota_elem(&y));
        assert_eq!(w1[1], iota_elem(&x));
        let w2 = cartan_antiinvolution::<Cyclo>(&w1);
        assert_eq!(w2, word);
        assert_eq!(iota_elem::<Cyclo>(&LieElement::gen(Gen::E(0), Cyclo::one(&ctx))),
                   LieElement::gen(Gen::F(0), Cyclo::one(&ctx)));
    }

    #[test]
    fn verma_act_respects_brackets() {
        let alg = sl3();
        let ctx = qctx();
        let hw = Weight { fund: vec![rat(5, 3), rat(7, 2)] };
        let mut rng_state = 1u64;
        let mut rand_small = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng_state >> 33) % 7) as i64 - 3
        };
        let gens = alg.all_gens();
        for trial in 0..50 {
            let gx = gens[trial % gens.len()];
            let gy = gens[(trial * 5 + 2) % gens.len()];
            let x = LieElement::<Cyclo>::gen(gx, Cyclo::from_int(&ctx, rand_small().max(1)));
            let y = LieElement::<Cyclo>::gen(gy, Cyclo::from_int(&ctx, rand_small().max(1)));
            // state: a modest random monomial combination
            let mut s = VermaState::<Cyclo>::highest(&ctx, hw.clone());
            s = verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F(trial % 3), &s);
            if trial % 2 == 0 {
                s = verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F((trial + 1) % 3), &s);
            }
            let xy = verma_act::<Cyclo>(&alg, &ctx, &x, &verma_act(&alg, &ctx, &y, &s));
            let yx = verma_act::<Cyclo>(&alg, &ctx, &y, &verma_act(&alg, &ctx, &x, &s));
            let br = verma_act::<Cyclo>(&alg, &ctx, &alg.bracket(&ctx, &x, &y), &s);
            let lhs = xy.add(&yx.scale(&Cyclo::from_int(&ctx, -1)));
            assert_eq!(lhs, br, "bracket compatibility failed for {gx:?}, {gy:?}");
        }
    }

    #[test]
    fn irrep_dimensions() {
        let sl2 = sl2();
        let two = build_irrep(&sl2, &Weight::fundamental(1, 0), 200).unwrap();
        assert_eq!(two.dim, 2);
        let sl3 = sl3();
        let three = build_irrep(&sl3, &Weight::fundamental(2, 0), 200).unwrap();
        assert_eq!(three.dim, 3);
        let eight = build_irrep(&sl3, &Weight { fund: vec![rint(1), rint(1)] }, 200).unwrap();
        assert_eq!(eight.dim, 8);
    }

    #[test]
    fn irrep_cap_and_dominance_errors() {
        let sl3 = sl3();
        assert!(matches!(
            build_irrep(&sl3, &Weight { fund: vec![rat(1, 2), rint(0)] }, 200),
            Err(LieError::NotDominantIntegral)
        ));
        assert!(matches!(
            build_irrep(&sl3, &Weight { fund: vec![rint(3), rint(3)] }, 10),
            Err(LieError::DimensionCap(64, 10))
        ));
    }

    #[test]
    fn sl3_fundamental_kills_f2() {
        // In L_{omega_1}, F_{alpha_2} v = 0.
        let alg = sl3();
        let ir = build_irrep(&alg, &Weight::fundamental(2, 0), 200).unwrap();
        let i2 = alg.root_index(&[0, 1]).unwrap();
        let reduced = ir.reduce_monomial(&PbwMonomial(vec![i2]));
        assert!(reduced.is_empty());
        // While F_{alpha_1} v survives.
        let i1 = alg.root_index(&[1, 0]).unwrap();
        assert!(!ir.reduce_monomial(&PbwMonomial(vec![i1])).is_empty());
        // F2 F2 v dies too (weight space outside the irrep).
        assert!(ir.reduce_monomial(&PbwMonomial(vec![i2, i2])).is_empty());
    }

    #[test]
    fn irrep_matrices_satisfy_brackets() {
        let alg = sl3();
        let ir = build_irrep(&alg, &Weight { fund: vec![rint(1), rint(1)] }, 200).unwrap();
        let gens = alg.all_gens();
        for &a in &gens {
            for &b in &gens {
                let ma = ir.matrix(a);
                let mb = ir.matrix(b);
                let comm = {
                    let ab = linalg::mat_mul(ma, mb);
                    let ba = linalg::mat_mul(mb, ma);
                    let mut d = ab;
                    for i in 0..ir.dim {
                        for j in 0..ir.dim {
                            d[i][j] -= &ba[i][j];
                        }
                    }
                    d
                };
                let mut want = vec![vec![Rational::zero(); ir.dim]; ir.dim];
                for (g, c) in alg.bracket_gens(a, b) {
                    let mg = ir.matrix(*g);
                    for i in 0..ir.dim {
                        for j in 0..ir.dim {
                            if !mg[i][j].is_zero() {
                                want[i][j] += c * &mg[i][j];
                            }
                        }
                    }
                }
                assert_eq!(comm, want, "matrix bracket mismatch on {a:?}, {b:?}");
            }
        }
    }

    #[test]
    fn contravariance_on_irrep() {
        // <x. u, v> = <u, iota(x). v> through the quotient pairing: checked
        // via Shapovalov pairs of reduced states on the 8-dim sl3 irrep.
        let alg = sl3();
        let ctx = qctx();
        let hw = Weight { fund: vec![rint(1), rint(1)] };
        // Pairing of two Verma states by depth.
        let pair = |a: &VermaState<Cyclo>, b: &VermaState<Cyclo>| -> Rational {
            let mut total = Rational::zero();
            let mut cache = ActCache::new();
            for (m1, c1) in a.iter() {
                for (m2, c2) in b.iter() {
                    if m1.depth_coords(&alg) == m2.depth_coords(&alg) {
                        let p = shap_pair(&alg, &ctx, &hw, m1, m2, &mut cache);
                        total += p * c1.as_rational().unwrap() * c2.as_rational().unwrap();
                    }
                }
            }
            total
        };
        let v = VermaState::<Cyclo>::highest(&ctx, hw.clone());
        let u = verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F(0), &verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F(1), &v));
        let w = verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F(2), &v);
        for g in alg.all_gens() {
            let lhs = pair(&verma_act_gen::<Cyclo>(&alg, &ctx, g, &u), &w);
            let rhs = pair(&u, &verma_act_gen::<Cyclo>(&alg, &ctx, iota_gen(g), &w));
            assert_eq!(lhs, rhs, "contravariance fails for {g:?}");
        }
    }

    #[test]
    fn tensor_sites_commute() {
        let alg = sl3();
        let ctx = qctx();
        let hws = vec![Weight::fundamental(2, 0), Weight { fund: vec![rat(3, 2), rat(1, 3)] }];
        let s = TensorState::<Cyclo>::highest(&ctx, hws);
        let x = LieElement::<Cyclo>::gen(Gen::F(0), Cyclo::from_int(&ctx, 2));
        let y = LieElement::<Cyclo>::gen(Gen::F(2), Cyclo::one(&ctx));
        let a = s.act_site(&alg, &ctx, &x, 0).act_site(&alg, &ctx, &y, 1);
        let b = s.act_site(&alg, &ctx, &y, 1).act_site(&alg, &ctx, &x, 0);
        assert_eq!(a, b);
        // H^{(0)} on the vacuum scales by lambda_1(H).
        let h = LieElement::<Cyclo>::gen(Gen::H(0), Cyclo::one(&ctx));
        let hs = s.act_site(&alg, &ctx, &h, 0);
        assert_eq!(hs, s.scale(&Cyclo::one(&ctx)));
    }

    #[test]
    fn projection_of_vacuum_and_linearity() {
        let alg = sl3();
        let ctx = qctx();
        let ir = build_irrep(&alg, &Weight::fundamental(2, 0), 200).unwrap();
        let hws = vec![Weight::fundamental(2, 0), Weight::fundamental(2, 0)];
        let s = TensorState::<Cyclo>::highest(&ctx, hws.clone());
        let p = project_to_irrep::<Cyclo>(&ctx, &s, &[ir.clone(), ir.clone()]);
        // exactly one nonzero coordinate, equal to 1
        let nonzero: Vec<_> = p.iter().filter(|c| !c.is_zero()).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(*nonzero[0], Cyclo::one(&ctx));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn straightening_preserves_weight_grading(seq in prop::collection::vec(0usize..3, 1..5)) {
            // Every monomial of F_{b_k}...F_{b_1} v has weight
            // lambda - sum alpha_{b_j}, whatever reordering the
            // straightening produced.
            let alg = sl3();
            let ctx = qctx();
            let hw = Weight { fund: vec![rat(2, 1), rat(5, 7)] };
            let v = VermaState::<Cyclo>::highest(&ctx, hw.clone());
            let mut s = v;
            let mut expected = hw;
            for &b in &seq {
                s = verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F(b), &s);
                expected = expected.sub(&alg.root_weight(b));
            }
            prop_assert!(!s.is_zero());
            for (m, _) in s.iter() {
                prop_assert_eq!(monomial_weight(&alg, &s.hw, &m.0), expected.clone());
            }
            // and the swap identity F_a F_b = F_b F_a + [F_a, F_b] acting on v
            let a = seq[0];
            let b = seq[seq.len() - 1];
            let v = VermaState::<Cyclo>::highest(&ctx, Weight { fund: vec![rat(3, 1), rat(4, 1)] });
            let fab = verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F(a),
                &verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F(b), &v));
            let fba = verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F(b),
                &verma_act_gen::<Cyclo>(&alg, &ctx, Gen::F(a), &v));
            let mut br = VermaState::<Cyclo>::zero(v.hw.clone());
            for (g, c) in alg.bracket_gens(Gen::F(a), Gen::F(b)) {
                let acted = verma_act_gen::<Cyclo>(&alg, &ctx, *g, &v);
                for (m, mc) in acted.iter() {
                    br.add_term(m.clone(), mc.mul_rat(c));
                }
            }
            prop_assert_eq!(fab, fba.add(&br));
        }
    }
}

//! Root systems, Cartan-Weyl bases, and Chevalley structure constants for
//! the classical simple Lie algebras, together with the invariant inner
//! product normalized so long roots have squared length 2.
//!
//! Structure constants are extracted from the defining matrix realization of
//! each series (sl, so, sp with an antidiagonal bilinear form), with root
//! vectors normalized so that [E_alpha, F_alpha] = H_alpha and
//! alpha(H_alpha) = 2. Signs are therefore fixed deterministically by the
//! realization; positive roots carry a total order (height, then
//! lexicographic in simple-root coordinates) used wherever a canonical
//! decomposition of a non-simple root is needed.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{rint, Rational};
use crate::linalg;
use crate::scalar::Scalar;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Series::A => write!(f, "A"),
            Series::B => write!(f, "B"),
            Series::C => write!(f, "C"),
            Series::D => write!(f, "D"),
        }
    }
}

#[derive(Debug, Error)]
pub enum LieError {
    #[error("unsupported series/rank: {0}{1}")]
    Unsupported(Series, usize),
    #[error("weight is not dominant integral")]
    NotDominantIntegral,
    #[error("irrep dimension {0} exceeds cap {1}")]
    DimensionCap(usize, usize),
}

/// A Cartan-Weyl basis label: raising E, lowering F (indexed by positive
/// root), or simple coroot H (indexed by Dynkin node).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Gen {
    E(usize),
    F(usize),
    H(usize),
}

impl Gen {
    pub fn is_raising(&self) -> bool {
        matches!(self, Gen::E(_))
    }
}

/// Sparse element of the Lie algebra over a scalar backend.
#[derive(Clone, PartialEq, Debug)]
pub struct LieElement<S: Scalar> {
    terms: BTreeMap<Gen, S>,
}

impl<S: Scalar> LieElement<S> {
    pub fn zero() -> Self {
        LieElement { terms: BTreeMap::new() }
    }

    pub fn gen(g: Gen, coeff: S) -> Self {
        let mut e = Self::zero();
        e.add_term(g, coeff);
        e
    }

    pub fn add_term(&mut self, g: Gen, coeff: S) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&coeff);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(*g, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(*g, c.neg());
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.add_term(*g, c.mul(s));
        }
        out
    }

    pub fn scale_rat(&self, r: &Rational) -> Self {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.add_term(*g, c.mul_rat(r));
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.add_term(*g, c.neg());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Gen, &S)> {
        self.terms.iter()
    }

    pub fn from_rational_terms(ctx: &S::Ctx, terms: &[(Gen, Rational)]) -> Self {
        let mut e = Self::zero();
        for (g, r) in terms {
            e.add_term(*g, S::from_rational(ctx, r));
        }
        e
    }
}

/// A weight, stored in the fundamental-weight basis with exact rational
/// coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Weight {
    pub fund: Vec<Rational>,
}

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight { fund: vec![Rational::zero(); rank] }
    }

    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut w = Self::zero(rank);
        w.fund[i] = Rational::one();
        w
    }

    pub fn add(&self, other: &Self) -> Self {
        Weight { fund: self.fund.iter().zip(&other.fund).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Weight { fund: self.fund.iter().zip(&other.fund).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Weight { fund: self.fund.iter().map(|a| a * r).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.fund.iter().all(|c| c.is_zero())
    }

    pub fn is_dominant_integral(&self) -> bool {
        self.fund.iter().all(|c| c.is_integer() && !c.is_negative())
    }
}

/// A positive root: coordinates over the simple roots and the height.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Root {
    pub coords: Vec<i64>,
    pub height: i64,
}

/// Complete structure data of a simple Lie algebra: root system, invariant
/// form, and the full Cartan-Weyl bracket table.
pub struct LieAlgebra {
    pub series: Series,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    /// Half squared lengths d_i = <alpha_i, alpha_i>/2, normalized so the
    /// long roots have d = 1.
    pub d: Vec<Rational>,
    pub pos_roots: Vec<Root>,
    root_lookup: HashMap<Vec<i64>, usize>,
    /// Per non-simple positive root, a fixed decomposition gamma =
    /// alpha_i + beta with i the least such simple node.
    cascade: Vec<Option<(usize, usize)>>,
    /// Bracket table over all Cartan-Weyl basis pairs, exact.
    table: HashMap<(Gen, Gen), Vec<(Gen, Rational)>>,
    /// <omega_i, omega_j>.
    pub ip_fund: Vec<Vec<Rational>>,
    /// <alpha_i, alpha_j>.
    pub ip_simple: Vec<Vec<Rational>>,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{} ({} positive roots)", self.series, self.rank, self.pos_roots.len())
    }
}

fn cartan_matrix(series: Series, rank: usize) -> Result<Vec<Vec<i64>>, LieError> {
    let n = rank;
    let ok = match series {
        Series::A => n >= 1,
        Series::B | Series::C => n >= 2,
        Series::D => n >= 4,
    };
    if !ok {
        return Err(LieError::Unsupported(series, rank));
    }
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let chain = |a: &mut Vec<Vec<i64>>, len: usize| {
        for i in 0..len.saturating_sub(1) {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    };
    match series {
        Series::A => chain(&mut a, n),
        Series::B => {
            chain(&mut a, n);
            a[n - 2][n - 1] = -2;
            a[n - 1][n - 2] = -1;
        }
        Series::C => {
            chain(&mut a, n);
            a[n - 2][n - 1] = -1;
            a[n - 1][n - 2] = -2;
        }
        Series::D => {
            chain(&mut a, n - 1);
            a[n - 3][n - 1] = -1;
            a[n - 1][n - 3] = -1;
        }
    }
    Ok(a)
}

impl LieAlgebra {
    /// Builds the complete root system and bracket table.
    pub fn build(series: Series, rank: usize) -> Result<Arc<Self>, LieError> {
        let cartan = cartan_matrix(series, rank)?;
        let n = rank;

        // Symmetrizing weights d_i, normalized to max 1.
        let mut d = vec![Rational::zero(); n];
        d[0] = Rational::one();
        let mut placed = vec![false; n];
        placed[0] = true;
        let mut frontier = vec![0usize];
        while let Some(i) = frontier.pop() {
            for j in 0..n {
                if i != j && cartan[i][j] != 0 && !placed[j] {
                    // a_ij d_j = a_ji d_i
                    d[j] = &d[i] * rint(cartan[j][i]) / rint(cartan[i][j]);
                    placed[j] = true;
                    frontier.push(j);
                }
            }
        }
        debug_assert!(placed.iter().all(|&p| p));
        let dmax = d.iter().cloned().fold(rint(0), |m, x| if x > m { x } else { m });
        for di in d.iter_mut() {
            *di = &*di / &dmax;
        }

        let ip_simple: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| rint(cartan[i][j]) * &d[j]).collect())
            .collect();

        // <omega_i, omega_j> = (A^{-1})_{ji} d_i.
        let a_rat: linalg::RMat = cartan
            .iter()
            .map(|row| row.iter().map(|&x| rint(x)).collect())
            .collect();
        let a_inv = linalg::invert(&a_rat).expect("Cartan matrix is invertible");
        let ip_fund: Vec<Vec<Rational>> =
            (0..n).map(|i| (0..n).map(|j| &a_inv[j][i] * &d[i]).collect()).collect();
        for i in 0..n {
            for j in 0..n {
                debug_assert_eq!(ip_fund[i][j], ip_fund[j][i]);
            }
        }

        // Positive roots by closure, level by level in height.
        let mut roots: Vec<Root> = (0..n)
            .map(|i| {
                let mut c = vec![0i64; n];
                c[i] = 1;
                Root { coords: c, height: 1 }
            })
            .collect();
        let mut known: HashMap<Vec<i64>, usize> = roots
            .iter()
            .enumerate()
            .map(|(k, r)| (r.coords.clone(), k))
            .collect();
        let mut level: Vec<Vec<i64>> = roots.iter().map(|r| r.coords.clone()).collect();
        let mut height = 1i64;
        while !level.is_empty() {
            let mut next = Vec::new();
            for beta in &level {
                for i in 0..n {
                    let mut gamma = beta.clone();
                    gamma[i] += 1;
                    if known.contains_key(&gamma) || next.contains(&gamma) {
                        continue;
                    }
                    // q = p - <beta, alpha_i^vee> with p the length of the
                    // descending alpha_i-string through beta.
                    if beta.iter().enumerate().all(|(k, &c)| c == 0 || k == i) {
                        // beta is a multiple of alpha_i: 2*alpha_i is never a root.
                        continue;
                    }
                    let mut p = 0i64;
                    let mut down = beta.clone();
                    loop {
                        down[i] -= 1;
                        if known.contains_key(&down) {
                            p += 1;
                        } else {
                            break;
                        }
                    }
                    let pairing: i64 = (0..n).map(|k| beta[k] * cartan[k][i]).sum();
                    if p - pairing >= 1 {
                        next.push(gamma);
                    }
                }
            }
            height += 1;
            for gamma in next.iter() {
                known.insert(gamma.clone(), usize::MAX);
                roots.push(Root { coords: gamma.clone(), height });
            }
            level = next;
        }

        // Total order: height, then lexicographic in simple-root coordinates.
        roots.sort_by(|a, b| (a.height, &a.coords).cmp(&(b.height, &b.coords)));
        let root_lookup: HashMap<Vec<i64>, usize> =
            roots.iter().enumerate().map(|(k, r)| (r.coords.clone(), k)).collect();

        let mut alg = LieAlgebra {
            series,
            rank,
            cartan,
            d,
            pos_roots: roots,
            root_lookup,
            cascade: Vec::new(),
            table: HashMap::new(),
            ip_fund,
            ip_simple,
        };
        alg.cascade = alg.compute_cascade();
        alg.build_table();
        Ok(Arc::new(alg))
    }

    fn compute_cascade(&self) -> Vec<Option<(usize, usize)>> {
        self.pos_roots
            .iter()
            .map(|gamma| {
                if gamma.height == 1 {
                    return None;
                }
                for i in 0..self.rank {
                    if gamma.coords[i] == 0 {
                        continue;
                    }
                    let mut rest = gamma.coords.clone();
                    rest[i] -= 1;
                    if let Some(&b) = self.root_lookup.get(&rest) {
                        let a = self.root_lookup[&{
                            let mut c = vec![0i64; self.rank];
                            c[i] = 1;
                            c
                        }];
                        return Some((a, b));
                    }
                }
                unreachable!("every non-simple positive root splits off a simple root")
            })
            .collect()
    }

    /// The fixed decomposition (simple index pair) of a non-simple root.
    pub fn cascade_pair(&self, gamma: usize) -> Option<(usize, usize)> {
        self.cascade[gamma]
    }

    /// p = max k >= 0 such that beta - k*alpha is a root (of either sign).
    fn string_down(&self, alpha: usize, beta: usize) -> i64 {
        let a = &self.pos_roots[alpha].coords;
        let b = &self.pos_roots[beta].coords;
        let mut p = 0;
        let mut cur = b.clone();
        loop {
            for (c, ai) in cur.iter_mut().zip(a) {
                *c -= ai;
            }
            if cur.iter().all(|&c| c == 0) {
                break;
            }
            let neg: Vec<i64> = cur.iter().map(|c| -c).collect();
            if !self.root_lookup.contains_key(&cur) && !self.root_lookup.contains_key(&neg) {
                break;
            }
            p += 1;
        }
        p
    }

    pub fn num_pos_roots(&self) -> usize {
        self.pos_roots.len()
    }

    pub fn root_index(&self, coords: &[i64]) -> Option<usize> {
        self.root_lookup.get(coords).copied()
    }

    /// Positive-root index of the simple root alpha_i (the total order mixes
    /// equal-height roots lexicographically, so this is not `node` itself).
    pub fn simple_root_index(&self, node: usize) -> usize {
        let mut c = vec![0i64; self.rank];
        c[node] = 1;
        self.root_lookup[&c]
    }

    /// Dynkin node of a height-one positive root.
    pub fn node_of_simple(&self, idx: usize) -> Option<usize> {
        if self.pos_roots[idx].height != 1 {
            return None;
        }
        self.pos_roots[idx].coords.iter().position(|&m| m == 1)
    }

    /// <alpha, alpha> for a positive root index.
    pub fn root_len_sq(&self, idx: usize) -> Rational {
        let m = &self.pos_roots[idx].coords;
        let mut s = Rational::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                if m[i] != 0 && m[j] != 0 {
                    s += rint(m[i]) * rint(m[j]) * &self.ip_simple[i][j];
                }
            }
        }
        s
    }

    /// Coordinates of alpha^vee over the simple coroots alpha_j^vee.
    pub fn coroot_coords(&self, idx: usize) -> Vec<Rational> {
        let d_alpha = self.root_len_sq(idx) / rint(2);
        self.pos_roots[idx]
            .coords
            .iter()
            .enumerate()
            .map(|(j, &m)| rint(m) * &self.d[j] / &d_alpha)
            .collect()
    }

    /// <lambda, alpha_idx^vee>.
    pub fn pair_coroot(&self, w: &Weight, idx: usize) -> Rational {
        let cc = self.coroot_coords(idx);
        w.fund.iter().zip(&cc).map(|(a, b)| a * b).sum()
    }

    /// <lambda, H_i> for a simple coroot.
    pub fn pair_simple_coroot(&self, w: &Weight, i: usize) -> Rational {
        w.fund[i].clone()
    }

    /// A positive root as a weight (fundamental coordinates).
    pub fn root_weight(&self, idx: usize) -> Weight {
        let m = &self.pos_roots[idx].coords;
        let fund = (0..self.rank)
            .map(|j| {
                let mut s = Rational::zero();
                for (k, &mk) in m.iter().enumerate() {
                    if mk != 0 {
                        s += rint(mk * self.cartan[k][j]);
                    }
                }
                s
            })
            .collect();
        Weight { fund }
    }

    /// <v, w> for weights in fundamental coordinates.
    pub fn ip(&self, v: &Weight, w: &Weight) -> Rational {
        let mut s = Rational::zero();
        for i in 0..self.rank {
            if v.fund[i].is_zero() {
                continue;
            }
            for j in 0..self.rank {
                if !w.fund[j].is_zero() {
                    s += &v.fund[i] * &w.fund[j] * &self.ip_fund[i][j];
                }
            }
        }
        s
    }

    /// rho = half sum of positive roots = sum of fundamental weights.
    pub fn rho(&self) -> Weight {
        Weight { fund: vec![Rational::one(); self.rank] }
    }

    /// Delta(lambda) = <lambda, lambda>/2 + <lambda, rho>: the quadratic
    /// Casimir eigenvalue on a highest-weight module.
    pub fn casimir_delta(&self, w: &Weight) -> Rational {
        self.ip(w, w) / rint(2) + self.ip(w, &self.rho())
    }

    /// Dual Coxeter number: 1 + height of the highest root in the coroot
    /// expansion.
    pub fn dual_coxeter(&self) -> i64 {
        let theta = self.pos_roots.len() - 1;
        debug_assert!(self
            .pos_roots
            .iter()
            .all(|r| r.height <= self.pos_roots[theta].height));
        let s: Rational = self.pos_roots[theta]
            .coords
            .iter()
            .enumerate()
            .map(|(i, &m)| rint(m) * &self.d[i])
            .sum();
        let total = Rational::one() + s;
        debug_assert!(total.is_integer());
        total.to_integer().try_into().unwrap()
    }

    /// Weyl dimension formula.
    pub fn weyl_dim(&self, hw: &Weight) -> Rational {
        let rho = self.rho();
        let shifted = hw.add(&rho);
        let mut dim = Rational::one();
        for idx in 0..self.pos_roots.len() {
            let alpha = self.root_weight(idx);
            dim *= self.ip(&shifted, &alpha) / self.ip(&rho, &alpha);
        }
        dim
    }

    // ---- structure constants from the defining matrix realization ----

    pub fn all_gens(&self) -> Vec<Gen> {
        let mut g: Vec<Gen> = (0..self.pos_roots.len()).map(Gen::E).collect();
        g.extend((0..self.pos_roots.len()).map(Gen::F));
        g.extend((0..self.rank).map(Gen::H));
        g
    }

    /// epsilon-coordinate form of a positive root in the defining
    /// representation (length n, entries over the diagonal parameters).
    fn eps_coords(&self, idx: usize) -> Vec<i64> {
        let n = self.rank;
        let dim = match self.series {
            Series::A => n + 1,
            _ => n,
        };
        let mut simple_eps: Vec<Vec<i64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = vec![0i64; dim];
            match self.series {
                Series::A => {
                    v[i] = 1;
                    v[i + 1] = -1;
                }
                Series::B => {
                    if i + 1 < n {
                        v[i] = 1;
                        v[i + 1] = -1;
                    } else {
                        v[i] = 1;
                    }
                }
                Series::C => {
                    if i + 1 < n {
                        v[i] = 1;
                        v[i + 1] = -1;
                    } else {
                        v[i] = 2;
                    }
                }
                Series::D => {
                    if i + 1 < n {
                        v[i] = 1;
                        v[i + 1] = -1;
                    } else {
                        v[n - 2] += 1;
                        v[n - 1] += 1;
                    }
                }
            }
            simple_eps.push(v);
        }
        let mut out = vec![0i64; dim];
        for (k, &m) in self.pos_roots[idx].coords.iter().enumerate() {
            for (o, s) in out.iter_mut().zip(&simple_eps[k]) {
                *o += m * s;
            }
        }
        out
    }

    /// Matrix of the realization: sl_{n+1} for A, so_{2n+1} for B (bilinear
    /// form with antidiagonal Gram matrix), sp_{2n} for C, so_{2n} for D.
    fn realization_matrices(&self) -> (usize, Vec<RMatI>, Vec<RMatI>) {
        let n = self.rank;
        let m = match self.series {
            Series::A => n + 1,
            Series::B => 2 * n + 1,
            Series::C | Series::D => 2 * n,
        };
        let mirror = |a: usize| m - 1 - a; // 0-based antidiagonal partner
        // so basis: B_ab = e_ab - e_{b' a'}; sp basis: C_ab = e_ab - s_a s_b e_{b' a'}.
        let sgn = |a: usize| -> i64 {
            match self.series {
                Series::C => {
                    if a < n {
                        1
                    } else {
                        -1
                    }
                }
                _ => 1,
            }
        };
        let pair_mat = |a: usize, b: usize| -> RMatI {
            let mut x = vec![vec![0i64; m]; m];
            x[a][b] += 1;
            if self.series != Series::A {
                x[mirror(b)][mirror(a)] -= sgn(a) * sgn(b);
            }
            x
        };
        // For each positive root, pick the canonical (a, b) index pair.
        let mut e_mats = Vec::new();
        let mut f_mats = Vec::new();
        for idx in 0..self.pos_roots.len() {
            let eps = self.eps_coords(idx);
            let (a, b) = self.root_slot(&eps, m);
            e_mats.push(pair_mat(a, b));
            f_mats.push(pair_mat(b, a));
        }
        (m, e_mats, f_mats)
    }

    /// Maps a root in epsilon coordinates to the elementary-matrix slot that
    /// realizes it.
    fn root_slot(&self, eps: &[i64], m: usize) -> (usize, usize) {
        let n = self.rank;
        let mirror = |a: usize| m - 1 - a;
        match self.series {
            Series::A => {
                let i = eps.iter().position(|&c| c == 1).unwrap();
                let j = eps.iter().position(|&c| c == -1).unwrap();
                (i, j)
            }
            _ => {
                let pos: Vec<usize> = (0..n).filter(|&k| eps[k] > 0).collect();
                let neg: Vec<usize> = (0..n).filter(|&k| eps[k] < 0).collect();
                match (pos.len(), neg.len()) {
                    (1, 1) => (pos[0], neg[0]), // eps_i - eps_j -> X_{ij}
                    (2, 0) => (pos[0], mirror(pos[1])), // eps_i + eps_j -> X_{i j'}
                    (1, 0) => {
                        if eps[pos[0]] == 2 {
                            (pos[0], mirror(pos[0])) // 2 eps_i (sp)
                        } else {
                            (pos[0], n) // eps_i (odd so; middle column)
                        }
                    }
                    _ => unreachable!("unexpected root shape {:?}", eps),
                }
            }
        }
    }

    fn build_table(&mut self) {
        let (m, e_raw, f_raw) = self.realization_matrices();
        let nroots = self.pos_roots.len();

        let commute = |a: &RMatI, b: &RMatI| -> RMatProd {
            let mut out = vec![vec![Rational::zero(); m]; m];
            for i in 0..m {
                for j in 0..m {
                    let mut s = 0i64;
                    for k in 0..m {
                        s += a[i][k] * b[k][j] - b[i][k] * a[k][j];
                    }
                    if s != 0 {
                        out[i][j] = rint(s);
                    }
                }
            }
            out
        };
        let commute_q = |a: &RMatProd, b: &RMatProd| -> RMatProd {
            let mut out = vec![vec![Rational::zero(); m]; m];
            for i in 0..m {
                for j in 0..m {
                    let mut s = Rational::zero();
                    for k in 0..m {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            s += &a[i][k] * &b[k][j];
                        }
                        if !b[i][k].is_zero() && !a[k][j].is_zero() {
                            s -= &b[i][k] * &a[k][j];
                        }
                    }
                    out[i][j] = s;
                }
            }
            out
        };
        let to_q = |a: &RMatI| -> RMatProd {
            a.iter().map(|row| row.iter().map(|&x| rint(x)).collect()).collect()
        };

        // alpha(h) for a concrete diagonal matrix h.
        let eval_on = |eps: &[i64], h: &RMatProd| -> Rational {
            eps.iter()
                .enumerate()
                .map(|(k, &c)| if c == 0 { Rational::zero() } else { rint(c) * &h[k][k] })
                .sum()
        };

        // Chevalley normalization. The realization fixes the simple sl2
        // triples: f_i is the transpose slot rescaled so alpha_i(h_i) = 2.
        // Every non-simple root vector is then *defined* through its cascade
        // pair gamma = alpha_s + beta:
        //   E_gamma = [E_s, E_beta]/(p+1),  F_gamma = -[F_s, F_beta]/(p+1),
        // with p the length of the descending alpha_s-string through beta.
        // This keeps E_alpha <-> F_alpha an anti-involution (the naive
        // per-root transpose rescaling would not, for short roots).
        let simple_idx: Vec<usize> = (0..self.rank)
            .map(|i| {
                let mut c = vec![0i64; self.rank];
                c[i] = 1;
                self.root_lookup[&c]
            })
            .collect();
        let mut e_mats: Vec<Option<RMatProd>> = vec![None; nroots];
        let mut f_mats: Vec<Option<RMatProd>> = vec![None; nroots];
        for &ri in &simple_idx {
            let e = to_q(&e_raw[ri]);
            let h = commute(&e_raw[ri], &f_raw[ri]);
            let c = eval_on(&self.eps_coords(ri), &h);
            assert!(!c.is_zero(), "degenerate coroot normalization");
            let s = rint(2) / c;
            let f: RMatProd = f_raw[ri]
                .iter()
                .map(|row| row.iter().map(|&x| rint(x) * &s).collect())
                .collect();
            e_mats[ri] = Some(e);
            f_mats[ri] = Some(f);
        }
        let mut by_height: Vec<usize> = (0..nroots).collect();
        by_height.sort_by_key(|&i| self.pos_roots[i].height);
        for &gamma in &by_height {
            if self.pos_roots[gamma].height == 1 {
                continue;
            }
            let (s, beta) = self.cascade[gamma].unwrap();
            let p = self.string_down(s, beta);
            let inv = rint(1) / rint(p + 1);
            let scale = |mat: RMatProd, c: &Rational| -> RMatProd {
                mat.into_iter()
                    .map(|row| row.into_iter().map(|x| x * c).collect())
                    .collect()
            };
            let e = commute_q(e_mats[s].as_ref().unwrap(), e_mats[beta].as_ref().unwrap());
            let f = commute_q(f_mats[s].as_ref().unwrap(), f_mats[beta].as_ref().unwrap());
            e_mats[gamma] = Some(scale(e, &inv));
            f_mats[gamma] = Some(scale(f, &(-inv)));
        }
        let e_mats: Vec<RMatProd> = e_mats.into_iter().map(|x| x.unwrap()).collect();
        let f_mats: Vec<RMatProd> = f_mats.into_iter().map(|x| x.unwrap()).collect();
        // sl2-triple normalization must come out right for every root.
        for idx in 0..nroots {
            let h = commute_q(&e_mats[idx], &f_mats[idx]);
            let c = eval_on(&self.eps_coords(idx), &h);
            assert_eq!(c, rint(2), "cascade normalization broke alpha(H_alpha) = 2 at root {idx}");
        }
        let h_mats: Vec<RMatProd> = simple_idx
            .iter()
            .map(|&ri| commute_q(&e_mats[ri], &f_mats[ri]))
            .collect();

        // Expansion helpers: a weight-homogeneous matrix is a scalar multiple
        // of the basis matrix with the same weight; a Cartan matrix expands
        // over the simple coroots.
        let proportionality = |x: &RMatProd, basis: &RMatProd| -> Rational {
            let mut ratio: Option<Rational> = None;
            for i in 0..m {
                for j in 0..m {
                    let (xi, bi) = (&x[i][j], &basis[i][j]);
                    if bi.is_zero() {
                        assert!(xi.is_zero(), "matrix not proportional to root vector");
                        continue;
                    }
                    let r = xi / bi;
                    if let Some(prev) = &ratio {
                        assert_eq!(*prev, r, "matrix not proportional to root vector");
                    } else {
                        ratio = Some(r);
                    }
                }
            }
            ratio.unwrap_or_else(Rational::zero)
        };
        let expand_cartan = |x: &RMatProd| -> Vec<(Gen, Rational)> {
            // Solve diag(x) = sum_i c_i diag(H_i); n unknowns, m equations.
            let rows: Vec<Vec<Rational>> = (0..m)
                .map(|a| {
                    let mut row: Vec<Rational> =
                        (0..self.rank).map(|i| h_mats[i][a][a].clone()).collect();
                    row.push(x[a][a].clone());
                    row
                })
                .collect();
            let mut w = rows;
            let pivots = linalg::rref(&mut w);
            assert!(
                pivots.iter().all(|&p| p < self.rank),
                "Cartan expansion is inconsistent"
            );
            let mut coeffs = vec![Rational::zero(); self.rank];
            for (r, &p) in pivots.iter().enumerate() {
                coeffs[p] = w[r][self.rank].clone();
            }
            coeffs
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (Gen::H(i), c))
                .collect()
        };

        // Weight bookkeeping in simple-root coordinates.
        let gen_root = |g: Gen| -> Vec<i64> {
            match g {
                Gen::E(x) => self.pos_roots[x].coords.clone(),
                Gen::F(x) => self.pos_roots[x].coords.iter().map(|c| -c).collect(),
                Gen::H(_) => vec![0; self.rank],
            }
        };
        let mat_of = |g: Gen| -> &RMatProd {
            match g {
                Gen::E(x) => &e_mats[x],
                Gen::F(x) => &f_mats[x],
                Gen::H(i) => &h_mats[i],
            }
        };

        let gens = self.all_gens();
        let mut table: HashMap<(Gen, Gen), Vec<(Gen, Rational)>> = HashMap::new();
        for &a in &gens {
            for &b in &gens {
                let bracket = commute_q(mat_of(a), mat_of(b));
                let wsum: Vec<i64> = gen_root(a)
                    .iter()
                    .zip(gen_root(b).iter())
                    .map(|(x, y)| x + y)
                    .collect();
                let is_zero_mat = bracket.iter().all(|row| row.iter().all(|c| c.is_zero()));
                let terms: Vec<(Gen, Rational)> = if is_zero_mat {
                    vec![]
                } else if wsum.iter().all(|&c| c == 0) {
                    expand_cartan(&bracket)
                } else if wsum.iter().all(|&c| c >= 0) {
                    let idx = self
                        .root_lookup
                        .get(&wsum)
                        .copied()
                        .expect("bracket weight must be a root");
                    vec![(Gen::E(idx), proportionality(&bracket, &e_mats[idx]))]
                } else {
                    let neg: Vec<i64> = wsum.iter().map(|c| -c).collect();
                    let idx = self
                        .root_lookup
                        .get(&neg)
                        .copied()
                        .expect("bracket weight must be a root");
                    vec![(Gen::F(idx), proportionality(&bracket, &f_mats[idx]))]
                };
                table.insert((a, b), terms);
            }
        }
        self.table = table;

        // Defining normalization: [E_alpha, F_alpha] expands over simple
        // coroots exactly as alpha^vee.
        for idx in 0..nroots {
            let got = self.table[&(Gen::E(idx), Gen::F(idx))].clone();
            let want = self.coroot_coords(idx);
            for (g, c) in got {
                match g {
                    Gen::H(i) => assert_eq!(c, want[i], "coroot mismatch at root {idx}"),
                    _ => panic!("[E,F] of equal roots must be Cartan"),
                }
            }
        }
    }

    /// Bracket of two basis generators, from the precomputed table.
    pub fn bracket_gens(&self, a: Gen, b: Gen) -> &[(Gen, Rational)] {
        self.table.get(&(a, b)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Bracket of two sparse elements over any scalar backend.
    pub fn bracket<S: Scalar>(&self, ctx: &S::Ctx, x: &LieElement<S>, y: &LieElement<S>) -> LieElement<S> {
        let mut out = LieElement::zero();
        for (ga, ca) in x.iter() {
            for (gb, cb) in y.iter() {
                let cab = ca.mul(cb);
                for (g, c) in self.bracket_gens(*ga, *gb) {
                    out.add_term(*g, cab.mul(&S::from_rational(ctx, c)));
                }
            }
        }
        out
    }

    /// Invariant form on basis generators.
    pub fn gram_gens(&self, a: Gen, b: Gen) -> Rational {
        match (a, b) {
            (Gen::E(x), Gen::F(y)) | (Gen::F(x), Gen::E(y)) if x == y => {
                rint(2) / self.root_len_sq(x)
            }
            (Gen::H(i), Gen::H(j)) => {
                // <alpha_i^vee, alpha_j^vee> = a_ij / d_i
                rint(self.cartan[i][j]) / &self.d[i]
            }
            _ => Rational::zero(),
        }
    }

    /// Invariant form of two sparse elements.
    pub fn form<S: Scalar>(&self, ctx: &S::Ctx, x: &LieElement<S>, y: &LieElement<S>) -> S {
        let mut s = S::zero(ctx);
        for (ga, ca) in x.iter() {
            for (gb, cb) in y.iter() {
                let g = self.gram_gens(*ga, *gb);
                if !g.is_zero() {
                    s = s.add(&ca.mul(cb).mul_rat(&g));
                }
            }
        }
        s
    }

    /// Dual basis pairs (I_a, I^a) with <I^a, I_b> = delta^a_b:
    /// E^alpha = (<alpha,alpha>/2) F_alpha, F^alpha = (<alpha,alpha>/2) E_alpha,
    /// H^i = sum_j <omega_i, omega_j> H_j.
    pub fn dual_pairs(&self) -> Vec<(Gen, Vec<(Gen, Rational)>)> {
        let mut pairs = Vec::new();
        for idx in 0..self.pos_roots.len() {
            let half_len = self.root_len_sq(idx) / rint(2);
            pairs.push((Gen::E(idx), vec![(Gen::F(idx), half_len.clone())]));
            pairs.push((Gen::F(idx), vec![(Gen::E(idx), half_len)]));
        }
        for i in 0..self.rank {
            let dual: Vec<(Gen, Rational)> = (0..self.rank)
                .filter(|&j| !self.ip_fund[i][j].is_zero())
                .map(|j| (Gen::H(j), self.ip_fund[i][j].clone()))
                .collect();
            pairs.push((Gen::H(i), dual));
        }
        pairs
    }

    /// The weight of a generator under the adjoint action of the Cartan:
    /// alpha for E_alpha, -alpha for F_alpha, 0 for H.
    pub fn gen_weight(&self, g: Gen) -> Weight {
        match g {
            Gen::E(x) => self.root_weight(x),
            Gen::F(x) => self.root_weight(x).scale(&rint(-1)),
            Gen::H(_) => Weight::zero(self.rank),
        }
    }
}

type RMatI = Vec<Vec<i64>>;
type RMatProd = Vec<Vec<Rational>>;

//! Model data and validation: algebra, automorphism, marked points with
//! pairwise disjoint Gamma-orbits, and the module assigned to each site.

use std::sync::Arc;

use thiserror::Error;

use crate::autom::AutoTable;
use crate::exact::CycloCtx;
use crate::lie::{LieAlgebra, LieError, Weight};
use crate::repn::{build_irrep, Irrep};
use crate::scalar::Scalar;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModuleKind {
    Verma,
    Irrep,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("site {0} is zero; all marked points must be nonzero")]
    ZeroSite(usize),
    #[error("Gamma-orbits of sites {i} and {j} collide: z_{i} = omega^{k} z_{j}")]
    OrbitCollision { i: usize, j: usize, k: u32 },
    #[error("model has {sites} sites but {weights} weights")]
    LengthMismatch { sites: usize, weights: usize },
    #[error("site {0} is declared irrep but its weight is not dominant integral")]
    NotDominantIntegral(usize),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// A validated cyclotomic Gaudin model over a scalar backend.
pub struct Model<S: Scalar> {
    pub alg: Arc<LieAlgebra>,
    pub auto: Arc<AutoTable>,
    pub cyclo: Arc<CycloCtx>,
    pub sctx: S::Ctx,
    pub t: u32,
    pub sites: Vec<S>,
    pub weights: Vec<Weight>,
    pub kinds: Vec<ModuleKind>,
}

impl<S: Scalar> std::fmt::Debug for Model<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Model({:?}, T={}, {} sites)", self.alg, self.t, self.sites.len())
    }
}

impl<S: Scalar> Model<S> {
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn omega(&self, k: i64) -> S {
        S::omega_pow(&self.sctx, k)
    }

    /// Irreducible quotient modules for every site; all sites must be
    /// irrep-kind with dominant integral weights.
    pub fn irreps(&self, cap: usize) -> Result<Vec<Arc<Irrep>>, ModelError> {
        let mut out = Vec::with_capacity(self.n_sites());
        for (i, w) in self.weights.iter().enumerate() {
            if self.kinds[i] != ModuleKind::Irrep || !w.is_dominant_integral() {
                return Err(ModelError::NotDominantIntegral(i));
            }
            out.push(build_irrep(&self.alg, w, cap)?);
        }
        Ok(out)
    }

    pub fn total_irrep_dim(&self, cap: usize) -> Result<usize, ModelError> {
        Ok(self.irreps(cap)?.iter().map(|i| i.dim).product())
    }
}

/// Checks the site invariants and assembles a model.
pub fn validate_model<S: Scalar>(
    alg: &Arc<LieAlgebra>,
    auto: &Arc<AutoTable>,
    sites: Vec<S>,
    weights: Vec<Weight>,
    kinds: Vec<ModuleKind>,
) -> Result<Model<S>, ModelError> {
    let t = auto.t();
    let sctx = S::make_ctx(&auto.ctx);
    if sites.len() != weights.len() || sites.len() != kinds.len() {
        return Err(ModelError::LengthMismatch { sites: sites.len(), weights: weights.len() });
    }
    for (i, z) in sites.iter().enumerate() {
        if is_negligible::<S>(z) {
            return Err(ModelError::ZeroSite(i));
        }
    }
    for i in 0..sites.len() {
        for j in 0..i {
            for k in 0..t {
                let img = S::omega_pow(&sctx, k as i64).mul(&sites[j]);
                let diff = sites[i].sub(&img);
                let collide = if S::exact() {
                    diff.is_zero()
                } else {
                    let scale = sites[i].to_c64().norm().max(1.0);
                    diff.to_c64().norm() < 1e-10 * scale
                };
                if collide {
                    return Err(ModelError::OrbitCollision { i, j, k });
                }
            }
        }
    }
    Ok(Model {
        alg: alg.clone(),
        auto: auto.clone(),
        cyclo: auto.ctx.clone(),
        sctx,
        t,
        sites,
        weights,
        kinds,
    })
}

fn is_negligible<S: Scalar>(z: &S) -> bool {
    if S::exact() {
        z.is_zero()
    } else {
        z.to_c64().norm() < 1e-12
    }
}

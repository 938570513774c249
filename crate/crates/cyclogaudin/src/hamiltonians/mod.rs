//! The cyclotomic Gaudin model: validated model data, the commuting
//! quadratic Hamiltonians with their twisted self-interaction terms, the
//! generating operator S(u), eigenvalue formulas from the master weight
//! lambda(t), and the exact identities tying them together.

mod eigen;
mod model;
mod ops;
mod quad;

pub use eigen::{
    eigenvalue_e_i, eigenvalue_s, eigenvalue_s_pole, master_weight, r_gamma_eval, MasterWeight,
};
pub use model::{validate_model, Model, ModelError, ModuleKind};
pub use ops::TensorOperator;
pub use quad::{
    build_h, casimir_site, commutator_check, diagonal_operator, double_pole_identity,
    resummed_h_check, s_u_assembly, sigma_twisted_trace, u_pole_cancellation_check,
    CommutatorCertificate, SuAssembly, SuPole,
};

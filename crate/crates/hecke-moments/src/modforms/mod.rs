//! Level-one modular forms: exact q-expansions, Hecke operators,
//! eigenforms with certified eigenvalue data, and the decomposition of
//! eigenvalue powers used by moment computations.

mod basis;
mod decomp;
mod delta;
mod eigen;
mod eisenstein;
mod field;
mod hecke;
mod ntt;
mod qexp;

pub use basis::{dim_cusp, dim_modular, victor_miller_basis, victor_miller_basis_cached};
pub use decomp::{power_decomposition, PowerDecomposition};
pub use delta::{delta_expansion, tau};
pub use eigen::{
    eigenforms, export_eigenvalues, import_eigenvalues, window_eigen_sum, EigenCoefficients,
    Eigenform,
};
pub use eisenstein::eisenstein;
pub use field::{squarefree_decomposition, QuadExt};
pub use hecke::{hecke_coefficient, hecke_operator_matrix, hecke_trace};
pub use qexp::QExpansion;

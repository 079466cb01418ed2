//! Dense real/complex matrices and the decompositions everything else builds on.

mod decomp;
pub(crate) mod json;
mod mat;
mod psd;
pub mod random;
mod tol;

pub use decomp::{hermitian_eigen, numerical_rank, singular_values, svd, HermitianEigen, SvdTriple};
pub use json::{mat_from_value, parse_mat, to_json_string, MatJson};
pub use mat::{Field, Mat, C64};
pub use psd::{is_psd, psd_margin, unit_multiple_of_psd};
pub use tol::Tolerances;

/// Unit complex number with the same argument as `z`; `1` for `z = 0`.
pub fn phase(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / r
    }
}

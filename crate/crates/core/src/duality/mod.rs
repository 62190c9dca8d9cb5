//! Finite combinatorics behind the dual-dimension bounds: brute-force
//! fat shattering, binary-matrix variation, balanced Gray codes and the
//! shattered families built from them.

mod families;
mod gray;
mod packing;
mod shatter;
mod table;

pub use families::{
    bv_shattered_family, lipschitz_shattered_family, BvFamily, LipschitzFamily, ShatteredFamily,
    PACKING_TOLERANCE,
};
pub use gray::{balanced_gray_code, matrix_variation, MatrixVariation, MAX_GRAY_BITS};
pub use packing::{euclidean_packing, packing_number_greedy};
pub use shatter::{
    dual_fat_shattering_dim, fat_shattering_dim, fat_shattering_search, is_t_shattered,
    ShatteringCertificate, DEFAULT_SUBSET_BUDGET, MAX_CANDIDATES,
};
pub use table::{BinaryMatrix, FunctionTable};

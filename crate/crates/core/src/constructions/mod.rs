//! Explicit capacity-achieving degree-distribution families.

pub mod asymptotic;
pub mod catalog;
pub mod cmk;
pub mod lambert;
pub mod regular;
pub mod self_matched;
pub mod solve;

pub use asymptotic::{
    asymptotic_coeffs, asymptotic_coeffs_uncorrected, AsymptoticParams, Coefficient, EULER_GAMMA,
};
pub use catalog::{CatalogEntry, CATALOG};
pub use cmk::CmkTable;
pub use lambert::{b_star, lambert_w0, solve_b};
pub use regular::{
    aldpc_bit_regular, aldpc_check_regular, aldpc_check_regular_in, bit_regular_ara,
    bit_regular_ara_in, check_regular_ara, check_regular_ara_in, nsira_bit_regular,
    nsira_bit_regular_in, nsira_check_regular, Region,
};
pub use self_matched::{
    c_star, self_matched_aldpc, self_matched_ara, self_matched_nsira, validity_region, Interval,
};
pub use solve::solve_check_from_bit;

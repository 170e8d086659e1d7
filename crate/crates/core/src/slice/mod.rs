//! Desk-scale checks around the slice family of block matrices: the
//! characteristic polynomial identity, crossingless matchings, horizontal lifts
//! and parallel transport in fibrations by homogeneous polynomials, and the
//! `SL(2, Z)` word `(AB)^6 = I`.

mod block;
mod config;
mod fibration;
mod matching;
mod sl2;
mod sweep;

pub use block::{assemble, block_polynomial_det, charpoly, charpoly_identity_check, RationalMatrix, SliceMatrix};
pub use config::EigenConfiguration;
pub use fibration::{
    euler_identity_check, euler_identity_check_complex, horizontal_lift, lift_norm_bound, parallel_transport,
    Integrator, Path, Polynomial, TransportResult,
};
pub use matching::{catalan, enumerate_matchings, CrossinglessMatching, MATCHING_CAP};
pub use sl2::{ab_power, sl2_word_check, Sl2Matrix, SL2_A, SL2_B};
pub use sweep::{charpoly_sweep, lift_sweep, transport_study, CharpolySweep, LiftSweep, TransportStudy};

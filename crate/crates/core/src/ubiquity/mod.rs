//! Strong approximation, Hensel lifting and the resonant-function construction
//! behind the ubiquity of the sets `R_F`.

pub mod covering;
pub mod hensel;
pub mod resonant;
pub mod strong;

pub use covering::{covering_check, sample_ball, CoveringReport};
pub use hensel::{hensel_root, residual_valuation, shift_along, HenselRoot};
pub use resonant::{
    delta_neighborhood, distance_bound, resonant_construct, Certificates, NeighborhoodVerdict, ResonantCandidate, UbiquityConfig,
};
pub use strong::{only_p_denominator, p_power_exponent, strong_approx};

//! The change of variables `dy = dx/|u|`, transport velocities, gauge and
//! characteristics.

pub mod characteristics;
pub mod identities;
pub mod map;
pub mod velocity;

pub use characteristics::{characteristics_flow, AnalyticVelocity, CharacteristicPath, SampledVelocity, Velocity};
pub use identities::{appendix_identity_check, IdentityForm, IdentityResiduals};
pub use map::{build_map, forward_map, half_line_masses, inverse_map, CoordMap, ForwardImage, InverseMap, SampledProfile};
pub use velocity::{b_field, b_field_plain, big_b_field, gauge_rhs, gauge_rhs_with};

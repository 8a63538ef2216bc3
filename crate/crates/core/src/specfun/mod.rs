//! Special functions and quadrature used by the rates and the ρ forms.

pub mod bessel;
pub mod interp;
pub mod k53;
pub mod quad;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_k, BesselIOrder, BesselOrder};
pub use k53::{bessel_k53_tail, K53TailTable, K53_TAIL_SMALL_X_COEFF};

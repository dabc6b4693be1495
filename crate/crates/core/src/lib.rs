//! Numerics for the modular group and the modular J function: half-plane and
//! nome coordinates, Eisenstein series by q-expansion and by lattice sum, J
//! and its derivatives as ratios of finite expressions, Weierstrass division
//! of formal power series, and the zero-extended symbol tables the command
//! line exposes.

pub mod complex;
pub mod eisenstein;
pub mod error;
pub mod modular_group;
pub mod modular_j;
pub mod power_series;
pub mod q_transform;
pub mod sampling;
pub mod structures;

pub use complex::Complex;
pub use error::{Error, Result};

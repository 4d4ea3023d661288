//! Two 1D ideal-gas Euler domains joined by a gas-generator interface, with
//! a coupled generalized Riemann solver supplying second-order boundary data.

pub mod config;
pub mod coupled_grp;
pub mod coupled_rp;
pub mod driver;
pub mod error;
pub mod euler;
pub mod fv;
pub mod grp;
pub mod harness;
pub mod outtake;
pub mod riemann;
pub mod spline;

pub use error::{Error, Result};
pub use euler::{ConsState, GasParams, PrimState};

//! Distributed-order time-fractional wave propagation in viscoelastic media
//! whose constitutive law is given by a pair of positive measures on [0, 1].

pub mod analysis;
pub mod error;
pub mod kernel;
pub mod measures;
pub mod quad;
pub mod symbol;
pub mod thermo;

pub use error::{Error, Result};
pub use measures::{Atom, Density, Measure};
pub use symbol::{PolarComplex, SymbolPair};

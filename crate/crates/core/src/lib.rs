//! Exact algebra for abelian gauge theory over the standard G2 structure on R^7.
//!
//! Everything here runs on `alloc` only. The layers build on each other:
//!
//! - [`coeffring`]: rationals, Gaussian rationals, polynomials in `x1..x7` and parameters
//! - [`exterior`]: differential forms on R^7 with polynomial coefficients
//! - [`g2core`]: the 3-form `phi0`, its dual, the T-tensor and irreducible splittings
//! - [`cliffordspin`]: gamma matrices, the g2 generators, the invariant spinor
//! - [`instanton`]: classification of U(1) connections and supporting identities
//! - [`regdet`]: mode reduction and the formal determinant calculus
//! - [`dbcech`]: Cech and Deligne-Beilinson cochains on simplicial covers
//!
//! ```
//! use g2gauge::g2core::FundamentalForm;
//! let f = FundamentalForm::build();
//! assert_eq!(f.phi0.inner(&f.phi0).constant_value().unwrap(), g2gauge::coeffring::int(7));
//! ```
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cliffordspin;
pub mod coeffring;
pub mod dbcech;
pub mod exterior;
pub mod g2core;
pub mod instanton;
pub mod linalg;
pub mod regdet;

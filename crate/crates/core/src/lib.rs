//! Stacks of three 3D surface codes on the rectified cubic lattice.
//!
//! The stack supports a transversal CCZ between its three codes. Around the
//! construction sit verification of transversal gates, lattice surgery
//! between stacks and with 2D patches, concatenation with the [[8,3,2]]
//! cube code, and a small statevector simulator for the gadget circuits.

pub mod bits;
pub mod color;
pub mod concat;
pub mod css;
pub mod error;
pub mod fixture;
pub mod gf2;
pub mod lattice;
pub mod planar;
pub mod report;
pub mod sim;
pub mod stack;
pub mod surgery;
pub mod transversal;

pub use bits::BitVec;
pub use color::{Axis, Color, ColorPair};
pub use css::{CssCode, PauliType};
pub use error::{Error, Result};
pub use gf2::{CheckMatrix, Echelon};
pub use lattice::{build_lattice, Coord3, Lattice, LatticeDims};
pub use report::{Check, Report};
pub use stack::{build_cubic_stack, build_stack, Side, Stack};

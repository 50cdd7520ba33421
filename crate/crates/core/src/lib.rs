//! Finite-deformation electro-mechanics of photo-active polymers with two
//! electronic species, discretized by trilinear hexahedra on a box mesh that
//! embeds the body in a truncated free-space shell.

pub mod constitutive;
pub mod energy;
pub mod error;
pub mod femcore;
pub mod kinematics;
pub mod scenarios;
pub mod solvers;
pub mod species;
pub mod tensor;

pub use error::{Error, Result};
pub use species::Pair;
pub use tensor::{Mat3, Tensor4, Vec3};

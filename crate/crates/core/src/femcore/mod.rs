//! Galerkin discretization on trilinear hexahedra: matter box, free-space
//! shell and their interface.

pub mod assembly;
pub mod dofs;
pub mod element;
pub mod jumps;
pub mod loads;
pub mod mesh;

pub use assembly::{
    affine_state, assemble_damping, assemble_gram, assemble_mass, assemble_residual, assemble_system,
    assemble_tangent, evaluate_points, incremental_work, potential_energy, Increment, Model,
};
pub use dofs::{apply_dirichlet, DirichletValue, DofLayout, FieldKind, FieldState, NodalFields, NodeSet};
pub use jumps::{interface_jump_check, FacetJump};
pub use loads::{Attenuation, LoadCase, SurfacePatch, TimeProfile};
pub use mesh::{BoxMeshSpec, Face, Mesh, Region};

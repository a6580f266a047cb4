//! Geometry of area-preserving diffeomorphism groups, computationally:
//! exact trig-polynomial Hamiltonian algebra on the torus, sectional
//! curvature in the bi-invariant and right-invariant metrics, a
//! pseudo-spectral vorticity solver with conserved-quantity monitoring,
//! and the spherical-harmonic structure-constant machinery on S^2.

pub mod curvature;
pub mod error;
pub mod serialize;
pub mod solver;
pub mod spectral;
pub mod sphere;
pub mod trig;
pub mod verify;
pub mod wigner;

pub use curvature::{
    k_bi, k_from_modal_data, k_from_structure_constants, k_right_eigen, k_right_general,
    k_torus_bi, k_torus_right, nabla_hamiltonian, sym_nabla_hamiltonian, CurvatureFormula,
    CurvatureReport, ModePair,
};
pub use error::{Error, Result};
pub use solver::{
    cfl_number, simulate, simulate_with_observer, SimFailure, SimResult, SolverConfig,
    TrajectoryRecord,
};
pub use spectral::{Dealias, GridSpec, SpectralField};
pub use sphere::{
    k_sphere, k_sphere_quadrature, structure_constant, structure_constants,
    validate_against_quadrature, ylm, Harmonic, SphereCurvature, SphereQuadrature, SphericalIndex,
    StructureConstantTable,
};
pub use trig::{torus_volume, Phase, TrigMode, TrigPolynomial};
pub use wigner::{wigner3j, Wigner3jArg};

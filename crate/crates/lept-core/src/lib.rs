//! Spectral topology of a driven qubit coupled to a lossy pseudomode.
//!
//! A two-level system exchanging excitations with a damped auxiliary mode is
//! described, after truncating to at most one excitation, by a 3×3 density
//! matrix whose evolution is generated by a 9×9 Liouvillian superoperator.
//! This crate builds that generator, computes its full eigenstructure to
//! double-double precision, follows eigenvalue branches around closed loops
//! in the (drive, detuning) parameter plane, and extracts the topological
//! data — winding numbers, branch permutations, resultant invariants — that
//! classify the spectral degeneracies.
//!
//! The main entry points are [`Spectrum::compute`] for a single parameter
//! point, [`track_branches`] for loops, [`evolve`]/[`fit_eigenvalue`] for
//! the time-domain route to the same eigenvalues, and [`locate_pair_ep`]/
//! [`locate_triple_ep`] for degeneracy search.

pub mod dd;
mod error;
pub mod model;
pub mod schur;

pub mod eigen;
pub mod expm;

pub mod dynamics;

pub mod topology;
pub mod locate;
pub mod verify;

pub use error::CoreError;
pub use model::{
    analytic_eigenvalues, analytic_eigenvectors_low, build_hamiltonian, build_liouvillian,
    build_nh_hamiltonian, spectral_constants, unvec_density, vec_density, DensityMatrix,
    LiouvillianMatrix, SpectralConstants, SuperVector, SystemParams, DIM, LDIM,
};

pub use dynamics::{
    amplitudes, evolve, fit_eigenvalue, ground_state, initial_superposition_state,
    spectral_expansion, synth_noisy_run, AmplitudeSeries, FitResult, TimeGrid,
};
pub use topology::{
    char_poly, homotopy_invariant, planar_winding, resultant_scale, resultant_vector,
    sylvester_resultant, track_branches, winding_number, BranchPath, BranchTracks,
    HomotopyResult, ParameterLoop, ResultantVector, WindingResult,
};
pub use locate::{defective_flags, locate_pair_ep, locate_triple_ep, DefectiveFlag, EpLocation};
pub use verify::{run_verification, AlphaResolution, PropertyCheck, VerifyReport};
pub use eigen::{
    biorthonormalize, canonical_order, eig, eigenvalues_only, left_eig, min_cost_assignment,
    pair_to_analytic, Spectrum, DEFECTIVENESS_THRESHOLD,
};
pub use expm::expm;

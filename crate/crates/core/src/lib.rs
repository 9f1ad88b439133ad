//! Generalized analog quantum search on a two-dimensional Hilbert space.
//!
//! A marked state |w⟩ and its complement |w⊥⟩ span the space. An initial
//! state |s⟩ = e^{iu} sin β |w⟩ + cos β |w⊥⟩ evolves under a time-independent
//! Hamiltonian written either from its spectrum (E_p, E_o, α) or from its
//! couplings (E_fg, E_f, φ):
//!
//! ```text
//! H = E_fg (|w⟩⟨w| + |s⟩⟨s|) + E_f (e^{iφ} |w⟩⟨s| + e^{-iφ} |s⟩⟨w|)
//! ```
//!
//! Once the eigenbasis mixing angle is tuned to the initial state the marked
//! state is reached with probability one, for every φ, at the instants
//! t_j = ((2j - 1)π/2 - γ) / E_o with sin γ = sin β sin(α - u).
//!
//! Modules:
//! - [`qmodel`]: parameter types and conversion between the two parameterizations.
//! - [`hamiltonian`]: the 2×2 Hamiltonian in every form, plus special cases.
//! - [`evolution`]: exact and Runge–Kutta propagation, closed-form amplitudes.
//! - [`timing`]: mixing angle, measuring schedule, timing tolerance.
//! - [`fullspace`]: brute-force N-item oracle for the two-level reduction.

pub mod angle;
pub mod error;
pub mod evolution;
pub mod fullspace;
pub mod hamiltonian;
pub mod qmodel;
pub mod rk4;
pub mod timing;

pub use error::{Result, SearchError};
pub use evolution::{ProbabilityTrace, TraceSample};
pub use hamiltonian::Hamiltonian2;
pub use qmodel::{CouplingParams, InitialState, QubitState, SpectralConversion, SpectralParams};
pub use timing::{DerivedGeometry, MeasuringPlan, MeasuringSchedule};

pub use num_complex::Complex64;

/// Tolerance below which cos γ, cos β or E_o are treated as exactly zero.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Allowed deviation of |a_w|² + |a_perp|² from one.
pub const NORM_TOL: f64 = 1e-12;

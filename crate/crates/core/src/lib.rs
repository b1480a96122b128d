//! Coherence functionals for filter histories of finite-dimensional quantum
//! systems, with a phase-space representation on the odd-d qudit torus and
//! the spin-j sphere.
//!
//! ```
//! use relphase::coherence::SystemModel;
//! use relphase::histories::{FilterHistory, TemporalGrid};
//! use relphase::operator::standard::{basis_state, ket0_projector, zero_hamiltonian};
//!
//! let grid = TemporalGrid::new(vec![0.0]).unwrap();
//! let model = SystemModel::new(basis_state(2, 0), zero_hamiltonian(2), grid.clone()).unwrap();
//! let up = FilterHistory::new(&grid, [(0, ket0_projector())]).unwrap();
//! assert!((model.functional().intensity(&up).unwrap() - 1.0).abs() < 1e-15);
//! ```

pub mod coherence;
pub mod error;
pub mod histories;
pub mod operator;
pub mod phase_space;
pub mod random;
pub mod scenarios;

pub use error::{Error, Result};

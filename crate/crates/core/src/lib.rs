//! Discrete-time quantum walks whose basis states are the directed edges of a
//! graph. Every vertex acts as a multiport (beam splitter, tritter, Grover-type
//! n-port) that maps the amplitudes arriving along its edges onto the edges
//! leaving it; phase shifters can be attached to individual ports.
//!
//! Besides the simulator the crate carries the closed-form results known for
//! the ring and the line (momentum-sector spectra, stationary-phase
//! asymptotics), the unitary equivalence with the coined walk, and the
//! probability current / scattering machinery for one-dimensional chains.

pub mod asymptotics;
pub mod coined;
pub mod error;
pub mod graph;
pub mod spectral;
pub mod sum;
pub mod transport;
pub mod walk;

pub use num_complex::Complex64;

pub use error::{Result, WalkError};
pub use graph::{DirectedEdge, Graph, LocalUnitary, PortPhase, VertexId};
pub use walk::{Distribution, StepOperator, WalkState};

/// Tolerance applied to every unitarity precondition on user-supplied parameters.
pub const UNITARITY_TOL: f64 = 1e-10;

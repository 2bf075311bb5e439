//! Numerics for the macroscopic quantum uncertainty of n-qubit states.
//!
//! The central quantity is `e`, the largest commutator expectation
//! `|tr(rho [Qbar, b])|` a state admits over per-qubit projector families
//! `Qbar = (1/n) sum_i Q_i` and unit-norm operators `b`. Pure product states
//! pin it near `2/sqrt(n)`; GHZ-type superpositions reach 1; local dephasing
//! and depolarizing noise drive it back down at an `O(1/sqrt(n))` rate. This
//! crate computes `e` for dense states up to 12 qubits, applies the noise
//! models, and evaluates every closed-form bound next to its simulated value.

// Index loops in the kernels mirror the matrix math they implement.
#![allow(clippy::needless_range_loop)]

pub mod channels;
pub mod circuits;
pub mod fragility;
pub mod linalg;
pub mod observables;
pub mod optim;
pub mod sampling;
pub mod states;
pub mod verify;

pub use channels::{ApplyMode, ChannelError, ChannelSpec, InstrumentResult, LocalErrorKind, SubsetMode};
pub use circuits::{
    cat_prep_circuit, random_circuit, verify_haupt, Circuit, CircuitError, ErrorModel, Gate,
    HauptVerdict,
};
pub use fragility::{
    BoundRow, DualityProbe, EstimateConfig, FragilityError, FragilityReport, HypersurfaceReport,
    SearchScope,
};
pub use linalg::{ComplexMatrix, HermitianEigen, LinalgError};
pub use observables::{AveragingObservable, BlochFamily, FamilySpec, ObservableError};
pub use states::{BinaryWord, DensityMatrix, StateError, StateSpec, ValidationReport};
pub use verify::{CriterionReport, Level};

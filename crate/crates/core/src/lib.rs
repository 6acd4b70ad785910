//! Piecewise contractions of the unit interval: exact and floating-point
//! arithmetic, contractive maps, iterated function systems, orbits and the
//! invariant quasi-partition that counts periodic orbits.

mod error;
pub mod ifs;
pub mod maps;
pub mod numerics;
pub mod pcmap;
pub mod quasipartition;

pub use error::{Error, Result};
pub use ifs::{CappingPlan, Composition, CompositionFamily, IteratedFunctionSystem};
pub use maps::{compose, compose_word, FixedPointOptions, LipschitzBound, MapDescriptor, MapKind, Preimage};
pub use numerics::{Float, Interval, IntervalSet, Rational, Scalar};
pub use pcmap::{
    Breakpoints, Closure, InconclusiveReason, Itinerary, OrbitOptions, OrbitOutcome, OrbitRecord, PeriodicOrbit,
    PiecewiseContraction, PowerMap,
};
pub use quasipartition::{
    analyze, build_partition, compute_q, equivalence_classes, omega_limit, periodic_orbits, Analysis,
    EquivalenceClasses, QPoint, QSet, QStatus, QuasiPartition,
};

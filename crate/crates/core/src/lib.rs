//! Integer-coefficient Morse homology.
//!
//! The crate builds Morse chain complexes from critical points and signed
//! flow-line counts, computes their homology exactly, forms products of
//! complexes, extracts complexes numerically from distance-squared Morse
//! functions on embedded surfaces, and enumerates the cells of blown-up
//! unstable manifolds.
//!
//! It is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod blowup;
pub mod chain_complex;
pub mod geometry;
pub mod int_linalg;
pub mod kunneth;
pub mod orientation;

pub use blowup::{
    blowup_complex, boundary_of_blowup, enumerate_strata, BlowupComplex, BlowupError, BoundaryEntry, FlowEdge,
    FlowGraph, Stratum,
};
pub use chain_complex::{
    build_complex, euler_characteristic, homology, poincare_polynomial, ComplexError, CriticalPointId, MorseComplex,
    SignedCount,
};
pub use geometry::{
    assemble_morse_complex, find_critical_points, trace_flow_lines, CriticalPointGeom, FlowLine, GeometryConfig,
    GeometryError, MorseData, SignRule, Sphere, Surface, SurfaceRun, Torus,
};
pub use int_linalg::{homology_at, smith_normal_form, HomologyGroup, IntMatrix, LinalgError, SmithDecomposition};
pub use kunneth::{
    kunneth_groups, product_complex, verify_kunneth, KunnethError, KunnethReport, ProductGenerator, TensorSummand,
};
pub use orientation::{broken_pair_cancellation, compare_sign, concat, CancellationReport, OrientedFrame};

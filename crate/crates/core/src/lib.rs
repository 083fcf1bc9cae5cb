//! Covariant quantum relations, quantum graphs and zero-error communication
//! over finite-dimensional C*-algebras carrying finite group actions.
//!
//! Systems are direct sums `⊕ᵢ B(Hᵢ)` with the separable standard functional
//! `φ(x) = Σᵢ dᵢ·Tr(xᵢ)` (other positive orbit-constant weights are allowed).
//! Morphisms are CP maps stored by blockwise Choi matrices; relations are
//! blockwise projections; graphs are symmetric relations on one system.

pub mod classical;
pub mod cpmaps;
pub mod error;
pub mod graphs;
pub mod groups;
pub mod json;
pub mod linalg;
pub mod par;
pub mod relations;
pub mod sample;
pub mod scc;
pub mod systems;

pub use cpmaps::{compose as compose_cp, CpMorphism, KrausFamily};
pub use error::{Error, Result};
pub use graphs::{
    confusability_of, homomorphism_violations, is_homomorphism, is_reversible, is_simple_homomorphism, realize_channel, reverse_channel,
    GraphClass, QuantumGraph, Realization,
};
pub use groups::{AlgebraAction, FiniteGroup};
pub use linalg::{ComplexMatrix, Projection, Tol};
pub use relations::{compose as compose_rel, support_of, PartialFunctionFlags, QuantumRelation};
pub use scc::{
    decoder_for, encoding_is_valid, source_confusability_graph, source_from_graph, tensor_cp, tensor_system,
    verify_scheme, Source, TensorSystem,
};
pub use systems::{Element, QuantumSet, System};

//! Exact combinatorial machinery for deciding whether resolution graphs of
//! surface singularities admit rational-homology-disk (QHD) smoothings at the
//! incidence-structure level.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! plumbing tree ──> sandwich presentation ──> incidence solver ──> certificates
//!      │                    │                        │
//!      └── lattice tests    └── blowup clusters      └── Milnor-fiber invariants
//! ```
//!
//! - [`graph`]: vertex-framed trees, edge-sketch expansion, family generators,
//!   and isomorphism-free enumeration.
//! - [`lattice`]: exact intersection forms, determinants, anticanonical
//!   cycles, and diagonal lattice embeddings.
//! - [`sandwich`]: sandwich presentations with smooth or cusp curvettas,
//!   blowup clusters and Noether intersection data, star families, and the
//!   end-vertex switch.
//! - [`solver`]: exhaustive backtracking search for point/curve configurations
//!   realizing a prescribed Gram matrix.
//! - [`reduction`]: the reducing-triple contraction algorithm with delta
//!   certificates.
//! - [`homology`]: Smith normal form, Milnor-fiber ranks and torsion, and the
//!   unimodular-overlattice determinant check.
//! - [`families`]: explicit configurations (projective planes, cluster and
//!   complement families) and graph reconstruction from configurations.
//! - [`pipelines`]: end-to-end reports and enumeration sweeps.
//!
//! All arithmetic is exact: `i64` for framings and Gram entries, big integers
//! and rationals for matrix computations. No floating point anywhere.

pub mod families;
pub mod graph;
pub mod homology;
pub mod lattice;
pub mod pipelines;
pub mod reduction;
pub mod sandwich;
pub mod solver;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge ({0}, {1})")]
    UnknownEdge(String, String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateId(String),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("edge label {0} out of range (must be >= -1)")]
    BadEdgeLabel(i64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("graph does not blow down to the empty graph: {0}")]
    NotBlowdownable(String),
    #[error("invalid cluster: {0}")]
    InvalidCluster(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("reduction error: {0}")]
    Reduction(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("realizability violated: {0}")]
    Unrealizable(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

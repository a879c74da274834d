//! Graphon mixture estimation from graph datasets via motif moment vectors,
//! with the downstream procedures built on it: mixture-aware mixup
//! generation, graphon-informed edge resampling, a model-aware contrastive
//! kernel, and calculators for the motif-density concentration bounds.
//!
//! All density and graphon arithmetic is generic over the scalar type via
//! [`Real`] (f32 or f64); the `*64` aliases below fix f64, which the CLI and
//! the experiment harness use throughout.

pub mod augment;
pub mod bounds;
pub mod contrastive;
pub mod error;
pub mod graph;
pub mod graphon;
pub mod mixture;
pub mod motifs;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// f64 moment vector, the working type of the clustering pipeline.
pub type MomentVector64 = motifs::MomentVector<f64>;
/// f64 graphon.
pub type Graphon64 = graphon::Graphon<f64>;
/// f64 step graphon.
pub type StepGraphon64 = graphon::StepGraphon<f64>;
/// f64 latent positions.
pub type LatentPositions64 = graphon::LatentPositions<f64>;
/// f64 mixture model.
pub type MixtureModel64 = mixture::MixtureModel<f64>;
/// f64 embedding batch.
pub type EmbeddingBatch64 = contrastive::EmbeddingBatch<f64>;

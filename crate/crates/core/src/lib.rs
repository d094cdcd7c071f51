//! Numerical core for judging whether a set of synthetic image embeddings is
//! clinically useful, by three complementary routes:
//!
//! * [`kid`]: unbiased polynomial-kernel MMD² and subset-resampled Kernel
//!   Inception Distance reported as mean (std).
//! * [`protocol`]: the four directional comparisons per generator checkpoint
//!   (synthetic class vs. real same class and vs. real opposite class), the
//!   checkpoint sweep with per-column best markers, and a combined selection
//!   score.
//! * [`tsne`]: exact t-SNE for iteration-wise scatter plots.
//! * [`logreg`], [`metrics`] and [`augment`]: a feature-space logistic classifier
//!   trained on real vs. real+synthetic data and scored per class.
//!
//! The crate is `no_std` (it needs `alloc`). Every random draw goes through
//! [`rng::Pcg32`] seeded explicitly, and every reduction has a fixed order, so
//! results are bit-reproducible across runs and thread counts. File formats,
//! manifests, rendering and the command line live in the `clinrel` crate.

#![no_std]

extern crate alloc;

pub mod augment;
pub mod error;
pub mod features;
pub mod kid;
pub mod linalg;
pub mod logreg;
pub mod metrics;
pub mod protocol;
pub mod rng;
pub mod tsne;

pub use error::{Error, Result};
pub use features::FeatureSet;

//! Stochastic neighbour embedding for spherical data.
//!
//! `sphere_sne` embeds unit-norm, high-dimensional data onto a low-dimensional
//! sphere by matching von Mises-Fisher neighbourhood distributions in both
//! spaces (vMF-SNE). It also ships the pieces needed to compare it against a
//! plain t-SNE baseline:
//!
//! * [`vmf`]: vMF density, normalisation constant, Bessel ratios and samplers.
//! * [`affinity`]: per-point concentration calibration and the joint `P`/`Q`.
//! * [`optimizer`]: the gradient-ascent training loop with sphere retraction.
//! * [`tsne`]: Gaussian/Student-t t-SNE with momentum and early exaggeration.
//! * [`simgen`]: sign-flip cluster centres and vMF cluster sampling.
//! * [`eval`]: nearest-centre classification, accuracy and cluster entropy.
//! * [`bench`]: the grid of (clusters, concentration, method) experiments.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the CLI uses.

pub mod affinity;
pub mod bench;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod optimizer;
pub mod rng;
pub mod scalar;
pub mod simgen;
pub mod tsne;
pub mod vmf;

pub use affinity::{AffinityMatrix, CalibrationResult};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use eval::{EvalReport, Geometry};
pub use linalg::{Matrix, UnitVector};
pub use optimizer::{EmbedConfig, EmbeddingRun, Method, RunConfig};
pub use scalar::Scalar;
pub use simgen::SimSpec;
pub use tsne::{GaussianCalibration, TsneConfig};
pub use vmf::VmfParams;

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type UnitVector64 = UnitVector<f64>;
pub type UnitVector32 = UnitVector<f32>;
pub type VmfParams64 = VmfParams<f64>;
pub type VmfParams32 = VmfParams<f32>;
pub type AffinityMatrix64 = AffinityMatrix<f64>;
pub type AffinityMatrix32 = AffinityMatrix<f32>;
pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type SimSpec64 = SimSpec<f64>;
pub type EmbedConfig64 = EmbedConfig<f64>;
pub type TsneConfig64 = TsneConfig<f64>;
pub type EmbeddingRun64 = EmbeddingRun<f64>;
pub type EmbeddingRun32 = EmbeddingRun<f32>;
pub type EvalReport64 = EvalReport<f64>;

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Short-graph Fourier transform (SGFT) built on personalized-PageRank
//! windows, and the heat-kernel windowed graph Fourier transform it is
//! compared against.
//!
//! The pipeline is:
//!
//! 1. build a [`Graph`] (validated, connected, undirected);
//! 2. decompose its normalized Laplacian into an [`EigenBasis`], usually
//!    truncated to the `K` smallest eigenpairs;
//! 3. localize a window around each vertex with [`ppr::window`], the
//!    positive part of a closed-form locally-biased spectral solution;
//! 4. modulate and take inner products with a signal to get the
//!    [`SpectrogramMatrix`].
//!
//! ```
//! use sgft::{datasets, EigenBasis, LocalizationParams, OperatorKind, SignalVector};
//!
//! let g = datasets::linear_graph(40, &[(10, 11, 1e-3)])?;
//! let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 20)?;
//! let params = LocalizationParams::new(1e-3)?;
//! let f = SignalVector::new((0..40).map(|i| (i as f64 * 0.5).sin()).collect());
//! let spec = sgft::spectrogram(&g, &basis, &f, &params, None)?;
//! assert_eq!((spec.rows(), spec.frequencies()), (40, 20));
//! # Ok::<(), sgft::Error>(())
//! ```
//!
//! Per-vertex work fans out over rayon when the `parallel` feature is on
//! (the default); results are identical with or without it.

pub mod baseline;
pub mod datasets;
mod error;
pub mod export;
pub mod graph;
pub mod par;
pub mod ppr;
pub mod sgft;
pub mod spectral;

pub use error::{Error, ErrorClass, Result};
pub use graph::{Edge, Graph, SeedVector};
pub use par::Execution;
pub use ppr::{local_spectral_solution, verify_ppr, window, LocalizationParams, Shift, Window};
pub use sgft::{
    dominant_frequency_map, modulate, sgft, signature_correlation, spectrogram, spectrogram_cached,
    spectrogram_with, Method, SignalVector, SpectrogramMatrix, WindowCache,
};
pub use spectral::{EigenBasis, OperatorKind};

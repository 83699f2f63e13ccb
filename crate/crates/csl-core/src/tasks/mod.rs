//! Subspace-learning tasks runnable on raw or compressed data:
//! angle-based visualization, active subspace detection, and sparse
//! subspace clustering.

mod cluster;
mod detect;
mod visualize;

pub use cluster::{
    cluster, clustering_error, spectral_cluster, ssc_omp, ClusteringErrorRate, ClusteringResult,
    OmpParams, PhaseTimings,
};
pub use detect::{
    compress_bank, detect, detect_compressed, detection_bound, DetectionBound, SubspaceBank,
};
pub use visualize::{
    classical_mds, dissimilarity, visualize, DissimilarityMatrix, EmbeddingCoords,
};

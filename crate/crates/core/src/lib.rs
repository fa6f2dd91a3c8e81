//! Robust clustering in two steps: a trimmed first-step fit (trimmed
//! k-means or eigenvalue-restricted TCLUST) with more components than
//! groups, then hierarchical merging of those components.
//!
//! ```
//! use tkmerge::{fit_tk_merge, DataMatrix, FitConfig};
//!
//! let data = DataMatrix::from_rows(&[
//!     vec![0.0, 0.0], vec![0.1, 0.0], vec![0.0, 0.1],
//!     vec![5.0, 5.0], vec![5.1, 5.0], vec![5.0, 5.1],
//!     vec![40.0, -40.0],
//! ]).unwrap();
//! let cfg = FitConfig { big_k: 2, k: 3, alpha: 0.15, ..FitConfig::default() };
//! let fit = fit_tk_merge(&data, &cfg).unwrap();
//! assert_eq!(fit.final_partition.labels()[6], 0);
//! ```

pub mod agglomerate;
pub mod datagen;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod monitor;
pub mod pipeline;
pub mod rng;
pub mod tclust;
pub mod trimmed_kmeans;

pub use agglomerate::{cut_tree, dissimilarity, linkage_merge, merge_components, MergeResult};
pub use error::{Error, Result};
pub use metrics::{ari, percentage_gain, sn_scale, summarize, Summary};
pub use model::{
    retained_count, ClusterModel, DataMatrix, Dendrogram, Dissimilarity, FitConfig, Linkage, Method, Metric, Partition,
    TRIMMED,
};
pub use monitor::{monitor_alpha, MonitorConfig, MonitorTarget, MonitorTrace};
pub use pipeline::{fit, fit_tc_merge, fit_tk_merge, KHeuristic, PipelineResult};
pub use tclust::{fit_tclust, restrict_eigenvalues, Tclust, TclustFit};
pub use trimmed_kmeans::{fit_kmeans, fit_tkmeans, TkmFit, TrimmedKMeans};

//! Metric and topological distortion of classical data under quantum
//! encodings.
//!
//! The crate is organised bottom-up: [`metric`] holds finite metric spaces
//! and the functionals comparing them, [`quantum`] the state spaces and
//! their distances, [`encode`] the feature maps between the two, [`ph`] and
//! [`bottleneck`] persistent homology, [`mds`] classical and quantum
//! multidimensional scaling, and [`experiment`] the end-to-end pipelines used
//! by the `qtopo` binary.

pub mod bottleneck;
pub mod encode;
pub mod error;
pub mod experiment;
pub mod mds;
pub mod metric;
mod optimize;
pub mod ph;
pub mod quantum;

pub use error::{Error, Result};
pub use metric::{DistanceMatrix, PointCloud};
pub use ph::PersistenceDiagram;
pub use quantum::{DensityMatrix, PureState, State};

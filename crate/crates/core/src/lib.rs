//! Classification ensembles from randomly partitioned data.
//!
//! Training rows are scattered into `M` random partitions, each partition is
//! boosted for `T` rounds with an extreme learning machine weak learner, and
//! the per-partition models vote as one global classifier.
//!
//! ```
//! use elmboost::boosting::BoostParams;
//! use elmboost::data_io::synthetic;
//! use elmboost::elm::{activation, ElmParams};
//! use elmboost::partition::{ensemble_predict, train_ensemble, EngineConfig};
//!
//! let data = synthetic::gaussian_classes(300, 3, 7);
//! let params = BoostParams::new(5, ElmParams::new(20, activation::sigmoid()));
//! let ensemble = train_ensemble(&data, 4, &params, 42, &EngineConfig::default()).unwrap();
//! let (labels, _scores) = ensemble_predict(&ensemble, data.features()).unwrap();
//! assert_eq!(labels.len(), data.n());
//! ```

pub mod boosting;
pub mod data_io;
pub mod dataset;
pub mod elm;
pub mod error;
pub mod metrics;
pub mod partition;
pub mod pool;
pub mod registry;
pub mod sweep;

pub use dataset::{Dataset, Label};
pub use error::{Error, ErrorClass, Result};

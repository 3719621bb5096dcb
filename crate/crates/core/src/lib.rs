//! Association rule classification on mixed nominal and quantitative data.
//!
//! The pipeline discretizes quantitative attributes, mines class association
//! rules, builds a CBA rule list by data coverage pruning, and then tunes that
//! list against the raw data: refit, literal pruning, trimming, extension,
//! postpruning and default rule overlap pruning.
//!
//! ```
//! use qrule::{data::{CsvOptions, Dataset}, pipeline};
//!
//! let csv = "x,y,class\n1,a,p\n2,a,p\n3,b,p\n7,b,q\n8,b,q\n9,a,q\n";
//! let ds = Dataset::read_csv(csv.as_bytes(), &CsvOptions::default()).unwrap();
//! let model = pipeline::build_qcba(&ds, &Default::default(), &qrule::qcba::QcbaConfig::preset(6).unwrap()).unwrap();
//! assert!(model.is_classifier_ready());
//! assert_eq!(qrule::cba::accuracy(&model, &ds).unwrap(), 1.0);
//! ```

pub mod bitset;
pub mod cba;
pub mod data;
pub mod discretize;
pub mod error;
pub mod eval;
pub mod miner;
pub mod parallel;
pub mod pipeline;
pub mod qcba;
pub mod rule;

pub use data::{AttributeKind, CsvOptions, Dataset};
pub use discretize::DiscretizationMap;
pub use error::{Error, Result};
pub use miner::MinerParams;
pub use qcba::{DropMode, QcbaConfig};
pub use rule::{Literal, Rule, RuleList};

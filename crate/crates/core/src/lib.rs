//! Cross-level high-utility itemset mining over item taxonomies, and
//! sanitization of quantitative transaction databases so that chosen
//! sensitive itemsets fall below the utility threshold.

pub mod cli;
pub mod fixtures;
pub mod gidic;
pub mod io;
pub mod metrics;
pub mod miner;
pub mod model;
pub mod oracle;
pub mod sanitizer;
pub mod synth;

pub use gidic::{build_gidic, GIDic, GIDicEntry};
pub use io::{DatasetBundle, Format, NameMap};
pub use metrics::{evaluate, Measure, SanitizationReport};
pub use miner::{mine_clhuis, MiningResult};
pub use model::{ItemId, Itemset, QuantitativeDatabase, Taxonomy, Transaction, UtilityTable};
pub use sanitizer::{sanitize, EditLog, Strategy};

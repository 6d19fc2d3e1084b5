//! Benchmark objectives and instance ingestion: graph parsing, maximum
//! vertex coverage, independent-cascade influence spread, and cardinality
//! and additive toy objectives.

pub mod cascade;
pub mod coverage;
pub mod graph;
pub mod modular;
pub mod onemax;

pub use cascade::CascadeEvaluator;
pub use coverage::CoverageInstance;
pub use graph::{degree_cost_model, ingest_graph, parse_graph, Graph, GraphFormat, IngestStats};
pub use modular::Modular;
pub use onemax::OneMax;

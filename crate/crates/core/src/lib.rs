pub mod sql;
pub mod table_store;
pub mod lexicon;
pub mod executor;
pub mod hashing;
pub mod template_engine;
pub mod linearizer;
pub mod analytics;
pub mod pipeline;
pub mod plot;
pub mod metrics;
pub mod quality_gate;
pub mod postprocessor;

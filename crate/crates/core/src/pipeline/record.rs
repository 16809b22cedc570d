use serde::{Deserialize, Serialize};

use crate::analytics::OperatorClass;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateMetadata {
    pub exec_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<f64>,
    pub retained: bool,
}

/// One dataset sample as stored in the split files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub language: String,
    /// The monolingual query, unless a question sidecar supplied one.
    pub question: String,
    pub query_code_mixed: String,
    pub query_monolingual: String,
    pub input_table_id: String,
    /// Linearized answer table.
    pub answer: String,
    pub operator_classes: Vec<OperatorClass>,
    pub keyword_count: usize,
    pub gate_metadata: GateMetadata,
}

pub mod cleaning;
pub mod corpus;
pub mod decompose;
pub mod lang;
pub mod llm;
pub mod metrics;
pub mod pipeline;
pub mod prompts;
pub mod retrieval;

pub mod benchmark;
pub mod estimate;
pub mod gram_cmd;
pub mod ingest;
pub mod tune;

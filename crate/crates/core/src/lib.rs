//! Linear systems of plane curves with assigned ordinary singularities.

pub mod cert;
pub mod cli;
pub mod curve;
pub mod field;
pub mod horace;
pub mod json;
pub mod oracle;
pub mod picard;
pub mod planner;
pub mod scheme;

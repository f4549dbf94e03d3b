pub mod adapt;
pub mod codemodel;
pub mod demeter;
pub mod glob;
pub mod javafront;
pub mod pipeline;
pub mod report;

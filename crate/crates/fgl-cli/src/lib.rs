//! JSON formats and command-line surface for the formal-group
//! tameness certifier. The library half exists so integration tests
//! can parse the emitted artifacts.

pub mod app;
pub mod json;
pub mod laws;

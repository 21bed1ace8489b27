//! Expression language, serialization and command surface for voaforge.

pub mod commands;
pub mod data;
pub mod eval;
pub mod expr;
pub mod format;
pub mod parse;
pub mod suites;

//! Command-line front end: sweeps emitted as CSV, a file-based signing demo
//! and the self-test battery.

pub mod app;
pub mod config;
pub mod csv;
pub mod demo;
pub mod selftest;

//! Holds the `acceptance` test target, which runs the preset scenarios end
//! to end and prints one PASS/FAIL line per criterion.
//!
//! It lives in its own package so that a failing criterion does not stop
//! `cargo test` before the other crates' test targets have run.

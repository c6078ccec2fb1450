//! Holds the `acceptance` test target, which checks the workspace against
//! its acceptance criteria and prints one PASS or FAIL line per criterion:
//!
//! ```text
//! cargo test -p qcsample-acceptance --test acceptance
//! ```

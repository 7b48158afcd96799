//! Holds the acceptance checks; see `tests/acceptance.rs`.

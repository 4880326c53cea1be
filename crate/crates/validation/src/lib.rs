//! Test-only crate holding the acceptance suite; see `tests/acceptance.rs`.

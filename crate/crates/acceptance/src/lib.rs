//! Acceptance suite host; the criteria live in `tests/acceptance.rs`.

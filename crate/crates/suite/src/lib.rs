//! Acceptance criteria for formetric; see `tests/acceptance.rs`.

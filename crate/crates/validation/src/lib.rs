//! Acceptance suite for trendlab; see `tests/acceptance.rs`.

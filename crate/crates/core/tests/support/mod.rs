//! Shared helpers for the integration tests: brute-force oracles and random
//! generators. Each test binary uses a different subset.
#![allow(dead_code)]

pub mod gen;
pub mod oracle;

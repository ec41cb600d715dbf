//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every exported function takes strings and returns a JSON string, either
//! the result or `{"error": "..."}`. The plain Rust versions live in [`ops`]
//! so they can be tested without a browser.

use wasm_bindgen::prelude::*;

pub mod ops;

/// Checks `relation` between two systems, or computes the greatest
/// simulation when `relation` is blank.
#[wasm_bindgen]
pub fn simulate(left: &str, right: &str, relation: &str) -> String {
    ops::render(ops::simulate(left, right, relation))
}

/// Type and normal form of a term.
#[wasm_bindgen]
pub fn normalize(context: &str, term: &str) -> String {
    ops::render(ops::normalize(context, term))
}

/// Bounded denotation of a term with its base type bound to a fixture, and
/// whether it is a simulation.
#[wasm_bindgen]
pub fn denote(context: &str, term: &str, fixture: &str, bound: usize) -> String {
    ops::render(ops::denote(context, term, fixture, bound))
}

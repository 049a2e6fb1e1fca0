//! Exact q-series arithmetic over arbitrary-precision integers.
//!
//! Truncated Laurent series, q-Pochhammer products and the Rogers–Ramanujan
//! functions, m-dissections, product-form recovery, coefficient sign scans
//! and a small expression language tying them together.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dissection;
pub mod expr;
pub mod prodmake;
pub mod qproducts;
pub mod series;
pub mod signscan;
pub mod verify;

pub use series::{Series, SeriesError};

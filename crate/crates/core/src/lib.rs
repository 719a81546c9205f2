//! Exact 1-shot capacity of single-source multicast networks over small
//! alphabets.
//!
//! The crate is organised in four layers:
//!
//! - [`network`]: validated networks, edge orders, min-cuts and the
//!   supersource / routing transforms;
//! - [`coding`]: alphabets and finite fields, network codes, transmission
//!   and the unambiguity check;
//! - [`model`]: the binary feasibility model with McCormick linearization,
//!   exported as LP or MPS text;
//! - [`search`]: the native exact search engine, capacity loops,
//!   certificate verification and a brute-force oracle.

pub mod coding;
pub mod model;
pub mod network;
pub mod search;

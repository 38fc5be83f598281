//! Polar-code decoding toolkit: SC, SC-Flip and Dynamic SC-Flip decoders with
//! a simplified restart mechanism, a semi-parallel cycle model, memory
//! estimates, and an AWGN Monte Carlo harness.

pub mod channel;
pub mod codes;
pub mod sc_engine;
pub mod flip_decoder;
pub mod flip_strategies;
pub mod perf_model;
pub mod sim_harness;
pub mod presets;

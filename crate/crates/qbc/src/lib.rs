//! Quantum block compression toolkit.
//!
//! Takes a classical fixed-length block codec and a description of an i.i.d.
//! qubit source, compiles them into a reversible quantum compression circuit
//! (encoder, disentangling decoder composition, eigenbasis rotations), and
//! runs the result on a dense statevector simulator to measure compression
//! rate and fidelity against the von Neumann entropy bound.

pub mod cli;
pub mod codec;
pub mod error;
pub mod pipeline;
pub mod qsim;
pub mod revcomp;
pub mod rng;
pub mod source;

pub use error::{Error, Result};

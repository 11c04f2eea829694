//! Restoring k-vertex-connectivity of disk-model multi-robot communication
//! graphs with small maximum robot displacement.
//!
//! The main pipeline is [`restore::eascr`]: [`augment::edge_augmentation`]
//! picks the missing links, [`relocation::scr`] moves robots to realize them.
//! [`baselines`] holds the Net-Builder and Block Translation comparison
//! algorithms, [`qcp`] the exact quadratically constrained model with its
//! exporter and checker, and [`bench`] the dataset generator and experiment
//! harness.

pub mod augment;
pub mod baselines;
pub mod bench;
pub mod cli;
pub mod connectivity;
pub mod error;
mod flow;
pub mod geom;
pub mod qcp;
pub mod relocation;
pub mod restore;

pub use error::{Error, Result};
pub use geom::{build_comm_graph, CommGraph, Instance, Point};
pub use restore::{restore, Algorithm};

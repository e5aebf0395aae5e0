//! Competitive-analysis workbench for online collection of weighted items
//! from dynamic sets and dynamic queues: instance model and simulator,
//! offline optimum via bipartite matching, the online algorithms, the
//! lower-bound adversary games, and exact combinatorial analysis.

pub mod adversaries;
pub mod algorithms;
pub mod analysis;
pub mod eef;
pub mod error;
pub mod model;
pub mod opt;
pub mod sim;

pub use error::{Error, Result};
pub use model::{
    validate_instance, Anchor, Flavor, FlavorReport, Instance, InstanceBuilder, ItemIx, ItemMeta,
    Schedule, StepOps,
};
pub use sim::{derive_seed, gain, rng_from_seed, simulate, GameRng, SeenItem, StepView, World};

//! Coverings of the torus by collared rectangles and delta-adic plateau
//! partitions of unity subordinate to them.

#[allow(clippy::module_inception)]
mod cover;
mod jet;
mod pou;
mod subdomain;

pub use cover::{Cover, Multiplicity, MultiplicityLemmaReport};
pub use jet::{smoothstep, Jet4};
pub use pou::PartitionOfUnity;
pub use subdomain::Subdomain;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("cover has no cells")]
    Empty,
    #[error("collar width {0} out of range")]
    BadCollar(f64),
    #[error("collar fraction {0} too large: overlap count would exceed 9")]
    CollarTooLarge(f64),
    #[error("invalid cover parameters: {0}")]
    BadParams(String),
    #[error("partition of unity construction failed: {0}")]
    PouConstruction(String),
    #[error("multiplicity undetermined: greedy coloring found no tiling subcollection")]
    MultiplicityUndetermined,
}

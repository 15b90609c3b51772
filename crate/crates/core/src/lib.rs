//! Cubical homotopy invariants of finite directed graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`digraph`]: digraphs, maps, box products, box homs, pushouts, distances.
//! * [`interval`]: zigzag intervals, shrinkings, truncations, towers, spheres.
//! * [`grid`]: box powers of intervals as explicit coordinate grids.
//! * [`homotopy`]: homotopy classes, cube-group towers, path/loop stages, deformation retracts.
//! * [`nerve`]: truncated cubical nerves, horn fillers and the collapse maps used to compare nerves.
//! * [`homology`]: Smith normal form, normalized cubical homology, π₁ presentations, triangulation.
//! * [`cover`]: in/out closures, covers by closed subdigraphs, nerve complexes.
//! * [`covering`]: ℓ-coverings and unique lifting against horns.
//! * [`verify`]: exhaustive property suites over small corpora.

pub mod corpus;
pub mod cover;
pub mod covering;
pub mod digraph;
pub mod grid;
pub mod homology;
pub mod homotopy;
pub mod interval;
pub mod nerve;
pub mod union_find;
pub mod verify;

pub use digraph::{Digraph, DigraphError, DigraphMap, DigraphPair, Distance};
pub use interval::{Interval, Orientation, Sign};

/// Resource limits shared by all exhaustive enumerations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budgets {
    /// Maximum number of digraph maps enumerated by a single search.
    pub max_maps: usize,
    /// Maximum number of cubes across all levels of one truncated nerve.
    pub max_cubes: usize,
    /// Maximum row or column count of a matrix handed to the Smith kernel.
    pub max_matrix_dim: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_maps: 100_000,
            max_cubes: 1_000_000,
            max_matrix_dim: 20_000,
        }
    }
}

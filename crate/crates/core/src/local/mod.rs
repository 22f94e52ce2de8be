//! The completion at Q and the tree of SU(h) over it.

pub mod lattice;
pub mod series;
pub mod tree;

pub use lattice::{LMat, LVec};
pub use series::{EmbedCache, LocalElem, EXACT};
pub use tree::{
    apartment_vertex, build_ball, build_ball_at, distance, neighbors, neighbors_bruteforce, neighbors_with_lines,
    tree_act, vertex_normalize, Ball, Line, Vertex,
};

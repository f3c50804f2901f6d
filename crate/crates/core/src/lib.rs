//! Chain rotations on infix-labelled binary trees.
//!
//! A chain rotation moves a whole left or right chain past its parent with
//! the same three pointer changes as a classical rotation. This crate
//! provides the trees and moves, the constructive transformations through the
//! complete chains together with the closed-form bounds they give on the
//! chain distance `C(S,T)`, the equivalent-edge decomposition of a tree pair,
//! and an exhaustive search oracle for exact `C` and classical rotation
//! distance `D` on small trees.
//!
//! ```
//! use chainrot::{apply, Move, Tree};
//!
//! let t: Tree = "9(3(2(1,·),7(5(4,6),8)),10)".parse().unwrap();
//! let m: Move = "rot([7-5],3)".parse().unwrap();
//! let t2 = apply(&t, &m).unwrap();
//! assert_eq!(t2.to_string(), "9(7(5(3(2(1,·),4),6),8),10)");
//! assert_eq!(t.chain_counts(), (5, 6));
//! ```

pub mod bounds;
pub mod catalan;
pub mod cli;
pub mod decompose;
pub mod exact;
pub mod generators;
pub mod moves;
pub mod par;
pub mod tree;

pub use bounds::{
    chain_lower_bound, chain_upper_bound, rotation_lower_bound, rotleft, rotright,
    transform_script, verify_script, DistanceReport, Script, ScriptError,
};
pub use decompose::{equivalent_edges, split, EquivalentEdgePair, SplitPair};
pub use exact::{audit, diameter, distance, sssp, AuditReport, ExactConfig, ExactError, MoveGraph};
pub use generators::{complete_chain, figure4_pair, random_tree};
pub use moves::{apply, enumerate_moves, pointer_delta, IllegalMove, Move, MoveKind, MoveSet};
pub use par::Exec;
pub use tree::{enumerate_trees, Chain, Interval, ShapeKey, Side, Tree, TreeError, Vertex};

//! Rendering, answer formatting and derivation trees.

pub mod answer;
pub mod tree;
pub mod write;

pub use answer::{format_answer, format_answer_with};
pub use tree::{export_tree, record_tree, DerivationTree, NodeKind, TreeError, TreeNode};
pub use write::{render_term, WriteOptions};

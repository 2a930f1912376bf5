//! Guarded-command execution engine and explicit-state checker for three
//! distributed algorithms: dominant clique (DC), shortest path (SP) and
//! maximal matching (MM).
//!
//! - [`graph`]: undirected weighted graphs, generators and the fixed example graphs.
//! - [`model`]: local and global states, the [`model::Algorithm`] contract,
//!   ranks and traces.
//! - [`algo`]: the three algorithms.
//! - [`executor`]: schedulers and the fresh, AMR and AA read models.
//! - [`checker`]: exhaustive exploration and the property checks.
//! - [`cli`]: the `dagw` command line.
//!
//! # Graph files
//!
//! ```text
//! # weighted four-cycle
//! n 4
//! id 1 7
//! e 1 2 2
//! e 2 4
//! dest 4
//! ```
//!
//! `n` comes first and nodes are `1..=n`. `id` overrides a node's numeric id
//! (default: index - 1). `e u v [w]` adds an undirected edge with a positive
//! weight (default 1). `dest` fixes the shortest-path destination. Lines
//! starting with `#` are ignored.
//!
//! # Local state JSON
//!
//! Node references are 1-based and `"T"` stands for ⊤, `"inf"` for ∞:
//! `{"cliq": [1, 2]}`, `{"p": 2, "d": 4}`, `{"match": "T"}`.

pub mod algo;
pub mod checker;
pub mod cli;
pub mod executor;
pub mod graph;
pub mod model;

//! Compiler core for flexible service chain specifications.
//!
//! A chain is written in a small text DSL (`service { ... }`), parsed into an
//! abstract syntax tree, normalized into a flat component model, and expanded
//! into concrete forwarding graphs. Flexible constructs (`best-binding`,
//! `all-bindings`, `split`, replications) describe families of graphs; the
//! expansion engine enumerates or selects members of the family.
//!
//! This crate is `no_std` + `alloc` and has no runtime dependencies. File
//! formats, the catalog store, and the CLI live in the companion `chainc`
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod ast;
pub mod cost;
pub mod diag;
pub mod dot;
pub mod expand;
pub mod graph;
pub mod inline;
pub mod lexer;
pub mod model;
pub mod name;
pub mod normalize;
pub mod parser;
pub mod perm;
pub mod render;
pub mod token;
pub mod validate;

pub use ast::{Branch, Composition, Direction, NormalBranch, ServiceSpec, SplitComposition};
pub use cost::{select_best, AdjacencyPreference, CostModel, EdgeCount, SelectError, Selected};
pub use diag::{Code, Diagnostic, Severity};
pub use dot::to_dot;
pub use expand::{
    count_expansions, expand, Expansion, ExpansionCount, ExpansionMode, ExpansionPolicy,
    ExpandError, DEFAULT_CAP,
};
pub use graph::{
    graph_stats, reachability_check, FlexGroup, FlexKind, ForwardingGraph, GraphStats, InstanceId,
    NodeInstance, NodeRole,
};
pub use inline::{inline, InlineError};
pub use lexer::tokenize;
pub use model::{
    check_references, reference_report, validate_model, validate_structure, Component,
    ComponentModel, CompositionEntry, FlatBranch, FlatComposition, FlatSplit, ReferenceReport,
};
pub use name::{ComponentId, CompositionId, FunctionName, NameError};
pub use normalize::{normalize, NormalizeError};
pub use parser::{parse, ParseError};
pub use render::{dump, render};
pub use token::{Pos, Span, Token, TokenKind};
pub use validate::validate_spec;

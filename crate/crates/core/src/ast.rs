//! Abstract syntax of a service specification, as written in the DSL.
//!
//! Names are validated newtypes, so every AST carries well-formed spellings;
//! list-level invariants (non-empty groups, no duplicate functions) are
//! checked by [`crate::validate::validate_spec`] because the fields are
//! public and callers may build trees directly.

use alloc::vec::Vec;
use core::num::NonZeroU8;

use crate::name::{ComponentId, FunctionName};

/// Traffic direction. Metadata only: it never changes expansion and is not
/// serialized; parsing always yields [`Direction::Forward`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Forward,
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceSpec {
    /// Traversed in order; must be non-empty.
    pub compositions: Vec<Composition>,
    pub direction: Direction,
}

impl ServiceSpec {
    pub fn new(compositions: Vec<Composition>) -> Self {
        ServiceSpec {
            compositions,
            direction: Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Composition {
    /// Fixed-order chain of sub-compositions. The parser never produces this
    /// variant (comma lists become sibling compositions); it exists so
    /// programmatic builders can group, and it renders as its items joined
    /// by commas.
    Sequence(Vec<Composition>),
    /// Functions whose traversal order is chosen by the tool.
    BestBinding(Vec<FunctionName>),
    /// Functions traversable in every order; expands to a full mesh.
    AllBindings(Vec<FunctionName>),
    Split(SplitComposition),
    Single(FunctionName),
    /// Reference to a component defined elsewhere (`link(<id>)`).
    LinkRef(ComponentId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitComposition {
    /// The classifier function that fans traffic out.
    pub splitter: FunctionName,
    /// Optional best-binding stage between the splitter and the branches;
    /// empty means absent.
    pub pre: Vec<FunctionName>,
    /// Must be non-empty.
    pub branches: Vec<Branch>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Branch {
    Normal(NormalBranch),
    /// Bypass: traffic skips this split entirely.
    Pass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalBranch {
    /// Must be non-empty.
    pub body: Vec<Composition>,
    /// Number of identical copies of the branch; `.N` in the DSL, default 1.
    pub replications: NonZeroU8,
}

impl NormalBranch {
    pub fn new(body: Vec<Composition>) -> Self {
        NormalBranch {
            body,
            replications: NonZeroU8::MIN,
        }
    }

    pub fn replicated(body: Vec<Composition>, replications: NonZeroU8) -> Self {
        NormalBranch { body, replications }
    }
}

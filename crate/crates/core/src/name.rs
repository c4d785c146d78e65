//! Validated identifier newtypes. A name that exists is a name that is
//! well-formed; later stages never re-check spelling.

use alloc::string::String;
use core::fmt;

pub const KEYWORDS: [&str; 5] = ["service", "best-binding", "all-bindings", "split", "pass"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NameError {
    Empty,
    /// First character must be a letter or underscore.
    BadStart(char),
    /// Later characters must be letters, digits, underscore, or hyphen.
    BadChar(char),
    /// The name collides with a grammar keyword.
    Keyword(&'static str),
    /// Dotted ids must not contain empty segments (`a..b`, leading or trailing dot).
    EmptySegment,
}

impl fmt::Display for NameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NameError::Empty => write!(f, "name is empty"),
            NameError::BadStart(c) => write!(f, "name starts with {c:?}, expected letter or '_'"),
            NameError::BadChar(c) => write!(f, "name contains {c:?}"),
            NameError::Keyword(k) => write!(f, "{k:?} is a reserved keyword"),
            NameError::EmptySegment => write!(f, "id contains an empty segment"),
        }
    }
}

impl core::error::Error for NameError {}

fn check_word(s: &str) -> Result<(), NameError> {
    let mut chars = s.chars();
    let first = chars.next().ok_or(NameError::Empty)?;
    if !(first.is_ascii_alphabetic() || first == '_') {
        return Err(NameError::BadStart(first));
    }
    for c in chars {
        if !(c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(NameError::BadChar(c));
        }
    }
    Ok(())
}

/// A network function name: `[A-Za-z_][A-Za-z0-9_-]*`, never a keyword.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunctionName(String);

impl FunctionName {
    pub fn new(s: impl Into<String>) -> Result<Self, NameError> {
        let s = s.into();
        check_word(&s)?;
        for k in KEYWORDS {
            if s == k {
                return Err(NameError::Keyword(k));
            }
        }
        Ok(FunctionName(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FunctionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Keywords other than `pass` are legal id segments; `pass` is reserved so a
/// branch target can never be mistaken for a bypass. Dots separate namespace
/// segments (`store-entry.c0`).
fn check_id(s: &str) -> Result<(), NameError> {
    if s.is_empty() {
        return Err(NameError::Empty);
    }
    for seg in s.split('.') {
        if seg.is_empty() {
            return Err(NameError::EmptySegment);
        }
        check_word(seg)?;
        if seg == "pass" {
            return Err(NameError::Keyword("pass"));
        }
    }
    Ok(())
}

/// Identifier of a service component (`c0`, `firewall-stage`, `acme.c2`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentId(String);

impl ComponentId {
    pub fn new(s: impl Into<String>) -> Result<Self, NameError> {
        let s = s.into();
        check_id(&s)?;
        Ok(ComponentId(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when the id has no dot, i.e. is usable as a catalog entry name.
    pub fn is_simple(&self) -> bool {
        !self.0.contains('.')
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Identifier of a composition within a component (`k0`, `ingress`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompositionId(String);

impl CompositionId {
    pub fn new(s: impl Into<String>) -> Result<Self, NameError> {
        let s = s.into();
        check_id(&s)?;
        Ok(CompositionId(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CompositionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

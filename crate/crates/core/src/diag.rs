//! Diagnostics shared by every stage: a severity, a stable machine-readable
//! code, a human message, and a path into the offending structure.

use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

/// Stable diagnostic codes. The string form is part of the tool's contract:
/// scripts match on it, so variants are never renamed, only added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    EmptyService,
    EmptySequence,
    EmptyFunctions,
    EmptySplit,
    EmptyBranch,
    DupFunction,
    AllPass,
    InvalidSpec,
    DupId,
    EmptyComponent,
    BadStart,
    UnresolvedRef,
    CyclicRef,
    InvalidModel,
    CapExceeded,
    EmptyCandidates,
    UnreachableNode,
    DanglingPass,
    Malformed,
    Schema,
    Range,
    UnknownKey,
    NotFound,
    DuplicateName,
    Io,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::EmptyService => "E_EMPTY_SERVICE",
            Code::EmptySequence => "E_EMPTY_SEQUENCE",
            Code::EmptyFunctions => "E_EMPTY_FUNCTIONS",
            Code::EmptySplit => "E_EMPTY_SPLIT",
            Code::EmptyBranch => "E_EMPTY_BRANCH",
            Code::DupFunction => "E_DUP_FUNCTION",
            Code::AllPass => "W_ALL_PASS",
            Code::InvalidSpec => "E_INVALID_SPEC",
            Code::DupId => "E_DUP_ID",
            Code::EmptyComponent => "E_EMPTY_COMPONENT",
            Code::BadStart => "E_BAD_START",
            Code::UnresolvedRef => "E_UNRESOLVED_REF",
            Code::CyclicRef => "E_CYCLIC_REF",
            Code::InvalidModel => "E_INVALID_MODEL",
            Code::CapExceeded => "E_CAP_EXCEEDED",
            Code::EmptyCandidates => "E_EMPTY_CANDIDATES",
            Code::UnreachableNode => "E_UNREACHABLE_NODE",
            Code::DanglingPass => "W_DANGLING_PASS",
            Code::Malformed => "E_MALFORMED",
            Code::Schema => "E_SCHEMA",
            Code::Range => "E_RANGE",
            Code::UnknownKey => "W_UNKNOWN_KEY",
            Code::NotFound => "E_NOT_FOUND",
            Code::DuplicateName => "E_DUPLICATE_NAME",
            Code::Io => "E_IO",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    /// Slash-separated path into the spec, model, document, or graph.
    pub path: String,
}

impl Diagnostic {
    pub fn error(code: Code, path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            path: path.into(),
        }
    }

    pub fn warning(code: Code, path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            path: path.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} @ {}", self.code, self.message, self.path)
    }
}

/// True if any diagnostic in the slice is an error (warnings alone are fine).
pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_includes_code_message_and_path() {
        let d = Diagnostic::error(Code::DupFunction, "/compositions/0", "duplicate function NAT");
        assert_eq!(
            d.to_string(),
            "E_DUP_FUNCTION: duplicate function NAT @ /compositions/0"
        );
    }

    #[test]
    fn warnings_are_not_errors() {
        let diags = [Diagnostic::warning(Code::AllPass, "/", "every branch is pass")];
        assert!(!has_errors(&diags));
    }
}

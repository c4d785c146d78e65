//! Recursive-descent parser for the chain DSL.
//!
//! Grammar, with `#` comments and whitespace between any two tokens:
//!
//! ```text
//! start      := 'service' '{' comp (',' comp)* '}'
//! comp       := functions | bestbind | allbinds | split | func | linkref
//! functions  := func (',' func)*
//! bestbind   := 'best-binding' '{' functions '}'
//! allbinds   := 'all-bindings' '{' functions '}'
//! split      := 'split' '{' func (',' bestbind)? (';' branch)+ '}'
//! branch     := comp (',' comp)* ('.' num)? | 'pass'
//! linkref    := 'link' '(' component-id ')'
//! num        := nonzero digit*
//! ```
//!
//! Stops at the first error; no recovery. A comma list at the top level
//! becomes sibling entries of [`ServiceSpec::compositions`], and a comma
//! list in a branch becomes the branch body, so the parser never emits
//! [`Composition::Sequence`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::num::NonZeroU8;

use crate::ast::{Branch, Composition, NormalBranch, ServiceSpec, SplitComposition};
use crate::lexer::tokenize;
use crate::name::{ComponentId, FunctionName};
use crate::token::{Span, Token, TokenKind};

/// Nesting bound for recursive constructs; deeper input is rejected, not
/// truncated, so parsing stays stack-safe on adversarial input.
pub const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub span: Span,
    /// Token descriptions that would have been accepted here; empty for
    /// lexical errors.
    pub expected: Vec<&'static str>,
}

impl ParseError {
    pub(crate) fn new(message: impl Into<String>, span: Span) -> Self {
        ParseError {
            message: message.into(),
            span,
            expected: Vec::new(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

impl core::error::Error for ParseError {}

pub fn parse(source: &str) -> Result<ServiceSpec, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser {
        tokens,
        i: 0,
        depth: 0,
    };
    let spec = p.service()?;
    p.expect(TokenKind::Eof)?;
    Ok(spec)
}

struct Parser {
    tokens: Vec<Token>,
    i: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.i]
    }

    fn peek2(&self) -> Option<&Token> {
        self.tokens.get(self.i + 1)
    }

    fn at(&self, kind: TokenKind) -> bool {
        self.peek().kind == kind
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.i].clone();
        if self.i + 1 < self.tokens.len() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.at(kind) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[kind.describe()]))
        }
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        let found = self.peek();
        let found_desc = match found.kind {
            TokenKind::Eof => String::from(TokenKind::Eof.describe()),
            TokenKind::Ident | TokenKind::Number => format!("{:?}", found.text),
            other => String::from(other.describe()),
        };
        let message = match expected {
            [one] => format!("expected {one}, found {found_desc}"),
            many => format!("expected one of {}; found {found_desc}", many.join(", ")),
        };
        ParseError {
            message,
            span: found.span,
            expected: expected.into(),
        }
    }

    fn service(&mut self) -> Result<ServiceSpec, ParseError> {
        self.expect(TokenKind::Service)?;
        self.expect(TokenKind::LBrace)?;
        let mut compositions = Vec::new();
        compositions.push(self.composition(false)?);
        while self.at(TokenKind::Comma) {
            self.bump();
            compositions.push(self.composition(false)?);
        }
        self.expect(TokenKind::RBrace)?;
        Ok(ServiceSpec::new(compositions))
    }

    fn composition(&mut self, in_branch: bool) -> Result<Composition, ParseError> {
        if self.depth >= MAX_DEPTH {
            return Err(ParseError::new(
                format!("nesting deeper than {MAX_DEPTH} levels"),
                self.peek().span,
            ));
        }
        self.depth += 1;
        let result = self.composition_inner(in_branch);
        self.depth -= 1;
        result
    }

    fn composition_inner(&mut self, in_branch: bool) -> Result<Composition, ParseError> {
        match self.peek().kind {
            TokenKind::Ident => {
                // `link` opens a component reference only when '(' follows;
                // otherwise it is an ordinary function name.
                if self.peek().text == "link"
                    && self.peek2().map(|t| t.kind) == Some(TokenKind::LParen)
                {
                    self.bump();
                    self.bump();
                    let id = self.component_id()?;
                    self.expect(TokenKind::RParen)?;
                    Ok(Composition::LinkRef(id))
                } else {
                    Ok(Composition::Single(self.function_name()?))
                }
            }
            TokenKind::BestBinding => {
                self.bump();
                Ok(Composition::BestBinding(self.braced_functions()?))
            }
            TokenKind::AllBindings => {
                self.bump();
                Ok(Composition::AllBindings(self.braced_functions()?))
            }
            TokenKind::Split => {
                self.bump();
                Ok(Composition::Split(self.split_body()?))
            }
            _ => {
                let mut expected = alloc::vec![
                    "identifier",
                    "'best-binding'",
                    "'all-bindings'",
                    "'split'",
                ];
                if in_branch {
                    expected.push("'pass'");
                }
                Err(self.unexpected(&expected))
            }
        }
    }

    fn split_body(&mut self) -> Result<SplitComposition, ParseError> {
        self.expect(TokenKind::LBrace)?;
        let splitter = self.function_name()?;
        let mut pre = Vec::new();
        if self.at(TokenKind::Comma) {
            self.bump();
            // After the splitter, ',' can only introduce the optional
            // best-binding stage.
            self.expect(TokenKind::BestBinding)?;
            pre = self.braced_functions()?;
        }
        let mut branches = Vec::new();
        self.expect(TokenKind::Semicolon)?;
        branches.push(self.branch()?);
        while self.at(TokenKind::Semicolon) {
            self.bump();
            branches.push(self.branch()?);
        }
        self.expect(TokenKind::RBrace)?;
        Ok(SplitComposition {
            splitter,
            pre,
            branches,
        })
    }

    fn branch(&mut self) -> Result<Branch, ParseError> {
        if self.at(TokenKind::Pass) {
            self.bump();
            return Ok(Branch::Pass);
        }
        let mut body = Vec::new();
        body.push(self.composition(true)?);
        while self.at(TokenKind::Comma) {
            self.bump();
            body.push(self.composition(true)?);
        }
        let replications = if self.at(TokenKind::Dot) {
            self.bump();
            self.replication_count()?
        } else {
            NonZeroU8::MIN
        };
        Ok(Branch::Normal(NormalBranch { body, replications }))
    }

    fn replication_count(&mut self) -> Result<NonZeroU8, ParseError> {
        let tok = self.expect(TokenKind::Number)?;
        let value: u32 = tok
            .text
            .parse()
            .map_err(|_| ParseError::new(format!("count {:?} is out of range", tok.text), tok.span))?;
        u8::try_from(value)
            .ok()
            .and_then(NonZeroU8::new)
            .ok_or_else(|| {
                ParseError::new(
                    format!("replication count {value} is out of range 1..255"),
                    tok.span,
                )
            })
    }

    fn braced_functions(&mut self) -> Result<Vec<FunctionName>, ParseError> {
        self.expect(TokenKind::LBrace)?;
        let mut fs = Vec::new();
        fs.push(self.function_name()?);
        while self.at(TokenKind::Comma) {
            self.bump();
            fs.push(self.function_name()?);
        }
        self.expect(TokenKind::RBrace)?;
        Ok(fs)
    }

    fn function_name(&mut self) -> Result<FunctionName, ParseError> {
        let tok = self.expect(TokenKind::Ident)?;
        FunctionName::new(tok.text.as_str())
            .map_err(|e| ParseError::new(format!("bad function name: {e}"), tok.span))
    }

    /// Dot-separated id; keyword segments are legal except `pass`.
    fn component_id(&mut self) -> Result<ComponentId, ParseError> {
        let mut text = String::new();
        loop {
            let seg = self.id_segment()?;
            text.push_str(&seg);
            if self.at(TokenKind::Dot) {
                self.bump();
                text.push('.');
            } else {
                break;
            }
        }
        ComponentId::new(text.as_str())
            .map_err(|e| ParseError::new(format!("bad component id: {e}"), self.peek().span))
    }

    fn id_segment(&mut self) -> Result<String, ParseError> {
        match self.peek().kind {
            TokenKind::Ident
            | TokenKind::Service
            | TokenKind::BestBinding
            | TokenKind::AllBindings
            | TokenKind::Split => Ok(self.bump().text),
            _ => Err(self.unexpected(&["identifier"])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn f(s: &str) -> FunctionName {
        FunctionName::new(s).unwrap()
    }

    #[test]
    fn parses_simple_chain() {
        let spec = parse("service { BNG , NAT }").unwrap();
        assert_eq!(
            spec,
            ServiceSpec::new(vec![
                Composition::Single(f("BNG")),
                Composition::Single(f("NAT")),
            ])
        );
    }

    #[test]
    fn parses_best_binding_group() {
        let spec = parse("service { best-binding { BNG , NAT } }").unwrap();
        assert_eq!(
            spec.compositions,
            vec![Composition::BestBinding(vec![f("BNG"), f("NAT")])]
        );
    }

    #[test]
    fn parses_split_with_pass() {
        let spec = parse("service { split { BNG ; HTTP-Filter ; pass } , NAT }").unwrap();
        assert_eq!(
            spec.compositions,
            vec![
                Composition::Split(SplitComposition {
                    splitter: f("BNG"),
                    pre: vec![],
                    branches: vec![
                        Branch::Normal(NormalBranch::new(vec![Composition::Single(f(
                            "HTTP-Filter"
                        ))])),
                        Branch::Pass,
                    ],
                }),
                Composition::Single(f("NAT")),
            ]
        );
    }

    #[test]
    fn parses_multi_function_branch() {
        let spec = parse(
            "service { PGW , FW , split { DPI ; Header-Enr ; LI , Video-Opt ; TCP-Opt } }",
        )
        .unwrap();
        assert_eq!(spec.compositions.len(), 3);
        let Composition::Split(split) = &spec.compositions[2] else {
            panic!("third composition is a split");
        };
        assert_eq!(split.branches.len(), 3);
        let Branch::Normal(mid) = &split.branches[1] else {
            panic!("middle branch is normal");
        };
        assert_eq!(
            mid.body,
            vec![
                Composition::Single(f("LI")),
                Composition::Single(f("Video-Opt")),
            ]
        );
    }

    #[test]
    fn parses_all_bindings_group() {
        let spec = parse("service { all-bindings { WOC , EdgeFW , MON , ADC , AppFW } }").unwrap();
        assert_eq!(
            spec.compositions,
            vec![Composition::AllBindings(vec![
                f("WOC"),
                f("EdgeFW"),
                f("MON"),
                f("ADC"),
                f("AppFW"),
            ])]
        );
    }

    #[test]
    fn replication_suffix_binds_to_its_branch() {
        let spec = parse("service { split { CL ; VNF-A.3 ; VNF-B } }").unwrap();
        let Composition::Split(split) = &spec.compositions[0] else {
            panic!()
        };
        let Branch::Normal(a) = &split.branches[0] else {
            panic!()
        };
        let Branch::Normal(b) = &split.branches[1] else {
            panic!()
        };
        assert_eq!(a.replications.get(), 3);
        assert_eq!(b.replications.get(), 1);
    }

    #[test]
    fn replication_applies_to_whole_comma_body() {
        let spec = parse("service { split { CL ; A , B.2 } }").unwrap();
        let Composition::Split(split) = &spec.compositions[0] else {
            panic!()
        };
        let Branch::Normal(nb) = &split.branches[0] else {
            panic!()
        };
        assert_eq!(nb.body.len(), 2);
        assert_eq!(nb.replications.get(), 2);
    }

    #[test]
    fn replication_range_is_enforced() {
        assert!(parse("service { split { CL ; A.255 } }").is_ok());
        let err = parse("service { split { CL ; A.256 } }").unwrap_err();
        assert!(err.message.contains("out of range"), "{}", err.message);
        assert!(parse("service { split { CL ; A.99999999999 } }").is_err());
    }

    #[test]
    fn split_pre_stage_is_a_best_binding() {
        let spec =
            parse("service { split { CL , best-binding { A , B } ; X ; pass } }").unwrap();
        let Composition::Split(split) = &spec.compositions[0] else {
            panic!()
        };
        assert_eq!(split.pre, vec![f("A"), f("B")]);
        assert_eq!(split.branches.len(), 2);
    }

    #[test]
    fn comma_after_splitter_requires_best_binding() {
        let err = parse("service { split { CL , A ; X } }").unwrap_err();
        assert_eq!(err.expected, vec!["'best-binding'"]);
    }

    #[test]
    fn empty_service_reports_expected_set() {
        let err = parse("service{}").unwrap_err();
        assert_eq!(
            err.expected,
            vec!["identifier", "'best-binding'", "'all-bindings'", "'split'"]
        );
        assert_eq!(err.span.start.col, 9);
    }

    #[test]
    fn pass_is_only_legal_as_a_branch() {
        assert!(parse("service { pass }").is_err());
        let err = parse("service { split { CL ; A , pass } }").unwrap_err();
        // In branch position the expected set advertises 'pass'.
        assert!(err.expected.contains(&"'pass'"));
    }

    #[test]
    fn dot_outside_a_branch_is_an_error() {
        assert!(parse("service { A.2 }").is_err());
        assert!(parse("service { best-binding { A.2 , B } }").is_err());
    }

    #[test]
    fn link_reference_parses_with_dotted_id() {
        let spec = parse("service { link(acme.c2) , A }").unwrap();
        assert_eq!(
            spec.compositions[0],
            Composition::LinkRef(ComponentId::new("acme.c2").unwrap())
        );
    }

    #[test]
    fn link_without_parens_is_a_function() {
        let spec = parse("service { link }").unwrap();
        assert_eq!(spec.compositions, vec![Composition::Single(f("link"))]);
    }

    #[test]
    fn link_target_may_use_keyword_segments_but_not_pass() {
        assert!(parse("service { link(split.c0) }").is_ok());
        assert!(parse("service { link(pass) }").is_err());
    }

    #[test]
    fn trailing_input_is_rejected() {
        let err = parse("service { A } B").unwrap_err();
        assert_eq!(err.expected, vec!["end of input"]);
    }

    #[test]
    fn missing_comma_between_compositions_is_rejected() {
        assert!(parse("service { A B }").is_err());
    }

    #[test]
    fn nested_splits_parse() {
        let spec =
            parse("service { split { A ; split { B ; C ; pass } ; D } }").unwrap();
        let Composition::Split(outer) = &spec.compositions[0] else {
            panic!()
        };
        let Branch::Normal(nb) = &outer.branches[0] else {
            panic!()
        };
        assert!(matches!(nb.body[0], Composition::Split(_)));
    }

    #[test]
    fn depth_limit_is_a_parse_error() {
        let mut src = "service { ".to_string();
        for _ in 0..70 {
            src.push_str("split { S ; ");
        }
        src.push('A');
        for _ in 0..70 {
            src.push_str(" }");
        }
        src.push_str(" }");
        let err = parse(&src).unwrap_err();
        assert!(err.message.contains("nesting"), "{}", err.message);
    }

    #[test]
    fn direction_defaults_to_forward() {
        let spec = parse("service { A }").unwrap();
        assert_eq!(spec.direction, crate::ast::Direction::Forward);
    }

    #[test]
    fn error_message_carries_position() {
        let err = parse("service {\n  BNG ,\n}").unwrap_err();
        assert_eq!(err.span.start.line, 3);
        assert!(err.to_string().starts_with("line 3, column 1:"));
    }
}

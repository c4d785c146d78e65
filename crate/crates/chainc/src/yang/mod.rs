//! Instance documents for component models.
//!
//! The wire shape mirrors the service data model: a `specification`
//! container with a `starting-component` leaf and a `service-component`
//! list; each component holds a keyed `compositions` list whose entries
//! carry exactly one composition variant (`single-function`,
//! `sequence-functions`, `best-binding-functions`, `all-bindings-functions`,
//! a split group, or a `composition` link). JSON uses the module-qualified
//! root key, XML a `specification` root element in the module namespace.
//!
//! Both readers funnel into one schema pass: the format layer extracts a
//! [`RawDoc`] (strings, integers, lists, plus type diagnostics), and
//! [`assemble`] applies the rules that do not depend on the carrier
//! format: required leafs, name syntax, variant exclusivity, branch rules,
//! id uniqueness, integer ranges.

mod json;
mod xml;

use chainc_core::diag::{has_errors, Code, Diagnostic};
use chainc_core::{validate_structure, Component, ComponentId, ComponentModel, CompositionEntry,
    CompositionId, FlatBranch, FlatComposition, FlatSplit, FunctionName};
use std::fmt;

/// Name of the data model module; qualifies the JSON root key.
pub const MODULE_NAME: &str = "flexible-service-specification";
/// Root key of a JSON instance document.
pub const JSON_ROOT_KEY: &str = "flexible-service-specification:specification";
/// Namespace of the XML `specification` root element.
pub const XML_NAMESPACE: &str = "urn:chainc:flexible-service-specification";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Xml,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Xml => "xml",
        }
    }

    /// Recognize a file extension (without the dot, any case).
    pub fn from_extension(ext: &str) -> Option<Format> {
        match ext.to_ascii_lowercase().as_str() {
            "json" => Some(Format::Json),
            "xml" => Some(Format::Xml),
            _ => None,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How to treat parts of a document the schema does not define.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Unknown keys, elements, and attributes are errors.
    #[default]
    Strict,
    /// Unknown parts are skipped with a warning.
    Lax,
}

/// Successful load: the model plus any non-fatal diagnostics (unknown-key
/// warnings in lax mode, structural warnings such as an all-pass split).
#[derive(Debug)]
pub struct Loaded {
    pub model: ComponentModel,
    pub diagnostics: Vec<Diagnostic>,
}

/// Rejected document or model. Carries the full diagnostic list; at least
/// one entry is an error.
#[derive(Debug)]
pub struct InstanceError {
    pub diagnostics: Vec<Diagnostic>,
}

impl InstanceError {
    fn malformed(message: impl Into<String>) -> Self {
        InstanceError {
            diagnostics: vec![Diagnostic::error(Code::Malformed, "/", message.into())],
        }
    }

    /// Code of the first error, for exit-status mapping.
    pub fn code(&self) -> Code {
        self.diagnostics
            .iter()
            .find(|d| d.is_error())
            .map(|d| d.code)
            .expect("an instance error carries at least one error diagnostic")
    }
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.diagnostics.iter().filter(|d| d.is_error()).count();
        write!(f, "instance rejected ({n} error(s))")?;
        if let Some(first) = self.diagnostics.iter().find(|d| d.is_error()) {
            write!(f, "; first: {first}")?;
        }
        Ok(())
    }
}

impl std::error::Error for InstanceError {}

/// Serialize a model as an instance document. Fails when the model is
/// structurally broken (duplicate ids, empty bodies); unresolved links are
/// fine, they serialize as `composition` references.
pub fn to_instance(model: &ComponentModel, format: Format) -> Result<String, InstanceError> {
    let diagnostics = validate_structure(model);
    if has_errors(&diagnostics) {
        return Err(InstanceError { diagnostics });
    }
    Ok(match format {
        Format::Json => json::write(model),
        Format::Xml => xml::write(model),
    })
}

/// Parse an instance document strictly: unknown keys are errors.
pub fn from_instance(text: &str, format: Format) -> Result<Loaded, InstanceError> {
    from_instance_with(text, format, Strictness::Strict)
}

pub fn from_instance_with(
    text: &str,
    format: Format,
    strictness: Strictness,
) -> Result<Loaded, InstanceError> {
    let (raw, mut diagnostics) = match format {
        Format::Json => json::read(text, strictness)?,
        Format::Xml => xml::read(text, strictness)?,
    };
    let model = assemble(raw, &mut diagnostics);
    if has_errors(&diagnostics) {
        return Err(InstanceError { diagnostics });
    }
    let model = model.expect("error-free assembly yields a model");
    diagnostics.extend(validate_structure(&model));
    if has_errors(&diagnostics) {
        return Err(InstanceError { diagnostics });
    }
    Ok(Loaded { model, diagnostics })
}

/// A field as the format layer saw it: absent, present but already
/// diagnosed as the wrong shape, or usable.
#[derive(Debug, Clone, Default)]
pub(crate) enum Raw<T> {
    #[default]
    Missing,
    /// Present with a type problem the reader has already reported.
    Bad,
    Given(T),
}

impl<T> Raw<T> {
    fn is_present(&self) -> bool {
        !matches!(self, Raw::Missing)
    }

    fn given(&self) -> Option<&T> {
        match self {
            Raw::Given(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Default)]
pub(crate) struct RawDoc {
    pub start: Raw<String>,
    pub components: Vec<RawComponent>,
}

#[derive(Debug, Default)]
pub(crate) struct RawComponent {
    /// Diagnostic path of this list entry.
    pub path: String,
    pub id: Raw<String>,
    pub compositions: Vec<RawComposition>,
}

#[derive(Debug, Default)]
pub(crate) struct RawComposition {
    pub path: String,
    pub id: Raw<String>,
    pub single: Raw<String>,
    pub sequence: Raw<Vec<String>>,
    pub best: Raw<Vec<String>>,
    pub all: Raw<Vec<String>>,
    pub link: Raw<String>,
    pub splitter: Raw<String>,
    pub pre: Raw<Vec<String>>,
    pub branches: Raw<Vec<RawBranch>>,
}

#[derive(Debug, Default)]
pub(crate) struct RawBranch {
    pub path: String,
    pub id: Raw<i128>,
    pub target: Raw<String>,
    pub pass: Raw<String>,
    pub replications: Raw<i128>,
}

fn schema_error(diags: &mut Vec<Diagnostic>, path: &str, message: impl Into<String>) {
    diags.push(Diagnostic::error(Code::Schema, path, message.into()));
}

fn parse_component_id(
    value: &Raw<String>,
    path: &str,
    diags: &mut Vec<Diagnostic>,
) -> Option<ComponentId> {
    let s = value.given()?;
    match ComponentId::new(s.clone()) {
        Ok(id) => Some(id),
        Err(e) => {
            schema_error(diags, path, format!("bad component reference {s:?}: {e}"));
            None
        }
    }
}

fn parse_functions(
    values: &[String],
    path: &str,
    diags: &mut Vec<Diagnostic>,
) -> Vec<FunctionName> {
    let mut out = Vec::new();
    for (i, s) in values.iter().enumerate() {
        match FunctionName::new(s.clone()) {
            Ok(f) => out.push(f),
            Err(e) => schema_error(
                diags,
                &format!("{path}/{i}"),
                format!("bad function name {s:?}: {e}"),
            ),
        }
    }
    out
}

/// Carrier-independent schema pass. Returns a model only when it could be
/// built completely; the caller treats any error diagnostic as fatal either
/// way.
pub(crate) fn assemble(raw: RawDoc, diags: &mut Vec<Diagnostic>) -> Option<ComponentModel> {
    if !raw.start.is_present() {
        schema_error(diags, "/specification", "starting-component is required");
    }
    let start = parse_component_id(&raw.start, "/specification/starting-component", diags);

    let mut components = Vec::new();
    let mut complete = true;
    let mut seen_components: Vec<ComponentId> = Vec::new();
    for rc in &raw.components {
        match assemble_component(rc, &mut seen_components, diags) {
            Some(c) => components.push(c),
            None => complete = false,
        }
    }

    match (start, complete) {
        (Some(starting_component), true) => Some(ComponentModel {
            starting_component,
            components,
        }),
        _ => None,
    }
}

fn assemble_component(
    rc: &RawComponent,
    seen: &mut Vec<ComponentId>,
    diags: &mut Vec<Diagnostic>,
) -> Option<Component> {
    if !rc.id.is_present() {
        schema_error(diags, &rc.path, "component-identifier is required");
    }
    let id = parse_component_id(&rc.id, &format!("{}/component-identifier", rc.path), diags);
    if let Some(id) = &id {
        if seen.contains(id) {
            diags.push(Diagnostic::error(
                Code::DupId,
                &rc.path,
                format!("duplicate component id {id}"),
            ));
        } else {
            seen.push(id.clone());
        }
    }

    let mut compositions = Vec::new();
    let mut complete = true;
    let mut seen_entries: Vec<CompositionId> = Vec::new();
    for rk in &rc.compositions {
        match assemble_composition(rk, &mut seen_entries, diags) {
            Some(entry) => compositions.push(entry),
            None => complete = false,
        }
    }

    match (id, complete) {
        (Some(id), true) => Some(Component { id, compositions }),
        _ => None,
    }
}

fn assemble_composition(
    rk: &RawComposition,
    seen: &mut Vec<CompositionId>,
    diags: &mut Vec<Diagnostic>,
) -> Option<CompositionEntry> {
    if !rk.id.is_present() {
        schema_error(diags, &rk.path, "composition-identifier is required");
    }
    let id = match rk.id.given() {
        Some(s) => match CompositionId::new(s.clone()) {
            Ok(id) => {
                if seen.contains(&id) {
                    diags.push(Diagnostic::error(
                        Code::DupId,
                        &rk.path,
                        format!("duplicate composition id {id}"),
                    ));
                } else {
                    seen.push(id.clone());
                }
                Some(id)
            }
            Err(e) => {
                schema_error(
                    diags,
                    &format!("{}/composition-identifier", rk.path),
                    format!("bad composition id {s:?}: {e}"),
                );
                None
            }
        },
        None => None,
    };

    let split_present = rk.splitter.is_present() || rk.pre.is_present() || rk.branches.is_present();
    let mut variants: Vec<&'static str> = Vec::new();
    if rk.single.is_present() {
        variants.push("single-function");
    }
    if rk.sequence.is_present() {
        variants.push("sequence-functions");
    }
    if rk.best.is_present() {
        variants.push("best-binding-functions");
    }
    if rk.all.is_present() {
        variants.push("all-bindings-functions");
    }
    if split_present {
        variants.push("splitter-function");
    }
    if rk.link.is_present() {
        variants.push("composition");
    }

    if variants.is_empty() {
        schema_error(
            diags,
            &rk.path,
            "composition carries no variant; expected exactly one of single-function, \
             sequence-functions, best-binding-functions, all-bindings-functions, \
             splitter-function, composition",
        );
        return None;
    }
    if variants.len() > 1 {
        schema_error(
            diags,
            &rk.path,
            format!(
                "composition carries {} variants ({}); expected exactly one",
                variants.len(),
                variants.join(", ")
            ),
        );
        return None;
    }

    let body = match variants[0] {
        "single-function" => {
            let s = rk.single.given()?;
            match FunctionName::new(s.clone()) {
                Ok(f) => Some(FlatComposition::Single(f)),
                Err(e) => {
                    schema_error(
                        diags,
                        &format!("{}/single-function", rk.path),
                        format!("bad function name {s:?}: {e}"),
                    );
                    None
                }
            }
        }
        "sequence-functions" => {
            let path = format!("{}/sequence-functions", rk.path);
            let vs = rk.sequence.given()?;
            let before = diags.len();
            let fs = parse_functions(vs, &path, diags);
            (diags.len() == before).then_some(FlatComposition::Sequence(fs))
        }
        "best-binding-functions" => {
            let path = format!("{}/best-binding-functions", rk.path);
            let vs = rk.best.given()?;
            let before = diags.len();
            let fs = parse_functions(vs, &path, diags);
            (diags.len() == before).then_some(FlatComposition::BestBinding(fs))
        }
        "all-bindings-functions" => {
            let path = format!("{}/all-bindings-functions", rk.path);
            let vs = rk.all.given()?;
            let before = diags.len();
            let fs = parse_functions(vs, &path, diags);
            (diags.len() == before).then_some(FlatComposition::AllBindings(fs))
        }
        "composition" => {
            let path = format!("{}/composition", rk.path);
            parse_component_id(&rk.link, &path, diags).map(FlatComposition::LinkRef)
        }
        "splitter-function" => assemble_split(rk, diags),
        _ => unreachable!("variant list is fixed"),
    };

    match (id, body) {
        (Some(id), Some(body)) => Some(CompositionEntry { id, body }),
        _ => None,
    }
}

fn assemble_split(rk: &RawComposition, diags: &mut Vec<Diagnostic>) -> Option<FlatComposition> {
    if !rk.splitter.is_present() {
        schema_error(
            diags,
            &rk.path,
            "split composition requires splitter-function",
        );
    }
    if !rk.branches.is_present() {
        schema_error(
            diags,
            &rk.path,
            "split composition requires outgoing-branches",
        );
    }

    let splitter = match rk.splitter.given() {
        Some(s) => match FunctionName::new(s.clone()) {
            Ok(f) => Some(f),
            Err(e) => {
                schema_error(
                    diags,
                    &format!("{}/splitter-function", rk.path),
                    format!("bad function name {s:?}: {e}"),
                );
                None
            }
        },
        None => None,
    };

    let pre = match rk.pre.given() {
        Some(vs) => {
            let path = format!("{}/optional-best-binding", rk.path);
            let before = diags.len();
            let fs = parse_functions(vs, &path, diags);
            (diags.len() == before).then_some(fs)
        }
        None => {
            if rk.pre.is_present() {
                None
            } else {
                Some(Vec::new())
            }
        }
    };

    let branches = match rk.branches.given() {
        Some(rbs) => {
            let mut out = Vec::new();
            let mut complete = true;
            let mut seen_ids: Vec<i128> = Vec::new();
            for rb in rbs {
                match assemble_branch(rb, &mut seen_ids, diags) {
                    Some(b) => out.push(b),
                    None => complete = false,
                }
            }
            complete.then_some(out)
        }
        None => None,
    };

    match (splitter, pre, branches) {
        (Some(splitter), Some(pre), Some(branches)) => Some(FlatComposition::Split(FlatSplit {
            splitter,
            pre,
            branches,
        })),
        _ => None,
    }
}

fn assemble_branch(
    rb: &RawBranch,
    seen: &mut Vec<i128>,
    diags: &mut Vec<Diagnostic>,
) -> Option<FlatBranch> {
    if !rb.id.is_present() {
        schema_error(diags, &rb.path, "branch-id is required");
    }
    if let Some(&id) = rb.id.given() {
        if !(0..=255).contains(&id) {
            diags.push(Diagnostic::error(
                Code::Range,
                format!("{}/branch-id", rb.path),
                format!("branch-id {id} is out of range 0..255"),
            ));
        } else if seen.contains(&id) {
            schema_error(diags, &rb.path, format!("duplicate branch-id {id}"));
        } else {
            seen.push(id);
        }
    }

    match (rb.target.is_present(), rb.pass.is_present()) {
        (false, false) => {
            schema_error(
                diags,
                &rb.path,
                "branch carries no variant; expected composition or string",
            );
            return None;
        }
        (true, true) => {
            schema_error(diags, &rb.path, "branch carries both composition and string");
            return None;
        }
        _ => {}
    }

    if rb.pass.is_present() {
        if rb.replications.is_present() {
            schema_error(
                diags,
                &rb.path,
                "replications is only valid with composition",
            );
            return None;
        }
        let s = rb.pass.given()?;
        if s != "pass" {
            schema_error(
                diags,
                &format!("{}/string", rb.path),
                format!("string leaf must be \"pass\", found {s:?}"),
            );
            return None;
        }
        return Some(FlatBranch::Pass);
    }

    let target = parse_component_id(&rb.target, &format!("{}/composition", rb.path), diags)?;
    let replications = match &rb.replications {
        Raw::Missing => 1u8,
        Raw::Bad => return None,
        Raw::Given(n) => {
            if !(1..=255).contains(n) {
                diags.push(Diagnostic::error(
                    Code::Range,
                    format!("{}/replications", rb.path),
                    format!("replications {n} is out of range 1..255"),
                ));
                return None;
            }
            *n as u8
        }
    };
    Some(FlatBranch::Normal {
        target,
        replications: replications.try_into().expect("range starts at 1"),
    })
}

/// Renumber branches 1..n for serialization; readers accept any unique ids
/// but writers always emit this canonical numbering.
pub(crate) fn branch_ids(branches: &[FlatBranch]) -> impl Iterator<Item = (u8, &FlatBranch)> {
    branches
        .iter()
        .enumerate()
        .map(|(i, b)| ((i + 1) as u8, b))
}

pub(crate) fn unknown_key(
    diags: &mut Vec<Diagnostic>,
    strictness: Strictness,
    path: &str,
    what: impl fmt::Display,
) {
    match strictness {
        Strictness::Strict => {
            diags.push(Diagnostic::error(
                Code::Schema,
                path,
                format!("unknown {what}"),
            ));
        }
        Strictness::Lax => {
            diags.push(Diagnostic::warning(
                Code::UnknownKey,
                path,
                format!("unknown {what} (skipped)"),
            ));
        }
    }
}

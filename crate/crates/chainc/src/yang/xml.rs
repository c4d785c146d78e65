//! XML carrier. Reading goes through a small element tree built from
//! `quick_xml` events; writing is a plain indenting emitter, so output
//! formatting is stable regardless of parser version.

use quick_xml::events::Event;
use quick_xml::Reader;

use chainc_core::diag::Diagnostic;
use chainc_core::{ComponentModel, FlatBranch, FlatComposition};

use super::{
    branch_ids, unknown_key, InstanceError, Raw, RawBranch, RawComponent, RawComposition, RawDoc,
    Strictness, XML_NAMESPACE,
};

#[derive(Debug, Default)]
struct Elem {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Elem>,
    text: String,
}

fn parse_tree(text: &str) -> Result<Elem, InstanceError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    let malformed = |e: quick_xml::Error| InstanceError::malformed(format!("invalid XML: {e}"));
    let mut stack: Vec<Elem> = Vec::new();
    let mut root: Option<Elem> = None;

    loop {
        match reader.read_event().map_err(malformed)? {
            Event::Start(e) => {
                if stack.is_empty() && root.is_some() {
                    return Err(InstanceError::malformed("multiple root elements"));
                }
                stack.push(open(&e).map_err(malformed)?);
            }
            Event::Empty(e) => {
                if stack.is_empty() && root.is_some() {
                    return Err(InstanceError::malformed("multiple root elements"));
                }
                let elem = open(&e).map_err(malformed)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(elem),
                    None => root = Some(elem),
                }
            }
            Event::End(_) => {
                let elem = stack.pop().expect("reader validates element nesting");
                match stack.last_mut() {
                    Some(parent) => parent.children.push(elem),
                    None => root = Some(elem),
                }
            }
            Event::Text(t) => {
                let value = t.unescape().map_err(malformed)?;
                match stack.last_mut() {
                    Some(elem) => elem.text.push_str(&value),
                    None => {
                        if !value.trim().is_empty() {
                            return Err(InstanceError::malformed(
                                "text content outside the root element",
                            ));
                        }
                    }
                }
            }
            Event::CData(t) => {
                let value = String::from_utf8_lossy(&t.into_inner()).into_owned();
                match stack.last_mut() {
                    Some(elem) => elem.text.push_str(&value),
                    None => {
                        return Err(InstanceError::malformed(
                            "text content outside the root element",
                        ))
                    }
                }
            }
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
    }
    root.ok_or_else(|| InstanceError::malformed("document has no root element"))
}

fn open(e: &quick_xml::events::BytesStart<'_>) -> Result<Elem, quick_xml::Error> {
    let mut elem = Elem {
        name: String::from_utf8_lossy(e.name().as_ref()).into_owned(),
        ..Elem::default()
    };
    for attr in e.attributes() {
        let attr = attr.map_err(quick_xml::Error::InvalidAttr)?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = attr.unescape_value()?.into_owned();
        elem.attrs.push((key, value));
    }
    Ok(elem)
}

pub(super) fn read(
    text: &str,
    strictness: Strictness,
) -> Result<(RawDoc, Vec<Diagnostic>), InstanceError> {
    let root = parse_tree(text)?;
    let mut diags = Vec::new();
    let mut doc = RawDoc::default();

    if root.name != "specification" {
        super::schema_error(
            &mut diags,
            "/",
            format!("root element must be \"specification\", found {:?}", root.name),
        );
        return Ok((doc, diags));
    }
    check_root_attrs(&root, strictness, &mut diags);
    if !root.text.trim().is_empty() {
        super::schema_error(&mut diags, "/specification", "unexpected text content");
    }

    let mut components = 0usize;
    for child in &root.children {
        match child.name.as_str() {
            "starting-component" => {
                take_leaf(child, &mut doc.start, "/specification/starting-component", &mut diags);
            }
            "service-component" => {
                let path = format!("/specification/service-component/{components}");
                components += 1;
                doc.components
                    .push(read_component(child, &path, strictness, &mut diags));
            }
            other => unknown_key(
                &mut diags,
                strictness,
                &format!("/specification/{other}"),
                format!("element <{other}>"),
            ),
        }
    }
    Ok((doc, diags))
}

fn check_root_attrs(root: &Elem, strictness: Strictness, diags: &mut Vec<Diagnostic>) {
    let mut xmlns = None;
    for (key, value) in &root.attrs {
        if key == "xmlns" {
            xmlns = Some(value.as_str());
        } else {
            unknown_key(diags, strictness, "/specification", format!("attribute {key:?}"));
        }
    }
    match xmlns {
        Some(ns) if ns == XML_NAMESPACE => {}
        Some(ns) => super::schema_error(
            diags,
            "/specification",
            format!("namespace must be {XML_NAMESPACE:?}, found {ns:?}"),
        ),
        None => {
            if matches!(strictness, Strictness::Strict) {
                super::schema_error(
                    diags,
                    "/specification",
                    format!("root element must declare xmlns={XML_NAMESPACE:?}"),
                );
            } else {
                diags.push(Diagnostic::warning(
                    chainc_core::Code::UnknownKey,
                    "/specification",
                    format!("missing xmlns={XML_NAMESPACE:?}"),
                ));
            }
        }
    }
}

fn read_component(
    elem: &Elem,
    path: &str,
    strictness: Strictness,
    diags: &mut Vec<Diagnostic>,
) -> RawComponent {
    let mut rc = RawComponent {
        path: path.to_owned(),
        ..RawComponent::default()
    };
    check_container(elem, path, strictness, diags);
    let mut entries = 0usize;
    for child in &elem.children {
        match child.name.as_str() {
            "component-identifier" => {
                take_leaf(child, &mut rc.id, &format!("{path}/component-identifier"), diags);
            }
            "compositions" => {
                let epath = format!("{path}/compositions/{entries}");
                entries += 1;
                rc.compositions
                    .push(read_composition(child, &epath, strictness, diags));
            }
            other => unknown_key(
                diags,
                strictness,
                &format!("{path}/{other}"),
                format!("element <{other}>"),
            ),
        }
    }
    rc
}

fn read_composition(
    elem: &Elem,
    path: &str,
    strictness: Strictness,
    diags: &mut Vec<Diagnostic>,
) -> RawComposition {
    let mut rk = RawComposition {
        path: path.to_owned(),
        ..RawComposition::default()
    };
    check_container(elem, path, strictness, diags);
    let mut branches = 0usize;
    for child in &elem.children {
        let kpath = format!("{path}/{}", child.name);
        match child.name.as_str() {
            "composition-identifier" => take_leaf(child, &mut rk.id, &kpath, diags),
            "single-function" => take_leaf(child, &mut rk.single, &kpath, diags),
            "sequence-functions" => push_leaf(child, &mut rk.sequence, &kpath, diags),
            "best-binding-functions" => push_leaf(child, &mut rk.best, &kpath, diags),
            "all-bindings-functions" => push_leaf(child, &mut rk.all, &kpath, diags),
            "composition" => take_leaf(child, &mut rk.link, &kpath, diags),
            "splitter-function" => take_leaf(child, &mut rk.splitter, &kpath, diags),
            "optional-best-binding" => push_leaf(child, &mut rk.pre, &kpath, diags),
            "outgoing-branches" => {
                let bpath = format!("{path}/outgoing-branches/{branches}");
                branches += 1;
                let branch = read_branch(child, &bpath, strictness, diags);
                match &mut rk.branches {
                    Raw::Given(list) => list.push(branch),
                    slot @ Raw::Missing => *slot = Raw::Given(vec![branch]),
                    Raw::Bad => {}
                }
            }
            other => unknown_key(
                diags,
                strictness,
                &kpath,
                format!("element <{other}>"),
            ),
        }
    }
    rk
}

fn read_branch(
    elem: &Elem,
    path: &str,
    strictness: Strictness,
    diags: &mut Vec<Diagnostic>,
) -> RawBranch {
    let mut rb = RawBranch {
        path: path.to_owned(),
        ..RawBranch::default()
    };
    check_container(elem, path, strictness, diags);
    for child in &elem.children {
        let kpath = format!("{path}/{}", child.name);
        match child.name.as_str() {
            "branch-id" => take_int_leaf(child, &mut rb.id, &kpath, diags),
            "composition" => take_leaf(child, &mut rb.target, &kpath, diags),
            "replications" => take_int_leaf(child, &mut rb.replications, &kpath, diags),
            "string" => take_leaf(child, &mut rb.pass, &kpath, diags),
            other => unknown_key(
                diags,
                strictness,
                &kpath,
                format!("element <{other}>"),
            ),
        }
    }
    rb
}

/// Containers hold elements only: stray text or attributes are schema noise.
fn check_container(elem: &Elem, path: &str, strictness: Strictness, diags: &mut Vec<Diagnostic>) {
    if !elem.text.trim().is_empty() {
        super::schema_error(diags, path, "unexpected text content");
    }
    for (key, _) in &elem.attrs {
        unknown_key(diags, strictness, path, format!("attribute {key:?}"));
    }
}

fn leaf_value(elem: &Elem, path: &str, diags: &mut Vec<Diagnostic>) -> Raw<String> {
    if !elem.children.is_empty() {
        super::schema_error(
            diags,
            path,
            format!("<{}> must be a text leaf", elem.name),
        );
        return Raw::Bad;
    }
    if !elem.attrs.is_empty() {
        super::schema_error(
            diags,
            path,
            format!("<{}> must not carry attributes", elem.name),
        );
        return Raw::Bad;
    }
    Raw::Given(elem.text.clone())
}

fn take_leaf(elem: &Elem, slot: &mut Raw<String>, path: &str, diags: &mut Vec<Diagnostic>) {
    if slot.is_present() {
        super::schema_error(
            diags,
            path,
            format!("<{}> appears more than once", elem.name),
        );
        *slot = Raw::Bad;
        return;
    }
    *slot = leaf_value(elem, path, diags);
}

fn push_leaf(elem: &Elem, slot: &mut Raw<Vec<String>>, path: &str, diags: &mut Vec<Diagnostic>) {
    let index = match slot {
        Raw::Given(list) => list.len(),
        _ => 0,
    };
    match leaf_value(elem, &format!("{path}/{index}"), diags) {
        Raw::Given(value) => match slot {
            Raw::Given(list) => list.push(value),
            slot @ Raw::Missing => *slot = Raw::Given(vec![value]),
            Raw::Bad => {}
        },
        _ => *slot = Raw::Bad,
    }
}

fn take_int_leaf(elem: &Elem, slot: &mut Raw<i128>, path: &str, diags: &mut Vec<Diagnostic>) {
    let mut text_slot = Raw::Missing;
    if slot.is_present() {
        super::schema_error(
            diags,
            path,
            format!("<{}> appears more than once", elem.name),
        );
        *slot = Raw::Bad;
        return;
    }
    take_leaf(elem, &mut text_slot, path, diags);
    *slot = match text_slot {
        Raw::Given(text) => match text.trim().parse::<i128>() {
            Ok(n) => Raw::Given(n),
            Err(_) => {
                super::schema_error(
                    diags,
                    path,
                    format!("<{}> must be an integer, found {text:?}", elem.name),
                );
                Raw::Bad
            }
        },
        Raw::Bad => Raw::Bad,
        Raw::Missing => Raw::Missing,
    };
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

struct Emitter {
    out: String,
    depth: usize,
}

impl Emitter {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn leaf(&mut self, name: &str, value: &str) {
        self.line(&format!("<{name}>{}</{name}>", escape(value)));
    }

    fn nested(&mut self, open: &str, name: &str, body: impl FnOnce(&mut Self)) {
        self.line(open);
        self.depth += 1;
        body(self);
        self.depth -= 1;
        self.line(&format!("</{name}>"));
    }
}

pub(super) fn write(model: &ComponentModel) -> String {
    let mut em = Emitter {
        out: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"),
        depth: 0,
    };
    let open = format!("<specification xmlns=\"{XML_NAMESPACE}\">");
    em.nested(&open, "specification", |em| {
        em.leaf("starting-component", model.starting_component.as_str());
        for comp in &model.components {
            em.nested("<service-component>", "service-component", |em| {
                em.leaf("component-identifier", comp.id.as_str());
                for entry in &comp.compositions {
                    em.nested("<compositions>", "compositions", |em| {
                        em.leaf("composition-identifier", entry.id.as_str());
                        write_body(em, &entry.body);
                    });
                }
            });
        }
    });
    em.out
}

fn write_body(em: &mut Emitter, body: &FlatComposition) {
    match body {
        FlatComposition::Single(f) => em.leaf("single-function", f.as_str()),
        FlatComposition::Sequence(fs) => {
            for f in fs {
                em.leaf("sequence-functions", f.as_str());
            }
        }
        FlatComposition::BestBinding(fs) => {
            for f in fs {
                em.leaf("best-binding-functions", f.as_str());
            }
        }
        FlatComposition::AllBindings(fs) => {
            for f in fs {
                em.leaf("all-bindings-functions", f.as_str());
            }
        }
        FlatComposition::LinkRef(target) => em.leaf("composition", target.as_str()),
        FlatComposition::Split(split) => {
            em.leaf("splitter-function", split.splitter.as_str());
            for f in &split.pre {
                em.leaf("optional-best-binding", f.as_str());
            }
            for (bid, branch) in branch_ids(&split.branches) {
                em.nested("<outgoing-branches>", "outgoing-branches", |em| {
                    em.leaf("branch-id", &bid.to_string());
                    match branch {
                        FlatBranch::Normal {
                            target,
                            replications,
                        } => {
                            em.leaf("composition", target.as_str());
                            if replications.get() > 1 {
                                em.leaf("replications", &replications.get().to_string());
                            }
                        }
                        FlatBranch::Pass => em.leaf("string", "pass"),
                    }
                });
            }
        }
    }
}

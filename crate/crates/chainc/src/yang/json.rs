//! JSON carrier: `serde_json` value tree in, pretty-printed text out.
//! Key order on output follows the data model, so documents diff cleanly.

use serde_json::{json, Map, Value};

use chainc_core::diag::Diagnostic;
use chainc_core::{ComponentModel, FlatBranch, FlatComposition};

use super::{
    branch_ids, unknown_key, InstanceError, Raw, RawBranch, RawComponent, RawComposition, RawDoc,
    Strictness, JSON_ROOT_KEY,
};

pub(super) fn read(
    text: &str,
    strictness: Strictness,
) -> Result<(RawDoc, Vec<Diagnostic>), InstanceError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| InstanceError::malformed(format!("invalid JSON: {e}")))?;
    let mut diags = Vec::new();
    let mut doc = RawDoc::default();

    let Some(root) = as_object(&value, "/", "document root", &mut diags) else {
        return Ok((doc, diags));
    };
    let mut spec_value = None;
    for (key, v) in root {
        if key == JSON_ROOT_KEY {
            spec_value = Some(v);
        } else {
            unknown_key(&mut diags, strictness, &format!("/{key}"), format!("key {key:?}"));
        }
    }
    let Some(spec_value) = spec_value else {
        super::schema_error(&mut diags, "/", format!("root key {JSON_ROOT_KEY:?} is required"));
        return Ok((doc, diags));
    };
    let Some(spec) = as_object(spec_value, "/specification", "specification", &mut diags) else {
        return Ok((doc, diags));
    };

    for (key, v) in spec {
        let path = format!("/specification/{key}");
        match key.as_str() {
            "starting-component" => doc.start = string_field(v, &path, &mut diags),
            "service-component" => {
                if let Some(items) = as_array(v, &path, &mut diags) {
                    for (i, item) in items.iter().enumerate() {
                        let cpath = format!("{path}/{i}");
                        if let Some(obj) = as_object(item, &cpath, "service-component entry", &mut diags) {
                            doc.components
                                .push(read_component(obj, &cpath, strictness, &mut diags));
                        }
                    }
                }
            }
            _ => unknown_key(&mut diags, strictness, &path, format!("key {key:?}")),
        }
    }
    Ok((doc, diags))
}

fn read_component(
    obj: &Map<String, Value>,
    path: &str,
    strictness: Strictness,
    diags: &mut Vec<Diagnostic>,
) -> RawComponent {
    let mut rc = RawComponent {
        path: path.to_owned(),
        ..RawComponent::default()
    };
    for (key, v) in obj {
        let kpath = format!("{path}/{key}");
        match key.as_str() {
            "component-identifier" => rc.id = string_field(v, &kpath, diags),
            "compositions" => {
                if let Some(items) = as_array(v, &kpath, diags) {
                    for (i, item) in items.iter().enumerate() {
                        let epath = format!("{kpath}/{i}");
                        if let Some(obj) = as_object(item, &epath, "compositions entry", diags) {
                            rc.compositions
                                .push(read_composition(obj, &epath, strictness, diags));
                        }
                    }
                }
            }
            _ => unknown_key(diags, strictness, &kpath, format!("key {key:?}")),
        }
    }
    rc
}

fn read_composition(
    obj: &Map<String, Value>,
    path: &str,
    strictness: Strictness,
    diags: &mut Vec<Diagnostic>,
) -> RawComposition {
    let mut rk = RawComposition {
        path: path.to_owned(),
        ..RawComposition::default()
    };
    for (key, v) in obj {
        let kpath = format!("{path}/{key}");
        match key.as_str() {
            "composition-identifier" => rk.id = string_field(v, &kpath, diags),
            "single-function" => rk.single = string_field(v, &kpath, diags),
            "sequence-functions" => rk.sequence = string_list_field(v, &kpath, diags),
            "best-binding-functions" => rk.best = string_list_field(v, &kpath, diags),
            "all-bindings-functions" => rk.all = string_list_field(v, &kpath, diags),
            "composition" => rk.link = string_field(v, &kpath, diags),
            "splitter-function" => rk.splitter = string_field(v, &kpath, diags),
            "optional-best-binding" => rk.pre = string_list_field(v, &kpath, diags),
            "outgoing-branches" => {
                rk.branches = match as_array(v, &kpath, diags) {
                    None => Raw::Bad,
                    Some(items) => {
                        let mut out = Vec::new();
                        for (i, item) in items.iter().enumerate() {
                            let bpath = format!("{kpath}/{i}");
                            if let Some(obj) =
                                as_object(item, &bpath, "outgoing-branches entry", diags)
                            {
                                out.push(read_branch(obj, &bpath, strictness, diags));
                            }
                        }
                        Raw::Given(out)
                    }
                };
            }
            _ => unknown_key(diags, strictness, &kpath, format!("key {key:?}")),
        }
    }
    rk
}

fn read_branch(
    obj: &Map<String, Value>,
    path: &str,
    strictness: Strictness,
    diags: &mut Vec<Diagnostic>,
) -> RawBranch {
    let mut rb = RawBranch {
        path: path.to_owned(),
        ..RawBranch::default()
    };
    for (key, v) in obj {
        let kpath = format!("{path}/{key}");
        match key.as_str() {
            "branch-id" => rb.id = int_field(v, &kpath, diags),
            "composition" => rb.target = string_field(v, &kpath, diags),
            "replications" => rb.replications = int_field(v, &kpath, diags),
            "string" => rb.pass = string_field(v, &kpath, diags),
            _ => unknown_key(diags, strictness, &kpath, format!("key {key:?}")),
        }
    }
    rb
}

fn as_object<'a>(
    v: &'a Value,
    path: &str,
    what: &str,
    diags: &mut Vec<Diagnostic>,
) -> Option<&'a Map<String, Value>> {
    match v {
        Value::Object(m) => Some(m),
        _ => {
            super::schema_error(diags, path, format!("{what} must be an object"));
            None
        }
    }
}

fn as_array<'a>(v: &'a Value, path: &str, diags: &mut Vec<Diagnostic>) -> Option<&'a Vec<Value>> {
    match v {
        Value::Array(a) => Some(a),
        _ => {
            super::schema_error(diags, path, "value must be an array");
            None
        }
    }
}

fn string_field(v: &Value, path: &str, diags: &mut Vec<Diagnostic>) -> Raw<String> {
    match v {
        Value::String(s) => Raw::Given(s.clone()),
        _ => {
            super::schema_error(diags, path, "value must be a string");
            Raw::Bad
        }
    }
}

fn string_list_field(v: &Value, path: &str, diags: &mut Vec<Diagnostic>) -> Raw<Vec<String>> {
    let Some(items) = as_array(v, path, diags) else {
        return Raw::Bad;
    };
    let mut out = Vec::new();
    let mut clean = true;
    for (i, item) in items.iter().enumerate() {
        match item {
            Value::String(s) => out.push(s.clone()),
            _ => {
                super::schema_error(diags, &format!("{path}/{i}"), "value must be a string");
                clean = false;
            }
        }
    }
    if clean {
        Raw::Given(out)
    } else {
        Raw::Bad
    }
}

fn int_field(v: &Value, path: &str, diags: &mut Vec<Diagnostic>) -> Raw<i128> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Raw::Given(i as i128)
            } else if let Some(u) = n.as_u64() {
                Raw::Given(u as i128)
            } else {
                super::schema_error(diags, path, "value must be an integer");
                Raw::Bad
            }
        }
        _ => {
            super::schema_error(diags, path, "value must be an integer");
            Raw::Bad
        }
    }
}

pub(super) fn write(model: &ComponentModel) -> String {
    let mut spec = Map::new();
    spec.insert(
        "starting-component".to_owned(),
        json!(model.starting_component.as_str()),
    );
    if !model.components.is_empty() {
        let comps: Vec<Value> = model.components.iter().map(write_component).collect();
        spec.insert("service-component".to_owned(), Value::Array(comps));
    }
    let mut root = Map::new();
    root.insert(JSON_ROOT_KEY.to_owned(), Value::Object(spec));
    let mut text = serde_json::to_string_pretty(&Value::Object(root))
        .expect("value tree serializes without IO");
    text.push('\n');
    text
}

fn write_component(comp: &chainc_core::Component) -> Value {
    let mut m = Map::new();
    m.insert("component-identifier".to_owned(), json!(comp.id.as_str()));
    if !comp.compositions.is_empty() {
        let entries: Vec<Value> = comp
            .compositions
            .iter()
            .map(|e| write_composition(&e.id, &e.body))
            .collect();
        m.insert("compositions".to_owned(), Value::Array(entries));
    }
    Value::Object(m)
}

fn names(fs: &[chainc_core::FunctionName]) -> Value {
    Value::Array(fs.iter().map(|f| json!(f.as_str())).collect())
}

fn write_composition(id: &chainc_core::CompositionId, body: &FlatComposition) -> Value {
    let mut m = Map::new();
    m.insert("composition-identifier".to_owned(), json!(id.as_str()));
    match body {
        FlatComposition::Single(f) => {
            m.insert("single-function".to_owned(), json!(f.as_str()));
        }
        FlatComposition::Sequence(fs) => {
            m.insert("sequence-functions".to_owned(), names(fs));
        }
        FlatComposition::BestBinding(fs) => {
            m.insert("best-binding-functions".to_owned(), names(fs));
        }
        FlatComposition::AllBindings(fs) => {
            m.insert("all-bindings-functions".to_owned(), names(fs));
        }
        FlatComposition::LinkRef(target) => {
            m.insert("composition".to_owned(), json!(target.as_str()));
        }
        FlatComposition::Split(split) => {
            m.insert("splitter-function".to_owned(), json!(split.splitter.as_str()));
            if !split.pre.is_empty() {
                m.insert("optional-best-binding".to_owned(), names(&split.pre));
            }
            let branches: Vec<Value> = branch_ids(&split.branches)
                .map(|(bid, b)| {
                    let mut bm = Map::new();
                    bm.insert("branch-id".to_owned(), json!(bid));
                    match b {
                        FlatBranch::Normal {
                            target,
                            replications,
                        } => {
                            bm.insert("composition".to_owned(), json!(target.as_str()));
                            if replications.get() > 1 {
                                bm.insert("replications".to_owned(), json!(replications.get()));
                            }
                        }
                        FlatBranch::Pass => {
                            bm.insert("string".to_owned(), json!("pass"));
                        }
                    }
                    Value::Object(bm)
                })
                .collect();
            m.insert("outgoing-branches".to_owned(), Value::Array(branches));
        }
    }
    Value::Object(m)
}

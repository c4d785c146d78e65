//! Named component models stored on disk, one JSON instance document per
//! entry plus a tab-separated `index.txt`.
//!
//! Entries may link to each other: a stored model can keep a `composition`
//! reference to `firewall` (another entry's starting component) or to
//! `firewall.c2` (a specific component of that entry). [`CatalogStore::resolve_links`]
//! merges the referenced entries into one self-contained model, namespacing
//! imported components as `<entry>.<component>` to keep ids collision-free.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use chainc_core::diag::{Code, Diagnostic};
use chainc_core::{
    reference_report, validate_structure, ComponentId, ComponentModel, FlatBranch, FlatComposition,
};

use crate::yang::{from_instance, to_instance, Format, InstanceError};

const INDEX_FILE: &str = "index.txt";

pub struct CatalogStore {
    root: PathBuf,
}

#[derive(Debug)]
pub struct CatalogRow {
    pub name: String,
    pub file: String,
    pub status: EntryStatus,
}

#[derive(Debug)]
pub enum EntryStatus {
    Ok {
        components: usize,
        compositions: usize,
    },
    Broken(String),
}

/// Result of link resolution: the merged model plus which entries were
/// pulled in, in import order.
#[derive(Debug)]
pub struct Resolved {
    pub model: ComponentModel,
    pub imported: Vec<String>,
}

#[derive(Debug)]
pub enum CatalogError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// The index file has a line without a name/file separator.
    BadIndex { path: PathBuf, line: usize },
    /// Entry names are single-segment component ids.
    BadName { name: String, reason: String },
    Duplicate { name: String },
    NotFound { name: String },
    /// The stored document no longer parses.
    Corrupt {
        name: String,
        source: InstanceError,
    },
    /// The model handed to `add` is not fit to store.
    InvalidEntry { diagnostics: Vec<Diagnostic> },
    /// Targets left dangling after resolution (or a missing start).
    Unresolved { diagnostics: Vec<Diagnostic> },
    /// Entries link back to each other.
    Cyclic { diagnostics: Vec<Diagnostic> },
    /// An import would shadow existing component ids.
    Collision { prefix: String },
}

impl CatalogError {
    fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CatalogError {
        let path = path.into();
        move |source| CatalogError::Io { path, source }
    }

    /// Diagnostic code of the failure, for exit-status mapping.
    pub fn code(&self) -> Code {
        match self {
            CatalogError::Io { .. } => Code::Io,
            CatalogError::BadIndex { .. } => Code::Malformed,
            CatalogError::BadName { .. } => Code::Schema,
            CatalogError::Duplicate { .. } => Code::DuplicateName,
            CatalogError::NotFound { .. } => Code::NotFound,
            CatalogError::Corrupt { source, .. } => source.code(),
            CatalogError::InvalidEntry { .. } => Code::InvalidModel,
            CatalogError::Unresolved { .. } => Code::UnresolvedRef,
            CatalogError::Cyclic { .. } => Code::CyclicRef,
            CatalogError::Collision { .. } => Code::DupId,
        }
    }
}

impl fmt::Display for CatalogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CatalogError::BadIndex { path, line } => {
                write!(f, "{}: line {line} is not name<TAB>file", path.display())
            }
            CatalogError::BadName { name, reason } => {
                write!(f, "bad entry name {name:?}: {reason}")
            }
            CatalogError::Duplicate { name } => {
                write!(f, "entry {name:?} already exists in the catalog")
            }
            CatalogError::NotFound { name } => write!(f, "no catalog entry resolves {name:?}"),
            CatalogError::Corrupt { name, source } => {
                write!(f, "stored entry {name:?} is unreadable: {source}")
            }
            CatalogError::InvalidEntry { diagnostics } => {
                write!(f, "model is not storable")?;
                if let Some(first) = diagnostics.iter().find(|d| d.is_error()) {
                    write!(f, "; first: {first}")?;
                }
                Ok(())
            }
            CatalogError::Unresolved { diagnostics } => {
                write!(f, "references left unresolved")?;
                if let Some(first) = diagnostics.iter().find(|d| d.is_error()) {
                    write!(f, "; first: {first}")?;
                }
                Ok(())
            }
            CatalogError::Cyclic { diagnostics } => {
                write!(f, "entries link in a cycle")?;
                if let Some(first) = diagnostics.iter().find(|d| d.is_error()) {
                    write!(f, "; first: {first}")?;
                }
                Ok(())
            }
            CatalogError::Collision { prefix } => write!(
                f,
                "import of entry {prefix:?} collides with existing component ids"
            ),
        }
    }
}

impl std::error::Error for CatalogError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CatalogError::Io { source, .. } => Some(source),
            CatalogError::Corrupt { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl CatalogStore {
    /// Open a store rooted at `root`, creating the directory if needed.
    pub fn open(root: impl Into<PathBuf>) -> Result<CatalogStore, CatalogError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(CatalogError::io(&root))?;
        Ok(CatalogStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn index_path(&self) -> PathBuf {
        self.root.join(INDEX_FILE)
    }

    fn read_index(&self) -> Result<BTreeMap<String, String>, CatalogError> {
        let path = self.index_path();
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
            Err(e) => return Err(CatalogError::io(&path)(e)),
        };
        let mut index = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let Some((name, file)) = line.split_once('\t') else {
                return Err(CatalogError::BadIndex {
                    path,
                    line: i + 1,
                });
            };
            index.insert(name.to_owned(), file.to_owned());
        }
        Ok(index)
    }

    /// Replace a file through a same-directory temp file and rename, so
    /// readers never observe a half-written index or entry.
    fn write_atomic(&self, file: &str, contents: &str) -> Result<(), CatalogError> {
        let tmp = self.root.join(format!(".tmp-{file}"));
        let dst = self.root.join(file);
        fs::write(&tmp, contents).map_err(CatalogError::io(&tmp))?;
        fs::rename(&tmp, &dst).map_err(CatalogError::io(&dst))?;
        Ok(())
    }

    fn write_index(&self, index: &BTreeMap<String, String>) -> Result<(), CatalogError> {
        let mut text = String::new();
        for (name, file) in index {
            text.push_str(name);
            text.push('\t');
            text.push_str(file);
            text.push('\n');
        }
        self.write_atomic(INDEX_FILE, &text)
    }

    /// Store `model` under `name`. The model must be structurally sound,
    /// start at one of its own components, and keep branch targets internal;
    /// links may point at other entries.
    pub fn add(&self, name: &str, model: &ComponentModel) -> Result<(), CatalogError> {
        check_entry_name(name)?;
        let diagnostics = storability(model);
        if !diagnostics.is_empty() {
            return Err(CatalogError::InvalidEntry { diagnostics });
        }

        let mut index = self.read_index()?;
        if index.contains_key(name) {
            return Err(CatalogError::Duplicate {
                name: name.to_owned(),
            });
        }

        let body = to_instance(model, Format::Json)
            .map_err(|e| CatalogError::InvalidEntry { diagnostics: e.diagnostics })?;
        let file = format!("{name}.json");
        self.write_atomic(&file, &body)?;
        index.insert(name.to_owned(), file);
        self.write_index(&index)
    }

    pub fn get(&self, name: &str) -> Result<ComponentModel, CatalogError> {
        let index = self.read_index()?;
        let Some(file) = index.get(name) else {
            return Err(CatalogError::NotFound {
                name: name.to_owned(),
            });
        };
        let path = self.root.join(file);
        let text = fs::read_to_string(&path).map_err(CatalogError::io(&path))?;
        let loaded = from_instance(&text, Format::Json).map_err(|source| CatalogError::Corrupt {
            name: name.to_owned(),
            source,
        })?;
        Ok(loaded.model)
    }

    pub fn list(&self) -> Result<Vec<CatalogRow>, CatalogError> {
        let index = self.read_index()?;
        let mut rows = Vec::new();
        for (name, file) in index {
            let status = match self.get(&name) {
                Ok(model) => EntryStatus::Ok {
                    components: model.components.len(),
                    compositions: model
                        .components
                        .iter()
                        .map(|c| c.compositions.len())
                        .sum(),
                },
                Err(e) => EntryStatus::Broken(e.to_string()),
            };
            rows.push(CatalogRow { name, file, status });
        }
        Ok(rows)
    }

    /// Resolve every dangling link in `model` against the catalog, importing
    /// entries (transitively) until the model is self-contained.
    pub fn resolve_links(&self, model: &ComponentModel) -> Result<Resolved, CatalogError> {
        let mut merged = model.clone();
        let mut imported: Vec<String> = Vec::new();

        loop {
            let report = reference_report(&merged);
            if !report.cycles.is_empty() {
                return Err(CatalogError::Cyclic {
                    diagnostics: cycle_diagnostics(&report.cycles),
                });
            }
            if !report.dangling_branches.is_empty() {
                return Err(CatalogError::Unresolved {
                    diagnostics: dangling_diagnostics(&report.dangling_branches),
                });
            }
            if report.dangling_links.is_empty() {
                if report.start_missing {
                    return Err(CatalogError::Unresolved {
                        diagnostics: vec![Diagnostic::error(
                            Code::BadStart,
                            "/starting-component",
                            format!(
                                "starting component {} is not defined",
                                merged.starting_component
                            ),
                        )],
                    });
                }
                return Ok(Resolved {
                    model: merged,
                    imported,
                });
            }

            let targets: BTreeSet<ComponentId> = report
                .dangling_links
                .iter()
                .map(|(_, target)| target.clone())
                .collect();
            for target in targets {
                self.resolve_target(&mut merged, &mut imported, &target)?;
            }
        }
    }

    fn resolve_target(
        &self,
        merged: &mut ComponentModel,
        imported: &mut Vec<String>,
        target: &ComponentId,
    ) -> Result<(), CatalogError> {
        if target.is_simple() {
            // Bare entry name: import it and point the links at its start.
            let name = target.as_str().to_owned();
            let start = self.import_entry(merged, imported, &name)?;
            let new_target = ComponentId::new(format!("{name}.{start}"))
                .expect("joining two valid ids yields a valid id");
            rewrite_links(merged, target, &new_target);
            Ok(())
        } else {
            // `entry.component`: import the entry; the reference then names
            // the imported component directly.
            let entry = target
                .as_str()
                .split('.')
                .next()
                .expect("a dotted id has a first segment")
                .to_owned();
            if self.read_index()?.contains_key(&entry) {
                self.import_entry(merged, imported, &entry)?;
            }
            if merged.component(target).is_none() {
                return Err(CatalogError::NotFound {
                    name: target.as_str().to_owned(),
                });
            }
            Ok(())
        }
    }

    /// Merge entry `name` into `merged` under the `name.` prefix. Returns
    /// the entry's starting component id (unprefixed). Importing twice is a
    /// no-op.
    fn import_entry(
        &self,
        merged: &mut ComponentModel,
        imported: &mut Vec<String>,
        name: &str,
    ) -> Result<String, CatalogError> {
        let entry = self.get(name)?;
        if imported.iter().any(|n| n == name) {
            return Ok(entry.starting_component.as_str().to_owned());
        }
        let prefix = format!("{name}.");
        let occupied = merged
            .components
            .iter()
            .any(|c| c.id.as_str() == name || c.id.as_str().starts_with(&prefix));
        if occupied {
            return Err(CatalogError::Collision {
                prefix: name.to_owned(),
            });
        }

        let internal: BTreeSet<&ComponentId> = entry.components.iter().map(|c| &c.id).collect();
        let rename = |id: &ComponentId| -> ComponentId {
            if internal.contains(id) {
                ComponentId::new(format!("{name}.{id}"))
                    .expect("joining two valid ids yields a valid id")
            } else {
                // Cross-entry reference: left for a later resolution round.
                id.clone()
            }
        };

        for comp in &entry.components {
            let mut renamed = comp.clone();
            renamed.id = rename(&comp.id);
            for e in &mut renamed.compositions {
                match &mut e.body {
                    FlatComposition::LinkRef(t) => *t = rename(t),
                    FlatComposition::Split(split) => {
                        for b in &mut split.branches {
                            if let FlatBranch::Normal { target, .. } = b {
                                *target = rename(target);
                            }
                        }
                    }
                    _ => {}
                }
            }
            merged.components.push(renamed);
        }
        imported.push(name.to_owned());
        Ok(entry.starting_component.as_str().to_owned())
    }
}

fn check_entry_name(name: &str) -> Result<(), CatalogError> {
    let id = ComponentId::new(name).map_err(|e| CatalogError::BadName {
        name: name.to_owned(),
        reason: e.to_string(),
    })?;
    if !id.is_simple() {
        return Err(CatalogError::BadName {
            name: name.to_owned(),
            reason: "entry names must not contain '.'".to_owned(),
        });
    }
    Ok(())
}

/// What `add` requires beyond schema validity: no structural errors, a
/// resolvable start, internal branch targets, no internal cycles. Dangling
/// links are the one allowed looseness.
fn storability(model: &ComponentModel) -> Vec<Diagnostic> {
    let mut diagnostics: Vec<Diagnostic> = validate_structure(model)
        .into_iter()
        .filter(|d| d.is_error())
        .collect();
    let report = reference_report(model);
    if report.start_missing {
        diagnostics.push(Diagnostic::error(
            Code::BadStart,
            "/starting-component",
            format!(
                "starting component {} is not defined",
                model.starting_component
            ),
        ));
    }
    diagnostics.extend(dangling_diagnostics(&report.dangling_branches));
    diagnostics.extend(cycle_diagnostics(&report.cycles));
    diagnostics
}

fn dangling_diagnostics(dangling: &[(String, ComponentId)]) -> Vec<Diagnostic> {
    dangling
        .iter()
        .map(|(path, target)| {
            Diagnostic::error(
                Code::UnresolvedRef,
                path.as_str(),
                format!("branch target {target} is not defined"),
            )
        })
        .collect()
}

fn cycle_diagnostics(cycles: &[Vec<ComponentId>]) -> Vec<Diagnostic> {
    cycles
        .iter()
        .map(|cycle| {
            let mut names: Vec<&str> = cycle.iter().map(|c| c.as_str()).collect();
            names.push(names[0]);
            Diagnostic::error(
                Code::CyclicRef,
                format!("/components/{}", cycle[0]),
                format!("reference cycle: {}", names.join(" -> ")),
            )
        })
        .collect()
}

fn rewrite_links(model: &mut ComponentModel, from: &ComponentId, to: &ComponentId) {
    for comp in &mut model.components {
        for entry in &mut comp.compositions {
            if let FlatComposition::LinkRef(t) = &mut entry.body {
                if t == from {
                    *t = to.clone();
                }
            }
        }
    }
}

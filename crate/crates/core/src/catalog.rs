//! Built-in manifolds, addressed as `builtin:NAME`.

use crate::error::{Error, Result};
use crate::gluing::{parse_manifold_str, ManifoldSpec};

const ENTRIES: &[(&str, &str)] = &[
    ("4_1", include_str!("../data/4_1.json")),
    ("4_1_formula", include_str!("../data/4_1_formula.json")),
    ("5_2", include_str!("../data/5_2.json")),
    ("m003", include_str!("../data/m003.json")),
];

pub const SCHEME: &str = "builtin:";

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|(name, _)| *name)
}

/// The JSON text of a builtin entry.
pub fn source_text(name: &str) -> Result<&'static str> {
    ENTRIES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| Error::UnknownBuiltin(name.to_string()))
}

pub fn builtin(name: &str) -> Result<ManifoldSpec> {
    parse_manifold_str(source_text(name)?)
}

/// Resolves `builtin:NAME` against the catalog and anything else as a file path.
pub fn load(uri: &str) -> Result<ManifoldSpec> {
    match uri.strip_prefix(SCHEME) {
        Some(name) => builtin(name),
        None => crate::gluing::parse_manifold_file(std::path::Path::new(uri)),
    }
}

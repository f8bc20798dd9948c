use std::fmt;
use std::path::Path;

use fairdual::io::{allocation_from_value, instance_from_value};
use fairdual::{Allocation, Error, Instance};
use serde_json::Value;

/// A command failure, always exit code 2.
#[derive(Debug)]
pub struct Failure(pub String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Failure>;

fn in_file(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure(format!("{}: {e}", path.display()))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| in_file(path)(e.into()))?;
    serde_json::from_str(&text).map_err(|e| in_file(path)(e.into()))
}

/// Loads an instance from a bare instance file or any report that embeds
/// one under `instance`.
pub fn instance(path: &Path) -> Result<Instance> {
    let root = read_json(path)?;
    let target = match root.get("instance") {
        Some(inner) if root.get("agents").is_none() => inner,
        _ => &root,
    };
    let loaded = instance_from_value(target).map_err(in_file(path))?;
    if !loaded.dropped.is_empty() {
        eprintln!(
            "note: {}: dropped zero-copy types {}",
            path.display(),
            loaded.dropped.join(", ")
        );
    }
    Ok(loaded.instance)
}

/// Keys under which CLI reports embed an allocation.
const EMBEDDED: [&str; 4] = ["allocation", "witness", "dominating", "certificate"];

/// Loads an allocation from a `{"bundles": ...}` file or a report embedding
/// one.
pub fn allocation(path: &Path, instance: &Instance) -> Result<Allocation> {
    let root = read_json(path)?;
    let target = if root.get("bundles").is_some() {
        &root
    } else {
        EMBEDDED
            .iter()
            .filter_map(|k| root.get(*k))
            .find(|v| v.get("bundles").is_some())
            .unwrap_or(&root)
    };
    let allocation = allocation_from_value(target, instance).map_err(in_file(path))?;
    instance.require_valid(&allocation).map_err(in_file(path))?;
    Ok(allocation)
}

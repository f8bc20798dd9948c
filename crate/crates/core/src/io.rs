//! JSON forms of instances and allocations.
//!
//! ```json
//! {"agents": 3, "types": [{"name": "t1", "copies": 2, "values": [1, "1/2", "0.3"]},
//!                         {"name": "t2", "copies": 1, "values": {"shared": 4}}]}
//! {"bundles": [["t1"], ["t1", "t2"], []]}
//! ```

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance, ItemType};
use crate::rational::{rational_from_json, rational_to_json, Rational};

#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub instance: Instance,
    /// Names of zero-copy types that were removed on load.
    pub dropped: Vec<String>,
}

pub fn parse_instance(text: &str) -> Result<LoadedInstance> {
    let root: Value = serde_json::from_str(text)?;
    instance_from_value(&root)
}

pub fn instance_from_value(root: &Value) -> Result<LoadedInstance> {
    let obj = root
        .as_object()
        .ok_or_else(|| Error::field("$", "expected an object with `agents` and `types`"))?;
    let agents = obj
        .get("agents")
        .ok_or_else(|| Error::field("agents", "missing"))?;
    let agents = agents
        .as_u64()
        .ok_or_else(|| Error::field("agents", format!("expected a positive integer, found {agents}")))?
        as usize;
    if agents == 0 {
        return Err(Error::NoAgents);
    }
    let types = obj
        .get("types")
        .ok_or_else(|| Error::field("types", "missing"))?
        .as_array()
        .ok_or_else(|| Error::field("types", "expected an array"))?;

    let mut kept = Vec::new();
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    let mut dropped = Vec::new();
    for (k, entry) in types.iter().enumerate() {
        let path = format!("types[{k}]");
        let entry = entry
            .as_object()
            .ok_or_else(|| Error::field(&path, "expected an object"))?;
        let name = entry
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::field(format!("{path}.name"), "expected a string"))?;
        let copies = entry
            .get("copies")
            .and_then(Value::as_u64)
            .ok_or_else(|| {
                Error::field(format!("{path}.copies"), "expected a non-negative integer")
            })? as usize;
        let values = entry
            .get("values")
            .ok_or_else(|| Error::field(format!("{path}.values"), "missing"))?;
        let column = parse_values(values, agents, name, &format!("{path}.values"))?;
        if copies == 0 {
            dropped.push(name.to_string());
            continue;
        }
        kept.push(ItemType::new(name, copies));
        columns.push(column);
    }
    let rows = (0..agents)
        .map(|i| columns.iter().map(|col| col[i].clone()).collect())
        .collect();
    let instance = Instance::new(agents, kept, rows)?;
    Ok(LoadedInstance { instance, dropped })
}

fn parse_values(value: &Value, agents: usize, name: &str, path: &str) -> Result<Vec<Rational>> {
    match value {
        Value::Array(items) => {
            if items.len() != agents {
                return Err(Error::ValueCount {
                    name: name.to_string(),
                    expected: agents,
                    found: items.len(),
                });
            }
            items
                .iter()
                .enumerate()
                .map(|(i, v)| rational_from_json(v, &format!("{path}[{i}]")))
                .collect()
        }
        Value::Object(map) => {
            let shared = map
                .get("shared")
                .filter(|_| map.len() == 1)
                .ok_or_else(|| Error::field(path, "expected an array or {\"shared\": value}"))?;
            let r = rational_from_json(shared, &format!("{path}.shared"))?;
            Ok(vec![r; agents])
        }
        _ => Err(Error::field(path, "expected an array or {\"shared\": value}")),
    }
}

pub fn instance_to_value(instance: &Instance) -> Value {
    let types: Vec<Value> = instance
        .types()
        .iter()
        .enumerate()
        .map(|(t, ty)| {
            let first = instance.value(0, t);
            let values = if (1..instance.agents()).all(|i| instance.value(i, t) == first) {
                json!({ "shared": rational_to_json(first) })
            } else {
                Value::Array(
                    (0..instance.agents())
                        .map(|i| rational_to_json(instance.value(i, t)))
                        .collect(),
                )
            };
            json!({ "name": ty.name, "copies": ty.copies, "values": values })
        })
        .collect();
    json!({ "agents": instance.agents(), "types": types })
}

pub fn instance_to_string(instance: &Instance) -> String {
    serde_json::to_string_pretty(&instance_to_value(instance)).expect("serializable")
}

pub fn parse_allocation(text: &str, instance: &Instance) -> Result<Allocation> {
    let root: Value = serde_json::from_str(text)?;
    allocation_from_value(&root, instance)
}

/// Resolves type names against `instance`. Copy counts and arity are left to
/// [`Instance::validate_allocation`].
pub fn allocation_from_value(root: &Value, instance: &Instance) -> Result<Allocation> {
    let bundles = root
        .get("bundles")
        .ok_or_else(|| Error::field("bundles", "missing"))?
        .as_array()
        .ok_or_else(|| Error::field("bundles", "expected an array of arrays"))?;
    let mut out = Vec::with_capacity(bundles.len());
    for (i, bundle) in bundles.iter().enumerate() {
        let names = bundle
            .as_array()
            .ok_or_else(|| Error::field(format!("bundles[{i}]"), "expected an array"))?;
        let mut b = Bundle::EMPTY;
        for (k, name) in names.iter().enumerate() {
            let name = name.as_str().ok_or_else(|| {
                Error::field(format!("bundles[{i}][{k}]"), "expected a type name")
            })?;
            let t = instance
                .type_index(name)
                .ok_or_else(|| Error::UnknownType(name.to_string()))?;
            if b.contains(t) {
                return Err(Error::DuplicateInBundle {
                    name: name.to_string(),
                    agent: i + 1,
                });
            }
            b = b.with(t);
        }
        out.push(b);
    }
    Ok(Allocation::new(out))
}

pub fn allocation_to_value(instance: &Instance, allocation: &Allocation) -> Value {
    let bundles: Vec<Value> = allocation
        .bundles
        .iter()
        .map(|&b| Value::from(instance.bundle_names(b)))
        .collect();
    json!({ "bundles": bundles })
}

pub fn allocation_to_string(instance: &Instance, allocation: &Allocation) -> String {
    serde_json::to_string(&allocation_to_value(instance, allocation)).expect("serializable")
}

/// Bundles as lists of names, for embedding in reports.
pub fn bundles_value(instance: &Instance, allocation: &Allocation) -> Value {
    allocation_to_value(instance, allocation)["bundles"].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const EXAMPLE: &str = r#"{"agents": 2, "types": [
        {"name": "a", "copies": 2, "values": {"shared": "1/2"}},
        {"name": "b", "copies": 1, "values": [3, "0.25"]},
        {"name": "gone", "copies": 0, "values": [1, 1]}]}"#;

    #[test]
    fn parse_and_round_trip() {
        let loaded = parse_instance(EXAMPLE).unwrap();
        assert_eq!(loaded.dropped, vec!["gone".to_string()]);
        let inst = loaded.instance;
        assert_eq!(inst.type_count(), 2);
        assert_eq!(inst.value(0, 0), &ratio(1, 2));
        assert_eq!(inst.value(1, 1), &ratio(1, 4));
        let again = parse_instance(&instance_to_string(&inst)).unwrap().instance;
        assert_eq!(again, inst);

        let alloc = parse_allocation(r#"{"bundles": [["a", "b"], ["a"]]}"#, &inst).unwrap();
        assert!(inst.validate_allocation(&alloc).is_ok());
        assert_eq!(inst.bundle_value(0, alloc.bundle(0)).unwrap(), ratio(7, 2));
        let text = allocation_to_string(&inst, &alloc);
        assert_eq!(parse_allocation(&text, &inst).unwrap(), alloc);
    }

    #[test]
    fn diagnostics() {
        match parse_instance("{\"agents\": 2,\n \"types\": [}") {
            Err(Error::Json { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let bad = r#"{"agents": 2, "types": [{"name": "a", "copies": 1, "values": [1, 1.5]}]}"#;
        match parse_instance(bad) {
            Err(Error::Field { field, .. }) => assert_eq!(field, "types[0].values[1]"),
            other => panic!("{other:?}"),
        }
        let short = r#"{"agents": 2, "types": [{"name": "a", "copies": 1, "values": [1]}]}"#;
        assert!(matches!(parse_instance(short), Err(Error::ValueCount { .. })));

        let inst = parse_instance(EXAMPLE).unwrap().instance;
        assert!(matches!(
            parse_allocation(r#"{"bundles": [["a", "a"], ["b"]]}"#, &inst),
            Err(Error::DuplicateInBundle { .. })
        ));
        assert!(matches!(
            parse_allocation(r#"{"bundles": [["zzz"], []]}"#, &inst),
            Err(Error::UnknownType(_))
        ));
    }
}

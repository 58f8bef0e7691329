//! JSON instance and solution files. All numbers are integers.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{
    validate_instance, Hub, Instance, Leg, LegId, Metrics, Path, Request, RequestId, Schedule, ScheduleId, Solution,
};
use crate::error::{Error, Result};

/// A request id with its ordered leg ids, as stored in files.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathRecord {
    pub request: RequestId,
    pub legs: Vec<LegId>,
}

#[derive(Serialize)]
struct InstanceOut<'a> {
    hubs: &'a [Hub],
    schedules: &'a [Schedule],
    legs: &'a [Leg],
    requests: &'a [Request],
    #[serde(skip_serializing_if = "<[PathRecord]>::is_empty")]
    base_plan: &'a [PathRecord],
}

#[derive(Serialize, Deserialize)]
struct SolutionFile {
    paths: Vec<PathRecord>,
    active: Vec<ScheduleId>,
    metrics: Metrics,
}

fn parse_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), message: message.into() }
}

fn top_level(bytes: &[u8]) -> Result<Map<String, Value>> {
    let text = std::str::from_utf8(bytes).map_err(|e| parse_error("$", e.to_string()))?;
    match serde_json::from_str::<Value>(text).map_err(|e| parse_error("$", e.to_string()))? {
        Value::Object(m) => Ok(m),
        _ => Err(parse_error("$", "expected a JSON object")),
    }
}

fn section<T: DeserializeOwned>(obj: &mut Map<String, Value>, key: &str, required: bool) -> Result<Vec<T>> {
    let value = match obj.remove(key) {
        Some(v) => v,
        None if required => return Err(parse_error(key, format!("missing field: {key}"))),
        None => return Ok(Vec::new()),
    };
    let Value::Array(items) = value else {
        return Err(parse_error(key, "expected an array"));
    };
    items
        .into_iter()
        .enumerate()
        .map(|(i, v)| serde_json::from_value(v).map_err(|e| parse_error(format!("{key}[{i}]"), e.to_string())))
        .collect()
}

/// Parses and validates an instance file.
pub fn read_instance(bytes: &[u8]) -> Result<Instance> {
    let mut obj = top_level(bytes)?;
    let hubs = section(&mut obj, "hubs", true)?;
    let schedules = section(&mut obj, "schedules", true)?;
    let legs = section(&mut obj, "legs", true)?;
    let requests = section(&mut obj, "requests", true)?;
    let base_plan = section(&mut obj, "base_plan", false)?;
    let instance = Instance::with_base_plan(hubs, schedules, legs, requests, base_plan)?;
    let violations = validate_instance(&instance);
    if !violations.is_empty() {
        return Err(Error::InvalidInstance(violations));
    }
    Ok(instance)
}

/// Canonical pretty-printed JSON, newline terminated.
pub fn write_instance(instance: &Instance) -> Vec<u8> {
    let out = InstanceOut {
        hubs: instance.hubs(),
        schedules: instance.schedules(),
        legs: instance.legs(),
        requests: instance.requests(),
        base_plan: instance.base_plan(),
    };
    let mut bytes = serde_json::to_vec_pretty(&out).expect("instance serialises");
    bytes.push(b'\n');
    bytes
}

/// Parses a solution file against the instance it solves. Path mile costs
/// are recomputed from the instance; stored metrics are kept verbatim so
/// that [`super::validate_solution`] can cross-check them.
pub fn read_solution(bytes: &[u8], instance: &Instance) -> Result<Solution> {
    let mut obj = top_level(bytes)?;
    let records: Vec<PathRecord> = section(&mut obj, "paths", true)?;
    let active_ids: Vec<ScheduleId> = section(&mut obj, "active", true)?;
    let metrics = obj.remove("metrics").ok_or_else(|| parse_error("metrics", "missing field: metrics"))?;
    let metrics: Metrics = serde_json::from_value(metrics).map_err(|e| parse_error("metrics", e.to_string()))?;

    let mut paths = Vec::with_capacity(records.len());
    for (i, r) in records.into_iter().enumerate() {
        let p =
            Path::new(instance, r.request, r.legs).map_err(|e| parse_error(format!("paths[{i}]"), e.to_string()))?;
        paths.push(p);
    }
    let mut active = vec![false; instance.schedules().len()];
    for (i, s) in active_ids.into_iter().enumerate() {
        *active
            .get_mut(s.0)
            .ok_or_else(|| parse_error(format!("active[{i}]"), format!("dangling schedule ref {s}")))? = true;
    }
    Ok(Solution { paths, active, metrics })
}

pub fn write_solution(solution: &Solution) -> Vec<u8> {
    let file = SolutionFile {
        paths: solution.paths.iter().map(|p| PathRecord { request: p.request, legs: p.legs.clone() }).collect(),
        active: solution.active.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| ScheduleId(i)).collect(),
        metrics: solution.metrics,
    };
    let mut bytes = serde_json::to_vec_pretty(&file).expect("solution serialises");
    bytes.push(b'\n');
    bytes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::micro3;

    #[test]
    fn instance_round_trip() {
        let bytes = write_instance(&micro3());
        let back = read_instance(&bytes).unwrap();
        assert_eq!(back, micro3());
        assert_eq!(write_instance(&back), bytes);
    }

    #[test]
    fn missing_legs_key() {
        let mut v: Value = serde_json::from_slice(&write_instance(&micro3())).unwrap();
        v.as_object_mut().unwrap().remove("legs");
        let err = read_instance(v.to_string().as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "legs: missing field: legs");
    }

    #[test]
    fn dangling_schedule_reported_with_path() {
        let mut v: Value = serde_json::from_slice(&write_instance(&micro3())).unwrap();
        v["legs"][0]["schedule"] = 99.into();
        let err = read_instance(v.to_string().as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("legs[0].schedule: dangling schedule ref 99 of 2"), "{msg}");
    }

    #[test]
    fn malformed_field_reported_with_path() {
        let mut v: Value = serde_json::from_slice(&write_instance(&micro3())).unwrap();
        v["requests"][0]["volume"] = "ten".into();
        let err = read_instance(v.to_string().as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("requests[0]:"), "{err}");
    }

    #[test]
    fn invariant_violation_is_a_structured_error() {
        let mut v: Value = serde_json::from_slice(&write_instance(&micro3())).unwrap();
        v["requests"][0]["volume"] = 12.into();
        match read_instance(v.to_string().as_bytes()) {
            Err(Error::InvalidInstance(vs)) => assert_eq!(vs.len(), 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn solution_round_trip() {
        let inst = micro3();
        let sol = Solution::from_paths(&inst, vec![Path::new(&inst, RequestId(0), vec![LegId(2)]).unwrap()]);
        let bytes = write_solution(&sol);
        assert_eq!(read_solution(&bytes, &inst).unwrap(), sol);
    }
}

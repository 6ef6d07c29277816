//! JSON reports.
//!
//! Every report is a `serde_json::Value` whose objects keep keys sorted.
//! Wall-clock measurements live under a top-level `timing` key so that
//! [`strip_timing`] leaves a payload that is byte-identical across reruns.

use serde_json::{json, Map, Value};

use crate::canon::canonical_form;
use crate::classify::Phi31Classification;
use crate::digraph::{ClassSpec, Digraph, Membership};
use crate::search::{SearchOutcome, SearchParams, SearchStats};

pub const TIMING_KEY: &str = "timing";

pub fn spec_json(spec: &ClassSpec) -> Value {
    json!({ "n": spec.n, "k": spec.k, "xi": spec.xi, "zeta": spec.zeta })
}

pub fn digraph_json(d: &Digraph) -> Value {
    let arcs: Vec<[usize; 2]> = d.arcs().map(|(u, v)| [u, v]).collect();
    json!({
        "n": d.order(),
        "arc_count": d.arc_count(),
        "arcs": arcs,
        "canonical": canonical_form(d).render(),
    })
}

pub fn stats_json(s: &SearchStats) -> Value {
    serde_json::to_value(s).expect("plain struct")
}

pub fn outcome_json(params: &SearchParams, out: &SearchOutcome) -> Value {
    let canonical: Vec<String> = out.canonical_strings();
    json!({
        "spec": spec_json(&params.spec),
        "mode": params.mode.as_str(),
        "target_arcs": params.target_arcs,
        "gamma_budget": params.gamma_budget,
        "status": out.status.as_str(),
        "phi": out.phi,
        "classes": out.extremal.len(),
        "canonical": canonical,
        "stats": stats_json(&out.stats),
        "resumable": out.resumable,
        "seed": out.seed,
        "restart": out.restart,
        TIMING_KEY: { "elapsed_secs": out.elapsed.as_secs_f64() },
    })
}

pub fn membership_json(d: &Digraph, spec: &ClassSpec, m: &Membership) -> Value {
    json!({
        "spec": spec_json(spec),
        "n": d.order(),
        "arc_count": d.arc_count(),
        "girth": m.girth,
        "strong": m.strong,
        "min_out": m.profile.min_out,
        "min_in": m.profile.min_in,
        "min_degree": m.profile.min_degree,
        "gamma": d.gamma(),
        "member": m.is_member(),
        "failures": m.failures,
    })
}

pub fn classification_json(c: &Phi31Classification) -> Value {
    serde_json::to_value(c).expect("plain struct")
}

/// Removes the top-level `timing` key.
pub fn strip_timing(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.remove(TIMING_KEY);
    }
    v
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render(v: &Value) -> String {
    let sorted = sort_keys(v.clone());
    let mut s = serde_json::to_string_pretty(&sorted).expect("serializable");
    s.push('\n');
    s
}

fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, sort_keys(v));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_sorted_and_timing_stripped() {
        let v = json!({ "b": 1, "a": { "d": 2, "c": 3 }, "timing": { "elapsed_secs": 0.5 } });
        let s = render(&v);
        let a = s.find("\"a\"").unwrap();
        let b = s.find("\"b\"").unwrap();
        assert!(a < b);
        assert!(s.find("\"c\"").unwrap() < s.find("\"d\"").unwrap());
        let stripped = render(&strip_timing(v));
        assert!(!stripped.contains("timing"));
    }
}

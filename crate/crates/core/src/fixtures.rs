//! The worked examples: two quadric families, the bubble, the sunrise and a nested bubble.

use crate::graph::FeynmanGraph;
use crate::quadform::QuadricFile;

pub const NAMES: [&str; 5] = ["simple", "twoquadrics", "bubble", "sunrise", "nested-bubble"];

/// ∫ dy / (y² + t²).
pub fn simple() -> QuadricFile {
    QuadricFile::from_json(
        r#"{"variables": ["z1"], "parameters": ["t"], "aux": "z0",
            "quadrics": [{"poly": "z1^2 + t^2", "exponent": "1"}]}"#,
    )
    .expect("fixture parses")
}

/// ∫ dz1 dz2 / ((z1² + z2² + z1·t + 1)(z1² + z2² + t²)).
pub fn two_quadrics() -> QuadricFile {
    QuadricFile::from_json(
        r#"{"variables": ["z1", "z2"], "parameters": ["t"], "aux": "z0",
            "quadrics": [{"poly": "z1^2 + z2^2 + z1*t + 1", "exponent": "1"},
                         {"poly": "z1^2 + z2^2 + t^2", "exponent": "1"}]}"#,
    )
    .expect("fixture parses")
}

fn graph(json: &str) -> FeynmanGraph {
    FeynmanGraph::from_json(json).expect("fixture parses")
}

/// One-loop two-point graph with masses m1, m2 in D = 4.
pub fn bubble() -> FeynmanGraph {
    graph(
        r#"{"vertices": ["1", "2"],
            "edges": [{"id": "e1", "ends": ["1", "2"], "mass": "m1", "exponent": "1"},
                      {"id": "e2", "ends": ["1", "2"], "mass": "m2", "exponent": "1"}],
            "external": {"1": 1, "2": 1}, "dimension": 4}"#,
    )
}

/// Two-loop sunrise with masses m1, m2, m3 in D = 4.
pub fn sunrise() -> FeynmanGraph {
    graph(
        r#"{"vertices": ["1", "2"],
            "edges": [{"id": "e1", "ends": ["1", "2"], "mass": "m1", "exponent": "1"},
                      {"id": "e2", "ends": ["1", "2"], "mass": "m2", "exponent": "1"},
                      {"id": "e3", "ends": ["1", "2"], "mass": "m3", "exponent": "1"}],
            "external": {"1": 1, "2": 1}, "dimension": 4}"#,
    )
}

/// Bubble whose second edge is replaced by a bubble through an internal vertex.
pub fn nested_bubble() -> FeynmanGraph {
    graph(
        r#"{"vertices": ["1", "2", "3"],
            "edges": [{"id": "e1", "ends": ["1", "2"], "mass": "m", "exponent": "1"},
                      {"id": "e2", "ends": ["1", "3"], "mass": "m", "exponent": "1"},
                      {"id": "e3", "ends": ["3", "2"], "mass": "m", "exponent": "1"},
                      {"id": "e4", "ends": ["3", "2"], "mass": "m", "exponent": "1"}],
            "external": {"1": 1, "2": 1}, "dimension": 4}"#,
    )
}

/// Fixture as file text: quadric files for the non-graph examples, graph files otherwise.
pub fn materialize(name: &str) -> Option<String> {
    Some(match name {
        "simple" => simple().to_json(),
        "twoquadrics" => two_quadrics().to_json(),
        "bubble" => bubble().to_json(),
        "sunrise" => sunrise().to_json(),
        "nested-bubble" => nested_bubble().to_json(),
        _ => return None,
    })
}

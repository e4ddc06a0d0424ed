//! Built-in curve files, embedded at compile time.

pub const NAMES: &[&str] = &[
    "smooth",
    "node",
    "cusp",
    "tacnode",
    "e8",
    "two46",
    "cusp-plus-line",
];

/// Source text of a built-in curve.
pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "smooth" => include_str!("../../data/smooth.curve"),
        "node" => include_str!("../../data/node.curve"),
        "cusp" => include_str!("../../data/cusp.curve"),
        "tacnode" => include_str!("../../data/tacnode.curve"),
        "e8" => include_str!("../../data/e8.curve"),
        "two46" => include_str!("../../data/two46.curve"),
        "cusp-plus-line" => include_str!("../../data/cusp-plus-line.curve"),
        _ => return None,
    })
}

//! Graphviz export of the orbit relation on units.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use gcstar::groupoid::orbit_structure;
use gcstar::FiniteGroupoid;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Nodes are units, one undirected edge per pair of distinct units joined by an
/// arrow, one cluster per orbit. Output depends only on `g`.
pub fn export_dot(g: &FiniteGroupoid) -> String {
    let orbits = orbit_structure(g).orbits;
    let edges: BTreeSet<(usize, usize)> = g
        .elements()
        .map(|x| (g.range(x), g.source(x)))
        .filter(|(r, s)| r != s)
        .map(|(r, s)| (r.min(s), r.max(s)))
        .collect();
    let mut out = String::from("graph units {\n");
    for (k, orbit) in orbits.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{k} {{");
        let _ = writeln!(out, "    label = \"orbit {k}\";");
        for &u in orbit {
            let _ = writeln!(out, "    {};", quote(g.name(u)));
        }
        out.push_str("  }\n");
    }
    for (a, b) in edges {
        let _ = writeln!(out, "  {} -- {};", quote(g.name(a)), quote(g.name(b)));
    }
    out.push_str("}\n");
    out
}

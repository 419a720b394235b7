//! Graphviz output.

use std::fmt::Write;

use uphocore::TruncatedPoset;

const PALETTE: [&str; 8] = [
    "red3", "blue3", "green4", "darkorange2", "purple3", "cyan4", "magenta3", "goldenrod3",
];

/// Name of color `c`: the label of the matching atom when labels exist.
fn color_name(p: &TruncatedPoset, c: u32) -> String {
    match p.labels() {
        Some(labels) => labels[(p.atoms().start + c) as usize].clone(),
        None => format!("c{c}"),
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Bottom-to-top DOT drawing with one `rank = same` group per rank.
///
/// With `colored` set and colors present, each edge is drawn and labeled by
/// its atom.
pub fn emit_dot(p: &TruncatedPoset, colored: bool) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=circle, width=0.2, label=\"\"];\n  edge [arrowhead=none];\n");
    for r in 0..=p.depth() {
        let _ = write!(out, "  {{ rank = same;");
        for v in p.rank(r) {
            let _ = write!(out, " n{v} [xlabel={}];", quote(&p.label(v)));
        }
        out.push_str(" }\n");
    }
    for (l, u, c) in p.edges() {
        match c.filter(|_| colored) {
            Some(c) => {
                let _ = writeln!(
                    out,
                    "  n{l} -> n{u} [color={}, label={}];",
                    PALETTE[c as usize % PALETTE.len()],
                    quote(&color_name(p, c))
                );
            }
            None => {
                let _ = writeln!(out, "  n{l} -> n{u};");
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use uphocore::constructions::{build_bn, build_chain, build_lf, FiberFunction};

    fn count(s: &str, pat: &str) -> usize {
        s.matches(pat).count()
    }

    #[test]
    fn single_node() {
        let dot = emit_dot(&build_chain(0), false);
        assert_eq!(count(&dot, "[xlabel="), 1);
        assert_eq!(count(&dot, "->"), 0);
    }

    #[test]
    fn boolean_square() {
        let dot = emit_dot(&build_bn(2).unwrap(), false);
        assert_eq!(count(&dot, "[xlabel="), 4);
        assert_eq!(count(&dot, "->"), 4);
        assert_eq!(count(&dot, "rank = same"), 3);
        assert_eq!(dot, emit_dot(&build_bn(2).unwrap(), false));
    }

    #[test]
    fn colored_dominating_lattice_uses_two_colors() {
        let f: FiberFunction = "1,1".parse().unwrap();
        let p = build_lf(&f, 3).unwrap();
        let dot = emit_dot(&p, true);
        let labels: BTreeSet<&str> = dot
            .lines()
            .filter(|l| l.contains("->"))
            .filter_map(|l| l.split("label=\"").nth(1))
            .map(|s| s.trim_end_matches("\"];"))
            .collect();
        assert_eq!(labels, BTreeSet::from(["s1", "s2"]));
        assert_eq!(count(&dot, "color="), p.edge_count());
    }
}

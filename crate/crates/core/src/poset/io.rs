//! JSON interchange for truncated posets.

use serde::{Deserialize, Serialize};

use super::{NodeId, PosetError, TruncatedPoset};

/// Wire form of a [`TruncatedPoset`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDocument {
    pub depth: usize,
    pub ranks: Vec<Vec<NodeId>>,
    pub covers: Vec<[NodeId; 2]>,
    /// `[lower, upper, color]` for every cover, in the order of `covers`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_colors: Option<Vec<[u32; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl PosetDocument {
    pub fn from_poset(p: &TruncatedPoset) -> Self {
        let edges = p.edges();
        PosetDocument {
            depth: p.depth(),
            ranks: p.ranks(),
            covers: edges.iter().map(|&(l, u, _)| [l, u]).collect(),
            edge_colors: if p.is_colored() {
                Some(edges.iter().map(|&(l, u, c)| [l, u, c.unwrap_or(0)]).collect())
            } else {
                None
            },
            labels: p.labels().map(<[String]>::to_vec),
        }
    }

    pub fn into_poset(self) -> Result<TruncatedPoset, PosetError> {
        if self.ranks.len() != self.depth + 1 {
            return Err(PosetError::Format(format!(
                "depth {} but {} rank lists",
                self.depth,
                self.ranks.len()
            )));
        }
        match self.edge_colors {
            None => {
                let covers: Vec<(NodeId, NodeId)> = self.covers.iter().map(|c| (c[0], c[1])).collect();
                TruncatedPoset::new(self.ranks, &covers, self.labels)
            }
            Some(colors) => {
                if colors.len() != self.covers.len() {
                    return Err(PosetError::Format(format!(
                        "{} edge colors for {} covers",
                        colors.len(),
                        self.covers.len()
                    )));
                }
                for (c, e) in colors.iter().zip(&self.covers) {
                    if c[0] != e[0] || c[1] != e[1] {
                        return Err(PosetError::Format(format!(
                            "edge color entry [{}, {}] does not match cover [{}, {}]",
                            c[0], c[1], e[0], e[1]
                        )));
                    }
                }
                let covers: Vec<(NodeId, NodeId, u32)> = colors.iter().map(|c| (c[0], c[1], c[2])).collect();
                TruncatedPoset::from_colored_covers(self.ranks, &covers, self.labels)
            }
        }
    }
}

/// Serializes deterministically (single line plus trailing newline).
pub fn to_json(p: &TruncatedPoset) -> String {
    let mut s = serde_json::to_string(&PosetDocument::from_poset(p)).expect("poset documents always serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<TruncatedPoset, PosetError> {
    let doc: PosetDocument = serde_json::from_str(text).map_err(|e| PosetError::Format(e.to_string()))?;
    doc.into_poset()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::tests::b2;

    #[test]
    fn round_trip_plain() {
        let p = b2();
        let text = to_json(&p);
        assert_eq!(text, "{\"depth\":2,\"ranks\":[[0],[1,2],[3]],\"covers\":[[0,1],[0,2],[1,3],[2,3]]}\n");
        let q = from_json(&text).unwrap();
        assert_eq!(q, p);
        assert_eq!(to_json(&q), text);
    }

    #[test]
    fn round_trip_colored_labeled() {
        let p = b2()
            .with_coloring(|l, u| if l == 0 { u - 1 } else { l - 1 })
            .with_labels(Some(vec!["e".into(), "a".into(), "b".into(), "ab".into()]));
        let text = to_json(&p);
        let q = from_json(&text).unwrap();
        assert_eq!(q, p);
        assert_eq!(to_json(&q), text);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(from_json("{\"depth\":1,\"ranks\":[[0]],\"covers\":[]}").is_err());
        assert!(from_json("{\"depth\":0,\"ranks\":[[0]],\"covers\":[],\"extra\":1}").is_err());
        assert!(from_json("not json").is_err());
    }
}

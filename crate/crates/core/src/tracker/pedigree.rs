use std::collections::BTreeSet;
use std::fmt::Write;

use super::Hypothesis;

#[derive(Debug, Clone, PartialEq)]
pub struct PedigreeNode {
    pub id: u64,
    pub parent_id: Option<u64>,
    /// `None` for the root.
    pub frame_index: Option<i64>,
    pub log_weight: f64,
    pub cumulative_log_weight: f64,
    pub track_count: usize,
}

/// Every surviving hypothesis ever created, linked to its parent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Pedigree {
    nodes: Vec<PedigreeNode>,
}

impl Pedigree {
    pub(crate) fn new(root: &Hypothesis) -> Self {
        Self {
            nodes: vec![PedigreeNode {
                id: root.id,
                parent_id: None,
                frame_index: None,
                log_weight: root.log_weight,
                cumulative_log_weight: root.cumulative_log_weight,
                track_count: root.tracks.len(),
            }],
        }
    }

    pub(crate) fn record(&mut self, frame_index: i64, generation: &[Hypothesis]) {
        self.nodes.extend(generation.iter().map(|h| PedigreeNode {
            id: h.id,
            parent_id: h.parent_id,
            frame_index: Some(frame_index),
            log_weight: h.log_weight,
            cumulative_log_weight: h.cumulative_log_weight,
            track_count: h.tracks.len(),
        }));
    }

    pub fn nodes(&self) -> &[PedigreeNode] {
        &self.nodes
    }

    /// Nodes without children.
    pub fn leaves(&self) -> Vec<&PedigreeNode> {
        let parents: BTreeSet<u64> = self.nodes.iter().filter_map(|n| n.parent_id).collect();
        self.nodes.iter().filter(|n| !parents.contains(&n.id)).collect()
    }

    /// Graphviz rendering, one rank per frame.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph pedigree {\n  rankdir=LR;\n  node [shape=box, fontsize=10];\n");
        for n in &self.nodes {
            let frame = n.frame_index.map_or_else(|| "root".to_string(), |f| format!("f{f}"));
            let _ = writeln!(
                out,
                "  h{} [label=\"h{} {}\\nw={:.3} W={:.3}\\ntracks={}\"];",
                n.id, n.id, frame, n.log_weight, n.cumulative_log_weight, n.track_count
            );
        }
        for n in &self.nodes {
            if let Some(p) = n.parent_id {
                let _ = writeln!(out, "  h{p} -> h{};", n.id);
            }
        }
        out.push_str("}\n");
        out
    }
}

//! Reduction engines and the shared breadth-first value-set explorer.

pub mod lmu;
pub mod mupp;

use std::collections::{HashMap, VecDeque};
use std::fmt::Display;

/// Exploration limits. `None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of distinct α-classes materialized.
    pub max_nodes: Option<usize>,
    /// Maximum BFS depth (number of reduction steps from the root).
    pub max_depth: Option<usize>,
}

/// Default node budget used by the CLI when none is given.
pub const DEFAULT_MAX_NODES: usize = 200_000;

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: Some(DEFAULT_MAX_NODES), max_depth: None }
    }
}

impl Budget {
    pub fn nodes(n: usize) -> Budget {
        Budget { max_nodes: Some(n), max_depth: None }
    }
    pub fn unbounded() -> Budget {
        Budget { max_nodes: None, max_depth: None }
    }
    pub fn with_depth(mut self, d: usize) -> Budget {
        self.max_depth = Some(d);
        self
    }
}

/// One α-class in the reduction graph.
#[derive(Debug, Clone)]
pub struct ExpNode<T> {
    /// Representative term (first one reached).
    pub term: T,
    /// Canonical printed form, the class key.
    pub key: String,
    /// BFS depth of first discovery.
    pub depth: usize,
    /// Whether this node's redexes were enumerated.
    pub expanded: bool,
    /// Expanded and found redex-free.
    pub normal: bool,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub rule: &'static str,
}

/// A (partial) reduction graph produced by [`explore`]. Node 0 is the root.
#[derive(Debug, Clone)]
pub struct Exploration<T> {
    pub nodes: Vec<ExpNode<T>>,
    pub edges: Vec<Edge>,
    /// Reducts dropped because of the depth cap.
    pub depth_cut: usize,
}

impl<T> Exploration<T> {
    /// Frontier left unvisited: unexpanded nodes plus depth-dropped reducts.
    pub fn pending(&self) -> usize {
        self.nodes.iter().filter(|n| !n.expanded).count() + self.depth_cut
    }
    /// True iff the whole (finite) reduction graph was visited.
    pub fn exhaustive(&self) -> bool {
        self.pending() == 0
    }
    pub fn normals(&self) -> impl Iterator<Item = &ExpNode<T>> {
        self.nodes.iter().filter(|n| n.normal)
    }
    pub fn contains_class(&self, key: &str) -> bool {
        self.nodes.iter().any(|n| n.key == key)
    }
}

/// The set of values (reachable normal forms) of a term.
#[derive(Debug, Clone)]
pub struct ValueSet<T> {
    /// Normal-form representatives, sorted by canonical key.
    pub normals: Vec<T>,
    /// Distinct α-classes materialized.
    pub explored: usize,
    /// Unvisited frontier size at stop; 0 iff exploration was exhaustive.
    pub pending: usize,
    pub exhaustive: bool,
}

impl<T: Clone> ValueSet<T> {
    pub fn from_exploration(exp: &Exploration<T>) -> ValueSet<T> {
        let mut with_keys: Vec<(&String, &T)> =
            exp.nodes.iter().filter(|n| n.normal).map(|n| (&n.key, &n.term)).collect();
        with_keys.sort_by(|a, b| a.0.cmp(b.0));
        ValueSet {
            normals: with_keys.into_iter().map(|(_, t)| t.clone()).collect(),
            explored: exp.nodes.len(),
            pending: exp.pending(),
            exhaustive: exp.exhaustive(),
        }
    }
}

/// Breadth-first exploration of the reduction graph of `root`, memoized on
/// the α-canonical key. Deterministic: fixed expansion order, fixed redex
/// enumeration order. Stops materializing immediately when the node budget
/// is reached; reducts beyond the depth cap are dropped (and counted).
pub fn explore<T: Clone>(
    root: &T,
    key: impl Fn(&T) -> String,
    step: impl Fn(&T) -> Vec<(&'static str, T)>,
    budget: &Budget,
) -> Exploration<T> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut nodes: Vec<ExpNode<T>> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut depth_cut = 0usize;

    let rk = key(root);
    ids.insert(rk.clone(), 0);
    nodes.push(ExpNode { term: root.clone(), key: rk, depth: 0, expanded: false, normal: false });
    queue.push_back(0);

    'bfs: while let Some(id) = queue.pop_front() {
        let reducts = step(&nodes[id].term);
        nodes[id].expanded = true;
        nodes[id].normal = reducts.is_empty();
        let next_depth = nodes[id].depth + 1;
        for (rule, r) in reducts {
            let k = key(&r);
            let to = match ids.get(&k) {
                Some(&to) => to,
                None => {
                    if budget.max_nodes.is_some_and(|m| nodes.len() >= m) {
                        // Budget reached: stop promptly, leaving the queue as
                        // the pending frontier.
                        break 'bfs;
                    }
                    if budget.max_depth.is_some_and(|m| next_depth > m) {
                        depth_cut += 1;
                        continue;
                    }
                    let to = nodes.len();
                    ids.insert(k.clone(), to);
                    nodes.push(ExpNode {
                        term: r,
                        key: k,
                        depth: next_depth,
                        expanded: false,
                        normal: false,
                    });
                    queue.push_back(to);
                    to
                }
            };
            edges.push(Edge { from: id, to, rule });
        }
    }
    Exploration { nodes, edges, depth_cut }
}

/// Render a reduction graph in Graphviz DOT format. Normal forms are drawn
/// filled with double borders; unexpanded frontier nodes are dashed.
pub fn to_dot<T: Display>(exp: &Exploration<T>, label_width: usize) -> String {
    fn esc(s: &str) -> String {
        s.replace('\\', "\\\\").replace('"', "\\\"")
    }
    let clip = |s: String| {
        if s.chars().count() <= label_width {
            s
        } else {
            let mut c: String = s.chars().take(label_width.saturating_sub(1)).collect();
            c.push('…');
            c
        }
    };
    let mut out = String::new();
    out.push_str("digraph reduction {\n");
    out.push_str("  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, n) in exp.nodes.iter().enumerate() {
        let mut attrs = format!("label=\"{}\"", esc(&clip(n.term.to_string())));
        if i == 0 {
            attrs.push_str(", penwidth=2");
        }
        if n.normal {
            attrs.push_str(", peripheries=2, style=filled, fillcolor=\"palegreen\"");
        } else if !n.expanded {
            attrs.push_str(", style=dashed");
        }
        out.push_str(&format!("  n{i} [{attrs}];\n"));
    }
    for e in &exp.edges {
        out.push_str(&format!("  n{} -> n{} [label=\"{}\"];\n", e.from, e.to, e.rule));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // Toy system on integers: n -> n+1 and n -> n+2, capped at 5; redex-free
    // above 4. Graph from 0: nodes 0..=5, normal form 5.
    fn step(n: &u32) -> Vec<(&'static str, u32)> {
        let mut out = vec![];
        if *n < 5 {
            out.push(("one", *n + 1));
            if *n + 2 <= 5 {
                out.push(("two", *n + 2));
            }
        }
        out
    }

    #[test]
    fn explore_exhaustive() {
        let exp = explore(&0u32, |n| n.to_string(), step, &Budget::unbounded());
        assert!(exp.exhaustive());
        assert_eq!(exp.nodes.len(), 6);
        let vs = ValueSet::from_exploration(&exp);
        assert_eq!(vs.normals, vec![5]);
        assert!(vs.exhaustive);
        assert_eq!(vs.pending, 0);
    }

    #[test]
    fn explore_budget_stops() {
        let exp = explore(&0u32, |n| n.to_string(), step, &Budget::nodes(3));
        assert!(!exp.exhaustive());
        assert!(exp.pending() > 0);
        assert_eq!(exp.nodes.len(), 3);
    }

    #[test]
    fn explore_depth_cut_counts_pending() {
        let exp = explore(&0u32, |n| n.to_string(), step, &Budget::unbounded().with_depth(1));
        assert!(!exp.exhaustive());
        assert!(exp.depth_cut > 0);
        // Depth 0 and 1 nodes only: {0, 1, 2}.
        assert_eq!(exp.nodes.len(), 3);
        let vs = ValueSet::from_exploration(&exp);
        assert!(!vs.exhaustive);
        assert!(vs.pending > 0, "depth cuts must show up as pending work");
    }

    #[test]
    fn dot_escapes_and_marks() {
        let exp = explore(&0u32, |n| n.to_string(), step, &Budget::unbounded());
        let dot = to_dot(&exp, 120);
        assert!(dot.contains("digraph"));
        assert!(dot.contains("peripheries=2"), "normal node must be highlighted");
        assert!(dot.contains("n0 ["));
        // Labels longer than the width are clipped with an ellipsis.
        let exp = explore(&111111u32, |n| n.to_string(), |_| vec![], &Budget::unbounded());
        let dot = to_dot(&exp, 4);
        assert!(dot.contains("label=\"111…\""), "got {dot}");
    }
}

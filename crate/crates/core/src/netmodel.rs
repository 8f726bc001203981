//! Graph data model: construction, structural classification (signed vs.
//! unsigned, directed vs. undirected), connectivity, and weight-balance
//! checks.
//!
//! A [`ComplexGraph`] is the single source of truth for a network. Edges
//! carry one complex weight each; a zero weight is a non-edge and is
//! rejected at construction. For undirected graphs the stored edge set is
//! the symmetric closure, so `adjacency` is symmetric by construction.

use serde::Serialize;
use thiserror::Error;

use crate::numkernel::{c, frobenius_norm, CMatrix, Scalar};

/// Relative tolerance for the weight-balance test.
pub const EPS_BALANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("edge ({from},{to}) out of range for {n} nodes")]
    NodeOutOfRange { from: usize, to: usize, n: usize },
    #[error("self-loop at node {node} is not allowed")]
    SelfLoop { node: usize },
    #[error("duplicate edge ({from},{to})")]
    DuplicateEdge { from: usize, to: usize },
    #[error("asymmetric weights between {a} and {b} in an undirected graph")]
    AsymmetricWeights { a: usize, b: usize },
    #[error("edge ({from},{to}) has zero weight (a zero weight is a non-edge)")]
    ZeroWeight { from: usize, to: usize },
    #[error("edge ({from},{to}) has a non-finite weight")]
    NonFiniteWeight { from: usize, to: usize },
    #[error("expected {n} node labels, got {got}")]
    LabelCount { n: usize, got: usize },
}

/// Directed edge with a complex weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: Scalar,
}

/// Complex-weighted graph. Immutable after construction; every accessor is
/// a pure function, so values are safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGraph {
    n: usize,
    directed: bool,
    edges: Vec<Edge>,
    node_labels: Option<Vec<String>>,
}

/// Sign/direction class in the both-parts convention: a graph is unsigned
/// iff every weight has `Re ≥ 0` and `Im ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GraphClass {
    UnsignedUndirected,
    SignedUndirected,
    UnsignedDigraph,
    SignedDigraph,
}

/// Structural facts about one graph.
///
/// `connected` means connectivity of the support graph for undirected
/// graphs and strong connectivity for digraphs. `component_count` counts
/// connected components (undirected) or strongly connected components
/// (digraphs). `weight_balanced` is true by convention for undirected
/// graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub graph_class: GraphClass,
    pub connected: bool,
    pub weight_balanced: bool,
    pub component_count: usize,
}

impl StructureReport {
    pub fn is_directed(&self) -> bool {
        matches!(
            self.graph_class,
            GraphClass::UnsignedDigraph | GraphClass::SignedDigraph
        )
    }

    pub fn is_unsigned(&self) -> bool {
        matches!(
            self.graph_class,
            GraphClass::UnsignedUndirected | GraphClass::UnsignedDigraph
        )
    }
}

impl ComplexGraph {
    /// Builds a canonical graph from an edge list.
    ///
    /// Edges are validated (bounds, no self-loops, no duplicates, finite
    /// nonzero weights) and stored sorted by `(from, to)`. For undirected
    /// graphs the input may list each edge in one or both directions; when
    /// both are present the weights must be identical, and the stored edge
    /// set is the symmetric closure.
    pub fn new(
        n: usize,
        directed: bool,
        edges: &[(usize, usize, Scalar)],
        node_labels: Option<Vec<String>>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        if let Some(labels) = &node_labels {
            if labels.len() != n {
                return Err(GraphError::LabelCount { n, got: labels.len() });
            }
        }
        let mut seen = std::collections::BTreeMap::<(usize, usize), Scalar>::new();
        for &(from, to, weight) in edges {
            if from >= n || to >= n {
                return Err(GraphError::NodeOutOfRange { from, to, n });
            }
            if from == to {
                return Err(GraphError::SelfLoop { node: from });
            }
            if !weight.re.is_finite() || !weight.im.is_finite() {
                return Err(GraphError::NonFiniteWeight { from, to });
            }
            if weight == c(0.0, 0.0) {
                return Err(GraphError::ZeroWeight { from, to });
            }
            if seen.insert((from, to), weight).is_some() {
                return Err(GraphError::DuplicateEdge { from, to });
            }
        }
        if !directed {
            // symmetric closure; reverse duplicates must carry equal weights
            let pairs: Vec<((usize, usize), Scalar)> =
                seen.iter().map(|(&k, &w)| (k, w)).collect();
            for ((from, to), weight) in pairs {
                match seen.get(&(to, from)) {
                    Some(&back) if back != weight => {
                        return Err(GraphError::AsymmetricWeights {
                            a: from.min(to),
                            b: from.max(to),
                        });
                    }
                    Some(_) => {}
                    None => {
                        seen.insert((to, from), weight);
                    }
                }
            }
        }
        let edges = seen
            .into_iter()
            .map(|((from, to), weight)| Edge { from, to, weight })
            .collect();
        Ok(Self {
            n,
            directed,
            edges,
            node_labels,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    /// Edges sorted by `(from, to)`; symmetric closure for undirected graphs.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_labels(&self) -> Option<&[String]> {
        self.node_labels.as_deref()
    }

    /// Adjacency matrix: `A[i][j]` is the weight of edge `i → j`, zero
    /// diagonal. `a_ij` is fixed as the weight of the edge leaving `i`, so
    /// the out-degree matrix is `diag(A·1)`.
    pub fn adjacency(&self) -> CMatrix {
        let mut a = CMatrix::zeros((self.n, self.n));
        for e in &self.edges {
            a[(e.from, e.to)] = e.weight;
        }
        a
    }

    /// Diagonal out-degree matrix; entry `i` is the `i`-th row sum of the
    /// adjacency matrix, accumulated in ascending column order.
    pub fn out_degree_matrix(&self) -> CMatrix {
        let a = self.adjacency();
        let mut d = CMatrix::zeros((self.n, self.n));
        for i in 0..self.n {
            let mut acc = c(0.0, 0.0);
            for j in 0..self.n {
                acc += a[(i, j)];
            }
            d[(i, i)] = acc;
        }
        d
    }

    /// Structural classification: sign class, connectivity of the support
    /// graph, and weight balance.
    pub fn classify(&self) -> StructureReport {
        let unsigned = self
            .edges
            .iter()
            .all(|e| e.weight.re >= 0.0 && e.weight.im >= 0.0);
        let graph_class = match (self.directed, unsigned) {
            (false, true) => GraphClass::UnsignedUndirected,
            (false, false) => GraphClass::SignedUndirected,
            (true, true) => GraphClass::UnsignedDigraph,
            (true, false) => GraphClass::SignedDigraph,
        };

        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        let component_count = if self.directed {
            tarjan_scc_count(&adj)
        } else {
            undirected_component_count(&adj)
        };
        let connected = component_count == 1;

        let weight_balanced = if self.directed {
            let a = self.adjacency();
            let scale = frobenius_norm(&a).max(1.0);
            let mut worst = 0.0f64;
            for i in 0..self.n {
                let mut row = c(0.0, 0.0);
                let mut col = c(0.0, 0.0);
                for j in 0..self.n {
                    row += a[(i, j)];
                    col += a[(j, i)];
                }
                worst = worst.max((row - col).norm());
            }
            worst <= EPS_BALANCE * scale
        } else {
            true
        };

        StructureReport {
            graph_class,
            connected,
            weight_balanced,
            component_count,
        }
    }
}

fn undirected_component_count(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut queue = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push(start);
        while let Some(v) = queue.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
    }
    count
}

/// Iterative Tarjan SCC count (explicit stack; inputs may be arbitrarily
/// deep paths, so recursion is not an option).
fn tarjan_scc_count(adj: &[Vec<usize>]) -> usize {
    const UNSET: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components = 0usize;
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, 0));

        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            if frame.1 < adj[v].len() {
                let w = adj[v][frame.1];
                frame.1 += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    components += 1;
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        if w == v {
                            break;
                        }
                    }
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::c;

    fn unit() -> Scalar {
        c(1.0, 0.0)
    }

    #[test]
    fn undirected_builds_symmetric_closure() {
        let g = ComplexGraph::new(2, false, &[(0, 1, unit())], None).unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.edges()[0], Edge { from: 0, to: 1, weight: unit() });
        assert_eq!(g.edges()[1], Edge { from: 1, to: 0, weight: unit() });
    }

    #[test]
    fn directed_cycle_is_valid() {
        let g = ComplexGraph::new(
            3,
            true,
            &[(0, 1, unit()), (1, 2, unit()), (2, 0, unit())],
            None,
        )
        .unwrap();
        assert_eq!(g.edges().len(), 3);
    }

    #[test]
    fn asymmetric_undirected_weights_rejected() {
        let err = ComplexGraph::new(2, false, &[(0, 1, unit()), (1, 0, c(2.0, 0.0))], None)
            .unwrap_err();
        assert!(matches!(err, GraphError::AsymmetricWeights { .. }));
    }

    #[test]
    fn rejects_self_loop_duplicate_out_of_range_zero() {
        assert!(matches!(
            ComplexGraph::new(2, true, &[(0, 0, unit())], None),
            Err(GraphError::SelfLoop { .. })
        ));
        assert!(matches!(
            ComplexGraph::new(2, true, &[(0, 1, unit()), (0, 1, unit())], None),
            Err(GraphError::DuplicateEdge { .. })
        ));
        assert!(matches!(
            ComplexGraph::new(2, true, &[(0, 2, unit())], None),
            Err(GraphError::NodeOutOfRange { .. })
        ));
        assert!(matches!(
            ComplexGraph::new(2, true, &[(0, 1, c(0.0, 0.0))], None),
            Err(GraphError::ZeroWeight { .. })
        ));
    }

    #[test]
    fn adjacency_examples() {
        let g = ComplexGraph::new(2, false, &[(0, 1, unit())], None).unwrap();
        let a = g.adjacency();
        assert_eq!(a[(0, 1)], unit());
        assert_eq!(a[(1, 0)], unit());
        assert_eq!(a[(0, 0)], c(0.0, 0.0));

        let g = ComplexGraph::new(
            3,
            true,
            &[(0, 1, unit()), (1, 2, unit()), (2, 0, unit())],
            None,
        )
        .unwrap();
        let a = g.adjacency();
        assert_eq!(a[(0, 1)], unit());
        assert_eq!(a[(1, 2)], unit());
        assert_eq!(a[(2, 0)], unit());
        assert_eq!(a[(1, 0)], c(0.0, 0.0));

        let w = c(1.0, 1.0);
        let g = ComplexGraph::new(2, false, &[(0, 1, w)], None).unwrap();
        assert_eq!(g.adjacency()[(1, 0)], w);
    }

    #[test]
    fn out_degree_examples() {
        let g = ComplexGraph::new(2, false, &[(0, 1, unit())], None).unwrap();
        let d = g.out_degree_matrix();
        assert_eq!(d[(0, 0)], unit());
        assert_eq!(d[(1, 1)], unit());
        assert_eq!(d[(0, 1)], c(0.0, 0.0));

        let w = c(1.0, 1.0);
        let g = ComplexGraph::new(2, false, &[(0, 1, w)], None).unwrap();
        let d = g.out_degree_matrix();
        assert_eq!(d[(0, 0)], w);
        assert_eq!(d[(1, 1)], w);
    }

    #[test]
    fn row_sum_identity_is_exact() {
        // (D_out)_ii must equal the ascending-order row sum bit for bit
        let g = ComplexGraph::new(
            4,
            true,
            &[
                (0, 1, c(0.1, 0.7)),
                (0, 2, c(0.3, -0.2)),
                (0, 3, c(1.4, 0.05)),
                (1, 0, c(2.0, 0.0)),
            ],
            None,
        )
        .unwrap();
        let a = g.adjacency();
        let d = g.out_degree_matrix();
        for i in 0..4 {
            let mut acc = c(0.0, 0.0);
            for j in 0..4 {
                acc += a[(i, j)];
            }
            assert_eq!(d[(i, i)], acc);
        }
    }

    #[test]
    fn classify_directed_cycle() {
        let g = ComplexGraph::new(
            3,
            true,
            &[(0, 1, unit()), (1, 2, unit()), (2, 0, unit())],
            None,
        )
        .unwrap();
        let s = g.classify();
        assert_eq!(s.graph_class, GraphClass::UnsignedDigraph);
        assert!(s.connected);
        assert!(s.weight_balanced);
        assert_eq!(s.component_count, 1);
    }

    #[test]
    fn classify_negative_weight_is_signed() {
        let g = ComplexGraph::new(2, false, &[(0, 1, c(-1.0, 0.0))], None).unwrap();
        let s = g.classify();
        assert_eq!(s.graph_class, GraphClass::SignedUndirected);
        assert!(s.connected);
        assert!(s.weight_balanced);
    }

    #[test]
    fn classify_directed_path_not_balanced() {
        let g = ComplexGraph::new(3, true, &[(0, 1, unit()), (1, 2, unit())], None).unwrap();
        let s = g.classify();
        assert_eq!(s.graph_class, GraphClass::UnsignedDigraph);
        assert!(!s.connected);
        assert!(!s.weight_balanced);
        assert_eq!(s.component_count, 3);
    }

    #[test]
    fn negative_imaginary_part_is_signed() {
        // 1 - 0.5i fails the both-parts rule even though Re > 0
        let g = ComplexGraph::new(2, false, &[(0, 1, c(1.0, -0.5))], None).unwrap();
        assert_eq!(g.classify().graph_class, GraphClass::SignedUndirected);
    }

    #[test]
    fn undirected_graphs_are_always_weight_balanced() {
        let g = ComplexGraph::new(3, false, &[(0, 1, c(0.3, -2.0)), (1, 2, c(5.0, 1.0))], None)
            .unwrap();
        assert!(g.classify().weight_balanced);
    }
}

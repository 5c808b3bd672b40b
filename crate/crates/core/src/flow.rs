//! Exact integer max-flow (Edmonds-Karp) over arbitrary-precision
//! capacities. No floating point: the feasibility verdicts built on top
//! of this are exact statements.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::Zero;

pub(crate) type EdgeId = usize;

struct Edge {
    to: usize,
    /// Residual capacity; the paired reverse edge accumulates the flow.
    residual: BigUint,
}

pub(crate) struct FlowNetwork {
    edges: Vec<Edge>,
    adjacency: Vec<Vec<EdgeId>>,
}

impl FlowNetwork {
    pub(crate) fn new(node_count: usize) -> Self {
        FlowNetwork {
            edges: Vec::new(),
            adjacency: vec![Vec::new(); node_count],
        }
    }

    /// Adds a directed edge and its zero-capacity reverse. Returns the
    /// forward edge id; the reverse is `id ^ 1`.
    pub(crate) fn add_edge(&mut self, from: usize, to: usize, capacity: BigUint) -> EdgeId {
        let id = self.edges.len();
        self.edges.push(Edge {
            to,
            residual: capacity,
        });
        self.edges.push(Edge {
            to: from,
            residual: BigUint::zero(),
        });
        self.adjacency[from].push(id);
        self.adjacency[to].push(id + 1);
        id
    }

    /// Flow pushed through a forward edge so far.
    pub(crate) fn flow_on(&self, edge: EdgeId) -> &BigUint {
        &self.edges[edge ^ 1].residual
    }

    /// Edmonds-Karp: repeatedly augment along a shortest residual path.
    pub(crate) fn max_flow(&mut self, source: usize, sink: usize) -> BigUint {
        let mut total = BigUint::zero();
        loop {
            // BFS for a shortest augmenting path, remembering the edge
            // that discovered each node.
            let mut parent_edge: Vec<Option<EdgeId>> = vec![None; self.adjacency.len()];
            let mut queue = VecDeque::new();
            queue.push_back(source);
            'bfs: while let Some(u) = queue.pop_front() {
                for &e in &self.adjacency[u] {
                    let v = self.edges[e].to;
                    if v != source && parent_edge[v].is_none() && !self.edges[e].residual.is_zero()
                    {
                        parent_edge[v] = Some(e);
                        if v == sink {
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if parent_edge[sink].is_none() {
                return total;
            }

            // Bottleneck along the path.
            let mut bottleneck: Option<BigUint> = None;
            let mut v = sink;
            while v != source {
                let e = parent_edge[v].expect("path edge");
                let r = &self.edges[e].residual;
                bottleneck = Some(match bottleneck {
                    None => r.clone(),
                    Some(b) if *r < b => r.clone(),
                    Some(b) => b,
                });
                v = self.edges[e ^ 1].to;
            }
            let delta = bottleneck.expect("augmenting path is nonempty");

            let mut v = sink;
            while v != source {
                let e = parent_edge[v].expect("path edge");
                self.edges[e].residual -= &delta;
                self.edges[e ^ 1].residual += &delta;
                v = self.edges[e ^ 1].to;
            }
            total += delta;
        }
    }

    /// Nodes reachable from `source` in the residual graph; after a
    /// maximum flow this is the source side of a minimum cut.
    pub(crate) fn residual_reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adjacency.len()];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adjacency[u] {
                let v = self.edges[e].to;
                if !seen[v] && !self.edges[e].residual.is_zero() {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn tiny_diamond() {
        // s -> a -> t and s -> b -> t, plus a -> b.
        let mut net = FlowNetwork::new(4);
        let (s, a, b, t) = (0, 1, 2, 3);
        net.add_edge(s, a, big(3));
        net.add_edge(s, b, big(2));
        net.add_edge(a, b, big(2));
        net.add_edge(a, t, big(2));
        net.add_edge(b, t, big(3));
        assert_eq!(net.max_flow(s, t), big(5));
    }

    #[test]
    fn bottleneck_limits_flow_and_cut_is_reachable_set() {
        let mut net = FlowNetwork::new(4);
        let (s, a, b, t) = (0, 1, 2, 3);
        net.add_edge(s, a, big(10));
        net.add_edge(a, b, big(1));
        net.add_edge(b, t, big(10));
        assert_eq!(net.max_flow(s, t), big(1));
        let reach = net.residual_reachable(s);
        assert_eq!(reach, vec![true, true, false, false]);
    }

    #[test]
    fn flow_on_reports_per_edge_flow() {
        let mut net = FlowNetwork::new(3);
        let e1 = net.add_edge(0, 1, big(4));
        let e2 = net.add_edge(1, 2, big(3));
        assert_eq!(net.max_flow(0, 2), big(3));
        assert_eq!(*net.flow_on(e1), big(3));
        assert_eq!(*net.flow_on(e2), big(3));
    }

    #[test]
    fn disconnected_sink_gets_zero() {
        let mut net = FlowNetwork::new(3);
        net.add_edge(0, 1, big(7));
        assert_eq!(net.max_flow(0, 2), BigUint::zero());
    }
}

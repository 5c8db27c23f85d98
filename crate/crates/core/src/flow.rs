//! Unit-capacity maximum flow (Edmonds-Karp on a residual adjacency list).

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
}

pub(crate) struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
}

impl FlowNetwork {
    pub(crate) fn new(size: usize) -> Self {
        FlowNetwork { adj: vec![Vec::new(); size] }
    }

    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cap: u32) {
        let (rev_from, rev_to) = (self.adj[to].len(), self.adj[from].len());
        self.adj[from].push(Arc { to, cap, rev: rev_from });
        self.adj[to].push(Arc { to: from, cap: 0, rev: rev_to });
    }

    /// Pushes augmenting paths until none remain; returns the flow value.
    pub(crate) fn max_flow(&mut self, source: usize, sink: usize) -> usize {
        let n = self.adj.len();
        let mut total = 0;
        loop {
            // parent[v] = (u, arc index in adj[u])
            let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut queue = VecDeque::from([source]);
            let mut found = false;
            'bfs: while let Some(u) = queue.pop_front() {
                for (k, arc) in self.adj[u].iter().enumerate() {
                    if arc.cap > 0 && arc.to != source && parent[arc.to].is_none() {
                        parent[arc.to] = Some((u, k));
                        if arc.to == sink {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(arc.to);
                    }
                }
            }
            if !found {
                return total;
            }
            // every arc has unit or zero residual except super-source fan-out, so push 1
            let mut v = sink;
            while let Some((u, k)) = parent[v] {
                let rev = self.adj[u][k].rev;
                self.adj[u][k].cap -= 1;
                self.adj[v][rev].cap += 1;
                v = u;
            }
            total += 1;
        }
    }
}

//! Solve substrate shared by graph-backed domains and cut domains.
//!
//! A network is the part of a discrete domain the linear algebra needs:
//! interior vertices with their masses, interior edges with conductances,
//! oriented boundary edges (ports) in counterclockwise cyclic order, and the
//! counterclockwise port rotation at every interior vertex. Cut domains built
//! by surgery are networks whose vertex masses are inherited from the original
//! graph rather than recomputed from the retained edges.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::graph::VertexId;
use crate::solve::SpdSystem;

/// Endpoint of a partition-function computation: an interior vertex (by
/// network index) or an oriented boundary edge (by boundary index).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Interior(usize),
    Boundary(usize),
}

/// One oriented boundary edge (inner vertex -> outer vertex).
#[derive(Clone, Copy, Debug)]
pub struct BdPort {
    /// Interior endpoint, as a network index.
    pub int: usize,
    pub weight: f64,
    /// Full mass of the outer vertex in the underlying graph.
    pub mu_outer: f64,
    /// Original id of the outer vertex.
    pub outer_label: VertexId,
}

#[derive(Clone, Copy, Debug)]
pub enum Port {
    Interior { to: usize, edge: usize, rev_pos: usize },
    Boundary(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct IntEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    /// Edge id in the underlying graph (provenance for cut networks).
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NetworkError {
    Singular,
    IsolatedAfterDeletion { vertex: usize },
    NoElectrode,
    BoundaryWalkStuck,
}

impl fmt::Display for NetworkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkError::Singular => write!(f, "conductance system is singular"),
            NetworkError::IsolatedAfterDeletion { vertex } => {
                write!(f, "interior vertex {vertex} is isolated after Neumann deletion")
            }
            NetworkError::NoElectrode => write!(f, "no electrode edges given"),
            NetworkError::BoundaryWalkStuck => write!(f, "boundary walk did not close"),
        }
    }
}

impl core::error::Error for NetworkError {}

#[derive(Clone, Debug)]
pub struct Network {
    /// Original vertex id per interior index.
    pub labels: Vec<VertexId>,
    /// Vertex mass per interior index (inherited, not recomputed).
    pub mu: Vec<f64>,
    /// Counterclockwise port rotation per interior index.
    pub ports: Vec<Vec<Port>>,
    /// Boundary ports in counterclockwise cyclic order.
    pub bd: Vec<BdPort>,
    /// Ranges of `bd` forming the boundary cycles; the first is the outer one.
    pub cycles: Vec<Range<usize>>,
    /// Unique interior edges.
    pub int_edges: Vec<IntEdge>,
}

impl Network {
    pub fn interior_count(&self) -> usize {
        self.labels.len()
    }

    pub fn boundary_count(&self) -> usize {
        self.bd.len()
    }

    /// Random-walk step probability along a boundary edge, w / mu(inner).
    pub fn bd_transition(&self, b: usize) -> f64 {
        let port = &self.bd[b];
        port.weight / self.mu[port.int]
    }

    /// Transition probability of the reversed boundary edge, w / mu(outer).
    pub fn bd_transition_in(&self, b: usize) -> f64 {
        let port = &self.bd[b];
        port.weight / port.mu_outer
    }

    /// Boundary ports incident to each interior vertex.
    pub fn bd_ports_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.ports[i].iter().filter_map(|p| match p {
            Port::Boundary(b) => Some(*b),
            _ => None,
        })
    }

    /// Walks the boundary counterclockwise and returns the cycles of boundary
    /// indices. Starting from a boundary port, the next one is found by
    /// scanning the rotation counterclockwise, jumping across interior edges.
    pub fn boundary_walk(&self) -> Result<Vec<Vec<usize>>, NetworkError> {
        let mut port_loc = vec![(usize::MAX, usize::MAX); self.bd.len()];
        for (v, ports) in self.ports.iter().enumerate() {
            for (i, p) in ports.iter().enumerate() {
                if let Port::Boundary(b) = p {
                    port_loc[*b] = (v, i);
                }
            }
        }
        let budget = 4 * (self.int_edges.len() + self.bd.len()) + 8;
        let mut seen = vec![false; self.bd.len()];
        let mut cycles = Vec::new();
        for start in 0..self.bd.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut b = start;
            loop {
                seen[b] = true;
                cycle.push(b);
                let (mut v, mut pos) = port_loc[b];
                let mut steps = 0;
                let next = loop {
                    pos = (pos + 1) % self.ports[v].len();
                    match self.ports[v][pos] {
                        Port::Boundary(b2) => break b2,
                        Port::Interior { to, rev_pos, .. } => {
                            v = to;
                            pos = rev_pos;
                        }
                    }
                    steps += 1;
                    if steps > budget {
                        return Err(NetworkError::BoundaryWalkStuck);
                    }
                };
                if next == start {
                    break;
                }
                b = next;
            }
            cycles.push(cycle);
        }
        Ok(cycles)
    }

    /// Renumbers the boundary ports so that `order[new] = old`, updating the
    /// port rotations, and records the cycle ranges.
    pub fn apply_boundary_order(&mut self, order: &[usize], cycle_lens: &[usize]) {
        debug_assert_eq!(order.len(), self.bd.len());
        let mut new_of_old = vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new;
        }
        let bd_old = core::mem::take(&mut self.bd);
        let mut bd_new = Vec::with_capacity(order.len());
        for &old in order {
            bd_new.push(bd_old[old]);
        }
        self.bd = bd_new;
        for ports in &mut self.ports {
            for p in ports.iter_mut() {
                if let Port::Boundary(b) = p {
                    *b = new_of_old[*b];
                }
            }
        }
        self.cycles.clear();
        let mut at = 0;
        for &len in cycle_lens {
            self.cycles.push(at..at + len);
            at += len;
        }
        debug_assert_eq!(at, self.bd.len());
    }

    /// Conductance system for the full Dirichlet problem: diagonal is the
    /// vertex mass, so exterior neighbors enter through the right-hand side.
    pub fn dirichlet_system(&self) -> SpdSystem {
        let n = self.interior_count();
        let mut sys = SpdSystem::new(n);
        for i in 0..n {
            sys.diag[i] = self.mu[i];
        }
        for e in &self.int_edges {
            sys.push_offdiag(e.u, e.v, -e.weight);
        }
        sys.finish();
        sys
    }

    /// Right-hand side carrying boundary data into the Dirichlet system.
    pub fn dirichlet_rhs(&self, data: &[f64]) -> Vec<f64> {
        debug_assert_eq!(data.len(), self.bd.len());
        let mut rhs = vec![0.0; self.interior_count()];
        for (b, port) in self.bd.iter().enumerate() {
            if data[b] != 0.0 {
                rhs[port.int] += port.weight * data[b];
            }
        }
        rhs
    }

    /// Conductance system with Neumann boundary realized by deleting every
    /// free boundary edge: only interior edges and electrode ports remain.
    /// `electrode[b]` is true for boundary edges kept as Dirichlet electrodes.
    pub fn neumann_system(&self, electrode: &[bool]) -> Result<SpdSystem, NetworkError> {
        let n = self.interior_count();
        let mut sys = SpdSystem::new(n);
        for e in &self.int_edges {
            sys.diag[e.u] += e.weight;
            sys.diag[e.v] += e.weight;
            sys.push_offdiag(e.u, e.v, -e.weight);
        }
        let mut touched = false;
        for (b, port) in self.bd.iter().enumerate() {
            if electrode[b] {
                sys.diag[port.int] += port.weight;
                touched = true;
            }
        }
        if !touched {
            return Err(NetworkError::NoElectrode);
        }
        for i in 0..n {
            if sys.diag[i] == 0.0 {
                return Err(NetworkError::IsolatedAfterDeletion { vertex: i });
            }
        }
        // Every interior vertex must reach an electrode through retained edges.
        let mut ok = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        for (b, port) in self.bd.iter().enumerate() {
            if electrode[b] && !ok[port.int] {
                ok[port.int] = true;
                stack.push(port.int);
            }
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.int_edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !ok[w] {
                    ok[w] = true;
                    stack.push(w);
                }
            }
        }
        if ok.iter().any(|&x| !x) {
            return Err(NetworkError::Singular);
        }
        sys.finish();
        Ok(sys)
    }

    pub fn neumann_rhs(&self, hot: &[bool], value: f64) -> Vec<f64> {
        let mut rhs = vec![0.0; self.interior_count()];
        for (b, port) in self.bd.iter().enumerate() {
            if hot[b] {
                rhs[port.int] += port.weight * value;
            }
        }
        rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hand-built network: a single interior vertex with four boundary ports.
    fn star() -> Network {
        Network {
            labels: vec![0],
            mu: vec![4.0],
            ports: vec![vec![
                Port::Boundary(0),
                Port::Boundary(1),
                Port::Boundary(2),
                Port::Boundary(3),
            ]],
            bd: (0..4)
                .map(|i| BdPort {
                    int: 0,
                    weight: 1.0,
                    mu_outer: 4.0,
                    outer_label: i + 1,
                })
                .collect(),
            cycles: vec![0..4],
            int_edges: vec![],
        }
    }

    #[test]
    fn boundary_walk_single_cycle() {
        let net = star();
        let cycles = net.boundary_walk().unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 4);
    }

    #[test]
    fn dirichlet_assembly() {
        let net = star();
        let sys = net.dirichlet_system();
        assert_eq!(sys.diag, vec![4.0]);
        let rhs = net.dirichlet_rhs(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(rhs, vec![1.0]);
    }

    #[test]
    fn neumann_needs_electrode() {
        let net = star();
        assert!(matches!(
            net.neumann_system(&[false; 4]),
            Err(NetworkError::NoElectrode)
        ));
        let sys = net.neumann_system(&[true, false, true, false]).unwrap();
        assert_eq!(sys.diag, vec![2.0]);
    }
}

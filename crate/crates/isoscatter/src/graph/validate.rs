//! Structural validation of metric graphs.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{BoundaryCondition, MetricGraph};
use crate::scalar::Scalar;

/// One violated invariant, carrying the offending element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateVertexId { id: u32 },
    UnknownBondEndpoint { bond: u32, vertex: u32 },
    SelfLoop { bond: u32 },
    NonpositiveLength { bond: u32 },
    UnknownLeadVertex { port: usize, vertex: u32 },
    DuplicateLeadPort { port: usize },
    NonDenseLeadPorts,
    LeadOnDirichletVertex { port: usize, vertex: u32 },
    IsolatedVertex { vertex: u32 },
    Disconnected,
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateVertexId { id } => write!(f, "duplicate vertex id={id}"),
            Violation::UnknownBondEndpoint { bond, vertex } => {
                write!(f, "bond id={bond} references unknown vertex {vertex}")
            }
            Violation::SelfLoop { bond } => write!(f, "self-loop, bond id={bond}"),
            Violation::NonpositiveLength { bond } => {
                write!(f, "nonpositive length, bond id={bond}")
            }
            Violation::UnknownLeadVertex { port, vertex } => {
                write!(f, "lead port={port} references unknown vertex {vertex}")
            }
            Violation::DuplicateLeadPort { port } => write!(f, "duplicate lead port={port}"),
            Violation::NonDenseLeadPorts => write!(f, "lead ports are not dense 0..L-1"),
            Violation::LeadOnDirichletVertex { port, vertex } => {
                write!(f, "lead on Dirichlet vertex, port={port} vertex={vertex}")
            }
            Violation::IsolatedVertex { vertex } => {
                write!(f, "vertex {vertex} has no incident bonds or leads")
            }
            Violation::Disconnected => write!(f, "graph is not connected"),
            Violation::Empty => write!(f, "graph has no bonds and no leads"),
        }
    }
}

/// Every violated invariant found in a graph; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", lines.join("; "))
    }
}

impl<T: Scalar> MetricGraph<T> {
    /// Check every structural invariant, reporting all violations instead
    /// of aborting at the first.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        let mut seen = HashSet::new();
        for v in self.vertices() {
            if !seen.insert(v.id) {
                violations.push(Violation::DuplicateVertexId { id: v.id });
            }
        }
        let ids: HashSet<u32> = self.vertices().iter().map(|v| v.id).collect();
        let bc: HashMap<u32, BoundaryCondition> =
            self.vertices().iter().map(|v| (v.id, v.bc)).collect();

        for b in self.bonds() {
            for endpoint in [b.endpoint_a, b.endpoint_b] {
                if !ids.contains(&endpoint) {
                    violations.push(Violation::UnknownBondEndpoint {
                        bond: b.id,
                        vertex: endpoint,
                    });
                }
            }
            if b.endpoint_a == b.endpoint_b {
                violations.push(Violation::SelfLoop { bond: b.id });
            }
            if !(b.optical_length > T::zero()) {
                violations.push(Violation::NonpositiveLength { bond: b.id });
            }
        }

        let mut ports = HashSet::new();
        for l in self.leads() {
            if !ids.contains(&l.vertex) {
                violations.push(Violation::UnknownLeadVertex {
                    port: l.port,
                    vertex: l.vertex,
                });
            } else if bc[&l.vertex] == BoundaryCondition::Dirichlet {
                violations.push(Violation::LeadOnDirichletVertex {
                    port: l.port,
                    vertex: l.vertex,
                });
            }
            if !ports.insert(l.port) {
                violations.push(Violation::DuplicateLeadPort { port: l.port });
            }
        }
        if !ports.is_empty() && (0..self.leads().len()).any(|p| !ports.contains(&p)) {
            violations.push(Violation::NonDenseLeadPorts);
        }

        if self.bonds().is_empty() && self.leads().is_empty() {
            violations.push(Violation::Empty);
        }

        for v in self.vertices() {
            if self.valency(v.id) == 0 {
                violations.push(Violation::IsolatedVertex { vertex: v.id });
            }
        }

        if !self.is_connected(&ids) {
            violations.push(Violation::Disconnected);
        }

        ValidationReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Union-find over bonds: every vertex must land in one component.
    /// Leads dangle off a single vertex and cannot join components, but a
    /// single-vertex graph with only leads counts as connected.
    fn is_connected(&self, ids: &HashSet<u32>) -> bool {
        if ids.len() <= 1 {
            return true;
        }
        let mut parent: HashMap<u32, u32> = ids.iter().map(|&v| (v, v)).collect();
        fn root(parent: &mut HashMap<u32, u32>, mut v: u32) -> u32 {
            while parent[&v] != v {
                let next = parent[&parent[&v]];
                parent.insert(v, next);
                v = next;
            }
            v
        }
        for b in self.bonds() {
            if ids.contains(&b.endpoint_a) && ids.contains(&b.endpoint_b) {
                let (ra, rb) = (
                    root(&mut parent, b.endpoint_a),
                    root(&mut parent, b.endpoint_b),
                );
                parent.insert(ra, rb);
            }
        }
        let mut roots = ids.iter().map(|&v| root(&mut parent, v));
        let first = roots.next().expect("nonempty");
        roots.all(|r| r == first)
    }
}

//! Open metric graphs: vertices with boundary conditions, bonds with
//! optical lengths, and semi-infinite leads defining scattering ports.
//!
//! A [`MetricGraph`] is immutable after construction; every operation on it
//! is pure, so values can be shared freely across workers.

mod builtin;
mod validate;

pub use builtin::{builtin_graph, builtin_source, BuiltinGraph, LEN_A, LEN_B, LEN_C};
pub use validate::{ValidationReport, Violation};

use crate::scalar::Scalar;
use thiserror::Error;

/// Vertex matching condition for the wave function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    /// Value continuous across all incident edges, outward derivatives sum
    /// to zero (Kirchhoff condition).
    Neumann,
    /// Wave function vanishes at the vertex on every incident edge.
    Dirichlet,
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Neumann => write!(f, "neumann"),
            BoundaryCondition::Dirichlet => write!(f, "dirichlet"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vertex {
    pub id: u32,
    pub bc: BoundaryCondition,
}

/// Finite edge with a fixed optical length in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond<T> {
    pub id: u32,
    pub endpoint_a: u32,
    pub endpoint_b: u32,
    pub optical_length: T,
}

/// Semi-infinite edge carrying incoming/outgoing waves; `port` indexes the
/// scattering matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lead {
    pub port: usize,
    pub vertex: u32,
}

/// Immutable open metric graph: the system under study.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph<T> {
    vertices: Vec<Vertex>,
    bonds: Vec<Bond<T>>,
    leads: Vec<Lead>,
}

/// Speed of light in vacuum, m/s.
pub const C_VACUUM: f64 = 2.997_924_58e8;

/// Default relative dielectric constant of the coaxial-cable filling.
pub const EPSILON_DEFAULT: f64 = 2.08;

/// Physical constants tying optical lengths to laboratory cable lengths.
///
/// All stored lengths are optical, and the solver combines them with the
/// vacuum wavenumber; `epsilon` only matters when converting to or from
/// physical cable lengths (they differ by a factor sqrt(epsilon)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    pub c_vacuum: T,
    pub epsilon: T,
}

impl<T: Scalar> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self {
            c_vacuum: T::lit(C_VACUUM),
            epsilon: T::lit(EPSILON_DEFAULT),
        }
    }
}

impl<T: Scalar> PhysicalConstants<T> {
    pub fn with_epsilon(epsilon: T) -> Result<Self, GraphError> {
        if epsilon < T::one() {
            return Err(GraphError::EpsilonBelowOne {
                epsilon: epsilon.as_f64(),
            });
        }
        Ok(Self {
            epsilon,
            ..Self::default()
        })
    }

    /// Optical length divided by sqrt(epsilon).
    pub fn optical_to_physical(&self, optical: T) -> T {
        optical / self.epsilon.sqrt()
    }

    /// Physical length multiplied by sqrt(epsilon).
    pub fn physical_to_optical(&self, physical: T) -> T {
        physical * self.epsilon.sqrt()
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown vertex id {id}")]
    UnknownVertex { id: u32 },
    #[error("vertex {vertex} carries a lead and cannot become Dirichlet")]
    LeadOnDirichlet { vertex: u32 },
    #[error("frequency must be positive, got {nu} Hz")]
    NonpositiveFrequency { nu: f64 },
    #[error("dielectric constant must be >= 1, got {epsilon}")]
    EpsilonBelowOne { epsilon: f64 },
}

impl<T: Scalar> MetricGraph<T> {
    /// Assemble a graph from parts. No validation is performed here; call
    /// [`MetricGraph::validate`] to obtain the violation report.
    pub fn new(vertices: Vec<Vertex>, bonds: Vec<Bond<T>>, leads: Vec<Lead>) -> Self {
        Self {
            vertices,
            bonds,
            leads,
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn bonds(&self) -> &[Bond<T>] {
        &self.bonds
    }

    pub fn leads(&self) -> &[Lead] {
        &self.leads
    }

    pub fn vertex(&self, id: u32) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    /// Number of scattering ports.
    pub fn num_ports(&self) -> usize {
        self.leads.len()
    }

    /// Bond endpoints plus attached leads meeting at the vertex.
    pub fn valency(&self, id: u32) -> usize {
        let bond_ends = self
            .bonds
            .iter()
            .map(|b| usize::from(b.endpoint_a == id) + usize::from(b.endpoint_b == id))
            .sum::<usize>();
        let leads = self.leads.iter().filter(|l| l.vertex == id).count();
        bond_ends + leads
    }

    /// Sum of optical bond lengths; leads are excluded.
    pub fn total_length(&self) -> T {
        self.bonds
            .iter()
            .fold(T::zero(), |acc, b| acc + b.optical_length)
    }

    /// How many vacuum wavelengths of frequency `nu` the total optical
    /// length spans: `total_length * nu / c`.
    pub fn wavelength_count(&self, nu: T) -> Result<T, GraphError> {
        if nu <= T::zero() {
            return Err(GraphError::NonpositiveFrequency { nu: nu.as_f64() });
        }
        let c = PhysicalConstants::<T>::default().c_vacuum;
        Ok(self.total_length() * nu / c)
    }

    /// New graph identical except for one vertex boundary condition.
    pub fn with_boundary_override(
        &self,
        vertex: u32,
        bc: BoundaryCondition,
    ) -> Result<Self, GraphError> {
        if self.vertex(vertex).is_none() {
            return Err(GraphError::UnknownVertex { id: vertex });
        }
        if bc == BoundaryCondition::Dirichlet && self.leads.iter().any(|l| l.vertex == vertex) {
            return Err(GraphError::LeadOnDirichlet { vertex });
        }
        let mut out = self.clone();
        for v in &mut out.vertices {
            if v.id == vertex {
                v.bc = bc;
            }
        }
        Ok(out)
    }

    /// Closed version of the graph: all leads removed.
    pub fn without_leads(&self) -> Self {
        Self {
            vertices: self.vertices.clone(),
            bonds: self.bonds.clone(),
            leads: Vec::new(),
        }
    }
}

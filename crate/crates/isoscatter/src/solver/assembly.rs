//! Assembly of the vertex-condition linear system.
//!
//! Unknowns, for a graph with `B` bonds and `L` leads:
//!
//! * per bond `i` with endpoints `u -> w` and length `l`, the amplitudes
//!   `(alpha_i, beta_i)` of `psi(x) = alpha e^{ikx} + beta e^{-ikx}` with
//!   `x = 0` at `u`, stored at columns `2i` and `2i + 1`;
//! * per lead of port `p`, the outgoing amplitude `O_p` of
//!   `psi(x) = I_p e^{-ikx} + O_p e^{ikx}` with `x` measured away from the
//!   vertex, stored at column `2B + p`.
//!
//! Each Neumann vertex of valency `d` contributes `d - 1` value-equality
//! rows plus one zero-sum row of outward derivatives; each Dirichlet vertex
//! contributes `d` vanishing-value rows. The totals match: `sum(d) = 2B + L`
//! rows for `2B + L` unknowns. Incoming amplitudes only enter the
//! right-hand side, one injection column per port.

use std::collections::BTreeMap;

use nalgebra::{Complex, ComplexField, DMatrix};

use super::SolverError;
use crate::graph::{BoundaryCondition, MetricGraph};
use crate::scalar::Scalar;

/// The assembled system `M x = R`: square matrix of size `2B + L` and the
/// `L` injection columns for unit incoming amplitudes.
#[derive(Debug, Clone)]
pub struct OpenSystem<T> {
    pub matrix: DMatrix<Complex<T>>,
    pub injection: DMatrix<Complex<T>>,
}

#[derive(Debug, Clone, Copy)]
enum Endpoint {
    /// Bond index, `x = 0` side.
    BondStart(usize),
    /// Bond index, `x = l` side.
    BondEnd(usize),
    /// Port index.
    Lead(usize),
}

/// Build the vertex-condition system at complex wavenumber `k`.
///
/// `k` may lie anywhere off the origin; pole searches evaluate the same
/// assembly in the lower half-plane.
pub fn assemble_open_system<T: Scalar>(
    graph: &MetricGraph<T>,
    k: Complex<T>,
) -> Result<OpenSystem<T>, SolverError> {
    let report = graph.validate();
    if !report.is_empty() {
        return Err(SolverError::InvalidGraph(report));
    }
    if k.re == T::zero() && k.im == T::zero() {
        return Err(SolverError::ZeroWavenumber);
    }

    let num_bonds = graph.bonds().len();
    let num_leads = graph.leads().len();
    let size = 2 * num_bonds + num_leads;

    let one = Complex::new(T::one(), T::zero());
    let ik = Complex::new(T::zero(), T::one()) * k;
    // (e^{ikl}, e^{-ikl}) per bond
    let phases: Vec<(Complex<T>, Complex<T>)> = graph
        .bonds()
        .iter()
        .map(|b| {
            let kl = ik * b.optical_length;
            (kl.exp(), (-kl).exp())
        })
        .collect();

    let mut incidence: BTreeMap<u32, Vec<Endpoint>> = graph
        .vertices()
        .iter()
        .map(|v| (v.id, Vec::new()))
        .collect();
    for (i, b) in graph.bonds().iter().enumerate() {
        incidence
            .get_mut(&b.endpoint_a)
            .expect("validated endpoint")
            .push(Endpoint::BondStart(i));
        incidence
            .get_mut(&b.endpoint_b)
            .expect("validated endpoint")
            .push(Endpoint::BondEnd(i));
    }
    for lead in graph.leads() {
        incidence
            .get_mut(&lead.vertex)
            .expect("validated lead vertex")
            .push(Endpoint::Lead(lead.port));
    }
    let conditions: BTreeMap<u32, BoundaryCondition> =
        graph.vertices().iter().map(|v| (v.id, v.bc)).collect();

    // wave value at an endpoint: unknown coefficients plus the port whose
    // incoming unit amplitude enters as a constant
    let value_terms = |e: Endpoint| -> (Vec<(usize, Complex<T>)>, Option<usize>) {
        match e {
            Endpoint::BondStart(i) => (vec![(2 * i, one), (2 * i + 1, one)], None),
            Endpoint::BondEnd(i) => (vec![(2 * i, phases[i].0), (2 * i + 1, phases[i].1)], None),
            Endpoint::Lead(p) => (vec![(2 * num_bonds + p, one)], Some(p)),
        }
    };
    // outward derivative (from the vertex into the edge)
    let derivative_terms = |e: Endpoint| -> (Vec<(usize, Complex<T>)>, Option<usize>) {
        match e {
            Endpoint::BondStart(i) => (vec![(2 * i, ik), (2 * i + 1, -ik)], None),
            Endpoint::BondEnd(i) => (
                vec![(2 * i, -ik * phases[i].0), (2 * i + 1, ik * phases[i].1)],
                None,
            ),
            Endpoint::Lead(p) => (vec![(2 * num_bonds + p, ik)], Some(p)),
        }
    };

    let mut matrix = DMatrix::zeros(size, size);
    let mut injection = DMatrix::zeros(size, num_leads);
    let mut row = 0;

    for (vertex_id, endpoints) in &incidence {
        match conditions[vertex_id] {
            BoundaryCondition::Dirichlet => {
                for &e in endpoints {
                    let (terms, port) = value_terms(e);
                    for (col, coeff) in terms {
                        matrix[(row, col)] += coeff;
                    }
                    if let Some(p) = port {
                        injection[(row, p)] -= one;
                    }
                    row += 1;
                }
            }
            BoundaryCondition::Neumann => {
                let first = endpoints[0];
                for &e in &endpoints[1..] {
                    for (sign, endpoint) in [(one, e), (-one, first)] {
                        let (terms, port) = value_terms(endpoint);
                        for (col, coeff) in terms {
                            matrix[(row, col)] += sign * coeff;
                        }
                        if let Some(p) = port {
                            injection[(row, p)] -= sign;
                        }
                    }
                    row += 1;
                }
                for &e in endpoints {
                    let (terms, port) = derivative_terms(e);
                    for (col, coeff) in terms {
                        matrix[(row, col)] += coeff;
                    }
                    if let Some(p) = port {
                        injection[(row, p)] += ik;
                    }
                }
                row += 1;
            }
        }
    }
    debug_assert_eq!(row, size);

    Ok(OpenSystem { matrix, injection })
}

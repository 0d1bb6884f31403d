//! The two bundled isoscattering networks.
//!
//! Both networks share the same total optical length 2(a+b+c) and form an
//! exactly isoscattering pair: their scattering-matrix determinants agree
//! at every frequency and the matrices themselves are conjugate through
//! the frequency-independent transplantation matrix T = [[1,-1],[1,1]].
//! The edge attachments bundled here are the unique reading of the network
//! diagrams with that property; the acceptance suite verifies it.

use super::{Bond, BoundaryCondition, Lead, MetricGraph, Vertex};
use crate::scalar::Scalar;

/// Optical pendant length a, meters.
pub const LEN_A: f64 = 0.0985;
/// Optical pendant length b, meters.
pub const LEN_B: f64 = 0.1847;
/// Optical stub length c, meters.
pub const LEN_C: f64 = 0.2420;

/// Selector for the two bundled networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinGraph {
    /// Four vertices: a double bond (lengths 2a, 2b) between the two lead
    /// vertices, a Dirichlet c-stub on port 0 and a Neumann c-stub on
    /// port 1.
    I,
    /// Six vertices: central bond 2c between the lead vertices, Neumann
    /// pendants a and b on port 0, Dirichlet pendants a and b on port 1.
    II,
}

impl std::fmt::Display for BuiltinGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BuiltinGraph::I => write!(f, "paper-I"),
            BuiltinGraph::II => write!(f, "paper-II"),
        }
    }
}

impl std::str::FromStr for BuiltinGraph {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper-I" | "I" | "i" | "1" => Ok(BuiltinGraph::I),
            "paper-II" | "II" | "ii" | "2" => Ok(BuiltinGraph::II),
            other => Err(format!(
                "unknown builtin graph `{other}` (expected paper-I or paper-II)"
            )),
        }
    }
}

/// Construct one of the bundled networks.
pub fn builtin_graph<T: Scalar>(which: BuiltinGraph) -> MetricGraph<T> {
    let n = BoundaryCondition::Neumann;
    let d = BoundaryCondition::Dirichlet;
    let (a, b, c) = (T::lit(LEN_A), T::lit(LEN_B), T::lit(LEN_C));
    let two = T::lit(2.0);
    let bond = |id, endpoint_a, endpoint_b, optical_length| Bond {
        id,
        endpoint_a,
        endpoint_b,
        optical_length,
    };
    match which {
        BuiltinGraph::I => MetricGraph::new(
            vec![
                Vertex { id: 1, bc: n },
                Vertex { id: 2, bc: n },
                Vertex { id: 3, bc: n },
                Vertex { id: 4, bc: d },
            ],
            vec![
                bond(0, 1, 2, two * a),
                bond(1, 1, 2, two * b),
                bond(2, 1, 4, c),
                bond(3, 2, 3, c),
            ],
            vec![Lead { port: 0, vertex: 1 }, Lead { port: 1, vertex: 2 }],
        ),
        BuiltinGraph::II => MetricGraph::new(
            vec![
                Vertex { id: 1, bc: n },
                Vertex { id: 2, bc: n },
                Vertex { id: 3, bc: n },
                Vertex { id: 4, bc: d },
                Vertex { id: 5, bc: n },
                Vertex { id: 6, bc: d },
            ],
            vec![
                bond(0, 1, 2, two * c),
                bond(1, 1, 3, a),
                bond(2, 1, 5, b),
                bond(3, 2, 4, a),
                bond(4, 2, 6, b),
            ],
            vec![Lead { port: 0, vertex: 1 }, Lead { port: 1, vertex: 2 }],
        ),
    }
}

/// Bundled graph description file contents for [`BuiltinGraph`].
pub fn builtin_source(which: BuiltinGraph) -> &'static str {
    match which {
        BuiltinGraph::I => include_str!("../../data/paper-I.json"),
        BuiltinGraph::II => include_str!("../../data/paper-II.json"),
    }
}

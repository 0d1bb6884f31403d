//! Graph description files and CSV emission.
//!
//! Graph files are UTF-8 JSON with exactly three keys:
//!
//! ```json
//! { "vertices": [ { "id": 1, "bc": "neumann" } ],
//!   "bonds":    [ { "from": 1, "to": 2, "optical_length_m": 0.197 } ],
//!   "leads":    [ { "port": 0, "vertex": 1 } ] }
//! ```
//!
//! Unknown keys are hard parse errors. Serialization is canonical:
//! vertices, bonds and leads sorted by id/port, numbers rendered with 17
//! significant digits, so structurally equal graphs produce byte-identical
//! text and `parse(serialize(g))` reproduces `g`.

use std::io::Write;

use serde::Deserialize;
use thiserror::Error;

use crate::analysis::SweepRecord;
use crate::graph::{Bond, BoundaryCondition, Lead, MetricGraph, ValidationReport, Vertex};
use crate::scalar::Scalar;
use crate::solver::{PoleSet, SpectrumResult};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("graph parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("graph failed validation: {0}")]
    Validation(ValidationReport),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: Vec<VertexEntry>,
    bonds: Vec<BondEntry>,
    leads: Vec<LeadEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexEntry {
    id: u32,
    bc: BcEntry,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum BcEntry {
    Neumann,
    Dirichlet,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BondEntry {
    from: u32,
    to: u32,
    optical_length_m: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LeadEntry {
    port: usize,
    vertex: u32,
}

/// Parse a graph description; schema violations and invariant failures are
/// both fatal, with element-level messages.
pub fn parse_graph<T: Scalar>(text: &str) -> Result<MetricGraph<T>, IoError> {
    let file: GraphFile = serde_json::from_str(text)?;
    let vertices = file
        .vertices
        .into_iter()
        .map(|v| Vertex {
            id: v.id,
            bc: match v.bc {
                BcEntry::Neumann => BoundaryCondition::Neumann,
                BcEntry::Dirichlet => BoundaryCondition::Dirichlet,
            },
        })
        .collect();
    let bonds = file
        .bonds
        .into_iter()
        .enumerate()
        .map(|(index, b)| Bond {
            id: index as u32,
            endpoint_a: b.from,
            endpoint_b: b.to,
            optical_length: T::lit(b.optical_length_m),
        })
        .collect();
    let leads = file
        .leads
        .into_iter()
        .map(|l| Lead {
            port: l.port,
            vertex: l.vertex,
        })
        .collect();
    let graph = MetricGraph::new(vertices, bonds, leads);
    let report = graph.validate();
    if !report.is_empty() {
        return Err(IoError::Validation(report));
    }
    Ok(graph)
}

/// 17-significant-digit rendering; round-trips any f64 exactly.
fn render_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Canonical graph text (see module docs). Bonds are renumbered densely in
/// id order, matching what parsing assigns.
pub fn serialize_graph<T: Scalar>(graph: &MetricGraph<T>) -> String {
    let mut vertices: Vec<&Vertex> = graph.vertices().iter().collect();
    vertices.sort_by_key(|v| v.id);
    let mut bonds: Vec<&Bond<T>> = graph.bonds().iter().collect();
    bonds.sort_by_key(|b| b.id);
    let mut leads: Vec<&Lead> = graph.leads().iter().collect();
    leads.sort_by_key(|l| l.port);

    let section = |name: &str, rows: Vec<String>| -> String {
        if rows.is_empty() {
            format!("  \"{name}\": []")
        } else {
            format!("  \"{name}\": [\n{}\n  ]", rows.join(",\n"))
        }
    };

    let vertex_rows = vertices
        .iter()
        .map(|v| format!("    {{ \"id\": {}, \"bc\": \"{}\" }}", v.id, v.bc))
        .collect();
    let bond_rows = bonds
        .iter()
        .map(|b| {
            format!(
                "    {{ \"from\": {}, \"to\": {}, \"optical_length_m\": {} }}",
                b.endpoint_a,
                b.endpoint_b,
                render_float(b.optical_length.as_f64())
            )
        })
        .collect();
    let lead_rows = leads
        .iter()
        .map(|l| format!("    {{ \"port\": {}, \"vertex\": {} }}", l.port, l.vertex))
        .collect();

    format!(
        "{{\n{},\n{},\n{}\n}}\n",
        section("vertices", vertex_rows),
        section("bonds", bond_rows),
        section("leads", lead_rows)
    )
}

/// Emit a sweep as CSV and return the number of data rows.
///
/// Header for a 2-port record:
/// `nu_hz,re_s11,im_s11,re_s12,im_s12,re_s21,im_s21,re_s22,im_s22,det_abs,det_phase_unwrapped_rad`,
/// with a trailing `gap` marker column added only when the record has
/// gaps. Gap rows carry the frequency, empty value fields, and the marker.
pub fn write_sweep_csv<T: Scalar, W: Write>(
    record: &SweepRecord<T>,
    out: &mut W,
) -> Result<usize, IoError> {
    let ports = record.ports().unwrap_or(2);
    let has_gaps = !record.gaps.is_empty();

    let mut header = String::from("nu_hz");
    for i in 1..=ports {
        for j in 1..=ports {
            header.push_str(&format!(",re_s{i}{j},im_s{i}{j}"));
        }
    }
    header.push_str(",det_abs,det_phase_unwrapped_rad");
    if has_gaps {
        header.push_str(",gap");
    }
    writeln!(out, "{header}")?;

    for index in 0..record.len() {
        let mut row = render_float(record.nu_grid[index].as_f64());
        match &record.s_matrices[index] {
            Some(s) => {
                for i in 0..ports {
                    for j in 0..ports {
                        let entry = s.entry(i, j);
                        row.push_str(&format!(
                            ",{},{}",
                            render_float(entry.re.as_f64()),
                            render_float(entry.im.as_f64())
                        ));
                    }
                }
                let amp = record.det_amplitude[index].expect("solved point has det");
                let phase = record.det_phase_unwrapped[index].expect("solved point has phase");
                row.push_str(&format!(
                    ",{},{}",
                    render_float(amp.as_f64()),
                    render_float(phase.as_f64())
                ));
                if has_gaps {
                    row.push(',');
                }
            }
            None => {
                for _ in 0..(2 * ports * ports + 2) {
                    row.push(',');
                }
                row.push_str(",gap");
            }
        }
        writeln!(out, "{row}")?;
    }
    Ok(record.len())
}

/// CSV of eigenwavenumbers: `eigen_k_per_m,multiplicity,residual`.
pub fn write_spectrum_csv<T: Scalar, W: Write>(
    result: &SpectrumResult<T>,
    out: &mut W,
) -> Result<usize, IoError> {
    writeln!(out, "eigen_k_per_m,multiplicity,residual")?;
    for root in &result.roots {
        writeln!(
            out,
            "{},{},{}",
            render_float(root.k.as_f64()),
            root.multiplicity,
            render_float(root.residual.as_f64())
        )?;
    }
    Ok(result.roots.len())
}

/// CSV of complex poles: `re_k_per_m,im_k_per_m,residual`.
pub fn write_poles_csv<T: Scalar, W: Write>(
    set: &PoleSet<T>,
    out: &mut W,
) -> Result<usize, IoError> {
    writeln!(out, "re_k_per_m,im_k_per_m,residual")?;
    for pole in &set.poles {
        writeln!(
            out,
            "{},{},{}",
            render_float(pole.k.re.as_f64()),
            render_float(pole.k.im.as_f64()),
            render_float(pole.residual.as_f64())
        )?;
    }
    Ok(set.poles.len())
}

/// Convenience: sweep CSV as a string.
pub fn sweep_csv_string<T: Scalar>(record: &SweepRecord<T>) -> String {
    let mut buffer = Vec::new();
    write_sweep_csv(record, &mut buffer).expect("writing to memory cannot fail");
    String::from_utf8(buffer).expect("csv is ascii")
}

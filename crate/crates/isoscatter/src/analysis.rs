//! Frequency sweeps, phase unwrapping, isoscattering comparison, and
//! transplantation checks.

use nalgebra::{Complex, ComplexField, Matrix2};
use thiserror::Error;

use crate::graph::MetricGraph;
use crate::scalar::Scalar;
use crate::solver::{det_log, scattering_matrix, LossModel, SMatrix, SolverError};

/// One frequency sweep: per-point scattering matrices with determinant
/// amplitude and unwrapped determinant phase. Grid points where the solve
/// was singular are recorded in `gaps` and carry `None` in every per-point
/// field.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord<T> {
    pub nu_grid: Vec<T>,
    pub s_matrices: Vec<Option<SMatrix<T>>>,
    pub det_amplitude: Vec<Option<T>>,
    pub det_phase_unwrapped: Vec<Option<T>>,
    pub gaps: Vec<usize>,
}

impl<T: Scalar> SweepRecord<T> {
    pub fn len(&self) -> usize {
        self.nu_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu_grid.is_empty()
    }

    /// Number of scattering ports, from the first solved point.
    pub fn ports(&self) -> Option<usize> {
        self.s_matrices.iter().flatten().next().map(|s| s.dim())
    }
}

/// Frequency-independent conjugation matrix of the transplantation
/// relation, with its precomputed inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransplantationMatrix<T> {
    t: Matrix2<T>,
    t_inverse: Matrix2<T>,
}

impl<T: Scalar> TransplantationMatrix<T> {
    /// Build from an invertible 2x2 matrix; the product `T T^-1` must come
    /// out as the identity to near machine accuracy.
    pub fn new(t: Matrix2<T>) -> Result<Self, AnalysisError> {
        let t_inverse = t
            .try_inverse()
            .ok_or(AnalysisError::SingularTransplantation)?;
        let product = t * t_inverse;
        let tol = T::lit(1e-14).max(T::lit(8.0) * T::machine_epsilon());
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { T::one() } else { T::zero() };
                if (product[(i, j)] - expected).abs() > tol {
                    return Err(AnalysisError::SingularTransplantation);
                }
            }
        }
        Ok(Self { t, t_inverse })
    }

    pub fn t(&self) -> &Matrix2<T> {
        &self.t
    }

    pub fn t_inverse(&self) -> &Matrix2<T> {
        &self.t_inverse
    }
}

impl<T: Scalar> Default for TransplantationMatrix<T> {
    /// The standard pair-swapping matrix `[[1, -1], [1, 1]]`.
    fn default() -> Self {
        let one = T::one();
        Self::new(Matrix2::new(one, -one, one, one)).expect("constant matrix is invertible")
    }
}

/// Deviation metrics between two sweeps on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<T> {
    /// Max over the grid of `|det S_a - det S_b|` (complex modulus).
    pub max_det_abs_diff: T,
    /// Max unwrapped-phase difference after removing one global 2 pi
    /// multiple, radians.
    pub max_phase_diff: T,
    /// Discrete L2 norm of the complex determinant difference.
    pub l2_det_diff: T,
    /// Max entrywise `|T^-1 S_a T - S_b|` with the default transplantation
    /// matrix; `None` for non-2-port sweeps.
    pub transplant_residual_max: Option<T>,
    pub verdict_isoscattering: bool,
    pub tol_amp: T,
    pub tol_phase: T,
    pub points_compared: usize,
    pub gaps_excluded: usize,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("sweep grids differ; comparisons need identical frequency grids")]
    GridMismatch,
    #[error("operation requires 2-port scattering matrices, got {dim} ports")]
    NotTwoPort { dim: usize },
    #[error("invalid sweep request: {0}")]
    BadSweep(String),
    #[error("transplantation matrix is singular or its inverse fails the identity check")]
    SingularTransplantation,
    #[error("sweeps have no common non-gap grid points")]
    NoCommonPoints,
}

/// Sweep the scattering matrix over a uniform inclusive frequency grid.
///
/// Singular frequencies (bound states of the open system) become gaps, not
/// failures; any other solver error aborts the sweep.
pub fn sweep<T: Scalar>(
    graph: &MetricGraph<T>,
    nu_min: T,
    nu_max: T,
    points: usize,
    loss: &LossModel<T>,
) -> Result<SweepRecord<T>, AnalysisError> {
    if !(T::zero() < nu_min && nu_min < nu_max) {
        return Err(AnalysisError::BadSweep(format!(
            "need 0 < nu_min < nu_max, got [{}, {}]",
            nu_min.as_f64(),
            nu_max.as_f64()
        )));
    }
    if points < 2 {
        return Err(AnalysisError::BadSweep(format!(
            "need at least 2 grid points, got {points}"
        )));
    }

    let span = nu_max - nu_min;
    let denom = T::lit((points - 1) as f64);
    let nu_grid: Vec<T> = (0..points)
        .map(|i| {
            if i + 1 == points {
                nu_max
            } else {
                nu_min + span * T::lit(i as f64) / denom
            }
        })
        .collect();

    let mut s_matrices = Vec::with_capacity(points);
    let mut principal = Vec::with_capacity(points);
    let mut det_amplitude = Vec::with_capacity(points);
    let mut gaps = Vec::new();
    for (index, &nu) in nu_grid.iter().enumerate() {
        match scattering_matrix(graph, nu, loss) {
            Ok(s) => {
                let d = det_log(&s)?;
                det_amplitude.push(Some(d.amplitude));
                principal.push(Some(d.phase));
                s_matrices.push(Some(s));
            }
            Err(SolverError::SingularSystem { .. }) => {
                det_amplitude.push(None);
                principal.push(None);
                s_matrices.push(None);
                gaps.push(index);
            }
            Err(e) => return Err(e.into()),
        }
    }

    let det_phase_unwrapped = unwrap_phase_with_gaps(&principal);

    Ok(SweepRecord {
        nu_grid,
        s_matrices,
        det_amplitude,
        det_phase_unwrapped,
        gaps,
    })
}

/// Continuous representative of a principal-valued phase sequence: each
/// successive difference is brought into `[-pi, pi]` by adding multiples
/// of 2 pi.
pub fn unwrap_phase<T: Scalar>(principal: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(principal.len());
    let mut previous_in = T::zero();
    let mut previous_out = T::zero();
    for (i, &phase) in principal.iter().enumerate() {
        if i == 0 {
            out.push(phase);
        } else {
            let jump = phase - previous_in;
            let wrapped = jump - T::two_pi() * (jump / T::two_pi()).round();
            out.push(previous_out + wrapped);
        }
        previous_in = phase;
        previous_out = *out.last().expect("pushed above");
    }
    out
}

/// Unwrap across gaps: the phase continues from the last solved point.
fn unwrap_phase_with_gaps<T: Scalar>(principal: &[Option<T>]) -> Vec<Option<T>> {
    let dense: Vec<T> = principal.iter().flatten().copied().collect();
    let unwrapped = unwrap_phase(&dense);
    let mut iter = unwrapped.into_iter();
    principal
        .iter()
        .map(|p| p.map(|_| iter.next().expect("one unwrapped value per solved point")))
        .collect()
}

/// Compare the determinants of two sweeps on the same grid.
///
/// Phases are compared after re-anchoring: determinant phases are defined
/// modulo 2 pi per point, so one global multiple of 2 pi (fixed at the
/// first common point) is removed before differencing.
pub fn compare_isoscattering<T: Scalar>(
    sweep_a: &SweepRecord<T>,
    sweep_b: &SweepRecord<T>,
    tol_amp: T,
    tol_phase: T,
) -> Result<ComparisonReport<T>, AnalysisError> {
    if sweep_a.nu_grid != sweep_b.nu_grid {
        return Err(AnalysisError::GridMismatch);
    }
    let common: Vec<usize> = (0..sweep_a.len())
        .filter(|&i| sweep_a.s_matrices[i].is_some() && sweep_b.s_matrices[i].is_some())
        .collect();
    if common.is_empty() {
        return Err(AnalysisError::NoCommonPoints);
    }
    let gaps_excluded = sweep_a.len() - common.len();

    let det_at = |record: &SweepRecord<T>, i: usize| -> Complex<T> {
        let amp = record.det_amplitude[i].expect("common point is solved");
        let phase = record.det_phase_unwrapped[i].expect("common point is solved");
        Complex::new(amp * phase.cos(), amp * phase.sin())
    };

    let first = common[0];
    let anchor_jump = sweep_a.det_phase_unwrapped[first].expect("solved")
        - sweep_b.det_phase_unwrapped[first].expect("solved");
    let offset = T::two_pi() * (anchor_jump / T::two_pi()).round();

    let mut max_det = T::zero();
    let mut l2_sq = T::zero();
    let mut max_phase = T::zero();
    for &i in &common {
        let diff = (det_at(sweep_a, i) - det_at(sweep_b, i)).modulus();
        max_det = max_det.max(diff);
        l2_sq += diff * diff;
        let phase_diff = sweep_a.det_phase_unwrapped[i].expect("solved")
            - sweep_b.det_phase_unwrapped[i].expect("solved")
            - offset;
        max_phase = max_phase.max(phase_diff.abs());
    }

    let transplant_residual_max = if sweep_a.ports() == Some(2) && sweep_b.ports() == Some(2) {
        Some(transplant_residual(
            sweep_a,
            sweep_b,
            &TransplantationMatrix::default(),
            &common,
        ))
    } else {
        None
    };

    Ok(ComparisonReport {
        max_det_abs_diff: max_det,
        max_phase_diff: max_phase,
        l2_det_diff: l2_sq.sqrt(),
        transplant_residual_max,
        verdict_isoscattering: max_det <= tol_amp && max_phase <= tol_phase,
        tol_amp,
        tol_phase,
        points_compared: common.len(),
        gaps_excluded,
    })
}

/// Conjugate one 2-port scattering matrix: `T^-1 S T` at the same
/// frequency.
pub fn transplant<T: Scalar>(
    s: &SMatrix<T>,
    t: &TransplantationMatrix<T>,
) -> Result<SMatrix<T>, AnalysisError> {
    if s.dim() != 2 {
        return Err(AnalysisError::NotTwoPort { dim: s.dim() });
    }
    let complexified = |m: &Matrix2<T>| m.map(|x| Complex::new(x, T::zero()));
    let conjugated = complexified(t.t_inverse()) * s.entries() * complexified(t.t());
    Ok(SMatrix::new(
        s.nu(),
        nalgebra::DMatrix::from_fn(2, 2, |i, j| conjugated[(i, j)]),
    ))
}

/// Max over the common grid of the entrywise transplantation defect
/// `|T^-1 S_a T - S_b|`.
pub fn check_transplantation<T: Scalar>(
    sweep_a: &SweepRecord<T>,
    sweep_b: &SweepRecord<T>,
    t: &TransplantationMatrix<T>,
) -> Result<T, AnalysisError> {
    if sweep_a.nu_grid != sweep_b.nu_grid {
        return Err(AnalysisError::GridMismatch);
    }
    for record in [sweep_a, sweep_b] {
        if let Some(dim) = record.ports() {
            if dim != 2 {
                return Err(AnalysisError::NotTwoPort { dim });
            }
        }
    }
    let common: Vec<usize> = (0..sweep_a.len())
        .filter(|&i| sweep_a.s_matrices[i].is_some() && sweep_b.s_matrices[i].is_some())
        .collect();
    if common.is_empty() {
        return Err(AnalysisError::NoCommonPoints);
    }
    Ok(transplant_residual(sweep_a, sweep_b, t, &common))
}

fn transplant_residual<T: Scalar>(
    sweep_a: &SweepRecord<T>,
    sweep_b: &SweepRecord<T>,
    t: &TransplantationMatrix<T>,
    common: &[usize],
) -> T {
    let mut residual = T::zero();
    for &i in common {
        let sa = sweep_a.s_matrices[i].as_ref().expect("common point");
        let sb = sweep_b.s_matrices[i].as_ref().expect("common point");
        let transplanted = transplant(sa, t).expect("2-port checked by caller");
        for row in 0..2 {
            for col in 0..2 {
                residual =
                    residual.max((transplanted.entry(row, col) - sb.entry(row, col)).modulus());
            }
        }
    }
    residual
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{builtin_graph, BoundaryCondition, BuiltinGraph};
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    #[test]
    fn unwrap_identity_on_smooth_sequences() {
        assert_eq!(unwrap_phase(&[0.0, 0.1, 0.2]), vec![0.0, 0.1, 0.2]);
        assert_eq!(unwrap_phase(&[1.5, 1.5, 1.5]), vec![1.5, 1.5, 1.5]);
        let empty: Vec<f64> = unwrap_phase(&[]);
        assert!(empty.is_empty());
    }

    #[test]
    fn unwrap_corrects_branch_jump() {
        let out = unwrap_phase(&[3.0, -3.0]);
        assert_eq!(out[0], 3.0);
        assert!((out[1] - (2.0 * PI - 3.0)).abs() < 1e-12, "got {}", out[1]);
    }

    #[test]
    fn unwrap_output_differs_by_multiples_of_two_pi() {
        let input = [3.1, -3.1, 2.9, -2.8, -0.4, 0.4, 3.05, -3.05];
        let out = unwrap_phase(&input);
        for (raw, cooked) in input.iter().zip(&out) {
            let turns = (cooked - raw) / (2.0 * PI);
            assert!((turns - turns.round()).abs() < 1e-12);
        }
        for pair in out.windows(2) {
            assert!((pair[1] - pair[0]).abs() <= PI + 1e-12);
        }
    }

    #[test]
    fn sweep_grid_and_amplitudes() {
        let g = builtin_graph::<f64>(BuiltinGraph::I);
        let record = sweep(&g, 0.01e9, 1.7e9, 64, &LossModel::Lossless).unwrap();
        assert_eq!(record.len(), 64);
        assert_eq!(record.nu_grid[0], 0.01e9);
        assert_eq!(record.nu_grid[63], 1.7e9);
        assert!(record.gaps.is_empty());
        for amp in record.det_amplitude.iter().flatten() {
            assert!((amp - 1.0).abs() < 1e-10);
        }

        let two = sweep(&g, 1e9, 2e9, 2, &LossModel::Lossless).unwrap();
        assert_eq!(two.nu_grid, vec![1e9, 2e9]);
    }

    #[test]
    fn lossy_sweep_is_strictly_subunitary() {
        let g = builtin_graph::<f64>(BuiltinGraph::I);
        let record = sweep(&g, 0.01e9, 1.7e9, 32, &LossModel::Constant { im_k: 0.02 }).unwrap();
        for amp in record.det_amplitude.iter().flatten() {
            assert!(*amp < 1.0);
        }
    }

    #[test]
    fn sweep_records_bound_state_gaps() {
        // a lead with two equal Dirichlet stubs has embedded bound states
        // at k = n pi / l; for l = 0.5 m those sit at nu = n * c, so grid
        // points there are singular and must come back as gaps
        use crate::graph::{Bond, Lead, MetricGraph, Vertex, C_VACUUM};
        let g = MetricGraph::new(
            vec![
                Vertex {
                    id: 0,
                    bc: BoundaryCondition::Neumann,
                },
                Vertex {
                    id: 1,
                    bc: BoundaryCondition::Dirichlet,
                },
                Vertex {
                    id: 2,
                    bc: BoundaryCondition::Dirichlet,
                },
            ],
            vec![
                Bond {
                    id: 0,
                    endpoint_a: 0,
                    endpoint_b: 1,
                    optical_length: 0.5,
                },
                Bond {
                    id: 1,
                    endpoint_a: 0,
                    endpoint_b: 2,
                    optical_length: 0.5,
                },
            ],
            vec![Lead { port: 0, vertex: 0 }],
        );
        let record = sweep(&g, C_VACUUM, 2.0 * C_VACUUM, 3, &LossModel::Lossless).unwrap();
        assert_eq!(record.gaps, vec![0, 2], "gaps: {:?}", record.gaps);
        assert!(record.s_matrices[1].is_some());
        assert!(record.det_phase_unwrapped[1].is_some());
        assert!(record.det_amplitude[0].is_none());
    }

    #[test]
    fn sweep_rejects_bad_requests() {
        let g = builtin_graph::<f64>(BuiltinGraph::I);
        assert!(sweep(&g, 1e9, 0.5e9, 16, &LossModel::Lossless).is_err());
        assert!(sweep(&g, 0.0, 1e9, 16, &LossModel::Lossless).is_err());
        assert!(sweep(&g, 0.5e9, 1e9, 1, &LossModel::Lossless).is_err());
    }

    #[test]
    fn comparison_is_reflexively_zero() {
        let g = builtin_graph::<f64>(BuiltinGraph::I);
        let record = sweep(&g, 0.01e9, 1.7e9, 32, &LossModel::Lossless).unwrap();
        let report = compare_isoscattering(&record, &record, 1e-8, 1e-8).unwrap();
        assert_eq!(report.max_det_abs_diff, 0.0);
        assert_eq!(report.max_phase_diff, 0.0);
        assert_eq!(report.l2_det_diff, 0.0);
        assert!(report.verdict_isoscattering);
        assert_eq!(report.points_compared, 32);
    }

    #[test]
    fn pair_matches_and_symmetry_breaking_departs() {
        let a = builtin_graph::<f64>(BuiltinGraph::I);
        let b = builtin_graph::<f64>(BuiltinGraph::II);
        let sa = sweep(&a, 0.01e9, 1.7e9, 128, &LossModel::Lossless).unwrap();
        let sb = sweep(&b, 0.01e9, 1.7e9, 128, &LossModel::Lossless).unwrap();
        let report = compare_isoscattering(&sa, &sb, 1e-8, 1e-8).unwrap();
        assert!(report.verdict_isoscattering, "{report:?}");
        assert!(report.max_det_abs_diff < 1e-9);

        let broken = b
            .with_boundary_override(5, BoundaryCondition::Dirichlet)
            .unwrap();
        let sc = sweep(&broken, 0.01e9, 1.7e9, 128, &LossModel::Lossless).unwrap();
        let report = compare_isoscattering(&sa, &sc, 1e-8, 1e-8).unwrap();
        assert!(!report.verdict_isoscattering);
        assert!(report.max_phase_diff > 1.0);
    }

    #[test]
    fn comparison_metrics_are_symmetric() {
        let a = builtin_graph::<f64>(BuiltinGraph::I);
        let broken = builtin_graph::<f64>(BuiltinGraph::II)
            .with_boundary_override(5, BoundaryCondition::Dirichlet)
            .unwrap();
        let sa = sweep(&a, 0.01e9, 1.7e9, 48, &LossModel::Lossless).unwrap();
        let sb = sweep(&broken, 0.01e9, 1.7e9, 48, &LossModel::Lossless).unwrap();
        let forward = compare_isoscattering(&sa, &sb, 1e-8, 1e-8).unwrap();
        let backward = compare_isoscattering(&sb, &sa, 1e-8, 1e-8).unwrap();
        assert_eq!(forward.max_det_abs_diff, backward.max_det_abs_diff);
        assert_eq!(forward.max_phase_diff, backward.max_phase_diff);
        assert_eq!(forward.l2_det_diff, backward.l2_det_diff);
        assert_eq!(
            forward.verdict_isoscattering,
            backward.verdict_isoscattering
        );
    }

    #[test]
    fn comparison_rejects_mismatched_grids() {
        let g = builtin_graph::<f64>(BuiltinGraph::I);
        let a = sweep(&g, 0.01e9, 1.7e9, 16, &LossModel::Lossless).unwrap();
        let b = sweep(&g, 0.01e9, 1.6e9, 16, &LossModel::Lossless).unwrap();
        assert!(matches!(
            compare_isoscattering(&a, &b, 1e-8, 1e-8),
            Err(AnalysisError::GridMismatch)
        ));
    }

    #[test]
    fn transplantation_matrix_default_shape() {
        let t = TransplantationMatrix::<f64>::default();
        assert_eq!(t.t()[(0, 0)], 1.0);
        assert_eq!(t.t()[(0, 1)], -1.0);
        assert_eq!(t.t_inverse()[(0, 0)], 0.5);
        let product = t.t() * t.t_inverse();
        assert!((product - Matrix2::identity()).abs().max() < 1e-14);

        assert!(TransplantationMatrix::new(Matrix2::new(1.0, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn transplant_fixes_identity_and_preserves_det() {
        let t = TransplantationMatrix::<f64>::default();
        let identity = SMatrix::new(
            1e9,
            DMatrix::from_diagonal_element(2, 2, Complex::new(1.0, 0.0)),
        );
        let conjugated = transplant(&identity, &t).unwrap();
        assert!(
            (conjugated.entries() - identity.entries())
                .map(|c| c.modulus())
                .max()
                < 1e-15
        );

        let g = builtin_graph::<f64>(BuiltinGraph::I);
        let s = scattering_matrix(&g, 0.77e9, &LossModel::Lossless).unwrap();
        let conjugated = transplant(&s, &t).unwrap();
        assert!((conjugated.det() - s.det()).modulus() < 1e-12);
    }

    #[test]
    fn transplant_reconstructs_partner_matrix() {
        let a = builtin_graph::<f64>(BuiltinGraph::I);
        let b = builtin_graph::<f64>(BuiltinGraph::II);
        let t = TransplantationMatrix::default();
        let sa = scattering_matrix(&a, 1.0e9, &LossModel::Lossless).unwrap();
        let sb = scattering_matrix(&b, 1.0e9, &LossModel::Lossless).unwrap();
        let reconstructed = transplant(&sa, &t).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((reconstructed.entry(i, j) - sb.entry(i, j)).modulus() < 1e-9);
            }
        }
    }

    #[test]
    fn transplanted_determinants_match_pointwise_across_a_sweep() {
        // conjugation-invariance of det over real sweep data: the
        // determinant identity is implied by the transplantation relation
        let g = builtin_graph::<f64>(BuiltinGraph::II);
        let t = TransplantationMatrix::default();
        let record = sweep(&g, 0.01e9, 1.7e9, 64, &LossModel::Lossless).unwrap();
        for s in record.s_matrices.iter().flatten() {
            let conjugated = transplant(s, &t).unwrap();
            assert!((conjugated.det() - s.det()).modulus() < 1e-12);
        }
    }

    #[test]
    fn self_transplantation_is_generically_nonzero() {
        let g = builtin_graph::<f64>(BuiltinGraph::I);
        let record = sweep(&g, 0.9e9, 1.1e9, 8, &LossModel::Lossless).unwrap();
        let residual =
            check_transplantation(&record, &record, &TransplantationMatrix::default()).unwrap();
        assert!(residual > 1e-3, "residual {residual}");
    }

    #[test]
    fn transplantation_survives_loss() {
        let a = builtin_graph::<f64>(BuiltinGraph::I);
        let b = builtin_graph::<f64>(BuiltinGraph::II);
        let loss = LossModel::Constant { im_k: 0.02 };
        let sa = sweep(&a, 0.01e9, 1.7e9, 64, &loss).unwrap();
        let sb = sweep(&b, 0.01e9, 1.7e9, 64, &loss).unwrap();
        let residual = check_transplantation(&sa, &sb, &TransplantationMatrix::default()).unwrap();
        assert!(residual < 1e-9, "residual {residual}");
    }
}

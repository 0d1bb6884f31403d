//! Real eigenvalue scan for closed graphs.
//!
//! Eigenwavenumbers are the real `k` where the homogeneous system
//! `M(k) x = 0` admits nontrivial solutions. The smallest singular value
//! `sigma_min(M(k))` is real, nonnegative, and dips to zero exactly there,
//! which makes it a robust secular function: the scan locates its local
//! minima on a uniform grid and a bracketed golden-section search refines
//! each one far below the requested accuracy.

use nalgebra::Complex;

use super::{assemble_open_system, SolverError};
use crate::graph::MetricGraph;
use crate::scalar::Scalar;

/// Acceptance threshold on `sigma_min / sigma_max` for a refined minimum
/// to count as an eigenvalue (double precision; widened to machine scale
/// for narrower scalars).
const ACCEPT_REL: f64 = 1e-8;

/// One eigenwavenumber with its degeneracy and the relative `sigma_min`
/// left after refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRoot<T> {
    pub k: T,
    pub multiplicity: usize,
    pub residual: T,
}

/// Ascending eigenvalues of a closed graph over a scan interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult<T> {
    pub roots: Vec<EigenRoot<T>>,
    /// Set when the scan step exceeds `pi / (2 * total_length)` and roots
    /// may have been skipped.
    pub scan_warning: Option<String>,
}

impl<T: Scalar> SpectrumResult<T> {
    /// Eigenvalues flattened by multiplicity, ascending.
    pub fn eigen_k(&self) -> Vec<T> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.k, r.multiplicity))
            .collect()
    }
}

/// All real eigenwavenumbers of a closed (lead-free) graph in
/// `[k_min, k_max]`, located by a `scan_step` grid over `sigma_min` and
/// refined to well below 1e-9 in `k`.
pub fn eigenvalues<T: Scalar>(
    graph: &MetricGraph<T>,
    k_min: T,
    k_max: T,
    scan_step: T,
) -> Result<SpectrumResult<T>, SolverError> {
    if graph.num_ports() != 0 {
        return Err(SolverError::HasLeads);
    }
    if !(T::zero() < k_min && k_min < k_max) {
        return Err(SolverError::BadRange(format!(
            "need 0 < k_min < k_max, got [{}, {}]",
            k_min.as_f64(),
            k_max.as_f64()
        )));
    }
    if scan_step <= T::zero() {
        return Err(SolverError::BadRange(format!(
            "scan step must be positive, got {}",
            scan_step.as_f64()
        )));
    }

    let scan_warning = {
        let limit = T::pi() / (T::lit(2.0) * graph.total_length());
        (scan_step > limit).then(|| {
            format!(
                "scan step {} exceeds pi/(2 * total length) = {}; roots may be missed",
                scan_step.as_f64(),
                limit.as_f64()
            )
        })
    };

    let sigma = |k: T| -> Result<(T, Vec<T>), SolverError> {
        let system = assemble_open_system(graph, Complex::new(k, T::zero()))?;
        let sv = system.matrix.singular_values();
        let mut values: Vec<T> = sv.iter().copied().collect();
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite singular values"));
        let min = values[0];
        Ok((min, values))
    };

    // uniform grid, endpoint included
    let mut grid = Vec::new();
    let mut k = k_min;
    while k < k_max {
        grid.push(k);
        k += scan_step;
    }
    grid.push(k_max);

    let mut dips: Vec<T> = Vec::with_capacity(grid.len());
    for &k in &grid {
        dips.push(sigma(k)?.0);
    }

    let accept = T::lit(ACCEPT_REL).max(T::lit(50.0) * T::machine_epsilon());
    let mut roots: Vec<EigenRoot<T>> = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        if dips[i] < dips[i - 1] && dips[i] < dips[i + 1] {
            let refined = golden_minimize(grid[i - 1], grid[i + 1], |k| Ok(sigma(k)?.0))?;
            let (_, values) = sigma(refined)?;
            let largest = *values.last().expect("nonempty spectrum matrix");
            if largest == T::zero() {
                continue;
            }
            let residual = values[0] / largest;
            if residual < accept {
                let multiplicity = values.iter().take_while(|&&s| s / largest < accept).count();
                // two grid dips can straddle one root; keep the sharper fit
                if let Some(last) = roots.last_mut() {
                    if (refined - last.k).abs() < T::lit(1e-8) {
                        if residual < last.residual {
                            *last = EigenRoot {
                                k: refined,
                                multiplicity,
                                residual,
                            };
                        }
                        continue;
                    }
                }
                roots.push(EigenRoot {
                    k: refined,
                    multiplicity,
                    residual,
                });
            }
        }
    }

    Ok(SpectrumResult {
        roots,
        scan_warning,
    })
}

/// Golden-section minimization on a bracket, run down to the scalar's
/// resolution (far tighter than the 1e-9 contract).
fn golden_minimize<T: Scalar>(
    mut lo: T,
    mut hi: T,
    mut f: impl FnMut(T) -> Result<T, SolverError>,
) -> Result<T, SolverError> {
    let ratio = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let tol = T::lit(64.0) * T::machine_epsilon();
    for _ in 0..256 {
        if (hi - lo) <= tol * lo.abs().max(T::one()) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d)?;
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}

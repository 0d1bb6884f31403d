//! Resonance pole search in the complex wavenumber plane.
//!
//! Poles of the scattering matrix are the complex zeros of `det M(k)`;
//! under the decay convention used here they live in the lower half-plane.
//! The search scans `log |det M|` (normalized by the Hadamard row bound so
//! the landscape is scale-free) on a rectangular grid, seeds a Newton
//! iteration with numerically differenced derivative at every local
//! minimum, then merges duplicates.

use nalgebra::{Complex, ComplexField};

use super::{assemble_open_system, SolverError};
use crate::graph::MetricGraph;
use crate::scalar::Scalar;

/// Accept a polished zero when `|det M| / prod(row norms)` falls below
/// this (double precision; widened to machine scale for narrower types).
const RESIDUAL_REL: f64 = 1e-10;

/// Merge radius for duplicate zeros, 1/m.
const DEDUP_ABS: f64 = 1e-8;

/// Relative step for the central-difference derivative of `det M`.
const DERIV_STEP: f64 = 1e-6;

/// One scattering pole: zero of `det M` with the normalized residual left
/// after Newton polishing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole<T> {
    pub k: Complex<T>,
    pub residual: T,
}

/// Poles found in a rectangle, sorted by real then imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet<T> {
    pub poles: Vec<Pole<T>>,
    /// Grid seeds whose Newton iteration failed to converge.
    pub discarded_seeds: usize,
}

/// Locate all zeros of `det M(k)` inside `re_range x im_range`, scanning on
/// an `n_re x n_im` grid.
pub fn find_poles<T: Scalar>(
    graph: &MetricGraph<T>,
    re_range: (T, T),
    im_range: (T, T),
    grid: (usize, usize),
) -> Result<PoleSet<T>, SolverError> {
    if graph.num_ports() == 0 {
        return Err(SolverError::NoLeads);
    }
    let (re_lo, re_hi) = re_range;
    let (im_lo, im_hi) = im_range;
    if !(re_lo < re_hi) || !(im_lo < im_hi) {
        return Err(SolverError::BadRange(format!(
            "empty pole rectangle re [{}, {}] x im [{}, {}]",
            re_lo.as_f64(),
            re_hi.as_f64(),
            im_lo.as_f64(),
            im_hi.as_f64()
        )));
    }
    let (n_re, n_im) = grid;
    if n_re < 2 || n_im < 2 {
        return Err(SolverError::BadRange(format!(
            "pole grid must be at least 2x2, got {n_re}x{n_im}"
        )));
    }

    // log |det M(k)| minus the log Hadamard row bound; None where the
    // assembly is undefined (k at the origin)
    let log_residual = |k: Complex<T>| -> Result<Option<T>, SolverError> {
        if k.modulus() < T::lit(1e-12) {
            return Ok(None);
        }
        let (det, log_scale) = det_with_scale(graph, k)?;
        let modulus = det.modulus();
        if modulus == T::zero() {
            return Ok(Some(T::lit(-1e9)));
        }
        Ok(Some(modulus.ln() - log_scale))
    };

    let coord = |lo: T, hi: T, i: usize, n: usize| -> T {
        if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * T::lit(i as f64) / T::lit((n - 1) as f64)
        }
    };

    let mut landscape = vec![vec![None; n_im]; n_re];
    for (i, row) in landscape.iter_mut().enumerate() {
        let re = coord(re_lo, re_hi, i, n_re);
        for (j, cell) in row.iter_mut().enumerate() {
            let im = coord(im_lo, im_hi, j, n_im);
            *cell = log_residual(Complex::new(re, im))?;
        }
    }

    let mut seeds = Vec::new();
    for i in 0..n_re {
        for j in 0..n_im {
            let Some(v) = landscape[i][j] else { continue };
            let mut is_min = true;
            'neighbors: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= n_re as i64 || nj >= n_im as i64 {
                        continue;
                    }
                    if let Some(w) = landscape[ni as usize][nj as usize] {
                        if w < v {
                            is_min = false;
                            break 'neighbors;
                        }
                    }
                }
            }
            if is_min {
                seeds.push(Complex::new(
                    coord(re_lo, re_hi, i, n_re),
                    coord(im_lo, im_hi, j, n_im),
                ));
            }
        }
    }

    let accept = T::lit(RESIDUAL_REL).max(T::lit(100.0) * T::machine_epsilon());
    let mut poles: Vec<Pole<T>> = Vec::new();
    let mut discarded = 0usize;
    'seed: for seed in seeds {
        match newton_polish(graph, seed)? {
            Some((k, residual)) if residual < accept => {
                let margin = T::lit(1e-9);
                let inside = k.re >= re_lo - margin
                    && k.re <= re_hi + margin
                    && k.im >= im_lo - margin
                    && k.im <= im_hi + margin
                    && k.modulus() > T::lit(1e-6);
                if !inside {
                    continue;
                }
                for existing in &mut poles {
                    if (existing.k - k).modulus() < T::lit(DEDUP_ABS) {
                        if residual < existing.residual {
                            *existing = Pole { k, residual };
                        }
                        continue 'seed;
                    }
                }
                poles.push(Pole { k, residual });
            }
            _ => discarded += 1,
        }
    }

    poles.sort_by(|a, b| {
        (a.k.re, a.k.im)
            .partial_cmp(&(b.k.re, b.k.im))
            .expect("finite pole coordinates")
    });
    Ok(PoleSet {
        poles,
        discarded_seeds: discarded,
    })
}

/// `det M(k)` together with the log of the Hadamard row-norm bound, the
/// natural magnitude scale of the determinant.
fn det_with_scale<T: Scalar>(
    graph: &MetricGraph<T>,
    k: Complex<T>,
) -> Result<(Complex<T>, T), SolverError> {
    let system = assemble_open_system(graph, k)?;
    let mut log_scale = T::zero();
    for row in system.matrix.row_iter() {
        log_scale += row.norm().ln();
    }
    let det = system.matrix.lu().determinant();
    Ok((det, log_scale))
}

/// Newton iteration on `det M(k)` with central-difference derivative.
/// Returns the polished zero and its normalized residual, or `None` when
/// the iteration breaks down.
fn newton_polish<T: Scalar>(
    graph: &MetricGraph<T>,
    seed: Complex<T>,
) -> Result<Option<(Complex<T>, T)>, SolverError> {
    let mut k = seed;
    let mut converged = false;
    for _ in 0..80 {
        if k.modulus() < T::lit(1e-9) || !k.re.is_finite() || !k.im.is_finite() {
            return Ok(None);
        }
        let (det, log_scale) = det_with_scale(graph, k)?;
        let modulus = det.modulus();
        let residual = if modulus == T::zero() {
            T::zero()
        } else {
            (modulus.ln() - log_scale).exp()
        };
        let step_h = Complex::new(T::lit(DERIV_STEP) * (T::one() + k.modulus()), T::zero());
        let (det_plus, _) = det_with_scale(graph, k + step_h)?;
        let (det_minus, _) = det_with_scale(graph, k - step_h)?;
        let derivative = (det_plus - det_minus) / (step_h + step_h);
        if derivative.modulus() == T::zero() {
            return Ok(None);
        }
        let step = det / derivative;
        k -= step;
        if step.modulus() < T::lit(1e-11) * (T::one() + k.modulus()) {
            converged = residual < T::lit(1.0);
            break;
        }
    }
    if !converged {
        return Ok(None);
    }
    let (det, log_scale) = det_with_scale(graph, k)?;
    let modulus = det.modulus();
    let residual = if modulus == T::zero() {
        T::zero()
    } else {
        (modulus.ln() - log_scale).exp()
    };
    Ok(Some((k, residual)))
}

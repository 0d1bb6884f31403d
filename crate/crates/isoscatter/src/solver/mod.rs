//! Wave propagation solver: assembles the complex linear system encoding
//! bond propagation and vertex matching conditions, and derives scattering
//! matrices, closed-graph spectra, and resonance poles from it.
//!
//! Sign conventions (fixed once, used everywhere): time dependence
//! `e^{-i omega t}`, outgoing lead waves carry `e^{+ikx}`, and absorption
//! enters as `Im k > 0` so that bond factors `e^{ikl}` decay. Resonance
//! poles then sit at complex `k` with negative imaginary part of the
//! analytic continuation.

mod assembly;
mod poles;
mod spectrum;

pub use assembly::{assemble_open_system, OpenSystem};
pub use poles::{find_poles, Pole, PoleSet};
pub use spectrum::{eigenvalues, EigenRoot, SpectrumResult};

use nalgebra::{Complex, ComplexField, DMatrix};
use thiserror::Error;

use crate::graph::{MetricGraph, ValidationReport};
use crate::scalar::Scalar;

/// Frequency-to-absorption map producing the imaginary part of the
/// wavenumber, in 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossModel<T> {
    /// No absorption; `Im k = 0`.
    Lossless,
    /// Frequency-independent absorption.
    Constant { im_k: T },
    /// `Im k = beta * sqrt(nu / nu_ref)`, the cable-absorption scaling.
    SqrtFrequency { beta: T, nu_ref: T },
}

impl<T: Scalar> LossModel<T> {
    /// Imaginary part of the wavenumber at frequency `nu`.
    pub fn im_k(&self, nu: T) -> T {
        match *self {
            LossModel::Lossless => T::zero(),
            LossModel::Constant { im_k } => im_k,
            LossModel::SqrtFrequency { beta, nu_ref } => beta * (nu / nu_ref).sqrt(),
        }
    }
}

impl<T: Scalar> std::fmt::Display for LossModel<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            LossModel::Lossless => write!(f, "lossless"),
            LossModel::Constant { im_k } => write!(f, "constant:{}", im_k.as_f64()),
            LossModel::SqrtFrequency { beta, nu_ref } => {
                write!(f, "sqrt:{},{}", beta.as_f64(), nu_ref.as_f64())
            }
        }
    }
}

/// Complex wavenumber in 1/m: `Re k = 2 pi nu / c` applied against optical
/// lengths, `Im k >= 0` from the loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber<T> {
    pub k: Complex<T>,
}

/// Build the physical wavenumber for a frequency and loss model.
pub fn wavenumber<T: Scalar>(nu: T, loss: &LossModel<T>) -> Result<Wavenumber<T>, SolverError> {
    if nu <= T::zero() {
        return Err(SolverError::NonpositiveFrequency { nu: nu.as_f64() });
    }
    let c = crate::graph::PhysicalConstants::<T>::default().c_vacuum;
    let re = T::two_pi() * nu / c;
    let im = loss.im_k(nu);
    if im < T::zero() {
        return Err(SolverError::NegativeLoss {
            nu: nu.as_f64(),
            im_k: im.as_f64(),
        });
    }
    Ok(Wavenumber {
        k: Complex::new(re, im),
    })
}

/// Port-indexed scattering matrix at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrix<T> {
    nu: T,
    entries: DMatrix<Complex<T>>,
}

impl<T: Scalar> SMatrix<T> {
    /// Wrap a square matrix of port amplitudes.
    pub fn new(nu: T, entries: DMatrix<Complex<T>>) -> Self {
        assert_eq!(
            entries.nrows(),
            entries.ncols(),
            "scattering matrix must be square"
        );
        Self { nu, entries }
    }

    pub fn nu(&self) -> T {
        self.nu
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[(row, col)]
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn det(&self) -> Complex<T> {
        self.entries.determinant()
    }

    /// Largest entrywise modulus of `S^H S - I`; ~0 for lossless graphs.
    pub fn unitarity_defect(&self) -> T {
        let n = self.dim();
        let product = self.entries.adjoint() * &self.entries;
        let mut defect = T::zero();
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j {
                    Complex::new(T::one(), T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                };
                defect = defect.max((product[(i, j)] - expected).modulus());
            }
        }
        defect
    }

    /// Largest entrywise modulus of `S - S^T`; ~0 for reciprocal systems.
    pub fn reciprocity_defect(&self) -> T {
        let n = self.dim();
        let mut defect = T::zero();
        for i in 0..n {
            for j in 0..n {
                defect = defect.max((self.entries[(i, j)] - self.entries[(j, i)]).modulus());
            }
        }
        defect
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<T> {
        let sv = self.entries.clone().singular_values();
        let mut out: Vec<T> = sv.iter().copied().collect();
        out.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
        out
    }
}

/// Determinant amplitude and principal phase of a scattering matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetLog<T> {
    /// `|det S|`.
    pub amplitude: T,
    /// `Im log det S` in `(-pi, pi]`.
    pub phase: T,
}

/// Amplitude and principal phase of `det S`.
pub fn det_log<T: Scalar>(s: &SMatrix<T>) -> Result<DetLog<T>, SolverError> {
    let det = s.det();
    let amplitude = det.modulus();
    if amplitude == T::zero() {
        return Err(SolverError::ZeroDeterminant);
    }
    let mut phase = det.argument();
    if phase <= -T::pi() {
        phase += T::two_pi();
    }
    Ok(DetLog { amplitude, phase })
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid graph: {0}")]
    InvalidGraph(ValidationReport),
    #[error("graph has no leads; attach at least one to define scattering ports")]
    NoLeads,
    #[error("graph has leads; this operation requires the closed (lead-free) graph")]
    HasLeads,
    #[error("frequency must be positive, got {nu} Hz")]
    NonpositiveFrequency { nu: f64 },
    #[error("loss model produced negative Im k = {im_k} 1/m at nu = {nu} Hz")]
    NegativeLoss { nu: f64, im_k: f64 },
    #[error("wavenumber k = 0 degenerates the bond wave ansatz")]
    ZeroWavenumber,
    #[error("linear system is singular at nu = {nu} Hz (bound state of the open graph)")]
    SingularSystem { nu: f64 },
    #[error("determinant is exactly zero; phase undefined")]
    ZeroDeterminant,
    #[error("invalid range: {0}")]
    BadRange(String),
}

/// Scattering matrix of an open graph at frequency `nu`.
///
/// Column `j` holds the outgoing amplitudes when a unit wave enters port
/// `j` and every other incoming amplitude vanishes; one LU factorization
/// serves all `L` right-hand sides.
pub fn scattering_matrix<T: Scalar>(
    graph: &MetricGraph<T>,
    nu: T,
    loss: &LossModel<T>,
) -> Result<SMatrix<T>, SolverError> {
    if graph.num_ports() == 0 {
        return Err(SolverError::NoLeads);
    }
    let wn = wavenumber(nu, loss)?;
    let system = assemble_open_system(graph, wn.k)?;
    let ports = graph.num_ports();
    let bonds = graph.bonds().len();

    let lu = system.matrix.lu();
    if lu_is_singular(&lu) {
        return Err(SolverError::SingularSystem { nu: nu.as_f64() });
    }
    let solution = lu
        .solve(&system.injection)
        .ok_or(SolverError::SingularSystem { nu: nu.as_f64() })?;

    let entries = DMatrix::from_fn(ports, ports, |out_port, in_port| {
        solution[(2 * bonds + out_port, in_port)]
    });
    Ok(SMatrix::new(nu, entries))
}

/// Near-singularity test on the LU diagonal: the smallest pivot magnitude
/// relative to the largest falls to machine noise exactly when the system
/// hits a bound state.
pub(crate) fn lu_is_singular<T: Scalar>(
    lu: &nalgebra::LU<Complex<T>, nalgebra::Dyn, nalgebra::Dyn>,
) -> bool {
    let diag = lu.u().map_diagonal(|d| d.modulus());
    let mut min = T::max_value().expect("bounded scalar");
    let mut max = T::zero();
    for &d in diag.iter() {
        min = min.min(d);
        max = max.max(d);
    }
    max == T::zero() || min / max < T::lit(100.0) * T::machine_epsilon()
}

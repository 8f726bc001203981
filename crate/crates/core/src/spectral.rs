//! Laplacian construction and spectral analysis: pseudoinverse by two
//! independent routes, corank and psd-of-corank-1 tests, null-vector
//! extraction, the reciprocal-spectrum map, and the rank-1 exponential
//! limit.

use thiserror::Error;

use crate::netmodel::{ComplexGraph, StructureReport};
use crate::numkernel::{
    self, adjoint, c, eig, frobenius_norm, identity, nullspace, ones_matrix, penrose_residuals,
    require_square, solve, svd, CMatrix, CVector, EigenDecomposition, KernelError, Scalar,
};

/// Default relative tolerance for "is this eigenvalue / singular value
/// zero" decisions (corank, psd test, spectrum map, projector route).
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("projector route precondition failed: {0}")]
    ProjectorPrecondition(String),
    #[error("projector-route result violates Penrose condition {condition} (residual {residual:.3e})")]
    PenroseViolation {
        condition: &'static str,
        residual: f64,
    },
    #[error("expected exactly one zero eigenvalue, found {found}")]
    ZeroEigenvalueCount { found: usize },
    #[error("corank is {corank}, operation requires corank 1")]
    CorankMismatch { corank: usize },
    #[error("nonzero eigenvalue {value} is not in the open right half-plane")]
    EigenvalueOutsideRhp { value: Scalar },
    #[error("zero eigenvalue is numerically defective (left/right null vectors are orthogonal)")]
    DefectiveZero,
}

/// Graph Laplacian `L = D_out − A` with exactly zero row sums.
///
/// The diagonal is computed as the negated off-diagonal row sum
/// (accumulated in ascending column order), so summing the off-diagonal
/// entries of a row in ascending column order and then adding the diagonal
/// yields exactly 0.0 in floating point.
pub fn laplacian(g: &ComplexGraph) -> CMatrix {
    let n = g.n();
    let a = g.adjacency();
    let mut l = a.mapv(|w| -w);
    for i in 0..n {
        let mut acc = c(0.0, 0.0);
        for j in 0..n {
            if j != i {
                acc += a[(i, j)];
            }
        }
        l[(i, i)] = acc;
    }
    l
}

/// Which algorithm computes the pseudoinverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinvRoute {
    /// SVD pseudoinverse of the kernel; applies to any matrix.
    General,
    /// `(L + J/n)⁻¹ − J/n`, valid when L has zero row and column sums and a
    /// simple zero eigenvalue. Exact for undirected and weight-balanced
    /// graphs; the result is Penrose-verified, not assumed.
    Projector,
}

/// Laplacian pseudoinverse by the requested route.
pub fn laplacian_pinv(l: &CMatrix, route: PinvRoute) -> Result<CMatrix, SpectralError> {
    match route {
        PinvRoute::General => Ok(numkernel::pinv(l, DEFAULT_ZERO_TOL)?.matrix),
        PinvRoute::Projector => {
            let n = require_square(l)?;
            let scale = frobenius_norm(l);
            let tol = DEFAULT_ZERO_TOL * scale.max(1.0);
            let ones: CVector = CVector::from_elem(n, c(1.0, 0.0));
            let row_violation = numkernel::vector_norm(&l.dot(&ones));
            if row_violation > tol {
                return Err(SpectralError::ProjectorPrecondition(format!(
                    "row sums are not zero (‖L·1‖ = {row_violation:.3e})"
                )));
            }
            let col_violation = numkernel::vector_norm(&adjoint(l).dot(&ones));
            if col_violation > tol {
                return Err(SpectralError::ProjectorPrecondition(format!(
                    "column sums are not zero (‖1^H·L‖ = {col_violation:.3e})"
                )));
            }
            let k = corank(l, DEFAULT_ZERO_TOL)?;
            if k != 1 {
                return Err(SpectralError::ProjectorPrecondition(format!(
                    "zero eigenvalue is not simple (corank = {k})"
                )));
            }
            let shift = ones_matrix(n).mapv(|z| z / n as f64);
            let shifted = l + &shift;
            let inv = solve(&shifted, &identity(n))?.solution;
            let p = &inv - &shift;
            let residuals = penrose_residuals(l, &p);
            if residuals.max() > numkernel::EPS_PINV {
                let (condition, residual) = residuals.worst();
                return Err(SpectralError::PenroseViolation {
                    condition,
                    residual,
                });
            }
            Ok(p)
        }
    }
}

/// Number of singular values at or below `tol` times the largest singular
/// value — the dimension of the numerical null space.
pub fn corank(m: &CMatrix, tol: f64) -> Result<usize, KernelError> {
    require_square(m)?;
    let parts = svd(m)?;
    let smax = parts.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax;
    Ok(parts
        .singular_values
        .iter()
        .filter(|&&s| s <= cut)
        .count())
}

/// Positive semi-definite of corank 1 in the eigenvalue-location sense:
/// exactly one eigenvalue of modulus at most `tol·‖M‖` and every other
/// eigenvalue with real part strictly greater than `tol·‖M‖`.
pub fn is_psd_corank1(m: &CMatrix, tol: f64) -> Result<bool, KernelError> {
    let dec = eig(m)?;
    let scale = frobenius_norm(m);
    Ok(psd_corank1_of_spectrum(&dec.eigenvalues, tol * scale))
}

/// Same test on an already-computed spectrum, with an absolute cutoff.
pub fn psd_corank1_of_spectrum(eigenvalues: &CVector, cut: f64) -> bool {
    let zeros = eigenvalues.iter().filter(|z| z.norm() <= cut).count();
    if zeros != 1 {
        return false;
    }
    eigenvalues
        .iter()
        .filter(|z| z.norm() > cut)
        .all(|z| z.re > cut)
}

/// Spectrum of `L†` from the spectrum of `L`: `{0} ∪ {1/λ}` for each
/// nonzero `λ`, re-sorted by the kernel's eigenvalue order.
///
/// Requires exactly one zero eigenvalue (relative tolerance `tol` against
/// the largest modulus); corank greater than one must be handled by the
/// caller separately.
pub fn pinv_spectrum_map(spectrum: &[Scalar], tol: f64) -> Result<Vec<Scalar>, SpectralError> {
    let scale = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cut = tol * scale;
    let zeros = spectrum.iter().filter(|z| z.norm() <= cut).count();
    if zeros != 1 {
        return Err(SpectralError::ZeroEigenvalueCount { found: zeros });
    }
    let mut out: Vec<Scalar> = Vec::with_capacity(spectrum.len());
    out.push(c(0.0, 0.0));
    for z in spectrum.iter().filter(|z| z.norm() > cut) {
        out.push(c(1.0, 0.0) / z);
    }
    out.sort_by(numkernel::eigenvalue_order);
    Ok(out)
}

/// Hermitian part `(M + M^H)/2`. This is the default "symmetric part": its
/// eigenvalues bracket the real parts of the eigenvalues of `M`
/// (Bendixson), which is the property the corank tests rely on.
pub fn symmetric_part(m: &CMatrix) -> CMatrix {
    (m + &adjoint(m)).mapv(|z| z * 0.5)
}

/// Complex-symmetric part `(M + Mᵀ)/2`, exposed for callers that want the
/// transpose convention instead of the Hermitian one.
pub fn complex_symmetric_part(m: &CMatrix) -> CMatrix {
    (m + &m.t().to_owned()).mapv(|z| z * 0.5)
}

/// Cached spectral analysis of one graph: the Laplacian, its pseudoinverse
/// (general route), the full spectrum, corank, and phase-fixed unit null
/// vectors extracted from the SVD.
#[derive(Debug, Clone)]
pub struct LaplacianBundle {
    pub laplacian: CMatrix,
    pub pinv: CMatrix,
    pub spectrum: EigenDecomposition,
    pub corank: usize,
    pub right_null: Option<CVector>,
    pub left_null: Option<CVector>,
    pub structure: StructureReport,
}

impl LaplacianBundle {
    pub fn analyze(graph: &ComplexGraph) -> Result<Self, SpectralError> {
        let structure = graph.classify();
        let l = laplacian(graph);
        let spectrum = eig(&l)?;
        let corank = corank(&l, DEFAULT_ZERO_TOL)?;
        let pinv = numkernel::pinv(&l, DEFAULT_ZERO_TOL)?.matrix;
        let (mut rights, mut lefts) = nullspace(&l, DEFAULT_ZERO_TOL)?;
        let right_null = if rights.is_empty() {
            None
        } else {
            Some(rights.remove(0))
        };
        let left_null = if lefts.is_empty() {
            None
        } else {
            Some(lefts.remove(0))
        };
        Ok(Self {
            laplacian: l,
            pinv,
            spectrum,
            corank,
            right_null,
            left_null,
            structure,
        })
    }

    pub fn n(&self) -> usize {
        self.laplacian.nrows()
    }

    /// Smallest real part among nonzero eigenvalues of `L` (the spectral
    /// gap of the `−L` flow), when every nonzero eigenvalue is right of the
    /// zero cutoff.
    pub fn spectral_gap(&self) -> Option<f64> {
        let scale = frobenius_norm(&self.laplacian);
        let cut = DEFAULT_ZERO_TOL * scale;
        let mut gap = f64::INFINITY;
        for z in self.spectrum.eigenvalues.iter() {
            if z.norm() > cut {
                gap = gap.min(z.re);
            }
        }
        if gap.is_finite() && gap > 0.0 {
            Some(gap)
        } else {
            None
        }
    }
}

/// Rank-1 limit of `e^{−L·t}` as `t → ∞`: the spectral projector
/// `x·z^H / (z^H·x)` onto the null direction.
///
/// Requires corank 1 and every nonzero eigenvalue of `L` in the open right
/// half-plane; for weight-balanced graphs the result equals `J/n`.
pub fn limit_matrix(bundle: &LaplacianBundle) -> Result<CMatrix, SpectralError> {
    if bundle.corank != 1 {
        return Err(SpectralError::CorankMismatch {
            corank: bundle.corank,
        });
    }
    let scale = frobenius_norm(&bundle.laplacian);
    let cut = DEFAULT_ZERO_TOL * scale;
    for z in bundle.spectrum.eigenvalues.iter() {
        if z.norm() > cut && z.re <= cut {
            return Err(SpectralError::EigenvalueOutsideRhp { value: *z });
        }
    }
    let x = bundle.right_null.as_ref().expect("corank 1 has a null vector");
    let z = bundle.left_null.as_ref().expect("corank 1 has a null vector");
    rank_one_projector(x, z).ok_or(SpectralError::DefectiveZero)
}

/// `x·z^H / (z^H·x)`, or `None` when the null directions are numerically
/// orthogonal (defective zero eigenvalue; the limit does not exist).
pub fn rank_one_projector(x: &CVector, z: &CVector) -> Option<CMatrix> {
    let n = x.len();
    let denom: Scalar = z.iter().zip(x.iter()).map(|(zi, xi)| zi.conj() * xi).sum();
    if denom.norm() <= 1e-12 {
        return None;
    }
    let mut out = CMatrix::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = x[i] * z[j].conj() / denom;
        }
    }
    Some(out)
}

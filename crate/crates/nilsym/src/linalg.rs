//! Tolerance-aware dense linear algebra.
//!
//! Everything downstream (centers, intertwiners, derivation algebras,
//! Killing-field systems) reduces to nullspaces, orthonormalization and
//! eigenspace splits of small dense matrices. All rank decisions here are
//! relative to the largest singular value, and borderline calls raise
//! [`Error::Ambiguous`] instead of guessing.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Default relative tolerance for rank decisions and residual checks.
///
/// Inputs are small rational-entry matrices (dimension at most a few tens),
/// far from ill-conditioned, so a tight threshold is safe.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Rank decisions whose singular-value gap is below this multiple of the
/// threshold are refused as ambiguous.
const AMBIGUITY_FACTOR: f64 = 10.0;

pub fn ensure_finite(name: &str, m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Input(format!("{name} contains a non-finite entry")))
    }
}

pub fn ensure_finite_vector(name: &str, v: &DVector<f64>) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Input(format!("{name} contains a non-finite entry")))
    }
}

/// An orthonormal basis of a subspace of `R^ambient_dim`.
///
/// Orthonormality is with respect to whatever inner product the basis was
/// built against (the standard one for SVD-derived bases, a supplied Gram
/// matrix for [`gram_orthonormalize`]). The basis may be empty (the zero
/// subspace).
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    /// `ambient_dim x k` matrix whose columns are the basis vectors.
    vectors: DMatrix<f64>,
}

impl SubspaceBasis {
    /// The zero subspace.
    pub fn empty(ambient_dim: usize) -> Self {
        SubspaceBasis {
            ambient_dim,
            vectors: DMatrix::zeros(ambient_dim, 0),
        }
    }

    /// The whole ambient space with its coordinate basis.
    pub fn full(ambient_dim: usize) -> Self {
        SubspaceBasis {
            ambient_dim,
            vectors: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    /// Wrap columns that are already orthonormal (callers guarantee this).
    pub fn from_orthonormal_columns(vectors: DMatrix<f64>) -> Self {
        SubspaceBasis {
            ambient_dim: vectors.nrows(),
            vectors,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis_matrix(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn column(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).into_owned()
    }

    pub fn columns(&self) -> Vec<DVector<f64>> {
        (0..self.dim()).map(|i| self.column(i)).collect()
    }

    /// Coordinates of `v` in this basis with respect to `gram`.
    pub fn coordinates_of(&self, v: &DVector<f64>, gram: &DMatrix<f64>) -> DVector<f64> {
        self.vectors.transpose() * gram * v
    }

    /// Orthogonal projection of `v` onto the subspace with respect to `gram`.
    pub fn project(&self, v: &DVector<f64>, gram: &DMatrix<f64>) -> DVector<f64> {
        &self.vectors * self.coordinates_of(v, gram)
    }

    /// Gram-norm of the component of `v` orthogonal to the subspace.
    pub fn residual_norm(&self, v: &DVector<f64>, gram: &DMatrix<f64>) -> f64 {
        let r = v - self.project(v, gram);
        gram_norm(&r, gram)
    }

    /// Max-abs deviation of `B^T G B` from the identity.
    pub fn orthonormality_residual(&self, gram: &DMatrix<f64>) -> f64 {
        let k = self.dim();
        let g = self.vectors.transpose() * gram * &self.vectors;
        (g - DMatrix::<f64>::identity(k, k)).amax()
    }

    /// Basis vectors as coordinate rows (report serialization).
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|j| self.vectors.column(j).iter().copied().collect())
            .collect()
    }
}

pub fn gram_inner(u: &DVector<f64>, v: &DVector<f64>, gram: &DMatrix<f64>) -> f64 {
    (u.transpose() * gram * v)[(0, 0)]
}

pub fn gram_norm(v: &DVector<f64>, gram: &DMatrix<f64>) -> f64 {
    gram_inner(v, v, gram).max(0.0).sqrt()
}

/// Check that `gram` is symmetric positive definite; returns its Cholesky
/// factorization for reuse in solves.
pub fn ensure_spd(name: &str, gram: &DMatrix<f64>, tol: f64) -> Result<Cholesky<f64, Dyn>> {
    ensure_finite(name, gram)?;
    if gram.nrows() != gram.ncols() {
        return Err(Error::Input(format!("{name} is not square")));
    }
    let scale = gram.amax().max(1.0);
    let asym = (gram - gram.transpose()).amax();
    if asym > tol * scale {
        return Err(Error::Input(format!(
            "{name} is not symmetric (residual {asym:.3e})"
        )));
    }
    let sym = (gram + gram.transpose()) * 0.5;
    Cholesky::new(sym)
        .ok_or_else(|| Error::Input(format!("{name} is not positive definite")))
}

/// Orthonormal basis of the nullspace `{x : Mx = 0}`.
///
/// Singular values below `tol * sigma_max` count as zero. When the spectrum
/// has no clear gap around the threshold (gap smaller than 10x the
/// threshold) the rank decision is refused with [`Error::Ambiguous`].
/// The returned basis is orthonormal for the standard inner product and the
/// result is deterministic for a fixed input.
pub fn rank_revealing_nullspace(m: &DMatrix<f64>, tol: f64) -> Result<SubspaceBasis> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    ensure_finite("matrix", m)?;
    let cols = m.ncols();
    if cols == 0 {
        return Ok(SubspaceBasis::empty(0));
    }
    if m.nrows() == 0 {
        return Ok(SubspaceBasis::full(cols));
    }
    // Pad wide matrices with zero rows so the SVD returns all of V.
    let work = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let sigma_max = svd.singular_values[order[0]];
    if sigma_max == 0.0 {
        return Ok(SubspaceBasis::full(cols));
    }
    let threshold = tol * sigma_max;
    let kept_min = order
        .iter()
        .map(|&i| svd.singular_values[i])
        .filter(|&s| s >= threshold)
        .fold(f64::INFINITY, f64::min);
    let dropped_max = order
        .iter()
        .map(|&i| svd.singular_values[i])
        .filter(|&s| s < threshold)
        .fold(0.0, f64::max);
    let gap = (kept_min - dropped_max) / sigma_max;
    if gap < AMBIGUITY_FACTOR * tol {
        return Err(Error::Ambiguous(format!(
            "singular values {kept_min:.6e} (kept) and {dropped_max:.6e} (dropped) leave a \
             relative gap {gap:.3e} below {:.3e}; refusing the rank decision",
            AMBIGUITY_FACTOR * tol
        )));
    }
    let null_indices: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| svd.singular_values[i] < threshold)
        .collect();
    let mut basis = DMatrix::zeros(cols, null_indices.len());
    for (j, &i) in null_indices.iter().enumerate() {
        basis.set_column(j, &v_t.row(i).transpose());
    }
    Ok(SubspaceBasis::from_orthonormal_columns(basis))
}

/// Rank of `m` under the same threshold rules as [`rank_revealing_nullspace`].
pub fn matrix_rank(m: &DMatrix<f64>, tol: f64) -> Result<usize> {
    let null = rank_revealing_nullspace(m, tol)?;
    Ok(m.ncols() - null.dim())
}

/// Outcome of a subspace comparison: equality verdict plus the distance
/// measure (sine of the largest principal angle; 1.0 for a dimension
/// mismatch).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceComparison {
    pub equal: bool,
    pub distance: f64,
}

fn one_sided_distance(a: &SubspaceBasis, b: &SubspaceBasis, gram: &DMatrix<f64>) -> f64 {
    // Residual of each a-column after projecting onto b; the spectral norm
    // of the residual block equals sin(theta_max) and stays accurate for
    // small angles (no 1 - cos cancellation).
    let cross = b.basis_matrix().transpose() * gram * a.basis_matrix();
    let resid = a.basis_matrix() - b.basis_matrix() * cross;
    let small = resid.transpose() * gram * resid;
    let lambda_max = small
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l));
    lambda_max.max(0.0).sqrt()
}

/// Compare two subspaces given by Gram-orthonormal bases.
///
/// Equal iff the dimensions agree and the largest principal angle (with
/// respect to `gram`) is below `tol`.
pub fn subspace_equal(
    a: &SubspaceBasis,
    b: &SubspaceBasis,
    gram: &DMatrix<f64>,
    tol: f64,
) -> Result<SubspaceComparison> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::Input(format!(
            "ambient dimensions differ: {} vs {}",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    if gram.nrows() != a.ambient_dim() || gram.ncols() != a.ambient_dim() {
        return Err(Error::Input(format!(
            "gram matrix is {}x{}, expected {n}x{n}",
            gram.nrows(),
            gram.ncols(),
            n = a.ambient_dim()
        )));
    }
    if a.dim() != b.dim() {
        return Ok(SubspaceComparison {
            equal: false,
            distance: 1.0,
        });
    }
    if a.dim() == 0 {
        return Ok(SubspaceComparison {
            equal: true,
            distance: 0.0,
        });
    }
    let distance = one_sided_distance(a, b, gram).max(one_sided_distance(b, a, gram));
    Ok(SubspaceComparison {
        equal: distance <= tol,
        distance,
    })
}

/// Gram-orthonormal basis of the span of `vectors`; near-dependent vectors
/// are dropped when their orthogonal component falls below `tol` times
/// their original norm.
pub fn gram_orthonormalize(
    vectors: &[DVector<f64>],
    gram: &DMatrix<f64>,
    tol: f64,
) -> Result<SubspaceBasis> {
    ensure_spd("gram matrix", gram, tol)?;
    let n = gram.nrows();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        ensure_finite_vector("input vector", v)?;
        if v.len() != n {
            return Err(Error::Input(format!(
                "vector {idx} has length {}, expected {n}",
                v.len()
            )));
        }
        let original = gram_norm(v, gram);
        if original == 0.0 {
            continue;
        }
        let mut w = v.clone();
        // Modified Gram-Schmidt with one reorthogonalization pass.
        for _ in 0..2 {
            for b in &basis {
                let c = gram_inner(b, &w, gram);
                w -= b * c;
            }
        }
        let remaining = gram_norm(&w, gram);
        if remaining > tol * original {
            basis.push(w / remaining);
        }
    }
    let mut m = DMatrix::zeros(n, basis.len());
    for (j, b) in basis.iter().enumerate() {
        m.set_column(j, b);
    }
    Ok(SubspaceBasis::from_orthonormal_columns(m))
}

/// One eigenvalue cluster of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    pub eigenvalue: f64,
    pub basis: SubspaceBasis,
}

/// Split a symmetric matrix into eigenvalue clusters.
///
/// Eigenvalues within `tol * spectral_radius` of each other (chained over
/// the sorted list) land in the same cluster; cluster bases are orthonormal,
/// mutually orthogonal and together span the whole space. Asymmetry beyond
/// `tol` (relative) is an input error.
pub fn symmetric_eigensplit(s: &DMatrix<f64>, tol: f64) -> Result<Vec<EigenCluster>> {
    ensure_finite("matrix", s)?;
    if s.nrows() != s.ncols() {
        return Err(Error::Input(format!(
            "matrix is {}x{}, expected square",
            s.nrows(),
            s.ncols()
        )));
    }
    let n = s.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = s.amax();
    let asym = (s - s.transpose()).amax();
    if asym > tol * scale.max(1.0) {
        return Err(Error::Input(format!(
            "matrix is not symmetric (residual {asym:.3e} beyond tolerance)"
        )));
    }
    let sym = (s + s.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let radius = order
        .iter()
        .fold(0.0f64, |acc, &i| acc.max(eig.eigenvalues[i].abs()));
    let cluster_width = tol * radius;
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(current)
                if eig.eigenvalues[i] - eig.eigenvalues[*current.last().unwrap()]
                    <= cluster_width =>
            {
                current.push(i);
            }
            _ => clusters.push(vec![i]),
        }
    }
    let result = clusters
        .into_iter()
        .map(|members| {
            let mean =
                members.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / members.len() as f64;
            let mut m = DMatrix::zeros(n, members.len());
            for (j, &i) in members.iter().enumerate() {
                m.set_column(j, &eig.eigenvectors.column(i));
            }
            EigenCluster {
                eigenvalue: mean,
                basis: SubspaceBasis::from_orthonormal_columns(m),
            }
        })
        .collect();
    Ok(result)
}

/// Column-major vectorization of a matrix.
pub fn vectorize(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Commutation matrix `K` with `vec(A^T) = K vec(A)` for `rows x cols` A.
pub fn commutation_matrix(rows: usize, cols: usize) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(rows * cols, rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            k[(j + i * cols, i + j * rows)] = 1.0;
        }
    }
    k
}

/// Stack matrix blocks vertically. All blocks must share a column count.
pub fn vstack(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack blocks must share a column count");
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(b);
        at += b.nrows();
    }
    out
}

//! k-involutions: order-two isometries of ℍⁿ whose fixed point set is a
//! totally geodesic subspace of codimension k, together with the exact
//! sign-vector algebra of the diagonal representatives.
//!
//! A k-involution is orientation reversing exactly when k is odd. Its -1
//! eigenspace is a k-dimensional spacelike subspace and its +1 eigenspace
//! contains a timelike direction (the fixed set meets ℍⁿ).

use nalgebra::{DMatrix, DVector};
use std::collections::BTreeSet;
use thiserror::Error;

use crate::minkowski::{
    j_basis_of_column_space, minkowski_inner, random_isometry, Isometry, MVector, MinkowskiError,
    Orientation, Tolerances,
};

#[derive(Debug, Error)]
pub enum InvolutionError {
    #[error("matrix does not square to the identity (residual {residual})")]
    NotInvolution { residual: f64 },
    #[error("the identity has order one, not two")]
    Identity,
    #[error("fixed set misses hyperbolic space: eigenspace signature is wrong")]
    NoFixedPoint,
    #[error("codimension k = {k} is out of range for n = {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("spatial position {index} is out of range 1..={n}")]
    PositionOutOfRange { index: usize, n: usize },
    #[error("empty position set: the identity is not an involution")]
    EmptyPositions,
    #[error("sign vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sign entries must be +1 or -1, got {0}")]
    BadSign(i8),
    #[error("sign vector has zero weight; it embeds to the identity")]
    ZeroWeight,
    #[error(transparent)]
    Minkowski(#[from] MinkowskiError),
}

/// An involution of ℍⁿ with fixed-set codimension `k`, carrying J-orthonormal
/// bases of its two eigenspaces (`minus_basis` spacelike of size k,
/// `plus_basis` of size n+1-k with the timelike vector first).
#[derive(Debug, Clone)]
pub struct KInvolution {
    iso: Isometry,
    k: usize,
    minus_basis: Vec<MVector>,
    plus_basis: Vec<MVector>,
}

impl KInvolution {
    pub fn iso(&self) -> &Isometry {
        &self.iso
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.iso.n()
    }

    pub fn minus_basis(&self) -> &[MVector] {
        &self.minus_basis
    }

    pub fn plus_basis(&self) -> &[MVector] {
        &self.plus_basis
    }

    /// Spacelike vectors of the fixed set (the plus basis without its
    /// leading timelike vector).
    pub fn fixed_spacelike(&self) -> &[MVector] {
        &self.plus_basis[1..]
    }
}

/// The diagonal involution with -1 exactly at the given spatial coordinates
/// (1-based; coordinate 0 is the timelike one and always stays +1). This is
/// the canonical conjugacy representative with k = |positions|.
pub fn canonical_k_involution(
    n: usize,
    positions: &[usize],
) -> Result<KInvolution, InvolutionError> {
    let set: BTreeSet<usize> = positions.iter().copied().collect();
    if set.is_empty() {
        return Err(InvolutionError::EmptyPositions);
    }
    for &i in &set {
        if i == 0 || i > n {
            return Err(InvolutionError::PositionOutOfRange { index: i, n });
        }
    }
    let dim = n + 1;
    let mut diag = DVector::from_element(dim, 1.0);
    for &i in &set {
        diag[i] = -1.0;
    }
    let k = set.len();
    let orientation = if k % 2 == 0 {
        Orientation::Preserving
    } else {
        Orientation::Reversing
    };
    let iso = Isometry::from_parts(DMatrix::from_diagonal(&diag), orientation);
    let minus_basis = set.iter().map(|&i| unit(dim, i)).collect();
    let mut plus_basis = vec![unit(dim, 0)];
    for i in 1..dim {
        if !set.contains(&i) {
            plus_basis.push(unit(dim, i));
        }
    }
    Ok(KInvolution {
        iso,
        k,
        minus_basis,
        plus_basis,
    })
}

fn unit(dim: usize, i: usize) -> MVector {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

/// Verify that `g` is an involution and recover its eigenstructure.
///
/// Both eigenvalues are exactly +/-1, so the spectral projectors are
/// `(I +/- g)/2`; their column spaces are extracted by rank-revealing SVD and
/// J-orthonormalized. The codimension is the dimension of the -1 eigenspace.
pub fn classify_involution(
    g: &Isometry,
    tol: &Tolerances,
) -> Result<KInvolution, InvolutionError> {
    let m = g.matrix();
    let dim = m.nrows();
    let id = DMatrix::identity(dim, dim);
    let residual = (m * m - &id).norm();
    if residual > tol.recon {
        return Err(InvolutionError::NotInvolution { residual });
    }
    let p_minus = (&id - m) / 2.0;
    let p_plus = (&id + m) / 2.0;
    let minus_basis = j_basis_of_column_space(&p_minus, tol.rank)?;
    let k = minus_basis.len();
    if k == 0 {
        return Err(InvolutionError::Identity);
    }
    let plus_raw = j_basis_of_column_space(&p_plus, tol.rank)?;
    if k + plus_raw.len() != dim {
        return Err(InvolutionError::NotInvolution { residual });
    }
    // Signature checks: the -1 eigenspace must be spacelike-definite and the
    // +1 eigenspace must contain exactly one timelike direction.
    if minus_basis
        .iter()
        .any(|v| minkowski_inner(v, v) < 0.0)
    {
        return Err(InvolutionError::NoFixedPoint);
    }
    let (timelike, spacelike): (Vec<MVector>, Vec<MVector>) = plus_raw
        .into_iter()
        .partition(|v| minkowski_inner(v, v) < 0.0);
    if timelike.len() != 1 {
        return Err(InvolutionError::NoFixedPoint);
    }
    let mut plus_basis = timelike;
    plus_basis.extend(spacelike);
    Ok(KInvolution {
        iso: g.clone(),
        k,
        minus_basis,
        plus_basis,
    })
}

/// A random element of the conjugacy class of k-involutions: the canonical
/// diagonal representative conjugated by a random orientation-preserving
/// isometry. Deterministic in the seed.
pub fn random_k_involution(
    n: usize,
    k: usize,
    seed: u64,
) -> Result<KInvolution, InvolutionError> {
    if k == 0 || k >= n {
        return Err(InvolutionError::KOutOfRange { k, n });
    }
    let positions: Vec<usize> = (1..=k).collect();
    let canonical = canonical_k_involution(n, &positions)?;
    let u = random_isometry(n, Orientation::Preserving, seed);
    let iso = &(&u * canonical.iso()) * &u.inverse();
    // Conjugation carries the adapted eigenbases along exactly.
    let minus_basis = canonical.minus_basis.iter().map(|v| u.apply(v)).collect();
    let plus_basis = canonical.plus_basis.iter().map(|v| u.apply(v)).collect();
    Ok(KInvolution {
        iso,
        k,
        minus_basis,
        plus_basis,
    })
}

/// An element of the group {+1,-1}^n of diagonal sign patterns on the n
/// spatial coordinates, i.e. ℤ₂ⁿ written multiplicatively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self, InvolutionError> {
        if let Some(&bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(InvolutionError::BadSign(bad));
        }
        Ok(SignVector { signs })
    }

    /// The all-plus identity element of length n.
    pub fn identity(n: usize) -> Self {
        SignVector { signs: vec![1; n] }
    }

    /// Build a sign vector of length n with -1 exactly at the given
    /// 1-based positions.
    pub fn from_minus_positions(n: usize, positions: &[usize]) -> Result<Self, InvolutionError> {
        let mut signs = vec![1i8; n];
        for &p in positions {
            if p == 0 || p > n {
                return Err(InvolutionError::PositionOutOfRange { index: p, n });
            }
            signs[p - 1] = -1;
        }
        Ok(SignVector { signs })
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Number of -1 entries.
    pub fn weight(&self) -> usize {
        self.signs.iter().filter(|&&s| s == -1).count()
    }

    /// 1-based spatial positions carrying -1.
    pub fn minus_positions(&self) -> Vec<usize> {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == -1)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Componentwise product in ℤ₂ⁿ; exact integer arithmetic.
pub fn signvec_product(a: &SignVector, b: &SignVector) -> Result<SignVector, InvolutionError> {
    if a.len() != b.len() {
        return Err(InvolutionError::LengthMismatch(a.len(), b.len()));
    }
    let signs = a
        .signs
        .iter()
        .zip(&b.signs)
        .map(|(&x, &y)| x * y)
        .collect();
    Ok(SignVector { signs })
}

/// Embed a nonzero sign pattern as the diagonal involution with -1 at its
/// minus positions; the codimension equals the weight.
pub fn embed_signvector(v: &SignVector) -> Result<KInvolution, InvolutionError> {
    let positions = v.minus_positions();
    if positions.is_empty() {
        return Err(InvolutionError::ZeroWeight);
    }
    canonical_k_involution(v.len(), &positions)
}

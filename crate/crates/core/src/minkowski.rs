//! Linear algebra of Minkowski space ℝ^{n,1} and the Lorentz-model
//! representation of the isometry group of hyperbolic n-space.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * the bilinear form is `J = diag(-1, 1, ..., 1)` with coordinate 0
//!   timelike;
//! * hyperbolic n-space is the upper sheet `{x : <x,x>_J = -1, x_0 > 0}`
//!   of the two-sheeted hyperboloid;
//! * its isometries are the `(n+1)x(n+1)` matrices `M` with
//!   `M^T J M = J` and `M_00 > 0` (sheet preservation).
//!
//! Everything here is a pure function of its inputs; randomness is always
//! seed-parameterized, so values are safe to share across threads.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// A vector of Minkowski space ℝ^{n,1}, stored as n+1 coordinates with
/// coordinate 0 timelike.
pub type MVector = DVector<f64>;

/// Euclidean-norm threshold below which two computed vectors are considered
/// the same direction (used for pivot/degeneracy decisions, not for results).
const PIVOT_REL_TOL: f64 = 1e-10;

/// Tolerances used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Frobenius bound on `|M^T J M - J|` for accepting a matrix as an isometry.
    pub form: f64,
    /// Relative singular-value cutoff for numerical rank.
    pub rank: f64,
    /// Frobenius bound for reconstruction / involution-square checks.
    pub recon: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        // Double-precision products of <= 2n+4 well-conditioned factors stay
        // well inside these bounds for n <= 16.
        Tolerances {
            form: 1e-9,
            rank: 1e-8,
            recon: 1e-8,
        }
    }
}

#[derive(Debug, Error)]
pub enum MinkowskiError {
    #[error("ambient dimension must be at least 2, got {0}")]
    AmbientTooSmall(usize),
    #[error("normal vector is not spacelike (self inner product {0})")]
    NotSpacelike(f64),
    #[error("vector is not a point of the upper hyperboloid sheet (self inner product {inner}, x0 = {x0})")]
    NotOnUpperSheet { inner: f64, x0: f64 },
    #[error("points coincide within tolerance; no unique bisector")]
    CoincidentPoints,
    #[error("degenerate span: largest Gram pivot {0} is below tolerance")]
    DegenerateSpan(f64),
    #[error("matrix is not an isometry: form residual {residual}, entry (0,0) = {entry00}")]
    NotAnIsometry { residual: f64, entry00: f64 },
    #[error("matrix determinant {0} is not +/-1 within tolerance")]
    BadDeterminant(f64),
}

/// The ambient hyperbolic space ℍⁿ; carries only the dimension n >= 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ambient {
    n: usize,
}

impl Ambient {
    pub fn new(n: usize) -> Result<Self, MinkowskiError> {
        if n < 2 {
            return Err(MinkowskiError::AmbientTooSmall(n));
        }
        Ok(Ambient { n })
    }

    /// Dimension n of the hyperbolic space.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Size n+1 of the matrices acting on ℝ^{n,1}.
    pub fn matrix_dim(&self) -> usize {
        self.n + 1
    }

    /// The form matrix `J = diag(-1, 1, ..., 1)`.
    pub fn form_matrix(&self) -> DMatrix<f64> {
        j_matrix(self.n + 1)
    }

    /// The basepoint (1, 0, ..., 0) of the upper sheet.
    pub fn basepoint(&self) -> HPoint {
        HPoint::basepoint(self.n)
    }
}

pub(crate) fn j_matrix(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(dim, dim);
    j[(0, 0)] = -1.0;
    j
}

/// Apply `J` to a vector: negate the time coordinate.
pub(crate) fn j_apply(v: &MVector) -> MVector {
    let mut w = v.clone();
    w[0] = -w[0];
    w
}

/// The Minkowski inner product `<x,y>_J = -x0*y0 + sum_{i>=1} xi*yi`.
///
/// Panics on dimension mismatch.
pub fn minkowski_inner(x: &MVector, y: &MVector) -> f64 {
    assert_eq!(x.len(), y.len(), "minkowski_inner: dimension mismatch");
    let mut acc = -x[0] * y[0];
    for i in 1..x.len() {
        acc += x[i] * y[i];
    }
    acc
}

/// Causal type of a vector: sign of its self inner product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalClass {
    Timelike,
    Spacelike,
    Null,
}

/// Classify a vector by the sign of `<v,v>_J`, with `tol` as the null band.
pub fn causal_class(v: &MVector, tol: f64) -> CausalClass {
    let q = minkowski_inner(v, v);
    if q.abs() <= tol {
        CausalClass::Null
    } else if q < 0.0 {
        CausalClass::Timelike
    } else {
        CausalClass::Spacelike
    }
}

/// Frobenius norm of `M^T J M - J`.
pub fn form_residual(m: &DMatrix<f64>) -> f64 {
    let dim = m.nrows();
    assert_eq!(dim, m.ncols(), "form_residual: matrix must be square");
    let j = j_matrix(dim);
    (m.transpose() * &j * m - j).norm()
}

/// Membership test for the sheet-preserving Lorentz group: returns whether
/// `|M^T J M - J|_F <= tol.form` and `M_00 > 0`, together with the residual.
pub fn is_isometry(m: &DMatrix<f64>, tol: &Tolerances) -> (bool, f64) {
    let residual = form_residual(m);
    (residual <= tol.form && m[(0, 0)] > 0.0, residual)
}

/// Orientation class of an isometry (sign of its determinant).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Preserving => 1.0,
            Orientation::Reversing => -1.0,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s >= 0.0 {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }

    pub fn compose(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }
}

/// A sheet-preserving Lorentz matrix, i.e. an isometry of ℍⁿ in the
/// hyperboloid model.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    matrix: DMatrix<f64>,
    orientation: Orientation,
}

impl Isometry {
    /// Validate a matrix as an isometry: form preservation, sheet
    /// preservation, and determinant +/-1.
    pub fn try_new(matrix: DMatrix<f64>, tol: &Tolerances) -> Result<Self, MinkowskiError> {
        let (ok, residual) = is_isometry(&matrix, tol);
        if !ok {
            return Err(MinkowskiError::NotAnIsometry {
                residual,
                entry00: matrix[(0, 0)],
            });
        }
        let det = matrix.determinant();
        if (det.abs() - 1.0).abs() > tol.form.sqrt() {
            return Err(MinkowskiError::BadDeterminant(det));
        }
        Ok(Isometry {
            matrix,
            orientation: Orientation::from_sign(det),
        })
    }

    /// Internal constructor for matrices that are isometries by construction.
    pub(crate) fn from_parts(matrix: DMatrix<f64>, orientation: Orientation) -> Self {
        Isometry { matrix, orientation }
    }

    pub fn identity(n: usize) -> Self {
        Isometry {
            matrix: DMatrix::identity(n + 1, n + 1),
            orientation: Orientation::Preserving,
        }
    }

    /// Dimension n of the hyperbolic space this acts on.
    pub fn n(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Exact inverse `J M^T J` (no linear solve involved).
    pub fn inverse(&self) -> Isometry {
        let dim = self.matrix.nrows();
        let mut inv = self.matrix.transpose();
        // Conjugating the transpose by J negates row 0 and column 0 except (0,0).
        for i in 1..dim {
            inv[(0, i)] = -inv[(0, i)];
            inv[(i, 0)] = -inv[(i, 0)];
        }
        Isometry {
            matrix: inv,
            orientation: self.orientation,
        }
    }

    pub fn apply(&self, v: &MVector) -> MVector {
        &self.matrix * v
    }

    pub fn apply_point(&self, p: &HPoint) -> HPoint {
        HPoint(&self.matrix * &p.0)
    }

    /// Composition `self` after `other` (matrix product).
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            matrix: &self.matrix * &other.matrix,
            orientation: self.orientation.compose(other.orientation),
        }
    }
}

impl std::ops::Mul for &Isometry {
    type Output = Isometry;

    fn mul(self, rhs: &Isometry) -> Isometry {
        self.compose(rhs)
    }
}

/// A point of ℍⁿ: `<x,x>_J = -1` and `x_0 > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint(MVector);

impl HPoint {
    pub fn new(coords: MVector, tol: f64) -> Result<Self, MinkowskiError> {
        let inner = minkowski_inner(&coords, &coords);
        if (inner + 1.0).abs() > tol || coords[0] <= 0.0 {
            return Err(MinkowskiError::NotOnUpperSheet {
                inner,
                x0: coords[0],
            });
        }
        Ok(HPoint(coords))
    }

    /// The point (1, 0, ..., 0).
    pub fn basepoint(n: usize) -> Self {
        let mut v = DVector::zeros(n + 1);
        v[0] = 1.0;
        HPoint(v)
    }

    pub fn coords(&self) -> &MVector {
        &self.0
    }
}

/// A hyperbolic hyperplane, stored as its spacelike unit normal with the
/// first nonzero coordinate positive (the two normals +/-w define the same
/// hyperplane).
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    normal: MVector,
}

impl Hyperplane {
    /// Normalize and canonicalize a spacelike vector into a hyperplane
    /// normal. Fails if the vector is not clearly spacelike.
    pub fn new(v: MVector) -> Result<Self, MinkowskiError> {
        let q = minkowski_inner(&v, &v);
        let scale = v.norm_squared();
        if q <= PIVOT_REL_TOL * scale || scale == 0.0 {
            return Err(MinkowskiError::NotSpacelike(q));
        }
        let mut normal = v / q.sqrt();
        canonicalize_sign(&mut normal);
        Ok(Hyperplane { normal })
    }

    pub fn normal(&self) -> &MVector {
        &self.normal
    }

    /// The reflection fixing this hyperplane.
    pub fn reflection(&self) -> Isometry {
        reflect_in_hyperplane(self)
    }

    /// Whether two hyperplanes agree within `tol` (normals already carry a
    /// canonical sign, so a plain distance suffices).
    pub fn approx_eq(&self, other: &Hyperplane, tol: f64) -> bool {
        (&self.normal - &other.normal).norm() <= tol
    }

    /// Inner product of the two unit normals; classifies the pair as
    /// intersecting (<1), tangent (=1) or ultraparallel (>1) in absolute
    /// value.
    pub fn normal_inner(&self, other: &Hyperplane) -> f64 {
        minkowski_inner(&self.normal, &other.normal)
    }
}

fn canonicalize_sign(v: &mut MVector) {
    let scale = v.amax();
    for i in 0..v.len() {
        if v[i].abs() > 1e-12 * scale {
            if v[i] < 0.0 {
                *v = -v.clone();
            }
            return;
        }
    }
}

/// The reflection `x -> x - 2 <x,w>_J w` in the hyperplane with unit
/// spacelike normal `w`; an involution with fixed-set codimension one and
/// determinant -1.
pub fn reflect_in_hyperplane(w: &Hyperplane) -> Isometry {
    let dim = w.normal.len();
    let jw = j_apply(&w.normal);
    let mut m = DMatrix::identity(dim, dim);
    // m = I - 2 w (Jw)^T
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] -= 2.0 * w.normal[i] * jw[j];
        }
    }
    Isometry::from_parts(m, Orientation::Reversing)
}

/// The perpendicular bisector of two distinct points of ℍⁿ; its normal is
/// proportional to p - q, which is spacelike whenever p != q.
pub fn bisector_hyperplane(p: &HPoint, q: &HPoint) -> Result<Hyperplane, MinkowskiError> {
    let d = p.coords() - q.coords();
    // <p-q, p-q> = -2 - 2<p,q> > 0 for distinct points on the sheet.
    let s = minkowski_inner(&d, &d);
    if s <= 1e-24 {
        return Err(MinkowskiError::CoincidentPoints);
    }
    Hyperplane::new(d)
}

/// The reflection swapping two distinct points of ℍⁿ.
pub fn bisector_reflection(p: &HPoint, q: &HPoint) -> Result<Isometry, MinkowskiError> {
    Ok(reflect_in_hyperplane(&bisector_hyperplane(p, q)?))
}

/// Count of singular values above `tol_rank` times the largest one.
pub fn numerical_rank(m: &DMatrix<f64>, tol_rank: f64) -> usize {
    let values = crate::linalg::singular_values(m);
    let max = values.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > tol_rank * max).count()
}

/// Gram-Schmidt with respect to the Minkowski form.
///
/// Inputs must be linearly independent and span a J-nondegenerate subspace;
/// the output is pairwise J-orthogonal with self inner products exactly +/-1.
/// Vectors are processed in input order; when the next vector in line is
/// numerically null the remaining vector with the largest `|<v,v>_J|` is
/// pivoted in instead (and if all remaining vectors are near-null, a pair
/// with a large cross inner product is combined first).
pub fn j_orthonormalize(vectors: &[MVector]) -> Result<Vec<MVector>, MinkowskiError> {
    let mut remaining: Vec<MVector> = vectors.to_vec();
    let mut out: Vec<MVector> = Vec::with_capacity(vectors.len());
    while !remaining.is_empty() {
        let quads: Vec<f64> = remaining
            .iter()
            .map(|v| minkowski_inner(v, v))
            .collect();
        let scales: Vec<f64> = remaining.iter().map(|v| v.norm_squared()).collect();
        let pick = if quads[0].abs() > PIVOT_REL_TOL * scales[0].max(1e-300) {
            0
        } else {
            let (idx, best) = quads
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .expect("nonempty");
            let scale = scales.iter().cloned().fold(0.0, f64::max).max(1e-300);
            if best.abs() > PIVOT_REL_TOL * scale {
                idx
            } else {
                // Every remaining vector is near-null; a nondegenerate span
                // still has a pair with nonzero cross inner product.
                let mut pair = None;
                let mut best_cross = PIVOT_REL_TOL * scale;
                for i in 0..remaining.len() {
                    for j in (i + 1)..remaining.len() {
                        let c = minkowski_inner(&remaining[i], &remaining[j]).abs();
                        if c > best_cross {
                            best_cross = c;
                            pair = Some((i, j));
                        }
                    }
                }
                match pair {
                    Some((i, j)) => {
                        let combined = &remaining[i] + &remaining[j];
                        remaining[i] = combined;
                        i
                    }
                    None => return Err(MinkowskiError::DegenerateSpan(best.abs())),
                }
            }
        };
        let v = remaining.remove(pick);
        let q = minkowski_inner(&v, &v);
        if q.abs() <= PIVOT_REL_TOL * v.norm_squared().max(1e-300) {
            return Err(MinkowskiError::DegenerateSpan(q.abs()));
        }
        let u = &v / q.abs().sqrt();
        let eps = q.signum();
        for w in remaining.iter_mut() {
            let c = minkowski_inner(w, &u);
            *w -= eps * c * &u;
        }
        out.push(u);
    }
    Ok(out)
}

/// J-orthonormal basis of the column space of `m`: rank-revealing SVD
/// followed by [`j_orthonormalize`] of the leading left singular vectors.
pub(crate) fn j_basis_of_column_space(
    m: &DMatrix<f64>,
    tol_rank: f64,
) -> Result<Vec<MVector>, MinkowskiError> {
    let (values, u) = crate::linalg::svd_left_jacobi(m);
    let max = values.first().copied().unwrap_or(0.0);
    let mut cols = Vec::new();
    if max > 0.0 {
        for (i, &s) in values.iter().enumerate() {
            if s > tol_rank * max {
                cols.push(u.column(i).into_owned());
            }
        }
    }
    j_orthonormalize(&cols)
}

/// Extend a timelike unit vector to a J-orthonormal frame of the whole
/// space by sweeping the standard basis; the first output is the normalized
/// input, the rest are spacelike. For the basepoint e0 this returns the
/// standard basis exactly.
pub(crate) fn complete_timelike_frame(first: &MVector) -> Vec<MVector> {
    let dim = first.len();
    let mut out: Vec<MVector> = Vec::with_capacity(dim);
    let q0 = minkowski_inner(first, first);
    debug_assert!(q0 < 0.0, "frame seed must be timelike");
    out.push(first / (-q0).sqrt());
    for i in 0..dim {
        let mut v: MVector = DVector::zeros(dim);
        v[i] = 1.0;
        for u in &out {
            let eps = minkowski_inner(u, u).signum();
            let c = minkowski_inner(&v, u);
            v -= eps * c * u;
        }
        let q = minkowski_inner(&v, &v);
        if q.abs() > PIVOT_REL_TOL && v.norm_squared() > PIVOT_REL_TOL {
            out.push(&v / q.abs().sqrt());
        }
        if out.len() == dim {
            break;
        }
    }
    debug_assert_eq!(out.len(), dim, "frame completion must fill the space");
    out
}

/// Matrix exponential by scaling-and-squaring with a degree-16 Taylor
/// expansion; accurate far below 1e-12 for the |X| <= 2 inputs used here.
pub(crate) fn matrix_exp(x: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = x.nrows();
    let norm = x.norm();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let xs = x / 2f64.powi(squarings as i32);
    let mut term = DMatrix::identity(dim, dim);
    let mut acc = DMatrix::identity(dim, dim);
    for d in 1..=16u32 {
        term = &term * &xs / f64::from(d);
        acc += &term;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Deterministic random isometry: samples a J-antisymmetric matrix with
/// standard-normal free entries, caps its Frobenius norm at 2, exponentiates,
/// and post-composes with the coordinate reflection diag(1,-1,1,...,1) when
/// an orientation-reversing element is requested.
pub fn random_isometry(n: usize, orientation: Orientation, seed: u64) -> Isometry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_isometry_with(n, orientation, &mut rng)
}

pub(crate) fn random_isometry_with<R: Rng>(
    n: usize,
    orientation: Orientation,
    rng: &mut R,
) -> Isometry {
    let dim = n + 1;
    let mut x = DMatrix::zeros(dim, dim);
    // Lie algebra of O(n,1): symmetric boost block plus antisymmetric rotation block.
    for i in 1..dim {
        let b = standard_normal(rng);
        x[(0, i)] = b;
        x[(i, 0)] = b;
    }
    for i in 1..dim {
        for j in (i + 1)..dim {
            let r = standard_normal(rng);
            x[(i, j)] = r;
            x[(j, i)] = -r;
        }
    }
    let norm = x.norm();
    if norm > 2.0 {
        x *= 2.0 / norm;
    }
    let mut m = matrix_exp(&x);
    if orientation == Orientation::Reversing {
        // Post-compose with reflection in the first spatial coordinate.
        for c in 0..dim {
            m[(1, c)] = -m[(1, c)];
        }
    }
    Isometry::try_new(m, &Tolerances::default())
        .expect("exponential of a Lie algebra element is an isometry")
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; two uniforms per draw keeps the stream layout obvious.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Deterministic random hyperplane: a normalized spacelike Gaussian vector,
/// resampled until it is comfortably far from the null cone.
pub fn random_hyperplane(n: usize, seed: u64) -> Hyperplane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_hyperplane_with(n, &mut rng)
}

pub(crate) fn random_hyperplane_with<R: Rng>(n: usize, rng: &mut R) -> Hyperplane {
    loop {
        let v = DVector::from_fn(n + 1, |_, _| standard_normal(rng));
        let q = minkowski_inner(&v, &v);
        if q > 0.1 * v.norm_squared() {
            return Hyperplane::new(v).expect("sampled vector is spacelike");
        }
    }
}

/// Mutual position of two hyperplanes, by `|<u,v>_J|` of the unit normals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    /// `|<u,v>| < 1`: the hyperplanes meet inside ℍⁿ.
    Intersecting,
    /// `|<u,v>| > 1`: disjoint with a common perpendicular.
    Ultraparallel,
    /// `|<u,v>| = 1`: asymptotic, meeting only at infinity.
    Tangent,
}

/// Deterministic random hyperplane pair of a prescribed mutual position.
/// Intersecting and ultraparallel pairs are found by rejection with a margin
/// of 0.05 around the critical value 1; tangent pairs are built exactly as
/// `v = u + t` with `t` null and J-orthogonal to `u`.
pub fn random_hyperplane_pair(n: usize, class: PairClass, seed: u64) -> (Hyperplane, Hyperplane) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_hyperplane_with(n, &mut rng);
    match class {
        PairClass::Intersecting | PairClass::Ultraparallel => {
            for _ in 0..10_000 {
                let v = random_hyperplane_with(n, &mut rng);
                let c = u.normal_inner(&v).abs();
                let ok = match class {
                    PairClass::Intersecting => c < 0.95,
                    PairClass::Ultraparallel => c > 1.05,
                    PairClass::Tangent => unreachable!(),
                };
                if ok && !u.approx_eq(&v, 1e-9) {
                    return (u, v);
                }
            }
            panic!("rejection sampling failed to produce a {class:?} pair");
        }
        PairClass::Tangent => {
            // Null direction orthogonal to u: timelike + spacelike from u's
            // orthogonal complement.
            let dim = n + 1;
            let jn = j_apply(u.normal());
            let mut proj = DMatrix::identity(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    proj[(i, j)] -= u.normal()[i] * jn[j];
                }
            }
            let basis = j_basis_of_column_space(&proj, 1e-12)
                .expect("complement of a spacelike line is nondegenerate");
            let timelike = basis
                .iter()
                .find(|v| minkowski_inner(v, v) < 0.0)
                .expect("complement contains a timelike direction");
            let spacelike = basis
                .iter()
                .find(|v| minkowski_inner(v, v) > 0.0)
                .expect("complement contains a spacelike direction for n >= 2");
            let lambda = rng.gen_range(0.5..2.0);
            let v = u.normal() + lambda * (timelike + spacelike);
            let v = Hyperplane::new(v).expect("tangent construction stays spacelike");
            (u, v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(dim: usize, i: usize) -> MVector {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        v
    }

    #[test]
    fn inner_product_signature() {
        let e0 = e(3, 0);
        let e1 = e(3, 1);
        assert_eq!(minkowski_inner(&e0, &e0), -1.0);
        assert_eq!(minkowski_inner(&e1, &e1), 1.0);
        assert_eq!(minkowski_inner(&e0, &e1), 0.0);
    }

    #[test]
    fn is_isometry_accepts_identity_and_reflections() {
        let tol = Tolerances::default();
        let id = DMatrix::<f64>::identity(4, 4);
        let (ok, res) = is_isometry(&id, &tol);
        assert!(ok);
        assert_eq!(res, 0.0);

        let refl = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 1.0, 1.0]));
        assert!(is_isometry(&refl, &tol).0);

        // Lower-sheet matrix is rejected even though it preserves the form.
        let lower = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0, 1.0, 1.0]));
        assert!(!is_isometry(&lower, &tol).0);
    }

    #[test]
    fn coordinate_reflection_matrix() {
        let w = Hyperplane::new(e(3, 1)).unwrap();
        let r = reflect_in_hyperplane(&w);
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 1.0]));
        assert_eq!(r.matrix(), &expected);
        assert_eq!(r.orientation(), Orientation::Reversing);
    }

    #[test]
    fn reflection_formula_on_general_normal() {
        // w = (0, 3/5, 4/5); spatial block must be I - 2 w w^T.
        let w = Hyperplane::new(DVector::from_vec(vec![0.0, 0.6, 0.8])).unwrap();
        let r = reflect_in_hyperplane(&w);
        let m = r.matrix();
        assert!((m[(1, 1)] - (1.0 - 2.0 * 0.36)).abs() < 1e-15);
        assert!((m[(2, 2)] - (1.0 - 2.0 * 0.64)).abs() < 1e-15);
        assert!((m[(1, 2)] - (-2.0 * 0.6 * 0.8)).abs() < 1e-15);
        assert!((m[(0, 0)] - 1.0).abs() < 1e-15);
        // sigma_w(w) = -w.
        let img = r.apply(w.normal());
        assert!((img + w.normal()).norm() < 1e-15);
        // Involution.
        assert!((m * m - DMatrix::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn reflection_fixes_its_hyperplane() {
        let w = Hyperplane::new(DVector::from_vec(vec![0.3, 1.2, -0.4, 0.9])).unwrap();
        let r = reflect_in_hyperplane(&w);
        // +1 eigenspace is the J-orthogonal complement of w.
        let x = DVector::from_vec(vec![1.0, 0.2, 0.5, -0.3]);
        let c = minkowski_inner(&x, w.normal());
        let fixed = &x - c * w.normal(); // J-projection onto w^perp
        assert!((r.apply(&fixed) - &fixed).norm() < 1e-14);
    }

    #[test]
    fn bisector_swaps_points() {
        let p = HPoint::basepoint(2);
        let q = HPoint::new(
            DVector::from_vec(vec![1f64.cosh(), 1f64.sinh(), 0.0]),
            1e-12,
        )
        .unwrap();
        let r = bisector_reflection(&p, &q).unwrap();
        assert!((r.apply_point(&p).coords() - q.coords()).norm() < 1e-12);
        assert!((r.apply_point(&q).coords() - p.coords()).norm() < 1e-12);
        // Swap symmetry through the canonical normal.
        let r2 = bisector_reflection(&q, &p).unwrap();
        assert!((r.matrix() - r2.matrix()).norm() < 1e-12);
        // Involution.
        let sq = r.matrix() * r.matrix();
        assert!((sq - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn bisector_rejects_coincident_points() {
        let p = HPoint::basepoint(3);
        assert!(matches!(
            bisector_reflection(&p, &p),
            Err(MinkowskiError::CoincidentPoints)
        ));
    }

    #[test]
    fn random_isometry_is_deterministic_and_valid() {
        let tol = Tolerances::default();
        for seed in 0..20 {
            let a = random_isometry(4, Orientation::Preserving, seed);
            let b = random_isometry(4, Orientation::Preserving, seed);
            assert_eq!(a.matrix(), b.matrix());
            let (ok, _) = is_isometry(a.matrix(), &tol);
            assert!(ok);
            assert!(a.matrix().determinant() > 0.0);

            let c = random_isometry(4, Orientation::Reversing, seed);
            assert!(is_isometry(c.matrix(), &tol).0);
            assert!(c.matrix().determinant() < 0.0);
        }
    }

    #[test]
    fn composition_stays_an_isometry() {
        let tol = Tolerances::default();
        let a = random_isometry(5, Orientation::Preserving, 11);
        let b = random_isometry(5, Orientation::Reversing, 12);
        let ra = form_residual(a.matrix());
        let rb = form_residual(b.matrix());
        let (ok, rc) = is_isometry((&a * &b).matrix(), &tol);
        assert!(ok);
        assert!(rc <= 4.0 * (ra + rb).max(1e-14));
    }

    #[test]
    fn inverse_is_exact() {
        let a = random_isometry(4, Orientation::Reversing, 3);
        let prod = a.matrix() * a.inverse().matrix();
        assert!((prod - DMatrix::identity(5, 5)).norm() < 1e-12);
    }

    #[test]
    fn rank_of_standard_matrices() {
        assert_eq!(numerical_rank(&DMatrix::<f64>::identity(5, 5), 1e-8), 5);
        assert_eq!(numerical_rank(&DMatrix::<f64>::zeros(4, 4), 1e-8), 0);
        let u = DVector::from_vec(vec![1.0, 2.0, -1.0]);
        let v = DVector::from_vec(vec![0.5, 3.0, 2.0, 1.0]);
        let outer = &u * v.transpose();
        assert_eq!(numerical_rank(&outer, 1e-8), 1);
    }

    #[test]
    fn gram_schmidt_keeps_orthonormal_inputs() {
        let got = j_orthonormalize(&[e(3, 0), e(3, 1)]).unwrap();
        assert_eq!(got[0], e(3, 0));
        assert_eq!(got[1], e(3, 1));
    }

    #[test]
    fn gram_schmidt_euclidean_case() {
        let got = j_orthonormalize(&[e(3, 1), &e(3, 1) + &e(3, 2)]).unwrap();
        assert!((&got[0] - e(3, 1)).norm() < 1e-15);
        assert!((&got[1] - e(3, 2)).norm() < 1e-15);
    }

    #[test]
    fn gram_schmidt_noisy_spacelike_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = DVector::from_fn(4, |i, _| if i == 0 { 0.001 } else { standard_normal(&mut rng) });
        let b = DVector::from_fn(4, |i, _| if i == 0 { -0.002 } else { standard_normal(&mut rng) });
        let out = j_orthonormalize(&[a, b]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let g = minkowski_inner(&out[i], &out[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-10, "gram[{i}][{j}] = {g}");
            }
        }
    }

    #[test]
    fn gram_schmidt_rejects_degenerate_span() {
        // A null vector alone spans a J-degenerate line.
        let null = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        assert!(matches!(
            j_orthonormalize(&[null]),
            Err(MinkowskiError::DegenerateSpan(_))
        ));
    }

    #[test]
    fn gram_schmidt_handles_null_basis_of_nondegenerate_plane() {
        // span{l1, l2} with l1, l2 null and <l1,l2> != 0 has signature (1,1).
        let l1 = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        let l2 = DVector::from_vec(vec![1.0, -1.0, 0.0]);
        let out = j_orthonormalize(&[l1, l2]).unwrap();
        assert_eq!(out.len(), 2);
        let q0 = minkowski_inner(&out[0], &out[0]);
        let q1 = minkowski_inner(&out[1], &out[1]);
        assert!((q0.abs() - 1.0).abs() < 1e-12);
        assert!((q1.abs() - 1.0).abs() < 1e-12);
        assert!(q0 * q1 < 0.0, "signature (1,1) expected");
        assert!(minkowski_inner(&out[0], &out[1]).abs() < 1e-12);
    }

    #[test]
    fn inner_product_invariance_under_isometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for seed in 0..20 {
            let m = random_isometry(4, Orientation::Preserving, seed);
            let x = DVector::from_fn(5, |_, _| standard_normal(&mut rng));
            let y = DVector::from_fn(5, |_, _| standard_normal(&mut rng));
            let before = minkowski_inner(&x, &y);
            let after = minkowski_inner(&m.apply(&x), &m.apply(&y));
            assert!((before - after).abs() < 1e-9 * (1.0 + before.abs()));
        }
    }

    #[test]
    fn causal_classification() {
        assert_eq!(causal_class(&e(3, 0), 1e-12), CausalClass::Timelike);
        assert_eq!(causal_class(&e(3, 1), 1e-12), CausalClass::Spacelike);
        let null = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        assert_eq!(causal_class(&null, 1e-12), CausalClass::Null);
    }

    #[test]
    fn hyperplane_pair_classes() {
        for seed in 0..25 {
            let (u, v) = random_hyperplane_pair(4, PairClass::Intersecting, seed);
            assert!(u.normal_inner(&v).abs() < 1.0);
            let (u, v) = random_hyperplane_pair(4, PairClass::Ultraparallel, seed);
            assert!(u.normal_inner(&v).abs() > 1.0);
            let (u, v) = random_hyperplane_pair(4, PairClass::Tangent, seed);
            assert!((u.normal_inner(&v).abs() - 1.0).abs() < 1e-9);
        }
    }
}

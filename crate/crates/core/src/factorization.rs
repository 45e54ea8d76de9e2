//! Constructive factorization of hyperbolic isometries into k-involutions.
//!
//! The pipeline runs reflection-first: every isometry is a product of at
//! most n+1 reflections (one bisector to restore the basepoint, then a
//! coordinate sweep of the stabilizer). Consecutive reflections are paired
//! into half-turns through a hyperplane orthogonal to both mirrors, and
//! half-turns and single reflections are expanded into codimension-k
//! involutions by the exact diagonal sign-pattern constructions. The
//! resulting word lengths never exceed 2n+4 for orientation-preserving
//! targets and 2n+2+k for orientation-reversing ones.

use nalgebra::DMatrix;
use std::fmt;
use thiserror::Error;

use crate::involutions::{
    classify_involution, InvolutionError, KInvolution, SignVector,
};
use crate::minkowski::{
    bisector_hyperplane, complete_timelike_frame, is_isometry, j_apply, j_basis_of_column_space,
    minkowski_inner, reflect_in_hyperplane, Ambient, HPoint, Hyperplane, Isometry, MVector,
    MinkowskiError, Orientation, Tolerances,
};

/// Basepoint-motion threshold below which the bisector step is skipped.
const MOVE_TOL: f64 = 1e-11;
/// Per-coordinate threshold below which a sweep reflection is skipped.
const SKIP_TOL: f64 = 1e-12;
/// Threshold for cancelling identical consecutive hyperplanes.
const CANCEL_TOL: f64 = 1e-10;
/// Threshold for rejecting a pair of hyperplanes as identical.
const IDENTICAL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FactorError {
    #[error(
        "parity obstruction: a product of even-codimension involutions is orientation preserving"
    )]
    ParityObstruction,
    #[error("codimension k = {k} is unsupported for n = {n} (need 1 <= k <= n-1)")]
    UnsupportedK { k: usize, n: usize },
    #[error("no hyperplane is orthogonal to two others in dimension n = {n} (need n >= 3)")]
    DimensionTooSmall { n: usize },
    #[error("hyperplanes coincide; no orthogonal hyperplane is determined")]
    IdenticalHyperplanes,
    #[error("expected a half-turn (codimension 2), got codimension {k}")]
    NotAHalfTurn { k: usize },
    #[error(transparent)]
    Involution(#[from] InvolutionError),
    #[error(transparent)]
    Minkowski(#[from] MinkowskiError),
}

/// An ordered word of k-involutions multiplying out to `target`.
///
/// `bound` is the applicable a-priori word-length bound (2n+4 or 2n+2+k
/// depending on the target's orientation); the construction typically stays
/// well below it. The certificate is an upper bound on the word length of
/// `target`, not a minimality claim.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub factors: Vec<KInvolution>,
    pub target: Isometry,
    pub residual: f64,
    pub k: usize,
    pub bound: usize,
    pub length: usize,
}

/// Decompose `g` into at most n+1 reflections, left-to-right product order.
///
/// If `g` moves the basepoint, the bisector between the basepoint and its
/// image comes first; the rest is a coordinate sweep of the stabilizer: the
/// frame direction `f` not yet fixed is restored by reflecting in the
/// bisector of `f` and its image. The number of reflections has the parity
/// of the orientation of `g`.
pub fn reflections_of(g: &Isometry, basepoint: &HPoint) -> Vec<Hyperplane> {
    let dim = g.matrix().nrows();
    assert_eq!(
        basepoint.coords().len(),
        dim,
        "basepoint dimension mismatch"
    );
    let mut planes = Vec::new();
    let mut h = g.clone();
    let moved = g.apply_point(basepoint);
    if (moved.coords() - basepoint.coords()).norm() > MOVE_TOL {
        let w = bisector_hyperplane(basepoint, &moved)
            .expect("basepoint and image are distinct here");
        h = &reflect_in_hyperplane(&w) * &h;
        planes.push(w);
    }
    let frame = complete_timelike_frame(basepoint.coords());
    for f in &frame[1..] {
        let x = h.apply(f);
        if (&x - f).norm() <= SKIP_TOL {
            continue;
        }
        let w = Hyperplane::new(&x - f).expect("difference of unit spacelike vectors is spacelike");
        h = &reflect_in_hyperplane(&w) * &h;
        planes.push(w);
    }
    debug_assert!(
        (h.matrix() - DMatrix::identity(dim, dim)).norm() < 1e-8,
        "reflection sweep did not terminate at the identity"
    );
    planes
}

/// Remove identical consecutive hyperplanes (their reflections cancel).
pub fn cancel_consecutive(planes: &mut Vec<Hyperplane>) {
    let mut i = 0;
    while i + 1 < planes.len() {
        if planes[i].approx_eq(&planes[i + 1], CANCEL_TOL) {
            planes.drain(i..i + 2);
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
}

/// A hyperplane orthogonal to two given ones: a spacelike unit vector in the
/// J-orthogonal complement of span{u, v}. Exists for every pair with
/// u != +/-v once n >= 3, including tangent pairs whose span degenerates.
pub fn orthogonal_hyperplane(
    u: &Hyperplane,
    v: &Hyperplane,
) -> Result<Hyperplane, FactorError> {
    let dim = u.normal().len();
    let n = dim - 1;
    if n < 3 {
        return Err(FactorError::DimensionTooSmall { n });
    }
    if u.approx_eq(v, IDENTICAL_TOL) {
        return Err(FactorError::IdenticalHyperplanes);
    }
    // Null space of the 2 x (n+1) system <u,w> = <v,w> = 0, computed from
    // the Gram form A^T A. Independence of u, v pins its dimension at n-1;
    // the null vectors are the trailing singular directions.
    let ju = j_apply(u.normal());
    let jv = j_apply(v.normal());
    let mut ata = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            ata[(i, j)] = ju[i] * ju[j] + jv[i] * jv[j];
        }
    }
    let (_, ata_vectors) = crate::linalg::sym_eigen_jacobi(&ata);
    let null_basis: Vec<MVector> = (2..dim)
        .map(|i| ata_vectors.column(i).into_owned())
        .collect();
    // Restrict J to the null space and take the most spacelike direction
    // (the top eigenvector of the restricted Gram matrix).
    let m = null_basis.len();
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = minkowski_inner(&null_basis[i], &null_basis[j]);
        }
    }
    let (_, gram_vectors) = crate::linalg::sym_eigen_jacobi(&gram);
    let q = gram_vectors.column(0);
    let mut w = MVector::zeros(dim);
    for i in 0..m {
        w += q[i] * &null_basis[i];
    }
    debug_assert!(
        minkowski_inner(&w, u.normal()).abs() < 1e-8
            && minkowski_inner(&w, v.normal()).abs() < 1e-8,
        "null-space solve lost orthogonality"
    );
    Ok(Hyperplane::new(w)?)
}

/// Write the product of two reflections as a product of two half-turns:
/// with c the reflection in a hyperplane orthogonal to both mirrors,
/// h = a.c and k' = c.b are commuting-factor involutions of codimension 2
/// and h.k' = a.b.
pub fn reflection_pair_to_halfturns(
    a: &Hyperplane,
    b: &Hyperplane,
    tol: &Tolerances,
) -> Result<(KInvolution, KInvolution), FactorError> {
    let c = orthogonal_hyperplane(a, b)?;
    let sc = reflect_in_hyperplane(&c);
    let h = &reflect_in_hyperplane(a) * &sc;
    let kp = &sc * &reflect_in_hyperplane(b);
    let h = classify_involution(&h, tol)?;
    let kp = classify_involution(&kp, tol)?;
    debug_assert_eq!(h.k(), 2);
    debug_assert_eq!(kp.k(), 2);
    Ok((h, kp))
}

/// Sign patterns of the k diagonal factors expressing the single-coordinate
/// reflection [-1, 1, ..., 1] as a product of k codimension-k diagonal
/// involutions (k odd). Factor i is -1 exactly on positions {1..k+1}\{i+1}.
pub fn reflection_sign_factors(n: usize, k: usize) -> Result<Vec<SignVector>, FactorError> {
    if k == 0 || k > n - 1 {
        return Err(FactorError::UnsupportedK { k, n });
    }
    if k % 2 == 0 {
        return Err(FactorError::ParityObstruction);
    }
    (1..=k)
        .map(|i| {
            let positions: Vec<usize> = (1..=k + 1).filter(|&j| j != i + 1).collect();
            Ok(SignVector::from_minus_positions(n, &positions)?)
        })
        .collect()
}

/// Sign patterns of the two diagonal codimension-k factors expressing the
/// two-coordinate reflection [-1, -1, 1, ..., 1]: R is -1 on {2..k+1} and
/// S is -1 on {1} and {3..k+1}.
pub fn halfturn_sign_factors(
    n: usize,
    k: usize,
) -> Result<(SignVector, SignVector), FactorError> {
    if k == 0 || k > n - 1 {
        return Err(FactorError::UnsupportedK { k, n });
    }
    let r_positions: Vec<usize> = (2..=k + 1).collect();
    let mut s_positions: Vec<usize> = vec![1];
    s_positions.extend(3..=k + 1);
    Ok((
        SignVector::from_minus_positions(n, &r_positions)?,
        SignVector::from_minus_positions(n, &s_positions)?,
    ))
}

/// The involution that is -1 on the span of a J-orthonormal spacelike frame
/// and +1 on its J-complement: I - 2 sum v (Jv)^T.
fn involution_from_minus_frame(frame: &[MVector]) -> Isometry {
    let dim = frame[0].len();
    let mut m = DMatrix::identity(dim, dim);
    for v in frame {
        let jv = j_apply(v);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] -= 2.0 * v[i] * jv[j];
            }
        }
    }
    let orientation = if frame.len() % 2 == 0 {
        Orientation::Preserving
    } else {
        Orientation::Reversing
    };
    Isometry::from_parts(m, orientation)
}

/// Expand a reflection into k codimension-k involutions (k odd).
///
/// The frame is the mirror normal plus k spacelike directions of the fixed
/// hyperplane; each factor is -1 on the sub-frame prescribed by
/// [`reflection_sign_factors`] and the ordered product recovers the
/// reflection.
pub fn split_reflection_odd(
    rho: &Hyperplane,
    k: usize,
    ambient: Ambient,
    tol: &Tolerances,
) -> Result<Vec<KInvolution>, FactorError> {
    let n = ambient.n();
    assert_eq!(rho.normal().len(), n + 1, "hyperplane dimension mismatch");
    if k == 0 || k > n - 1 {
        return Err(FactorError::UnsupportedK { k, n });
    }
    if k % 2 == 0 {
        return Err(FactorError::ParityObstruction);
    }
    if k == 1 {
        return Ok(vec![classify_involution(&reflect_in_hyperplane(rho), tol)?]);
    }
    // J-orthonormal basis of the fixed hyperplane, spacelike directions only.
    let dim = n + 1;
    let w = rho.normal();
    let jw = j_apply(w);
    let mut proj = DMatrix::identity(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            proj[(i, j)] -= w[i] * jw[j];
        }
    }
    let basis = j_basis_of_column_space(&proj, tol.rank)?;
    let fs: Vec<&MVector> = basis
        .iter()
        .filter(|v| minkowski_inner(v, v) > 0.0)
        .take(k)
        .collect();
    debug_assert_eq!(fs.len(), k, "fixed hyperplane has n-1 >= k spacelike directions");
    let mut factors = Vec::with_capacity(k);
    for pattern in reflection_sign_factors(n, k)? {
        let frame: Vec<MVector> = pattern
            .minus_positions()
            .iter()
            .map(|&p| if p == 1 { w.clone() } else { fs[p - 2].clone() })
            .collect();
        let iso = involution_from_minus_frame(&frame);
        factors.push(classify_involution(&iso, tol)?);
    }
    Ok(factors)
}

/// Expand a half-turn into two codimension-k involutions (any 1 <= k <= n-1).
///
/// Uses the half-turn's own minus basis {e1, e2} plus k-1 spacelike
/// directions of its fixed set; the two factors follow
/// [`halfturn_sign_factors`] and their product recovers the half-turn.
pub fn split_halfturn(
    h: &KInvolution,
    k_target: usize,
    tol: &Tolerances,
) -> Result<(KInvolution, KInvolution), FactorError> {
    if h.k() != 2 {
        return Err(FactorError::NotAHalfTurn { k: h.k() });
    }
    let n = h.n();
    if k_target == 0 || k_target > n - 1 {
        return Err(FactorError::UnsupportedK { k: k_target, n });
    }
    let e1 = &h.minus_basis()[0];
    let e2 = &h.minus_basis()[1];
    let fs = h.fixed_spacelike();
    debug_assert!(fs.len() >= k_target - 1);
    let (r_pat, s_pat) = halfturn_sign_factors(n, k_target)?;
    let build = |pattern: &SignVector| -> Result<KInvolution, FactorError> {
        let frame: Vec<MVector> = pattern
            .minus_positions()
            .iter()
            .map(|&p| match p {
                1 => e1.clone(),
                2 => e2.clone(),
                _ => fs[p - 3].clone(),
            })
            .collect();
        Ok(classify_involution(&involution_from_minus_frame(&frame), tol)?)
    };
    Ok((build(&r_pat)?, build(&s_pat)?))
}

/// Frobenius distance between the ordered product of the factors and `g`.
fn reconstruction_residual(factors: &[KInvolution], g: &Isometry) -> f64 {
    let dim = g.matrix().nrows();
    let mut prod = DMatrix::identity(dim, dim);
    for f in factors {
        prod = prod * f.iso().matrix();
    }
    (prod - g.matrix()).norm()
}

/// Factor `g` into k-involutions within the a-priori length bound.
///
/// Shortcuts keep short words short: the identity gets the empty word, a
/// target that is itself a k-involution gets a one-letter word, k = 1 uses
/// the reflections directly and k = 2 the half-turns. Otherwise each
/// half-turn is expanded into two codimension-k factors and, for an
/// orientation-reversing target (k necessarily odd), the leftover reflection
/// into k factors.
pub fn factor_into_k_involutions(
    g: &Isometry,
    k: usize,
    tol: &Tolerances,
) -> Result<Factorization, FactorError> {
    let n = g.n();
    if k == 0 || k >= n {
        return Err(FactorError::UnsupportedK { k, n });
    }
    let reversing = g.orientation() == Orientation::Reversing;
    if k % 2 == 0 && reversing {
        return Err(FactorError::ParityObstruction);
    }
    let bound = if reversing { 2 * n + 2 + k } else { 2 * n + 4 };
    let dim = n + 1;
    let id_residual = (g.matrix() - DMatrix::identity(dim, dim)).norm();
    if id_residual <= tol.recon {
        return Ok(Factorization {
            factors: Vec::new(),
            target: g.clone(),
            residual: id_residual,
            k,
            bound,
            length: 0,
        });
    }
    if let Ok(inv) = classify_involution(g, tol) {
        if inv.k() == k {
            return Ok(Factorization {
                factors: vec![inv],
                target: g.clone(),
                residual: 0.0,
                k,
                bound,
                length: 1,
            });
        }
    }
    let basepoint = HPoint::basepoint(n);
    let mut planes = reflections_of(g, &basepoint);
    cancel_consecutive(&mut planes);
    let mut factors: Vec<KInvolution> = Vec::new();
    if k == 1 {
        for w in &planes {
            factors.push(classify_involution(&reflect_in_hyperplane(w), tol)?);
        }
    } else {
        // 2 <= k <= n-1 forces n >= 3, so orthogonal hyperplanes exist.
        let pairs = planes.len() / 2;
        for i in 0..pairs {
            let (h1, h2) =
                reflection_pair_to_halfturns(&planes[2 * i], &planes[2 * i + 1], tol)?;
            if k == 2 {
                factors.push(h1);
                factors.push(h2);
            } else {
                let (r, s) = split_halfturn(&h1, k, tol)?;
                factors.push(r);
                factors.push(s);
                let (r, s) = split_halfturn(&h2, k, tol)?;
                factors.push(r);
                factors.push(s);
            }
        }
        if planes.len() % 2 == 1 {
            // Orientation-reversing tail; the parity gate ensures k is odd.
            let rho = planes.last().expect("nonempty on odd count");
            factors.extend(split_reflection_odd(rho, k, Ambient::new(n)?, tol)?);
        }
    }
    let residual = reconstruction_residual(&factors, g);
    let length = factors.len();
    Ok(Factorization {
        factors,
        target: g.clone(),
        residual,
        k,
        bound,
        length,
    })
}

/// A factorization as plain matrices, the shape that comes out of a result
/// file; verification re-derives everything from these.
#[derive(Debug, Clone)]
pub struct RawFactorization {
    pub k: usize,
    pub bound: usize,
    pub length: usize,
    pub residual: f64,
    pub target: DMatrix<f64>,
    pub factors: Vec<DMatrix<f64>>,
}

impl From<&Factorization> for RawFactorization {
    fn from(f: &Factorization) -> Self {
        RawFactorization {
            k: f.k,
            bound: f.bound,
            length: f.length,
            residual: f.residual,
            target: f.target.matrix().clone(),
            factors: f.factors.iter().map(|x| x.iso().matrix().clone()).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Per-check certification report; `passed()` is the conjunction.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

/// Re-certify a factorization from scratch: target membership, factor
/// involutions with the declared codimension, ordered-product reconstruction,
/// length bound, and orientation parity.
pub fn verify_raw_factorization(raw: &RawFactorization, tol: &Tolerances) -> VerificationReport {
    let mut checks = Vec::new();
    let dim = raw.target.nrows();
    let shape_ok = raw.target.ncols() == dim
        && raw
            .factors
            .iter()
            .all(|m| m.nrows() == dim && m.ncols() == dim);
    if !shape_ok {
        return VerificationReport {
            checks: vec![CheckOutcome {
                name: "shape",
                passed: false,
                detail: "matrix dimensions are inconsistent".to_string(),
            }],
        };
    }

    let (target_ok, form_res) = is_isometry(&raw.target, tol);
    checks.push(CheckOutcome {
        name: "target-isometry",
        passed: target_ok,
        detail: format!("form residual {form_res:.3e}"),
    });

    checks.push(CheckOutcome {
        name: "length-consistency",
        passed: raw.length == raw.factors.len(),
        detail: format!("declared {} factors, found {}", raw.length, raw.factors.len()),
    });

    let mut bad = Vec::new();
    for (i, m) in raw.factors.iter().enumerate() {
        let factor_ok = Isometry::try_new(m.clone(), tol)
            .map_err(FactorError::from)
            .and_then(|iso| Ok(classify_involution(&iso, tol)?))
            .map(|inv| inv.k() == raw.k)
            .unwrap_or(false);
        if !factor_ok {
            bad.push(i);
        }
    }
    checks.push(CheckOutcome {
        name: "factor-involutions",
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("all {} factors have codimension {}", raw.factors.len(), raw.k)
        } else {
            format!("factors {bad:?} fail classification at codimension {}", raw.k)
        },
    });

    let mut prod = DMatrix::identity(dim, dim);
    for m in &raw.factors {
        prod = prod * m;
    }
    let residual = (&prod - &raw.target).norm();
    checks.push(CheckOutcome {
        name: "reconstruction",
        passed: residual <= tol.recon,
        detail: format!("residual {residual:.3e} (tolerance {:.3e})", tol.recon),
    });

    checks.push(CheckOutcome {
        name: "length-bound",
        passed: raw.length <= raw.bound,
        detail: format!("length {} <= bound {}", raw.length, raw.bound),
    });

    let det_sign = if raw.target.determinant() < 0.0 { -1i64 } else { 1 };
    let word_sign = if (raw.k * raw.length) % 2 == 0 { 1i64 } else { -1 };
    checks.push(CheckOutcome {
        name: "parity",
        passed: det_sign == word_sign,
        detail: format!("(-1)^(k*length) = {word_sign}, target orientation {det_sign}"),
    });

    VerificationReport { checks }
}

/// Re-certify a [`Factorization`] produced in-process.
pub fn verify_factorization(f: &Factorization, tol: &Tolerances) -> VerificationReport {
    verify_raw_factorization(&RawFactorization::from(f), tol)
}

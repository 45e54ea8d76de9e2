//! Numerical differential-geometry checks: the tangent-space rank of the
//! conjugation orbit of a k-involution, and rank deficiency of the m-fold
//! product map.
//!
//! The differentials are assembled in closed form. For the orbit map
//! g -> g a g^{-1} the tangent directions at a are X a - a X over a basis X
//! of the Lie algebra of the Lorentz group; for the product map
//! (a_1, ..., a_m) -> a_1 ... a_m the slot-i directions are
//! a_1 ... a_{i-1} (X a_i - a_i X) a_{i+1} ... a_m. Ranks are read off by
//! SVD with a relative cutoff. Whenever m * dim(class) is below the group
//! dimension the image of the product map has measure zero, which is what
//! forces the word-length lower bound; the rank can then never exceed
//! m * dim(class).

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{group_dim, involution_class_dim, lower_bound, BoundsError};
use crate::involutions::{random_k_involution, InvolutionError, KInvolution};
use crate::minkowski::numerical_rank;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Involution(#[from] InvolutionError),
}

/// Basis of the Lie algebra of the Lorentz group O(n,1): n boost generators
/// (symmetric pairings of coordinate 0 with a spatial coordinate) and
/// n(n-1)/2 spatial rotation generators.
pub fn lorentz_lie_basis(n: usize) -> Vec<DMatrix<f64>> {
    let dim = n + 1;
    let mut basis = Vec::with_capacity(n * (n + 1) / 2);
    for i in 1..dim {
        let mut m = DMatrix::zeros(dim, dim);
        m[(0, i)] = 1.0;
        m[(i, 0)] = 1.0;
        basis.push(m);
    }
    for i in 1..dim {
        for j in (i + 1)..dim {
            let mut m = DMatrix::zeros(dim, dim);
            m[(i, j)] = 1.0;
            m[(j, i)] = -1.0;
            basis.push(m);
        }
    }
    basis
}

fn flatten_into(col: &mut nalgebra::DVectorViewMut<f64>, m: &DMatrix<f64>) {
    let mut idx = 0;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            col[idx] = m[(r, c)];
            idx += 1;
        }
    }
}

/// Rank of the differential of the conjugation orbit map at a random
/// k-involution; equals the class dimension k(n-k+1) (seed independent).
pub fn orbit_tangent_rank(
    n: usize,
    k: usize,
    seed: u64,
    tol_rank: f64,
) -> Result<usize, ExperimentError> {
    let alpha = random_k_involution(n, k, seed)?;
    Ok(tuple_differential_rank(std::slice::from_ref(&alpha), tol_rank))
}

/// Rank of the differential of the m-fold product map at an explicit tuple
/// of involutions.
pub fn tuple_differential_rank(tuple: &[KInvolution], tol_rank: f64) -> usize {
    assert!(!tuple.is_empty(), "empty tuple has no differential");
    let n = tuple[0].n();
    let dim = n + 1;
    let basis = lorentz_lie_basis(n);
    let m = tuple.len();

    // Prefix products a_1 ... a_{i-1} and suffix products a_{i+1} ... a_m.
    let mut prefixes = Vec::with_capacity(m);
    let mut acc = DMatrix::identity(dim, dim);
    for inv in tuple {
        prefixes.push(acc.clone());
        acc = acc * inv.iso().matrix();
    }
    let mut suffixes = vec![DMatrix::identity(dim, dim); m];
    let mut acc = DMatrix::identity(dim, dim);
    for (i, inv) in tuple.iter().enumerate().rev() {
        suffixes[i] = acc.clone();
        acc = inv.iso().matrix() * acc;
    }

    let mut stacked = DMatrix::zeros(dim * dim, m * basis.len());
    for (i, inv) in tuple.iter().enumerate() {
        let a = inv.iso().matrix();
        for (b, x) in basis.iter().enumerate() {
            let commutator = x * a - a * x;
            let dir = &prefixes[i] * commutator * &suffixes[i];
            let col = i * basis.len() + b;
            flatten_into(&mut stacked.column_mut(col), &dir);
        }
    }
    numerical_rank(&stacked, tol_rank)
}

/// Rank of the product-map differential at a tuple of independently sampled
/// involutions with the given codimensions. Deterministic in the seed.
pub fn product_map_rank(
    n: usize,
    k_list: &[usize],
    seed: u64,
    tol_rank: f64,
) -> Result<usize, ExperimentError> {
    let tuple = sample_tuple(n, k_list, seed)?;
    Ok(tuple_differential_rank(&tuple, tol_rank))
}

pub(crate) fn sample_tuple(
    n: usize,
    k_list: &[usize],
    seed: u64,
) -> Result<Vec<KInvolution>, ExperimentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    k_list
        .iter()
        .map(|&k| Ok(random_k_involution(n, k, rng.gen())?))
        .collect()
}

/// Hard mathematical cap on the product-map rank: the domain dimension
/// capped by the group dimension.
pub fn rank_cap(n: usize, k_list: &[usize]) -> Result<usize, BoundsError> {
    let mut sum = 0;
    for &k in k_list {
        sum += involution_class_dim(n, k)?;
    }
    Ok(sum.min(group_dim(n)))
}

/// Aggregated rank experiment over independent trials.
#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub n: usize,
    pub k_list: Vec<usize>,
    pub trials: usize,
    pub ranks: Vec<usize>,
    pub cap: usize,
    /// Trial indices whose rank exceeded the cap (must stay empty).
    pub violations: Vec<usize>,
    #[serde(skip)]
    pub vacuous: bool,
    #[serde(skip)]
    pub tol_rank: f64,
}

/// Check the dimension-count consistency behind the measure-zero statement:
/// with m = lower_bound(n,k) - 1 factors, every sampled product-map rank is
/// at most m*k(n-k+1), which is strictly below the group dimension. Trials
/// use seeds base_seed, base_seed+1, ... and merge in trial order. A custom
/// m may be supplied; m = 0 yields the vacuous report.
pub fn measure_zero_consistency(
    n: usize,
    k: usize,
    trials: usize,
    base_seed: u64,
    m_override: Option<usize>,
    tol_rank: f64,
) -> Result<RankReport, ExperimentError> {
    let m = match m_override {
        Some(m) => m,
        None => lower_bound(n, k)? - 1,
    };
    if m == 0 {
        // Zero factors: nothing to sample, the statement is vacuous.
        return Ok(RankReport {
            n,
            k_list: Vec::new(),
            trials: 0,
            ranks: Vec::new(),
            cap: 0,
            violations: Vec::new(),
            vacuous: true,
            tol_rank,
        });
    }
    let k_list = vec![k; m];
    let cap = rank_cap(n, &k_list)?;
    let mut ranks = Vec::with_capacity(trials);
    let mut violations = Vec::new();
    for t in 0..trials {
        let rank = product_map_rank(n, &k_list, base_seed + t as u64, tol_rank)?;
        if rank > cap {
            violations.push(t);
        }
        ranks.push(rank);
    }
    Ok(RankReport {
        n,
        k_list,
        trials,
        ranks,
        cap,
        violations,
        vacuous: false,
        tol_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{random_isometry, Orientation, Tolerances};

    const TOL: f64 = 1e-8;

    #[test]
    fn orbit_rank_matches_class_dimension() {
        assert_eq!(orbit_tangent_rank(3, 1, 0, TOL).unwrap(), 3);
        assert_eq!(orbit_tangent_rank(4, 2, 0, TOL).unwrap(), 6);
    }

    #[test]
    fn orbit_rank_is_seed_independent() {
        let expected = involution_class_dim(5, 2).unwrap();
        for seed in 0..20 {
            assert_eq!(orbit_tangent_rank(5, 2, seed, TOL).unwrap(), expected);
        }
    }

    #[test]
    fn single_factor_product_equals_orbit_rank() {
        for seed in 0..5 {
            let via_product = product_map_rank(3, &[2], seed, TOL).unwrap();
            assert_eq!(via_product, 4);
        }
    }

    #[test]
    fn two_factor_product_rank() {
        for seed in 0..5 {
            let r = product_map_rank(3, &[2, 2], seed, TOL).unwrap();
            assert!(r <= 6);
            // Full rank is the generic observation, not a theorem; record it.
            assert!(r >= 4);
        }
    }

    #[test]
    fn deficient_configuration_stays_capped() {
        let cap = rank_cap(9, &[1, 1]).unwrap();
        assert_eq!(cap, 18);
        assert!(cap < group_dim(9));
        for seed in 0..5 {
            assert!(product_map_rank(9, &[1, 1], seed, TOL).unwrap() <= cap);
        }
    }

    #[test]
    fn rank_is_conjugation_invariant() {
        let tol = Tolerances::default();
        let tuple = sample_tuple(4, &[1, 2], 7).unwrap();
        let base = tuple_differential_rank(&tuple, TOL);
        for seed in 0..5 {
            let u = random_isometry(4, Orientation::Preserving, 1000 + seed);
            let conjugated: Vec<KInvolution> = tuple
                .iter()
                .map(|inv| {
                    let m = &(&u * inv.iso()) * &u.inverse();
                    crate::involutions::classify_involution(&m, &tol).unwrap()
                })
                .collect();
            assert_eq!(tuple_differential_rank(&conjugated, TOL), base);
        }
    }

    #[test]
    fn measure_zero_report_shape() {
        let report = measure_zero_consistency(6, 1, 5, 0, None, TOL).unwrap();
        assert_eq!(report.k_list.len(), 3); // lower_bound(6,1) - 1
        assert_eq!(report.trials, 5);
        assert_eq!(report.ranks.len(), 5);
        assert_eq!(report.cap, 18);
        assert!(report.violations.is_empty());
        assert!(!report.vacuous);
        assert!(report.ranks.iter().all(|&r| r <= 18));
    }

    #[test]
    fn measure_zero_vacuous_branch() {
        let report = measure_zero_consistency(6, 1, 5, 0, Some(0), TOL).unwrap();
        assert!(report.vacuous);
        assert_eq!(report.trials, 0);
        assert!(report.ranks.is_empty());
    }

    #[test]
    fn lie_basis_has_group_dimension() {
        for n in 2..=6 {
            assert_eq!(lorentz_lie_basis(n).len(), group_dim(n));
        }
    }
}

//! Closed-form word-length bounds and dimension counts, in exact integer
//! arithmetic.
//!
//! For 1 <= k <= n-1 the conjugacy class of k-involutions is a submanifold
//! of the isometry group of dimension k(n-k+1), the isometry group itself
//! has dimension n(n+1)/2, and the word length of the (orientation
//! preserving, for k even) group with respect to that class is squeezed
//! between ceil(n(n+1) / (2k(n-k+1))) and 2n+4 (k even) or 2n+2+k (k odd).

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("k must satisfy 1 <= k <= n-1, got n = {n}, k = {k}")]
    KOutOfRange { n: usize, k: usize },
    #[error("n must be at least {min}, got {n}")]
    NTooSmall { n: usize, min: usize },
}

fn check_pair(n: usize, k: usize) -> Result<(), BoundsError> {
    if n < 2 {
        return Err(BoundsError::NTooSmall { n, min: 2 });
    }
    if k == 0 || k > n - 1 {
        return Err(BoundsError::KOutOfRange { n, k });
    }
    Ok(())
}

/// Dimension k(n-k+1) of the manifold of k-involutions.
pub fn involution_class_dim(n: usize, k: usize) -> Result<usize, BoundsError> {
    check_pair(n, k)?;
    Ok(k * (n - k + 1))
}

/// Dimension (n-k)(k+1) of the space of k-dimensional totally geodesic
/// subspaces of ℍⁿ (a k-plane corresponds to the (n-k)-involution fixing it).
pub fn plane_space_dim(n: usize, k: usize) -> Result<usize, BoundsError> {
    check_pair(n, k)?;
    Ok((n - k) * (k + 1))
}

/// Dimension n(n+1)/2 of the isometry group of ℍⁿ.
pub fn group_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Lower bound ceil(n(n+1) / (2k(n-k+1))) on the word length, exact.
pub fn lower_bound(n: usize, k: usize) -> Result<usize, BoundsError> {
    check_pair(n, k)?;
    let num = n * (n + 1);
    let den = 2 * k * (n - k + 1);
    Ok(num.div_ceil(den))
}

/// Upper bound on the word length: 2n+4 for even k, 2n+2+k for odd k.
pub fn upper_bound(n: usize, k: usize) -> Result<usize, BoundsError> {
    check_pair(n, k)?;
    Ok(if k % 2 == 0 { 2 * n + 4 } else { 2 * n + 2 + k })
}

/// Dimensions (dim stabilizer, dim group) of the stabilizer of a
/// k-involution and of the whole isometry group. The stabilizer is the
/// isometry group of the (n-k)-dimensional fixed set times O(k), and the
/// difference of the two dimensions is exactly k(n-k+1).
pub fn stabilizer_dims(n: usize, k: usize) -> Result<(usize, usize), BoundsError> {
    check_pair(n, k)?;
    let dim_stab = (n - k) * (n - k + 1) / 2 + k * (k - 1) / 2;
    let dim_group = group_dim(n);
    assert_eq!(
        dim_group - dim_stab,
        involution_class_dim(n, k)?,
        "orbit dimension identity"
    );
    Ok((dim_stab, dim_group))
}

/// Parity class of k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(k: usize) -> Self {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// One row of the bound table.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsRow {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "dim_Sk")]
    pub dim_class: usize,
    #[serde(rename = "dim_Gk")]
    pub dim_planes: usize,
    pub lower: usize,
    pub upper: usize,
    pub parity: Parity,
    pub admits2: bool,
}

pub fn bounds_row(n: usize, k: usize) -> Result<BoundsRow, BoundsError> {
    let lower = lower_bound(n, k)?;
    Ok(BoundsRow {
        n,
        k,
        dim_class: involution_class_dim(n, k)?,
        dim_planes: plane_space_dim(n, k)?,
        lower,
        upper: upper_bound(n, k)?,
        parity: Parity::of(k),
        admits2: lower <= 2,
    })
}

/// All rows with 2 <= n <= n_max, 1 <= k <= n-1.
pub fn bounds_table(n_max: usize) -> Result<Vec<BoundsRow>, BoundsError> {
    if n_max < 2 {
        return Err(BoundsError::NTooSmall { n: n_max, min: 2 });
    }
    let mut rows = Vec::new();
    for n in 2..=n_max {
        for k in 1..n {
            rows.push(bounds_row(n, k)?);
        }
    }
    Ok(rows)
}

/// Necessary-condition proxy for the fraction of involution classes giving
/// word length two: the count of k in 1..n-1 whose lower bound admits 2
/// (that is, n(n+1) <= 4k(n-k+1)), over the n involution classes in
/// dimension n. Exact rational; an upper estimate of the true fraction,
/// since lower bound <= 2 is necessary but not sufficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhiProxy {
    pub n: usize,
    pub numerator: usize,
    pub denominator: usize,
}

impl PhiProxy {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// `phi(n) * n / sqrt(n+1)`; bounded in (0, 2] and tending to 1, which
    /// witnesses the O(n^{-1/2}) decay.
    pub fn normalized_ratio(&self) -> f64 {
        self.numerator as f64 / ((self.n + 1) as f64).sqrt()
    }
}

pub fn phi_proxy(n: usize) -> Result<PhiProxy, BoundsError> {
    if n < 2 {
        return Err(BoundsError::NTooSmall { n, min: 2 });
    }
    let target = n * (n + 1);
    let numerator = (1..n).filter(|&k| 4 * k * (n - k + 1) >= target).count();
    Ok(PhiProxy {
        n,
        numerator,
        denominator: n,
    })
}

/// The proxy table for 2 <= n <= n_max with normalized ratios.
pub fn phi_table(n_max: usize) -> Result<Vec<PhiProxy>, BoundsError> {
    if n_max < 2 {
        return Err(BoundsError::NTooSmall { n: n_max, min: 2 });
    }
    (2..=n_max).map(phi_proxy).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_formulas() {
        assert_eq!(involution_class_dim(3, 1).unwrap(), 3);
        assert_eq!(involution_class_dim(9, 1).unwrap(), 9);
        assert_eq!(involution_class_dim(4, 2).unwrap(), 6);
        assert_eq!(plane_space_dim(3, 1).unwrap(), 4);
        assert_eq!(plane_space_dim(5, 2).unwrap(), 9);
    }

    #[test]
    fn class_and_plane_dims_are_swapped() {
        for n in 2..=200 {
            for k in 1..n {
                assert_eq!(
                    plane_space_dim(n, k).unwrap(),
                    involution_class_dim(n, n - k).unwrap()
                );
            }
        }
    }

    #[test]
    fn lower_bound_values() {
        assert_eq!(lower_bound(4, 2).unwrap(), 2); // ceil(20/12)
        assert_eq!(lower_bound(9, 1).unwrap(), 5); // ceil(90/18)
        assert_eq!(lower_bound(2, 1).unwrap(), 2); // ceil(6/4)
        assert_eq!(lower_bound(6, 1).unwrap(), 4); // ceil(42/12)
        assert_eq!(lower_bound(12, 1).unwrap(), 7); // ceil(156/24)
        assert_eq!(lower_bound(8, 3).unwrap(), 2); // ceil(72/36)
    }

    #[test]
    fn upper_bound_values() {
        assert_eq!(upper_bound(4, 2).unwrap(), 12);
        assert_eq!(upper_bound(5, 3).unwrap(), 15);
    }

    #[test]
    fn ceiling_is_exact() {
        for n in 2..=200 {
            for k in 1..n {
                let l = lower_bound(n, k).unwrap();
                let num = n * (n + 1);
                let den = 2 * k * (n - k + 1);
                assert!(l * den >= num);
                assert!((l - 1) * den < num);
                assert!(l <= upper_bound(n, k).unwrap());
            }
        }
    }

    #[test]
    fn stabilizer_identity() {
        assert_eq!(stabilizer_dims(3, 1).unwrap(), (3, 6));
        assert_eq!(stabilizer_dims(4, 2).unwrap(), (4, 10));
        for n in 2..=200 {
            for k in 1..n {
                let (stab, group) = stabilizer_dims(n, k).unwrap();
                assert_eq!(group - stab, involution_class_dim(n, k).unwrap());
                assert_eq!(group, group_dim(n));
            }
        }
    }

    #[test]
    fn linear_growth_sandwich() {
        for k in 1..=3usize {
            for n in (4 * k).max(2)..=200 {
                let l = lower_bound(n, k).unwrap();
                let u = upper_bound(n, k).unwrap();
                assert!(4 * k * l >= n, "lower >= n/(4k)");
                assert!(u <= 4 * n, "upper <= 4n");
            }
        }
    }

    #[test]
    fn phi_small_values() {
        let p = phi_proxy(4).unwrap();
        assert_eq!((p.numerator, p.denominator), (2, 4));
        let p = phi_proxy(2).unwrap();
        assert_eq!((p.numerator, p.denominator), (1, 2));
    }

    #[test]
    fn phi_numerator_matches_quadratic_roots() {
        // Independent oracle: k admits length two iff k lies in
        // [(n+1-sqrt(n+1))/2, (n+1+sqrt(n+1))/2]; count integers in that
        // interval clipped to 1..n-1.
        for n in 2..=2000usize {
            let s = ((n + 1) as f64).sqrt();
            let lo = ((n as f64 + 1.0 - s) / 2.0).ceil() as usize;
            let hi = ((n as f64 + 1.0 + s) / 2.0).floor() as usize;
            let lo = lo.max(1);
            let hi = hi.min(n - 1);
            let expected = if hi >= lo { hi - lo + 1 } else { 0 };
            assert_eq!(
                phi_proxy(n).unwrap().numerator,
                expected,
                "interval oracle at n = {n}"
            );
        }
    }

    #[test]
    fn range_errors() {
        assert!(matches!(
            lower_bound(4, 4),
            Err(BoundsError::KOutOfRange { .. })
        ));
        assert!(matches!(
            lower_bound(4, 0),
            Err(BoundsError::KOutOfRange { .. })
        ));
        assert!(matches!(phi_proxy(1), Err(BoundsError::NTooSmall { .. })));
    }
}

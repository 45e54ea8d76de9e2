//! Stable file formats: matrix JSON, factorization JSON, rank reports, and
//! the CSV tables.
//!
//! Floats are serialized with a fixed 17-significant-digit scientific
//! format so that identical inputs produce byte-identical files and every
//! value round-trips exactly.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::io;
use thiserror::Error;

use crate::bounds::{BoundsRow, PhiProxy};
use crate::factorization::{Factorization, RawFactorization};
use crate::minkowski::{Isometry, MinkowskiError, Tolerances};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("json syntax: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("schema: {0}")]
    Schema(String),
    #[error("matrix validation: {0}")]
    Validation(#[from] MinkowskiError),
}

/// 17 significant digits; enough to round-trip any f64 exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

struct FixedFloatFormatter;

impl serde_json::ser::Formatter for FixedFloatFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{}", format_float(value))
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{}", format_float(f64::from(value)))
    }
}

/// Serialize with the fixed float format (compact layout, stable field order).
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloatFormatter);
    value
        .serialize(&mut ser)
        .expect("serialization of plain data cannot fail");
    String::from_utf8(out).expect("json output is utf-8")
}

/// The shared matrix format: exactly n+1 rows of n+1 numbers, row-major,
/// signature diag(-1, 1, ..., 1) with coordinate 0 timelike.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub matrix: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(n: usize, m: &DMatrix<f64>) -> Self {
        let rows = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
            .collect();
        MatrixJson { n, matrix: rows }
    }

    pub fn from_isometry(iso: &Isometry) -> Self {
        Self::from_matrix(iso.n(), iso.matrix())
    }

    /// Schema check only: dimensions must be exactly (n+1) x (n+1).
    pub fn to_dmatrix(&self) -> Result<DMatrix<f64>, JsonError> {
        let dim = self.n + 1;
        if self.matrix.len() != dim {
            return Err(JsonError::Schema(format!(
                "expected {} rows for n = {}, got {}",
                dim,
                self.n,
                self.matrix.len()
            )));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != dim {
                return Err(JsonError::Schema(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    dim
                )));
            }
        }
        Ok(DMatrix::from_fn(dim, dim, |r, c| self.matrix[r][c]))
    }

    /// Schema check plus isometry validation.
    pub fn to_isometry(&self, tol: &Tolerances) -> Result<Isometry, JsonError> {
        Ok(Isometry::try_new(self.to_dmatrix()?, tol)?)
    }
}

/// A k-involution on disk: the matrix format plus its codimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvolutionJson {
    pub n: usize,
    pub matrix: Vec<Vec<f64>>,
    pub k: usize,
}

/// A sign pattern on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignVectorJson {
    pub signs: Vec<i8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorizationJson {
    pub k: usize,
    pub bound: usize,
    pub length: usize,
    pub residual: f64,
    pub target: MatrixJson,
    pub factors: Vec<InvolutionJson>,
}

impl From<&Factorization> for FactorizationJson {
    fn from(f: &Factorization) -> Self {
        FactorizationJson {
            k: f.k,
            bound: f.bound,
            length: f.length,
            residual: f.residual,
            target: MatrixJson::from_isometry(&f.target),
            factors: f
                .factors
                .iter()
                .map(|inv| InvolutionJson {
                    n: inv.n(),
                    matrix: MatrixJson::from_isometry(inv.iso()).matrix,
                    k: inv.k(),
                })
                .collect(),
        }
    }
}

impl FactorizationJson {
    /// Schema validation into plain matrices; certification is a separate
    /// step so a corrupted factor is a verification failure, not a parse
    /// error.
    pub fn to_raw(&self) -> Result<RawFactorization, JsonError> {
        let target = self.target.to_dmatrix()?;
        let mut factors = Vec::with_capacity(self.factors.len());
        for (i, f) in self.factors.iter().enumerate() {
            if f.n != self.target.n {
                return Err(JsonError::Schema(format!(
                    "factor {} has n = {}, target has n = {}",
                    i, f.n, self.target.n
                )));
            }
            if f.k != self.k {
                return Err(JsonError::Schema(format!(
                    "factor {} declares k = {}, result declares k = {}",
                    i, f.k, self.k
                )));
            }
            let as_matrix = MatrixJson {
                n: f.n,
                matrix: f.matrix.clone(),
            };
            factors.push(as_matrix.to_dmatrix()?);
        }
        Ok(RawFactorization {
            k: self.k,
            bound: self.bound,
            length: self.length,
            residual: self.residual,
            target,
            factors,
        })
    }
}

/// CSV table of bound rows; header `n,k,dim_Sk,dim_Gk,lower,upper,parity,admits2`.
pub fn bounds_csv(rows: &[BoundsRow]) -> String {
    let mut out = String::from("n,k,dim_Sk,dim_Gk,lower,upper,parity,admits2\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.n,
            r.k,
            r.dim_class,
            r.dim_planes,
            r.lower,
            r.upper,
            r.parity.as_str(),
            r.admits2
        ));
    }
    out
}

/// CSV table of the length-two proxy; header `n,numerator,denominator,normalized_ratio`.
pub fn phi_csv(rows: &[PhiProxy]) -> String {
    let mut out = String::from("n,numerator,denominator,normalized_ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n,
            r.numerator,
            r.denominator,
            format_float(r.normalized_ratio())
        ));
    }
    out
}

//! JSON form of named matrices and its inverse.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::monodromy::{self as mono, Basis};
use crate::params::ParameterPoint;
use crate::scalars::text::{format_complex, format_exact, parse_complex, parse_exact};
use crate::scalars::{ExactScalar, Generators, PairedScalar, Scalar, DEFAULT_TOL};
use crate::verify::Backing;

/// `{"m", "basis", "name", "backing", "point"?, "entries"}`; entries are
/// row-major scalar strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixExport {
    pub m: usize,
    pub basis: Basis,
    pub name: String,
    pub backing: Backing,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub point: Option<ParameterPoint>,
    pub entries: Vec<Vec<String>>,
}

/// Names available in a basis: the generators `M0 … Mm`, then `H` and `Pm`
/// (plain) or `Htilde` (tilde).
pub fn matrix_names(m: usize, basis: Basis) -> Vec<String> {
    let mut names: Vec<String> = (0..=m).map(|i| format!("M{i}")).collect();
    match basis {
        Basis::Plain => names.extend(["H".to_string(), "Pm".to_string()]),
        Basis::Tilde => names.push("Htilde".to_string()),
    }
    names
}

/// Builds the named matrix.
pub fn named_matrix<S: Scalar>(gen: &Generators<S>, basis: Basis, name: &str) -> Result<SquareMatrix<S>> {
    let unknown = || {
        Error::InvalidArgument(format!(
            "no matrix '{name}' in the {basis} basis; expected one of {}",
            matrix_names(gen.m(), basis).join(", ")
        ))
    };
    match (basis, name) {
        (Basis::Plain, "H") => mono::build_h(gen),
        (Basis::Plain, "Pm") => mono::build_pm(gen),
        (Basis::Tilde, "Htilde") => mono::build_tilde_h(gen),
        (_, n) => {
            let i: usize = n.strip_prefix('M').and_then(|k| k.parse().ok()).ok_or_else(unknown)?;
            if i > gen.m() {
                return Err(unknown());
            }
            mono::generator(gen, basis, i)
        }
    }
}

fn rows<S: Scalar>(mat: &SquareMatrix<S>, f: impl Fn(&S) -> String) -> Vec<Vec<String>> {
    mat.rows().iter().map(|r| r.iter().map(&f).collect()).collect()
}

pub fn export_exact(m: usize, basis: Basis, name: &str) -> Result<MatrixExport> {
    let gen = Generators::<ExactScalar>::symbolic(m)?;
    let mat = named_matrix(&gen, basis, name)?;
    Ok(MatrixExport {
        m,
        basis,
        name: name.to_string(),
        backing: Backing::Exact,
        point: None,
        entries: rows(&mat, format_exact),
    })
}

/// Numeric export records the value component only.
pub fn export_numeric(point: &ParameterPoint, basis: Basis, name: &str, tol: f64) -> Result<MatrixExport> {
    let gen = Generators::<PairedScalar>::numeric(point, tol);
    let mat = named_matrix(&gen, basis, name)?;
    Ok(MatrixExport {
        m: point.m(),
        basis,
        name: name.to_string(),
        backing: Backing::Numeric,
        point: Some(point.clone()),
        entries: rows(&mat, |s| format_complex(s.value)),
    })
}

/// Every named matrix in both bases, in a fixed order.
pub fn export_all(m: usize, backing: Backing, point: Option<&ParameterPoint>) -> Result<Vec<MatrixExport>> {
    let mut out = Vec::new();
    for basis in [Basis::Plain, Basis::Tilde] {
        for name in matrix_names(m, basis) {
            out.push(match (backing, point) {
                (Backing::Exact, _) => export_exact(m, basis, &name)?,
                (Backing::Numeric, Some(p)) => export_numeric(p, basis, &name, DEFAULT_TOL)?,
                (Backing::Numeric, None) => {
                    return Err(Error::InvalidArgument("numeric export needs a parameter point".into()))
                }
            });
        }
    }
    Ok(out)
}

impl MatrixExport {
    pub fn parse(json: &str) -> Result<Self> {
        let e: MatrixExport = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        let n = 1usize << e.m;
        if e.entries.len() != n || e.entries.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "expected {n}×{n} entries for m = {}",
                e.m
            )));
        }
        Ok(e)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn rebuild_exact(&self) -> Result<SquareMatrix<ExactScalar>> {
        SquareMatrix::from_rows(
            self.entries
                .iter()
                .map(|r| r.iter().map(|s| parse_exact(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Values only; the dual component is set equal to the value.
    pub fn rebuild_values(&self) -> Result<Vec<Vec<num_complex::Complex64>>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|s| parse_complex(s)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert_eq!(matrix_names(2, Basis::Plain), ["M0", "M1", "M2", "H", "Pm"]);
        assert_eq!(matrix_names(1, Basis::Tilde), ["M0", "M1", "Htilde"]);
    }

    #[test]
    fn rejects_unknown_names() {
        for (basis, name) in [
            (Basis::Tilde, "H"),
            (Basis::Plain, "Htilde"),
            (Basis::Plain, "M3"),
            (Basis::Plain, "X"),
        ] {
            assert!(export_exact(2, basis, name).is_err(), "{basis} {name}");
        }
    }

    #[test]
    fn exact_round_trip() {
        for m in 1..=2 {
            let gen = Generators::<ExactScalar>::symbolic(m).unwrap();
            for e in export_all(m, Backing::Exact, None).unwrap() {
                let back = MatrixExport::parse(&e.to_json()).unwrap();
                assert_eq!(back, e);
                let rebuilt = back.rebuild_exact().unwrap();
                let original = named_matrix(&gen, e.basis, &e.name).unwrap();
                assert!(
                    rebuilt.sub(&original).entries().iter().all(|x| x.is_zero()),
                    "{}",
                    e.name
                );
            }
        }
    }

    #[test]
    fn numeric_round_trip_is_lossless() {
        let p = ParameterPoint::parse("1/3", "2/7", &["1/5", "3/8"]).unwrap();
        let gen = Generators::<PairedScalar>::numeric(&p, DEFAULT_TOL);
        for e in export_all(2, Backing::Numeric, Some(&p)).unwrap() {
            let values = MatrixExport::parse(&e.to_json()).unwrap().rebuild_values().unwrap();
            let original = named_matrix(&gen, e.basis, &e.name).unwrap();
            for (i, row) in values.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    assert_eq!(*z, original.get(i, j).value);
                }
            }
        }
    }

    #[test]
    fn parse_rejects_bad_shape() {
        let mut e = export_exact(1, Basis::Plain, "M1").unwrap();
        e.entries.pop();
        assert!(MatrixExport::parse(&serde_json::to_string(&e).unwrap()).is_err());
    }
}

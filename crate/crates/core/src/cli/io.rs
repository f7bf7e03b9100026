//! Lossless JSON interchange and text rendering.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grids::{GridIndex, GridKind};
use crate::numlin::{ExactMatrix, ExactScalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarJson {
    pub re: RationalJson,
    pub im: RationalJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<ScalarJson>>,
}

fn rational_json(q: &BigRational) -> RationalJson {
    RationalJson {
        num: q.numer().to_string(),
        den: q.denom().to_string(),
    }
}

fn parse_rational(r: &RationalJson) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("bad rational {}/{}", r.num, r.den));
    let num = BigInt::from_str(&r.num).map_err(|_| bad())?;
    let den = BigInt::from_str(&r.den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

impl From<&ExactMatrix> for MatrixJson {
    fn from(m: &ExactMatrix) -> Self {
        let entries = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| {
                        let x = m.get(i, j);
                        ScalarJson {
                            re: rational_json(&x.re),
                            im: rational_json(&x.im),
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries,
        }
    }
}

impl TryFrom<&MatrixJson> for ExactMatrix {
    type Error = Error;

    fn try_from(m: &MatrixJson) -> Result<Self> {
        if m.entries.len() != m.rows || m.entries.iter().any(|r| r.len() != m.cols) {
            return Err(Error::InvalidArgument(format!(
                "entries do not form a {}x{} array",
                m.rows, m.cols
            )));
        }
        let flat = m
            .entries
            .iter()
            .flatten()
            .map(|x| Ok(ExactScalar::new(parse_rational(&x.re)?, parse_rational(&x.im)?)))
            .collect::<Result<Vec<_>>>()?;
        ExactMatrix::from_entries(m.rows, m.cols, flat)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<GridIndex>,
    pub matrix: MatrixJson,
}

/// Row and column labels of an `H_n^k` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexJson {
    pub rows: Vec<Vec<usize>>,
    pub cols: Vec<Vec<usize>>,
}

/// Output of `construct`, accepted back by `verify --input`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub object: String,
    pub params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexJson>,
    pub elements: Vec<ElementJson>,
}

impl Document {
    pub fn matrices(&self) -> Result<Vec<ExactMatrix>> {
        self.elements.iter().map(|e| ExactMatrix::try_from(&e.matrix)).collect()
    }
}

/// Accepts `3`, `-1/2`, `i`, `-2i`, `1+i`, `1/2-3/2i`.
pub fn parse_scalar(s: &str) -> Result<ExactScalar> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidArgument(format!("cannot parse scalar {s:?}"));
    let rational = |p: &str| BigRational::from_str(p).map_err(|_| bad());
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(ExactScalar::new(rational(&t)?, BigRational::zero()));
    };
    let split = body
        .char_indices()
        .filter(|&(p, c)| p > 0 && (c == '+' || c == '-'))
        .map(|(p, _)| p)
        .next_back();
    let (re, im) = match split {
        Some(p) => (rational(&body[..p])?, &body[p..]),
        None => (BigRational::zero(), body),
    };
    let im = match im {
        "" | "+" => BigRational::from_integer(1.into()),
        "-" => BigRational::from_integer((-1).into()),
        other => rational(other.strip_prefix('+').unwrap_or(other))?,
    };
    Ok(ExactScalar::new(re, im))
}

/// Right-aligned columns of exact entries.
pub fn pretty_matrix(m: &ExactMatrix) -> String {
    let cells: Vec<Vec<String>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).render()).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str("  ");
        out.push_str(&line.join("  "));
        out.push('\n');
    }
    out
}

/// `element,row,col,re,im` with 17 significant digits.
pub fn csv_rows(name: &str, m: &ExactMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let z = m.get(i, j).to_complex64();
            out.push_str(&format!("{name},{},{},{:.16e},{:.16e}\n", i + 1, j + 1, z.re, z.im));
        }
    }
    out
}

//! Canonical grids of Cartan factor types 1 to 4 and their verification.

mod spin;
mod transforms;
mod verify;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::ExactMatrix;
use crate::triple::PartialIsometry;

pub use spin::{spin_grid, spin_system, spin_to_spin_system, SpinSystemTransform, SPIN_SYSTEM_MAX};
pub use transforms::{
    hermitian_to_matrix_units, random_signed_permutation, symplectic_to_matrix_units, MatrixUnits,
};
pub use verify::{verify_grid, EXHAUSTIVE_LIMIT, SAMPLE_TRIPLES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GridKind {
    Rectangular { rows: usize, cols: usize },
    Hermitian { m: usize },
    Symplectic { m: usize },
    Spin { pairs: usize, odd: bool },
    RankOne { n: usize },
}

/// Element labels, one-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridIndex {
    Pair(usize, usize),
    Single(usize),
    Spin(usize),
    SpinTilde(usize),
    SpinZero,
}

impl fmt::Display for GridIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridIndex::Pair(i, j) if *i < 10 && *j < 10 => write!(f, "u_{i}{j}"),
            GridIndex::Pair(i, j) => write!(f, "u_{i},{j}"),
            GridIndex::Single(i) | GridIndex::Spin(i) => write!(f, "u_{i}"),
            GridIndex::SpinTilde(i) => write!(f, "u~_{i}"),
            GridIndex::SpinZero => write!(f, "u_0"),
        }
    }
}

impl GridKind {
    fn admits(&self, label: &GridIndex) -> bool {
        match (*self, *label) {
            (GridKind::Rectangular { rows, cols }, GridIndex::Pair(i, j)) => {
                (1..=rows).contains(&i) && (1..=cols).contains(&j)
            }
            (GridKind::Hermitian { m }, GridIndex::Pair(i, j)) => 1 <= i && i <= j && j <= m,
            (GridKind::Symplectic { m }, GridIndex::Pair(i, j)) => 1 <= i && i < j && j <= m,
            (GridKind::Spin { pairs, .. }, GridIndex::Spin(j) | GridIndex::SpinTilde(j)) => {
                (1..=pairs).contains(&j)
            }
            (GridKind::Spin { odd, .. }, GridIndex::SpinZero) => odd,
            (GridKind::RankOne { n }, GridIndex::Single(i)) => (1..=n).contains(&i),
            _ => false,
        }
    }

    pub fn name(&self) -> String {
        match self {
            GridKind::Rectangular { rows, cols } => format!("rectangular {rows}x{cols}"),
            GridKind::Hermitian { m } => format!("hermitian m={m}"),
            GridKind::Symplectic { m } => format!("symplectic m={m}"),
            GridKind::Spin { pairs, odd } => {
                format!("spin r={pairs} {}", if *odd { "odd" } else { "even" })
            }
            GridKind::RankOne { n } => format!("rank-one n={n}"),
        }
    }
}

/// A labelled family of partial isometries of a common shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    kind: GridKind,
    labels: Vec<GridIndex>,
    elements: Vec<PartialIsometry>,
    lookup: HashMap<GridIndex, usize>,
}

impl Grid {
    pub fn new(kind: GridKind, members: Vec<(GridIndex, ExactMatrix)>) -> Result<Self> {
        let mut labels = Vec::with_capacity(members.len());
        let mut elements = Vec::with_capacity(members.len());
        let mut lookup = HashMap::new();
        let shape = members.first().map(|(_, m)| m.shape());
        for (label, mat) in members {
            if !kind.admits(&label) {
                return Err(Error::Construction(format!(
                    "label {label} does not belong to a {} grid",
                    kind.name()
                )));
            }
            if Some(mat.shape()) != shape {
                return Err(Error::dim("grid", format!("element {label} has a different shape")));
            }
            if lookup.insert(label, labels.len()).is_some() {
                return Err(Error::Construction(format!("duplicate label {label}")));
            }
            let v = PartialIsometry::new(mat).map_err(|e| {
                Error::Construction(format!("element {label}: {e}"))
            })?;
            labels.push(label);
            elements.push(v);
        }
        Ok(Self {
            kind,
            labels,
            elements,
            lookup,
        })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> &[GridIndex] {
        &self.labels
    }

    pub fn elements(&self) -> &[PartialIsometry] {
        &self.elements
    }

    pub fn matrices(&self) -> Vec<ExactMatrix> {
        self.elements.iter().map(|e| e.mat().clone()).collect()
    }

    pub fn shape(&self) -> Option<(usize, usize)> {
        self.elements.first().map(PartialIsometry::shape)
    }

    pub fn position(&self, label: &GridIndex) -> Option<usize> {
        self.lookup.get(label).copied()
    }

    pub fn get(&self, label: &GridIndex) -> Option<&ExactMatrix> {
        self.position(label).map(|i| self.elements[i].mat())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GridIndex, &PartialIsometry)> {
        self.labels.iter().zip(&self.elements)
    }

    /// `u_ij` for a hermitian grid, read through `u_ij = u_ji`.
    pub fn symmetric(&self, i: usize, j: usize) -> Option<&ExactMatrix> {
        self.get(&GridIndex::Pair(i.min(j), i.max(j)))
    }

    /// `u_ij` for a symplectic grid, read through `u_ij = -u_ji`.
    pub fn antisymmetric(&self, i: usize, j: usize) -> Option<ExactMatrix> {
        if i < j {
            self.get(&GridIndex::Pair(i, j)).cloned()
        } else {
            self.get(&GridIndex::Pair(j, i)).map(|m| -m)
        }
    }

    /// The grid `{left · x · right}`; exact unitaries keep every relation.
    pub fn conjugate(&self, left: &ExactMatrix, right: &ExactMatrix) -> Result<Grid> {
        let members = self
            .iter()
            .map(|(l, e)| Ok((*l, left.mul(e.mat())?.mul(right)?)))
            .collect::<Result<Vec<_>>>()?;
        Grid::new(self.kind, members).map_err(|e| Error::Transform(e.to_string()))
    }
}

/// Matrix units `E_ij` of shape `p×q`.
pub fn rectangular_grid(p: usize, q: usize) -> Result<Grid> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument(format!(
            "rectangular grid needs p, q >= 1, got {p}x{q}"
        )));
    }
    let members = (1..=p)
        .flat_map(|i| (1..=q).map(move |j| (i, j)))
        .map(|(i, j)| (GridIndex::Pair(i, j), ExactMatrix::unit(p, q, i - 1, j - 1)))
        .collect();
    Grid::new(GridKind::Rectangular { rows: p, cols: q }, members)
}

/// `U_ii = E_ii` and `U_ij = E_ij + E_ji`, diagonal first.
pub fn hermitian_grid(m: usize) -> Result<Grid> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("hermitian grid needs m >= 2, got {m}")));
    }
    let mut members: Vec<_> = (1..=m)
        .map(|i| (GridIndex::Pair(i, i), ExactMatrix::unit(m, m, i - 1, i - 1)))
        .collect();
    for i in 1..=m {
        for j in i + 1..=m {
            let u = &ExactMatrix::unit(m, m, i - 1, j - 1) + &ExactMatrix::unit(m, m, j - 1, i - 1);
            members.push((GridIndex::Pair(i, j), u));
        }
    }
    Grid::new(GridKind::Hermitian { m }, members)
}

/// `U_ij = E_ij - E_ji` for `i < j`.
pub fn symplectic_grid(m: usize) -> Result<Grid> {
    if m < 4 {
        return Err(Error::InvalidArgument(format!("symplectic grid needs m >= 4, got {m}")));
    }
    let mut members = Vec::new();
    for i in 1..=m {
        for j in i + 1..=m {
            let u = &ExactMatrix::unit(m, m, i - 1, j - 1) - &ExactMatrix::unit(m, m, j - 1, i - 1);
            members.push((GridIndex::Pair(i, j), u));
        }
    }
    Grid::new(GridKind::Symplectic { m }, members)
}

/// Wraps `u_1, …, u_n` as a rank-one grid.
pub fn rank_one_grid(elements: &[ExactMatrix]) -> Result<Grid> {
    let members = elements
        .iter()
        .enumerate()
        .map(|(i, m)| (GridIndex::Single(i + 1), m.clone()))
        .collect();
    Grid::new(GridKind::RankOne { n: elements.len() }, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::ExactScalar;
    use crate::triple::{classify_relation, is_minimal_in_family, triple_product, GridRelation};

    #[test]
    fn rectangular_row() {
        let g = rectangular_grid(1, 3).unwrap();
        assert_eq!(g.len(), 3);
        let els = g.elements();
        for a in 0..3 {
            for b in a + 1..3 {
                assert_eq!(classify_relation(&els[a], &els[b]).unwrap(), GridRelation::Colinear);
            }
        }
        let sq = rectangular_grid(2, 2).unwrap();
        let rel = classify_relation(
            &PartialIsometry::new(sq.get(&GridIndex::Pair(1, 1)).unwrap().clone()).unwrap(),
            &PartialIsometry::new(sq.get(&GridIndex::Pair(2, 2)).unwrap().clone()).unwrap(),
        )
        .unwrap();
        assert_eq!(rel, GridRelation::Orthogonal);
        let u = |i, j| sq.get(&GridIndex::Pair(i, j)).unwrap();
        let t = triple_product(u(1, 2), u(1, 1), u(2, 1)).unwrap();
        assert_eq!(t, u(2, 2).scale(&ExactScalar::half()));
    }

    #[test]
    fn hermitian_examples() {
        let g = hermitian_grid(2).unwrap();
        assert_eq!(
            g.labels(),
            &[GridIndex::Pair(1, 1), GridIndex::Pair(2, 2), GridIndex::Pair(1, 2)]
        );
        let u12 = PartialIsometry::new(g.symmetric(2, 1).unwrap().clone()).unwrap();
        let u11 = PartialIsometry::new(g.symmetric(1, 1).unwrap().clone()).unwrap();
        assert_eq!(
            classify_relation(&u12, &u11).unwrap(),
            GridRelation::GovernsFirstOverSecond
        );
        assert!(is_minimal_in_family(&u11, g.elements()));
        assert_eq!(triple_product(u12.mat(), u12.mat(), u12.mat()).unwrap(), *u12.mat());

        let g4 = hermitian_grid(4).unwrap();
        let u = |i, j| g4.symmetric(i, j).unwrap();
        let t = triple_product(u(1, 2), u(2, 3), u(3, 4)).unwrap();
        assert_eq!(t, u(1, 4).scale(&ExactScalar::half()));
    }

    #[test]
    fn symplectic_examples() {
        let g = symplectic_grid(4).unwrap();
        let u = |i, j| g.antisymmetric(i, j).unwrap();
        let p = |m: ExactMatrix| PartialIsometry::new(m).unwrap();
        assert_eq!(
            classify_relation(&p(u(1, 2)), &p(u(3, 4))).unwrap(),
            GridRelation::Orthogonal
        );
        let t = triple_product(&u(1, 2), &u(1, 4), &u(3, 4)).unwrap();
        assert_eq!(t.scale(&ExactScalar::from_int(2)), u(3, 2));
        assert_eq!(u(3, 2), -&u(2, 3));
        assert!(g.elements().iter().all(|e| is_minimal_in_family(e, g.elements())));
    }

    #[test]
    fn constructor_errors() {
        assert!(rectangular_grid(0, 2).is_err());
        assert!(hermitian_grid(1).is_err());
        assert!(symplectic_grid(3).is_err());
        let bad = Grid::new(
            GridKind::RankOne { n: 1 },
            vec![(GridIndex::Pair(1, 1), ExactMatrix::identity(1))],
        );
        assert!(matches!(bad, Err(Error::Construction(_))));
        let not_pi = Grid::new(
            GridKind::RankOne { n: 1 },
            vec![(GridIndex::Single(1), ExactMatrix::identity(2).scale(&ExactScalar::from_int(3)))],
        );
        assert!(not_pi.is_err());
    }

    #[test]
    fn labels_render() {
        assert_eq!(GridIndex::Pair(1, 2).to_string(), "u_12");
        assert_eq!(GridIndex::Pair(1, 12).to_string(), "u_1,12");
        assert_eq!(GridIndex::SpinTilde(3).to_string(), "u~_3");
    }
}

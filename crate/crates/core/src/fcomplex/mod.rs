//! Filtered cochain complexes of ray generators and their persistence.
//!
//! A generator `{degree: n, grade: g}` stands for the ray `[g, inf)` placed in
//! degree `n`. The differential raises degree by one and may only send a
//! generator to generators of equal or larger grade. Reduction turns such a
//! complex into a [`GradedBarcode`]: a pair `x -> y` becomes the bar
//! `[grade x, grade y)` in degree `deg x`.

mod map;
mod telescope;

pub use map::{
    certificate_from_matching, cone, cone_torsion_bound_check, is_homotopic,
    kernel_isomorphism_cone_check, verify_certificate, ChainHomotopy, ChainMap,
    ConeTorsionReport, InterleavingCertificate,
};
pub use telescope::{
    presentation_sequence, telescope, thickening, thickening_cone_checks, thickening_map,
    ThickeningReport,
};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barcode::{Bar, GradedBarcode, TOL};
use crate::field::{DenseMatrix, FieldError, PrimeField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FcError {
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("incompatible map: {0}")]
    IncompatibleMap(String),
    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub degree: i32,
    pub grade: f64,
}

/// Sparse vector with strictly increasing indices and nonzero values.
pub type SparseVec = Vec<(usize, u32)>;

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    field: PrimeField,
    generators: Vec<Generator>,
    /// `columns[j]` is `D(generator j)`.
    columns: Vec<SparseVec>,
}

#[derive(Serialize, Deserialize)]
struct RawComplex {
    #[serde(default)]
    field: PrimeField,
    generators: Vec<Generator>,
    #[serde(default)]
    boundary: Vec<(usize, usize, i64)>,
}

impl Serialize for FilteredComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawComplex {
            field: self.field,
            generators: self.generators.clone(),
            boundary: self.triplets(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FilteredComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawComplex::deserialize(d)?;
        FilteredComplex::new(raw.field, raw.generators, &raw.boundary)
            .map_err(serde::de::Error::custom)
    }
}

pub(crate) fn axpy(field: PrimeField, y: &SparseVec, c: u32, x: &SparseVec) -> SparseVec {
    // y + c*x
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        let take = match (y.get(i), x.get(j)) {
            (Some(a), Some(b)) => a.0.cmp(&b.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match take {
            Ordering::Less => {
                out.push(y[i]);
                i += 1;
            }
            Ordering::Greater => {
                let v = field.mul(c, x[j].1);
                if v != 0 {
                    out.push((x[j].0, v));
                }
                j += 1;
            }
            Ordering::Equal => {
                let v = field.add(y[i].1, field.mul(c, x[j].1));
                if v != 0 {
                    out.push((y[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Generators of the standard presentation belonging to one bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarGenerators {
    pub degree: i32,
    pub index: usize,
    pub bar: Bar,
    pub head: usize,
    pub tail: Option<usize>,
}

impl FilteredComplex {
    pub fn new(
        field: PrimeField,
        generators: Vec<Generator>,
        triplets: &[(usize, usize, i64)],
    ) -> Result<Self, FcError> {
        let n = generators.len();
        let mut cols: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        for &(r, c, v) in triplets {
            if r >= n || c >= n {
                return Err(FcError::InvalidComplex(format!(
                    "entry ({r}, {c}) outside {n} generators"
                )));
            }
            let v = field.from_i64(v);
            if v != 0 {
                cols[c].push((r, v));
            }
        }
        let columns = cols
            .into_iter()
            .map(|mut c| {
                c.sort_by_key(|e| e.0);
                let mut merged: SparseVec = Vec::with_capacity(c.len());
                for (r, v) in c {
                    match merged.last_mut() {
                        Some(last) if last.0 == r => last.1 = field.add(last.1, v),
                        _ => merged.push((r, v)),
                    }
                }
                merged.retain(|e| e.1 != 0);
                merged
            })
            .collect();
        let cx = Self {
            field,
            generators,
            columns,
        };
        cx.validate()?;
        Ok(cx)
    }

    pub fn empty(field: PrimeField) -> Self {
        Self {
            field,
            generators: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub(crate) fn from_columns_unchecked(
        field: PrimeField,
        generators: Vec<Generator>,
        columns: Vec<SparseVec>,
    ) -> Self {
        Self {
            field,
            generators,
            columns,
        }
    }

    /// Checks degrees, grade monotonicity and `D o D = 0`.
    pub fn validate(&self) -> Result<(), FcError> {
        for (j, g) in self.generators.iter().enumerate() {
            if !g.grade.is_finite() {
                return Err(FcError::InvalidComplex(format!("generator {j} has non-finite grade")));
            }
            for &(i, _) in &self.columns[j] {
                let t = &self.generators[i];
                if t.degree != g.degree + 1 {
                    return Err(FcError::InvalidComplex(format!(
                        "entry ({i}, {j}) goes from degree {} to {}",
                        g.degree, t.degree
                    )));
                }
                if t.grade < g.grade - TOL {
                    return Err(FcError::InvalidComplex(format!(
                        "entry ({i}, {j}) lowers grade {} to {}",
                        g.grade, t.grade
                    )));
                }
            }
        }
        for j in 0..self.len() {
            let mut dd: SparseVec = Vec::new();
            for &(i, v) in &self.columns[j] {
                dd = axpy(self.field, &dd, v, &self.columns[i]);
            }
            if !dd.is_empty() {
                return Err(FcError::InvalidComplex(format!("D^2 is nonzero on generator {j}")));
            }
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn triplets(&self) -> Vec<(usize, usize, i64)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |&(i, v)| (i, j, v as i64)))
            .collect()
    }

    pub fn dense_boundary(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.len(), self.len());
        for (j, c) in self.columns.iter().enumerate() {
            for &(i, v) in c {
                m.set(i, j, v);
            }
        }
        m
    }

    /// `T_c`: every grade moves up by `c`.
    pub fn shift(&self, c: f64) -> Self {
        let mut out = self.clone();
        for g in &mut out.generators {
            g.grade += c;
        }
        out
    }

    pub fn direct_sum(&self, other: &FilteredComplex) -> Self {
        let off = self.len();
        let mut generators = self.generators.clone();
        generators.extend_from_slice(&other.generators);
        let mut columns = self.columns.clone();
        columns.extend(
            other
                .columns
                .iter()
                .map(|c| c.iter().map(|&(i, v)| (i + off, v)).collect()),
        );
        Self {
            field: self.field,
            generators,
            columns,
        }
    }

    /// Rays become single generators, a finite bar `[a, b)` in degree `n`
    /// becomes `x_a -> y_b` with `x` in degree `n`.
    pub fn from_barcode(b: &GradedBarcode, field: PrimeField) -> (Self, Vec<BarGenerators>) {
        let mut generators = Vec::new();
        let mut columns: Vec<SparseVec> = Vec::new();
        let mut index = Vec::new();
        for n in b.degrees() {
            for (k, bar) in b.degree(n).iter().enumerate() {
                let head = generators.len();
                generators.push(Generator {
                    degree: n,
                    grade: bar.birth,
                });
                columns.push(Vec::new());
                let tail = if bar.is_infinite() {
                    None
                } else {
                    let t = generators.len();
                    generators.push(Generator {
                        degree: n + 1,
                        grade: bar.death,
                    });
                    columns.push(Vec::new());
                    columns[head].push((t, 1));
                    Some(t)
                };
                index.push(BarGenerators {
                    degree: n,
                    index: k,
                    bar: *bar,
                    head,
                    tail,
                });
            }
        }
        (
            Self {
                field,
                generators,
                columns,
            },
            index,
        )
    }

    /// Signed generator count per degree with grade `<= t`.
    pub fn euler_characteristic_at(&self, t: f64) -> i64 {
        self.generators
            .iter()
            .filter(|g| g.grade <= t + TOL)
            .map(|g| if g.degree.rem_euclid(2) == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn persistence(&self) -> Persistence {
        Persistence::compute(self)
    }

    pub fn reduce(&self) -> GradedBarcode {
        self.persistence().barcode(self)
    }
}

/// Result of the column reduction `R = D V`.
#[derive(Debug, Clone)]
pub struct Persistence {
    field: PrimeField,
    /// Position -> generator.
    order: Vec<usize>,
    /// Generator -> position.
    position: Vec<usize>,
    reduced: Vec<SparseVec>,
    transform: Vec<SparseVec>,
    /// Position of a low -> position of the column owning it.
    low_owner: Vec<Option<usize>>,
    /// Pairs as generator indices `(x, y)` with `D x` reaching `y`.
    pub pairs: Vec<(usize, usize)>,
    /// Unpaired generators.
    pub essential: Vec<usize>,
}

impl Persistence {
    fn compute(cx: &FilteredComplex) -> Self {
        let n = cx.len();
        let field = cx.field;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            let (a, b) = (&cx.generators[i], &cx.generators[j]);
            b.grade
                .partial_cmp(&a.grade)
                .unwrap_or(Ordering::Equal)
                .then(b.degree.cmp(&a.degree))
                .then(i.cmp(&j))
        });
        let mut position = vec![0; n];
        for (p, &g) in order.iter().enumerate() {
            position[g] = p;
        }
        let mut reduced: Vec<SparseVec> = order
            .iter()
            .map(|&g| {
                let mut c: SparseVec = cx.columns[g].iter().map(|&(i, v)| (position[i], v)).collect();
                c.sort_by_key(|e| e.0);
                c
            })
            .collect();
        let mut transform: Vec<SparseVec> = (0..n).map(|p| vec![(p, 1)]).collect();
        let mut low_owner: Vec<Option<usize>> = vec![None; n];
        for j in 0..n {
            while let Some(&(low, v)) = reduced[j].last() {
                let Some(k) = low_owner[low] else {
                    low_owner[low] = Some(j);
                    break;
                };
                let w = reduced[k].last().expect("owner has a low").1;
                let c = field.neg(field.mul(v, field.inv(w)));
                reduced[j] = axpy(field, &reduced[j], c, &reduced[k]);
                transform[j] = axpy(field, &transform[j], c, &transform[k]);
            }
        }
        let mut pairs = Vec::new();
        let mut essential = Vec::new();
        for j in 0..n {
            if let Some(&(low, _)) = reduced[j].last() {
                pairs.push((order[j], order[low]));
            } else if low_owner[j].is_none() {
                essential.push(order[j]);
            }
        }
        Self {
            field,
            order,
            position,
            reduced,
            transform,
            low_owner,
            pairs,
            essential,
        }
    }

    pub fn barcode(&self, cx: &FilteredComplex) -> GradedBarcode {
        let g = cx.generators();
        let mut out = GradedBarcode::new();
        for &(x, y) in &self.pairs {
            if g[y].grade - g[x].grade > TOL {
                out.push(g[x].degree, Bar::finite(g[x].grade, g[y].grade));
            }
        }
        for &e in &self.essential {
            out.push(g[e].degree, Bar::ray(g[e].grade));
        }
        out
    }

    /// Representative cocycle of an essential generator, indexed by generators.
    pub fn representative(&self, essential: usize) -> SparseVec {
        let mut v: SparseVec = self.transform[self.position[essential]]
            .iter()
            .map(|&(p, c)| (self.order[p], c))
            .collect();
        v.sort_by_key(|e| e.0);
        v
    }

    /// Writes a cocycle as a combination of essential representatives plus a
    /// coboundary. Returns `(essential generator, coefficient)` pairs, or `None`
    /// if the vector is not a cocycle.
    pub fn express(&self, cocycle: &SparseVec) -> Option<Vec<(usize, u32)>> {
        let field = self.field;
        let mut z: SparseVec = cocycle.iter().map(|&(g, c)| (self.position[g], c)).collect();
        z.sort_by_key(|e| e.0);
        let mut coeffs = Vec::new();
        while let Some(&(low, v)) = z.last() {
            if let Some(k) = self.low_owner[low] {
                let w = self.reduced[k].last().expect("owner has a low").1;
                let c = field.neg(field.mul(v, field.inv(w)));
                z = axpy(field, &z, c, &self.reduced[k]);
            } else if self.reduced[low].is_empty() {
                // essential position; its transform column has low `low` with coefficient 1
                coeffs.push((self.order[low], v));
                z = axpy(field, &z, field.neg(v), &self.transform[low]);
            } else {
                return None;
            }
        }
        coeffs.sort_by_key(|e| e.0);
        Some(coeffs)
    }
}

//! Sampled functions on finite cell complexes and the relative cohomology
//! `H^*(E, {S > c})` as `c` sweeps the vertex values.
//!
//! A cell lies in `{S > c}` when all of its vertices do, so it contributes a
//! relative cochain from `c = min` of its vertex values on. The pair filtration
//! is encoded as a [`FilteredComplex`] with grade `-min`, which is the lower-star
//! value of `-S`; reduction then gives the barcode of the sheaf directly.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barcode::{GradedBarcode, TOL};
use crate::fcomplex::{FcError, FilteredComplex, Generator, Persistence, SparseVec};
use crate::field::{DenseMatrix, PrimeField};
use crate::specinv::{spec, FilteredGradedModule, GradedModule, GradedRing, SpecError, SpecSet};

#[derive(Debug, Error)]
pub enum SublevelError {
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("cup products need a simplicial complex; triangulate the grid first")]
    UnsupportedComplex,
    #[error("a fibered complex needs a supplied action")]
    ActionUnavailable,
    #[error("cup product check failed: {0}")]
    CupProduct(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Complex(#[from] FcError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub dim: usize,
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridShape {
    pub shape: Vec<usize>,
    pub periodic: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellKind {
    Simplicial,
    Cubical(GridShape),
}

/// Cells ordered by dimension with signed boundary incidences.
#[derive(Debug, Clone, PartialEq)]
pub struct CellComplex {
    kind: CellKind,
    num_vertices: usize,
    cells: Vec<Cell>,
    boundary: Vec<Vec<(usize, i64)>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Grid(GridShape),
    Cells {
        #[serde(default)]
        vertices: Option<usize>,
        cells: Vec<Vec<usize>>,
    },
}

impl Serialize for CellComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.kind {
            CellKind::Cubical(g) => RawComplex::Grid(g.clone()).serialize(s),
            CellKind::Simplicial => RawComplex::Cells {
                vertices: Some(self.num_vertices),
                cells: self.cells.iter().map(|c| c.vertices.clone()).collect(),
            }
            .serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for CellComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match RawComplex::deserialize(d)? {
            RawComplex::Grid(g) => CellComplex::cubical(&g.shape, &g.periodic),
            RawComplex::Cells { vertices, cells } => CellComplex::simplicial(vertices, &cells),
        }
        .map_err(serde::de::Error::custom)
    }
}

fn subsets_of_size(v: &[usize], k: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(v: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..v.len() {
            cur.push(v[i]);
            rec(v, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(v, k, 0, &mut Vec::new(), out);
}

impl CellComplex {
    /// Closure of the given simplices. Vertex count defaults to `max id + 1`.
    pub fn simplicial(
        num_vertices: Option<usize>,
        simplices: &[Vec<usize>],
    ) -> Result<Self, SublevelError> {
        let mut all: Vec<Vec<usize>> = Vec::new();
        for s in simplices {
            let mut v = s.clone();
            v.sort_unstable();
            v.dedup();
            if v.len() != s.len() || v.is_empty() {
                return Err(SublevelError::InvalidComplex(format!("bad simplex {s:?}")));
            }
            for k in 1..=v.len() {
                subsets_of_size(&v, k, &mut all);
            }
        }
        let nv = all.iter().flatten().max().map_or(0, |m| m + 1);
        let nv = match num_vertices {
            Some(n) if n < nv => {
                return Err(SublevelError::InvalidComplex(format!(
                    "vertex id {} exceeds the declared {n} vertices",
                    nv - 1
                )))
            }
            Some(n) => n,
            None => nv,
        };
        for v in 0..nv {
            all.push(vec![v]);
        }
        all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        all.dedup();
        let index: HashMap<Vec<usize>, usize> =
            all.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let mut boundary = Vec::with_capacity(all.len());
        for v in &all {
            let mut faces = Vec::new();
            if v.len() > 1 {
                for i in 0..v.len() {
                    let mut f = v.clone();
                    f.remove(i);
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    faces.push((index[&f], sign));
                }
            }
            boundary.push(faces);
        }
        let cells = all
            .into_iter()
            .map(|vertices| Cell {
                dim: vertices.len() - 1,
                vertices,
            })
            .collect();
        Ok(Self {
            kind: CellKind::Simplicial,
            num_vertices: nv,
            cells,
            boundary,
        })
    }

    /// Cubical grid; a periodic axis of size `n` has `n` vertices and `n` edges.
    pub fn cubical(shape: &[usize], periodic: &[bool]) -> Result<Self, SublevelError> {
        if shape.is_empty() || shape.len() != periodic.len() {
            return Err(SublevelError::InvalidComplex("shape and periodic flags must match".into()));
        }
        for (&n, &p) in shape.iter().zip(periodic) {
            if n == 0 || (p && n < 3) {
                return Err(SublevelError::InvalidComplex(format!(
                    "axis of size {n} (periodic axes need at least 3 vertices)"
                )));
            }
        }
        let k = shape.len();
        let nv: usize = shape.iter().product();
        let flat = |x: &[usize]| x.iter().zip(shape).fold(0, |acc, (&xi, &n)| acc * n + xi);
        let step = |x: &[usize], axis: usize| -> Vec<usize> {
            let mut y = x.to_vec();
            y[axis] = (y[axis] + 1) % shape[axis];
            y
        };
        // every (base point, axis set) with the axes allowed to extend from the base
        let mut raw: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let mut base = vec![0; k];
        loop {
            for mask in 0u32..(1 << k) {
                let axes: Vec<usize> = (0..k).filter(|a| mask & (1 << a) != 0).collect();
                if axes.iter().all(|&a| periodic[a] || base[a] + 1 < shape[a]) {
                    raw.push((base.clone(), axes));
                }
            }
            // odometer step; stops after wrapping the first axis
            let Some(a) = (0..k).rev().find(|&a| base[a] + 1 < shape[a]) else {
                break;
            };
            base[a] += 1;
            base[a + 1..].iter_mut().for_each(|x| *x = 0);
        }
        raw.sort_by(|x, y| x.1.len().cmp(&y.1.len()).then(flat(&x.0).cmp(&flat(&y.0))).then(x.1.cmp(&y.1)));
        let index: HashMap<(Vec<usize>, Vec<usize>), usize> =
            raw.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let mut cells = Vec::with_capacity(raw.len());
        let mut boundary = Vec::with_capacity(raw.len());
        for (b, axes) in &raw {
            let mut verts = vec![b.clone()];
            for &a in axes {
                let more: Vec<Vec<usize>> = verts.iter().map(|v| step(v, a)).collect();
                verts.extend(more);
            }
            let mut ids: Vec<usize> = verts.iter().map(|v| flat(v)).collect();
            ids.sort_unstable();
            ids.dedup();
            cells.push(Cell {
                dim: axes.len(),
                vertices: ids,
            });
            let mut faces = Vec::new();
            for (i, &a) in axes.iter().enumerate() {
                let rest: Vec<usize> = axes.iter().copied().filter(|&x| x != a).collect();
                let sign = if i % 2 == 0 { 1 } else { -1 };
                faces.push((index[&(step(b, a), rest.clone())], sign));
                faces.push((index[&(b.clone(), rest)], -sign));
            }
            boundary.push(faces);
        }
        Ok(Self {
            kind: CellKind::Cubical(GridShape {
                shape: shape.to_vec(),
                periodic: periodic.to_vec(),
            }),
            num_vertices: nv,
            cells,
            boundary,
        })
    }

    /// Freudenthal triangulation of a cubical grid on the same vertices.
    pub fn triangulate(&self) -> Result<Self, SublevelError> {
        let CellKind::Cubical(g) = &self.kind else {
            return Ok(self.clone());
        };
        let k = g.shape.len();
        let flat = |x: &[usize]| x.iter().zip(&g.shape).fold(0, |acc, (&xi, &n)| acc * n + xi);
        let mut perms: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..k {
            perms = perms
                .into_iter()
                .flat_map(|p| {
                    (0..k).filter(|a| !p.contains(a)).map(|a| {
                        let mut q = p.clone();
                        q.push(a);
                        q
                    }).collect::<Vec<_>>()
                })
                .collect();
        }
        let mut simplices = Vec::new();
        for cell in &self.cells {
            if cell.dim != k {
                continue;
            }
            // recover the base point: the cell's vertex whose +1 steps stay inside it
            let base = self.cube_base(cell, &g.shape);
            for p in &perms {
                let mut x = base.clone();
                let mut s = vec![flat(&x)];
                for &a in p {
                    x[a] = (x[a] + 1) % g.shape[a];
                    s.push(flat(&x));
                }
                simplices.push(s);
            }
        }
        Self::simplicial(Some(self.num_vertices), &simplices)
    }

    fn cube_base(&self, cell: &Cell, shape: &[usize]) -> Vec<usize> {
        let unflat = |mut i: usize| {
            let mut x = vec![0; shape.len()];
            for a in (0..shape.len()).rev() {
                x[a] = i % shape[a];
                i /= shape[a];
            }
            x
        };
        let flat = |x: &[usize]| x.iter().zip(shape).fold(0, |acc, (&xi, &n)| acc * n + xi);
        cell.vertices
            .iter()
            .map(|&v| unflat(v))
            .find(|x| {
                (0..shape.len()).all(|a| {
                    let mut y = x.clone();
                    y[a] = (y[a] + 1) % shape[a];
                    cell.vertices.binary_search(&flat(&y)).is_ok()
                })
            })
            .expect("a top cube has a base corner")
    }

    pub fn kind(&self) -> &CellKind {
        &self.kind
    }

    pub fn is_simplicial(&self) -> bool {
        self.kind == CellKind::Simplicial
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn boundary(&self, i: usize) -> &[(usize, i64)] {
        &self.boundary[i]
    }

    pub fn dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    /// Signed coboundary columns: cell `i` maps to its cofaces.
    pub fn coboundary(&self) -> Vec<Vec<(usize, i64)>> {
        let mut co = vec![Vec::new(); self.cells.len()];
        for (t, faces) in self.boundary.iter().enumerate() {
            for &(s, sign) in faces {
                co[s].push((t, sign));
            }
        }
        co
    }

    /// `d o d = 0` over the integers.
    pub fn check(&self) -> Result<(), SublevelError> {
        for (t, faces) in self.boundary.iter().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(s, a) in faces {
                for &(r, b) in &self.boundary[s] {
                    *acc.entry(r).or_insert(0) += a * b;
                }
            }
            if acc.values().any(|&v| v != 0) {
                return Err(SublevelError::InvalidComplex(format!("boundary squares to nonzero on cell {t}")));
            }
        }
        Ok(())
    }
}

/// One value per vertex. Cells whose vertices all sit at or above `ceiling`
/// are treated as lying at infinity and never enter the relative complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<f64>,
}

/// Boundary vertices of a compactified fiber and how far above the interior to put them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clamp {
    pub boundary: Vec<usize>,
    pub margin: f64,
}

#[derive(Deserialize)]
struct CsvRow {
    vertex_id: usize,
    value: f64,
}

impl SampledFunction {
    pub fn new(values: Vec<f64>) -> Result<Self, SublevelError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SublevelError::InvalidFunction(format!("vertex {i} has a non-finite value")));
        }
        Ok(Self { values, ceiling: None })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self {
            values: vec![c; n],
            ceiling: None,
        }
    }

    /// CSV with header `vertex_id,value`; every vertex exactly once.
    pub fn from_csv<R: Read>(r: R) -> Result<Self, SublevelError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let mut seen: BTreeMap<usize, f64> = BTreeMap::new();
        for row in rdr.deserialize() {
            let row: CsvRow = row?;
            if seen.insert(row.vertex_id, row.value).is_some() {
                return Err(SublevelError::InvalidFunction(format!("vertex {} listed twice", row.vertex_id)));
            }
        }
        let n = seen.len();
        if seen.keys().copied().ne(0..n) {
            return Err(SublevelError::InvalidFunction("vertex ids must be 0..n without gaps".into()));
        }
        Self::new(seen.into_values().collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["vertex_id", "value"]).expect("in-memory write");
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([i.to_string(), v.to_string()]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
    }

    /// `-S`.
    pub fn dual(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
            ceiling: None,
        }
    }

    /// Sets the clamp's boundary vertices to the interior maximum plus the
    /// margin, which also becomes the ceiling.
    pub fn clamped(&self, clamp: &Clamp) -> Result<Self, SublevelError> {
        if clamp.margin <= 0.0 {
            return Err(SublevelError::InvalidFunction("clamp margin must be positive".into()));
        }
        if clamp.boundary.iter().any(|&v| v >= self.values.len()) {
            return Err(SublevelError::InvalidFunction("clamp vertex out of range".into()));
        }
        let top = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| !clamp.boundary.contains(i))
            .map(|(_, &v)| v)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut values = self.values.clone();
        for &b in &clamp.boundary {
            values[b] = top + clamp.margin;
        }
        Ok(Self {
            values,
            ceiling: Some(top + clamp.margin),
        })
    }

    /// Max over each cell's vertices.
    pub fn lower_star(&self, k: &CellComplex) -> Vec<f64> {
        k.cells()
            .iter()
            .map(|c| c.vertices.iter().map(|&v| self.values[v]).fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `c -> C^*(E, {S > c})` as a single filtered complex with one generator per
/// cell below the ceiling.
#[derive(Debug, Clone)]
pub struct PairFiltration {
    pub complex: FilteredComplex,
    /// Cell of each generator.
    pub cells: Vec<usize>,
    /// Level at which each generator enters the relative complex.
    pub entry: Vec<f64>,
    /// Sorted distinct vertex values.
    pub breakpoints: Vec<f64>,
    pub persistence: Persistence,
}

impl PairFiltration {
    /// Generators present at level `c`.
    pub fn generators_at(&self, c: f64) -> Vec<usize> {
        (0..self.entry.len()).filter(|&i| self.entry[i] <= c + TOL).collect()
    }

    pub fn barcode(&self) -> GradedBarcode {
        self.persistence.barcode(&self.complex)
    }

    /// Essential generators ordered by (degree, level, index).
    pub fn classes(&self) -> Vec<usize> {
        let mut e = self.persistence.essential.clone();
        let g = self.complex.generators();
        e.sort_by(|&a, &b| {
            g[a].degree
                .cmp(&g[b].degree)
                .then(self.entry[a].partial_cmp(&self.entry[b]).expect("finite"))
                .then(a.cmp(&b))
        });
        e
    }
}

pub fn build_pair_filtration(
    k: &CellComplex,
    s: &SampledFunction,
    field: PrimeField,
) -> Result<PairFiltration, SublevelError> {
    if s.values.len() != k.num_vertices() {
        return Err(SublevelError::InvalidFunction(format!(
            "{} values for {} vertices",
            s.values.len(),
            k.num_vertices()
        )));
    }
    k.check()?;
    let all_entry: Vec<f64> = s.dual().lower_star(k).into_iter().map(|v| -v).collect();
    let cells: Vec<usize> = (0..all_entry.len())
        .filter(|&i| s.ceiling.is_none_or(|top| all_entry[i] < top - TOL))
        .collect();
    let mut gen_of = vec![usize::MAX; all_entry.len()];
    for (g, &c) in cells.iter().enumerate() {
        gen_of[c] = g;
    }
    let entry: Vec<f64> = cells.iter().map(|&c| all_entry[c]).collect();
    let generators = cells
        .iter()
        .zip(&entry)
        .map(|(&c, &m)| Generator {
            degree: k.cells()[c].dim as i32,
            grade: 0.0 - m,
        })
        .collect();
    let mut triplets = Vec::new();
    for (sigma, cof) in k.coboundary().into_iter().enumerate() {
        if gen_of[sigma] == usize::MAX {
            continue;
        }
        // cofaces enter no later than their faces
        for (tau, sign) in cof {
            triplets.push((gen_of[tau], gen_of[sigma], sign));
        }
    }
    let complex = FilteredComplex::new(field, generators, &triplets)?;
    let mut breakpoints = s.values.clone();
    breakpoints.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    breakpoints.dedup_by(|a, b| (*a - *b).abs() <= TOL);
    if let Some(top) = s.ceiling {
        breakpoints.retain(|&b| b < top - TOL);
    }
    let persistence = complex.persistence();
    Ok(PairFiltration {
        complex,
        cells,
        entry,
        breakpoints,
        persistence,
    })
}

/// Front-face/back-face cup product of two cochains on a simplicial complex.
pub fn cup_product(
    k: &CellComplex,
    index: &HashMap<Vec<usize>, usize>,
    x: &SparseVec,
    y: &SparseVec,
    field: PrimeField,
) -> SparseVec {
    let mut out: BTreeMap<usize, u32> = BTreeMap::new();
    let dy = match y.first() {
        Some(&(c, _)) => k.cells()[c].dim,
        None => return Vec::new(),
    };
    for &(a, va) in x {
        let ca = &k.cells()[a];
        // cells whose front face is `a`: look them up through every back face of y
        for &(b, vb) in y {
            let cb = &k.cells()[b];
            if cb.vertices[0] != *ca.vertices.last().unwrap() {
                continue;
            }
            let mut joined = ca.vertices.clone();
            joined.extend_from_slice(&cb.vertices[1..]);
            if joined.len() != ca.dim + dy + 1 {
                continue;
            }
            if let Some(&t) = index.get(&joined) {
                let e = out.entry(t).or_insert(0);
                *e = field.add(*e, field.mul(va, vb));
            }
        }
    }
    out.into_iter().filter(|&(_, v)| v != 0).collect()
}

/// Ring `H^{>=1}(E)` and its right action on `H^*(E)` in the basis of
/// [`PairFiltration::classes`], from simplicial cup products of the
/// representative cocycles.
pub fn cup_action(
    k: &CellComplex,
    pf: &PairFiltration,
) -> Result<(GradedRing, Vec<DenseMatrix>), SublevelError> {
    if !k.is_simplicial() {
        return Err(SublevelError::UnsupportedComplex);
    }
    let field = pf.complex.field();
    let classes = pf.classes();
    let n = classes.len();
    let pos: HashMap<usize, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let degree = |g: usize| pf.complex.generators()[g].degree;
    let ring_idx: Vec<usize> = (0..n).filter(|&i| degree(classes[i]) >= 1).collect();
    let to_cells = |z: SparseVec| -> SparseVec { z.into_iter().map(|(g, v)| (pf.cells[g], v)).collect() };
    let reps: Vec<SparseVec> = classes
        .iter()
        .map(|&c| to_cells(pf.persistence.representative(c)))
        .collect();
    let index: HashMap<Vec<usize>, usize> =
        k.cells().iter().enumerate().map(|(i, c)| (c.vertices.clone(), i)).collect();
    let mut gen_of: HashMap<usize, usize> = HashMap::new();
    for (g, &c) in pf.cells.iter().enumerate() {
        gen_of.insert(c, g);
    }
    let coords = |z: &SparseVec| -> Result<Vec<u32>, SublevelError> {
        // cells at infinity carry no relative cochains
        let mut zg: SparseVec = z.iter().filter_map(|&(c, v)| gen_of.get(&c).map(|&g| (g, v))).collect();
        zg.sort_by_key(|e| e.0);
        let e = pf
            .persistence
            .express(&zg)
            .ok_or_else(|| SublevelError::CupProduct("product of cocycles is not a cocycle".into()))?;
        let mut v = vec![0; n];
        for (g, c) in e {
            v[pos[&g]] = c;
        }
        Ok(v)
    };
    // products[i][k] = [rep_i cup rep_{ring k}]
    let mut products = vec![vec![Vec::new(); ring_idx.len()]; n];
    for i in 0..n {
        for (kk, &r) in ring_idx.iter().enumerate() {
            products[i][kk] = coords(&cup_product(k, &index, &reps[i], &reps[r], field))?;
        }
    }
    let mut action = vec![DenseMatrix::zeros(n, n); ring_idx.len()];
    for (kk, m) in action.iter_mut().enumerate() {
        for (i, row) in products.iter().enumerate() {
            for (r, &v) in row[kk].iter().enumerate() {
                m.set(r, i, v);
            }
        }
    }
    let ring_pos: HashMap<usize, usize> = ring_idx.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let mut triples = Vec::new();
    for (a, &i) in ring_idx.iter().enumerate() {
        for (b, _) in ring_idx.iter().enumerate() {
            for (r, &v) in products[i][b].iter().enumerate() {
                if v != 0 {
                    let c = *ring_pos.get(&r).ok_or_else(|| {
                        SublevelError::CupProduct("product landed in degree 0".into())
                    })?;
                    triples.push((a, b, c, v as i64));
                }
            }
        }
    }
    let ring = GradedRing::new(field, ring_idx.iter().map(|&i| degree(classes[i])).collect(), &triples)?;
    // graded commutativity: x y = (-1)^{|x||y|} y x
    for a in 0..ring.len() {
        for b in 0..ring.len() {
            let sign = if (ring.degrees()[a] * ring.degrees()[b]) % 2 == 0 { 1 } else { -1 };
            let ab = ring.product(a, b);
            let ba: Vec<u32> = ring.product(b, a).iter().map(|&v| field.mul(v, field.from_i64(sign))).collect();
            if ab != ba.as_slice() {
                return Err(SublevelError::CupProduct(format!("r_{a} r_{b} is not graded commutative")));
            }
        }
    }
    Ok((ring, action))
}

/// Where the `H^*(M)` action comes from.
#[derive(Debug, Clone)]
pub enum ActionSource {
    Compute,
    /// Action matrices in the basis order of [`PairFiltration::classes`].
    Supplied {
        ring: GradedRing,
        action: Vec<DenseMatrix>,
    },
}

#[derive(Debug, Clone)]
pub struct SublevelSpec {
    pub barcode: GradedBarcode,
    pub ring: GradedRing,
    pub module: FilteredGradedModule,
    pub spec: SpecSet,
    /// Degree and level of each basis class.
    pub classes: Vec<(i32, f64)>,
}

/// Barcode, image-filtration module and Spec of `c -> H^*(E, {S > c})`.
/// `fiber_dim > 0` marks `E = M x R^n` (clamped); the action must then be supplied.
pub fn spec_of_function(
    k: &CellComplex,
    s: &SampledFunction,
    action: &ActionSource,
    fiber_dim: usize,
    field: PrimeField,
) -> Result<SublevelSpec, SublevelError> {
    let tri;
    let k = match (action, k.is_simplicial()) {
        (ActionSource::Compute, false) => {
            tri = k.triangulate()?;
            &tri
        }
        _ => k,
    };
    let pf = build_pair_filtration(k, s, field)?;
    let (ring, matrices) = match action {
        ActionSource::Compute if fiber_dim > 0 => return Err(SublevelError::ActionUnavailable),
        ActionSource::Compute => cup_action(k, &pf)?,
        ActionSource::Supplied { ring, action } => (ring.clone(), action.clone()),
    };
    let classes = pf.classes();
    let degrees: Vec<i32> = classes.iter().map(|&c| pf.complex.generators()[c].degree).collect();
    let levels: Vec<f64> = classes.iter().map(|&c| pf.entry[c]).collect();
    let module = GradedModule::new(field, degrees.clone(), matrices, &ring)?;
    let module = FilteredGradedModule::new(module, levels.clone(), &ring)?;
    Ok(SublevelSpec {
        barcode: pf.barcode(),
        spec: spec(&module),
        ring,
        module,
        classes: degrees.into_iter().zip(levels).collect(),
    })
}

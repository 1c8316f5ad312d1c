//! Filtered modules over a non-unital graded ring, cup-length, spectral
//! invariants and the counting check between them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barcode::{shifted_dprime, GradedBarcode, TOL};
use crate::field::{span_basis, DenseMatrix, PrimeField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("the zero class has no spectral invariant")]
    ZeroClass,
    #[error("spectral norm needs both modules to be nonzero")]
    EmptySpec,
}

/// Homogeneous basis in degrees `>= 1` with structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedRing {
    field: PrimeField,
    degrees: Vec<i32>,
    /// `table[i][j]` = coordinates of `r_i * r_j`.
    table: Vec<Vec<Vec<u32>>>,
}

#[derive(Serialize, Deserialize)]
struct RawRing {
    #[serde(default)]
    field: PrimeField,
    degrees: Vec<i32>,
    /// `[i, j, k, c]`: `r_i * r_j` has coefficient `c` on `r_k`.
    #[serde(default)]
    products: Vec<(usize, usize, usize, i64)>,
}

impl Serialize for GradedRing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = self.len();
        let mut products = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for (k, &c) in self.table[i][j].iter().enumerate() {
                    if c != 0 {
                        products.push((i, j, k, c as i64));
                    }
                }
            }
        }
        RawRing {
            field: self.field,
            degrees: self.degrees.clone(),
            products,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GradedRing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawRing::deserialize(d)?;
        GradedRing::new(raw.field, raw.degrees, &raw.products).map_err(serde::de::Error::custom)
    }
}

impl GradedRing {
    pub fn new(
        field: PrimeField,
        degrees: Vec<i32>,
        products: &[(usize, usize, usize, i64)],
    ) -> Result<Self, SpecError> {
        let n = degrees.len();
        let mut table = vec![vec![vec![0u32; n]; n]; n];
        for &(i, j, k, c) in products {
            if i >= n || j >= n || k >= n {
                return Err(SpecError::InvalidRing(format!("product ({i}, {j}, {k}) out of range")));
            }
            table[i][j][k] = field.add(table[i][j][k], field.from_i64(c));
        }
        let ring = Self {
            field,
            degrees,
            table,
        };
        ring.validate()?;
        Ok(ring)
    }

    pub fn zero(field: PrimeField) -> Self {
        Self {
            field,
            degrees: Vec::new(),
            table: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let n = self.len();
        if let Some(i) = self.degrees.iter().position(|&d| d < 1) {
            return Err(SpecError::InvalidRing(format!("basis element {i} has degree < 1")));
        }
        for i in 0..n {
            for j in 0..n {
                for (k, &c) in self.table[i][j].iter().enumerate() {
                    if c != 0 && self.degrees[k] != self.degrees[i] + self.degrees[j] {
                        return Err(SpecError::InvalidRing(format!(
                            "r_{i} * r_{j} has a term r_{k} of the wrong degree"
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = self.mul_vec(&self.table[i][j], &self.unit_vec(k));
                    let right = self.mul_vec(&self.unit_vec(i), &self.table[j][k]);
                    if left != right {
                        return Err(SpecError::InvalidRing(format!(
                            "product is not associative on ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn unit_vec(&self, i: usize) -> Vec<u32> {
        let mut v = vec![0; self.len()];
        v[i] = 1;
        v
    }

    /// Product of two ring elements given in coordinates.
    pub fn mul_vec(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut out = vec![0; self.len()];
        for (i, &a) in x.iter().enumerate().filter(|e| *e.1 != 0) {
            for (j, &b) in y.iter().enumerate().filter(|e| *e.1 != 0) {
                let ab = f.mul(a, b);
                for (k, &c) in self.table[i][j].iter().enumerate() {
                    if c != 0 {
                        out[k] = f.add(out[k], f.mul(ab, c));
                    }
                }
            }
        }
        out
    }

    pub fn product(&self, i: usize, j: usize) -> &[u32] {
        &self.table[i][j]
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }
}

/// Finite graded module with a right action. `action[k]` has column `i`
/// equal to the coordinates of `a_i * r_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedModule {
    field: PrimeField,
    degrees: Vec<i32>,
    action: Vec<DenseMatrix>,
}

impl GradedModule {
    pub fn new(
        field: PrimeField,
        degrees: Vec<i32>,
        action: Vec<DenseMatrix>,
        ring: &GradedRing,
    ) -> Result<Self, SpecError> {
        let m = Self {
            field,
            degrees,
            action,
        };
        m.validate(ring)?;
        Ok(m)
    }

    pub fn zero(field: PrimeField, ring: &GradedRing) -> Self {
        Self {
            field,
            degrees: Vec::new(),
            action: vec![DenseMatrix::zeros(0, 0); ring.len()],
        }
    }

    /// Grading and associativity `(a r_i) r_j = a (r_i r_j)`.
    pub fn validate(&self, ring: &GradedRing) -> Result<(), SpecError> {
        let n = self.len();
        if ring.field() != self.field {
            return Err(SpecError::InvalidModule("ring and module fields differ".into()));
        }
        if self.action.len() != ring.len() {
            return Err(SpecError::InvalidModule(format!(
                "{} action matrices for a ring of rank {}",
                self.action.len(),
                ring.len()
            )));
        }
        for (k, m) in self.action.iter().enumerate() {
            if (m.rows, m.cols) != (n, n) {
                return Err(SpecError::InvalidModule(format!("action matrix {k} has the wrong shape")));
            }
            for r in 0..n {
                for c in 0..n {
                    if m.get(r, c) != 0 && self.degrees[r] != self.degrees[c] + ring.degrees()[k] {
                        return Err(SpecError::InvalidModule(format!(
                            "action of r_{k} breaks the grading at ({r}, {c})"
                        )));
                    }
                }
            }
        }
        let f = self.field;
        for i in 0..ring.len() {
            for j in 0..ring.len() {
                let lhs = self.action[j].mul(&self.action[i], f);
                let mut rhs = DenseMatrix::zeros(n, n);
                for (k, &c) in ring.product(i, j).iter().enumerate() {
                    if c != 0 {
                        let mut term = self.action[k].clone();
                        for r in 0..n {
                            for col in 0..n {
                                term.set(r, col, f.mul(c, term.get(r, col)));
                            }
                        }
                        rhs = rhs.add(&term, f);
                    }
                }
                if lhs != rhs {
                    return Err(SpecError::InvalidModule(format!(
                        "action is not associative for (r_{i}, r_{j})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn action(&self) -> &[DenseMatrix] {
        &self.action
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Submodule on a subset of basis vectors that is closed under the action.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let action = self
            .action
            .iter()
            .map(|m| {
                let mut out = DenseMatrix::zeros(keep.len(), keep.len());
                for (r, &kr) in keep.iter().enumerate() {
                    for (c, &kc) in keep.iter().enumerate() {
                        out.set(r, c, m.get(kr, kc));
                    }
                }
                out
            })
            .collect();
        Self {
            field: self.field,
            degrees: keep.iter().map(|&i| self.degrees[i]).collect(),
            action,
        }
    }

    /// Same module in a new basis: column `j` of `basis` is the new vector `j`.
    /// Each new vector must be homogeneous.
    pub fn change_basis(&self, basis: &DenseMatrix) -> Option<Self> {
        let f = self.field;
        let n = self.len();
        if (basis.rows, basis.cols) != (n, n) || basis.rank(f) != n {
            return None;
        }
        let mut degrees = Vec::with_capacity(n);
        for j in 0..n {
            let ds: Vec<i32> = (0..n).filter(|&i| basis.get(i, j) != 0).map(|i| self.degrees[i]).collect();
            if ds.windows(2).any(|w| w[0] != w[1]) {
                return None;
            }
            degrees.push(ds[0]);
        }
        let inv = invert(basis, f)?;
        let action = self.action.iter().map(|m| inv.mul(&m.mul(basis, f), f)).collect();
        Some(Self {
            field: f,
            degrees,
            action,
        })
    }
}

fn invert(m: &DenseMatrix, f: PrimeField) -> Option<DenseMatrix> {
    let n = m.rows;
    let mut out = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0; n];
        e[j] = 1;
        let x = m.solve(&e, f)?;
        for (i, v) in x.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Some(out)
}

/// Largest `k` with some `a_0 r_1 ... r_k != 0`; `-1` for the zero module.
pub fn cup_length(module: &GradedModule) -> i64 {
    let f = module.field;
    let n = module.len();
    let mut current: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        })
        .collect();
    let mut k = -1;
    // the ring sits in degrees >= 1, so chains end after the degree range is exhausted
    for _ in 0..=n {
        if current.is_empty() {
            return k;
        }
        k += 1;
        let next: Vec<Vec<u32>> = current
            .iter()
            .flat_map(|v| module.action.iter().map(move |m| m.mul_vec(v, f)))
            .collect();
        current = span_basis(&next, n, f);
    }
    k
}

/// Vector-space linear map between modules, checked for compatibility with the action.
fn is_module_map(a: &GradedModule, b: &GradedModule, m: &DenseMatrix) -> bool {
    let f = a.field;
    if (m.rows, m.cols) != (b.len(), a.len()) {
        return false;
    }
    for r in 0..m.rows {
        for c in 0..m.cols {
            if m.get(r, c) != 0 && b.degrees[r] != a.degrees[c] {
                return false;
            }
        }
    }
    a.action
        .iter()
        .zip(&b.action)
        .all(|(ra, rb)| m.mul(ra, f) == rb.mul(m, f))
}

/// `0 -> A --i--> B --p--> C -> 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortExactSequence {
    pub a: GradedModule,
    pub b: GradedModule,
    pub c: GradedModule,
    pub inclusion: DenseMatrix,
    pub projection: DenseMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubadditivityReport {
    pub cl_a: i64,
    pub cl_b: i64,
    pub cl_c: i64,
    pub holds: bool,
}

impl ShortExactSequence {
    pub fn check_exact(&self) -> Result<(), SpecError> {
        let f = self.a.field;
        if !is_module_map(&self.a, &self.b, &self.inclusion) {
            return Err(SpecError::NotExact("inclusion is not a module map".into()));
        }
        if !is_module_map(&self.b, &self.c, &self.projection) {
            return Err(SpecError::NotExact("projection is not a module map".into()));
        }
        if self.inclusion.rank(f) != self.a.len() {
            return Err(SpecError::NotExact("inclusion is not injective".into()));
        }
        if self.projection.rank(f) != self.c.len() {
            return Err(SpecError::NotExact("projection is not surjective".into()));
        }
        if !self.projection.mul(&self.inclusion, f).is_zero()
            || self.a.len() + self.c.len() != self.b.len()
        {
            return Err(SpecError::NotExact("image of A differs from kernel of p".into()));
        }
        Ok(())
    }

    /// Builds `0 -> A -> B -> B/A -> 0` from a list of vectors generating `A`.
    pub fn from_generators(b: &GradedModule, gens: &[Vec<u32>]) -> Result<Self, SpecError> {
        let f = b.field;
        let n = b.len();
        // homogeneous components, then closure under the action
        let mut pieces: Vec<Vec<u32>> = Vec::new();
        for g in gens {
            if g.len() != n {
                return Err(SpecError::InvalidModule("generator has the wrong length".into()));
            }
            let mut degs: Vec<i32> = (0..n).filter(|&i| g[i] != 0).map(|i| b.degrees[i]).collect();
            degs.sort_unstable();
            degs.dedup();
            for d in degs {
                pieces.push((0..n).map(|i| if b.degrees[i] == d { g[i] } else { 0 }).collect());
            }
        }
        let mut basis = span_basis(&pieces, n, f);
        loop {
            let mut more = basis.clone();
            for v in &basis {
                for m in &b.action {
                    more.push(m.mul_vec(v, f));
                }
            }
            let grown = span_basis(&more, n, f);
            if grown.len() == basis.len() {
                break;
            }
            basis = grown;
        }
        // echelon rows are homogeneous because the pieces and the action are
        let degree_of = |v: &Vec<u32>| b.degrees[v.iter().position(|&x| x != 0).unwrap()];
        let k = basis.len();
        let mut inclusion = DenseMatrix::zeros(n, k);
        for (j, v) in basis.iter().enumerate() {
            for (i, &x) in v.iter().enumerate() {
                inclusion.set(i, j, x);
            }
        }
        // complement: standard vectors outside the pivot columns
        let pivots: Vec<usize> = basis
            .iter()
            .map(|v| v.iter().position(|&x| x != 0).unwrap())
            .collect();
        let comp: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();
        // coordinates of any vector in the basis [submodule | complement]
        let mut full = DenseMatrix::zeros(n, n);
        for j in 0..k {
            for i in 0..n {
                full.set(i, j, inclusion.get(i, j));
            }
        }
        for (j, &c) in comp.iter().enumerate() {
            full.set(c, k + j, 1);
        }
        let inv = invert(&full, f).expect("basis and complement span");
        let a_action = b
            .action
            .iter()
            .map(|m| {
                let img = inv.mul(&m.mul(&inclusion, f), f);
                let mut out = DenseMatrix::zeros(k, k);
                for r in 0..k {
                    for c in 0..k {
                        out.set(r, c, img.get(r, c));
                    }
                }
                out
            })
            .collect();
        let mut projection = DenseMatrix::zeros(comp.len(), n);
        for r in 0..comp.len() {
            for c in 0..n {
                projection.set(r, c, inv.get(k + r, c));
            }
        }
        let mut comp_mat = DenseMatrix::zeros(n, comp.len());
        for (j, &c) in comp.iter().enumerate() {
            comp_mat.set(c, j, 1);
        }
        let c_action = b
            .action
            .iter()
            .map(|m| projection.mul(&m.mul(&comp_mat, f), f))
            .collect();
        let a = GradedModule {
            field: f,
            degrees: basis.iter().map(degree_of).collect(),
            action: a_action,
        };
        let c = GradedModule {
            field: f,
            degrees: comp.iter().map(|&i| b.degrees[i]).collect(),
            action: c_action,
        };
        let ses = Self {
            a,
            b: b.clone(),
            c,
            inclusion,
            projection,
        };
        ses.check_exact()?;
        Ok(ses)
    }
}

/// Checks `cl(B) <= cl(A) + cl(C) + 1`.
pub fn subadditivity_check(seq: &ShortExactSequence) -> Result<SubadditivityReport, SpecError> {
    seq.check_exact()?;
    let (cl_a, cl_b, cl_c) = (cup_length(&seq.a), cup_length(&seq.b), cup_length(&seq.c));
    Ok(SubadditivityReport {
        cl_a,
        cl_b,
        cl_c,
        holds: cl_b <= cl_a + cl_c + 1,
    })
}

/// `Q_inf` with a level per basis vector; `Q_{inf,d}` is the span of the
/// vectors with level `<= d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredGradedModule {
    pub module: GradedModule,
    pub levels: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawBasis {
    degree: i32,
    level: f64,
}

#[derive(Serialize, Deserialize)]
struct RawFilteredModule {
    #[serde(default)]
    field: PrimeField,
    basis: Vec<RawBasis>,
    /// Number of ring basis elements acting.
    ring_rank: usize,
    /// `[k, row, col, c]`: `a_col * r_k` has coefficient `c` on `a_row`.
    #[serde(default)]
    action: Vec<(usize, usize, usize, i64)>,
}

impl Serialize for FilteredGradedModule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m = &self.module;
        let mut action = Vec::new();
        for (k, mat) in m.action.iter().enumerate() {
            for c in 0..mat.cols {
                for r in 0..mat.rows {
                    let v = mat.get(r, c);
                    if v != 0 {
                        action.push((k, r, c, v as i64));
                    }
                }
            }
        }
        RawFilteredModule {
            field: m.field,
            basis: m
                .degrees
                .iter()
                .zip(&self.levels)
                .map(|(&degree, &level)| RawBasis { degree, level })
                .collect(),
            ring_rank: m.action.len(),
            action,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FilteredGradedModule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawFilteredModule::deserialize(d)?;
        let n = raw.basis.len();
        let f = raw.field;
        let mut action = vec![DenseMatrix::zeros(n, n); raw.ring_rank];
        for (k, r, c, v) in raw.action {
            if k >= raw.ring_rank || r >= n || c >= n {
                return Err(serde::de::Error::custom(format!("action entry ({k}, {r}, {c}) out of range")));
            }
            let x = f.add(action[k].get(r, c), f.from_i64(v));
            action[k].set(r, c, x);
        }
        let out = FilteredGradedModule {
            module: GradedModule {
                field: f,
                degrees: raw.basis.iter().map(|b| b.degree).collect(),
                action,
            },
            levels: raw.basis.iter().map(|b| b.level).collect(),
        };
        out.check_flag().map_err(serde::de::Error::custom)?;
        Ok(out)
    }
}

/// Distinct jump levels of a flag, with the number of basis vectors at each.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpecSet {
    pub values: Vec<f64>,
    pub multiplicity: Vec<usize>,
}

impl SpecSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    /// `c -> -c`, for the opposite sign convention.
    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().rev().map(|v| -v).collect(),
            multiplicity: self.multiplicity.iter().rev().copied().collect(),
        }
    }
}

impl FilteredGradedModule {
    pub fn new(
        module: GradedModule,
        levels: Vec<f64>,
        ring: &GradedRing,
    ) -> Result<Self, SpecError> {
        module.validate(ring)?;
        let out = Self { module, levels };
        out.check_flag()?;
        Ok(out)
    }

    /// Levels finite and every `Q_{inf,d}` stable under the action.
    fn check_flag(&self) -> Result<(), SpecError> {
        let n = self.module.len();
        if self.levels.len() != n {
            return Err(SpecError::InvalidModule("one level per basis vector is required".into()));
        }
        if self.levels.iter().any(|l| !l.is_finite()) {
            return Err(SpecError::InvalidModule("levels must be finite".into()));
        }
        for (k, m) in self.module.action.iter().enumerate() {
            for r in 0..n {
                for c in 0..n {
                    if m.get(r, c) != 0 && self.levels[r] > self.levels[c] + TOL {
                        return Err(SpecError::InvalidModule(format!(
                            "action of r_{k} moves level {} up to {}",
                            self.levels[c], self.levels[r]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.module.len()
    }

    pub fn is_empty(&self) -> bool {
        self.module.is_empty()
    }

    /// Adds `c` to every level.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            module: self.module.clone(),
            levels: self.levels.iter().map(|l| l + c).collect(),
        }
    }

    pub fn dims_by_degree(&self) -> std::collections::BTreeMap<i32, usize> {
        let mut out = std::collections::BTreeMap::new();
        for &d in &self.module.degrees {
            *out.entry(d).or_insert(0) += 1;
        }
        out
    }

    /// `dim Q_{inf,d}`.
    pub fn flag_dim(&self, d: f64) -> usize {
        self.levels.iter().filter(|&&l| l <= d + TOL).count()
    }
}

/// `c(alpha; F) = inf { d : alpha in Q_{inf,d} }`.
pub fn spectral_invariant(f: &FilteredGradedModule, alpha: &[u32]) -> Result<f64, SpecError> {
    if alpha.len() != f.len() {
        return Err(SpecError::InvalidModule("class has the wrong length".into()));
    }
    alpha
        .iter()
        .zip(&f.levels)
        .filter(|(&a, _)| a % f.module.field.characteristic() != 0)
        .map(|(_, &l)| l)
        .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.max(l))))
        .ok_or(SpecError::ZeroClass)
}

pub fn spec(f: &FilteredGradedModule) -> SpecSet {
    let mut levels = f.levels.clone();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite levels"));
    let mut out = SpecSet::default();
    for l in levels {
        match out.values.last() {
            Some(&v) if (l - v).abs() <= TOL => *out.multiplicity.last_mut().unwrap() += 1,
            _ => {
                out.values.push(l);
                out.multiplicity.push(1);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub level: f64,
    pub dim: usize,
    pub cup_length: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsReport {
    pub spec: Vec<f64>,
    pub n: usize,
    pub cup_length: i64,
    pub quotients: Vec<QuotientReport>,
    /// `N - 1 + sum cl(quotient_i)`.
    pub bound: i64,
    pub holds: bool,
    /// A level whose quotient has cup-length `>= 1`, reported when `N <= cl`.
    pub degenerate_level: Option<f64>,
    pub flag_subadditivity: Vec<SubadditivityReport>,
}

pub fn ls_check(f: &FilteredGradedModule, ring: &GradedRing) -> Result<LsReport, SpecError> {
    f.module.validate(ring)?;
    f.check_flag()?;
    let s = spec(f);
    let n = s.len();
    let cl = cup_length(&f.module);
    let at = |d: f64| -> Vec<usize> {
        (0..f.len()).filter(|&i| (f.levels[i] - d).abs() <= TOL).collect()
    };
    let below = |d: f64| -> Vec<usize> { (0..f.len()).filter(|&i| f.levels[i] <= d + TOL).collect() };
    let mut quotients = Vec::with_capacity(n);
    let mut flag_subadditivity = Vec::with_capacity(n);
    for (i, &d) in s.values.iter().enumerate() {
        let q = f.module.restrict(&at(d));
        quotients.push(QuotientReport {
            level: d,
            dim: q.len(),
            cup_length: cup_length(&q),
        });
        if i > 0 {
            // 0 -> Q_{d_{i-1}} -> Q_{d_i} -> quotient -> 0
            let keep = below(d);
            let big = f.module.restrict(&keep);
            let prev = s.values[i - 1];
            let gens: Vec<Vec<u32>> = keep
                .iter()
                .enumerate()
                .filter(|(_, &g)| f.levels[g] <= prev + TOL)
                .map(|(j, _)| {
                    let mut v = vec![0; big.len()];
                    v[j] = 1;
                    v
                })
                .collect();
            let ses = ShortExactSequence::from_generators(&big, &gens)?;
            flag_subadditivity.push(subadditivity_check(&ses)?);
        }
    }
    let bound = n as i64 - 1 + quotients.iter().map(|q| q.cup_length).sum::<i64>();
    let degenerate_level = if (n as i64) <= cl {
        quotients.iter().find(|q| q.cup_length >= 1).map(|q| q.level)
    } else {
        None
    };
    Ok(LsReport {
        spec: s.values,
        n,
        cup_length: cl,
        quotients,
        bound,
        holds: cl <= bound,
        degenerate_level,
        flag_subadditivity,
    })
}

/// `gamma = max Spec(fwd) + max Spec(bwd)`.
pub fn spectral_norm(fwd: &FilteredGradedModule, bwd: &FilteredGradedModule) -> Result<f64, SpecError> {
    match (spec(fwd).max(), spec(bwd).max()) {
        (Some(a), Some(b)) => Ok(a + b),
        _ => Err(SpecError::EmptySpec),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub gamma: f64,
    pub shifted_dprime: f64,
    pub difference: f64,
    pub holds: bool,
}

/// Compares `gamma` with `shifted_dprime` between `barcode` and the unit
/// object carrying the Betti numbers of `Q_inf`.
pub fn gamma_duality_check(
    barcode: &GradedBarcode,
    fwd: &FilteredGradedModule,
    bwd: &FilteredGradedModule,
    tol: f64,
) -> Result<DualityReport, SpecError> {
    let gamma = spectral_norm(fwd, bwd)?;
    let unit = GradedBarcode::unit_with_betti(&fwd.dims_by_degree());
    let d = shifted_dprime(&unit, barcode);
    let difference = (gamma - d).abs();
    Ok(DualityReport {
        gamma,
        shifted_dprime: d,
        difference,
        holds: difference <= tol,
    })
}

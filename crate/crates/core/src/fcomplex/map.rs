//! Chain maps `F -> T_a G`, cones, homotopies and interleaving certificates.

use serde::{Deserialize, Serialize};

use super::{FcError, FilteredComplex, Generator, SparseVec};
use crate::barcode::{epsilon_interleaved, GradedBarcode, TOL};
use crate::field::{DenseMatrix, PrimeField};

/// A degree-preserving map `source -> T_shift target`. The matrix has one row
/// per target generator and one column per source generator.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMap {
    source: FilteredComplex,
    target: FilteredComplex,
    shift: f64,
    matrix: DenseMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawMap {
    source: FilteredComplex,
    target: FilteredComplex,
    shift: f64,
    #[serde(default)]
    entries: Vec<(usize, usize, i64)>,
}

impl Serialize for ChainMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawMap {
            source: self.source.clone(),
            target: self.target.clone(),
            shift: self.shift,
            entries: triplets(&self.matrix),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChainMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawMap::deserialize(d)?;
        ChainMap::new(raw.source, raw.target, raw.shift, &raw.entries)
            .map_err(serde::de::Error::custom)
    }
}

fn triplets(m: &DenseMatrix) -> Vec<(usize, usize, i64)> {
    let mut out = Vec::new();
    for r in 0..m.rows {
        for c in 0..m.cols {
            let v = m.get(r, c);
            if v != 0 {
                out.push((r, c, v as i64));
            }
        }
    }
    out.sort_by_key(|&(r, c, _)| (c, r));
    out
}

/// `h` with `D h + h D = f - g`; rows are target generators, columns source generators.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainHomotopy {
    pub matrix: DenseMatrix,
}

impl Serialize for ChainHomotopy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.matrix.rows, self.matrix.cols, triplets(&self.matrix)).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChainHomotopy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (rows, cols, entries): (usize, usize, Vec<(usize, usize, i64)>) =
            Deserialize::deserialize(d)?;
        let mut matrix = DenseMatrix::zeros(rows, cols);
        for (r, c, v) in entries {
            if r >= rows || c >= cols || v < 0 {
                return Err(serde::de::Error::custom("homotopy entry out of range"));
            }
            matrix.set(r, c, v as u32);
        }
        Ok(Self { matrix })
    }
}

impl ChainMap {
    pub fn new(
        source: FilteredComplex,
        target: FilteredComplex,
        shift: f64,
        entries: &[(usize, usize, i64)],
    ) -> Result<Self, FcError> {
        let field = source.field();
        let mut matrix = DenseMatrix::zeros(target.len(), source.len());
        for &(r, c, v) in entries {
            if r >= target.len() || c >= source.len() {
                return Err(FcError::IncompatibleMap(format!("entry ({r}, {c}) out of range")));
            }
            let v = field.add(matrix.get(r, c), field.from_i64(v));
            matrix.set(r, c, v);
        }
        Self::from_matrix(source, target, shift, matrix)
    }

    pub fn from_matrix(
        source: FilteredComplex,
        target: FilteredComplex,
        shift: f64,
        matrix: DenseMatrix,
    ) -> Result<Self, FcError> {
        let f = Self {
            source,
            target,
            shift,
            matrix,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), FcError> {
        let field = self.field();
        if self.target.field() != field {
            return Err(FcError::IncompatibleMap("source and target fields differ".into()));
        }
        if !(self.shift.is_finite() && self.shift >= -TOL) {
            return Err(FcError::IncompatibleMap(format!("shift {} must be >= 0", self.shift)));
        }
        if (self.matrix.rows, self.matrix.cols) != (self.target.len(), self.source.len()) {
            return Err(FcError::IncompatibleMap("matrix has the wrong shape".into()));
        }
        let (sg, tg) = (self.source.generators(), self.target.generators());
        for r in 0..self.matrix.rows {
            for c in 0..self.matrix.cols {
                if self.matrix.get(r, c) == 0 {
                    continue;
                }
                if sg[c].degree != tg[r].degree {
                    return Err(FcError::IncompatibleMap(format!(
                        "entry ({r}, {c}) changes degree"
                    )));
                }
                if sg[c].grade > tg[r].grade + self.shift + TOL {
                    return Err(FcError::IncompatibleMap(format!(
                        "entry ({r}, {c}) needs grade {} <= {} + {}",
                        sg[c].grade, tg[r].grade, self.shift
                    )));
                }
            }
        }
        let lhs = self.matrix.mul(&self.source.dense_boundary(), field);
        let rhs = self.target.dense_boundary().mul(&self.matrix, field);
        if lhs != rhs {
            return Err(FcError::IncompatibleMap("map does not commute with D".into()));
        }
        Ok(())
    }

    pub fn identity(c: &FilteredComplex) -> Self {
        Self::tau(c, 0.0)
    }

    /// The canonical map `tau_{0,c}: C -> T_c C`.
    pub fn tau(cx: &FilteredComplex, c: f64) -> Self {
        Self {
            source: cx.clone(),
            target: cx.clone(),
            shift: c,
            matrix: DenseMatrix::identity(cx.len()),
        }
    }

    pub fn zero(source: &FilteredComplex, target: &FilteredComplex, shift: f64) -> Self {
        Self {
            source: source.clone(),
            target: target.clone(),
            shift,
            matrix: DenseMatrix::zeros(target.len(), source.len()),
        }
    }

    pub fn source(&self) -> &FilteredComplex {
        &self.source
    }

    pub fn target(&self) -> &FilteredComplex {
        &self.target
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn field(&self) -> PrimeField {
        self.source.field()
    }

    /// `T_a next o self: source -> T_{a+b} next.target`.
    pub fn then(&self, next: &ChainMap) -> Result<ChainMap, FcError> {
        if next.source != self.target {
            return Err(FcError::IncompatibleMap("composition of non-adjacent maps".into()));
        }
        Ok(ChainMap {
            source: self.source.clone(),
            target: next.target.clone(),
            shift: self.shift + next.shift,
            matrix: next.matrix.mul(&self.matrix, self.field()),
        })
    }

    /// The same matrix read as a map `T_{-c} source -> T_{shift - c} target`.
    pub fn with_source_shifted(&self, c: f64) -> Result<ChainMap, FcError> {
        ChainMap::from_matrix(
            self.source.shift(-c),
            self.target.clone(),
            self.shift - c,
            self.matrix.clone(),
        )
    }

    fn same_type(&self, other: &ChainMap) -> bool {
        self.source == other.source
            && self.target == other.target
            && (self.shift - other.shift).abs() <= TOL
    }
}

/// Mapping cone of `f: F -> T_a G`. Target generators keep their degree and
/// sit at grade `grade + a`; source generators move to degree `n - 1` and keep
/// their grade. The differential is `(x, y) -> (-D x, f x + D y)`.
pub fn cone(f: &ChainMap) -> Result<FilteredComplex, FcError> {
    f.validate()?;
    let field = f.field();
    let (s, t) = (f.source(), f.target());
    let off = t.len();
    let mut generators: Vec<Generator> = t
        .generators()
        .iter()
        .map(|g| Generator {
            degree: g.degree,
            grade: g.grade + f.shift(),
        })
        .collect();
    generators.extend(s.generators().iter().map(|g| Generator {
        degree: g.degree - 1,
        grade: g.grade,
    }));
    let mut columns: Vec<SparseVec> = (0..t.len()).map(|j| t.column(j).clone()).collect();
    for j in 0..s.len() {
        let mut col: SparseVec = (0..off)
            .filter_map(|r| {
                let v = f.matrix().get(r, j);
                (v != 0).then_some((r, v))
            })
            .collect();
        col.extend(s.column(j).iter().map(|&(i, v)| (i + off, field.neg(v))));
        columns.push(col);
    }
    let c = FilteredComplex::from_columns_unchecked(field, generators, columns);
    debug_assert!(c.validate().is_ok());
    Ok(c)
}

/// Solves `D_G h + h D_F = f - g` over grade-monotone `h` of degree `-1`.
pub fn is_homotopic(f: &ChainMap, g: &ChainMap) -> Option<ChainHomotopy> {
    if !f.same_type(g) {
        return None;
    }
    let field = f.field();
    let (src, tgt) = (f.source(), f.target());
    let (sg, tg) = (src.generators(), tgt.generators());
    let diff = f.matrix().sub(g.matrix(), field);
    if diff.is_zero() {
        return Some(ChainHomotopy {
            matrix: DenseMatrix::zeros(tgt.len(), src.len()),
        });
    }
    let unknowns: Vec<(usize, usize)> = (0..tgt.len())
        .flat_map(|t| (0..src.len()).map(move |s| (t, s)))
        .filter(|&(t, s)| {
            tg[t].degree == sg[s].degree - 1 && sg[s].grade <= tg[t].grade + f.shift() + TOL
        })
        .collect();
    let equations: Vec<(usize, usize)> = (0..tgt.len())
        .flat_map(|t| (0..src.len()).map(move |s| (t, s)))
        .filter(|&(t, s)| tg[t].degree == sg[s].degree)
        .collect();
    let dt = tgt.dense_boundary();
    let ds = src.dense_boundary();
    let mut a = DenseMatrix::zeros(equations.len(), unknowns.len());
    for (row, &(t2, s2)) in equations.iter().enumerate() {
        for (col, &(t, s)) in unknowns.iter().enumerate() {
            // (D_G h)[t2, s2] picks h[t, s2]; (h D_F)[t2, s2] picks h[t2, s]
            let mut v = 0;
            if s == s2 {
                v = field.add(v, dt.get(t2, t));
            }
            if t == t2 {
                v = field.add(v, ds.get(s, s2));
            }
            if v != 0 {
                a.set(row, col, v);
            }
        }
    }
    let rhs: Vec<u32> = equations.iter().map(|&(t, s)| diff.get(t, s)).collect();
    let x = a.solve(&rhs, field)?;
    let mut h = DenseMatrix::zeros(tgt.len(), src.len());
    for (&(t, s), &v) in unknowns.iter().zip(&x) {
        h.set(t, s, v);
    }
    Some(ChainHomotopy { matrix: h })
}

impl ChainHomotopy {
    /// Checks `D_G h + h D_F = f - g` and grade monotonicity.
    pub fn verifies(&self, f: &ChainMap, g: &ChainMap) -> bool {
        if !f.same_type(g) {
            return false;
        }
        let field = f.field();
        let (src, tgt) = (f.source(), f.target());
        if (self.matrix.rows, self.matrix.cols) != (tgt.len(), src.len()) {
            return false;
        }
        let (sg, tg) = (src.generators(), tgt.generators());
        for t in 0..tgt.len() {
            for s in 0..src.len() {
                if self.matrix.get(t, s) != 0
                    && (tg[t].degree != sg[s].degree - 1
                        || sg[s].grade > tg[t].grade + f.shift() + TOL)
                {
                    return false;
                }
            }
        }
        let dh = tgt.dense_boundary().mul(&self.matrix, field);
        let hd = self.matrix.mul(&src.dense_boundary(), field);
        dh.add(&hd, field) == f.matrix().sub(g.matrix(), field)
    }
}

/// `alpha: F -> T_a G`, `beta: G -> T_b F` with homotopies
/// `T_a beta o alpha ~ tau_{0,a+b}(F)` and `T_b alpha o beta ~ tau_{0,a+b}(G)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterleavingCertificate {
    pub alpha: ChainMap,
    pub beta: ChainMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_homotopy: Option<ChainHomotopy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_homotopy: Option<ChainHomotopy>,
}

impl InterleavingCertificate {
    pub fn a(&self) -> f64 {
        self.alpha.shift()
    }

    pub fn b(&self) -> f64 {
        self.beta.shift()
    }

    /// Builds the certificate and searches for both homotopies.
    pub fn certify(alpha: ChainMap, beta: ChainMap) -> Result<Self, FcError> {
        let mut cert = Self {
            alpha,
            beta,
            left_homotopy: None,
            right_homotopy: None,
        };
        let (l, r) = composite_checks(&cert)?;
        cert.left_homotopy = Some(l.ok_or_else(|| {
            FcError::CertificateInvalid("T_a beta o alpha is not homotopic to tau(F)".into())
        })?);
        cert.right_homotopy = Some(r.ok_or_else(|| {
            FcError::CertificateInvalid("T_b alpha o beta is not homotopic to tau(G)".into())
        })?);
        Ok(cert)
    }
}

type CompositeWitnesses = (Option<ChainHomotopy>, Option<ChainHomotopy>);

fn composite_checks(cert: &InterleavingCertificate) -> Result<CompositeWitnesses, FcError> {
    let (alpha, beta) = (&cert.alpha, &cert.beta);
    if alpha.source() != beta.target() || alpha.target() != beta.source() {
        return Err(FcError::CertificateInvalid("alpha and beta are not opposite".into()));
    }
    let total = alpha.shift() + beta.shift();
    let left = alpha.then(beta)?;
    let right = beta.then(alpha)?;
    let tau_f = ChainMap::tau(alpha.source(), total);
    let tau_g = ChainMap::tau(alpha.target(), total);
    let check = |given: &Option<ChainHomotopy>, comp: &ChainMap, tau: &ChainMap| match given {
        Some(h) if h.verifies(comp, tau) => Some(h.clone()),
        Some(_) => None,
        None => is_homotopic(comp, tau),
    };
    Ok((
        check(&cert.left_homotopy, &left, &tau_f),
        check(&cert.right_homotopy, &right, &tau_g),
    ))
}

/// True iff both composites are homotopic to the canonical maps.
pub fn verify_certificate(cert: &InterleavingCertificate) -> bool {
    if cert.alpha.validate().is_err() || cert.beta.validate().is_err() {
        return false;
    }
    matches!(composite_checks(cert), Ok((Some(_), Some(_))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeTorsionReport {
    pub a: f64,
    pub b: f64,
    pub torsion: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Torsion of `Cone(alpha)` against `2(a + b)`.
pub fn cone_torsion_bound_check(
    cert: &InterleavingCertificate,
) -> Result<ConeTorsionReport, FcError> {
    if !verify_certificate(cert) {
        return Err(FcError::CertificateInvalid("composites are not canonical".into()));
    }
    let torsion = cone(&cert.alpha)?.reduce().torsion_threshold();
    let bound = 2.0 * (cert.a() + cert.b());
    Ok(ConeTorsionReport {
        a: cert.a(),
        b: cert.b(),
        torsion,
        bound,
        holds: torsion <= bound + TOL,
    })
}

/// For a symmetric certificate read in the thickening sense, where
/// `alpha: K_a F -> G` with `K_a = T_{-a}`, the cone of `alpha` against `6a`.
pub fn kernel_isomorphism_cone_check(
    cert: &InterleavingCertificate,
) -> Result<ConeTorsionReport, FcError> {
    let a = cert.a();
    if (a - cert.b()).abs() > TOL {
        return Err(FcError::CertificateInvalid(format!(
            "kernel isomorphisms are symmetric, got ({a}, {})",
            cert.b()
        )));
    }
    if !verify_certificate(cert) {
        return Err(FcError::CertificateInvalid("composites are not canonical".into()));
    }
    let thick = cert.alpha.with_source_shifted(a)?;
    let torsion = cone(&thick)?.reduce().torsion_threshold();
    let bound = 6.0 * a;
    Ok(ConeTorsionReport {
        a,
        b: a,
        torsion,
        bound,
        holds: torsion <= bound + TOL,
    })
}

/// Explicit `(a, b)`-isomorphism between the standard presentations of two
/// barcodes, built from an optimal matching of `b1` against `T_c b2` with
/// `c = (a - b)/2` at level `(a + b)/2`.
pub fn certificate_from_matching(
    b1: &GradedBarcode,
    b2: &GradedBarcode,
    a: f64,
    b: f64,
    field: PrimeField,
) -> Result<InterleavingCertificate, FcError> {
    if a < -TOL || b < -TOL {
        return Err(FcError::CertificateInvalid("negative shifts".into()));
    }
    let eps = (a + b) / 2.0;
    let c = (a - b) / 2.0;
    let m = epsilon_interleaved(b1, &b2.shift(c), eps).ok_or_else(|| {
        FcError::CertificateInvalid(format!("no ({a}, {b})-isomorphism exists"))
    })?;
    let (f, fi) = FilteredComplex::from_barcode(b1, field);
    let (g, gi) = FilteredComplex::from_barcode(b2, field);
    let find = |idx: &[super::BarGenerators], degree: i32, k: usize| {
        *idx.iter()
            .find(|x| x.degree == degree && x.index == k)
            .expect("matching refers to existing bars")
    };
    let mut am = DenseMatrix::zeros(g.len(), f.len());
    let mut bm = DenseMatrix::zeros(f.len(), g.len());
    for p in &m.pairs {
        let x = find(&fi, p.degree, p.left);
        let y = find(&gi, p.degree, p.right);
        am.set(y.head, x.head, 1);
        bm.set(x.head, y.head, 1);
        if let (Some(xt), Some(yt)) = (x.tail, y.tail) {
            am.set(yt, xt, 1);
            bm.set(xt, yt, 1);
        }
    }
    let alpha = ChainMap::from_matrix(f.clone(), g.clone(), a, am)?;
    let beta = ChainMap::from_matrix(g, f, b, bm)?;
    InterleavingCertificate::certify(alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barcode::Bar;

    fn present(b: &GradedBarcode) -> FilteredComplex {
        FilteredComplex::from_barcode(b, PrimeField::F2).0
    }

    fn ray(at: f64) -> FilteredComplex {
        present(&GradedBarcode::from_bars([(0, Bar::ray(at))]))
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = present(&GradedBarcode::from_bars([
            (0, Bar::finite(0.0, 2.0)),
            (1, Bar::ray(1.0)),
        ]));
        assert!(cone(&ChainMap::identity(&c)).unwrap().reduce().is_empty());
    }

    #[test]
    fn cone_of_zero_splits() {
        let b1 = GradedBarcode::from_bars([(0, Bar::finite(0.0, 2.0)), (1, Bar::ray(1.0))]);
        let b2 = GradedBarcode::from_bars([(0, Bar::ray(-1.0))]);
        let z = ChainMap::zero(&present(&b1), &present(&b2), 0.0);
        let expect = b2.direct_sum(&b1.degree_shift(1));
        assert_eq!(cone(&z).unwrap().reduce(), expect);
    }

    #[test]
    fn cone_of_canonical_ray_map() {
        let a = 0.75;
        let f = ChainMap::new(ray(0.0), ray(2.0 * a), 0.0, &[(0, 0, 1)]).unwrap();
        let b = cone(&f).unwrap().reduce();
        assert_eq!(b, GradedBarcode::from_bars([(-1, Bar::finite(0.0, 2.0 * a))]));
    }

    #[test]
    fn rejects_backwards_ray_map() {
        assert!(ChainMap::new(ray(1.0), ray(0.0), 0.0, &[(0, 0, 1)]).is_err());
        assert!(ChainMap::new(ray(1.0), ray(0.0), 1.0, &[(0, 0, 1)]).is_ok());
    }

    #[test]
    fn homotopy_examples() {
        let c = present(&GradedBarcode::from_bars([(0, Bar::finite(0.0, 1.0))]));
        let tau = ChainMap::tau(&c, 1.0);
        let zero = ChainMap::zero(&c, &c, 1.0);
        let h = is_homotopic(&zero, &tau).unwrap();
        assert!(h.verifies(&zero, &tau));
        // not torsion enough
        let tau = ChainMap::tau(&c, 0.5);
        assert!(is_homotopic(&ChainMap::zero(&c, &c, 0.5), &tau).is_none());
        let r = ray(0.0);
        assert!(is_homotopic(&ChainMap::identity(&r), &ChainMap::zero(&r, &r, 0.0)).is_none());
        let id = ChainMap::identity(&r);
        assert!(is_homotopic(&id, &id).unwrap().matrix.is_zero());
    }

    #[test]
    fn ray_pair_certificate() {
        let a = 0.5;
        let f = GradedBarcode::from_bars([(0, Bar::ray(0.0))]);
        let g = GradedBarcode::from_bars([(0, Bar::ray(a))]);
        let cert = certificate_from_matching(&f, &g, 0.0, a, PrimeField::F2).unwrap();
        assert!(verify_certificate(&cert));
        let rep = cone_torsion_bound_check(&cert).unwrap();
        // Cone(k_0 -> k_a) is the single bar [0, a)
        assert_eq!(rep.torsion, a);
        assert_eq!(rep.bound, 2.0 * a);
        // the same alpha with a smaller b has no valid beta
        assert!(certificate_from_matching(&f, &g, 0.0, a - 0.125, PrimeField::F2).is_err());
        let beta = ChainMap::new(present(&g), present(&f), a - 0.125, &[(0, 0, 1)]);
        assert!(beta.is_err());
    }

    #[test]
    fn identity_certificate() {
        let b = GradedBarcode::from_bars([(0, Bar::finite(0.0, 1.0)), (2, Bar::ray(3.0))]);
        let c = present(&b);
        let cert =
            InterleavingCertificate::certify(ChainMap::identity(&c), ChainMap::identity(&c))
                .unwrap();
        let rep = cone_torsion_bound_check(&cert).unwrap();
        assert_eq!((rep.torsion, rep.bound), (0.0, 0.0));
    }

    #[test]
    fn bad_witness_is_rejected() {
        let b = GradedBarcode::from_bars([(0, Bar::finite(0.0, 1.0))]);
        let mut cert = certificate_from_matching(&b, &b, 0.0, 0.0, PrimeField::F2).unwrap();
        assert!(verify_certificate(&cert));
        let mut h = cert.left_homotopy.clone().unwrap();
        h.matrix.set(0, 1, 1);
        cert.left_homotopy = Some(h);
        assert!(!verify_certificate(&cert));
    }

    #[test]
    fn certificate_json_round_trip() {
        let f = GradedBarcode::from_bars([(0, Bar::finite(0.0, 1.0)), (0, Bar::ray(0.0))]);
        let g = GradedBarcode::from_bars([(0, Bar::finite(0.25, 1.0)), (0, Bar::ray(0.5))]);
        let cert = certificate_from_matching(&f, &g, 0.0, 0.5, PrimeField::F2).unwrap();
        let s = serde_json::to_string(&cert).unwrap();
        let back: InterleavingCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cert);
        assert!(verify_certificate(&back));
    }
}

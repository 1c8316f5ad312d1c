//! Graded barcodes: finite multisets of half-open bars `[birth, death)` per
//! cohomological degree, with `death` possibly `+inf`.
//!
//! A bar `[a, b)` in degree `n` stands for the summand `k_[a,b)[-n]`. The
//! translation `T_c` moves every endpoint by `+c`, and the canonical map
//! `k_[c,inf) -> k_[d,inf)` exists for `c <= d`, so morphisms run from earlier
//! births to later births.

mod distance;
mod limit;

pub use distance::{
    dprime_distance, dprime_witness, epsilon_interleaved, interleaving_distance, shifted_dprime,
    shifted_dprime_witness, BarRef, DprimeWitness, MatchedBars, Matching,
};
pub use limit::{cauchy_limit, CauchyBarcodeSequence, CauchyTerm, LimitCertificate, LimitError, Tail};

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Global comparison tolerance for real-valued endpoints.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BarError {
    #[error("bar birth must be finite, got {0}")]
    InfiniteBirth(f64),
    #[error("bar [{0}, {1}) is empty or reversed")]
    Empty(f64, f64),
    #[error("malformed barcode: {0}")]
    Malformed(String),
}

/// A half-open interval `[birth, death)`; `death` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(birth: f64, death: f64) -> Result<Self, BarError> {
        if !birth.is_finite() {
            return Err(BarError::InfiniteBirth(birth));
        }
        if death.is_nan() || death <= birth || death == f64::NEG_INFINITY {
            return Err(BarError::Empty(birth, death));
        }
        Ok(Self { birth, death })
    }

    /// The ray `[birth, inf)`.
    pub fn ray(birth: f64) -> Self {
        Self::new(birth, f64::INFINITY).expect("ray birth must be finite")
    }

    pub fn finite(birth: f64, death: f64) -> Self {
        Self::new(birth, death).expect("invalid finite bar")
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self {
            birth: self.birth + c,
            death: self.death + c,
        }
    }

    fn key(&self) -> (f64, f64) {
        (self.birth, self.death)
    }
}

impl fmt::Display for Bar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "[{}, inf)", self.birth)
        } else {
            write!(f, "[{}, {})", self.birth, self.death)
        }
    }
}

fn cmp_bars(a: &Bar, b: &Bar) -> std::cmp::Ordering {
    a.key()
        .partial_cmp(&b.key())
        .expect("bar endpoints are never NaN")
}

/// Bars per degree, each multiset kept sorted by `(birth, death)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GradedBarcode {
    degrees: BTreeMap<i32, Vec<Bar>>,
}

impl GradedBarcode {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bars<I: IntoIterator<Item = (i32, Bar)>>(bars: I) -> Self {
        let mut b = Self::new();
        for (n, bar) in bars {
            b.push(n, bar);
        }
        b
    }

    /// The unit object `k_[0,inf)` in degree 0.
    pub fn unit() -> Self {
        Self::from_bars([(0, Bar::ray(0.0))])
    }

    /// Rays at 0 with the given multiplicity per degree; the image of the unit
    /// over a base whose cohomology has these Betti numbers.
    pub fn unit_with_betti(betti: &BTreeMap<i32, usize>) -> Self {
        let mut b = Self::new();
        for (&n, &k) in betti {
            for _ in 0..k {
                b.push(n, Bar::ray(0.0));
            }
        }
        b
    }

    pub fn push(&mut self, degree: i32, bar: Bar) {
        let v = self.degrees.entry(degree).or_default();
        let pos = v.partition_point(|x| cmp_bars(x, &bar).is_le());
        v.insert(pos, bar);
    }

    pub fn degree(&self, n: i32) -> &[Bar] {
        self.degrees.get(&n).map_or(&[], Vec::as_slice)
    }

    /// Degrees carrying at least one bar, ascending.
    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.degrees
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(&n, _)| n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &Bar)> + '_ {
        self.degrees
            .iter()
            .flat_map(|(&n, v)| v.iter().map(move |b| (n, b)))
    }

    pub fn len(&self) -> usize {
        self.degrees.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Translation `T_c`: every endpoint moves by `+c`.
    pub fn shift(&self, c: f64) -> Self {
        Self {
            degrees: self
                .degrees
                .iter()
                .map(|(&n, v)| (n, v.iter().map(|b| b.shifted(c)).collect()))
                .collect(),
        }
    }

    /// Cohomological shift `[k]`: a bar in degree `n` moves to degree `n - k`.
    pub fn degree_shift(&self, k: i32) -> Self {
        Self {
            degrees: self
                .degrees
                .iter()
                .map(|(&n, v)| (n - k, v.clone()))
                .collect(),
        }
    }

    pub fn direct_sum(&self, other: &GradedBarcode) -> Self {
        let mut out = self.clone();
        for (n, b) in other.iter() {
            out.push(n, *b);
        }
        out
    }

    /// Drops bars of length at most `len`.
    pub fn without_short_bars(&self, len: f64) -> Self {
        Self::from_bars(self.iter().filter(|(_, b)| b.length() > len).map(|(n, b)| (n, *b)))
    }

    /// Number of rays per degree.
    pub fn ray_counts(&self) -> BTreeMap<i32, usize> {
        let mut m = BTreeMap::new();
        for (n, b) in self.iter() {
            if b.is_infinite() {
                *m.entry(n).or_insert(0) += 1;
            }
        }
        m
    }

    /// Multiset equality with endpoints compared up to `tol`.
    pub fn approx_eq(&self, other: &GradedBarcode, tol: f64) -> bool {
        let degs: std::collections::BTreeSet<i32> = self.degrees().chain(other.degrees()).collect();
        degs.into_iter().all(|n| {
            let (a, b) = (self.degree(n), other.degree(n));
            a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| {
                    (x.birth - y.birth).abs() <= tol
                        && (x.is_infinite() == y.is_infinite())
                        && (x.is_infinite() || (x.death - y.death).abs() <= tol)
                })
        })
    }

    /// `inf { c >= 0 : tau_{0,c} = 0 }`: the longest bar, `inf` with any ray, 0 when empty.
    pub fn torsion_threshold(&self) -> f64 {
        self.iter().map(|(_, b)| b.length()).fold(0.0, f64::max)
    }

    /// Graded dimensions of `Q_c^*(B) = Hom(k_[0,inf), T_c B[*])`.
    pub fn q_dims(&self, c: f64) -> BTreeMap<i32, usize> {
        let source = Bar::ray(-c);
        let mut out = BTreeMap::new();
        for (n, b) in self.iter() {
            for (m, d) in hom_dims(&source, b) {
                *out.entry(n + m).or_insert(0) += d;
            }
        }
        out.retain(|_, d| *d > 0);
        out
    }

    /// Convolution `B1 * B2`, bilinear over the bar-pair table.
    pub fn convolve(&self, other: &GradedBarcode) -> Self {
        let mut out = Self::new();
        for (m, x) in self.iter() {
            for (n, y) in other.iter() {
                for (k, bar) in convolve_bars(x, y) {
                    out.push(m + n + k, bar);
                }
            }
        }
        out
    }
}

/// `k_I * k_J` as a list of `(degree offset, bar)`.
pub fn convolve_bars(x: &Bar, y: &Bar) -> Vec<(i32, Bar)> {
    match (x.is_infinite(), y.is_infinite()) {
        (true, true) => vec![(0, Bar::ray(x.birth + y.birth))],
        (false, true) => vec![(0, x.shifted(y.birth))],
        (true, false) => vec![(0, y.shifted(x.birth))],
        (false, false) => {
            // [a,b) * [c,d) = [a+c, min) in degree 0 and [max, b+d) in degree 1.
            let lo = x.birth + y.birth;
            let hi = x.death + y.death;
            let mid_lo = (x.death + y.birth).min(x.birth + y.death);
            let mid_hi = (x.death + y.birth).max(x.birth + y.death);
            vec![(0, Bar::finite(lo, mid_lo)), (1, Bar::finite(mid_hi, hi))]
        }
    }
}

fn ext_from_ray(u: f64, target: &Bar) -> [usize; 2] {
    if target.is_infinite() {
        [usize::from(u <= target.birth), 0]
    } else {
        [0, usize::from(target.birth < u && u <= target.death)]
    }
}

/// `dim Hom(k_src, k_tgt[m])` for each degree `m` with a nonzero value.
///
/// Ray sources use the elementary table; a finite source `[s,t)` goes through
/// the triangle `k_[s,t) -> k_s -> k_t ->`, where the induced maps between
/// nonzero one-dimensional groups are isomorphisms.
pub fn hom_dims(src: &Bar, tgt: &Bar) -> BTreeMap<i32, usize> {
    let mut out = BTreeMap::new();
    if src.is_infinite() {
        for (m, &d) in ext_from_ray(src.birth, tgt).iter().enumerate() {
            if d > 0 {
                out.insert(m as i32, d);
            }
        }
        return out;
    }
    let from_s = ext_from_ray(src.birth, tgt);
    let from_t = ext_from_ray(src.death, tgt);
    let rank = |m: usize| usize::from(m < 2 && from_s[m] > 0 && from_t[m] > 0);
    for m in 0..2usize {
        let coker = from_s[m] - rank(m);
        let ker_next = if m + 1 < 2 { from_t[m + 1] - rank(m + 1) } else { 0 };
        let d = coker + ker_next;
        if d > 0 {
            out.insert(m as i32, d);
        }
    }
    // Ext^{-1} picks up ker of degree-0 map from k_t.
    let kneg = from_t[0] - rank(0);
    if kneg > 0 {
        out.insert(-1, kneg);
    }
    out
}

// ---- JSON ----------------------------------------------------------------

#[derive(Deserialize)]
#[serde(untagged)]
enum Endpoint {
    Num(f64),
    Text(String),
}

impl Endpoint {
    fn value(&self) -> Result<f64, String> {
        match self {
            Endpoint::Num(x) => Ok(*x),
            Endpoint::Text(s) => match s.as_str() {
                "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
                other => Err(format!("unrecognised endpoint {other:?}")),
            },
        }
    }
}

#[derive(Deserialize)]
struct BarcodeFile {
    degrees: BTreeMap<String, Vec<(Endpoint, Endpoint)>>,
}

struct BarSer<'a>(&'a Bar);

impl Serialize for BarSer<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&self.0.birth)?;
        if self.0.is_infinite() {
            seq.serialize_element("inf")?;
        } else {
            seq.serialize_element(&self.0.death)?;
        }
        seq.end()
    }
}

struct DegreesSer<'a>(&'a GradedBarcode);

impl Serialize for DegreesSer<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let degs: Vec<i32> = self.0.degrees().collect();
        let mut map = s.serialize_map(Some(degs.len()))?;
        for n in degs {
            let bars: Vec<BarSer<'_>> = self.0.degree(n).iter().map(BarSer).collect();
            map.serialize_entry(&n.to_string(), &bars)?;
        }
        map.end()
    }
}

impl Serialize for GradedBarcode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(1))?;
        map.serialize_entry("degrees", &DegreesSer(self))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for GradedBarcode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = BarcodeFile::deserialize(d)?;
        let mut out = GradedBarcode::new();
        for (key, bars) in file.degrees {
            let n: i32 = key
                .trim()
                .parse()
                .map_err(|_| de::Error::custom(format!("degree key {key:?} is not an integer")))?;
            for (b, e) in bars {
                let birth = b.value().map_err(de::Error::custom)?;
                let death = e.value().map_err(de::Error::custom)?;
                let bar = Bar::new(birth, death).map_err(de::Error::custom)?;
                out.push(n, bar);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for GradedBarcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "(empty)");
        }
        for (i, n) in self.degrees().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "H{n}:")?;
            for b in self.degree(n) {
                write!(f, " {b}")?;
            }
        }
        Ok(())
    }
}

//! Limits of Cauchy sequences of barcodes.
//!
//! Consecutive terms must be `a_n`-interleaved. Bars are chased through the
//! optimal consecutive matchings; chains that survive to the last term give
//! the limit, except those whose final length is within the remaining tail
//! budget, which are treated as vanishing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::distance::{dprime_distance, epsilon_interleaved, interleaving_distance, Matching};
use super::{GradedBarcode, TOL};

/// `d'` constant: weak `(a, 7a)` isomorphism read through `d' <= 2d`.
pub const TAMARKIN_LIMIT_CONSTANT: f64 = 16.0;
/// Constant for the thickening-kernel distance.
pub const KERNEL_LIMIT_CONSTANT: f64 = 24.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitError {
    #[error("terms {index} and {next} are not {declared}-interleaved (they need {required})")]
    NotCauchy {
        index: usize,
        next: usize,
        declared: f64,
        required: f64,
    },
    #[error("bounds must be finite and non-negative (term {0})")]
    InvalidBound(usize),
    #[error("geometric tail needs first >= 0 and 0 <= ratio < 1")]
    InvalidTail,
    #[error("a Cauchy sequence needs at least one term")]
    Empty,
}

/// Bounds `a_k` for `k` past the listed terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tail {
    Zero,
    /// `a_{N+j} = first * ratio^j`.
    Geometric { first: f64, ratio: f64 },
}

impl Tail {
    pub fn total(&self) -> f64 {
        match *self {
            Tail::Zero => 0.0,
            Tail::Geometric { first, ratio } => first / (1.0 - ratio),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyTerm {
    pub barcode: GradedBarcode,
    /// `a_n`: the declared interleaving bound between this term and the next.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct CauchyBarcodeSequence {
    terms: Vec<CauchyTerm>,
    tail: Tail,
    tail_sums: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    terms: Vec<CauchyTerm>,
    #[serde(default = "zero_tail")]
    tail: Tail,
}

fn zero_tail() -> Tail {
    Tail::Zero
}

impl TryFrom<RawSequence> for CauchyBarcodeSequence {
    type Error = LimitError;
    fn try_from(r: RawSequence) -> Result<Self, Self::Error> {
        Self::new(r.terms, r.tail)
    }
}

impl From<CauchyBarcodeSequence> for RawSequence {
    fn from(s: CauchyBarcodeSequence) -> Self {
        RawSequence {
            terms: s.terms,
            tail: s.tail,
        }
    }
}

impl CauchyBarcodeSequence {
    pub fn new(terms: Vec<CauchyTerm>, tail: Tail) -> Result<Self, LimitError> {
        if terms.is_empty() {
            return Err(LimitError::Empty);
        }
        for (i, t) in terms.iter().enumerate() {
            if !(t.bound >= 0.0 && t.bound.is_finite()) {
                return Err(LimitError::InvalidBound(i));
            }
        }
        if let Tail::Geometric { first, ratio } = tail {
            if !(first >= 0.0 && first.is_finite() && (0.0..1.0).contains(&ratio)) {
                return Err(LimitError::InvalidTail);
            }
        }
        let mut tail_sums = vec![0.0; terms.len() + 1];
        tail_sums[terms.len()] = tail.total();
        for i in (0..terms.len()).rev() {
            tail_sums[i] = tail_sums[i + 1] + terms[i].bound;
        }
        Ok(Self {
            terms,
            tail,
            tail_sums,
        })
    }

    /// `F_n = {0: [[0, 1 + 2^-n)]}` with `a_n = 2^-n`, `n < len`, geometric tail.
    pub fn geometric_demo(len: usize) -> Self {
        let terms = (0..len)
            .map(|n| {
                let a = 0.5f64.powi(n as i32);
                CauchyTerm {
                    barcode: GradedBarcode::from_bars([(0, super::Bar::finite(0.0, 1.0 + a))]),
                    bound: a,
                }
            })
            .collect();
        let first = 0.5f64.powi(len as i32);
        Self::new(terms, Tail::Geometric { first, ratio: 0.5 }).expect("valid demo")
    }

    pub fn terms(&self) -> &[CauchyTerm] {
        &self.terms
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `a_{>=n} = sum_{k >= n} a_k`, including the declared tail.
    pub fn tail_sum(&self, n: usize) -> f64 {
        self.tail_sums[n.min(self.terms.len())]
    }
}

/// Per-term evidence that the computed limit is within the stated constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCertificate {
    /// `a_{>=n}` for each listed term.
    pub tail_sums: Vec<f64>,
    /// `d'(F_n, F_inf)`.
    pub dprime: Vec<f64>,
    /// Unshifted interleaving distance `dist(F_n, F_inf)`.
    pub kernel: Vec<f64>,
    pub dprime_constant: f64,
    pub kernel_constant: f64,
    /// Bars of the last term no longer than twice this value are dropped.
    pub resolution: f64,
    pub chains: usize,
    pub dropped: usize,
    /// For each kept bar, how many consecutive matchings it was chased back through.
    pub ancestry: Vec<usize>,
    pub consecutive: Vec<Matching>,
    pub holds: bool,
}

/// Chains a bar of the last term back to its earliest ancestor.
fn chase_back(matchings: &[Matching], degree: i32, mut index: usize) -> usize {
    let mut steps = 0;
    for m in matchings.iter().rev() {
        match m.pairs.iter().find(|p| p.degree == degree && p.right == index) {
            Some(p) => {
                index = p.left;
                steps += 1;
            }
            None => break,
        }
    }
    steps
}

pub fn cauchy_limit(
    seq: &CauchyBarcodeSequence,
) -> Result<(GradedBarcode, LimitCertificate), LimitError> {
    let terms = seq.terms();
    let mut consecutive = Vec::with_capacity(terms.len().saturating_sub(1));
    for (n, pair) in terms.windows(2).enumerate() {
        let (f, g) = (&pair[0].barcode, &pair[1].barcode);
        let optimal = interleaving_distance(f, g);
        if optimal > pair[0].bound + TOL {
            return Err(LimitError::NotCauchy {
                index: n,
                next: n + 1,
                declared: pair[0].bound,
                required: optimal,
            });
        }
        let m = epsilon_interleaved(f, g, optimal).expect("optimal interleaving exists");
        consecutive.push(m);
    }

    let last = terms.len() - 1;
    let resolution = seq.tail_sum(last);
    let last_code = &terms[last].barcode;
    let mut limit = GradedBarcode::new();
    let mut dropped = 0;
    let mut chains = 0;
    let mut ancestry = Vec::new();
    for n in last_code.degrees() {
        for (i, bar) in last_code.degree(n).iter().enumerate() {
            chains += 1;
            if !bar.is_infinite() && bar.length() <= 2.0 * resolution + TOL {
                dropped += 1;
            } else {
                ancestry.push(chase_back(&consecutive, n, i));
                limit.push(n, *bar);
            }
        }
    }

    let tail_sums: Vec<f64> = (0..terms.len()).map(|n| seq.tail_sum(n)).collect();
    let dprime: Vec<f64> = terms
        .iter()
        .map(|t| dprime_distance(&t.barcode, &limit))
        .collect();
    let kernel: Vec<f64> = terms
        .iter()
        .map(|t| interleaving_distance(&t.barcode, &limit))
        .collect();
    let holds = tail_sums.iter().zip(&dprime).zip(&kernel).all(|((a, d), k)| {
        *d <= TAMARKIN_LIMIT_CONSTANT * a + TOL && *k <= KERNEL_LIMIT_CONSTANT * a + TOL
    });
    Ok((
        limit,
        LimitCertificate {
            tail_sums,
            dprime,
            kernel,
            dprime_constant: TAMARKIN_LIMIT_CONSTANT,
            kernel_constant: KERNEL_LIMIT_CONSTANT,
            resolution,
            chains,
            dropped,
            ancestry,
            consecutive,
            holds,
        },
    ))
}

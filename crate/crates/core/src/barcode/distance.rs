//! Matchings, interleaving tests and the `d'` distances on graded barcodes.
//!
//! Interleavings are decided degree by degree: an `eps`-matching pairs bars
//! whose endpoints differ by at most `eps` (rays only with rays) and leaves
//! unmatched only bars of length at most `2 eps`. `d'` allows an extra
//! translation `|c| <= eps` of the second argument, since an `(a, b)`
//! isomorphism of `(F, G)` is a symmetric `(a+b)/2` isomorphism of
//! `(F, T_{(a-b)/2} G)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Bar, GradedBarcode, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarRef {
    pub degree: i32,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedBars {
    pub degree: i32,
    pub left: usize,
    pub right: usize,
}

/// Witness of an `eps`-interleaving. Indices refer to the sorted bar lists
/// returned by [`GradedBarcode::degree`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Matching {
    pub epsilon: f64,
    pub pairs: Vec<MatchedBars>,
    pub unmatched_left: Vec<BarRef>,
    pub unmatched_right: Vec<BarRef>,
}

impl Matching {
    /// Partner of a left bar, if it is matched.
    pub fn partner_of_left(&self, degree: i32, index: usize) -> Option<usize> {
        self.pairs
            .iter()
            .find(|p| p.degree == degree && p.left == index)
            .map(|p| p.right)
    }
}

fn close(x: &Bar, y: &Bar, eps: f64) -> bool {
    if x.is_infinite() != y.is_infinite() {
        return false;
    }
    let birth_ok = (x.birth - y.birth).abs() <= eps + TOL;
    birth_ok && (x.is_infinite() || (x.death - y.death).abs() <= eps + TOL)
}

fn killable(b: &Bar, eps: f64) -> bool {
    !b.is_infinite() && b.length() <= 2.0 * eps + TOL
}

/// Perfect matching in the augmented bipartite graph (bars plus diagonal
/// copies); Kuhn's algorithm visiting neighbours in sorted order.
fn match_degree(left: &[Bar], right: &[Bar], eps: f64) -> Option<Vec<Option<usize>>> {
    let (n, m) = (left.len(), right.len());
    let size = n + m;
    // Left node i < n: bar left[i]; n + j: diagonal copy for right[j].
    // Right node j < m: bar right[j]; m + i: diagonal copy for left[i].
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (i, x) in left.iter().enumerate() {
        for (j, y) in right.iter().enumerate() {
            if close(x, y, eps) {
                adj[i].push(j);
            }
        }
        if killable(x, eps) {
            adj[i].push(m + i);
        }
    }
    for (j, y) in right.iter().enumerate() {
        if killable(y, eps) {
            adj[n + j].push(j);
        }
        adj[n + j].extend(m..m + n);
    }

    let mut match_right: Vec<Option<usize>> = vec![None; size];
    for u in 0..size {
        let mut seen = vec![false; size];
        if !augment(u, &adj, &mut match_right, &mut seen) {
            return None;
        }
    }
    let mut left_to_right = vec![None; n];
    for (r, l) in match_right.iter().enumerate() {
        if let Some(l) = *l {
            if l < n && r < m {
                left_to_right[l] = Some(r);
            }
        }
    }
    Some(left_to_right)
}

fn augment(u: usize, adj: &[Vec<usize>], match_right: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if match_right[v].is_none_or(|w| augment(w, adj, match_right, seen)) {
            match_right[v] = Some(u);
            return true;
        }
    }
    false
}

fn all_degrees(b1: &GradedBarcode, b2: &GradedBarcode) -> BTreeSet<i32> {
    b1.degrees().chain(b2.degrees()).collect()
}

/// Decides whether `b1` and `b2` are `eps`-interleaved; returns a matching witness.
pub fn epsilon_interleaved(b1: &GradedBarcode, b2: &GradedBarcode, eps: f64) -> Option<Matching> {
    if eps < 0.0 || eps.is_nan() {
        return None;
    }
    let mut out = Matching {
        epsilon: eps,
        ..Matching::default()
    };
    for n in all_degrees(b1, b2) {
        let (left, right) = (b1.degree(n), b2.degree(n));
        let l2r = match_degree(left, right, eps)?;
        let mut used = vec![false; right.len()];
        for (i, r) in l2r.iter().enumerate() {
            match r {
                Some(j) => {
                    used[*j] = true;
                    out.pairs.push(MatchedBars {
                        degree: n,
                        left: i,
                        right: *j,
                    });
                }
                None => out.unmatched_left.push(BarRef { degree: n, index: i }),
            }
        }
        for (j, u) in used.iter().enumerate() {
            if !u {
                out.unmatched_right.push(BarRef { degree: n, index: j });
            }
        }
    }
    Some(out)
}

fn rays_compatible(b1: &GradedBarcode, b2: &GradedBarcode) -> bool {
    b1.ray_counts() == b2.ray_counts()
}

/// Endpoint differences `left - right` that can appear in a matched pair.
fn endpoint_differences(b1: &GradedBarcode, b2: &GradedBarcode) -> Vec<f64> {
    let mut d = Vec::new();
    for n in all_degrees(b1, b2) {
        for x in b1.degree(n) {
            for y in b2.degree(n) {
                if x.is_infinite() != y.is_infinite() {
                    continue;
                }
                d.push(x.birth - y.birth);
                if !x.is_infinite() {
                    d.push(x.death - y.death);
                }
            }
        }
    }
    sorted_unique(d)
}

fn half_lengths(b1: &GradedBarcode, b2: &GradedBarcode) -> Vec<f64> {
    b1.iter()
        .chain(b2.iter())
        .filter(|(_, b)| !b.is_infinite())
        .map(|(_, b)| b.length() / 2.0)
        .collect()
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    v.dedup_by(|a, b| (*a - *b).abs() <= TOL * 1e-3);
    v
}

/// Smallest candidate satisfying a monotone predicate.
fn first_feasible<T>(cands: &[f64], mut test: impl FnMut(f64) -> Option<T>) -> Option<(f64, T)> {
    let (mut lo, mut hi) = (0usize, cands.len());
    let mut best = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match test(cands[mid]) {
            Some(w) => {
                best = Some((cands[mid], w));
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    best
}

/// Bottleneck-style interleaving distance: the least `eps` with an
/// `eps`-interleaving and no translation.
pub fn interleaving_distance(b1: &GradedBarcode, b2: &GradedBarcode) -> f64 {
    if !rays_compatible(b1, b2) {
        return f64::INFINITY;
    }
    let mut cands: Vec<f64> = endpoint_differences(b1, b2).iter().map(|x| x.abs()).collect();
    cands.extend(half_lengths(b1, b2));
    cands.push(0.0);
    let cands = sorted_unique(cands);
    first_feasible(&cands, |e| epsilon_interleaved(b1, b2, e))
        .map(|(e, _)| e)
        .unwrap_or(f64::INFINITY)
}

/// Optimal data behind a `d'` value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DprimeWitness {
    /// `a + b`.
    pub value: f64,
    pub epsilon: f64,
    /// Translation `c` applied to the second barcode.
    pub shift: f64,
    pub a: f64,
    pub b: f64,
    pub matching: Matching,
}

fn shift_candidates(diffs: &[f64], eps: f64, bound: Option<f64>) -> Vec<f64> {
    let mut cs = vec![0.0];
    for &x in diffs {
        cs.push(x - eps);
        cs.push(x + eps);
    }
    if let Some(b) = bound {
        cs.push(-b);
        cs.push(b);
        cs.retain(|c| c.abs() <= b + TOL);
    }
    sorted_unique(cs)
}

fn search_with_shift(
    b1: &GradedBarcode,
    b2: &GradedBarcode,
    bounded_shift: bool,
) -> Option<DprimeWitness> {
    if !rays_compatible(b1, b2) {
        return None;
    }
    let mut diffs = endpoint_differences(b1, b2);
    if bounded_shift {
        diffs.push(0.0);
        diffs = sorted_unique(diffs);
    }
    let mut cands = Vec::with_capacity(diffs.len() * diffs.len() / 2 + 8);
    for (i, &x) in diffs.iter().enumerate() {
        for &y in &diffs[i..] {
            cands.push((y - x).abs() / 2.0);
        }
    }
    cands.extend(half_lengths(b1, b2));
    cands.push(0.0);
    let cands = sorted_unique(cands);

    let probe = |eps: f64| -> Option<(f64, Matching)> {
        let bound = bounded_shift.then_some(eps);
        shift_candidates(&diffs, eps, bound)
            .into_iter()
            .find_map(|c| epsilon_interleaved(b1, &b2.shift(c), eps).map(|m| (c, m)))
    };
    let (eps, (c, matching)) = first_feasible(&cands, probe)?;
    let c = if c.abs() <= TOL { 0.0 } else { c };
    Some(DprimeWitness {
        value: 2.0 * eps,
        epsilon: eps,
        shift: c,
        a: eps + c,
        b: eps - c,
        matching,
    })
}

/// `d'(B1, B2) = inf { a + b : (B1, B2) is (a,b)-isomorphic }`, with witness.
pub fn dprime_witness(b1: &GradedBarcode, b2: &GradedBarcode) -> Option<DprimeWitness> {
    search_with_shift(b1, b2, true)
}

pub fn dprime_distance(b1: &GradedBarcode, b2: &GradedBarcode) -> f64 {
    dprime_witness(b1, b2).map_or(f64::INFINITY, |w| w.value)
}

/// Witness for `inf_c d'(B1, T_c B2)`; `shift` is the optimal total translation.
pub fn shifted_dprime_witness(b1: &GradedBarcode, b2: &GradedBarcode) -> Option<DprimeWitness> {
    search_with_shift(b1, b2, false)
}

pub fn shifted_dprime(b1: &GradedBarcode, b2: &GradedBarcode) -> f64 {
    shifted_dprime_witness(b1, b2).map_or(f64::INFINITY, |w| w.value)
}

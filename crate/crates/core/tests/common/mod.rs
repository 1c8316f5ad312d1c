//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's reduction, matching or cup-product code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use tamarkin_core::barcode::{Bar, GradedBarcode};
use tamarkin_core::sublevel::CellComplex;

// ---- linear algebra over F_p ----------------------------------------------

pub fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r, mut e, mut b) = (1u64, p - 2, a % p);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows).find(|&k| !m[k][c].is_multiple_of(p)) else { continue };
        m.swap(r, k);
        let iv = inv_mod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = *x * iv % p;
        }
        for k in 0..rows {
            if k != r && m[k][c] != 0 {
                let f = m[k][c];
                for j in 0..cols {
                    m[k][j] = (m[k][j] + p * p - f * m[r][j] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<u64>], p: u64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m = rows.to_vec();
    rref(&mut m, p).len()
}

/// Basis of `{v : M v = 0}` for `M` given by rows of length `cols`.
pub fn kernel(rows: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m = rows.to_vec();
    let pivots = if m.is_empty() { Vec::new() } else { rref(&mut m, p) };
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0; cols];
            v[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[i][f] % p) % p;
            }
            v
        })
        .collect()
}

/// Cohomology dimension of `C^{k-1} --A--> C^k --B--> C^{k+1}` given the two matrices.
pub fn cohomology_dim(dim_k: usize, a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> usize {
    dim_k - rank(b, p) - rank(a, p)
}

// ---- sheaves on R with a finite stratification ----------------------------

/// A cell of the stratification: a point or the open interval between two
/// consecutive points (with `-inf`/`inf` at the ends).
#[derive(Clone, Copy, Debug)]
enum Cell {
    Point(f64),
    Open(f64, f64),
}

fn strata(points: &[f64]) -> Vec<Cell> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup();
    let mut out = vec![Cell::Open(f64::NEG_INFINITY, p[0])];
    for (i, &x) in p.iter().enumerate() {
        out.push(Cell::Point(x));
        out.push(Cell::Open(x, p.get(i + 1).copied().unwrap_or(f64::INFINITY)));
    }
    out
}

/// Whether a cell lies in `[lo, hi)`.
fn in_bar(c: Cell, lo: f64, hi: f64) -> bool {
    match c {
        Cell::Point(x) => lo <= x && x < hi,
        Cell::Open(a, b) => lo <= a && b <= hi,
    }
}

/// `dim Hom(k_[s,t), k_[a,b)[m])` for `m = -1, 0, 1, 2` from the cell-poset
/// model: sections over `(-inf, t)` supported on `[s, inf)`.
pub fn hom_oracle(src: &Bar, tgt: &Bar) -> BTreeMap<i32, usize> {
    let p = 2;
    let mut pts = vec![src.birth, tgt.birth];
    for x in [src.death, tgt.death] {
        if x.is_finite() {
            pts.push(x);
        }
    }
    let cells = strata(&pts);
    let in_u = |c: Cell| match c {
        Cell::Point(x) => x < src.death,
        Cell::Open(_, b) => b <= src.death,
    };
    let in_z = |c: Cell| match c {
        Cell::Point(x) => x >= src.birth,
        Cell::Open(a, _) => a >= src.birth,
    };
    let stalk = |c: Cell| in_bar(c, tgt.birth, tgt.death);
    // degree 0 slots: cells in U and Z with nonzero stalk
    let c0: Vec<usize> = (0..cells.len())
        .filter(|&i| in_u(cells[i]) && in_z(cells[i]) && stalk(cells[i]))
        .collect();
    // degree 1 slots: (point < adjacent open cell), both in U, point in Z, open cell stalk nonzero
    let mut c1: Vec<(usize, usize)> = Vec::new();
    for i in 0..cells.len() {
        if let Cell::Point(_) = cells[i] {
            for j in [i - 1, i + 1] {
                if in_u(cells[i]) && in_u(cells[j]) && in_z(cells[i]) && stalk(cells[j]) {
                    c1.push((i, j));
                }
            }
        }
    }
    let mut d: Vec<Vec<u64>> = vec![vec![0; c0.len()]; c1.len()];
    for (r, &(pt, e)) in c1.iter().enumerate() {
        if let Some(col) = c0.iter().position(|&x| x == e) {
            d[r][col] = (d[r][col] + 1) % p;
        }
        if stalk(cells[pt]) {
            if let Some(col) = c0.iter().position(|&x| x == pt) {
                d[r][col] = (d[r][col] + p - 1) % p;
            }
        }
    }
    let rk = rank(&d, p);
    let mut out = BTreeMap::new();
    if c0.len() > rk {
        out.insert(0, c0.len() - rk);
    }
    if c1.len() > rk {
        out.insert(1, c1.len() - rk);
    }
    out
}

/// `dim H^j_c(L)` for an interval `L` given by endpoints and closedness.
fn hc_interval(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> [usize; 2] {
    if lo > hi || (lo == hi && !(lo_closed && hi_closed)) {
        return [0, 0];
    }
    let lo_c = lo_closed && lo.is_finite();
    let hi_c = hi_closed && hi.is_finite();
    match (lo_c, hi_c) {
        (true, true) => [1, 0],
        (false, false) => [0, 1],
        _ => [0, 0],
    }
}

/// Stalk dimensions of `k_I * k_J` at `t`, from `H_c` of the fiber of addition.
pub fn convolution_stalk(x: &Bar, y: &Bar, t: f64) -> [usize; 2] {
    // {u in [a,b) : t - u in [c,d)} = [a,b) ∩ (t-d, t-c]
    let (lo1, hi1) = (x.birth, x.death);
    let (lo2, hi2) = (t - y.death, t - y.birth);
    let (lo, lo_closed) = if lo1 > lo2 { (lo1, true) } else if lo2 > lo1 { (lo2, false) } else { (lo1, false) };
    let (hi, hi_closed) = if hi2 < hi1 { (hi2, true) } else { (hi1, false) };
    hc_interval(lo, lo_closed, hi, hi_closed)
}

/// Stalk dimensions per degree of a barcode at `t`.
pub fn barcode_stalk(b: &GradedBarcode, t: f64) -> BTreeMap<i32, usize> {
    let mut out = BTreeMap::new();
    for (n, bar) in b.iter() {
        if bar.birth <= t && t < bar.death {
            *out.entry(n).or_insert(0) += 1;
        }
    }
    out
}

// ---- complex-level morphism search ----------------------------------------

/// Standard presentation: generators `(degree, grade)` and `D` as pairs `(src, tgt)`.
pub struct Presentation {
    pub gens: Vec<(i32, f64)>,
    pub d: Vec<(usize, usize)>,
}

pub fn present(b: &GradedBarcode) -> Presentation {
    let mut gens = Vec::new();
    let mut d = Vec::new();
    for (n, bar) in b.iter() {
        let x = gens.len();
        gens.push((n, bar.birth));
        if !bar.is_infinite() {
            gens.push((n + 1, bar.death));
            d.push((x, x + 1));
        }
    }
    Presentation { gens, d }
}

/// All `(row, col)` slots of a degree-0 map `F -> T_s G` allowed by grades.
fn slots(f: &Presentation, g: &Presentation, s: f64, degree_shift: i32) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (j, &(dj, gj)) in f.gens.iter().enumerate() {
        for (i, &(di, gi)) in g.gens.iter().enumerate() {
            if di == dj + degree_shift && gj <= gi + s + 1e-12 {
                out.push((i, j));
            }
        }
    }
    out
}

fn dmat(p: &Presentation) -> Vec<Vec<u8>> {
    let n = p.gens.len();
    let mut m = vec![vec![0u8; n]; n];
    for &(s, t) in &p.d {
        m[t][s] = 1;
    }
    m
}

fn matmul(a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let (r, k, c) = (a.len(), b.len(), b.first().map_or(0, |x| x.len()));
    let mut out = vec![vec![0u8; c]; r];
    for i in 0..r {
        for l in 0..k {
            if a[i][l] != 0 {
                for j in 0..c {
                    out[i][j] ^= b[l][j];
                }
            }
        }
    }
    out
}

fn from_slots(rows: usize, cols: usize, slots: &[(usize, usize)], mask: &[u8]) -> Vec<Vec<u8>> {
    let mut m = vec![vec![0u8; cols]; rows];
    for (k, &(i, j)) in slots.iter().enumerate() {
        m[i][j] = mask[k];
    }
    m
}

fn flatten(m: &[Vec<u8>]) -> Vec<u64> {
    m.iter().flatten().map(|&x| x as u64).collect()
}

/// Basis of chain maps `F -> T_s G` over F_2, as slot masks.
fn chain_maps(f: &Presentation, g: &Presentation, s: f64) -> (Vec<(usize, usize)>, Vec<Vec<u8>>) {
    let sl = slots(f, g, s, 0);
    let (df, dg) = (dmat(f), dmat(g));
    let (nf, ng) = (f.gens.len(), g.gens.len());
    // linear map: mask -> dg*m - m*df, as a matrix with one column per slot
    let mut cols: Vec<Vec<u64>> = Vec::new();
    for k in 0..sl.len() {
        let mut e = vec![0u8; sl.len()];
        e[k] = 1;
        let m = from_slots(ng, nf, &sl, &e);
        let a = matmul(&dg, &m);
        let b = matmul(&m, &df);
        let diff: Vec<Vec<u8>> = a.iter().zip(&b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u ^ v).collect()).collect();
        cols.push(flatten(&diff));
    }
    let rows = ng * nf;
    let mat: Vec<Vec<u64>> = (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let ker = kernel(&mat, sl.len(), 2);
    (sl, ker.into_iter().map(|v| v.into_iter().map(|x| x as u8).collect()).collect())
}

/// Images of all homotopies `h: F -> T_s G` of degree `-1` under `h -> Dh + hD`.
fn null_homotopic(f: &Presentation, g: &Presentation, s: f64) -> Vec<Vec<u64>> {
    let sl = slots(f, g, s, -1);
    let (df, dg) = (dmat(f), dmat(g));
    let (nf, ng) = (f.gens.len(), g.gens.len());
    (0..sl.len())
        .map(|k| {
            let mut e = vec![0u8; sl.len()];
            e[k] = 1;
            let h = from_slots(ng, nf, &sl, &e);
            let a = matmul(&dg, &h);
            let b = matmul(&h, &df);
            let sum: Vec<Vec<u8>> = a.iter().zip(&b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u ^ v).collect()).collect();
            flatten(&sum)
        })
        .collect()
}

/// Basis of chain maps modulo null-homotopic ones, and a coordinate map onto it.
struct HomSpace {
    rows: usize,
    cols: usize,
    slots: Vec<(usize, usize)>,
    /// Representatives of a basis of `H^0`, as slot masks.
    basis: Vec<Vec<u8>>,
    /// Columns: null-homotopic images then basis representatives, flattened matrices.
    frame: Vec<Vec<u64>>,
    boundary_rank: usize,
}

impl HomSpace {
    fn new(f: &Presentation, g: &Presentation, s: f64) -> Self {
        let (slots, cycles) = chain_maps(f, g, s);
        let nulls = null_homotopic(f, g, s);
        let (rows, cols) = (g.gens.len(), f.gens.len());
        let mut frame = span_of(&nulls);
        let boundary_rank = frame.len();
        let mut basis = Vec::new();
        for z in cycles {
            let v = flatten(&from_slots(rows, cols, &slots, &z));
            let mut with = frame.clone();
            with.push(v.clone());
            if rank(&with, 2) > frame.len() {
                frame.push(v);
                basis.push(z);
            }
        }
        Self { rows, cols, slots, basis, frame, boundary_rank }
    }

    fn matrix(&self, mask: &[u8]) -> Vec<Vec<u8>> {
        from_slots(self.rows, self.cols, &self.slots, mask)
    }

    /// Coordinates of a chain map (flattened) in the `H^0` basis, as a bitmask.
    fn coords(&self, v: &[u64]) -> u64 {
        // solve frame * x = v
        let n = self.frame.len();
        let len = v.len();
        let mut m: Vec<Vec<u64>> = (0..len)
            .map(|r| {
                let mut row: Vec<u64> = self.frame.iter().map(|c| c[r]).collect();
                row.push(v[r]);
                row
            })
            .collect();
        let piv = rref(&mut m, 2);
        assert!(!piv.contains(&n), "not a chain map of this space");
        let mut x = 0u64;
        for (i, &pc) in piv.iter().enumerate() {
            if pc >= self.boundary_rank && m[i][n] == 1 {
                x |= 1 << (pc - self.boundary_rank);
            }
        }
        x
    }
}

fn span_of(vs: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = Vec::new();
    for v in vs {
        let mut with = out.clone();
        with.push(v.clone());
        if rank(&with, 2) > out.len() {
            out.push(v.clone());
        }
    }
    out
}

/// Whether `sum_u y_u cols[u] = target` has a solution over F_2 (bitmask columns).
fn solvable(cols: &[u64], target: u64) -> bool {
    // eliminate on the column vectors, tracking whether target lies in their span
    let mut basis: Vec<u64> = Vec::new();
    for &c in cols {
        let mut x = c;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let mut t = target;
    for &b in &basis {
        t = t.min(t ^ b);
    }
    t == 0
}

/// Exhaustive search for `alpha: F -> T_e G`, `beta: G -> T_e F` whose
/// composites are homotopic to the canonical maps. `alpha` runs over all
/// homotopy classes; for each, the conditions on `beta` are linear.
pub fn interleaved_oracle(b1: &GradedBarcode, b2: &GradedBarcode, e: f64) -> bool {
    let f = present(b1);
    let g = present(b2);
    let (nf, ng) = (f.gens.len(), g.gens.len());
    let hfg = HomSpace::new(&f, &g, e);
    let hgf = HomSpace::new(&g, &f, e);
    let hff = HomSpace::new(&f, &f, 2.0 * e);
    let hgg = HomSpace::new(&g, &g, 2.0 * e);
    let id = |n: usize| -> Vec<Vec<u8>> { (0..n).map(|i| (0..n).map(|j| u8::from(i == j)).collect()).collect() };
    let tau_f = hff.coords(&flatten(&id(nf)));
    let tau_g = hgg.coords(&flatten(&id(ng)));
    let shift = hff.basis.len();
    assert!(shift + hgg.basis.len() <= 64);
    let target = tau_f | (tau_g << shift);
    let (k1, k2) = (hfg.basis.len(), hgf.basis.len());
    assert!(k1 <= 24, "oracle instance too large");
    // c[t][u]: coordinates of (beta_u alpha_t, alpha_t beta_u) packed into one mask
    let mut c = vec![vec![0u64; k2]; k1];
    for t in 0..k1 {
        let a = hfg.matrix(&hfg.basis[t]);
        for u in 0..k2 {
            let b = hgf.matrix(&hgf.basis[u]);
            let ba = hff.coords(&flatten(&matmul(&b, &a)));
            let ab = hgg.coords(&flatten(&matmul(&a, &b)));
            c[t][u] = ba | (ab << shift);
        }
    }
    // Gray-code walk over alpha
    let mut cols = vec![0u64; k2];
    if solvable(&cols, target) {
        return true;
    }
    for step in 1u64..(1 << k1) {
        let t = step.trailing_zeros() as usize;
        for u in 0..k2 {
            cols[u] ^= c[t][u];
        }
        if solvable(&cols, target) {
            return true;
        }
    }
    false
}

// ---- sublevel pairs by brute force ----------------------------------------

/// Dense coboundary of a complex over F_p, from the cell list alone:
/// `(delta^n)[tau][sigma] = sign` for codimension-one faces.
pub fn coboundaries(k: &CellComplex, p: u64) -> Vec<Vec<u64>> {
    let n = k.cells().len();
    let mut m = vec![vec![0u64; n]; n];
    for t in 0..n {
        for &(s, sign) in k.boundary(t) {
            m[t][s] = (m[t][s] + (sign.rem_euclid(p as i64)) as u64) % p;
        }
    }
    m
}

/// For each degree, `(dim H^n(E, A_c), dim image H^n(E, A_c) -> H^n(E, A_top))`
/// where `A_c` is the full subcomplex on vertices with value `> c` and `A_top`
/// the one on vertices `>= ceiling` (empty without a ceiling).
pub fn relative_dims(
    k: &CellComplex,
    values: &[f64],
    ceiling: Option<f64>,
    c: f64,
    p: u64,
) -> BTreeMap<i32, (usize, usize)> {
    let all = k.cells();
    let delta = coboundaries(k, p);
    let keep: Vec<usize> = (0..all.len())
        .filter(|&i| !ceiling.is_some_and(|t| all[i].vertices.iter().all(|&v| values[v] >= t)))
        .collect();
    let cells: Vec<_> = keep.iter().map(|&i| &all[i]).collect();
    let delta: Vec<Vec<u64>> = keep.iter().map(|&r| keep.iter().map(|&c| delta[r][c]).collect()).collect();
    let in_a: Vec<bool> = cells.iter().map(|x| x.vertices.iter().all(|&v| values[v] > c)).collect();
    let top = cells.iter().map(|x| x.dim).max().unwrap_or(0);
    let mut out = BTreeMap::new();
    for n in 0..=top {
        let here: Vec<usize> = (0..cells.len()).filter(|&i| cells[i].dim == n).collect();
        let up: Vec<usize> = (0..cells.len()).filter(|&i| cells[i].dim == n + 1).collect();
        let down: Vec<usize> = if n == 0 { vec![] } else { (0..cells.len()).filter(|&i| cells[i].dim == n - 1).collect() };
        let block = |rows: &[usize], cols: &[usize]| -> Vec<Vec<u64>> {
            rows.iter().map(|&r| cols.iter().map(|&c| delta[r][c]).collect()).collect()
        };
        let rel = |v: &[usize]| -> Vec<usize> { v.iter().copied().filter(|&i| !in_a[i]).collect() };
        let (rh, ru, rd) = (rel(&here), rel(&up), rel(&down));
        let rel_dim = cohomology_dim(rh.len(), &block(&rh, &rd), &block(&ru, &rh), p);
        // relative cocycles pushed into absolute cochains, against absolute coboundaries
        let zrel = kernel(&block(&ru, &rh), rh.len(), p);
        let bab = block(&here, &down);
        let bcols: Vec<Vec<u64>> = (0..down.len()).map(|j| bab.iter().map(|r| r[j]).collect()).collect();
        let zcols: Vec<Vec<u64>> = zrel
            .iter()
            .map(|z| here.iter().map(|&h| rh.iter().position(|&x| x == h).map_or(0, |i| z[i])).collect())
            .collect();
        let rb = rank(&bcols, p);
        let mut both = bcols.clone();
        both.extend(zcols);
        let image = rank(&both, p) - rb;
        out.insert(n as i32, (rel_dim, image));
    }
    out
}

/// Jump levels of the image filtration, with multiplicity, sampled at the breakpoints.
pub fn naive_spec(k: &CellComplex, values: &[f64], ceiling: Option<f64>, p: u64) -> Vec<(f64, usize)> {
    let mut bps: Vec<f64> = values.iter().copied().filter(|&v| !ceiling.is_some_and(|t| v >= t)).collect();
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bps.dedup();
    let mut prev = 0usize;
    let mut out = Vec::new();
    for &c in &bps {
        let total: usize = relative_dims(k, values, ceiling, c, p).values().map(|x| x.1).sum();
        if total > prev {
            out.push((c, total - prev));
        }
        prev = total;
    }
    out
}

// ---- cup-length by enumeration --------------------------------------------

/// Longest word `r_{i_1} ... r_{i_k}` in the action matrices acting nontrivially
/// on some basis vector; `-1` for the zero module.
pub fn cup_length_oracle(dim: usize, action: &[Vec<Vec<u64>>], p: u64) -> i64 {
    if dim == 0 {
        return -1;
    }
    let apply = |m: &Vec<Vec<u64>>, v: &Vec<u64>| -> Vec<u64> {
        (0..dim).map(|r| (0..dim).map(|c| m[r][c] * v[c] % p).sum::<u64>() % p).collect()
    };
    let mut frontier: Vec<Vec<u64>> = (0..dim)
        .map(|i| (0..dim).map(|j| u64::from(i == j)).collect())
        .collect();
    let mut k = 0;
    loop {
        let mut next = Vec::new();
        for v in &frontier {
            for m in action {
                let w = apply(m, v);
                if w.iter().any(|&x| x != 0) && !next.contains(&w) {
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return k;
        }
        k += 1;
        frontier = next;
        assert!(k <= 64, "action is not nilpotent");
    }
}

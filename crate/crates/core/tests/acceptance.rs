//! Acceptance suite. Run with `cargo test --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tamarkin_core::barcode::{
    cauchy_limit, dprime_distance, epsilon_interleaved, interleaving_distance, shifted_dprime, Bar,
    CauchyBarcodeSequence, CauchyTerm, GradedBarcode, Tail, TOL,
};
use tamarkin_core::demo::{self, Demo};
use tamarkin_core::fcomplex::{
    cone_torsion_bound_check, kernel_isomorphism_cone_check, presentation_sequence, telescope,
    thickening_cone_checks, FilteredComplex,
};
use tamarkin_core::field::{DenseMatrix, PrimeField};
use tamarkin_core::random::{perturb, random_barcode, random_certified_pair, random_symmetric_pair};
use tamarkin_core::specinv::{
    cup_length, gamma_duality_check, ls_check, spectral_norm, subadditivity_check, GradedModule,
    GradedRing, ShortExactSequence,
};
use tamarkin_core::sublevel::{build_pair_filtration, cup_action, CellComplex, SampledFunction};

const F2: PrimeField = PrimeField::F2;

struct Outcome {
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        detail,
        elapsed: Duration::ZERO,
    }
}

// ---- 1 ---------------------------------------------------------------------

fn cone_bound_on_certified_pairs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 1000;
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..n {
        let cert = random_certified_pair(&mut rng, 6, F2);
        let r = cone_torsion_bound_check(&cert).expect("certificate verifies");
        if !r.holds {
            failures += 1;
        }
        if r.bound > 0.0 {
            worst = worst.max(r.torsion / r.bound);
        }
    }
    outcome(
        failures == 0,
        format!("{n} pairs, {failures} over 2(a+b), worst torsion/bound {worst:.3}"),
    )
}

// ---- 2 ---------------------------------------------------------------------

fn geometric_completeness() -> Outcome {
    let Some(Demo::Sequence(seq)) = demo::demo("cauchy-geometric") else { panic!("sequence demo") };
    let last = seq.len() - 1;
    let (limit, cert) = cauchy_limit(&seq).expect("geometric demo is Cauchy");
    let mut bound_ok = true;
    for n in 0..=20 {
        if cert.dprime[n] > 16.0 * cert.tail_sums[n] + TOL {
            bound_ok = false;
        }
    }
    let (items, shifts) = presentation_sequence(&seq, F2).expect("maps from matchings");
    let tel = telescope(&items, &shifts, last).expect("last stage").reduce();
    let agree = tel.approx_eq(&limit, 1e-9);
    let expected = GradedBarcode::from_bars([(0, Bar::finite(0.0, 1.0))]);
    let near = limit.approx_eq(&expected, 1e-9);
    outcome(
        bound_ok && agree && near,
        format!(
            "d'(F_n, F_inf) <= 16 a_>=n for n <= 20: {bound_ok}; telescope({last}) = limit within 1e-9: {agree}; limit [0,1) within 1e-9: {near}"
        ),
    )
}

// ---- 3 ---------------------------------------------------------------------

fn dyadic_offsets(rng: &mut ChaCha8Rng, b: &GradedBarcode) -> Vec<(f64, f64)> {
    b.iter()
        .map(|_| (rng.gen_range(-1..=1) as f64 / 8.0, rng.gen_range(-1..=1) as f64 / 8.0))
        .collect()
}

/// `F_n` moves each endpoint of `b` by `offset * 2^-n`.
fn random_cauchy(rng: &mut ChaCha8Rng, len: usize) -> CauchyBarcodeSequence {
    let b = random_barcode(rng, 5);
    let offsets = dyadic_offsets(rng, &b);
    let item = |n: usize| -> GradedBarcode {
        let s = 0.5f64.powi(n as i32);
        GradedBarcode::from_bars(b.iter().zip(&offsets).map(|((d, bar), (u, v))| {
            let birth = bar.birth + u * s;
            let death = if bar.is_infinite() { f64::INFINITY } else { bar.death + v * s };
            (d, Bar::finite(birth, death))
        }))
    };
    let codes: Vec<GradedBarcode> = (0..len).map(item).collect();
    // F_{len-1} is within 2^-(len-1) / 8 of the limit
    let terms = (0..len)
        .map(|n| CauchyTerm {
            barcode: codes[n].clone(),
            bound: match codes.get(n + 1) {
                Some(next) => interleaving_distance(&codes[n], next),
                None => 0.5f64.powi(n as i32) / 8.0,
            },
        })
        .collect();
    CauchyBarcodeSequence::new(terms, Tail::Zero).expect("valid sequence")
}

fn thickening_constants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut rho_fail = 0;
    let mut six_fail = 0;
    let mut checks = 0;
    for _ in 0..200 {
        let b = random_barcode(&mut rng, 6);
        let c = FilteredComplex::from_barcode(&b, F2).0;
        for a in [0.25, 0.5, 1.0] {
            let r = thickening_cone_checks(&c, a).expect("a >= 0");
            checks += 1;
            if r.rho_torsion > r.rho_bound + TOL {
                rho_fail += 1;
            }
            if r.kernel_torsion > r.kernel_bound + TOL {
                six_fail += 1;
            }
        }
    }
    for _ in 0..200 {
        let cert = random_symmetric_pair(&mut rng, 6, F2);
        checks += 1;
        if !kernel_isomorphism_cone_check(&cert).expect("symmetric").holds {
            six_fail += 1;
        }
    }
    let mut limit_fail = 0;
    let mut sequences = vec![CauchyBarcodeSequence::geometric_demo(41)];
    sequences.extend((0..50).map(|_| random_cauchy(&mut rng, 10)));
    for seq in &sequences {
        let (_, cert) = cauchy_limit(seq).expect("Cauchy by construction");
        let over = cert
            .kernel
            .iter()
            .zip(&cert.tail_sums)
            .any(|(k, a)| *k > 24.0 * a + TOL);
        if over {
            limit_fail += 1;
        }
    }
    outcome(
        rho_fail + six_fail + limit_fail == 0,
        format!(
            "{checks} cone checks ({rho_fail} over 2a, {six_fail} over 6a); {} limits, {limit_fail} over 24 a_>=n",
            sequences.len()
        ),
    )
}

// ---- 4 ---------------------------------------------------------------------

/// Finite-dimensional commutative graded algebra with a monomial basis;
/// basis element 0 is the unit.
struct Algebra {
    degrees: Vec<i32>,
    mul: Vec<Vec<Option<usize>>>,
}

impl Algebra {
    fn exterior(gens: usize) -> Self {
        let n = 1 << gens;
        let degrees = (0..n).map(|s: usize| s.count_ones() as i32).collect();
        let mul = (0..n)
            .map(|s| (0..n).map(|t| (s & t == 0).then_some(s | t)).collect())
            .collect();
        Self { degrees, mul }
    }

    /// `k[x]/x^m` with `x` in degree `d`.
    fn truncated(m: usize, d: i32) -> Self {
        let degrees = (0..m).map(|e| e as i32 * d).collect();
        let mul = (0..m).map(|e| (0..m).map(|f| (e + f < m).then_some(e + f)).collect()).collect();
        Self { degrees, mul }
    }

    fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Positive-degree part as a ring over F_2.
    fn ring(&self) -> GradedRing {
        let n = self.dim();
        let mut products = Vec::new();
        for i in 1..n {
            for j in 1..n {
                if let Some(k) = self.mul[i][j] {
                    products.push((i - 1, j - 1, k - 1, 1));
                }
            }
        }
        GradedRing::new(F2, self.degrees[1..].to_vec(), &products).expect("valid algebra")
    }

    /// Sum of free modules of rank one, shifted up by `shifts`.
    fn free(&self, ring: &GradedRing, shifts: &[i32]) -> GradedModule {
        let n = self.dim();
        let size = n * shifts.len();
        let degrees = shifts.iter().flat_map(|s| self.degrees.iter().map(move |d| d + s)).collect();
        let action = (1..n)
            .map(|r| {
                let mut m = DenseMatrix::zeros(size, size);
                for c in 0..shifts.len() {
                    for e in 0..n {
                        if let Some(p) = self.mul[e][r] {
                            m.set(c * n + p, c * n + e, 1);
                        }
                    }
                }
                m
            })
            .collect();
        GradedModule::new(F2, degrees, action, ring).expect("free module")
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..=1)).collect()
}

/// Random invertible matrix that is block diagonal in the grading.
fn homogeneous_basis(rng: &mut ChaCha8Rng, degrees: &[i32]) -> DenseMatrix {
    let n = degrees.len();
    loop {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if degrees[i] == degrees[j] && rng.gen_bool(0.5) {
                    m.set(i, j, 1);
                }
            }
        }
        if m.rank(F2) == n {
            return m;
        }
    }
}

fn random_module(rng: &mut ChaCha8Rng) -> (GradedRing, GradedModule) {
    let alg = match rng.gen_range(0..3) {
        0 => Algebra::exterior(rng.gen_range(1..=3)),
        1 => Algebra::truncated(rng.gen_range(2..=8), rng.gen_range(1..=2)),
        _ => Algebra::truncated(rng.gen_range(2..=4), 1),
    };
    let ring = alg.ring();
    let copies = (8 / alg.dim()).clamp(1, 3);
    let copies = rng.gen_range(1..=copies);
    let shifts: Vec<i32> = (0..copies).map(|_| rng.gen_range(0..=2)).collect();
    let free = alg.free(&ring, &shifts);
    let basis = homogeneous_basis(rng, free.degrees());
    let module = free.change_basis(&basis).expect("homogeneous invertible basis");
    (ring, module)
}

fn random_ses(rng: &mut ChaCha8Rng, b: &GradedModule) -> ShortExactSequence {
    let k = rng.gen_range(0..=2);
    let gens: Vec<Vec<u32>> = (0..k).map(|_| random_vector(rng, b.len())).collect();
    ShortExactSequence::from_generators(b, &gens).expect("submodule generated by vectors")
}

fn subadditivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut count = 0;
    let mut failures = 0;
    let mut nontrivial = 0;
    while count < 600 {
        let (_ring, b) = random_module(&mut rng);
        let mut module = b;
        // chain: split B, then split the quotient again
        for _ in 0..3 {
            let ses = random_ses(&mut rng, &module);
            let r = subadditivity_check(&ses).expect("exact");
            count += 1;
            if !r.holds {
                failures += 1;
            }
            if !ses.a.is_empty() && !ses.c.is_empty() {
                nontrivial += 1;
            }
            if ses.c.is_empty() {
                break;
            }
            module = ses.c;
        }
    }
    outcome(
        failures == 0,
        format!("{count} sequences ({nontrivial} with A, C nonzero), {failures} violations"),
    )
}

// ---- 5 ---------------------------------------------------------------------

fn metric_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut triangle = 0;
    let mut identity = 0;
    let mut shift = 0;
    let mut rigidity = 0;
    let mut zeros = 0;
    let n = 1000;
    for _ in 0..n {
        let b1 = random_barcode(&mut rng, 5);
        let b2 = perturb(&mut rng, &b1);
        let b3 = perturb(&mut rng, &b1);
        let (d12, d23, d13) = (dprime_distance(&b1, &b2), dprime_distance(&b2, &b3), dprime_distance(&b1, &b3));
        if d13 > d12 + d23 + TOL {
            triangle += 1;
        }
        if dprime_distance(&b1, &b1) != 0.0 {
            identity += 1;
        }
        let c = rng.gen_range(-8..=8) as f64 / 4.0;
        if (dprime_distance(&b1.shift(c), &b2.shift(c)) - d12).abs() > TOL {
            shift += 1;
        }
        // equal multisets up to order still sit at distance zero
        let mut bars: Vec<(i32, Bar)> = b1.iter().map(|(d, b)| (d, *b)).collect();
        bars.reverse();
        let reordered = GradedBarcode::from_bars(bars);
        for (x, y) in [(&b1, &b2), (&b1, &reordered)] {
            if dprime_distance(x, y) <= TOL {
                zeros += 1;
                if !x.approx_eq(y, TOL) {
                    rigidity += 1;
                }
            }
        }
    }
    let fails = triangle + identity + shift + rigidity;
    outcome(
        fails == 0,
        format!(
            "{n} triples: triangle {triangle}, d'(B,B) {identity}, shift {shift}, rigidity {rigidity} failures ({zeros} zero-distance pairs)"
        ),
    )
}

// ---- 6 ---------------------------------------------------------------------

fn cup_length_of(k: &CellComplex) -> i64 {
    let s = SampledFunction::constant(k.num_vertices(), 0.0);
    let pf = build_pair_filtration(k, &s, F2).expect("valid complex");
    let (ring, action) = cup_action(k, &pf).expect("simplicial");
    let degrees: Vec<i32> = pf.classes().iter().map(|&c| pf.complex.generators()[c].degree).collect();
    let module = GradedModule::new(F2, degrees, action, &ring).expect("associative action");
    cup_length(&module)
}

fn cup_lengths() -> Outcome {
    let got = [
        ("S1", cup_length_of(&demo::circle()), 1),
        ("S2", cup_length_of(&demo::sphere()), 1),
        ("T2", cup_length_of(&demo::torus7()), 2),
    ];
    let pass = got.iter().all(|(_, g, w)| g == w);
    let detail = got.iter().map(|(n, g, w)| format!("cl({n}) = {g} (want {w})")).collect::<Vec<_>>().join(", ");
    outcome(pass, detail)
}

// ---- 7 ---------------------------------------------------------------------

fn mesh(name: &str) -> demo::MeshBundle {
    match demo::demo(name) {
        Some(Demo::Mesh(m)) => m,
        _ => panic!("{name} is a mesh demo"),
    }
}

fn spec_on_meshes() -> Outcome {
    let cases: [(&str, Vec<f64>); 4] = [
        ("circle-constant", vec![5.0]),
        ("torus-constant", vec![0.0]),
        ("circle-height", vec![0.0, 2.0]),
        ("torus-morse", vec![0.0, 1.0, 2.0, 3.0]),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, want) in cases {
        let got = mesh(name).spec(F2).expect("graph demo").spec.values;
        pass &= got == want;
        parts.push(format!("{name} {got:?}"));
    }
    let r = mesh("torus-constant").spec(F2).expect("graph demo");
    let ls = ls_check(&r.module, &r.ring).expect("valid module");
    let degenerate = ls.degenerate_level == Some(0.0)
        && ls.quotients.iter().any(|q| q.level == 0.0 && q.cup_length >= 1);
    pass &= degenerate && ls.holds;
    parts.push(format!(
        "torus-constant degenerate level {:?}, quotient cl {}",
        ls.degenerate_level,
        ls.quotients.first().map_or(-1, |q| q.cup_length)
    ));
    outcome(pass, parts.join("; "))
}

// ---- 8 ---------------------------------------------------------------------

fn duality() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["circle-height", "torus-morse"] {
        let m = mesh(name);
        let fwd = m.spec(F2).expect("graph demo");
        let dual = demo::MeshBundle::graph(m.complex.clone(), m.function.dual().values);
        let bwd = dual.spec(F2).expect("graph demo");
        let r = gamma_duality_check(&fwd.barcode, &fwd.module, &bwd.module, 1e-9).expect("nonzero");
        // independent route: unit barcode against the sublevel barcode directly
        let unit = GradedBarcode::unit_with_betti(&fwd.module.dims_by_degree());
        let d = shifted_dprime(&unit, &fwd.barcode);
        let ok = r.holds && (d - r.gamma).abs() <= 1e-9;
        pass &= ok;
        parts.push(format!("{name}: gamma {} shifted d' {}", r.gamma, d));
    }
    for (name, m) in demo::graph_demos() {
        let fwd = m.spec(F2).expect("graph demo");
        let bwd = demo::MeshBundle::graph(m.complex.clone(), m.function.dual().values)
            .spec(F2)
            .expect("graph demo");
        let g = spectral_norm(&fwd.module, &bwd.module).expect("nonzero");
        let osc = m.function.max() - m.function.min();
        if (g - osc).abs() > 1e-9 {
            pass = false;
            parts.push(format!("{name}: gamma {g} vs oscillation {osc}"));
        }
    }
    parts.push(format!("gamma(S,-S) = max - min on {} graph demos", demo::graph_demos().len()));
    outcome(pass, parts.join("; "))
}

// ---- 9 ---------------------------------------------------------------------

fn multisets(types: &[(i32, Bar)], max: usize) -> Vec<GradedBarcode> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(usize, Vec<(i32, Bar)>)> = vec![(0, Vec::new())];
    for _ in 0..max {
        let mut next = Vec::new();
        for (start, v) in &frontier {
            for t in *start..types.len() {
                let mut w = v.clone();
                w.push(types[t]);
                out.push(w.clone());
                next.push((t, w));
            }
        }
        frontier = next;
    }
    out.into_iter().map(GradedBarcode::from_bars).collect()
}

fn oracle_equivalence() -> Outcome {
    let grids: Vec<(Vec<(i32, Bar)>, usize)> = vec![
        (vec![(0, Bar::finite(0.0, 1.0)), (0, Bar::ray(0.0)), (0, Bar::ray(1.0))], 4),
        (
            vec![
                (0, Bar::finite(0.0, 0.5)),
                (0, Bar::finite(0.0, 1.0)),
                (0, Bar::finite(0.5, 1.0)),
                (0, Bar::ray(0.0)),
                (0, Bar::ray(0.5)),
                (0, Bar::ray(1.0)),
            ],
            2,
        ),
        (
            vec![
                (0, Bar::finite(0.0, 1.0)),
                (0, Bar::ray(0.0)),
                (1, Bar::finite(0.0, 1.0)),
                (1, Bar::ray(0.0)),
                (1, Bar::ray(1.0)),
            ],
            2,
        ),
    ];
    let mut instances = 0;
    let mut mismatches = 0;
    for (types, max) in &grids {
        let sets = multisets(types, *max);
        for x in &sets {
            for y in &sets {
                for eps in [0.0, 0.25, 0.5, 1.0] {
                    instances += 1;
                    if epsilon_interleaved(x, y, eps).is_some() != common::interleaved_oracle(x, y, eps) {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    let mut meshes = 0;
    let mut spec_mismatch = Vec::new();
    for name in demo::DEMO_NAMES {
        let Some(Demo::Mesh(m)) = demo::demo(name) else { continue };
        meshes += 1;
        let s = m.effective_function().expect("valid function");
        let r = m.spec(F2).expect("spec");
        let lib: Vec<(f64, usize)> = r.spec.values.iter().copied().zip(r.spec.multiplicity.iter().copied()).collect();
        if lib != common::naive_spec(&m.complex, &s.values, s.ceiling, 2) {
            spec_mismatch.push(*name);
        }
    }
    outcome(
        mismatches == 0 && spec_mismatch.is_empty(),
        format!(
            "interleavings: {instances} instances, {mismatches} disagree; Spec: {meshes} meshes, mismatches {spec_mismatch:?}"
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("cone torsion <= 2(a+b) on certified pairs", cone_bound_on_certified_pairs),
        ("geometric Cauchy limit and telescope", geometric_completeness),
        ("thickening constants 2a / 6a / 24a", thickening_constants),
        ("cup-length subadditivity on exact sequences", subadditivity),
        ("metric axioms for d'", metric_axioms),
        ("cup-lengths of S1, S2, T2", cup_lengths),
        ("Spec on worked meshes and degenerate level", spec_on_meshes),
        ("gamma duality", duality),
        ("oracle equivalence", oracle_equivalence),
    ];
    let results: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let mut o = f();
                    o.elapsed = t.elapsed();
                    o
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut failed = Vec::new();
    for (i, ((name, _), o)) in criteria.iter().zip(&results).enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {}. {name} ({:.2?}): {}", i + 1, o.elapsed, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}

//! Seeded generators for dyadic barcodes and certified pairs.

use rand::Rng;

use crate::barcode::{dprime_witness, Bar, GradedBarcode};
use crate::fcomplex::{certificate_from_matching, InterleavingCertificate};
use crate::field::PrimeField;

/// Multiples of `1/4`.
fn dyadic<R: Rng>(rng: &mut R, lo: i32, hi: i32) -> f64 {
    rng.gen_range(lo..=hi) as f64 / 4.0
}

/// Up to `max_bars` bars in degrees 0 and 1, endpoints on the quarter grid in `[0, 4]`.
pub fn random_barcode<R: Rng>(rng: &mut R, max_bars: usize) -> GradedBarcode {
    let n = rng.gen_range(0..=max_bars);
    let mut b = GradedBarcode::new();
    for _ in 0..n {
        let degree = rng.gen_range(0..=1);
        let birth = dyadic(rng, 0, 16);
        if rng.gen_bool(0.25) {
            b.push(degree, Bar::ray(birth));
        } else {
            b.push(degree, Bar::finite(birth, birth + dyadic(rng, 1, 12)));
        }
    }
    b
}

/// Moves every endpoint by at most `1/2` and sometimes adds or drops a short bar.
pub fn perturb<R: Rng>(rng: &mut R, b: &GradedBarcode) -> GradedBarcode {
    let mut out = GradedBarcode::new();
    for (n, bar) in b.iter() {
        if !bar.is_infinite() && bar.length() <= 0.5 && rng.gen_bool(0.3) {
            continue;
        }
        let birth = bar.birth + dyadic(rng, -2, 2);
        let death = if bar.is_infinite() {
            f64::INFINITY
        } else {
            (bar.death + dyadic(rng, -2, 2)).max(birth + 0.25)
        };
        out.push(n, Bar::new(birth, death).expect("nonempty by construction"));
    }
    if rng.gen_bool(0.3) {
        let birth = dyadic(rng, 0, 16);
        out.push(rng.gen_range(0..=1), Bar::finite(birth, birth + 0.25));
    }
    out
}

/// A random `(a, b)`-isomorphic pair with its explicit certificate. The shifts
/// come from an optimal witness plus random slack on either side.
pub fn random_certified_pair<R: Rng>(
    rng: &mut R,
    max_bars: usize,
    field: PrimeField,
) -> InterleavingCertificate {
    loop {
        let b1 = random_barcode(rng, max_bars);
        let b2 = perturb(rng, &b1);
        if b2.len() > max_bars {
            continue;
        }
        let Some(w) = dprime_witness(&b1, &b2) else { continue };
        let a = w.a + dyadic(rng, 0, 2);
        let b = w.b + dyadic(rng, 0, 2);
        return certificate_from_matching(&b1, &b2, a, b, field).expect("slack keeps the witness valid");
    }
}

/// A symmetric certificate, for the thickening reading.
pub fn random_symmetric_pair<R: Rng>(
    rng: &mut R,
    max_bars: usize,
    field: PrimeField,
) -> InterleavingCertificate {
    loop {
        let b1 = random_barcode(rng, max_bars);
        let b2 = perturb(rng, &b1);
        if b2.len() > max_bars {
            continue;
        }
        let Some(w) = dprime_witness(&b1, &b2) else { continue };
        if w.shift != 0.0 {
            continue;
        }
        let a = w.epsilon + dyadic(rng, 0, 2);
        return certificate_from_matching(&b1, &b2, a, a, field).expect("slack keeps the witness valid");
    }
}

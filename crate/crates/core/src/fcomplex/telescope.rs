//! Shift-realized thickening kernels and truncated telescopes.

use serde::{Deserialize, Serialize};

use super::map::{cone, kernel_isomorphism_cone_check, ChainMap, InterleavingCertificate};
use super::{certificate_from_matching, FcError, FilteredComplex};
use crate::barcode::{CauchyBarcodeSequence, TOL};
use crate::field::{DenseMatrix, PrimeField};

/// `K_a C = T_{-a} C`.
pub fn thickening(c: &FilteredComplex, a: f64) -> FilteredComplex {
    c.shift(-a)
}

/// `rho_{a,0}: K_a C -> C`.
pub fn thickening_map(c: &FilteredComplex, a: f64) -> ChainMap {
    ChainMap::from_matrix(thickening(c, a), c.clone(), 0.0, DenseMatrix::identity(c.len()))
        .expect("identity is grade monotone for a >= 0")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThickeningReport {
    pub a: f64,
    pub rho_torsion: f64,
    pub rho_bound: f64,
    pub kernel_torsion: f64,
    pub kernel_bound: f64,
    pub holds: bool,
}

/// Cone of `rho_{a,0}` against `2a`, and the cone of the canonical kernel
/// `a`-isomorphism between `C` and `T_a C` against `6a`.
pub fn thickening_cone_checks(c: &FilteredComplex, a: f64) -> Result<ThickeningReport, FcError> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(FcError::IncompatibleMap(format!("thickening parameter {a} must be >= 0")));
    }
    let rho_torsion = cone(&thickening_map(c, a))?.reduce().torsion_threshold();
    let shifted = c.shift(a);
    let id = DenseMatrix::identity(c.len());
    let alpha = ChainMap::from_matrix(c.clone(), shifted.clone(), a, id.clone())?;
    let beta = ChainMap::from_matrix(shifted, c.clone(), a, id)?;
    let cert = InterleavingCertificate::certify(alpha, beta)?;
    let kernel = kernel_isomorphism_cone_check(&cert)?;
    let rho_bound = 2.0 * a;
    Ok(ThickeningReport {
        a,
        rho_torsion,
        rho_bound,
        kernel_torsion: kernel.torsion,
        kernel_bound: kernel.bound,
        holds: rho_torsion <= rho_bound + TOL && kernel.holds,
    })
}

/// Truncated homotopy colimit. With `G_n = T_{-a_{>=n}} C_n` and `s` the
/// given maps read as `G_n -> G_{n+1}`, returns `Cone(id - s)` from
/// `sum_{n<N} G_n` to `sum_{n<=N} G_n`. Only the maps of items `n < N` are used.
pub fn telescope(
    seq: &[(FilteredComplex, ChainMap)],
    shifts: &[f64],
    n: usize,
) -> Result<FilteredComplex, FcError> {
    if seq.len() <= n || shifts.len() <= n {
        return Err(FcError::LengthMismatch(format!(
            "stage {n} needs {} items and shifts, got {} and {}",
            n + 1,
            seq.len(),
            shifts.len()
        )));
    }
    let field = seq[0].0.field();
    let stages: Vec<FilteredComplex> = (0..=n).map(|k| seq[k].0.shift(-shifts[k])).collect();
    let mut offsets = Vec::with_capacity(n + 2);
    offsets.push(0);
    for s in &stages {
        offsets.push(offsets.last().unwrap() + s.len());
    }
    let mut target = FilteredComplex::empty(field);
    for s in &stages {
        target = target.direct_sum(s);
    }
    let mut source = FilteredComplex::empty(field);
    for s in &stages[..n] {
        source = source.direct_sum(s);
    }
    let mut m = DenseMatrix::zeros(target.len(), source.len());
    for k in 0..n {
        let f = &seq[k].1;
        if f.source() != &seq[k].0 || f.target() != &seq[k + 1].0 {
            return Err(FcError::IncompatibleMap(format!("map {k} does not go from item {k} to {}", k + 1)));
        }
        if f.shift() > shifts[k] - shifts[k + 1] + TOL {
            return Err(FcError::IncompatibleMap(format!(
                "map {k} has shift {} above a_{k} = {}",
                f.shift(),
                shifts[k] - shifts[k + 1]
            )));
        }
        for j in 0..stages[k].len() {
            m.set(offsets[k] + j, offsets[k] + j, 1);
            for i in 0..stages[k + 1].len() {
                let v = f.matrix().get(i, j);
                if v != 0 {
                    m.set(offsets[k + 1] + i, offsets[k] + j, field.neg(v));
                }
            }
        }
    }
    cone(&ChainMap::from_matrix(source, target, 0.0, m)?)
}

/// Standard presentations of a Cauchy sequence with the canonical maps
/// `C_n -> T_{a_n} C_{n+1}` read off optimal matchings. The last item carries
/// `tau_{0,a}` of itself.
pub fn presentation_sequence(
    seq: &CauchyBarcodeSequence,
    field: PrimeField,
) -> Result<(Vec<(FilteredComplex, ChainMap)>, Vec<f64>), FcError> {
    let terms = seq.terms();
    let mut items = Vec::with_capacity(terms.len());
    for (k, t) in terms.iter().enumerate() {
        let map = match terms.get(k + 1) {
            Some(next) => {
                certificate_from_matching(&t.barcode, &next.barcode, t.bound, t.bound, field)?.alpha
            }
            None => {
                let c = FilteredComplex::from_barcode(&t.barcode, field).0;
                ChainMap::tau(&c, t.bound)
            }
        };
        items.push((map.source().clone(), map));
    }
    let shifts = (0..terms.len()).map(|k| seq.tail_sum(k)).collect();
    Ok((items, shifts))
}

//! Named worked examples and the mesh bundle format shared with the CLI.

use serde::{Deserialize, Serialize};

use crate::barcode::{dprime_witness, Bar, CauchyBarcodeSequence, GradedBarcode};
use crate::fcomplex::{certificate_from_matching, InterleavingCertificate};
use crate::field::{DenseMatrix, PrimeField};
use crate::specinv::GradedRing;
use crate::sublevel::{
    spec_of_function, ActionSource, CellComplex, Clamp, SampledFunction, SublevelError, SublevelSpec,
};

pub const DEMO_NAMES: &[&str] = &[
    "circle-height",
    "circle-constant",
    "torus-morse",
    "torus-constant",
    "sphere",
    "double-well",
    "cauchy-geometric",
    "ray-pair",
];

/// Action of `H^{>=1}(M)` given by hand, for fibered inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionFile {
    pub ring: GradedRing,
    /// Number of basis classes of `H^*(E)`.
    pub classes: usize,
    /// `[k, row, col, c]`: class `col` times `r_k` has coefficient `c` on class `row`.
    #[serde(default)]
    pub action: Vec<(usize, usize, usize, i64)>,
}

impl ActionFile {
    pub fn source(&self, field: PrimeField) -> Result<ActionSource, SublevelError> {
        let n = self.classes;
        let mut action = vec![DenseMatrix::zeros(n, n); self.ring.len()];
        for &(k, r, c, v) in &self.action {
            if k >= action.len() || r >= n || c >= n {
                return Err(SublevelError::InvalidFunction(format!(
                    "action entry ({k}, {r}, {c}) out of range"
                )));
            }
            let x = field.add(action[k].get(r, c), field.from_i64(v));
            action[k].set(r, c, x);
        }
        Ok(ActionSource::Supplied {
            ring: self.ring.clone(),
            action,
        })
    }
}

/// Complex, function and optional fiber data in one JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshBundle {
    pub complex: CellComplex,
    pub function: SampledFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clamp: Option<Clamp>,
    #[serde(default)]
    pub fiber_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionFile>,
}

impl MeshBundle {
    pub fn graph(complex: CellComplex, values: Vec<f64>) -> Self {
        Self {
            complex,
            function: SampledFunction::new(values).expect("demo values are finite"),
            clamp: None,
            fiber_dim: 0,
            action: None,
        }
    }

    /// The function after the clamp, if any.
    pub fn effective_function(&self) -> Result<SampledFunction, SublevelError> {
        match &self.clamp {
            Some(c) => self.function.clamped(c),
            None => Ok(self.function.clone()),
        }
    }

    pub fn action_source(&self, field: PrimeField) -> Result<ActionSource, SublevelError> {
        match &self.action {
            Some(a) => a.source(field),
            None => Ok(ActionSource::Compute),
        }
    }

    pub fn spec(&self, field: PrimeField) -> Result<SublevelSpec, SublevelError> {
        spec_of_function(
            &self.complex,
            &self.effective_function()?,
            &self.action_source(field)?,
            self.fiber_dim,
            field,
        )
    }

    /// Graph case: no fiber, no clamp, products computed from the mesh.
    pub fn is_graph_case(&self) -> bool {
        self.fiber_dim == 0 && self.clamp.is_none() && self.action.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarcodePair {
    pub left: GradedBarcode,
    pub right: GradedBarcode,
    pub certificate: InterleavingCertificate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Demo {
    Mesh(MeshBundle),
    Sequence(CauchyBarcodeSequence),
    Pair(BarcodePair),
}

pub fn circle() -> CellComplex {
    CellComplex::simplicial(None, &[vec![0, 1], vec![1, 2], vec![0, 2]]).expect("circle")
}

/// Boundary of the tetrahedron.
pub fn sphere() -> CellComplex {
    CellComplex::simplicial(None, &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]])
        .expect("sphere")
}

/// Seven-vertex torus.
pub fn torus7() -> CellComplex {
    let tri: Vec<Vec<usize>> = (0..7)
        .flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]])
        .collect();
    CellComplex::simplicial(Some(7), &tri).expect("torus")
}

pub fn torus_grid(n: usize) -> CellComplex {
    CellComplex::cubical(&[n, n], &[true, true]).expect("grid")
}

/// `(2 tri(i) + tri(j)) / 4` on an `n x n` periodic grid, `tri(i) = min(i, n - i)`.
pub fn torus_height(n: usize) -> Vec<f64> {
    let tri = |i: usize| i.min(n - i) as f64;
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            v.push((2.0 * tri(i) + tri(j)) / 4.0);
        }
    }
    v
}

pub fn interval(n: usize) -> CellComplex {
    let edges: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
    CellComplex::simplicial(Some(n), &edges).expect("interval")
}

pub fn ray_pair() -> BarcodePair {
    let left = GradedBarcode::from_bars([(0, Bar::ray(0.0))]);
    let right = GradedBarcode::from_bars([(0, Bar::ray(1.0))]);
    let w = dprime_witness(&left, &right).expect("rays in equal degrees");
    let certificate =
        certificate_from_matching(&left, &right, w.a, w.b, PrimeField::F2).expect("optimal witness certifies");
    BarcodePair {
        left,
        right,
        certificate,
    }
}

pub fn demo(name: &str) -> Option<Demo> {
    let d = match name {
        "circle-height" => Demo::Mesh(MeshBundle::graph(circle(), vec![0.0, 1.0, 2.0])),
        "circle-constant" => Demo::Mesh(MeshBundle::graph(circle(), vec![5.0; 3])),
        "torus-morse" => Demo::Mesh(MeshBundle::graph(torus_grid(8), torus_height(8))),
        "torus-constant" => Demo::Mesh(MeshBundle::graph(torus7(), vec![0.0; 7])),
        "sphere" => Demo::Mesh(MeshBundle::graph(sphere(), vec![0.0, 1.0, 2.0, 3.0])),
        "double-well" => Demo::Mesh(MeshBundle {
            complex: interval(5),
            function: SampledFunction::new(vec![0.0, 0.0, 2.0, 1.0, 0.0]).expect("finite"),
            clamp: Some(Clamp {
                boundary: vec![0, 4],
                margin: 1.0,
            }),
            fiber_dim: 1,
            action: Some(ActionFile {
                ring: GradedRing::zero(PrimeField::F2),
                classes: 1,
                action: Vec::new(),
            }),
        }),
        "cauchy-geometric" => Demo::Sequence(CauchyBarcodeSequence::geometric_demo(41)),
        "ray-pair" => Demo::Pair(ray_pair()),
        _ => return None,
    };
    Some(d)
}

/// Mesh demos that need no supplied action.
pub fn graph_demos() -> Vec<(&'static str, MeshBundle)> {
    DEMO_NAMES
        .iter()
        .filter_map(|&n| match demo(n) {
            Some(Demo::Mesh(m)) if m.is_graph_case() => Some((n, m)),
            _ => None,
        })
        .collect()
}

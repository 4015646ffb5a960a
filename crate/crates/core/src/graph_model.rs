//! Graph structures recovered from a Laplacian, and the augmented normalized
//! operator `P = D~^-1/2 W~ D~^-1/2` used by the GCN.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_core::{dense_eigen, DenseEigen, SymMatrix, Vector};

/// Entries at or below this magnitude are not edges.
pub const EDGE_THRESHOLD: f64 = 1e-10;

const UNIT_EIGENVALUE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeMode {
    /// Positive off-diagonal Laplacian entries (negative edges) are dropped,
    /// as are negative self-loops.
    Clamp,
    /// Keep signed weights.
    Signed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphLaplacian {
    pub laplacian: SymMatrix,
    /// Zero diagonal; self-loops are kept in `self_loops`.
    pub adjacency: SymMatrix,
    /// `D_ii = sum_j W_ij + self_loops_i`
    pub degree: Vector,
    pub self_loops: Vector,
    pub components: usize,
    pub mode: EdgeMode,
}

impl GraphLaplacian {
    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    /// Builds a graph directly from adjacency and self-loop weights.
    pub fn from_parts(adjacency: SymMatrix, self_loops: Vector, mode: EdgeMode) -> Result<Self> {
        let n = adjacency.n();
        if self_loops.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self_loops.len(),
            });
        }
        let mut w = adjacency.into_inner();
        w.fill_diagonal(0.0);
        let adjacency = SymMatrix::new(w)?;
        let degree = Vector::from_fn(n, |i, _| adjacency.as_matrix().row(i).sum() + self_loops[i]);
        let laplacian = SymMatrix::new(DMatrix::from_diagonal(&degree) - adjacency.as_matrix())?;
        let components = count_components(&adjacency);
        Ok(GraphLaplacian {
            laplacian,
            adjacency,
            degree,
            self_loops,
            components,
            mode,
        })
    }

    /// Undirected edges `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let w = self.adjacency[(i, j)];
                if w.abs() > EDGE_THRESHOLD {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// `D - W` from the stored degree and adjacency; equals the (clamped)
    /// input Laplacian.
    pub fn reassemble(&self) -> SymMatrix {
        SymMatrix::new(DMatrix::from_diagonal(&self.degree) - self.adjacency.as_matrix())
            .expect("symmetric parts")
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn count_components(w: &SymMatrix) -> usize {
    let n = w.n();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut count = n;
    for i in 0..n {
        for j in i + 1..n {
            if w[(i, j)].abs() > EDGE_THRESHOLD {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                    count -= 1;
                }
            }
        }
    }
    count
}

/// Splits a Laplacian into adjacency, degree and self-loops.
///
/// `W_ij = -L_ij` off the diagonal; the self-loop of node `i` is whatever
/// remains of `L_ii` after the edge weights, so that `L_ii = D_ii`.
pub fn laplacian_to_graph(l: &SymMatrix, mode: EdgeMode) -> GraphLaplacian {
    let n = l.n();
    let w = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let v = -l[(i, j)];
            match mode {
                EdgeMode::Clamp if v < 0.0 => 0.0,
                _ => v,
            }
        }
    });
    let self_loops = Vector::from_fn(n, |i, _| {
        let s = l[(i, i)] - w.row(i).sum();
        match mode {
            EdgeMode::Clamp => s.max(0.0),
            EdgeMode::Signed => s,
        }
    });
    let adjacency = SymMatrix::symmetrize(w).expect("square by construction");
    GraphLaplacian::from_parts(adjacency, self_loops, mode).expect("consistent dimensions")
}

/// Off-diagonal pairs `(i, j)`, `i < j`, with `|L_ij|` above `rel` times the
/// largest off-diagonal magnitude. Signs are ignored.
pub fn edge_support(l: &SymMatrix, rel: f64) -> Vec<(usize, usize)> {
    let n = l.n();
    let mut max = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            max = max.max(l[(i, j)].abs());
        }
    }
    let cut = (rel * max).max(EDGE_THRESHOLD);
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if l[(i, j)].abs() > cut {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupportScore {
    pub true_positives: usize,
    pub predicted: usize,
    pub actual: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Edge-support agreement of `learned` against `truth`, both thresholded
/// with [`edge_support`] at `rel`.
pub fn support_f1(learned: &SymMatrix, truth: &SymMatrix, rel: f64) -> Result<SupportScore> {
    if learned.n() != truth.n() {
        return Err(Error::DimensionMismatch {
            expected: truth.n(),
            found: learned.n(),
        });
    }
    let predicted = edge_support(learned, rel);
    let actual = edge_support(truth, rel);
    let tp = predicted
        .iter()
        .filter(|e| actual.binary_search(e).is_ok())
        .count();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(tp, predicted.len());
    let recall = ratio(tp, actual.len());
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(SupportScore {
        true_positives: tp,
        predicted: predicted.len(),
        actual: actual.len(),
        precision,
        recall,
        f1,
    })
}

/// Normalized operator `P = D~^-1/2 W~ D~^-1/2` with `W~ = W + diag(self_loops) + I`
/// and `D~ = D + I`, plus its spectrum.
#[derive(Clone, Debug)]
pub struct GcnOperator {
    pub p: SymMatrix,
    /// Ascending eigenvalues of `P`.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub components: usize,
    /// `max_{n <= N - M} |lambda_n|`; 0 when every eigenvalue is 1.
    pub lambda_bound: f64,
    /// `lambda_N - lambda_{N-1}` over distinct eigenvalues (0 if all equal).
    pub gap: f64,
}

impl GcnOperator {
    pub fn n(&self) -> usize {
        self.p.n()
    }

    /// Orthonormal basis of the eigenvalue-1 eigenspace, as columns.
    pub fn invariant_basis(&self) -> DMatrix<f64> {
        let n = self.n();
        let m = self.components;
        self.eigenvectors.columns(n - m, m).into_owned()
    }
}

pub fn build_operator(g: &GraphLaplacian) -> Result<GcnOperator> {
    let n = g.n();
    let d_tilde = Vector::from_fn(n, |i, _| g.degree[i] + 1.0);
    if let Some(i) = d_tilde.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::NonPositiveDegree {
            node: i,
            degree: d_tilde[i],
        });
    }
    let inv_sqrt = d_tilde.map(|d| 1.0 / d.sqrt());
    let p = DMatrix::from_fn(n, n, |i, j| {
        let w = if i == j {
            g.self_loops[i] + 1.0
        } else {
            g.adjacency[(i, j)]
        };
        inv_sqrt[i] * w * inv_sqrt[j]
    });
    let p = SymMatrix::symmetrize(p)?;
    let DenseEigen { values, vectors } = dense_eigen(&p);
    let m = g.components;
    let lambda_bound = values[..n - m]
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let top = values[n - 1];
    let gap = values
        .iter()
        .rev()
        .find(|&&v| top - v > UNIT_EIGENVALUE_TOL)
        .map_or(0.0, |v| top - v);
    Ok(GcnOperator {
        p,
        eigenvalues: values,
        eigenvectors: vectors,
        components: m,
        lambda_bound,
        gap,
    })
}

/// Gap between the two smallest distinct eigenvalues; `distinct_tol` is
/// relative to the spectral radius.
pub fn measure_eigengap(l: &SymMatrix, distinct_tol: f64) -> Result<f64> {
    gap_from_values(&dense_eigen(l).values, distinct_tol)
}

pub(crate) fn gap_from_values(values: &[f64], distinct_tol: f64) -> Result<f64> {
    let radius = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = distinct_tol * radius;
    let first = values[0];
    values
        .iter()
        .find(|&&v| v - first > tol)
        .map(|v| v - first)
        .ok_or(Error::NoDistinctGap { tol })
}

pub const DEFAULT_DISTINCT_TOL: f64 = 1e-6;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphExport {
    n: usize,
    components: usize,
    mode: EdgeMode,
    /// `[i, j, weight]`
    edges: Vec<(usize, usize, f64)>,
    self_loops: Vec<f64>,
    p_eigenvalues: Vec<f64>,
    lambda_bound: f64,
    p_gap: f64,
}

/// Writes the graph export: node count, edge list, self-loops, component
/// count and the eigenvalues of `P`.
pub fn write_graph_export(path: &Path, g: &GraphLaplacian, op: &GcnOperator) -> Result<()> {
    let export = GraphExport {
        n: g.n(),
        components: g.components,
        mode: g.mode,
        edges: g.edges(),
        self_loops: g.self_loops.iter().copied().collect(),
        p_eigenvalues: op.eigenvalues.clone(),
        lambda_bound: op.lambda_bound,
        p_gap: op.gap,
    };
    fs::write(
        path,
        toml::to_string(&export).expect("plain data serializes"),
    )?;
    Ok(())
}

/// Reads a graph export back into adjacency form.
pub fn read_graph_export(path: &Path) -> Result<GraphLaplacian> {
    let text = fs::read_to_string(path)?;
    let export: GraphExport = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    let n = export.n;
    let mut w = DMatrix::zeros(n, n);
    for &(i, j, weight) in &export.edges {
        if i >= n || j >= n {
            return Err(Error::invalid(
                "edges",
                format!("edge ({i}, {j}) out of range"),
            ));
        }
        w[(i, j)] = weight;
        w[(j, i)] = weight;
    }
    GraphLaplacian::from_parts(
        SymMatrix::new(w)?,
        Vector::from_vec(export.self_loops),
        export.mode,
    )
}

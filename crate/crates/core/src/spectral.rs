//! Symmetric eigensolver and the spectral task ground truths.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algo;
use crate::graph::{Graph, NodeId};
use crate::tasks::Difficulty;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {diff:e}")]
    Asymmetry { i: usize, j: usize, diff: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (relative off-diagonal norm {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },
    #[error("{task} is undefined on a graph without edges")]
    DegenerateSpectrum { task: SpectralTaskId },
    #[error("spectral tasks require an undirected graph")]
    Directed,
    #[error("matrix data has {len} entries, expected {n}x{n}")]
    Shape { n: usize, len: usize },
    #[error("spectral component count {spectral} disagrees with union-find count {combinatorial}")]
    ComponentMismatch { spectral: usize, combinatorial: usize },
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SpectralError> {
        let n = rows.len();
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != n) {
            return Err(SpectralError::Shape { n, len: data.len() });
        }
        Ok(Matrix { n, data })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    fn off_diagonal(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    Matrix,
    Adjacency,
    Laplacian,
    DensityMatrix,
}

/// Eigenvalues sorted descending; `vectors[k]` is the unit eigenvector of
/// `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
    pub source: SpectrumSource,
}

impl Spectrum {
    /// Values in ascending order (the usual convention for Laplacians).
    pub fn ascending(&self) -> Vec<f64> {
        self.values.iter().rev().copied().collect()
    }
}

const MAX_SWEEPS: usize = 100;
const OFF_TOL: f64 = 1e-12;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps visit `(p, q)` pairs in row-major order; iteration stops once the
/// off-diagonal Frobenius norm falls to `1e-12 * ||M||_F`.
pub fn eigensym(m: &Matrix) -> Result<Spectrum, SpectralError> {
    let n = m.n();
    let norm = m.frobenius();
    let sym_tol = OFF_TOL * norm.max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            let diff = (m.get(i, j) - m.get(j, i)).abs();
            if diff > sym_tol {
                return Err(SpectralError::Asymmetry { i, j, diff });
            }
        }
    }
    let mut a = m.clone();
    let mut v = Matrix::diagonal(&vec![1.0; n]);
    let target = OFF_TOL * norm;
    let mut converged = a.off_diagonal() <= target;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = a.off_diagonal() <= target;
    }
    if !converged {
        let residual = if norm > 0.0 { a.off_diagonal() / norm } else { 0.0 };
        return Err(SpectralError::Convergence { sweeps, residual });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a.get(y, y).total_cmp(&a.get(x, x)).then(x.cmp(&y)));
    let values = order.iter().map(|&k| a.get(k, k)).collect();
    let vectors = order.iter().map(|&k| (0..n).map(|i| v.get(i, k)).collect()).collect();
    Ok(Spectrum { values, vectors: Some(vectors), source: SpectrumSource::Matrix })
}

/// One Jacobi rotation zeroing `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    if apq == 0.0 {
        return;
    }
    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.n();
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, c * akp - s * akq);
        a.set(k, q, s * akp + c * akq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, c * apk - s * aqk);
        a.set(q, k, s * apk + c * aqk);
    }
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, c * vkp - s * vkq);
        v.set(k, q, s * vkp + c * vkq);
    }
}

pub fn adjacency_matrix(g: &Graph) -> Matrix {
    let mut m = Matrix::zeros(g.n() as usize);
    for e in g.edges() {
        let (s, t) = (e.source as usize - 1, e.target as usize - 1);
        m.set(s, t, 1.0);
        m.set(t, s, 1.0);
    }
    m
}

/// Combinatorial Laplacian `D - A`.
pub fn laplacian_matrix(g: &Graph) -> Matrix {
    let mut m = adjacency_matrix(g);
    let n = m.n();
    for i in 0..n {
        let d: f64 = (0..n).map(|j| m.get(i, j)).sum();
        for j in 0..n {
            m.set(i, j, -m.get(i, j));
        }
        m.set(i, i, d);
    }
    m
}

/// Symmetric normalized Laplacian `I - D^-1/2 A D^-1/2`; isolated nodes get
/// an all-zero row.
pub fn normalized_laplacian_matrix(g: &Graph) -> Matrix {
    let a = adjacency_matrix(g);
    let n = a.n();
    let deg: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a.get(i, j)).sum()).collect();
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let v = if i == j {
                if deg[i] > 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else if a.get(i, j) != 0.0 {
                -1.0 / (deg[i] * deg[j]).sqrt()
            } else {
                0.0
            };
            m.set(i, j, v);
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralTaskId {
    GraphEnergy,
    NComponents,
    SumLambdaSquared,
    AlgebraicConnectivity,
    EstradaIndex,
    LaplacianEnergy,
    NaturalConnectivity,
    SpectralGap,
    SpectralRadius,
    EigenvectorCentTop,
    HeatTraceT1,
    VonNeumannEntropy,
}

impl SpectralTaskId {
    pub const ALL: [SpectralTaskId; 12] = [
        SpectralTaskId::GraphEnergy,
        SpectralTaskId::NComponents,
        SpectralTaskId::SumLambdaSquared,
        SpectralTaskId::AlgebraicConnectivity,
        SpectralTaskId::EstradaIndex,
        SpectralTaskId::LaplacianEnergy,
        SpectralTaskId::NaturalConnectivity,
        SpectralTaskId::SpectralGap,
        SpectralTaskId::SpectralRadius,
        SpectralTaskId::EigenvectorCentTop,
        SpectralTaskId::HeatTraceT1,
        SpectralTaskId::VonNeumannEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpectralTaskId::GraphEnergy => "graph_energy",
            SpectralTaskId::NComponents => "n_components",
            SpectralTaskId::SumLambdaSquared => "sum_lambda_squared",
            SpectralTaskId::AlgebraicConnectivity => "algebraic_connectivity",
            SpectralTaskId::EstradaIndex => "estrada_index",
            SpectralTaskId::LaplacianEnergy => "laplacian_energy",
            SpectralTaskId::NaturalConnectivity => "natural_connectivity",
            SpectralTaskId::SpectralGap => "spectral_gap",
            SpectralTaskId::SpectralRadius => "spectral_radius",
            SpectralTaskId::EigenvectorCentTop => "eigenvector_cent_top",
            SpectralTaskId::HeatTraceT1 => "heat_trace_t1",
            SpectralTaskId::VonNeumannEntropy => "von_neumann_entropy",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        SpectralTaskId::ALL.into_iter().find(|t| t.name() == name)
    }

    pub fn difficulty(self) -> Difficulty {
        use SpectralTaskId::*;
        match self {
            GraphEnergy | NComponents | SumLambdaSquared => Difficulty::Easy,
            AlgebraicConnectivity
            | EstradaIndex
            | LaplacianEnergy
            | NaturalConnectivity
            | SpectralGap
            | SpectralRadius => Difficulty::Medium,
            EigenvectorCentTop | HeatTraceT1 | VonNeumannEntropy => Difficulty::Hard,
        }
    }
}

impl std::fmt::Display for SpectralTaskId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianKind {
    #[default]
    Combinatorial,
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    /// `λ1 - λ2` of the adjacency matrix.
    #[default]
    Adjacency,
    /// Second-smallest Laplacian eigenvalue.
    LaplacianMu2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    pub laplacian: LaplacianKind,
    pub gap: GapKind,
}

pub fn spectral_truth(task: SpectralTaskId, g: &Graph) -> Result<f64, SpectralError> {
    spectral_truth_with(task, g, &SpectralConfig::default())
}

/// Results within this distance of zero are reported as exactly zero, so a
/// vanishing quantity does not depend on the labeling through round-off.
pub const ZERO_SNAP: f64 = 1e-10;

pub fn spectral_truth_with(task: SpectralTaskId, g: &Graph, cfg: &SpectralConfig) -> Result<f64, SpectralError> {
    let value = raw_truth(task, g, cfg)?;
    Ok(if value.abs() <= ZERO_SNAP { 0.0 } else { value })
}

fn raw_truth(task: SpectralTaskId, g: &Graph, cfg: &SpectralConfig) -> Result<f64, SpectralError> {
    if g.is_directed() {
        return Err(SpectralError::Directed);
    }
    let n = g.n() as f64;
    let adjacency = || eigensym(&adjacency_matrix(g)).map(|s| s.values);
    let laplacian = || {
        let m = match cfg.laplacian {
            LaplacianKind::Combinatorial => laplacian_matrix(g),
            LaplacianKind::Normalized => normalized_laplacian_matrix(g),
        };
        let trace = m.trace();
        // positive semidefinite; tiny negative round-off is clamped
        eigensym(&m).map(|s| (s.ascending().into_iter().map(|x| x.max(0.0)).collect::<Vec<_>>(), trace))
    };
    use SpectralTaskId::*;
    Ok(match task {
        GraphEnergy => adjacency()?.iter().map(|l| l.abs()).sum(),
        SumLambdaSquared => adjacency()?.iter().map(|l| l * l).sum(),
        NComponents => {
            let mu = eigensym(&laplacian_matrix(g))?.ascending();
            let spectral = mu.iter().filter(|&&m| m <= 1e-8 * n).count();
            let combinatorial = algo::component_count(g);
            if spectral != combinatorial {
                return Err(SpectralError::ComponentMismatch { spectral, combinatorial });
            }
            spectral as f64
        }
        AlgebraicConnectivity => laplacian()?.0.get(1).copied().unwrap_or(0.0),
        EstradaIndex => adjacency()?.iter().map(|l| l.exp()).sum(),
        LaplacianEnergy => {
            let (mu, trace) = laplacian()?;
            let mean = trace / n;
            mu.iter().map(|m| (m - mean).abs()).sum()
        }
        NaturalConnectivity => (adjacency()?.iter().map(|l| l.exp()).sum::<f64>() / n).ln(),
        SpectralGap => match cfg.gap {
            GapKind::Adjacency => {
                let l = adjacency()?;
                if l.len() < 2 {
                    0.0
                } else {
                    l[0] - l[1]
                }
            }
            GapKind::LaplacianMu2 => laplacian()?.0.get(1).copied().unwrap_or(0.0),
        },
        SpectralRadius => adjacency()?.iter().map(|l| l.abs()).fold(0.0, f64::max),
        EigenvectorCentTop => eigenvector_cent_top(g)?,
        HeatTraceT1 => laplacian()?.0.iter().map(|m| (-m).exp()).sum(),
        VonNeumannEntropy => {
            let (mu, trace) = laplacian()?;
            if g.m() == 0 || trace <= 0.0 {
                return Err(SpectralError::DegenerateSpectrum { task });
            }
            mu.iter().map(|m| (m / trace).max(0.0)).filter(|&s| s > 0.0).map(|s| -s * s.ln()).sum()
        }
    })
}

/// Largest entry of the unit principal eigenvector, computed on the largest
/// component. Among equally large components the one with the larger
/// spectral radius wins, then the larger entry, so the value does not depend
/// on labels.
fn eigenvector_cent_top(g: &Graph) -> Result<f64, SpectralError> {
    if g.m() == 0 {
        return Err(SpectralError::DegenerateSpectrum { task: SpectralTaskId::EigenvectorCentTop });
    }
    let comps = algo::components(g);
    let largest = comps.iter().map(Vec::len).max().unwrap_or(0);
    let mut best: Option<(f64, f64)> = None;
    for comp in comps.iter().filter(|c| c.len() == largest) {
        let sub = induced_adjacency(g, comp);
        let spec = eigensym(&sub)?;
        let mut vec = spec.vectors.expect("eigensym returns vectors")[0].clone();
        if vec.iter().sum::<f64>() < 0.0 {
            vec.iter_mut().for_each(|x| *x = -*x);
        }
        let top = vec.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let cand = (spec.values[0], top);
        best = match best {
            None => Some(cand),
            Some(b) if cand.0 > b.0 + 1e-9 || ((cand.0 - b.0).abs() <= 1e-9 && cand.1 > b.1) => Some(cand),
            keep => keep,
        };
    }
    Ok(best.expect("graph has edges, so some component does").1)
}

fn induced_adjacency(g: &Graph, nodes: &[NodeId]) -> Matrix {
    let mut index = vec![usize::MAX; g.n() as usize + 1];
    for (i, &u) in nodes.iter().enumerate() {
        index[u as usize] = i;
    }
    let mut m = Matrix::zeros(nodes.len());
    for e in g.edges() {
        let (s, t) = (index[e.source as usize], index[e.target as usize]);
        if s != usize::MAX && t != usize::MAX {
            m.set(s, t, 1.0);
            m.set(t, s, 1.0);
        }
    }
    m
}

/// Rounds to 12 significant digits, the precision of exported truths.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralTruthRecord {
    pub task: String,
    pub graph_id: String,
    pub value: f64,
}

/// One JSON line per record, values at 12 significant digits.
pub fn export_truths(records: &[SpectralTruthRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let rounded = SpectralTruthRecord { value: round_sig(r.value, 12), ..r.clone() };
        out.push_str(&serde_json::to_string(&rounded).expect("records serialize"));
        out.push('\n');
    }
    out
}

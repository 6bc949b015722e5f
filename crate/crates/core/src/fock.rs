//! Brute-force two-mode evolution in a truncated Fock space.
//!
//! `H = iξ(a_L†² − a_L²) + iχ(a_L†a_R − a_L a_R†)` conserves the parity of
//! `n_L + n_R`, so the dense eigendecomposition is done per parity block.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{require, Error, Result};
use crate::lindblad::DEFAULT_TAIL;
use crate::linalg::max_abs;

/// Population allowed in the two highest levels of either mode.
pub const TRUNCATION_BUDGET: f64 = 1e-6;

/// Dense operator on `|n_L⟩⊗|n_R⟩`, indexed `n_L·cutoff_r + n_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeOperator {
    pub cutoff_l: usize,
    pub cutoff_r: usize,
    pub matrix: DMatrix<Complex64>,
}

impl TwoModeOperator {
    pub fn index(&self, nl: usize, nr: usize) -> usize {
        nl * self.cutoff_r + nr
    }

    pub fn dim(&self) -> usize {
        self.cutoff_l * self.cutoff_r
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }
}

pub fn build_heff(xi: f64, chi: f64, cutoff_l: usize, cutoff_r: usize) -> Result<TwoModeOperator> {
    require(cutoff_l >= 2 && cutoff_r >= 2, "cutoff", || {
        format!("both cutoffs must be at least 2, got {cutoff_l}x{cutoff_r}")
    })?;
    let dim = cutoff_l * cutoff_r;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    let idx = |nl: usize, nr: usize| nl * cutoff_r + nr;
    for nl in 0..cutoff_l {
        for nr in 0..cutoff_r {
            let from = idx(nl, nr);
            if nl + 2 < cutoff_l {
                let w = ((nl + 1) as f64 * (nl + 2) as f64).sqrt();
                let to = idx(nl + 2, nr);
                h[(to, from)] += Complex64::new(0.0, xi * w);
                h[(from, to)] += Complex64::new(0.0, -xi * w);
            }
            if nl + 1 < cutoff_l && nr >= 1 {
                let w = ((nl + 1) as f64 * nr as f64).sqrt();
                let to = idx(nl + 1, nr - 1);
                h[(to, from)] += Complex64::new(0.0, chi * w);
                h[(from, to)] += Complex64::new(0.0, -chi * w);
            }
        }
    }
    Ok(TwoModeOperator {
        cutoff_l,
        cutoff_r,
        matrix: h,
    })
}

/// Diagonal product state of two geometric distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    pub cutoff_l: usize,
    pub cutoff_r: usize,
    pub populations: Vec<f64>,
}

fn geometric(n0: f64, cutoff: usize) -> Result<Vec<f64>> {
    require(n0 >= 0.0 && n0.is_finite(), "occupation", || {
        format!("must be non-negative, got {n0}")
    })?;
    let q = n0 / (n0 + 1.0);
    let tail = q.powi(cutoff as i32);
    if tail > DEFAULT_TAIL {
        return Err(Error::CutoffTooSmall { cutoff, tail });
    }
    let w: Vec<f64> = (0..cutoff).map(|k| q.powi(k as i32)).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

impl TwoModeState {
    pub fn thermal(n_l0: f64, n_r0: f64, cutoff_l: usize, cutoff_r: usize) -> Result<Self> {
        let pl = geometric(n_l0, cutoff_l)?;
        let pr = geometric(n_r0, cutoff_r)?;
        let mut populations = Vec::with_capacity(cutoff_l * cutoff_r);
        for a in &pl {
            for b in &pr {
                populations.push(a * b);
            }
        }
        Ok(Self {
            cutoff_l,
            cutoff_r,
            populations,
        })
    }

    pub fn vacuum(cutoff_l: usize, cutoff_r: usize) -> Result<Self> {
        Self::thermal(0.0, 0.0, cutoff_l, cutoff_r)
    }

    pub fn occupations(&self) -> (f64, f64) {
        occupations_of(self.cutoff_r, &self.populations)
    }
}

fn occupations_of(cutoff_r: usize, pops: &[f64]) -> (f64, f64) {
    let mut nl = 0.0;
    let mut nr = 0.0;
    for (k, p) in pops.iter().enumerate() {
        nl += (k / cutoff_r) as f64 * p;
        nr += (k % cutoff_r) as f64 * p;
    }
    (nl, nr)
}

struct Block {
    indices: Vec<usize>,
    vectors: DMatrix<Complex64>,
    values: Vec<f64>,
}

/// Spectral representation of `exp(−iHT)`.
pub struct FockPropagator {
    cutoff_l: usize,
    cutoff_r: usize,
    blocks: Vec<Block>,
}

impl FockPropagator {
    pub fn new(h: &TwoModeOperator) -> Self {
        let cr = h.cutoff_r;
        let blocks = (0..2)
            .map(|parity| {
                let indices: Vec<usize> = (0..h.dim())
                    .filter(|k| (k / cr + k % cr) % 2 == parity)
                    .collect();
                let sub = DMatrix::from_fn(indices.len(), indices.len(), |i, j| {
                    h.matrix[(indices[i], indices[j])]
                });
                let eig = SymmetricEigen::new(sub);
                Block {
                    indices,
                    vectors: eig.eigenvectors,
                    values: eig.eigenvalues.iter().copied().collect(),
                }
            })
            .collect();
        Self {
            cutoff_l: h.cutoff_l,
            cutoff_r: h.cutoff_r,
            blocks,
        }
    }

    fn block_unitary(b: &Block, t: f64) -> DMatrix<Complex64> {
        let phases: Vec<Complex64> = b
            .values
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l * t))
            .collect();
        let mut left = b.vectors.clone();
        for (j, ph) in phases.iter().enumerate() {
            for i in 0..left.nrows() {
                left[(i, j)] *= ph;
            }
        }
        left * b.vectors.adjoint()
    }

    /// Full `U = exp(−iHT)`.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let dim = self.cutoff_l * self.cutoff_r;
        let mut u = DMatrix::zeros(dim, dim);
        for b in &self.blocks {
            let ub = Self::block_unitary(b, t);
            for (i, &gi) in b.indices.iter().enumerate() {
                for (j, &gj) in b.indices.iter().enumerate() {
                    u[(gi, gj)] = ub[(i, j)];
                }
            }
        }
        u
    }

    /// Diagonal of `U ρ₀ U†` for a diagonal `ρ₀`.
    pub fn evolve_populations(&self, rho0: &TwoModeState, t: f64) -> Vec<f64> {
        let dim = self.cutoff_l * self.cutoff_r;
        let mut out = vec![0.0; dim];
        for b in &self.blocks {
            let ub = Self::block_unitary(b, t);
            for (i, &gi) in b.indices.iter().enumerate() {
                out[gi] = b
                    .indices
                    .iter()
                    .enumerate()
                    .map(|(j, &gj)| rho0.populations[gj] * ub[(i, j)].norm_sqr())
                    .sum();
            }
        }
        out
    }

    /// `(⟨N_L⟩, ⟨N_R⟩)` at `t`, refusing results that leak past the cutoffs.
    pub fn expectations(&self, rho0: &TwoModeState, t: f64) -> Result<(f64, f64)> {
        require(
            rho0.cutoff_l == self.cutoff_l && rho0.cutoff_r == self.cutoff_r,
            "rho0",
            || "state and Hamiltonian cutoffs differ".into(),
        )?;
        let pops = self.evolve_populations(rho0, t);
        let cr = self.cutoff_r;
        let top: f64 = pops
            .iter()
            .enumerate()
            .filter(|(k, _)| k / cr + 2 >= self.cutoff_l || k % cr + 2 >= cr)
            .map(|(_, p)| p)
            .sum();
        if top > TRUNCATION_BUDGET {
            return Err(Error::Truncation { population: top });
        }
        Ok(occupations_of(cr, &pops))
    }
}

/// `(Tr{N_L U ρ₀ U†}, Tr{N_R U ρ₀ U†})` with `U = exp(−iHT)`.
pub fn evolve_expectations(h: &TwoModeOperator, rho0: &TwoModeState, t: f64) -> Result<(f64, f64)> {
    FockPropagator::new(h).expectations(rho0, t)
}

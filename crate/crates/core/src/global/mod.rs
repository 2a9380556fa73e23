//! Partition-of-unity assembly of local interpolants into a global operator
//! `I phi = sum_q psi_q (I_q phi|_Q~q)` and its mean-free variant `J`.

mod plan;
mod reports;

pub use plan::UniformPlan;
pub use reports::{
    estimate_global_constants, global_error_norm, verify_boundedness, verify_global_error,
    BoundednessReport, EpsTable, GlobalErrorReport, GlobalErrorRow,
};

use crate::cover::{Cover, CoverError, PartitionOfUnity};
use crate::interp::{apply_local, ApplyOptions, InterpError, LocalInterpolant, SpectralSampler};
use crate::spectral::{SpectralField, VectorField};
use ndarray::Array2;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GlobalError {
    #[error("cell/operator count mismatch: {cells} cells, {ops} operators")]
    CountMismatch { cells: usize, ops: usize },
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Spectral(#[from] crate::spectral::SpectralError),
    #[error("order violation: l = {l} exceeds global order m = {m}")]
    OrderViolation { l: usize, m: usize },
}

/// The four hybrid-family categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyCategory {
    RepeatedUniform,
    RepeatedNonUniform,
    HybridUniform,
    HybridNonUniform,
}

/// A subordinate global interpolant observable operator of order
/// `m = inf_q m_q` at level `k = sup_q k_q`.
pub struct GlobalInterpolant {
    cover: Cover,
    pou: PartitionOfUnity,
    locals: Vec<LocalInterpolant>,
    m: usize,
    k: usize,
    generic: bool,
    optimal: bool,
    category: FamilyCategory,
}

impl GlobalInterpolant {
    /// Assemble from one local operator per cell; builds the subordinate
    /// partition of unity (smoothness 4).
    pub fn assemble(cover: Cover, locals: Vec<LocalInterpolant>) -> Result<Self, GlobalError> {
        if locals.len() != cover.len() {
            return Err(GlobalError::CountMismatch {
                cells: cover.len(),
                ops: locals.len(),
            });
        }
        let pou = PartitionOfUnity::build(&cover, 4)?;
        let m = locals.iter().map(|o| o.order).min().unwrap();
        let k = locals.iter().map(|o| o.level).max().unwrap();
        let generic = locals
            .iter()
            .all(|o| o.order == locals[0].order && o.level == locals[0].level);
        let optimal = locals.iter().all(|o| o.optimal);
        let repeated = locals
            .iter()
            .all(|o| std::mem::discriminant(&o.kind) == std::mem::discriminant(&locals[0].kind));
        let category = match (repeated, generic) {
            (true, true) => FamilyCategory::RepeatedUniform,
            (true, false) => FamilyCategory::RepeatedNonUniform,
            (false, true) => FamilyCategory::HybridUniform,
            (false, false) => FamilyCategory::HybridNonUniform,
        };
        Ok(GlobalInterpolant {
            cover,
            pou,
            locals,
            m,
            k,
            generic,
            optimal,
            category,
        })
    }

    pub fn uniform(cover: Cover, op: LocalInterpolant) -> Result<Self, GlobalError> {
        let n = cover.len();
        Self::assemble(cover, vec![op; n])
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn pou(&self) -> &PartitionOfUnity {
        &self.pou
    }

    pub fn locals(&self) -> &[LocalInterpolant] {
        &self.locals
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn level(&self) -> usize {
        self.k
    }

    pub fn is_generic(&self) -> bool {
        self.generic
    }

    pub fn is_optimal(&self) -> bool {
        self.optimal
    }

    pub fn category(&self) -> FamilyCategory {
        self.category
    }

    pub fn uniform_scale(&self) -> Option<f64> {
        self.cover.uniform_scale()
    }

    /// Apply `I` to a field, returning physical samples of the blended
    /// output on the field's grid (the output is generally not mean-free).
    ///
    /// Uses the uniform-lattice fast path when available, otherwise the
    /// generic per-cell path.
    pub fn apply(&self, phi: &SpectralField) -> Result<Array2<f64>, GlobalError> {
        if let Some(plan) = self.plan(phi.grid().n())? {
            return Ok(plan.apply(phi));
        }
        self.apply_generic(phi, ApplyOptions::default())
    }

    /// Generic per-cell application through [`apply_local`]; exact but slow,
    /// used for non-uniform covers and as the oracle for the fast path.
    pub fn apply_generic(
        &self,
        phi: &SpectralField,
        opts: ApplyOptions,
    ) -> Result<Array2<f64>, GlobalError> {
        let grid = phi.grid();
        let n = grid.n();
        let sampler = SpectralSampler::new(phi);
        let mut out = Array2::<f64>::zeros((n, n));
        for (q, (cell, op)) in self.cover.cells().iter().zip(&self.locals).enumerate() {
            let local = apply_local(op, cell, &sampler, opts)?;
            let supp = self.pou.support(q);
            for i in 0..n {
                let y = grid.coord(i);
                for j in 0..n {
                    let x = grid.coord(j);
                    if !supp.contains(x, y) {
                        continue;
                    }
                    let w = self.pou.eval(q, x, y);
                    if w != 0.0 {
                        out[[i, j]] += w * local.eval(x, y);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Precompute the fast application plan for grid size `n`, when the
    /// cover/operator family supports it.
    pub fn plan(&self, n: usize) -> Result<Option<UniformPlan>, GlobalError> {
        UniformPlan::build(self, n).map_err(Into::into)
    }

    /// The mean-free interpolant `J phi = I phi - <I phi>`, returned as a
    /// spectral field (the zero mode is removed exactly).
    pub fn mean_free(&self, phi: &SpectralField) -> Result<SpectralField, GlobalError> {
        let out = self.apply(phi)?;
        Ok(SpectralField::from_physical(phi.grid(), &out).expect("grid sizes match"))
    }

    /// Componentwise `J` on a vector field.
    pub fn mean_free_vec(&self, v: &VectorField) -> Result<VectorField, GlobalError> {
        Ok(VectorField {
            x: self.mean_free(&v.x)?,
            y: self.mean_free(&v.y)?,
        })
    }
}

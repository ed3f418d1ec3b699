//! Slice ranks of tensor subspaces: SR(W) = min Σ codim(U_i) over per-mode
//! functional subspaces with <W, U_1 ⊗ ... ⊗ U_d> = 0, searched in primal
//! form (the U_i are annihilators of the primal witness tuple), and the
//! derived quantity SR_k(W) = max over k-dimensional subspaces V of W.

use crate::error::{Error, Result};
use crate::gf::FieldElem;
use crate::ranks::decomp::min_mode_cover;
use crate::ranks::SearchGuard;
use crate::subspace::{
    enumerate_subspaces_guarded, EnumerationGuard, Subspace, TensorSubspace,
};
use crate::tensor::{contract, Contracted, Tensor};

/// Exact SR(W) together with the dual witness tuple (U_1, ..., U_d): the
/// value is Σ codim(U_i) and <W, U_1 ⊗ ... ⊗ U_d> = 0, re-verified here by
/// contracting every basis tensor of W against every product of basis
/// functionals.
pub fn sr_subspace(w: &TensorSubspace) -> Result<(u32, Vec<Subspace>)> {
    sr_subspace_guarded(w, &SearchGuard::default())
}

pub fn sr_subspace_guarded(
    w: &TensorSubspace,
    guard: &SearchGuard,
) -> Result<(u32, Vec<Subspace>)> {
    let (r, tuple) = min_mode_cover(w.field(), w.shape(), w.basis(), guard)?;
    let witness: Vec<Subspace> = tuple.iter().map(|a| a.annihilator()).collect();

    // independent re-verification through the public contraction API
    let d = w.shape().len();
    let modes: Vec<usize> = (0..d).collect();
    let rows: Vec<Vec<Vec<FieldElem>>> = witness.iter().map(|u| u.basis_rows()).collect();
    let mut pick = vec![0usize; d];
    if rows.iter().all(|r| !r.is_empty()) {
        'all: loop {
            let functionals: Vec<Vec<FieldElem>> =
                (0..d).map(|i| rows[i][pick[i]].clone()).collect();
            for b in w.basis() {
                let got = contract(b, &modes, &functionals)?;
                let ok = matches!(got, Contracted::Scalar(s) if s == w.field().zero());
                if !ok {
                    return Err(Error::VerificationFailed(
                        "witness tuple does not annihilate the subspace".into(),
                    ));
                }
            }
            let mut i = d;
            loop {
                if i == 0 {
                    break 'all;
                }
                i -= 1;
                pick[i] += 1;
                if pick[i] < rows[i].len() {
                    break;
                }
                pick[i] = 0;
            }
        }
    }
    Ok((r as u32, witness))
}

/// SR_k(W): the maximum of SR over k-dimensional subspaces of W.
/// k = dim W reduces to SR(W).
pub fn sr_k_subspace(w: &TensorSubspace, k: usize) -> Result<u32> {
    sr_k_subspace_guarded(w, k, &SearchGuard::default(), &EnumerationGuard::default())
}

pub fn sr_k_subspace_guarded(
    w: &TensorSubspace,
    k: usize,
    guard: &SearchGuard,
    enum_guard: &EnumerationGuard,
) -> Result<u32> {
    if k < 1 || k > w.dim() {
        return Err(Error::InvalidInput(format!(
            "k = {k} outside 1..=dim W = {}",
            w.dim()
        )));
    }
    let f = w.field();
    // k-dimensional subspaces of the coordinate space of W
    let coords = enumerate_subspaces_guarded(w.dim(), f, Some(k), enum_guard)?;
    let mut best = 0u32;
    for c in coords {
        let basis: Vec<Tensor> = c
            .basis_rows()
            .into_iter()
            .map(|row| {
                let mut entries = vec![f.zero(); w.shape().iter().product()];
                for (j, &coef) in row.iter().enumerate() {
                    if coef == f.zero() {
                        continue;
                    }
                    for (slot, &e) in entries.iter_mut().zip(w.basis()[j].entries()) {
                        *slot = f.add(*slot, f.mul(coef, e));
                    }
                }
                Tensor::new(f.clone(), w.shape().to_vec(), entries)
            })
            .collect::<Result<Vec<_>>>()?;
        let v = TensorSubspace::new(basis)?;
        let (val, _) = sr_subspace_guarded(&v, guard)?;
        best = best.max(val);
    }
    Ok(best)
}

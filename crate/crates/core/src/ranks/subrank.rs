//! Subrank witnesses: Q(T) >= s iff Id_s ⪯ T. The search enumerates the
//! matrices on all modes but the last in lexicographic order (skipping
//! rank-deficient ones, which cannot reach Id_s) and solves for the last
//! matrix by an exact linear system, which characterizes every completion.
//! A `None` is therefore an exhaustive proof that Q(T) < s.

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::mat::Matrix;
use crate::ranks::{RestrictionCert, SearchGuard};
use crate::tensor::{apply_matrices, identity_tensor, strides_of, MatrixTuple, Tensor};

/// All s x n matrices of full row rank s, ascending by the row-major
/// encoding with the first entry most significant.
fn full_rank_matrices(f: &FieldSpec, s: usize, n: usize) -> Vec<Matrix> {
    let q = f.q();
    let cells = s * n;
    let total = (q as u128).pow(cells as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut data = Vec::with_capacity(cells);
        let mut rem = code;
        let mut div = total / q as u128;
        for _ in 0..cells {
            data.push(f.elem_unchecked((rem / div) as u64));
            rem %= div;
            div = (div / q as u128).max(1);
        }
        let m = Matrix::new(f.clone(), s, n, data).expect("sized");
        if m.rank() == s {
            out.push(m);
        }
    }
    out
}

pub fn subrank_at_least(t: &Tensor, s: usize) -> Result<Option<RestrictionCert>> {
    subrank_at_least_guarded(t, s, &SearchGuard::default())
}

pub fn subrank_at_least_guarded(
    t: &Tensor,
    s: usize,
    guard: &SearchGuard,
) -> Result<Option<RestrictionCert>> {
    if s < 1 {
        return Err(Error::InvalidInput("subrank target must be >= 1".into()));
    }
    let f = t.field();
    let q = f.q();
    let sum_n: u32 = t.shape().iter().map(|&n| n as u32).sum();
    let mut points: u128 = 1;
    for _ in 0..s as u32 * sum_n {
        points = points
            .checked_mul(q as u128)
            .ok_or_else(|| Error::GuardExceeded("subrank search space overflow".into()))?;
        if points > guard.max_subrank_points {
            return Err(Error::GuardExceeded(format!(
                "q^(s * sum n_i) = {points} > {}",
                guard.max_subrank_points
            )));
        }
    }
    if t.shape().iter().any(|&n| n < s) {
        // an s x n map with n < s cannot have rank s, and every mode map
        // must, or the restriction has flattening rank < s
        return Ok(None);
    }
    let d = t.order();
    let target = identity_tensor(s, d, f)?;
    let lists: Vec<Vec<Matrix>> = t.shape()[..d - 1]
        .iter()
        .map(|&n| full_rank_matrices(f, s, n))
        .collect();
    let n_last = t.shape()[d - 1];

    let mut idx = vec![0usize; d - 1];
    if lists.iter().any(|l| l.is_empty()) {
        return Ok(None);
    }
    'tuples: loop {
        // apply the chosen maps on all modes but the last
        let mut mats: Vec<Matrix> = (0..d - 1).map(|i| lists[i][idx[i]].clone()).collect();
        mats.push(Matrix::identity(f, n_last));
        let partial = apply_matrices(&MatrixTuple::new(mats.clone())?, t)?;

        // coefficient matrix over the (a_1, ..., a_{d-1}) grid
        let grid: usize = s.pow((d - 1) as u32);
        let p_strides = strides_of(partial.shape());
        let mut c = Matrix::zeros(f, grid, n_last);
        for row in 0..grid {
            let mut rem = row;
            let mut flat = 0usize;
            for i in (0..d - 1).rev() {
                flat += (rem % s) * p_strides[i];
                rem /= s;
            }
            for b in 0..n_last {
                c.set(row, b, partial.entries()[flat + b * p_strides[d - 1]]);
            }
        }
        let mut last_rows = Vec::with_capacity(s);
        let mut ok = true;
        for a_d in 0..s {
            let rhs: Vec<_> = (0..grid)
                .map(|row| {
                    // row encodes (a_1, ..., a_{d-1}) big-endian in base s
                    let mut rem = row;
                    let mut all_eq = true;
                    for _ in 0..d - 1 {
                        if rem % s != a_d {
                            all_eq = false;
                        }
                        rem /= s;
                    }
                    if all_eq {
                        f.one()
                    } else {
                        f.zero()
                    }
                })
                .collect();
            match c.solve(&rhs) {
                Some(x) => last_rows.push(x),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let m_last = Matrix::from_rows(f, last_rows)?;
            let mut full = mats;
            full[d - 1] = m_last;
            let cert = RestrictionCert {
                maps: MatrixTuple::new(full)?,
                source: t.clone(),
                target: target.clone(),
            };
            cert.verify()?;
            return Ok(Some(cert));
        }
        let mut i = d - 1;
        loop {
            if i == 0 {
                break 'tuples;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < lists[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(None)
}

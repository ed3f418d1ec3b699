//! Dense tensors over a finite field: contraction, Kronecker product, direct
//! sum, flattening, restriction by matrix tuples, base change, and the named
//! families (identity, matrix multiplication, field and polynomial
//! multiplication).
//!
//! Index conventions are load-bearing for every downstream count and are
//! fixed here once: entries are row-major (last index fastest), the Kronecker
//! composite index on mode i is `a_i * m_i + b_i`, and the matrix
//! multiplication tensor uses the trace convention T(A,B,C) = tr(ABC).

use crate::error::{Error, Result};
use crate::gf::{field_make, poly_rem, smallest_irreducible, FieldElem, FieldSpec};
use crate::mat::Matrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq)]
pub struct Tensor {
    field: FieldSpec,
    shape: Vec<usize>,
    entries: Vec<FieldElem>, // row-major, last index fastest
}

impl std::fmt::Debug for Tensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Tensor{:?} over {:?}: {:?}",
            self.shape,
            self.field,
            self.entries.iter().map(|&e| self.field.enc(e)).collect::<Vec<_>>()
        )
    }
}

/// Result of contracting some modes of a tensor: a scalar when every mode was
/// contracted, a coordinate vector when one mode remains, a tensor otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contracted {
    Scalar(FieldElem),
    Vector(Vec<FieldElem>),
    Tensor(Tensor),
}

impl Contracted {
    pub fn as_scalar(&self) -> Option<FieldElem> {
        match self {
            Contracted::Scalar(s) => Some(*s),
            _ => None,
        }
    }
    pub fn as_vector(&self) -> Option<&[FieldElem]> {
        match self {
            Contracted::Vector(v) => Some(v),
            _ => None,
        }
    }
    pub fn as_tensor(&self) -> Option<&Tensor> {
        match self {
            Contracted::Tensor(t) => Some(t),
            _ => None,
        }
    }
}

impl Tensor {
    pub fn new(field: FieldSpec, shape: Vec<usize>, entries: Vec<FieldElem>) -> Result<Self> {
        if shape.len() < 2 {
            return Err(Error::ShapeMismatch(format!(
                "tensors have order >= 2, got shape {shape:?}"
            )));
        }
        let size: usize = shape.iter().product();
        if entries.len() != size {
            return Err(Error::ShapeMismatch(format!(
                "shape {shape:?} needs {size} entries, got {}",
                entries.len()
            )));
        }
        Ok(Tensor { field, shape, entries })
    }

    pub fn zero(field: &FieldSpec, shape: &[usize]) -> Result<Self> {
        let size: usize = shape.iter().product();
        Tensor::new(field.clone(), shape.to_vec(), vec![field.zero(); size])
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }
    pub fn order(&self) -> usize {
        self.shape.len()
    }
    pub fn entries(&self) -> &[FieldElem] {
        &self.entries
    }
    pub fn encoded_entries(&self) -> Vec<u64> {
        self.entries.iter().map(|&e| self.field.enc(e)).collect()
    }

    pub fn is_zero(&self) -> bool {
        let z = self.field.zero();
        self.entries.iter().all(|&e| e == z)
    }

    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.shape)
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let strides = self.strides();
        idx.iter().zip(&strides).map(|(&i, &s)| i * s).sum()
    }

    pub fn get(&self, idx: &[usize]) -> FieldElem {
        self.entries[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: FieldElem) {
        let fi = self.flat_index(idx);
        self.entries[fi] = v;
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order() {
            return Err(Error::ModeOutOfRange { mode, order: self.order() });
        }
        Ok(())
    }
}

pub(crate) fn strides_of(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

/// Contracts a single mode with a coefficient vector; the remaining modes
/// keep their original order. Internal workhorse for the public `contract`
/// and the counting kernels.
pub(crate) fn contract_single(
    f: &FieldSpec,
    shape: &[usize],
    entries: &[FieldElem],
    mode: usize,
    coeffs: &[FieldElem],
) -> (Vec<usize>, Vec<FieldElem>) {
    debug_assert_eq!(coeffs.len(), shape[mode]);
    let strides = strides_of(shape);
    let out_shape: Vec<usize> =
        shape.iter().enumerate().filter(|(i, _)| *i != mode).map(|(_, &n)| n).collect();
    let out_size: usize = out_shape.iter().product();
    let mut out = vec![f.zero(); out_size];
    // outer block = indices before `mode`, inner block = indices after
    let inner: usize = strides[mode];
    let outer: usize = entries.len() / (inner * shape[mode]);
    let zero = f.zero();
    for o in 0..outer {
        let obase = o * shape[mode] * inner;
        for (j, &c) in coeffs.iter().enumerate() {
            if c == zero {
                continue;
            }
            let base = obase + j * inner;
            let dst = o * inner;
            for t in 0..inner {
                let v = f.mul(c, entries[base + t]);
                out[dst + t] = f.add(out[dst + t], v);
            }
        }
    }
    (out_shape, out)
}

/// Contracts the given (distinct) modes of `t` with one coordinate functional
/// per mode; the result keeps the remaining modes in original order.
pub fn contract(t: &Tensor, modes: &[usize], functionals: &[Vec<FieldElem>]) -> Result<Contracted> {
    if modes.len() != functionals.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} modes but {} functionals",
            modes.len(),
            functionals.len()
        )));
    }
    let mut seen = vec![false; t.order()];
    for &m in modes {
        t.check_mode(m)?;
        if seen[m] {
            return Err(Error::ShapeMismatch(format!("mode {m} contracted twice")));
        }
        seen[m] = true;
    }
    for (&m, fcoef) in modes.iter().zip(functionals) {
        if fcoef.len() != t.shape[m] {
            return Err(Error::ShapeMismatch(format!(
                "functional for mode {m} has length {}, expected {}",
                fcoef.len(),
                t.shape[m]
            )));
        }
    }
    // Contract highest mode first so lower mode numbers stay valid.
    let mut order: Vec<usize> = (0..modes.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(modes[i]));
    let mut shape = t.shape.clone();
    let mut entries = t.entries.clone();
    for &i in &order {
        let (s, e) = contract_single(&t.field, &shape, &entries, modes[i], &functionals[i]);
        shape = s;
        entries = e;
    }
    Ok(match shape.len() {
        0 => Contracted::Scalar(entries[0]),
        1 => Contracted::Vector(entries),
        _ => Contracted::Tensor(Tensor { field: t.field.clone(), shape, entries }),
    })
}

/// Kronecker product T ⊠ S: shape [n_i * m_i], composite index a_i*m_i + b_i.
pub fn kronecker(t: &Tensor, s: &Tensor) -> Result<Tensor> {
    if t.order() != s.order() {
        return Err(Error::ShapeMismatch(format!(
            "orders differ: {} vs {}",
            t.order(),
            s.order()
        )));
    }
    if t.field != s.field {
        return Err(Error::MismatchedFields(t.field.q(), s.field.q()));
    }
    let d = t.order();
    let f = &t.field;
    let shape: Vec<usize> = (0..d).map(|i| t.shape[i] * s.shape[i]).collect();
    let out_strides = strides_of(&shape);
    let mut out = vec![f.zero(); shape.iter().product()];
    let t_strides = t.strides();
    let s_strides = s.strides();
    let zero = f.zero();
    for (ta, &tv) in t.entries.iter().enumerate() {
        if tv == zero {
            continue;
        }
        let tidx: Vec<usize> = (0..d).map(|i| ta / t_strides[i] % t.shape[i]).collect();
        for (sb, &sv) in s.entries.iter().enumerate() {
            if sv == zero {
                continue;
            }
            let mut flat = 0usize;
            for i in 0..d {
                let bi = sb / s_strides[i] % s.shape[i];
                flat += (tidx[i] * s.shape[i] + bi) * out_strides[i];
            }
            out[flat] = f.mul(tv, sv);
        }
    }
    Tensor::new(f.clone(), shape, out)
}

/// Block-diagonal direct sum: T occupies indices < n_i on every mode, S the
/// rest, mixed blocks zero.
pub fn direct_sum(t: &Tensor, s: &Tensor) -> Result<Tensor> {
    if t.order() != s.order() {
        return Err(Error::ShapeMismatch(format!(
            "orders differ: {} vs {}",
            t.order(),
            s.order()
        )));
    }
    if t.field != s.field {
        return Err(Error::MismatchedFields(t.field.q(), s.field.q()));
    }
    let d = t.order();
    let f = &t.field;
    let shape: Vec<usize> = (0..d).map(|i| t.shape[i] + s.shape[i]).collect();
    let mut out = Tensor::zero(f, &shape)?;
    let t_strides = t.strides();
    let s_strides = s.strides();
    for (ta, &tv) in t.entries.iter().enumerate() {
        let idx: Vec<usize> = (0..d).map(|i| ta / t_strides[i] % t.shape[i]).collect();
        out.set(&idx, tv);
    }
    for (sb, &sv) in s.entries.iter().enumerate() {
        let idx: Vec<usize> =
            (0..d).map(|i| t.shape[i] + sb / s_strides[i] % s.shape[i]).collect();
        out.set(&idx, sv);
    }
    Ok(out)
}

/// Id_n of order d: entry 1 iff all indices are equal.
pub fn identity_tensor(n: usize, d: usize, f: &FieldSpec) -> Result<Tensor> {
    if n < 1 {
        return Err(Error::InvalidInput("identity tensor needs n >= 1".into()));
    }
    let mut t = Tensor::zero(f, &vec![n; d])?;
    for i in 0..n {
        t.set(&vec![i; d], f.one());
    }
    Ok(t)
}

/// A tuple of per-mode matrices (M_1, ..., M_d) realizing a restriction:
/// mats[i] has shape n_i x m_i mapping a source tensor of shape [m_i] to a
/// target of shape [n_i].
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    mats: Vec<Matrix>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<Matrix>) -> Result<Self> {
        if mats.len() < 2 {
            return Err(Error::ShapeMismatch("matrix tuple needs order >= 2".into()));
        }
        let f = mats[0].field().clone();
        if mats.iter().any(|m| *m.field() != f) {
            return Err(Error::ShapeMismatch("matrix tuple mixes fields".into()));
        }
        Ok(MatrixTuple { mats })
    }

    pub fn mats(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn order(&self) -> usize {
        self.mats.len()
    }

    /// Mode-wise composition: (self ∘ other)[i] = self[i] * other[i].
    pub fn compose(&self, other: &MatrixTuple) -> Result<MatrixTuple> {
        if self.order() != other.order() {
            return Err(Error::ShapeMismatch("tuple orders differ".into()));
        }
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| a.matmul(b))
            .collect::<Result<Vec<_>>>()?;
        MatrixTuple::new(mats)
    }
}

/// T[a] = sum_b (prod_i mats[i][a_i, b_i]) S[b]: applies one linear map per
/// mode. Realizes the restriction relation T ⪯ S.
pub fn apply_matrices(m: &MatrixTuple, s: &Tensor) -> Result<Tensor> {
    if m.order() != s.order() {
        return Err(Error::ShapeMismatch(format!(
            "tuple order {} vs tensor order {}",
            m.order(),
            s.order()
        )));
    }
    if *m.mats[0].field() != s.field {
        return Err(Error::MismatchedFields(m.mats[0].field().q(), s.field.q()));
    }
    for (i, mat) in m.mats.iter().enumerate() {
        if mat.ncols() != s.shape[i] {
            return Err(Error::ShapeMismatch(format!(
                "mode {i}: matrix is {}x{} but tensor dimension is {}",
                mat.nrows(),
                mat.ncols(),
                s.shape[i]
            )));
        }
    }
    let f = s.field.clone();
    let zero = f.zero();
    let mut shape = s.shape.clone();
    let mut entries = s.entries.clone();
    // apply one mode at a time; each step is a flattening matrix product
    for (mode, mat) in m.mats.iter().enumerate() {
        let old_n = shape[mode];
        let new_n = mat.nrows();
        let strides = strides_of(&shape);
        let inner = strides[mode];
        let outer = entries.len() / (inner * old_n);
        let mut new_shape = shape.clone();
        new_shape[mode] = new_n;
        let mut out = vec![zero; outer * new_n * inner];
        for o in 0..outer {
            for a in 0..new_n {
                let dst_base = (o * new_n + a) * inner;
                for b in 0..old_n {
                    let c = mat.get(a, b);
                    if c == zero {
                        continue;
                    }
                    let src_base = (o * old_n + b) * inner;
                    for t in 0..inner {
                        let v = f.mul(c, entries[src_base + t]);
                        out[dst_base + t] = f.add(out[dst_base + t], v);
                    }
                }
            }
        }
        shape = new_shape;
        entries = out;
    }
    Tensor::new(f, shape, entries)
}

/// The order-d tensor of (d-1)-fold multiplication in GF(q^l) over its base
/// GF(q): entry (i_1, ..., i_{d-1}, j) is the j-th coordinate of
/// x^{i_1} ... x^{i_{d-1}} in the power basis of the canonical relative
/// modulus.
pub fn mult_tensor(d: usize, base: &FieldSpec, l: usize) -> Result<Tensor> {
    if d < 2 {
        return Err(Error::InvalidInput("mult_tensor needs order d >= 2".into()));
    }
    if l < 1 {
        return Err(Error::BadDegree(l));
    }
    let modulus = smallest_irreducible(base, l)?;
    // powers of x modulo the relative modulus, up to the largest exponent used
    let max_exp = (d - 1) * (l - 1);
    let mut powers: Vec<Vec<FieldElem>> = Vec::with_capacity(max_exp + 1);
    for s in 0..=max_exp {
        let mut xs = vec![base.zero(); s + 1];
        xs[s] = base.one();
        powers.push(poly_rem(base, &xs, &modulus));
    }
    let mut t = Tensor::zero(base, &vec![l; d])?;
    let mut idx = vec![0usize; d];
    loop {
        let s: usize = idx[..d - 1].iter().sum();
        for j in 0..l {
            idx[d - 1] = j;
            t.set(&idx, powers[s][j]);
        }
        // odometer over the first d-1 indices
        let mut m = d - 1;
        loop {
            if m == 0 {
                return Ok(t);
            }
            m -= 1;
            idx[m] += 1;
            if idx[m] < l {
                break;
            }
            idx[m] = 0;
        }
    }
}

/// The n x n matrix multiplication tensor <n,n,n> of shape [n^2, n^2, n^2]
/// with entry ((i,j),(k,l),(m,r)) = 1 iff j=k, l=m, r=i, so that
/// T(A,B,C) = tr(ABC).
pub fn matmul_tensor(n: usize, f: &FieldSpec) -> Result<Tensor> {
    if n < 1 {
        return Err(Error::InvalidInput("matmul tensor needs n >= 1".into()));
    }
    let n2 = n * n;
    let mut t = Tensor::zero(f, &[n2, n2, n2])?;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                t.set(&[i * n + j, j * n + l, l * n + i], f.one());
            }
        }
    }
    Ok(t)
}

/// The tensor of (d-1)-fold multiplication of polynomials of degree <= deg:
/// shape [deg+1, ..., deg+1, (d-1)deg+1], last-mode entry = coefficient of
/// the convolution.
pub fn poly_mult_tensor(d: usize, deg: usize, f: &FieldSpec) -> Result<Tensor> {
    if d < 2 {
        return Err(Error::InvalidInput("poly_mult_tensor needs order d >= 2".into()));
    }
    let out_dim = (d - 1) * deg + 1;
    let mut shape = vec![deg + 1; d];
    shape[d - 1] = out_dim;
    let mut t = Tensor::zero(f, &shape)?;
    let mut idx = vec![0usize; d];
    loop {
        let s: usize = idx[..d - 1].iter().sum();
        idx[d - 1] = s;
        t.set(&idx, f.one());
        let mut m = d - 1;
        loop {
            if m == 0 {
                return Ok(t);
            }
            m -= 1;
            idx[m] += 1;
            if idx[m] <= deg {
                break;
            }
            idx[m] = 0;
        }
    }
}

/// Base change of `t` (over GF(q)) along the degree-l extension: returns
/// (native, kron) where `native` has the same entries embedded into GF(q^l)
/// and `kron` = t ⊠ mult_tensor(d, GF(q), l) over GF(q).
pub fn base_change(t: &Tensor, l: usize) -> Result<(Tensor, Tensor)> {
    if l < 1 {
        return Err(Error::BadDegree(l));
    }
    let src = &t.field;
    let dst = field_make(src.p(), src.k() * l)?;
    let emb = src.embedding(&dst)?;
    let entries = t
        .entries
        .iter()
        .map(|&e| emb.apply(e))
        .collect::<Result<Vec<_>>>()?;
    let native = Tensor::new(dst, t.shape.clone(), entries)?;
    let kron = kronecker(t, &mult_tensor(t.order(), src, l)?)?;
    Ok((native, kron))
}

/// The mode-k flattening: an n_k x (prod of other dims) matrix whose columns
/// are indexed row-major by the remaining modes in original order.
pub fn flatten(t: &Tensor, mode: usize) -> Result<Matrix> {
    t.check_mode(mode)?;
    let n = t.shape[mode];
    let rest: usize = t.entries.len() / n.max(1);
    let mut m = Matrix::zeros(&t.field, n, rest);
    let strides = t.strides();
    let rest_modes: Vec<usize> = (0..t.order()).filter(|&i| i != mode).collect();
    let rest_shape: Vec<usize> = rest_modes.iter().map(|&i| t.shape[i]).collect();
    let rest_strides = strides_of(&rest_shape);
    for (flat, &v) in t.entries.iter().enumerate() {
        let r = flat / strides[mode] % t.shape[mode];
        let mut col = 0;
        for (j, &i) in rest_modes.iter().enumerate() {
            col += (flat / strides[i] % t.shape[i]) * rest_strides[j];
        }
        m.set(r, col, v);
    }
    Ok(m)
}

/// Uniform random tensor with entries drawn from the whole field.
pub fn random_tensor<R: Rng>(f: &FieldSpec, shape: &[usize], rng: &mut R) -> Result<Tensor> {
    let size: usize = shape.iter().product();
    let entries = (0..size)
        .map(|_| f.elem_unchecked(rng.gen_range(0..f.q())))
        .collect();
    Tensor::new(f.clone(), shape.to_vec(), entries)
}

/// Uniform random matrix tuple with square mats matching `shape`.
pub fn random_square_tuple<R: Rng>(
    f: &FieldSpec,
    shape: &[usize],
    rng: &mut R,
) -> Result<MatrixTuple> {
    let mats = shape
        .iter()
        .map(|&n| {
            let data = (0..n * n)
                .map(|_| f.elem_unchecked(rng.gen_range(0..f.q())))
                .collect();
            Matrix::new(f.clone(), n, n, data)
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixTuple::new(mats)
}

// ---------------------------------------------------------------------------
// The textual tensor file format: {"p":..,"k":..,"shape":[..],"entries":[..]}
// with entries as base-p integer encodings, row-major. Bit-exact; the only
// ingestion format.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TensorFile {
    p: u64,
    k: usize,
    shape: Vec<usize>,
    entries: Vec<u64>,
}

impl Serialize for Tensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let tf = TensorFile {
            p: self.field.p(),
            k: self.field.k(),
            shape: self.shape.clone(),
            entries: self.encoded_entries(),
        };
        tf.serialize(s)
    }
}

impl Serialize for MatrixTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Vec<u64>>> = self
            .mats
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|r| m.row(r).iter().map(|&e| m.field().enc(e)).collect())
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

impl Tensor {
    pub fn to_file_json(&self) -> String {
        let tf = TensorFile {
            p: self.field.p(),
            k: self.field.k(),
            shape: self.shape.clone(),
            entries: self.encoded_entries(),
        };
        serde_json::to_string(&tf).expect("tensor file serialization")
    }

    pub fn from_file_json(s: &str) -> Result<Tensor> {
        let tf: TensorFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let field = field_make(tf.p, tf.k)?;
        let entries = tf
            .entries
            .iter()
            .map(|&e| field.elem(e))
            .collect::<Result<Vec<_>>>()?;
        Tensor::new(field, tf.shape, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> FieldSpec {
        field_make(2, 1).unwrap()
    }

    fn t_from(f: &FieldSpec, shape: &[usize], enc: &[u64]) -> Tensor {
        let entries = enc.iter().map(|&e| f.elem(e).unwrap()).collect();
        Tensor::new(f.clone(), shape.to_vec(), entries).unwrap()
    }

    fn e1e1e1(f: &FieldSpec) -> Tensor {
        let mut t = Tensor::zero(f, &[2, 2, 2]).unwrap();
        t.set(&[0, 0, 0], f.one());
        t
    }

    #[test]
    fn contract_examples() {
        let f = f2();
        let t = e1e1e1(&f);
        // contract mode 3 (index 2) with dual-e1 -> matrix e1 x e1
        let r = contract(&t, &[2], &[vec![f.one(), f.zero()]]).unwrap();
        let m = r.as_tensor().unwrap();
        assert_eq!(m.shape(), &[2, 2]);
        assert_eq!(m.encoded_entries(), vec![1, 0, 0, 0]);

        // Id_2 matrix contracted over mode 1 with (1,1) -> vector (1,1)
        let id2 = identity_tensor(2, 2, &f).unwrap();
        let r = contract(&id2, &[0], &[vec![f.one(), f.one()]]).unwrap();
        assert_eq!(r.as_vector().unwrap(), &[f.one(), f.one()]);

        // full contraction gives the scalar T(f_1, ..., f_d)
        let r = contract(
            &t,
            &[0, 1, 2],
            &[
                vec![f.one(), f.zero()],
                vec![f.one(), f.zero()],
                vec![f.one(), f.zero()],
            ],
        )
        .unwrap();
        assert_eq!(r.as_scalar().unwrap(), f.one());
    }

    #[test]
    fn contract_matmul_against_triple_loop_oracle() {
        // <2,2,2> contracted with vec(A), vec(B) must encode the product AB.
        let f = f2();
        let t = matmul_tensor(2, &f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let a: Vec<u64> = (0..4).map(|_| rng.gen_range(0..2)).collect();
            let b: Vec<u64> = (0..4).map(|_| rng.gen_range(0..2)).collect();
            let fa: Vec<FieldElem> = a.iter().map(|&x| f.elem(x).unwrap()).collect();
            let fb: Vec<FieldElem> = b.iter().map(|&x| f.elem(x).unwrap()).collect();
            let r = contract(&t, &[0, 1], &[fa, fb]).unwrap();
            let v = r.as_vector().unwrap();
            // oracle: direct 2x2 matrix product, C[i][j] = sum A[i][k] B[k][j]
            let mut prod = [[0u64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        prod[i][j] = (prod[i][j] + a[i * 2 + k] * b[k * 2 + j]) % 2;
                    }
                }
            }
            // result vector at (l,i) = (AB)[i][l]  (trace convention)
            for l in 0..2 {
                for i in 0..2 {
                    assert_eq!(f.enc(v[l * 2 + i]), prod[i][l]);
                }
            }
        }
    }

    #[test]
    fn contract_errors() {
        let f = f2();
        let t = e1e1e1(&f);
        assert!(contract(&t, &[3], &[vec![f.one()]]).is_err());
        assert!(contract(&t, &[0], &[vec![f.one()]]).is_err()); // length mismatch
        assert!(contract(&t, &[0, 0], &[vec![f.one(), f.zero()], vec![f.one(), f.zero()]]).is_err());
    }

    #[test]
    fn kronecker_examples() {
        let f = f2();
        let id2 = identity_tensor(2, 2, &f).unwrap();
        let kr = kronecker(&id2, &id2).unwrap();
        assert_eq!(kr, identity_tensor(4, 2, &f).unwrap());

        let z = Tensor::zero(&f, &[2, 2]).unwrap();
        assert!(kronecker(&z, &id2).unwrap().is_zero());

        // (e1 x e1) boxtimes (e2 x e2): single 1 at row 0*2+1 = 1, col 1
        let e11 = t_from(&f, &[2, 2], &[1, 0, 0, 0]);
        let e22 = t_from(&f, &[2, 2], &[0, 0, 0, 1]);
        let k = kronecker(&e11, &e22).unwrap();
        assert_eq!(k.shape(), &[4, 4]);
        let mut expect = Tensor::zero(&f, &[4, 4]).unwrap();
        expect.set(&[1, 1], f.one());
        assert_eq!(k, expect);
    }

    #[test]
    fn direct_sum_examples() {
        let f = f2();
        let id1 = identity_tensor(1, 3, &f).unwrap();
        assert_eq!(direct_sum(&id1, &id1).unwrap(), identity_tensor(2, 3, &f).unwrap());

        let t = e1e1e1(&f);
        let empty = Tensor::zero(&f, &[0, 0, 0]).unwrap();
        assert_eq!(direct_sum(&t, &empty).unwrap(), t);

        let id2 = identity_tensor(2, 2, &f).unwrap();
        let id3 = identity_tensor(3, 2, &f).unwrap();
        assert_eq!(direct_sum(&id2, &id3).unwrap(), identity_tensor(5, 2, &f).unwrap());
    }

    #[test]
    fn apply_matrices_examples() {
        let f = f2();
        let id2 = identity_tensor(2, 2, &f).unwrap();
        let eye = Matrix::identity(&f, 2);
        let m = MatrixTuple::new(vec![eye.clone(), eye.clone()]).unwrap();
        assert_eq!(apply_matrices(&m, &id2).unwrap(), id2);

        // [[1,0],[0,0]] on both modes of Id_2 -> e1 x e1
        let proj = Matrix::new(
            f.clone(),
            2,
            2,
            vec![f.one(), f.zero(), f.zero(), f.zero()],
        )
        .unwrap();
        let m = MatrixTuple::new(vec![proj.clone(), proj]).unwrap();
        let r = apply_matrices(&m, &id2).unwrap();
        assert_eq!(r.encoded_entries(), vec![1, 0, 0, 0]);

        // projections witness Id_2 ⪯ Id_3 at order 3
        let id3 = identity_tensor(3, 3, &f).unwrap();
        let p = Matrix::new(
            f.clone(),
            2,
            3,
            vec![f.one(), f.zero(), f.zero(), f.zero(), f.one(), f.zero()],
        )
        .unwrap();
        let m = MatrixTuple::new(vec![p.clone(), p.clone(), p]).unwrap();
        assert_eq!(apply_matrices(&m, &id3).unwrap(), identity_tensor(2, 3, &f).unwrap());
    }

    #[test]
    fn restriction_transitivity() {
        let f = field_make(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let s = random_tensor(&f, &[2, 3, 2], &mut rng).unwrap();
            let m1 = random_square_tuple(&f, &[2, 3, 2], &mut rng).unwrap();
            let m2 = random_square_tuple(&f, &[2, 3, 2], &mut rng).unwrap();
            let two_step = apply_matrices(&m2, &apply_matrices(&m1, &s).unwrap()).unwrap();
            let composed = apply_matrices(&m2.compose(&m1).unwrap(), &s).unwrap();
            assert_eq!(two_step, composed);
        }
    }

    #[test]
    fn mult_tensor_examples() {
        let f = f2();
        // d = 2: multiplication by nothing is the identity map
        for l in 1..=4 {
            let t = mult_tensor(2, &f, l).unwrap();
            assert_eq!(t, identity_tensor(l, 2, &f).unwrap());
        }

        // GF(4)/GF(2): slices "multiply by 1" and "multiply by alpha"
        let t = mult_tensor(3, &f, 2).unwrap();
        assert_eq!(t.shape(), &[2, 2, 2]);
        assert_eq!(
            t.encoded_entries(),
            // slice i1=0: [[1,0],[0,1]]; slice i1=1: [[0,1],[1,1]]
            vec![1, 0, 0, 1, 0, 1, 1, 1]
        );

        // GF(9)/GF(3) with modulus x^2+1: alpha * alpha = -1 = 2
        let f3 = field_make(3, 1).unwrap();
        let t = mult_tensor(3, &f3, 2).unwrap();
        assert_eq!(f3.enc(t.get(&[1, 1, 0])), 2);
        assert_eq!(f3.enc(t.get(&[1, 1, 1])), 0);
    }

    #[test]
    fn mult_tensor_reproduces_field_multiplication() {
        // exhaustive for q^l <= 16, d <= 4, prime base: contract the first
        // d-1 modes with coefficient vectors and compare against field mul
        for &(p, l) in &[(2usize, 2usize), (2, 3), (2, 4), (3, 2)] {
            let base = field_make(p as u64, 1).unwrap();
            let ext = field_make(p as u64, l).unwrap();
            for d in 2..=4 {
                let t = mult_tensor(d, &base, l).unwrap();
                for xs in 0..ext.q().pow((d - 1) as u32) {
                    let mut rem = xs;
                    let elems: Vec<FieldElem> = (0..d - 1)
                        .map(|_| {
                            let e = ext.elem(rem % ext.q()).unwrap();
                            rem /= ext.q();
                            e
                        })
                        .collect();
                    let functionals: Vec<Vec<FieldElem>> = elems
                        .iter()
                        .map(|&e| {
                            ext.coeffs(e).iter().map(|&c| base.elem(c).unwrap()).collect()
                        })
                        .collect();
                    let modes: Vec<usize> = (0..d - 1).collect();
                    let got = contract(&t, &modes, &functionals).unwrap();
                    let got = got.as_vector().unwrap();
                    let mut prod = ext.one();
                    for &e in &elems {
                        prod = ext.mul(prod, e);
                    }
                    let want: Vec<FieldElem> = ext
                        .coeffs(prod)
                        .iter()
                        .map(|&c| base.elem(c).unwrap())
                        .collect();
                    assert_eq!(got, &want[..], "p={p} l={l} d={d}");
                }
            }
        }
    }

    #[test]
    fn mult_tensor_relative_extension_is_a_field() {
        // base GF(4), l = 2: the structure constants must define the field
        // GF(16) as a 2-dimensional GF(4)-algebra — commutative, associative,
        // unital, and with every nonzero element invertible
        let base = field_make(2, 2).unwrap();
        let t = mult_tensor(3, &base, 2).unwrap();
        let q = base.q();
        let elems: Vec<Vec<FieldElem>> = (0..q * q)
            .map(|code| vec![base.elem(code % q).unwrap(), base.elem(code / q).unwrap()])
            .collect();
        let mul = |a: &Vec<FieldElem>, b: &Vec<FieldElem>| -> Vec<FieldElem> {
            contract(&t, &[0, 1], &[a.clone(), b.clone()])
                .unwrap()
                .as_vector()
                .unwrap()
                .to_vec()
        };
        let one = vec![base.one(), base.zero()];
        let zero = vec![base.zero(), base.zero()];
        for a in &elems {
            assert_eq!(mul(a, &one), *a);
            for b in &elems {
                assert_eq!(mul(a, b), mul(b, a));
                for c in &elems {
                    assert_eq!(mul(&mul(a, b), c), mul(a, &mul(b, c)));
                }
            }
        }
        for a in &elems {
            if *a == zero {
                continue;
            }
            assert!(elems.iter().any(|b| mul(a, b) == one), "{a:?} has no inverse");
        }
    }

    #[test]
    fn matmul_tensor_examples() {
        let f = f2();
        let t1 = matmul_tensor(1, &f).unwrap();
        assert_eq!(t1.encoded_entries(), vec![1]);

        let t = matmul_tensor(2, &f).unwrap();
        let nonzero = t.entries().iter().filter(|&&e| e != f.zero()).count();
        assert_eq!(nonzero, 8); // n^3

        // T(A,B,C) = tr(ABC) over all 16^3 triples
        for a in 0..16u64 {
            for b in 0..16u64 {
                for c in 0..16u64 {
                    let fa: Vec<FieldElem> =
                        (0..4).map(|i| f.elem(a >> i & 1).unwrap()).collect();
                    let fb: Vec<FieldElem> =
                        (0..4).map(|i| f.elem(b >> i & 1).unwrap()).collect();
                    let fc: Vec<FieldElem> =
                        (0..4).map(|i| f.elem(c >> i & 1).unwrap()).collect();
                    let got = contract(&t, &[0, 1, 2], &[fa.clone(), fb.clone(), fc.clone()])
                        .unwrap()
                        .as_scalar()
                        .unwrap();
                    // oracle: triple loop trace of ABC; mat[i][j] = v[i*2+j]
                    let mut tr = 0u64;
                    for i in 0..2 {
                        for j in 0..2 {
                            for k in 0..2 {
                                tr += f.enc(fa[i * 2 + j])
                                    * f.enc(fb[j * 2 + k])
                                    * f.enc(fc[k * 2 + i]);
                            }
                        }
                    }
                    assert_eq!(f.enc(got), tr % 2);
                }
            }
        }
    }

    #[test]
    fn poly_mult_tensor_examples() {
        let f = f2();
        let t = poly_mult_tensor(3, 1, &f).unwrap();
        assert_eq!(t.shape(), &[2, 2, 3]);
        assert_eq!(f.enc(t.get(&[1, 1, 2])), 1); // x * x = x^2

        // (1+x)^2 = 1 + x^2 over F_2, against a convolution oracle
        let one_x = vec![f.one(), f.one()];
        let got = contract(&t, &[0, 1], &[one_x.clone(), one_x.clone()]).unwrap();
        let got = got.as_vector().unwrap();
        let mut conv = [0u64; 3];
        for i in 0..2 {
            for j in 0..2 {
                conv[i + j] = (conv[i + j] + f.enc(one_x[i]) * f.enc(one_x[j])) % 2;
            }
        }
        let got_enc: Vec<u64> = got.iter().map(|&e| f.enc(e)).collect();
        assert_eq!(got_enc, conv.to_vec());
        assert_eq!(got_enc, vec![1, 0, 1]);

        let f3 = field_make(3, 1).unwrap();
        let t = poly_mult_tensor(4, 1, &f3).unwrap();
        assert_eq!(t.shape(), &[2, 2, 2, 4]);
        assert_eq!(f3.enc(t.get(&[1, 1, 1, 3])), 1); // x*x*x = x^3
    }

    #[test]
    fn base_change_examples() {
        let f = f2();
        let id2 = identity_tensor(2, 2, &f).unwrap();
        let (native, kron) = base_change(&id2, 2).unwrap();
        let f4 = field_make(2, 2).unwrap();
        assert_eq!(native, identity_tensor(2, 2, &f4).unwrap());
        assert_eq!(kron, identity_tensor(4, 2, &f).unwrap());

        let t = e1e1e1(&f);
        let (native1, kron1) = base_change(&t, 1).unwrap();
        assert_eq!(native1, t);
        assert_eq!(kron1, t);

        // l = 2: kron = (e1 x e1 x e1) boxtimes T_{3,GF(4)}
        let (_, kron2) = base_change(&t, 2).unwrap();
        assert_eq!(kron2.shape(), &[4, 4, 4]);
        let m = mult_tensor(3, &f, 2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let want = if i < 2 && j < 2 && k < 2 { m.get(&[i, j, k]) } else { f.zero() };
                    assert_eq!(kron2.get(&[i, j, k]), want);
                }
            }
        }
    }

    #[test]
    fn base_change_native_entries_are_embeddings() {
        let f3 = field_make(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_tensor(&f3, &[2, 2, 2], &mut rng).unwrap();
        let (native, _) = base_change(&t, 2).unwrap();
        let f9 = field_make(3, 2).unwrap();
        let emb = f3.embedding(&f9).unwrap();
        for (a, b) in t.entries().iter().zip(native.entries()) {
            assert_eq!(emb.apply(*a).unwrap(), *b);
        }
    }

    #[test]
    fn flatten_examples() {
        let f = f2();
        let id2 = identity_tensor(2, 3, &f).unwrap();
        let m = flatten(&id2, 2).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (2, 4));
        let rows: Vec<Vec<u64>> = (0..2)
            .map(|r| m.row(r).iter().map(|&e| f.enc(e)).collect())
            .collect();
        assert_eq!(rows, vec![vec![1, 0, 0, 0], vec![0, 0, 0, 1]]);

        let z = Tensor::zero(&f, &[2, 3]).unwrap();
        assert!(flatten(&z, 0).unwrap().is_zero());

        // matrix flattened at mode 1 is itself
        let t = t_from(&f, &[2, 2], &[1, 1, 0, 1]);
        let m = flatten(&t, 0).unwrap();
        assert_eq!(m.row(0).to_vec(), t.entries()[0..2].to_vec());
        assert_eq!(m.row(1).to_vec(), t.entries()[2..4].to_vec());

        assert!(flatten(&t, 2).is_err());
    }

    #[test]
    fn direct_sum_flatten_ranks_add() {
        let f3 = field_make(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let t = random_tensor(&f3, &[2, 2, 2], &mut rng).unwrap();
            let s = random_tensor(&f3, &[2, 3, 2], &mut rng).unwrap();
            let ds = direct_sum(&t, &s).unwrap();
            for mode in 0..3 {
                let rt = flatten(&t, mode).unwrap().rank();
                let rs = flatten(&s, mode).unwrap().rank();
                let rds = flatten(&ds, mode).unwrap().rank();
                assert_eq!(rds, rt + rs);
            }
        }
    }

    #[test]
    fn kronecker_contraction_compatibility() {
        // <T ⊠ S, (f⊗g)-functionals> = <T,f> * <S,g> on random instances
        let f3 = field_make(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let t = random_tensor(&f3, &[2, 2], &mut rng).unwrap();
            let s = random_tensor(&f3, &[2, 2], &mut rng).unwrap();
            let k = kronecker(&t, &s).unwrap();
            let ft: Vec<Vec<FieldElem>> = (0..2)
                .map(|_| (0..2).map(|_| f3.elem_unchecked(rng.gen_range(0..3))).collect())
                .collect();
            let fs: Vec<Vec<FieldElem>> = (0..2)
                .map(|_| (0..2).map(|_| f3.elem_unchecked(rng.gen_range(0..3))).collect())
                .collect();
            // composite functional on mode i: (f_i ⊗ g_i)[a*m+b] = f_i[a]*g_i[b]
            let fk: Vec<Vec<FieldElem>> = (0..2)
                .map(|i| {
                    let mut v = Vec::new();
                    for a in 0..2 {
                        for b in 0..2 {
                            v.push(f3.mul(ft[i][a], fs[i][b]));
                        }
                    }
                    v
                })
                .collect();
            let lhs = contract(&k, &[0, 1], &fk).unwrap().as_scalar().unwrap();
            let rt = contract(&t, &[0, 1], &ft).unwrap().as_scalar().unwrap();
            let rs = contract(&s, &[0, 1], &fs).unwrap().as_scalar().unwrap();
            assert_eq!(lhs, f3.mul(rt, rs));
        }
    }

    #[test]
    fn file_format_round_trip_and_validation() {
        let f = field_make(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let t = random_tensor(&f, &[2, 3], &mut rng).unwrap();
        let s = t.to_file_json();
        let back = Tensor::from_file_json(&s).unwrap();
        assert_eq!(back, t);

        assert!(Tensor::from_file_json("{\"p\":2,\"k\":1,\"shape\":[2,2],\"entries\":[0,1,2,0]}").is_err());
        assert!(Tensor::from_file_json("{\"p\":2,\"k\":1,\"shape\":[2],\"entries\":[0,1]}").is_err());
        assert!(Tensor::from_file_json("not json").is_err());
    }
}

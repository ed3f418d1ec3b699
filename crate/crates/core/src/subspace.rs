//! Linear subspaces over finite fields: canonical RREF bases, exhaustive
//! enumeration by pivot pattern, annihilators under the standard dot pairing,
//! and membership in sums of structured subspaces — the search substrate for
//! the slice/partition rank machinery.

use crate::error::{Error, Result};
use crate::gf::{FieldElem, FieldSpec};
use crate::mat::Matrix;
use crate::tensor::{strides_of, Tensor};
use serde::ser::SerializeStruct;
use serde::Serialize;

/// A linear subspace of K^n held as its unique RREF basis; equal subspaces
/// have identical basis matrices.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    field: FieldSpec,
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(dim {} of {}^{}): {:?}", self.dim(), self.field.q(), self.ambient, self.encoded_rows())
    }
}

impl Subspace {
    /// Canonical subspace spanned by the given vectors.
    pub fn from_vectors(field: &FieldSpec, ambient: usize, vectors: Vec<Vec<FieldElem>>) -> Result<Self> {
        for v in &vectors {
            if v.len() != ambient {
                return Err(Error::ShapeMismatch(format!(
                    "vector length {} != ambient {}",
                    v.len(),
                    ambient
                )));
            }
        }
        let mut m = Matrix::from_rows(field, vectors)?;
        if m.nrows() == 0 {
            m = Matrix::zeros(field, 0, ambient);
        }
        let pivots = m.rref();
        let rank = pivots.len();
        let rows: Vec<Vec<FieldElem>> = (0..rank).map(|r| m.row(r).to_vec()).collect();
        let basis = Matrix::from_rows(field, rows)?;
        let basis = if rank == 0 { Matrix::zeros(field, 0, ambient) } else { basis };
        Ok(Subspace { field: field.clone(), ambient, basis, pivots })
    }

    pub fn zero(field: &FieldSpec, ambient: usize) -> Self {
        Subspace {
            field: field.clone(),
            ambient,
            basis: Matrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &FieldSpec, ambient: usize) -> Self {
        Subspace {
            field: field.clone(),
            ambient,
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
    pub fn basis_rows(&self) -> Vec<Vec<FieldElem>> {
        (0..self.dim()).map(|r| self.basis.row(r).to_vec()).collect()
    }
    pub fn encoded_rows(&self) -> Vec<Vec<u64>> {
        (0..self.dim())
            .map(|r| self.basis.row(r).iter().map(|&e| self.field.enc(e)).collect())
            .collect()
    }

    pub fn contains(&self, v: &[FieldElem]) -> bool {
        let residual = self.basis.reduce_against_rref(&self.pivots, v);
        residual.iter().all(|&e| e == self.field.zero())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        (0..other.dim()).all(|r| self.contains(other.basis.row(r)))
    }

    /// The annihilator under the standard dot pairing: the kernel of the
    /// basis matrix. dim + dim(ann) = ambient; ann(ann) = self.
    pub fn annihilator(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(&self.field, self.ambient);
        }
        let ker = self.basis.kernel_basis();
        let rows: Vec<Vec<FieldElem>> = (0..ker.nrows()).map(|r| ker.row(r).to_vec()).collect();
        Subspace::from_vectors(&self.field, self.ambient, rows).expect("kernel rows well-formed")
    }
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Subspace", 2)?;
        st.serialize_field("ambient", &self.ambient)?;
        st.serialize_field("rows", &self.encoded_rows())?;
        st.end()
    }
}

/// Guards for exhaustive subspace enumeration. Exceeding a guard is a hard
/// error, never a truncation.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationGuard {
    /// Maximum ambient dimension for full-lattice enumeration.
    pub max_ambient: usize,
    /// Maximum q^n for full-lattice enumeration.
    pub max_points: u128,
    /// Maximum number of subspaces for dimension-filtered enumeration.
    pub max_subspaces: u128,
}

impl Default for EnumerationGuard {
    fn default() -> Self {
        EnumerationGuard { max_ambient: 6, max_points: 4096, max_subspaces: 4096 }
    }
}

/// Number of k-dimensional subspaces of an n-dimensional space over GF(q),
/// computed exactly by the Pascal-type recurrence.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for _ in 1..=n {
        for j in (1..=k).rev() {
            // G(n, j) = q^j G(n-1, j) + G(n-1, j-1)
            row[j] = row[j]
                .saturating_mul((q as u128).pow(j as u32))
                .saturating_add(row[j - 1]);
        }
    }
    row[k]
}

/// Every subspace of K^n exactly once (optionally restricted to one
/// dimension), via RREF pivot-pattern enumeration: pivot column sets in
/// lexicographic order, free entries as an ascending base-q odometer.
pub fn enumerate_subspaces(n: usize, f: &FieldSpec, dim: Option<usize>) -> Result<Vec<Subspace>> {
    enumerate_subspaces_guarded(n, f, dim, &EnumerationGuard::default())
}

pub fn enumerate_subspaces_guarded(
    n: usize,
    f: &FieldSpec,
    dim: Option<usize>,
    guard: &EnumerationGuard,
) -> Result<Vec<Subspace>> {
    let q = f.q();
    match dim {
        None => {
            if n > guard.max_ambient {
                return Err(Error::GuardExceeded(format!(
                    "ambient dimension {n} > {}",
                    guard.max_ambient
                )));
            }
            let points = (q as u128).pow(n as u32);
            if points > guard.max_points {
                return Err(Error::GuardExceeded(format!(
                    "q^n = {points} > {}",
                    guard.max_points
                )));
            }
        }
        Some(r) => {
            if r > n {
                return Err(Error::GuardExceeded(format!("dimension {r} > ambient {n}")));
            }
            let count = gaussian_binomial(n, r, q);
            if count > guard.max_subspaces {
                return Err(Error::GuardExceeded(format!(
                    "{count} subspaces of dimension {r} > {}",
                    guard.max_subspaces
                )));
            }
        }
    }

    let dims: Vec<usize> = match dim {
        Some(r) => vec![r],
        None => (0..=n).collect(),
    };
    let mut out = Vec::new();
    for r in dims {
        if r == 0 {
            out.push(Subspace::zero(f, n));
            continue;
        }
        let mut pivots: Vec<usize> = (0..r).collect();
        loop {
            emit_pivot_pattern(f, n, &pivots, &mut out);
            // next combination in lexicographic order
            let mut i = r;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if pivots[i] < n - (r - i) {
                    pivots[i] += 1;
                    for j in i + 1..r {
                        pivots[j] = pivots[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    pivots.clear();
                    break;
                }
            }
            if pivots.is_empty() {
                break;
            }
        }
    }
    Ok(out)
}

fn emit_pivot_pattern(f: &FieldSpec, n: usize, pivots: &[usize], out: &mut Vec<Subspace>) {
    let r = pivots.len();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; n];
        for &c in pivots {
            v[c] = true;
        }
        v
    };
    // free positions in row-major order
    let mut free: Vec<(usize, usize)> = Vec::new();
    for (i, &p) in pivots.iter().enumerate() {
        for c in p + 1..n {
            if !is_pivot[c] {
                free.push((i, c));
            }
        }
    }
    let q = f.q();
    let mut digits = vec![0u64; free.len()];
    loop {
        let mut basis = Matrix::zeros(f, r, n);
        for (i, &p) in pivots.iter().enumerate() {
            basis.set(i, p, f.one());
        }
        for (t, &(i, c)) in free.iter().enumerate() {
            basis.set(i, c, f.elem(digits[t]).unwrap());
        }
        out.push(Subspace {
            field: f.clone(),
            ambient: n,
            basis,
            pivots: pivots.to_vec(),
        });
        // ascending odometer, last digit fastest
        let mut t = free.len();
        loop {
            if t == 0 {
                return;
            }
            t -= 1;
            digits[t] += 1;
            if digits[t] < q {
                break;
            }
            digits[t] = 0;
            if t == 0 {
                return;
            }
        }
    }
}

/// A span of linearly independent basis tensors inside a common tensor space.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSubspace {
    field: FieldSpec,
    shape: Vec<usize>,
    basis: Vec<Tensor>,
}

impl TensorSubspace {
    /// Wraps an explicit basis; the tensors must be linearly independent
    /// (checked through the flattened RREF rank).
    pub fn new(basis: Vec<Tensor>) -> Result<Self> {
        let first = basis.first().ok_or_else(|| {
            Error::InvalidInput("tensor subspace needs at least one basis tensor".into())
        })?;
        let field = first.field().clone();
        let shape = first.shape().to_vec();
        for t in &basis {
            if t.shape() != shape || *t.field() != field {
                return Err(Error::ShapeMismatch("basis tensors live in different spaces".into()));
            }
        }
        let rows: Vec<Vec<FieldElem>> = basis.iter().map(|t| t.entries().to_vec()).collect();
        let rank = Matrix::from_rows(&field, rows)?.rank();
        if rank != basis.len() {
            return Err(Error::InvalidInput(format!(
                "basis tensors are linearly dependent (rank {rank} of {})",
                basis.len()
            )));
        }
        Ok(TensorSubspace { field, shape, basis })
    }

    /// Canonical subspace spanned by arbitrary tensors: RREF of the entry
    /// vectors, mapped back to tensors.
    pub fn span(field: &FieldSpec, shape: &[usize], tensors: &[Tensor]) -> Result<Self> {
        for t in tensors {
            if t.shape() != shape || t.field() != field {
                return Err(Error::ShapeMismatch("spanning tensors live in different spaces".into()));
            }
        }
        let size: usize = shape.iter().product();
        let rows: Vec<Vec<FieldElem>> = tensors.iter().map(|t| t.entries().to_vec()).collect();
        let sub = Subspace::from_vectors(field, size, rows)?;
        let basis = sub
            .basis_rows()
            .into_iter()
            .map(|row| Tensor::new(field.clone(), shape.to_vec(), row))
            .collect::<Result<Vec<_>>>()?;
        if basis.is_empty() {
            return Err(Error::InvalidInput("span is the zero subspace".into()));
        }
        Ok(TensorSubspace { field: field.clone(), shape: shape.to_vec(), basis })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Tensor] {
        &self.basis
    }
}

/// Block direct sum of tensor subspaces: spanned by T ⊕ 0 and 0 ⊕ S.
pub fn tensor_subspace_direct_sum(a: &TensorSubspace, b: &TensorSubspace) -> Result<TensorSubspace> {
    if a.field != b.field {
        return Err(Error::MismatchedFields(a.field.q(), b.field.q()));
    }
    let za = Tensor::zero(&a.field, &a.shape)?;
    let zb = Tensor::zero(&b.field, &b.shape)?;
    let mut basis = Vec::new();
    for t in &a.basis {
        basis.push(crate::tensor::direct_sum(t, &zb)?);
    }
    for s in &b.basis {
        basis.push(crate::tensor::direct_sum(&za, s)?);
    }
    TensorSubspace::new(basis)
}

/// Generator rows of Σ_P S_P ⊗ (full complement), tagged for certificate
/// extraction: tag (part index, basis row index, complement flat index).
pub(crate) struct SliceSumGenerators {
    pub rows: Vec<Vec<FieldElem>>,
    pub tags: Vec<(usize, usize, usize)>,
    pub comp_shapes: Vec<Vec<usize>>,
}

pub(crate) fn slice_sum_generators(
    shape: &[usize],
    f: &FieldSpec,
    parts: &[(Vec<usize>, Subspace)],
) -> Result<SliceSumGenerators> {
    let d = shape.len();
    let full_size: usize = shape.iter().product();
    let full_strides = strides_of(shape);
    let mut rows = Vec::new();
    let mut tags = Vec::new();
    let mut comp_shapes = Vec::with_capacity(parts.len());
    for (pidx, (modes, sub)) in parts.iter().enumerate() {
        let mut sorted = modes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != modes.len() || sorted.iter().any(|&m| m >= d) {
            return Err(Error::ShapeMismatch(format!("bad mode subset {modes:?}")));
        }
        let p_shape: Vec<usize> = sorted.iter().map(|&m| shape[m]).collect();
        let p_size: usize = p_shape.iter().product();
        if sub.ambient_dim() != p_size {
            return Err(Error::ShapeMismatch(format!(
                "subspace ambient {} != flattened side {}",
                sub.ambient_dim(),
                p_size
            )));
        }
        let comp: Vec<usize> = (0..d).filter(|m| !sorted.contains(m)).collect();
        let comp_shape: Vec<usize> = comp.iter().map(|&m| shape[m]).collect();
        let comp_size: usize = comp_shape.iter().product();
        let p_strides = strides_of(&p_shape);
        let comp_strides = strides_of(&comp_shape);
        for (ridx, v) in sub.basis_rows().into_iter().enumerate() {
            for j in 0..comp_size {
                let mut gen = vec![f.zero(); full_size];
                for (pi, &coef) in v.iter().enumerate() {
                    if coef == f.zero() {
                        continue;
                    }
                    let mut flat = 0usize;
                    for (s, &m) in sorted.iter().enumerate() {
                        flat += (pi / p_strides[s] % p_shape[s]) * full_strides[m];
                    }
                    for (s, &m) in comp.iter().enumerate() {
                        flat += (j / comp_strides[s] % comp_shape[s]) * full_strides[m];
                    }
                    gen[flat] = coef;
                }
                rows.push(gen);
                tags.push((pidx, ridx, j));
            }
        }
        comp_shapes.push(comp_shape);
    }
    Ok(SliceSumGenerators { rows, tags, comp_shapes })
}

/// Decides T ∈ Σ_P S_P ⊗ (full complement modes): one RREF rank test on the
/// concatenated generator matrix of the sum, against the same matrix with T
/// appended. Parts are (sorted mode subset, subspace of the flattened P-side).
pub fn member_of_slice_sum(t: &Tensor, parts: &[(Vec<usize>, Subspace)]) -> Result<bool> {
    let gens = slice_sum_generators(t.shape(), t.field(), parts)?;
    let mut gm = Matrix::from_rows(t.field(), gens.rows)?;
    if gm.nrows() == 0 {
        return Ok(t.is_zero());
    }
    let pivots = gm.rref();
    let residual = gm.reduce_against_rref(&pivots, t.entries());
    Ok(residual.iter().all(|&e| e == t.field().zero()))
}

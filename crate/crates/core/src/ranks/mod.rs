//! Exact rank computations and estimators: analytic rank (zero-count and
//! character-sum routes), geometric rank via extension towers, exact
//! slice/partition/cp-rank and subrank by certificate-producing search, and
//! slice ranks of tensor subspaces.

mod analytic;
mod decomp;
mod geometric;
mod subrank;
mod subspace_sr;

pub use analytic::{analytic_rank_char, analytic_rank_zero_count, DEFAULT_POINT_BUDGET};
pub use decomp::{
    cp_decomposition_exists, cp_rank, cp_rank_guarded, partition_rank, partition_rank_guarded,
    slice_rank, slice_rank_guarded,
};
pub use geometric::geometric_rank_estimate;
pub use subrank::{subrank_at_least, subrank_at_least_guarded};
pub use subspace_sr::{sr_k_subspace, sr_k_subspace_guarded, sr_subspace, sr_subspace_guarded};

use crate::error::{Error, Result};
use crate::gf::{FieldElem, FieldSpec};
use crate::tensor::{apply_matrices, strides_of, MatrixTuple, Tensor};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

/// An analytic-rank value held exactly: AR = m - log_q(zero_count) where
/// m = sum of dimensions over the enumerated modes (all but `mode`) and
/// zero_count = |Z_mode(T)|. Real values are derived views; equality testing
/// happens at the integer level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ARExact {
    q: u64,
    m: u32,
    zero_count: BigUint,
    mode: usize,
}

impl ARExact {
    pub fn new(q: u64, m: u32, zero_count: BigUint, mode: usize) -> Self {
        debug_assert!(zero_count >= BigUint::from(1u32));
        debug_assert!(zero_count <= BigUint::from(q).pow(m));
        ARExact { q, m, zero_count, mode }
    }

    pub fn q(&self) -> u64 {
        self.q
    }
    /// Sum of n_i over the enumerated modes.
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn zero_count(&self) -> &BigUint {
        &self.zero_count
    }
    /// The contracted-away mode k (0-based).
    pub fn mode(&self) -> usize {
        self.mode
    }

    /// The real analytic-rank value m - log_q(zero_count).
    pub fn value(&self) -> f64 {
        let c = self.zero_count.to_f64().expect("count fits f64 at desk scale");
        self.m as f64 - c.ln() / (self.q as f64).ln()
    }

    /// Mode-independence restated at the integer level: for the same tensor
    /// at modes k_a, k_b it must hold that
    /// count_a * q^{m_b} == count_b * q^{m_a}.
    pub fn cross_mode_identity(a: &ARExact, b: &ARExact) -> bool {
        a.q == b.q
            && &a.zero_count * BigUint::from(a.q).pow(b.m)
                == &b.zero_count * BigUint::from(b.q).pow(a.m)
    }

    /// Exact additivity identity for direct sums:
    /// count(T⊕S) * q^{m_T + m_S} == count(T) * count(S) * q^{m_{T⊕S}}.
    pub fn additivity_identity(sum: &ARExact, a: &ARExact, b: &ARExact) -> bool {
        sum.q == a.q
            && a.q == b.q
            && &sum.zero_count * BigUint::from(sum.q).pow(a.m + b.m)
                == &a.zero_count * &b.zero_count * BigUint::from(sum.q).pow(sum.m)
    }

    /// Exact comparison AR(self) <= AR(other):
    /// m_a - log(c_a) <= m_b - log(c_b)  <=>  c_b * q^{m_a} <= c_a * q^{m_b}.
    pub fn le(&self, other: &ARExact) -> bool {
        self.q == other.q
            && &other.zero_count * BigUint::from(self.q).pow(other.m)
                <= &self.zero_count * BigUint::from(self.q).pow(self.m)
    }
}

/// A geometric-rank estimate from an extension tower: exact zero counts per
/// level, the successive-ratio dimension estimate, and its residual.
#[derive(Clone, Debug)]
pub struct GREstimate {
    pub q: u64,
    pub m: u32,
    pub mode: usize,
    /// (l, |Z_mode(T)(GF(q^l))|) for l = 1..=l_max.
    pub levels: Vec<(usize, BigUint)>,
    pub dim_estimate: i64,
    pub gr: i64,
    pub residual: f64,
}

/// Guards for the exhaustive rank searches. Exceeding a guard is an error,
/// never an approximation.
#[derive(Clone, Copy, Debug)]
pub struct SearchGuard {
    /// Slice-type searches: every mode dimension must be at most this.
    pub max_mode_dim: usize,
    /// Slice/partition searches: field size must be at most this.
    pub max_q: u64,
    /// Partition search: flattened size of every enumerated part side.
    pub max_part_size: usize,
    /// cp search: number of projective rank-one tensors.
    pub max_rank_one: u128,
    /// Subrank search: q^{s * sum n_i}.
    pub max_subrank_points: u128,
}

impl Default for SearchGuard {
    fn default() -> Self {
        SearchGuard {
            max_mode_dim: 4,
            max_q: 3,
            max_part_size: 4,
            max_rank_one: 10_000,
            max_subrank_points: 1 << 24,
        }
    }
}

/// A dense coefficient block of any order >= 1; the factored halves of
/// decomposition certificates (a slice term's single-mode side is a vector,
/// which the order>=2 `Tensor` type deliberately excludes).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Factor {
    pub shape: Vec<usize>,
    pub entries: Vec<FieldElem>,
}

impl Factor {
    pub fn new(shape: Vec<usize>, entries: Vec<FieldElem>) -> Result<Self> {
        let size: usize = shape.iter().product();
        if shape.is_empty() || entries.len() != size {
            return Err(Error::ShapeMismatch(format!(
                "factor shape {shape:?} with {} entries",
                entries.len()
            )));
        }
        Ok(Factor { shape, entries })
    }

    pub fn vector(entries: Vec<FieldElem>) -> Self {
        Factor { shape: vec![entries.len()], entries }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompKind {
    Slice,
    Partition,
    Cp,
}

/// One term of a decomposition certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompTerm {
    /// A term factoring across the bipartition (part, complement): the
    /// assembled tensor is on_part ⊗ on_rest placed at the original modes.
    Split { part: Vec<usize>, on_part: Factor, on_rest: Factor },
    /// A pure product with one vector per mode.
    Pure { factors: Vec<Factor> },
}

/// A re-verifiable decomposition witness: summing the assembled terms must
/// reproduce the decomposed tensor exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompCert {
    pub kind: DecompKind,
    pub field: FieldSpec,
    pub shape: Vec<usize>,
    pub terms: Vec<DecompTerm>,
}

impl DecompCert {
    /// Sum of all assembled terms.
    pub fn assemble(&self) -> Result<Tensor> {
        let f = &self.field;
        let mut entries = vec![f.zero(); self.shape.iter().product()];
        let full_strides = strides_of(&self.shape);
        let d = self.shape.len();
        for term in &self.terms {
            match term {
                DecompTerm::Split { part, on_part, on_rest } => {
                    let comp: Vec<usize> = (0..d).filter(|m| !part.contains(m)).collect();
                    if on_part.shape != part.iter().map(|&m| self.shape[m]).collect::<Vec<_>>()
                        || on_rest.shape != comp.iter().map(|&m| self.shape[m]).collect::<Vec<_>>()
                    {
                        return Err(Error::ShapeMismatch("certificate term shape".into()));
                    }
                    let p_strides = strides_of(&on_part.shape);
                    let c_strides = strides_of(&on_rest.shape);
                    for (pi, &pv) in on_part.entries.iter().enumerate() {
                        if pv == f.zero() {
                            continue;
                        }
                        for (ci, &cv) in on_rest.entries.iter().enumerate() {
                            if cv == f.zero() {
                                continue;
                            }
                            let mut flat = 0usize;
                            for (s, &m) in part.iter().enumerate() {
                                flat += (pi / p_strides[s] % on_part.shape[s]) * full_strides[m];
                            }
                            for (s, &m) in comp.iter().enumerate() {
                                flat += (ci / c_strides[s] % on_rest.shape[s]) * full_strides[m];
                            }
                            entries[flat] = f.add(entries[flat], f.mul(pv, cv));
                        }
                    }
                }
                DecompTerm::Pure { factors } => {
                    if factors.len() != d
                        || factors.iter().zip(&self.shape).any(|(v, &n)| v.shape != vec![n])
                    {
                        return Err(Error::ShapeMismatch("pure term shape".into()));
                    }
                    for (flat, slot) in entries.iter_mut().enumerate() {
                        let mut prod = f.one();
                        for i in 0..d {
                            let coord = flat / full_strides[i] % self.shape[i];
                            prod = f.mul(prod, factors[i].entries[coord]);
                        }
                        *slot = f.add(*slot, prod);
                    }
                }
            }
        }
        Tensor::new(f.clone(), self.shape.clone(), entries)
    }

    pub fn verify(&self, t: &Tensor) -> Result<()> {
        let kind_ok = match self.kind {
            DecompKind::Slice => self
                .terms
                .iter()
                .all(|tm| matches!(tm, DecompTerm::Split { part, .. } if part.len() == 1)),
            DecompKind::Partition => {
                self.terms.iter().all(|tm| matches!(tm, DecompTerm::Split { .. }))
            }
            DecompKind::Cp => self.terms.iter().all(|tm| matches!(tm, DecompTerm::Pure { .. })),
        };
        if !kind_ok {
            return Err(Error::VerificationFailed(
                "term kind does not match certificate kind".into(),
            ));
        }
        if self.assemble()? != *t {
            return Err(Error::VerificationFailed(
                "assembled terms do not sum to the tensor".into(),
            ));
        }
        Ok(())
    }
}

/// A restriction witness: apply_matrices(maps, source) = target exactly.
#[derive(Clone, Debug, Serialize)]
pub struct RestrictionCert {
    pub maps: MatrixTuple,
    pub source: Tensor,
    pub target: Tensor,
}

impl RestrictionCert {
    pub fn verify(&self) -> Result<()> {
        let got = apply_matrices(&self.maps, &self.source)?;
        if got != self.target {
            return Err(Error::VerificationFailed(
                "restriction does not hit the target".into(),
            ));
        }
        Ok(())
    }

    pub fn maps_encoded(&self) -> Vec<Vec<Vec<u64>>> {
        self.maps
            .mats()
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|r| m.row(r).iter().map(|&e| m.field().enc(e)).collect())
                    .collect()
            })
            .collect()
    }
}

/// All weak compositions (r_1, ..., r_n) of `total` with r_i <= caps[i], in
/// ascending lexicographic order. The search order (and therefore every
/// returned certificate) depends on this being stable.
pub(crate) fn compositions(total: usize, caps: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; caps.len()];
    fn rec(i: usize, left: usize, caps: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let tail_cap: usize = caps[i + 1..].iter().sum();
        for v in 0..=caps[i].min(left) {
            if left - v > tail_cap {
                continue;
            }
            cur[i] = v;
            rec(i + 1, left - v, caps, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, total, caps, &mut cur, &mut out);
    out
}

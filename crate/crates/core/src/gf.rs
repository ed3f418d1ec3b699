//! Exact arithmetic in GF(p^k): canonical moduli, trace maps, additive
//! characters, deterministic embeddings and element enumeration.
//!
//! A field is identified by (p, k) alone: the modulus is pinned to the
//! lexicographically smallest monic irreducible of degree k over Z_p
//! (coefficients compared low-degree-first), so every output of the crate is
//! reproducible bit for bit. Elements are coefficient vectors in the power
//! basis 1, x, ..., x^{k-1}, encoded externally as the integer
//! sum coeffs[i] * p^i.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Largest supported field size; every kernel in this crate enumerates
/// field points exhaustively.
pub const MAX_FIELD_SIZE: u128 = 1 << 20;

/// Fields up to this size carry full multiplication/inverse/trace tables.
const TABLE_MAX_Q: u64 = 1024;

struct FieldInner {
    p: u64,
    k: usize,
    q: u64,
    /// Monic modulus of degree k over Z_p, k+1 coefficients, low degree first.
    modulus: Vec<u64>,
    tables: Option<Tables>,
    /// The p complex p-th roots of unity, indexed by trace residue.
    char_roots: Vec<Complex64>,
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    neg: Vec<u32>,
    trace: Vec<u64>,
}

/// A concrete finite field GF(p^k) with the canonical modulus.
///
/// Cheap to clone (shared internals); two specs with equal (p, k) are the
/// same field.
#[derive(Clone)]
pub struct FieldSpec(Arc<FieldInner>);

/// An element of some [`FieldSpec`], stored as its base-p integer encoding
/// together with the field size for mismatch detection.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    enc: u32,
    q: u32,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.enc, self.q)
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.k)
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.k == other.0.k
    }
}
impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.k.hash(state);
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FieldSpec", 2)?;
        st.serialize_field("p", &self.0.p)?;
        st.serialize_field("k", &self.0.k)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: u64,
            k: usize,
        }
        let raw = Raw::deserialize(d)?;
        field_make(raw.p, raw.k).map_err(serde::de::Error::custom)
    }
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.enc as u64)
    }
}

/// The five arithmetic operations exposed by [`FieldSpec::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

static REGISTRY: OnceLock<Mutex<HashMap<(u64, usize), FieldSpec>>> = OnceLock::new();

/// Constructs the canonical GF(p^k): the modulus is the lexicographically
/// smallest monic irreducible of degree k over Z_p (coefficients compared
/// low-degree-first). Deterministic; repeated calls share one instance.
pub fn field_make(p: u64, k: usize) -> Result<FieldSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k < 1 {
        return Err(Error::BadDegree(k));
    }
    let q128 = (p as u128)
        .checked_pow(k as u32)
        .ok_or(Error::FieldTooLarge(u128::MAX, MAX_FIELD_SIZE))?;
    if q128 > MAX_FIELD_SIZE {
        return Err(Error::FieldTooLarge(q128, MAX_FIELD_SIZE));
    }

    let registry = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = registry.lock().unwrap().get(&(p, k)) {
        return Ok(f.clone());
    }

    let modulus = if k == 1 {
        vec![0, 1] // x itself: the smallest monic degree-1 polynomial
    } else {
        let base = FieldSpec::build(p, 1, vec![0, 1]);
        let m = smallest_irreducible(&base, k)?;
        m.iter().map(|e| e.enc as u64).collect()
    };
    let spec = FieldSpec::build(p, k, modulus);
    registry
        .lock()
        .unwrap()
        .insert((p, k), spec.clone());
    Ok(spec)
}

impl FieldSpec {
    fn build(p: u64, k: usize, modulus: Vec<u64>) -> FieldSpec {
        let q = (p as u128).pow(k as u32) as u64;
        let mut inner = FieldInner {
            p,
            k,
            q,
            modulus,
            tables: None,
            char_roots: (0..p)
                .map(|t| {
                    let (s, c) = (TAU * t as f64 / p as f64).sin_cos();
                    Complex64::new(c, s)
                })
                .collect(),
        };
        if q <= TABLE_MAX_Q {
            inner.tables = Some(inner.build_tables());
        }
        FieldSpec(Arc::new(inner))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn k(&self) -> usize {
        self.0.k
    }
    /// Field size q = p^k.
    pub fn q(&self) -> u64 {
        self.0.q
    }
    /// The canonical modulus, k+1 coefficients in Z_p, low degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { enc: 0, q: self.0.q as u32 }
    }
    pub fn one(&self) -> FieldElem {
        FieldElem { enc: 1, q: self.0.q as u32 }
    }
    /// The class of x (a generator of the power basis), for k >= 2; equals
    /// `p` as an encoding.
    pub fn gen(&self) -> FieldElem {
        debug_assert!(self.0.k >= 2);
        FieldElem { enc: self.0.p as u32, q: self.0.q as u32 }
    }

    /// Element from its base-p integer encoding.
    pub fn elem(&self, enc: u64) -> Result<FieldElem> {
        if enc >= self.0.q {
            return Err(Error::BadEncoding(enc, self.0.q));
        }
        Ok(FieldElem { enc: enc as u32, q: self.0.q as u32 })
    }

    pub(crate) fn elem_unchecked(&self, enc: u64) -> FieldElem {
        debug_assert!(enc < self.0.q);
        FieldElem { enc: enc as u32, q: self.0.q as u32 }
    }

    /// Element from its coefficient vector (length k, entries in [0, p)).
    pub fn elem_from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() != self.0.k {
            return Err(Error::BadCoeffLength { got: coeffs.len(), want: self.0.k });
        }
        let mut enc = 0u64;
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.0.p {
                return Err(Error::BadEncoding(c, self.0.p));
            }
            enc += c * (self.0.p as u128).pow(i as u32) as u64;
        }
        self.elem(enc)
    }

    /// Coefficient vector of an element in the basis 1, x, ..., x^{k-1}.
    pub fn coeffs(&self, a: FieldElem) -> Vec<u64> {
        let mut enc = a.enc as u64;
        let mut out = Vec::with_capacity(self.0.k);
        for _ in 0..self.0.k {
            out.push(enc % self.0.p);
            enc /= self.0.p;
        }
        out
    }

    /// Integer encoding of an element.
    pub fn enc(&self, a: FieldElem) -> u64 {
        a.enc as u64
    }

    fn check(&self, a: FieldElem) -> Result<()> {
        if a.q as u64 != self.0.q {
            return Err(Error::MismatchedFields(a.q as u64, self.0.q));
        }
        Ok(())
    }

    /// All q elements in lexicographic coefficient order (low digit fastest),
    /// i.e. ascending integer encoding. The order is part of the external
    /// contract: interpolation points and embedding roots are "first in this
    /// order".
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        let q = self.0.q;
        (0..q).map(move |e| self.elem_unchecked(e))
    }

    /// Checked arithmetic entry point; rejects mixed fields and zero inverses.
    /// `b` is ignored for the unary ops `Inv` and `Neg`.
    pub fn arith(&self, a: FieldElem, b: FieldElem, op: ArithOp) -> Result<FieldElem> {
        self.check(a)?;
        match op {
            ArithOp::Add => {
                self.check(b)?;
                Ok(self.add(a, b))
            }
            ArithOp::Sub => {
                self.check(b)?;
                Ok(self.sub(a, b))
            }
            ArithOp::Mul => {
                self.check(b)?;
                Ok(self.mul(a, b))
            }
            ArithOp::Inv => {
                if a.enc == 0 {
                    return Err(Error::ZeroInverse);
                }
                Ok(self.inv(a))
            }
            ArithOp::Neg => Ok(self.neg(a)),
        }
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        debug_assert_eq!(a.q as u64, self.0.q);
        debug_assert_eq!(b.q as u64, self.0.q);
        if let Some(t) = &self.0.tables {
            return FieldElem {
                enc: t.add[a.enc as usize * self.0.q as usize + b.enc as usize],
                q: a.q,
            };
        }
        self.add_slow(a, b)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if let Some(t) = &self.0.tables {
            return FieldElem { enc: t.neg[a.enc as usize], q: a.q };
        }
        let p = self.0.p;
        let coeffs: Vec<u64> = self.coeffs(a).iter().map(|&c| (p - c) % p).collect();
        self.elem_from_coeffs(&coeffs).unwrap()
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        debug_assert_eq!(a.q as u64, self.0.q);
        debug_assert_eq!(b.q as u64, self.0.q);
        if let Some(t) = &self.0.tables {
            return FieldElem {
                enc: t.mul[a.enc as usize * self.0.q as usize + b.enc as usize],
                q: a.q,
            };
        }
        self.mul_slow(a, b)
    }

    /// Multiplicative inverse; panics on zero (use [`FieldSpec::arith`] for
    /// the checked route).
    pub fn inv(&self, a: FieldElem) -> FieldElem {
        assert!(a.enc != 0, "zero has no inverse");
        if let Some(t) = &self.0.tables {
            return FieldElem { enc: t.inv[a.enc as usize], q: a.q };
        }
        self.pow(a, self.0.q - 2)
    }

    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn add_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.0.p;
        let ca = self.coeffs(a);
        let cb = self.coeffs(b);
        let coeffs: Vec<u64> = ca.iter().zip(&cb).map(|(&x, &y)| (x + y) % p).collect();
        self.elem_from_coeffs(&coeffs).unwrap()
    }

    fn mul_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.0.p;
        let k = self.0.k;
        let ca = self.coeffs(a);
        let cb = self.coeffs(b);
        // schoolbook product, then reduce modulo the monic modulus
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p;
            }
        }
        for i in (k..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..k {
                let m = self.0.modulus[j];
                if m != 0 {
                    let idx = i - k + j;
                    prod[idx] = (prod[idx] + p * p - (c * m) % p) % p;
                }
            }
        }
        self.elem_from_coeffs(&prod[..k]).unwrap()
    }

    fn trace_raw(&self, a: FieldElem) -> u64 {
        // Tr(x) = sum of x^{p^i}, i < k; lands in the prime field.
        let mut acc = a;
        let mut frob = a;
        for _ in 1..self.0.k {
            frob = self.pow(frob, self.0.p);
            acc = self.add(acc, frob);
        }
        let coeffs = self.coeffs(acc);
        debug_assert!(coeffs[1..].iter().all(|&c| c == 0), "trace left the prime field");
        coeffs[0]
    }

    /// Absolute trace to the prime field, as a residue in [0, p).
    pub fn trace(&self, a: FieldElem) -> u64 {
        if let Some(t) = &self.0.tables {
            return t.trace[a.enc as usize];
        }
        self.trace_raw(a)
    }

    /// The fixed non-trivial additive character chi(x) = exp(2 pi i Tr(x)/p)
    /// together with the trace residue it is built from.
    pub fn trace_and_character(&self, a: FieldElem) -> (u64, Complex64) {
        let t = self.trace(a);
        (t, self.0.char_roots[t as usize])
    }

    /// chi(x) alone, for the counting kernels.
    pub fn character(&self, a: FieldElem) -> Complex64 {
        self.0.char_roots[self.trace(a) as usize]
    }

    /// Deterministic embedding of this field into `dst` = GF(p^{k*l}): sends
    /// the power-basis generator to the lexicographically smallest root of
    /// this field's modulus in `dst`. Build once, apply per element.
    pub fn embedding(&self, dst: &FieldSpec) -> Result<Embedding> {
        if self.0.p != dst.0.p {
            return Err(Error::BadEmbedding {
                src_p: self.0.p,
                src_k: self.0.k,
                dst_p: dst.0.p,
                dst_k: dst.0.k,
                reason: "different characteristics",
            });
        }
        if dst.0.k % self.0.k != 0 {
            return Err(Error::BadEmbedding {
                src_p: self.0.p,
                src_k: self.0.k,
                dst_p: dst.0.p,
                dst_k: dst.0.k,
                reason: "degree does not divide",
            });
        }
        // Smallest root of our modulus in dst, in enumeration order.
        let mod_in_dst: Vec<FieldElem> = self
            .0
            .modulus
            .iter()
            .map(|&c| dst.elem_unchecked(c))
            .collect();
        let root = dst
            .elements()
            .find(|&x| poly_eval(dst, &mod_in_dst, x).enc == 0)
            .ok_or(Error::BadEmbedding {
                src_p: self.0.p,
                src_k: self.0.k,
                dst_p: dst.0.p,
                dst_k: dst.0.k,
                reason: "modulus has no root in destination",
            })?;
        let mut powers = Vec::with_capacity(self.0.k);
        let mut acc = dst.one();
        for _ in 0..self.0.k {
            powers.push(acc);
            acc = dst.mul(acc, root);
        }
        Ok(Embedding { src: self.clone(), dst: dst.clone(), root_powers: powers })
    }

    fn build_tables(&self) -> Tables {
        let q = self.0.q as usize;
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        let mut neg = vec![0u32; q];
        let mut inv = vec![0u32; q];
        let mut trace = vec![0u64; q];
        for a in 0..q {
            let ea = self.elem_unchecked(a as u64);
            neg[a] = self.neg_slow_for_tables(ea).enc;
            trace[a] = self.trace_raw(ea);
            for b in 0..q {
                let eb = self.elem_unchecked(b as u64);
                add[a * q + b] = self.add_slow(ea, eb).enc;
                mul[a * q + b] = self.mul_slow(ea, eb).enc;
            }
        }
        for a in 1..q {
            // find inverses from the finished mul table
            inv[a] = (0..q).find(|&b| mul[a * q + b] == 1).expect("unit has inverse") as u32;
        }
        Tables { add, mul, neg, inv, trace }
    }

    fn neg_slow_for_tables(&self, a: FieldElem) -> FieldElem {
        let p = self.0.p;
        let coeffs: Vec<u64> = self.coeffs(a).iter().map(|&c| (p - c) % p).collect();
        self.elem_from_coeffs(&coeffs).unwrap()
    }
}

impl FieldInner {
    // table construction needs element arithmetic before the final Arc
    // exists; run it on a table-less shim of the same field
    fn build_tables(&self) -> Tables {
        let shim = FieldSpec(Arc::new(FieldInner {
            p: self.p,
            k: self.k,
            q: self.q,
            modulus: self.modulus.clone(),
            tables: None,
            char_roots: Vec::new(),
        }));
        shim.build_tables()
    }
}

/// A ring homomorphism GF(p^k) -> GF(p^{k*l}) fixed by the smallest-root rule.
#[derive(Clone)]
pub struct Embedding {
    src: FieldSpec,
    dst: FieldSpec,
    root_powers: Vec<FieldElem>,
}

impl Embedding {
    pub fn src(&self) -> &FieldSpec {
        &self.src
    }
    pub fn dst(&self) -> &FieldSpec {
        &self.dst
    }

    pub fn apply(&self, x: FieldElem) -> Result<FieldElem> {
        if x.q as u64 != self.src.q() {
            return Err(Error::MismatchedFields(x.q as u64, self.src.q()));
        }
        let coeffs = self.src.coeffs(x);
        let mut acc = self.dst.zero();
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let scalar = self.dst.elem_unchecked(c); // c < p, valid in dst
            acc = self.dst.add(acc, self.dst.mul(scalar, self.root_powers[i]));
        }
        Ok(acc)
    }
}

/// One-off embedding of a single element; prefer [`FieldSpec::embedding`] in
/// loops.
pub fn embed(src: &FieldSpec, dst: &FieldSpec, x: FieldElem) -> Result<FieldElem> {
    src.embedding(dst)?.apply(x)
}

// ---------------------------------------------------------------------------
// Polynomial helpers over an arbitrary FieldSpec (coefficients low-first).
// Used for canonical moduli, relative extensions and the interpolation
// constructions.
// ---------------------------------------------------------------------------

pub(crate) fn poly_eval(f: &FieldSpec, coeffs: &[FieldElem], x: FieldElem) -> FieldElem {
    let mut acc = f.zero();
    for &c in coeffs.iter().rev() {
        acc = f.add(f.mul(acc, x), c);
    }
    acc
}

fn poly_degree(coeffs: &[FieldElem]) -> Option<usize> {
    coeffs.iter().rposition(|c| c.enc != 0)
}

/// Remainder of `a` modulo a monic `m`.
pub(crate) fn poly_rem(f: &FieldSpec, a: &[FieldElem], m: &[FieldElem]) -> Vec<FieldElem> {
    let md = poly_degree(m).expect("modulus must be nonzero");
    debug_assert_eq!(f.enc(m[md]), 1, "modulus must be monic");
    let mut r: Vec<FieldElem> = a.to_vec();
    while let Some(d) = poly_degree(&r) {
        if d < md {
            break;
        }
        let c = r[d];
        let shift = d - md;
        for j in 0..=md {
            let t = f.mul(c, m[j]);
            r[shift + j] = f.sub(r[shift + j], t);
        }
    }
    r.truncate(md);
    while r.len() < md {
        r.push(f.zero());
    }
    r
}

/// The lexicographically smallest monic irreducible of degree `l` over `f`
/// (coefficient sequences compared low-degree-first, each coefficient by its
/// integer encoding). Irreducibility by exhaustive divisor search, which is
/// exact for the desk-scale degrees this crate supports.
pub fn smallest_irreducible(f: &FieldSpec, l: usize) -> Result<Vec<FieldElem>> {
    if l < 1 {
        return Err(Error::BadDegree(l));
    }
    let q = f.q();
    let total = (q as u128)
        .checked_pow(l as u32)
        .ok_or(Error::FieldTooLarge(u128::MAX, MAX_FIELD_SIZE))?;
    if total > MAX_FIELD_SIZE {
        return Err(Error::FieldTooLarge(total, MAX_FIELD_SIZE));
    }
    for code in 0..total as u64 {
        // c_0 is the most significant digit so that ascending `code` is
        // ascending lexicographic order on (c_0, c_1, ..., c_{l-1}).
        let mut coeffs = Vec::with_capacity(l + 1);
        let mut rem = code;
        let mut divisor = total as u64 / q;
        for _ in 0..l {
            coeffs.push(f.elem_unchecked(rem / divisor));
            rem %= divisor;
            divisor = (divisor / q).max(1);
        }
        coeffs.push(f.one());
        if poly_is_irreducible(f, &coeffs) {
            return Ok(coeffs);
        }
    }
    unreachable!("irreducible polynomials of every degree exist over a finite field")
}

fn poly_is_irreducible(f: &FieldSpec, m: &[FieldElem]) -> bool {
    let d = poly_degree(m).expect("nonzero");
    if d == 1 {
        return true;
    }
    let q = f.q();
    for e in 1..=d / 2 {
        let count = (q as u128).pow(e as u32) as u64;
        for code in 0..count {
            let mut div = Vec::with_capacity(e + 1);
            let mut rem = code;
            for _ in 0..e {
                div.push(f.elem_unchecked(rem % q));
                rem /= q;
            }
            div.push(f.one());
            if poly_degree(&poly_rem(f, m, &div)).is_none() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, k: usize) -> FieldSpec {
        field_make(p, k).unwrap()
    }

    /// Oracle: smallest irreducible by direct enumeration + full divisor
    /// check, written independently of `smallest_irreducible`'s loop shape.
    fn oracle_modulus(p: u64, k: usize) -> Vec<u64> {
        let f = gf(p, 1);
        let mut candidates: Vec<Vec<u64>> = Vec::new();
        let total = p.pow(k as u32);
        for code in 0..total {
            let mut c = Vec::new();
            let mut rem = code;
            for _ in 0..k {
                c.push(rem % p);
                rem /= p;
            }
            c.push(1);
            candidates.push(c);
        }
        // lexicographic low-to-high coefficient order
        candidates.sort();
        'cand: for c in candidates {
            let elems: Vec<FieldElem> = c.iter().map(|&x| f.elem(x).unwrap()).collect();
            for e in 1..=k / 2 {
                for code in 0..p.pow(e as u32) {
                    let mut dv = Vec::new();
                    let mut rem = code;
                    for _ in 0..e {
                        dv.push(f.elem(rem % p).unwrap());
                        rem /= p;
                    }
                    dv.push(f.one());
                    let r = poly_rem(&f, &elems, &dv);
                    if r.iter().all(|x| f.enc(*x) == 0) {
                        continue 'cand;
                    }
                }
            }
            return c;
        }
        unreachable!()
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(gf(2, 1).modulus(), &[0, 1]); // x
        assert_eq!(gf(2, 2).modulus(), &[1, 1, 1]); // x^2+x+1
        assert_eq!(gf(3, 2).modulus(), &[1, 0, 1]); // x^2+1
        for &(p, k) in &[(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2)] {
            assert_eq!(gf(p, k).modulus(), oracle_modulus(p, k), "GF({p}^{k})");
        }
    }

    #[test]
    fn field_make_errors() {
        assert_eq!(field_make(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(field_make(1, 1).unwrap_err(), Error::NotPrime(1));
        assert_eq!(field_make(2, 0).unwrap_err(), Error::BadDegree(0));
    }

    #[test]
    fn gf4_arithmetic() {
        let f = gf(2, 2);
        let a = f.gen();
        assert_eq!(f.add(a, a), f.zero()); // characteristic 2
        let a1 = f.elem_from_coeffs(&[1, 1]).unwrap();
        assert_eq!(f.mul(a, a), a1); // x^2 = x+1 mod x^2+x+1

        // oracle: exhaustive search for the inverse
        let inv = f.elements().find(|&b| f.mul(a, b) == f.one()).unwrap();
        assert_eq!(f.arith(a, a, ArithOp::Inv).unwrap(), inv);
        assert_eq!(inv, a1);
    }

    #[test]
    fn arith_errors() {
        let f = gf(2, 2);
        let g = gf(3, 1);
        assert_eq!(
            f.arith(f.zero(), f.zero(), ArithOp::Inv).unwrap_err(),
            Error::ZeroInverse
        );
        assert!(matches!(
            f.arith(f.one(), g.one(), ArithOp::Add).unwrap_err(),
            Error::MismatchedFields(..)
        ));
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for &(p, k) in &[(2, 1), (2, 2), (3, 1), (2, 3), (3, 2)] {
            let f = gf(p, k);
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if a != f.zero() {
                    assert_eq!(f.mul(a, f.inv(a)), f.one());
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_and_character_examples() {
        let f2 = gf(2, 1);
        assert_eq!(f2.trace_and_character(f2.zero()).0, 0);
        assert!((f2.trace_and_character(f2.zero()).1 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let (t, chi) = f2.trace_and_character(f2.one());
        assert_eq!(t, 1);
        assert!((chi - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        // alpha in GF(4): Tr = alpha + alpha^2 = alpha + (alpha+1) = 1
        let f4 = gf(2, 2);
        let a = f4.gen();
        let frob = f4.mul(a, a);
        let tr_oracle = f4.add(a, frob);
        assert_eq!(f4.enc(tr_oracle), 1);
        assert_eq!(f4.trace(a), 1);
    }

    #[test]
    fn character_is_additive() {
        for &(p, k) in &[(2, 1), (2, 2), (3, 1), (3, 2), (2, 3), (5, 1), (7, 1)] {
            let f = gf(p, k);
            let els: Vec<_> = f.elements().collect();
            for &x in &els {
                for &y in &els {
                    let lhs = f.character(f.add(x, y));
                    let rhs = f.character(x) * f.character(y);
                    assert!((lhs.re - rhs.re).abs() < 1e-12 && (lhs.im - rhs.im).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn character_orthogonality() {
        // sum of chi over the whole field vanishes for the non-trivial character
        for &(p, k) in &[(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let f = gf(p, k);
            let s: Complex64 = f.elements().map(|x| f.character(x)).sum();
            assert!(s.norm() < 1e-12, "sum chi != 0 over GF({})", f.q());
        }
    }

    #[test]
    fn frobenius_fixes_field() {
        for &(p, k) in &[(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let f = gf(p, k);
            for x in f.elements() {
                assert_eq!(f.pow(x, f.q()), x);
            }
        }
    }

    #[test]
    fn enumeration_order() {
        let f2 = gf(2, 1);
        assert_eq!(f2.elements().map(|e| f2.enc(e)).collect::<Vec<_>>(), vec![0, 1]);
        let f3 = gf(3, 1);
        assert_eq!(f3.elements().map(|e| f3.enc(e)).collect::<Vec<_>>(), vec![0, 1, 2]);
        let f4 = gf(2, 2);
        let order: Vec<Vec<u64>> = f4.elements().map(|e| f4.coeffs(e)).collect();
        assert_eq!(order, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn embedding_examples() {
        let f2 = gf(2, 1);
        let f4 = gf(2, 2);
        let e = f2.embedding(&f4).unwrap();
        assert_eq!(e.apply(f2.zero()).unwrap(), f4.zero());
        assert_eq!(e.apply(f2.one()).unwrap(), f4.one());

        // GF(4) -> GF(16): generator goes to the smallest root of x^2+x+1.
        let f16 = gf(2, 4);
        let e = f4.embedding(&f16).unwrap();
        let img = e.apply(f4.gen()).unwrap();
        let oracle_root = f16
            .elements()
            .find(|&x| {
                let x2 = f16.mul(x, x);
                f16.add(f16.add(x2, x), f16.one()) == f16.zero()
            })
            .unwrap();
        assert_eq!(img, oracle_root);
    }

    #[test]
    fn embedding_is_homomorphism() {
        for (src, dst) in [(gf(2, 1), gf(2, 2)), (gf(3, 1), gf(3, 2)), (gf(2, 2), gf(2, 4))] {
            let e = src.embedding(&dst).unwrap();
            let els: Vec<_> = src.elements().collect();
            for &x in &els {
                for &y in &els {
                    assert_eq!(
                        e.apply(src.mul(x, y)).unwrap(),
                        dst.mul(e.apply(x).unwrap(), e.apply(y).unwrap())
                    );
                    assert_eq!(
                        e.apply(src.add(x, y)).unwrap(),
                        dst.add(e.apply(x).unwrap(), e.apply(y).unwrap())
                    );
                }
            }
        }
    }

    #[test]
    fn embedding_errors() {
        let f2 = gf(2, 1);
        let f3 = gf(3, 1);
        let f8 = gf(2, 3);
        let f4 = gf(2, 2);
        assert!(f2.embedding(&f3).is_err());
        assert!(f4.embedding(&f8).is_err()); // 2 does not divide 3
    }

    #[test]
    fn character_independence_of_trace_direction() {
        // chi is a p-th root of unity for every element
        for &(p, k) in &[(2, 2), (3, 2), (5, 1)] {
            let f = gf(p, k);
            for x in f.elements() {
                let c = f.character(x);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..p {
                    acc *= c;
                }
                assert!((acc - Complex64::new(1.0, 0.0)).norm() < 1e-10);
            }
        }
    }
}

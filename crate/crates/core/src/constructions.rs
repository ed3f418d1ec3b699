//! Explicit certificates for field-extension multiplication tensors:
//! Vandermonde interpolation decompositions of polynomial multiplication,
//! their pushforward along the quotient map to GF(q^l)-multiplication,
//! interpolation subrank witnesses, the polynomial-degree monotonicity
//! chain, and the T_W tensor attaching a slice-rank-faithful tensor to a
//! tensor subspace.
//!
//! Every construction verifies its own output by exact reconstruction or
//! apply_matrices before returning; a construction that fails verification
//! is a defect, not a result.

use crate::error::{Error, Result};
use crate::gf::{poly_rem, smallest_irreducible, FieldElem, FieldSpec};
use crate::mat::Matrix;
use crate::ranks::{DecompCert, DecompKind, DecompTerm, Factor, RestrictionCert};
use crate::subspace::TensorSubspace;
use crate::tensor::{identity_tensor, mult_tensor, poly_mult_tensor, MatrixTuple, Tensor};

/// An interpolation decomposition of the (d-1)-fold polynomial
/// multiplication tensor M_d into exactly N+1 = (d-1)(l-1)+1 pure terms:
/// evaluation at N+1 distinct points composed with the inverse Vandermonde.
#[derive(Clone, Debug)]
pub struct InterpDecomp {
    pub d: usize,
    pub l: usize,
    pub points: Vec<FieldElem>,
    pub terms: DecompCert,
}

fn vandermonde(f: &FieldSpec, points: &[FieldElem], cols: usize) -> Matrix {
    let mut v = Matrix::zeros(f, points.len(), cols);
    for (j, &a) in points.iter().enumerate() {
        let mut acc = f.one();
        for i in 0..cols {
            v.set(j, i, acc);
            acc = f.mul(acc, a);
        }
    }
    v
}

/// R(M_d) <= N+1 realized constructively: the j-th term evaluates the d-1
/// inputs at the j-th point and weights the output by the j-th column of the
/// inverse Vandermonde. Needs q >= N+1 distinct points.
pub fn interp_decomp(d: usize, l: usize, f: &FieldSpec) -> Result<InterpDecomp> {
    if d < 2 || l < 1 {
        return Err(Error::InvalidInput(format!("need d >= 2 and l >= 1, got d={d}, l={l}")));
    }
    let n_pts = (d - 1) * (l - 1) + 1;
    if (f.q() as usize) < n_pts {
        return Err(Error::GuardExceeded(format!(
            "q = {} < N+1 = {n_pts} interpolation points",
            f.q()
        )));
    }
    let points: Vec<FieldElem> = f.elements().take(n_pts).collect();
    let v = vandermonde(f, &points, n_pts);
    let vinv = v.inverse().ok_or_else(|| {
        Error::VerificationFailed("Vandermonde at distinct points must be invertible".into())
    })?;
    let target = poly_mult_tensor(d, l - 1, f)?;
    let terms: Vec<DecompTerm> = (0..n_pts)
        .map(|j| {
            let eval: Vec<FieldElem> = (0..l)
                .scan(f.one(), |acc, _| {
                    let cur = *acc;
                    *acc = f.mul(*acc, points[j]);
                    Some(cur)
                })
                .collect();
            let weight: Vec<FieldElem> = (0..n_pts).map(|t| vinv.get(t, j)).collect();
            let mut factors: Vec<Factor> =
                (0..d - 1).map(|_| Factor::vector(eval.clone())).collect();
            factors.push(Factor::vector(weight));
            DecompTerm::Pure { factors }
        })
        .collect();
    let cert = DecompCert {
        kind: DecompKind::Cp,
        field: f.clone(),
        shape: target.shape().to_vec(),
        terms,
    };
    cert.verify(&target)?;
    Ok(InterpDecomp { d, l, points, terms: cert })
}

/// Composes an interpolation decomposition of M_d with the reduction modulo
/// the canonical relative modulus, certifying
/// R(T_{d,GF(q^l)}) <= (d-1)(l-1)+1. Term count is preserved.
pub fn pushforward_to_extension(
    dec: &InterpDecomp,
    d: usize,
    l: usize,
    f: &FieldSpec,
) -> Result<DecompCert> {
    if dec.d != d || dec.l != l {
        return Err(Error::InvalidInput("decomposition does not match (d, l)".into()));
    }
    let target = mult_tensor(d, f, l)?;
    let modulus = smallest_irreducible(f, l)?;
    let n_pts = (d - 1) * (l - 1) + 1;
    // reduction matrix: column t = coefficients of x^t mod modulus
    let mut red = Matrix::zeros(f, l, n_pts);
    for t in 0..n_pts {
        let mut xt = vec![f.zero(); t + 1];
        xt[t] = f.one();
        let r = poly_rem(f, &xt, &modulus);
        for i in 0..l {
            red.set(i, t, r[i]);
        }
    }
    let terms: Vec<DecompTerm> = dec
        .terms
        .terms
        .iter()
        .map(|term| {
            let DecompTerm::Pure { factors } = term else {
                return Err(Error::VerificationFailed("interpolation terms are pure".into()));
            };
            let w = &factors[d - 1].entries;
            let reduced: Vec<FieldElem> = (0..l)
                .map(|i| {
                    let mut acc = f.zero();
                    for (t, &c) in w.iter().enumerate() {
                        acc = f.add(acc, f.mul(red.get(i, t), c));
                    }
                    acc
                })
                .collect();
            let mut new_factors = factors[..d - 1].to_vec();
            new_factors.push(Factor::vector(reduced));
            Ok(DecompTerm::Pure { factors: new_factors })
        })
        .collect::<Result<Vec<_>>>()?;
    let cert = DecompCert {
        kind: DecompKind::Cp,
        field: f.clone(),
        shape: target.shape().to_vec(),
        terms,
    };
    cert.verify(&target)?;
    Ok(cert)
}

/// Interpolation subrank witness: Id_{m+1} ⪯ T_{d,GF(q^l)} with
/// m = floor((l-1)/(d-1)). The input maps interpolate a degree-<=m
/// polynomial through the given values and read it as a field element; the
/// output map evaluates back at the same points. Needs q >= m+1.
pub fn subrank_cert_interpolation(d: usize, l: usize, f: &FieldSpec) -> Result<RestrictionCert> {
    if d < 2 || l < 1 {
        return Err(Error::InvalidInput(format!("need d >= 2 and l >= 1, got d={d}, l={l}")));
    }
    let m = (l - 1) / (d - 1);
    if (f.q() as usize) < m + 1 {
        return Err(Error::GuardExceeded(format!(
            "q = {} < m+1 = {} evaluation points",
            f.q(),
            m + 1
        )));
    }
    let points: Vec<FieldElem> = f.elements().take(m + 1).collect();
    let v = vandermonde(f, &points, m + 1);
    let vinv = v.inverse().ok_or_else(|| {
        Error::VerificationFailed("Vandermonde at distinct points must be invertible".into())
    })?;
    // input side: values -> coefficients of the interpolating polynomial,
    // padded to length l (degree <= m < l, no reduction happens)
    let mut m_in = Matrix::zeros(f, m + 1, l);
    for a in 0..m + 1 {
        for b in 0..m + 1 {
            m_in.set(a, b, vinv.get(b, a));
        }
    }
    // output side: coefficients -> values at the same points
    let m_out = vandermonde(f, &points, l);
    let mut mats = vec![m_in; d - 1];
    mats.push(m_out);
    let cert = RestrictionCert {
        maps: MatrixTuple::new(mats)?,
        source: mult_tensor(d, f, l)?,
        target: identity_tensor(m + 1, d, f)?,
    };
    cert.verify()?;
    Ok(cert)
}

/// The two verified restriction certificates behind the monotonicity
/// Q(T_{d,q^n}) <= Q(T_{d,q^l}) for (l-1) >= (d-1)(n-1):
/// T_{d,q^n} ⪯ M_{d,n} (reduce the product modulo the degree-n modulus) and
/// M_{d,n} ⪯ T_{d,q^l} (degrees stay below l, so multiplication in GF(q^l)
/// never wraps).
#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub lower: RestrictionCert,
    pub upper: RestrictionCert,
}

pub fn poly_monotonicity_check(
    d: usize,
    n: usize,
    l: usize,
    f: &FieldSpec,
) -> Result<MonotonicityReport> {
    if d < 2 || n < 1 || l < 1 {
        return Err(Error::InvalidInput(format!(
            "need d >= 2, n >= 1, l >= 1, got d={d}, n={n}, l={l}"
        )));
    }
    if l - 1 < (d - 1) * (n - 1) {
        return Err(Error::InvalidInput(format!(
            "degree condition violated: l-1 = {} < (d-1)(n-1) = {}",
            l - 1,
            (d - 1) * (n - 1)
        )));
    }
    let n_out = (d - 1) * (n - 1) + 1;
    let m_dn = poly_mult_tensor(d, n - 1, f)?;

    // T_{d,q^n} ⪯ M_{d,n}: identities in, reduction modulo the degree-n
    // modulus out
    let modulus_n = smallest_irreducible(f, n)?;
    let mut red = Matrix::zeros(f, n, n_out);
    for t in 0..n_out {
        let mut xt = vec![f.zero(); t + 1];
        xt[t] = f.one();
        let r = poly_rem(f, &xt, &modulus_n);
        for i in 0..n {
            red.set(i, t, r[i]);
        }
    }
    let mut mats = vec![Matrix::identity(f, n); d - 1];
    mats.push(red);
    let lower = RestrictionCert {
        maps: MatrixTuple::new(mats)?,
        source: m_dn.clone(),
        target: mult_tensor(d, f, n)?,
    };
    lower.verify()?;

    // M_{d,n} ⪯ T_{d,q^l}: inclusion of low-degree coefficients in,
    // truncation out; exact because (d-1)(n-1) <= l-1
    let mut incl = Matrix::zeros(f, n, l);
    for i in 0..n {
        incl.set(i, i, f.one());
    }
    let mut trunc = Matrix::zeros(f, n_out, l);
    for i in 0..n_out {
        trunc.set(i, i, f.one());
    }
    let mut mats = vec![incl; d - 1];
    mats.push(trunc);
    let upper = RestrictionCert {
        maps: MatrixTuple::new(mats)?,
        source: mult_tensor(d, f, l)?,
        target: m_dn,
    };
    upper.verify()?;

    Ok(MonotonicityReport { lower, upper })
}

/// The order-(d+2) tensor T_W = Σ_j T_j ⊗ (Σ_i e_{ij} ⊗ e_{ij}) with two new
/// modes of size m*n (m = max mode dimension, n = dim W); its slice rank
/// equals SR(W).
pub fn tw_tensor(w: &TensorSubspace) -> Result<Tensor> {
    let f = w.field();
    let n = w.dim();
    let m = *w.shape().iter().max().expect("order >= 2");
    let mn = m * n;
    let mut shape = w.shape().to_vec();
    shape.push(mn);
    shape.push(mn);
    let base_size: usize = w.shape().iter().product();
    let mut entries = vec![f.zero(); base_size * mn * mn];
    for s in 0..mn {
        let j = s % n;
        let basis = w.basis()[j].entries();
        for (a, &val) in basis.iter().enumerate() {
            entries[(a * mn + s) * mn + s] = val;
        }
    }
    Tensor::new(f.clone(), shape, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;
    use crate::ranks::{slice_rank, sr_subspace};
    use crate::tensor::contract;

    #[test]
    fn interp_decomp_examples() {
        // d=3, l=2 over F_3: 3 terms, shape (2,2,3), evaluation at 0,1,2
        let f3 = field_make(3, 1).unwrap();
        let dec = interp_decomp(3, 2, &f3).unwrap();
        assert_eq!(dec.terms.terms.len(), 3);
        assert_eq!(dec.terms.shape, vec![2, 2, 3]);
        let pts: Vec<u64> = dec.points.iter().map(|&p| f3.enc(p)).collect();
        assert_eq!(pts, vec![0, 1, 2]);

        // d=3, l=3 over F_7: exactly 5 terms, shape (3,3,5)
        let f7 = field_make(7, 1).unwrap();
        let dec = interp_decomp(3, 3, &f7).unwrap();
        assert_eq!(dec.terms.terms.len(), 5);
        assert_eq!(dec.terms.shape, vec![3, 3, 5]);

        // d=2, l=2 over F_2: two points decompose the identity-like M_2
        let f2 = field_make(2, 1).unwrap();
        let dec = interp_decomp(2, 2, &f2).unwrap();
        assert_eq!(dec.terms.terms.len(), 2);

        // too few points
        assert!(matches!(interp_decomp(3, 2, &f2), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn interp_term_count_is_exact() {
        for (d, l, p) in [(2usize, 3usize, 3u64), (3, 2, 3), (3, 3, 5), (4, 2, 5)] {
            let f = field_make(p, 1).unwrap();
            let dec = interp_decomp(d, l, &f).unwrap();
            assert_eq!(dec.terms.terms.len(), (d - 1) * (l - 1) + 1);
        }
    }

    #[test]
    fn pushforward_examples() {
        let f3 = field_make(3, 1).unwrap();
        let dec = interp_decomp(3, 2, &f3).unwrap();
        let cert = pushforward_to_extension(&dec, 3, 2, &f3).unwrap();
        assert_eq!(cert.terms.len(), 3);
        cert.verify(&mult_tensor(3, &f3, 2).unwrap()).unwrap();

        let f7 = field_make(7, 1).unwrap();
        let dec = interp_decomp(3, 3, &f7).unwrap();
        let cert = pushforward_to_extension(&dec, 3, 3, &f7).unwrap();
        assert_eq!(cert.terms.len(), 5);
        cert.verify(&mult_tensor(3, &f7, 3).unwrap()).unwrap();

        let f2 = field_make(2, 1).unwrap();
        let dec = interp_decomp(2, 2, &f2).unwrap();
        let cert = pushforward_to_extension(&dec, 2, 2, &f2).unwrap();
        assert_eq!(cert.terms.len(), 2);
        cert.verify(&mult_tensor(2, &f2, 2).unwrap()).unwrap();
    }

    #[test]
    fn subrank_cert_examples() {
        // Id_2 ⪯ T_{3,GF(125)}
        let f5 = field_make(5, 1).unwrap();
        let cert = subrank_cert_interpolation(3, 3, &f5).unwrap();
        assert_eq!(cert.target, identity_tensor(2, 3, &f5).unwrap());
        cert.verify().unwrap();

        // m = 0: Id_1 ⪯ T_{3,GF(q^2)}
        let f2 = field_make(2, 1).unwrap();
        let cert = subrank_cert_interpolation(3, 2, &f2).unwrap();
        assert_eq!(cert.target, identity_tensor(1, 3, &f2).unwrap());

        // d = 2: Id_3 ⪯ T_{2,GF(27)} = I_3
        let f3 = field_make(3, 1).unwrap();
        let cert = subrank_cert_interpolation(2, 3, &f3).unwrap();
        assert_eq!(cert.target, identity_tensor(3, 2, &f3).unwrap());
        cert.verify().unwrap();

        // witness size floor((l-1)/(d-1)) + 1 always meets the stated
        // ceil((l-1)/(d-1)) bound
        for (d, l) in [(3usize, 3usize), (3, 5), (4, 4), (2, 3)] {
            let m = (l - 1) / (d - 1);
            let ceil = (l - 1).div_ceil(d - 1);
            assert!(m + 1 >= ceil);
        }
    }

    #[test]
    fn subrank_cert_needs_points() {
        let f2 = field_make(2, 1).unwrap();
        // d=2, l=4: m+1 = 4 > q = 2
        assert!(matches!(
            subrank_cert_interpolation(2, 4, &f2),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn monotonicity_chain() {
        let f2 = field_make(2, 1).unwrap();
        // T_{3,GF(4)} ⪯ M_{3,2} ⪯ T_{3,GF(8)}
        let rep = poly_monotonicity_check(3, 2, 3, &f2).unwrap();
        rep.lower.verify().unwrap();
        rep.upper.verify().unwrap();
        assert_eq!(rep.lower.target, mult_tensor(3, &f2, 2).unwrap());
        assert_eq!(rep.upper.source, mult_tensor(3, &f2, 3).unwrap());

        // trivial chain on identity matrices
        let rep = poly_monotonicity_check(2, 2, 2, &f2).unwrap();
        rep.lower.verify().unwrap();
        rep.upper.verify().unwrap();

        // degree condition violated: (l-1) = 2 < (d-1)(n-1) = 4
        assert!(poly_monotonicity_check(3, 3, 3, &f2).is_err());
    }

    #[test]
    fn tw_tensor_examples() {
        let f = field_make(2, 1).unwrap();
        // W = span{e1 x e1}: order-4 tensor of shape (2,2,2,2) with SR 1
        let mut e11 = Tensor::zero(&f, &[2, 2]).unwrap();
        e11.set(&[0, 0], f.one());
        let w = TensorSubspace::new(vec![e11]).unwrap();
        let tw = tw_tensor(&w).unwrap();
        assert_eq!(tw.shape(), &[2, 2, 2, 2]);
        assert_eq!(slice_rank(&tw).unwrap().0, 1);
        assert_eq!(sr_subspace(&w).unwrap().0, 1);

        // W = span{Id_2}: SR(T_W) = 2 = SR(W)
        let id = identity_tensor(2, 2, &f).unwrap();
        let w = TensorSubspace::new(vec![id]).unwrap();
        let tw = tw_tensor(&w).unwrap();
        assert_eq!(slice_rank(&tw).unwrap().0, 2);
        assert_eq!(sr_subspace(&w).unwrap().0, 2);
    }

    #[test]
    fn tw_contraction_recovers_basis() {
        // contracting the two new modes with matching dual basis vectors
        // yields the corresponding basis tensor of W
        let f = field_make(2, 1).unwrap();
        let id = identity_tensor(2, 2, &f).unwrap();
        let mut e10 = Tensor::zero(&f, &[2, 2]).unwrap();
        e10.set(&[1, 0], f.one());
        let w = TensorSubspace::new(vec![id, e10]).unwrap();
        let tw = tw_tensor(&w).unwrap();
        let mn = 4;
        for s in 0..mn {
            let j = s % 2;
            let mut dual = vec![f.zero(); mn];
            dual[s] = f.one();
            let got = contract(&tw, &[2, 3], &[dual.clone(), dual]).unwrap();
            let got = got.as_tensor().unwrap();
            assert_eq!(got, &w.basis()[j]);
        }
    }
}

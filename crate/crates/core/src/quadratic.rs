//! Free quadratic modules (M, q): evaluation of the quadratic and bilinear
//! forms, the kernels M-perp and M-q-perp, paravector extension R + M, and
//! scalar extension along a ring map.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::ring::{Ring, RingElement, RingKind};

/// A free rank-n module with quadratic form given on an ordered basis by
/// the q-values of the basis vectors and the Gram matrix of the pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticModule {
    ring: Ring,
    rank: usize,
    qdiag: Vec<RingElement>,
    gram: Matrix,
}

/// How a kernel was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KernelMethod {
    Nullspace,
    Enumeration,
    TwoRegularIdentification,
}

/// Generators of M-perp and of the quadratic kernel M-q-perp.
#[derive(Clone, Debug)]
pub struct KernelData {
    pub perp: Vec<Vec<RingElement>>,
    pub qperp: Vec<Vec<RingElement>>,
    pub method: KernelMethod,
}

impl QuadraticModule {
    /// Build a module; `gram` defaults to diag(2 q_i), i.e. an orthogonal basis.
    pub fn new(ring: Ring, qdiag: Vec<RingElement>, gram: Option<Matrix>) -> Result<QuadraticModule> {
        let rank = qdiag.len();
        for q in &qdiag {
            if q.ring() != &ring {
                return Err(Error::RingMismatch("q-value outside the base ring".into()));
            }
        }
        let gram = match gram {
            Some(g) => {
                if g.rows() != rank || g.cols() != rank {
                    return Err(Error::Invalid("Gram matrix has wrong dimensions".into()));
                }
                if g.ring() != &ring {
                    return Err(Error::RingMismatch("Gram matrix over the wrong ring".into()));
                }
                for i in 0..rank {
                    for j in 0..rank {
                        if g.at(i, j) != g.at(j, i) {
                            return Err(Error::Invalid("Gram matrix is not symmetric".into()));
                        }
                    }
                }
                for i in 0..rank {
                    if *g.at(i, i) != qdiag[i].mul_i64(2) {
                        return Err(Error::Invalid(format!(
                            "gram[{i}][{i}] must equal 2*qdiag[{i}]"
                        )));
                    }
                }
                g
            }
            None => {
                let mut g = Matrix::zero(ring.clone(), rank, rank);
                for i in 0..rank {
                    *g.at_mut(i, i) = qdiag[i].mul_i64(2);
                }
                g
            }
        };
        Ok(QuadraticModule { ring, rank, qdiag, gram })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn qdiag(&self) -> &[RingElement] {
        &self.qdiag
    }
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn is_orthogonal_basis(&self) -> bool {
        for i in 0..self.rank {
            for j in 0..self.rank {
                if i != j && !self.gram.at(i, j).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    fn check_vector(&self, v: &[RingElement]) -> Result<()> {
        if v.len() != self.rank {
            return Err(Error::Invalid(format!(
                "vector length {} does not match rank {}",
                v.len(),
                self.rank
            )));
        }
        for c in v {
            if c.ring() != &self.ring {
                return Err(Error::RingMismatch("vector coordinate outside ring".into()));
            }
        }
        Ok(())
    }

    /// q(sum a_i x_i) = sum a_i^2 q_i + sum_{i<j} a_i a_j gram[i][j].
    pub fn eval_q(&self, v: &[RingElement]) -> Result<RingElement> {
        self.check_vector(v)?;
        let mut acc = self.ring.zero();
        for i in 0..self.rank {
            acc = acc.add(&v[i].mul(&v[i]).mul(&self.qdiag[i]));
            for j in (i + 1)..self.rank {
                acc = acc.add(&v[i].mul(&v[j]).mul(self.gram.at(i, j)));
            }
        }
        Ok(acc)
    }

    /// (v, w) = v^T Gram w.
    pub fn eval_pair(&self, v: &[RingElement], w: &[RingElement]) -> Result<RingElement> {
        self.check_vector(v)?;
        self.check_vector(w)?;
        let gw = self.gram.mul_vec(w);
        let mut acc = self.ring.zero();
        for i in 0..self.rank {
            acc = acc.add(&v[i].mul(&gw[i]));
        }
        Ok(acc)
    }

    pub fn zero_vector(&self) -> Vec<RingElement> {
        vec![self.ring.zero(); self.rank]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<RingElement> {
        let mut v = self.zero_vector();
        v[i] = self.ring.one();
        v
    }

    pub fn vector_from_i64(&self, coords: &[i64]) -> Vec<RingElement> {
        coords.iter().map(|&c| self.ring.from_i64(c)).collect()
    }

    /// Generators of M-perp = nullspace of the Gram matrix, and of the
    /// quadratic kernel.  Over 2-regular rings the two coincide; over other
    /// finite rings the quadratic kernel is found by filtering the span.
    pub fn kernel_perp(&self) -> Result<KernelData> {
        let perp = linalg::nullspace(&self.gram)?;
        let perp = linalg::reduce_generators(&self.ring, &perp)?;
        if self.ring.is_two_regular() {
            return Ok(KernelData {
                qperp: perp.clone(),
                perp,
                method: KernelMethod::TwoRegularIdentification,
            });
        }
        if self.ring.is_finite() {
            let members = self.span_members(&perp)?;
            let mut qmembers = Vec::new();
            for v in members {
                if self.eval_q(&v)?.is_zero() {
                    qmembers.push(v);
                }
            }
            let qperp = linalg::reduce_generators(&self.ring, &qmembers)?;
            return Ok(KernelData { perp, qperp, method: KernelMethod::Enumeration });
        }
        Err(Error::NotComputable(format!(
            "quadratic kernel over {} (infinite, 2 a zero-divisor)",
            self.ring
        )))
    }

    /// All vectors in the span of the given generators (finite rings).
    pub fn span_members(&self, gens: &[Vec<RingElement>]) -> Result<Vec<Vec<RingElement>>> {
        let elems = self.ring.elements()?;
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        let mut stack = vec![self.zero_vector()];
        seen.insert(self.zero_vector());
        while let Some(cur) = stack.pop() {
            out.push(cur.clone());
            for g in gens {
                for c in &elems {
                    let next: Vec<RingElement> = cur
                        .iter()
                        .zip(g.iter())
                        .map(|(a, b)| a.add(&b.mul(c)))
                        .collect();
                    if seen.insert(next.clone()) {
                        stack.push(next);
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// All coordinate vectors of M over a finite ring.
    pub fn all_vectors(&self) -> Result<Vec<Vec<RingElement>>> {
        linalg::all_vectors(&self.ring, self.rank)
    }

    /// The paravector module R + M of rank n+1: coordinate 0 is the scalar
    /// slot, q_R(a + x) = q(x) - a^2, so the pairing polarizes to
    /// (a+x, b+y) = (x, y) - 2ab.
    pub fn paravector_extension(&self) -> ParavectorModule {
        let n = self.rank;
        let ring = self.ring.clone();
        let mut qdiag = Vec::with_capacity(n + 1);
        qdiag.push(ring.one().neg());
        qdiag.extend(self.qdiag.iter().cloned());
        let mut gram = Matrix::zero(ring.clone(), n + 1, n + 1);
        *gram.at_mut(0, 0) = ring.from_i64(-2);
        for i in 0..n {
            for j in 0..n {
                *gram.at_mut(i + 1, j + 1) = self.gram.at(i, j).clone();
            }
        }
        let module = QuadraticModule { ring, rank: n + 1, qdiag, gram };
        ParavectorModule { module, base: self.clone() }
    }

    /// Entrywise image of the module under a ring map.
    pub fn scalar_extension(&self, hom: &RingHom) -> Result<QuadraticModule> {
        if hom.source() != &self.ring {
            return Err(Error::RingMismatch("scalar extension from the wrong ring".into()));
        }
        let qdiag: Vec<RingElement> =
            self.qdiag.iter().map(|q| hom.apply(q)).collect::<Result<_>>()?;
        let mut gram = Matrix::zero(hom.target().clone(), self.rank, self.rank);
        for i in 0..self.rank {
            for j in 0..self.rank {
                *gram.at_mut(i, j) = hom.apply(self.gram.at(i, j))?;
            }
        }
        QuadraticModule::new(hom.target().clone(), qdiag, Some(gram))
    }

    /// Transport the module along an invertible change of basis T over the
    /// same ring: new basis vectors are the columns of T.
    pub fn change_basis(&self, t: &Matrix) -> Result<QuadraticModule> {
        if t.rows() != self.rank || t.cols() != self.rank {
            return Err(Error::Invalid("change of basis has wrong dimensions".into()));
        }
        let gram = t.transpose().mul(&self.gram).mul(t);
        let mut qdiag = Vec::with_capacity(self.rank);
        for j in 0..self.rank {
            qdiag.push(self.eval_q(&t.col(j))?);
        }
        QuadraticModule::new(self.ring.clone(), qdiag, Some(gram))
    }
}

impl fmt::Display for QuadraticModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.qdiag.iter().map(|q| q.to_string()).collect();
        write!(f, "ring={} rank={} qdiag=[{}]", self.ring, self.rank, qs.join(","))?;
        if !self.is_orthogonal_basis() {
            let rows: Vec<String> = (0..self.rank)
                .map(|i| {
                    let row: Vec<String> =
                        (0..self.rank).map(|j| self.gram.at(i, j).to_string()).collect();
                    format!("[{}]", row.join(","))
                })
                .collect();
            write!(f, " gram=[{}]", rows.join(","))?;
        }
        Ok(())
    }
}

/// The rank-(n+1) quadratic module R + M together with its base module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParavectorModule {
    module: QuadraticModule,
    base: QuadraticModule,
}

impl ParavectorModule {
    pub fn module(&self) -> &QuadraticModule {
        &self.module
    }
    pub fn base(&self) -> &QuadraticModule {
        &self.base
    }

    /// M_R-perp = R[2] + M-perp, by Gram nullspace; the identity itself is
    /// exercised by the harness.
    pub fn kernel_perp(&self) -> Result<KernelData> {
        self.module.kernel_perp()
    }
}

/// A unital ring homomorphism between supported rings.
#[derive(Clone, Debug)]
pub enum RingHom {
    Identity(Ring),
    /// The canonical map Z -> R.
    FromIntegers { target: Ring },
    /// Reduction Z/n -> Z/m for m | n.
    ModReduction { source: Ring, target: Ring },
}

impl RingHom {
    pub fn identity(ring: Ring) -> RingHom {
        RingHom::Identity(ring)
    }

    pub fn from_integers(target: Ring) -> RingHom {
        RingHom::FromIntegers { target }
    }

    pub fn mod_reduction(source: Ring, target: Ring) -> Result<RingHom> {
        match (source.kind(), target.kind()) {
            (RingKind::IntegersMod(n), RingKind::IntegersMod(m)) => {
                use num_integer::Integer;
                if n.mod_floor(m) != num_bigint::BigUint::from(0u8) {
                    return Err(Error::Invalid(format!(
                        "no reduction Z/{} -> Z/{}: modulus does not divide",
                        n, m
                    )));
                }
                Ok(RingHom::ModReduction { source, target })
            }
            _ => Err(Error::UnsupportedRing(
                "mod_reduction requires residue rings on both sides".into(),
            )),
        }
    }

    pub fn source(&self) -> &Ring {
        match self {
            RingHom::Identity(r) => r,
            RingHom::FromIntegers { .. } => {
                // constructed on demand; the integers ring is a singleton value
                static INT: std::sync::OnceLock<Ring> = std::sync::OnceLock::new();
                INT.get_or_init(Ring::integers)
            }
            RingHom::ModReduction { source, .. } => source,
        }
    }

    pub fn target(&self) -> &Ring {
        match self {
            RingHom::Identity(r) => r,
            RingHom::FromIntegers { target } => target,
            RingHom::ModReduction { target, .. } => target,
        }
    }

    pub fn apply(&self, a: &RingElement) -> Result<RingElement> {
        if a.ring() != self.source() {
            return Err(Error::RingMismatch("ring map applied to a foreign element".into()));
        }
        match self {
            RingHom::Identity(_) => Ok(a.clone()),
            RingHom::FromIntegers { target } => match a.value() {
                crate::ring::Value::Int(v) => Ok(target.from_bigint(v.clone())),
                _ => unreachable!("integer value expected"),
            },
            RingHom::ModReduction { target, .. } => match a.value() {
                crate::ring::Value::Int(v) => Ok(target.from_bigint(v.clone())),
                _ => unreachable!("residue value expected"),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Ring {
        Ring::integers()
    }
    fn zn(n: u64) -> Ring {
        Ring::integers_mod(n).unwrap()
    }

    fn module(ring: &Ring, qdiag: &[i64]) -> QuadraticModule {
        let qs = qdiag.iter().map(|&q| ring.from_i64(q)).collect();
        QuadraticModule::new(ring.clone(), qs, None).unwrap()
    }

    #[test]
    fn eval_examples() {
        let m = module(&z(), &[0, 1]);
        assert!(m.eval_q(&m.zero_vector()).unwrap().is_zero());
        // (x_i, x_i) = 2 q_i
        for i in 0..2 {
            let b = m.basis_vector(i);
            assert_eq!(m.eval_pair(&b, &b).unwrap(), m.qdiag()[i].mul_i64(2));
        }
        assert_eq!(m.eval_q(&m.vector_from_i64(&[1, 1])).unwrap(), z().one());
    }

    #[test]
    fn polarization_identity() {
        let m = module(&zn(6), &[1, 3]);
        for v in m.all_vectors().unwrap().iter().take(36) {
            for w in m.all_vectors().unwrap().iter().take(12) {
                let lhs = m.eval_pair(v, w).unwrap();
                let sum: Vec<RingElement> =
                    v.iter().zip(w.iter()).map(|(a, b)| a.add(b)).collect();
                let rhs = m
                    .eval_q(&sum)
                    .unwrap()
                    .sub(&m.eval_q(v).unwrap())
                    .sub(&m.eval_q(w).unwrap());
                assert_eq!(lhs, rhs);
                assert_eq!(lhs, m.eval_pair(w, v).unwrap());
            }
        }
    }

    #[test]
    fn kernel_examples() {
        // over Z, qdiag=(0,1): perp = qperp = span{x1}
        let m = module(&z(), &[0, 1]);
        let k = m.kernel_perp().unwrap();
        assert!(linalg::spans_equal(&z(), &k.perp, &[m.basis_vector(0)]).unwrap());
        assert!(linalg::spans_equal(&z(), &k.qperp, &[m.basis_vector(0)]).unwrap());
        assert_eq!(k.method, KernelMethod::TwoRegularIdentification);

        // over F2 with orthogonal basis the pairing vanishes: perp = M
        let m = module(&zn(2), &[1, 0]);
        let k = m.kernel_perp().unwrap();
        assert!(linalg::spans_equal(
            &zn(2),
            &k.perp,
            &[m.basis_vector(0), m.basis_vector(1)],
        )
        .unwrap());
        // ... but qperp of qdiag=(1) is trivial
        let m1 = module(&zn(2), &[1]);
        let k1 = m1.kernel_perp().unwrap();
        assert!(k1.qperp.is_empty());
    }

    #[test]
    fn kernel_brute_force_equality() {
        // {v | (v,w)=0 for all w} equals the computed span, F3 and Z/4
        for (ring, qdiag) in [(zn(3), vec![1i64, 0]), (zn(4), vec![2, 1]), (zn(6), vec![3, 2])] {
            let m = module(&ring, &qdiag);
            let k = m.kernel_perp().unwrap();
            let all = m.all_vectors().unwrap();
            let brute: Vec<Vec<RingElement>> = all
                .iter()
                .filter(|v| {
                    all.iter()
                        .all(|w| m.eval_pair(v, w).unwrap().is_zero())
                })
                .cloned()
                .collect();
            for v in &brute {
                assert!(linalg::in_span(&ring, &k.perp, v).unwrap());
            }
            for g in &k.perp {
                assert!(brute.contains(g));
            }
        }
    }

    #[test]
    fn paravector_invariants() {
        let m = module(&zn(6), &[1]);
        let p = m.paravector_extension();
        // q_R(1) = -1
        let one = p.module().basis_vector(0);
        assert_eq!(p.module().eval_q(&one).unwrap(), zn(6).from_i64(-1));
        // kernel generated by {3*1, 3*x1}
        let k = p.kernel_perp().unwrap();
        let expected = vec![
            p.module().vector_from_i64(&[3, 0]),
            p.module().vector_from_i64(&[0, 3]),
        ];
        assert!(linalg::spans_equal(&zn(6), &k.perp, &expected).unwrap());
    }

    #[test]
    fn paravector_kernel_is_torsion_plus_perp() {
        // M_R-perp = R[2] + M-perp over a few rings
        for (ring, qdiag) in [(zn(6), vec![1i64]), (zn(4), vec![2, 1]), (zn(3), vec![1, 0])] {
            let m = module(&ring, &qdiag);
            let p = m.paravector_extension();
            let k = p.kernel_perp().unwrap();
            let mut expected: Vec<Vec<RingElement>> = Vec::new();
            for t in ring.two_torsion_generators().unwrap() {
                let mut v = p.module().zero_vector();
                v[0] = t;
                expected.push(v);
            }
            for g in m.kernel_perp().unwrap().perp {
                let mut v = vec![ring.zero()];
                v.extend(g);
                expected.push(v);
            }
            assert!(linalg::spans_equal(&ring, &k.perp, &expected).unwrap());
        }
    }

    #[test]
    fn scalar_extension_examples() {
        let m = module(&z(), &[5]);
        let hom = RingHom::from_integers(zn(6));
        let ext = m.scalar_extension(&hom).unwrap();
        assert_eq!(ext.qdiag()[0], zn(6).from_i64(5));
        // q commutes with the extension on integer vectors
        let v = m.vector_from_i64(&[7]);
        let ve: Vec<RingElement> = v.iter().map(|c| hom.apply(c).unwrap()).collect();
        assert_eq!(hom.apply(&m.eval_q(&v).unwrap()).unwrap(), ext.eval_q(&ve).unwrap());

        let idm = module(&zn(3), &[1]);
        let id = RingHom::identity(zn(3));
        assert_eq!(idm.scalar_extension(&id).unwrap(), idm);
    }

    #[test]
    fn gram_validation() {
        let r = z();
        let bad = Matrix::from_rows(
            r.clone(),
            vec![
                vec![r.from_i64(2), r.from_i64(1)],
                vec![r.from_i64(0), r.from_i64(2)],
            ],
        );
        assert!(QuadraticModule::new(r.clone(), vec![r.one(), r.one()], Some(bad)).is_err());
    }
}

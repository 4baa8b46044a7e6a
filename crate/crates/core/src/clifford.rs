//! Arithmetic in the Clifford algebra C(M, q) of a free quadratic module:
//! elements are coefficient vectors indexed by subsets of the basis
//! (bitmasks), products are computed by straightening against the Gram
//! matrix, with the grading, the three involutions, the norm, linear-solve
//! inversion, and the radical quotient map.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::quadratic::QuadraticModule;
use crate::ring::{Ring, RingElement};

/// Hard cap on the module rank (coefficient vectors of length 2^12).
pub const MAX_RANK: usize = 12;

pub type Mask = u32;

type SparseVec = Vec<(Mask, RingElement)>;

#[derive(Debug)]
struct AlgebraInner {
    module: QuadraticModule,
    /// Memoized straightening products x_K * x_i.
    gen_cache: RwLock<HashMap<(Mask, usize), SparseVec>>,
    /// Memoized transposed basis elements (x_I)*.
    transpose_cache: RwLock<HashMap<Mask, SparseVec>>,
}

/// Shared handle to a Clifford algebra context.
#[derive(Clone, Debug)]
pub struct CliffordAlgebra(Arc<AlgebraInner>);

impl PartialEq for CliffordAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.module == other.0.module
    }
}
impl Eq for CliffordAlgebra {}

impl CliffordAlgebra {
    pub fn new(module: QuadraticModule) -> Result<CliffordAlgebra> {
        if module.rank() > MAX_RANK {
            return Err(Error::RankTooLarge(module.rank()));
        }
        Ok(CliffordAlgebra(Arc::new(AlgebraInner {
            module,
            gen_cache: RwLock::new(HashMap::new()),
            transpose_cache: RwLock::new(HashMap::new()),
        })))
    }

    pub fn module(&self) -> &QuadraticModule {
        &self.0.module
    }

    pub fn ring(&self) -> &Ring {
        self.0.module.ring()
    }

    pub fn rank(&self) -> usize {
        self.0.module.rank()
    }

    pub fn dim(&self) -> usize {
        1 << self.rank()
    }

    pub fn zero(&self) -> CliffordElement {
        CliffordElement {
            algebra: self.clone(),
            coeffs: vec![self.ring().zero(); self.dim()],
        }
    }

    pub fn scalar(&self, a: RingElement) -> CliffordElement {
        let mut e = self.zero();
        e.coeffs[0] = a;
        e
    }

    pub fn one(&self) -> CliffordElement {
        self.scalar(self.ring().one())
    }

    pub fn basis(&self, mask: Mask) -> CliffordElement {
        assert!((mask as usize) < self.dim(), "basis mask out of range");
        let mut e = self.zero();
        e.coeffs[mask as usize] = self.ring().one();
        e
    }

    pub fn generator(&self, i: usize) -> CliffordElement {
        self.basis(1 << i)
    }

    /// Embed a module vector as a degree-1 element.
    pub fn from_vector(&self, v: &[RingElement]) -> CliffordElement {
        assert_eq!(v.len(), self.rank(), "vector length mismatch");
        let mut e = self.zero();
        for (i, c) in v.iter().enumerate() {
            e.coeffs[1 << i] = c.clone();
        }
        e
    }

    /// Embed a paravector a + x.
    pub fn from_paravector(&self, scalar: &RingElement, v: &[RingElement]) -> CliffordElement {
        let mut e = self.from_vector(v);
        e.coeffs[0] = scalar.clone();
        e
    }

    pub fn from_coeffs(&self, coeffs: Vec<RingElement>) -> CliffordElement {
        assert_eq!(coeffs.len(), self.dim(), "coefficient vector length mismatch");
        CliffordElement { algebra: self.clone(), coeffs }
    }

    /// x_K * x_i as a sparse combination, by recursive straightening.
    fn basis_times_gen(&self, k: Mask, i: usize) -> SparseVec {
        if let Some(hit) = self.0.gen_cache.read().unwrap().get(&(k, i)) {
            return hit.clone();
        }
        let ring = self.ring();
        let result: SparseVec = if k == 0 {
            vec![(1 << i, ring.one())]
        } else {
            let top = (Mask::BITS - 1 - k.leading_zeros()) as usize;
            if top < i {
                vec![(k | (1 << i), ring.one())]
            } else if top == i {
                vec![(k & !(1 << i), self.module().qdiag()[i].clone())]
            } else {
                // x_K x_i = (x_i, x_top) x_{K'} - (x_{K'} x_i) x_top
                let rest = k & !(1 << top);
                let pair = self.module().gram().at(i, top).clone();
                let mut acc: HashMap<Mask, RingElement> = HashMap::new();
                if !pair.is_zero() {
                    acc.insert(rest, pair);
                }
                for (l, c) in self.basis_times_gen(rest, i) {
                    // every mask in the recursion stays below `top`
                    let m = l | (1 << top);
                    let neg = c.neg();
                    acc.entry(m)
                        .and_modify(|v| *v = v.add(&neg))
                        .or_insert(neg);
                }
                let mut out: SparseVec =
                    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                out.sort_by_key(|(m, _)| *m);
                out
            }
        };
        self.0
            .gen_cache
            .write()
            .unwrap()
            .entry((k, i))
            .or_insert_with(|| result.clone());
        result
    }

    /// (x_I)* : the reversed generator word, recomputed by straightening.
    fn basis_transpose(&self, mask: Mask) -> SparseVec {
        if let Some(hit) = self.0.transpose_cache.read().unwrap().get(&mask) {
            return hit.clone();
        }
        let mut acc = self.one();
        for i in (0..self.rank()).rev() {
            if mask & (1 << i) != 0 {
                acc = acc.mul_gen(i);
            }
        }
        let out: SparseVec = acc
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m as Mask, c.clone()))
            .collect();
        self.0
            .transpose_cache
            .write()
            .unwrap()
            .entry(mask)
            .or_insert_with(|| out.clone());
        out
    }

    /// All elements of the algebra over a finite ring, in coefficient
    /// lexicographic order (low mask fastest).
    pub fn all_elements(&self) -> Result<Vec<CliffordElement>> {
        let vecs = linalg::all_vectors(self.ring(), self.dim())?;
        Ok(vecs.into_iter().map(|coeffs| self.from_coeffs(coeffs)).collect())
    }

    /// Generators of the fixed module of the grade involution,
    /// C_+ plus the two-torsion multiples of the odd part.
    pub fn grade_fixed_generators(&self) -> Result<Vec<CliffordElement>> {
        let torsion = self.ring().two_torsion_generators()?;
        let mut gens = Vec::new();
        for mask in 0..self.dim() as Mask {
            if (mask.count_ones() % 2) == 0 {
                gens.push(self.basis(mask));
            } else {
                for t in &torsion {
                    if !t.is_zero() {
                        let mut e = self.zero();
                        e.coeffs[mask as usize] = t.clone();
                        gens.push(e);
                    }
                }
            }
        }
        Ok(gens)
    }
}

/// An element of C(M, q): 2^n coefficients indexed by basis subsets.
#[derive(Clone, Debug)]
pub struct CliffordElement {
    algebra: CliffordAlgebra,
    coeffs: Vec<RingElement>,
}

impl PartialEq for CliffordElement {
    fn eq(&self, other: &Self) -> bool {
        debug_assert_eq!(self.algebra, other.algebra, "comparing foreign elements");
        self.coeffs == other.coeffs
    }
}
impl Eq for CliffordElement {}

impl PartialOrd for CliffordElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for CliffordElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

impl CliffordElement {
    pub fn algebra(&self) -> &CliffordAlgebra {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[RingElement] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: Mask) -> &RingElement {
        &self.coeffs[mask as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &CliffordElement) -> CliffordElement {
        assert_eq!(self.algebra, other.algebra, "algebra mismatch");
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.add(b))
            .collect();
        CliffordElement { algebra: self.algebra.clone(), coeffs }
    }

    pub fn sub(&self, other: &CliffordElement) -> CliffordElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CliffordElement {
        let coeffs = self.coeffs.iter().map(|c| c.neg()).collect();
        CliffordElement { algebra: self.algebra.clone(), coeffs }
    }

    pub fn scale(&self, a: &RingElement) -> CliffordElement {
        let coeffs = self.coeffs.iter().map(|c| c.mul(a)).collect();
        CliffordElement { algebra: self.algebra.clone(), coeffs }
    }

    /// Right multiplication by the generator x_i.
    pub fn mul_gen(&self, i: usize) -> CliffordElement {
        let mut out = self.algebra.zero();
        for (mask, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (m, b) in self.algebra.basis_times_gen(mask as Mask, i) {
                let idx = m as usize;
                out.coeffs[idx] = out.coeffs[idx].add(&c.mul(&b));
            }
        }
        out
    }

    pub fn mul(&self, other: &CliffordElement) -> CliffordElement {
        assert_eq!(self.algebra, other.algebra, "algebra mismatch");
        let n = self.algebra.rank();
        let mut out = self.algebra.zero();
        for (jmask, b) in other.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            // self * x_J, folding the generator word of J
            let mut acc = self.clone();
            for i in 0..n {
                if jmask & (1 << i) != 0 {
                    acc = acc.mul_gen(i);
                }
            }
            out = out.add(&acc.scale(b));
        }
        out
    }

    pub fn pow(&self, e: u64) -> CliffordElement {
        let mut acc = self.algebra.one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Orthogonal-basis fast path for alpha * x_i: the constant b(I, i) is
    /// a sign from the generators of I above i, times q_i when i is in I.
    pub fn mul_generator_fast(&self, i: usize) -> Result<CliffordElement> {
        let (signs, out) = self.fast_parts(i)?;
        let _ = signs;
        Ok(out)
    }

    /// Orthogonal-basis fast path for x_i * alpha, which differs from the
    /// right product by the sign (-1)^|I \ {i}|.
    pub fn gen_mul_fast(&self, i: usize) -> Result<CliffordElement> {
        if !self.algebra.module().is_orthogonal_basis() {
            return Err(Error::Invalid("fast generator product requires an orthogonal basis".into()));
        }
        let mut out = self.algebra.zero();
        for (mask, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mask = mask as Mask;
            let b = self.gen_constant(mask, i);
            let without_i = mask & !(1 << i);
            let parity = without_i.count_ones() % 2;
            let mut term = c.mul(&b);
            if parity == 1 {
                term = term.neg();
            }
            let idx = (mask ^ (1 << i)) as usize;
            out.coeffs[idx] = out.coeffs[idx].add(&term);
        }
        Ok(out)
    }

    fn fast_parts(&self, i: usize) -> Result<((), CliffordElement)> {
        if !self.algebra.module().is_orthogonal_basis() {
            return Err(Error::Invalid("fast generator product requires an orthogonal basis".into()));
        }
        let mut out = self.algebra.zero();
        for (mask, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mask = mask as Mask;
            let b = self.gen_constant(mask, i);
            let idx = (mask ^ (1 << i)) as usize;
            out.coeffs[idx] = out.coeffs[idx].add(&c.mul(&b));
        }
        Ok(((), out))
    }

    /// b(I, i): sign given by the parity of |{j in I : j > i}|, times
    /// q(x_i) exactly when i lies in I.
    fn gen_constant(&self, mask: Mask, i: usize) -> RingElement {
        let ring = self.algebra.ring();
        let above = mask >> (i + 1);
        let sign_neg = above.count_ones() % 2 == 1;
        let base = if mask & (1 << i) != 0 {
            self.algebra.module().qdiag()[i].clone()
        } else {
            ring.one()
        };
        if sign_neg {
            base.neg()
        } else {
            base
        }
    }

    pub fn even_part(&self) -> CliffordElement {
        let mut out = self.algebra.zero();
        for (mask, c) in self.coeffs.iter().enumerate() {
            if (mask as Mask).count_ones() % 2 == 0 {
                out.coeffs[mask] = c.clone();
            }
        }
        out
    }

    pub fn odd_part(&self) -> CliffordElement {
        self.sub(&self.even_part())
    }

    /// Grade involution: negate the odd part.
    pub fn grade_involution(&self) -> CliffordElement {
        let mut out = self.clone();
        for (mask, c) in out.coeffs.iter_mut().enumerate() {
            if (mask as Mask).count_ones() % 2 == 1 {
                *c = c.neg();
            }
        }
        out
    }

    /// Transposition: the anti-automorphism fixing M, computed by
    /// reversing each basis word and re-straightening.
    pub fn transpose(&self) -> CliffordElement {
        let mut out = self.algebra.zero();
        for (mask, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (m, b) in self.algebra.basis_transpose(mask as Mask) {
                let idx = m as usize;
                out.coeffs[idx] = out.coeffs[idx].add(&c.mul(&b));
            }
        }
        out
    }

    /// Clifford involution: transpose of the grade involution.
    pub fn clifford_involution(&self) -> CliffordElement {
        self.grade_involution().transpose()
    }

    /// N(alpha) = alpha * conj(alpha).
    pub fn norm(&self) -> CliffordElement {
        self.mul(&self.clifford_involution())
    }

    /// Inverse by solving the 2^n x 2^n system alpha * beta = 1, then
    /// checking beta * alpha = 1.
    pub fn invert(&self) -> Result<Option<CliffordElement>> {
        let dim = self.algebra.dim();
        let ring = self.algebra.ring().clone();
        // columns: coordinates of alpha * x_J
        let mut cols = Vec::with_capacity(dim);
        for jmask in 0..dim {
            let mut acc = self.clone();
            for i in 0..self.algebra.rank() {
                if jmask & (1 << i) != 0 {
                    acc = acc.mul_gen(i);
                }
            }
            cols.push(acc.coeffs);
        }
        let m = Matrix::from_cols(ring.clone(), cols);
        let mut rhs = vec![ring.zero(); dim];
        rhs[0] = ring.one();
        match linalg::solve(&m, &rhs)? {
            None => Ok(None),
            Some(sol) => {
                let beta = self.algebra.from_coeffs(sol);
                if beta.mul(self) == self.algebra.one() && self.mul(&beta) == self.algebra.one() {
                    Ok(Some(beta))
                } else {
                    Ok(None)
                }
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.invert(), Ok(Some(_)))
    }

    pub fn scalar_part(&self) -> RingElement {
        self.coeffs[0].clone()
    }

    pub fn is_scalar(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(m, c)| m == 0 || c.is_zero())
    }

    /// The vector of degree-1 coordinates, if the element lies in M.
    pub fn as_vector(&self) -> Option<Vec<RingElement>> {
        for (mask, c) in self.coeffs.iter().enumerate() {
            if (mask as Mask).count_ones() != 1 && !c.is_zero() {
                return None;
            }
        }
        Some(
            (0..self.algebra.rank())
                .map(|i| self.coeffs[1 << i].clone())
                .collect(),
        )
    }

    /// The pair (a, x) if the element is a paravector a + x.
    pub fn as_paravector(&self) -> Option<(RingElement, Vec<RingElement>)> {
        for (mask, c) in self.coeffs.iter().enumerate() {
            if mask != 0 && (mask as Mask).count_ones() != 1 && !c.is_zero() {
                return None;
            }
        }
        Some((
            self.coeffs[0].clone(),
            (0..self.algebra.rank())
                .map(|i| self.coeffs[1 << i].clone())
                .collect(),
        ))
    }

    /// Power until zero, with a cap; detects desk-scale nilpotency.
    pub fn is_nilpotent(&self, cap: u32) -> bool {
        let mut acc = self.clone();
        for _ in 0..cap {
            if acc.is_zero() {
                return true;
            }
            acc = acc.mul(self);
        }
        acc.is_zero()
    }
}

/// The quotient map C(M,q) -> C(M-bar, q-bar) killing the quadratic kernel,
/// available when the kernel is spanned by basis vectors, possibly after a
/// recorded unimodular change of basis over Z.
pub struct RadicalQuotient {
    source: CliffordAlgebra,
    target: CliffordAlgebra,
    /// Basis indices of the (possibly rebased) module that are killed.
    killed: Vec<usize>,
    /// Surviving basis indices, in order; they index the target basis.
    kept: Vec<usize>,
    /// Images of the source generators inside the rebased module, when a
    /// change of basis was needed (columns of T-inverse).
    rebase: Option<Matrix>,
    /// The rebased algebra (equal to source when rebase is None).
    mid: CliffordAlgebra,
}

impl RadicalQuotient {
    pub fn new(algebra: &CliffordAlgebra) -> Result<RadicalQuotient> {
        let module = algebra.module().clone();
        let ring = module.ring().clone();
        let kernel = module.kernel_perp()?;
        let qperp = kernel.qperp;

        // First try: kernel already spanned by a subset of basis vectors.
        if let Some(split) = Self::aligned_split(&module, &qperp)? {
            let (killed, kept) = split;
            let target = Self::sub_algebra(&module, &kept)?;
            return Ok(RadicalQuotient {
                source: algebra.clone(),
                mid: algebra.clone(),
                target,
                killed,
                kept,
                rebase: None,
            });
        }

        // Over Z, rebase with a unimodular transform from the Smith form of
        // the generator matrix, provided the kernel is a free direct summand.
        if ring == Ring::integers() && !qperp.is_empty() {
            use num_bigint::BigInt;
            use num_traits::{One, Signed, Zero};
            let n = module.rank();
            let gmat: Vec<Vec<BigInt>> = (0..n)
                .map(|i| {
                    qperp
                        .iter()
                        .map(|g| match g[i].value() {
                            crate::ring::Value::Int(v) => v.clone(),
                            _ => unreachable!(),
                        })
                        .collect()
                })
                .collect();
            let smith = linalg::smith_normal_form(&gmat);
            let r = (0..n.min(qperp.len()))
                .take_while(|&i| !smith.d[i][i].is_zero())
                .count();
            for i in 0..r {
                if !smith.d[i][i].abs().is_one() {
                    return Err(Error::SplitUnavailable(
                        "quadratic kernel is not a free direct summand".into(),
                    ));
                }
            }
            // columns of U^{-1} give the new basis in old coordinates
            let u_elems = Matrix::from_rows(
                ring.clone(),
                smith
                    .u
                    .iter()
                    .map(|row| row.iter().map(|v| ring.from_bigint(v.clone())).collect())
                    .collect(),
            );
            let t = u_elems
                .try_inverse()
                .ok_or_else(|| Error::SplitUnavailable("transform not invertible".into()))?;
            let rebased_module = module.change_basis(&t)?;
            let rebased = CliffordAlgebra::new(rebased_module.clone())?;
            let new_kernel = rebased_module.kernel_perp()?;
            if let Some((killed, kept)) =
                Self::aligned_split(&rebased_module, &new_kernel.qperp)?
            {
                let target = Self::sub_algebra(&rebased_module, &kept)?;
                return Ok(RadicalQuotient {
                    source: algebra.clone(),
                    mid: rebased,
                    target,
                    killed,
                    kept,
                    rebase: Some(u_elems),
                });
            }
            return Err(Error::SplitUnavailable(
                "rebased kernel is not basis-aligned".into(),
            ));
        }

        Err(Error::SplitUnavailable(format!(
            "no basis-aligned splitting of the quadratic kernel over {}",
            ring
        )))
    }

    /// Indices whose basis vectors span exactly the kernel, if that happens.
    fn aligned_split(
        module: &QuadraticModule,
        qperp: &[Vec<RingElement>],
    ) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
        let ring = module.ring();
        let n = module.rank();
        let mut killed = Vec::new();
        for i in 0..n {
            if linalg::in_span(ring, qperp, &module.basis_vector(i))? {
                killed.push(i);
            }
        }
        // every generator must be supported on the killed coordinates
        for g in qperp {
            for (i, c) in g.iter().enumerate() {
                if !c.is_zero() && !killed.contains(&i) {
                    return Ok(None);
                }
            }
        }
        let kept: Vec<usize> = (0..n).filter(|i| !killed.contains(i)).collect();
        Ok(Some((killed, kept)))
    }

    fn sub_algebra(module: &QuadraticModule, kept: &[usize]) -> Result<CliffordAlgebra> {
        let ring = module.ring().clone();
        let qdiag: Vec<RingElement> =
            kept.iter().map(|&i| module.qdiag()[i].clone()).collect();
        let mut gram = Matrix::zero(ring.clone(), kept.len(), kept.len());
        for (a, &i) in kept.iter().enumerate() {
            for (b, &j) in kept.iter().enumerate() {
                *gram.at_mut(a, b) = module.gram().at(i, j).clone();
            }
        }
        CliffordAlgebra::new(QuadraticModule::new(ring, qdiag, Some(gram))?)
    }

    pub fn source(&self) -> &CliffordAlgebra {
        &self.source
    }
    pub fn target(&self) -> &CliffordAlgebra {
        &self.target
    }
    pub fn killed(&self) -> &[usize] {
        &self.killed
    }

    /// Apply the quotient map.
    pub fn map(&self, elem: &CliffordElement) -> CliffordElement {
        assert_eq!(elem.algebra(), &self.source, "foreign element");
        let mid_elem = match &self.rebase {
            None => elem.clone(),
            Some(u) => {
                // generator images: x_i has new coordinates U e_i
                let images: Vec<CliffordElement> = (0..self.source.rank())
                    .map(|i| self.mid.from_vector(&u.col(i)))
                    .collect();
                let mut acc = self.mid.zero();
                for (mask, c) in elem.coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mut word = self.mid.one();
                    for i in 0..self.source.rank() {
                        if mask & (1 << i) != 0 {
                            word = word.mul(&images[i]);
                        }
                    }
                    acc = acc.add(&word.scale(c));
                }
                acc
            }
        };
        // kill any basis monomial touching a killed index
        let mut out = self.target.zero();
        'outer: for (mask, c) in mid_elem.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut tmask: Mask = 0;
            for (new_i, &old_i) in self.kept.iter().enumerate() {
                if mask & (1 << old_i) != 0 {
                    tmask |= 1 << new_i;
                }
            }
            for &k in &self.killed {
                if mask & (1 << k) != 0 {
                    continue 'outer;
                }
            }
            out.coeffs[tmask as usize] = out.coeffs[tmask as usize].add(c);
        }
        out
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = self.algebra.ring();
        let one = ring.one();
        let neg_one = one.neg();
        let mut first = true;
        let mut out = String::new();
        for (mask, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let basis = if mask == 0 {
                String::new()
            } else {
                let idx: Vec<String> = (0..self.algebra.rank())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| (i + 1).to_string())
                    .collect();
                format!("e{{{}}}", idx.join(","))
            };
            let cs = c.to_string();
            let (neg, body) = if mask == 0 {
                if let Some(rest) = cs.strip_prefix('-') {
                    (true, rest.to_string())
                } else {
                    (false, cs)
                }
            } else if *c == one {
                (false, basis.clone())
            } else if *c == neg_one && !cs.starts_with('(') {
                (true, basis.clone())
            } else if let Some(rest) = cs.strip_prefix('-') {
                (true, format!("{}*{}", rest, basis))
            } else {
                (false, format!("{}*{}", cs, basis))
            };
            if first {
                if neg {
                    out.push('-');
                }
                out.push_str(&body);
                first = false;
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        if first {
            out.push('0');
        }
        write!(f, "{}", out)
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

    fn alg(ring: &Ring, qdiag: &[i64]) -> CliffordAlgebra {
        let qs = qdiag.iter().map(|&q| ring.from_i64(q)).collect();
        CliffordAlgebra::new(QuadraticModule::new(ring.clone(), qs, None).unwrap()).unwrap()
    }

    fn alg_gram(ring: &Ring, qdiag: &[i64], gram: &[&[i64]]) -> CliffordAlgebra {
        let qs = qdiag.iter().map(|&q| ring.from_i64(q)).collect();
        let rows = gram
            .iter()
            .map(|row| row.iter().map(|&v| ring.from_i64(v)).collect())
            .collect();
        let g = Matrix::from_rows(ring.clone(), rows);
        CliffordAlgebra::new(QuadraticModule::new(ring.clone(), qs, Some(g)).unwrap()).unwrap()
    }

    #[test]
    fn generator_squares() {
        let c = alg(&z(), &[3, -1]);
        for i in 0..2 {
            let x = c.generator(i);
            assert_eq!(x.mul(&x), c.scalar(c.module().qdiag()[i].clone()));
        }
    }

    #[test]
    fn orthogonal_bivector_square() {
        // (x1 x2)^2 = -q1 q2 for an orthogonal basis
        let c = alg(&z(), &[2, 3]);
        let b = c.basis(0b11);
        assert_eq!(b.mul(&b), c.scalar(z().from_i64(-6)));
    }

    #[test]
    fn straightening_non_orthogonal() {
        // x2 x1 = c - x1 x2 with (x1, x2) = c
        let c = alg_gram(&z(), &[1, 1], &[&[2, 1], &[1, 2]]);
        let x1 = c.generator(0);
        let x2 = c.generator(1);
        let lhs = x2.mul(&x1);
        let rhs = c.scalar(z().one()).sub(&c.basis(0b11));
        assert_eq!(lhs, rhs);
        // xy + yx = (x,y) on sampled vectors
        let v = c.from_vector(&[z().from_i64(2), z().from_i64(-1)]);
        let w = c.from_vector(&[z().from_i64(1), z().from_i64(3)]);
        let pair = c
            .module()
            .eval_pair(&v.as_vector().unwrap(), &w.as_vector().unwrap())
            .unwrap();
        assert_eq!(v.mul(&w).add(&w.mul(&v)), c.scalar(pair));
    }

    #[test]
    fn associativity_random_small() {
        let c = alg_gram(&zn(6), &[1, 2], &[&[2, 1], &[1, 4]]);
        let elems = [
            c.from_coeffs(vec![zn(6).from_i64(1), zn(6).from_i64(2), zn(6).from_i64(3), zn(6).from_i64(4)]),
            c.from_coeffs(vec![zn(6).from_i64(5), zn(6).from_i64(0), zn(6).from_i64(1), zn(6).from_i64(2)]),
            c.from_coeffs(vec![zn(6).from_i64(2), zn(6).from_i64(2), zn(6).from_i64(5), zn(6).from_i64(1)]),
        ];
        for a in &elems {
            for b in &elems {
                for d in &elems {
                    assert_eq!(a.mul(b).mul(d), a.mul(&b.mul(d)));
                }
            }
        }
    }

    #[test]
    fn fast_generator_product_example() {
        // x1 x2 * x1 = -q1 x2 over Z with q1 = 3 (brute-force oracle check)
        let c = alg(&z(), &[3, 1]);
        let a = c.basis(0b11);
        let fast = a.mul_generator_fast(0).unwrap();
        let slow = a.mul(&c.generator(0));
        assert_eq!(fast, slow);
        assert_eq!(slow, c.generator(1).scale(&z().from_i64(-3)));
        // left products agree too
        let left_fast = a.gen_mul_fast(0).unwrap();
        let left_slow = c.generator(0).mul(&a);
        assert_eq!(left_fast, left_slow);
    }

    #[test]
    fn involution_identities() {
        let c = alg_gram(&z(), &[1, 1], &[&[2, 1], &[1, 2]]);
        let a = c.from_coeffs(vec![
            z().from_i64(1),
            z().from_i64(2),
            z().from_i64(-1),
            z().from_i64(3),
        ]);
        let b = c.from_coeffs(vec![
            z().from_i64(0),
            z().from_i64(1),
            z().from_i64(4),
            z().from_i64(-2),
        ]);
        assert_eq!(a.grade_involution().grade_involution(), a);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.clifford_involution().clifford_involution(), a);
        assert_eq!(a.mul(&b).grade_involution(), a.grade_involution().mul(&b.grade_involution()));
        assert_eq!(a.mul(&b).transpose(), b.transpose().mul(&a.transpose()));
        assert_eq!(
            a.mul(&b).clifford_involution(),
            b.clifford_involution().mul(&a.clifford_involution())
        );
        // the two composites defining the Clifford involution agree
        assert_eq!(a.grade_involution().transpose(), a.transpose().grade_involution());
        // on R and M: a* = a, x* = x, x' = -x
        let x = c.from_vector(&[z().from_i64(2), z().from_i64(5)]);
        assert_eq!(x.transpose(), x);
        assert_eq!(x.grade_involution(), x.neg());
        assert_eq!(x.clifford_involution(), x.neg());
    }

    #[test]
    fn transpose_bivector_non_orthogonal() {
        // (x1 x2)* = x2 x1 = c - x1 x2
        let c = alg_gram(&z(), &[1, 1], &[&[2, 1], &[1, 2]]);
        let b = c.basis(0b11);
        assert_eq!(b.transpose(), c.scalar(z().one()).sub(&b));
    }

    #[test]
    fn norm_examples() {
        let c = alg(&z(), &[1, 0]);
        let x = c.generator(0);
        assert_eq!(x.norm(), c.scalar(z().from_i64(-1)));
        assert_eq!(c.one().norm(), c.one());
        // paravector: N(a + x) = a^2 - q(x)
        let p = c.from_paravector(&z().from_i64(3), &[z().from_i64(2), z().from_i64(5)]);
        let expect = z().from_i64(9 - 4); // a^2 - q(x), q(x) = 4
        assert_eq!(p.norm(), c.scalar(expect));
    }

    #[test]
    fn invert_examples() {
        let c = alg(&z(), &[0, 1]);
        let a = c.one().add(&c.basis(0b11));
        let inv = a.invert().unwrap().unwrap();
        assert_eq!(inv, c.one().sub(&c.basis(0b11)));
        assert!(c.generator(0).invert().unwrap().is_none()); // nilpotent
        let u = c.scalar(z().from_i64(-1));
        assert_eq!(u.invert().unwrap().unwrap(), u);
    }

    #[test]
    fn exterior_algebra_when_q_zero() {
        let c = alg(&z(), &[0, 0, 0]);
        for i in 0..8u32 {
            for j in 0..8u32 {
                let prod = c.basis(i).mul(&c.basis(j));
                if i & j != 0 {
                    assert!(prod.is_zero());
                } else {
                    // signed union
                    let coeff = prod.coeff(i | j);
                    assert!(coeff.is_one() || *coeff == z().one().neg());
                }
            }
        }
    }

    #[test]
    fn grade_fixed_generators_match() {
        // over Z/6, n=1: fixed module of ' is C+ + {0,3} x1
        let c = alg(&zn(6), &[1]);
        let gens = c.grade_fixed_generators().unwrap();
        let fixed: Vec<CliffordElement> = c
            .all_elements()
            .unwrap()
            .into_iter()
            .filter(|a| a.grade_involution() == *a)
            .collect();
        let gen_vecs: Vec<Vec<RingElement>> = gens.iter().map(|g| g.coeffs().to_vec()).collect();
        for a in &fixed {
            assert!(linalg::in_span(&zn(6), &gen_vecs, a.coeffs()).unwrap());
        }
        for g in &gens {
            assert!(g.grade_involution() == *g);
        }
    }

    #[test]
    fn radical_quotient_aligned() {
        // Z, qdiag=(0,1): p kills x1
        let c = alg(&z(), &[0, 1]);
        let q = RadicalQuotient::new(&c).unwrap();
        assert_eq!(q.killed(), &[0]);
        assert_eq!(q.target().rank(), 1);
        let a = c.from_coeffs(vec![
            z().from_i64(7),
            z().from_i64(1),
            z().from_i64(2),
            z().from_i64(3),
        ]);
        let img = q.map(&a);
        assert_eq!(img.coeff(0), &z().from_i64(7));
        assert_eq!(img.coeff(1), &z().from_i64(2));
        // ring homomorphism on samples
        let b = c.from_coeffs(vec![
            z().from_i64(1),
            z().from_i64(-1),
            z().from_i64(0),
            z().from_i64(2),
        ]);
        assert_eq!(q.map(&a.mul(&b)), q.map(&a).mul(&q.map(&b)));
        // kernel elements are nilpotent
        assert!(c.generator(0).is_nilpotent(4));
    }

    #[test]
    fn radical_quotient_q_zero() {
        let c = alg(&z(), &[0, 0]);
        let q = RadicalQuotient::new(&c).unwrap();
        assert_eq!(q.target().rank(), 0);
        let a = c.from_coeffs(vec![
            z().from_i64(5),
            z().from_i64(1),
            z().from_i64(2),
            z().from_i64(3),
        ]);
        assert_eq!(q.map(&a).coeff(0), &z().from_i64(5));
    }

    #[test]
    fn display_format() {
        let c = alg(&z(), &[3, 1]);
        let a = c
            .scalar(z().from_i64(3))
            .add(&c.generator(0).scale(&z().from_i64(2)))
            .sub(&c.basis(0b11));
        assert_eq!(a.to_string(), "3 + 2*e{1} - e{1,2}");
        assert_eq!(c.zero().to_string(), "0");
        assert_eq!(c.generator(1).to_string(), "e{2}");
    }
}

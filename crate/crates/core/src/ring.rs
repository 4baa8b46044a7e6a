//! Exact arithmetic in the supported universe of commutative rings with 1:
//! the integers, residue rings `Z/n`, quotient polynomial rings over these
//! with a monic modulus, and finite products of supported rings.
//!
//! Elements are kept in canonical form (least non-negative residues,
//! polynomials reduced by the monic modulus), so equality is structural.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Cap on the number of elements materialized by exhaustive ring enumeration.
pub const ENUM_CAP: usize = 1_000_000;

#[derive(Debug, PartialEq, Eq)]
pub enum RingKind {
    Integers,
    IntegersMod(BigUint),
    QuotientPoly {
        base: Ring,
        /// Monic modulus, ascending degree, length = degree + 1, last coeff = 1.
        modulus: Vec<RingElement>,
    },
    Product(Vec<Ring>),
}

/// Shared handle to a ring descriptor.  Cloning is cheap; equality is
/// structural on the descriptor tree.
#[derive(Clone, Debug)]
pub struct Ring(Arc<RingKind>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for Ring {}

/// Canonical value of a ring element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(BigInt),
    Poly(Vec<Value>),
    Tuple(Vec<Value>),
}

impl Value {
    fn cmp_same_shape(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Poly(a), Value::Poly(b)) | (Value::Tuple(a), Value::Tuple(b)) => {
                for (x, y) in a.iter().zip(b.iter()) {
                    match x.cmp_same_shape(y) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                a.len().cmp(&b.len())
            }
            _ => panic!("comparing ring values of different shapes"),
        }
    }
}

/// An element of a concrete ring, always in canonical form.
#[derive(Clone, Debug)]
pub struct RingElement {
    ring: Ring,
    value: Value,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        debug_assert_eq!(self.ring, other.ring, "comparing elements of different rings");
        self.value == other.value
    }
}
impl Eq for RingElement {}

impl PartialOrd for RingElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for RingElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp_same_shape(&other.value)
    }
}

impl std::hash::Hash for RingElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        fn hash_value<H: std::hash::Hasher>(v: &Value, state: &mut H) {
            match v {
                Value::Int(a) => a.hash(state),
                Value::Poly(cs) | Value::Tuple(cs) => {
                    for c in cs {
                        hash_value(c, state);
                    }
                }
            }
        }
        hash_value(&self.value, state)
    }
}

impl Ring {
    pub fn integers() -> Ring {
        Ring(Arc::new(RingKind::Integers))
    }

    pub fn integers_mod(n: u64) -> Result<Ring> {
        Self::integers_mod_big(BigUint::from(n))
    }

    pub fn integers_mod_big(n: BigUint) -> Result<Ring> {
        if n < BigUint::from(2u8) {
            return Err(Error::Invalid(format!("Z/{} requires modulus >= 2", n)));
        }
        Ok(Ring(Arc::new(RingKind::IntegersMod(n))))
    }

    /// Quotient by a monic polynomial given by ascending coefficients over `base`.
    pub fn quotient_poly(base: Ring, modulus: Vec<RingElement>) -> Result<Ring> {
        if modulus.len() < 2 {
            return Err(Error::Invalid("quotient modulus must have degree >= 1".into()));
        }
        for c in &modulus {
            if c.ring() != &base {
                return Err(Error::RingMismatch("modulus coefficient outside base ring".into()));
            }
        }
        if !modulus.last().unwrap().is_one() {
            return Err(Error::Invalid("quotient modulus must be monic".into()));
        }
        Ok(Ring(Arc::new(RingKind::QuotientPoly { base, modulus })))
    }

    pub fn product(factors: Vec<Ring>) -> Result<Ring> {
        if factors.len() < 2 {
            return Err(Error::Invalid("product ring requires at least 2 factors".into()));
        }
        Ok(Ring(Arc::new(RingKind::Product(factors))))
    }

    pub fn kind(&self) -> &RingKind {
        &self.0
    }

    pub fn factors(&self) -> Option<&[Ring]> {
        match self.kind() {
            RingKind::Product(fs) => Some(fs),
            _ => None,
        }
    }

    fn zero_value(&self) -> Value {
        match self.kind() {
            RingKind::Integers | RingKind::IntegersMod(_) => Value::Int(BigInt::zero()),
            RingKind::QuotientPoly { base, modulus } => {
                Value::Poly(vec![base.zero_value(); modulus.len() - 1])
            }
            RingKind::Product(fs) => Value::Tuple(fs.iter().map(|f| f.zero_value()).collect()),
        }
    }

    pub fn zero(&self) -> RingElement {
        RingElement { ring: self.clone(), value: self.zero_value() }
    }

    pub fn one(&self) -> RingElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> RingElement {
        self.from_bigint(BigInt::from(n))
    }

    /// Canonical image of an integer under the unique map Z -> R.
    pub fn from_bigint(&self, n: BigInt) -> RingElement {
        let value = match self.kind() {
            RingKind::Integers => Value::Int(n),
            RingKind::IntegersMod(m) => Value::Int(n.mod_floor(&BigInt::from(m.clone()))),
            RingKind::QuotientPoly { base, modulus } => {
                let mut coeffs = vec![base.zero_value(); modulus.len() - 1];
                coeffs[0] = base.from_bigint(n).value;
                Value::Poly(coeffs)
            }
            RingKind::Product(fs) => {
                Value::Tuple(fs.iter().map(|f| f.from_bigint(n.clone()).value).collect())
            }
        };
        RingElement { ring: self.clone(), value }
    }

    /// Element of a polynomial quotient ring from ascending coefficients.
    pub fn poly_from_coeffs(&self, coeffs: Vec<RingElement>) -> Result<RingElement> {
        match self.kind() {
            RingKind::QuotientPoly { base, modulus } => {
                for c in &coeffs {
                    if c.ring() != base {
                        return Err(Error::RingMismatch("polynomial coefficient outside base".into()));
                    }
                }
                let mut vals: Vec<Value> = coeffs.into_iter().map(|c| c.value).collect();
                reduce_poly(base, modulus, &mut vals);
                Ok(RingElement { ring: self.clone(), value: Value::Poly(vals) })
            }
            _ => Err(Error::Invalid("poly_from_coeffs on a non-quotient ring".into())),
        }
    }

    /// The residue class of X in a polynomial quotient ring.
    pub fn poly_gen(&self) -> Result<RingElement> {
        match self.kind() {
            RingKind::QuotientPoly { base, .. } => {
                self.poly_from_coeffs(vec![base.zero(), base.one()])
            }
            _ => Err(Error::Invalid("poly_gen on a non-quotient ring".into())),
        }
    }

    pub fn tuple(&self, parts: Vec<RingElement>) -> Result<RingElement> {
        match self.kind() {
            RingKind::Product(fs) => {
                if parts.len() != fs.len() {
                    return Err(Error::Invalid("wrong number of product components".into()));
                }
                for (p, f) in parts.iter().zip(fs.iter()) {
                    if p.ring() != f {
                        return Err(Error::RingMismatch("component outside its factor ring".into()));
                    }
                }
                Ok(RingElement {
                    ring: self.clone(),
                    value: Value::Tuple(parts.into_iter().map(|p| p.value).collect()),
                })
            }
            _ => Err(Error::Invalid("tuple on a non-product ring".into())),
        }
    }

    /// Project an element of a product ring onto factor `i`.
    pub fn project(&self, a: &RingElement, i: usize) -> RingElement {
        match (self.kind(), &a.value) {
            (RingKind::Product(fs), Value::Tuple(vs)) => {
                RingElement { ring: fs[i].clone(), value: vs[i].clone() }
            }
            _ => panic!("project on a non-product ring"),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self.kind() {
            RingKind::Integers => false,
            RingKind::IntegersMod(_) => true,
            RingKind::QuotientPoly { base, .. } => base.is_finite(),
            RingKind::Product(fs) => fs.iter().all(|f| f.is_finite()),
        }
    }

    pub fn size(&self) -> Option<BigUint> {
        match self.kind() {
            RingKind::Integers => None,
            RingKind::IntegersMod(n) => Some(n.clone()),
            RingKind::QuotientPoly { base, modulus } => {
                base.size().map(|s| s.pow((modulus.len() - 1) as u32))
            }
            RingKind::Product(fs) => {
                let mut acc = BigUint::one();
                for f in fs {
                    acc *= f.size()?;
                }
                Some(acc)
            }
        }
    }

    /// Whether 2 is not a zero-divisor.
    pub fn is_two_regular(&self) -> bool {
        match self.kind() {
            RingKind::Integers => true,
            RingKind::IntegersMod(n) => n.is_odd(),
            RingKind::QuotientPoly { base, .. } => base.is_two_regular(),
            RingKind::Product(fs) => fs.iter().all(|f| f.is_two_regular()),
        }
    }

    /// Generators of the ideal R[2] = {a | 2a = 0}.
    pub fn two_torsion_generators(&self) -> Result<Vec<RingElement>> {
        match self.kind() {
            RingKind::Integers => Ok(vec![self.zero()]),
            RingKind::IntegersMod(n) => {
                if n.is_even() {
                    let half = BigInt::from(n.clone()) / 2;
                    Ok(vec![self.from_bigint(half)])
                } else {
                    Ok(vec![self.zero()])
                }
            }
            RingKind::QuotientPoly { base, .. } => {
                // Monic modulus makes the quotient free over the base, so
                // R[2] is generated by the constants generating base[2].
                let gens = base.two_torsion_generators()?;
                gens.into_iter()
                    .map(|g| self.poly_from_coeffs(vec![g]))
                    .collect()
            }
            RingKind::Product(fs) => {
                let mut out = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    for g in f.two_torsion_generators()? {
                        if !g.is_zero() {
                            let parts: Vec<RingElement> = fs
                                .iter()
                                .enumerate()
                                .map(|(j, fj)| if j == i { g.clone() } else { fj.zero() })
                                .collect();
                            out.push(self.tuple(parts)?);
                        }
                    }
                }
                if out.is_empty() {
                    out.push(self.zero());
                }
                Ok(out)
            }
        }
    }

    /// Complete, sorted list of elements of a finite ring.
    pub fn elements(&self) -> Result<Vec<RingElement>> {
        match self.size() {
            None => match self.kind() {
                _ => Err(Error::NotComputable(format!("{} is infinite", self))),
            },
            Some(s) => {
                if s > BigUint::from(ENUM_CAP) {
                    return Err(Error::BudgetExceeded(format!(
                        "ring of size {} exceeds enumeration cap {}",
                        s, ENUM_CAP
                    )));
                }
                let mut out = self.elements_unsorted()?;
                out.sort();
                Ok(out)
            }
        }
    }

    fn elements_unsorted(&self) -> Result<Vec<RingElement>> {
        match self.kind() {
            RingKind::Integers => Err(Error::NotComputable("Z is infinite".into())),
            RingKind::IntegersMod(n) => {
                let n: u64 = n.try_into().map_err(|_| {
                    Error::BudgetExceeded("modulus too large to enumerate".into())
                })?;
                Ok((0..n).map(|k| self.from_i64(k as i64)).collect())
            }
            RingKind::QuotientPoly { base, modulus } => {
                let deg = modulus.len() - 1;
                let base_elems = base.elements()?;
                let mut out = vec![Value::Poly(Vec::new())];
                for _ in 0..deg {
                    let mut next = Vec::with_capacity(out.len() * base_elems.len());
                    for v in &out {
                        for b in &base_elems {
                            if let Value::Poly(cs) = v {
                                let mut cs = cs.clone();
                                cs.push(b.value.clone());
                                next.push(Value::Poly(cs));
                            }
                        }
                    }
                    out = next;
                }
                Ok(out
                    .into_iter()
                    .map(|value| RingElement { ring: self.clone(), value })
                    .collect())
            }
            RingKind::Product(fs) => {
                let mut out = vec![Value::Tuple(Vec::new())];
                for f in fs {
                    let felems = f.elements()?;
                    let mut next = Vec::with_capacity(out.len() * felems.len());
                    for v in &out {
                        for fe in &felems {
                            if let Value::Tuple(ps) = v {
                                let mut ps = ps.clone();
                                ps.push(fe.value.clone());
                                next.push(Value::Tuple(ps));
                            }
                        }
                    }
                    out = next;
                }
                Ok(out
                    .into_iter()
                    .map(|value| RingElement { ring: self.clone(), value })
                    .collect())
            }
        }
    }

    /// All idempotents, sorted.  Supported for finite rings, Z, and
    /// products of supported rings; everything else is not computable.
    pub fn idempotents(&self) -> Result<Vec<Idempotent>> {
        match self.kind() {
            RingKind::Integers => Ok(vec![
                Idempotent(self.zero()),
                Idempotent(self.one()),
            ]),
            RingKind::Product(fs) => {
                let per: Vec<Vec<Idempotent>> =
                    fs.iter().map(|f| f.idempotents()).collect::<Result<_>>()?;
                let mut out: Vec<Vec<RingElement>> = vec![Vec::new()];
                for fi in &per {
                    let mut next = Vec::with_capacity(out.len() * fi.len());
                    for prefix in &out {
                        for e in fi {
                            let mut p = prefix.clone();
                            p.push(e.element().clone());
                            next.push(p);
                        }
                    }
                    out = next;
                }
                let mut idems: Vec<Idempotent> = out
                    .into_iter()
                    .map(|parts| Ok(Idempotent(self.tuple(parts)?)))
                    .collect::<Result<_>>()?;
                idems.sort_by(|a, b| a.element().cmp(b.element()));
                Ok(idems)
            }
            _ if self.is_finite() => {
                let mut out: Vec<Idempotent> = self
                    .elements()?
                    .into_iter()
                    .filter(|e| e.mul(e) == *e)
                    .map(Idempotent)
                    .collect();
                out.sort_by(|a, b| a.element().cmp(b.element()));
                Ok(out)
            }
            _ => Err(Error::NotComputable(format!(
                "idempotent enumeration unsupported for {}",
                self
            ))),
        }
    }

    /// Multiplicative inverse, if the element is a unit.
    pub fn try_invert(&self, a: &RingElement) -> Option<RingElement> {
        assert_eq!(self, a.ring(), "try_invert: foreign element");
        match (self.kind(), &a.value) {
            (RingKind::Integers, Value::Int(v)) => {
                if v.abs().is_one() {
                    Some(a.clone())
                } else {
                    None
                }
            }
            (RingKind::IntegersMod(n), Value::Int(v)) => {
                let n = BigInt::from(n.clone());
                let ext = v.extended_gcd(&n);
                if ext.gcd.is_one() {
                    Some(self.from_bigint(ext.x))
                } else {
                    None
                }
            }
            (RingKind::Product(fs), Value::Tuple(vs)) => {
                let mut parts = Vec::with_capacity(fs.len());
                for (f, v) in fs.iter().zip(vs.iter()) {
                    let comp = RingElement { ring: f.clone(), value: v.clone() };
                    parts.push(f.try_invert(&comp)?);
                }
                Some(self.tuple(parts).expect("component inverses"))
            }
            (RingKind::QuotientPoly { .. }, _) => {
                // Solve a*x = 1 through the generic linear solver (restriction
                // of scalars handles the quotient), then double-check.
                let m = crate::linalg::Matrix::from_rows(self.clone(), vec![vec![a.clone()]]);
                let sol = crate::linalg::solve(&m, &[self.one()]).ok()??;
                let x = sol.into_iter().next().unwrap();
                if a.mul(&x).is_one() {
                    Some(x)
                } else {
                    None
                }
            }
            _ => unreachable!("canonical value shape mismatch"),
        }
    }
}

fn assert_same_ring(a: &RingElement, b: &RingElement) {
    assert_eq!(a.ring, b.ring, "ring mismatch between operands");
}

/// Reduce a coefficient vector by the monic modulus and pad to degree length.
fn reduce_poly(base: &Ring, modulus: &[RingElement], coeffs: &mut Vec<Value>) {
    let deg = modulus.len() - 1;
    while coeffs.len() > deg {
        let top = coeffs.pop().unwrap();
        let top = RingElement { ring: base.clone(), value: top };
        if top.is_zero() {
            continue;
        }
        let k = coeffs.len() - deg; // X^(deg+k) = -sum m_i X^(i+k)
        for i in 0..deg {
            let sub = top.mul(&modulus[i]);
            let cur = RingElement { ring: base.clone(), value: coeffs[k + i].clone() };
            coeffs[k + i] = cur.sub(&sub).value;
        }
    }
    while coeffs.len() < deg {
        coeffs.push(base.zero_value());
    }
}

impl RingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == self.ring.zero_value()
    }

    pub fn is_one(&self) -> bool {
        *self == self.ring.one()
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        assert_same_ring(self, other);
        let value = add_values(&self.ring, &self.value, &other.value);
        RingElement { ring: self.ring.clone(), value }
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RingElement {
        let value = neg_value(&self.ring, &self.value);
        RingElement { ring: self.ring.clone(), value }
    }

    pub fn mul(&self, other: &RingElement) -> RingElement {
        assert_same_ring(self, other);
        let value = mul_values(&self.ring, &self.value, &other.value);
        RingElement { ring: self.ring.clone(), value }
    }

    pub fn mul_i64(&self, k: i64) -> RingElement {
        self.mul(&self.ring.from_i64(k))
    }

    pub fn pow(&self, mut e: u64) -> RingElement {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn try_invert(&self) -> Option<RingElement> {
        self.ring.try_invert(self)
    }

    pub fn is_unit(&self) -> bool {
        self.try_invert().is_some()
    }
}

fn add_values(ring: &Ring, a: &Value, b: &Value) -> Value {
    match (ring.kind(), a, b) {
        (RingKind::Integers, Value::Int(x), Value::Int(y)) => Value::Int(x + y),
        (RingKind::IntegersMod(n), Value::Int(x), Value::Int(y)) => {
            Value::Int((x + y).mod_floor(&BigInt::from(n.clone())))
        }
        (RingKind::QuotientPoly { base, .. }, Value::Poly(xs), Value::Poly(ys)) => Value::Poly(
            xs.iter().zip(ys.iter()).map(|(x, y)| add_values(base, x, y)).collect(),
        ),
        (RingKind::Product(fs), Value::Tuple(xs), Value::Tuple(ys)) => Value::Tuple(
            fs.iter()
                .zip(xs.iter().zip(ys.iter()))
                .map(|(f, (x, y))| add_values(f, x, y))
                .collect(),
        ),
        _ => unreachable!("canonical value shape mismatch"),
    }
}

fn neg_value(ring: &Ring, a: &Value) -> Value {
    match (ring.kind(), a) {
        (RingKind::Integers, Value::Int(x)) => Value::Int(-x),
        (RingKind::IntegersMod(n), Value::Int(x)) => {
            Value::Int((-x).mod_floor(&BigInt::from(n.clone())))
        }
        (RingKind::QuotientPoly { base, .. }, Value::Poly(xs)) => {
            Value::Poly(xs.iter().map(|x| neg_value(base, x)).collect())
        }
        (RingKind::Product(fs), Value::Tuple(xs)) => {
            Value::Tuple(fs.iter().zip(xs.iter()).map(|(f, x)| neg_value(f, x)).collect())
        }
        _ => unreachable!("canonical value shape mismatch"),
    }
}

fn mul_values(ring: &Ring, a: &Value, b: &Value) -> Value {
    match (ring.kind(), a, b) {
        (RingKind::Integers, Value::Int(x), Value::Int(y)) => Value::Int(x * y),
        (RingKind::IntegersMod(n), Value::Int(x), Value::Int(y)) => {
            Value::Int((x * y).mod_floor(&BigInt::from(n.clone())))
        }
        (RingKind::QuotientPoly { base, modulus }, Value::Poly(xs), Value::Poly(ys)) => {
            let deg = modulus.len() - 1;
            let mut conv = vec![base.zero_value(); 2 * deg.max(1)];
            for (i, x) in xs.iter().enumerate() {
                for (j, y) in ys.iter().enumerate() {
                    let prod = mul_values(base, x, y);
                    conv[i + j] = add_values(base, &conv[i + j], &prod);
                }
            }
            reduce_poly(base, modulus, &mut conv);
            Value::Poly(conv)
        }
        (RingKind::Product(fs), Value::Tuple(xs), Value::Tuple(ys)) => Value::Tuple(
            fs.iter()
                .zip(xs.iter().zip(ys.iter()))
                .map(|(f, (x, y))| mul_values(f, x, y))
                .collect(),
        ),
        _ => unreachable!("canonical value shape mismatch"),
    }
}

/// An element e with e^2 = e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Idempotent(RingElement);

impl Idempotent {
    pub fn new(e: RingElement) -> Result<Idempotent> {
        if e.mul(&e) != e {
            return Err(Error::Certificate(format!("{} is not idempotent", e)));
        }
        Ok(Idempotent(e))
    }

    pub fn element(&self) -> &RingElement {
        &self.0
    }

    /// Boolean-ring addition e (+) f = e + f - 2ef.
    pub fn xor(&self, other: &Idempotent) -> Idempotent {
        let e = &self.0;
        let f = &other.0;
        Idempotent(e.add(f).sub(&e.mul(f).mul_i64(2)))
    }

    /// 1 - e, the complementary idempotent.
    pub fn complement(&self) -> Idempotent {
        Idempotent(self.0.ring().one().sub(&self.0))
    }

    /// The square root of 1 attached to e, namely 1 - 2e.
    pub fn to_mu2(&self) -> RingElement {
        self.0.ring().one().sub(&self.0.mul_i64(2))
    }
}

/// All square roots of 1 in a finite ring.
pub fn mu2_elements(ring: &Ring) -> Result<Vec<RingElement>> {
    Ok(ring
        .elements()?
        .into_iter()
        .filter(|d| d.mul(d).is_one())
        .collect())
}

/// Does some idempotent e satisfy 1 - 2e = delta?  Decides membership of
/// delta in the image of Idem(R) inside mu_2(R), without enumerating
/// idempotents: solves 2x = 1 - delta and tests solutions for idempotency.
pub fn mu2_in_idempotent_image(delta: &RingElement) -> Result<bool> {
    let ring = delta.ring().clone();
    if !delta.mul(delta).is_one() {
        return Err(Error::Certificate(format!("{} does not square to 1", delta)));
    }
    let rhs = ring.one().sub(delta);
    let two = crate::linalg::Matrix::from_rows(ring.clone(), vec![vec![ring.from_i64(2)]]);
    let particular = match crate::linalg::solve(&two, &[rhs])? {
        Some(sol) => sol.into_iter().next().unwrap(),
        None => return Ok(false),
    };
    // Any solution differs from this one by the kernel of multiplication by 2.
    let kernel = crate::linalg::nullspace(&two)?;
    let mut candidates = vec![particular.clone()];
    if !kernel.is_empty() && ring.is_finite() {
        let gens: Vec<RingElement> = kernel.into_iter().map(|v| v.into_iter().next().unwrap()).collect();
        for combo in span_elements(&ring, &gens)? {
            candidates.push(particular.add(&combo));
        }
    }
    Ok(candidates.into_iter().any(|e| e.mul(&e) == e))
}

/// All elements of the span of `gens` over a finite ring (deduplicated).
pub fn span_elements(ring: &Ring, gens: &[RingElement]) -> Result<Vec<RingElement>> {
    let elems = ring.elements()?;
    let mut seen = std::collections::BTreeSet::new();
    let mut stack = vec![ring.zero()];
    seen.insert(ring.zero());
    // Breadth-first closure under adding multiples of the generators.
    while let Some(cur) = stack.pop() {
        for g in gens {
            for c in &elems {
                let next = cur.add(&g.mul(c));
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
        }
    }
    Ok(seen.into_iter().collect())
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            RingKind::Integers => write!(f, "Z"),
            RingKind::IntegersMod(n) => write!(f, "Z/{}", n),
            RingKind::QuotientPoly { base, modulus } => {
                let needs_parens = matches!(base.kind(), RingKind::Product(_));
                if needs_parens {
                    write!(f, "({})", base)?;
                } else {
                    write!(f, "{}", base)?;
                }
                write!(f, "[X]/({})", format_poly(modulus))
            }
            RingKind::Product(fs) => {
                let parts: Vec<String> = fs
                    .iter()
                    .map(|r| match r.kind() {
                        RingKind::Product(_) => format!("({})", r),
                        _ => format!("{}", r),
                    })
                    .collect();
                write!(f, "{}", parts.join(" x "))
            }
        }
    }
}

fn format_poly(coeffs: &[RingElement]) -> String {
    let mut terms = Vec::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let cs = format!("{}", c);
        let term = if i == 0 {
            cs
        } else {
            let x = if i == 1 { "X".to_string() } else { format!("X^{}", i) };
            if c.is_one() {
                x
            } else if cs.starts_with('-') && c.ring().one().neg() == *c {
                format!("-{}", x)
            } else if cs.contains(['+', '-', ','].as_ref()) && !cs.starts_with('(') {
                format!("({})*{}", cs, x)
            } else {
                format!("{}*{}", cs, x)
            }
        };
        terms.push(term);
    }
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        if i == 0 {
            out.push_str(t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str("-");
            out.push_str(rest);
        } else {
            out.push('+');
            out.push_str(t);
        }
    }
    out
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.value, self.ring.kind()) {
            (Value::Int(v), _) => write!(f, "{}", v),
            (Value::Poly(cs), RingKind::QuotientPoly { base, .. }) => {
                let elems: Vec<RingElement> = cs
                    .iter()
                    .map(|c| RingElement { ring: base.clone(), value: c.clone() })
                    .collect();
                write!(f, "({})", format_poly(&elems))
            }
            (Value::Tuple(ps), RingKind::Product(fs)) => {
                let parts: Vec<String> = fs
                    .iter()
                    .zip(ps.iter())
                    .map(|(fr, p)| format!("{}", RingElement { ring: fr.clone(), value: p.clone() }))
                    .collect();
                write!(f, "({})", parts.join(","))
            }
            _ => unreachable!("canonical value shape mismatch"),
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

    /// Z[X]/(X^2-1)
    fn zx21() -> Ring {
        let z = z();
        Ring::quotient_poly(z.clone(), vec![z.from_i64(-1), z.from_i64(0), z.from_i64(1)]).unwrap()
    }

    #[test]
    fn arith_canonical() {
        let r = zn(6);
        assert_eq!(r.from_i64(3).mul(&r.from_i64(4)), r.zero());
        let rx = zx21();
        let x = rx.poly_gen().unwrap();
        assert_eq!(x.mul(&x), rx.one());
        let p = Ring::product(vec![zn(15), z()]).unwrap();
        let a = p.tuple(vec![zn(15).from_i64(3), z().from_i64(2)]).unwrap();
        let b = p.tuple(vec![zn(15).from_i64(5), z().from_i64(-2)]).unwrap();
        assert_eq!(a.add(&b), p.tuple(vec![zn(15).from_i64(8), z().from_i64(0)]).unwrap());
    }

    #[test]
    fn invert_examples() {
        let r = zn(6);
        assert_eq!(r.from_i64(5).try_invert(), Some(r.from_i64(5)));
        assert_eq!(z().from_i64(2).try_invert(), None);
        let rx = zx21();
        let x = rx.poly_gen().unwrap();
        assert_eq!(x.try_invert(), Some(x.clone()));
    }

    #[test]
    fn two_torsion() {
        assert_eq!(z().two_torsion_generators().unwrap(), vec![z().zero()]);
        assert_eq!(zn(6).two_torsion_generators().unwrap(), vec![zn(6).from_i64(3)]);
        assert_eq!(zn(2).two_torsion_generators().unwrap(), vec![zn(2).one()]);
        // brute-force oracle over Z/6: {a | 2a = 0} = {0, 3}
        let r = zn(6);
        let tors: Vec<RingElement> = r
            .elements()
            .unwrap()
            .into_iter()
            .filter(|a| a.mul_i64(2).is_zero())
            .collect();
        let spanned = span_elements(&r, &r.two_torsion_generators().unwrap()).unwrap();
        assert_eq!(tors, spanned);
    }

    #[test]
    fn idempotents_examples() {
        let ids = |r: &Ring| -> Vec<i64> {
            r.idempotents()
                .unwrap()
                .iter()
                .map(|e| format!("{}", e.element()).parse().unwrap())
                .collect()
        };
        assert_eq!(ids(&zn(6)), vec![0, 1, 3, 4]);
        assert_eq!(ids(&zn(15)), vec![0, 1, 6, 10]);
        assert_eq!(ids(&zn(30)), vec![0, 1, 6, 10, 15, 16, 21, 25]);
        assert_eq!(z().idempotents().unwrap().len(), 2);
        assert!(zx21().idempotents().is_err());
    }

    #[test]
    fn idem_boolean_ring() {
        let r = zn(6);
        let e3 = Idempotent::new(r.from_i64(3)).unwrap();
        let e4 = Idempotent::new(r.from_i64(4)).unwrap();
        assert_eq!(e3.xor(&e4).element(), &r.one());
        assert_eq!(e3.xor(&e3).element(), &r.zero());
        assert_eq!(e4.complement().element(), &r.from_i64(3));
        // 1 - 2e examples over Z/6
        assert_eq!(e3.to_mu2(), r.one());
        assert_eq!(e4.to_mu2(), r.from_i64(5));
    }

    #[test]
    fn mu2_image_counterexample() {
        // X in Z[X]/(X^2-1) squares to 1 but is not 1-2e for any idempotent.
        let rx = zx21();
        let x = rx.poly_gen().unwrap();
        assert!(!mu2_in_idempotent_image(&x).unwrap());
        assert!(mu2_in_idempotent_image(&rx.one().neg()).unwrap());
        // over Z/6 every square root of 1 comes from an idempotent
        for d in mu2_elements(&zn(6)).unwrap() {
            assert!(mu2_in_idempotent_image(&d).unwrap());
        }
    }

    #[test]
    fn display_roundtrip_shapes() {
        assert_eq!(format!("{}", zn(6)), "Z/6");
        assert_eq!(format!("{}", zx21()), "Z[X]/(X^2-1)");
        let p = Ring::product(vec![zn(3), zn(5)]).unwrap();
        assert_eq!(format!("{}", p), "Z/3 x Z/5");
    }
}

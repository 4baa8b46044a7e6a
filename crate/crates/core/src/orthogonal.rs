//! Orthogonal maps of a quadratic module: isometry testing, e-reflections,
//! Euler transformations, transvections with their determinant identity,
//! exhaustive enumeration over finite rings, the kernel structure of the
//! groups involved, and the empirical search attached to the bijectivity
//! conjecture.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::quadratic::QuadraticModule;
use crate::ring::{Idempotent, RingElement};

/// A module endomorphism given by its matrix (columns are images of the
/// basis vectors), constructed only after passing the isometry test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalMap {
    module: QuadraticModule,
    matrix: Matrix,
}

impl OrthogonalMap {
    /// Wrap a matrix after checking q(phi x) = q(x) on the basis and
    /// (phi x_i, phi x_j) = (x_i, x_j) for i < j.
    pub fn new(module: QuadraticModule, matrix: Matrix) -> Result<OrthogonalMap> {
        if !is_orthogonal_matrix(&module, &matrix)? {
            return Err(Error::Certificate("matrix is not an isometry".into()));
        }
        Ok(OrthogonalMap { module, matrix })
    }

    /// Wrap without checking; for maps that are isometries by construction.
    pub(crate) fn new_unchecked(module: QuadraticModule, matrix: Matrix) -> OrthogonalMap {
        OrthogonalMap { module, matrix }
    }

    pub fn module(&self) -> &QuadraticModule {
        &self.module
    }
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn identity(module: QuadraticModule) -> OrthogonalMap {
        let n = module.rank();
        let m = Matrix::identity(module.ring().clone(), n);
        OrthogonalMap { module, matrix: m }
    }

    pub fn apply(&self, v: &[RingElement]) -> Vec<RingElement> {
        self.matrix.mul_vec(v)
    }

    pub fn compose(&self, other: &OrthogonalMap) -> OrthogonalMap {
        assert_eq!(self.module, other.module, "module mismatch");
        OrthogonalMap {
            module: self.module.clone(),
            matrix: self.matrix.mul(&other.matrix),
        }
    }

    pub fn det(&self) -> RingElement {
        self.matrix.det()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    /// Invertibility over a commutative ring is a unit determinant.
    pub fn is_bijective(&self) -> bool {
        self.det().is_unit()
    }

    pub fn try_inverse(&self) -> Option<OrthogonalMap> {
        let inv = self.matrix.try_inverse()?;
        Some(OrthogonalMap { module: self.module.clone(), matrix: inv })
    }

    /// Does the map fix every generator of M-perp?
    pub fn acts_trivially_on_perp(&self) -> Result<bool> {
        let kernel = self.module.kernel_perp()?;
        for g in &kernel.perp {
            if self.apply(g) != *g {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Canonical key for set-keeping.
    pub fn key(&self) -> String {
        let n = self.module.rank();
        let mut parts = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                parts.push(self.matrix.at(i, j).to_string());
            }
        }
        parts.join(";")
    }
}

/// q(phi x) = q(x) on basis vectors and pair preservation on pairs; by the
/// quadratic extension formula this is equivalent to q(phi v) = q(v) on all
/// of M.
pub fn is_orthogonal_matrix(module: &QuadraticModule, matrix: &Matrix) -> Result<bool> {
    let n = module.rank();
    if matrix.rows() != n || matrix.cols() != n {
        return Err(Error::Invalid("matrix dimension mismatch".into()));
    }
    for i in 0..n {
        let ci = matrix.col(i);
        if module.eval_q(&ci)? != module.qdiag()[i] {
            return Ok(false);
        }
        for j in (i + 1)..n {
            let cj = matrix.col(j);
            if module.eval_pair(&ci, &cj)? != *module.gram().at(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Certified data for an e-reflection: x in eM with q(x) a unit of the
/// ideal eR, witnessed by t with q(x) t = e.
#[derive(Clone, Debug)]
pub struct ReflectionData {
    module: QuadraticModule,
    e: Idempotent,
    x: Vec<RingElement>,
    /// Inverse of q(x) inside eR.
    t: RingElement,
}

impl ReflectionData {
    pub fn new(module: QuadraticModule, e: Idempotent, x: Vec<RingElement>) -> Result<ReflectionData> {
        let ring = module.ring().clone();
        if x.len() != module.rank() {
            return Err(Error::Invalid("reflection vector length mismatch".into()));
        }
        // x must lie in eM
        let ee = e.element();
        for c in &x {
            if ee.mul(c) != *c {
                return Err(Error::Certificate(format!(
                    "vector is not fixed by the idempotent {}",
                    ee
                )));
            }
        }
        let qx = module.eval_q(&x)?;
        // find t in eR with q(x) t = e: two linear conditions on t
        let m = Matrix::from_rows(
            ring.clone(),
            vec![vec![qx.clone()], vec![ring.one().sub(ee)]],
        );
        let rhs = vec![ee.clone(), ring.zero()];
        let t = match linalg::solve(&m, &rhs)? {
            Some(sol) => sol.into_iter().next().unwrap(),
            None => {
                return Err(Error::Certificate(format!(
                    "q(x) = {} is not a unit of the ideal generated by {}",
                    qx, ee
                )))
            }
        };
        Ok(ReflectionData { module, e, x, t })
    }

    pub fn module(&self) -> &QuadraticModule {
        &self.module
    }
    pub fn idempotent(&self) -> &Idempotent {
        &self.e
    }
    pub fn vector(&self) -> &[RingElement] {
        &self.x
    }
    pub fn q_inverse(&self) -> &RingElement {
        &self.t
    }

    /// y -> y - ((x, y) / q(x)) x, division taken inside eR.
    pub fn reflection(&self) -> Result<OrthogonalMap> {
        let n = self.module.rank();
        let ring = self.module.ring().clone();
        let mut m = Matrix::identity(ring.clone(), n);
        for j in 0..n {
            let pair = self.module.eval_pair(&self.x, &self.module.basis_vector(j))?;
            let coef = pair.mul(&self.t);
            for i in 0..n {
                let sub = coef.mul(&self.x[i]);
                *m.at_mut(i, j) = m.at(i, j).sub(&sub);
            }
        }
        OrthogonalMap::new(self.module.clone(), m)
    }

    /// Trivial exactly when x lies in M-perp; both sides are computed.
    pub fn is_trivial(&self) -> Result<bool> {
        Ok(self.reflection()?.is_identity())
    }
}

/// Certified data for an Euler transformation: (u, x) = 0, q(u) q(x) = 0,
/// and q(u) (x, y) = 0 for all y (checked on the basis).
#[derive(Clone, Debug)]
pub struct EulerData {
    module: QuadraticModule,
    u: Vec<RingElement>,
    x: Vec<RingElement>,
}

impl EulerData {
    pub fn new(module: QuadraticModule, u: Vec<RingElement>, x: Vec<RingElement>) -> Result<EulerData> {
        if u.len() != module.rank() || x.len() != module.rank() {
            return Err(Error::Invalid("vector length mismatch".into()));
        }
        if !module.eval_pair(&u, &x)?.is_zero() {
            return Err(Error::Certificate("(u, x) must vanish".into()));
        }
        let qu = module.eval_q(&u)?;
        if !qu.mul(&module.eval_q(&x)?).is_zero() {
            return Err(Error::Certificate("q(u) q(x) must vanish".into()));
        }
        for j in 0..module.rank() {
            let pj = module.eval_pair(&x, &module.basis_vector(j))?;
            if !qu.mul(&pj).is_zero() {
                return Err(Error::Certificate("q(u) must annihilate the pairings of x".into()));
            }
        }
        Ok(EulerData { module, u, x })
    }

    pub fn module(&self) -> &QuadraticModule {
        &self.module
    }
    pub fn u(&self) -> &[RingElement] {
        &self.u
    }
    pub fn x(&self) -> &[RingElement] {
        &self.x
    }

    /// y -> y + (x, y) u - (u, y)[x + q(x) u].
    pub fn euler_map(&self) -> Result<OrthogonalMap> {
        let n = self.module.rank();
        let ring = self.module.ring().clone();
        let qx = self.module.eval_q(&self.x)?;
        // shifted = x + q(x) u
        let shifted: Vec<RingElement> = self
            .x
            .iter()
            .zip(self.u.iter())
            .map(|(xi, ui)| xi.add(&qx.mul(ui)))
            .collect();
        let mut m = Matrix::identity(ring.clone(), n);
        for j in 0..n {
            let ej = self.module.basis_vector(j);
            let px = self.module.eval_pair(&self.x, &ej)?;
            let pu = self.module.eval_pair(&self.u, &ej)?;
            for i in 0..n {
                let add = px.mul(&self.u[i]).sub(&pu.mul(&shifted[i]));
                *m.at_mut(i, j) = m.at(i, j).add(&add);
            }
        }
        OrthogonalMap::new(self.module.clone(), m)
    }

    /// E_{u,-x}, the inverse transformation.
    pub fn inverse_data(&self) -> EulerData {
        EulerData {
            module: self.module.clone(),
            u: self.u.clone(),
            x: self.x.iter().map(|c| c.neg()).collect(),
        }
    }
}

/// The (not necessarily orthogonal) transvection y -> y + (t, y) z together
/// with its predicted determinant 1 + (z, t).
pub fn transvection(
    module: &QuadraticModule,
    z: &[RingElement],
    t: &[RingElement],
) -> Result<(Matrix, RingElement)> {
    let n = module.rank();
    let ring = module.ring().clone();
    let mut m = Matrix::identity(ring.clone(), n);
    for j in 0..n {
        let pj = module.eval_pair(t, &module.basis_vector(j))?;
        for i in 0..n {
            let add = pj.mul(&z[i]);
            *m.at_mut(i, j) = m.at(i, j).add(&add);
        }
    }
    let det = ring.one().add(&module.eval_pair(z, t)?);
    Ok((m, det))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EnumRestrict {
    All,
    TrivialOnPerp,
}

/// A map found by exhaustive enumeration, tagged bijective or not.
#[derive(Clone, Debug)]
pub struct EnumeratedMap {
    pub map: OrthogonalMap,
    pub bijective: bool,
}

/// All orthogonal matrices over a finite ring, in lexicographic order of
/// the entry list; optionally restricted to those trivial on M-perp.
pub fn enumerate_orthogonal(
    module: &QuadraticModule,
    restrict: EnumRestrict,
    budget: usize,
) -> Result<Vec<EnumeratedMap>> {
    let ring = module.ring().clone();
    let n = module.rank();
    let elems = ring.elements()?;
    let total = elems
        .len()
        .checked_pow((n * n) as u32)
        .ok_or_else(|| Error::BudgetExceeded("matrix enumeration overflow".into()))?;
    if total > budget {
        return Err(Error::BudgetExceeded(format!(
            "{} candidate matrices exceed the budget {}",
            total, budget
        )));
    }
    let perp = module.kernel_perp()?.perp;
    let mut out = Vec::new();
    let mut idx = vec![0usize; n * n];
    loop {
        let mut m = Matrix::zero(ring.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                *m.at_mut(i, j) = elems[idx[i * n + j]].clone();
            }
        }
        if is_orthogonal_matrix(module, &m)? {
            let map = OrthogonalMap::new_unchecked(module.clone(), m);
            let keep = match restrict {
                EnumRestrict::All => true,
                EnumRestrict::TrivialOnPerp => perp.iter().all(|g| map.apply(g) == *g),
            };
            if keep {
                let bijective = map.is_bijective();
                out.push(EnumeratedMap { map, bijective });
            }
        }
        // lexicographic counter over entries
        let mut p = n * n;
        loop {
            if p == 0 {
                return Ok(out);
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < elems.len() {
                break;
            }
            idx[p] = 0;
            if p == 0 {
                return Ok(out);
            }
        }
    }
}

/// Invertible orthogonal maps that are trivial on M-perp.
pub fn enumerate_group_o_perp(
    module: &QuadraticModule,
    budget: usize,
) -> Result<Vec<OrthogonalMap>> {
    Ok(enumerate_orthogonal(module, EnumRestrict::TrivialOnPerp, budget)?
        .into_iter()
        .filter(|e| e.bijective)
        .map(|e| e.map)
        .collect())
}

/// Closure of a generating set under composition (breadth-first products).
pub fn generate_subgroup(gens: &[OrthogonalMap], cap: usize) -> Result<Vec<OrthogonalMap>> {
    let module = match gens.first() {
        Some(g) => g.module().clone(),
        None => return Ok(Vec::new()),
    };
    let mut members: BTreeMap<String, OrthogonalMap> = BTreeMap::new();
    let id = OrthogonalMap::identity(module);
    members.insert(id.key(), id);
    let mut frontier: Vec<OrthogonalMap> = members.values().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for g in gens {
                let prod = f.compose(g);
                let key = prod.key();
                if !members.contains_key(&key) {
                    members.insert(key, prod.clone());
                    next.push(prod);
                    if members.len() > cap {
                        return Err(Error::BudgetExceeded(
                            "generated subgroup exceeded its cap".into(),
                        ));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(members.into_values().collect())
}

/// Every admissible e-reflection of a finite module: all idempotents e and
/// all x in eM with q(x) a unit of eR.
pub fn all_reflections(module: &QuadraticModule) -> Result<Vec<(ReflectionData, OrthogonalMap)>> {
    let ring = module.ring().clone();
    let mut out = Vec::new();
    for e in ring.idempotents()? {
        for x in module.all_vectors()? {
            if let Ok(data) = ReflectionData::new(module.clone(), e.clone(), x) {
                let map = data.reflection()?;
                out.push((data, map));
            }
        }
    }
    Ok(out)
}

/// Every certified Euler transformation of a finite module.
pub fn all_euler_maps(module: &QuadraticModule) -> Result<Vec<(EulerData, OrthogonalMap)>> {
    let vecs = module.all_vectors()?;
    let mut out = Vec::new();
    for u in &vecs {
        for x in &vecs {
            if let Ok(data) = EulerData::new(module.clone(), u.clone(), x.clone()) {
                let map = data.euler_map()?;
                out.push((data, map));
            }
        }
    }
    Ok(out)
}

/// Generate the group from all reflections (tagged 1 - 2e) and all Euler
/// transformations (tagged 1), checking along the way that the product of
/// word tags always agrees with the matrix determinant.  Returns the
/// consistency flag, the generated maps, and the set of observed
/// determinants.
pub fn det_word_consistency(
    module: &QuadraticModule,
    budget: usize,
) -> Result<(bool, Vec<OrthogonalMap>, Vec<RingElement>)> {
    let ring = module.ring().clone();
    let mut gens_tagged: Vec<(OrthogonalMap, RingElement)> = Vec::new();
    for (data, map) in all_reflections(module)? {
        gens_tagged.push((map, data.idempotent().to_mu2()));
    }
    for (_, map) in all_euler_maps(module)? {
        gens_tagged.push((map, ring.one()));
    }
    let mut tagged: BTreeMap<String, (OrthogonalMap, RingElement)> = BTreeMap::new();
    let id = OrthogonalMap::identity(module.clone());
    tagged.insert(id.key(), (id, ring.one()));
    let mut consistent = true;
    let mut frontier: Vec<(OrthogonalMap, RingElement)> = tagged.values().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (f, fd) in &frontier {
            for (g, gd) in &gens_tagged {
                let prod = f.compose(g);
                let word_det = fd.mul(gd);
                if prod.matrix().det() != word_det {
                    consistent = false;
                }
                let key = prod.key();
                match tagged.get(&key) {
                    Some((_, existing)) => {
                        if *existing != word_det {
                            consistent = false;
                        }
                    }
                    None => {
                        tagged.insert(key, (prod.clone(), word_det.clone()));
                        next.push((prod, word_det));
                        if tagged.len() > budget {
                            return Err(Error::BudgetExceeded(
                                "reflection group closure exceeded budget".into(),
                            ));
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    let mut dets: BTreeSet<RingElement> = BTreeSet::new();
    let mut maps = Vec::new();
    for (_, (m, d)) in tagged {
        dets.insert(d);
        maps.push(m);
    }
    Ok((consistent, maps, dets.into_iter().collect()))
}

#[derive(Clone, Debug, Serialize)]
pub struct AllMqReport {
    pub instance: String,
    pub candidates_checked: usize,
    pub counterexamples: Vec<Vec<Vec<String>>>,
}

/// Search for orthogonal maps restricting to the identity on M-perp that
/// fail to be bijective.  The conjecture expects none; any hit is recorded
/// in full, never asserted away.
pub fn conjecture_allmq_search(module: &QuadraticModule, budget: usize) -> Result<AllMqReport> {
    let all = enumerate_orthogonal(module, EnumRestrict::TrivialOnPerp, budget)?;
    let mut counterexamples = Vec::new();
    let checked = all.len();
    for e in all {
        if !e.bijective {
            let n = module.rank();
            let rows: Vec<Vec<String>> = (0..n)
                .map(|i| (0..n).map(|j| e.map.matrix().at(i, j).to_string()).collect())
                .collect();
            counterexamples.push(rows);
        }
    }
    Ok(AllMqReport {
        instance: module.to_string(),
        candidates_checked: checked,
        counterexamples,
    })
}

/// Kernel membership of non-bijective orthogonal maps: ker(phi) must lie
/// inside the quadratic kernel.  Checked exhaustively over finite rings.
pub fn kernel_inside_qperp(module: &QuadraticModule, budget: usize) -> Result<bool> {
    let all = enumerate_orthogonal(module, EnumRestrict::All, budget)?;
    let kernel = module.kernel_perp()?;
    for e in all {
        for v in module.all_vectors()? {
            if e.map.apply(&v).iter().all(|c| c.is_zero())
                && !linalg::in_span(module.ring(), &kernel.qperp, &v)?
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceReport {
    pub instance: String,
    pub split_available: bool,
    pub skipped_reason: Option<String>,
    /// kernel of O(M,q) -> GL(kernel) x O(quotient) equals {Id + psi}
    pub odecom_kernel_matches: Option<bool>,
    /// the additive group law on that kernel
    pub kernel_is_additive: Option<bool>,
    /// kernel elements of the restricted group factor through M / M-perp
    pub omperp_kernel_factors: Option<bool>,
    /// E_{u,x} for u in the quadratic kernel: biadditive, lands in the
    /// kernel, and acts as y -> y + (x,y) u
    pub euler_into_kernel: Option<bool>,
    pub pass: bool,
}

/// Desk-scale verification of the two exact sequences and of the map
/// (x, u) -> E_{u,x}, over a finite ring whose quadratic kernel is spanned
/// by basis vectors.
pub fn sequence_checks(module: &QuadraticModule, budget: usize) -> Result<SequenceReport> {
    let ring = module.ring().clone();
    let n = module.rank();
    let mut report = SequenceReport {
        instance: module.to_string(),
        split_available: false,
        skipped_reason: None,
        odecom_kernel_matches: None,
        kernel_is_additive: None,
        omperp_kernel_factors: None,
        euler_into_kernel: None,
        pass: false,
    };
    let kernel = module.kernel_perp()?;
    // need the quadratic kernel spanned by basis vectors
    let mut killed = Vec::new();
    for i in 0..n {
        if linalg::in_span(&ring, &kernel.qperp, &module.basis_vector(i))? {
            killed.push(i);
        }
    }
    let aligned = kernel.qperp.iter().all(|g| {
        g.iter().enumerate().all(|(i, c)| c.is_zero() || killed.contains(&i))
    });
    if !aligned {
        report.skipped_reason = Some("quadratic kernel is not spanned by basis vectors".into());
        return Ok(report);
    }
    report.split_available = true;
    let kept: Vec<usize> = (0..n).filter(|i| !killed.contains(i)).collect();

    let all = enumerate_orthogonal(module, EnumRestrict::All, budget)?;
    let invertible: Vec<&EnumeratedMap> = all.iter().filter(|e| e.bijective).collect();

    // the kernel of restriction: Id on the quadratic kernel part and Id on
    // the quotient (entries over kept coordinates)
    let in_restriction_kernel = |m: &Matrix| -> bool {
        // identity on the quadratic kernel: killed columns are standard
        for &j in &killed {
            for i in 0..n {
                let expect = if i == j { ring.one() } else { ring.zero() };
                if *m.at(i, j) != expect {
                    return false;
                }
            }
        }
        // trivial induced quotient action: kept coordinates of kept columns
        // are standard, killed coordinates are free
        for &j in &kept {
            for &i in &kept {
                let expect = if i == j { ring.one() } else { ring.zero() };
                if *m.at(i, j) != expect {
                    return false;
                }
            }
        }
        true
    };

    // {Id + psi~}: psi runs over Hom(quotient, quadratic kernel)
    let mut psi_maps: Vec<Matrix> = Vec::new();
    {
        let elems = ring.elements()?;
        let cells = killed.len() * kept.len();
        let total = elems.len().checked_pow(cells as u32).unwrap_or(usize::MAX);
        if total > budget {
            return Err(Error::BudgetExceeded("Hom enumeration too large".into()));
        }
        let mut idx = vec![0usize; cells.max(1)];
        loop {
            let mut m = Matrix::identity(ring.clone(), n);
            for (c, (&ki, &kj)) in killed
                .iter()
                .flat_map(|ki| kept.iter().map(move |kj| (ki, kj)))
                .enumerate()
            {
                *m.at_mut(ki, kj) = elems[idx[c]].clone();
            }
            psi_maps.push(m);
            if cells == 0 {
                break;
            }
            let mut p = 0;
            loop {
                if p == cells {
                    break;
                }
                idx[p] += 1;
                if idx[p] < elems.len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if idx.iter().all(|&v| v == 0) {
                break;
            }
        }
    }

    // (i) kernel of the restriction map equals {Id + psi~}
    let kernel_found: Vec<&&EnumeratedMap> = invertible
        .iter()
        .filter(|e| in_restriction_kernel(e.map.matrix()))
        .collect();
    let psi_keys: std::collections::BTreeSet<String> = psi_maps
        .iter()
        .map(|m| OrthogonalMap::new_unchecked(module.clone(), m.clone()).key())
        .collect();
    let found_keys: std::collections::BTreeSet<String> =
        kernel_found.iter().map(|e| e.map.key()).collect();
    report.odecom_kernel_matches = Some(psi_keys == found_keys);

    // group law on the kernel is addition of the psi blocks
    let mut additive = true;
    for a in psi_maps.iter().take(16) {
        for b in psi_maps.iter().take(16) {
            let prod = a.mul(b);
            let mut sum = Matrix::identity(ring.clone(), n);
            for &ki in &killed {
                for &kj in &kept {
                    *sum.at_mut(ki, kj) = a.at(ki, kj).add(b.at(ki, kj));
                }
            }
            if prod != sum {
                additive = false;
            }
        }
    }
    report.kernel_is_additive = Some(additive);

    // (ii) within the group trivial on M-perp, kernel elements factor
    // through M / M-perp: psi~ must kill every generator of M-perp
    let mut factors = true;
    for e in &invertible {
        if !in_restriction_kernel(e.map.matrix()) {
            continue;
        }
        let trivial_on_perp = kernel.perp.iter().all(|g| e.map.apply(g) == *g);
        if !trivial_on_perp {
            continue;
        }
        for g in &kernel.perp {
            let img = e.map.apply(g);
            if img != *g {
                factors = false;
            }
        }
    }
    report.omperp_kernel_factors = Some(factors);

    // (iii) Euler transformations from the quadratic kernel
    let mut euler_ok = true;
    let qperp_members = module.span_members(&kernel.qperp)?;
    let all_vecs = module.all_vectors()?;
    for u in &qperp_members {
        for x in &all_vecs {
            let data = EulerData::new(module.clone(), u.clone(), x.clone())?;
            let map = data.euler_map()?;
            if !in_restriction_kernel(map.matrix()) {
                euler_ok = false;
            }
            // action formula: y -> y + (x, y) u
            for y in all_vecs.iter() {
                let lhs = map.apply(y);
                let pxy = module.eval_pair(x, y)?;
                let rhs: Vec<RingElement> = y
                    .iter()
                    .zip(u.iter())
                    .map(|(yi, ui)| yi.add(&pxy.mul(ui)))
                    .collect();
                if lhs != rhs {
                    euler_ok = false;
                }
            }
        }
    }
    // biadditivity: E_{u, x+x'} = E_{u,x} E_{u,x'} and in u likewise
    'outer: for u in qperp_members.iter().take(6) {
        for x1 in all_vecs.iter().take(8) {
            for x2 in all_vecs.iter().take(8) {
                let e1 = EulerData::new(module.clone(), u.clone(), x1.clone())?.euler_map()?;
                let e2 = EulerData::new(module.clone(), u.clone(), x2.clone())?.euler_map()?;
                let sum: Vec<RingElement> =
                    x1.iter().zip(x2.iter()).map(|(a, b)| a.add(b)).collect();
                let es = EulerData::new(module.clone(), u.clone(), sum)?.euler_map()?;
                if e1.compose(&e2) != es {
                    euler_ok = false;
                    break 'outer;
                }
            }
        }
    }
    report.euler_into_kernel = Some(euler_ok);

    report.pass = report.odecom_kernel_matches.unwrap_or(false)
        && report.kernel_is_additive.unwrap_or(false)
        && report.omperp_kernel_factors.unwrap_or(false)
        && report.euler_into_kernel.unwrap_or(false);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

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

    fn f2_paper_module() -> QuadraticModule {
        // rank 2 over F2: q(x)=1, q(y)=0, (x,y)=1
        let r = zn(2);
        let gram = Matrix::from_rows(
            r.clone(),
            vec![vec![r.zero(), r.one()], vec![r.one(), r.zero()]],
        );
        QuadraticModule::new(r.clone(), vec![r.one(), r.zero()], Some(gram)).unwrap()
    }

    #[test]
    fn identity_and_zero_maps() {
        let m = module(&z(), &[1]);
        let id = OrthogonalMap::identity(m.clone());
        assert!(id.acts_trivially_on_perp().unwrap());
        // q = 0: the zero map is orthogonal but not bijective
        let m0 = module(&z(), &[0, 0]);
        let zero = Matrix::zero(z(), 2, 2);
        let zm = OrthogonalMap::new(m0, zero).unwrap();
        assert!(!zm.is_bijective());
        // -Id over qdiag=(1) is orthogonal
        let neg = Matrix::from_rows(z(), vec![vec![z().from_i64(-1)]]);
        assert!(OrthogonalMap::new(module(&z(), &[1]), neg).is_ok());
    }

    #[test]
    fn f2_reflection_swaps() {
        // r_x swaps y and x+y in the rank-2 binary example
        let m = f2_paper_module();
        let e1 = Idempotent::new(zn(2).one()).unwrap();
        let data = ReflectionData::new(m.clone(), e1, m.vector_from_i64(&[1, 0])).unwrap();
        let r = data.reflection().unwrap();
        let y = m.vector_from_i64(&[0, 1]);
        let xy = m.vector_from_i64(&[1, 1]);
        assert_eq!(r.apply(&y), xy);
        assert_eq!(r.apply(&xy), y);
        assert!(!data.is_trivial().unwrap());
        // candidate reflections at y and x+y are rejected: q not a unit
        let e1 = Idempotent::new(zn(2).one()).unwrap();
        assert!(ReflectionData::new(m.clone(), e1.clone(), y).is_err());
        assert!(ReflectionData::new(m.clone(), e1, xy).is_err());
    }

    #[test]
    fn idempotent_reflection_z6() {
        // Z/6, q1=1, e=4, x=4x1: r(x1) = 5x1, det = 5 = 1-2e
        let r6 = zn(6);
        let m = module(&r6, &[1]);
        let e = Idempotent::new(r6.from_i64(4)).unwrap();
        let data = ReflectionData::new(m.clone(), e.clone(), m.vector_from_i64(&[4])).unwrap();
        let map = data.reflection().unwrap();
        assert_eq!(map.apply(&m.basis_vector(0)), m.vector_from_i64(&[5]));
        assert_eq!(map.det(), e.to_mu2());
        // r_x(x) = -x and r_x^2 = Id
        let x = m.vector_from_i64(&[4]);
        assert_eq!(map.apply(&x), vec![r6.from_i64(4).neg()]);
        assert!(map.compose(&map).is_identity());
        assert!(map.acts_trivially_on_perp().unwrap());
    }

    #[test]
    fn trivial_reflection_iff_in_perp() {
        // Z/6, q1=1, e=3, x=3x1: trivial and 3x1 in M-perp
        let r6 = zn(6);
        let m = module(&r6, &[1]);
        let e = Idempotent::new(r6.from_i64(3)).unwrap();
        let data = ReflectionData::new(m.clone(), e, m.vector_from_i64(&[3])).unwrap();
        assert!(data.is_trivial().unwrap());
        let kernel = m.kernel_perp().unwrap();
        assert!(linalg::in_span(&r6, &kernel.perp, &m.vector_from_i64(&[3])).unwrap());
        // exhaustive: triviality iff membership, over Z/6 rank 1
        for e in r6.idempotents().unwrap() {
            for x in m.all_vectors().unwrap() {
                if let Ok(d) = ReflectionData::new(m.clone(), e.clone(), x.clone()) {
                    let trivial = d.is_trivial().unwrap();
                    let inperp = linalg::in_span(&r6, &kernel.perp, &x).unwrap();
                    assert_eq!(trivial, inperp, "e={} x={:?}", e.element(), x);
                }
            }
        }
    }

    #[test]
    fn euler_examples() {
        // Z, qdiag=(0,1), u=x1, x=x2: matrix [[1,2],[0,1]], det 1
        let m = module(&z(), &[0, 1]);
        let data = EulerData::new(
            m.clone(),
            m.vector_from_i64(&[1, 0]),
            m.vector_from_i64(&[0, 1]),
        )
        .unwrap();
        let map = data.euler_map().unwrap();
        assert_eq!(map.apply(&m.basis_vector(1)), m.vector_from_i64(&[2, 1]));
        assert_eq!(map.apply(&m.basis_vector(0)), m.basis_vector(0));
        assert_eq!(map.det(), z().one());
        // inverse is E_{u,-x}
        let inv = data.inverse_data().euler_map().unwrap();
        assert!(map.compose(&inv).is_identity());
        // E_{au,x} = E_{u,ax}
        let a = 2i64;
        let d1 = EulerData::new(
            m.clone(),
            m.vector_from_i64(&[a, 0]),
            m.vector_from_i64(&[0, 1]),
        )
        .unwrap();
        let d2 = EulerData::new(
            m.clone(),
            m.vector_from_i64(&[1, 0]),
            m.vector_from_i64(&[0, a]),
        )
        .unwrap();
        assert_eq!(d1.euler_map().unwrap(), d2.euler_map().unwrap());
        // u = 0 gives the identity
        let d0 = EulerData::new(m.clone(), m.zero_vector(), m.basis_vector(1)).unwrap();
        assert!(d0.euler_map().unwrap().is_identity());
    }

    #[test]
    fn euler_composition_law() {
        // E_{u,x} E_{u,z} = E_{u,x+z} over Z qdiag=(0,0,1)
        let m = module(&z(), &[0, 0, 1]);
        let u = m.vector_from_i64(&[1, 2, 0]);
        let x = m.vector_from_i64(&[0, 1, 3]);
        let zv = m.vector_from_i64(&[2, 0, -1]);
        let ex = EulerData::new(m.clone(), u.clone(), x.clone()).unwrap().euler_map().unwrap();
        let ez = EulerData::new(m.clone(), u.clone(), zv.clone()).unwrap().euler_map().unwrap();
        let sum: Vec<RingElement> = x.iter().zip(zv.iter()).map(|(a, b)| a.add(b)).collect();
        let es = EulerData::new(m.clone(), u, sum).unwrap().euler_map().unwrap();
        assert_eq!(ex.compose(&ez), es);
    }

    #[test]
    fn transvection_determinant() {
        // z = t = x1, qdiag=(1) over Z: det = 1 + (x1,x1) = 3
        let m = module(&z(), &[1]);
        let x = m.basis_vector(0);
        let (mat, det) = transvection(&m, &x, &x).unwrap();
        assert_eq!(det, z().from_i64(3));
        assert_eq!(mat.det(), det);
        // z = 0 gives the identity with det 1
        let (mat, det) = transvection(&m, &m.zero_vector(), &x).unwrap();
        assert!(mat.is_identity());
        assert_eq!(det, z().one());
        // t in M-perp gives det 1
        let m2 = module(&z(), &[0, 1]);
        let (mat, det) =
            transvection(&m2, &m2.vector_from_i64(&[3, 2]), &m2.basis_vector(0)).unwrap();
        assert_eq!(det, z().one());
        assert_eq!(mat.det(), z().one());
    }

    #[test]
    fn enumerate_small_orthogonal_groups() {
        // F3, qdiag=(1): O = {+-Id}
        let m = module(&zn(3), &[1]);
        let all = enumerate_orthogonal(&m, EnumRestrict::All, 1000).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|e| e.bijective));
        // q=0 over F2 rank 1: both maps, zero is non-bijective
        let m0 = module(&zn(2), &[0]);
        let all = enumerate_orthogonal(&m0, EnumRestrict::All, 1000).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all.iter().filter(|e| !e.bijective).count(), 1);
        // the F2 paper example contains r_x and Id
        let m = f2_paper_module();
        let all = enumerate_orthogonal(&m, EnumRestrict::All, 100_000).unwrap();
        let e1 = Idempotent::new(zn(2).one()).unwrap();
        let rx = ReflectionData::new(m.clone(), e1, m.vector_from_i64(&[1, 0]))
            .unwrap()
            .reflection()
            .unwrap();
        let keys: Vec<String> = all.iter().map(|e| e.map.key()).collect();
        assert!(keys.contains(&rx.key()));
        assert!(keys.contains(&OrthogonalMap::identity(m.clone()).key()));
    }

    #[test]
    fn reflection_relations() {
        // r_{eps x} r_{veps x} = r_{(eps xor veps) x} over Z/15, qdiag=(1)
        let r15 = zn(15);
        let m = module(&r15, &[1]);
        let x = m.basis_vector(0);
        let idems = r15.idempotents().unwrap();
        for e in &idems {
            for f in &idems {
                let dx = ReflectionData::new(
                    m.clone(),
                    e.clone(),
                    x.iter().map(|c| c.mul(e.element())).collect(),
                );
                let dy = ReflectionData::new(
                    m.clone(),
                    f.clone(),
                    x.iter().map(|c| c.mul(f.element())).collect(),
                );
                let (dx, dy) = match (dx, dy) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => continue,
                };
                let combined = e.xor(f);
                let dc = ReflectionData::new(
                    m.clone(),
                    combined.clone(),
                    x.iter().map(|c| c.mul(combined.element())).collect(),
                )
                .unwrap();
                assert_eq!(
                    dx.reflection().unwrap().compose(&dy.reflection().unwrap()),
                    dc.reflection().unwrap()
                );
            }
        }
        // orthogonal idempotents: r_x r_y = r_{x+y} with e=6, eps=10 (6*10=60=0)
        let e6 = Idempotent::new(r15.from_i64(6)).unwrap();
        let e10 = Idempotent::new(r15.from_i64(10)).unwrap();
        let dx = ReflectionData::new(m.clone(), e6, m.vector_from_i64(&[6])).unwrap();
        let dy = ReflectionData::new(m.clone(), e10, m.vector_from_i64(&[10])).unwrap();
        let e1 = Idempotent::new(r15.from_i64(1)).unwrap();
        let dsum = ReflectionData::new(m.clone(), e1, m.vector_from_i64(&[16 % 15])).unwrap();
        assert_eq!(
            dx.reflection().unwrap().compose(&dy.reflection().unwrap()),
            dsum.reflection().unwrap()
        );
    }

    #[test]
    fn mref_factorization() {
        // r_x r_{x - q(x) u} = E_{u,x} for u in M-perp with e q(u) = 0
        let m = module(&z(), &[0, 1]);
        let u = m.vector_from_i64(&[1, 0]); // in M-perp, q(u) = 0
        let x = m.vector_from_i64(&[0, 1]); // q(x) = 1 a unit, e = 1
        let e1 = Idempotent::new(z().one()).unwrap();
        let rx = ReflectionData::new(m.clone(), e1.clone(), x.clone()).unwrap();
        let qx = m.eval_q(&x).unwrap();
        let shifted: Vec<RingElement> =
            x.iter().zip(u.iter()).map(|(xi, ui)| xi.sub(&qx.mul(ui))).collect();
        let rs = ReflectionData::new(m.clone(), e1, shifted).unwrap();
        let euler = EulerData::new(m.clone(), u, x).unwrap().euler_map().unwrap();
        assert_eq!(
            rx.reflection().unwrap().compose(&rs.reflection().unwrap()),
            euler
        );
    }

    #[test]
    fn conjugated_reflection() {
        // r_{phi(x)} = phi r_x phi^{-1} over F3 qdiag=(1,0)
        let m = module(&zn(3), &[1, 0]);
        let maps = enumerate_group_o_perp(&m, 100_000).unwrap();
        let e1 = Idempotent::new(zn(3).one()).unwrap();
        let x = m.vector_from_i64(&[1, 0]);
        let rx = ReflectionData::new(m.clone(), e1.clone(), x.clone())
            .unwrap()
            .reflection()
            .unwrap();
        for phi in &maps {
            let img = phi.apply(&x);
            let r_img = ReflectionData::new(m.clone(), e1.clone(), img)
                .unwrap()
                .reflection()
                .unwrap();
            let conj = phi.compose(&rx).compose(&phi.try_inverse().unwrap());
            assert_eq!(r_img, conj);
        }
    }

    #[test]
    fn allmq_search_empty_on_defaults() {
        for (ring, qdiag) in [(zn(2), vec![0i64]), (zn(3), vec![1, 0]), (zn(4), vec![2])] {
            let m = module(&ring, &qdiag);
            let rep = conjecture_allmq_search(&m, 1_000_000).unwrap();
            assert!(rep.counterexamples.is_empty(), "{:?}", rep);
        }
        let rep = conjecture_allmq_search(&f2_paper_module(), 1_000_000).unwrap();
        assert!(rep.counterexamples.is_empty());
    }

    #[test]
    fn sequence_checks_f3() {
        let m = module(&zn(3), &[1, 0]);
        let rep = sequence_checks(&m, 1_000_000).unwrap();
        assert!(rep.split_available);
        assert!(rep.pass, "{:?}", rep);
        // trivial kernel case
        let m = module(&zn(3), &[1, 1]);
        let rep = sequence_checks(&m, 1_000_000).unwrap();
        assert!(rep.pass, "{:?}", rep);
    }

    #[test]
    fn orthogonal_kernels_inside_qperp() {
        for (ring, qdiag) in [(zn(2), vec![1i64, 0]), (zn(3), vec![1, 0])] {
            let m = module(&ring, &qdiag);
            assert!(kernel_inside_qperp(&m, 1_000_000).unwrap());
        }
    }
}

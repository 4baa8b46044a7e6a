//! The Clifford group and the paravector Clifford group of C(M, q): the
//! twisted-conjugation actions on M and on R + M, membership certificates,
//! the explicit lifts of reflections and Euler transformations, norms,
//! homogeneity degrees, and the desk-scale verification of the two short
//! exact sequences.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::clifford::{CliffordAlgebra, CliffordElement, Mask};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::orthogonal::{
    self, EulerData, OrthogonalMap, ReflectionData,
};
use crate::quadratic::ParavectorModule;
use crate::ring::{Idempotent, RingElement};
use crate::subalgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GroupFlavor {
    Clifford,
    Paravector,
}

/// Why an element fails to belong to the group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MembershipFailure {
    NotInvertible,
    /// alpha xi alpha'^{-1} escapes the module at the witness with this index.
    ForwardEscapes(usize),
    /// alpha^{-1} xi alpha' escapes the module at the witness with this index.
    BackwardEscapes(usize),
}

#[derive(Clone, Debug)]
pub enum MembershipVerdict {
    Member(Box<GroupElement>),
    Rejected(MembershipFailure),
}

/// A certified member of the Clifford or paravector Clifford group.
#[derive(Clone, Debug)]
pub struct GroupElement {
    elem: CliffordElement,
    inverse: CliffordElement,
    flavor: GroupFlavor,
    /// Action on M (Clifford flavor) or on R + M (paravector flavor).
    action: OrthogonalMap,
    norm: CliffordElement,
}

impl GroupElement {
    pub fn element(&self) -> &CliffordElement {
        &self.elem
    }
    pub fn inverse(&self) -> &CliffordElement {
        &self.inverse
    }
    pub fn flavor(&self) -> GroupFlavor {
        self.flavor
    }
    pub fn action(&self) -> &OrthogonalMap {
        &self.action
    }
    pub fn norm(&self) -> &CliffordElement {
        &self.norm
    }
}

/// Twisted conjugation alpha xi alpha'^{-1}.
fn twisted_conjugate(
    alpha: &CliffordElement,
    inv: &CliffordElement,
    xi: &CliffordElement,
) -> CliffordElement {
    alpha.mul(xi).mul(&inv.grade_involution())
}

/// Decide membership in the Clifford group: both containments are checked
/// on basis vectors, and the resulting action must be an isometry trivial
/// on M-perp.
pub fn clifford_membership(alpha: &CliffordElement) -> Result<MembershipVerdict> {
    let algebra = alpha.algebra().clone();
    let module = algebra.module().clone();
    let inv = match alpha.invert()? {
        Some(i) => i,
        None => return Ok(MembershipVerdict::Rejected(MembershipFailure::NotInvertible)),
    };
    let n = algebra.rank();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let fwd = twisted_conjugate(alpha, &inv, &algebra.generator(i));
        match fwd.as_vector() {
            Some(v) => cols.push(v),
            None => {
                return Ok(MembershipVerdict::Rejected(MembershipFailure::ForwardEscapes(i)))
            }
        }
    }
    for i in 0..n {
        let bwd = inv.mul(&algebra.generator(i)).mul(&alpha.grade_involution());
        if bwd.as_vector().is_none() {
            return Ok(MembershipVerdict::Rejected(MembershipFailure::BackwardEscapes(i)));
        }
    }
    let matrix = Matrix::from_cols(algebra.ring().clone(), cols);
    let action = OrthogonalMap::new(module, matrix)?;
    if !action.acts_trivially_on_perp()? {
        return Err(Error::Certificate(
            "twisted conjugation failed to fix the kernel".into(),
        ));
    }
    let norm = alpha.norm();
    Ok(MembershipVerdict::Member(Box::new(GroupElement {
        elem: alpha.clone(),
        inverse: inv,
        flavor: GroupFlavor::Clifford,
        action,
        norm,
    })))
}

/// Decide membership in the paravector Clifford group: containments on the
/// basis (1, x_1, ..., x_n) of R + M, action on the extended module.
pub fn paravector_membership(alpha: &CliffordElement) -> Result<MembershipVerdict> {
    let algebra = alpha.algebra().clone();
    let para = algebra.module().paravector_extension();
    let inv = match alpha.invert()? {
        Some(i) => i,
        None => return Ok(MembershipVerdict::Rejected(MembershipFailure::NotInvertible)),
    };
    let n = algebra.rank();
    let witnesses: Vec<CliffordElement> = std::iter::once(algebra.one())
        .chain((0..n).map(|i| algebra.generator(i)))
        .collect();
    let mut cols = Vec::with_capacity(n + 1);
    for (w, xi) in witnesses.iter().enumerate() {
        let fwd = twisted_conjugate(alpha, &inv, xi);
        match fwd.as_paravector() {
            Some((a, v)) => {
                let mut col = vec![a];
                col.extend(v);
                cols.push(col);
            }
            None => {
                return Ok(MembershipVerdict::Rejected(MembershipFailure::ForwardEscapes(w)))
            }
        }
    }
    for (w, xi) in witnesses.iter().enumerate() {
        let bwd = inv.mul(xi).mul(&alpha.grade_involution());
        if bwd.as_paravector().is_none() {
            return Ok(MembershipVerdict::Rejected(MembershipFailure::BackwardEscapes(w)));
        }
    }
    let matrix = Matrix::from_cols(algebra.ring().clone(), cols);
    let action = OrthogonalMap::new(para.module().clone(), matrix)?;
    if !action.acts_trivially_on_perp()? {
        return Err(Error::Certificate(
            "paravector action failed to fix the kernel".into(),
        ));
    }
    let norm = alpha.norm();
    Ok(MembershipVerdict::Member(Box::new(GroupElement {
        elem: alpha.clone(),
        inverse: inv,
        flavor: GroupFlavor::Paravector,
        action,
        norm,
    })))
}

pub fn membership(alpha: &CliffordElement, flavor: GroupFlavor) -> Result<MembershipVerdict> {
    match flavor {
        GroupFlavor::Clifford => clifford_membership(alpha),
        GroupFlavor::Paravector => paravector_membership(alpha),
    }
}

pub fn in_clifford_group(alpha: &CliffordElement) -> Result<Option<GroupElement>> {
    Ok(match clifford_membership(alpha)? {
        MembershipVerdict::Member(g) => Some(*g),
        MembershipVerdict::Rejected(_) => None,
    })
}

pub fn in_paravector_group(alpha: &CliffordElement) -> Result<Option<GroupElement>> {
    Ok(match paravector_membership(alpha)? {
        MembershipVerdict::Member(g) => Some(*g),
        MembershipVerdict::Rejected(_) => None,
    })
}

/// Lift of an e-reflection: alpha = (1 - e) + x, with inverse
/// ((1 - e) - t) alpha' where t inverts q(x) inside eR.
pub fn lift_reflection(
    algebra: &CliffordAlgebra,
    data: &ReflectionData,
) -> Result<GroupElement> {
    assert_eq!(algebra.module(), data.module(), "module mismatch");
    let ring = algebra.ring().clone();
    let e = data.idempotent().element();
    let one_minus_e = ring.one().sub(e);
    let alpha = algebra
        .scalar(one_minus_e.clone())
        .add(&algebra.from_vector(data.vector()));
    let scale = one_minus_e.sub(data.q_inverse());
    let inverse = alpha.grade_involution().scale(&scale);
    if alpha.mul(&inverse) != algebra.one() || inverse.mul(&alpha) != algebra.one() {
        return Err(Error::Certificate("reflection lift inverse failed".into()));
    }
    let g = match clifford_membership(&alpha)? {
        MembershipVerdict::Member(g) => *g,
        MembershipVerdict::Rejected(f) => {
            return Err(Error::Certificate(format!(
                "reflection lift rejected: {:?}",
                f
            )))
        }
    };
    let expected = data.reflection()?;
    if g.action() != &expected {
        return Err(Error::Certificate(
            "reflection lift maps to the wrong isometry".into(),
        ));
    }
    Ok(g)
}

/// Lift of an Euler transformation: beta = 1 - x u, inverse 1 - u x.
pub fn lift_euler(algebra: &CliffordAlgebra, data: &EulerData) -> Result<GroupElement> {
    assert_eq!(algebra.module(), data.module(), "module mismatch");
    let xe = algebra.from_vector(data.x());
    let ue = algebra.from_vector(data.u());
    let beta = algebra.one().sub(&xe.mul(&ue));
    let inverse = algebra.one().sub(&ue.mul(&xe));
    if beta.mul(&inverse) != algebra.one() || inverse.mul(&beta) != algebra.one() {
        return Err(Error::Certificate("Euler lift inverse failed".into()));
    }
    if beta.odd_part() != algebra.zero() {
        return Err(Error::Certificate("Euler lift must be even".into()));
    }
    let g = match clifford_membership(&beta)? {
        MembershipVerdict::Member(g) => *g,
        MembershipVerdict::Rejected(f) => {
            return Err(Error::Certificate(format!("Euler lift rejected: {:?}", f)))
        }
    };
    let expected = data.euler_map()?;
    if g.action() != &expected {
        return Err(Error::Certificate("Euler lift maps to the wrong isometry".into()));
    }
    Ok(g)
}

/// Paravector coordinates (a, x) -> the element a + x of C.
fn paravector_elem(algebra: &CliffordAlgebra, coords: &[RingElement]) -> CliffordElement {
    algebra.from_paravector(&coords[0], &coords[1..])
}

/// Lift of a paravector Euler transformation: beta = 1 + xi ups', with
/// inverse 1 + ups xi'.
pub fn lift_paravector_euler(
    algebra: &CliffordAlgebra,
    data: &EulerData,
) -> Result<GroupElement> {
    let para = algebra.module().paravector_extension();
    assert_eq!(para.module(), data.module(), "paravector module mismatch");
    let ups = paravector_elem(algebra, data.u());
    let xi = paravector_elem(algebra, data.x());
    let beta = algebra.one().add(&xi.mul(&ups.grade_involution()));
    let inverse = algebra.one().add(&ups.mul(&xi.grade_involution()));
    if beta.mul(&inverse) != algebra.one() || inverse.mul(&beta) != algebra.one() {
        return Err(Error::Certificate("paravector Euler lift inverse failed".into()));
    }
    let g = match paravector_membership(&beta)? {
        MembershipVerdict::Member(g) => *g,
        MembershipVerdict::Rejected(f) => {
            return Err(Error::Certificate(format!(
                "paravector Euler lift rejected: {:?}",
                f
            )))
        }
    };
    let expected = data.euler_map()?;
    if g.action() != &expected {
        return Err(Error::Certificate(
            "paravector Euler lift maps to the wrong isometry".into(),
        ));
    }
    Ok(g)
}

/// Lift over r_xi . r_e for an admissible paravector xi in e(R + M):
/// alpha = (1 - e) + xi, inverse ((1 - e) - t) alpha' with t the inverse of
/// q_R(xi) in eR.
pub fn lift_paravector_reflection(
    algebra: &CliffordAlgebra,
    data: &ReflectionData,
) -> Result<GroupElement> {
    let para = algebra.module().paravector_extension();
    assert_eq!(para.module(), data.module(), "paravector module mismatch");
    let ring = algebra.ring().clone();
    let e = data.idempotent().element();
    let one_minus_e = ring.one().sub(e);
    let xi = paravector_elem(algebra, data.vector());
    let alpha = algebra.scalar(one_minus_e.clone()).add(&xi);
    let scale = one_minus_e.sub(data.q_inverse());
    let inverse = alpha.grade_involution().scale(&scale);
    if alpha.mul(&inverse) != algebra.one() || inverse.mul(&alpha) != algebra.one() {
        return Err(Error::Certificate("paravector reflection lift inverse failed".into()));
    }
    let g = match paravector_membership(&alpha)? {
        MembershipVerdict::Member(g) => *g,
        MembershipVerdict::Rejected(f) => {
            return Err(Error::Certificate(format!(
                "paravector reflection lift rejected: {:?}",
                f
            )))
        }
    };
    let r_xi = data.reflection()?;
    let r_e = paravector_re(&para, data.idempotent())?;
    if g.action() != &r_xi.compose(&r_e) {
        return Err(Error::Certificate(
            "paravector reflection lift maps to the wrong isometry".into(),
        ));
    }
    Ok(g)
}

/// The reflection r_e on R + M at the paravector e, acting as
/// eta -> (1 - e) eta - e eta', i.e. the scalar coordinate scales by 1 - 2e.
pub fn paravector_re(para: &ParavectorModule, e: &Idempotent) -> Result<OrthogonalMap> {
    let module = para.module().clone();
    let mut x = module.zero_vector();
    x[0] = e.element().clone();
    let data = ReflectionData::new(module, e.clone(), x)?;
    data.reflection()
}

#[derive(Clone, Debug, Serialize)]
pub struct InvolutionReport {
    pub all_images_are_members: bool,
    pub grade_image_matches: bool,
    pub transpose_inverts: bool,
    pub conjugate_inverts: bool,
    pub norm_in_twisted_center_units: bool,
    /// Paravector flavor only: 2 N(alpha)_- = 0.
    pub norm_odd_two_torsion: Option<bool>,
    pub pass: bool,
}

/// Check the involution behaviour of a member: how ', *, and conjugation
/// interact with the action, and where the norm lives.
pub fn involution_action(g: &GroupElement) -> Result<InvolutionReport> {
    let alpha = g.element();
    let algebra = alpha.algebra().clone();
    let flavor = g.flavor();
    let imgs = [
        alpha.grade_involution(),
        alpha.transpose(),
        alpha.clifford_involution(),
    ];
    let mut members = Vec::new();
    let mut all_ok = true;
    for img in &imgs {
        match membership(img, flavor)? {
            MembershipVerdict::Member(m) => members.push(*m),
            MembershipVerdict::Rejected(_) => {
                all_ok = false;
            }
        }
    }
    let mut grade_ok = false;
    let mut transpose_ok = false;
    let mut conj_ok = false;
    if all_ok {
        let act = g.action();
        let inv_act = act
            .try_inverse()
            .ok_or_else(|| Error::Certificate("action not invertible".into()))?;
        match flavor {
            GroupFlavor::Clifford => {
                grade_ok = members[0].action() == act;
                transpose_ok = members[1].action() == &inv_act;
                conj_ok = members[2].action() == &inv_act;
            }
            GroupFlavor::Paravector => {
                // conjugation by r_1 on the scalar coordinate
                let para = algebra.module().paravector_extension();
                let e1 = Idempotent::new(algebra.ring().one())?;
                let r1 = paravector_re(&para, &e1)?;
                let conj_by_r1 = |m: &OrthogonalMap| r1.compose(m).compose(&r1);
                grade_ok = members[0].action() == &conj_by_r1(act);
                conj_ok = members[2].action() == &inv_act;
                transpose_ok = members[1].action() == &conj_by_r1(&inv_act);
            }
        }
    }
    // N(alpha) must be a unit of the twisted center
    let ztilde = subalgebra::twisted_center(&algebra)?;
    let norm_in = ztilde.contains(g.norm())? && g.norm().is_unit();
    let norm_odd = match flavor {
        GroupFlavor::Paravector => Some(g.norm().odd_part().scale(&algebra.ring().from_i64(2)).is_zero()),
        GroupFlavor::Clifford => None,
    };
    let pass = all_ok
        && grade_ok
        && transpose_ok
        && conj_ok
        && norm_in
        && norm_odd.unwrap_or(true);
    Ok(InvolutionReport {
        all_images_are_members: all_ok,
        grade_image_matches: grade_ok,
        transpose_inverts: transpose_ok,
        conjugate_inverts: conj_ok,
        norm_in_twisted_center_units: norm_in,
        norm_odd_two_torsion: norm_odd,
        pass,
    })
}

/// All idempotents e with alpha in (1-e) C_+ + e C_-; the list is empty
/// when alpha is not homogeneous, and can have several witnesses when the
/// ring has 2-torsion.
pub fn homogeneity_witnesses(alpha: &CliffordElement) -> Result<Vec<Idempotent>> {
    let algebra = alpha.algebra();
    let mut out = Vec::new();
    for e in algebra.ring().idempotents()? {
        let ee = e.element();
        let complement = algebra.ring().one().sub(ee);
        let even_ok = alpha
            .coeffs()
            .iter()
            .enumerate()
            .all(|(m, c)| (m as Mask).count_ones() % 2 == 0 || complement.mul(c).is_zero());
        let odd_ok = alpha
            .coeffs()
            .iter()
            .enumerate()
            .all(|(m, c)| (m as Mask).count_ones() % 2 == 1 || ee.mul(c).is_zero());
        if even_ok && odd_ok {
            out.push(e);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct EhomReport {
    pub witnesses: Vec<String>,
    pub memberships_agree: bool,
    pub action_decomposes: bool,
    pub pass: bool,
}

/// For a homogeneous invertible element: membership in the two groups
/// coincides, and the paravector action is (1-2e) on the scalar slot plus
/// the Clifford action on M.
pub fn ehom_check(alpha: &CliffordElement) -> Result<EhomReport> {
    let algebra = alpha.algebra().clone();
    let witnesses = homogeneity_witnesses(alpha)?;
    if witnesses.is_empty() {
        return Err(Error::Certificate("element is not homogeneous".into()));
    }
    let cliff = in_clifford_group(alpha)?;
    let para = in_paravector_group(alpha)?;
    let memberships_agree = cliff.is_some() == para.is_some();
    let mut action_decomposes = true;
    if let (Some(c), Some(p)) = (&cliff, &para) {
        let ring = algebra.ring().clone();
        let n = algebra.rank();
        let mut found = false;
        for e in &witnesses {
            let mut expected = Matrix::zero(ring.clone(), n + 1, n + 1);
            *expected.at_mut(0, 0) = e.to_mu2();
            for i in 0..n {
                for j in 0..n {
                    *expected.at_mut(i + 1, j + 1) = c.action().matrix().at(i, j).clone();
                }
            }
            if p.action().matrix() == &expected {
                found = true;
            }
        }
        action_decomposes = found;
    }
    Ok(EhomReport {
        witnesses: witnesses.iter().map(|e| e.element().to_string()).collect(),
        memberships_agree,
        action_decomposes,
        pass: memberships_agree && action_decomposes,
    })
}

/// All members of the chosen group over a finite ring.
pub fn enumerate_group(
    algebra: &CliffordAlgebra,
    flavor: GroupFlavor,
    budget: usize,
) -> Result<Vec<GroupElement>> {
    let ring = algebra.ring();
    let size = ring
        .size()
        .ok_or_else(|| Error::NotComputable("group enumeration needs a finite ring".into()))?;
    let total = size.pow(algebra.dim() as u32);
    if total > num_bigint::BigUint::from(budget) {
        return Err(Error::BudgetExceeded(format!(
            "{} algebra elements exceed the budget {}",
            total, budget
        )));
    }
    let mut out = Vec::new();
    for alpha in algebra.all_elements()? {
        if let MembershipVerdict::Member(g) = membership(&alpha, flavor)? {
            out.push(*g);
        }
    }
    Ok(out)
}

/// Keep the members whose norm is a unit scalar; these form the
/// Vahlen-type subgroup.  Closure under products is re-verified.
pub fn vahlen_filter(members: &[GroupElement]) -> Result<(Vec<GroupElement>, bool)> {
    let mut kept = Vec::new();
    for g in members {
        if g.norm().is_scalar() && g.norm().scalar_part().is_unit() {
            kept.push(g.clone());
        }
    }
    let mut closed = true;
    let keys: BTreeSet<String> = kept.iter().map(|g| elem_key(g.element())).collect();
    for a in &kept {
        for b in &kept {
            let prod = a.element().mul(b.element());
            let nn = prod.norm();
            if !(nn.is_scalar() && nn.scalar_part().is_unit()) || !keys.contains(&elem_key(&prod))
            {
                closed = false;
            }
        }
    }
    Ok((kept, closed))
}

fn elem_key(e: &CliffordElement) -> String {
    e.coeffs()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Clone, Debug, Serialize)]
pub struct SesGammaReport {
    pub instance: String,
    pub hypotheses_hold: bool,
    pub skipped_reason: Option<String>,
    pub members: usize,
    pub kernel_size: usize,
    pub kernel_matches_exterior_units: Option<bool>,
    pub kernel_scalar_parts_are_units: Option<bool>,
    pub image_equals_generated: Option<bool>,
    pub image_equals_o_perp: Option<bool>,
    pub involutions_pass: Option<bool>,
    pub pass: bool,
}

/// Exhaustive verification of the Clifford-group short exact sequence over
/// a finite ring: the kernel of the action is the unit group of the
/// exterior algebra of M-perp, and the image is the full group generated by
/// reflections and Euler transformations, compared against the enumerated
/// isometries trivial on M-perp.
pub fn verify_sesgamma(algebra: &CliffordAlgebra, budget: usize) -> Result<SesGammaReport> {
    let module = algebra.module().clone();
    let ring = algebra.ring().clone();
    let mut report = SesGammaReport {
        instance: module.to_string(),
        hypotheses_hold: false,
        skipped_reason: None,
        members: 0,
        kernel_size: 0,
        kernel_matches_exterior_units: None,
        kernel_scalar_parts_are_units: None,
        image_equals_generated: None,
        image_equals_o_perp: None,
        involutions_pass: None,
        pass: false,
    };
    // hypothesis pattern: orthogonal basis over R itself, 2 and nonzero q_i
    // non-zero-divisors
    if module.is_orthogonal_basis() {
        let mut ok = subalgebra::is_non_zero_divisor(&ring.from_i64(2))?;
        for q in module.qdiag() {
            if !q.is_zero() && !subalgebra::is_non_zero_divisor(q)? {
                ok = false;
            }
        }
        report.hypotheses_hold = ok;
        if !ok {
            report.skipped_reason = Some("2 or a nonzero q-value is a zero-divisor".into());
        }
    } else {
        report.skipped_reason = Some("non-orthogonal basis is not certified here".into());
    }

    let members = enumerate_group(algebra, GroupFlavor::Clifford, budget)?;
    report.members = members.len();

    // kernel of the action
    let kernel: Vec<&GroupElement> =
        members.iter().filter(|g| g.action().is_identity()).collect();
    report.kernel_size = kernel.len();
    let kernel_keys: BTreeSet<String> =
        kernel.iter().map(|g| elem_key(g.element())).collect();

    // expected kernel: invertible elements of the exterior algebra of M-perp
    let wedge = subalgebra::exterior_perp_image(algebra, false)?;
    let gen_vecs: Vec<Vec<RingElement>> =
        wedge.generators().iter().map(|g| g.coeffs().to_vec()).collect();
    let mut expected_keys = BTreeSet::new();
    let mut scalar_units = true;
    for combo in span_elements_of(algebra, &gen_vecs, budget)? {
        if combo.is_unit() {
            if !combo.scalar_part().is_unit() {
                scalar_units = false;
            }
            expected_keys.insert(elem_key(&combo));
        }
    }
    report.kernel_matches_exterior_units = Some(kernel_keys == expected_keys);
    report.kernel_scalar_parts_are_units = Some(scalar_units);

    // image of the action vs generated subgroup vs enumerated group
    let image_keys: BTreeSet<String> = members.iter().map(|g| g.action().key()).collect();
    let mut gens: Vec<OrthogonalMap> = Vec::new();
    for (_, map) in orthogonal::all_reflections(&module)? {
        gens.push(map);
    }
    for (_, map) in orthogonal::all_euler_maps(&module)? {
        gens.push(map);
    }
    let generated = orthogonal::generate_subgroup(&gens, budget)?;
    let generated_keys: BTreeSet<String> = generated.iter().map(|m| m.key()).collect();
    let operp = orthogonal::enumerate_group_o_perp(&module, budget)?;
    let operp_keys: BTreeSet<String> = operp.iter().map(|m| m.key()).collect();
    report.image_equals_generated = Some(image_keys == generated_keys);
    report.image_equals_o_perp = Some(image_keys == operp_keys);

    // involution behaviour on every member
    let mut inv_ok = true;
    for g in &members {
        if !involution_action(g)?.pass {
            inv_ok = false;
        }
    }
    report.involutions_pass = Some(inv_ok);

    report.pass = report.hypotheses_hold
        && report.kernel_matches_exterior_units.unwrap_or(false)
        && report.kernel_scalar_parts_are_units.unwrap_or(false)
        && report.image_equals_generated.unwrap_or(false)
        && report.image_equals_o_perp.unwrap_or(false)
        && inv_ok;
    Ok(report)
}

/// All R-combinations of the given coefficient vectors, as elements.
fn span_elements_of(
    algebra: &CliffordAlgebra,
    gens: &[Vec<RingElement>],
    budget: usize,
) -> Result<Vec<CliffordElement>> {
    let ring = algebra.ring().clone();
    let elems = ring.elements()?;
    let total = elems
        .len()
        .checked_pow(gens.len() as u32)
        .ok_or_else(|| Error::BudgetExceeded("span enumeration overflow".into()))?;
    if total > budget {
        return Err(Error::BudgetExceeded("span enumeration exceeds budget".into()));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut idx = vec![0usize; gens.len()];
    loop {
        let mut acc = algebra.zero();
        for (g, vec) in gens.iter().enumerate() {
            let c = &elems[idx[g]];
            let term = algebra.from_coeffs(vec.clone()).scale(c);
            acc = acc.add(&term);
        }
        if seen.insert(elem_key(&acc)) {
            out.push(acc);
        }
        if gens.is_empty() {
            return Ok(out);
        }
        let mut p = 0;
        loop {
            if p == gens.len() {
                return Ok(out);
            }
            idx[p] += 1;
            if idx[p] < elems.len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NotsurjReport {
    pub idempotent: String,
    pub hypotheses_hold: bool,
    pub in_image: bool,
    /// The claim holds when the hypotheses hold and r_e has no preimage.
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SesParaReport {
    pub instance: String,
    pub hypotheses_hold: bool,
    pub skipped_reason: Option<String>,
    pub members: usize,
    pub kernel_size: usize,
    pub kernel_matches_twisted_two_torsion: Option<bool>,
    pub kernel_matches_even_exterior_units: Option<bool>,
    pub det_well_defined: Option<bool>,
    pub image_equals_so: Option<bool>,
    pub notsurj: Vec<NotsurjReport>,
    pub involutions_pass: Option<bool>,
    pub pass: bool,
}

/// Exhaustive verification of the paravector short exact sequence: the
/// kernel of the paravector action, the determinant on the isometry group
/// of R + M, the image being the special subgroup, and the absence of
/// preimages for the scalar reflections r_e.
pub fn verify_sespara(algebra: &CliffordAlgebra, budget: usize) -> Result<SesParaReport> {
    let module = algebra.module().clone();
    let ring = algebra.ring().clone();
    let para = module.paravector_extension();
    let mut report = SesParaReport {
        instance: module.to_string(),
        hypotheses_hold: false,
        skipped_reason: None,
        members: 0,
        kernel_size: 0,
        kernel_matches_twisted_two_torsion: None,
        kernel_matches_even_exterior_units: None,
        det_well_defined: None,
        image_equals_so: None,
        notsurj: Vec::new(),
        involutions_pass: None,
        pass: false,
    };
    if module.is_orthogonal_basis() {
        let mut ok = subalgebra::is_non_zero_divisor(&ring.from_i64(2))?;
        for q in module.qdiag() {
            if !q.is_zero() && !subalgebra::is_non_zero_divisor(q)? {
                ok = false;
            }
        }
        report.hypotheses_hold = ok;
        if !ok {
            report.skipped_reason = Some("2 or a nonzero q-value is a zero-divisor".into());
        }
    } else {
        report.skipped_reason = Some("non-orthogonal basis is not certified here".into());
    }

    let members = enumerate_group(algebra, GroupFlavor::Paravector, budget)?;
    report.members = members.len();

    let kernel: Vec<&GroupElement> =
        members.iter().filter(|g| g.action().is_identity()).collect();
    report.kernel_size = kernel.len();
    let kernel_keys: BTreeSet<String> =
        kernel.iter().map(|g| elem_key(g.element())).collect();

    // expected kernel: alpha in Z~(C)^x with 2 alpha_- = 0
    let ztilde = subalgebra::twisted_center(algebra)?;
    let zt_vecs: Vec<Vec<RingElement>> =
        ztilde.generators().iter().map(|g| g.coeffs().to_vec()).collect();
    let two = ring.from_i64(2);
    let mut expected_keys = BTreeSet::new();
    for combo in span_elements_of(algebra, &zt_vecs, budget)? {
        if combo.odd_part().scale(&two).is_zero() && combo.is_unit() {
            expected_keys.insert(elem_key(&combo));
        }
    }
    report.kernel_matches_twisted_two_torsion = Some(kernel_keys == expected_keys);

    // under the hypotheses 2 is regular, so the kernel is also the unit
    // group of the even exterior algebra of M-perp
    if report.hypotheses_hold {
        let wedge_even = subalgebra::exterior_perp_image(algebra, true)?;
        let we_vecs: Vec<Vec<RingElement>> =
            wedge_even.generators().iter().map(|g| g.coeffs().to_vec()).collect();
        let mut even_keys = BTreeSet::new();
        for combo in span_elements_of(algebra, &we_vecs, budget)? {
            if combo.is_unit() {
                even_keys.insert(elem_key(&combo));
            }
        }
        report.kernel_matches_even_exterior_units = Some(kernel_keys == even_keys);
    }

    // determinant consistency: generated words vs matrix determinants
    let pmod = para.module().clone();
    let (det_ok, _, _) = orthogonal::det_word_consistency(&pmod, budget)?;
    report.det_well_defined = Some(det_ok);

    // image of the action = special subgroup of the enumerated isometries
    let operp = orthogonal::enumerate_group_o_perp(&pmod, budget)?;
    let so_keys: BTreeSet<String> = operp
        .iter()
        .filter(|m| m.det().is_one())
        .map(|m| m.key())
        .collect();
    let image_keys: BTreeSet<String> = members.iter().map(|g| g.action().key()).collect();
    report.image_equals_so = Some(image_keys == so_keys);

    // r_e has no preimage for idempotents outside R[2] (with hypotheses)
    for e in ring.idempotents()? {
        let re = paravector_re(&para, &e)?;
        let in_image = image_keys.contains(&re.key());
        let e_in_torsion = e.element().mul_i64(2).is_zero();
        // hypotheses of the non-surjectivity claim: eR not an F2-algebra,
        // orthogonal basis, non-zero-divisor conditions inside eR; at desk
        // scale the ambient hypotheses plus e not in R[2] are recorded
        let hyp = report.hypotheses_hold && !e_in_torsion && !e.element().is_zero();
        report.notsurj.push(NotsurjReport {
            idempotent: e.element().to_string(),
            hypotheses_hold: hyp,
            in_image,
            consistent: if hyp { !in_image } else { true },
        });
    }

    let mut inv_ok = true;
    for g in &members {
        if !involution_action(g)?.pass {
            inv_ok = false;
        }
    }
    report.involutions_pass = Some(inv_ok);

    report.pass = report.hypotheses_hold
        && report.kernel_matches_twisted_two_torsion.unwrap_or(false)
        && report.kernel_matches_even_exterior_units.unwrap_or(true)
        && det_ok
        && report.image_equals_so.unwrap_or(false)
        && report.notsurj.iter().all(|r| r.consistent)
        && inv_ok;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct EmptyIntReport {
    pub instance: String,
    pub searched: usize,
    pub hits: Vec<String>,
}

/// Search the unit group of the twisted center for elements with
/// 2 alpha_+ = 0; the conjecture expects none when 2 is nonzero in R.
pub fn conjecture_emptyint_search(
    algebra: &CliffordAlgebra,
    budget: usize,
) -> Result<EmptyIntReport> {
    let ring = algebra.ring().clone();
    if ring.from_i64(2).is_zero() {
        return Err(Error::Invalid("the search requires 2 to be nonzero in R".into()));
    }
    let ztilde = subalgebra::twisted_center(algebra)?;
    let zt_vecs: Vec<Vec<RingElement>> =
        ztilde.generators().iter().map(|g| g.coeffs().to_vec()).collect();
    let two = ring.from_i64(2);
    let mut searched = 0usize;
    let mut hits = Vec::new();
    for combo in span_elements_of(algebra, &zt_vecs, budget)? {
        if !combo.is_unit() {
            continue;
        }
        searched += 1;
        if combo.even_part().scale(&two).is_zero() {
            hits.push(combo.to_string());
        }
    }
    Ok(EmptyIntReport {
        instance: algebra.module().to_string(),
        searched,
        hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::QuadraticModule;
    use crate::ring::Ring;

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

    #[test]
    fn scalars_are_members() {
        let c = alg(&z(), &[1, 1]);
        let u = c.scalar(z().from_i64(-1));
        let g = in_clifford_group(&u).unwrap().unwrap();
        assert!(g.action().is_identity());
        let gp = in_paravector_group(&u).unwrap().unwrap();
        assert!(gp.action().is_identity());
    }

    #[test]
    fn generator_maps_to_reflection() {
        // alpha = x1 over Z, qdiag=(1): action is -Id on rank 1
        let c = alg(&z(), &[1]);
        let g = in_clifford_group(&c.generator(0)).unwrap().unwrap();
        assert_eq!(
            g.action().matrix().at(0, 0),
            &z().from_i64(-1)
        );
        assert_eq!(g.norm(), &c.scalar(z().from_i64(-1)));
    }

    #[test]
    fn kernel_example_degenerate() {
        // alpha = 1 + x1 over Z, qdiag=(0,1): invertible member with pi = Id
        let c = alg(&z(), &[0, 1]);
        let a = c.one().add(&c.generator(0));
        let g = in_clifford_group(&a).unwrap().unwrap();
        assert!(g.action().is_identity());
    }

    #[test]
    fn lift_reflection_z6() {
        // Z/6, e=4, x=4x1, q1=1: alpha = 3 + 4x1
        let r6 = zn(6);
        let c = alg(&r6, &[1]);
        let e = Idempotent::new(r6.from_i64(4)).unwrap();
        let data =
            ReflectionData::new(c.module().clone(), e, vec![r6.from_i64(4)]).unwrap();
        let g = lift_reflection(&c, &data).unwrap();
        assert_eq!(g.element().coeff(0), &r6.from_i64(3));
        assert_eq!(g.element().coeff(1), &r6.from_i64(4));
        // e = 0 gives alpha = 1
        let e0 = Idempotent::new(r6.zero()).unwrap();
        let d0 = ReflectionData::new(c.module().clone(), e0, vec![r6.zero()]).unwrap();
        let g0 = lift_reflection(&c, &d0).unwrap();
        assert_eq!(g0.element(), &c.one());
    }

    #[test]
    fn lift_euler_example() {
        // Z, qdiag=(0,1), u=x1, x=x2: beta = 1 + x1 x2, pi(beta)(x2) = x2 + 2x1
        let c = alg(&z(), &[0, 1]);
        let m = c.module().clone();
        let data = EulerData::new(
            m.clone(),
            m.vector_from_i64(&[1, 0]),
            m.vector_from_i64(&[0, 1]),
        )
        .unwrap();
        let g = lift_euler(&c, &data).unwrap();
        assert_eq!(g.element(), &c.one().add(&c.basis(0b11)));
        assert_eq!(
            g.action().apply(&m.basis_vector(1)),
            m.vector_from_i64(&[2, 1])
        );
        assert_eq!(g.norm(), &c.one());
    }

    #[test]
    fn paravector_re_table_z6() {
        // r_e r_eps = r_{e xor eps} over Z/6, all 16 pairs
        let r6 = zn(6);
        let c = alg(&r6, &[1]);
        let para = c.module().paravector_extension();
        let idems = r6.idempotents().unwrap();
        for e in &idems {
            for f in &idems {
                let re = paravector_re(&para, e).unwrap();
                let rf = paravector_re(&para, f).unwrap();
                let rx = paravector_re(&para, &e.xor(f)).unwrap();
                assert_eq!(re.compose(&rf), rx);
            }
        }
        // e=3 gives the identity (3 in R[2]); e=4 scales the scalar slot by 5
        let e3 = Idempotent::new(r6.from_i64(3)).unwrap();
        assert!(paravector_re(&para, &e3).unwrap().is_identity());
        let e4 = Idempotent::new(r6.from_i64(4)).unwrap();
        let r4 = paravector_re(&para, &e4).unwrap();
        assert_eq!(r4.matrix().at(0, 0), &r6.from_i64(5));
        assert_eq!(r4.matrix().at(1, 1), &r6.one());
        assert_eq!(r4.det(), r6.from_i64(5));
    }

    #[test]
    fn homogeneity_examples() {
        let c = alg(&z(), &[1]);
        // even element: degree 0; odd element: degree 1
        let w = homogeneity_witnesses(&c.one()).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w[0].element().is_zero());
        let w = homogeneity_witnesses(&c.generator(0)).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w[0].element().is_one());
        // non-homogeneous
        let w = homogeneity_witnesses(&c.one().add(&c.generator(0))).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn homogeneity_mixed_idempotent() {
        // over Z/15: alpha = 10 + 6 x1 is homogeneous of degree 6
        let r15 = zn(15);
        let c = alg(&r15, &[1]);
        let a = c
            .scalar(r15.from_i64(10))
            .add(&c.generator(0).scale(&r15.from_i64(6)));
        let w = homogeneity_witnesses(&a).unwrap();
        let names: Vec<String> = w.iter().map(|e| e.element().to_string()).collect();
        assert!(names.contains(&"6".to_string()), "{:?}", names);
    }

    #[test]
    fn involution_action_on_lift() {
        let c = alg(&z(), &[1]);
        let g = in_clifford_group(&c.generator(0)).unwrap().unwrap();
        let rep = involution_action(&g).unwrap();
        assert!(rep.pass, "{:?}", rep);
    }

    #[test]
    fn enumerate_f3_rank1() {
        // F3, qdiag=(1): Gamma = {1, 2, x1, 2x1}, image = {Id, -Id}
        let c = alg(&zn(3), &[1]);
        let members = enumerate_group(&c, GroupFlavor::Clifford, 1_000_000).unwrap();
        assert_eq!(members.len(), 4);
        let image: BTreeSet<String> = members.iter().map(|g| g.action().key()).collect();
        assert_eq!(image.len(), 2);
    }

    #[test]
    fn sesgamma_f3() {
        let c = alg(&zn(3), &[1, 0]);
        let rep = verify_sesgamma(&c, 1_000_000).unwrap();
        assert!(rep.hypotheses_hold);
        assert_eq!(rep.kernel_size, 6);
        assert!(rep.pass, "{:?}", rep);
    }

    #[test]
    fn sespara_f3_rank1() {
        let c = alg(&zn(3), &[1]);
        let rep = verify_sespara(&c, 1_000_000).unwrap();
        assert!(rep.hypotheses_hold);
        assert!(rep.pass, "{:?}", rep);
        // r_1 is not in the image
        assert!(rep.notsurj.iter().any(|r| r.idempotent == "1" && !r.in_image));
    }

    #[test]
    fn vahlen_examples() {
        let c = alg(&zn(3), &[1, 0]);
        let members = enumerate_group(&c, GroupFlavor::Clifford, 1_000_000).unwrap();
        let (kept, closed) = vahlen_filter(&members).unwrap();
        assert!(closed);
        // lifts of reflections with e = 1 are kept
        let e1 = Idempotent::new(zn(3).one()).unwrap();
        let data = ReflectionData::new(
            c.module().clone(),
            e1,
            c.module().vector_from_i64(&[1, 0]),
        )
        .unwrap();
        let lift = lift_reflection(&c, &data).unwrap();
        assert!(kept.iter().any(|g| g.element() == lift.element()));
        // a kernel member with non-scalar norm is excluded:
        // alpha = 1 + x1 + x2 x3 over F3, q = 0, has N = 1 - 2 x1 x2 x3
        let c0 = alg(&zn(3), &[0, 0, 0]);
        let a = c0.one().add(&c0.generator(0)).add(&c0.basis(0b110));
        let g = in_clifford_group(&a).unwrap().unwrap();
        let nn = g.norm().clone();
        assert!(!nn.is_scalar());
        assert_eq!(
            nn,
            c0.one().add(&c0.basis(0b111).scale(&zn(3).from_i64(-2)))
        );
        let (kept0, _) = vahlen_filter(&[g]).unwrap();
        assert!(kept0.is_empty());
    }

    #[test]
    fn emptyint_search_f3() {
        for qdiag in [vec![1i64], vec![1, 0]] {
            let c = alg(&zn(3), &qdiag);
            let rep = conjecture_emptyint_search(&c, 1_000_000).unwrap();
            assert!(rep.hits.is_empty(), "{:?}", rep);
        }
        // F2 is excluded by the precondition
        let c = alg(&zn(2), &[1]);
        assert!(conjecture_emptyint_search(&c, 1_000_000).is_err());
    }

    #[test]
    fn ehom_on_z15() {
        // 6- and 10-reflection lifts over Z/15, qdiag=(1)
        let r15 = zn(15);
        let c = alg(&r15, &[1]);
        for ev in [6i64, 10] {
            let e = Idempotent::new(r15.from_i64(ev)).unwrap();
            let data =
                ReflectionData::new(c.module().clone(), e.clone(), vec![r15.from_i64(ev)])
                    .unwrap();
            let g = lift_reflection(&c, &data).unwrap();
            let rep = ehom_check(g.element()).unwrap();
            assert!(rep.pass, "e={}: {:?}", ev, rep);
            assert!(rep.witnesses.contains(&ev.to_string()));
            // action determinant is 1 - 2e
            assert_eq!(g.action().det(), e.to_mu2());
        }
    }
}

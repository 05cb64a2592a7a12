//! Idempotent calculus: classification, Hensel lifting modulo the radical,
//! lifting of primitive families with controlled membership, finite
//! orthogonalization, splitting of idempotents into orthogonal local
//! families, and the semiperfectness certificate.
//!
//! The lifting engine is one linear-algebra routine shared by
//! [`lift_primitive_family`], [`orthogonalize_finite_family`] and
//! [`split_idempotent`]: given idempotent "approximations" `q_w` with
//! orthogonal primitive residues, solve `(Σ_w x_w)·q_v = q_v` for a tuple
//! `x` with `x_w ∈ 𝔯·q_w`. The solution components are the projectors onto
//! the summands `𝔯·q_w` of the regular module, hence exactly orthogonal
//! idempotents, and membership witnesses fall out of the basis bookkeeping.

use crate::endo::{
    basis_element, compose, decide_invertible, fp_coords, project_to_semisimple, ring_basis,
    section_lift, Body, EndoElement, Invertibility, OpenIdealDescriptor, PatternMatrix,
    SemisimpleElement,
};
use crate::error::{Error, Result};
use crate::fp::FpMatrix;
use crate::module::{DecomposedModule, LocalModule};
use crate::scalar::{AdicScalar, Backend, RingDescriptor, INFINITE_VALUATION};

// ---------------------------------------------------------------------------
// families

/// Countable tail of a family: member `j` (for `j >= from`) has sparse
/// entries at `(j + row_off, j + col_off)`, one per template triple.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateTail {
    pub templates: Vec<(i64, i64, AdicScalar)>,
    pub from: usize,
}

/// A finite or countable family of pairwise orthogonal idempotents.
#[derive(Debug, Clone)]
pub struct IdempotentFamily {
    pub module: DecomposedModule,
    /// Explicitly listed members.
    pub head: Vec<EndoElement>,
    /// Shift-invariant countable tail (pattern backend).
    pub tail: Option<TemplateTail>,
    /// Partial sums converge to 1 in the finite topology.
    pub complete: bool,
}

impl IdempotentFamily {
    pub fn finite(module: DecomposedModule, head: Vec<EndoElement>, complete: bool) -> Self {
        IdempotentFamily { module, head, tail: None, complete }
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_none()
    }

    pub fn tail_member(&self, j: usize) -> EndoElement {
        let tail = self.tail.as_ref().expect("no tail");
        assert!(j >= tail.from);
        let mut sparse = Vec::new();
        for (ro, co, v) in &tail.templates {
            let r = j as i64 + ro;
            let c = j as i64 + co;
            if r >= 0 && c >= 0 && !v.is_zero() {
                sparse.push((r as usize, c as usize, v.clone()));
            }
        }
        EndoElement::from_pattern(
            self.module.clone(),
            PatternMatrix::from_sparse(self.module.ring, sparse),
        )
    }

    /// Row window beyond which the tail repeats by shift invariance; checks
    /// on rows `0..window` extend to the whole family.
    fn tail_window(&self) -> usize {
        let Some(tail) = &self.tail else { return 0 };
        let spread = tail
            .templates
            .iter()
            .map(|(ro, co, _)| ro.unsigned_abs().max(co.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0);
        tail.from + 2 * spread + 2
    }

    /// Sum of all members, exact: the tail contributes whole bands.
    pub fn sum(&self) -> EndoElement {
        match &self.tail {
            None => {
                let mut acc = EndoElement::zero(&self.module);
                for e in &self.head {
                    acc = acc.add(e);
                }
                acc
            }
            Some(tail) => {
                let mut m = PatternMatrix::zero(self.module.ring);
                for (ro, co, v) in &tail.templates {
                    let offset = co - ro;
                    let j0 = (tail.from as i64).max(-ro).max(-co);
                    let row0 = (j0 + ro).max(0) as usize;
                    m.bands.push(crate::endo::Band { offset, entry: v.clone(), from: row0 });
                }
                let mut acc = EndoElement::from_pattern(self.module.clone(), m);
                for e in &self.head {
                    acc = acc.add(e);
                }
                acc
            }
        }
    }

    /// Check every claimed invariant exactly: members idempotent, pairwise
    /// orthogonal (both orders), zero-convergent, and summing to 1 when
    /// `complete`. Tail checks use a finite window plus shift invariance.
    pub fn validate(&self) -> Result<()> {
        let mut witnesses: Vec<EndoElement> = self.head.clone();
        if self.tail.is_some() {
            let window = self.tail_window();
            let from = self.tail.as_ref().unwrap().from;
            for j in from..window {
                witnesses.push(self.tail_member(j));
            }
        }
        for (i, e) in witnesses.iter().enumerate() {
            if compose(e, e) != *e {
                return Err(Error::Invalid(format!("family member {i} is not idempotent")));
            }
            for (j, f) in witnesses.iter().enumerate() {
                if i != j && !compose(e, f).is_zero() {
                    return Err(Error::Invalid(format!(
                        "family members {i} and {j} are not orthogonal"
                    )));
                }
            }
        }
        // zero-convergence: a finite head is trivially zero-convergent, and
        // each row is touched by only finitely many tail members
        if self.complete {
            let sum = self.sum();
            if sum != EndoElement::identity(&self.module) {
                return Err(Error::Invalid("family claims completeness but sums short of 1".into()));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// classification

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdempotentClass {
    NotIdempotent,
    /// Idempotent, but not local.
    Idempotent,
    /// `e² = e`, `e ≠ 0`, and the residue is primitive (rank one inside a
    /// single iso-class), so `e𝔯e` is a local ring.
    LocalIdempotent,
}

pub fn classify_idempotent(e: &EndoElement) -> IdempotentClass {
    if compose(e, e) != *e {
        return IdempotentClass::NotIdempotent;
    }
    if e.is_zero() {
        return IdempotentClass::Idempotent;
    }
    let s = project_to_semisimple(e);
    if s.rank() == Some(1) {
        IdempotentClass::LocalIdempotent
    } else {
        IdempotentClass::Idempotent
    }
}

// ---------------------------------------------------------------------------
// Hensel lifting

fn element_valuation(e: &EndoElement) -> usize {
    match &e.body {
        Body::Finite(entries) => entries
            .iter()
            .flatten()
            .map(|x| x.valuation())
            .min()
            .unwrap_or(INFINITE_VALUATION),
        Body::Pattern(_) => unreachable!("valuation audit is truncated-only"),
    }
}

fn hensel_step_cap(ring: RingDescriptor) -> usize {
    (usize::BITS - (ring.precision.max(1)).leading_zeros()) as usize + 2
}

/// Newton iteration `e ← 3e² − 2e³` from a seed whose residue is idempotent,
/// together with a left witness: if `seed = w₀·base` then the result is
/// `h·base` for the returned `h`. The defect `e² − e` at least doubles in
/// valuation each step (asserted), so the iteration ends in
/// `O(log precision)` steps.
fn hensel_lift_tracked(
    seed: &EndoElement,
    witness: &EndoElement,
) -> Result<(EndoElement, EndoElement)> {
    if seed.ring().backend != Backend::Truncated {
        return Err(Error::BackendUnsupported(seed.ring().backend));
    }
    if !project_to_semisimple(seed).is_idempotent() {
        return Err(Error::ResidueNotIdempotent);
    }
    let ring = seed.ring();
    let three = AdicScalar::constant(ring, 3 % ring.prime);
    let two = AdicScalar::constant(ring, 2 % ring.prime);
    let mut e = seed.clone();
    let mut w = witness.clone();
    let mut defect_val = element_valuation(&compose(&e, &e).sub(&e));
    for _ in 0..hensel_step_cap(ring) {
        if defect_val == INFINITE_VALUATION {
            return Ok((e, w));
        }
        // e' = (3e − 2e²)·e, so the same prefactor updates the witness
        let e2 = compose(&e, &e);
        let prefactor = e.scale(&three).sub(&e2.scale(&two));
        e = compose(&prefactor, &e);
        w = compose(&prefactor, &w);
        let next_val = element_valuation(&compose(&e, &e).sub(&e));
        assert!(
            next_val == INFINITE_VALUATION || next_val >= 2 * defect_val,
            "Hensel defect valuation failed to double: {defect_val} -> {next_val}"
        );
        defect_val = next_val;
    }
    if defect_val == INFINITE_VALUATION {
        Ok((e, w))
    } else {
        Err(Error::NoConvergence)
    }
}

/// Lift a seed with idempotent residue to an exact idempotent with the same
/// residue.
///
/// ```
/// use endoring::endo::{compose, EndoElement};
/// use endoring::idem::hensel_lift_idempotent;
/// use endoring::module::{DecomposedModule, LocalModule};
/// use endoring::scalar::{AdicScalar, RingDescriptor};
///
/// let ring = RingDescriptor::truncated(2, 4);
/// let m = DecomposedModule::finite(
///     ring,
///     vec![LocalModule::Torsion(4), LocalModule::Torsion(4)],
/// )
/// .unwrap();
/// let sc = |s: &str| AdicScalar::parse(ring, s).unwrap();
/// // residue is the projector E₁₁, but the matrix itself is not idempotent
/// let seed = EndoElement::from_entries(
///     m,
///     vec![vec![sc("1"), sc("t")], vec![sc("t"), sc("t^2")]],
/// )
/// .unwrap();
/// let e = hensel_lift_idempotent(&seed).unwrap();
/// assert_eq!(compose(&e, &e), e);
/// ```
pub fn hensel_lift_idempotent(seed: &EndoElement) -> Result<EndoElement> {
    let id = EndoElement::identity(&seed.module);
    let (e, _) = hensel_lift_tracked(seed, &id)?;
    debug_assert_eq!(project_to_semisimple(&e), project_to_semisimple(seed));
    Ok(e)
}

// ---------------------------------------------------------------------------
// the projector system

/// One lifted member with its membership witness.
#[derive(Debug, Clone)]
pub struct LiftedMember {
    pub element: EndoElement,
    /// `compose(witness, target) = element`, certifying `element ∈ 𝔯·target`.
    pub witness: EndoElement,
}

/// Outcome of a family lifting.
#[derive(Debug, Clone)]
pub struct LiftOutcome {
    pub family: IdempotentFamily,
    pub members: Vec<LiftedMember>,
}

/// Solve the projector system inside the corner ring `e𝔯e` (pass the
/// identity for the full ring): find `x_w ∈ (e𝔯e)·q_w` with
/// `(Σ_w x_w)·q_v = q_v` for all `v`. Writing `𝔯e = ⊕_w (e𝔯e)q_w ⊕ (rest)`,
/// the `x_w` are the projectors onto the cyclic summands, which makes them
/// pairwise orthogonal idempotents with residues `residue(q_w)`.
///
/// Returns `(x_w, r_w)` with `x_w = r_w·q_w` exactly.
fn solve_projector_system(
    corner: &EndoElement,
    q: &[EndoElement],
) -> Result<Vec<(EndoElement, EndoElement)>> {
    let module = &corner.module;
    let ring = module.ring;
    let basis = ring_basis(module);
    let dim = basis.len();
    let field = ring.field();
    let w_count = q.len();

    // per slot w: basis of (e𝔯e)·q_w as the column space of r ↦ e·r·q_w
    // (q_w already begins with e), remembering pivot preimages e·b_j
    let mut slot_generators: Vec<Vec<(EndoElement, EndoElement)>> = Vec::new();
    for qw in q {
        let mut op = FpMatrix::zero(field, dim, dim);
        let mut images: Vec<EndoElement> = Vec::with_capacity(dim);
        for (col, b) in basis.iter().enumerate() {
            let gen = compose(&compose(corner, &basis_element(module, *b)), qw);
            for (row, &c) in fp_coords(&gen, &basis).iter().enumerate() {
                op.set(row, col, c);
            }
            images.push(gen);
        }
        let gens = op
            .pivot_columns()
            .into_iter()
            .map(|j| {
                let pre = compose(corner, &basis_element(module, basis[j]));
                (images[j].clone(), pre)
            })
            .collect();
        slot_generators.push(gens);
    }

    // stacked linear system: for unknown x = Σ ξ·(slot generator), require
    // x·q_v = q_v in every slot v
    let n_cols: usize = slot_generators.iter().map(|g| g.len()).sum();
    let mut a = FpMatrix::zero(field, w_count * dim, n_cols);
    let mut col = 0;
    for gens in &slot_generators {
        for (gen, _) in gens {
            for (v, qv) in q.iter().enumerate() {
                let image = compose(gen, qv);
                for (row, &c) in fp_coords(&image, &basis).iter().enumerate() {
                    a.set(v * dim + row, col, c);
                }
            }
            col += 1;
        }
    }
    let mut rhs = vec![0u64; w_count * dim];
    for (v, qv) in q.iter().enumerate() {
        for (row, &c) in fp_coords(qv, &basis).iter().enumerate() {
            rhs[v * dim + row] = c;
        }
    }
    let xi = a
        .solve(&rhs)
        .ok_or_else(|| Error::Invalid("projector system unsolvable (residues not orthogonal primitive?)".into()))?;

    let mut out = Vec::with_capacity(w_count);
    let mut offset = 0;
    for gens in &slot_generators {
        let mut x = EndoElement::zero(module);
        let mut r = EndoElement::zero(module);
        for (k, (gen, pre)) in gens.iter().enumerate() {
            let c = AdicScalar::constant(ring, xi[offset + k]);
            x = x.add(&gen.scale(&c));
            r = r.add(&pre.scale(&c));
        }
        offset += gens.len();
        out.push((x, r));
    }
    Ok(out)
}

fn residues_of(targets: &[EndoElement]) -> Result<Vec<SemisimpleElement>> {
    let residues: Vec<SemisimpleElement> =
        targets.iter().map(project_to_semisimple).collect();
    for (w, g) in residues.iter().enumerate() {
        if !g.is_idempotent() || g.rank() != Some(1) {
            return Err(Error::NotPrimitiveResidue(w));
        }
    }
    for i in 0..residues.len() {
        for j in 0..residues.len() {
            if i != j && !residues[i].mul(&residues[j]).is_zero() {
                return Err(Error::NotOrthogonalResidues(i, j));
            }
        }
    }
    Ok(residues)
}

fn residues_complete(module: &DecomposedModule, residues: &[SemisimpleElement]) -> bool {
    let mut acc = project_to_semisimple(&EndoElement::zero(module));
    for g in residues {
        acc = acc.add(g);
    }
    acc == SemisimpleElement::identity(module)
}

fn already_orthogonal_idempotents(targets: &[EndoElement]) -> bool {
    for (i, e) in targets.iter().enumerate() {
        if compose(e, e) != *e {
            return false;
        }
        for (j, f) in targets.iter().enumerate() {
            if i != j && !compose(e, f).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Core of the lifting lemma, parameterized over a corner idempotent: build
/// seeds `c_w·f_w` inside the corner, Hensel-lift them to idempotents
/// `ẽ_w ∈ (corner 𝔯)·f_w`, and solve the projector system for the
/// approximations `q_w = c_w·ẽ_w`. Membership witnesses compose along the
/// whole chain.
fn lift_family_core(
    corner: &EndoElement,
    targets: &[EndoElement],
    residues: &[SemisimpleElement],
) -> Result<Vec<LiftedMember>> {
    let mut q = Vec::with_capacity(targets.len());
    let mut chain: Vec<(EndoElement, EndoElement)> = Vec::with_capacity(targets.len());
    for (f, g) in targets.iter().zip(residues) {
        let c = compose(&compose(corner, &section_lift(g)), corner);
        let seed = compose(&c, f);
        let (lifted, h) = hensel_lift_tracked(&seed, &c)?;
        q.push(compose(&c, &lifted));
        chain.push((c, h));
    }
    let solved = solve_projector_system(corner, &q)?;
    let mut out = Vec::with_capacity(targets.len());
    for (((x, r), (c, h)), (f, g)) in
        solved.into_iter().zip(chain).zip(targets.iter().zip(residues))
    {
        let witness = compose(&compose(&r, &c), &h);
        assert_eq!(compose(&witness, f), x, "membership witness failed to reproduce the lift");
        assert_eq!(compose(&x, &x), x, "projector solution is not idempotent");
        assert_eq!(&project_to_semisimple(&x), g, "lift changed the residue");
        out.push(LiftedMember { element: x, witness });
    }
    Ok(out)
}

/// Given targets `f′_w` whose residues `g′_w` are orthogonal primitive
/// idempotents, produce pairwise orthogonal local idempotents `e′_w` with
/// `e′_w ∈ 𝔯·f′_w` (witnessed) and residue `g′_w`. Already-orthogonal
/// idempotent targets are returned unchanged.
pub fn lift_primitive_family(targets: &[EndoElement]) -> Result<LiftOutcome> {
    if targets.is_empty() {
        return Err(Error::Invalid("empty target family".into()));
    }
    let module = targets[0].module.clone();
    if module.ring.backend != Backend::Truncated {
        return Err(Error::BackendUnsupported(module.ring.backend));
    }
    let residues = residues_of(targets)?;
    let complete = residues_complete(&module, &residues);
    let members = if already_orthogonal_idempotents(targets) {
        targets
            .iter()
            .map(|f| LiftedMember { element: f.clone(), witness: f.clone() })
            .collect()
    } else {
        let id = EndoElement::identity(&module);
        lift_family_core(&id, targets, &residues)?
    };
    let head: Vec<EndoElement> = members.iter().map(|m| m.element.clone()).collect();
    let family = IdempotentFamily::finite(module, head, complete);
    family.validate()?;
    Ok(LiftOutcome { family, members })
}

// ---------------------------------------------------------------------------
// orthogonalization

/// Orthogonalize a finite family of local idempotents whose pairwise
/// products lie in the radical, preserving residues member-wise. When the
/// residues are complete, the sum of the inputs must be invertible — the
/// paper's counterexample obstruction — and failure is certified.
pub fn orthogonalize_finite_family(members: &[EndoElement]) -> Result<LiftOutcome> {
    if members.is_empty() {
        return Err(Error::Invalid("empty family".into()));
    }
    let module = members[0].module.clone();
    match module.ring.backend {
        Backend::Truncated => {
            let residues = residues_of(members)?;
            let complete = residues_complete(&module, &residues);
            if complete && !already_orthogonal_idempotents(members) {
                let mut sum = EndoElement::zero(&module);
                for e in members {
                    sum = sum.add(e);
                }
                if let Invertibility::NotInvertible(cert) = decide_invertible(&sum) {
                    return Err(Error::NonInvertibleSum(cert));
                }
            }
            lift_primitive_family(members)
        }
        Backend::Pattern => Err(Error::BackendUnsupported(Backend::Pattern)),
    }
}

/// Pattern-backend orthogonalization of a shift-invariant countable family.
/// Already-orthogonal families pass through; otherwise the only decidable
/// diagnosis is the non-invertible sum, matching the counterexample where
/// `Σ e′_j = 1 − h` fails to be invertible.
pub fn orthogonalize_template_family(
    module: &DecomposedModule,
    templates: &[(i64, i64, AdicScalar)],
    from: usize,
) -> Result<IdempotentFamily> {
    if module.ring.backend != Backend::Pattern {
        return Err(Error::BackendUnsupported(module.ring.backend));
    }
    let family = IdempotentFamily {
        module: module.clone(),
        head: Vec::new(),
        tail: Some(TemplateTail { templates: templates.to_vec(), from }),
        complete: false,
    };
    if family.validate().is_ok() {
        let sum = family.sum();
        let complete = sum == EndoElement::identity(module);
        return Ok(IdempotentFamily { complete, ..family });
    }
    let sum = family.sum();
    match decide_invertible(&sum) {
        Invertibility::NotInvertible(cert) => Err(Error::NonInvertibleSum(cert)),
        _ => Err(Error::BackendUnsupported(Backend::Pattern)),
    }
}

// ---------------------------------------------------------------------------
// splitting

/// One audit record of the splitting loop.
#[derive(Debug, Clone)]
pub struct SplitRemainder {
    /// `e − (e_0 + … + e_k)`.
    pub element: EndoElement,
    /// Whether the remainder lies in the `k`-th chain ideal (when given).
    pub contained: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct SplitResult {
    pub family: IdempotentFamily,
    pub members: Vec<LiftedMember>,
    pub remainders: Vec<SplitRemainder>,
}

/// Split an idempotent into a sum of pairwise orthogonal local idempotents,
/// working inside the corner ring `e𝔯e`: decompose the residue of `e` into
/// rank-one pieces per iso-class, lift the whole family of corner targets
/// `e·lift(ḡ_i)·e` at once, and audit the partial remainders against the
/// chain of open ideals.
pub fn split_idempotent(
    e: &EndoElement,
    chain: &[OpenIdealDescriptor],
) -> Result<SplitResult> {
    if compose(e, e) != *e {
        return Err(Error::Invalid("split_idempotent requires an idempotent".into()));
    }
    let module = e.module.clone();
    match module.ring.backend {
        Backend::Truncated => {
            let SemisimpleElement::Finite { classes, .. } = project_to_semisimple(e) else {
                unreachable!()
            };
            // rank-one pieces of the residue, embedded class by class
            let mut piece_residues: Vec<SemisimpleElement> = Vec::new();
            for (x, class_matrix) in classes.iter().enumerate() {
                for piece in class_matrix.primitive_decomposition() {
                    let mut embedded = classes
                        .iter()
                        .map(|m| FpMatrix::zero(m.field, m.rows, m.cols))
                        .collect::<Vec<_>>();
                    embedded[x] = piece;
                    piece_residues.push(SemisimpleElement::Finite {
                        module: module.clone(),
                        classes: embedded,
                    });
                }
            }
            if piece_residues.is_empty() {
                // e ∈ 𝔥 and idempotent forces e = 0; the split is empty
                let family = IdempotentFamily::finite(module, Vec::new(), false);
                return Ok(SplitResult { family, members: Vec::new(), remainders: Vec::new() });
            }
            let targets: Vec<EndoElement> = piece_residues
                .iter()
                .map(|g| compose(&compose(e, &section_lift(g)), e))
                .collect();
            let members = lift_family_core(e, &targets, &piece_residues)?;
            // Σ e_i = e: the difference is an idempotent-difference in the
            // corner radical, which is nilpotent
            let mut sum = EndoElement::zero(&module);
            let mut remainders = Vec::new();
            for (k, m) in members.iter().enumerate() {
                sum = sum.add(&m.element);
                let rem = e.sub(&sum);
                let contained = chain.get(k).map(|ideal| ideal.contains(&rem));
                remainders.push(SplitRemainder { element: rem, contained });
            }
            assert!(
                remainders.last().map(|r| r.element.is_zero()).unwrap_or(true),
                "split members do not sum back to the idempotent"
            );
            let complete = *e == EndoElement::identity(&module);
            let head: Vec<EndoElement> = members.iter().map(|m| m.element.clone()).collect();
            let family = IdempotentFamily::finite(module, head, complete);
            family.validate()?;
            Ok(SplitResult { family, members, remainders })
        }
        Backend::Pattern => split_pattern_diagonal(e, chain),
    }
}

/// Pattern backend: coordinate peeling of a diagonal idempotent. Each
/// diagonal entry is 0 or 1 (the base ring has no other idempotents), and
/// the members are the coordinate projectors at the 1-rows.
fn split_pattern_diagonal(
    e: &EndoElement,
    chain: &[OpenIdealDescriptor],
) -> Result<SplitResult> {
    let module = e.module.clone();
    let ring = module.ring;
    let m = e.pattern();
    let stable = m.stable_row();
    let c = m.canonical_from(stable);
    if c.bands.keys().any(|&o| o != 0) || c.sparse.keys().any(|&(r, col)| r != col) {
        return Err(Error::BackendUnsupported(Backend::Pattern));
    }
    let one = AdicScalar::one(ring);
    let eventual = c.bands.get(&0).map(|(v, _)| v.clone());
    if let Some(v) = &eventual {
        if *v != one {
            return Err(Error::BackendUnsupported(Backend::Pattern));
        }
    }
    let mut head = Vec::new();
    for row in 0..stable {
        let v = m.entry_at(row, row);
        if v.is_zero() {
            continue;
        }
        if v != one {
            return Err(Error::BackendUnsupported(Backend::Pattern));
        }
        head.push(EndoElement::from_pattern(
            module.clone(),
            PatternMatrix::from_sparse(ring, vec![(row, row, one.clone())]),
        ));
    }
    let tail = eventual.map(|v| TemplateTail { templates: vec![(0, 0, v)], from: stable });
    let family = IdempotentFamily {
        module: module.clone(),
        head: head.clone(),
        tail,
        complete: false,
    };
    let complete = family.sum() == EndoElement::identity(&module);
    let family = IdempotentFamily { complete, ..family };
    family.validate()?;
    // audit: after peeling the projectors at rows 0..=k, the remainder
    // annihilates those rows
    let mut remainders = Vec::new();
    let mut sum = EndoElement::zero(&module);
    for (k, member) in head.iter().enumerate() {
        sum = sum.add(member);
        let rem = e.sub(&sum);
        let contained = chain.get(k).map(|ideal| ideal.contains(&rem));
        remainders.push(SplitRemainder { element: rem, contained });
    }
    let members = head
        .into_iter()
        .map(|m| LiftedMember { witness: m.clone(), element: m })
        .collect();
    Ok(SplitResult { family, members, remainders })
}

// ---------------------------------------------------------------------------
// semiperfectness certificate

/// The complete zero-convergent orthogonal family of summand projectors of
/// `M = ⊕ M_z`, validated before returning. Its existence is the
/// semiperfectness certificate for `End(M)^op`.
pub fn certify_semiperfect(module: &DecomposedModule) -> Result<IdempotentFamily> {
    let family = if module.is_finite() {
        let head = (0..module.rank())
            .map(|z| EndoElement::summand_projector(module, z))
            .collect();
        IdempotentFamily::finite(module.clone(), head, true)
    } else {
        IdempotentFamily {
            module: module.clone(),
            head: Vec::new(),
            tail: Some(TemplateTail {
                templates: vec![(0, 0, AdicScalar::one(module.ring))],
                from: 0,
            }),
            complete: true,
        }
    };
    family.validate()?;
    Ok(family)
}

// ---------------------------------------------------------------------------
// pushforward through surjections

/// Reduce a family modulo `t^target_precision`, dropping members that become
/// zero, and re-validate over the coarser ring.
pub fn push_family_through_quotient(
    family: &IdempotentFamily,
    target_precision: usize,
) -> Result<IdempotentFamily> {
    let old_ring = family.module.ring;
    if old_ring.backend != Backend::Truncated {
        return Err(Error::BackendUnsupported(old_ring.backend));
    }
    if target_precision == 0 || target_precision >= old_ring.precision {
        return Err(Error::Invalid(format!(
            "target precision must lie in 1..{}",
            old_ring.precision
        )));
    }
    let new_ring = RingDescriptor::truncated(old_ring.prime, target_precision);
    let summands: Vec<LocalModule> = family
        .module
        .finite_summands()
        .iter()
        .map(|s| match s {
            LocalModule::Torsion(k) => LocalModule::Torsion((*k).min(target_precision)),
            LocalModule::Free => LocalModule::Free,
        })
        .collect();
    let new_module = DecomposedModule::finite(new_ring, summands)?;
    let mut head = Vec::new();
    for e in &family.head {
        let entries = e
            .entries()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| AdicScalar::from_poly(new_ring, &x.coeffs()[..target_precision]))
                    .collect()
            })
            .collect();
        let reduced = EndoElement::from_entries(new_module.clone(), entries)?;
        if !reduced.is_zero() {
            head.push(reduced);
        }
    }
    let out = IdempotentFamily::finite(new_module, head, family.complete);
    out.validate()?;
    Ok(out)
}

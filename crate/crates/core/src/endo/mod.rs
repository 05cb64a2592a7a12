//! The topological ring `𝔯 = End(M)^op` of a decomposed module, in block
//! matrix form, together with the finite topology, the topological Jacobson
//! radical, and the semisimple quotient.
//!
//! Conventions, fixed once for the whole crate: elements act on the right of
//! row vectors; the block entry at `(j, i)` is the component `M_j -> M_i`,
//! stored as one scalar through the canonical generator of `Hom(M_j, M_i)`;
//! `compose(r, s)` means "first act by `r`, then by `s`" and coincides with
//! the block matrix product `r * s`.

pub mod pattern;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::FpMatrix;
use crate::module::{hom_block_shape, hom_generator_exponent, DecomposedModule, FULL_RANK};
use crate::scalar::{AdicScalar, Backend, RingDescriptor};

pub use pattern::{Band, PatternMatrix};

#[derive(Debug, Clone)]
pub enum Body {
    /// Dense block matrix over a finite summand list; entry `(j, i)` is
    /// reduced mod `t^{hom_block_shape(M_j, M_i)}`.
    Finite(Vec<Vec<AdicScalar>>),
    /// Banded matrix over `⊕_ω Free`.
    Pattern(PatternMatrix),
}

/// An element of `End(M)^op`.
#[derive(Debug, Clone)]
pub struct EndoElement {
    pub module: DecomposedModule,
    pub body: Body,
}

impl PartialEq for EndoElement {
    fn eq(&self, other: &Self) -> bool {
        if self.module != other.module {
            return false;
        }
        match (&self.body, &other.body) {
            (Body::Finite(a), Body::Finite(b)) => a == b,
            (Body::Pattern(a), Body::Pattern(b)) => a.equals(b),
            _ => false,
        }
    }
}

impl Eq for EndoElement {}

impl EndoElement {
    pub fn ring(&self) -> RingDescriptor {
        self.module.ring
    }

    fn shape(&self, j: usize, i: usize) -> usize {
        let s = self.module.finite_summands();
        hom_block_shape(s[j], s[i])
    }

    fn reduce_entry(ring: RingDescriptor, entry: AdicScalar, shape: usize) -> AdicScalar {
        match ring.backend {
            Backend::Pattern => {
                if shape == 0 {
                    AdicScalar::zero(ring)
                } else {
                    entry
                }
            }
            Backend::Truncated => {
                if shape == FULL_RANK {
                    entry
                } else {
                    entry.reduce_mod(shape)
                }
            }
        }
    }

    /// Build from raw block entries, reducing each mod its block shape.
    pub fn from_entries(module: DecomposedModule, entries: Vec<Vec<AdicScalar>>) -> Result<Self> {
        let n = module.rank();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(format!("entry matrix must be {n}x{n}")));
        }
        let ring = module.ring;
        let summands = module.finite_summands().to_vec();
        let reduced = entries
            .into_iter()
            .enumerate()
            .map(|(j, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(i, e)| {
                        Self::reduce_entry(ring, e, hom_block_shape(summands[j], summands[i]))
                    })
                    .collect()
            })
            .collect();
        Ok(EndoElement { module, body: Body::Finite(reduced) })
    }

    pub fn from_pattern(module: DecomposedModule, m: PatternMatrix) -> Self {
        debug_assert!(!module.is_finite());
        EndoElement { module, body: Body::Pattern(m) }
    }

    pub fn zero(module: &DecomposedModule) -> Self {
        if module.is_finite() {
            let n = module.rank();
            let z = vec![vec![AdicScalar::zero(module.ring); n]; n];
            EndoElement { module: module.clone(), body: Body::Finite(z) }
        } else {
            EndoElement {
                module: module.clone(),
                body: Body::Pattern(PatternMatrix::zero(module.ring)),
            }
        }
    }

    pub fn identity(module: &DecomposedModule) -> Self {
        if module.is_finite() {
            let mut e = Self::zero(module);
            let Body::Finite(entries) = &mut e.body else { unreachable!() };
            for (i, row) in entries.iter_mut().enumerate() {
                row[i] = AdicScalar::one(module.ring);
            }
            e
        } else {
            EndoElement {
                module: module.clone(),
                body: Body::Pattern(PatternMatrix::identity(module.ring)),
            }
        }
    }

    /// Projector onto the summand `z`.
    pub fn summand_projector(module: &DecomposedModule, z: usize) -> Self {
        let mut e = Self::zero(module);
        let Body::Finite(entries) = &mut e.body else {
            panic!("summand_projector over a finite module only")
        };
        entries[z][z] = AdicScalar::one(module.ring);
        e
    }

    pub fn entries(&self) -> &Vec<Vec<AdicScalar>> {
        match &self.body {
            Body::Finite(e) => e,
            Body::Pattern(_) => panic!("entries() on a pattern element"),
        }
    }

    pub fn pattern(&self) -> &PatternMatrix {
        match &self.body {
            Body::Pattern(m) => m,
            Body::Finite(_) => panic!("pattern() on a finite element"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.body {
            Body::Finite(e) => e.iter().all(|row| row.iter().all(|x| x.is_zero())),
            Body::Pattern(m) => m.is_zero(),
        }
    }

    pub fn add(&self, other: &EndoElement) -> EndoElement {
        assert_eq!(self.module, other.module, "module mismatch");
        match (&self.body, &other.body) {
            (Body::Finite(a), Body::Finite(b)) => {
                let entries = a
                    .iter()
                    .zip(b)
                    .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
                    .collect();
                EndoElement { module: self.module.clone(), body: Body::Finite(entries) }
            }
            (Body::Pattern(a), Body::Pattern(b)) => {
                EndoElement { module: self.module.clone(), body: Body::Pattern(a.add(b)) }
            }
            _ => unreachable!(),
        }
    }

    pub fn neg(&self) -> EndoElement {
        match &self.body {
            Body::Finite(a) => {
                let entries = a.iter().map(|r| r.iter().map(|x| x.neg()).collect()).collect();
                EndoElement { module: self.module.clone(), body: Body::Finite(entries) }
            }
            Body::Pattern(a) => {
                EndoElement { module: self.module.clone(), body: Body::Pattern(a.neg()) }
            }
        }
    }

    pub fn sub(&self, other: &EndoElement) -> EndoElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &AdicScalar) -> EndoElement {
        match &self.body {
            Body::Finite(a) => {
                let entries = a
                    .iter()
                    .enumerate()
                    .map(|(j, r)| {
                        r.iter()
                            .enumerate()
                            .map(|(i, x)| {
                                Self::reduce_entry(self.ring(), x.mul(c), self.shape(j, i))
                            })
                            .collect()
                    })
                    .collect();
                EndoElement { module: self.module.clone(), body: Body::Finite(entries) }
            }
            Body::Pattern(a) => {
                EndoElement { module: self.module.clone(), body: Body::Pattern(a.scale(c)) }
            }
        }
    }
}

/// `compose(r, s)`: first act by `r`, then by `s` (the ring product of
/// `End(M)^op`, i.e. the block matrix product `r * s`).
pub fn compose(r: &EndoElement, s: &EndoElement) -> EndoElement {
    assert_eq!(r.module, s.module, "module mismatch");
    match (&r.body, &s.body) {
        (Body::Finite(a), Body::Finite(b)) => {
            let module = r.module.clone();
            let summands = module.finite_summands().to_vec();
            let n = summands.len();
            let ring = module.ring;
            let mut out = vec![vec![AdicScalar::zero(ring); n]; n];
            for j in 0..n {
                for i in 0..n {
                    let m3 = hom_generator_exponent(summands[j], summands[i]);
                    let mut acc = AdicScalar::zero(ring);
                    for k in 0..n {
                        if a[j][k].is_zero() || b[k][i].is_zero() {
                            continue;
                        }
                        let m1 = hom_generator_exponent(summands[j], summands[k]);
                        let m2 = hom_generator_exponent(summands[k], summands[i]);
                        // the composite generator exponent m1+m2 exceeds m3
                        // by a nonnegative amount; the excess multiplies in
                        let excess = m1 + m2 - m3;
                        acc = acc.add(&a[j][k].mul(&b[k][i]).shift_up(excess));
                    }
                    out[j][i] = EndoElement::reduce_entry(
                        ring,
                        acc,
                        hom_block_shape(summands[j], summands[i]),
                    );
                }
            }
            EndoElement { module, body: Body::Finite(out) }
        }
        (Body::Pattern(a), Body::Pattern(b)) => {
            EndoElement { module: r.module.clone(), body: Body::Pattern(a.mul(b)) }
        }
        _ => unreachable!(),
    }
}

impl EndoElement {
    /// Transpose of the block matrix; an anti-automorphism of the ring
    /// (`transpose(compose(r, s)) = compose(transpose(s), transpose(r))`).
    pub fn transpose(&self) -> EndoElement {
        match &self.body {
            Body::Finite(a) => {
                let n = a.len();
                let entries = (0..n)
                    .map(|j| (0..n).map(|i| a[i][j].clone()).collect())
                    .collect();
                EndoElement { module: self.module.clone(), body: Body::Finite(entries) }
            }
            Body::Pattern(_) => panic!("transpose is only used on finite elements"),
        }
    }
}

// ---------------------------------------------------------------------------
// F_p coordinates of the finite truncated ring

/// One `F_p`-basis vector of `𝔯`: the block matrix unit `t^s E_{j,i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisIndex {
    pub row: usize,
    pub col: usize,
    pub power: usize,
}

/// Enumeration of the `F_p`-basis of the (finite) truncated endomorphism ring.
pub fn ring_basis(module: &DecomposedModule) -> Vec<BasisIndex> {
    let summands = module.finite_summands();
    let mut out = Vec::new();
    for (j, sj) in summands.iter().enumerate() {
        for (i, si) in summands.iter().enumerate() {
            let shape = hom_block_shape(*sj, *si);
            assert!(shape != FULL_RANK, "ring_basis over the truncated backend only");
            for s in 0..shape {
                out.push(BasisIndex { row: j, col: i, power: s });
            }
        }
    }
    out
}

/// Basis vectors spanning the topological Jacobson radical: everything but
/// the unit part of same-class diagonal-ish blocks.
pub fn radical_basis(module: &DecomposedModule) -> Vec<BasisIndex> {
    let summands = module.finite_summands();
    ring_basis(module)
        .into_iter()
        .filter(|b| summands[b.row] != summands[b.col] || b.power >= 1)
        .collect()
}

pub fn basis_element(module: &DecomposedModule, b: BasisIndex) -> EndoElement {
    let mut e = EndoElement::zero(module);
    let Body::Finite(entries) = &mut e.body else { unreachable!() };
    entries[b.row][b.col] = AdicScalar::monomial(module.ring, 1, b.power);
    e
}

pub fn fp_coords(e: &EndoElement, basis: &[BasisIndex]) -> Vec<u64> {
    let entries = e.entries();
    basis
        .iter()
        .map(|b| entries[b.row][b.col].coeffs()[b.power])
        .collect()
}

pub fn from_fp_coords(
    module: &DecomposedModule,
    basis: &[BasisIndex],
    coords: &[u64],
) -> EndoElement {
    let ring = module.ring;
    let n = module.rank();
    let mut entries = vec![vec![vec![0u64; ring.precision]; n]; n];
    for (b, &c) in basis.iter().zip(coords) {
        entries[b.row][b.col][b.power] = c % ring.prime;
    }
    let entries = entries
        .into_iter()
        .map(|row| row.into_iter().map(|v| AdicScalar::from_poly(ring, &v)).collect())
        .collect();
    EndoElement::from_entries(module.clone(), entries).expect("square by construction")
}

/// The `F_p`-matrix of `x -> compose(x, s)` on the ring basis.
pub fn right_mul_matrix(s: &EndoElement, basis: &[BasisIndex]) -> FpMatrix {
    let field = s.ring().field();
    let dim = basis.len();
    let mut m = FpMatrix::zero(field, dim, dim);
    for (col, b) in basis.iter().enumerate() {
        let image = compose(&basis_element(&s.module, *b), s);
        for (row, &c) in fp_coords(&image, basis).iter().enumerate() {
            m.set(row, col, c);
        }
    }
    m
}

/// The `F_p`-matrix of `x -> compose(s, x)` on the ring basis.
pub fn left_mul_matrix(s: &EndoElement, basis: &[BasisIndex]) -> FpMatrix {
    let field = s.ring().field();
    let dim = basis.len();
    let mut m = FpMatrix::zero(field, dim, dim);
    for (col, b) in basis.iter().enumerate() {
        let image = compose(s, &basis_element(&s.module, *b));
        for (row, &c) in fp_coords(&image, basis).iter().enumerate() {
            m.set(row, col, c);
        }
    }
    m
}

// ---------------------------------------------------------------------------
// finite topology

/// An open right ideal of the finite topology: the annihilator of
/// `⊕_{z in E} M_z`, i.e. all elements whose rows indexed by `E` vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenIdealDescriptor {
    pub rows: Vec<usize>,
}

impl OpenIdealDescriptor {
    pub fn new(mut rows: Vec<usize>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        OpenIdealDescriptor { rows }
    }

    /// First `k+1` summands: `ann(M_0 ⊕ … ⊕ M_k)`.
    pub fn leading(k: usize) -> Self {
        OpenIdealDescriptor { rows: (0..=k).collect() }
    }

    pub fn contains(&self, e: &EndoElement) -> bool {
        match &e.body {
            Body::Finite(entries) => self
                .rows
                .iter()
                .all(|&j| entries[j].iter().all(|x| x.is_zero())),
            Body::Pattern(m) => self.rows.iter().all(|&j| {
                m.row_support(j).iter().all(|&c| m.entry_at(j, c).is_zero())
            }),
        }
    }
}

/// A finitely described family of ring elements, indexed by a finite list
/// or by `ω`.
#[derive(Debug, Clone)]
pub enum ElementFamily {
    Finite(Vec<EndoElement>),
    /// Member `j` (for `j >= from`) is the sparse matrix with entries at
    /// `(j + row_off, j + col_off)` for each template triple.
    Template {
        module: DecomposedModule,
        templates: Vec<(i64, i64, AdicScalar)>,
        from: usize,
    },
    /// The same element repeated over `ω`.
    Repeat(EndoElement),
}

impl ElementFamily {
    pub fn module(&self) -> &DecomposedModule {
        match self {
            ElementFamily::Finite(v) => &v[0].module,
            ElementFamily::Template { module, .. } => module,
            ElementFamily::Repeat(e) => &e.module,
        }
    }

    /// Materialize member `j` of a template family.
    pub fn template_member(&self, j: usize) -> EndoElement {
        let ElementFamily::Template { module, templates, from } = self else {
            panic!("template_member on a non-template family")
        };
        assert!(j >= *from);
        let mut sparse = Vec::new();
        for (ro, co, v) in templates {
            let r = j as i64 + ro;
            let c = j as i64 + co;
            if r >= 0 && c >= 0 {
                sparse.push((r as usize, c as usize, v.clone()));
            }
        }
        EndoElement::from_pattern(module.clone(), PatternMatrix::from_sparse(module.ring, sparse))
    }

    /// Row window beyond which template members behave shift-invariantly.
    pub fn template_extent(&self) -> usize {
        let ElementFamily::Template { templates, from, .. } = self else {
            return 0;
        };
        let spread = templates
            .iter()
            .map(|(ro, co, _)| ro.unsigned_abs().max(co.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0);
        from + spread + 1
    }

    /// Sum of all members. For a template family this is a banded matrix:
    /// member `j` contributes `(j+ro, j+co)`, which traces out the band at
    /// offset `co - ro`.
    pub fn sum(&self) -> EndoElement {
        match self {
            ElementFamily::Finite(v) => {
                let mut acc = EndoElement::zero(&v[0].module);
                for e in v {
                    acc = acc.add(e);
                }
                acc
            }
            ElementFamily::Template { module, templates, from } => {
                let mut m = PatternMatrix::zero(module.ring);
                for (ro, co, v) in templates {
                    let offset = co - ro;
                    // first row index realized: j + ro with j >= from and
                    // all indices nonnegative
                    let j0 = (*from as i64).max(-ro).max(-co);
                    let row0 = (j0 + ro).max(0) as usize;
                    m.bands.push(Band { offset, entry: v.clone(), from: row0 });
                }
                EndoElement::from_pattern(module.clone(), m)
            }
            ElementFamily::Repeat(_) => panic!("sum of a repeated infinite family diverges"),
        }
    }
}

/// Zero-convergence in the finite topology, decided exactly from the family
/// description: every open ideal must contain all but finitely many members,
/// equivalently every row is touched by only finitely many members.
pub fn is_zero_convergent(family: &ElementFamily) -> bool {
    match family {
        ElementFamily::Finite(_) => true,
        // member j touches rows {j + ro}; for a fixed row only finitely many
        // j qualify, one per template triple
        ElementFamily::Template { .. } => true,
        ElementFamily::Repeat(e) => e.is_zero(),
    }
}

// ---------------------------------------------------------------------------
// Jacobson radical and the semisimple quotient

/// Membership in the topological Jacobson radical: every block entry is a
/// nonisomorphism. Blocks between non-isomorphic summands always are; a
/// block between isomorphic summands is an isomorphism iff its scalar is a
/// unit.
///
/// ```
/// use endoring::endo::{jacobson_membership, EndoElement};
/// use endoring::module::{DecomposedModule, LocalModule};
/// use endoring::scalar::{AdicScalar, RingDescriptor};
///
/// let ring = RingDescriptor::truncated(2, 2);
/// let m = DecomposedModule::finite(
///     ring,
///     vec![LocalModule::Torsion(2), LocalModule::Torsion(2)],
/// )
/// .unwrap();
/// let t = AdicScalar::parse(ring, "t").unwrap();
/// let zero = AdicScalar::parse(ring, "0").unwrap();
/// let h = EndoElement::from_entries(
///     m.clone(),
///     vec![vec![t.clone(), zero.clone()], vec![zero, t]],
/// )
/// .unwrap();
/// assert!(jacobson_membership(&h));
/// assert!(!jacobson_membership(&EndoElement::identity(&m)));
/// ```
pub fn jacobson_membership(h: &EndoElement) -> bool {
    match &h.body {
        Body::Finite(entries) => {
            let summands = h.module.finite_summands();
            for (j, row) in entries.iter().enumerate() {
                for (i, x) in row.iter().enumerate() {
                    if summands[j] == summands[i] && x.is_unit() {
                        return false;
                    }
                }
            }
            true
        }
        Body::Pattern(m) => m.all_entries_nonunit(),
    }
}

/// An element of `S = 𝔯/𝔥`: per iso-class, a matrix over the residue field
/// (row-finite banded matrix in the `ω` case).
#[derive(Debug, Clone, PartialEq)]
pub enum SemisimpleElement {
    Finite { module: DecomposedModule, classes: Vec<FpMatrix> },
    Pattern { module: DecomposedModule, body: PatternMatrix },
}

impl SemisimpleElement {
    pub fn identity(module: &DecomposedModule) -> Self {
        project_to_semisimple(&EndoElement::identity(module))
    }

    pub fn mul(&self, other: &SemisimpleElement) -> SemisimpleElement {
        match (self, other) {
            (
                SemisimpleElement::Finite { module, classes: a },
                SemisimpleElement::Finite { classes: b, .. },
            ) => SemisimpleElement::Finite {
                module: module.clone(),
                classes: a.iter().zip(b).map(|(x, y)| x.mul(y)).collect(),
            },
            (
                SemisimpleElement::Pattern { module, body: a },
                SemisimpleElement::Pattern { body: b, .. },
            ) => SemisimpleElement::Pattern { module: module.clone(), body: a.mul(b).residue() },
            _ => panic!("semisimple backend mismatch"),
        }
    }

    pub fn add(&self, other: &SemisimpleElement) -> SemisimpleElement {
        match (self, other) {
            (
                SemisimpleElement::Finite { module, classes: a },
                SemisimpleElement::Finite { classes: b, .. },
            ) => SemisimpleElement::Finite {
                module: module.clone(),
                classes: a.iter().zip(b).map(|(x, y)| x.add(y)).collect(),
            },
            (
                SemisimpleElement::Pattern { module, body: a },
                SemisimpleElement::Pattern { body: b, .. },
            ) => SemisimpleElement::Pattern { module: module.clone(), body: a.add(b).residue() },
            _ => panic!("semisimple backend mismatch"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SemisimpleElement::Finite { classes, .. } => classes.iter().all(|m| m.is_zero()),
            SemisimpleElement::Pattern { body, .. } => body.is_zero(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }

    /// Total residue rank; `None` when infinite (a pattern element with a
    /// nonzero band).
    pub fn rank(&self) -> Option<usize> {
        match self {
            SemisimpleElement::Finite { classes, .. } => {
                Some(classes.iter().map(|m| m.rank()).sum())
            }
            SemisimpleElement::Pattern { module, body } => {
                let c = body.canonical();
                if !c.bands.is_empty() {
                    return None;
                }
                if c.sparse.is_empty() {
                    return Some(0);
                }
                // finite support: collect touched indices into a dense matrix
                let mut idx: Vec<usize> = c
                    .sparse
                    .keys()
                    .flat_map(|&(r, cidx)| [r, cidx])
                    .collect();
                idx.sort_unstable();
                idx.dedup();
                let field = module.ring.field();
                let mut m = FpMatrix::zero(field, idx.len(), idx.len());
                for (&(r, cidx), v) in &c.sparse {
                    let ri = idx.binary_search(&r).unwrap();
                    let ci = idx.binary_search(&cidx).unwrap();
                    m.set(ri, ci, v.residue());
                }
                Some(m.rank())
            }
        }
    }
}

/// The surjective continuous ring homomorphism `𝔯 -> S = 𝔯/𝔥`; its kernel
/// is exactly `{h : jacobson_membership(h)}`.
pub fn project_to_semisimple(r: &EndoElement) -> SemisimpleElement {
    match &r.body {
        Body::Finite(entries) => {
            let module = r.module.clone();
            let field = module.ring.field();
            let classes = module
                .iso_classes()
                .iter()
                .map(|fiber| {
                    let mut m = FpMatrix::zero(field, fiber.len(), fiber.len());
                    for (a, &j) in fiber.iter().enumerate() {
                        for (b, &i) in fiber.iter().enumerate() {
                            m.set(a, b, entries[j][i].residue());
                        }
                    }
                    m
                })
                .collect();
            SemisimpleElement::Finite { module, classes }
        }
        Body::Pattern(m) => {
            SemisimpleElement::Pattern { module: r.module.clone(), body: m.residue() }
        }
    }
}

/// The continuous section of the projection: each residue entry lifts to
/// the constant scalar in the same-class position. Lifting preserves band
/// supports, hence zero-convergence of families.
pub fn section_lift(s: &SemisimpleElement) -> EndoElement {
    match s {
        SemisimpleElement::Finite { module, classes } => {
            let ring = module.ring;
            let n = module.rank();
            let mut entries = vec![vec![AdicScalar::zero(ring); n]; n];
            for (fiber, m) in module.iso_classes().iter().zip(classes) {
                for (a, &j) in fiber.iter().enumerate() {
                    for (b, &i) in fiber.iter().enumerate() {
                        entries[j][i] = AdicScalar::constant(ring, m.get(a, b));
                    }
                }
            }
            EndoElement::from_entries(module.clone(), entries).expect("square")
        }
        SemisimpleElement::Pattern { module, body } => {
            EndoElement::from_pattern(module.clone(), body.clone())
        }
    }
}

// ---------------------------------------------------------------------------
// invertibility

/// Certificate that a pattern element is not invertible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonInvertibleCert {
    /// The residue of some class block is singular (finite case) or a
    /// diagonal entry is a nonunit (pattern case).
    SingularResidue { detail: String },
    /// Solving `x * u = basis_row` forces ever-growing support: at each
    /// truncation level `n` the solution already has `support >= n`.
    SupportGrowth {
        row: usize,
        /// `(level, support size mod t^level)` pairs.
        levels: Vec<(usize, usize)>,
    },
}

#[derive(Debug, Clone)]
pub enum Invertibility {
    Invertible(Box<EndoElement>),
    NotInvertible(NonInvertibleCert),
    Unknown,
}

/// Decide invertibility. The truncated backend always decides: `u` is
/// invertible iff its residue is invertible per class, and then a
/// terminating Neumann series produces the exact inverse. The pattern
/// backend decides the banded cases described on the variants and returns
/// `Unknown` when cancellation between several support paths is possible.
pub fn decide_invertible(u: &EndoElement) -> Invertibility {
    match &u.body {
        Body::Finite(_) => decide_invertible_finite(u),
        Body::Pattern(m) => decide_invertible_pattern(&u.module, m),
    }
}

fn decide_invertible_finite(u: &EndoElement) -> Invertibility {
    let s = project_to_semisimple(u);
    let SemisimpleElement::Finite { module, classes } = &s else { unreachable!() };
    let mut inv_classes = Vec::new();
    for (x, m) in classes.iter().enumerate() {
        match m.inverse() {
            Some(inv) => inv_classes.push(inv),
            None => {
                return Invertibility::NotInvertible(NonInvertibleCert::SingularResidue {
                    detail: format!("residue block of iso-class {x} is singular"),
                })
            }
        }
    }
    let r0 = section_lift(&SemisimpleElement::Finite {
        module: module.clone(),
        classes: inv_classes,
    });
    // u*r0 = 1 - n with n in the radical; t is nilpotent, so the series ends
    let one = EndoElement::identity(module);
    let n = one.sub(&compose(u, &r0));
    debug_assert!(jacobson_membership(&n));
    let mut acc = one.clone();
    let mut power = n.clone();
    let cap = module.total_length() + 2;
    for _ in 0..cap {
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power);
        power = compose(&power, &n);
    }
    assert!(power.is_zero(), "Neumann series failed to terminate (internal bug)");
    let inverse = compose(&r0, &acc);
    debug_assert_eq!(compose(u, &inverse), one);
    debug_assert_eq!(compose(&inverse, u), one);
    Invertibility::Invertible(Box::new(inverse))
}

const SUPPORT_CERT_LEVELS: usize = 8;

fn decide_invertible_pattern(module: &DecomposedModule, m: &PatternMatrix) -> Invertibility {
    let ring = module.ring;
    let stable = m.stable_row();
    let c = m.canonical_from(stable);
    // diagonal values: prefix rows explicitly, then the eventual band entry
    let eventual_diag = c
        .bands
        .get(&0)
        .map(|(e, _)| e.clone())
        .unwrap_or_else(|| AdicScalar::zero(ring));
    let mut prefix_diag = Vec::new();
    for row in 0..stable {
        prefix_diag.push(m.entry_at(row, row));
    }
    let nonunit_diag = prefix_diag
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_unit())
        .map(|(r, _)| r)
        .or_else(|| if eventual_diag.is_unit() { None } else { Some(stable) });

    let offdiag_bands: Vec<(&i64, &(AdicScalar, usize))> =
        c.bands.iter().filter(|(off, _)| **off != 0).collect();
    let offdiag_sparse: Vec<(&(usize, usize), &AdicScalar)> =
        c.sparse.iter().filter(|((r, col), _)| r != col).collect();

    if offdiag_bands.is_empty() && offdiag_sparse.is_empty() {
        // purely diagonal
        return match nonunit_diag {
            Some(row) => Invertibility::NotInvertible(NonInvertibleCert::SingularResidue {
                detail: format!("nonunit diagonal entry at index {row}"),
            }),
            None => {
                let mut inv = PatternMatrix::band(
                    ring,
                    0,
                    eventual_diag.invert().expect("unit"),
                    stable,
                );
                for (row, v) in prefix_diag.iter().enumerate() {
                    inv.sparse.push((row, row, v.invert().expect("unit")));
                }
                Invertibility::Invertible(Box::new(EndoElement::from_pattern(
                    module.clone(),
                    inv,
                )))
            }
        };
    }

    if nonunit_diag.is_some() {
        return Invertibility::Unknown;
    }

    // single superdiagonal band of positive valuation, no sparse
    // perturbation: the unique solution of x*u = basis row has unbounded
    // support, so no row-finite inverse exists
    if offdiag_sparse.is_empty() && offdiag_bands.len() == 1 {
        let (&offset, (entry, _)) = offdiag_bands[0];
        if offset >= 1 && entry.valuation() >= 1 {
            let row = 0usize;
            let mut levels = Vec::new();
            for level in 1..=SUPPORT_CERT_LEVELS {
                // forward substitution for x * u = e_row along the band path;
                // x_{row + k*offset} has valuation k * val(entry)
                let mut support = 0usize;
                let mut val = 0usize;
                while val < level {
                    support += 1;
                    val += entry.valuation();
                }
                levels.push((level, support));
            }
            return Invertibility::NotInvertible(NonInvertibleCert::SupportGrowth {
                row,
                levels,
            });
        }
        return Invertibility::Unknown;
    }

    // strictly off-diagonal sparse-only defect: try a terminating Neumann
    // series
    if offdiag_bands.is_empty() {
        let mut diag_inv = PatternMatrix::band(
            ring,
            0,
            eventual_diag.invert().expect("unit"),
            stable,
        );
        for (row, v) in prefix_diag.iter().enumerate() {
            diag_inv.sparse.push((row, row, v.invert().expect("unit")));
        }
        let one = PatternMatrix::identity(ring);
        let defect = one.sub(&diag_inv.mul(m)); // strictly off-diagonal sparse
        let cap = c.sparse.len() + 2;
        let mut acc = one.clone();
        let mut power = defect.clone();
        for _ in 0..cap {
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
            power = power.mul(&defect);
        }
        if !power.is_zero() {
            return Invertibility::Unknown;
        }
        let inverse = acc.mul(&diag_inv);
        if m.mul(&inverse).equals(&one) && inverse.mul(m).equals(&one) {
            return Invertibility::Invertible(Box::new(EndoElement::from_pattern(
                module.clone(),
                inverse,
            )));
        }
        return Invertibility::Unknown;
    }

    Invertibility::Unknown
}

// ---------------------------------------------------------------------------
// locally split monomorphisms

/// Witness `g` with `(x·u)·g = x` for all `x` in the span of the summands
/// listed in `rows`, or `None` when the linear system is unsolvable.
///
/// In the pattern backend only upper-triangular banded `u` (unit diagonal,
/// bands of positive offset) are supported; other shapes report
/// `BackendUnsupported`.
pub fn is_locally_split_mono(
    u: &EndoElement,
    rows: &OpenIdealDescriptor,
) -> Result<Option<EndoElement>> {
    match &u.body {
        Body::Finite(_) => {
            let module = &u.module;
            let basis = ring_basis(module);
            let field = module.ring.field();
            // unknowns: coords of g; equations: rows E of u*g match identity
            let targets: Vec<usize> = basis
                .iter()
                .enumerate()
                .filter(|(_, b)| rows.rows.contains(&b.row))
                .map(|(i, _)| i)
                .collect();
            let mut a = FpMatrix::zero(field, targets.len(), basis.len());
            for (col, b) in basis.iter().enumerate() {
                let image = compose(u, &basis_element(module, *b));
                let coords = fp_coords(&image, &basis);
                for (r, &ti) in targets.iter().enumerate() {
                    a.set(r, col, coords[ti]);
                }
            }
            let identity = EndoElement::identity(module);
            let id_coords = fp_coords(&identity, &basis);
            let b: Vec<u64> = targets.iter().map(|&ti| id_coords[ti]).collect();
            Ok(a.solve(&b).map(|x| from_fp_coords(module, &basis, &x)))
        }
        Body::Pattern(m) => {
            let stable = m.stable_row();
            let c = m.canonical_from(stable);
            let unsupported = c.bands.iter().any(|(off, _)| *off < 0)
                || c.sparse.iter().any(|((r, col), _)| col < r);
            if unsupported {
                return Err(Error::Invalid(
                    "locally split mono witness: only upper-triangular banded \
                     pattern elements are supported"
                        .into(),
                ));
            }
            let max_row = rows.rows.iter().copied().max().unwrap_or(0);
            let max_off = c.bands.keys().map(|&o| o.max(0) as usize).max().unwrap_or(0);
            let sparse_reach = c.sparse.keys().map(|&(_, col)| col).max().unwrap_or(0);
            // rows of g we may need: E plus everything reachable through the
            // band fan-out, bounded because entries above the window vanish
            let bound = (max_row.max(stable) + (max_off + 1) * (max_row + 2))
                .max(sparse_reach)
                + 1;
            // back-substitute rows of g from the bottom of the window:
            //   sum_i u[j][i] * g[i][.] = e_j   for j in E
            let ring = module_ring(u);
            let mut g_rows: Vec<Option<Vec<(usize, AdicScalar)>>> = vec![None; bound + 1];
            for j in (0..=max_row).rev() {
                let diag = m.entry_at(j, j);
                if !diag.is_unit() {
                    return Ok(None);
                }
                let mut row: Vec<(usize, AdicScalar)> = Vec::new();
                if rows.rows.contains(&j) {
                    row.push((j, AdicScalar::one(ring)));
                }
                for i in m.row_support(j) {
                    if i == j {
                        continue;
                    }
                    let coef = m.entry_at(j, i);
                    if let Some(gi) = g_row(&mut g_rows, m, i, bound, ring)? {
                        for (col, v) in gi {
                            row.push((col, coef.mul(&v).neg()));
                        }
                    }
                }
                let dinv = diag.invert().expect("unit diagonal");
                let row: Vec<(usize, AdicScalar)> =
                    row.into_iter().map(|(cidx, v)| (cidx, v.mul(&dinv))).collect();
                g_rows[j] = Some(row);
            }
            let mut sparse = Vec::new();
            for (r, row) in g_rows.iter().enumerate() {
                if let Some(row) = row {
                    for (cidx, v) in row {
                        if !v.is_zero() {
                            sparse.push((r, *cidx, v.clone()));
                        }
                    }
                }
            }
            let g = EndoElement::from_pattern(
                u.module.clone(),
                PatternMatrix::from_sparse(ring, sparse),
            );
            // verify rows E of u*g against the identity on a window
            let prod = compose(u, &g);
            let pm = prod.pattern();
            for &j in &rows.rows {
                for col in pm.row_support(j) {
                    let v = pm.entry_at(j, col);
                    let expect = if col == j {
                        AdicScalar::one(ring)
                    } else {
                        AdicScalar::zero(ring)
                    };
                    if v != expect {
                        return Ok(None);
                    }
                }
                if pm.entry_at(j, j).is_zero() {
                    return Ok(None);
                }
            }
            Ok(Some(g))
        }
    }
}

fn module_ring(e: &EndoElement) -> RingDescriptor {
    e.module.ring
}

/// Recursively solve row `i` of the witness with zero boundary past the
/// window: `g[i] = d^{-1} (delta_{iE?}... )` — rows outside `E` satisfy the
/// homogeneous equation and are taken to be zero beyond the fan-out bound.
fn g_row(
    g_rows: &mut Vec<Option<Vec<(usize, AdicScalar)>>>,
    m: &PatternMatrix,
    i: usize,
    bound: usize,
    ring: RingDescriptor,
) -> Result<Option<Vec<(usize, AdicScalar)>>> {
    if i > bound {
        return Ok(None); // zero beyond the window
    }
    if let Some(row) = &g_rows[i] {
        return Ok(Some(row.clone()));
    }
    // homogeneous row: g[i] = -d^{-1} * sum_{k>i} u[i][k] g[k]; with the
    // zero boundary this recursion terminates at the window edge
    let diag = m.entry_at(i, i);
    if !diag.is_unit() {
        return Err(Error::Invalid("nonunit diagonal inside witness window".into()));
    }
    let mut row: Vec<(usize, AdicScalar)> = Vec::new();
    for k in m.row_support(i) {
        if k == i {
            continue;
        }
        let coef = m.entry_at(i, k);
        if let Some(gk) = g_row(g_rows, m, k, bound, ring)? {
            for (col, v) in gk {
                row.push((col, coef.mul(&v).neg()));
            }
        }
    }
    let dinv = diag.invert().expect("unit");
    let row: Vec<(usize, AdicScalar)> =
        row.into_iter().map(|(c, v)| (c, v.mul(&dinv))).collect();
    g_rows[i] = Some(row.clone());
    Ok(Some(row))
}

//! Radicals and projective covers of finitely generated discrete modules.

use endoring::covers::{
    projective_cover_fg, projective_cover_fg_contramodule, projective_cover_simple,
    radical_of_fg_discrete, FgDiscreteModule, Side,
};
use endoring::endo::{
    basis_element, compose, project_to_semisimple, radical_basis, ring_basis, EndoElement,
};
use endoring::error::Error;
use endoring::module::{DecomposedModule, LocalModule};
use endoring::scalar::{AdicScalar, RingDescriptor};

fn rt2_sq() -> DecomposedModule {
    let ring = RingDescriptor::truncated(2, 2);
    DecomposedModule::finite(ring, vec![LocalModule::Torsion(2), LocalModule::Torsion(2)])
        .unwrap()
}

#[test]
fn radical_of_cyclic_projective() {
    let m = rt2_sq();
    let e = EndoElement::summand_projector(&m, 0);
    let fg = FgDiscreteModule::cyclic(m.clone(), e.clone()).unwrap();
    let rad = radical_of_fg_discrete(&fg).unwrap();
    // e𝔯 has F₂-dimension 4 (two blocks of shape 2); the quotient is the
    // simple of the unique iso-class, of dimension 2
    assert_eq!(rad.module_dim, 4);
    assert_eq!(rad.module_dim - rad.radical_dim, 2);
    assert_eq!(rad.semisimple_multiplicities, vec![1]);
}

#[test]
fn radical_of_simple_is_zero() {
    let m = rt2_sq();
    let e = EndoElement::summand_projector(&m, 0);
    // e𝔯/e𝔥: quotient by all radical multiples of e
    let relations: Vec<Vec<EndoElement>> = radical_basis(&m)
        .into_iter()
        .map(|h| vec![compose(&e, &basis_element(&m, h))])
        .collect();
    let fg = FgDiscreteModule::new(m.clone(), vec![e], relations, Side::Right).unwrap();
    let rad = radical_of_fg_discrete(&fg).unwrap();
    assert_eq!(rad.radical_dim, 0);
    assert_eq!(rad.module_dim, 2);
}

#[test]
fn radical_of_direct_sum_is_componentwise() {
    let m = rt2_sq();
    let e = EndoElement::summand_projector(&m, 0);
    let f = EndoElement::summand_projector(&m, 1);
    let fg =
        FgDiscreteModule::new(m.clone(), vec![e, f], Vec::new(), Side::Right).unwrap();
    let rad = radical_of_fg_discrete(&fg).unwrap();
    assert_eq!(rad.module_dim, 8);
    assert_eq!(rad.module_dim - rad.radical_dim, 4);
    assert_eq!(rad.semisimple_multiplicities, vec![2]);
}

#[test]
fn cover_of_simple_class() {
    let m = rt2_sq();
    let e = EndoElement::summand_projector(&m, 0);
    let g = project_to_semisimple(&e);
    let cover = projective_cover_simple(&m, &g).unwrap();
    assert_eq!(cover.source, vec![e]);
    assert_eq!(cover.module_dim, 2);
    assert_eq!(cover.kernel_dim, 2);
    assert!(cover.kernel_in_radical);
    assert!(cover.residue_iso);
}

#[test]
fn cover_of_simple_over_local_ring() {
    // one summand R/t: 𝔯 = F₂ is local, the cover of the simple is 𝔯 itself
    let ring = RingDescriptor::truncated(2, 2);
    let m = DecomposedModule::finite(ring, vec![LocalModule::Torsion(1)]).unwrap();
    let id = EndoElement::identity(&m);
    let cover = projective_cover_simple(&m, &project_to_semisimple(&id)).unwrap();
    assert_eq!(cover.source, vec![id]);
    assert_eq!(cover.kernel_dim, 0);
}

#[test]
fn cover_rejects_nonprimitive_residue() {
    let m = rt2_sq();
    let id = EndoElement::identity(&m);
    assert!(matches!(
        projective_cover_simple(&m, &project_to_semisimple(&id)),
        Err(Error::NotPrimitiveResidue(_))
    ));
}

#[test]
fn cover_of_projective_is_identity_sized() {
    let m = rt2_sq();
    let e = EndoElement::summand_projector(&m, 0);
    let fg = FgDiscreteModule::cyclic(m.clone(), e.clone()).unwrap();
    let cover = projective_cover_fg(&fg).unwrap();
    assert_eq!(cover.source.len(), 1);
    assert_eq!(cover.source_dim, cover.module_dim);
    assert_eq!(cover.kernel_dim, 0);
    assert!(cover.residue_iso);
}

#[test]
fn radical_relation_does_not_change_the_cover() {
    let m = rt2_sq();
    let ring = m.ring;
    let e = EndoElement::summand_projector(&m, 0);
    let f = EndoElement::summand_projector(&m, 1);
    // one relation with entries in the radical
    let t01 = EndoElement::from_entries(
        m.clone(),
        vec![
            vec![AdicScalar::monomial(ring, 1, 1), AdicScalar::zero(ring)],
            vec![AdicScalar::zero(ring), AdicScalar::zero(ring)],
        ],
    )
    .unwrap();
    let t10 = EndoElement::from_entries(
        m.clone(),
        vec![
            vec![AdicScalar::zero(ring), AdicScalar::zero(ring)],
            vec![AdicScalar::monomial(ring, 1, 1), AdicScalar::zero(ring)],
        ],
    )
    .unwrap();
    let rel = vec![compose(&e, &t01), compose(&f, &t10)];
    let fg = FgDiscreteModule::new(m.clone(), vec![e, f], vec![rel], Side::Right).unwrap();
    let cover = projective_cover_fg(&fg).unwrap();
    // the relation lives in the radical, so M/M𝔥 still needs two copies
    assert_eq!(cover.source.len(), 2);
    assert!(cover.residue_iso);
    assert!(cover.kernel_in_radical);
    assert!(cover.kernel_dim > 0);
}

#[test]
fn contramodule_cover_mirrors_the_right_side() {
    let m = rt2_sq();
    let e = EndoElement::summand_projector(&m, 0);
    // 𝔯e/𝔥e: left presentation with radical relations
    let relations: Vec<Vec<EndoElement>> = radical_basis(&m)
        .into_iter()
        .map(|h| vec![compose(&basis_element(&m, h), &e)])
        .collect();
    let fg =
        FgDiscreteModule::new(m.clone(), vec![e.clone()], relations, Side::Left).unwrap();
    let cover = projective_cover_fg_contramodule(&fg).unwrap();
    assert_eq!(cover.side, Side::Left);
    assert_eq!(cover.source.len(), 1);
    assert_eq!(cover.module_dim, 2);
    assert_eq!(cover.kernel_dim, 2);
    assert!(cover.residue_iso);

    // identity cover of the projective 𝔯e
    let fg2 = FgDiscreteModule::new(m.clone(), vec![e], Vec::new(), Side::Left).unwrap();
    let cover2 = projective_cover_fg_contramodule(&fg2).unwrap();
    assert_eq!(cover2.kernel_dim, 0);
}

#[test]
fn cover_of_cover_source_is_identity() {
    let m = rt2_sq();
    let e = EndoElement::summand_projector(&m, 0);
    let f = EndoElement::summand_projector(&m, 1);
    let fg = FgDiscreteModule::new(m.clone(), vec![e, f], Vec::new(), Side::Right).unwrap();
    let cover = projective_cover_fg(&fg).unwrap();
    // feeding the cover source back in yields a kernel-free cover of the
    // same size
    let fg2 = FgDiscreteModule::new(m.clone(), cover.source.clone(), Vec::new(), Side::Right)
        .unwrap();
    let cover2 = projective_cover_fg(&fg2).unwrap();
    assert_eq!(cover2.source.len(), cover.source.len());
    assert_eq!(cover2.kernel_dim, 0);
    assert_eq!(cover2.source_dim, cover2.module_dim);
}

/// Desk-scale lattice finiteness: submodule spans of `𝔯e₁ ⊕ 𝔯e₂` at
/// `p = 2, N = 2` stabilize after finitely many generators from any
/// exhaustive family.
#[test]
fn submodule_chains_stabilize() {
    let m = rt2_sq();
    let basis = ring_basis(&m);
    let e1 = EndoElement::summand_projector(&m, 0);
    let e2 = EndoElement::summand_projector(&m, 1);
    // an exhaustive generating family: all pairs (b·e₁, b'·e₂)
    let mut family = Vec::new();
    for b in &basis {
        for b2 in &basis {
            family.push((
                compose(&basis_element(&m, *b), &e1),
                compose(&basis_element(&m, *b2), &e2),
            ));
        }
    }
    // greedily add generators while the left-module span grows; it must
    // stabilize well before the family is exhausted
    let mut span: Vec<(EndoElement, EndoElement)> = Vec::new();
    let mut used = 0usize;
    for (x, y) in &family {
        let in_span = span_contains(&m, &span, (x, y));
        if !in_span {
            span.push((x.clone(), y.clone()));
            used += 1;
        }
    }
    assert!(used <= 8, "needed {used} generators, expected a small finite number");
}

fn span_contains(
    m: &DecomposedModule,
    gens: &[(EndoElement, EndoElement)],
    target: (&EndoElement, &EndoElement),
) -> bool {
    // brute force over the F₂ span of {r·g : r in a ring basis, g in gens}
    // via coordinates
    use endoring::endo::fp_coords;
    let basis = ring_basis(m);
    let dim = basis.len();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for (x, y) in gens {
        for b in &basis {
            let r = basis_element(m, *b);
            let mut v = fp_coords(&compose(&r, x), &basis);
            v.extend(fp_coords(&compose(&r, y), &basis));
            rows.push(v);
        }
    }
    let mut t = fp_coords(target.0, &basis);
    t.extend(fp_coords(target.1, &basis));
    // gaussian elimination over F₂
    let width = 2 * dim;
    let mut pivots: Vec<(usize, Vec<u64>)> = Vec::new();
    for mut row in rows {
        for (p, prow) in &pivots {
            if row[*p] == 1 {
                for j in 0..width {
                    row[j] ^= prow[j];
                }
            }
        }
        if let Some(p) = row.iter().position(|&c| c == 1) {
            pivots.push((p, row));
        }
    }
    for (p, prow) in &pivots {
        if t[*p] == 1 {
            for j in 0..width {
                t[j] ^= prow[j];
            }
        }
    }
    t.iter().all(|&c| c == 0)
}

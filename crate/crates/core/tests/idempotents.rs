//! Idempotent calculus: lifting, orthogonalization, splitting, and the
//! exhaustive tiny-ring oracle for the locality classification.

use endoring::endo::{compose, project_to_semisimple, EndoElement, OpenIdealDescriptor};
use endoring::error::Error;
use endoring::idem::{
    certify_semiperfect, classify_idempotent, hensel_lift_idempotent, lift_primitive_family,
    orthogonalize_finite_family, orthogonalize_template_family, push_family_through_quotient,
    split_idempotent, IdempotentClass,
};
use endoring::module::{DecomposedModule, LocalModule};
use endoring::scalar::{AdicScalar, RingDescriptor};

fn rt4_sq() -> DecomposedModule {
    let ring = RingDescriptor::truncated(2, 4);
    DecomposedModule::finite(ring, vec![LocalModule::Torsion(4), LocalModule::Torsion(4)])
        .unwrap()
}

fn elem(module: &DecomposedModule, entries: [[&str; 2]; 2]) -> EndoElement {
    let ring = module.ring;
    let rows = entries
        .iter()
        .map(|row| row.iter().map(|s| AdicScalar::parse(ring, s).unwrap()).collect())
        .collect();
    EndoElement::from_entries(module.clone(), rows).unwrap()
}

#[test]
fn classification_examples() {
    let ring = RingDescriptor::truncated(2, 2);
    let m =
        DecomposedModule::finite(ring, vec![LocalModule::Torsion(2), LocalModule::Torsion(2)])
            .unwrap();
    let e11 = EndoElement::summand_projector(&m, 0);
    assert_eq!(classify_idempotent(&e11), IdempotentClass::LocalIdempotent);
    let id = EndoElement::identity(&m);
    assert_eq!(classify_idempotent(&id), IdempotentClass::Idempotent);

    let m4 = rt4_sq();
    let bad = elem(&m4, [["1", "t"], ["t", "t^2"]]);
    assert_eq!(classify_idempotent(&bad), IdempotentClass::NotIdempotent);
}

#[test]
fn hensel_lift_examples() {
    let m = rt4_sq();
    let seed = elem(&m, [["1", "t"], ["t", "t^2"]]);
    let lifted = hensel_lift_idempotent(&seed).unwrap();
    let expected = elem(&m, [["1 + t^2", "t + t^3"], ["t + t^3", "t^2"]]);
    assert_eq!(lifted, expected);
    assert_eq!(compose(&lifted, &lifted), lifted);
    assert_eq!(project_to_semisimple(&lifted), project_to_semisimple(&seed));

    // already idempotent seeds come back unchanged
    let idem = elem(&m, [["1", "1"], ["0", "0"]]);
    assert_eq!(compose(&idem, &idem), idem);
    assert_eq!(hensel_lift_idempotent(&idem).unwrap(), idem);
}

#[test]
fn hensel_rejects_bad_residue() {
    let m = rt4_sq();
    // residue [[0,1],[0,0]] is nilpotent, not idempotent
    let seed = elem(&m, [["0", "1"], ["0", "0"]]);
    assert!(matches!(hensel_lift_idempotent(&seed), Err(Error::ResidueNotIdempotent)));
}

#[test]
fn lift_primitive_family_worked_example() {
    let m = rt4_sq();
    let f1 = elem(&m, [["1", "t"], ["0", "0"]]);
    let f2 = elem(&m, [["0", "0"], ["0", "1"]]);
    let out = lift_primitive_family(&[f1.clone(), f2.clone()]).unwrap();
    let e1 = &out.members[0].element;
    let e2 = &out.members[1].element;
    assert_eq!(*e1, elem(&m, [["1", "t"], ["0", "0"]]));
    assert_eq!(*e2, elem(&m, [["0", "t"], ["0", "1"]]));
    assert!(out.family.complete);
    // membership witnesses solve x·f = e exactly
    assert_eq!(compose(&out.members[0].witness, &f1), *e1);
    assert_eq!(compose(&out.members[1].witness, &f2), *e2);
    out.family.validate().unwrap();
}

#[test]
fn lift_primitive_family_rejects_zero_residue() {
    let m = rt4_sq();
    let f = elem(&m, [["t", "0"], ["0", "0"]]);
    assert!(matches!(lift_primitive_family(&[f]), Err(Error::NotPrimitiveResidue(0))));
}

#[test]
fn lift_keeps_orthogonal_family_unchanged() {
    let m = rt4_sq();
    let e1 = EndoElement::summand_projector(&m, 0);
    let e2 = EndoElement::summand_projector(&m, 1);
    let out = lift_primitive_family(&[e1.clone(), e2.clone()]).unwrap();
    assert_eq!(out.members[0].element, e1);
    assert_eq!(out.members[1].element, e2);
}

#[test]
fn orthogonalize_worked_example() {
    let m = rt4_sq();
    let f1 = elem(&m, [["1", "t"], ["0", "0"]]);
    let f2 = elem(&m, [["0", "0"], ["0", "1"]]);
    let out = orthogonalize_finite_family(&[f1, f2]).unwrap();
    assert_eq!(out.members[0].element, elem(&m, [["1", "t"], ["0", "0"]]));
    assert_eq!(out.members[1].element, elem(&m, [["0", "t"], ["0", "1"]]));
    let sum = out.members[0].element.add(&out.members[1].element);
    assert_eq!(sum, EndoElement::identity(&m));
}

#[test]
fn bad_lifting_fails_with_noninvertible_sum() {
    let ring = RingDescriptor::pattern(2);
    let m = DecomposedModule::free_omega(ring).unwrap();
    let one = AdicScalar::one(ring);
    let t = AdicScalar::monomial(ring, 1, 1);
    // e′_j = E_jj − t·E_{j,j+1}: idempotents lifting the coordinate
    // projectors whose sum is 1 − h, not invertible
    let templates = vec![(0i64, 0i64, one), (0, 1, t.neg())];
    match orthogonalize_template_family(&m, &templates, 0) {
        Err(Error::NonInvertibleSum(_)) => {}
        other => panic!("expected NonInvertibleSum, got {other:?}"),
    }
}

#[test]
fn good_lifting_passes_orthogonality() {
    let ring = RingDescriptor::pattern(2);
    let m = DecomposedModule::free_omega(ring).unwrap();
    let templates = vec![(0i64, 0i64, AdicScalar::one(ring))];
    let family = orthogonalize_template_family(&m, &templates, 0).unwrap();
    assert!(family.complete);
}

#[test]
fn split_identity_into_matrix_units() {
    let ring = RingDescriptor::truncated(2, 2);
    let m =
        DecomposedModule::finite(ring, vec![LocalModule::Torsion(2), LocalModule::Torsion(2)])
            .unwrap();
    let id = EndoElement::identity(&m);
    let chain = vec![OpenIdealDescriptor::leading(0), OpenIdealDescriptor::leading(1)];
    let out = split_idempotent(&id, &chain).unwrap();
    assert_eq!(out.family.head.len(), 2);
    assert!(out.family.complete);
    for (i, mem) in out.members.iter().enumerate() {
        assert_eq!(classify_idempotent(&mem.element), IdempotentClass::LocalIdempotent);
        assert_eq!(
            out.remainders[i].contained,
            Some(true),
            "remainder {i} escaped its chain ideal"
        );
    }
    assert!(out.remainders.last().unwrap().element.is_zero());
}

#[test]
fn split_single_projector_is_itself() {
    let m = rt4_sq();
    let e = EndoElement::summand_projector(&m, 0);
    let out = split_idempotent(&e, &[]).unwrap();
    assert_eq!(out.family.head, vec![e]);
}

#[test]
fn split_nontrivial_corner_idempotent() {
    let m = rt4_sq();
    let e = elem(&m, [["1 + t^2", "t + t^3"], ["t + t^3", "t^2"]]);
    assert_eq!(compose(&e, &e), e);
    let out = split_idempotent(&e, &[]).unwrap();
    let mut sum = EndoElement::zero(&m);
    for mem in &out.members {
        assert_eq!(classify_idempotent(&mem.element), IdempotentClass::LocalIdempotent);
        sum = sum.add(&mem.element);
    }
    assert_eq!(sum, e);
}

#[test]
fn split_identity_pattern_gives_coordinate_projectors() {
    let ring = RingDescriptor::pattern(2);
    let m = DecomposedModule::free_omega(ring).unwrap();
    let id = EndoElement::identity(&m);
    let out = split_idempotent(&id, &[]).unwrap();
    assert!(out.family.complete);
    let tail = out.family.tail.as_ref().unwrap();
    assert_eq!(tail.from, 0);
    let e3 = out.family.tail_member(3);
    assert_eq!(compose(&e3, &e3), e3);
}

#[test]
fn certify_semiperfect_examples() {
    let ring = RingDescriptor::truncated(2, 2);
    let m =
        DecomposedModule::finite(ring, vec![LocalModule::Torsion(2), LocalModule::Torsion(2)])
            .unwrap();
    let fam = certify_semiperfect(&m).unwrap();
    assert_eq!(fam.head.len(), 2);
    assert!(fam.complete);

    let ring3 = RingDescriptor::truncated(2, 2);
    let m3 = DecomposedModule::finite(
        ring3,
        vec![LocalModule::Torsion(1), LocalModule::Torsion(2), LocalModule::Torsion(2)],
    )
    .unwrap();
    let fam3 = certify_semiperfect(&m3).unwrap();
    assert_eq!(fam3.head.len(), 3);
    assert_eq!(m3.iso_classes(), vec![vec![0], vec![1, 2]]);

    let mw = DecomposedModule::free_omega(RingDescriptor::pattern(2)).unwrap();
    let famw = certify_semiperfect(&mw).unwrap();
    assert!(famw.complete);
}

#[test]
fn push_family_to_coarser_precision() {
    let m = rt4_sq();
    let fam = certify_semiperfect(&m).unwrap();
    let pushed = push_family_through_quotient(&fam, 2).unwrap();
    assert_eq!(pushed.module.ring.precision, 2);
    assert_eq!(pushed.head.len(), 2);
    assert!(pushed.complete);
    pushed.validate().unwrap();

    // a family with radical tails keeps all members: nonzero idempotents
    // have unit entries, which survive truncation
    let f1 = elem(&m, [["1", "t"], ["0", "0"]]);
    let f2 = elem(&m, [["0", "0"], ["0", "1"]]);
    let out = lift_primitive_family(&[f1, f2]).unwrap();
    let pushed = push_family_through_quotient(&out.family, 2).unwrap();
    assert_eq!(pushed.head.len(), 2);
    assert!(pushed.complete);
}

/// Exhaustive oracle at the smallest interesting size: for `M = R/t ⊕ R/t`
/// over `p = 2`, `N = 2`, the endomorphism ring is `Mat₂(F₂)` (16 elements).
/// The classifier's notion of local idempotent must agree with the
/// brute-force one: `e² = e` and `e𝔯e` has a unique maximal right ideal.
#[test]
fn tiny_ring_locality_oracle() {
    let ring = RingDescriptor::truncated(2, 2);
    let m =
        DecomposedModule::finite(ring, vec![LocalModule::Torsion(1), LocalModule::Torsion(1)])
            .unwrap();
    let all: Vec<EndoElement> = (0..16u32)
        .map(|mask| {
            let bits: Vec<u64> = (0..4).map(|k| ((mask >> k) & 1) as u64).collect();
            let entries = vec![
                vec![
                    AdicScalar::constant(ring, bits[0]),
                    AdicScalar::constant(ring, bits[1]),
                ],
                vec![
                    AdicScalar::constant(ring, bits[2]),
                    AdicScalar::constant(ring, bits[3]),
                ],
            ];
            EndoElement::from_entries(m.clone(), entries).unwrap()
        })
        .collect();

    for e in &all {
        let classified_local =
            classify_idempotent(e) == IdempotentClass::LocalIdempotent;
        let brute_local = if compose(e, e) != *e || e.is_zero() {
            false
        } else {
            // corner ring e𝔯e
            let corner: Vec<EndoElement> = {
                let mut v: Vec<EndoElement> = Vec::new();
                for r in &all {
                    let x = compose(&compose(e, r), e);
                    if !v.contains(&x) {
                        v.push(x);
                    }
                }
                v
            };
            // right ideals of the corner: subsets closed under subtraction
            // and right multiplication by corner elements
            let n = corner.len();
            let ideals: Vec<Vec<usize>> = (0..(1u32 << n))
                .filter_map(|mask| {
                    let idx: Vec<usize> =
                        (0..n).filter(|k| (mask >> k) & 1 == 1).collect();
                    if !idx.iter().any(|&k| corner[k].is_zero()) {
                        return None;
                    }
                    for &a in &idx {
                        for &b in &idx {
                            let s = corner[a].sub(&corner[b]);
                            if !idx.iter().any(|&k| corner[k] == s) {
                                return None;
                            }
                        }
                        for r in &corner {
                            let p = compose(&corner[a], r);
                            if !idx.iter().any(|&k| corner[k] == p) {
                                return None;
                            }
                        }
                    }
                    Some(idx)
                })
                .collect();
            let full = corner.len();
            let proper: Vec<&Vec<usize>> =
                ideals.iter().filter(|i| i.len() < full).collect();
            let maximal: Vec<&&Vec<usize>> = proper
                .iter()
                .filter(|i| {
                    !proper.iter().any(|j| {
                        j.len() > i.len() && i.iter().all(|k| j.contains(k))
                    })
                })
                .collect();
            maximal.len() == 1
        };
        assert_eq!(classified_local, brute_local, "disagreement on {e:?}");
    }
}

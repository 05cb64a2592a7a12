//! The endomorphism ring: composition, the finite topology, Jacobson
//! radical membership, the semisimple quotient and its section,
//! invertibility decisions, and locally split monomorphism witnesses.

use endoring::endo::{
    basis_element, compose, decide_invertible, from_fp_coords, is_locally_split_mono,
    is_zero_convergent, jacobson_membership, project_to_semisimple, radical_basis, ring_basis,
    section_lift, ElementFamily, EndoElement, Invertibility, NonInvertibleCert,
    OpenIdealDescriptor, PatternMatrix, SemisimpleElement,
};
use endoring::fp::FpMatrix;
use endoring::module::{DecomposedModule, LocalModule};
use endoring::scalar::{AdicScalar, RingDescriptor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rt2_sq() -> DecomposedModule {
    let ring = RingDescriptor::truncated(2, 2);
    DecomposedModule::finite(ring, vec![LocalModule::Torsion(2), LocalModule::Torsion(2)])
        .unwrap()
}

fn mixed() -> DecomposedModule {
    let ring = RingDescriptor::truncated(2, 2);
    DecomposedModule::finite(ring, vec![LocalModule::Torsion(1), LocalModule::Torsion(2)])
        .unwrap()
}

fn omega2() -> DecomposedModule {
    DecomposedModule::free_omega(RingDescriptor::pattern(2)).unwrap()
}

fn sc(ring: RingDescriptor, s: &str) -> AdicScalar {
    AdicScalar::parse(ring, s).unwrap()
}

fn elem(m: &DecomposedModule, rows: &[&[&str]]) -> EndoElement {
    let entries = rows
        .iter()
        .map(|r| r.iter().map(|s| sc(m.ring, s)).collect())
        .collect();
    EndoElement::from_entries(m.clone(), entries).unwrap()
}

fn random_element(m: &DecomposedModule, rng: &mut ChaCha8Rng) -> EndoElement {
    let basis = ring_basis(m);
    let coords: Vec<u64> = (0..basis.len()).map(|_| rng.gen_range(0..m.ring.prime)).collect();
    from_fp_coords(m, &basis, &coords)
}

fn random_radical_element(m: &DecomposedModule, rng: &mut ChaCha8Rng) -> EndoElement {
    let basis = radical_basis(m);
    let mut acc = EndoElement::zero(m);
    for b in basis {
        let c = rng.gen_range(0..m.ring.prime);
        acc = acc.add(&basis_element(m, b).scale(&AdicScalar::monomial(m.ring, c, 0)));
    }
    acc
}

// ---------------------------------------------------------------------------
// composition

#[test]
fn identity_is_neutral() {
    let m = rt2_sq();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let id = EndoElement::identity(&m);
    for _ in 0..10 {
        let s = random_element(&m, &mut rng);
        assert_eq!(compose(&id, &s), s);
        assert_eq!(compose(&s, &id), s);
    }
}

#[test]
fn right_action_convention_on_elementary_matrices() {
    // "first act by r, then by s": compose(E01, E10) = E00
    let m = rt2_sq();
    let r = elem(&m, &[&["0", "1"], &["0", "0"]]);
    let s = elem(&m, &[&["0", "0"], &["1", "0"]]);
    assert_eq!(compose(&r, &s), elem(&m, &[&["1", "0"], &["0", "0"]]));
}

#[test]
fn shift_band_composition_adds_offsets() {
    let m = omega2();
    let ring = m.ring;
    let shift = EndoElement::from_pattern(
        m.clone(),
        PatternMatrix::band(ring, 1, sc(ring, "t"), 0),
    );
    let sq = compose(&shift, &shift);
    assert!(sq
        .pattern()
        .equals(&PatternMatrix::band(ring, 2, sc(ring, "t^2"), 0)));
}

#[test]
fn composition_is_associative() {
    let m = rt2_sq();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..25 {
        let a = random_element(&m, &mut rng);
        let b = random_element(&m, &mut rng);
        let c = random_element(&m, &mut rng);
        assert_eq!(compose(&compose(&a, &b), &c), compose(&a, &compose(&b, &c)));
    }
}

#[test]
fn pattern_composition_is_associative() {
    let m = omega2();
    let ring = m.ring;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let random_pattern = |rng: &mut ChaCha8Rng| {
        let mut p = PatternMatrix::zero(ring);
        for _ in 0..rng.gen_range(1..3) {
            let offset = rng.gen_range(-2..3);
            let entry = AdicScalar::monomial(ring, 1, rng.gen_range(0..3));
            p = p.add(&PatternMatrix::band(ring, offset, entry, rng.gen_range(0..3)));
        }
        if rng.gen_bool(0.5) {
            p = p.add(&PatternMatrix::from_sparse(
                ring,
                vec![(rng.gen_range(0..4), rng.gen_range(0..4), sc(ring, "1"))],
            ));
        }
        EndoElement::from_pattern(m.clone(), p)
    };
    for _ in 0..15 {
        let a = random_pattern(&mut rng);
        let b = random_pattern(&mut rng);
        let c = random_pattern(&mut rng);
        assert_eq!(compose(&compose(&a, &b), &c), compose(&a, &compose(&b, &c)));
    }
}

#[test]
fn transpose_reverses_composition() {
    let m = mixed();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let a = random_element(&m, &mut rng);
        let b = random_element(&m, &mut rng);
        assert_eq!(
            compose(&a, &b).transpose(),
            compose(&b.transpose(), &a.transpose())
        );
        assert_eq!(a.transpose().transpose(), a);
    }
}

// ---------------------------------------------------------------------------
// finite topology

#[test]
fn zero_convergence_of_families() {
    let m = omega2();
    let finite = ElementFamily::Finite(vec![EndoElement::identity(&rt2_sq())]);
    assert!(is_zero_convergent(&finite));

    // coordinate projectors e_j on ⊕_ω Free
    let projectors = ElementFamily::Template {
        module: m.clone(),
        templates: vec![(0, 0, sc(m.ring, "1"))],
        from: 0,
    };
    assert!(is_zero_convergent(&projectors));

    let constant = ElementFamily::Repeat(EndoElement::identity(&m));
    assert!(!is_zero_convergent(&constant));
    assert!(is_zero_convergent(&ElementFamily::Repeat(EndoElement::zero(&m))));
}

#[test]
fn open_ideal_membership() {
    let m = rt2_sq();
    let e0 = EndoElement::summand_projector(&m, 0);
    let ann0 = OpenIdealDescriptor::new(vec![0]);
    let ann1 = OpenIdealDescriptor::new(vec![1]);
    assert!(!ann0.contains(&e0));
    assert!(ann1.contains(&e0));
}

// ---------------------------------------------------------------------------
// Jacobson radical and the semisimple quotient

#[test]
fn radical_membership_examples() {
    let m = rt2_sq();
    assert!(!jacobson_membership(&EndoElement::identity(&m)));
    assert!(jacobson_membership(&elem(&m, &[&["t", "0"], &["0", "t"]])));

    // on R/t ⊕ R/t², the canonical surjection R/t² → R/t sits in a
    // cross-class block and is never an isomorphism
    let mx = mixed();
    let surj = elem(&mx, &[&["0", "0"], &["1", "0"]]);
    assert!(jacobson_membership(&surj));
}

#[test]
fn semisimple_projection_examples() {
    let m = rt2_sq();
    let r = elem(&m, &[&["1 + t", "t"], &["0", "t"]]);
    let s = project_to_semisimple(&r);
    let SemisimpleElement::Finite { classes, .. } = &s else { panic!() };
    assert_eq!(classes.len(), 1);
    let field = m.ring.field();
    assert_eq!(classes[0], FpMatrix::from_rows(field, vec![vec![1, 0], vec![0, 0]]));

    let id = EndoElement::identity(&m);
    assert_eq!(project_to_semisimple(&id), SemisimpleElement::identity(&m));

    // mixed module: two singleton classes, diagonal residues
    let mx = mixed();
    let r2 = elem(&mx, &[&["1", "0"], &["1", "1 + t"]]);
    let SemisimpleElement::Finite { classes, .. } = project_to_semisimple(&r2) else {
        panic!()
    };
    assert_eq!(classes.len(), 2);
    let fx = mx.ring.field();
    assert_eq!(classes[0], FpMatrix::from_rows(fx, vec![vec![1]]));
    assert_eq!(classes[1], FpMatrix::from_rows(fx, vec![vec![1]]));
}

#[test]
fn projection_is_multiplicative_with_radical_kernel() {
    let m = mixed();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let a = random_element(&m, &mut rng);
        let b = random_element(&m, &mut rng);
        assert_eq!(
            project_to_semisimple(&compose(&a, &b)),
            project_to_semisimple(&a).mul(&project_to_semisimple(&b))
        );
        // the kernel is exactly the radical
        assert_eq!(project_to_semisimple(&a).is_zero(), jacobson_membership(&a));
    }
}

#[test]
fn section_splits_the_projection() {
    let m = rt2_sq();
    let id = EndoElement::identity(&m);
    assert_eq!(section_lift(&project_to_semisimple(&id)), id);

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let a = random_element(&m, &mut rng);
        let s = project_to_semisimple(&a);
        assert_eq!(project_to_semisimple(&section_lift(&s)), s);
    }
}

#[test]
fn radical_is_a_two_sided_ideal() {
    let m = mixed();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let h1 = random_radical_element(&m, &mut rng);
        let h2 = random_radical_element(&m, &mut rng);
        let r = random_element(&m, &mut rng);
        assert!(jacobson_membership(&h1.add(&h2)));
        assert!(jacobson_membership(&compose(&h1, &r)));
        assert!(jacobson_membership(&compose(&r, &h1)));
    }
}

#[test]
fn no_nonzero_idempotent_in_the_radical() {
    let m = rt2_sq();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..40 {
        let h = random_radical_element(&m, &mut rng);
        if compose(&h, &h) == h {
            assert!(h.is_zero());
        }
    }
}

// ---------------------------------------------------------------------------
// invertibility

#[test]
fn identity_is_invertible() {
    let m = rt2_sq();
    let id = EndoElement::identity(&m);
    match decide_invertible(&id) {
        Invertibility::Invertible(inv) => assert_eq!(*inv, id),
        _ => panic!("identity must be invertible"),
    }
}

#[test]
fn neumann_series_inverse() {
    // 1 − diag(t, t) on (R/t⁴)² inverts to diag(1 + t + t² + t³, …)
    let ring = RingDescriptor::truncated(2, 4);
    let m = DecomposedModule::finite(
        ring,
        vec![LocalModule::Torsion(4), LocalModule::Torsion(4)],
    )
    .unwrap();
    let u = elem(&m, &[&["1 + t", "0"], &["0", "1 + t"]]);
    match decide_invertible(&u) {
        Invertibility::Invertible(inv) => {
            let want = elem(
                &m,
                &[&["1 + t + t^2 + t^3", "0"], &["0", "1 + t + t^2 + t^3"]],
            );
            assert_eq!(*inv, want);
            assert_eq!(compose(&u, &inv), EndoElement::identity(&m));
            assert_eq!(compose(&inv, &u), EndoElement::identity(&m));
        }
        _ => panic!("1 - nilpotent must be invertible"),
    }
}

#[test]
fn singular_residue_is_rejected() {
    let m = rt2_sq();
    let u = elem(&m, &[&["t", "0"], &["0", "1"]]);
    assert!(matches!(
        decide_invertible(&u),
        Invertibility::NotInvertible(NonInvertibleCert::SingularResidue { .. })
    ));
}

#[test]
fn quasiregularity_over_the_truncated_backend() {
    // 1 − h·r is invertible for every radical h and arbitrary r
    let m = mixed();
    let id = EndoElement::identity(&m);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..25 {
        let h = random_radical_element(&m, &mut rng);
        let r = random_element(&m, &mut rng);
        let u = id.sub(&compose(&h, &r));
        match decide_invertible(&u) {
            Invertibility::Invertible(inv) => {
                assert_eq!(compose(&u, &inv), id);
            }
            _ => panic!("1 - h*r must be invertible over a truncated ring"),
        }
    }
}

#[test]
fn support_growth_certificate() {
    // u = 1 − h with h the single band (offset +1, entry t): solving
    // x·u = b₀ forces x_i = t^i, so supports grow with the truncation level
    let m = omega2();
    let ring = m.ring;
    let h = EndoElement::from_pattern(m.clone(), PatternMatrix::band(ring, 1, sc(ring, "t"), 0));
    let u = EndoElement::identity(&m).sub(&h);
    match decide_invertible(&u) {
        Invertibility::NotInvertible(NonInvertibleCert::SupportGrowth { row, levels }) => {
            assert_eq!(row, 0);
            assert!(levels.len() >= 4);
            for &(level, support) in &levels {
                assert!(support >= level);
            }
        }
        _ => panic!("expected a support-growth certificate"),
    }
}

// ---------------------------------------------------------------------------
// locally split monomorphisms and the radical gap

#[test]
fn identity_is_locally_split() {
    let m = rt2_sq();
    let id = EndoElement::identity(&m);
    let g = is_locally_split_mono(&id, &OpenIdealDescriptor::leading(1))
        .unwrap()
        .expect("identity splits");
    assert_eq!(compose(&id, &g), id);
}

#[test]
fn zero_row_is_not_locally_split() {
    let m = rt2_sq();
    // row 0 of the second projector vanishes
    let u = EndoElement::summand_projector(&m, 1);
    let g = is_locally_split_mono(&u, &OpenIdealDescriptor::new(vec![0])).unwrap();
    assert!(g.is_none());
}

#[test]
fn radical_gap_on_the_free_omega_module() {
    // the gap element: h in the topological radical 𝔥, yet 1 − h is not
    // invertible, so h is outside the abstract radical H; locally split
    // witnesses certify 𝔥-membership positively
    let m = omega2();
    let ring = m.ring;
    let h = EndoElement::from_pattern(m.clone(), PatternMatrix::band(ring, 1, sc(ring, "t"), 0));
    assert!(jacobson_membership(&h));

    let u = EndoElement::identity(&m).sub(&h);
    assert!(matches!(
        decide_invertible(&u),
        Invertibility::NotInvertible(NonInvertibleCert::SupportGrowth { .. })
    ));

    for k in 0..4 {
        let rows = OpenIdealDescriptor::leading(k);
        let g = is_locally_split_mono(&u, &rows)
            .unwrap()
            .unwrap_or_else(|| panic!("1 - h must split on the first {} rows", k + 1));
        // (x·u)·g = x for x supported on the leading rows: the leading rows
        // of u·g agree with the identity
        let ug = compose(&u, &g);
        for j in 0..=k {
            for c in ug.pattern().row_support(j) {
                let want = if c == j { sc(ring, "1") } else { sc(ring, "0") };
                assert_eq!(ug.pattern().entry_at(j, c), want);
            }
            assert_eq!(ug.pattern().entry_at(j, j), sc(ring, "1"));
        }
    }
}

// ---------------------------------------------------------------------------
// small-ring oracle

/// Exhaustive cross-check at `M = (R/t)²`: the endomorphism ring is
/// `Mat₂(F₂)` with 16 elements. Enumerate every subset closed under
/// addition and right multiplication (the right ideals), take the maximal
/// proper ones, and compare their intersection with the membership
/// predicate.
#[test]
fn radical_matches_maximal_right_ideal_intersection() {
    let ring = RingDescriptor::truncated(2, 1);
    let m = DecomposedModule::finite(ring, vec![LocalModule::Torsion(1), LocalModule::Torsion(1)])
        .unwrap();
    let basis = ring_basis(&m);
    assert_eq!(basis.len(), 4);

    // all 16 ring elements, indexed by their coordinate bitmask
    let elements: Vec<EndoElement> = (0..16u32)
        .map(|mask| {
            let coords: Vec<u64> = (0..4).map(|i| ((mask >> i) & 1) as u64).collect();
            from_fp_coords(&m, &basis, &coords)
        })
        .collect();
    let index_of = |e: &EndoElement| -> usize {
        elements.iter().position(|x| x == e).expect("closed ring")
    };
    let mut add_table = [[0usize; 16]; 16];
    let mut mul_table = [[0usize; 16]; 16];
    for i in 0..16 {
        for j in 0..16 {
            add_table[i][j] = index_of(&elements[i].add(&elements[j]));
            mul_table[i][j] = index_of(&compose(&elements[i], &elements[j]));
        }
    }

    // subsets as 16-bit masks; right ideals contain 0 and are closed under
    // addition and right multiplication by every ring element
    let mut right_ideals: Vec<u32> = Vec::new();
    'subset: for sub in 0..(1u32 << 16) {
        if sub & 1 == 0 {
            continue; // must contain 0
        }
        for i in 0..16 {
            if (sub >> i) & 1 == 0 {
                continue;
            }
            for j in 0..16 {
                if (sub >> j) & 1 == 1 && (sub >> add_table[i][j]) & 1 == 0 {
                    continue 'subset;
                }
                if (sub >> mul_table[i][j]) & 1 == 0 {
                    continue 'subset;
                }
            }
        }
        right_ideals.push(sub);
    }

    let full = (1u32 << 16) - 1;
    let maximal: Vec<u32> = right_ideals
        .iter()
        .copied()
        .filter(|&i| i != full)
        .filter(|&i| {
            // no proper right ideal strictly above i
            !right_ideals
                .iter()
                .any(|&j| j != i && j != full && j & i == i)
        })
        .collect();
    assert!(!maximal.is_empty());

    let intersection = maximal.iter().fold(full, |acc, &i| acc & i);
    for (k, e) in elements.iter().enumerate() {
        let in_intersection = (intersection >> k) & 1 == 1;
        assert_eq!(in_intersection, jacobson_membership(e));
    }
}

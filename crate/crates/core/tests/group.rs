use cayleylab::group::{
    subgroup_member, verify_ping_pong, Membership, PingPongCertificate, SubgroupSpec,
};
use cayleylab::{CayleyBall, Letter, Presentation, Word};
use proptest::prelude::*;

fn word_over(generators: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..generators, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, inv)| Letter::new(g, inv))))
}

fn strategies() -> Vec<Presentation> {
    vec![
        Presentation::free(2),
        Presentation::free(3),
        Presentation::free_abelian(2),
        Presentation::free_abelian(3),
        Presentation::heisenberg(),
        Presentation::baumslag_solitar(1, 2).unwrap(),
        Presentation::from_spec("product(free:2;abelian:1)").unwrap(),
        Presentation::from_spec("freeproduct(abelian:2;free:1)").unwrap(),
        z3(),
    ]
}

fn z3() -> Presentation {
    Presentation::parse_file("generators: a\nstrategy: rewrite\nrule: aa = a-\nrule: a-a- = a\nconfluent: yes\n").unwrap()
}

fn stack_reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for &l in w.letters() {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

fn exponent_sums(n: usize, w: &Word) -> Vec<i64> {
    let mut e = vec![0; n];
    for l in w.letters() {
        e[l.generator()] += if l.is_inverse() { -1 } else { 1 };
    }
    e
}

type M3 = [[i64; 3]; 3];

fn mat_mul(a: &M3, b: &M3) -> M3 {
    let mut c = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// Upper unitriangular matrices: a faithful model of the Heisenberg group.
fn heisenberg_matrix(w: &Word) -> M3 {
    let id = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    w.letters().iter().fold(id, |m, l| {
        let s = if l.is_inverse() { -1 } else { 1 };
        let mut g = id;
        match l.generator() {
            0 => g[0][1] = s,
            1 => g[1][2] = s,
            _ => g[0][2] = s,
        }
        mat_mul(&m, &g)
    })
}

/// BS(1,2) as affine maps `t ↦ 2^e t + c` of the dyadic line.
fn bs12_affine(w: &Word) -> (i32, f64) {
    w.letters().iter().fold((0, 0.0), |(e, c), l| {
        let s = if l.is_inverse() { -1.0 } else { 1.0 };
        if l.generator() == 0 {
            (e + s as i32, c)
        } else {
            (e, c + s * 2f64.powi(e))
        }
    })
}

fn cyclic_variants(r: &Word) -> Vec<Word> {
    let n = r.len();
    let mut out = Vec::new();
    for k in 0..n.max(1) {
        let rot = Word::from_letters(r.letters()[k..].iter().chain(&r.letters()[..k]).copied());
        out.push(rot.inverse());
        out.push(rot);
    }
    out
}

#[test]
fn worked_examples() {
    let f = Presentation::free(2);
    assert_eq!(f.normal_form(&f.parse_word("aa-b").unwrap()).unwrap(), f.parse_word("b").unwrap());
    let z = Presentation::free_abelian(2);
    assert_eq!(z.normal_form(&z.parse_word("xyx-").unwrap()).unwrap(), z.parse_word("y").unwrap());
    let bs = Presentation::baumslag_solitar(1, 2).unwrap();
    let nf = bs.normal_form(&bs.parse_word("aba-").unwrap()).unwrap();
    assert_eq!(nf, bs.parse_word("bb").unwrap());
    assert_eq!(bs12_affine(&bs.parse_word("aba-").unwrap()), bs12_affine(&nf));

    assert!(f.multiply(&f.parse_word("a").unwrap(), &f.parse_word("a-").unwrap()).unwrap().is_empty());
    assert_eq!(z.multiply(&z.parse_word("xy").unwrap(), &z.parse_word("x").unwrap()).unwrap(), z.parse_word("xxy").unwrap());
    assert_eq!(f.multiply(&f.parse_word("ab").unwrap(), &f.parse_word("b-a").unwrap()).unwrap(), f.parse_word("aa").unwrap());

    let h = SubgroupSpec::new(&z, vec![z.parse_word("x").unwrap()]).unwrap();
    assert_eq!(subgroup_member(&z, &h, &z.parse_word("xxx").unwrap(), 8).unwrap(), Membership::Yes);
    assert_eq!(subgroup_member(&z, &h, &z.parse_word("y").unwrap(), 8).unwrap(), Membership::No);
    let ha = SubgroupSpec::new(&f, vec![f.parse_word("a").unwrap()]).unwrap();
    let bab = f.parse_word("bab-").unwrap();
    assert_eq!(subgroup_member(&f, &ha, &bab, 8).unwrap(), Membership::No);
    // ⟨a⟩ ∩ B(4) is {aᵏ : |k| ≤ 4}; bab⁻¹ reduces to itself and is not among them.
    let powers: Vec<Word> = (-4..=4).map(|k| f.normal_form(&f.parse_word("a").unwrap().power(k)).unwrap()).collect();
    assert!(!powers.contains(&f.normal_form(&bab).unwrap()));
}

#[test]
fn relators_are_trivial_in_every_strategy() {
    for p in strategies() {
        for r in p.relators() {
            assert!(p.is_identity(r).unwrap(), "{} relator {}", p.describe(), p.word_string(r));
        }
    }
}

#[test]
fn ping_pong_rejects_identity_actors() {
    let f = Presentation::free(2);
    let b = CayleyBall::build(&f, 4).unwrap();
    let pts: Vec<usize> = (1..b.len()).collect();
    let q = pts.len() / 4;
    let cert = PingPongCertificate {
        g: Word::empty(),
        h: Word::empty(),
        g_plus: pts[..q].to_vec(),
        g_minus: pts[q..2 * q].to_vec(),
        h_plus: pts[2 * q..3 * q].to_vec(),
        h_minus: pts[3 * q..].to_vec(),
        depth: 2,
    };
    assert!(!verify_ping_pong(&cert, &b).unwrap().is_certified());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn normal_form_is_idempotent(w in word_over(3, 12)) {
        for p in strategies() {
            let w = Word::from_letters(w.letters().iter().copied().filter(|l| l.generator() < p.generator_count()));
            let nf = p.normal_form(&w).unwrap();
            prop_assert_eq!(p.normal_form(&nf).unwrap(), nf);
        }
    }

    #[test]
    fn inverse_cancels(u in word_over(3, 10)) {
        for p in strategies() {
            let u = Word::from_letters(u.letters().iter().copied().filter(|l| l.generator() < p.generator_count()));
            let inv = p.invert(&u).unwrap();
            prop_assert!(p.multiply(&u, &inv).unwrap().is_empty());
            prop_assert!(p.multiply(&inv, &u).unwrap().is_empty());
        }
    }

    #[test]
    fn free_normal_form_is_free_reduction(w in word_over(3, 16)) {
        prop_assert_eq!(Presentation::free(3).normal_form(&w).unwrap(), stack_reduce(&w));
    }

    #[test]
    fn abelian_forms_agree_with_exponent_sums(u in word_over(3, 12), v in word_over(3, 12)) {
        let p = Presentation::free_abelian(3);
        let same = exponent_sums(3, &u) == exponent_sums(3, &v);
        prop_assert_eq!(p.equal(&u, &v).unwrap(), same);
        prop_assert_eq!(exponent_sums(3, &p.normal_form(&u).unwrap()), exponent_sums(3, &u));
    }

    #[test]
    fn heisenberg_forms_agree_with_matrices(u in word_over(3, 12), v in word_over(3, 4)) {
        let p = Presentation::heisenberg();
        prop_assert_eq!(heisenberg_matrix(&p.normal_form(&u).unwrap()), heisenberg_matrix(&u));
        prop_assert_eq!(p.equal(&u, &v).unwrap(), heisenberg_matrix(&u) == heisenberg_matrix(&v));
    }

    #[test]
    fn bs12_forms_agree_with_affine_model(u in word_over(2, 12), v in word_over(2, 6)) {
        let p = Presentation::baumslag_solitar(1, 2).unwrap();
        prop_assert_eq!(bs12_affine(&p.normal_form(&u).unwrap()), bs12_affine(&u));
        prop_assert_eq!(p.equal(&u, &v).unwrap(), bs12_affine(&u) == bs12_affine(&v));
    }

    #[test]
    fn z3_rewriting_agrees_with_exponent_sum(u in word_over(1, 14)) {
        let p = z3();
        let e = exponent_sums(1, &u)[0].rem_euclid(3);
        let nf = p.normal_form(&u).unwrap();
        prop_assert!(nf.len() <= 1);
        prop_assert_eq!(exponent_sums(1, &nf)[0].rem_euclid(3), e);
    }

    #[test]
    fn inserting_a_relator_preserves_the_element(w in word_over(3, 10), pick in any::<prop::sample::Index>(), at in any::<prop::sample::Index>()) {
        for p in strategies() {
            let w = Word::from_letters(w.letters().iter().copied().filter(|l| l.generator() < p.generator_count()));
            let variants: Vec<Word> = p.relators().iter().flat_map(cyclic_variants).collect();
            if variants.is_empty() {
                continue;
            }
            let r = &variants[pick.index(variants.len())];
            let k = at.index(w.len() + 1);
            let mut letters = w.letters()[..k].to_vec();
            letters.extend_from_slice(r.letters());
            letters.extend_from_slice(&w.letters()[k..]);
            prop_assert_eq!(p.normal_form(&Word(letters)).unwrap(), p.normal_form(&w).unwrap());
        }
    }

    #[test]
    fn ping_pong_never_certifies_a_relation(
        u in word_over(2, 3),
        i in 1i64..=2,
        j in 1i64..=2,
        cuts in prop::collection::vec(any::<prop::sample::Index>(), 3),
    ) {
        let p = Presentation::free(2);
        let u = stack_reduce(&u);
        prop_assume!(!u.is_empty());
        // g = uⁱ and h = uʲ satisfy gʲh⁻ⁱ = 1, of length i + j ≤ 4.
        let (g, h) = (u.power(i), u.power(j));
        let b = CayleyBall::build(&p, 5).unwrap();
        let pts: Vec<usize> = (1..b.len()).collect();
        let mut c: Vec<usize> = cuts.iter().map(|x| x.index(pts.len() + 1)).collect();
        c.sort();
        let cert = PingPongCertificate {
            g,
            h,
            g_plus: pts[..c[0]].to_vec(),
            g_minus: pts[c[0]..c[1]].to_vec(),
            h_plus: pts[c[1]..c[2]].to_vec(),
            h_minus: pts[c[2]..].to_vec(),
            depth: 4,
        };
        prop_assert!(!verify_ping_pong(&cert, &b).unwrap().is_certified());
    }
}

use std::sync::OnceLock;

use proptest::prelude::*;

use qmbmw::bmwrep::{BmwWord, IdemKind, Letter, Representation};
use qmbmw::rmatrix::{self, baxterized_op, BmwRMatrix, Family};
use qmbmw::{Field, Rational, TensorOperator};

type Op = TensorOperator<Rational>;

fn so3() -> &'static BmwRMatrix<Rational> {
    static B: OnceLock<BmwRMatrix<Rational>> = OnceLock::new();
    B.get_or_init(|| {
        rmatrix::make_standard_r(Family::Orthogonal, 3, &Rational::new(7, 5).unwrap()).unwrap()
    })
}

fn sp4() -> &'static BmwRMatrix<Rational> {
    static B: OnceLock<BmwRMatrix<Rational>> = OnceLock::new();
    B.get_or_init(|| {
        rmatrix::make_standard_r(Family::Symplectic, 4, &Rational::new(-2, 3).unwrap()).unwrap()
    })
}

fn letter(legs: usize) -> impl Strategy<Value = Letter> {
    (0..3u8, 1..legs).prop_map(|(k, i)| match k {
        0 => Letter::Sigma(i),
        1 => Letter::SigmaInv(i),
        _ => Letter::Kappa(i),
    })
}

fn word(legs: usize) -> impl Strategy<Value = BmwWord> {
    prop::collection::vec(letter(legs), 0..5).prop_map(BmwWord)
}

fn spectral() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=7)
        .prop_map(|(n, d)| Rational::new(n, d).unwrap())
        .prop_filter("nonzero", |x| !x.is_zero())
}

/// `R(x)` on legs `i, i+1` of three legs.
fn bax(b: &BmwRMatrix<Rational>, i: usize, x: &Rational) -> Option<Op> {
    baxterized_op(b, 1, x).ok()?.embed_at(i, 3).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn representation_is_a_homomorphism(u in word(3), v in word(3)) {
        let rep = Representation::new(so3());
        let lhs = rep.represent_word(&u.then(&v), 3).unwrap();
        let rhs = rep.represent_word(&u, 3).unwrap().compose(&rep.represent_word(&v, 3).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn braid_words_are_invertible(u in word(3)) {
        let braid: Vec<Letter> = u.0.iter().filter(|l| !matches!(l, Letter::Kappa(_))).copied().collect();
        let inverse: Vec<Letter> = braid
            .iter()
            .rev()
            .map(|l| match *l {
                Letter::Sigma(i) => Letter::SigmaInv(i),
                Letter::SigmaInv(i) => Letter::Sigma(i),
                k => k,
            })
            .collect();
        let rep = Representation::new(sp4());
        let w = BmwWord(braid).then(&BmwWord(inverse));
        prop_assert_eq!(rep.represent_word(&w, 3).unwrap(), Op::identity(4, 3));
    }

    #[test]
    fn baxterized_yang_baxter(x in spectral(), y in spectral()) {
        for b in [so3(), sp4()] {
            let xy = x.clone() * y.clone();
            let parts = (bax(b, 1, &x), bax(b, 2, &xy), bax(b, 1, &y), bax(b, 2, &y), bax(b, 1, &xy), bax(b, 2, &x));
            let (Some(a1), Some(a2), Some(a3), Some(b1), Some(b2), Some(b3)) = parts else {
                continue;
            };
            prop_assert_eq!(a1.compose(&a2).compose(&a3), b1.compose(&b2).compose(&b3));
        }
    }

    #[test]
    fn baxterized_locality(x in spectral(), y in spectral()) {
        let b = so3();
        let (Ok(rx), Ok(ry)) = (baxterized_op(b, 1, &x), baxterized_op(b, -1, &y)) else {
            return Ok(());
        };
        let r1 = rx.embed_at(1, 4).unwrap();
        let r3 = ry.embed_at(3, 4).unwrap();
        prop_assert_eq!(r1.compose(&r3), r3.compose(&r1));
    }

    #[test]
    fn idempotents_absorb_generators(i in 1usize..3) {
        let rep = Representation::new(so3());
        let q = so3().q().clone();
        let a = rep.antisymmetrizer(3, 3).unwrap();
        let s = rep.symmetrizer(3, 3).unwrap();
        let sigma = rep.generator(Letter::Sigma(i), 3).unwrap();
        prop_assert_eq!(a.compose(&sigma), a.scale(&-q.inv().unwrap()));
        prop_assert_eq!(sigma.compose(&s), s.scale(&q));
    }
}

#[test]
fn spectral_ranks_of_the_rank_two_idempotents() {
    for (b, ra, rs) in [(so3(), 3, 5), (sp4(), 5, 10)] {
        let rep = Representation::new(b);
        assert_eq!(rep.idempotent(IdemKind::Anti, 2).unwrap().rank(), ra);
        assert_eq!(rep.idempotent(IdemKind::Sym, 2).unwrap().rank(), rs);
        assert_eq!(b.k.rank(), 1);
    }
}

#[test]
fn idempotent_order_zero_is_rejected() {
    let rep = Representation::new(so3());
    assert!(rep.idempotent(IdemKind::Anti, 0).is_err());
    assert_eq!(
        *rep.idempotent(IdemKind::Sym, 1).unwrap(),
        Op::identity(3, 1)
    );
}

#[test]
fn sp2_blocks_the_third_antisymmetrizer() {
    let b = rmatrix::make_standard_r(Family::Symplectic, 2, &Rational::new(7, 5).unwrap()).unwrap();
    let rep = Representation::new(&b);
    let err = rep.idempotent(IdemKind::Anti, 3).unwrap_err();
    assert!(err.to_string().contains("μ = −q⁻³"), "{err}");
    assert!(rep.idempotent(IdemKind::Sym, 3).is_ok());
}

#[test]
fn perturbed_operator_fails_the_axioms() {
    let b = so3();
    let bad = b.r.add(
        &Op::matrix_unit(3, 0, 1)
            .kron(&Op::identity(3, 1))
            .scale(&Rational::new(1, 9).unwrap()),
    );
    let report = rmatrix::verify_operator(Family::Imported, &bad, b.q());
    assert!(!report.passed());
}

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::strategy::ValueTree;

use qmbmw::bmwrep::IdemKind;
use qmbmw::qma::{build_reducer, FreeElement, IdealReducer, Qma, QmaElement};
use qmbmw::rmatrix::{self, BmwRMatrix, Family};
use qmbmw::scalars::F0;
use qmbmw::twistmaps::{make_pair, CompatiblePair};
use qmbmw::{Field, Rational};

fn q75() -> Rational {
    Rational::new(7, 5).unwrap()
}

fn so3() -> &'static BmwRMatrix<Rational> {
    static B: OnceLock<BmwRMatrix<Rational>> = OnceLock::new();
    B.get_or_init(|| rmatrix::make_standard_r(Family::Orthogonal, 3, &q75()).unwrap())
}

fn pair_r() -> &'static CompatiblePair<'static, Rational> {
    static P: OnceLock<CompatiblePair<'static, Rational>> = OnceLock::new();
    P.get_or_init(|| make_pair(so3(), so3().r.clone(), "R").unwrap())
}

fn alg() -> &'static Qma<'static, 'static, Rational> {
    static A: OnceLock<Qma<'static, 'static, Rational>> = OnceLock::new();
    A.get_or_init(|| Qma::new(pair_r(), 3).unwrap())
}

fn red() -> &'static IdealReducer<Rational> {
    &alg().red
}

fn free(degree: usize, terms: &[(Vec<usize>, i64)]) -> FreeElement<Rational> {
    let gens = red().gens();
    let mut x = FreeElement::zero(degree);
    for (labels, c) in terms {
        x = x.add(&FreeElement::monomial(labels, gens).scale(&Rational::from_i64(*c)));
    }
    x
}

fn word(degree: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..9, degree)
}

fn free_terms(degree: usize) -> impl Strategy<Value = Vec<(Vec<usize>, i64)>> {
    prop::collection::vec((word(degree), -4i64..=4), 1..5)
}

fn element(degree: usize) -> impl Strategy<Value = QmaElement<Rational>> {
    free_terms(degree).prop_map(move |t| red().reduce(&free(degree, &t)).unwrap())
}

fn relation(i: usize) -> FreeElement<Rational> {
    let mut x = FreeElement::zero(2);
    for (l, c) in &red().relations()[i] {
        x.add_term(*l as u64, c.clone());
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduction_is_linear(x in free_terms(3), y in free_terms(3), a in -3i64..=3, b in -3i64..=3) {
        let (a, b) = (Rational::from_i64(a), Rational::from_i64(b));
        let (x, y) = (free(3, &x), free(3, &y));
        let lhs = red().reduce(&x.scale(&a).add(&y.scale(&b))).unwrap();
        let rhs = red().reduce(&x).unwrap().scale(&a).add(&red().reduce(&y).unwrap().scale(&b));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn two_sided_multiples_of_relations_vanish(i in 0usize..64, left in any::<bool>(), v in 0usize..9) {
        let gens = red().gens();
        let rel = relation(i % red().relations().len());
        let g = FreeElement::monomial(&[v], gens);
        let x = if left { g.mul(&rel, gens) } else { rel.mul(&g, gens) };
        prop_assert!(red().reduce(&x).unwrap().is_zero());
    }

    #[test]
    fn reduction_is_idempotent(x in free_terms(3)) {
        let once = red().reduce(&free(3, &x)).unwrap();
        prop_assert_eq!(red().reduce(&red().lift(&once)).unwrap(), once);
    }

    #[test]
    fn multiplication_is_associative(x in element(1), y in element(1), z in element(1)) {
        let left = red().mul(&red().mul(&x, &y).unwrap(), &z).unwrap();
        let right = red().mul(&x, &red().mul(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn product_agrees_with_free_product(x in free_terms(1), y in free_terms(2)) {
        let (fx, fy) = (free(1, &x), free(2, &y));
        let direct = red().reduce(&fx.mul(&fy, red().gens())).unwrap();
        let via = red().mul(&red().reduce(&fx).unwrap(), &red().reduce(&fy).unwrap()).unwrap();
        prop_assert_eq!(direct, via);
    }
}

fn to_f0(x: &QmaElement<Rational>) -> QmaElement<F0> {
    QmaElement::from_terms(
        x.degree(),
        x.terms()
            .iter()
            .map(|(l, c)| (*l, F0::from_rational(c.inner()).unwrap()))
            .collect(),
    )
}

#[test]
fn modular_reduction_matches_rational() {
    let q = F0::from_rational(q75().inner()).unwrap();
    let b = rmatrix::make_standard_r(Family::Orthogonal, 3, &q).unwrap();
    let pair = make_pair(&b, b.r.clone(), "R").unwrap();
    let red_p = build_reducer(&pair, 3).unwrap();
    assert_eq!(red_p.graded_dims(), red().graded_dims());
    for d in 0..=3 {
        for i in 0..red().dim(d).unwrap() {
            assert_eq!(red_p.monomial(d, i), red().monomial(d, i));
        }
    }
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..16 {
        let terms = free_terms(3).new_tree(&mut runner).unwrap().current();
        let xq = red().reduce(&free(3, &terms)).unwrap();
        let mut xp = FreeElement::zero(3);
        for (labels, c) in &terms {
            xp = xp.add(&FreeElement::monomial(labels, red_p.gens()).scale(&F0::from_i64(*c)));
        }
        assert_eq!(red_p.reduce(&xp).unwrap(), to_f0(&xq));
    }
}

#[test]
fn degree_two_dimension_matches_spectral_count_for_sp4() {
    let b = rmatrix::make_standard_r(Family::Symplectic, 4, &q75()).unwrap();
    let pair = make_pair(&b, b.p(), "P").unwrap();
    let alg = Qma::new(&pair, 2).unwrap();
    let ra = alg.rep.idempotent(IdemKind::Anti, 2).unwrap().rank();
    let rs = alg.rep.idempotent(IdemKind::Sym, 2).unwrap().rank();
    assert_eq!((ra, rs), (5, 10));
    assert_eq!(alg.red.graded_dims(), vec![1, 16, ra * ra + rs * rs + 1]);
    assert_eq!(alg.red.dim(2).unwrap(), 126);
}

#[test]
fn flip_twist_copies_are_plain_leg_copies() {
    let pair = make_pair(so3(), so3().p(), "P").unwrap();
    let alg = Qma::new(&pair, 2).unwrap();
    for n in 2..=3 {
        for i in 1..=n {
            assert_eq!(
                alg.copy(i, n).unwrap(),
                alg.m().embed(&[i], n).unwrap(),
                "copy {i} on {n} legs"
            );
        }
    }
}

#[test]
fn perturbed_newton_coefficient_fails() {
    let a = alg();
    let p = &a.pair.r.params;
    let lhs = a.power_sum(2).unwrap().axpy(
        &a.mul(&a.elem_sym(1).unwrap(), &a.power_sum(1).unwrap())
            .unwrap(),
        &-p.q.clone(),
    );
    let rhs = |c: Rational| {
        a.elem_sym(2)
            .unwrap()
            .scale(&-p.q_number(2))
            .axpy(&a.contraction2().unwrap(), &c)
    };
    assert_eq!(lhs, rhs(p.mu.clone() - p.q.clone()));
    assert_ne!(lhs, rhs(p.mu.clone() + p.q.clone()));
    assert_ne!(lhs, rhs(p.mu.clone() - p.q.clone() + Rational::one()));
}

#[test]
fn generator_entries_do_not_commute() {
    let r = red();
    let noncommuting = (0..r.gens())
        .flat_map(|u| (0..r.gens()).map(move |v| (u, v)))
        .filter(|&(u, v)| {
            let (x, y) = (r.generator(u / 3, u % 3), r.generator(v / 3, v % 3));
            r.mul(&x, &y).unwrap() != r.mul(&y, &x).unwrap()
        })
        .count();
    assert!(noncommuting > 0);
}

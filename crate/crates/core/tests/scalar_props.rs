use proptest::prelude::*;

use qmbmw::scalars::{q_number, Fp, F0, F2};
use qmbmw::{Field, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=40).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn nonzero() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |x| !x.is_zero())
}

fn reduce<const P: u64>(x: &Rational) -> Fp<P> {
    Fp::<P>::from_rational(x.inner()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_laws(a in rational(), b in rational(), c in nonzero()) {
        prop_assert_eq!((a.clone() + b.clone()) * c.clone(), a.clone() * c.clone() + b.clone() * c.clone());
        prop_assert_eq!(c.clone() * c.inv().unwrap(), Rational::one());
        prop_assert_eq!((a.clone() - b.clone()) + b.clone(), a);
    }

    #[test]
    fn reduction_is_a_ring_map(a in rational(), b in rational(), c in nonzero()) {
        prop_assert_eq!(reduce::<{ qmbmw::scalars::PRIMES[0] }>(&(a.clone() * b.clone())), reduce(&a) * reduce(&b));
        prop_assert_eq!(reduce::<{ qmbmw::scalars::PRIMES[0] }>(&(a.clone() + b.clone())), reduce(&a) + reduce(&b));
        prop_assert_eq!(reduce::<{ qmbmw::scalars::PRIMES[2] }>(&c.inv().unwrap()), reduce(&c).inv().unwrap());
    }

    #[test]
    fn text_round_trip(a in rational()) {
        prop_assert_eq!(Rational::parse(&a.to_string()).unwrap(), a.clone());
        let m: F2 = reduce(&a);
        prop_assert_eq!(F2::parse(&m.to_string()).unwrap(), m);
        let n: F0 = reduce(&a);
        prop_assert_eq!(F0::parse(&a.to_string()).unwrap(), n);
    }

    #[test]
    fn q_number_closed_form(q in nonzero().prop_filter("q² ≠ 1", |q| q.clone() * q.clone() != Rational::one()), n in -6i64..=6) {
        let num = q.pow(n).unwrap() - q.pow(-n).unwrap();
        let den = q.clone() - q.inv().unwrap();
        prop_assert_eq!(q_number(n, &q).unwrap(), num.try_div(&den).unwrap());
    }
}

#[test]
fn malformed_literals_are_rejected() {
    for s in ["7/0", "x", "1/2/3", "", "3/-"] {
        assert!(Rational::parse(s).is_err(), "{s}");
    }
    assert!(F0::parse("1 mod 7").is_err());
}

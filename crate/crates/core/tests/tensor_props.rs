use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qmbmw::{Rational, TensorOperator};

type Op = TensorOperator<Rational>;

fn op(dim: usize, legs: usize) -> impl Strategy<Value = Op> {
    any::<u64>().prop_map(move |s| Op::random(dim, legs, &mut ChaCha8Rng::seed_from_u64(s), 4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn json_round_trip_is_bit_exact(x in op(3, 2)) {
        let text = x.to_json_string();
        let back = Op::from_json_str(&text).unwrap();
        prop_assert_eq!(&back, &x);
        prop_assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn flatten_inverts_digits(flat in 0usize..27) {
        let x = Op::zero(3, 3);
        prop_assert_eq!(x.flatten(&x.digits(flat)), flat);
    }

    #[test]
    fn kron_is_a_product_of_embeddings(a in op(2, 1), b in op(2, 2)) {
        let lhs = a.kron(&b);
        let rhs = a.embed(&[1], 3).unwrap().compose(&b.embed(&[2, 3], 3).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn partial_trace_of_kron(a in op(2, 1), b in op(2, 1)) {
        let t = a.kron(&b).partial_trace(&[2]).unwrap();
        prop_assert_eq!(t, a.scale(&b.trace()));
        let w = Op::identity(2, 1);
        prop_assert_eq!(a.kron(&b).weighted_trace(&[1], &w).unwrap(), b.scale(&a.trace()));
    }

    #[test]
    fn swap_conjugation_exchanges_legs(a in op(3, 1), b in op(3, 1)) {
        let p = Op::swap(3);
        prop_assert_eq!(p.compose(&a.kron(&b)).compose(&p), b.kron(&a));
    }

    #[test]
    fn composition_is_associative(x in op(2, 2), y in op(2, 2), z in op(2, 2)) {
        prop_assert_eq!(x.compose(&y).compose(&z), x.compose(&y.compose(&z)));
    }

    #[test]
    fn inverse_is_two_sided(x in op(2, 2)) {
        prop_assume!(x.rank() == 4);
        let inv = x.inverse().unwrap();
        prop_assert_eq!(x.compose(&inv), Op::identity(2, 2));
        prop_assert_eq!(inv.compose(&x), Op::identity(2, 2));
    }

    #[test]
    fn embedding_order_matters_only_through_legs(a in op(2, 2)) {
        let e = a.embed(&[3, 1], 3).unwrap();
        let p13 = Op::swap(2).embed(&[1, 3], 3).unwrap();
        prop_assert_eq!(e, p13.compose(&a.embed(&[1, 3], 3).unwrap()).compose(&p13));
    }
}

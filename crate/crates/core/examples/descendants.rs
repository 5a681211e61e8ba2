//! The A and B descendant recursions and their traces.

use qmbmw::qma::{self, Qma};
use qmbmw::rmatrix::{self, Family};
use qmbmw::twistmaps::make_pair;
use qmbmw::Rational;

fn main() -> qmbmw::Result<()> {
    let q = Rational::new(7, 5)?;
    let b = rmatrix::make_standard_r(Family::Orthogonal, 3, &q)?;
    let pair = make_pair(&b, b.p(), "P")?;
    let alg = Qma::new(&pair, 3)?;
    let (rek1, rek2) = qma::lemma51_instances(alg.max_degree(), 3);
    println!("instances: first recursion {rek1:?}, second recursion {rek2:?}");
    let a = alg.descendant_a(0, 1)?;
    println!("A^(0,1) has degree {} on {} legs", a.degree(), a.legs());
    print!("{}", qma::verify_lemma51(&alg, 3));
    Ok(())
}

//! Graded dimensions of the quantum matrix algebra for the two standard choices of F.

use qmbmw::qma::{self, Qma};
use qmbmw::rmatrix::{self, Family};
use qmbmw::twistmaps::make_pair;
use qmbmw::Rational;

fn main() -> qmbmw::Result<()> {
    let q = Rational::new(7, 5)?;
    let b = rmatrix::make_standard_r(Family::Orthogonal, 3, &q)?;
    for (label, f) in [("P", b.p()), ("R", b.r.clone())] {
        let pair = make_pair(&b, f, label)?;
        let alg = Qma::new(&pair, 3)?;
        println!(
            "F={label}: graded dims {:?}, {} independent quadratic relations, spectral count {}",
            alg.red.graded_dims(),
            alg.red.relation_rank(),
            qma::spectral_dim2(&alg)?
        );
        let (x, y) = (alg.red.generator(0, 1), alg.red.generator(1, 0));
        println!("  M_12 M_21 = {}", alg.red.render(&alg.red.mul(&x, &y)?));
    }
    Ok(())
}

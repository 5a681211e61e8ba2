//! Power sums, the Newton identities and the Wronski relations in the quantum matrix algebra.

use qmbmw::qma::{self, Qma};
use qmbmw::rmatrix::{self, Family};
use qmbmw::twistmaps::make_pair;
use qmbmw::Rational;

fn main() -> qmbmw::Result<()> {
    let q = Rational::new(7, 5)?;
    let b = rmatrix::make_standard_r(Family::Orthogonal, 3, &q)?;
    let pair = make_pair(&b, b.r.clone(), "R")?;
    let alg = Qma::new(&pair, 3)?;
    for i in 1..=2 {
        println!("p_{i} = {}", alg.red.render(&alg.power_sum(i)?));
    }
    println!("g = {}", alg.red.render(&alg.contraction2()?));
    print!("{}", qma::verify_newton_wronski(&alg, 3));
    Ok(())
}

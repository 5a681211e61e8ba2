//! The same computation over two prime fields, with the verdicts compared record by record.

use qmbmw::qma::{self, Qma};
use qmbmw::report::Report;
use qmbmw::rmatrix::{self, Family};
use qmbmw::scalars::{F0, F1};
use qmbmw::twistmaps::make_pair;
use qmbmw::{Field, Rational};

fn run<S: Field>() -> qmbmw::Result<(Vec<usize>, Report)> {
    let q = S::from_rational(Rational::new(7, 5)?.inner())?;
    let b = rmatrix::make_standard_r(Family::Symplectic, 4, &q)?;
    let pair = make_pair(&b, b.r.clone(), "R")?;
    let alg = Qma::new(&pair, 3)?;
    Ok((
        alg.red.graded_dims(),
        qma::verify_inversion_identities(&alg),
    ))
}

fn main() -> qmbmw::Result<()> {
    let (d0, r0) = run::<F0>()?;
    let (d1, r1) = run::<F1>()?;
    println!("graded dims mod p0 {d0:?}, mod p1 {d1:?}");
    let agree = r0
        .records
        .iter()
        .zip(&r1.records)
        .all(|(a, b)| a.check == b.check && a.status == b.status);
    let s = r0.summary();
    println!(
        "{} checks, {} pass; verdicts agree across primes: {agree}",
        s.total, s.pass
    );
    Ok(())
}

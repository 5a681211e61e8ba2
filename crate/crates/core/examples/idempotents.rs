//! Antisymmetrizers, symmetrizers and contractors in the representation of the BMW algebra.

use qmbmw::bmwrep::{self, IdemKind, Representation};
use qmbmw::rmatrix::{self, Family};
use qmbmw::Rational;

fn main() -> qmbmw::Result<()> {
    let q = Rational::new(7, 5)?;
    let b = rmatrix::make_standard_r(Family::Orthogonal, 3, &q)?;
    let rep = Representation::new(&b);
    for i in 1..=4 {
        let a = rep.idempotent(IdemKind::Anti, i)?;
        let s = rep.idempotent(IdemKind::Sym, i)?;
        println!("order {i}: rank a = {}, rank s = {}", a.rank(), s.rank());
    }
    let c = rep.contractor_base(4)?;
    println!("contractor on 4 legs: rank {}", c.rank());
    let report = bmwrep::verify_proposition22(&rep, 3);
    let s = report.summary();
    println!(
        "{}: {} pass, {} fail, {} skipped",
        b.label(),
        s.pass,
        s.fail,
        s.skipped
    );

    // for Sp_q(2) the third antisymmetrizer does not exist
    let sp2 = rmatrix::make_standard_r(Family::Symplectic, 2, &q)?;
    let rep2 = Representation::new(&sp2);
    match rep2.idempotent(IdemKind::Anti, 3) {
        Ok(_) => println!("Sp_q(2) a^(3) built"),
        Err(e) => println!("Sp_q(2) a^(3): {e}"),
    }
    Ok(())
}

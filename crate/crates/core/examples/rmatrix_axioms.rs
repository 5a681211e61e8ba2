//! Builds the standard SO_q(3) and Sp_q(4) R-matrices at q = 7/5 and checks the BMW-type axioms.

use qmbmw::rmatrix::{self, Family};
use qmbmw::Rational;

fn main() -> qmbmw::Result<()> {
    let q = Rational::new(7, 5)?;
    for (family, n) in [(Family::Orthogonal, 3), (Family::Symplectic, 4)] {
        let b = rmatrix::make_standard_r(family, n, &q)?;
        println!("{}: μ = {}, Tr_R(I) = {}", b.label(), b.mu(), b.d.trace());
        let minpoly: Vec<String> = rmatrix::minimal_polynomial(&b.r)
            .iter()
            .map(|c| c.to_string())
            .collect();
        println!(
            "  minimal polynomial of R, low degree first: [{}]",
            minpoly.join(", ")
        );
        let mut report = rmatrix::verify_bmw_type(&b);
        report.extend(rmatrix::verify_k_identities(&b, 3));
        let s = report.summary();
        println!(
            "  {} checks: {} pass, {} fail, {} skipped",
            s.total, s.pass, s.fail, s.skipped
        );
    }

    // a q where the spectral projectors degenerate is rejected up front
    let bad = Rational::new(-1, 1)?;
    match rmatrix::make_standard_r(Family::Orthogonal, 3, &bad) {
        Ok(_) => println!("q = -1 unexpectedly accepted"),
        Err(e) => println!("q = -1 rejected: {e}"),
    }
    Ok(())
}

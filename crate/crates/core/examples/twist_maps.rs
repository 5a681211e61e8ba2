//! Twisting an R-matrix by a compatible F and the matrix maps built from the pair.

use qmbmw::rmatrix::{self, Family};
use qmbmw::twistmaps::{self, make_pair};
use qmbmw::Rational;

fn main() -> qmbmw::Result<()> {
    let q = Rational::new(7, 5)?;
    let b = rmatrix::make_standard_r(Family::Symplectic, 4, &q)?;
    for (label, f) in [("P", b.p()), ("R", b.r.clone())] {
        let pair = make_pair(&b, f, label)?;
        let twisted = pair.twist()?;
        let (g, ginv) = pair.operator_g()?;
        println!(
            "F={label}: twisted μ = {}, rank G = {}, rank G⁻¹ = {}",
            twisted.mu(),
            g.rank(),
            ginv.rank()
        );
        let mut report = twistmaps::verify_twist_calculus(&pair, 1);
        report.extend(twistmaps::verify_operator_g(&pair));
        report.extend(twistmaps::verify_maps(&pair, 1));
        let s = report.summary();
        println!("  {} pass, {} fail, {} skipped", s.pass, s.fail, s.skipped);
    }
    Ok(())
}

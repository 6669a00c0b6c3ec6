//! Marginal coupling feasibility in exact rational arithmetic: a feasible
//! witness for compatible marginals and a Farkas certificate otherwise.

use markovian::jointness::simplex::ratio;
use markovian::jointness::{coupling_feasibility, CouplingProblem, MarginalConstraint, Table};

fn bits() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

fn pair(vars: [usize; 2], equal: bool) -> MarginalConstraint {
    let (same, diff) = if equal { (ratio(1, 2), ratio(0, 1)) } else { (ratio(0, 1), ratio(1, 2)) };
    MarginalConstraint {
        vars: vars.to_vec(),
        target: Table::Exact(vec![same.clone(), diff.clone(), diff, same]),
    }
}

fn main() -> markovian::Result<()> {
    // X = Y and Y = Z is consistent; adding X != Z is not
    let consistent = CouplingProblem::new(vec![bits(), bits(), bits()], vec![pair([0, 1], true), pair([1, 2], true)], 1e-12)?;
    let report = coupling_feasibility(&consistent)?;
    println!("X=Y, Y=Z: {:?}, witness {:?}", report.verdict, report.exact_witness);

    let frustrated = CouplingProblem::new(
        vec![bits(), bits(), bits()],
        vec![pair([0, 1], true), pair([1, 2], true), pair([0, 2], false)],
        1e-12,
    )?;
    let report = coupling_feasibility(&frustrated)?;
    println!("X=Y, Y=Z, X!=Z: {:?}", report.verdict);
    if let Some(cert) = report.certificate {
        println!("certificate row weights {:?}, gap {}, verified {}", cert.exact_row_weights, cert.gap, cert.verified);
    }
    println!("vertex cross-check: {:?}", report.cross_check);
    Ok(())
}

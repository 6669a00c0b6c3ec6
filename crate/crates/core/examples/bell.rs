//! Three pairwise commuting ±1 measurements in a generalized density whose
//! pairwise laws exist but admit no joint law.

use markovian::jointness::bell_counterexample;

fn main() -> markovian::Result<()> {
    let report = bell_counterexample()?;
    for e in &report.expectations {
        println!("E({}) = {}", e.pair, e.exact);
    }
    println!(
        "|E(XY) - E(YZ)| = {}  >  1 - E(XZ) = {}  violated: {}",
        report.bell_lhs_exact, report.bell_rhs_exact, report.bell.violated
    );
    for t in &report.pairwise_tables {
        let cells: Vec<_> = t.cells.iter().map(|c| format!("({:+},{:+}) {}", c.first, c.second, c.exact)).collect();
        println!("{}: {}", t.pair, cells.join("  "));
    }
    println!("joint coupling: {:?}", report.joint_coupling.verdict);
    if let Some(cert) = &report.joint_coupling.certificate {
        println!("Farkas certificate verified: {}", cert.verified);
    }
    for atom in &report.signed_joint {
        println!("signed joint weight at {:?}: {}", atom.atom, atom.exact);
    }
    Ok(())
}

//! Mean ergodic limit of a random unitary evolution, compared with the
//! orthogonal projection of the start vector onto the fixed space.

use markovian::corpus;
use markovian::evolution::{cesaro_average_at, mean_ergodic_limit, Evolution};

fn main() -> markovian::Result<()> {
    let mut rng = corpus::rng(4);
    let (u, fixed) = corpus::unitary_with_fixed_subspace(&mut rng, 6, 2);
    let s = corpus::gaussian_vector(&mut rng, 6);
    let ev = Evolution::new(u, s.clone())?;

    let limit = mean_ergodic_limit(&ev, 1e-8)?;
    let projection = fixed.project(&s);
    println!("stability verdict      {:?}", limit.stability.verdict);
    println!("|limit - P_fixed s|    {:.3e}", (&limit.limit - &projection).norm());
    println!("|op limit - limit|     {:.3e}", limit.stationarity);
    for t in [10, 100, 1000, 10_000] {
        let gap = (cesaro_average_at(&ev, t) - &limit.limit).norm();
        println!("t = {t:>6}  |avg_t - limit| = {gap:.3e}");
    }
    Ok(())
}

//! Splitting a start vector into its unimodular part `s_N` and its decaying
//! part `s_W`, then checking that the two evolutions are equivalent.

use markovian::corpus;
use markovian::evolution::{equivalence_check, Evolution};
use markovian::spectral::{spectral_split, BAND_TOL};

fn main() -> markovian::Result<()> {
    let mut rng = corpus::rng(6);
    let op = corpus::split_spectrum_operator(&mut rng, 8, 3, 0.8);
    let s = corpus::gaussian_vector(&mut rng, 8);
    let split = spectral_split(&op, &s, BAND_TOL)?;
    println!("dim N = {}, spectral radius on W = {:.3}", split.n_basis.dim(), split.w_spectral_radius);
    println!("|s - s_N - s_W| = {:.3e}", (&s - &split.s_n - &split.s_w).norm());

    let ev = Evolution::new(op, s)?;
    let ev_n = ev.with_start(split.s_n.clone())?;
    let report = equivalence_check(&ev, &ev_n, 400, 1e-8)?;
    println!("equivalence: {:?}", report.verdict);
    for t in [0, 25, 50, 100, 200, 400] {
        println!("  t = {t:>3}  |op^t s - op^t s_N| = {:.3e}", report.decay[t]);
    }
    Ok(())
}

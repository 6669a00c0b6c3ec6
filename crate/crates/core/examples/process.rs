//! Finite-dimensional process models: presets and a random hidden-Markov
//! model, with marginals through the evolution checked by brute force.

use markovian::corpus;
use markovian::markov::{enumerate_process_marginals, process_marginal, ProcessModel};

fn main() -> markovian::Result<()> {
    let coin = ProcessModel::fair_coin();
    println!("fair coin p(0,1,1) = {}", coin.word_probability(&[0, 1, 1]));
    let alt = ProcessModel::alternator();
    for t in 0..4 {
        println!("alternator law at t = {t}: {:?}", process_marginal(&alt, t)?);
    }

    let mut rng = corpus::rng(7);
    let model = corpus::random_process_model(&mut rng, 3, true);
    for t in 0..=8 {
        let fast = process_marginal(&model, t)?;
        let brute = enumerate_process_marginals(&model, t)?;
        let gap = fast.iter().zip(&brute).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("t = {t}  {fast:.5?}  enumeration gap {gap:.1e}");
    }
    Ok(())
}

//! A random walk observed directly, through a hidden labelling, and through
//! an indicator chain, with its limit distribution.

use markovian::markov::{
    chain_distributions, hidden_observable, indicator_chain, limit_distribution,
    random_walk_evolution,
};
use nalgebra::DMatrix;

fn main() -> markovian::Result<()> {
    // column-stochastic: column j is the law of the next state from j
    let m = DMatrix::from_row_slice(3, 3, &[0.5, 0.25, 0.0, 0.5, 0.5, 0.5, 0.0, 0.25, 0.5]);
    let (ev, coords) = random_walk_evolution(&m, &[1.0, 0.0, 0.0])?;

    let series = chain_distributions(&coords, &ev, 5)?;
    for (t, row) in series.rows.iter().enumerate() {
        println!("t = {t}  {row:.4?}");
    }
    let limit = limit_distribution(&coords, &ev, 1e-8)?;
    println!("limit {:?} -> {:.4?}", limit.labels, limit.probs);

    let hidden = hidden_observable(&["edge", "middle", "edge"])?;
    let limit = limit_distribution(&hidden, &ev, 1e-8)?;
    println!("hidden limit {:?} -> {:.4?}", limit.labels, limit.probs);

    let indicator = indicator_chain(&coords, "2")?;
    let series = chain_distributions(&indicator, &ev, 3)?;
    println!("indicator of state 2: {:.4?}", series.rows);
    Ok(())
}

//! A random quantum walk: site distributions step by step, path
//! probabilities, and the total over all paths of a fixed length.

use markovian::corpus;
use markovian::quantum::{gudder_step, walk_path_probability};

fn main() -> markovian::Result<()> {
    let mut rng = corpus::rng(8);
    let walk = corpus::random_gudder_walk(&mut rng, 3, 2);
    let mut w = walk.clone();
    for t in 0..5 {
        println!("t = {t}  sites {:.4?}", w.site_distribution());
        w = gudder_step(&w)?;
    }
    let mut total = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let p = walk_path_probability(&walk, &[a, b])?;
            total += p;
            println!("Pr(X1 = {a}, X2 = {b}) = {p:.4}");
        }
    }
    println!("sum over all length-2 paths = {total:.12}");
    Ok(())
}

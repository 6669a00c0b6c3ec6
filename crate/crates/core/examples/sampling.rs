//! Bounded sampling sequences converge in Cesàro mean and unbounded ones do
//! not; the verdict combines empirical growth with the visible spectrum.

use markovian::corpus;
use markovian::evolution::Evolution;
use markovian::sampling::{sampling_verdict, SamplingFunction};

fn main() -> markovian::Result<()> {
    let mut rng = corpus::rng(5);
    for i in 0..12 {
        let inst = corpus::sampling_instance(&mut rng, 5);
        let f = SamplingFunction::new(inst.sampler.clone())?;
        let ev = Evolution::new(inst.op.clone(), inst.start.clone())?;
        let v = sampling_verdict(&f, &ev, 256, 1e-2)?;
        println!(
            "#{i:<2} dim {}  visible {}  bounded {:?}  converges {:?}  max |f_t| {:.2e}  jordan on circle {}",
            ev.dim(),
            v.spectral.visible_dim,
            v.bounded,
            v.converges,
            v.max_norm,
            inst.jordan_on_circle,
        );
    }
    Ok(())
}

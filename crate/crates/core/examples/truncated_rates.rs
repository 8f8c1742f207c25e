//! Six particles arriving in two time bins: only the blocks allowed by the
//! delay partition contribute, so the rest can be skipped.

use coincidence::delays::{discretize, snapped_delay_matrix};
use coincidence::prelude::*;
use coincidence::rates::rate_truncated;

fn main() -> Result<()> {
    let spec = ArrivalSpec::new(vec![0.05, 0.2, 0.3, 0.6, 0.7, 0.9], 2.0, 1.0, 2)?;
    let disc = discretize(&spec)?;
    let mu = disc.partition.partition().clone();
    let r = snapped_delay_matrix(&disc.bin_of, &spec);
    println!("bins {:?}, delay partition {mu}", disc.bin_of);

    let u = haar_unitary(8, 2)?;
    let s: OutputString = "11011101".parse()?;
    let a = u.submatrix(&s, 6)?;
    let ordering = GroupOrdering::canonical(6)?;
    let transform = build_transform(&ordering)?;
    let v = monomial_vector(&a, &ordering);

    for species in [Species::Boson, Species::Fermion] {
        let decomp = block_decompose(&v, &r, &transform, species)?;
        let full = rate_blocked(&decomp)?;
        let t = rate_truncated(&decomp, &mu)?;
        let kept: Vec<String> = t.kept.iter().map(ToString::to_string).collect();
        println!(
            "{species}: full {full:.12}  truncated {:.12}  kept {} of {} blocks: {}",
            t.rate,
            t.kept.len(),
            t.kept.len() + t.dropped.len(),
            kept.join(" ")
        );
    }
    Ok(())
}

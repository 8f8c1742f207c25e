//! Two photons on a balanced beam splitter: the coincidence rate as one
//! photon is delayed, for bosons and fermions.

use coincidence::prelude::*;

fn main() -> Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bs = Interferometer::from_rows(&[
        vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
    ])?;
    let a = bs.submatrix(&"11".parse()?, 2)?;

    println!("{:>6}  {:>8}  {:>8}", "delay", "boson", "fermion");
    for k in -12..=12 {
        let delay = k as f64 * 0.25;
        let r = DelayMatrix::from_times(&[0.0, delay], 1.0);
        let boson = rate_streaming(&a, &r, Species::Boson)?;
        let fermion = rate_streaming(&a, &r, Species::Fermion)?;
        println!("{delay:>6.2}  {boson:>8.5}  {fermion:>8.5}");
    }
    Ok(())
}

//! Splits a three-particle rate into irrep contributions and checks the sum
//! against `v† R v`.

use coincidence::prelude::*;

fn main() -> Result<()> {
    let u = haar_unitary(5, 7)?;
    let s: OutputString = "10110".parse()?;
    let a = u.submatrix(&s, 3)?;
    let r = DelayMatrix::from_times(&[0.0, 0.4, 1.1], 1.5);
    let ordering = GroupOrdering::three_particle_table_order();
    let transform = build_transform(&ordering)?;
    let v = monomial_vector(&a, &ordering);

    for species in [Species::Boson, Species::Fermion] {
        let direct = rate_direct(&v, &rate_matrix(&r, species, &ordering)?)?;
        let blocks = block_decompose(&v, &r, &transform, species)?;
        println!("{species} rate for s = {s}: {direct:.10}");
        for term in &blocks.terms {
            println!(
                "  slot {:<8} block K^{:<8} x{}  {:+.10}",
                term.slot.to_string(),
                term.block_partition.to_string(),
                term.multiplicity(),
                term.contribution()
            );
        }
        println!(
            "  sum of blocks              {:.10}",
            rate_blocked(&blocks)?
        );
    }
    Ok(())
}

//! How often a random arrival pattern needs the most expensive block.

use coincidence::analysis::analyze;

fn main() -> coincidence::Result<()> {
    println!(
        "{:>3} {:>4}  {:>10}  {:>12}  {:>12}",
        "n", "bins", "witness", "P(avoid)", "tail"
    );
    for bins in [8, 16] {
        for n in [4, 6, 8, 10, 12] {
            let r = analyze(n, bins)?;
            println!(
                "{n:>3} {bins:>4}  {:>10}  {:>12.6}  {:>12.3e}",
                r.witness.to_string(),
                r.p_float,
                r.tail_exact
            );
        }
    }

    let r = analyze(5, 8)?;
    println!("\ndelay partitions of 5 particles in 8 bins:");
    for row in &r.partitions {
        let flag = if row.requires_witness {
            "  needs witness"
        } else {
            ""
        };
        println!(
            "  {:<12} {:>10}{flag}",
            row.partition.to_string(),
            row.probability.to_string()
        );
    }
    Ok(())
}

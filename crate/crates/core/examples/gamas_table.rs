//! Prints which immanants vanish for each delay partition of six particles.

fn main() -> coincidence::Result<()> {
    let n = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(6);
    print!("{}", coincidence::cli::gamas_table(n)?);
    Ok(())
}

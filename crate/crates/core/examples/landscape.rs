//! Three-photon rate over a grid of relative delays, drawn as a coarse
//! character map.

use coincidence::cli::{landscape, linspace, Engine, LandscapeAxis, RateEngine};
use coincidence::prelude::*;

fn main() -> Result<()> {
    let u = haar_unitary(4, 3)?;
    let a = u.submatrix(&"1110".parse()?, 3)?;
    let engine = RateEngine::new(Engine::Blocked, Species::Boson, DelayMatrix::ones(3), None)?;
    let values = linspace(-3.0, 3.0, 31);
    let axes = [
        LandscapeAxis {
            particle: 1,
            values: values.clone(),
        },
        LandscapeAxis {
            particle: 2,
            values: values.clone(),
        },
    ];
    let grid = landscape(&engine, &a, &[0.0, 0.0, 0.0], 1.0, &axes, 10_000)?;

    let (lo, hi) = grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.rate), hi.max(p.rate))
        });
    let shades: Vec<char> = " .:-=+*#%@".chars().collect();
    for row in grid.chunks(values.len()) {
        let line: String = row
            .iter()
            .map(|p| {
                let t = (p.rate - lo) / (hi - lo);
                shades[((t * (shades.len() - 1) as f64).round() as usize).min(shades.len() - 1)]
            })
            .collect();
        println!("{line}");
    }
    println!("rate range [{lo:.5}, {hi:.5}]");
    Ok(())
}

//! Norm persistence along a simulated trajectory.
//!
//! Solutions starting from regular data keep their regularity: L2, sup,
//! positive-order Besov and the negative-order transport norm all stay
//! bounded by a modest multiple of their initial values. The example tracks
//! the four norms to T = 2 and prints the worst max-to-initial ratio.

use qgsolve::{
    evolve_etd, persistence_tracker, random_bandlimited, BesovSpec, FilterBank, Grid2D,
    SolverConfig, TrackedNorm,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid2D::square(128)?;
    let cfg = SolverConfig::new(0.75)?;
    let bank = FilterBank::new(&grid);
    let norms = [
        TrackedNorm::Lp(2.0),
        TrackedNorm::Lp(f64::INFINITY),
        TrackedNorm::Besov(BesovSpec::new(0.5, 2.0, 2.0, true)?),
        TrackedNorm::BTilde,
    ];

    let theta0 = random_bandlimited(grid, 21, 1, 10, 1.0)?;
    let traj = evolve_etd(&theta0, &cfg, 4e-3, 500, 50)?;
    let report = persistence_tracker(&traj, &cfg, &norms, &bank, 10.0)?;

    print!("t      ");
    for s in &report.series {
        print!("  {:>14}", s.label);
    }
    println!();
    for (idx, t) in report.times.iter().enumerate() {
        print!("{t:.3}  ");
        for s in &report.series {
            print!("  {:>14.6e}", s.values[idx]);
        }
        println!();
    }

    println!(
        "\nworst max/initial ratio: {:.4} (ceiling {})",
        report.max_ratio, report.ratio_ceiling
    );
    println!("{}", report.report.summary_line());
    Ok(())
}

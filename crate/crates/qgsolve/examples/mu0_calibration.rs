//! Locate the empirical smallness threshold for the Picard iteration.
//!
//! The iteration is guaranteed to contract when the free evolution of the
//! initial data is small in the weighted sup norm. "Small" hides a constant,
//! so this example measures it: bisect on the amplitude of a fixed family of
//! band-limited seeds until the contraction predicate (ratios <= 1/2, iterates
//! within twice the free evolution) first fails, back off by a safety factor,
//! and record the smallest free-evolution norm across the family at that
//! working amplitude.
//!
//! The crate ships the result as `CalibrationRecord::reference()`; run this to
//! reproduce or refresh it. Expect a couple of minutes of FFT crunching.

use qgsolve::{calibrate_mu0, smallness_check, CalibrationRecord, CalibrationSetup, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SolverConfig::new(0.75)?;
    let setup = CalibrationSetup::reference()?;

    println!(
        "calibrating on n={} grid, {} seeds, band [{}, {}], horizon {} ({} graded nodes)",
        setup.grid.n(),
        setup.seeds.len(),
        setup.k_min,
        setup.k_max,
        setup.tg.horizon(),
        setup.tg.len() - 1,
    );

    let record = calibrate_mu0(&cfg, &setup)?;
    println!("contraction boundary : amplitude {:.6}", record.boundary_amplitude);
    println!("working amplitude    : {:.6} (safety {})", record.amplitude, setup.safety);
    println!("mu0 (empirical)      : {:.6}", record.mu0_empirical);

    // How the working data sits relative to the threshold, seed by seed.
    let tg = record.time_grid()?;
    println!("\nseed   |e^-tA theta0|_weighted   margin");
    for &seed in &record.seeds {
        let theta0 = record.seeded_data(seed)?;
        let report = smallness_check(&theta0, &cfg, &tg, &record)?;
        println!(
            "{seed:4}   {:.6}                 {:+.6}",
            report.phi0_norm, report.margin
        );
    }

    let frozen = CalibrationRecord::reference();
    let drift = (record.mu0_empirical - frozen.mu0_empirical).abs() / frozen.mu0_empirical;
    println!(
        "\nshipped reference: mu0 {:.6}, amplitude {:.6} (drift {:.2}%)",
        frozen.mu0_empirical,
        frozen.amplitude,
        100.0 * drift
    );
    Ok(())
}

//! Measure the Lebesgue-norm scaling of the convolution kernel K_t of the
//! fractional heat semigroup.
//!
//! Self-similarity forces ||K_t||_r = C_r t^{(1/alpha)(1/r - 1)}; the r = 1
//! norm is exactly 1 because the kernel integrates to one. The example fits
//! log-log slopes over t in [2^-8, 2^-2] on resolution grids sized so the
//! kernel is spectrally resolved at the smallest time and spatially decayed
//! at the largest.

use qgsolve::ops::kernel_resolution_grid;
use qgsolve::{kernel_field, kernel_scaling_report, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SolverConfig::new(0.75)?;
    let times: Vec<f64> = (0..7).map(|i| (-8.0 + i as f64).exp2()).collect();
    let grid = kernel_resolution_grid(cfg.alpha(), times[0], times[times.len() - 1])?;
    println!(
        "kernel grid: n = {}, period = {:.1}\n",
        grid.n(),
        grid.period()
    );

    println!("t           |K_t|_1 - 1      |K_t|_2        |K_t|_inf");
    for &t in &times {
        let k = kernel_field(cfg.alpha(), t, &grid)?;
        println!(
            "{t:<10.6}  {:+.3e}       {:.6e}   {:.6e}",
            k.lp(1.0)? - 1.0,
            k.l2(),
            k.linf()
        );
    }

    println!();
    for report in kernel_scaling_report(&cfg, &times)? {
        println!("{}", report.summary_line());
    }
    Ok(())
}

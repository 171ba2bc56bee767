//! The equation's built-in scale symmetry, verified on the lattice.
//!
//! If theta solves the equation then so does
//! theta_lambda(t, x) = lambda^(2 alpha - 1) theta(lambda^(2 alpha) t, lambda x).
//! With lambda = 2 on a periodic grid the spatial rescaling is an exact
//! lattice resample (every second point), so evolving the rescaled data with
//! a rescaled step must land on the resampled solution up to time
//! discretization error only.

use qgsolve::{evolve_etd, random_bandlimited, Grid2D, RealField, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 128usize;
    let grid = Grid2D::square(n)?;
    let alpha = 0.75;
    let cfg = SolverConfig::new(alpha)?;
    let lambda = 2.0f64;
    let amp = lambda.powf(2.0 * alpha - 1.0);
    let time_factor = lambda.powf(2.0 * alpha);
    println!("lambda = {lambda}: amplitude factor {amp:.6}, time factor {time_factor:.6}");

    let theta0 = random_bandlimited(grid, 77, 1, 6, 0.3)?;
    let rescale = |f: &RealField| -> qgsolve::Result<RealField> {
        let src = f.samples();
        let mut out = vec![0.0; grid.len()];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = amp * src[((2 * i) % n) * n + (2 * j) % n];
            }
        }
        RealField::from_samples(grid, out)
    };

    let t_base = 0.4;
    let steps = 256usize;
    let base = evolve_etd(&theta0, &cfg, t_base / steps as f64, steps, steps)?;
    let scaled = evolve_etd(
        &rescale(&theta0)?,
        &cfg,
        t_base / time_factor / steps as f64,
        steps,
        steps,
    )?;

    let expect = rescale(base.last_field())?;
    let got = scaled.last_field();
    let rel = got.sub(&expect)?.l2() / expect.l2();
    println!(
        "base solution at t = {t_base}, rescaled solution at t = {:.6}",
        t_base / time_factor
    );
    println!("relative L2 gap between the two routes: {rel:.3e}");
    assert!(rel < 1e-3);
    Ok(())
}

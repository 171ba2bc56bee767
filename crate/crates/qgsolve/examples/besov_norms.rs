//! Tour of the dyadic frequency decomposition and the norms built on it.
//!
//! A band-limited random field is split into Littlewood-Paley blocks; the
//! blocks must sum back to the field, and weighting their Lebesgue norms
//! gives the Besov scale. The last section checks the heat-semigroup
//! characterization: for s < 0 the weighted sup of t^{-s/(2 alpha)} ||e^{-tA} f||_p
//! is equivalent to the homogeneous Besov norm, with a ratio that stays in a
//! narrow band across seeds.

use qgsolve::{
    besov_norm, btilde_norm, lp_block, random_bandlimited, semigroup_characterization, BesovSpec,
    FilterBank, Grid2D, SolverConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid2D::square(128)?;
    let cfg = SolverConfig::new(0.75)?;
    let bank = FilterBank::new(&grid);
    let f = random_bandlimited(grid, 42, 1, 24, 1.0)?;

    println!(
        "filter bank: blocks j = {}..={}, partition residual {:.2e} (inhomogeneous), {:.2e} (homogeneous)",
        bank.j_min(),
        bank.j_max(),
        bank.partition_residual(),
        bank.homogeneous_residual(),
    );

    println!("\nblock   |Delta_j f|_2    |Delta_j f|_inf");
    let mut sum = None;
    for j in bank.j_min()..=bank.j_max() {
        let block = lp_block(&f, &bank, j)?;
        if block.l2() > 1e-14 {
            println!("{j:>4}    {:.6e}    {:.6e}", block.l2(), block.linf());
        }
        sum = Some(match sum {
            None => block,
            Some(acc) => block.add(&acc)?,
        });
    }
    // Blocks plus the low-pass recover the field.
    let low = qgsolve::besov::low_pass(&f, &bank)?;
    let recovered = sum.unwrap().add(&low)?;
    println!("reconstruction error: {:.2e}", recovered.max_abs_diff(&f)?);

    println!("\nnorms of the same field:");
    for spec in [
        BesovSpec::new(0.5, 2.0, 2.0, false)?,
        BesovSpec::new(0.5, 2.0, 2.0, true)?,
        BesovSpec::new(-0.5, f64::INFINITY, f64::INFINITY, true)?,
    ] {
        println!("  {:<22} {:.6e}", spec.label(), besov_norm(&f, &spec, &bank)?);
    }
    println!("  {:<22} {:.6e}", "Btilde (alpha)", btilde_norm(&f, &cfg, &bank)?);

    // Semigroup route to the homogeneous negative-order norm.
    let s = -0.5;
    let spec = BesovSpec::new(s, f64::INFINITY, f64::INFINITY, true)?;
    let t_nodes: Vec<f64> = (0..60).map(|i| 1e-3 * (1e4f64).powf(i as f64 / 59.0)).collect();
    println!("\nseed   semigroup value   block norm   ratio");
    for seed in 0..5u64 {
        let g = random_bandlimited(grid, 500 + seed, 1, 32, 1.0)?;
        let (sup, _) = semigroup_characterization(&g, s, f64::INFINITY, &cfg, &t_nodes)?;
        let block = besov_norm(&g, &spec, &bank)?;
        println!("{seed:>4}   {sup:.6e}      {block:.6e}   {:.4}", sup / block);
    }
    Ok(())
}

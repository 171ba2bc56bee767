//! The singular Gronwall lemma, numerically.
//!
//! Functions satisfying f(t) <= c1 + c2 ∫ (t-s)^{-kappa} f(s) ds obey the
//! closed bound 2 c1 e^{rho t} with rho = (2 c2 Gamma(1-kappa))^{1/(1-kappa)}.
//! For kappa = 1/2 and c1 = c2 = 1 the rate is exactly 4 pi, and the equality
//! solution of the Volterra equation has the closed form
//! e^{pi t} (1 + erf(sqrt(pi t))), giving two independent checks: the product
//! integration scheme must match the closed form, and the solution must stay
//! below the bound.

use qgsolve::{volterra_solve, GronwallParams, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GronwallParams::new(1.0, 1.0, 0.5)?;
    println!(
        "rho = {:.12} (4 pi = {:.12})",
        params.rho(),
        4.0 * std::f64::consts::PI
    );

    let tg = TimeGrid::graded(1.0, 400, 2.0)?;
    let f = volterra_solve(&params, tg.nodes())?;

    println!("\nt       f(t)          closed form   bound 2e^(rho t)   f/bound");
    for idx in (0..tg.len()).step_by(50) {
        let t = tg.nodes()[idx];
        let exact = (std::f64::consts::PI * t).exp()
            * (1.0 + libm::erf((std::f64::consts::PI * t).sqrt()));
        println!(
            "{t:.3}   {:.6e}   {exact:.6e}   {:.6e}      {:.3}",
            f[idx],
            params.bound(t),
            f[idx] / params.bound(t)
        );
    }

    let worst = tg
        .nodes()
        .iter()
        .zip(&f)
        .map(|(t, v)| v / params.bound(*t))
        .fold(0.0f64, f64::max);
    println!("\nworst f/bound ratio on [0, 1]: {worst:.4} (must stay below 1)");
    Ok(())
}

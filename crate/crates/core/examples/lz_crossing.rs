//! Single Landau-Zener crossing: amplitude, Stokes phase and propagator.

use spinorlz::crossing::{self, LzParams};

fn main() -> spinorlz::Result<()> {
    let params = LzParams::new(1.0, 0.8)?;
    let lambda = params.lambda();
    let zener = crossing::zener_time_lz(&params);
    println!("Lambda = {lambda:.4}  regime = {}  Zener time = {:.4}", zener.regime.as_str(), zener.time);

    let u = crossing::lz_propagator(lambda)?;
    println!("alpha = {:.6}  beta = {:.6}", u.alpha, u.beta);
    println!("diabatic transition probability R^2 = {:.6}", u.transition_probability());

    println!("\n{:>8} {:>10} {:>10}", "Lambda", "R", "phi");
    for l in [0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 20.0] {
        println!("{l:>8.2} {:>10.6} {:>10.6}", crossing::lz_amplitude(l)?, crossing::lz_phase(l)?);
    }
    Ok(())
}

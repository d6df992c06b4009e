//! Spin-1 interaction phases accumulated between the crossings.

use spinorlz::spinor_gp::{self, SmaState, SpeciesParams};

fn main() -> spinorlz::Result<()> {
    for name in ["rb87", "na23"] {
        let s = spinor_gp::default_species(name)?;
        println!("{name}: gamma = {:.2} 1/s  ({})", spinor_gp::spin_mixing_rate_bound(&s)?, s.citation);
    }

    let rb = SpeciesParams::rb87();
    let initial = SmaState::from_populations([0.25, 0.5, 0.25], [0.0, 0.3, 0.0], 1e14)?;
    let traj = spinor_gp::integrate_sma(&initial, &rb, 24e-6, 1e-12)?;
    println!(
        "\n{} steps, population change {:.2e}, norm drift {:.1e}, magnetization drift {:.1e}",
        traj.states.len(),
        traj.max_population_change(),
        traj.max_norm_drift,
        traj.max_magnetization_drift
    );
    let gp = spinor_gp::extract_gp_propagator(&traj)?;
    println!("theta_1 = {:.6e}  theta_-1 = {:.6e}", gp.phases.theta1, gp.phases.theta_m1);
    Ok(())
}

//! Double crossing of a parabolic sweep: dynamical phase and Stückelberg fringes.

use spinorlz::crossing::{self, ParabolicParams};

fn main() -> spinorlz::Result<()> {
    let p = ParabolicParams::new(2.0, 5.0)?;
    let d = crossing::crossing_diagnostics(&p);
    println!(
        "eps = {}  mu = {}  Lambda = {:.4}  tau_c = {:.4}  tau_c/tau_Z = {:.2} ({})",
        p.epsilon,
        p.mu,
        p.lambda(),
        d.tau_c,
        d.ica_margin,
        d.regime.as_str()
    );
    let sigma = crossing::dynamical_phase_sigma(&p)?;
    println!("sigma = {sigma:.10}  (diabatic estimate {:.4})", crossing::sigma_diabatic(&p));
    let u = crossing::composite_alpha_beta(&p)?;
    println!("alpha = {:.6}  beta = {:.6}", u.alpha, u.beta);
    println!("P(1->2) = {:.6}  P(1->3) = {:.6}", crossing::transition_prob_2level(&p)?, crossing::transition_prob_1_to_3(&p)?);

    println!("\nfringes at fixed eps*mu = 10:");
    println!("{:>6} {:>10} {:>10} {:>10}", "mu", "sigma", "P2", "P3");
    for i in 0..=12 {
        let mu = 3.0 + 0.5 * i as f64;
        let q = ParabolicParams::new(10.0 / mu, mu)?;
        println!(
            "{mu:>6.2} {:>10.4} {:>10.6} {:>10.6}",
            crossing::dynamical_phase_sigma(&q)?,
            crossing::transition_prob_2level(&q)?,
            crossing::transition_prob_1_to_3(&q)?
        );
    }
    Ok(())
}

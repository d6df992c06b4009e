//! Laboratory fields mapped to the dimensionless sweep parameters.

use spinorlz::field_mapping::{self, LabFields};

fn main() -> spinorlz::Result<()> {
    let fields = LabFields::from_toml("B_x_gauss = 0.060\nB_z0_gauss = 0.300\nBdot_gauss_per_s = 5e4\ng_F = 0.5\n")?;
    let m = field_mapping::map_fields(&fields)?;
    println!("mu = {}  eps*mu = {:.4}  eps = {:.4}", m.mu, m.eps_mu, m.epsilon);
    println!("t_c = {:.2} us  t_z = {:.3} us  ({})", m.t_c * 1e6, m.t_z * 1e6, m.regime.as_str());
    println!("R = {:.5}  phi = {:.5}  sigma = {:.4}", m.r, m.phi, m.sigma);
    let ica = field_mapping::validate_ica_default(&m)?;
    println!("t_c/t_z = {:.2} (needs {}): {}", ica.ratio, ica.margin, if ica.passes { "ok" } else { "too close" });
    Ok(())
}

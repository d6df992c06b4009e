//! Lifting a two-level propagator to spin F and checking the group property.

use spinorlz::crossing;
use spinorlz::linalg::compose;
use spinorlz::lift;

fn main() -> spinorlz::Result<()> {
    let u = crossing::lz_propagator(0.6)?;
    let v = crossing::lz_propagator(1.7)?;
    for levels in [2, 3, 5, 8] {
        let m = lift(&u, levels)?;
        let group = lift(&u.compose(&v), levels)?.max_abs_diff(&compose(&m, &lift(&v, levels)?)?);
        println!(
            "n = {levels}: unitarity defect {:.1e}, homomorphism defect {group:.1e}, P(top -> bottom) = {:.6e}",
            m.unitarity_defect(),
            m[(levels - 1, 0)].norm_sqr()
        );
    }

    println!("\nspin-1 transition probabilities |U_ij|^2:");
    for row in lift(&u, 3)?.populations() {
        println!("  {}", row.iter().map(|p| format!("{p:.6}")).collect::<Vec<_>>().join("  "));
    }
    Ok(())
}
